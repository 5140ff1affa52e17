use std::fs;

use anyhow::{bail, Context, Result};
use latitude_core::model::{CodeJson, FiberedMapJson};
use latitude_core::pl::PLMapJson;
use latitude_core::{canonical_realization, BandCode, FiberedMap, PLMap, SymbolicAngle};

/// Whatever the user pointed `--code`/`--file` at.
pub enum Source {
    Code(BandCode, Option<SymbolicAngle>),
    Fibered(FiberedMap),
    Interval(PLMap),
}

impl Source {
    pub fn parse(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).context("input is not valid JSON")?;
        if value.get("degrees").is_some() {
            let j: CodeJson = serde_json::from_value(value)?;
            let (code, rotation) = j.into_parts()?;
            code.validate()?;
            return Ok(Source::Code(code, rotation));
        }
        if value.get("fibers").is_some() {
            let j: FiberedMapJson = serde_json::from_value(value)?;
            return Ok(Source::Fibered(FiberedMap::try_from(&j)?));
        }
        if value.get("breakpoints").is_some() {
            let j: PLMapJson = serde_json::from_value(value)?;
            return Ok(Source::Interval(PLMap::try_from(&j)?));
        }
        bail!("expected a band code, a fibered map, or a PL map")
    }

    pub fn code(&self) -> Result<&BandCode> {
        match self {
            Source::Code(c, _) => Ok(c),
            _ => bail!("this command needs a band code"),
        }
    }

    /// The realization used for counting; an explicit `--rotation` beats the
    /// one stored in the code JSON, which beats the irrational default.
    pub fn fibered(&self, rotation: Option<&SymbolicAngle>) -> Result<FiberedMap> {
        match self {
            Source::Code(c, stored) => {
                let rot = rotation.or(stored.as_ref()).cloned().unwrap_or_else(SymbolicAngle::irr);
                Ok(canonical_realization(c, &rot)?)
            }
            Source::Fibered(f) => Ok(f.clone()),
            Source::Interval(_) => bail!("this command needs fiber data: pass a band code or a fibered map"),
        }
    }

    pub fn interval(&self) -> Result<PLMap> {
        match self {
            Source::Interval(p) => Ok(p.clone()),
            Source::Fibered(f) => Ok(f.phi().clone()),
            Source::Code(c, _) => Ok(canonical_realization(c, &SymbolicAngle::irr())?.phi().clone()),
        }
    }
}

pub fn sources(codes: &[String], file: Option<&str>) -> Result<Vec<Source>> {
    let mut out = codes.iter().map(|c| Source::parse(c)).collect::<Result<Vec<_>>>()?;
    if let Some(path) = file {
        let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
        out.push(Source::parse(&text)?);
    }
    Ok(out)
}

pub fn single(codes: &[String], file: Option<&str>) -> Result<Source> {
    let mut all = sources(codes, file)?;
    match all.len() {
        0 => bail!("pass a map with --code or --file"),
        1 => Ok(all.remove(0)),
        _ => bail!("this command takes exactly one map"),
    }
}

/// Seventeen significant digits, without exponent notation for ordinary magnitudes.
pub fn sig17(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (16 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}
