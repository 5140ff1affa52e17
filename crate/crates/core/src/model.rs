//! Band codes and the fibered sphere maps that realize them.
//!
//! A point of the sphere is charted as `(h, α)`: `h ∈ [0,1]` is the height of
//! its latitude (0 is the Southpole, 1 the Northpole) and `α` the angle along
//! the latitude. A latitude-preserving map sends `L(h)` into `L(φ(h))` by a
//! circle map whose degree is constant on each band.

use std::f64::consts::TAU;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::angle::SymbolicAngle;
use crate::error::{Error, Result};
use crate::pl::{BandInterval, PLMap, PLMapJson, Symbol};
use crate::rational::{one, q, zero, Q};

/// The symbolic description `(n0; d1, …, dN)` of a latitude-preserving map.
///
/// `n0 = 0` means the first band ascends (the Southpole is fixed); `n0 = 1`
/// flips every band's direction. Directions alternate from there.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BandCode {
    pub n0: i64,
    pub degrees: Vec<i64>,
}

impl BandCode {
    pub fn new(n0: i64, degrees: Vec<i64>) -> Self {
        Self { n0, degrees }
    }

    pub fn validate(&self) -> Result<()> {
        if self.degrees.is_empty() {
            return Err(Error::EmptyCode);
        }
        if self.n0 != 0 && self.n0 != 1 {
            return Err(Error::BadPoleFlag(self.n0));
        }
        Ok(())
    }

    pub fn legs(&self) -> usize {
        self.degrees.len()
    }

    /// Whether leg `i` (0-based) ascends.
    pub fn ascends(&self, i: usize) -> bool {
        // leg 1 ascends iff n0 = 0
        i.is_multiple_of(2) == (self.n0 == 0)
    }

    /// Height of the image of the pole at height `pole` (0 or 1).
    pub fn pole_image(&self, pole: u8) -> u8 {
        let start = self.n0 as u8;
        if pole == 0 {
            start
        } else {
            start ^ (self.legs() % 2) as u8
        }
    }

    /// Requires every `|d_i| <= 1`.
    pub fn require_unit_degrees(&self) -> Result<()> {
        match self.degrees.iter().position(|d| d.abs() >= 2) {
            Some(i) => Err(Error::DegreeTooLarge { leg: i + 1, degree: self.degrees[i] }),
            None => Ok(()),
        }
    }
}

impl std::fmt::Display for BandCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let ds: Vec<String> = self.degrees.iter().map(i64::to_string).collect();
        write!(f, "({};{})", self.n0, ds.join(","))
    }
}

pub fn validate(code: &BandCode) -> Result<()> {
    code.validate()
}

/// JSON form `{"n0": 0, "degrees": [1,-1], "rotation_turns": "irr"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeJson {
    pub n0: i64,
    pub degrees: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation_turns: Option<String>,
}

impl CodeJson {
    pub fn parse(s: &str) -> Result<(BandCode, Option<SymbolicAngle>)> {
        let j: CodeJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        j.into_parts()
    }

    pub fn into_parts(self) -> Result<(BandCode, Option<SymbolicAngle>)> {
        let rotation = self.rotation_turns.as_deref().map(SymbolicAngle::parse).transpose()?;
        Ok((BandCode::new(self.n0, self.degrees), rotation))
    }

    pub fn from_code(code: &BandCode, rotation: Option<&SymbolicAngle>) -> Self {
        Self {
            n0: code.n0,
            degrees: code.degrees.clone(),
            rotation_turns: rotation.map(SymbolicAngle::to_string),
        }
    }
}

/// The circle map `α ↦ degree·α + offset` (mod 2π).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberAction {
    pub degree: i64,
    pub offset: SymbolicAngle,
}

impl FiberAction {
    pub fn new(degree: i64, offset: SymbolicAngle) -> Self {
        Self { degree, offset }
    }

    pub fn apply(&self, alpha: f64) -> f64 {
        (self.degree as f64 * alpha + self.offset.radians()).rem_euclid(TAU)
    }

    /// `self ∘ inner`; `None` on coefficient overflow.
    pub fn after(&self, inner: &FiberAction) -> Option<FiberAction> {
        Some(FiberAction {
            degree: self.degree.checked_mul(inner.degree)?,
            offset: inner.offset.scale(self.degree)?.add(&self.offset)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint {
    pub h: Q,
    pub alpha: f64,
}

impl SpherePoint {
    pub fn new(h: Q, alpha: f64) -> Self {
        let alpha = if h.is_zero() || h.is_one() { 0.0 } else { alpha.rem_euclid(TAU) };
        Self { h, alpha }
    }

    pub fn south() -> Self {
        Self::new(zero(), 0.0)
    }

    pub fn north() -> Self {
        Self::new(one(), 0.0)
    }

    pub fn is_pole(&self) -> bool {
        self.h.is_zero() || self.h.is_one()
    }
}

/// A latitude-preserving endomorphism: latitude map plus a circle action per band.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberedMap {
    phi: PLMap,
    bands: Vec<(BandInterval, FiberAction)>,
    pole_images: [u8; 2],
    fbands: Vec<(f64, f64, f64, f64)>,
}

impl FiberedMap {
    /// `actions[i]` is the circle action on the `i`-th component of `φ^{-1}(0,1)`.
    pub fn new(phi: PLMap, actions: Vec<FiberAction>) -> Result<Self> {
        let image = |h: Q| -> Result<u8> {
            let y = phi.eval(&h);
            if y.is_zero() {
                Ok(0)
            } else if y.is_one() {
                Ok(1)
            } else {
                Err(Error::InvalidFiberedMap(format!("pole at height {h} is sent to height {y}")))
            }
        };
        let pole_images = [image(zero())?, image(one())?];
        let intervals = phi.band_intervals();
        if intervals.len() != actions.len() {
            return Err(Error::InvalidFiberedMap(format!(
                "latitude map has {} bands but {} fiber actions were given",
                intervals.len(),
                actions.len()
            )));
        }
        let bands: Vec<_> = intervals.into_iter().zip(actions).collect();
        let fbands = bands
            .iter()
            .map(|(b, a)| {
                (crate::rational::to_f64(&b.lo), crate::rational::to_f64(&b.hi), a.degree as f64, a.offset.radians())
            })
            .collect();
        Ok(Self { phi, bands, pole_images, fbands })
    }

    pub fn phi(&self) -> &PLMap {
        &self.phi
    }

    pub fn bands(&self) -> &[(BandInterval, FiberAction)] {
        &self.bands
    }

    /// Images of the Southpole and Northpole (0 or 1 each).
    pub fn pole_images(&self) -> [u8; 2] {
        self.pole_images
    }

    pub fn band_intervals(&self) -> Vec<BandInterval> {
        self.bands.iter().map(|(b, _)| b.clone()).collect()
    }

    /// 0-based index of the band containing height `h`.
    pub fn band_of(&self, h: &Q) -> Option<usize> {
        let i = self.bands.partition_point(|(b, _)| b.hi <= *h);
        self.bands.get(i).filter(|(b, _)| b.contains(h)).map(|_| i)
    }

    pub fn action(&self, band: usize) -> &FiberAction {
        &self.bands[band].1
    }

    pub fn eval(&self, p: &SpherePoint) -> SpherePoint {
        if p.h.is_zero() {
            return pole_point(self.pole_images[0]);
        }
        if p.h.is_one() {
            return pole_point(self.pole_images[1]);
        }
        let y = self.phi.eval(&p.h);
        if y.is_zero() || y.is_one() {
            return SpherePoint::new(y, 0.0);
        }
        let band = self.band_of(&p.h).expect("heights with interior image lie in a band");
        SpherePoint::new(y, self.bands[band].1.apply(p.alpha))
    }

    /// Floating-point evaluation on the `(h, α)` chart.
    pub fn eval_f64(&self, h: f64, alpha: f64) -> (f64, f64) {
        if h <= 0.0 {
            return (self.pole_images[0] as f64, 0.0);
        }
        if h >= 1.0 {
            return (self.pole_images[1] as f64, 0.0);
        }
        let y = self.phi.eval_f64(h);
        if y <= 0.0 || y >= 1.0 {
            return (y.round(), 0.0);
        }
        let i = self.fbands.partition_point(|b| b.1 <= h);
        match self.fbands.get(i) {
            Some(&(lo, hi, k, off)) if lo < h && h < hi => (y, (k * alpha + off).rem_euclid(TAU)),
            // rounding put us on a cut point whose image is a pole
            _ => (y.round(), 0.0),
        }
    }

    /// Exact `outer ∘ inner` as a fibered map.
    pub fn compose(outer: &FiberedMap, inner: &FiberedMap) -> Result<FiberedMap> {
        let phi = crate::pl::compose_pl(&outer.phi, &inner.phi)?;
        let actions = phi
            .band_intervals()
            .iter()
            .map(|b| {
                let m = b.midpoint();
                let i = inner.band_of(&m).ok_or_else(|| {
                    Error::InvalidFiberedMap(format!("composite band at {m} has no inner band"))
                })?;
                let y = inner.phi.eval(&m);
                let j = outer.band_of(&y).ok_or_else(|| {
                    Error::InvalidFiberedMap(format!("composite band at {m} has no outer band"))
                })?;
                outer.bands[j]
                    .1
                    .after(&inner.bands[i].1)
                    .ok_or_else(|| Error::ResourceLimit("fiber coefficient overflow".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        FiberedMap::new(phi, actions)
    }

    pub fn symbol_of(&self, h: &Q) -> Symbol {
        PLMap::symbol_of(&self.band_intervals(), h)
    }
}

fn pole_point(h: u8) -> SpherePoint {
    if h == 0 {
        SpherePoint::south()
    } else {
        SpherePoint::north()
    }
}

pub fn eval_map(f: &FiberedMap, p: &SpherePoint) -> SpherePoint {
    f.eval(p)
}

/// The good representative of `code` composed with the rotation `R` by `rotation`.
///
/// Legs are linear over `[i/N, (i+1)/N]`; band `i` acts by `α ↦ d_i (α + rotation)`.
pub fn canonical_realization(code: &BandCode, rotation: &SymbolicAngle) -> Result<FiberedMap> {
    code.validate()?;
    let phi = PLMap::sawtooth(code.n0 == 1, code.legs());
    let actions = code
        .degrees
        .iter()
        .map(|&d| {
            rotation
                .scale(d)
                .map(|off| FiberAction::new(d, off))
                .ok_or_else(|| Error::ResourceLimit("rotation coefficient overflow".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    FiberedMap::new(phi, actions)
}

/// JSON form of a general fibered map:
/// `{"breakpoints": [["0","0"],["1/2","1/4"],["1","1"]], "fibers": [{"degree": 2, "offset_turns": "0"}]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiberedMapJson {
    pub breakpoints: Vec<(String, String)>,
    pub fibers: Vec<FiberJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiberJson {
    pub degree: i64,
    #[serde(default = "zero_turns")]
    pub offset_turns: String,
}

fn zero_turns() -> String {
    "0".into()
}

impl TryFrom<&FiberedMapJson> for FiberedMap {
    type Error = Error;

    fn try_from(j: &FiberedMapJson) -> Result<Self> {
        let phi = PLMap::try_from(&PLMapJson { breakpoints: j.breakpoints.clone() })?;
        let actions = j
            .fibers
            .iter()
            .map(|f| Ok(FiberAction::new(f.degree, SymbolicAngle::parse(&f.offset_turns)?)))
            .collect::<Result<Vec<_>>>()?;
        FiberedMap::new(phi, actions)
    }
}

/// `φ = (0,0), (1/2, 1/4), (1,1)` with one band of degree 2: a PL stand-in for
/// `z ↦ 2z²/|z|`, whose only periodic points are the two poles.
pub fn lipschitz_counterexample() -> FiberedMap {
    let phi = PLMap::new(vec![(zero(), zero()), (q(1, 2), q(1, 4)), (one(), one())]).expect("valid map");
    FiberedMap::new(phi, vec![FiberAction::new(2, SymbolicAngle::zero())]).expect("valid fibered map")
}
