mod input;

use std::fmt::Write as _;
use std::fs;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand, ValueEnum};
use latitude_core::catalog::run_examples;
use latitude_core::code::LedgerJson;
use latitude_core::fiber::ReportJson;
use latitude_core::model::CodeJson;
use latitude_core::pl::{entropy_estimate, lap_count};
use latitude_core::verify::{run_suite, Limits, Suite};
use latitude_core::{
    classify_poles, compose_codes, count_periodic, fixed_point_lower_bound, global_degree, grid_oracle,
    invariant_latitude_guarantee, weak_lower_bound, Error, SymbolicAngle,
};
use serde_json::json;

use crate::input::{sig17, single, sources};

#[derive(Parser)]
#[command(name = "latitude", version, about = "Periodic points of latitude-preserving sphere maps")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,

    /// Band code or map as inline JSON, e.g. '{"n0":0,"degrees":[1,-1]}'
    #[arg(long, global = true)]
    code: Vec<String>,

    /// Read the map JSON from a file
    #[arg(long, global = true)]
    file: Option<String>,

    /// Single iterate
    #[arg(long, global = true)]
    n: Option<usize>,

    /// Largest iterate (tables run 1..=max-n)
    #[arg(long, global = true)]
    max_n: Option<usize>,

    #[arg(long, global = true)]
    max_legs: Option<usize>,

    #[arg(long, global = true)]
    max_degree: Option<i64>,

    /// Fiber rotation in turns ("p/q") or "irr"
    #[arg(long, global = true)]
    rotation: Option<String>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<String>,

    /// Seconds before a verification suite stops with a partial report
    #[arg(long, global = true)]
    time_budget: Option<f64>,

    #[arg(long, global = true)]
    threads: Option<usize>,

    #[arg(long, global = true)]
    samples: Option<usize>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Grid oracle samples per axis
    #[arg(long, global = true)]
    res: Option<usize>,

    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Global degree and pole case of a code
    Degree,
    /// N_n for n = 1..max-n (or just --n)
    Count,
    /// Leg census ledger
    Census,
    /// Lower bound on N_1 from the census
    Bound,
    /// Code of outer∘inner: pass --code twice, outer first
    Compose,
    /// Topological entropy estimate of the height map
    Entropy,
    /// Run a verification suite
    Verify {
        #[arg(value_parser = parse_suite)]
        suite: Suite,
    },
    /// The worked examples end to end
    Examples,
    /// Compare the floating-point grid oracle with the exact count
    Oracle,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Result of a subcommand: rendered output plus whether its checks passed.
struct Outcome {
    text: String,
    pass: bool,
    partial: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, pass: true, partial: false }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(out) => {
            let written = match &cli.out {
                Some(path) => fs::write(path, &out.text).map_err(anyhow::Error::from),
                None => {
                    print!("{}", out.text);
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            if out.partial {
                ExitCode::from(3)
            } else if out.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(Error::ResourceLimit(_)) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    let rotation = cli.rotation.as_deref().map(SymbolicAngle::parse).transpose()?;
    match &cli.cmd {
        Cmd::Degree => degree(cli),
        Cmd::Count => count(cli, rotation.as_ref()),
        Cmd::Census => census(cli),
        Cmd::Bound => bound(cli),
        Cmd::Compose => compose(cli),
        Cmd::Entropy => entropy(cli),
        Cmd::Verify { suite } => verify(cli, *suite),
        Cmd::Examples => examples(cli),
        Cmd::Oracle => oracle(cli, rotation.as_ref()),
    }
}

fn degree(cli: &Cli) -> Result<Outcome> {
    let src = single(&cli.code, cli.file.as_deref())?;
    let code = src.code()?;
    let d = global_degree(code)?;
    let poles = classify_poles(code)?;
    Ok(Outcome::ok(match cli.format {
        Format::Json => format!("{}\n", json!({"degree": d, "pole_case": poles.tag, "p": poles.p})),
        Format::Csv => format!("degree,pole_case,p\n{d},{:?},{}\n", poles.tag, poles.p),
        Format::Text => format!("{d}\npole case: {poles}\n"),
    }))
}

fn n_range(cli: &Cli, default_max: usize) -> Result<Vec<usize>> {
    match (cli.n, cli.max_n) {
        (Some(_), Some(_)) => bail!("pass either --n or --max-n"),
        (Some(0), _) | (_, Some(0)) => bail!("n must be at least 1"),
        (Some(n), None) => Ok(vec![n]),
        (None, m) => Ok((1..=m.unwrap_or(default_max)).collect()),
    }
}

fn count(cli: &Cli, rotation: Option<&SymbolicAngle>) -> Result<Outcome> {
    let src = single(&cli.code, cli.file.as_deref())?;
    let f = src.fibered(rotation)?;
    let ns = n_range(cli, 5)?;
    let mut rows = Vec::new();
    for &n in &ns {
        match count_periodic(&f, n) {
            Ok(r) => rows.push((n, Some(r), None)),
            Err(e @ (Error::DegenerateFiber { .. } | Error::DegenerateDiagonal { .. })) => {
                rows.push((n, None, Some(e.to_string())))
            }
            Err(e) => return Err(e.into()),
        }
    }
    let rational_rotation = match &src {
        input::Source::Code(_, stored) => {
            rotation.or(stored.as_ref()).is_some_and(|r| !r.has_irrational_part())
        }
        _ => false,
    };
    if rational_rotation && rows.iter().any(|r| r.1.is_none()) {
        eprintln!("hint: a rational rotation can make whole latitudes periodic; try --rotation irr");
    }

    let mut text = String::new();
    match cli.format {
        Format::Json => {
            let items: Vec<serde_json::Value> = rows
                .iter()
                .map(|(n, r, why)| match r {
                    Some(r) => serde_json::to_value(ReportJson::from(r)).expect("report serializes"),
                    None => json!({"n": n, "degenerate": why}),
                })
                .collect();
            let v = if items.len() == 1 { items[0].clone() } else { serde_json::Value::Array(items) };
            writeln!(text, "{v}")?;
        }
        Format::Csv => {
            writeln!(text, "n,count")?;
            for (n, r, _) in &rows {
                writeln!(text, "{n},{}", r.as_ref().map_or("inf".to_string(), |r| r.total.to_string()))?;
            }
        }
        Format::Text => {
            for (n, r, why) in &rows {
                match (r, why) {
                    (Some(r), _) => writeln!(text, "{n}\t{}", r.total)?,
                    (None, Some(why)) => writeln!(text, "{n}\tinf\t{why}")?,
                    (None, None) => unreachable!(),
                }
            }
        }
    }
    Ok(Outcome::ok(text))
}

fn census(cli: &Cli) -> Result<Outcome> {
    let src = single(&cli.code, cli.file.as_deref())?;
    let ledger = LedgerJson::for_code(src.code()?)?;
    Ok(Outcome::ok(match cli.format {
        Format::Json => format!("{}\n", serde_json::to_string(&ledger)?),
        Format::Csv => format!(
            "a,b,c,d,e,N,p,r,slack,degree,bound\n{},{},{},{},{},{},{},{},{},{},{}\n",
            ledger.a,
            ledger.b,
            ledger.c,
            ledger.d,
            ledger.e,
            ledger.legs,
            ledger.p,
            ledger.r,
            ledger.slack,
            ledger.degree,
            ledger.bound
        ),
        Format::Text => format!(
            "a={} b={} c={} d={} e={} N={} p={} r={} slack={} degree={} bound={}\n",
            ledger.a,
            ledger.b,
            ledger.c,
            ledger.d,
            ledger.e,
            ledger.legs,
            ledger.p,
            ledger.r,
            ledger.slack,
            ledger.degree,
            ledger.bound
        ),
    }))
}

fn bound(cli: &Cli) -> Result<Outcome> {
    let src = single(&cli.code, cli.file.as_deref())?;
    let code = src.code()?;
    let (b, w) = (fixed_point_lower_bound(code)?, weak_lower_bound(code)?);
    Ok(Outcome::ok(match cli.format {
        Format::Json => format!("{}\n", json!({"bound": b, "weak_bound": w})),
        Format::Csv => format!("bound,weak_bound\n{b},{w}\n"),
        Format::Text => format!("{b}\n"),
    }))
}

fn compose(cli: &Cli) -> Result<Outcome> {
    let srcs = sources(&cli.code, cli.file.as_deref())?;
    let [outer, inner] = srcs.as_slice() else {
        bail!("compose takes two codes: --code OUTER --code INNER");
    };
    let c = compose_codes(outer.code()?, inner.code()?)?;
    Ok(Outcome::ok(match cli.format {
        Format::Text => format!("{c}\n"),
        _ => format!("{}\n", serde_json::to_string(&CodeJson::from_code(&c, None))?),
    }))
}

fn entropy(cli: &Cli) -> Result<Outcome> {
    let src = single(&cli.code, cli.file.as_deref())?;
    let phi = src.interval()?;
    let n = cli.n.unwrap_or(10);
    if n == 0 {
        bail!("n must be at least 1");
    }
    let h = entropy_estimate(&phi, n)?;
    Ok(Outcome::ok(match cli.format {
        Format::Json => format!("{}\n", json!({"n": n, "laps": lap_count(&phi), "entropy": sig17(h)})),
        Format::Csv => format!("n,entropy\n{n},{}\n", sig17(h)),
        Format::Text => format!("{}\n", sig17(h)),
    }))
}

fn verify(cli: &Cli, suite: Suite) -> Result<Outcome> {
    let mut limits = Limits::for_suite(suite);
    if let Some(v) = cli.max_legs {
        limits.max_legs = v;
    }
    if let Some(v) = cli.max_n {
        limits.max_n = v;
    }
    if let Some(v) = cli.max_degree {
        limits.max_degree = v;
    }
    if let Some(v) = cli.samples {
        limits.samples = v;
    }
    if let Some(v) = cli.seed {
        limits.seed = v;
    }
    if let Some(v) = cli.res {
        limits.resolution = v;
    }
    if let Some(v) = cli.tol {
        limits.tol = v;
    }
    if let Some(s) = cli.time_budget {
        if !(s >= 0.0 && s.is_finite()) {
            bail!("--time-budget must be a non-negative number of seconds");
        }
        limits.time_budget = Some(Duration::from_secs_f64(s));
    }
    if limits.resolution < 16 {
        bail!("--res must be at least 16");
    }

    let report = run_suite(suite, &limits);
    let verdict = if !report.complete {
        "PARTIAL"
    } else if report.passed() {
        "PASS"
    } else {
        "FAIL"
    };
    let mut text = String::new();
    match cli.format {
        Format::Json => {
            let mut v = serde_json::to_value(&report)?;
            v["verdict"] = json!(verdict);
            writeln!(text, "{v}")?;
        }
        Format::Csv => {
            writeln!(text, "code,n,detail")?;
            for f in &report.failures {
                writeln!(text, "\"{}\",{},\"{}\"", f.code, f.n, f.detail.replace('"', "'"))?;
            }
        }
        Format::Text => {
            writeln!(
                text,
                "{verdict} {suite}: {} checks, {} with infinitely many fixed points, {} failures, {} skipped, {} ms",
                report.checked,
                report.infinite,
                report.failures.len(),
                report.skipped,
                report.elapsed_ms
            )?;
            for f in &report.failures {
                writeln!(text, "  {} n={}: {}", f.code, f.n, f.detail)?;
            }
        }
    }
    Ok(Outcome { text, pass: report.passed(), partial: !report.complete })
}

fn examples(cli: &Cli) -> Result<Outcome> {
    let n_max = cli.max_n.unwrap_or(6);
    let rows = run_examples(n_max)?;
    let mut text = String::new();
    match cli.format {
        Format::Json => writeln!(text, "{}", serde_json::to_string(&rows)?)?,
        Format::Csv => {
            let header: Vec<String> = (1..=n_max).map(|n| format!("N_{n}")).collect();
            writeln!(text, "name,code,degree,entropy,{},flags", header.join(","))?;
            for r in &rows {
                writeln!(
                    text,
                    "{},\"{}\",{},{},{},\"{}\"",
                    r.name,
                    r.code.as_deref().unwrap_or(""),
                    r.degree,
                    sig17(r.entropy),
                    r.counts.join(","),
                    r.flags.join("; ")
                )?;
            }
        }
        Format::Text => {
            for r in &rows {
                let code = r.code.as_deref().map(|c| format!(" {c}")).unwrap_or_default();
                writeln!(text, "{}{code}", r.name)?;
                writeln!(text, "  degree  {}", r.degree)?;
                writeln!(text, "  entropy {}", sig17(r.entropy))?;
                writeln!(text, "  N_n     {}", r.counts.join(", "))?;
                for flag in &r.flags {
                    writeln!(text, "  {flag}")?;
                }
            }
        }
    }
    Ok(Outcome::ok(text))
}

fn oracle(cli: &Cli, rotation: Option<&SymbolicAngle>) -> Result<Outcome> {
    let src = single(&cli.code, cli.file.as_deref())?;
    let f = src.fibered(rotation)?;
    let ns = n_range(cli, 1)?;
    let res = cli.res.unwrap_or(4096);
    let tol = cli.tol.unwrap_or(1e-9);
    if res < 16 {
        bail!("--res must be at least 16");
    }
    let mut text = String::new();
    let mut pass = true;
    if cli.format == Format::Csv {
        writeln!(text, "n,oracle,exact,agree")?;
    }
    for n in ns {
        let approx = grid_oracle(&f, n, res, res, tol);
        let exact = match count_periodic(&f, n) {
            Ok(r) => r.total.to_string(),
            Err(Error::DegenerateFiber { .. } | Error::DegenerateDiagonal { .. }) => "inf".to_string(),
            Err(e) => return Err(e.into()),
        };
        let agree = !approx.degenerate && exact == approx.count.to_string();
        pass &= agree;
        match cli.format {
            Format::Json => writeln!(
                text,
                "{}",
                json!({"n": n, "oracle": approx.count, "exact": exact, "agree": agree,
                       "degenerate": approx.degenerate, "confidence": approx.confidence})
            )?,
            Format::Csv => writeln!(text, "{n},{},{exact},{agree}", approx.count)?,
            Format::Text => writeln!(
                text,
                "n={n} oracle={}{} exact={exact} {}",
                approx.count,
                if approx.degenerate { "+" } else { "" },
                if agree { "agree" } else { "DISAGREE" }
            )?,
        }
    }
    let guarantee = invariant_latitude_guarantee(&f);
    if cli.format == Format::Text {
        for flag in &guarantee.flags {
            writeln!(text, "{flag}")?;
        }
    }
    Ok(Outcome { text, pass, partial: false })
}
