//! Named example maps and their end-to-end summaries.

use serde::Serialize;

use crate::angle::SymbolicAngle;
use crate::code::{global_degree, invariant_latitude_guarantee};
use crate::error::Result;
use crate::model::{canonical_realization, lipschitz_counterexample, BandCode, FiberedMap};
use crate::pl::{entropy_estimate, DEFAULT_BREAKPOINT_CAP};
use crate::verify::{periodic_count, PeriodicCount};

/// Degree zero, unimodal: only the south pole is periodic.
pub fn example_f() -> BandCode {
    BandCode::new(0, vec![1, 1])
}

/// Degree two, unimodal.
pub fn example_g() -> BandCode {
    BandCode::new(0, vec![1, -1])
}

/// Degree two, bimodal, with a collapsed middle band.
pub fn example_h() -> BandCode {
    BandCode::new(0, vec![1, 0, 1])
}

#[derive(Debug, Clone, Serialize)]
pub struct ExampleSummary {
    pub name: String,
    pub code: Option<String>,
    pub degree: i64,
    pub entropy: f64,
    pub counts: Vec<String>,
    pub flags: Vec<String>,
}

fn summarize(name: &str, code: Option<&BandCode>, degree: i64, f: &FiberedMap, n_max: usize) -> Result<ExampleSummary> {
    let entropy = entropy_estimate(f.phi(), n_max.max(1))?;
    let counts = (1..=n_max)
        .map(|n| {
            periodic_count(f, n, DEFAULT_BREAKPOINT_CAP).map(|c| match c {
                PeriodicCount::Finite(k) => k.to_string(),
                PeriodicCount::Infinite(_) => "inf".to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let flags = invariant_latitude_guarantee(f).flags.iter().map(|f| f.to_string()).collect();
    Ok(ExampleSummary {
        name: name.to_string(),
        code: code.map(|c| c.to_string()),
        degree,
        entropy,
        counts,
        flags,
    })
}

/// The three coded examples and the PL model of `z ↦ 2z²/|z|`.
pub fn run_examples(n_max: usize) -> Result<Vec<ExampleSummary>> {
    let mut out = Vec::new();
    for (name, code) in [("F", example_f()), ("G", example_g()), ("H", example_h())] {
        let f = canonical_realization(&code, &SymbolicAngle::irr())?;
        out.push(summarize(name, Some(&code), global_degree(&code)?, &f, n_max)?);
    }
    // φ(h) < h on (0,1): the south pole attracts and carries fiber degree 2
    out.push(summarize("counterexample", None, 2, &lipschitz_counterexample(), n_max)?);
    Ok(out)
}
