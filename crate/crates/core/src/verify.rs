//! Exhaustive and sampled verification suites.
//!
//! Codes are enumerated lexicographically over `(n0, N, d-vector)` so that a
//! failure report is reproducible. Work runs in parallel; results are
//! collected in enumeration order.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::angle::SymbolicAngle;
use crate::code::{compose_codes, fixed_point_lower_bound, global_degree, leg_census, weak_lower_bound, LedgerJson};
use crate::error::{Error, Result};
use crate::fiber::count_periodic_capped;
use crate::model::{canonical_realization, BandCode, FiberedMap};
use crate::oracle::{grid_oracle, Composite};
use crate::pl::DEFAULT_BREAKPOINT_CAP;

/// `N_n(f)`, where a continuum of fixed points counts as infinite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PeriodicCount {
    Finite(u64),
    /// `f^n` fixes a whole circle or annulus; the reason names where.
    Infinite(String),
}

impl PeriodicCount {
    pub fn at_least(&self, bound: i64) -> bool {
        match self {
            PeriodicCount::Finite(c) => i128::from(*c) >= i128::from(bound),
            PeriodicCount::Infinite(_) => true,
        }
    }

    pub fn finite(&self) -> Option<u64> {
        match self {
            PeriodicCount::Finite(c) => Some(*c),
            PeriodicCount::Infinite(_) => None,
        }
    }
}

impl fmt::Display for PeriodicCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PeriodicCount::Finite(c) => write!(f, "{c}"),
            PeriodicCount::Infinite(why) => write!(f, "infinite ({why})"),
        }
    }
}

/// Exact count with the degenerate cases read as "infinitely many".
pub fn periodic_count(f: &FiberedMap, n: usize, cap: usize) -> Result<PeriodicCount> {
    match count_periodic_capped(f, n, cap) {
        Ok(r) => Ok(PeriodicCount::Finite(r.total)),
        Err(e @ (Error::DegenerateFiber { .. } | Error::DegenerateDiagonal { .. })) => {
            Ok(PeriodicCount::Infinite(e.to_string()))
        }
        Err(e) => Err(e),
    }
}

/// All valid codes with `1 <= N <= max_legs` and degrees in `lo..=hi`.
pub fn enumerate_codes(max_legs: usize, lo: i64, hi: i64) -> Vec<BandCode> {
    let mut out = Vec::new();
    for n0 in 0..=1 {
        for legs in 1..=max_legs {
            let mut d = vec![lo; legs];
            loop {
                out.push(BandCode::new(n0, d.clone()));
                // odometer, last position fastest
                let mut i = legs;
                loop {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                    if d[i] < hi {
                        d[i] += 1;
                        d[i + 1..].iter_mut().for_each(|x| *x = lo);
                        break;
                    }
                    if i == 0 {
                        i = usize::MAX;
                        break;
                    }
                }
                if i == usize::MAX || lo > hi {
                    break;
                }
            }
        }
    }
    out
}

pub fn random_code(rng: &mut impl Rng, max_legs: usize, max_degree: i64) -> BandCode {
    let legs = rng.gen_range(1..=max_legs);
    BandCode::new(
        rng.gen_range(0..=1),
        (0..legs).map(|_| rng.gen_range(-max_degree..=max_degree)).collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    CensusBound,
    Growth,
    WeakBound,
    Compose,
    Oracle,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "lemma32" => Suite::CensusBound,
            "theorem" => Suite::Growth,
            "weakbound" => Suite::WeakBound,
            "compose" => Suite::Compose,
            "oracle" => Suite::Oracle,
            other => return Err(Error::Parse(format!("unknown suite `{other}`"))),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::CensusBound => "lemma32",
            Suite::Growth => "theorem",
            Suite::WeakBound => "weakbound",
            Suite::Compose => "compose",
            Suite::Oracle => "oracle",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct Limits {
    pub max_legs: usize,
    pub max_n: usize,
    pub max_degree: i64,
    pub samples: usize,
    pub time_budget: Option<Duration>,
    pub cap: usize,
    pub resolution: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Limits {
    /// Defaults for each suite at the scale its checks are stated for.
    pub fn for_suite(suite: Suite) -> Self {
        let base = Limits {
            max_legs: 6,
            max_n: 1,
            max_degree: 1,
            samples: 50,
            time_budget: None,
            cap: DEFAULT_BREAKPOINT_CAP,
            resolution: 4096,
            tol: 1e-9,
            seed: 0x5eed,
        };
        match suite {
            Suite::CensusBound | Suite::WeakBound => base,
            Suite::Growth => Limits { max_legs: 4, max_n: 6, max_degree: 2, ..base },
            Suite::Compose => Limits { max_legs: 3, max_n: 3, max_degree: 2, ..base },
            Suite::Oracle => Limits { max_legs: 3, max_n: 3, max_degree: 2, samples: 10, ..base },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckFailure {
    pub code: String,
    pub n: usize,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checked: usize,
    /// Checks where `f^n` had infinitely many fixed points (bounds hold trivially).
    pub infinite: usize,
    pub failures: Vec<CheckFailure>,
    /// False when the time budget ran out before every check ran.
    pub complete: bool,
    pub skipped: usize,
    pub elapsed_ms: u128,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.complete && self.failures.is_empty()
    }
}

/// Outcome of one unit of work.
#[derive(Default)]
struct Outcome {
    checked: usize,
    infinite: usize,
    failures: Vec<CheckFailure>,
    incomplete: bool,
}

impl Outcome {
    fn fail(&mut self, code: &BandCode, n: usize, detail: String) {
        self.failures.push(CheckFailure { code: code.to_string(), n, detail });
    }

    fn error(&mut self, code: &BandCode, n: usize, e: Error) {
        if matches!(e, Error::ResourceLimit(_)) {
            self.incomplete = true;
        }
        self.fail(code, n, format!("error: {e}"));
    }
}

fn run_items<T: Sync>(
    suite: Suite,
    items: &[T],
    limits: &Limits,
    work: impl Fn(&T) -> Outcome + Sync,
) -> SuiteReport {
    let start = Instant::now();
    let deadline = limits.time_budget.map(|b| start + b);
    let expired = AtomicBool::new(false);
    let results: Vec<Option<Outcome>> = items
        .par_iter()
        .map(|item| {
            if deadline.is_some_and(|d| Instant::now() > d) {
                expired.store(true, Ordering::Relaxed);
                return None;
            }
            Some(work(item))
        })
        .collect();

    let mut report = SuiteReport {
        suite,
        checked: 0,
        infinite: 0,
        failures: Vec::new(),
        complete: true,
        skipped: 0,
        elapsed_ms: 0,
    };
    for r in results {
        match r {
            Some(o) => {
                report.checked += o.checked;
                report.infinite += o.infinite;
                report.failures.extend(o.failures);
                report.complete &= !o.incomplete;
            }
            None => report.skipped += 1,
        }
    }
    report.complete &= report.skipped == 0 && !expired.load(Ordering::Relaxed);
    report.elapsed_ms = start.elapsed().as_millis();
    report
}

pub fn run_suite(suite: Suite, limits: &Limits) -> SuiteReport {
    match suite {
        Suite::CensusBound => census_bound(limits),
        Suite::WeakBound => weakbound(limits),
        Suite::Growth => growth(limits),
        Suite::Compose => compose(limits),
        Suite::Oracle => oracle(limits),
    }
}

fn irr_realization(code: &BandCode) -> Result<FiberedMap> {
    canonical_realization(code, &SymbolicAngle::irr())
}

/// `N_1 > d(f)`, `N_1 >= degree + slack`, and `slack >= 1`, for every code with `|d_i| <= 1`.
fn census_bound(limits: &Limits) -> SuiteReport {
    let codes = enumerate_codes(limits.max_legs, -1, 1);
    run_items(Suite::CensusBound, &codes, limits, |code| {
        let mut o = Outcome::default();
        let run = || -> Result<(PeriodicCount, i64, i64, LedgerJson)> {
            let f = irr_realization(code)?;
            let count = periodic_count(&f, 1, limits.cap)?;
            Ok((count, global_degree(code)?, fixed_point_lower_bound(code)?, LedgerJson::for_code(code)?))
        };
        match run() {
            Ok((count, degree, bound, ledger)) => {
                o.checked += 1;
                o.infinite += usize::from(count.finite().is_none());
                let ledger_s = serde_json::to_string(&ledger).unwrap_or_default();
                if !count.at_least(degree + 1) {
                    o.fail(code, 1, format!("N_1 = {count} is not more than degree {degree}; ledger {ledger_s}"));
                }
                if !count.at_least(bound) {
                    o.fail(code, 1, format!("N_1 = {count} is below the ledger bound {bound}; ledger {ledger_s}"));
                }
                if ledger.slack < 1 {
                    o.fail(code, 1, format!("slack {} < 1; ledger {ledger_s}", ledger.slack));
                }
            }
            Err(e) => o.error(code, 1, e),
        }
        o
    })
}

/// `N_1 - d(f) >= N - 2a + 2b - 7 >= -7`, and the weak bound never beats the ledger bound.
fn weakbound(limits: &Limits) -> SuiteReport {
    let codes = enumerate_codes(limits.max_legs, -1, 1);
    run_items(Suite::WeakBound, &codes, limits, |code| {
        let mut o = Outcome::default();
        let run = || -> Result<(PeriodicCount, i64, i64, i64)> {
            let f = irr_realization(code)?;
            Ok((
                periodic_count(&f, 1, limits.cap)?,
                global_degree(code)?,
                weak_lower_bound(code)?,
                fixed_point_lower_bound(code)?,
            ))
        };
        match run() {
            Ok((count, degree, weak, strong)) => {
                o.checked += 1;
                o.infinite += usize::from(count.finite().is_none());
                if !count.at_least(degree - 7) {
                    o.fail(code, 1, format!("N_1 - d = {count} - {degree} < -7"));
                }
                if !count.at_least(weak) {
                    o.fail(code, 1, format!("N_1 = {count} is below the caseless bound {weak}"));
                }
                if weak > strong {
                    o.fail(code, 1, format!("caseless bound {weak} exceeds ledger bound {strong}"));
                }
            }
            Err(e) => o.error(code, 1, e),
        }
        o
    })
}

/// `N_n >= 2^n` for every code of global degree 2.
fn growth(limits: &Limits) -> SuiteReport {
    let codes: Vec<BandCode> = enumerate_codes(limits.max_legs, -limits.max_degree, limits.max_degree)
        .into_iter()
        .filter(|c| global_degree(c).ok() == Some(2))
        .collect();
    run_items(Suite::Growth, &codes, limits, |code| {
        let mut o = Outcome::default();
        let f = match irr_realization(code) {
            Ok(f) => f,
            Err(e) => {
                o.error(code, 0, e);
                return o;
            }
        };
        for n in 1..=limits.max_n {
            match periodic_count(&f, n, limits.cap) {
                Ok(count) => {
                    o.checked += 1;
                    o.infinite += usize::from(count.finite().is_none());
                    if !count.at_least(1i64 << n) {
                        o.fail(code, n, format!("N_{n} = {count} < 2^{n}"));
                    }
                }
                Err(e) => o.error(code, n, e),
            }
        }
        o
    })
}

/// Degree multiplicativity of `compose_codes`, agreement of its realization
/// with the pointwise composite, and iterate consistency.
fn compose(limits: &Limits) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(limits.seed);
    let pairs: Vec<(BandCode, BandCode)> = (0..limits.samples)
        .map(|_| {
            (random_code(&mut rng, limits.max_legs, limits.max_degree), random_code(&mut rng, limits.max_legs, limits.max_degree))
        })
        .collect();
    run_items(Suite::Compose, &pairs, limits, |(first, second)| {
        let mut o = Outcome::default();
        let run = |o: &mut Outcome| -> Result<()> {
            let composed = compose_codes(second, first)?;
            let (d1, d2, d) = (global_degree(first)?, global_degree(second)?, global_degree(&composed)?);
            o.checked += 1;
            if d != d1 * d2 {
                o.fail(first, 1, format!("degree of {second}∘{first} = {composed} is {d}, expected {d1}·{d2}"));
            }
            let f1 = irr_realization(first)?;
            let f2 = irr_realization(second)?;
            let pointwise = FiberedMap::compose(&f2, &f1)?;
            let lhs = periodic_count(&irr_realization(&composed)?, 1, limits.cap)?;
            let rhs = periodic_count(&pointwise, 1, limits.cap)?;
            if let (Some(a), Some(b)) = (lhs.finite(), rhs.finite()) {
                o.checked += 1;
                if a != b {
                    o.fail(first, 1, format!("{second}∘{first}: code realization has {a}, pointwise composite {b}"));
                }
            } else {
                o.infinite += 1;
            }
            // iterate consistency on the first factor
            let mut power = first.clone();
            for n in 1..=limits.max_n {
                if n > 1 {
                    power = compose_codes(first, &power)?;
                }
                let direct = periodic_count(&f1, n, limits.cap)?;
                let via_code = periodic_count(&irr_realization(&power)?, 1, limits.cap)?;
                if let (Some(a), Some(b)) = (direct.finite(), via_code.finite()) {
                    o.checked += 1;
                    if a != b {
                        o.fail(first, n, format!("N_{n} = {a} but the composed code counts {b}"));
                    }
                }
            }
            Ok(())
        };
        if let Err(e) = run(&mut o) {
            o.error(first, 1, e);
        }
        o
    })
}

/// Codes for oracle comparison: sampled until `samples` codes have finite
/// counts for every `n <= max_n`.
pub fn oracle_sample(limits: &Limits) -> Vec<BandCode> {
    let mut rng = ChaCha8Rng::seed_from_u64(limits.seed);
    let mut out: Vec<BandCode> = Vec::new();
    let mut tries = 0;
    while out.len() < limits.samples && tries < 10_000 {
        tries += 1;
        let code = random_code(&mut rng, limits.max_legs, limits.max_degree);
        if out.contains(&code) {
            continue;
        }
        let Ok(f) = irr_realization(&code) else { continue };
        let finite = (1..=limits.max_n)
            .all(|n| matches!(periodic_count(&f, n, limits.cap), Ok(PeriodicCount::Finite(_))));
        if finite {
            out.push(code);
        }
    }
    out
}

fn oracle(limits: &Limits) -> SuiteReport {
    let codes = oracle_sample(limits);
    let mut report = run_items(Suite::Oracle, &codes, limits, |code| {
        let mut o = Outcome::default();
        let f = match irr_realization(code) {
            Ok(f) => f,
            Err(e) => {
                o.error(code, 0, e);
                return o;
            }
        };
        for n in 1..=limits.max_n {
            match count_periodic_capped(&f, n, limits.cap) {
                Ok(exact) => {
                    let approx = grid_oracle(&f, n, limits.resolution, limits.resolution, limits.tol);
                    o.checked += 1;
                    if approx.count != exact.total || approx.degenerate {
                        o.fail(code, n, format!("oracle {} vs exact {}", approx.count, exact.total));
                    }
                }
                Err(e) => o.error(code, n, e),
            }
        }
        o
    });
    if codes.len() < limits.samples {
        report.complete = false;
    }
    report
}

/// `second ∘ first` counted by the oracle, for callers comparing against exact counts.
pub fn oracle_count_of_composite(first: &FiberedMap, second: &FiberedMap, limits: &Limits) -> u64 {
    grid_oracle(&Composite { first, second }, 1, limits.resolution, limits.resolution, limits.tol).count
}

/// Sanity check used by the census: `leg_census` succeeds for every unit-degree code.
pub fn census_covers(max_legs: usize) -> Vec<(BandCode, Error)> {
    enumerate_codes(max_legs, -1, 1)
        .into_iter()
        .filter_map(|c| leg_census(&c).err().map(|e| (c, e)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_is_lexicographic_and_complete() {
        let codes = enumerate_codes(2, -1, 1);
        assert_eq!(codes.len(), 2 * (3 + 9));
        assert_eq!(codes[0], BandCode::new(0, vec![-1]));
        assert_eq!(codes[2], BandCode::new(0, vec![1]));
        assert_eq!(codes[3], BandCode::new(0, vec![-1, -1]));
        assert_eq!(codes[4], BandCode::new(0, vec![-1, 0]));
        assert_eq!(codes.last().unwrap(), &BandCode::new(1, vec![1, 1]));
    }

    #[test]
    fn infinite_counts_satisfy_bounds() {
        assert!(PeriodicCount::Infinite("x".into()).at_least(i64::MAX));
        assert!(!PeriodicCount::Finite(3).at_least(4));
        assert!(PeriodicCount::Finite(3).at_least(-7));
    }

    #[test]
    fn census_defined_everywhere() {
        assert!(census_covers(6).is_empty());
    }

    #[test]
    fn small_suites_pass() {
        let mut l = Limits::for_suite(Suite::CensusBound);
        l.max_legs = 3;
        assert!(run_suite(Suite::CensusBound, &l).passed());
        assert!(run_suite(Suite::WeakBound, &l).passed());
        let mut t = Limits::for_suite(Suite::Growth);
        t.max_legs = 2;
        t.max_n = 3;
        assert!(run_suite(Suite::Growth, &t).passed());
    }

    #[test]
    fn zero_budget_never_passes() {
        let mut l = Limits::for_suite(Suite::CensusBound);
        l.time_budget = Some(Duration::ZERO);
        let r = run_suite(Suite::CensusBound, &l);
        assert!(!r.complete);
        assert!(!r.passed());
    }
}
