//! Exact periodic-point counts for iterates of a fibered map.
//!
//! A fixed point of `f^n` away from the poles lies on a latitude `L(h)` with
//! `φ^n(h) = h`. On that latitude `f^n` is the composition of the circle
//! actions met along the itinerary of `h`, an affine map `α ↦ Kα + θ`, whose
//! fixed points are counted exactly.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angle::SymbolicAngle;
use crate::error::{Error, Result};
use crate::model::{FiberAction, FiberedMap};
use crate::pl::{diagonal_hits, iterate_pl_capped, FixedHeight, Symbol, DEFAULT_BREAKPOINT_CAP};
use crate::rational::Q;

/// The circle map `α ↦ Kα + θ` obtained along an itinerary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComposedFiber {
    pub k: i64,
    pub theta: SymbolicAngle,
    /// Some step had degree 0, so the whole latitude lands on one point `theta`.
    pub constant: bool,
}

/// Composes the actions of the 1-based bands in `itinerary`, first step first.
pub fn compose_fiber(f: &FiberedMap, itinerary: &[usize]) -> Result<ComposedFiber> {
    let mut acc = FiberAction::new(1, SymbolicAngle::zero());
    for &band in itinerary {
        if band == 0 || band > f.bands().len() {
            return Err(Error::InvalidFiberedMap(format!("itinerary names band {band}")));
        }
        acc = f
            .action(band - 1)
            .after(&acc)
            .ok_or_else(|| Error::ResourceLimit(format!("fiber degree overflow along {itinerary:?}")))?;
    }
    Ok(ComposedFiber { constant: acc.degree == 0, k: acc.degree, theta: acc.offset })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiberFixedCount {
    Count(u64),
    /// The identity circle map: every point is fixed.
    Degenerate,
}

pub fn fiber_fixed_count(cf: &ComposedFiber) -> FiberFixedCount {
    if cf.constant {
        return FiberFixedCount::Count(1);
    }
    if cf.k != 1 {
        return FiberFixedCount::Count(cf.k.abs_diff(1));
    }
    if cf.theta.is_zero() {
        FiberFixedCount::Degenerate
    } else {
        FiberFixedCount::Count(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportEntry {
    pub height: FixedHeight,
    pub fiber: ComposedFiber,
    pub count: u64,
}

/// Exact number of fixed points of `f^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedPointReport {
    pub n: usize,
    pub total: u64,
    /// Interior invariant latitudes, sorted by height.
    pub entries: Vec<ReportEntry>,
    /// Number of poles fixed by `f^n`.
    pub pole_contributions: u64,
}

pub fn count_periodic(f: &FiberedMap, n: usize) -> Result<FixedPointReport> {
    count_periodic_capped(f, n, DEFAULT_BREAKPOINT_CAP)
}

pub fn count_periodic_capped(f: &FiberedMap, n: usize, cap: usize) -> Result<FixedPointReport> {
    let phi = f.phi();
    let g = iterate_pl_capped(phi, n, cap)?;
    let hits = diagonal_hits(&g);
    let bands = f.band_intervals();

    let fiber_at = |h: &Q| -> Result<(Vec<Symbol>, Vec<usize>, ComposedFiber)> {
        let word = phi.itinerary(&bands, h, n);
        let idx = word
            .iter()
            .map(|s| match s {
                Symbol::Band(i) => Ok(*i),
                _ => Err(Error::InvalidFiberedMap(format!("periodic height {h} leaves the bands"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let cf = compose_fiber(f, &idx)?;
        Ok((word, idx, cf))
    };

    // A stretch of φ^n on the diagonal is harmless only if its fiber has no
    // fixed points; every height in it shares one itinerary.
    for (from, to) in &hits.segments {
        let mid = (from + to) / Q::from_integer(2.into());
        let (_, _, cf) = fiber_at(&mid)?;
        if fiber_fixed_count(&cf) != FiberFixedCount::Count(0) {
            return Err(Error::DegenerateDiagonal { from: from.to_string(), to: to.to_string() });
        }
    }

    let results: Vec<Result<ReportEntry>> = hits
        .points
        .into_par_iter()
        .filter(|(h, _, _)| !is_pole(h))
        .map(|(h, transversal, plateau_adjacent)| {
            let (itinerary, idx, fiber) = fiber_at(&h)?;
            let count = match fiber_fixed_count(&fiber) {
                FiberFixedCount::Count(c) => c,
                FiberFixedCount::Degenerate => return Err(Error::DegenerateFiber { itinerary: idx }),
            };
            Ok(ReportEntry {
                height: FixedHeight { h, itinerary, transversal, plateau_adjacent },
                fiber,
                count,
            })
        })
        .collect();
    let entries = results.into_iter().collect::<Result<Vec<_>>>()?;

    let poles = fixed_poles(f, n);
    let total = entries
        .iter()
        .try_fold(poles, |acc, e| acc.checked_add(e.count))
        .ok_or_else(|| Error::ResourceLimit("fixed-point total overflows u64".into()))?;
    Ok(FixedPointReport { n, total, entries, pole_contributions: poles })
}

/// Poles fixed by `f^n`, read off the pole-image automaton.
pub fn fixed_poles(f: &FiberedMap, n: usize) -> u64 {
    let images = f.pole_images();
    (0u8..2)
        .filter(|&pole| (0..n).fold(pole, |x, _| images[x as usize]) == pole)
        .count() as u64
}

fn is_pole(h: &Q) -> bool {
    use num_traits::{One, Zero};
    h.is_zero() || h.is_one()
}

/// `{"n":3, "total":9, "poles":1, "entries":[{"h":"2/5","itinerary":[1,2,2],"K":-1,"count":2}, …]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportJson {
    pub n: usize,
    pub total: u64,
    pub poles: u64,
    pub entries: Vec<EntryJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryJson {
    pub h: String,
    pub itinerary: Vec<Symbol>,
    #[serde(rename = "K")]
    pub k: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<SymbolicAngle>,
    pub count: u64,
}

impl From<&FixedPointReport> for ReportJson {
    fn from(r: &FixedPointReport) -> Self {
        Self {
            n: r.n,
            total: r.total,
            poles: r.pole_contributions,
            entries: r
                .entries
                .iter()
                .map(|e| EntryJson {
                    h: e.height.h.to_string(),
                    itinerary: e.height.itinerary.clone(),
                    k: e.fiber.k,
                    theta: Some(e.fiber.theta.clone()),
                    count: e.count,
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{canonical_realization, lipschitz_counterexample, BandCode};
    use crate::pl::PLMap;
    use crate::rational::{one, q, zero};

    fn canon(n0: i64, d: &[i64]) -> FiberedMap {
        canonical_realization(&BandCode::new(n0, d.to_vec()), &SymbolicAngle::irr()).unwrap()
    }

    #[test]
    fn composed_fiber_examples() {
        let g = canon(0, &[1, -1]);
        let cf = compose_fiber(&g, &[1, 2]).unwrap();
        assert_eq!(cf.k, -1);
        assert!(!cf.constant);

        let h = canon(0, &[1, 0, 1]);
        let cf = compose_fiber(&h, &[2]).unwrap();
        assert!(cf.constant);
        assert_eq!(cf.k, 0);

        let id = canonical_realization(&BandCode::new(0, vec![1, 1]), &SymbolicAngle::zero()).unwrap();
        let cf = compose_fiber(&id, &[1]).unwrap();
        assert_eq!((cf.k, cf.theta.is_zero()), (1, true));
        assert!(compose_fiber(&id, &[3]).is_err());
    }

    #[test]
    fn reflection_squared_is_identity() {
        let g = canon(0, &[1, -1]);
        let cf = compose_fiber(&g, &[2, 2]).unwrap();
        assert_eq!(fiber_fixed_count(&cf), FiberFixedCount::Degenerate);
    }

    #[test]
    fn fiber_counts() {
        let c = |k, theta, constant| fiber_fixed_count(&ComposedFiber { k, theta, constant });
        assert_eq!(c(-1, SymbolicAngle::zero(), false), FiberFixedCount::Count(2));
        assert_eq!(c(0, SymbolicAngle::irr(), true), FiberFixedCount::Count(1));
        assert_eq!(c(2, SymbolicAngle::irr(), false), FiberFixedCount::Count(1));
        assert_eq!(c(-3, SymbolicAngle::zero(), false), FiberFixedCount::Count(4));
        assert_eq!(c(1, SymbolicAngle::irr(), false), FiberFixedCount::Count(0));
        assert_eq!(c(1, SymbolicAngle::from_turns(q(1, 3)), false), FiberFixedCount::Count(0));
        assert_eq!(c(1, SymbolicAngle::zero(), false), FiberFixedCount::Degenerate);
    }

    #[test]
    fn example_f_only_southpole() {
        let f = canon(0, &[1, 1]);
        for n in 1..=6 {
            let r = count_periodic(&f, n).unwrap();
            assert_eq!(r.total, 1, "n={n}");
            assert_eq!(r.pole_contributions, 1);
        }
    }

    #[test]
    fn example_g_odd_iterates() {
        let g = canon(0, &[1, -1]);
        let r = count_periodic(&g, 1).unwrap();
        assert_eq!(r.total, 3);
        assert_eq!(r.entries.len(), 1);
        assert_eq!(r.entries[0].height.h, q(2, 3));
        assert_eq!(count_periodic(&g, 3).unwrap().total, 9);
    }

    #[test]
    fn example_g_even_iterate_has_a_circle_of_fixed_points() {
        let g = canon(0, &[1, -1]);
        let err = count_periodic(&g, 2).unwrap_err();
        assert_eq!(err, Error::DegenerateFiber { itinerary: vec![2, 2] });
    }

    #[test]
    fn example_h() {
        let h = canon(0, &[1, 0, 1]);
        assert_eq!(count_periodic(&h, 1).unwrap().total, 3);
        assert_eq!(count_periodic(&h, 2).unwrap().total, 7);
        assert_eq!(count_periodic(&h, 3).unwrap().total, 21);
    }

    #[test]
    fn diagonal_with_free_fibers_counts_only_poles() {
        let id = canon(0, &[1]);
        let r = count_periodic(&id, 1).unwrap();
        assert_eq!(r.total, 2);
        assert!(r.entries.is_empty());
    }

    #[test]
    fn diagonal_with_fixed_fibers_is_degenerate() {
        for d in [-1, 0, 2] {
            let err = count_periodic(&canon(0, &[d]), 1).unwrap_err();
            assert!(matches!(err, Error::DegenerateDiagonal { .. }), "d={d}");
        }
    }

    #[test]
    fn counterexample_has_two_periodic_points() {
        let f = lipschitz_counterexample();
        for n in 1..=5 {
            assert_eq!(count_periodic(&f, n).unwrap().total, 2);
        }
    }

    #[test]
    fn degree_two_latitude_with_sink_poles() {
        let phi = PLMap::new(vec![(zero(), zero()), (q(1, 4), zero()), (q(3, 4), one()), (one(), one())]).unwrap();
        let f = FiberedMap::new(phi, vec![FiberAction::new(2, SymbolicAngle::irr())]).unwrap();
        for n in 1..=6usize {
            let r = count_periodic(&f, n).unwrap();
            assert_eq!(r.entries.len(), 1);
            assert_eq!(r.entries[0].height.h, q(1, 2));
            assert_eq!(r.entries[0].count, (1u64 << n) - 1);
            assert_eq!(r.total, (1u64 << n) + 1);
        }
    }

    #[test]
    fn pole_automaton() {
        assert_eq!(fixed_poles(&canon(1, &[1]), 1), 0);
        assert_eq!(fixed_poles(&canon(1, &[1]), 2), 2);
        assert_eq!(fixed_poles(&canon(0, &[1, 1]), 3), 1);
    }

    #[test]
    fn report_json_shape() {
        let r = count_periodic(&canon(0, &[1, -1]), 3).unwrap();
        let j = ReportJson::from(&r);
        assert_eq!((j.n, j.total, j.poles), (3, 9, 1));
        let s = serde_json::to_string(&j).unwrap();
        let back: ReportJson = serde_json::from_str(&s).unwrap();
        assert_eq!(back, j);
        let first = &j.entries[0];
        assert_eq!(first.h, "2/9");
        assert_eq!(first.itinerary, vec![Symbol::Band(1), Symbol::Band(1), Symbol::Band(2)]);
    }
}
