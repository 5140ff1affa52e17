//! Floating-point periodic-point counter, independent of the exact engine.
//!
//! The oracle only evaluates `f^n` numerically. It scans the height axis for
//! sign changes of `Δh = h' - h`, refines each by bisection, then scans the
//! angle axis on every invariant latitude it found for zero crossings of the
//! wrapped `Δα`. Wrap-arounds of `Δα` (jumps of about 2π) are told apart from
//! genuine crossings by the size of the jump. Poles are checked directly.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use crate::model::FiberedMap;

/// A sphere map evaluated in the `(h, α)` chart.
pub trait SphereMapF64: Sync {
    fn eval_f64(&self, h: f64, alpha: f64) -> (f64, f64);

    fn iterate_f64(&self, n: usize, mut h: f64, mut alpha: f64) -> (f64, f64) {
        for _ in 0..n {
            (h, alpha) = self.eval_f64(h, alpha);
        }
        (h, alpha)
    }
}

impl SphereMapF64 for FiberedMap {
    fn eval_f64(&self, h: f64, alpha: f64) -> (f64, f64) {
        FiberedMap::eval_f64(self, h, alpha)
    }
}

/// `second ∘ first`, evaluated point by point.
pub struct Composite<'a, A, B> {
    pub first: &'a A,
    pub second: &'a B,
}

impl<A: SphereMapF64, B: SphereMapF64> SphereMapF64 for Composite<'_, A, B> {
    fn eval_f64(&self, h: f64, alpha: f64) -> (f64, f64) {
        let (h, a) = self.first.eval_f64(h, alpha);
        self.second.eval_f64(h, a)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub count: u64,
    pub poles: u64,
    /// Approximate invariant heights found in `(0,1)`.
    pub heights: Vec<f64>,
    /// Smallest `|Δ|` seen at a sample next to a detected crossing; small
    /// values mean a crossing could have been mis-resolved.
    pub confidence: f64,
    /// Some latitude looked pointwise fixed; the count is then a lower bound.
    pub degenerate: bool,
}

fn wrap(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

pub fn grid_oracle<M: SphereMapF64>(f: &M, n: usize, res_h: usize, res_a: usize, tol: f64) -> OracleResult {
    assert!(res_h >= 16 && res_a >= 16, "grid resolution must be at least 16");
    let dh = |h: f64| f.iterate_f64(n, h, 0.0).0 - h;

    let poles = [0.0, 1.0].iter().filter(|&&p| f.iterate_f64(n, p, 0.0).0 == p).count() as u64;

    // Height scan. Samples sit at cell centres.
    let hs: Vec<f64> = (0..res_h).map(|i| (i as f64 + 0.5) / res_h as f64).collect();
    let gs: Vec<f64> = hs.par_iter().map(|&h| dh(h)).collect();
    let mut roots = Vec::new();
    let mut margin = f64::INFINITY;
    for i in 0..res_h {
        if gs[i] == 0.0 {
            roots.push(hs[i]);
            continue;
        }
        if i + 1 < res_h && gs[i + 1] != 0.0 && (gs[i] < 0.0) != (gs[i + 1] < 0.0) {
            margin = margin.min(gs[i].abs()).min(gs[i + 1].abs());
            roots.push(bisect(dh, hs[i], hs[i + 1], gs[i], tol));
        }
    }
    let mut heights: Vec<f64> = Vec::new();
    for r in roots {
        if r < tol || r > 1.0 - tol {
            continue;
        }
        if heights.last().is_none_or(|&last| r - last > tol) {
            heights.push(r);
        }
    }

    // Angle scan on each invariant latitude.
    let per_latitude: Vec<(u64, f64, bool)> = heights
        .par_iter()
        .map(|&h| {
            let da: Vec<f64> = (0..res_a)
                .map(|j| {
                    let a = TAU * (j as f64 + 0.5) / res_a as f64;
                    wrap(f.iterate_f64(n, h, a).1 - a)
                })
                .collect();
            if da.iter().all(|d| d.abs() < tol.max(1e-9)) {
                return (0, 0.0, true);
            }
            let mut count = 0;
            let mut m = f64::INFINITY;
            for j in 0..res_a {
                let (x, y) = (da[j], da[(j + 1) % res_a]);
                if x == 0.0 {
                    count += 1;
                    continue;
                }
                if y != 0.0 && (x < 0.0) != (y < 0.0) && (y - x).abs() < PI {
                    count += 1;
                    m = m.min(x.abs()).min(y.abs());
                }
            }
            (count, m, false)
        })
        .collect();

    let mut count = poles;
    let mut degenerate = false;
    for (c, m, d) in per_latitude {
        count += c;
        margin = margin.min(m);
        degenerate |= d;
    }
    OracleResult { count, poles, heights, confidence: margin, degenerate }
}

fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, glo: f64, tol: f64) -> f64 {
    let lo_neg = glo < 0.0;
    for _ in 0..200 {
        if hi - lo <= tol * 1e-3 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm == 0.0 {
            return mid;
        }
        if (gm < 0.0) == lo_neg {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
