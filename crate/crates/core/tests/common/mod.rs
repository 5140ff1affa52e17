//! Independent counter for canonical realizations.
//!
//! Enumerates itineraries `w ∈ {1..N}^n` directly: each word picks one affine
//! branch per step, the composed branch has a unique fixed height, and the
//! composed fiber map is `α ↦ Kα + c·ρ` with `K = Π d` and `c = Σ_j Π_{k≥j} d_k`.
//! No PL composition or diagonal search is involved.

#![allow(dead_code)]

use std::collections::BTreeSet;

use latitude_core::BandCode;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WordCount {
    Finite(u64),
    Infinite,
}

type Q = BigRational;

fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Branch `i` of the canonical sawtooth as `x ↦ a x + b` on `[i/N, (i+1)/N]`.
fn branch(code: &BandCode, i: usize) -> (Q, Q) {
    let n = code.degrees.len() as i64;
    let up = i.is_multiple_of(2) == (code.n0 == 0);
    if up {
        (qi(n), qi(-(i as i64)))
    } else {
        (qi(-n), qi(i as i64 + 1))
    }
}

fn pole_orbit_fixed(code: &BandCode, pole: i64, n: usize) -> bool {
    let legs = code.degrees.len() as i64;
    let step = |p: i64| if p == 0 { code.n0 } else if legs % 2 == 1 { 1 - code.n0 } else { code.n0 };
    let mut p = pole;
    for _ in 0..n {
        p = step(p);
    }
    p == pole
}

/// `N_n` of the canonical realization with an irrational rotation.
pub fn word_count(code: &BandCode, n: usize) -> WordCount {
    let legs = code.degrees.len();
    let width = Q::new(BigInt::one(), BigInt::from(legs));
    let mut seen: BTreeSet<Q> = BTreeSet::new();
    let mut total: u64 = 0;
    let mut infinite = false;
    let mut word = vec![0usize; n];
    loop {
        // composed affine branch
        let (mut a, mut b) = (Q::one(), Q::zero());
        for &i in &word {
            let (ai, bi) = branch(code, i);
            b = &ai * &b + bi;
            a = ai * a;
        }
        let (k, c) = word.iter().fold((1i64, 0i64), |(k, c), &i| {
            let d = code.degrees[i];
            (k * d, d * (c + 1))
        });
        if a == Q::one() && b.is_zero() && !(k == 1 && c != 0) {
            // a whole interval of fixed heights, each with fixed fiber points
            infinite = true;
        }
        if a != Q::one() {
            let x = &b / (Q::one() - &a);
            let mut y = x.clone();
            let mut inside = true;
            for &i in &word {
                let lo = &width * qi(i as i64);
                let hi = &lo + &width;
                if y < lo || y > hi {
                    inside = false;
                    break;
                }
                let (ai, bi) = branch(code, i);
                y = ai * y + bi;
            }
            let interior = x > Q::zero() && x < Q::one();
            if inside && interior && seen.insert(x.clone()) {
                match (k, c) {
                    (1, 0) => infinite = true,
                    (1, _) => {}
                    (k, _) => total += (k - 1).unsigned_abs(),
                }
            }
        }
        // next word
        let mut j = n;
        loop {
            if j == 0 {
                let poles = [0, 1].iter().filter(|&&p| pole_orbit_fixed(code, p, n)).count() as u64;
                return if infinite { WordCount::Infinite } else { WordCount::Finite(total + poles) };
            }
            j -= 1;
            word[j] += 1;
            if word[j] < legs {
                break;
            }
            word[j] = 0;
        }
    }
}
