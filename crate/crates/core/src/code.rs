//! Symbolic computations on band codes.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BandCode, FiberedMap};
use crate::pl::{diagonal_hits, PLMap};
use crate::rational::{one, Q};

/// `d1 - d2 + d3 - …`, negated when `n0 = 1`.
pub fn global_degree(code: &BandCode) -> Result<i64> {
    code.validate()?;
    let sum: i64 = code
        .degrees
        .iter()
        .enumerate()
        .map(|(i, d)| if i % 2 == 0 { *d } else { -*d })
        .sum();
    Ok(if code.n0 == 0 { sum } else { -sum })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PoleTag {
    /// φ swaps the poles.
    Switch,
    /// Both poles land on the same pole.
    BothToOne,
    /// Both poles are fixed.
    BothFixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PoleCase {
    pub tag: PoleTag,
    /// Number of fixed poles.
    pub p: u32,
}

impl fmt::Display for PoleCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} (p={})", self.tag, self.p)
    }
}

pub fn classify_poles(code: &BandCode) -> Result<PoleCase> {
    code.validate()?;
    let odd = code.legs() % 2 == 1;
    Ok(match (code.n0, odd) {
        (0, true) => PoleCase { tag: PoleTag::BothFixed, p: 2 },
        (1, true) => PoleCase { tag: PoleTag::Switch, p: 0 },
        _ => PoleCase { tag: PoleTag::BothToOne, p: 1 },
    })
}

/// Census class of a directed leg.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LegType {
    /// ascending, degree 1
    A,
    /// ascending, degree -1
    B,
    /// descending, degree 1
    C,
    /// descending, degree -1
    D,
    /// degree 0
    E,
}

impl LegType {
    fn of(ascending: bool, degree: i64) -> Self {
        match (ascending, degree) {
            (_, 0) => LegType::E,
            (true, 1) => LegType::A,
            (true, _) => LegType::B,
            (false, 1) => LegType::C,
            (false, _) => LegType::D,
        }
    }

    /// Fixed points lost when the diagonal misses a leg of this type.
    fn miss_penalty(self) -> Option<i64> {
        match self {
            LegType::A => Some(0),
            LegType::E => Some(1),
            LegType::B => Some(2),
            // descending legs never touch a fixed pole
            LegType::C | LegType::D => None,
        }
    }
}

impl fmt::Display for LegType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            LegType::A => 'a',
            LegType::B => 'b',
            LegType::C => 'c',
            LegType::D => 'd',
            LegType::E => 'e',
        };
        write!(f, "{c}")
    }
}

/// Leg census of a code with all `|d_i| <= 1` and the resulting slack
/// `p + N - 2a + 2b - r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LegLedger {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
    pub e: u32,
    pub legs: u32,
    pub p: u32,
    pub case: PoleCase,
    pub first_type: LegType,
    pub last_type: LegType,
    /// Worst-case correction for legs the diagonal may miss.
    pub r: u32,
    pub slack: i64,
}

pub fn leg_census(code: &BandCode) -> Result<LegLedger> {
    code.validate()?;
    code.require_unit_degrees()?;
    let types: Vec<LegType> = code
        .degrees
        .iter()
        .enumerate()
        .map(|(i, &d)| LegType::of(code.ascends(i), d))
        .collect();
    let count = |t: LegType| types.iter().filter(|&&x| x == t).count() as u32;
    let case = classify_poles(code)?;
    let n = types.len();

    // Only legs whose end sits on a fixed pole can miss the diagonal.
    let missable: Vec<usize> = match case.tag {
        PoleTag::Switch => vec![],
        PoleTag::BothToOne if code.n0 == 0 => vec![0],
        PoleTag::BothToOne => vec![n - 1],
        PoleTag::BothFixed if n == 1 => vec![0],
        PoleTag::BothFixed => vec![0, n - 1],
    };
    let mut r = 0i64;
    for &i in &missable {
        r += types[i].miss_penalty().ok_or_else(|| Error::UncoveredCensusCase {
            case: format!("{:?}", case.tag),
            types: missable.iter().map(|&j| types[j].to_string()).collect::<Vec<_>>().join(","),
        })?;
    }

    let (a, b) = (count(LegType::A), count(LegType::B));
    let slack = case.p as i64 + n as i64 - 2 * a as i64 + 2 * b as i64 - r;
    Ok(LegLedger {
        a,
        b,
        c: count(LegType::C),
        d: count(LegType::D),
        e: count(LegType::E),
        legs: n as u32,
        p: case.p,
        case,
        first_type: types[0],
        last_type: types[n - 1],
        r: r as u32,
        slack,
    })
}

/// `global_degree + slack`: a lower bound on the number of fixed points.
pub fn fixed_point_lower_bound(code: &BandCode) -> Result<i64> {
    let ledger = leg_census(code)?;
    Ok(global_degree(code)? + ledger.slack)
}

/// The caseless bound `global_degree + N - 2a + 2b - 7`.
pub fn weak_lower_bound(code: &BandCode) -> Result<i64> {
    let l = leg_census(code)?;
    Ok(global_degree(code)? + l.legs as i64 - 2 * l.a as i64 + 2 * l.b as i64 - 7)
}

/// Census output as exchanged with the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerJson {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
    pub e: u32,
    #[serde(rename = "N")]
    pub legs: u32,
    pub p: u32,
    pub r: u32,
    pub slack: i64,
    pub degree: i64,
    pub bound: i64,
}

impl LedgerJson {
    pub fn for_code(code: &BandCode) -> Result<Self> {
        let l = leg_census(code)?;
        let degree = global_degree(code)?;
        Ok(Self {
            a: l.a,
            b: l.b,
            c: l.c,
            d: l.d,
            e: l.e,
            legs: l.legs,
            p: l.p,
            r: l.r,
            slack: l.slack,
            degree,
            bound: degree + l.slack,
        })
    }
}

/// Code of `outer ∘ inner` for canonical realizations.
///
/// Inner leg `i` splits into one sub-leg per outer band, visited in the order
/// the inner leg sweeps through heights.
pub fn compose_codes(outer: &BandCode, inner: &BandCode) -> Result<BandCode> {
    outer.validate()?;
    inner.validate()?;
    let mut degrees = Vec::with_capacity(outer.legs() * inner.legs());
    for (i, &di) in inner.degrees.iter().enumerate() {
        let visit = |dj: &i64| di * dj;
        if inner.ascends(i) {
            degrees.extend(outer.degrees.iter().map(visit));
        } else {
            degrees.extend(outer.degrees.iter().rev().map(visit));
        }
    }
    let n0 = outer.pole_image(inner.n0 as u8) as i64;
    Ok(BandCode::new(n0, degrees))
}

pub fn fiber_degree_of_composition(k1: i64, k2: i64) -> i64 {
    k1 * k2
}

/// 1-based indices of the bands of `phi` with `Δφ = ±1`.
pub fn directed_bands(phi: &PLMap) -> Result<Vec<usize>> {
    let ys = phi.breakpoints().iter().map(|b| &b.y);
    let max = ys.clone().max().expect("non-empty");
    let min = ys.min().expect("non-empty");
    if !max.is_one() || !min.is_zero() {
        return Err(Error::NotSurjective);
    }
    Ok(phi
        .band_intervals()
        .iter()
        .enumerate()
        .filter(|(_, b)| b.is_directed())
        .map(|(i, _)| i + 1)
        .collect())
}

pub fn directed_bands_of(f: &FiberedMap) -> Result<Vec<usize>> {
    directed_bands(f.phi())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantLatitude {
    /// 1-based band index.
    pub band: usize,
    pub degree: i64,
    pub h: Q,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatitudeFlag {
    /// A band of degree `|d| >= 2` ends at a fixed pole where φ has slope at
    /// least 1; a C¹ map would have zero derivative there.
    NotC1Realizable { band: usize, pole: u8, slope: Q },
    /// φ coincides with the diagonal on part of the band.
    DegenerateDiagonal { band: usize, from: Q, to: Q },
}

impl fmt::Display for LatitudeFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatitudeFlag::NotC1Realizable { band, pole, slope } => {
                write!(f, "NOT_C1_REALIZABLE: band {band} meets fixed pole h={pole} with slope {slope}")
            }
            LatitudeFlag::DegenerateDiagonal { band, from, to } => {
                write!(f, "DEGENERATE: band {band} lies on the diagonal over [{from}, {to}]")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LatitudeGuarantee {
    pub latitudes: Vec<InvariantLatitude>,
    pub flags: Vec<LatitudeFlag>,
}

impl LatitudeGuarantee {
    pub fn c1_realizable(&self) -> bool {
        !self.flags.iter().any(|f| matches!(f, LatitudeFlag::NotC1Realizable { .. }))
    }

    pub fn degenerate(&self) -> bool {
        self.flags.iter().any(|f| matches!(f, LatitudeFlag::DegenerateDiagonal { .. }))
    }
}

/// Fixed heights of φ inside directed bands of degree `|d| >= 2`, plus the
/// C¹ consistency check at fixed poles.
pub fn invariant_latitude_guarantee(f: &FiberedMap) -> LatitudeGuarantee {
    let phi = f.phi();
    let hits = diagonal_hits(phi);
    let pts = phi.breakpoints();
    let last = pts.len() - 1;
    let slope_at = |pole: u8| -> Q {
        let (a, b) = if pole == 0 { (&pts[0], &pts[1]) } else { (&pts[last - 1], &pts[last]) };
        ((&b.y - &a.y) / (&b.x - &a.x)).abs()
    };
    let pole_images = f.pole_images();

    let mut out = LatitudeGuarantee::default();
    for (i, (band, action)) in f.bands().iter().enumerate() {
        if !band.is_directed() || action.degree.abs() < 2 {
            continue;
        }
        let idx = i + 1;
        for (from, to) in &hits.segments {
            if *from < band.hi && *to > band.lo {
                out.flags.push(LatitudeFlag::DegenerateDiagonal {
                    band: idx,
                    from: from.max(&band.lo).clone(),
                    to: to.min(&band.hi).clone(),
                });
            }
        }
        out.latitudes.extend(
            hits.points
                .iter()
                .filter(|(h, _, _)| band.lo < *h && *h < band.hi)
                .filter(|(h, _, _)| !hits.segments.iter().any(|(s, e)| s <= h && h <= e))
                .map(|(h, _, _)| InvariantLatitude { band: idx, degree: action.degree, h: h.clone() }),
        );
        for (pole, at_pole) in [(0u8, band.lo.is_zero()), (1u8, band.hi.is_one())] {
            if at_pole && pole_images[pole as usize] == pole {
                let slope = slope_at(pole);
                if slope >= one() {
                    out.flags.push(LatitudeFlag::NotC1Realizable { band: idx, pole, slope });
                }
            }
        }
    }
    out
}
