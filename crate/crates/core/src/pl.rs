//! Exact piecewise-linear self-maps of `[0, 1]`.
//!
//! All arithmetic on heights is exact; floats appear only in the `*_f64`
//! shadow used by the numerical oracle and in entropy values.

use std::cmp::Ordering;
use std::fmt;
use std::io::Write;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{one, parse_q, to_f64, zero, Q};

/// Default ceiling on the number of breakpoints an iterate may have.
pub const DEFAULT_BREAKPOINT_CAP: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Breakpoint {
    pub x: Q,
    pub y: Q,
}

/// A continuous piecewise-linear map `[0,1] -> [0,1]` given by its breakpoints.
#[derive(Debug, Clone)]
pub struct PLMap {
    points: Vec<Breakpoint>,
    fx: Vec<f64>,
    fy: Vec<f64>,
}

impl PartialEq for PLMap {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points
    }
}

impl Eq for PLMap {}

impl PLMap {
    pub fn new(points: Vec<(Q, Q)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidPlMap("need at least two breakpoints".into()));
        }
        if !points[0].0.is_zero() || !points[points.len() - 1].0.is_one() {
            return Err(Error::InvalidPlMap("breakpoints must start at x=0 and end at x=1".into()));
        }
        for w in points.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::InvalidPlMap(format!(
                    "x must be strictly increasing ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        if let Some((_, y)) = points.iter().find(|(_, y)| y.is_negative() || *y > one()) {
            return Err(Error::InvalidPlMap(format!("value {y} outside [0,1]")));
        }
        Ok(Self::from_points_unchecked(
            points.into_iter().map(|(x, y)| Breakpoint { x, y }).collect(),
        ))
    }

    fn from_points_unchecked(points: Vec<Breakpoint>) -> Self {
        let fx = points.iter().map(|p| to_f64(&p.x)).collect();
        let fy = points.iter().map(|p| to_f64(&p.y)).collect();
        Self { points, fx, fy }
    }

    pub fn identity() -> Self {
        Self::from_points_unchecked(vec![
            Breakpoint { x: zero(), y: zero() },
            Breakpoint { x: one(), y: one() },
        ])
    }

    /// Full sawtooth with `legs` linear legs alternating between 0 and 1,
    /// starting at height `start` (0 or 1) at `x = 0`.
    pub fn sawtooth(start: bool, legs: usize) -> Self {
        assert!(legs >= 1);
        let n = Q::from_integer(legs.into());
        let points = (0..=legs)
            .map(|i| Breakpoint {
                x: Q::from_integer(i.into()) / &n,
                y: if (i % 2 == 1) != start { one() } else { zero() },
            })
            .collect();
        Self::from_points_unchecked(points)
    }

    pub fn breakpoints(&self) -> &[Breakpoint] {
        &self.points
    }

    pub fn segment_count(&self) -> usize {
        self.points.len() - 1
    }

    fn slope(&self, seg: usize) -> Q {
        let (a, b) = (&self.points[seg], &self.points[seg + 1]);
        (&b.y - &a.y) / (&b.x - &a.x)
    }

    /// Index of the segment `[x_i, x_{i+1}]` containing `x`; right-closed at the end.
    fn segment_of(&self, x: &Q) -> usize {
        let i = self.points.partition_point(|p| p.x <= *x);
        i.clamp(1, self.points.len() - 1) - 1
    }

    pub fn eval(&self, x: &Q) -> Q {
        let s = self.segment_of(x);
        let (a, b) = (&self.points[s], &self.points[s + 1]);
        if *x == a.x {
            return a.y.clone();
        }
        &a.y + (&b.y - &a.y) * (x - &a.x) / (&b.x - &a.x)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        let i = self.fx.partition_point(|&p| p <= x);
        let s = i.clamp(1, self.fx.len() - 1) - 1;
        let (x0, x1, y0, y1) = (self.fx[s], self.fx[s + 1], self.fy[s], self.fy[s + 1]);
        if x == x0 {
            return y0;
        }
        if x == x1 {
            return y1;
        }
        (y0 + (y1 - y0) * (x - x0) / (x1 - x0)).clamp(0.0, 1.0)
    }

    /// Number of maximal monotone pieces; a constant run joins its neighbour.
    pub fn lap_count(&self) -> usize {
        let mut laps = 1;
        let mut current = Ordering::Equal;
        for w in self.points.windows(2) {
            let dir = w[1].y.cmp(&w[0].y);
            if dir == Ordering::Equal {
                continue;
            }
            if current != Ordering::Equal && dir != current {
                laps += 1;
            }
            current = dir;
        }
        laps
    }

    /// `Some(laps)` when every lap is strictly monotone and onto `[0,1]`.
    ///
    /// For such maps the `n`-th iterate has exactly `laps^n` laps.
    pub fn full_branch_laps(&self) -> Option<usize> {
        let mut laps = 0;
        let mut start = 0;
        let mut current = Ordering::Equal;
        for (i, w) in self.points.windows(2).enumerate() {
            let dir = w[1].y.cmp(&w[0].y);
            if dir == Ordering::Equal {
                return None;
            }
            if current != Ordering::Equal && dir != current {
                if !self.spans_unit(start, i) {
                    return None;
                }
                laps += 1;
                start = i;
            }
            current = dir;
        }
        if !self.spans_unit(start, self.points.len() - 1) {
            return None;
        }
        Some(laps + 1)
    }

    fn spans_unit(&self, from: usize, to: usize) -> bool {
        let (a, b) = (&self.points[from].y, &self.points[to].y);
        (a.is_zero() && b.is_one()) || (a.is_one() && b.is_zero())
    }

    /// Connected components of `{h : 0 < φ(h) < 1}`, in order.
    ///
    /// These are the band intervals of any fibered map over this latitude map.
    pub fn band_intervals(&self) -> Vec<BandInterval> {
        let mut hits: Vec<(Q, Q)> = Vec::new();
        for w in self.points.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            for t in [zero(), one()] {
                if a.y == t && b.y == t {
                    hits.push((a.x.clone(), b.x.clone()));
                } else if a.y == t {
                    hits.push((a.x.clone(), a.x.clone()));
                } else if b.y == t {
                    hits.push((b.x.clone(), b.x.clone()));
                } else if ((&a.y - &t) * (&b.y - &t)).is_negative() {
                    let x = &a.x + (&t - &a.y) * (&b.x - &a.x) / (&b.y - &a.y);
                    hits.push((x.clone(), x));
                }
            }
        }
        hits.sort();
        let mut merged: Vec<(Q, Q)> = Vec::new();
        for (s, e) in hits {
            match merged.last_mut() {
                Some(last) if s <= last.1 => {
                    if e > last.1 {
                        last.1 = e;
                    }
                }
                _ => merged.push((s, e)),
            }
        }

        let mut bands = Vec::new();
        let mut cursor = zero();
        // whether `cursor` itself lies outside every hit, i.e. 0 with φ(0) ∉ {0,1}
        let mut cursor_in_gap = true;
        for (s, e) in merged {
            if s > cursor {
                bands.push(self.band(cursor.clone(), s.clone(), cursor_in_gap));
            }
            cursor = e;
            cursor_in_gap = false;
        }
        if cursor < one() {
            bands.push(self.band(cursor, one(), cursor_in_gap));
        }
        bands
    }

    fn band(&self, lo: Q, hi: Q, lo_closed: bool) -> BandInterval {
        let flo = self.eval(&lo);
        let fhi = self.eval(&hi);
        let hi_closed = hi.is_one() && !fhi.is_zero() && !fhi.is_one();
        BandInterval { delta: fhi - flo, lo, hi, lo_closed, hi_closed }
    }

    /// Symbol of the band containing `h`, given this map's band intervals.
    pub fn symbol_of(bands: &[BandInterval], h: &Q) -> Symbol {
        if h.is_zero() || h.is_one() {
            if let Some(i) = bands.iter().position(|b| b.contains(h)) {
                return Symbol::Band(i + 1);
            }
            return Symbol::Pole;
        }
        let i = bands.partition_point(|b| b.hi <= *h);
        match bands.get(i) {
            Some(b) if b.contains(h) => Symbol::Band(i + 1),
            _ => Symbol::Cut,
        }
    }

    pub fn itinerary(&self, bands: &[BandInterval], h: &Q, n: usize) -> Vec<Symbol> {
        let mut y = h.clone();
        let mut word = Vec::with_capacity(n);
        for j in 0..n {
            word.push(Self::symbol_of(bands, &y));
            if j + 1 < n {
                y = self.eval(&y);
            }
        }
        word
    }
}

impl fmt::Display for PLMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.points.iter().map(|p| format!("({}, {})", p.x, p.y)).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// JSON form: `{"breakpoints": [["0","0"], ["1/2","1"], ["1","0"]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PLMapJson {
    pub breakpoints: Vec<(String, String)>,
}

impl TryFrom<&PLMapJson> for PLMap {
    type Error = Error;

    fn try_from(j: &PLMapJson) -> Result<Self> {
        let pts = j
            .breakpoints
            .iter()
            .map(|(x, y)| Ok((parse_q(x)?, parse_q(y)?)))
            .collect::<Result<Vec<_>>>()?;
        PLMap::new(pts)
    }
}

impl From<&PLMap> for PLMapJson {
    fn from(p: &PLMap) -> Self {
        Self {
            breakpoints: p.points.iter().map(|b| (b.x.to_string(), b.y.to_string())).collect(),
        }
    }
}

/// A component of `φ^{-1}(0,1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandInterval {
    pub lo: Q,
    pub hi: Q,
    /// `φ(hi) - φ(lo)`: `+1` ascending, `-1` descending, `0` neutral.
    pub delta: Q,
    lo_closed: bool,
    hi_closed: bool,
}

impl BandInterval {
    pub fn contains(&self, h: &Q) -> bool {
        (self.lo < *h || (self.lo_closed && self.lo == *h)) && (*h < self.hi || (self.hi_closed && self.hi == *h))
    }

    pub fn is_directed(&self) -> bool {
        self.delta.abs().is_one()
    }

    pub fn midpoint(&self) -> Q {
        (&self.lo + &self.hi) / Q::from_integer(2.into())
    }
}

/// One letter of an itinerary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    /// 1-based band number.
    Band(usize),
    /// A pole, `h ∈ {0, 1}`.
    Pole,
    /// An interior height outside every band (mapped straight to a pole).
    Cut,
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Band(i) => write!(f, "{i}"),
            Symbol::Pole => write!(f, "P"),
            Symbol::Cut => write!(f, "C"),
        }
    }
}

impl Serialize for Symbol {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Symbol::Band(i) => s.serialize_u64(*i as u64),
            other => s.collect_str(other),
        }
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(usize),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(i) => Ok(Symbol::Band(i)),
            Raw::S(s) if s == "P" => Ok(Symbol::Pole),
            Raw::S(s) if s == "C" => Ok(Symbol::Cut),
            Raw::S(s) => Err(serde::de::Error::custom(format!("bad itinerary symbol `{s}`"))),
        }
    }
}

pub fn itinerary_string(word: &[Symbol]) -> String {
    word.iter().map(Symbol::to_string).collect::<Vec<_>>().join("-")
}

/// Exact `outer ∘ inner`, capped at `cap` breakpoints.
pub fn compose_pl_capped(outer: &PLMap, inner: &PLMap, cap: usize) -> Result<PLMap> {
    let ox = &outer.points;
    // Outer breakpoints strictly inside (lo, hi).
    let inside = |lo: &Q, hi: &Q| {
        let a = ox.partition_point(|p| p.x <= *lo);
        let b = ox.partition_point(|p| p.x < *hi);
        a..b.max(a)
    };

    let mut total = 1usize;
    for w in inner.points.windows(2) {
        let (lo, hi) = minmax(&w[0].y, &w[1].y);
        total = total.saturating_add(inside(lo, hi).len() + 1);
    }
    if total > cap {
        return Err(Error::ResourceLimit(format!("composition needs {total} breakpoints (cap {cap})")));
    }

    let mut pts: Vec<Breakpoint> = Vec::with_capacity(total);
    let first = &inner.points[0];
    pts.push(Breakpoint { x: first.x.clone(), y: outer.eval(&first.y) });
    for w in inner.points.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.y != b.y {
            let (lo, hi) = minmax(&a.y, &b.y);
            let range = inside(lo, hi);
            let dx = &b.x - &a.x;
            let dy = &b.y - &a.y;
            let mut push = |k: usize| {
                let t = &ox[k];
                let x = &a.x + (&t.x - &a.y) * &dx / &dy;
                pts.push(Breakpoint { x, y: t.y.clone() });
            };
            if b.y > a.y {
                range.for_each(&mut push);
            } else {
                range.rev().for_each(&mut push);
            }
        }
        pts.push(Breakpoint { x: b.x.clone(), y: outer.eval(&b.y) });
    }
    Ok(PLMap::from_points_unchecked(merge_collinear(pts)))
}

/// Exact `outer ∘ inner` with the default cap.
pub fn compose_pl(outer: &PLMap, inner: &PLMap) -> Result<PLMap> {
    compose_pl_capped(outer, inner, DEFAULT_BREAKPOINT_CAP)
}

fn minmax<'a>(a: &'a Q, b: &'a Q) -> (&'a Q, &'a Q) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn merge_collinear(pts: Vec<Breakpoint>) -> Vec<Breakpoint> {
    let mut out: Vec<Breakpoint> = Vec::with_capacity(pts.len());
    for p in pts {
        if let Some(last) = out.last() {
            if last.x == p.x {
                continue;
            }
        }
        if out.len() >= 2 {
            let (a, b) = (&out[out.len() - 2], &out[out.len() - 1]);
            if (&b.y - &a.y) * (&p.x - &b.x) == (&p.y - &b.y) * (&b.x - &a.x) {
                out.pop();
            }
        }
        out.push(p);
    }
    out
}

/// `p^n` with an explicit breakpoint cap.
pub fn iterate_pl_capped(p: &PLMap, n: usize, cap: usize) -> Result<PLMap> {
    if n == 0 {
        return Err(Error::InvalidPlMap("iterate count must be at least 1".into()));
    }
    let mut acc = p.clone();
    for _ in 1..n {
        acc = compose_pl_capped(p, &acc, cap)?;
    }
    Ok(acc)
}

pub fn iterate_pl(p: &PLMap, n: usize) -> Result<PLMap> {
    iterate_pl_capped(p, n, DEFAULT_BREAKPOINT_CAP)
}

pub fn lap_count(p: &PLMap) -> usize {
    p.lap_count()
}

/// `(1/n) ln laps(p^n)`.
///
/// Full-branch maps whose iterate would exceed the cap use `laps^n` directly.
pub fn entropy_estimate_capped(p: &PLMap, n: usize, cap: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidPlMap("iterate count must be at least 1".into()));
    }
    if let Some(laps) = p.full_branch_laps() {
        let predicted = (laps as f64).powi(n as i32) + 1.0;
        if predicted > cap as f64 {
            return Ok((laps as f64).ln());
        }
    }
    let laps = iterate_pl_capped(p, n, cap)?.lap_count();
    Ok((laps as f64).ln() / n as f64)
}

pub fn entropy_estimate(p: &PLMap, n: usize) -> Result<f64> {
    entropy_estimate_capped(p, n, DEFAULT_BREAKPOINT_CAP)
}

/// A height fixed by `φ^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedHeight {
    pub h: Q,
    /// Symbols of `h, φ(h), …, φ^{n-1}(h)`.
    pub itinerary: Vec<Symbol>,
    /// The graph of `φ^n` crosses the diagonal here rather than touching it.
    pub transversal: bool,
    /// An adjacent piece of `φ^n` is flat.
    pub plateau_adjacent: bool,
}

/// Solutions of `g(h) = h` for one PL map, before itineraries are attached.
#[derive(Debug, Clone, Default)]
pub(crate) struct DiagonalHits {
    pub points: Vec<(Q, bool, bool)>,
    /// Pieces of `g` lying on the diagonal, as `(from, to)`.
    pub segments: Vec<(Q, Q)>,
}

pub(crate) fn diagonal_hits(g: &PLMap) -> DiagonalHits {
    let pts = &g.points;
    let slopes: Vec<Q> = (0..g.segment_count()).map(|i| g.slope(i)).collect();
    let mut hits = DiagonalHits::default();
    let one = one();

    let at_breakpoint = |j: usize| -> (bool, bool) {
        let left = j.checked_sub(1).map(|i| &slopes[i]);
        let right = slopes.get(j);
        let flat = left.is_some_and(Zero::is_zero) || right.is_some_and(Zero::is_zero);
        let transversal = match (left, right) {
            (Some(l), Some(r)) => ((l - &one) * (r - &one)).is_positive(),
            (Some(s), None) | (None, Some(s)) => *s != one,
            (None, None) => false,
        };
        (transversal, flat)
    };

    for (i, s) in slopes.iter().enumerate() {
        let (a, b) = (&pts[i], &pts[i + 1]);
        if *s == one {
            if a.y == a.x {
                hits.segments.push((a.x.clone(), b.x.clone()));
                push_unique(&mut hits.points, (a.x.clone(), false, s.is_zero()));
                push_unique(&mut hits.points, (b.x.clone(), false, s.is_zero()));
            }
            continue;
        }
        let x = (&a.y - s * &a.x) / (&one - s);
        if x < a.x || x > b.x {
            continue;
        }
        let flags = if x == a.x {
            at_breakpoint(i)
        } else if x == b.x {
            at_breakpoint(i + 1)
        } else {
            (true, s.is_zero())
        };
        push_unique(&mut hits.points, (x, flags.0, flags.1));
    }
    hits
}

fn push_unique(v: &mut Vec<(Q, bool, bool)>, p: (Q, bool, bool)) {
    if v.last().is_none_or(|last| last.0 != p.0) {
        v.push(p);
    }
}

/// All `h` with `p^n(h) = h`, sorted, each with its length-`n` itinerary.
pub fn fixed_heights_capped(p: &PLMap, n: usize, cap: usize) -> Result<Vec<FixedHeight>> {
    let g = iterate_pl_capped(p, n, cap)?;
    let hits = diagonal_hits(&g);
    if let Some((from, to)) = hits.segments.first() {
        return Err(Error::DegenerateDiagonal { from: from.to_string(), to: to.to_string() });
    }
    let bands = p.band_intervals();
    Ok(hits
        .points
        .into_par_iter()
        .map(|(h, transversal, plateau_adjacent)| FixedHeight {
            itinerary: p.itinerary(&bands, &h, n),
            h,
            transversal,
            plateau_adjacent,
        })
        .collect())
}

pub fn fixed_heights(p: &PLMap, n: usize) -> Result<Vec<FixedHeight>> {
    fixed_heights_capped(p, n, DEFAULT_BREAKPOINT_CAP)
}

/// CSV with columns `h_num,h_den,itinerary,transversal`.
pub fn write_fixed_heights_csv<W: Write>(out: W, heights: &[FixedHeight]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(["h_num", "h_den", "itinerary", "transversal"]).map_err(io)?;
    for fh in heights {
        w.write_record([
            fh.h.numer().to_string(),
            fh.h.denom().to_string(),
            itinerary_string(&fh.itinerary),
            fh.transversal.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn tent() -> PLMap {
        PLMap::sawtooth(false, 2)
    }

    fn pl(points: &[(i64, i64, i64, i64)]) -> PLMap {
        PLMap::new(points.iter().map(|&(a, b, c, d)| (q(a, b), q(c, d))).collect()).unwrap()
    }

    #[test]
    fn rejects_malformed_maps() {
        assert!(PLMap::new(vec![(zero(), zero())]).is_err());
        assert!(PLMap::new(vec![(q(1, 2), zero()), (one(), one())]).is_err());
        assert!(PLMap::new(vec![(zero(), zero()), (q(1, 2), one()), (q(1, 2), zero()), (one(), one())]).is_err());
        assert!(PLMap::new(vec![(zero(), qi(2)), (one(), one())]).is_err());
    }

    #[test]
    fn eval_exact() {
        let t = tent();
        assert_eq!(t.eval(&q(1, 4)), q(1, 2));
        assert_eq!(t.eval(&q(1, 2)), one());
        assert_eq!(t.eval(&one()), zero());
        assert!((t.eval_f64(0.75) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn tent_squared_is_four_leg_sawtooth() {
        let t2 = compose_pl(&tent(), &tent()).unwrap();
        assert_eq!(t2, PLMap::sawtooth(false, 4));
    }

    #[test]
    fn identity_is_neutral() {
        let p = pl(&[(0, 1, 0, 1), (1, 3, 1, 1), (1, 2, 1, 2), (1, 1, 0, 1)]);
        assert_eq!(compose_pl(&PLMap::identity(), &p).unwrap(), p);
        assert_eq!(compose_pl(&p, &PLMap::identity()).unwrap(), p);
    }

    #[test]
    fn lap_counts() {
        assert_eq!(tent().lap_count(), 2);
        assert_eq!(PLMap::sawtooth(false, 3).lap_count(), 3);
        assert_eq!(PLMap::identity().lap_count(), 1);
        // flat, up, flat is one monotone piece
        assert_eq!(pl(&[(0, 1, 0, 1), (1, 4, 0, 1), (3, 4, 1, 1), (1, 1, 1, 1)]).lap_count(), 1);
        let flat = PLMap::new(vec![(zero(), q(1, 2)), (one(), q(1, 2))]).unwrap();
        assert_eq!(flat.lap_count(), 1);
    }

    #[test]
    fn iterate_lap_growth() {
        assert_eq!(iterate_pl(&tent(), 3).unwrap().lap_count(), 8);
        assert_eq!(iterate_pl(&PLMap::sawtooth(false, 3), 4).unwrap().lap_count(), 81);
        assert_eq!(iterate_pl(&tent(), 1).unwrap(), tent());
        assert!(iterate_pl(&tent(), 0).is_err());
    }

    #[test]
    fn iterate_respects_cap() {
        let err = iterate_pl_capped(&tent(), 12, 1000).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit(_)));
    }

    #[test]
    fn entropy_of_sawtooths() {
        assert!((entropy_estimate(&tent(), 10).unwrap() - 2f64.ln()).abs() < 1e-12);
        assert!((entropy_estimate(&PLMap::sawtooth(false, 3), 8).unwrap() - 3f64.ln()).abs() < 1e-12);
        assert_eq!(entropy_estimate(&PLMap::identity(), 5).unwrap(), 0.0);
        // beyond the cap the closed form takes over
        assert!((entropy_estimate_capped(&tent(), 40, 1000).unwrap() - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn full_branch_detection() {
        assert_eq!(tent().full_branch_laps(), Some(2));
        assert_eq!(PLMap::identity().full_branch_laps(), Some(1));
        assert_eq!(pl(&[(0, 1, 0, 1), (1, 2, 3, 4), (1, 1, 1, 1)]).full_branch_laps(), Some(1));
        assert_eq!(pl(&[(0, 1, 0, 1), (1, 2, 3, 4), (1, 1, 0, 1)]).full_branch_laps(), None);
    }

    #[test]
    fn band_intervals_of_sawtooth() {
        let b = PLMap::sawtooth(false, 3).band_intervals();
        assert_eq!(b.len(), 3);
        assert_eq!((b[1].lo.clone(), b[1].hi.clone()), (q(1, 3), q(2, 3)));
        assert_eq!(b[1].delta, qi(-1));
        assert!(b.iter().all(BandInterval::is_directed));
    }

    #[test]
    fn band_intervals_skip_plateaus() {
        // flat at 0 on [0,1/4] and at 1 on [3/4,1]
        let p = pl(&[(0, 1, 0, 1), (1, 4, 0, 1), (3, 4, 1, 1), (1, 1, 1, 1)]);
        let b = p.band_intervals();
        assert_eq!(b.len(), 1);
        assert_eq!((b[0].lo.clone(), b[0].hi.clone()), (q(1, 4), q(3, 4)));
        // φ never reaching 0 or 1 in the interior: a single band containing the endpoints
        let c = PLMap::new(vec![(zero(), q(1, 2)), (one(), q(1, 2))]).unwrap();
        let b = c.band_intervals();
        assert_eq!(b.len(), 1);
        assert!(b[0].contains(&zero()) && b[0].contains(&one()));
        assert!(!b[0].is_directed());
    }

    #[test]
    fn tent_fixed_heights() {
        let f1: Vec<Q> = fixed_heights(&tent(), 1).unwrap().into_iter().map(|f| f.h).collect();
        assert_eq!(f1, vec![zero(), q(2, 3)]);
        let f2 = fixed_heights(&tent(), 2).unwrap();
        let hs: Vec<Q> = f2.iter().map(|f| f.h.clone()).collect();
        assert_eq!(hs, vec![zero(), q(2, 5), q(2, 3), q(4, 5)]);
        assert_eq!(f2[1].itinerary, vec![Symbol::Band(1), Symbol::Band(2)]);
        assert_eq!(f2[0].itinerary, vec![Symbol::Pole, Symbol::Pole]);
        assert!(f2.iter().all(|f| f.transversal));
    }

    #[test]
    fn three_leg_fixed_heights_include_poles() {
        let f = fixed_heights(&PLMap::sawtooth(false, 3), 1).unwrap();
        let hs: Vec<Q> = f.iter().map(|f| f.h.clone()).collect();
        assert_eq!(hs, vec![zero(), q(1, 2), one()]);
    }

    #[test]
    fn diagonal_piece_is_degenerate() {
        let err = fixed_heights(&PLMap::identity(), 1).unwrap_err();
        assert!(matches!(err, Error::DegenerateDiagonal { .. }));
    }

    #[test]
    fn touching_is_flagged() {
        // peak touching the diagonal at 1/2 from below
        let p = pl(&[(0, 1, 0, 1), (1, 4, 0, 1), (1, 2, 1, 2), (1, 1, 0, 1)]);
        let f = fixed_heights(&p, 1).unwrap();
        let mid = f.iter().find(|f| f.h == q(1, 2)).unwrap();
        assert!(!mid.transversal);
    }

    #[test]
    fn csv_export() {
        let mut buf = Vec::new();
        write_fixed_heights_csv(&mut buf, &fixed_heights(&tent(), 2).unwrap()).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "h_num,h_den,itinerary,transversal");
        assert_eq!(lines[2], "2,5,1-2,true");
    }

    #[test]
    fn json_round_trip() {
        let p = PLMap::sawtooth(true, 3);
        let j = serde_json::to_string(&PLMapJson::from(&p)).unwrap();
        let back: PLMapJson = serde_json::from_str(&j).unwrap();
        assert_eq!(PLMap::try_from(&back).unwrap(), p);
    }
}
