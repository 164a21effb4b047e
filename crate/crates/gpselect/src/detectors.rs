//! Obstacle counting and certification: collinear tuples, trapezoids
//! (repeated slopes across distinct lines), descending pairs, and the
//! incidence profile `{k_i}`.
//!
//! The counting kernels group point pairs by direction. For each point `p`
//! in canonical order, the points after `p` are grouped into *forward
//! classes* by the reduced direction of `p -> q`; a line carrying `i` points
//! contributes forward classes of sizes `i-1, i-2, ..., 1`, so the histogram
//! `F[c]` of class sizes determines the whole profile via `b_i = F[i-1]`.
//! Every count in this module is exact.

use crate::geometry::{reduced_dir_i64, slope_key, IntView, Point, Point3, PointSet};
use crate::util::{binom, binom2, binom3, gcd_u64, FxHashMap};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Incidence profile of a point set: `k_i` counts the lines through exactly
/// `i` points, `b_i` the lines through at least `i` points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineStatistics {
    n: usize,
    k: BTreeMap<usize, u64>,
    b: BTreeMap<usize, u64>,
    s_max: usize,
}

impl LineStatistics {
    /// Number of points the profile was computed from.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Map `i -> k_i` over the support (`k_i > 0`).
    pub fn k(&self) -> &BTreeMap<usize, u64> {
        &self.k
    }

    /// Map `i -> b_i = sum_{j >= i} k_j` over `2..=s_max`.
    pub fn b(&self) -> &BTreeMap<usize, u64> {
        &self.b
    }

    pub fn k_at(&self, i: usize) -> u64 {
        self.k.get(&i).copied().unwrap_or(0)
    }

    pub fn b_at(&self, i: usize) -> u64 {
        self.b.get(&i).copied().unwrap_or(0)
    }

    /// Maximum collinearity: the largest `i` with `k_i > 0` (at least 2 for
    /// any set of two or more points).
    pub fn s_max(&self) -> usize {
        self.s_max
    }

    /// Number of collinear `t`-tuples, `sum_i k_i * C(i, t)`.
    pub fn tuples(&self, t: usize) -> u64 {
        let mut acc: u128 = 0;
        for (&i, &ki) in &self.k {
            acc += ki as u128 * binom(i as u64, t as u64);
        }
        u64::try_from(acc).expect("tuple count exceeds u64")
    }
}

/// Builds the profile from the forward-class histogram `f` (`f[c]` = number
/// of forward classes of size exactly `c`).
pub(crate) fn profile_from_hist(f: &[u64], n: usize) -> LineStatistics {
    let mut s_max = 2;
    for (c, &cnt) in f.iter().enumerate().skip(1) {
        if cnt > 0 {
            s_max = s_max.max(c + 1);
        }
    }
    let mut k = BTreeMap::new();
    let mut b = BTreeMap::new();
    for i in 2..=s_max {
        let bi = f.get(i - 1).copied().unwrap_or(0);
        let bnext = f.get(i).copied().unwrap_or(0);
        if bi > 0 {
            b.insert(i, bi);
        }
        if bi > bnext {
            k.insert(i, bi - bnext);
        }
    }
    LineStatistics { n, k, b, s_max }
}

/// Upper bound on dense direction-table size; beyond this the kernels fall
/// back to hashing.
const DENSE_LIMIT: usize = 6 << 20;

struct Bounds {
    w: i64,
    h: i64,
}

fn bounds(coords: &[(i64, i64)]) -> Bounds {
    let mut min_x = i64::MAX;
    let mut max_x = i64::MIN;
    let mut min_y = i64::MAX;
    let mut max_y = i64::MIN;
    for &(x, y) in coords {
        min_x = min_x.min(x);
        max_x = max_x.max(x);
        min_y = min_y.min(y);
        max_y = max_y.max(y);
    }
    Bounds {
        w: max_x - min_x,
        h: max_y - min_y,
    }
}

fn dense_dims(b: &Bounds) -> Option<(usize, usize)> {
    let cols = usize::try_from(2 * b.h + 1).ok()?;
    let rows = usize::try_from(b.w + 1).ok()?;
    let size = rows.checked_mul(cols)?;
    (size <= DENSE_LIMIT).then_some((size, cols))
}

/// Forward-class histogram of an integer point set (canonical order).
fn forward_hist_int(coords: &[(i64, i64)]) -> Vec<u64> {
    let n = coords.len();
    if n < 2 {
        return vec![0; n.max(1)];
    }
    let bnd = bounds(coords);
    let dense = dense_dims(&bnd);
    let chunks = split_ranges(n);
    let hists: Vec<Vec<u64>> = chunks
        .into_par_iter()
        .map(|range| {
            let mut f = vec![0u64; n];
            match dense {
                Some((size, cols)) => {
                    let h = bnd.h;
                    let mut counts = vec![0u32; size];
                    let mut epoch = vec![0u32; size];
                    let mut touched: Vec<usize> = Vec::new();
                    for i in range {
                        let stamp = i as u32 + 1;
                        touched.clear();
                        let (xi, yi) = coords[i];
                        for &(xj, yj) in &coords[i + 1..] {
                            let (dx, dy) = fast_dir(xj - xi, yj - yi);
                            let idx = dx as usize * cols + (dy + h) as usize;
                            if epoch[idx] != stamp {
                                epoch[idx] = stamp;
                                counts[idx] = 1;
                                touched.push(idx);
                            } else {
                                counts[idx] += 1;
                            }
                        }
                        for &idx in &touched {
                            f[counts[idx] as usize] += 1;
                        }
                    }
                }
                None => {
                    let mut classes: FxHashMap<(i64, i64), u32> = FxHashMap::default();
                    for i in range {
                        classes.clear();
                        let (xi, yi) = coords[i];
                        for &(xj, yj) in &coords[i + 1..] {
                            let d = fast_dir(xj - xi, yj - yi);
                            *classes.entry(d).or_insert(0) += 1;
                        }
                        for &c in classes.values() {
                            f[c as usize] += 1;
                        }
                    }
                }
            }
            f
        })
        .collect();
    merge_hists(hists, n)
}

/// Reduced forward direction. Forward pairs in canonical order already have
/// `dx > 0`, or `dx = 0` and `dy > 0`, so no sign normalization is needed.
#[inline]
fn fast_dir(dx: i64, dy: i64) -> (i64, i64) {
    debug_assert!(dx > 0 || (dx == 0 && dy > 0));
    let g = gcd_u64(dx as u64, dy.unsigned_abs()) as i64;
    (dx / g, dy / g)
}

fn split_ranges(n: usize) -> Vec<std::ops::Range<usize>> {
    // Work per index i is proportional to n - i; split so chunks carry
    // roughly equal numbers of pairs.
    let pieces = (rayon::current_num_threads() * 8).clamp(1, n.max(1));
    let total = n as u64 * (n as u64 + 1) / 2;
    let per = total / pieces as u64 + 1;
    let mut ranges = Vec::new();
    let mut start = 0usize;
    let mut acc = 0u64;
    for i in 0..n {
        acc += (n - i) as u64;
        if acc >= per || i + 1 == n {
            ranges.push(start..i + 1);
            start = i + 1;
            acc = 0;
        }
    }
    ranges
}

fn merge_hists(hists: Vec<Vec<u64>>, n: usize) -> Vec<u64> {
    let mut out = vec![0u64; n];
    for h in hists {
        for (o, v) in out.iter_mut().zip(h) {
            *o += v;
        }
    }
    out
}

/// Forward-class histogram via exact rational directions (slow path).
fn forward_hist_rat(points: &[Point]) -> Vec<u64> {
    let n = points.len();
    let mut f = vec![0u64; n.max(1)];
    let mut classes: FxHashMap<(BigInt, BigInt), u32> = FxHashMap::default();
    for i in 0..n {
        classes.clear();
        for j in i + 1..n {
            let key = rat_dir(&points[i], &points[j]);
            *classes.entry(key).or_insert(0) += 1;
        }
        for &c in classes.values() {
            f[c as usize] += 1;
        }
    }
    f
}

fn rat_dir(p: &Point, q: &Point) -> (BigInt, BigInt) {
    let k = slope_key(p, q).expect("distinct points");
    (k.dx, k.dy)
}

/// Forward-class histogram of a 3D integer point set, used to certify the
/// collinearity-preserving projection.
pub(crate) fn forward_hist_3d(points: &[Point3]) -> Vec<u64> {
    let mut pts = points.to_vec();
    pts.sort_unstable();
    let n = pts.len();
    let mut f = vec![0u64; n.max(1)];
    let mut classes: FxHashMap<(i64, i64, i64), u32> = FxHashMap::default();
    for i in 0..n {
        classes.clear();
        let p = pts[i];
        for q in &pts[i + 1..] {
            let (dx, dy, dz) = (q.x - p.x, q.y - p.y, q.z - p.z);
            let g = gcd_u64(
                gcd_u64(dx.unsigned_abs(), dy.unsigned_abs()),
                dz.unsigned_abs(),
            ) as i64;
            *classes.entry((dx / g, dy / g, dz / g)).or_insert(0) += 1;
        }
        for &c in classes.values() {
            f[c as usize] += 1;
        }
    }
    f
}

fn forward_hist(set: &PointSet) -> Vec<u64> {
    match set.int_view() {
        Some(view) => forward_hist_int(&view.coords),
        None => forward_hist_rat(set.points()),
    }
}

/// Exact incidence profile of `P`, computed by grouping all pairs by the
/// line they span.
pub fn line_statistics(set: &PointSet) -> Result<LineStatistics> {
    if set.len() < 2 {
        return Err(Error::InsufficientPoints {
            needed: 2,
            got: set.len(),
        });
    }
    Ok(profile_from_hist(&forward_hist(set), set.len()))
}

/// Number of collinear `t`-tuples, `sum_i k_i * C(i, t)`.
pub fn count_collinear_tuples(set: &PointSet, t: usize) -> Result<u64> {
    if t < 3 {
        return Err(Error::InvalidParameter(format!(
            "tuple size must be at least 3, got {t}"
        )));
    }
    if set.len() < t {
        return Ok(0);
    }
    Ok(line_statistics(set)?.tuples(t))
}

/// Number of trapezoids: unordered pairs of point-pairs with equal slope on
/// distinct lines. Computed as
/// `sum_slopes C(Q, 2) - sum_i k_i * C(C(i, 2), 2)`:
/// the first term counts same-slope pair-pairs, the second removes the ones
/// sharing a line (all pairs on one line share its slope).
pub fn count_trapezoids(set: &PointSet) -> Result<u64> {
    if set.len() < 4 {
        return Err(Error::InsufficientPoints {
            needed: 4,
            got: set.len(),
        });
    }
    let same_slope: u128 = match set.int_view() {
        Some(view) => slope_pair_collisions_int(&view.coords),
        None => slope_pair_collisions_rat(set.points()),
    };
    let stats = line_statistics(set)?;
    let mut same_line: u128 = 0;
    for (&i, &ki) in stats.k() {
        same_line += ki as u128 * binom2(binom2(i as u64)) as u128;
    }
    Ok(u64::try_from(same_slope - same_line).expect("trapezoid count exceeds u64"))
}

/// `sum_slopes C(Q_slope, 2)` over the global slope histogram.
fn slope_pair_collisions_int(coords: &[(i64, i64)]) -> u128 {
    let n = coords.len();
    let bnd = bounds(coords);
    let dense = dense_dims(&bnd);
    let chunks = split_ranges(n);
    match dense {
        Some((size, cols)) => {
            let h = bnd.h;
            let tables: Vec<Vec<u64>> = chunks
                .into_par_iter()
                .map(|range| {
                    let mut counts = vec![0u64; size];
                    for i in range {
                        let (xi, yi) = coords[i];
                        for &(xj, yj) in &coords[i + 1..] {
                            let (dx, dy) = fast_dir(xj - xi, yj - yi);
                            counts[dx as usize * cols + (dy + h) as usize] += 1;
                        }
                    }
                    counts
                })
                .collect();
            let mut acc: u128 = 0;
            for idx in 0..size {
                let q: u64 = tables.iter().map(|t| t[idx]).sum();
                if q > 1 {
                    acc += binom2(q) as u128;
                }
            }
            acc
        }
        None => {
            let maps: Vec<FxHashMap<(i64, i64), u64>> = chunks
                .into_par_iter()
                .map(|range| {
                    let mut m: FxHashMap<(i64, i64), u64> = FxHashMap::default();
                    for i in range {
                        let (xi, yi) = coords[i];
                        for &(xj, yj) in &coords[i + 1..] {
                            *m.entry(fast_dir(xj - xi, yj - yi)).or_insert(0) += 1;
                        }
                    }
                    m
                })
                .collect();
            let mut merged: FxHashMap<(i64, i64), u64> = FxHashMap::default();
            for m in maps {
                for (k, v) in m {
                    *merged.entry(k).or_insert(0) += v;
                }
            }
            merged.values().map(|&q| binom2(q) as u128).sum()
        }
    }
}

fn slope_pair_collisions_rat(points: &[Point]) -> u128 {
    let mut m: FxHashMap<(BigInt, BigInt), u64> = FxHashMap::default();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            *m.entry(rat_dir(&points[i], &points[j])).or_insert(0) += 1;
        }
    }
    m.values().map(|&q| binom2(q) as u128).sum()
}

/// Number of pairs `(u, v)` with `u_x < v_x` and `u_y > v_y`.
pub fn count_descending_pairs(set: &PointSet) -> u64 {
    let points = set.points();
    let n = points.len();
    if n < 2 {
        return 0;
    }
    // Rank points by y (exact order), then sweep in canonical x order and
    // count earlier points with a strictly larger y via a Fenwick tree.
    let mut by_y: Vec<usize> = (0..n).collect();
    by_y.sort_unstable_by(|&a, &b| points[a].y.cmp(&points[b].y));
    let mut rank = vec![0usize; n];
    let mut r = 0;
    for t in 0..n {
        if t > 0 && points[by_y[t]].y != points[by_y[t - 1]].y {
            r += 1;
        }
        rank[by_y[t]] = r;
    }
    let m = r + 1;
    let mut fenwick = vec![0u64; m + 1];
    let add = |fw: &mut Vec<u64>, mut i: usize| {
        i += 1;
        while i <= m {
            fw[i] += 1;
            i += i & i.wrapping_neg();
        }
    };
    let prefix = |fw: &Vec<u64>, mut i: usize| -> u64 {
        let mut s = 0;
        while i > 0 {
            s += fw[i];
            i -= i & i.wrapping_neg();
        }
        s
    };
    let mut total: u64 = 0;
    let mut inserted: u64 = 0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && points[j].x == points[i].x {
            j += 1;
        }
        for p in i..j {
            // Earlier points with y rank strictly above rank[p].
            total += inserted - prefix(&fenwick, rank[p] + 1);
        }
        for p in i..j {
            add(&mut fenwick, rank[p]);
            inserted += 1;
        }
        i = j;
    }
    total
}

/// `None` when `P` is in general position, otherwise one collinear triple
/// (the first found in canonical scan order).
pub fn verify_general_position(set: &PointSet) -> Option<[Point; 3]> {
    let idx = match set.int_view() {
        Some(view) => find_collinear_triple_int(&view.coords)?,
        None => find_collinear_triple_rat(set.points())?,
    };
    let p = set.points();
    Some([p[idx[0]].clone(), p[idx[1]].clone(), p[idx[2]].clone()])
}

fn find_collinear_triple_int(coords: &[(i64, i64)]) -> Option<[usize; 3]> {
    let n = coords.len();
    let mut first: FxHashMap<(i64, i64), usize> = FxHashMap::default();
    for i in 0..n {
        first.clear();
        let (xi, yi) = coords[i];
        for (j, &(xj, yj)) in coords.iter().enumerate().skip(i + 1) {
            let d = fast_dir(xj - xi, yj - yi);
            match first.entry(d) {
                std::collections::hash_map::Entry::Occupied(e) => {
                    return Some([i, *e.get(), j]);
                }
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(j);
                }
            }
        }
    }
    None
}

fn find_collinear_triple_rat(points: &[Point]) -> Option<[usize; 3]> {
    let n = points.len();
    let mut first: FxHashMap<(BigInt, BigInt), usize> = FxHashMap::default();
    for i in 0..n {
        first.clear();
        for j in i + 1..n {
            let d = rat_dir(&points[i], &points[j]);
            match first.entry(d) {
                std::collections::hash_map::Entry::Occupied(e) => {
                    return Some([i, *e.get(), j]);
                }
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(j);
                }
            }
        }
    }
    None
}

/// Two point pairs sharing a slope key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeWitness {
    pub first: (Point, Point),
    pub second: (Point, Point),
}

/// `None` when all `C(n, 2)` slope keys are distinct, otherwise two pairs
/// sharing a key. Covers both collinear triples and trapezoids.
pub fn verify_distinct_slopes(set: &PointSet) -> Option<SlopeWitness> {
    let idx = match set.int_view() {
        Some(view) => find_slope_collision_int(&view.coords)?,
        None => find_slope_collision_rat(set.points())?,
    };
    let p = set.points();
    Some(SlopeWitness {
        first: (p[idx.0].clone(), p[idx.1].clone()),
        second: (p[idx.2].clone(), p[idx.3].clone()),
    })
}

fn find_slope_collision_int(coords: &[(i64, i64)]) -> Option<(usize, usize, usize, usize)> {
    let mut first: FxHashMap<(i64, i64), (usize, usize)> = FxHashMap::default();
    for i in 0..coords.len() {
        let (xi, yi) = coords[i];
        for (j, &(xj, yj)) in coords.iter().enumerate().skip(i + 1) {
            let d = fast_dir(xj - xi, yj - yi);
            if let Some(&(a, b)) = first.get(&d) {
                return Some((a, b, i, j));
            }
            first.insert(d, (i, j));
        }
    }
    None
}

fn find_slope_collision_rat(points: &[Point]) -> Option<(usize, usize, usize, usize)> {
    let mut first: FxHashMap<(BigInt, BigInt), (usize, usize)> = FxHashMap::default();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = rat_dir(&points[i], &points[j]);
            if let Some(&(a, b)) = first.get(&d) {
                return Some((a, b, i, j));
            }
            first.insert(d, (i, j));
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonotoneDirection {
    NonDecreasing,
    NonIncreasing,
    /// Both clauses hold (e.g. all points share an x or a y coordinate).
    Both,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonotoneVerdict {
    Monotone(MonotoneDirection),
    /// Neither clause holds; one violating pair per clause.
    NotMonotone {
        non_decreasing_violation: (Point, Point),
        non_increasing_violation: (Point, Point),
    },
}

impl MonotoneVerdict {
    pub fn is_monotone(&self) -> bool {
        matches!(self, MonotoneVerdict::Monotone(_))
    }

    pub fn is_non_decreasing(&self) -> bool {
        matches!(
            self,
            MonotoneVerdict::Monotone(MonotoneDirection::NonDecreasing)
                | MonotoneVerdict::Monotone(MonotoneDirection::Both)
        )
    }

    pub fn is_non_increasing(&self) -> bool {
        matches!(
            self,
            MonotoneVerdict::Monotone(MonotoneDirection::NonIncreasing)
                | MonotoneVerdict::Monotone(MonotoneDirection::Both)
        )
    }
}

/// Checks the two monotonicity clauses. Points sharing an x coordinate are
/// unconstrained (the clauses quantify over `u_x < v_x` only).
pub fn verify_monotone(set: &PointSet) -> MonotoneVerdict {
    let points = set.points();
    // Violation of non-decreasing: a descending pair. Violation of
    // non-increasing: an ascending pair. Track extremes over strictly
    // smaller x.
    let mut desc: Option<(usize, usize)> = None;
    let mut asc: Option<(usize, usize)> = None;
    let mut max_y: Option<usize> = None;
    let mut min_y: Option<usize> = None;
    let mut i = 0;
    let n = points.len();
    while i < n {
        let mut j = i;
        while j < n && points[j].x == points[i].x {
            j += 1;
        }
        for p in i..j {
            if desc.is_none() {
                if let Some(m) = max_y {
                    if points[m].y > points[p].y {
                        desc = Some((m, p));
                    }
                }
            }
            if asc.is_none() {
                if let Some(m) = min_y {
                    if points[m].y < points[p].y {
                        asc = Some((m, p));
                    }
                }
            }
        }
        for p in i..j {
            if max_y.is_none_or(|m| points[p].y > points[m].y) {
                max_y = Some(p);
            }
            if min_y.is_none_or(|m| points[p].y < points[m].y) {
                min_y = Some(p);
            }
        }
        i = j;
    }
    match (desc, asc) {
        (None, None) => MonotoneVerdict::Monotone(MonotoneDirection::Both),
        (None, Some(_)) => MonotoneVerdict::Monotone(MonotoneDirection::NonDecreasing),
        (Some(_), None) => MonotoneVerdict::Monotone(MonotoneDirection::NonIncreasing),
        (Some((a, b)), Some((c, d))) => MonotoneVerdict::NotMonotone {
            non_decreasing_violation: (points[a].clone(), points[b].clone()),
            non_increasing_violation: (points[c].clone(), points[d].clone()),
        },
    }
}

/// One row of the Szemerédi–Trotter profile check.
#[derive(Clone, Debug)]
pub struct StProfileRow {
    pub i: usize,
    pub b_i: u64,
    /// `C * (n^2 / i^3 + n / i)` as an exact rational.
    pub bound: Ratio<BigInt>,
    pub pass: bool,
}

/// Compares each tail `b_i` against `C * (n^2/i^3 + n/i)`.
pub fn st_profile_check(set: &PointSet, c: Ratio<i64>) -> Result<Vec<StProfileRow>> {
    if !c.is_positive() {
        return Err(Error::InvalidParameter(
            "Szemerédi–Trotter constant must be positive".into(),
        ));
    }
    let stats = line_statistics(set)?;
    let n = BigInt::from(stats.n());
    let c = Ratio::new(BigInt::from(*c.numer()), BigInt::from(*c.denom()));
    let mut rows = Vec::new();
    for i in 2..=stats.s_max() {
        let b_i = stats.b_at(i);
        let ib = BigInt::from(i);
        // n^2/i^3 + n/i = (n^2 + n i^2) / i^3
        let bound = &c * Ratio::new(&n * &n + &n * &ib * &ib, &ib * &ib * &ib);
        let pass = Ratio::from_integer(BigInt::from(b_i)) <= bound;
        rows.push(StProfileRow { i, b_i, bound, pass });
    }
    Ok(rows)
}

/// Witnesses accompanying an [`ObstacleReport`]; each list is capped.
#[derive(Clone, Debug, Default)]
pub struct ObstacleWitnesses {
    pub collinear_triples: Vec<[Point; 3]>,
    pub trapezoids: Vec<SlopeWitness>,
    pub descending_pairs: Vec<(Point, Point)>,
}

/// Counts of the three obstacle structures, with optional witnesses.
#[derive(Clone, Debug)]
pub struct ObstacleReport {
    pub collinear_triples: u64,
    pub trapezoids: u64,
    pub descending_pairs: u64,
    pub witnesses: Option<ObstacleWitnesses>,
}

const WITNESS_CAP: usize = 4;

/// Full obstacle census of `P`. Witness collection is intended for
/// desk-sized sets.
pub fn obstacle_report(set: &PointSet, with_witnesses: bool) -> ObstacleReport {
    let triples = if set.len() >= 3 {
        count_collinear_tuples(set, 3).expect("t >= 3")
    } else {
        0
    };
    let trapezoids = if set.len() >= 4 {
        count_trapezoids(set).expect("len checked")
    } else {
        0
    };
    let descending = count_descending_pairs(set);
    let witnesses = with_witnesses.then(|| collect_witnesses(set, triples, trapezoids));
    ObstacleReport {
        collinear_triples: triples,
        trapezoids,
        descending_pairs: descending,
        witnesses,
    }
}

fn collect_witnesses(set: &PointSet, triples: u64, trapezoids: u64) -> ObstacleWitnesses {
    let mut w = ObstacleWitnesses::default();
    let points = set.points();
    if triples > 0 {
        if let Some(t) = verify_general_position(set) {
            w.collinear_triples.push(t);
        }
    }
    if trapezoids > 0 {
        // Scan pairs grouped by slope; report collisions on distinct lines.
        let mut seen: Vec<((BigInt, BigInt), (usize, usize))> = Vec::new();
        'outer: for i in 0..points.len() {
            for j in i + 1..points.len() {
                let d = rat_dir(&points[i], &points[j]);
                for ((sd, pair), _) in seen.iter().map(|e| (e, ())) {
                    if *sd == d {
                        let (a, b) = *pair;
                        let on_same_line = crate::geometry::line_key(&points[a], &points[b])
                            .unwrap()
                            .contains(&points[i]);
                        if !on_same_line {
                            w.trapezoids.push(SlopeWitness {
                                first: (points[a].clone(), points[b].clone()),
                                second: (points[i].clone(), points[j].clone()),
                            });
                            if w.trapezoids.len() >= WITNESS_CAP {
                                break 'outer;
                            }
                        }
                    }
                }
                seen.push((d, (i, j)));
            }
        }
    }
    let mut max_seen: Option<usize> = None;
    let mut i = 0;
    while i < points.len() && w.descending_pairs.len() < WITNESS_CAP {
        let mut j = i;
        while j < points.len() && points[j].x == points[i].x {
            j += 1;
        }
        for p in i..j {
            if let Some(m) = max_seen {
                if points[m].y > points[p].y && w.descending_pairs.len() < WITNESS_CAP {
                    w.descending_pairs.push((points[m].clone(), points[p].clone()));
                }
            }
        }
        for p in i..j {
            if max_seen.is_none_or(|m| points[p].y > points[m].y) {
                max_seen = Some(p);
            }
        }
        i = j;
    }
    w
}

/// Pair-partition identity: `sum_i k_i * C(i, 2) = C(n, 2)`.
pub fn pair_partition_holds(stats: &LineStatistics) -> bool {
    let total: u128 = stats
        .k()
        .iter()
        .map(|(&i, &ki)| ki as u128 * binom2(i as u64) as u128)
        .sum();
    total == binom2(stats.n() as u64) as u128
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use proptest::prelude::*;

    fn grid(w: i64, h: i64) -> PointSet {
        let mut v = Vec::new();
        for x in 1..=w {
            for y in 1..=h {
                v.push((x, y));
            }
        }
        PointSet::from_ints(&v).unwrap()
    }

    fn collinear_run(m: i64) -> PointSet {
        PointSet::from_ints(&(0..m).map(|i| (i, 2 * i)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn line_statistics_3x3() {
        let stats = line_statistics(&grid(3, 3)).unwrap();
        assert_eq!(stats.k_at(2), 12);
        assert_eq!(stats.k_at(3), 8);
        assert_eq!(stats.s_max(), 3);
        assert!(pair_partition_holds(&stats));
    }

    #[test]
    fn line_statistics_edge_cases() {
        let two = PointSet::from_ints(&[(0, 0), (3, 1)]).unwrap();
        let stats = line_statistics(&two).unwrap();
        assert_eq!(stats.k_at(2), 1);
        assert_eq!(stats.s_max(), 2);

        let five = collinear_run(5);
        let stats = line_statistics(&five).unwrap();
        assert_eq!(stats.k_at(5), 1);
        assert_eq!(stats.s_max(), 5);

        let one = PointSet::from_ints(&[(0, 0)]).unwrap();
        assert!(matches!(
            line_statistics(&one),
            Err(Error::InsufficientPoints { .. })
        ));
    }

    #[test]
    fn collinear_tuple_counts() {
        assert_eq!(count_collinear_tuples(&grid(3, 3), 3).unwrap(), 8);
        assert_eq!(count_collinear_tuples(&collinear_run(5), 4).unwrap(), 5);
        let parabola = generators::parabola_set(6).unwrap();
        for t in 3..=5 {
            assert_eq!(count_collinear_tuples(&parabola, t).unwrap(), 0);
        }
        assert!(count_collinear_tuples(&grid(2, 2), 2).is_err());
    }

    #[test]
    fn trapezoid_counts() {
        assert_eq!(count_trapezoids(&grid(2, 2)).unwrap(), 2);
        assert_eq!(count_trapezoids(&collinear_run(4)).unwrap(), 0);
        let parabola = generators::parabola_set(4).unwrap();
        assert_eq!(count_trapezoids(&parabola).unwrap(), 1);
        assert!(count_trapezoids(&collinear_run(3)).is_err());
    }

    #[test]
    fn descending_pair_counts() {
        let s = PointSet::from_ints(&[(0, 0), (1, 1), (2, 0)]).unwrap();
        assert_eq!(count_descending_pairs(&s), 1);
        let up = PointSet::from_ints(&(0..10).map(|i| (i, i)).collect::<Vec<_>>()).unwrap();
        assert_eq!(count_descending_pairs(&up), 0);
        let down = PointSet::from_ints(&(0..7).map(|i| (i, -i)).collect::<Vec<_>>()).unwrap();
        assert_eq!(count_descending_pairs(&down), binom2(7));
        // Equal x contributes nothing.
        let col = PointSet::from_ints(&[(0, 0), (0, 5), (0, -5)]).unwrap();
        assert_eq!(count_descending_pairs(&col), 0);
    }

    #[test]
    fn general_position_verdicts() {
        assert!(verify_general_position(&grid(2, 2)).is_none());
        assert!(verify_general_position(&PointSet::empty()).is_none());
        let witness = verify_general_position(&grid(3, 3)).unwrap();
        assert_eq!(
            crate::geometry::orientation(&witness[0], &witness[1], &witness[2]).unwrap(),
            0
        );
    }

    #[test]
    fn distinct_slope_verdicts() {
        // Sidon set {1, 2, 5, 11} on the parabola.
        let sidon =
            PointSet::from_ints(&[(1, 1), (2, 4), (5, 25), (11, 121)]).unwrap();
        assert!(verify_distinct_slopes(&sidon).is_none());

        let tri = collinear_run(3);
        let w = verify_distinct_slopes(&tri).unwrap();
        assert_eq!(
            slope_key(&w.first.0, &w.first.1).unwrap(),
            slope_key(&w.second.0, &w.second.1).unwrap()
        );

        let w = verify_distinct_slopes(&grid(2, 2)).unwrap();
        assert_eq!(
            slope_key(&w.first.0, &w.first.1).unwrap(),
            slope_key(&w.second.0, &w.second.1).unwrap()
        );
    }

    #[test]
    fn monotone_verdicts() {
        let nd = PointSet::from_ints(&[(0, 0), (1, 2), (2, 2)]).unwrap();
        assert_eq!(
            verify_monotone(&nd),
            MonotoneVerdict::Monotone(MonotoneDirection::NonDecreasing)
        );
        let ni = PointSet::from_ints(&[(0, 5), (3, 5), (4, 1)]).unwrap();
        assert_eq!(
            verify_monotone(&ni),
            MonotoneVerdict::Monotone(MonotoneDirection::NonIncreasing)
        );
        let neither = PointSet::from_ints(&[(0, 0), (1, 2), (2, 1)]).unwrap();
        match verify_monotone(&neither) {
            MonotoneVerdict::NotMonotone {
                non_decreasing_violation: (u, v),
                non_increasing_violation: (a, b),
            } => {
                assert!(u.x < v.x && u.y > v.y);
                assert!(a.x < b.x && a.y < b.y);
            }
            v => panic!("expected violations, got {v:?}"),
        }
        let flat = PointSet::from_ints(&[(0, 1), (1, 1), (2, 1)]).unwrap();
        assert_eq!(
            verify_monotone(&flat),
            MonotoneVerdict::Monotone(MonotoneDirection::Both)
        );
    }

    #[test]
    fn st_profile_3x3() {
        let rows = st_profile_check(&grid(3, 3), Ratio::new(40, 1)).unwrap();
        assert!(rows.iter().all(|r| r.pass));
        let b2 = rows.iter().find(|r| r.i == 2).unwrap();
        assert_eq!(b2.b_i, 20);
        assert!(st_profile_check(&grid(3, 3), Ratio::new(0, 1)).is_err());
    }

    #[test]
    fn st_profile_single_line() {
        for m in [3i64, 7, 20] {
            let rows = st_profile_check(&collinear_run(m), Ratio::new(1, 1)).unwrap();
            let last = rows.iter().find(|r| r.i == m as usize).unwrap();
            assert_eq!(last.b_i, 1);
            assert!(last.pass);
        }
    }

    #[test]
    fn obstacle_report_with_witnesses() {
        let s = PointSet::from_ints(&[(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 2)]).unwrap();
        let report = obstacle_report(&s, true);
        let w = report.witnesses.unwrap();
        assert_eq!(report.collinear_triples > 0, !w.collinear_triples.is_empty());
        assert_eq!(report.trapezoids > 0, !w.trapezoids.is_empty());
        assert_eq!(report.descending_pairs > 0, !w.descending_pairs.is_empty());
        for sw in &w.trapezoids {
            assert_eq!(
                slope_key(&sw.first.0, &sw.first.1).unwrap(),
                slope_key(&sw.second.0, &sw.second.1).unwrap()
            );
            assert_ne!(
                crate::geometry::line_key(&sw.first.0, &sw.first.1).unwrap(),
                crate::geometry::line_key(&sw.second.0, &sw.second.1).unwrap()
            );
        }
    }

    #[test]
    fn distinct_slopes_implies_general_position() {
        let sets = [
            PointSet::from_ints(&[(1, 1), (2, 4), (5, 25), (11, 121)]).unwrap(),
            grid(2, 2),
            grid(3, 3),
            collinear_run(5),
        ];
        for s in &sets {
            if verify_distinct_slopes(s).is_none() {
                assert!(verify_general_position(s).is_none());
            }
        }
    }

    proptest! {
        /// The pair-partition identity holds for arbitrary small sets, and
        /// the rational slow path agrees with the integer fast path.
        #[test]
        fn profile_identity_random(coords in proptest::collection::hash_set((0i64..15, 0i64..15), 2..28)) {
            let coords: Vec<(i64, i64)> = coords.into_iter().collect();
            let set = PointSet::from_ints(&coords).unwrap();
            let stats = line_statistics(&set).unwrap();
            prop_assert!(pair_partition_holds(&stats));
            let slow = profile_from_hist(&forward_hist_rat(set.points()), set.len());
            prop_assert_eq!(stats, slow);
        }

        /// Descending-pair counts are invariant under translation and
        /// positive axis-aligned scaling.
        #[test]
        fn descending_invariance(coords in proptest::collection::hash_set((-10i64..10, -10i64..10), 2..15),
                                 tx in -5i64..5, ty in -5i64..5, sx in 1i64..4, sy in 1i64..4) {
            let coords: Vec<(i64, i64)> = coords.into_iter().collect();
            let base = PointSet::from_ints(&coords).unwrap();
            let moved = PointSet::from_ints(
                &coords.iter().map(|&(x, y)| (sx * x + tx, sy * y + ty)).collect::<Vec<_>>()
            ).unwrap();
            prop_assert_eq!(count_descending_pairs(&base), count_descending_pairs(&moved));
        }
    }
}
