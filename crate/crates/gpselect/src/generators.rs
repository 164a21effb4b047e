//! Constructions of the reference point sets: integer grids, seeded random
//! subsamples, perturbed cluster grids, parabola and Sidon sets, annulus
//! sectors, Jarník convex arcs, and collinearity-preserving projections of
//! 3D grid samples.
//!
//! Every generator is a deterministic function of its parameters and seed.
//! Randomized constructions whose correctness depends on genericity
//! (perturbed clusters, projections) re-verify their output with the
//! detectors and resample on failure rather than trusting probability.

use crate::detectors::{self, LineStatistics};
use crate::geometry::{Point, Point3, PointSet, Rational};
use crate::util::{binom3, gcd_i64};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Annulus of radii `[m - x, m]` about the center of a `(2m+1) x (2m+1)`
/// grid.
#[derive(Clone, Debug)]
pub struct AnnulusSpec {
    /// Outer radius and grid half-width.
    pub m: i64,
    /// Radial width; `0 < x < m`.
    pub x: Ratio<i64>,
    /// Grid center `o`.
    pub center: Point,
}

impl AnnulusSpec {
    pub fn new(m: i64, x: Ratio<i64>) -> Result<Self> {
        check_annulus_params(m, x)?;
        Ok(AnnulusSpec {
            m,
            x,
            center: Point::from_ints(0, 0),
        })
    }
}

fn check_annulus_params(m: i64, x: Ratio<i64>) -> Result<()> {
    if m < 1 {
        return Err(Error::InvalidParameter(format!("annulus radius m={m} < 1")));
    }
    if !x.is_positive() {
        return Err(Error::InvalidParameter("annulus width must be positive".into()));
    }
    if x > Ratio::from_integer(m) {
        return Err(Error::InvalidParameter(format!(
            "annulus width {x} exceeds radius {m}"
        )));
    }
    Ok(())
}

/// Seeded Bernoulli sampler: identical `(seed, prob, input)` always produce
/// identical samples.
#[derive(Clone, Debug)]
pub struct SeededSampler {
    pub seed: u64,
    pub prob: Ratio<u64>,
}

impl SeededSampler {
    pub fn new(seed: u64, prob: Ratio<u64>) -> Result<Self> {
        check_prob(prob)?;
        Ok(SeededSampler { seed, prob })
    }
}

fn check_prob(prob: Ratio<u64>) -> Result<()> {
    if prob.numer() == &0 || prob.numer() >= prob.denom() {
        return Err(Error::InvalidParameter(format!(
            "retention probability {prob} outside (0, 1)"
        )));
    }
    Ok(())
}

pub(crate) fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Exact Bernoulli draw with probability `num/den`, via unbiased rejection
/// sampling on the raw 64-bit stream (kept independent of `rand`'s
/// distribution internals so seeded streams stay stable).
pub(crate) fn bernoulli_draw(rng: &mut ChaCha8Rng, prob: Ratio<u64>) -> bool {
    let den = *prob.denom();
    let num = *prob.numer();
    let zone = u64::MAX - (u64::MAX % den);
    loop {
        let u = rng.next_u64();
        if u < zone {
            return u % den < num;
        }
    }
}

/// The `w x h` integer grid `{1..w} x {1..h}`.
pub fn grid(w: i64, h: i64) -> Result<PointSet> {
    if w < 1 || h < 1 {
        return Err(Error::InvalidParameter(format!(
            "grid dimensions must be positive, got {w} x {h}"
        )));
    }
    let mut coords = Vec::with_capacity((w * h) as usize);
    for x in 1..=w {
        for y in 1..=h {
            coords.push((x, y));
        }
    }
    PointSet::from_ints(&coords)
}

/// Independent per-point retention with the sampler's probability;
/// deterministic per seed.
pub fn bernoulli_sample(set: &PointSet, sampler: &SeededSampler) -> Result<PointSet> {
    check_prob(sampler.prob)?;
    let mut rng = rng_for(sampler.seed);
    let kept: Vec<Point> = set
        .iter()
        .filter(|_| bernoulli_draw(&mut rng, sampler.prob))
        .cloned()
        .collect();
    Ok(PointSet::new(kept).expect("subset of a duplicate-free set"))
}

/// Scale factor for cluster perturbations: offsets are integer multiples of
/// `1 / (64 k s M)`.
const CLUSTER_RESOLUTION: i64 = 8192;
const CLUSTER_RETRIES: usize = 64;

/// `k x k` grid of clusters, each grid point replaced by `s` collinear
/// points spanning a segment of length at most `eps = 1/(64 k s)` in a
/// random rational direction, with a random rational offset. The rejection
/// loop guarantees exactly the intended collinearity: `s_max = s` for
/// `s >= 3` and only the `k^2 * C(s, 3)` intra-cluster triples.
pub fn perturbed_cluster_grid(k: i64, s: i64, seed: u64) -> Result<PointSet> {
    if k < 2 || s < 2 {
        return Err(Error::InvalidParameter(format!(
            "cluster grid needs k >= 2 and s >= 2, got k={k}, s={s}"
        )));
    }
    let m = CLUSTER_RESOLUTION;
    let den = 64 * k * s * m; // eps = m / den = 1/(64 k s)
    let step_cap = (m / (s - 1)).max(1);
    let offset_cap = m / 4;
    let mut rng = rng_for(seed);
    for _ in 0..CLUSTER_RETRIES {
        let mut points = Vec::with_capacity((k * k * s) as usize);
        for cx in 1..=k {
            for cy in 1..=k {
                let (mut u, mut v) = (0i64, 0i64);
                while u == 0 && v == 0 {
                    u = rng.gen_range(-step_cap..=step_cap);
                    v = rng.gen_range(-step_cap..=step_cap);
                }
                let ox = rng.gen_range(-offset_cap..=offset_cap);
                let oy = rng.gen_range(-offset_cap..=offset_cap);
                for t in 0..s {
                    let nx = cx * den + ox + t * u;
                    let ny = cy * den + oy + t * v;
                    points.push(Point::new(
                        Rational::new(BigInt::from(nx), BigInt::from(den)),
                        Rational::new(BigInt::from(ny), BigInt::from(den)),
                    ));
                }
            }
        }
        let set = match PointSet::new(points) {
            Ok(set) => set,
            Err(_) => continue, // merged points; resample
        };
        if cluster_grid_is_generic(&set, k, s) {
            return Ok(set);
        }
    }
    Err(Error::RetryExhausted("could not realize generic perturbation"))
}

fn cluster_grid_is_generic(set: &PointSet, k: i64, s: i64) -> bool {
    let stats = match detectors::line_statistics(set) {
        Ok(st) => st,
        Err(_) => return false,
    };
    let intended_triples = (k * k) as u64 * binom3(s as u64);
    let expected_s_max = if s >= 3 { s as usize } else { 2 };
    stats.s_max() == expected_s_max && stats.tuples(3) == intended_triples
}

/// The moment curve sample `{(x, x^2) : x in [n]}`; contains no collinear
/// triple.
pub fn parabola_set(n: i64) -> Result<PointSet> {
    if n < 1 {
        return Err(Error::InvalidParameter(format!("parabola size {n} < 1")));
    }
    PointSet::from_ints(&(1..=n).map(|x| (x, x * x)).collect::<Vec<_>>())
}

/// Greedy Sidon subset of `[n]`: scan `x = 1, 2, ...` and admit `x` when
/// neither `x` itself nor any sum `x + s` with `s` already chosen has been
/// seen before; admitting `x` records `x`, all sums `x + s`, and `2x` as
/// seen. The blocked-value bookkeeping is conservative (it also blocks
/// values that merely equal an element or a doubled element), which keeps
/// all pairwise sums of distinct chosen elements distinct.
pub fn sidon_greedy(n: i64) -> Vec<i64> {
    let mut chosen: Vec<i64> = Vec::new();
    let mut seen: std::collections::HashSet<i64> = std::collections::HashSet::new();
    for x in 1..=n {
        if seen.contains(&x) {
            continue;
        }
        if chosen.iter().any(|&s| seen.contains(&(x + s))) {
            continue;
        }
        for &s in &chosen {
            seen.insert(x + s);
        }
        seen.insert(2 * x);
        seen.insert(x);
        chosen.push(x);
    }
    chosen
}

/// Points `(x, x^2)` over the greedy Sidon subset of `[n]`; the output has
/// pairwise distinct slopes (slope of `(a, a^2), (b, b^2)` is `a + b`).
pub fn sidon_parabola_set(n: i64) -> Result<PointSet> {
    if n < 1 {
        return Err(Error::InvalidParameter(format!("sidon size {n} < 1")));
    }
    PointSet::from_ints(
        &sidon_greedy(n)
            .into_iter()
            .map(|x| (x, x * x))
            .collect::<Vec<_>>(),
    )
}

/// Exact annulus membership: `(m - x)^2 <= i^2 + j^2 <= m^2`.
fn in_annulus(i: i64, j: i64, m: i64, x: Ratio<i64>) -> bool {
    let d2 = (i as i128) * (i as i128) + (j as i128) * (j as i128);
    if d2 > (m as i128) * (m as i128) {
        return false;
    }
    // (m - p/q)^2 <= d2  <=>  (m q - p)^2 <= d2 q^2
    let p = *x.numer() as i128;
    let q = *x.denom() as i128;
    let inner = m as i128 * q - p;
    if inner <= 0 {
        return true;
    }
    inner * inner <= d2 * q * q
}

/// Sector membership: between the rays through `(26, -15)` and `(15, -26)`,
/// a fixed-aperture wedge of roughly 30 degrees bisected by the
/// center-to-lower-right-corner diagonal. Rational surrogate for the
/// construction's 30-degree sector; the aperture only needs to be a fixed
/// constant.
fn in_sector(i: i64, j: i64) -> bool {
    26 * j + 15 * i <= 0 && 15 * j + 26 * i >= 0
}

/// All integer points of the `(2m+1) x (2m+1)` grid (centered at the
/// origin) lying in the closed annulus of radii `[m - x, m]`.
pub fn annulus_points(m: i64, x: Ratio<i64>) -> Result<PointSet> {
    annulus_filtered(m, x, |_, _| true)
}

/// The annulus restricted to the fixed sector about the lower-right
/// diagonal.
pub fn annulus_sector(m: i64, x: Ratio<i64>) -> Result<PointSet> {
    if m < 4 {
        return Err(Error::InvalidParameter(format!("sector radius m={m} < 4")));
    }
    annulus_filtered(m, x, in_sector)
}

fn annulus_filtered(m: i64, x: Ratio<i64>, keep: impl Fn(i64, i64) -> bool) -> Result<PointSet> {
    check_annulus_params(m, x)?;
    if *x.denom() > 1 << 20 || m > 1 << 20 {
        return Err(Error::InvalidParameter(
            "annulus parameters beyond supported range".into(),
        ));
    }
    let mut coords = Vec::new();
    for i in -m..=m {
        for j in -m..=m {
            if keep(i, j) && in_annulus(i, j, m, x) {
                coords.push((i, j));
            }
        }
    }
    PointSet::from_ints(&coords)
}

/// Convex monotone lattice arc in the `m x m` box: primitive vectors
/// `(a, b)` with `a, b >= 1` sorted by slope and prefix-summed from
/// `(1, 1)`, skipping vectors that would leave the box. Strictly convex,
/// hence in general position; the vertex count grows like `m^(2/3)`.
pub fn jarnik_arc(m: i64) -> Result<PointSet> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!("arc box m={m} < 2")));
    }
    // Smallest family bound whose full span exceeds the box.
    let mut bound = 1i64;
    loop {
        let span: i64 = primitive_family(bound).iter().map(|&(a, _)| a).sum();
        if span > m - 1 || bound > m {
            break;
        }
        bound += 1;
    }
    let mut vectors = primitive_family(bound);
    // Ascending slope order: b1/a1 < b2/a2 <=> b1*a2 < b2*a1.
    vectors.sort_unstable_by(|&(a1, b1), &(a2, b2)| (b1 * a2).cmp(&(b2 * a1)));
    let mut coords = vec![(1i64, 1i64)];
    let (mut cx, mut cy) = (1i64, 1i64);
    for (a, b) in vectors {
        if cx + a <= m && cy + b <= m {
            cx += a;
            cy += b;
            coords.push((cx, cy));
        }
    }
    PointSet::from_ints(&coords)
}

fn primitive_family(bound: i64) -> Vec<(i64, i64)> {
    let mut v = Vec::new();
    for a in 1..=bound {
        for b in 1..=bound {
            if gcd_i64(a, b) == 1 {
                v.push((a, b));
            }
        }
    }
    v
}

/// Profile of the 3D collinearity structure of a lattice sample, grouped by
/// the lines of R^3. Used to certify projections.
pub fn collinear_profile_3d(points: &[Point3]) -> LineStatistics {
    detectors::profile_from_hist(&detectors::forward_hist_3d(points), points.len())
}

const PROJECTION_RETRIES: usize = 32;
/// 2^61 - 1, a Mersenne prime; projection coefficients are drawn with this
/// denominator so accidental collinearity is vanishingly rare. Correctness
/// is still enforced by the verify-and-retry loop, not by probability.
const PROJECTION_DENOMINATOR: u64 = (1 << 61) - 1;

/// Bernoulli sample of the cube `[n]^3` at rate `n^(alpha-1)/2`, projected
/// to the plane by `(a, b, c) -> (a + lambda c, b + mu c)` with random
/// rational `lambda, mu`; resampled until the projection preserves the
/// full collinearity profile and merges no points.
pub fn grid3_projected_sample(n: i64, alpha: Ratio<i64>, seed: u64) -> Result<PointSet> {
    if n < 8 {
        return Err(Error::InvalidParameter(format!("cube side {n} < 8")));
    }
    if !alpha.is_positive() || alpha > Ratio::from_integer(1) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0, 1], got {alpha}"
        )));
    }
    let sample = sample_cube(n, alpha, seed)?;
    let profile3 = collinear_profile_3d(&sample);
    let mut rng = rng_for(seed ^ 0x9e37_79b9_7f4a_7c15);
    let q = BigInt::from(PROJECTION_DENOMINATOR);
    for _ in 0..PROJECTION_RETRIES {
        let lambda = BigInt::from(rng.gen_range(1..PROJECTION_DENOMINATOR));
        let mu = BigInt::from(rng.gen_range(1..PROJECTION_DENOMINATOR));
        let projected: Vec<Point> = sample
            .iter()
            .map(|p| {
                let x = Rational::new(BigInt::from(p.x) * &q + &lambda * p.z, q.clone());
                let y = Rational::new(BigInt::from(p.y) * &q + &mu * p.z, q.clone());
                Point::new(x, y)
            })
            .collect();
        let set = match PointSet::new(projected) {
            Ok(set) => set,
            Err(_) => continue, // merged points
        };
        if projection_faithful(&set, &profile3, sample.len()) {
            return Ok(set);
        }
    }
    Err(Error::RetryExhausted("projection not generic"))
}

fn projection_faithful(set: &PointSet, profile3: &LineStatistics, n3: usize) -> bool {
    if set.len() != n3 {
        return false;
    }
    if set.len() < 2 {
        return true;
    }
    let profile2 = detectors::line_statistics(set).expect("two or more points");
    profile2.k() == profile3.k()
}

fn sample_cube(n: i64, alpha: Ratio<i64>, seed: u64) -> Result<Vec<Point3>> {
    // p = n^(alpha - 1) / 2, approximated by a dyadic rational.
    let exponent = alpha.to_f64().expect("small ratio") - 1.0;
    let p = 0.5 * (n as f64).powf(exponent);
    let num = ((p * (1u64 << 32) as f64).round() as u64).max(1);
    let prob = Ratio::new(num, 1u64 << 32);
    check_prob(prob)?;
    let mut rng = rng_for(seed);
    let mut out = Vec::new();
    for x in 1..=n {
        for y in 1..=n {
            for z in 1..=n {
                if bernoulli_draw(&mut rng, prob) {
                    out.push(Point3::new(x, y, z));
                }
            }
        }
    }
    Ok(out)
}
