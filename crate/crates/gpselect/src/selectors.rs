//! Constructive selection and coloring procedures. Every selector
//! re-verifies its output with the detectors before returning; an
//! uncertified result is reported as [`Error::Certification`], never
//! returned silently.

use crate::detectors::{
    self, count_descending_pairs, verify_distinct_slopes, verify_general_position,
    verify_monotone,
};
use crate::generators::{self, bernoulli_draw, rng_for, SeededSampler};
use crate::geometry::{line_key, line_key_i64, slope_key, Point, PointSet};
use crate::oracle::{self, OracleBudget};
use crate::util::{binom2, binom3, FxHashMap, FxHashSet};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::Ratio;
use rand::Rng;
use rayon::prelude::*;
use std::hash::Hash;

/// Retention constant `c` in the annulus pipeline rate
/// `p = c / (n^(1/5) (ln n)^(4/5))`. Calibrated once at desk scale and
/// frozen; see the scaling tests.
pub const ANNULUS_RETENTION_C: f64 = 2.0;

/// Constant `c` in the distinct-slope sample size `k = c (n / ln s)^(1/3)`,
/// calibrated once and frozen.
pub const SLOPES_RETENTION_C: f64 = 1.0;

/// Pinned constant `C` in the coloring round count `ln ln n - 2C`; with
/// `C = 1` the halving phase only activates beyond desk scale, and the
/// coloring degenerates to pure repeated extraction (documented behavior).
pub const COLORING_CONSTANT: u32 = 1;

/// Number of seeded greedy restarts used to approximate a largest
/// general-position subset in the coloring's extraction phase.
const PHASE2_SEEDS: u64 = 3;

/// Residues at most this large are extracted with the exact oracle instead
/// of multi-seed greedy.
const PHASE2_EXACT_CUTOFF: usize = 20;

/// What a selection certifies about its output.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certificate {
    GeneralPosition,
    Monotone,
    MonotoneGeneralPosition,
    DistinctSlopes,
}

/// Counts describing how a selection arrived at its output.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SelectionTrace {
    /// Points that entered the selection stage (the Bernoulli sample size
    /// for sample-and-delete selectors, the input size otherwise).
    pub sampled: u64,
    /// Obstacle structures encountered (blocked candidates, surviving
    /// triples, descending pairs, repeated-slope pair-pairs).
    pub obstacles: u64,
    /// Points removed; `chosen = sampled - deletions`.
    pub deletions: u64,
}

/// A certified subset together with its selection trace.
#[derive(Clone, Debug)]
pub struct SelectionResult {
    pub chosen: PointSet,
    pub certificate: Certificate,
    pub trace: SelectionTrace,
    pub seed: u64,
}

fn certify(result: SelectionResult) -> Result<SelectionResult> {
    let ok = match result.certificate {
        Certificate::GeneralPosition => verify_general_position(&result.chosen).is_none(),
        Certificate::Monotone => verify_monotone(&result.chosen).is_monotone(),
        Certificate::MonotoneGeneralPosition => {
            verify_monotone(&result.chosen).is_monotone()
                && verify_general_position(&result.chosen).is_none()
        }
        Certificate::DistinctSlopes => verify_distinct_slopes(&result.chosen).is_none(),
    };
    if ok {
        Ok(result)
    } else {
        Err(Error::Certification(format!(
            "selector output fails its {:?} certificate",
            result.certificate
        )))
    }
}

fn shuffled_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = rng_for(seed);
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    order
}

fn greedy_core<K: Eq + Hash>(order: &[usize], key: impl Fn(usize, usize) -> K) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut seen: FxHashSet<K> = FxHashSet::default();
    for &p in order {
        seen.clear();
        let mut ok = true;
        for &q in &chosen {
            // p closes a triple iff two chosen points share a line with it.
            if !seen.insert(key(p, q)) {
                ok = false;
                break;
            }
        }
        if ok {
            chosen.push(p);
        }
    }
    chosen
}

fn greedy_indices(set: &PointSet, order: &[usize]) -> Vec<usize> {
    match set.int_view() {
        Some(view) => {
            let coords = &view.coords;
            greedy_core(order, |i, j| line_key_i64(coords[i], coords[j]))
        }
        None => {
            let pts = set.points();
            greedy_core(order, |i, j| {
                let k = line_key(&pts[i], &pts[j]).expect("distinct points");
                (k.a, k.b, k.c)
            })
        }
    }
}

/// Greedy general-position selection over a seeded random order: a point is
/// kept iff it closes no collinear triple with two already-kept points.
///
/// Any maximal greedy set blocks every unchosen point through some chosen
/// pair, and a line holds at most `s_max - 2` blocked points per chosen
/// pair, which gives the size floor asserted in the tests.
pub fn greedy_general_position(set: &PointSet, order_seed: u64) -> Result<SelectionResult> {
    let order = shuffled_indices(set.len(), order_seed);
    let chosen_idx = greedy_indices(set, &order);
    let blocked = (set.len() - chosen_idx.len()) as u64;
    certify(SelectionResult {
        chosen: set.subset(&chosen_idx),
        certificate: Certificate::GeneralPosition,
        trace: SelectionTrace {
            sampled: set.len() as u64,
            obstacles: blocked,
            deletions: blocked,
        },
        seed: order_seed,
    })
}

/// Lines through at least two of the given points, as member lists of
/// global indices.
fn line_classes(set: &PointSet, indices: &[usize]) -> Vec<Vec<usize>> {
    fn group<K: Eq + Hash>(
        indices: &[usize],
        key: impl Fn(usize, usize) -> K,
    ) -> Vec<Vec<usize>> {
        let mut map: FxHashMap<K, Vec<usize>> = FxHashMap::default();
        for (a, &i) in indices.iter().enumerate() {
            for &j in &indices[a + 1..] {
                let e = map.entry(key(i, j)).or_default();
                e.push(i);
                e.push(j);
            }
        }
        map.into_values()
            .map(|mut v| {
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect()
    }
    let mut classes = match set.int_view() {
        Some(view) => {
            let coords = &view.coords;
            group(indices, |i, j| line_key_i64(coords[i], coords[j]))
        }
        None => {
            let pts = set.points();
            group(indices, |i, j| {
                let k = line_key(&pts[i], &pts[j]).expect("distinct points");
                (k.a, k.b, k.c)
            })
        }
    };
    classes.sort_unstable();
    classes
}

/// Bernoulli sample followed by obstacle deletion: while some line carries
/// three surviving points, delete the survivor of maximum triple degree
/// (ties to the canonically smallest point).
pub fn sample_delete_general_position(
    set: &PointSet,
    prob: Ratio<u64>,
    seed: u64,
) -> Result<SelectionResult> {
    let sampler = SeededSampler::new(seed, prob)?;
    let mut rng = rng_for(sampler.seed);
    let sample: Vec<usize> = (0..set.len())
        .filter(|_| bernoulli_draw(&mut rng, sampler.prob))
        .collect();
    let sampled = sample.len() as u64;

    let lines = line_classes(set, &sample);
    let mut alive: FxHashSet<usize> = sample.iter().copied().collect();
    let mut line_count: Vec<usize> = lines.iter().map(|l| l.len()).collect();
    let point_lines: FxHashMap<usize, Vec<usize>> = {
        let mut m: FxHashMap<usize, Vec<usize>> = FxHashMap::default();
        for (li, line) in lines.iter().enumerate() {
            for &p in line {
                m.entry(p).or_default().push(li);
            }
        }
        m
    };
    let obstacles: u64 = line_count.iter().map(|&c| binom3(c as u64)).sum();

    let mut deletions = 0u64;
    loop {
        let mut best: Option<(u64, usize)> = None;
        for &p in &sample {
            if !alive.contains(&p) {
                continue;
            }
            let deg: u64 = point_lines
                .get(&p)
                .map(|ls| {
                    ls.iter()
                        .map(|&li| {
                            if line_count[li] >= 3 {
                                binom2(line_count[li] as u64 - 1)
                            } else {
                                0
                            }
                        })
                        .sum()
                })
                .unwrap_or(0);
            if deg > 0 {
                // Sample indices are scanned in canonical order, so ties
                // resolve to the canonically smallest point.
                let better = match best {
                    None => true,
                    Some((b, _)) => deg > b,
                };
                if better {
                    best = Some((deg, p));
                }
            }
        }
        match best {
            None => break,
            Some((_, p)) => {
                alive.remove(&p);
                deletions += 1;
                if let Some(ls) = point_lines.get(&p) {
                    for &li in ls {
                        line_count[li] -= 1;
                    }
                }
            }
        }
    }

    let mut chosen_idx: Vec<usize> = sample.into_iter().filter(|p| alive.contains(p)).collect();
    chosen_idx.sort_unstable();
    certify(SelectionResult {
        chosen: set.subset(&chosen_idx),
        certificate: Certificate::GeneralPosition,
        trace: SelectionTrace {
            sampled,
            obstacles,
            deletions,
        },
        seed,
    })
}

/// Longest chain under `violates(tail, cur) -> must replace`, patience
/// style; returns indices into `seq`.
fn longest_chain(
    seq: &[&Point],
    violates: impl Fn(&Point, &Point) -> bool,
) -> Vec<usize> {
    let n = seq.len();
    let mut tails: Vec<usize> = Vec::new(); // seq index ending best chain per length
    let mut parent: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let pos = tails.partition_point(|&t| !violates(seq[t], seq[i]));
        if pos > 0 {
            parent[i] = Some(tails[pos - 1]);
        }
        if pos == tails.len() {
            tails.push(i);
        } else {
            tails[pos] = i;
        }
    }
    let mut chain = Vec::new();
    let mut cur = tails.last().copied();
    while let Some(i) = cur {
        chain.push(i);
        cur = parent[i];
    }
    chain.reverse();
    chain
}

/// Longest monotone subset via patience sorting, taking the better of the
/// two directions (non-decreasing wins ties). The output size is at least
/// `ceil(sqrt(n))`.
pub fn longest_monotone(set: &PointSet) -> Result<SelectionResult> {
    let points = set.points();
    let n = points.len();

    // Non-decreasing: canonical (x, y) order, longest non-decreasing y.
    let nd_refs: Vec<&Point> = points.iter().collect();
    let nd = longest_chain(&nd_refs, |tail, cur| tail.y > cur.y);

    // Non-increasing: (x asc, y desc) order, longest non-increasing y.
    let mut ni_order: Vec<usize> = (0..n).collect();
    ni_order.sort_by(|&a, &b| {
        points[a]
            .x
            .cmp(&points[b].x)
            .then_with(|| points[b].y.cmp(&points[a].y))
    });
    let ni_refs: Vec<&Point> = ni_order.iter().map(|&i| &points[i]).collect();
    let ni = longest_chain(&ni_refs, |tail, cur| tail.y < cur.y);

    let chosen_idx: Vec<usize> = if nd.len() >= ni.len() {
        nd
    } else {
        ni.into_iter().map(|i| ni_order[i]).collect()
    };
    let dropped = (n - chosen_idx.len()) as u64;
    certify(SelectionResult {
        chosen: set.subset(&chosen_idx),
        certificate: Certificate::Monotone,
        trace: SelectionTrace {
            sampled: n as u64,
            obstacles: dropped,
            deletions: dropped,
        },
        seed: 0,
    })
}

/// Stage 1 extracts a general-position subset (greedy and sample-delete at
/// rate 1/2, whichever is larger for the seed); stage 2 extracts its
/// longest monotone subset. The result carries both certificates.
pub fn monotone_gp_two_stage(set: &PointSet, seed: u64) -> Result<SelectionResult> {
    let greedy = greedy_general_position(set, seed)?;
    let stage1 = if set.len() >= 1 {
        let sampled = sample_delete_general_position(set, Ratio::new(1, 2), seed)?;
        if sampled.chosen.len() > greedy.chosen.len() {
            sampled
        } else {
            greedy
        }
    } else {
        greedy
    };
    let stage2 = longest_monotone(&stage1.chosen)?;
    let sampled = stage1.trace.sampled;
    let final_len = stage2.chosen.len() as u64;
    certify(SelectionResult {
        chosen: stage2.chosen,
        certificate: Certificate::MonotoneGeneralPosition,
        trace: SelectionTrace {
            sampled,
            obstacles: stage1.trace.obstacles + (stage1.chosen.len() as u64 - final_len),
            deletions: sampled - final_len,
        },
        seed,
    })
}

/// Clamps a real rate into a dyadic `Ratio<u64>` inside (0, 1).
fn dyadic_prob(p: f64) -> Ratio<u64> {
    const DEN: u64 = 1 << 32;
    let num = ((p * DEN as f64).round() as i64).clamp(1, DEN as i64 - 1) as u64;
    Ratio::new(num, DEN)
}

/// The radial width used by the annulus pipeline at grid parameter `m`:
/// `x = n^(1/10) (ln n)^(2/5)` rounded to a multiple of 1/1024.
pub fn annulus_width(m: i64) -> Ratio<i64> {
    let n = ((2 * m + 1) * (2 * m + 1)) as f64;
    let x = n.powf(0.1) * n.ln().powf(0.4);
    Ratio::new((x * 1024.0).round() as i64, 1024)
}

/// The retention rate used by the annulus pipeline,
/// `p = c / (n^(1/5) (ln n)^(4/5))` with the pinned constant.
pub fn annulus_rate(m: i64) -> Ratio<u64> {
    let n = ((2 * m + 1) * (2 * m + 1)) as f64;
    dyadic_prob(ANNULUS_RETENTION_C / (n.powf(0.2) * n.ln().powf(0.8)))
}

/// Monotone general-position subset of the grid via the annulus-sector
/// pipeline: build the sector at the pinned width, Bernoulli-sample at the
/// pinned rate, then delete one point per surviving obstacle (descending
/// pairs and collinear triples, greedy by combined degree).
pub fn annulus_monotone_gp(m: i64, seed: u64) -> Result<SelectionResult> {
    if m < 32 {
        return Err(Error::InvalidParameter(format!(
            "annulus pipeline needs m >= 32, got {m}"
        )));
    }
    let sector = generators::annulus_sector(m, annulus_width(m))?;
    let sampler = SeededSampler::new(seed, annulus_rate(m))?;
    let sample_set = generators::bernoulli_sample(&sector, &sampler)?;
    let sampled = sample_set.len() as u64;

    let indices: Vec<usize> = (0..sample_set.len()).collect();
    let lines = line_classes(&sample_set, &indices);
    let points = sample_set.points();
    let mut alive: Vec<bool> = vec![true; points.len()];
    let mut line_count: Vec<usize> = lines.iter().map(|l| l.len()).collect();
    let mut point_lines: Vec<Vec<usize>> = vec![Vec::new(); points.len()];
    for (li, line) in lines.iter().enumerate() {
        for &p in line {
            point_lines[p].push(li);
        }
    }

    let desc_pair = |a: usize, b: usize| points[a].x < points[b].x && points[a].y > points[b].y;
    let initial_triples: u64 = line_count.iter().map(|&c| binom3(c as u64)).sum();
    let mut initial_desc = 0u64;
    for a in 0..points.len() {
        for b in a + 1..points.len() {
            if desc_pair(a, b) {
                initial_desc += 1;
            }
        }
    }

    let mut deletions = 0u64;
    loop {
        let mut best: Option<(u64, usize)> = None;
        for p in 0..points.len() {
            if !alive[p] {
                continue;
            }
            let mut deg: u64 = point_lines[p]
                .iter()
                .map(|&li| {
                    if line_count[li] >= 3 {
                        binom2(line_count[li] as u64 - 1)
                    } else {
                        0
                    }
                })
                .sum();
            for q in 0..points.len() {
                if q != p && alive[q] && (desc_pair(p.min(q), p.max(q))) {
                    deg += 1;
                }
            }
            if deg > 0 && best.is_none_or(|(b, _)| deg > b) {
                best = Some((deg, p));
            }
        }
        match best {
            None => break,
            Some((_, p)) => {
                alive[p] = false;
                deletions += 1;
                for &li in &point_lines[p] {
                    line_count[li] -= 1;
                }
            }
        }
    }

    let chosen_idx: Vec<usize> = (0..points.len()).filter(|&p| alive[p]).collect();
    certify(SelectionResult {
        chosen: sample_set.subset(&chosen_idx),
        certificate: Certificate::MonotoneGeneralPosition,
        trace: SelectionTrace {
            sampled,
            obstacles: initial_triples + initial_desc,
            deletions,
        },
        seed,
    })
}

/// The sampling rate used by [`distinct_slopes_select`]:
/// `k = c (n / ln s)^(1/3)` points in expectation out of `n`.
pub fn slopes_rate(n: usize, s_max: usize) -> Ratio<u64> {
    let n = n as f64;
    let k = SLOPES_RETENTION_C * (n / (s_max as f64).ln()).powf(1.0 / 3.0);
    dyadic_prob(k / n)
}

/// Distinct-slope subset by random selection plus deletion: sample at rate
/// `k/n` with `k = c (n / ln s)^(1/3)`, then while two surviving pairs
/// share a slope key, delete the point involved in the most repeated-slope
/// pair collisions.
pub fn distinct_slopes_select(set: &PointSet, seed: u64) -> Result<SelectionResult> {
    if set.len() < 4 {
        return Err(Error::InsufficientPoints {
            needed: 4,
            got: set.len(),
        });
    }
    let stats = detectors::line_statistics(set)?;
    let sampler = SeededSampler::new(seed, slopes_rate(set.len(), stats.s_max()))?;
    let sample_set = generators::bernoulli_sample(set, &sampler)?;
    let sampled = sample_set.len() as u64;
    let points = sample_set.points();

    let mut alive: Vec<bool> = vec![true; points.len()];
    let mut obstacles: Option<u64> = None;
    let mut deletions = 0u64;
    loop {
        // Group surviving pairs by slope key.
        let mut classes: FxHashMap<(BigInt, BigInt), Vec<(usize, usize)>> = FxHashMap::default();
        for a in 0..points.len() {
            if !alive[a] {
                continue;
            }
            for b in a + 1..points.len() {
                if !alive[b] {
                    continue;
                }
                let k = slope_key(&points[a], &points[b]).expect("distinct points");
                classes.entry((k.dx, k.dy)).or_default().push((a, b));
            }
        }
        let mut conflict_deg: FxHashMap<usize, u64> = FxHashMap::default();
        let mut conflicts = 0u64;
        for pairs in classes.values() {
            if pairs.len() < 2 {
                continue;
            }
            conflicts += binom2(pairs.len() as u64);
            for &(a, b) in pairs {
                // Each pair in a repeated class conflicts with the others.
                let w = pairs.len() as u64 - 1;
                *conflict_deg.entry(a).or_insert(0) += w;
                *conflict_deg.entry(b).or_insert(0) += w;
            }
        }
        if obstacles.is_none() {
            obstacles = Some(conflicts);
        }
        if conflicts == 0 {
            break;
        }
        let victim = conflict_deg
            .iter()
            .map(|(&p, &d)| (d, p))
            .max_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1)))
            .map(|(_, p)| p)
            .expect("conflicts imply a nonempty degree map");
        alive[victim] = false;
        deletions += 1;
    }

    let chosen_idx: Vec<usize> = (0..points.len()).filter(|&p| alive[p]).collect();
    certify(SelectionResult {
        chosen: sample_set.subset(&chosen_idx),
        certificate: Certificate::DistinctSlopes,
        trace: SelectionTrace {
            sampled,
            obstacles: obstacles.unwrap_or(0),
            deletions,
        },
        seed,
    })
}

/// A partition of the input into general-position classes.
#[derive(Clone, Debug)]
pub struct Coloring {
    pub classes: Vec<PointSet>,
    pub colors_used: usize,
}

/// Colors `P` so every color class is in general position, using the
/// pinned constant [`COLORING_CONSTANT`].
pub fn gp_coloring(set: &PointSet) -> Result<Coloring> {
    gp_coloring_with_constant(set, COLORING_CONSTANT)
}

/// Two-phase coloring with an explicit constant `C`.
///
/// Phase 1 runs `floor(ln ln n) - 2C` rounds (skipped entirely when that is
/// below one): each round ranks the remaining points by collinear-triple
/// degree, colors the least-loaded half by greedy hypergraph coloring with
/// fresh colors, and passes the rest on. Phase 2 repeatedly extracts an
/// (approximately) largest general-position subset of the residue — the
/// exact oracle for at most [`PHASE2_EXACT_CUTOFF`] points, multi-seed
/// greedy otherwise — assigning each extraction a fresh color.
pub fn gp_coloring_with_constant(set: &PointSet, c: u32) -> Result<Coloring> {
    if set.is_empty() {
        return Err(Error::InsufficientPoints { needed: 1, got: 0 });
    }
    let n = set.len();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut remaining: Vec<usize> = (0..n).collect();

    let rounds = if n >= 3 {
        ((n as f64).ln().ln().floor() as i64 - 2 * c as i64).max(0) as usize
    } else {
        0
    };
    for _ in 0..rounds {
        if remaining.len() < 4 {
            break;
        }
        let degrees = triple_degrees(set, &remaining);
        let mut by_degree: Vec<usize> = (0..remaining.len()).collect();
        by_degree.sort_by_key(|&i| (degrees[i], remaining[i]));
        let half = remaining.len().div_ceil(2);
        let selected: Vec<usize> = by_degree[..half].iter().map(|&i| remaining[i]).collect();
        let rest: Vec<usize> = by_degree[half..].iter().map(|&i| remaining[i]).collect();
        let mut round_classes = greedy_hypergraph_coloring(set, &selected, &degrees, &remaining);
        classes.append(&mut round_classes);
        remaining = rest;
        remaining.sort_unstable();
    }

    while !remaining.is_empty() {
        let extracted: Vec<usize> = if remaining.len() <= PHASE2_EXACT_CUTOFF {
            let sub = set.subset(&remaining);
            let best = oracle::max_general_position_exact(&sub, &OracleBudget::default())?;
            remaining
                .iter()
                .copied()
                .filter(|&i| best.contains(&set.points()[i]))
                .collect()
        } else {
            let sub = set.subset(&remaining);
            let best_local = (0..PHASE2_SEEDS)
                .into_par_iter()
                .map(|seed| {
                    let order = shuffled_indices(sub.len(), seed);
                    (greedy_indices(&sub, &order), seed)
                })
                .reduce(
                    || (Vec::new(), u64::MAX),
                    |a, b| {
                        // Deterministic argmax: larger set, then smaller seed.
                        if (b.0.len(), std::cmp::Reverse(b.1)) > (a.0.len(), std::cmp::Reverse(a.1))
                        {
                            b
                        } else {
                            a
                        }
                    },
                )
                .0;
            let sub_points = sub.points();
            remaining
                .iter()
                .copied()
                .filter(|&i| {
                    best_local
                        .iter()
                        .any(|&j| sub_points[j] == set.points()[i])
                })
                .collect()
        };
        debug_assert!(!extracted.is_empty());
        remaining.retain(|i| !extracted.contains(i));
        classes.push(extracted);
    }

    let coloring = Coloring {
        colors_used: classes.len(),
        classes: classes.iter().map(|idx| set.subset(idx)).collect(),
    };
    // Certificate: classes partition the input and are each in general
    // position.
    let total: usize = coloring.classes.iter().map(|c| c.len()).sum();
    if total != n {
        return Err(Error::Certification("coloring does not partition the input".into()));
    }
    for class in &coloring.classes {
        if verify_general_position(class).is_some() {
            return Err(Error::Certification(
                "coloring produced a class with a collinear triple".into(),
            ));
        }
    }
    Ok(coloring)
}

/// Collinear-triple degree of each member of `remaining` within the induced
/// subset, via direction classes around each point.
fn triple_degrees(set: &PointSet, remaining: &[usize]) -> Vec<u64> {
    let sub = set.subset(remaining);
    // subset() sorts canonically; map back to `remaining` positions.
    let pos_of: FxHashMap<&Point, usize> = remaining
        .iter()
        .enumerate()
        .map(|(pos, &i)| (&set.points()[i], pos))
        .collect();
    let pts = sub.points();
    let mut degrees = vec![0u64; remaining.len()];
    for (a, p) in pts.iter().enumerate() {
        let mut classes: FxHashMap<(BigInt, BigInt), u64> = FxHashMap::default();
        for (b, q) in pts.iter().enumerate() {
            if a == b {
                continue;
            }
            let k = slope_key(p, q).expect("distinct points");
            *classes.entry((k.dx, k.dy)).or_insert(0) += 1;
        }
        let deg: u64 = classes.values().map(|&c| binom2(c)).sum();
        degrees[pos_of[p]] = deg;
    }
    degrees
}

/// Greedy hypergraph coloring of `selected`: points in triple-degree
/// descending order (ties canonical) take the smallest color that does not
/// complete a monochromatic collinear triple.
fn greedy_hypergraph_coloring(
    set: &PointSet,
    selected: &[usize],
    degrees: &[u64],
    remaining: &[usize],
) -> Vec<Vec<usize>> {
    let deg_of: FxHashMap<usize, u64> = remaining
        .iter()
        .enumerate()
        .map(|(pos, &i)| (i, degrees[pos]))
        .collect();
    let mut order: Vec<usize> = selected.to_vec();
    order.sort_by_key(|&i| (std::cmp::Reverse(deg_of[&i]), i));

    let pts = set.points();
    let mut color_members: Vec<Vec<usize>> = Vec::new();
    let mut scratch: FxHashSet<(BigInt, BigInt, BigInt)> = FxHashSet::default();
    for &p in &order {
        let mut assigned = None;
        for (ci, members) in color_members.iter().enumerate() {
            scratch.clear();
            let mut conflict = false;
            for &q in members {
                let k = line_key(&pts[p], &pts[q]).expect("distinct points");
                if !scratch.insert((k.a, k.b, k.c)) {
                    conflict = true;
                    break;
                }
            }
            if !conflict {
                assigned = Some(ci);
                break;
            }
        }
        match assigned {
            Some(ci) => color_members[ci].push(p),
            None => color_members.push(vec![p]),
        }
    }
    color_members
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{grid, jarnik_arc, parabola_set, perturbed_cluster_grid};
    use proptest::prelude::*;

    #[test]
    fn greedy_on_3x3() {
        for seed in 0..12 {
            let r = greedy_general_position(&grid(3, 3).unwrap(), seed).unwrap();
            assert!((4..=6).contains(&r.chosen.len()), "seed {seed}: {}", r.chosen.len());
            assert!(verify_general_position(&r.chosen).is_none());
        }
    }

    #[test]
    fn greedy_keeps_general_position_inputs() {
        let p = parabola_set(30).unwrap();
        let r = greedy_general_position(&p, 3).unwrap();
        assert_eq!(r.chosen, p);
        assert_eq!(r.trace.deletions, 0);
    }

    #[test]
    fn greedy_on_a_line() {
        let line = PointSet::from_ints(&(0..9).map(|i| (i, i)).collect::<Vec<_>>()).unwrap();
        for seed in 0..4 {
            let r = greedy_general_position(&line, seed).unwrap();
            assert_eq!(r.chosen.len(), 2);
        }
    }

    #[test]
    fn greedy_maximality_floor() {
        // |P| <= chosen + C(chosen, 2) * (s_max - 2): every unchosen point
        // is blocked by a chosen pair, and a line holds at most s-2 extras.
        for (set, seed) in [
            (grid(5, 5).unwrap(), 1u64),
            (grid(8, 8).unwrap(), 2),
            (perturbed_cluster_grid(3, 4, 0).unwrap(), 3),
        ] {
            let s = crate::detectors::line_statistics(&set).unwrap().s_max() as u64;
            let r = greedy_general_position(&set, seed).unwrap();
            let c = r.chosen.len() as u64;
            assert!(
                c + binom2(c) * (s - 2) >= set.len() as u64,
                "floor violated: chosen={c}, s={s}, n={}",
                set.len()
            );
        }
    }

    #[test]
    fn sample_delete_examples() {
        let p = parabola_set(40).unwrap();
        let r = sample_delete_general_position(&p, Ratio::new(1, 2), 1).unwrap();
        assert_eq!(r.trace.deletions, 0);
        assert_eq!(r.chosen.len() as u64, r.trace.sampled);

        // prob -> 1 on the 3x3 grid: deletion until no triple remains.
        let r =
            sample_delete_general_position(&grid(3, 3).unwrap(), Ratio::new(u64::MAX - 1, u64::MAX), 7)
                .unwrap();
        assert!(r.chosen.len() >= 4, "got {}", r.chosen.len());
        assert!(verify_general_position(&r.chosen).is_none());

        let line = PointSet::from_ints(&(0..8).map(|i| (i, 0)).collect::<Vec<_>>()).unwrap();
        let r = sample_delete_general_position(&line, Ratio::new(u64::MAX - 1, u64::MAX), 3).unwrap();
        assert_eq!(r.chosen.len(), 2);
        assert!(r.trace.deletions <= r.trace.obstacles);
    }

    #[test]
    fn longest_monotone_examples() {
        let s = PointSet::from_ints(&[(0, 0), (1, 2), (2, 1), (3, 3)]).unwrap();
        let r = longest_monotone(&s).unwrap();
        assert_eq!(r.chosen.len(), 3);
        assert!(verify_monotone(&r.chosen).is_monotone());

        let stair = PointSet::from_ints(&(0..20).map(|i| (i, i * i)).collect::<Vec<_>>()).unwrap();
        assert_eq!(longest_monotone(&stair).unwrap().chosen.len(), 20);

        let down = PointSet::from_ints(&(0..10).map(|i| (i, -3 * i)).collect::<Vec<_>>()).unwrap();
        assert_eq!(longest_monotone(&down).unwrap().chosen.len(), 10);
    }

    #[test]
    fn longest_monotone_equal_x_vacuous() {
        // A full column is monotone (clauses only bind across distinct x).
        let col = PointSet::from_ints(&[(0, 0), (0, 5), (0, 2), (1, 5)]).unwrap();
        let r = longest_monotone(&col).unwrap();
        assert_eq!(r.chosen.len(), 4);
        assert!(verify_monotone(&r.chosen).is_monotone());
    }

    #[test]
    fn two_stage_on_parabola_keeps_everything() {
        let p = parabola_set(25).unwrap();
        let r = monotone_gp_two_stage(&p, 0).unwrap();
        assert_eq!(r.chosen.len(), 25);
    }

    #[test]
    fn two_stage_on_grid() {
        let r = monotone_gp_two_stage(&grid(3, 3).unwrap(), 5).unwrap();
        assert!(r.chosen.len() >= 2);
        assert!(verify_monotone(&r.chosen).is_monotone());
        assert!(verify_general_position(&r.chosen).is_none());
    }

    #[test]
    fn two_stage_cluster_grid_upper_bound() {
        for (k, s) in [(3i64, 3i64), (4, 3), (3, 5)] {
            let set = perturbed_cluster_grid(k, s, 11).unwrap();
            for seed in 0..5 {
                let r = monotone_gp_two_stage(&set, seed).unwrap();
                assert!(
                    r.chosen.len() as i64 <= 4 * k - 2,
                    "k={k} s={s} seed={seed}: {} > 4k-2",
                    r.chosen.len()
                );
            }
        }
    }

    #[test]
    fn annulus_pipeline_certifies() {
        let r = annulus_monotone_gp(50, 1).unwrap();
        assert!(verify_monotone(&r.chosen).is_non_decreasing());
        assert!(verify_general_position(&r.chosen).is_none());
        assert_eq!(r.trace.sampled - r.trace.deletions, r.chosen.len() as u64);
        assert!(r.trace.deletions <= r.trace.obstacles || r.trace.obstacles == 0);
        assert!(annulus_monotone_gp(16, 0).is_err());
    }

    #[test]
    fn annulus_pipeline_deterministic() {
        let a = annulus_monotone_gp(40, 9).unwrap();
        let b = annulus_monotone_gp(40, 9).unwrap();
        assert_eq!(a.chosen, b.chosen);
        assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn distinct_slopes_on_sidon_input() {
        let sidon = crate::generators::sidon_parabola_set(200).unwrap();
        let r = distinct_slopes_select(&sidon, 4).unwrap();
        assert_eq!(r.trace.deletions, 0);
        assert!(verify_distinct_slopes(&r.chosen).is_none());
    }

    #[test]
    fn distinct_slopes_on_grid_and_line() {
        let r = distinct_slopes_select(&grid(16, 16).unwrap(), 2).unwrap();
        assert!(verify_distinct_slopes(&r.chosen).is_none());
        assert!(!r.chosen.is_empty());

        let line = PointSet::from_ints(&(0..30).map(|i| (i, 2 * i)).collect::<Vec<_>>()).unwrap();
        let r = distinct_slopes_select(&line, 3).unwrap();
        assert!(r.chosen.len() <= 2);

        let tiny = PointSet::from_ints(&[(0, 0), (1, 1), (2, 4)]).unwrap();
        assert!(distinct_slopes_select(&tiny, 0).is_err());
    }

    #[test]
    fn coloring_general_position_input() {
        let p = parabola_set(40).unwrap();
        let coloring = gp_coloring(&p).unwrap();
        assert_eq!(coloring.colors_used, 1);
    }

    #[test]
    fn coloring_single_line() {
        for m in [4i64, 5, 9, 16, 17, 30] {
            let line =
                PointSet::from_ints(&(0..m).map(|i| (i, 5 * i)).collect::<Vec<_>>()).unwrap();
            let coloring = gp_coloring(&line).unwrap();
            assert_eq!(
                coloring.colors_used,
                (m as usize).div_ceil(2),
                "line of {m}"
            );
        }
    }

    #[test]
    fn coloring_partitions_grid() {
        let g = grid(6, 6).unwrap();
        let coloring = gp_coloring(&g).unwrap();
        let total: usize = coloring.classes.iter().map(|c| c.len()).sum();
        assert_eq!(total, 36);
        // sqrt(n)/2 colors are necessary on the grid.
        assert!(coloring.colors_used >= 3);
        for class in &coloring.classes {
            assert!(verify_general_position(class).is_none());
        }
    }

    #[test]
    fn coloring_phase1_active_with_small_constant() {
        // C = 0 activates the halving rounds at desk scale.
        let g = grid(8, 8).unwrap();
        let coloring = gp_coloring_with_constant(&g, 0).unwrap();
        let total: usize = coloring.classes.iter().map(|c| c.len()).sum();
        assert_eq!(total, 64);
        for class in &coloring.classes {
            assert!(verify_general_position(class).is_none());
        }
        assert!(coloring.colors_used >= 4);
    }

    #[test]
    fn selectors_deterministic() {
        let g = grid(9, 9).unwrap();
        for seed in [0u64, 17] {
            let a = greedy_general_position(&g, seed).unwrap();
            let b = greedy_general_position(&g, seed).unwrap();
            assert_eq!(a.chosen, b.chosen);
            let a = distinct_slopes_select(&g, seed).unwrap();
            let b = distinct_slopes_select(&g, seed).unwrap();
            assert_eq!(a.chosen, b.chosen);
        }
        let arc = jarnik_arc(100).unwrap();
        assert_eq!(
            longest_monotone(&arc).unwrap().chosen,
            longest_monotone(&arc).unwrap().chosen
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        /// Erdős–Szekeres floor: the longest monotone subset has at least
        /// ceil(sqrt(n)) points.
        #[test]
        fn monotone_floor(coords in proptest::collection::hash_set((0i64..60, 0i64..60), 1..60)) {
            let coords: Vec<(i64, i64)> = coords.into_iter().collect();
            let set = PointSet::from_ints(&coords).unwrap();
            let r = longest_monotone(&set).unwrap();
            let floor = (set.len() as f64).sqrt().ceil() as usize;
            prop_assert!(r.chosen.len() >= floor,
                "{} points, chain {}", set.len(), r.chosen.len());
        }

        /// The exact maximizer dominates greedy selection.
        #[test]
        fn oracle_dominates_greedy(coords in proptest::collection::hash_set((0i64..8, 0i64..8), 4..14),
                                   seed in 0u64..50) {
            let coords: Vec<(i64, i64)> = coords.into_iter().collect();
            let set = PointSet::from_ints(&coords).unwrap();
            let greedy = greedy_general_position(&set, seed).unwrap();
            let exact = crate::oracle::max_general_position_exact(
                &set, &crate::oracle::OracleBudget::default()).unwrap();
            prop_assert!(exact.len() >= greedy.chosen.len());
        }
    }
}
