//! Brute-force and exhaustive-search ground truth for small instances.
//!
//! The counting oracles enumerate tuples directly with the orientation
//! predicate; the subset maximizers run branch-and-bound over the
//! collinearity (or slope-collision) structure. Everything here is
//! deliberately independent of the grouped counting kernels in
//! [`crate::detectors`] so the two can check each other.

use crate::geometry::{line_key, orientation, slope_key, Point, PointSet};
use crate::util::FxHashSet;
use crate::{Error, Result};
use std::collections::HashMap;

/// Hard cap for the counting oracles.
pub const COUNTING_BUDGET: usize = 40;

/// Budget for the exhaustive subset maximizers. Oracles refuse inputs
/// beyond `max_points` and abort searches beyond `max_nodes` rather than
/// silently degrade.
#[derive(Clone, Copy, Debug)]
pub struct OracleBudget {
    pub max_points: usize,
    pub max_nodes: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_points: 24,
            max_nodes: 50_000_000,
        }
    }
}

impl OracleBudget {
    fn admit(&self, set: &PointSet) -> Result<()> {
        if set.len() > self.max_points {
            return Err(Error::BudgetExceeded(format!(
                "{} points exceed the {}-point oracle budget",
                set.len(),
                self.max_points
            )));
        }
        if self.max_points > 63 {
            return Err(Error::BudgetExceeded(
                "oracle budget beyond 63 points is unsupported".into(),
            ));
        }
        Ok(())
    }
}

fn check_counting_budget(set: &PointSet) -> Result<()> {
    if set.len() > COUNTING_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "{} points exceed the {COUNTING_BUDGET}-point counting budget",
            set.len()
        )));
    }
    Ok(())
}

/// Exact number of collinear triples by enumerating all C(n, 3) triples.
pub fn triples_bruteforce(set: &PointSet) -> Result<u64> {
    check_counting_budget(set)?;
    let pts = set.points();
    let n = pts.len();
    let mut count = 0u64;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if orientation(&pts[i], &pts[j], &pts[k]).expect("distinct") == 0 {
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

/// Exact number of trapezoids by enumerating all unordered pairs of
/// disjoint point-pairs: counted when the two pairs share a slope key but
/// span distinct lines (the same convention as
/// [`crate::detectors::count_trapezoids`]).
pub fn trapezoids_bruteforce(set: &PointSet) -> Result<u64> {
    check_counting_budget(set)?;
    let pts = set.points();
    let n = pts.len();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j));
        }
    }
    let mut count = 0u64;
    for a in 0..pairs.len() {
        let (i, j) = pairs[a];
        let slope_a = slope_key(&pts[i], &pts[j]).expect("distinct");
        for &(k, l) in &pairs[a + 1..] {
            if i == k || i == l || j == k || j == l {
                continue;
            }
            let slope_b = slope_key(&pts[k], &pts[l]).expect("distinct");
            if slope_a != slope_b {
                continue;
            }
            if line_key(&pts[i], &pts[j]).expect("distinct")
                != line_key(&pts[k], &pts[l]).expect("distinct")
            {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Collinear triples of the set as index triples.
fn collinear_triples(pts: &[Point]) -> Vec<[usize; 3]> {
    let n = pts.len();
    let mut triples = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if orientation(&pts[i], &pts[j], &pts[k]).expect("distinct") == 0 {
                    triples.push([i, j, k]);
                }
            }
        }
    }
    triples
}

/// For every pair, the third points completing a collinear triple.
fn pair_thirds(triples: &[[usize; 3]]) -> HashMap<(usize, usize), Vec<usize>> {
    let mut map: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for t in triples {
        let [a, b, c] = *t;
        map.entry((a, b)).or_default().push(c);
        map.entry((a, c)).or_default().push(b);
        map.entry((b, c)).or_default().push(a);
    }
    map
}

struct GpSearch<'a> {
    thirds: &'a HashMap<(usize, usize), Vec<usize>>,
    nodes: u64,
    max_nodes: u64,
    best: Vec<usize>,
    target: Option<usize>,
}

impl GpSearch<'_> {
    /// Branch-and-bound over the 3-uniform collinearity hypergraph:
    /// branch on a candidate of maximum remaining triple degree
    /// (include-and-forbid first, then exclude), prune against the
    /// incumbent. Deterministic ties by canonical point order.
    fn run(&mut self, chosen: &mut Vec<usize>, candidates: Vec<usize>) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(Error::BudgetExceeded(format!(
                "search exceeded {} nodes",
                self.max_nodes
            )));
        }
        if let Some(t) = self.target {
            if self.best.len() >= t {
                return Ok(());
            }
        }
        if chosen.len() + candidates.len() <= self.best.len() {
            return Ok(());
        }
        if candidates.is_empty() {
            if chosen.len() > self.best.len() {
                self.best = chosen.clone();
            }
            return Ok(());
        }
        // Degree of each candidate in the candidate-induced hypergraph.
        let cand_set: FxHashSet<usize> = candidates.iter().copied().collect();
        let mut pick = candidates[0];
        let mut pick_deg = -1i64;
        for &p in &candidates {
            let mut deg = 0i64;
            for &q in &candidates {
                if q <= p {
                    continue;
                }
                if let Some(ts) = self.thirds.get(&(p.min(q), p.max(q))) {
                    deg += ts.iter().filter(|r| cand_set.contains(r)).count() as i64;
                }
            }
            if deg > pick_deg {
                pick_deg = deg;
                pick = p;
            }
        }
        // Include `pick`: drop candidates that now complete a triple.
        chosen.push(pick);
        let mut included: Vec<usize> = Vec::new();
        for &q in &candidates {
            if q == pick {
                continue;
            }
            let mut ok = true;
            for &c in chosen.iter() {
                if c == pick {
                    continue;
                }
                let key = (c.min(pick), c.max(pick));
                if let Some(ts) = self.thirds.get(&key) {
                    if ts.contains(&q) {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                included.push(q);
            }
        }
        self.run(chosen, included)?;
        chosen.pop();
        // Exclude `pick`.
        let rest: Vec<usize> = candidates.iter().copied().filter(|&q| q != pick).collect();
        self.run(chosen, rest)?;
        Ok(())
    }
}

fn max_gp_indices(
    pts: &[Point],
    budget: &OracleBudget,
    target: Option<usize>,
) -> Result<Vec<usize>> {
    let triples = collinear_triples(pts);
    let thirds = pair_thirds(&triples);
    let mut search = GpSearch {
        thirds: &thirds,
        nodes: 0,
        max_nodes: budget.max_nodes,
        best: Vec::new(),
        target,
    };
    let candidates: Vec<usize> = (0..pts.len()).collect();
    search.run(&mut Vec::new(), candidates)?;
    Ok(search.best)
}

/// Maximum-cardinality subset with no collinear triple, by branch-and-bound
/// on the collinearity hypergraph.
pub fn max_general_position_exact(set: &PointSet, budget: &OracleBudget) -> Result<PointSet> {
    budget.admit(set)?;
    let best = max_gp_indices(set.points(), budget, None)?;
    Ok(set.subset(&best))
}

/// Maximum subset that is both monotone and in general position; exhaustive
/// over the two monotone directions with chain DFS and collinearity
/// pruning.
pub fn max_monotone_gp_exact(set: &PointSet, budget: &OracleBudget) -> Result<PointSet> {
    budget.admit(set)?;
    let pts = set.points();
    let triples = collinear_triples(pts);
    let thirds = pair_thirds(&triples);

    // Non-decreasing pass works on the canonical order; the non-increasing
    // pass reflects y.
    let mut best: Vec<usize> = Vec::new();
    let mut nodes = 0u64;
    for flip in [false, true] {
        let y = |i: usize| {
            if flip {
                -pts[i].y.clone()
            } else {
                pts[i].y.clone()
            }
        };
        // Order by (x, effective y) so chains are index-increasing.
        let mut order: Vec<usize> = (0..pts.len()).collect();
        order.sort_by(|&a, &b| pts[a].x.cmp(&pts[b].x).then_with(|| y(a).cmp(&y(b))));
        let mut chosen: Vec<usize> = Vec::new();
        dfs_monotone(
            pts,
            &thirds,
            &order,
            0,
            &mut chosen,
            &mut best,
            flip,
            &mut nodes,
            budget.max_nodes,
        )?;
    }
    Ok(set.subset(&best))
}

#[allow(clippy::too_many_arguments)]
fn dfs_monotone(
    pts: &[Point],
    thirds: &HashMap<(usize, usize), Vec<usize>>,
    order: &[usize],
    next: usize,
    chosen: &mut Vec<usize>,
    best: &mut Vec<usize>,
    flip: bool,
    nodes: &mut u64,
    max_nodes: u64,
) -> Result<()> {
    *nodes += 1;
    if *nodes > max_nodes {
        return Err(Error::BudgetExceeded(format!(
            "search exceeded {max_nodes} nodes"
        )));
    }
    if chosen.len() > best.len() {
        *best = chosen.clone();
    }
    if chosen.len() + (order.len() - next) <= best.len() {
        return Ok(());
    }
    for pos in next..order.len() {
        let p = order[pos];
        if !monotone_compatible(pts, chosen, p, flip) {
            continue;
        }
        if !gp_compatible(thirds, chosen, p) {
            continue;
        }
        chosen.push(p);
        dfs_monotone(pts, thirds, order, pos + 1, chosen, best, flip, nodes, max_nodes)?;
        chosen.pop();
    }
    Ok(())
}

/// `u_x < p_x` must imply `u_y <= p_y` (or `>=` for the flipped pass);
/// equal x is unconstrained.
fn monotone_compatible(pts: &[Point], chosen: &[usize], p: usize, flip: bool) -> bool {
    chosen.iter().all(|&u| {
        if pts[u].x == pts[p].x {
            true
        } else if flip {
            pts[u].y >= pts[p].y
        } else {
            pts[u].y <= pts[p].y
        }
    })
}

fn gp_compatible(
    thirds: &HashMap<(usize, usize), Vec<usize>>,
    chosen: &[usize],
    p: usize,
) -> bool {
    for (idx, &a) in chosen.iter().enumerate() {
        for &b in &chosen[idx + 1..] {
            if let Some(ts) = thirds.get(&(a.min(b), a.max(b))) {
                if ts.contains(&p) {
                    return false;
                }
            }
        }
    }
    true
}

/// Maximum subset whose C(k, 2) slope keys are all distinct, by DFS with
/// slope-collision pruning.
pub fn max_distinct_slopes_exact(set: &PointSet, budget: &OracleBudget) -> Result<PointSet> {
    budget.admit(set)?;
    let pts = set.points();
    let n = pts.len();
    // Precompute slope ids for all pairs.
    let mut slope_ids = vec![vec![usize::MAX; n]; n];
    let mut interner: HashMap<(num_bigint::BigInt, num_bigint::BigInt), usize> = HashMap::new();
    for i in 0..n {
        for j in i + 1..n {
            let k = slope_key(&pts[i], &pts[j]).expect("distinct");
            let next = interner.len();
            let id = *interner.entry((k.dx, k.dy)).or_insert(next);
            slope_ids[i][j] = id;
            slope_ids[j][i] = id;
        }
    }
    let mut best: Vec<usize> = Vec::new();
    let mut nodes = 0u64;
    let mut used: FxHashSet<usize> = FxHashSet::default();
    dfs_slopes(
        &slope_ids,
        n,
        0,
        &mut Vec::new(),
        &mut used,
        &mut best,
        &mut nodes,
        budget.max_nodes,
    )?;
    Ok(set.subset(&best))
}

#[allow(clippy::too_many_arguments)]
fn dfs_slopes(
    slope_ids: &[Vec<usize>],
    n: usize,
    next: usize,
    chosen: &mut Vec<usize>,
    used: &mut FxHashSet<usize>,
    best: &mut Vec<usize>,
    nodes: &mut u64,
    max_nodes: u64,
) -> Result<()> {
    *nodes += 1;
    if *nodes > max_nodes {
        return Err(Error::BudgetExceeded(format!(
            "search exceeded {max_nodes} nodes"
        )));
    }
    if chosen.len() > best.len() {
        *best = chosen.clone();
    }
    if chosen.len() + (n - next) <= best.len() {
        return Ok(());
    }
    for p in next..n {
        let new_ids: Vec<usize> = chosen.iter().map(|&q| slope_ids[q][p]).collect();
        let mut fresh: FxHashSet<usize> = FxHashSet::default();
        let ok = new_ids
            .iter()
            .all(|id| !used.contains(id) && fresh.insert(*id));
        if !ok {
            continue;
        }
        for id in &new_ids {
            used.insert(*id);
        }
        chosen.push(p);
        dfs_slopes(slope_ids, n, p + 1, chosen, used, best, nodes, max_nodes)?;
        chosen.pop();
        for id in &new_ids {
            used.remove(id);
        }
    }
    Ok(())
}

/// True iff `P` contains a collinear `s`-tuple or a general-position subset
/// of size `s`. Certifies individual configurations only; it does not
/// prove Ramsey values.
pub fn ramsey_witness_check(set: &PointSet, s: usize, budget: &OracleBudget) -> Result<bool> {
    if s < 3 {
        return Err(Error::InvalidParameter(format!(
            "Ramsey parameter must be at least 3, got {s}"
        )));
    }
    budget.admit(set)?;
    if set.len() >= 2 {
        let stats = crate::detectors::line_statistics(set)?;
        if stats.s_max() >= s {
            return Ok(true);
        }
    }
    let best = max_gp_indices(set.points(), budget, Some(s))?;
    Ok(best.len() >= s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detectors::{verify_distinct_slopes, verify_general_position, verify_monotone};
    use crate::generators;

    fn grid(w: i64, h: i64) -> PointSet {
        generators::grid(w, h).unwrap()
    }

    fn collinear_run(m: i64) -> PointSet {
        PointSet::from_ints(&(0..m).map(|i| (i, i)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn triples_bruteforce_examples() {
        assert_eq!(triples_bruteforce(&grid(3, 3)).unwrap(), 8);
        assert_eq!(triples_bruteforce(&generators::parabola_set(8).unwrap()).unwrap(), 0);
        assert_eq!(triples_bruteforce(&collinear_run(4)).unwrap(), 4);
        let big = grid(7, 7);
        assert!(triples_bruteforce(&big).is_err());
    }

    #[test]
    fn trapezoids_bruteforce_examples() {
        assert_eq!(trapezoids_bruteforce(&grid(2, 2)).unwrap(), 2);
        assert_eq!(trapezoids_bruteforce(&collinear_run(4)).unwrap(), 0);
        assert_eq!(
            trapezoids_bruteforce(&generators::parabola_set(4).unwrap()).unwrap(),
            1
        );
    }

    #[test]
    fn max_gp_grid_values() {
        let budget = OracleBudget::default();
        assert_eq!(
            max_general_position_exact(&grid(2, 2), &budget).unwrap().len(),
            4
        );
        assert_eq!(
            max_general_position_exact(&grid(3, 3), &budget).unwrap().len(),
            6
        );
        assert_eq!(
            max_general_position_exact(&grid(4, 4), &budget).unwrap().len(),
            8
        );
        assert_eq!(
            max_general_position_exact(&collinear_run(9), &budget).unwrap().len(),
            2
        );
        let out = max_general_position_exact(&grid(4, 4), &budget).unwrap();
        assert!(verify_general_position(&out).is_none());
        assert!(out.is_subset_of(&grid(4, 4)));
    }

    #[test]
    fn max_gp_deterministic() {
        let budget = OracleBudget::default();
        let a = max_general_position_exact(&grid(4, 4), &budget).unwrap();
        let b = max_general_position_exact(&grid(4, 4), &budget).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn max_gp_budget_refusal() {
        let tight = OracleBudget {
            max_points: 8,
            max_nodes: 10,
        };
        assert!(matches!(
            max_general_position_exact(&grid(3, 3), &tight),
            Err(Error::BudgetExceeded(_))
        ));
        let tiny = OracleBudget {
            max_points: 4,
            ..OracleBudget::default()
        };
        assert!(max_general_position_exact(&grid(3, 3), &tiny).is_err());
    }

    #[test]
    fn max_monotone_gp_examples() {
        let budget = OracleBudget::default();
        let best = max_monotone_gp_exact(&grid(3, 3), &budget).unwrap();
        assert_eq!(best.len(), 4);
        assert!(verify_monotone(&best).is_monotone());
        assert!(verify_general_position(&best).is_none());

        // A strictly convex increasing arc survives whole.
        let arc = generators::jarnik_arc(24).unwrap();
        let best = max_monotone_gp_exact(&arc, &budget).unwrap();
        assert_eq!(best.len(), arc.len());

        // A strictly decreasing staircase survives whole under clause (ii).
        let down = PointSet::from_ints(&[(0, 9), (1, 7), (2, 4), (3, 0)]).unwrap();
        let best = max_monotone_gp_exact(&down, &budget).unwrap();
        assert_eq!(best.len(), 4);
    }

    #[test]
    fn max_distinct_slopes_examples() {
        let budget = OracleBudget::default();
        let parabola = generators::parabola_set(4).unwrap();
        assert_eq!(max_distinct_slopes_exact(&parabola, &budget).unwrap().len(), 3);

        let sidon = PointSet::from_ints(&[(1, 1), (2, 4), (5, 25), (11, 121)]).unwrap();
        let best = max_distinct_slopes_exact(&sidon, &budget).unwrap();
        assert_eq!(best.len(), 4);
        assert!(verify_distinct_slopes(&best).is_none());

        assert_eq!(
            max_distinct_slopes_exact(&collinear_run(3), &budget).unwrap().len(),
            2
        );
    }

    #[test]
    fn ramsey_examples() {
        let budget = OracleBudget::default();
        // Three collinear plus one off the line: no collinear 4-tuple and
        // no 4-point general-position subset, witnessing r(4) > 4.
        let p = PointSet::from_ints(&[(0, 0), (1, 0), (2, 0), (0, 1)]).unwrap();
        assert!(!ramsey_witness_check(&p, 4, &budget).unwrap());
        // Any 5th point forces one of the two structures.
        let q = PointSet::from_ints(&[(0, 0), (1, 0), (2, 0), (0, 1), (5, 3)]).unwrap();
        assert!(ramsey_witness_check(&q, 4, &budget).unwrap());
        // Grid pigeonhole: [m]^2 with m = ceil(s/2) - 1 has neither.
        let s = 6;
        let m = s / 2 - 1;
        assert!(!ramsey_witness_check(&grid(m, m), s as usize, &budget).unwrap());
        assert!(ramsey_witness_check(&p, 2, &budget).is_err());
    }
}
