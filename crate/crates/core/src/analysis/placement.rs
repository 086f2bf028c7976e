use serde::Serialize;

use crate::census::{census_closed_form, MAX_ENUMERATION_NODES};
use crate::error::{invalid, Error, Result};
use crate::fidelity::{favg_weighted, WeightedNetwork};
use crate::numerics::{big_ratio, CompensatedSum};
use crate::quantum::WernerParam;
use crate::topology::{build_tree, node_count, Edge, TreeKind, TreeTopology, MAX_BUILD_NODES};

use super::threshold::CLASSICAL_LIMIT;

/// Exhaustive placement refuses trees with more edges than this.
pub const MAX_EXHAUSTIVE_EDGES: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlacementStrategy {
    /// Best subset over all `C(E, m)` choices.
    Exhaustive,
    /// One edge at a time, each step taking the largest gain.
    Greedy,
}

impl PlacementStrategy {
    pub fn as_str(self) -> &'static str {
        match self {
            PlacementStrategy::Exhaustive => "exhaustive",
            PlacementStrategy::Greedy => "greedy",
        }
    }
}

/// `m` links upgraded to perfect Bell pairs, the rest at `p`.
#[derive(Debug, Clone)]
pub struct MePlacement {
    pub network: WeightedNetwork,
    pub p: WernerParam,
    pub m: usize,
    /// Indices into the tree's edge list, in ascending order for exhaustive
    /// placements and in selection order for greedy ones.
    pub chosen_edges: Vec<usize>,
    pub f_avg: f64,
    pub strategy: PlacementStrategy,
}

impl MePlacement {
    pub fn kind(&self) -> TreeKind {
        self.network.tree().kind()
    }

    pub fn depth(&self) -> u32 {
        self.network.tree().depth()
    }

    pub fn chosen(&self) -> Vec<Edge> {
        let edges = self.network.tree().edges();
        self.chosen_edges.iter().map(|&i| edges[i]).collect()
    }
}

/// Every admissible path of a tree as a list of edge indices.
#[derive(Debug, Clone)]
pub struct PathSet {
    edge_count: usize,
    paths: Vec<Vec<u32>>,
}

impl PathSet {
    pub fn new(tree: &TreeTopology) -> Result<Self> {
        let n = tree.node_count();
        if n > MAX_ENUMERATION_NODES {
            return Err(Error::SizeGuard {
                what: "path set node count",
                actual: n as u64,
                limit: MAX_ENUMERATION_NODES as u64,
            });
        }
        let directed = tree.is_directed();
        let mut paths = Vec::new();
        for source in tree.nodes() {
            // (node, came_from, edges so far)
            let mut stack: Vec<(u32, u32, Vec<u32>)> = vec![(source, 0, Vec::new())];
            while let Some((node, from, trail)) = stack.pop() {
                if node != source && (directed || node > source) {
                    paths.push(trail.clone());
                }
                for (next, e) in tree.neighbours(node) {
                    let downward = tree.parent(next) == Some(node);
                    if next == from || (directed && !downward) {
                        continue;
                    }
                    let mut t = trail.clone();
                    t.push(e as u32);
                    stack.push((next, node, t));
                }
            }
        }
        Ok(PathSet {
            edge_count: tree.edge_count(),
            paths,
        })
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn paths(&self) -> &[Vec<u32>] {
        &self.paths
    }

    /// `F_avg` with every edge at `p` except those flagged perfect.
    pub fn favg(&self, p: f64, perfect: &[bool]) -> f64 {
        let mut sum = CompensatedSum::new();
        for path in &self.paths {
            let k = path.iter().filter(|&&e| !perfect[e as usize]).count();
            sum.add(p.powi(k as i32));
        }
        0.5 + 0.5 * sum.value() / self.paths.len() as f64
    }

    fn masks(&self) -> Vec<u32> {
        self.paths
            .iter()
            .map(|p| p.iter().fold(0u32, |m, &e| m | (1 << e)))
            .collect()
    }

    fn powers(&self, p: f64) -> Vec<f64> {
        let longest = self.paths.iter().map(Vec::len).max().unwrap_or(0);
        (0..=longest).map(|k| p.powi(k as i32)).collect()
    }

    /// Best `m`-subset by brute force; ties keep the numerically smallest mask.
    fn exhaustive(&self, p: f64, m: usize) -> (u32, f64) {
        let masks = self.masks();
        let powers = self.powers(p);
        let eval = |chosen: u32| {
            let mut sum = CompensatedSum::new();
            for &pm in &masks {
                sum.add(powers[(pm & !chosen).count_ones() as usize]);
            }
            0.5 + 0.5 * sum.value() / masks.len() as f64
        };
        let e = self.edge_count as u32;
        if m == 0 {
            return (0, eval(0));
        }
        let mut best = (0u32, f64::NEG_INFINITY);
        let mut subset: u32 = (1u32 << m) - 1;
        let limit = 1u64 << e;
        while (subset as u64) < limit {
            let f = eval(subset);
            if f > best.1 {
                best = (subset, f);
            }
            // Gosper's hack: next integer with the same popcount.
            let c = subset & subset.wrapping_neg();
            let r = subset as u64 + c as u64;
            if r >= limit {
                break;
            }
            let r = r as u32;
            subset = (((r ^ subset) >> 2) / c) | r;
        }
        best
    }

    /// Greedy upgrade order for up to `max_m` links.
    fn greedy_order(&self, p: f64, max_m: usize) -> Vec<usize> {
        let powers = self.powers(p);
        let mut remaining: Vec<usize> = self.paths.iter().map(Vec::len).collect();
        let mut perfect = vec![false; self.edge_count];
        let mut through: Vec<Vec<usize>> = vec![Vec::new(); self.edge_count];
        for (i, path) in self.paths.iter().enumerate() {
            for &e in path {
                through[e as usize].push(i);
            }
        }
        let mut order = Vec::with_capacity(max_m);
        for _ in 0..max_m.min(self.edge_count) {
            let mut gains = vec![0.0f64; self.edge_count];
            for (i, path) in self.paths.iter().enumerate() {
                let k = remaining[i];
                if k == 0 {
                    continue;
                }
                let g = powers[k - 1] - powers[k];
                for &e in path {
                    if !perfect[e as usize] {
                        gains[e as usize] += g;
                    }
                }
            }
            let pick = (0..self.edge_count)
                .filter(|&e| !perfect[e])
                .fold(None, |best: Option<usize>, e| match best {
                    Some(b) if gains[b] >= gains[e] => Some(b),
                    _ => Some(e),
                })
                .expect("an edge remains");
            perfect[pick] = true;
            for &i in &through[pick] {
                remaining[i] -= 1;
            }
            order.push(pick);
        }
        order
    }
}

fn mask_to_edges(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

fn placement_from(
    tree: TreeTopology,
    p: WernerParam,
    chosen: Vec<usize>,
    strategy: PlacementStrategy,
) -> Result<MePlacement> {
    let network = WeightedNetwork::with_perfect_links(tree, p, &chosen)?;
    let f_avg = favg_weighted(&network)?.f_avg;
    Ok(MePlacement {
        network,
        p,
        m: chosen.len(),
        chosen_edges: chosen,
        f_avg,
        strategy,
    })
}

fn check_m(tree: &TreeTopology, m: usize, strategy: PlacementStrategy) -> Result<()> {
    let e = tree.edge_count();
    if m > e {
        return Err(invalid(format!(
            "m = {m} exceeds the {e} edges of the tree"
        )));
    }
    if strategy == PlacementStrategy::Exhaustive && e > MAX_EXHAUSTIVE_EDGES {
        return Err(Error::SizeGuard {
            what: "exhaustive placement edge count",
            actual: e as u64,
            limit: MAX_EXHAUSTIVE_EDGES as u64,
        });
    }
    Ok(())
}

/// Places `m` maximally entangled links to maximise `F_avg`.
pub fn me_placement(
    kind: TreeKind,
    depth: u32,
    p: WernerParam,
    m: usize,
    strategy: PlacementStrategy,
) -> Result<MePlacement> {
    let tree = build_tree(kind, depth)?;
    check_m(&tree, m, strategy)?;
    let paths = PathSet::new(&tree)?;
    let chosen = match strategy {
        PlacementStrategy::Exhaustive => mask_to_edges(paths.exhaustive(p.value(), m).0),
        PlacementStrategy::Greedy => paths.greedy_order(p.value(), m),
    };
    placement_from(tree, p, chosen, strategy)
}

/// Smallest `m` whose best placement reaches the classical limit 2/3.
pub fn me_threshold(
    kind: TreeKind,
    depth: u32,
    p: WernerParam,
    strategy: PlacementStrategy,
) -> Result<usize> {
    Ok(me_threshold_for(kind, depth, p, strategy, CLASSICAL_LIMIT)?.m)
}

/// Smallest `m` with `F_avg >= target`, together with the achieving placement.
pub fn me_threshold_for(
    kind: TreeKind,
    depth: u32,
    p: WernerParam,
    strategy: PlacementStrategy,
    target: f64,
) -> Result<MePlacement> {
    if !(target > 0.5 && target <= 1.0) {
        return Err(invalid(format!(
            "target must lie in (1/2, 1], got {target}"
        )));
    }
    let tree = build_tree(kind, depth)?;
    check_m(&tree, 0, strategy)?;
    let paths = PathSet::new(&tree)?;
    let e = tree.edge_count();
    let x = p.value();
    match strategy {
        PlacementStrategy::Exhaustive => {
            for m in 0..=e {
                let (mask, f) = paths.exhaustive(x, m);
                if f >= target {
                    return placement_from(tree, p, mask_to_edges(mask), strategy);
                }
            }
        }
        PlacementStrategy::Greedy => {
            let order = paths.greedy_order(x, e);
            let mut perfect = vec![false; e];
            for m in 0..=e {
                if m > 0 {
                    perfect[order[m - 1]] = true;
                }
                if paths.favg(x, &perfect) >= target {
                    return placement_from(tree, p, order[..m].to_vec(), strategy);
                }
            }
        }
    }
    unreachable!("all-perfect links always reach F_avg = 1")
}

/// Mean `F_avg` over all `C(E, m)` placements of `m` perfect links, i.e. the
/// expectation when the upgraded links are chosen uniformly at random.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpectedPlacement {
    pub kind: TreeKind,
    pub depth: u32,
    pub p: WernerParam,
    pub m: usize,
    pub f_avg: f64,
}

/// Exact mean over uniformly random placements.
///
/// A path of length `r` keeps `K` imperfect-free edges with `K`
/// hypergeometric (`E` edges, `m` upgraded, `r` drawn), so its expected
/// product is `sum_k P(K = k) p^(r - k)`; averaging over the census gives
/// the network mean without enumerating subsets.
pub fn expected_random_placement(
    kind: TreeKind,
    depth: u32,
    p: WernerParam,
    m: usize,
) -> Result<ExpectedPlacement> {
    let n = node_count(kind, depth)?;
    if n > MAX_BUILD_NODES as u128 {
        return Err(Error::SizeGuard {
            what: "tree node count",
            actual: n.min(u64::MAX as u128) as u64,
            limit: MAX_BUILD_NODES,
        });
    }
    let e = n as usize - 1;
    if m > e {
        return Err(invalid(format!(
            "m = {m} exceeds the {e} edges of the tree"
        )));
    }
    let census = census_closed_form(kind, depth)?;
    let total = census.total();
    let ln_fact: Vec<f64> = std::iter::once(0.0)
        .chain((1..=e).scan(0.0, |acc, i| {
            *acc += (i as f64).ln();
            Some(*acc)
        }))
        .collect();
    let ln_choose = |a: usize, b: usize| ln_fact[a] - ln_fact[b] - ln_fact[a - b];
    let x = p.value();

    let mut sum = CompensatedSum::new();
    for (r, count) in census.iter() {
        let r = r as usize;
        let lo = m.saturating_sub(e - r);
        let hi = m.min(r);
        let mut expected = 0.0;
        for k in lo..=hi {
            let prob = (ln_choose(r, k) + ln_choose(e - r, m - k) - ln_choose(e, m)).exp();
            expected += prob * x.powi((r - k) as i32);
        }
        sum.add(big_ratio(count, &total) * expected);
    }
    Ok(ExpectedPlacement {
        kind,
        depth,
        p,
        m,
        f_avg: 0.5 + 0.5 * sum.value(),
    })
}

/// Smallest `m` whose random-placement mean reaches 2/3.
pub fn expected_me_threshold(kind: TreeKind, depth: u32, p: WernerParam) -> Result<usize> {
    let e = node_count(kind, depth)? as usize - 1;
    for m in 0..=e {
        if expected_random_placement(kind, depth, p, m)?.f_avg >= CLASSICAL_LIMIT {
            return Ok(m);
        }
    }
    unreachable!("all-perfect links always reach F_avg = 1")
}
