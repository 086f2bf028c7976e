//! Average teleportation fidelity `F_avg` over all source-target paths.
//!
//! Every path of length `r` with Werner links `p_1..p_r` teleports with
//! fidelity `(1 + p_1 ... p_r) / 2`; trees have a unique path per pair, so
//! the network figure of merit is the plain average of that quantity over
//! the admissible paths. Three routes are provided:
//!
//! * [`favg_closed`]: the per-kind closed forms in `(d, p)`.
//! * [`favg_from_census`]: `sum l(r) (1 + p^r)/2 / sum l(r)` for any census.
//! * [`favg_weighted`]: explicit walk over every path with per-edge weights.
//!
//! All three report `epsilon = F_avg - 1/2`.

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::census::{census_closed_form, expected_total, PathCensus, MAX_ENUMERATION_NODES};
use crate::error::{invalid, Error, Result};
use crate::numerics::{big_ratio, CompensatedSum};
use crate::quantum::WernerParam;
use crate::tolerances;
use crate::topology::{check_depth, TreeKind, TreeTopology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FidelityMethod {
    ClosedForm,
    CensusWeighted,
    PairwiseEnumeration,
}

impl FidelityMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            FidelityMethod::ClosedForm => "closed_form",
            FidelityMethod::CensusWeighted => "census_weighted",
            FidelityMethod::PairwiseEnumeration => "pairwise_enumeration",
        }
    }
}

/// Link parameters a report was computed for.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum LinkParams {
    Uniform(WernerParam),
    PerEdge(Vec<WernerParam>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FidelityReport {
    pub kind: TreeKind,
    pub depth: u32,
    pub p: LinkParams,
    pub f_avg: f64,
    /// `F_avg - 1/2`, carried separately so it survives once `f_avg` rounds to 1/2.
    pub epsilon: f64,
    pub method: FidelityMethod,
    /// Number of paths averaged over.
    #[serde(serialize_with = "serialize_big")]
    pub census_total: BigUint,
}

fn serialize_big<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl FidelityReport {
    fn from_epsilon(
        kind: TreeKind,
        depth: u32,
        p: LinkParams,
        epsilon: f64,
        method: FidelityMethod,
        census_total: BigUint,
    ) -> Self {
        FidelityReport {
            kind,
            depth,
            p,
            f_avg: 0.5 + epsilon,
            epsilon,
            method,
            census_total,
        }
    }
}

/// A tree with one Werner parameter per edge, indexed like
/// [`TreeTopology::edges`].
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedNetwork {
    tree: TreeTopology,
    weights: Vec<WernerParam>,
}

impl WeightedNetwork {
    pub fn new(tree: TreeTopology, weights: Vec<WernerParam>) -> Result<Self> {
        if weights.len() != tree.edge_count() {
            return Err(invalid(format!(
                "{} weights supplied for {} edges",
                weights.len(),
                tree.edge_count()
            )));
        }
        Ok(WeightedNetwork { tree, weights })
    }

    pub fn uniform(tree: TreeTopology, p: WernerParam) -> Self {
        let weights = vec![p; tree.edge_count()];
        WeightedNetwork { tree, weights }
    }

    /// Every edge at `p` except `perfect`, which are set to 1.
    pub fn with_perfect_links(
        tree: TreeTopology,
        p: WernerParam,
        perfect: &[usize],
    ) -> Result<Self> {
        let mut net = Self::uniform(tree, p);
        for &e in perfect {
            let slot = net
                .weights
                .get_mut(e)
                .ok_or_else(|| invalid(format!("edge index {e} out of range")))?;
            *slot = WernerParam::ONE;
        }
        Ok(net)
    }

    pub fn tree(&self) -> &TreeTopology {
        &self.tree
    }

    pub fn weights(&self) -> &[WernerParam] {
        &self.weights
    }

    pub fn weight(&self, edge: usize) -> WernerParam {
        self.weights[edge]
    }

    /// Edge indices on the admissible path from `source` to `target`, or
    /// `None` when a directed tree has no descending chain between them.
    pub fn path_edges(&self, source: u32, target: u32) -> Option<Vec<usize>> {
        let tree = &self.tree;
        let (mut a, mut b) = (source, target);
        let mut up_a = Vec::new();
        let mut up_b = Vec::new();
        while tree.level(a) > tree.level(b) {
            up_a.push(tree.parent_edge(a)?);
            a = tree.parent(a)?;
        }
        while tree.level(b) > tree.level(a) {
            up_b.push(tree.parent_edge(b)?);
            b = tree.parent(b)?;
        }
        while a != b {
            up_a.push(tree.parent_edge(a)?);
            up_b.push(tree.parent_edge(b)?);
            a = tree.parent(a)?;
            b = tree.parent(b)?;
        }
        if tree.is_directed() && !up_a.is_empty() && !up_b.is_empty() {
            return None;
        }
        up_b.reverse();
        up_a.extend(up_b);
        Some(up_a)
    }

    /// `(1 + prod p_e) / 2` along the path between two nodes.
    pub fn path_fidelity(&self, source: u32, target: u32) -> Result<f64> {
        let edges = self
            .path_edges(source, target)
            .ok_or_else(|| invalid(format!("no admissible path between {source} and {target}")))?;
        Ok(0.5
            * (1.0
                + edges
                    .iter()
                    .map(|&e| self.weights[e].value())
                    .product::<f64>()))
    }
}

/// Closed-form `F_avg` for a uniform-`p` tree.
///
/// Removable singularities (`p = 1/2` for symmetric kinds, `p = 1/sqrt 2`
/// for USBT) switch to the dedicated branch inside a window of radius
/// [`tolerances::SINGULAR_WINDOW`]. `p = 1` returns exactly 1. Just below
/// `p = 1` the `(1 - p)^2` denominators cancel badly, so inside
/// [`tolerances::NEAR_ONE_WINDOW`] the census-weighted sum is returned and
/// tagged as such.
pub fn favg_closed(kind: TreeKind, depth: u32, p: WernerParam) -> Result<FidelityReport> {
    check_depth(depth)?;
    let total = expected_total(kind, depth);
    let x = p.value();
    let uniform = LinkParams::Uniform(p);
    if x == 1.0 {
        return Ok(FidelityReport::from_epsilon(
            kind,
            depth,
            uniform,
            0.5,
            FidelityMethod::ClosedForm,
            total,
        ));
    }
    if 1.0 - x < tolerances::NEAR_ONE_WINDOW {
        return favg_from_census(&census_closed_form(kind, depth)?, p);
    }
    let eps = closed_epsilon(kind, depth, x);
    Ok(FidelityReport::from_epsilon(
        kind,
        depth,
        uniform,
        eps,
        FidelityMethod::ClosedForm,
        total,
    ))
}

/// `epsilon(d)` of the closed forms for `0 <= p < 1`.
///
/// Symmetric forms are written in `u = 2^-d` so nothing overflows at large depth.
fn closed_epsilon(kind: TreeKind, depth: u32, p: f64) -> f64 {
    if p == 0.0 {
        return 0.0;
    }
    let d = depth as f64;
    let pd = p.powi(depth.min(i32::MAX as u32) as i32);
    let u = 0.5f64.powi(depth.min(2000) as i32);
    let one_m = 1.0 - p;
    match kind {
        TreeKind::Dabt => p * (p * (pd - 1.0) + d * one_m) / (d * (d + 1.0) * one_m * one_m),
        TreeKind::Uabt => {
            let p2 = p * p;
            let num = 2.0 * d * p - (d + 2.0) * p2 - 2.0 * p2 * p - d * p2 * p2
                + 2.0 * pd * p2
                + 2.0 * pd * p2 * p;
            num / (2.0 * d * (2.0 * d + 1.0) * one_m * one_m)
        }
        TreeKind::Dsbt => {
            if (2.0 * p - 1.0).abs() < tolerances::SINGULAR_WINDOW {
                (1.0 - (d + 2.0) * u / 2.0) / (2.0 * ((d - 1.0) + u))
            } else {
                p * ((1.0 - u) - p * (2.0 - u) + pd * p)
                    / (2.0 * one_m * (1.0 - 2.0 * p) * ((d - 1.0) + u))
            }
        }
        TreeKind::Usbt => {
            let scale = (1.0 - u) * (1.0 - u / 2.0);
            let sqrt2 = std::f64::consts::SQRT_2;
            if (2.0 * p - 1.0).abs() < tolerances::SINGULAR_WINDOW {
                u * (14.0 * (1.0 - u) - d * (d + 8.0) * u) / (16.0 * scale)
            } else if (sqrt2 * p - 1.0).abs() < tolerances::SINGULAR_WINDOW {
                let v = 0.5f64.powf(d / 2.0);
                let num =
                    2.0 * d * u - sqrt2 * (v - u) * ((sqrt2 - 1.0) * (3.0 * u + 5.0 * v) + v - u);
                num / (16.0 * (3.0 - 2.0 * sqrt2) * scale)
            } else {
                let q = 2.0 * p - 1.0;
                let s = 2.0 * p * p - 1.0;
                let first = p * (3.0 * p + 2.0) * (pd * pd - u) / (4.0 * s * scale);
                let second =
                    p * (pd - u) * (q * (3.0 * u + 5.0 * pd) + pd - u) / (8.0 * q * q * scale);
                first - second
            }
        }
    }
}

/// `epsilon = F_avg - 1/2` of the closed form.
pub fn epsilon_of(kind: TreeKind, depth: u32, p: WernerParam) -> Result<f64> {
    Ok(favg_closed(kind, depth, p)?.epsilon)
}

/// Census-weighted average `sum l(r) (1 + p^r)/2 / sum l(r)`.
pub fn favg_from_census(census: &PathCensus, p: WernerParam) -> Result<FidelityReport> {
    let total = census.total();
    if census.is_empty() {
        return Err(Error::Empty("favg_from_census of an empty census"));
    }
    let x = p.value();
    let mut acc = CompensatedSum::new();
    let mut power = 1.0;
    for (_, count) in census.iter() {
        power *= x;
        acc.add(big_ratio(count, &total) * power);
    }
    let eps = 0.5 * acc.value();
    Ok(FidelityReport::from_epsilon(
        census.kind(),
        census.depth(),
        LinkParams::Uniform(p),
        eps,
        FidelityMethod::CensusWeighted,
        total,
    ))
}

/// Average over every admissible path of the per-path fidelity, using the
/// per-edge weights. Directed kinds walk downward only; undirected kinds
/// count each unordered pair once.
pub fn favg_weighted(network: &WeightedNetwork) -> Result<FidelityReport> {
    let tree = network.tree();
    let n = tree.node_count();
    if n > MAX_ENUMERATION_NODES {
        return Err(Error::SizeGuard {
            what: "weighted enumeration node count",
            actual: n as u64,
            limit: MAX_ENUMERATION_NODES as u64,
        });
    }
    let per_source = |u: u32| source_sums(network, u);
    // Per-source partials are combined in source order, so the result does
    // not depend on how the work was split.
    let partials: Vec<(f64, u64)> = if n > 256 {
        (1..=n as u32).into_par_iter().map(per_source).collect()
    } else {
        (1..=n as u32).map(per_source).collect()
    };
    let mut sum = CompensatedSum::new();
    let mut paths = 0u64;
    for (s, c) in partials {
        sum.add(s);
        paths += c;
    }
    if paths == 0 {
        return Err(Error::Empty("network has no paths"));
    }
    // sum holds sum of prod(p); F = 1/2 + sum / (2 * paths).
    let eps = 0.5 * sum.value() / paths as f64;
    Ok(FidelityReport::from_epsilon(
        tree.kind(),
        tree.depth(),
        LinkParams::PerEdge(network.weights().to_vec()),
        eps,
        FidelityMethod::PairwiseEnumeration,
        BigUint::from(paths),
    ))
}

/// Sum of path products from `source` to every admissible target `> source`
/// (undirected) or every descendant (directed), and the number of such paths.
fn source_sums(network: &WeightedNetwork, source: u32) -> (f64, u64) {
    let tree = network.tree();
    let directed = tree.is_directed();
    let mut sum = CompensatedSum::new();
    let mut count = 0u64;
    // (node, came_from, product so far)
    let mut stack: Vec<(u32, u32, f64)> = vec![(source, 0, 1.0)];
    while let Some((node, from, prod)) = stack.pop() {
        if node != source && (directed || node > source) {
            sum.add(prod);
            count += 1;
        }
        if directed {
            for &c in tree.children(node) {
                let e = tree.parent_edge(c).expect("child edge");
                stack.push((c, node, prod * network.weights[e].value()));
            }
        } else {
            for (next, e) in tree.neighbours(node) {
                if next != from {
                    stack.push((next, node, prod * network.weights[e].value()));
                }
            }
        }
    }
    (sum.value(), count)
}
