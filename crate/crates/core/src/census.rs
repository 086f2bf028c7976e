//! Path censuses `l_d^(r)`: how many paths of each length a tree holds.
//!
//! Directed kinds count descending parent-to-child chains; undirected kinds
//! count one path per unordered node pair. Lengths are in edges and single
//! nodes (length 0) are never counted.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::big_ratio;
use crate::topology::{build_tree, check_depth, TreeKind, TreeTopology};

/// Enumeration refuses trees with more nodes than this.
pub const MAX_ENUMERATION_NODES: usize = 4095;

/// Closed-form censuses of symmetric kinds refuse depths beyond this.
pub const MAX_SYMMETRIC_CENSUS_DEPTH: u32 = 4096;

/// Closed-form censuses of asymmetric kinds refuse depths beyond this.
pub const MAX_ASYMMETRIC_CENSUS_DEPTH: u32 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CensusMethod {
    ClosedForm,
    Enumeration,
}

impl CensusMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            CensusMethod::ClosedForm => "closed_form",
            CensusMethod::Enumeration => "enumeration",
        }
    }
}

/// Exact path counts by length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathCensus {
    kind: TreeKind,
    depth: u32,
    // counts[r - 1] = number of paths of length r, for r in 1..=max length.
    counts: Vec<BigUint>,
    method: CensusMethod,
}

/// First cell where two censuses disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusMismatch {
    pub kind: TreeKind,
    pub depth: u32,
    pub length: u32,
    pub left: BigUint,
    pub right: BigUint,
}

impl std::fmt::Display for CensusMismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "census mismatch at (kind={}, d={}, r={}): {} vs {}",
            self.kind, self.depth, self.length, self.left, self.right
        )
    }
}

impl PathCensus {
    pub fn kind(&self) -> TreeKind {
        self.kind
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn method(&self) -> CensusMethod {
        self.method
    }

    /// Longest length with a (possibly zero) stored count.
    pub fn max_length(&self) -> u32 {
        self.counts.len() as u32
    }

    /// `l_d^(r)`; zero outside the stored range.
    pub fn count(&self, r: u32) -> BigUint {
        if r == 0 {
            return BigUint::zero();
        }
        self.counts.get(r as usize - 1).cloned().unwrap_or_default()
    }

    /// `(r, l_d^(r))` for `r = 1..=max_length`.
    pub fn iter(&self) -> impl Iterator<Item = (u32, &BigUint)> {
        self.counts
            .iter()
            .enumerate()
            .map(|(i, c)| (i as u32 + 1, c))
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.iter().all(Zero::is_zero)
    }

    /// Overwrites one cell. Used to build deliberately faulty censuses when
    /// exercising the verification path.
    pub fn set_count(&mut self, r: u32, value: BigUint) {
        assert!(r >= 1, "path lengths start at 1");
        let idx = r as usize - 1;
        if idx >= self.counts.len() {
            self.counts.resize(idx + 1, BigUint::zero());
        }
        self.counts[idx] = value;
    }

    /// `sum r * l(r) / sum l(r)`.
    pub fn average_path_length(&self) -> Result<f64> {
        let total = self.total();
        if total.is_zero() {
            return Err(Error::Empty("average_path_length of an empty census"));
        }
        let weighted: BigUint = self.iter().map(|(r, c)| c * BigUint::from(r)).sum();
        Ok(big_ratio(&weighted, &total))
    }

    /// Compares cell by cell, ignoring the method tag.
    pub fn mismatch(&self, other: &PathCensus) -> Option<CensusMismatch> {
        let longest = self.max_length().max(other.max_length());
        (1..=longest).find_map(|r| {
            let (a, b) = (self.count(r), other.count(r));
            (a != b).then_some(CensusMismatch {
                kind: self.kind,
                depth: self.depth,
                length: r,
                left: a,
                right: b,
            })
        })
    }
}

/// Total number of paths the kind should hold at `depth`.
pub fn expected_total(kind: TreeKind, depth: u32) -> BigUint {
    let d = BigUint::from(depth);
    match kind {
        TreeKind::Dabt => &d * (&d + 1u32),
        TreeKind::Dsbt => {
            let top = BigUint::from(1u32) << (depth + 1);
            &d * &top - top + 2u32
        }
        TreeKind::Uabt => &d * (&d * 2u32 + 1u32),
        TreeKind::Usbt => {
            let n = (BigUint::from(1u32) << (depth + 1)) - 1u32;
            &n * (&n - 1u32) / 2u32
        }
    }
}

/// Which arm of the USBT piecewise formula covers a length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UsbtBranch {
    ShortEven,
    ShortOdd,
    LongEven,
    LongOdd,
}

/// Signed value of the USBT piecewise count for `1 <= r <= 2d`, and the arm used.
///
/// Paths of length `r <= d` may end at the root; longer ones must pass
/// through it with both ends in the two subtrees.
pub fn usbt_piecewise(depth: u32, r: u32) -> (BigInt, UsbtBranch) {
    debug_assert!(r >= 1 && r <= 2 * depth);
    let one = BigInt::from(1u32);
    let even = r.is_multiple_of(2);
    // 4 * head, so the 2^(r-2) factor stays integral at r = 1.
    let head4 = if even {
        BigInt::from(3u32) * (&one << (depth + r / 2 + 1))
    } else {
        &one << (depth + r.div_ceil(2) + 2)
    };
    let (tail, branch) = match (r <= depth, even) {
        (true, true) => (BigInt::from(r + 3), UsbtBranch::ShortEven),
        (true, false) => (BigInt::from(r + 3), UsbtBranch::ShortOdd),
        (false, true) => (BigInt::from(2 * depth + 5 - r), UsbtBranch::LongEven),
        (false, false) => (BigInt::from(2 * depth + 5 - r), UsbtBranch::LongOdd),
    };
    let four_l = head4 - tail * (&one << r);
    (four_l >> 2u32, branch)
}

/// Census from the per-kind closed forms.
pub fn census_closed_form(kind: TreeKind, depth: u32) -> Result<PathCensus> {
    check_depth(depth)?;
    let limit = if kind.is_symmetric() {
        MAX_SYMMETRIC_CENSUS_DEPTH
    } else {
        MAX_ASYMMETRIC_CENSUS_DEPTH
    };
    if depth > limit {
        return Err(Error::SizeGuard {
            what: "closed-form census depth",
            actual: depth as u64,
            limit: limit as u64,
        });
    }

    let d = depth;
    let max_len = kind.max_path_length(d);
    let counts: Vec<BigUint> = (1..=max_len)
        .map(|r| match kind {
            TreeKind::Dabt => BigUint::from(2 + 2 * (d - r)),
            TreeKind::Dsbt => (BigUint::from(1u32) << (d + 1)) - (BigUint::from(1u32) << r),
            TreeKind::Uabt => match r {
                1 => BigUint::from(2 * d),
                2 => BigUint::from(3 * d - 2),
                _ => BigUint::from(2 + 4 * (d + 1 - r)),
            },
            TreeKind::Usbt => {
                let (v, _) = usbt_piecewise(d, r);
                match v.sign() {
                    Sign::Minus => unreachable!("USBT piecewise count negative at d={d}, r={r}"),
                    _ => v.magnitude().clone(),
                }
            }
        })
        .collect();

    Ok(PathCensus {
        kind,
        depth,
        counts,
        method: CensusMethod::ClosedForm,
    })
}

/// Census by explicit enumeration of every admissible node pair.
///
/// Path length is `level(u) + level(v) - 2 level(lca(u, v))`. Directed kinds
/// keep only pairs where one endpoint is the ancestor of the other.
pub fn census_enumerate(tree: &TreeTopology) -> Result<PathCensus> {
    let n = tree.node_count();
    if n > MAX_ENUMERATION_NODES {
        return Err(Error::SizeGuard {
            what: "enumeration node count",
            actual: n as u64,
            limit: MAX_ENUMERATION_NODES as u64,
        });
    }
    let lca = Lca::new(tree);
    let directed = tree.is_directed();
    let max_len = tree.kind().max_path_length(tree.depth()) as usize;

    let tally = (1..=n as u32)
        .into_par_iter()
        .map(|u| {
            let mut local = vec![0u64; max_len + 1];
            for v in (u + 1)..=n as u32 {
                let a = lca.query(u, v);
                if directed && a != u && a != v {
                    continue;
                }
                let len = tree.level(u) + tree.level(v) - 2 * tree.level(a);
                local[len as usize] += 1;
            }
            local
        })
        .reduce(
            || vec![0u64; max_len + 1],
            |mut acc, part| {
                for (a, b) in acc.iter_mut().zip(part) {
                    *a += b;
                }
                acc
            },
        );

    Ok(PathCensus {
        kind: tree.kind(),
        depth: tree.depth(),
        counts: tally[1..].iter().map(|&c| BigUint::from(c)).collect(),
        method: CensusMethod::Enumeration,
    })
}

/// Builds the tree and enumerates it.
pub fn census_enumerate_kind(kind: TreeKind, depth: u32) -> Result<PathCensus> {
    census_enumerate(&build_tree(kind, depth)?)
}

/// Lowest common ancestors by binary lifting.
pub struct Lca<'a> {
    tree: &'a TreeTopology,
    // up[k][v] = 2^k-th ancestor of v (root maps to itself).
    up: Vec<Vec<u32>>,
}

impl<'a> Lca<'a> {
    pub fn new(tree: &'a TreeTopology) -> Self {
        let n = tree.node_count();
        let mut first = vec![1u32; n + 1];
        for v in tree.nodes() {
            first[v as usize] = tree.parent(v).unwrap_or(v);
        }
        let mut up = vec![first];
        let mut span = 1u32;
        while span < tree.depth() {
            let prev = up.last().expect("non-empty");
            let next = (0..=n).map(|v| prev[prev[v] as usize]).collect();
            up.push(next);
            span *= 2;
        }
        Lca { tree, up }
    }

    pub fn query(&self, mut u: u32, mut v: u32) -> u32 {
        let level = |x: u32| self.tree.level(x);
        if level(u) < level(v) {
            std::mem::swap(&mut u, &mut v);
        }
        let mut diff = level(u) - level(v);
        let mut k = 0;
        while diff > 0 {
            if diff & 1 == 1 {
                u = self.up[k][u as usize];
            }
            diff >>= 1;
            k += 1;
        }
        if u == v {
            return u;
        }
        for k in (0..self.up.len()).rev() {
            let (a, b) = (self.up[k][u as usize], self.up[k][v as usize]);
            if a != b {
                u = a;
                v = b;
            }
        }
        self.up[0][u as usize]
    }
}
