//! The four binary-tree repeater topologies.
//!
//! Node labels start at 1 for the root. Symmetric trees use heap indexing
//! (children of `k` are `2k` and `2k + 1`). Asymmetric trees carry two nodes
//! per level `i >= 1`, labelled `2i` and `2i + 1`; the even node continues
//! the spine and the odd node is a leaf, so the root-to-leaf chains read
//! `(1, 2, 4, ..., 2r - 2, 2r)` and `(1, 2, 4, ..., 2r - 2, 2r + 1)`.
//! Which of the two children carries the spine does not change any path
//! count, only the labels.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Largest tree [`build_tree`] will materialise.
pub const MAX_BUILD_NODES: u64 = 1 << 22;

/// Largest symmetric depth whose node count fits in a `u128`.
pub const MAX_SYMMETRIC_DEPTH: u32 = 126;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TreeKind {
    /// Directed asymmetric binary tree.
    #[serde(rename = "DABT")]
    Dabt,
    /// Directed symmetric binary tree.
    #[serde(rename = "DSBT")]
    Dsbt,
    /// Undirected asymmetric binary tree.
    #[serde(rename = "UABT")]
    Uabt,
    /// Undirected symmetric binary tree.
    #[serde(rename = "USBT")]
    Usbt,
}

impl TreeKind {
    pub const ALL: [TreeKind; 4] = [
        TreeKind::Dabt,
        TreeKind::Dsbt,
        TreeKind::Uabt,
        TreeKind::Usbt,
    ];

    pub fn is_directed(self) -> bool {
        matches!(self, TreeKind::Dabt | TreeKind::Dsbt)
    }

    pub fn is_symmetric(self) -> bool {
        matches!(self, TreeKind::Dsbt | TreeKind::Usbt)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TreeKind::Dabt => "DABT",
            TreeKind::Dsbt => "DSBT",
            TreeKind::Uabt => "UABT",
            TreeKind::Usbt => "USBT",
        }
    }

    /// Longest path length (in edges) the kind admits at `depth`.
    pub fn max_path_length(self, depth: u32) -> u32 {
        match self {
            TreeKind::Dabt | TreeKind::Dsbt => depth,
            TreeKind::Uabt => depth + 1,
            TreeKind::Usbt => 2 * depth,
        }
    }
}

impl fmt::Display for TreeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TreeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dabt" => Ok(TreeKind::Dabt),
            "dsbt" => Ok(TreeKind::Dsbt),
            "uabt" => Ok(TreeKind::Uabt),
            "usbt" => Ok(TreeKind::Usbt),
            other => Err(invalid(format!(
                "unknown tree kind {other:?} (expected dabt, dsbt, uabt or usbt)"
            ))),
        }
    }
}

/// A parent-to-child link. For undirected kinds the orientation only
/// records which endpoint is closer to the root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub parent: u32,
    pub child: u32,
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.parent, self.child)
    }
}

/// An immutable rooted binary tree of one of the four kinds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeTopology {
    kind: TreeKind,
    depth: u32,
    edges: Vec<Edge>,
    // Indexed by node label; slot 0 is unused.
    parent_edge: Vec<Option<usize>>,
    children: Vec<Vec<u32>>,
    levels: Vec<u32>,
}

pub(crate) fn check_depth(depth: u32) -> Result<()> {
    if depth < 1 {
        return Err(invalid(format!("depth must be at least 1, got {depth}")));
    }
    Ok(())
}

/// Number of nodes of a `kind` tree of the given depth.
pub fn node_count(kind: TreeKind, depth: u32) -> Result<u128> {
    check_depth(depth)?;
    if kind.is_symmetric() {
        if depth > MAX_SYMMETRIC_DEPTH {
            // the node count would not fit in 128 bits
            return Err(Error::SizeGuard {
                what: "symmetric depth",
                actual: depth.into(),
                limit: MAX_SYMMETRIC_DEPTH.into(),
            });
        }
        Ok((1u128 << (depth + 1)) - 1)
    } else {
        Ok(2 * depth as u128 + 1)
    }
}

/// Inverse of [`node_count`].
pub fn depth_from_nodes(kind: TreeKind, n: u128) -> Result<u32> {
    if kind.is_symmetric() {
        if n >= 3 && (n + 1).is_power_of_two() {
            return Ok((n + 1).trailing_zeros() - 1);
        }
        let (below, above) = nearest_symmetric(n);
        let below = below.map_or_else(|| "none".to_string(), |b| b.to_string());
        Err(invalid(format!(
            "{n} not of form 2^(d+1)-1 for {kind}; nearest admissible node counts: {below}, {above}"
        )))
    } else {
        if n >= 3 && n % 2 == 1 {
            return u32::try_from((n - 1) / 2)
                .map_err(|_| invalid(format!("{n} nodes is too large")));
        }
        let above = if n < 3 { 3 } else { n + 1 };
        let below = if n > 3 {
            (n - 1).to_string()
        } else {
            "none".to_string()
        };
        Err(invalid(format!(
            "{n} not an odd node count >= 3 for {kind}; nearest admissible node counts: {below}, {above}"
        )))
    }
}

fn nearest_symmetric(n: u128) -> (Option<u128>, u128) {
    let mut below = None;
    let mut d = 1u32;
    loop {
        let c = (1u128 << (d + 1)) - 1;
        if c > n {
            return (below, c);
        }
        below = Some(c);
        d += 1;
    }
}

/// Builds the tree of `kind` with the given depth.
pub fn build_tree(kind: TreeKind, depth: u32) -> Result<TreeTopology> {
    check_depth(depth)?;
    let n = match node_count(kind, depth) {
        Ok(n) if n <= MAX_BUILD_NODES as u128 => n as u32,
        _ => {
            return Err(Error::SizeGuard {
                what: "tree node count",
                actual: node_count(kind, depth.min(63))
                    .map_or(u64::MAX, |n| n.min(u64::MAX as u128) as u64),
                limit: MAX_BUILD_NODES,
            })
        }
    };

    let mut edges = Vec::with_capacity(n as usize - 1);
    if kind.is_symmetric() {
        for k in 1..=(n / 2) {
            edges.push(Edge {
                parent: k,
                child: 2 * k,
            });
            edges.push(Edge {
                parent: k,
                child: 2 * k + 1,
            });
        }
    } else {
        edges.push(Edge {
            parent: 1,
            child: 2,
        });
        edges.push(Edge {
            parent: 1,
            child: 3,
        });
        for level in 1..depth {
            let spine = 2 * level;
            edges.push(Edge {
                parent: spine,
                child: spine + 2,
            });
            edges.push(Edge {
                parent: spine,
                child: spine + 3,
            });
        }
    }

    let slots = n as usize + 1;
    let mut parent_edge = vec![None; slots];
    let mut children = vec![Vec::new(); slots];
    let mut levels = vec![0u32; slots];
    // Edges are emitted in level order, so a parent's level is known before its children.
    for (i, e) in edges.iter().enumerate() {
        parent_edge[e.child as usize] = Some(i);
        children[e.parent as usize].push(e.child);
        levels[e.child as usize] = levels[e.parent as usize] + 1;
    }

    Ok(TreeTopology {
        kind,
        depth,
        edges,
        parent_edge,
        children,
        levels,
    })
}

impl TreeTopology {
    pub fn kind(&self) -> TreeKind {
        self.kind
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn is_directed(&self) -> bool {
        self.kind.is_directed()
    }

    pub fn node_count(&self) -> usize {
        self.parent_edge.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Node labels `1..=N`.
    pub fn nodes(&self) -> impl Iterator<Item = u32> + '_ {
        1..=self.node_count() as u32
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn root(&self) -> u32 {
        1
    }

    /// Index into [`edges`](Self::edges) of the link above `node`.
    pub fn parent_edge(&self, node: u32) -> Option<usize> {
        self.parent_edge[node as usize]
    }

    pub fn parent(&self, node: u32) -> Option<u32> {
        self.parent_edge(node).map(|i| self.edges[i].parent)
    }

    pub fn children(&self, node: u32) -> &[u32] {
        &self.children[node as usize]
    }

    /// Distance from the root.
    pub fn level(&self, node: u32) -> u32 {
        self.levels[node as usize]
    }

    pub fn leaves(&self) -> impl Iterator<Item = u32> + '_ {
        self.nodes().filter(|&v| self.children(v).is_empty())
    }

    /// Neighbours of `node`, ignoring orientation.
    pub fn neighbours(&self, node: u32) -> impl Iterator<Item = (u32, usize)> + '_ {
        let up = self.parent_edge(node).map(|i| (self.edges[i].parent, i));
        let down = self
            .children(node)
            .iter()
            .map(move |&c| (c, self.parent_edge(c).expect("child has a parent edge")));
        up.into_iter().chain(down)
    }

    /// Edge-list dump: a `# kind=.. depth=.. directed=..` header followed
    /// by one `parent child` pair per line.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!(
            "# kind={} depth={} directed={}\n",
            self.kind,
            self.depth,
            self.is_directed()
        );
        for e in &self.edges {
            out.push_str(&format!("{} {}\n", e.parent, e.child));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_tree_sizes() {
        assert_eq!(build_tree(TreeKind::Dabt, 3).unwrap().node_count(), 7);
        assert_eq!(build_tree(TreeKind::Dabt, 3).unwrap().edge_count(), 6);
        assert_eq!(build_tree(TreeKind::Dsbt, 3).unwrap().node_count(), 15);
        assert_eq!(build_tree(TreeKind::Uabt, 3).unwrap().node_count(), 7);
        let usbt = build_tree(TreeKind::Usbt, 3).unwrap();
        assert_eq!(usbt.node_count(), 15);
        assert_eq!(usbt.edge_count(), 14);
    }

    #[test]
    fn smallest_symmetric_tree() {
        let t = build_tree(TreeKind::Dsbt, 1).unwrap();
        assert_eq!(
            t.edges(),
            &[
                Edge {
                    parent: 1,
                    child: 2
                },
                Edge {
                    parent: 1,
                    child: 3
                }
            ]
        );
        assert!(t.is_directed());
    }

    #[test]
    fn asymmetric_leaf_labels() {
        let t = build_tree(TreeKind::Uabt, 3).unwrap();
        let leaves: Vec<u32> = t.leaves().collect();
        assert_eq!(leaves, vec![3, 5, 6, 7]);
        assert_eq!(t.children(4), &[6, 7]);
        let sym = build_tree(TreeKind::Usbt, 3).unwrap();
        assert_eq!(
            sym.leaves().collect::<Vec<_>>(),
            (8..=15).collect::<Vec<_>>()
        );
    }

    #[test]
    fn zero_depth_rejected() {
        assert!(matches!(
            build_tree(TreeKind::Dabt, 0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(node_count(TreeKind::Usbt, 0).is_err());
    }

    #[test]
    fn node_counts() {
        assert_eq!(node_count(TreeKind::Dabt, 7).unwrap(), 15);
        assert_eq!(node_count(TreeKind::Dsbt, 6).unwrap(), 127);
        assert_eq!(node_count(TreeKind::Uabt, 1).unwrap(), 3);
        assert_eq!(node_count(TreeKind::Usbt, 126).unwrap(), (1u128 << 127) - 1);
        assert!(node_count(TreeKind::Usbt, 127).is_err());
    }

    #[test]
    fn depth_inverse() {
        assert_eq!(depth_from_nodes(TreeKind::Usbt, 15).unwrap(), 3);
        assert_eq!(depth_from_nodes(TreeKind::Dabt, 127).unwrap(), 63);
        let err = depth_from_nodes(TreeKind::Dsbt, 10)
            .unwrap_err()
            .to_string();
        assert!(err.contains("7, 15"), "{err}");
        let err = depth_from_nodes(TreeKind::Usbt, 16)
            .unwrap_err()
            .to_string();
        assert!(err.contains("16 not of form 2^(d+1)-1"), "{err}");
        let err = depth_from_nodes(TreeKind::Uabt, 8).unwrap_err().to_string();
        assert!(err.contains("7, 9"), "{err}");
        assert!(depth_from_nodes(TreeKind::Uabt, 1).is_err());
    }

    #[test]
    fn build_guard() {
        assert!(matches!(
            build_tree(TreeKind::Usbt, 30),
            Err(Error::SizeGuard { .. })
        ));
        assert!(build_tree(TreeKind::Dabt, 10_000).is_ok());
    }

    #[test]
    fn edge_list_dump() {
        let text = build_tree(TreeKind::Dsbt, 1).unwrap().to_edge_list();
        assert_eq!(text, "# kind=DSBT depth=1 directed=true\n1 2\n1 3\n");
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("USBT".parse::<TreeKind>().unwrap(), TreeKind::Usbt);
        assert_eq!("dabt".parse::<TreeKind>().unwrap(), TreeKind::Dabt);
        assert!("ternary".parse::<TreeKind>().is_err());
    }
}
