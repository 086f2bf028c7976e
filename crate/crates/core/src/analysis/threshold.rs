use serde::Serialize;

use crate::error::{invalid, Result};
use crate::fidelity::favg_closed;
use crate::numerics::bisect_increasing;
use crate::quantum::WernerParam;
use crate::tolerances;
use crate::topology::TreeKind;

/// Best average teleportation fidelity without shared entanglement.
pub const CLASSICAL_LIMIT: f64 = 2.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdResult {
    pub kind: TreeKind,
    pub depth: u32,
    /// Link parameter at which `F_avg` reaches `target`.
    pub p_star: f64,
    pub target: f64,
    pub iterations: u32,
}

/// Smallest uniform `p` for which `F_avg(kind, depth, p) >= target`.
///
/// `F_avg` is increasing in `p` with `F_avg(0) = 1/2` and `F_avg(1) = 1`,
/// so any target strictly between those has a unique crossing.
pub fn advantage_threshold(kind: TreeKind, depth: u32, target: f64) -> Result<ThresholdResult> {
    if !(target > 0.5 && target < 1.0) {
        return Err(invalid(format!(
            "target must lie in (1/2, 1), got {target}"
        )));
    }
    // Validates depth before bisecting.
    favg_closed(kind, depth, WernerParam::ONE)?;
    let f = |p: f64| {
        favg_closed(
            kind,
            depth,
            WernerParam::new(p).expect("bisection stays in [0, 1]"),
        )
        .expect("depth validated")
        .f_avg
    };
    let b = bisect_increasing(
        f,
        target,
        0.0,
        1.0,
        tolerances::BISECTION,
        tolerances::BISECTION_MAX_ITER,
    );
    Ok(ThresholdResult {
        kind,
        depth,
        p_star: b.root,
        target,
        iterations: b.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dsbt_fifteen_nodes() {
        let t = advantage_threshold(TreeKind::Dsbt, 3, CLASSICAL_LIMIT).unwrap();
        assert!((t.p_star - 0.511).abs() < 0.002);
        assert!(t.iterations <= 200);
    }

    #[test]
    fn dabt_127_nodes() {
        let t = advantage_threshold(TreeKind::Dabt, 63, CLASSICAL_LIMIT).unwrap();
        assert!((t.p_star - 0.931).abs() < 0.002);
    }

    #[test]
    fn target_near_one_needs_perfect_links() {
        let t = advantage_threshold(TreeKind::Usbt, 4, 1.0 - 1e-9).unwrap();
        assert!(t.p_star > 0.999);
    }

    #[test]
    fn non_bracketing_targets() {
        assert!(advantage_threshold(TreeKind::Dabt, 3, 0.5).is_err());
        assert!(advantage_threshold(TreeKind::Dabt, 3, 1.0).is_err());
        assert!(advantage_threshold(TreeKind::Dabt, 0, 0.7).is_err());
    }
}
