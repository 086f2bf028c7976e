//! Independent oracles and frozen reference values.

use std::collections::VecDeque;

use num_bigint::BigUint;
use treefid::analysis::{me_placement, PlacementStrategy};
use treefid::montecarlo::trial_weights;
use treefid::{
    advantage_threshold, build_tree, census_closed_form, chain_fidelity, entanglement_swap,
    epsilon_of, expectation_check, favg_closed, favg_from_census, favg_weighted, run_trials,
    teleportation_fidelity, werner_state, TreeKind, TreeTopology, WeightedNetwork, WernerParam,
    CLASSICAL_LIMIT,
};

fn wp(p: f64) -> WernerParam {
    WernerParam::new(p).unwrap()
}

/// Path census by breadth-first search from every node, with descendant
/// checks by walking parent pointers. Shares no code with the library's
/// lowest-common-ancestor enumeration.
fn bfs_census(tree: &TreeTopology) -> Vec<u64> {
    let n = tree.node_count();
    let mut adj = vec![Vec::new(); n + 1];
    for e in tree.edges() {
        adj[e.parent as usize].push(e.child as usize);
        adj[e.child as usize].push(e.parent as usize);
    }
    let is_ancestor = |a: usize, mut v: usize| {
        while let Some(p) = tree.parent(v as u32) {
            if p as usize == a {
                return true;
            }
            v = p as usize;
        }
        false
    };
    let mut counts = Vec::new();
    for s in 1..=n {
        let mut dist = vec![usize::MAX; n + 1];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        for (t, &r) in dist.iter().enumerate().skip(1) {
            let keep = if tree.is_directed() {
                is_ancestor(s, t)
            } else {
                t > s
            };
            if keep {
                if counts.len() < r {
                    counts.resize(r, 0);
                }
                counts[r - 1] += 1;
            }
        }
    }
    counts
}

fn closed_counts(kind: TreeKind, d: u32) -> Vec<u64> {
    let c = census_closed_form(kind, d).unwrap();
    let mut v: Vec<u64> = c
        .iter()
        .map(|(_, k)| u64::try_from(k.clone()).unwrap())
        .collect();
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

#[test]
fn bfs_oracle_matches_closed_census() {
    for kind in TreeKind::ALL {
        let max = if kind.is_symmetric() { 8 } else { 30 };
        for d in 1..=max {
            let tree = build_tree(kind, d).unwrap();
            assert_eq!(bfs_census(&tree), closed_counts(kind, d), "{kind} d={d}");
        }
    }
}

#[test]
fn frozen_census_values() {
    assert_eq!(closed_counts(TreeKind::Dabt, 3), vec![6, 4, 2]);
    assert_eq!(closed_counts(TreeKind::Usbt, 1), vec![2, 1]);
    assert_eq!(closed_counts(TreeKind::Dsbt, 3), vec![14, 12, 8]);
    assert_eq!(closed_counts(TreeKind::Dsbt, 2), vec![6, 4]);
    assert_eq!(closed_counts(TreeKind::Uabt, 1), vec![2, 1]);
    assert_eq!(
        census_closed_form(TreeKind::Usbt, 3).unwrap().total(),
        BigUint::from(105u32)
    );
}

#[test]
fn frozen_fidelity_values() {
    let close =
        |got: f64, want: f64, tol: f64| assert!((got - want).abs() <= tol, "{got} vs {want}");
    close(
        favg_closed(TreeKind::Dabt, 7, wp(1.0 / 3.0)).unwrap().f_avg,
        0.558,
        0.001,
    );
    close(
        favg_closed(TreeKind::Dsbt, 3, wp(0.5)).unwrap().f_avg,
        0.662,
        0.001,
    );
    close(
        favg_closed(TreeKind::Dsbt, 6, wp(1.0 / 3.0)).unwrap().f_avg,
        0.549,
        0.001,
    );
    close(
        epsilon_of(TreeKind::Dabt, 7, wp(0.5)).unwrap(),
        0.1073,
        0.0005,
    );
    close(
        epsilon_of(TreeKind::Dsbt, 6, wp(0.5)).unwrap(),
        0.0935,
        0.0005,
    );

    let dabt3 = census_closed_form(TreeKind::Dabt, 3).unwrap();
    let want = (6.0 * 0.75 + 4.0 * 0.625 + 2.0 * 0.5625) / 12.0;
    close(
        favg_from_census(&dabt3, wp(0.5)).unwrap().f_avg,
        want,
        1e-15,
    );

    let uabt1 = census_closed_form(TreeKind::Uabt, 1).unwrap();
    for p in [0.0, 0.2, 0.7, 1.0] {
        close(
            favg_from_census(&uabt1, wp(p)).unwrap().f_avg,
            (3.0 + 2.0 * p + p * p) / 6.0,
            1e-15,
        );
    }

    let net = WeightedNetwork::new(
        build_tree(TreeKind::Uabt, 1).unwrap(),
        vec![wp(0.3), wp(0.8)],
    )
    .unwrap();
    close(
        favg_weighted(&net).unwrap().f_avg,
        (3.0 + 0.3 + 0.8 + 0.24) / 6.0,
        1e-15,
    );
}

#[test]
fn triple_agreement() {
    let knife = std::f64::consts::FRAC_1_SQRT_2;
    let mut grid: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    grid.extend([1.0 / 3.0, 0.5, knife]);
    for kind in TreeKind::ALL {
        let max = if kind.is_symmetric() { 10 } else { 40 };
        for d in 1..=max {
            let census = census_closed_form(kind, d).unwrap();
            let tree = build_tree(kind, d).unwrap();
            for &p in &grid {
                let closed = favg_closed(kind, d, wp(p)).unwrap().f_avg;
                let from_census = favg_from_census(&census, wp(p)).unwrap().f_avg;
                assert!(
                    (closed - from_census).abs() < 1e-10,
                    "{kind} d={d} p={p}: {closed} vs {from_census}"
                );
                if tree.node_count() <= 255 {
                    let weighted = favg_weighted(&WeightedNetwork::uniform(tree.clone(), wp(p)))
                        .unwrap()
                        .f_avg;
                    assert!(
                        (closed - weighted).abs() < 1e-10,
                        "{kind} d={d} p={p}: {closed} vs {weighted}"
                    );
                }
            }
        }
    }
}

#[test]
fn closed_form_monotone_and_bounded() {
    for kind in TreeKind::ALL {
        for d in [1, 2, 3, 6, 10] {
            let mut prev = 0.5;
            for i in 1..=99 {
                let p = i as f64 / 100.0;
                let f = favg_closed(kind, d, wp(p)).unwrap().f_avg;
                assert!(f > prev, "{kind} d={d} p={p}");
                assert!(
                    f >= 0.5 && f <= (1.0 + p) / 2.0 + 1e-12,
                    "{kind} d={d} p={p}: {f}"
                );
                prev = f;
            }
            assert_eq!(favg_closed(kind, d, WernerParam::ONE).unwrap().f_avg, 1.0);
            assert_eq!(favg_closed(kind, d, WernerParam::ZERO).unwrap().f_avg, 0.5);
        }
    }
}

#[test]
fn singular_neighbourhoods_are_continuous() {
    let knife = std::f64::consts::FRAC_1_SQRT_2;
    for (kind, c) in [
        (TreeKind::Dsbt, 0.5),
        (TreeKind::Usbt, 0.5),
        (TreeKind::Usbt, knife),
    ] {
        for d in 1..=10 {
            let at = favg_closed(kind, d, wp(c)).unwrap().f_avg;
            for p in [c - 1e-6, c + 1e-6, c - 2e-8, c + 2e-8] {
                let f = favg_closed(kind, d, wp(p)).unwrap().f_avg;
                assert!((f - at).abs() < 1e-4, "{kind} d={d} p={p}");
            }
        }
    }
}

#[test]
fn path_product_matches_swapped_chain() {
    let tree = build_tree(TreeKind::Usbt, 3).unwrap();
    let weights = trial_weights(&tree, 7, 0);
    let net = WeightedNetwork::new(tree, weights).unwrap();
    // leaf 8 -> 4 -> 2 -> 5 -> 10 is four links
    let edges = net.path_edges(8, 10).unwrap();
    assert_eq!(edges.len(), 4);
    let links: Vec<WernerParam> = edges.iter().map(|&e| net.weight(e)).collect();
    let mut rho = werner_state(links[0]);
    for &l in &links[1..] {
        rho = entanglement_swap(&rho, &werner_state(l)).unwrap();
    }
    let via_swaps = teleportation_fidelity(&rho).unwrap();
    let by_path = net.path_fidelity(8, 10).unwrap();
    assert!((by_path - via_swaps).abs() < 1e-9);
    assert!((by_path - chain_fidelity(&links).unwrap()).abs() < 1e-15);
}

#[test]
fn thresholds_bracket_and_grow_with_depth() {
    for kind in TreeKind::ALL {
        let mut prev = 0.0;
        for d in 1..=10 {
            let t = advantage_threshold(kind, d, CLASSICAL_LIMIT).unwrap();
            let below = favg_closed(kind, d, wp(t.p_star - 1e-4)).unwrap().f_avg;
            let above = favg_closed(kind, d, wp(t.p_star + 1e-4)).unwrap().f_avg;
            assert!(
                below < CLASSICAL_LIMIT && CLASSICAL_LIMIT < above,
                "{kind} d={d}"
            );
            assert!(t.p_star >= prev - 1e-12, "{kind} d={d}");
            prev = t.p_star;
        }
    }
}

#[test]
fn me_placement_monotone_and_greedy_bounded() {
    for kind in TreeKind::ALL {
        let d = if kind.is_symmetric() { 2 } else { 4 };
        let edges = build_tree(kind, d).unwrap().edge_count();
        let mut prev = 0.0;
        for m in 0..=edges {
            let ex = me_placement(kind, d, wp(0.4), m, PlacementStrategy::Exhaustive).unwrap();
            let gr = me_placement(kind, d, wp(0.4), m, PlacementStrategy::Greedy).unwrap();
            assert!(ex.f_avg >= prev - 1e-15);
            assert!(gr.f_avg <= ex.f_avg + 1e-12, "{kind} m={m}");
            if m == 0 || m == edges {
                assert!((gr.f_avg - ex.f_avg).abs() < 1e-12);
            }
            prev = ex.f_avg;
        }
        assert_eq!(prev, 1.0);
    }
}

#[test]
fn large_depth_convergence() {
    let knife = std::f64::consts::FRAC_1_SQRT_2;
    for p in [1.0 / 3.0, 0.5, knife, 0.9] {
        for (kind, d) in [
            (TreeKind::Dabt, 100_000),
            (TreeKind::Uabt, 100_000),
            (TreeKind::Usbt, 120),
        ] {
            let eps = epsilon_of(kind, d, wp(p)).unwrap();
            assert!(eps > 0.0 && eps < 1e-3, "{kind} d={d} p={p}: {eps}");
        }
        // DSBT decays slowest at matching node counts
        let dsbt = epsilon_of(TreeKind::Dsbt, 20, wp(p)).unwrap();
        let usbt = epsilon_of(TreeKind::Usbt, 20, wp(p)).unwrap();
        assert!(dsbt > usbt, "p={p}");
    }
}

#[test]
fn monte_carlo_long_run() {
    for kind in TreeKind::ALL {
        let d = if kind.is_symmetric() { 3 } else { 7 };
        let batch = run_trials(kind, d, 10_000, 2024).unwrap();
        assert!(batch.per_trial_f.iter().all(|&f| (0.5..=1.0).contains(&f)));
        let check = expectation_check(kind, d).unwrap();
        let gap = batch.mean - check.predicted;
        // the per-trial F_avg is linear in each weight, so the expectation is exact
        assert!(
            gap.abs() < 4.0 * batch.std_error,
            "{kind}: gap {gap}, se {}",
            batch.std_error
        );
    }
}
