use std::time::Instant;

use clap::{Args, ValueEnum};
use treefid::analysis::{expected_random_placement, me_placement};
use treefid::numerics::bisect_increasing;
use treefid::quantum::swap_branches;
use treefid::{
    advantage_threshold, build_tree, census_closed_form, census_enumerate, entanglement_swap,
    expectation_check, favg_closed, favg_from_census, favg_weighted, node_count, run_trials,
    teleportation_fidelity, werner_state, PlacementStrategy, TreeKind, WeightedNetwork,
    WernerParam, CLASSICAL_LIMIT,
};

use crate::args::OutputArgs;
use crate::failure::{CliResult, Failure};
use crate::output::{emit, Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Level {
    /// Desk-scale checks, a few seconds
    Quick,
    /// Symmetric enumeration to d = 11 and 10,000-trial Monte Carlo
    Full,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// How much to check
    #[arg(long, value_enum, default_value_t = Level::Quick)]
    pub level: Level,
    /// Corrupt one closed-form census cell to exercise the failure path
    #[arg(long, hide = true)]
    pub inject_census_fault: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

struct Check {
    name: &'static str,
    /// `Err` names the first failing case.
    outcome: Result<String, String>,
    seconds: f64,
}

fn wp(p: f64) -> WernerParam {
    WernerParam::new(p).expect("grid values lie in [0, 1]")
}

fn lib<T>(r: treefid::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn swap_oracle() -> Result<String, String> {
    let mut worst = 0.0f64;
    // additive recurrences with irrational steps cover the unit square evenly
    for i in 0..200 {
        let i = i as f64;
        let (p1, p2) = (
            (0.5 + i * 0.618_033_988_749_894_9) % 1.0,
            (0.25 + i * 0.414_213_562_373_095_1) % 1.0,
        );
        let (a, b) = (werner_state(wp(p1)), werner_state(wp(p2)));
        for br in lib(swap_branches(&a, &b))? {
            if (br.probability - 0.25).abs() > 1e-12 {
                return Err(format!(
                    "outcome {:?} has probability {}",
                    br.outcome, br.probability
                ));
            }
        }
        let f = lib(teleportation_fidelity(&lib(entanglement_swap(&a, &b))?))?;
        let dev = (f - 0.5 * (1.0 + p1 * p2)).abs();
        if dev > 1e-9 {
            return Err(format!("p1={p1}, p2={p2}: fidelity off by {dev:e}"));
        }
        worst = worst.max(dev);
    }
    Ok(format!("200 pairs, worst {worst:.1e}"))
}

fn swap_chain() -> Result<String, String> {
    for p in [0.15, 0.5, 0.85] {
        let link = werner_state(wp(p));
        let mut rho = link.clone();
        for k in 1..=6 {
            rho = lib(entanglement_swap(&rho, &link))?;
            let dev = rho.max_abs_diff(&werner_state(wp(p.powi(k + 1))));
            if dev > 1e-9 {
                return Err(format!("p={p}, k={k}: entry deviation {dev:e}"));
            }
        }
    }
    Ok("k <= 6 at p = 0.15, 0.5, 0.85".into())
}

fn werner_fidelity() -> Result<String, String> {
    let mut prev = 0.0;
    for i in 0..=100 {
        let p = i as f64 / 100.0;
        let f = lib(teleportation_fidelity(&werner_state(wp(p))))?;
        if (f - 0.5 * (1.0 + p)).abs() > 1e-12 || f < prev {
            return Err(format!("p={p}: F={f}"));
        }
        prev = f;
    }
    let b = bisect_increasing(
        |p| teleportation_fidelity(&werner_state(wp(p))).expect("werner states are valid"),
        CLASSICAL_LIMIT,
        0.0,
        1.0,
        1e-12,
        200,
    );
    if (b.root - 1.0 / 3.0).abs() > 1e-9 {
        return Err(format!("2/3 crossing at {}", b.root));
    }
    Ok("101-point grid; 2/3 crossed at p = 1/3".into())
}

fn tree_shapes(max_depth: u32) -> Result<String, String> {
    for kind in TreeKind::ALL {
        for d in 1..=max_depth {
            let t = lib(build_tree(kind, d))?;
            let n = lib(node_count(kind, d))? as usize;
            let leaves = t.leaves().count();
            let want_leaves = if kind.is_symmetric() {
                1 << d
            } else {
                d as usize + 1
            };
            if t.node_count() != n || t.edge_count() + 1 != n || leaves != want_leaves {
                return Err(format!(
                    "{kind} d={d}: {} nodes, {} edges, {leaves} leaves",
                    t.node_count(),
                    t.edge_count()
                ));
            }
        }
    }
    Ok(format!("d <= {max_depth}"))
}

fn census_agreement(sym_max: u32, asym_max: u32, fault: bool) -> Result<String, String> {
    for kind in TreeKind::ALL {
        let max = if kind.is_symmetric() {
            sym_max
        } else {
            asym_max
        };
        for d in 1..=max {
            let mut closed = lib(census_closed_form(kind, d))?;
            if fault && kind == TreeKind::Usbt && d == 3 {
                let r = 2;
                closed.set_count(r, closed.count(r) + 1u32);
            }
            let enumerated = lib(census_enumerate(&lib(build_tree(kind, d))?))?;
            if let Some(m) = closed.mismatch(&enumerated) {
                return Err(m.to_string());
            }
        }
    }
    Ok(format!(
        "symmetric d <= {sym_max}, asymmetric d <= {asym_max}"
    ))
}

fn triple_agreement(sym_max: u32, asym_max: u32) -> Result<String, String> {
    let knife = std::f64::consts::FRAC_1_SQRT_2;
    let mut grid: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    grid.extend([1.0 / 3.0, 0.5, knife]);
    for kind in TreeKind::ALL {
        let max = if kind.is_symmetric() {
            sym_max
        } else {
            asym_max
        };
        for d in 1..=max {
            let census = lib(census_closed_form(kind, d))?;
            let tree = lib(build_tree(kind, d))?;
            for &p in &grid {
                let closed = lib(favg_closed(kind, d, wp(p)))?.f_avg;
                let weighted = lib(favg_from_census(&census, wp(p)))?.f_avg;
                let walked = lib(favg_weighted(&WeightedNetwork::uniform(
                    tree.clone(),
                    wp(p),
                )))?
                .f_avg;
                let gap = (closed - weighted).abs().max((closed - walked).abs());
                if gap >= 1e-10 {
                    return Err(format!(
                        "{kind} d={d} p={p}: closed {closed}, census {weighted}, paths {walked}"
                    ));
                }
            }
        }
    }
    Ok(format!(
        "12 p values, symmetric d <= {sym_max}, asymmetric d <= {asym_max}"
    ))
}

fn singular_continuity() -> Result<String, String> {
    let knife = std::f64::consts::FRAC_1_SQRT_2;
    for (kind, c) in [
        (TreeKind::Dsbt, 0.5),
        (TreeKind::Usbt, 0.5),
        (TreeKind::Usbt, knife),
    ] {
        for d in 1..=10 {
            let census = lib(census_closed_form(kind, d))?;
            for p in [c - 1e-6, c, c + 1e-6] {
                let a = lib(favg_closed(kind, d, wp(p)))?.f_avg;
                let b = lib(favg_from_census(&census, wp(p)))?.f_avg;
                if (a - b).abs() > 1e-6 {
                    return Err(format!("{kind} d={d} p={p}: {a} vs {b}"));
                }
            }
        }
    }
    Ok("p = 1/2 and 1/sqrt 2, d <= 10".into())
}

fn thresholds() -> Result<String, String> {
    for kind in TreeKind::ALL {
        let mut prev = 0.0;
        for d in 1..=10 {
            let t = lib(advantage_threshold(kind, d, CLASSICAL_LIMIT))?;
            let lo = lib(favg_closed(kind, d, wp(t.p_star - 1e-4)))?.f_avg;
            let hi = lib(favg_closed(kind, d, wp((t.p_star + 1e-4).min(1.0))))?.f_avg;
            if !(lo < CLASSICAL_LIMIT && CLASSICAL_LIMIT < hi) || t.p_star < prev {
                return Err(format!("{kind} d={d}: p* = {}", t.p_star));
            }
            prev = t.p_star;
        }
    }
    Ok("bracketed and nondecreasing, d <= 10".into())
}

fn placements() -> Result<String, String> {
    for kind in TreeKind::ALL {
        let d = if kind.is_symmetric() { 2 } else { 3 };
        let e = lib(build_tree(kind, d))?.edge_count();
        let mut prev = 0.0;
        for m in 0..=e {
            let ex = lib(me_placement(
                kind,
                d,
                wp(0.4),
                m,
                PlacementStrategy::Exhaustive,
            ))?
            .f_avg;
            let gr = lib(me_placement(kind, d, wp(0.4), m, PlacementStrategy::Greedy))?.f_avg;
            let mean = lib(expected_random_placement(kind, d, wp(0.4), m))?.f_avg;
            if ex < prev || gr > ex + 1e-12 || mean > ex + 1e-12 {
                return Err(format!(
                    "{kind} d={d} m={m}: exhaustive {ex}, greedy {gr}, mean {mean}"
                ));
            }
            prev = ex;
        }
        if prev != 1.0 {
            return Err(format!("{kind} d={d}: all links perfect gives {prev}"));
        }
    }
    Ok("monotone in m; greedy and random mean below optimum".into())
}

fn monte_carlo(trials: usize) -> Result<String, String> {
    let mut notes = Vec::new();
    for kind in TreeKind::ALL {
        let d = if kind.is_symmetric() { 3 } else { 7 };
        let a = lib(run_trials(kind, d, trials, 11))?;
        let b = lib(run_trials(kind, d, trials, 11))?;
        if a != b {
            return Err(format!("{kind}: batches with one seed differ"));
        }
        if let Some(f) = a.per_trial_f.iter().find(|f| !(0.5..=1.0).contains(*f)) {
            return Err(format!("{kind}: per-trial F_avg {f} outside [1/2, 1]"));
        }
        let predicted = lib(expectation_check(kind, d))?.predicted;
        let gap = a.mean - predicted;
        if trials >= 1000 && gap.abs() > 4.0 * a.std_error {
            return Err(format!(
                "{kind}: mean {} vs {predicted}, {:.1} standard errors",
                a.mean,
                gap / a.std_error
            ));
        }
        notes.push(format!("{kind} {gap:+.4}"));
    }
    Ok(format!("T = {trials}, mean - F(1/2): {}", notes.join(", ")))
}

pub fn run(args: VerifyArgs) -> CliResult {
    let full = args.level == Level::Full;
    let (sym, asym) = if full { (11, 60) } else { (8, 30) };
    let (tsym, tasym) = if full { (10, 40) } else { (6, 20) };
    let fault = args.inject_census_fault;
    let trials = if full { 10_000 } else { 200 };

    type Run = Box<dyn Fn() -> Result<String, String>>;
    let suite: Vec<(&'static str, Run)> = vec![
        ("swap_oracle", Box::new(swap_oracle)),
        ("swap_chain", Box::new(swap_chain)),
        ("werner_fidelity", Box::new(werner_fidelity)),
        ("tree_shapes", Box::new(|| tree_shapes(12))),
        (
            "census_agreement",
            Box::new(move || census_agreement(sym, asym, fault)),
        ),
        (
            "triple_agreement",
            Box::new(move || triple_agreement(tsym, tasym)),
        ),
        ("singular_continuity", Box::new(singular_continuity)),
        ("thresholds", Box::new(thresholds)),
        ("placements", Box::new(placements)),
        ("monte_carlo", Box::new(move || monte_carlo(trials))),
    ];
    let checks: Vec<Check> = suite
        .into_iter()
        .map(|(name, f)| {
            let start = Instant::now();
            let outcome = f();
            Check {
                name,
                outcome,
                seconds: start.elapsed().as_secs_f64(),
            }
        })
        .collect();

    let mut table = Table::new(&["check", "status", "seconds", "detail"]);
    for c in &checks {
        let (status, detail) = match &c.outcome {
            Ok(d) => ("pass", d.clone()),
            Err(d) => ("FAIL", d.clone()),
        };
        table.push(vec![
            c.name.into(),
            status.into(),
            Cell::Float(c.seconds),
            detail.into(),
        ]);
    }
    emit(&table, &args.output)?;

    let failed: Vec<_> = checks
        .iter()
        .filter_map(|c| c.outcome.as_ref().err().map(|e| format!("{}: {e}", c.name)))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(failed.join("; ")))
    }
}
