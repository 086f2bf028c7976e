use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use treefid::analysis::{
    expected_random_placement, me_placement, me_threshold_for, MAX_EXHAUSTIVE_EDGES,
};
use treefid::{
    advantage_threshold, asymptotic_profile, build_tree, census_closed_form, census_enumerate,
    expectation_check, favg_closed, favg_from_census, favg_weighted, node_count, run_trials,
    PlacementStrategy, TreeKind, WeightedNetwork, WernerParam,
};

use crate::args::{parse_p, parse_target, OutputArgs, TreeArgs};
use crate::failure::{CliResult, Failure};
use crate::output::{emit, write_text, Cell, Table};
use crate::sweep::SweepArgs;
use crate::verify::VerifyArgs;

/// Fidelity of teleportation over binary-tree networks of Werner links.
#[derive(Debug, Parser)]
#[command(name = "treefid", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Network-average teleportation fidelity F_avg for a uniform link parameter
    Fidelity(FidelityArgs),
    /// Number of paths of each length r
    Census(CensusArgs),
    /// Smallest uniform p with F_avg reaching a target
    Threshold(ThresholdArgs),
    /// F_avg with maximally entangled (p = 1) links substituted in
    Melinks(MelinksArgs),
    /// Batches of trials with link parameters drawn from U(0, 1)
    Montecarlo(MontecarloArgs),
    /// Decay of epsilon = F_avg - 1/2 with depth
    Asymptotic(AsymptoticArgs),
    /// Cross-product evaluation over kinds, sizes and p values
    Sweep(SweepArgs),
    /// Run the built-in invariant checks
    Verify(VerifyArgs),
    /// Dump a tree as an edge list
    Tree(TreeDumpArgs),
}

pub fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Fidelity(a) => fidelity(a),
        Command::Census(a) => census(a),
        Command::Threshold(a) => threshold(a),
        Command::Melinks(a) => melinks(a),
        Command::Montecarlo(a) => montecarlo(a),
        Command::Asymptotic(a) => asymptotic(a),
        Command::Sweep(a) => crate::sweep::run(a),
        Command::Verify(a) => crate::verify::run(a),
        Command::Tree(a) => tree(a),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FidelityMethodArg {
    /// Closed-form expression
    Closed,
    /// Weighted sum over the path census
    Census,
    /// Explicit sum over every path of a built tree
    Enumerate,
}

#[derive(Debug, Args)]
pub struct FidelityArgs {
    #[command(flatten)]
    pub tree: TreeArgs,
    /// Werner parameter of every link, in [0, 1]
    #[arg(long, value_parser = parse_p)]
    pub p: WernerParam,
    /// Evaluation method
    #[arg(long, value_enum, default_value_t = FidelityMethodArg::Closed)]
    pub method: FidelityMethodArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub const FIDELITY_HEADER: [&str; 7] = ["kind", "depth", "N", "p", "f_avg", "epsilon", "method"];

pub fn fidelity_row(
    kind: TreeKind,
    depth: u32,
    p: WernerParam,
    method: FidelityMethodArg,
) -> CliResult<Vec<Cell>> {
    let report = match method {
        FidelityMethodArg::Closed => favg_closed(kind, depth, p)?,
        FidelityMethodArg::Census => favg_from_census(&census_closed_form(kind, depth)?, p)?,
        FidelityMethodArg::Enumerate => {
            favg_weighted(&WeightedNetwork::uniform(build_tree(kind, depth)?, p))?
        }
    };
    Ok(vec![
        kind.as_str().into(),
        depth.into(),
        node_count(kind, depth)?.into(),
        p.value().into(),
        report.f_avg.into(),
        report.epsilon.into(),
        report.method.as_str().into(),
    ])
}

fn fidelity(a: FidelityArgs) -> CliResult {
    let (kind, depth) = a.tree.resolve()?;
    let mut table = Table::new(&FIDELITY_HEADER);
    table.push(fidelity_row(kind, depth, a.p, a.method)?);
    emit(&table, &a.output)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CensusMethodArg {
    ClosedForm,
    Enumeration,
}

#[derive(Debug, Args)]
pub struct CensusArgs {
    #[command(flatten)]
    pub tree: TreeArgs,
    /// How the counts are obtained
    #[arg(long, value_enum, default_value_t = CensusMethodArg::ClosedForm)]
    pub method: CensusMethodArg,
    /// Print one summary row (total paths, average path length) instead of per-length counts
    #[arg(long)]
    pub summary: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn census(a: CensusArgs) -> CliResult {
    let (kind, depth) = a.tree.resolve()?;
    let c = match a.method {
        CensusMethodArg::ClosedForm => census_closed_form(kind, depth)?,
        CensusMethodArg::Enumeration => census_enumerate(&build_tree(kind, depth)?)?,
    };
    let method: Cell = c.method().as_str().into();
    let table = if a.summary {
        let mut t = Table::new(&[
            "kind",
            "depth",
            "N",
            "total",
            "average_path_length",
            "method",
        ]);
        t.push(vec![
            kind.as_str().into(),
            depth.into(),
            node_count(kind, depth)?.into(),
            Cell::Big(c.total().to_string()),
            c.average_path_length()?.into(),
            method,
        ]);
        t
    } else {
        let mut t = Table::new(&["kind", "depth", "r", "count", "method"]);
        for (r, count) in c.iter() {
            t.push(vec![
                kind.as_str().into(),
                depth.into(),
                r.into(),
                Cell::Big(count.to_string()),
                method.clone(),
            ]);
        }
        t
    };
    emit(&table, &a.output)
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[command(flatten)]
    pub tree: TreeArgs,
    /// F_avg to reach
    #[arg(long, value_parser = parse_target, default_value = "0.6666666666666666")]
    pub target: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub const THRESHOLD_HEADER: [&str; 4] = ["kind", "depth", "N", "p_star"];

pub fn threshold_row(kind: TreeKind, depth: u32, target: f64) -> CliResult<Vec<Cell>> {
    let t = advantage_threshold(kind, depth, target)?;
    Ok(vec![
        kind.as_str().into(),
        depth.into(),
        node_count(kind, depth)?.into(),
        t.p_star.into(),
    ])
}

fn threshold(a: ThresholdArgs) -> CliResult {
    let (kind, depth) = a.tree.resolve()?;
    let mut table = Table::new(&THRESHOLD_HEADER);
    table.push(threshold_row(kind, depth, a.target)?);
    emit(&table, &a.output)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    /// Best placement over all subsets of edges
    Exhaustive,
    /// Edges added one at a time by largest gain
    Greedy,
    /// Mean over uniformly random placements
    Expected,
}

#[derive(Debug, Args)]
pub struct MelinksArgs {
    #[command(flatten)]
    pub tree: TreeArgs,
    /// Werner parameter of the ordinary links
    #[arg(long, value_parser = parse_p)]
    pub p: WernerParam,
    /// Number of perfect links; every m from 0 to the edge count when omitted
    #[arg(long)]
    pub m: Option<usize>,
    /// Placement strategy [default: exhaustive up to 24 edges, greedy beyond]
    #[arg(long, value_enum)]
    pub strategy: Option<StrategyArg>,
    /// Print only the smallest m whose F_avg reaches --target
    #[arg(long, conflicts_with = "m")]
    pub threshold: bool,
    /// Target F_avg for --threshold
    #[arg(long, value_parser = parse_target, default_value = "0.6666666666666666")]
    pub target: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn melinks(a: MelinksArgs) -> CliResult {
    let (kind, depth) = a.tree.resolve()?;
    let edges = build_tree(kind, depth)?.edge_count();
    let strategy = a.strategy.unwrap_or(if edges <= MAX_EXHAUSTIVE_EDGES {
        StrategyArg::Exhaustive
    } else {
        StrategyArg::Greedy
    });
    if let Some(m) = a.m {
        if m > edges {
            return Err(Failure::invalid(format!(
                "--m {m} exceeds the edge count {edges}"
            )));
        }
    }
    let row = |m: usize| -> CliResult<(Vec<Cell>, f64)> {
        let (f, label, chosen) = match strategy {
            StrategyArg::Expected => (
                expected_random_placement(kind, depth, a.p, m)?.f_avg,
                "expected",
                String::new(),
            ),
            s => {
                let s = placement_strategy(s);
                let pl = me_placement(kind, depth, a.p, m, s)?;
                (pl.f_avg, s.as_str(), edge_list(&pl.chosen()))
            }
        };
        Ok((melinks_row(kind, depth, a.p, m, f, label, chosen), f))
    };

    let mut table = Table::new(&[
        "kind",
        "depth",
        "p",
        "m",
        "f_avg",
        "strategy",
        "chosen_edges",
    ]);
    if a.threshold {
        match strategy {
            StrategyArg::Expected => {
                let mut found = None;
                for m in 0..=edges {
                    let (r, f) = row(m)?;
                    if f >= a.target {
                        found = Some(r);
                        break;
                    }
                }
                table.push(found.expect("all-perfect links reach F_avg = 1"));
            }
            s => {
                let pl = me_threshold_for(kind, depth, a.p, placement_strategy(s), a.target)?;
                table.push(melinks_row(
                    kind,
                    depth,
                    a.p,
                    pl.m,
                    pl.f_avg,
                    pl.strategy.as_str(),
                    edge_list(&pl.chosen()),
                ));
            }
        }
    } else if let Some(m) = a.m {
        table.push(row(m)?.0);
    } else {
        for m in 0..=edges {
            table.push(row(m)?.0);
        }
    }
    emit(&table, &a.output)
}

fn placement_strategy(s: StrategyArg) -> PlacementStrategy {
    match s {
        StrategyArg::Exhaustive => PlacementStrategy::Exhaustive,
        StrategyArg::Greedy => PlacementStrategy::Greedy,
        StrategyArg::Expected => unreachable!("expected placement has no concrete edge set"),
    }
}

fn edge_list(edges: &[treefid::Edge]) -> String {
    edges
        .iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn melinks_row(
    kind: TreeKind,
    depth: u32,
    p: WernerParam,
    m: usize,
    f: f64,
    strategy: &str,
    chosen: String,
) -> Vec<Cell> {
    vec![
        kind.as_str().into(),
        depth.into(),
        p.value().into(),
        m.into(),
        f.into(),
        strategy.into(),
        chosen.into(),
    ]
}

#[derive(Debug, Args)]
pub struct MontecarloArgs {
    #[command(flatten)]
    pub tree: TreeArgs,
    /// Number of trials
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Base seed; trial t draws from the stream (seed, t)
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON summary to this file instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write per-trial values as CSV (trial,f_avg)
    #[arg(long)]
    pub per_trial_csv: Option<PathBuf>,
}

fn montecarlo(a: MontecarloArgs) -> CliResult {
    let (kind, depth) = a.tree.resolve()?;
    let batch = run_trials(kind, depth, a.trials, a.seed)?;
    let predicted = expectation_check(kind, depth)?.predicted;
    let summary = json!({
        "kind": kind.as_str(),
        "depth": depth,
        "N": node_count(kind, depth)? as u64,
        "trials": batch.trials,
        "seed": batch.seed,
        "mean": batch.mean,
        "std_error": batch.std_error,
        "predicted_p_half": predicted,
        "per_trial": batch.per_trial_f,
    });
    let mut text = serde_json::to_string_pretty(&summary).expect("json values serialize");
    text.push('\n');
    write_text(&text, a.out.as_deref())?;
    if let Some(path) = a.per_trial_csv {
        let mut t = Table::new(&["trial", "f_avg"]);
        for (i, f) in batch.per_trial_f.iter().enumerate() {
            t.push(vec![i.into(), (*f).into()]);
        }
        write_text(&t.render(crate::args::Format::Csv), Some(&path))?;
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct AsymptoticArgs {
    /// Tree kind
    #[arg(long, value_enum)]
    pub kind: crate::args::KindArg,
    /// Werner parameter of every link
    #[arg(long, value_parser = parse_p)]
    pub p: WernerParam,
    /// First depth
    #[arg(long, default_value_t = 1)]
    pub from: u32,
    /// Last depth (inclusive)
    #[arg(long)]
    pub to: u32,
    /// Depth increment
    #[arg(long, default_value_t = 1)]
    pub step: u32,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn asymptotic(a: AsymptoticArgs) -> CliResult {
    let kind = TreeKind::from(a.kind);
    if a.step == 0 || a.from > a.to {
        return Err(Failure::invalid("need --from <= --to and --step >= 1"));
    }
    let depths: Vec<u32> = (a.from..=a.to).step_by(a.step as usize).collect();
    let profile = asymptotic_profile(kind, a.p, &depths)?;
    eprintln!("fit: {}", profile.fitted_order.descriptor);
    if a.output.format == crate::args::Format::Json {
        let mut text = serde_json::to_string_pretty(&profile).expect("profile serializes");
        text.push('\n');
        return write_text(&text, a.output.out.as_deref());
    }
    let mut table = Table::new(&["kind", "p", "depth", "N", "epsilon"]);
    for s in &profile.samples {
        table.push(vec![
            kind.as_str().into(),
            a.p.value().into(),
            s.depth.into(),
            s.nodes.into(),
            s.epsilon.into(),
        ]);
    }
    emit(&table, &a.output)
}

#[derive(Debug, Args)]
pub struct TreeDumpArgs {
    #[command(flatten)]
    pub tree: TreeArgs,
    /// Write to this file instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn tree(a: TreeDumpArgs) -> CliResult {
    let (kind, depth) = a.tree.resolve()?;
    write_text(&build_tree(kind, depth)?.to_edge_list(), a.out.as_deref())
}
