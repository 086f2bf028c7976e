use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use treefid::{depth_from_nodes, TreeKind, WernerParam};

use crate::args::{Format, OutputArgs};
use crate::commands::{
    fidelity_row, threshold_row, FidelityMethodArg, FIDELITY_HEADER, THRESHOLD_HEADER,
};
use crate::failure::{CliResult, Failure};
use crate::output::{emit, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepMode {
    /// One fidelity row per (kind, depth, p)
    Fidelity,
    /// One advantage-threshold row per (kind, depth)
    Threshold,
}

/// Every flag may also be given in the config file as `key = value`, with
/// dashes written as underscores. Flags win over the file.
#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Config file of `key = value` lines; `#` starts a comment
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// What to evaluate at each grid point [default: fidelity]
    #[arg(long, value_enum)]
    pub mode: Option<SweepMode>,
    /// Comma-separated kinds, e.g. `dabt,usbt`
    #[arg(long)]
    pub kinds: Option<String>,
    /// Depths as a comma list and/or ranges `a..=b`
    #[arg(long, conflicts_with = "nodes")]
    pub depths: Option<String>,
    /// Node counts as a comma list and/or ranges
    #[arg(long)]
    pub nodes: Option<String>,
    /// Explicit comma-separated p values
    #[arg(long)]
    pub p: Option<String>,
    /// First p of an evenly spaced grid
    #[arg(long)]
    pub p_start: Option<f64>,
    /// Last p of the grid (inclusive)
    #[arg(long)]
    pub p_stop: Option<f64>,
    /// Number of grid points, endpoints included
    #[arg(long, conflicts_with = "p_step")]
    pub p_steps: Option<usize>,
    /// Grid spacing, as an alternative to --p-steps
    #[arg(long)]
    pub p_step: Option<f64>,
    /// Target F_avg for threshold mode
    #[arg(long)]
    pub target: Option<f64>,
    /// Output format (csv or json)
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file [default: standard output]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

const KEYS: [&str; 12] = [
    "mode", "kinds", "depths", "nodes", "p", "p_start", "p_stop", "p_steps", "p_step", "target",
    "format", "out",
];

fn read_config(path: &PathBuf) -> CliResult<BTreeMap<String, String>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Failure::invalid(format!("config line {}: expected key = value", no + 1))
        })?;
        let key = k.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(Failure::invalid(format!(
                "config line {}: unknown key {key:?}",
                no + 1
            )));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

fn num<T: std::str::FromStr>(key: &str, s: &str) -> CliResult<T> {
    s.trim()
        .parse()
        .map_err(|_| Failure::invalid(format!("{key}: cannot parse {s:?}")))
}

/// Comma list of integers and inclusive ranges `a..=b` (or half-open `a..b`).
pub fn parse_int_list(key: &str, s: &str) -> CliResult<Vec<u128>> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if let Some((a, b)) = item.split_once("..") {
            let lo: u128 = num(key, a)?;
            let (hi, inclusive) = match b.strip_prefix('=') {
                Some(b) => (num::<u128>(key, b)?, true),
                None => (num::<u128>(key, b)?, false),
            };
            let hi = if inclusive { hi } else { hi.saturating_sub(1) };
            if lo > hi {
                return Err(Failure::invalid(format!("{key}: empty range {item:?}")));
            }
            if hi - lo > 1_000_000 {
                return Err(Failure::invalid(format!(
                    "{key}: range {item:?} is too long"
                )));
            }
            out.extend(lo..=hi);
        } else {
            out.push(num(key, item)?);
        }
    }
    if out.is_empty() {
        return Err(Failure::invalid(format!("{key}: empty list")));
    }
    Ok(out)
}

/// Resolved sweep plan.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub mode: SweepMode,
    /// `(kind, depth)` in output order.
    pub trees: Vec<(TreeKind, u32)>,
    pub p_grid: Vec<f64>,
    pub target: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl SweepArgs {
    fn merged(&self) -> CliResult<BTreeMap<String, String>> {
        let mut map = match &self.config {
            Some(path) => read_config(path)?,
            None => BTreeMap::new(),
        };
        let set = |map: &mut BTreeMap<String, String>, k: &str, v: Option<String>| {
            if let Some(v) = v {
                map.insert(k.to_string(), v);
            }
        };
        let name = |v: clap::builder::PossibleValue| v.get_name().to_string();
        set(
            &mut map,
            "mode",
            self.mode.and_then(|m| m.to_possible_value()).map(name),
        );
        set(&mut map, "kinds", self.kinds.clone());
        set(&mut map, "p", self.p.clone());
        set(&mut map, "p_start", self.p_start.map(|x| x.to_string()));
        set(&mut map, "p_stop", self.p_stop.map(|x| x.to_string()));
        set(&mut map, "p_steps", self.p_steps.map(|x| x.to_string()));
        set(&mut map, "p_step", self.p_step.map(|x| x.to_string()));
        set(&mut map, "target", self.target.map(|x| x.to_string()));
        set(
            &mut map,
            "format",
            self.format.and_then(|f| f.to_possible_value()).map(name),
        );
        set(
            &mut map,
            "out",
            self.out.as_ref().map(|p| p.display().to_string()),
        );
        // a size given on the command line replaces either size key of the file
        if self.depths.is_some() || self.nodes.is_some() {
            map.remove("depths");
            map.remove("nodes");
            set(&mut map, "depths", self.depths.clone());
            set(&mut map, "nodes", self.nodes.clone());
        }
        // likewise an explicit p list or grid from the command line replaces the file's
        if self.p.is_some() {
            for k in ["p_start", "p_stop", "p_steps", "p_step"] {
                map.remove(k);
            }
        } else if self.p_start.is_some()
            || self.p_stop.is_some()
            || self.p_steps.is_some()
            || self.p_step.is_some()
        {
            map.remove("p");
        }
        if self.p_step.is_some() && self.p_steps.is_none() {
            map.remove("p_steps");
        }
        if self.p_steps.is_some() && self.p_step.is_none() {
            map.remove("p_step");
        }
        Ok(map)
    }

    pub fn plan(&self) -> CliResult<SweepPlan> {
        plan_from(&self.merged()?)
    }
}

pub fn plan_from(map: &BTreeMap<String, String>) -> CliResult<SweepPlan> {
    let mode = match map.get("mode") {
        Some(m) => SweepMode::from_str(m, true)
            .map_err(|_| Failure::invalid(format!("mode: unknown {m:?}")))?,
        None => SweepMode::Fidelity,
    };
    let format = match map.get("format") {
        Some(f) => match Format::from_str(f, true) {
            Ok(Format::Table) | Err(_) => {
                return Err(Failure::invalid(format!(
                    "format: expected csv or json, got {f:?}"
                )))
            }
            Ok(f) => f,
        },
        None => Format::Csv,
    };

    let kinds_src = map
        .get("kinds")
        .ok_or_else(|| Failure::invalid("kinds: required"))?;
    let mut kinds = kinds_src
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<TreeKind>().map_err(Failure::from))
        .collect::<CliResult<Vec<_>>>()?;
    if kinds.is_empty() {
        return Err(Failure::invalid("kinds: empty list"));
    }
    kinds.sort_by_key(|k| TreeKind::ALL.iter().position(|x| x == k));
    kinds.dedup();

    let mut trees = Vec::new();
    match (map.get("depths"), map.get("nodes")) {
        (Some(_), Some(_)) => {
            return Err(Failure::invalid("give either depths or nodes, not both"))
        }
        (None, None) => return Err(Failure::invalid("depths or nodes: required")),
        (Some(ds), None) => {
            let ds = parse_int_list("depths", ds)?;
            for &kind in &kinds {
                let mut v: Vec<u32> = ds
                    .iter()
                    .map(|&d| {
                        u32::try_from(d)
                            .map_err(|_| Failure::invalid(format!("depths: {d} too large")))
                    })
                    .collect::<CliResult<_>>()?;
                v.sort_unstable();
                v.dedup();
                trees.extend(v.into_iter().map(|d| (kind, d)));
            }
        }
        (None, Some(ns)) => {
            let ns = parse_int_list("nodes", ns)?;
            for &kind in &kinds {
                let mut v = ns
                    .iter()
                    .map(|&n| depth_from_nodes(kind, n).map_err(Failure::from))
                    .collect::<CliResult<Vec<_>>>()?;
                v.sort_unstable();
                v.dedup();
                trees.extend(v.into_iter().map(|d| (kind, d)));
            }
        }
    }

    let target = match map.get("target") {
        Some(t) => crate::args::parse_target(t).map_err(Failure::Invalid)?,
        None => treefid::CLASSICAL_LIMIT,
    };
    let p_grid = if mode == SweepMode::Fidelity {
        p_grid(map)?
    } else {
        Vec::new()
    };
    Ok(SweepPlan {
        mode,
        trees,
        p_grid,
        target,
        format,
        out: map.get("out").map(PathBuf::from),
    })
}

fn p_grid(map: &BTreeMap<String, String>) -> CliResult<Vec<f64>> {
    let mut grid: Vec<f64> = if let Some(list) = map.get("p") {
        if ["p_start", "p_stop", "p_steps", "p_step"]
            .iter()
            .any(|k| map.contains_key(*k))
        {
            return Err(Failure::invalid(
                "give either p or a p_start/p_stop grid, not both",
            ));
        }
        list.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| num::<f64>("p", s))
            .collect::<CliResult<_>>()?
    } else {
        let start: f64 = num(
            "p_start",
            map.get("p_start")
                .ok_or_else(|| Failure::invalid("p or p_start: required"))?,
        )?;
        let stop: f64 = num(
            "p_stop",
            map.get("p_stop")
                .ok_or_else(|| Failure::invalid("p_stop: required"))?,
        )?;
        let points = match (map.get("p_steps"), map.get("p_step")) {
            (Some(_), Some(_)) => {
                return Err(Failure::invalid("give either p_steps or p_step, not both"))
            }
            (Some(n), None) => num::<usize>("p_steps", n)?,
            (None, Some(h)) => {
                let h: f64 = num("p_step", h)?;
                if h.is_nan() || h <= 0.0 {
                    return Err(Failure::invalid("p_step must be positive"));
                }
                ((stop - start) / h).round() as usize + 1
            }
            (None, None) => return Err(Failure::invalid("p_steps or p_step: required")),
        };
        if points == 0 || stop < start {
            return Err(Failure::invalid("p grid is empty"));
        }
        if points == 1 {
            vec![start]
        } else {
            // integer-indexed so that 0..1 in 101 points hits 0.01*k as closely as f64 allows
            (0..points)
                .map(|i| {
                    if i + 1 == points {
                        stop
                    } else {
                        start + (stop - start) * i as f64 / (points - 1) as f64
                    }
                })
                .collect()
        }
    };
    if grid.is_empty() {
        return Err(Failure::invalid("p grid is empty"));
    }
    if let Some(bad) = grid.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Failure::invalid(format!("p = {bad} outside [0, 1]")));
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    Ok(grid)
}

pub fn run(args: SweepArgs) -> CliResult {
    let plan = args.plan()?;
    let table = evaluate(&plan)?;
    emit(
        &table,
        &OutputArgs {
            format: plan.format,
            out: plan.out.clone(),
        },
    )
}

pub fn evaluate(plan: &SweepPlan) -> CliResult<Table> {
    match plan.mode {
        SweepMode::Fidelity => {
            let mut t = Table::new(&FIDELITY_HEADER);
            for &(kind, depth) in &plan.trees {
                for &p in &plan.p_grid {
                    let p = WernerParam::new(p)?;
                    t.push(fidelity_row(kind, depth, p, FidelityMethodArg::Closed)?);
                }
            }
            Ok(t)
        }
        SweepMode::Threshold => {
            let mut t = Table::new(&THRESHOLD_HEADER);
            for &(kind, depth) in &plan.trees {
                t.push(threshold_row(kind, depth, plan.target)?);
            }
            Ok(t)
        }
    }
}
