use std::path::PathBuf;

use clap::{Args, ValueEnum};
use treefid::{depth_from_nodes, TreeKind, WernerParam};

use crate::failure::CliResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum KindArg {
    Dabt,
    Dsbt,
    Uabt,
    Usbt,
}

impl From<KindArg> for TreeKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Dabt => TreeKind::Dabt,
            KindArg::Dsbt => TreeKind::Dsbt,
            KindArg::Uabt => TreeKind::Uabt,
            KindArg::Usbt => TreeKind::Usbt,
        }
    }
}

/// Tree size, given either as a depth or as a node count.
#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct SizeArgs {
    /// Tree depth d >= 1
    #[arg(long)]
    pub depth: Option<u32>,
    /// Node count N (2d+1 for asymmetric kinds, 2^(d+1)-1 for symmetric ones)
    #[arg(long)]
    pub nodes: Option<u128>,
}

impl SizeArgs {
    pub fn depth_for(&self, kind: TreeKind) -> CliResult<u32> {
        match (self.depth, self.nodes) {
            (Some(d), _) => Ok(d),
            (None, Some(n)) => Ok(depth_from_nodes(kind, n)?),
            (None, None) => unreachable!("clap requires one of --depth / --nodes"),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct TreeArgs {
    /// Tree kind
    #[arg(long, value_enum)]
    pub kind: KindArg,
    #[command(flatten)]
    pub size: SizeArgs,
}

impl TreeArgs {
    pub fn resolve(&self) -> CliResult<(TreeKind, u32)> {
        let kind = TreeKind::from(self.kind);
        Ok((kind, self.size.depth_for(kind)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Table,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn parse_p(s: &str) -> Result<WernerParam, String> {
    let x: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("{s:?} is not a number"))?;
    WernerParam::new(x).map_err(|e| e.to_string())
}

pub fn parse_target(s: &str) -> Result<f64, String> {
    let x: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("{s:?} is not a number"))?;
    if x > 0.5 && x < 1.0 {
        Ok(x)
    } else {
        Err(format!("target must lie in (1/2, 1), got {x}"))
    }
}
