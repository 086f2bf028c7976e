use serde::Serialize;

use crate::error::{invalid, Result};
use crate::fidelity::epsilon_of;
use crate::quantum::WernerParam;
use crate::topology::{node_count, TreeKind};

/// Decay class of `epsilon(N)` predicted for a kind and `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "class")]
pub enum OrderClass {
    /// `p = 0`: every path teleports classically.
    Zero,
    /// `O(1/N)`.
    InverseN,
    /// `O(1 / log2 N)`, directed symmetric trees.
    InverseLogN,
    /// `O(log2 N / N)`, USBT at `p = 1/sqrt 2`.
    LogNOverN,
    /// `O(N^exponent)`, USBT above `p = 1/sqrt 2` with exponent `-2 log2(1/p)`.
    PowerLaw { exponent: f64 },
}

impl OrderClass {
    pub fn predicted(kind: TreeKind, p: f64) -> Self {
        if p == 0.0 {
            return OrderClass::Zero;
        }
        match kind {
            TreeKind::Dabt | TreeKind::Uabt => OrderClass::InverseN,
            TreeKind::Dsbt => OrderClass::InverseLogN,
            TreeKind::Usbt => {
                let knife = std::f64::consts::FRAC_1_SQRT_2;
                if (p - knife).abs() < 1e-12 {
                    OrderClass::LogNOverN
                } else if p < knife {
                    OrderClass::InverseN
                } else {
                    OrderClass::PowerLaw {
                        exponent: -2.0 * (1.0 / p).log2(),
                    }
                }
            }
        }
    }

    /// Slope the fit should approach, where the class is a pure power.
    pub fn expected_slope(self) -> Option<f64> {
        match self {
            OrderClass::InverseN | OrderClass::InverseLogN => Some(-1.0),
            OrderClass::PowerLaw { exponent } => Some(exponent),
            OrderClass::Zero | OrderClass::LogNOverN => None,
        }
    }

    pub fn describe(self) -> String {
        match self {
            OrderClass::Zero => "epsilon = 0".to_string(),
            OrderClass::InverseN => "O(1/N)".to_string(),
            OrderClass::InverseLogN => "O(1/log2 N)".to_string(),
            OrderClass::LogNOverN => "O(log2 N / N)".to_string(),
            OrderClass::PowerLaw { exponent } => format!("O(N^{exponent:.4})"),
        }
    }
}

/// Abscissa of the log-log regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitScale {
    /// `ln epsilon` against `ln N`.
    LogN,
    /// `ln epsilon` against `ln log2 N`.
    LogLogN,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FittedOrder {
    pub class: OrderClass,
    pub scale: FitScale,
    /// Least-squares slope over the last half of the samples; `None` when
    /// fewer than two samples there have positive epsilon.
    pub slope: Option<f64>,
    pub descriptor: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticSample {
    pub depth: u32,
    pub nodes: u128,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticProfile {
    pub kind: TreeKind,
    pub p: WernerParam,
    pub samples: Vec<AsymptoticSample>,
    pub fitted_order: FittedOrder,
}

impl AsymptoticProfile {
    /// First sample index from which epsilon is strictly decreasing to the end.
    pub fn decreasing_onset(&self) -> Option<usize> {
        let eps: Vec<f64> = self.samples.iter().map(|s| s.epsilon).collect();
        if eps.is_empty() {
            return None;
        }
        let mut onset = eps.len() - 1;
        while onset > 0 && eps[onset - 1] > eps[onset] {
            onset -= 1;
        }
        Some(onset)
    }
}

/// Evaluates `epsilon` over the given depths and fits its decay.
pub fn asymptotic_profile(
    kind: TreeKind,
    p: WernerParam,
    depths: &[u32],
) -> Result<AsymptoticProfile> {
    if depths.len() < 4 {
        return Err(invalid(format!(
            "need at least 4 depths, got {}",
            depths.len()
        )));
    }
    if depths.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("depths must be strictly ascending"));
    }
    let samples = depths
        .iter()
        .map(|&depth| {
            Ok(AsymptoticSample {
                depth,
                nodes: node_count(kind, depth)?,
                epsilon: epsilon_of(kind, depth, p)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let class = OrderClass::predicted(kind, p.value());
    let scale = if kind == TreeKind::Dsbt {
        FitScale::LogLogN
    } else {
        FitScale::LogN
    };
    let tail = &samples[samples.len() / 2..];
    let points: Vec<(f64, f64)> = tail
        .iter()
        .filter(|s| s.epsilon > 0.0)
        .map(|s| {
            let n = s.nodes as f64;
            let x = match scale {
                FitScale::LogN => n.ln(),
                FitScale::LogLogN => n.log2().ln(),
            };
            (x, s.epsilon.ln())
        })
        .collect();
    let slope = least_squares_slope(&points);
    let descriptor = match slope {
        Some(s) => format!("{} (fitted slope {s:.4})", class.describe()),
        None => class.describe(),
    };
    Ok(AsymptoticProfile {
        kind,
        p,
        samples,
        fitted_order: FittedOrder {
            class,
            scale,
            slope,
            descriptor,
        },
    })
}

fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
