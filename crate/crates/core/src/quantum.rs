//! Exact two- and four-qubit density-matrix algebra.
//!
//! This is the physical check on the combinatorics elsewhere in the crate:
//! a Bell measurement on the middle pair of `werner(p1) (x) werner(p2)`
//! must leave the outer pair in `werner(p1 * p2)`, and the correlation-matrix
//! fidelity of `werner(p)` must be `(1 + p) / 2`.
//!
//! Qubit order is big-endian: in a four-qubit state on `A, B1, B2, C` the
//! basis index is `8a + 4b1 + 2b2 + c`.

use std::fmt;

use nalgebra::{DMatrix, Matrix3, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::tolerances;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Werner mixing parameter `p` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct WernerParam(f64);

impl WernerParam {
    pub const ZERO: WernerParam = WernerParam(0.0);
    pub const ONE: WernerParam = WernerParam(1.0);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_finite() && (0.0..=1.0).contains(&p) {
            Ok(WernerParam(p))
        } else {
            Err(invalid(format!(
                "Werner parameter must lie in [0, 1], got {p}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for WernerParam {
    type Error = Error;

    fn try_from(p: f64) -> Result<Self> {
        WernerParam::new(p)
    }
}

impl From<WernerParam> for f64 {
    fn from(p: WernerParam) -> f64 {
        p.0
    }
}

impl fmt::Display for WernerParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The four Bell states, indexed `0..=3` as `Phi+, Phi-, Psi+, Psi-`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PhiPlus,
        BellState::PhiMinus,
        BellState::PsiPlus,
        BellState::PsiMinus,
    ];

    pub fn from_index(index: usize) -> Result<Self> {
        Self::ALL
            .get(index)
            .copied()
            .ok_or_else(|| invalid(format!("Bell state index must be 0..=3, got {index}")))
    }

    /// Amplitudes on `|00>, |01>, |10>, |11>`.
    pub fn amplitudes(self) -> [Complex64; 4] {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        match self {
            BellState::PhiPlus => [h, ZERO, ZERO, h],
            BellState::PhiMinus => [h, ZERO, ZERO, -h],
            BellState::PsiPlus => [ZERO, h, h, ZERO],
            BellState::PsiMinus => [ZERO, h, -h, ZERO],
        }
    }

    /// Pauli correction applied to the far qubit after this outcome so that
    /// singlet inputs always leave the outer pair in `Psi-`.
    ///
    /// | outcome | correction |
    /// |---------|------------|
    /// | Phi+    | Z X        |
    /// | Phi-    | X          |
    /// | Psi+    | Z          |
    /// | Psi-    | identity   |
    pub fn correction(self) -> DMatrix<Complex64> {
        match self {
            BellState::PhiPlus => pauli_z() * pauli_x(),
            BellState::PhiMinus => pauli_x(),
            BellState::PsiPlus => pauli_z(),
            BellState::PsiMinus => DMatrix::identity(2, 2),
        }
    }
}

pub fn pauli_x() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

fn paulis() -> [DMatrix<Complex64>; 3] {
    [pauli_x(), pauli_y(), pauli_z()]
}

fn projector(amplitudes: &[Complex64]) -> DMatrix<Complex64> {
    let n = amplitudes.len();
    DMatrix::from_fn(n, n, |i, j| amplitudes[i] * amplitudes[j].conj())
}

/// A validated density matrix on two (dimension 4) or four (dimension 16) qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        let dim = entries.nrows();
        if entries.ncols() != dim || !(dim == 4 || dim == 16) {
            return Err(Error::InvalidState(format!(
                "density matrix must be 4x4 or 16x16, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let rho = DensityMatrix { entries };
        rho.check_hermitian()?;
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > tolerances::TRACE || tr.im.abs() > tolerances::TRACE {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let min = rho.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < tolerances::POSITIVITY {
            return Err(Error::InvalidState(format!("negative eigenvalue {min}")));
        }
        Ok(rho)
    }

    fn check_hermitian(&self) -> Result<()> {
        let dim = self.dim();
        for i in 0..dim {
            for j in i..dim {
                let d = self.entries[(i, j)] - self.entries[(j, i)].conj();
                if d.norm() > tolerances::HERMITIAN {
                    return Err(Error::InvalidState(format!(
                        "not Hermitian at ({i}, {j}): deviation {}",
                        d.norm()
                    )));
                }
            }
        }
        Ok(())
    }

    /// `I / dim`.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::new(DMatrix::identity(dim, dim) / Complex64::new(dim as f64, 0.0))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    /// `Tr(rho sigma)`, real for Hermitian arguments.
    pub fn overlap(&self, other: &DensityMatrix) -> f64 {
        (&self.entries * &other.entries).trace().re
    }

    pub fn purity(&self) -> f64 {
        self.overlap(self)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.entries.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        if self.dim() != 4 || other.dim() != 4 {
            return Err(invalid(
                "tensor product is only defined for two-qubit factors",
            ));
        }
        DensityMatrix::new(self.entries.kronecker(&other.entries))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        (&self.entries - &other.entries)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    fn require_two_qubit(&self, op: &str) -> Result<()> {
        if self.dim() != 4 {
            return Err(Error::InvalidState(format!(
                "{op} needs a two-qubit state, got dimension {}",
                self.dim()
            )));
        }
        Ok(())
    }
}

/// Rank-one projector onto the Bell state with the given index.
pub fn bell_state(index: usize) -> Result<DensityMatrix> {
    bell_projector(BellState::from_index(index)?)
}

pub fn bell_projector(state: BellState) -> Result<DensityMatrix> {
    DensityMatrix::new(projector(&state.amplitudes()))
}

/// `(1 - p)/4 I + p |Psi-><Psi-|`.
pub fn werner_state(p: WernerParam) -> DensityMatrix {
    let p = p.value();
    let singlet = projector(&BellState::PsiMinus.amplitudes());
    let m = DMatrix::identity(4, 4) * Complex64::new((1.0 - p) / 4.0, 0.0)
        + singlet * Complex64::new(p, 0.0);
    DensityMatrix::new(m).expect("Werner states are valid density matrices")
}

/// Pauli correlation matrix `t_mn = Tr(rho sigma_m (x) sigma_n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationMatrix(pub Matrix3<f64>);

impl CorrelationMatrix {
    /// Singular values, via the eigenvalues of `T^T T`.
    pub fn singular_values(&self) -> [f64; 3] {
        let gram = self.0.transpose() * self.0;
        let ev = SymmetricEigen::new(gram).eigenvalues;
        let mut out = [0.0; 3];
        for (o, &lambda) in out.iter_mut().zip(ev.iter()) {
            let lambda = if lambda < 0.0 && lambda > -tolerances::EIGEN_CLAMP {
                0.0
            } else {
                lambda
            };
            *o = lambda.max(0.0).sqrt();
        }
        out.sort_by(|a, b| b.total_cmp(a));
        out
    }

    /// `Tr sqrt(T^dagger T)`.
    pub fn trace_norm(&self) -> f64 {
        self.singular_values().iter().sum()
    }
}

pub fn correlation_matrix(rho: &DensityMatrix) -> Result<CorrelationMatrix> {
    rho.require_two_qubit("correlation_matrix")?;
    rho.check_hermitian()?;
    let sigma = paulis();
    let mut t = Matrix3::zeros();
    for m in 0..3 {
        for n in 0..3 {
            let op = sigma[m].kronecker(&sigma[n]);
            t[(m, n)] = (rho.matrix() * op).trace().re;
        }
    }
    let t = CorrelationMatrix(t);
    if let Some(s) = t
        .singular_values()
        .into_iter()
        .find(|&s| s > 1.0 + tolerances::SINGULAR_VALUE_SLACK)
    {
        return Err(Error::InvalidState(format!(
            "correlation singular value {s} exceeds 1"
        )));
    }
    Ok(t)
}

/// Optimal teleportation fidelity `(1 + N(rho)/3) / 2`.
pub fn teleportation_fidelity(rho: &DensityMatrix) -> Result<f64> {
    let t = correlation_matrix(rho)?;
    Ok(0.5 * (1.0 + t.trace_norm() / 3.0))
}

/// One branch of a Bell measurement on the middle pair.
#[derive(Debug, Clone)]
pub struct SwapBranch {
    pub outcome: BellState,
    pub probability: f64,
    /// Corrected, normalised outer-pair state; `None` when the branch has
    /// zero probability.
    pub state: Option<DensityMatrix>,
}

/// All four measurement branches of an entanglement swap on `A-B1` and `B2-C`.
pub fn swap_branches(rho_ab: &DensityMatrix, rho_bc: &DensityMatrix) -> Result<Vec<SwapBranch>> {
    let (branches, _) = swap_impl(rho_ab, rho_bc)?;
    Ok(branches)
}

/// Entanglement swapping: Bell measurement on `B1 B2`, Pauli correction on
/// `C`, then averaging the corrected branches with their probabilities.
pub fn entanglement_swap(rho_ab: &DensityMatrix, rho_bc: &DensityMatrix) -> Result<DensityMatrix> {
    let (_, total) = swap_impl(rho_ab, rho_bc)?;
    DensityMatrix::new(total)
}

fn swap_impl(
    rho_ab: &DensityMatrix,
    rho_bc: &DensityMatrix,
) -> Result<(Vec<SwapBranch>, DMatrix<Complex64>)> {
    rho_ab.require_two_qubit("entanglement_swap")?;
    rho_bc.require_two_qubit("entanglement_swap")?;
    let joint = rho_ab.tensor(rho_bc)?;
    let id2 = DMatrix::<Complex64>::identity(2, 2);

    let mut branches = Vec::with_capacity(4);
    let mut total = DMatrix::<Complex64>::zeros(4, 4);
    let mut prob_sum = 0.0;
    for outcome in BellState::ALL {
        let proj = id2
            .kronecker(&projector(&outcome.amplitudes()))
            .kronecker(&id2);
        let post = &proj * joint.matrix() * &proj;
        let outer = trace_out_middle(&post);
        let fix = id2.kronecker(&outcome.correction());
        let corrected = &fix * outer * fix.adjoint();
        let probability = corrected.trace().re;
        prob_sum += probability;
        total += &corrected;
        let state = if probability > 1e-15 {
            Some(DensityMatrix::new(
                corrected / Complex64::new(probability, 0.0),
            )?)
        } else {
            None
        };
        branches.push(SwapBranch {
            outcome,
            probability,
            state,
        });
    }
    if (prob_sum - 1.0).abs() > tolerances::OUTCOME_PROBABILITY {
        return Err(Error::InvalidState(format!(
            "Bell outcome probabilities sum to {prob_sum}, expected 1"
        )));
    }
    Ok((branches, total))
}

/// `Tr_{B1 B2}` of a four-qubit operator on `A, B1, B2, C`.
fn trace_out_middle(op: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let mut out = DMatrix::<Complex64>::zeros(4, 4);
    for a in 0..2 {
        for c in 0..2 {
            for a2 in 0..2 {
                for c2 in 0..2 {
                    let mut acc = ZERO;
                    for mid in 0..4 {
                        acc += op[(8 * a + 2 * mid + c, 8 * a2 + 2 * mid + c2)];
                    }
                    out[(2 * a + c, 2 * a2 + c2)] = acc;
                }
            }
        }
    }
    out
}

/// Fidelity of a repeater chain: `(1 + prod p_i) / 2`.
pub fn chain_fidelity(ps: &[WernerParam]) -> Result<f64> {
    if ps.is_empty() {
        return Err(Error::Empty("chain_fidelity needs at least one link"));
    }
    Ok(0.5 * (1.0 + ps.iter().map(|p| p.value()).product::<f64>()))
}
