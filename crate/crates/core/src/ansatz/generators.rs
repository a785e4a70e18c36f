use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fockspace::{FermionOp, Hermiticity, OperatorMatrix, SectorBasis};
use crate::linalg::max_abs;

/// Spin-adapted excitation, by spatial indices (occupied `i, j` → virtual `a, b`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExcitationLabel {
    /// `E_ai / √2`
    Single { i: usize, a: usize },
    /// `(E_ai E_bj + E_aj E_bi) / (2 √((1+δ_ab)(1+δ_ij)))`
    Double {
        i: usize,
        j: usize,
        a: usize,
        b: usize,
    },
    /// `(E_ai E_bj − E_aj E_bi) / (2 √3)`
    DoublePrime {
        i: usize,
        j: usize,
        a: usize,
        b: usize,
    },
}

impl ExcitationLabel {
    pub fn class_name(&self) -> &'static str {
        match self {
            Self::Single { .. } => "single",
            Self::Double { .. } => "double",
            Self::DoublePrime { .. } => "double_prime",
        }
    }

    /// Symbolic operator (not the anti-Hermitian combination).
    pub fn fermion_op(&self) -> FermionOp {
        match *self {
            Self::Single { i, a } => FermionOp::e_pq(a, i).scaled(std::f64::consts::FRAC_1_SQRT_2),
            Self::Double { i, j, a, b } => {
                let dab: f64 = if a == b { 2.0 } else { 1.0 };
                let dij = if i == j { 2.0 } else { 1.0 };
                let norm = 1.0 / (2.0 * (dab * dij).sqrt());
                let t1 = &FermionOp::e_pq(a, i) * &FermionOp::e_pq(b, j);
                let t2 = &FermionOp::e_pq(a, j) * &FermionOp::e_pq(b, i);
                (t1 + t2).scaled(norm)
            }
            Self::DoublePrime { i, j, a, b } => {
                let norm = 1.0 / (2.0 * 3f64.sqrt());
                let t1 = &FermionOp::e_pq(a, i) * &FermionOp::e_pq(b, j);
                let t2 = &FermionOp::e_pq(a, j) * &FermionOp::e_pq(b, i);
                (t1 + t2.scaled(-1.0)).scaled(norm)
            }
        }
    }

    /// Matrix of the excitation in `basis`.
    pub fn matrix(&self, basis: &Arc<SectorBasis>) -> Result<OperatorMatrix> {
        OperatorMatrix::from_fermion_op(basis, &self.fermion_op(), Hermiticity::General)
    }
}

impl fmt::Display for ExcitationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Single { i, a } => write!(f, "G1({i}->{a})"),
            Self::Double { i, j, a, b } => write!(f, "G2({i}{j}->{a}{b})"),
            Self::DoublePrime { i, j, a, b } => write!(f, "G2'({i}{j}->{a}{b})"),
        }
    }
}

/// Occupied → virtual labels: singles (i outer, a inner), then doubles
/// (`i ≤ j`, `a ≤ b`), then primed doubles (`i < j`, `a < b`).
pub fn excitation_labels(n_mo: usize, n_occ: usize) -> Vec<ExcitationLabel> {
    let occ = 0..n_occ;
    let virt = n_occ..n_mo;
    let mut out = Vec::new();
    for i in occ.clone() {
        for a in virt.clone() {
            out.push(ExcitationLabel::Single { i, a });
        }
    }
    for i in occ.clone() {
        for j in i..n_occ {
            for a in virt.clone() {
                for b in a..n_mo {
                    out.push(ExcitationLabel::Double { i, j, a, b });
                }
            }
        }
    }
    for i in occ.clone() {
        for j in i + 1..n_occ {
            for a in virt.clone() {
                for b in a + 1..n_mo {
                    out.push(ExcitationLabel::DoublePrime { i, j, a, b });
                }
            }
        }
    }
    out
}

/// Number of closed-shell occupied orbitals of a reference determinant.
pub fn closed_shell_occupation(basis: &SectorBasis, reference: u64) -> Result<usize> {
    let n_occ = reference.count_ones() as usize / 2;
    if reference != SectorBasis::closed_shell_reference(n_occ)
        || basis.index_of(reference).is_none()
    {
        return Err(Error::Unsupported(format!(
            "reference {} is not a closed-shell Aufbau determinant of the basis",
            crate::fockspace::onv_string(reference, basis.n_modes())
        )));
    }
    Ok(n_occ)
}

/// Anti-Hermitian cluster generator `σ = T − T†`.
#[derive(Debug, Clone)]
pub struct ClusterGenerator {
    pub label: ExcitationLabel,
    pub matrix: OperatorMatrix,
}

impl ClusterGenerator {
    pub fn new(basis: &Arc<SectorBasis>, label: ExcitationLabel) -> Result<Self> {
        let t = label.matrix(basis)?.into_matrix();
        let sigma = &t - t.transpose();
        Ok(Self {
            label,
            matrix: OperatorMatrix::new(basis.clone(), sigma, Hermiticity::AntiHermitian)?,
        })
    }

    pub fn is_null(&self) -> bool {
        max_abs(self.matrix.matrix()) < NULL_TOL
    }
}

/// Operators whose largest matrix element is below this are considered null in the sector.
pub const NULL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    Singles,
    Doubles,
    SinglesDoubles,
}

#[derive(Debug, Clone)]
pub struct ClusterGeneratorSet {
    pub generators: Vec<ClusterGenerator>,
    /// Labels dropped because their sector matrix vanishes.
    pub dropped: Vec<ExcitationLabel>,
}

impl ClusterGeneratorSet {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn matrices(&self) -> Vec<DMatrix<f64>> {
        self.generators
            .iter()
            .map(|g| g.matrix.matrix().clone())
            .collect()
    }
}

/// Spin-adapted UCC generators over the occupied/virtual split of `reference`.
pub fn build_cluster_generators(
    basis: &Arc<SectorBasis>,
    reference: u64,
    truncation: Truncation,
) -> Result<ClusterGeneratorSet> {
    let n_occ = closed_shell_occupation(basis, reference)?;
    let mut generators = Vec::new();
    let mut dropped = Vec::new();
    for label in excitation_labels(basis.n_mo(), n_occ) {
        let keep = match (truncation, label) {
            (Truncation::Singles, ExcitationLabel::Single { .. }) => true,
            (Truncation::Singles, _) => false,
            (Truncation::Doubles, ExcitationLabel::Single { .. }) => false,
            (Truncation::Doubles, _) => true,
            (Truncation::SinglesDoubles, _) => true,
        };
        if !keep {
            continue;
        }
        let g = ClusterGenerator::new(basis, label)?;
        if g.is_null() {
            dropped.push(label);
        } else {
            generators.push(g);
        }
    }
    Ok(ClusterGeneratorSet {
        generators,
        dropped,
    })
}
