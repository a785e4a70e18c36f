use std::sync::Arc;

use nalgebra::DMatrix;

use crate::ansatz::{closed_shell_occupation, excitation_labels, ExcitationLabel, NULL_TOL};
use crate::error::Result;
use crate::fockspace::SectorBasis;
use crate::linalg::max_abs;

/// Ordered base excitation operators `G_I` with their sector matrices.
#[derive(Debug, Clone)]
pub struct ExcitationOperatorSet {
    pub basis: Arc<SectorBasis>,
    pub n_occ: usize,
    pub labels: Vec<ExcitationLabel>,
    pub matrices: Vec<DMatrix<f64>>,
    /// Labels whose sector matrix vanishes.
    pub dropped: Vec<ExcitationLabel>,
}

impl ExcitationOperatorSet {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Singles, doubles and primed doubles from the occupied/virtual split of `reference`.
pub fn build_excitation_basis(
    basis: &Arc<SectorBasis>,
    reference: u64,
) -> Result<ExcitationOperatorSet> {
    let n_occ = closed_shell_occupation(basis, reference)?;
    let mut labels = Vec::new();
    let mut matrices = Vec::new();
    let mut dropped = Vec::new();
    for label in excitation_labels(basis.n_mo(), n_occ) {
        let m = label.matrix(basis)?.into_matrix();
        if max_abs(&m) < NULL_TOL {
            dropped.push(label);
        } else {
            labels.push(label);
            matrices.push(m);
        }
    }
    Ok(ExcitationOperatorSet {
        basis: basis.clone(),
        n_occ,
        labels,
        matrices,
        dropped,
    })
}
