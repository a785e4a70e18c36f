use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fockspace::basis::SectorBasis;
use crate::fockspace::operators::{FermionOp, Hermiticity, OperatorMatrix};
use crate::orbrot::MOIntegrals;

/// `H = Σ h_pq E_pq + ½ Σ g_pqrs e_pqrs + E_nuc` as a symbolic operator.
pub fn hamiltonian_op(mo: &MOIntegrals) -> FermionOp {
    let n = mo.n_mo;
    let mut op = FermionOp::identity(mo.e_nuc);
    for p in 0..n {
        for q in 0..n {
            let h = mo.h[(p, q)];
            if h != 0.0 {
                op = op + FermionOp::e_pq(p, q).scaled(h);
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let g = mo.g[[p, q, r, s]];
                    if g != 0.0 {
                        op = op + FermionOp::e_pqrs(p, q, r, s).scaled(0.5 * g);
                    }
                }
            }
        }
    }
    op
}

/// Hamiltonian matrix in `basis` (a sector or the full Fock space).
pub fn build_hamiltonian(mo: &MOIntegrals, basis: &Arc<SectorBasis>) -> Result<OperatorMatrix> {
    if mo.n_mo != basis.n_mo() {
        return Err(Error::DimensionMismatch(format!(
            "integrals for {} orbitals, basis for {}",
            mo.n_mo,
            basis.n_mo()
        )));
    }
    let op = hamiltonian_op(mo);
    let raw = OperatorMatrix::from_fermion_op(basis, &op, Hermiticity::General)?.into_matrix();
    // exact in exact arithmetic; averaging removes rounding asymmetry only
    let sym = (&raw + raw.transpose()) * 0.5;
    OperatorMatrix::new(basis.clone(), sym, Hermiticity::Hermitian)
}
