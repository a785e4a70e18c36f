//! Determinant spaces, second-quantized operators, the Hamiltonian and FCI.

mod basis;
mod fci;
mod hamiltonian;
mod operators;

pub use basis::{onv_string, parse_onv, spin_orbital, SectorBasis, MAX_ORBITALS};
pub use fci::{fci_solve, fix_state_phase, FciSolution, TwoInTwoCoefficients, DEGENERACY_TOL};
pub use hamiltonian::{build_hamiltonian, hamiltonian_op};
pub use operators::{
    build_excitation_matrix, number_operator, s_squared_operator, sz_operator, ExcitationKind,
    FermionOp, Hermiticity, Ladder, OperatorMatrix, HERMITICITY_TOL,
};
