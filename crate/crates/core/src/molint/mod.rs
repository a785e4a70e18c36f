//! Molecules, s-type Gaussian basis sets and their analytic integrals.

mod basis;
mod boys;
mod integrals;
mod molecule;

pub use basis::{
    builtin_basis, canonical_symbol, load_basis, parse_basis, BasisSet, ContractedShell,
};
pub use boys::boys_f0;
pub use integrals::{basis_functions, build_ao_integrals, AOIntegrals};
pub use molecule::{nuclear_charge, Atom, Molecule, BOHR_PER_ANGSTROM};
