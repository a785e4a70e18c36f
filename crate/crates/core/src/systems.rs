//! Ready-made molecular systems: SCF orbitals, MO integrals and the determinant sector.

use std::sync::Arc;

use crate::ansatz::{optimize_ground_state_from, AnsatzProgram, GroundState, GroundStateOptions};
use crate::error::Result;
use crate::fockspace::{build_hamiltonian, fci_solve, FciSolution, OperatorMatrix, SectorBasis};
use crate::molint::{build_ao_integrals, builtin_basis, AOIntegrals, Molecule};
use crate::orbrot::{rotate_integrals, transform_to_mo, KappaParams, MOIntegrals};
use crate::scf::{rhf_solve, ScfOptions, ScfResult};

#[derive(Debug, Clone)]
pub struct System {
    pub name: String,
    pub molecule: Molecule,
    pub basis_name: String,
    pub ao: AOIntegrals,
    pub scf: ScfResult,
    /// Integrals over the canonical HF orbitals.
    pub mo: MOIntegrals,
    /// `S_z = 0` sector with all orbitals active.
    pub sector: Arc<SectorBasis>,
}

impl System {
    /// Runs RHF (must converge) and builds the full-valence sector.
    pub fn prepare(name: &str, molecule: Molecule, basis_name: &str) -> Result<Self> {
        let elements = molecule.elements();
        let basis = builtin_basis(basis_name, &elements)?;
        let ao = build_ao_integrals(&molecule, &basis)?;
        let scf =
            rhf_solve(&ao, molecule.n_electrons(), &ScfOptions::default())?.require_converged()?;
        let mo = transform_to_mo(&ao, &scf.c)?;
        let sector = Arc::new(SectorBasis::enumerate(mo.n_mo, molecule.n_electrons(), 0)?);
        Ok(Self {
            name: name.to_string(),
            molecule,
            basis_name: basis_name.to_string(),
            ao,
            scf,
            mo,
            sector,
        })
    }

    pub fn n_mo(&self) -> usize {
        self.mo.n_mo
    }

    pub fn n_occ(&self) -> usize {
        self.molecule.n_electrons() / 2
    }

    /// Closed-shell Aufbau determinant.
    pub fn reference(&self) -> u64 {
        SectorBasis::closed_shell_reference(self.n_occ())
    }

    pub fn rotated_integrals(&self, kappa: &KappaParams) -> Result<MOIntegrals> {
        rotate_integrals(&self.mo, kappa)
    }

    /// Sector Hamiltonian in the orbitals `C_HF exp(K)`.
    pub fn hamiltonian(&self, kappa: &KappaParams) -> Result<OperatorMatrix> {
        build_hamiltonian(&self.rotated_integrals(kappa)?, &self.sector)
    }

    pub fn zero_kappa(&self) -> KappaParams {
        KappaParams::zeros(self.n_mo())
    }

    /// FCI and ansatz ground state in the rotated orbitals.
    ///
    /// Without a program the FCI vector itself is the ground state. With one,
    /// the ansatz is optimized (from `theta0`, default zero) and must reach the
    /// FCI energy within `options.tol`.
    pub fn solve_at(
        &self,
        kappa: &KappaParams,
        program: Option<&AnsatzProgram>,
        options: &GroundStateOptions,
        theta0: Option<&[f64]>,
    ) -> Result<KappaPoint> {
        let mo = self.rotated_integrals(kappa)?;
        let h = build_hamiltonian(&mo, &self.sector)?;
        let fci = fci_solve(&h)?;
        let ground = match program {
            None => GroundState::from_fci(&fci),
            Some(p) => {
                let zeros = vec![0.0; p.n_params()];
                optimize_ground_state_from(p, &h, theta0.unwrap_or(&zeros), options, Some(fci.e0))?
            }
        };
        Ok(KappaPoint {
            kappa: kappa.clone(),
            mo,
            h,
            fci,
            ground,
        })
    }
}

/// Everything computed at one orbital rotation.
#[derive(Debug, Clone)]
pub struct KappaPoint {
    pub kappa: KappaParams,
    pub mo: MOIntegrals,
    pub h: OperatorMatrix,
    pub fci: FciSolution,
    pub ground: GroundState,
}

/// He atom in 6-31G (two orbitals, two electrons).
pub fn helium() -> Result<System> {
    System::prepare("He/6-31G", Molecule::new(&[("He", [0.0; 3])], 0)?, "6-31g")
}

/// H₂ in STO-3G along z with bond length `r_bohr`.
pub fn hydrogen_molecule(r_bohr: f64) -> Result<System> {
    let mol = Molecule::new(&[("H", [0.0; 3]), ("H", [0.0, 0.0, r_bohr])], 0)?;
    System::prepare("H2/STO-3G", mol, "sto-3g")
}

/// Rectangular H₄ in STO-3G with sides `a` (along x) and `b` (along y), in Ångström.
pub fn h4_rectangle(a_angstrom: f64, b_angstrom: f64) -> Result<System> {
    let (a, b) = (a_angstrom, b_angstrom);
    let mol = Molecule::from_angstrom(
        &[
            ("H", [0.0, 0.0, 0.0]),
            ("H", [a, 0.0, 0.0]),
            ("H", [0.0, b, 0.0]),
            ("H", [a, b, 0.0]),
        ],
        0,
    )?;
    System::prepare("H4/STO-3G", mol, "sto-3g")
}
