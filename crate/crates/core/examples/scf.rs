//! Restricted Hartree–Fock for the three built-in systems.

use qlrlab::molint::Molecule;
use qlrlab::systems::{h4_rectangle, helium, hydrogen_molecule, System};

fn main() -> qlrlab::Result<()> {
    let heh = System::prepare(
        "HeH+",
        Molecule::from_angstrom(&[("He", [0.0, 0.0, 0.0]), ("H", [0.0, 0.0, 0.774])], 1)?,
        "sto-3g",
    )?;
    for sys in [
        helium()?,
        hydrogen_molecule(1.4)?,
        h4_rectangle(1.5, 1.8)?,
        heh,
    ] {
        let scf = &sys.scf;
        println!(
            "{:<10} {:<7} E_HF = {:.10} Eh  ({} iterations, |FDS − SDF| = {:.1e})",
            sys.name, sys.basis_name, scf.e_hf, scf.iterations, scf.commutator_norm
        );
        let eps: Vec<String> = scf
            .orbital_energies
            .iter()
            .map(|e| format!("{e:.5}"))
            .collect();
        println!("           orbital energies [{}]", eps.join(", "));
    }
    Ok(())
}
