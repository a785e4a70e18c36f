//! Excitation energies and oscillator strengths of H₂ in the four response parameterizations.

use qlrlab::ansatz::{AnsatzProgram, GroundStateOptions};
use qlrlab::response::{
    build_excitation_basis, build_response_matrices, compute_spectrum, dipole_operators,
    solve_response, Broadening, Parameterization, PropertyGradient, SolveOptions,
};
use qlrlab::systems::hydrogen_molecule;

fn main() -> qlrlab::Result<()> {
    let h2 = hydrogen_molecule(1.4)?;
    let program = AnsatzProgram::uccsd(&h2.sector, h2.n_occ())?;
    let point = h2.solve_at(
        &h2.zero_kappa(),
        Some(&program),
        &GroundStateOptions::default(),
        None,
    )?;
    let g = build_excitation_basis(&h2.sector, h2.reference())?;
    let dipole = dipole_operators(&point.mo, &h2.sector)?;

    let fci_gaps: Vec<String> = point
        .fci
        .energies
        .iter()
        .skip(1)
        .map(|e| format!("{:.8}", e - point.fci.e0))
        .collect();
    println!(
        "H2 at 1.4 bohr, FCI gaps (all spin states): {}",
        fci_gaps.join(", ")
    );
    for param in Parameterization::ALL {
        let rm = build_response_matrices(param, &point.ground, &point.h, &g)?;
        let sol = solve_response(&rm, &SolveOptions::default())?;
        let pg = PropertyGradient::exact(param, &point.ground, &g, &dipole)?;
        let spec = compute_spectrum(&sol, &pg, &Broadening::default(), false)?;
        let lines: Vec<String> = spec
            .sticks
            .iter()
            .map(|s| {
                format!(
                    "ω = {:.8} (f = {:.5})",
                    s.omega,
                    s.strength.unwrap_or(f64::NAN)
                )
            })
            .collect();
        println!(
            "{:<5} cond Σ = {:.3}  {}",
            param.as_str(),
            sol.diagnostics.cond_sigma,
            lines.join(", ")
        );
    }
    Ok(())
}
