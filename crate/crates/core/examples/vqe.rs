//! Statevector ground states: UCCSD for He and tUPS(3) for the H₄ rectangle.

use qlrlab::ansatz::{optimize_ground_state, AnsatzProgram, GroundStateOptions};
use qlrlab::systems::{h4_rectangle, helium};

fn main() -> qlrlab::Result<()> {
    let opts = GroundStateOptions::default();

    let he = helium()?;
    let e_fci = he.solve_at(&he.zero_kappa(), None, &opts, None)?.fci.e0;
    let uccsd = AnsatzProgram::uccsd(&he.sector, he.n_occ())?;
    let gs = optimize_ground_state(
        &uccsd,
        &he.hamiltonian(&he.zero_kappa())?,
        &opts,
        Some(e_fci),
    )?;
    println!(
        "He UCCSD ({} params): E = {:.12}, E − E_FCI = {:.1e}",
        uccsd.n_params(),
        gs.energy,
        gs.energy - e_fci
    );

    let h4 = h4_rectangle(1.5, 1.8)?;
    let e_fci = h4.solve_at(&h4.zero_kappa(), None, &opts, None)?.fci.e0;
    let h = h4.hamiltonian(&h4.zero_kappa())?;
    for layers in 1..=3 {
        let tups = AnsatzProgram::tups(&h4.sector, h4.n_occ(), layers)?;
        let gs = optimize_ground_state(&tups, &h, &opts, None)?;
        println!(
            "H4 tUPS({layers}) ({:>2} params): E = {:.12}, E − E_FCI = {:.1e} ({} BFGS iterations)",
            tups.n_params(),
            gs.energy,
            gs.energy - e_fci,
            gs.trace.iterations
        );
    }
    Ok(())
}
