//! The naive and projected metrics of He become singular at particular orbital rotations,
//! while the self-consistent parameterization is unaffected.

use qlrlab::ansatz::{AnsatzProgram, GroundStateOptions};
use qlrlab::orbrot::KappaParams;
use qlrlab::response::{
    build_excitation_basis, build_response_matrices, solve_response, Parameterization, SolveOptions,
};
use qlrlab::systems::helium;

fn main() -> qlrlab::Result<()> {
    let he = helium()?;
    let program = AnsatzProgram::uccsd(&he.sector, he.n_occ())?;
    let g = build_excitation_basis(&he.sector, he.reference())?;
    let opts = SolveOptions::default();
    println!("   κ     c_1100    c_0011  | naive det Σ   naive ω        | proj det Σ    proj cond Σ   proj ω         | sc ω");
    for i in 0..=16 {
        let k = -1.5 + 3.0 * i as f64 / 16.0;
        let p = he.solve_at(
            &KappaParams::single(2, 0, 1, k)?,
            Some(&program),
            &GroundStateOptions::default(),
            None,
        )?;
        let c = p.fci.two_in_two.expect("2-in-2");
        let solve = |param| -> qlrlab::Result<_> {
            solve_response(&build_response_matrices(param, &p.ground, &p.h, &g)?, &opts)
        };
        let (n, pr, sc) = (
            solve(Parameterization::Naive)?,
            solve(Parameterization::Proj)?,
            solve(Parameterization::Sc)?,
        );
        let omega = |s: &qlrlab::response::ResponseSolution| match (s.flagged(), s.lowest()) {
            (false, Some(w)) => format!("{w:.10}"),
            _ => "  (flagged)   ".to_string(),
        };
        println!(
            "{k:+.3}  {:+.5}  {:+.5} | {:+.3e}  {} | {:+.3e}  {:.3e}  {} | {}",
            c.c_1100,
            c.c_0011,
            n.diagnostics.det_sigma,
            omega(&n),
            pr.diagnostics.det_sigma,
            pr.diagnostics.cond_sigma,
            omega(&pr),
            omega(&sc)
        );
    }
    Ok(())
}
