//! Shot-noise ensembles of He excitation energies: noise grows near a singular metric.

use qlrlab::ansatz::GroundStateOptions;
use qlrlab::response::{Parameterization, SolveOptions};
use qlrlab::sampler::{run_noise_ensemble, NoiseEnsembleConfig, ShotPlan};
use qlrlab::systems::helium;

fn main() -> qlrlab::Result<()> {
    let he = helium()?;
    let cfg = NoiseEnsembleConfig {
        params: vec![Parameterization::Naive, Parameterization::Proj],
        pq: (0, 1),
        kappas: vec![0.0, 0.25, 0.5, 0.7, 0.78, 1.0, 1.3],
        layers: 1,
        plan: ShotPlan::new(1000, 50, 7)?,
        zero_noise: false,
        solve: SolveOptions::default(),
        ground: GroundStateOptions::default(),
    };
    println!(
        "He, {} repetitions × {} shots per Pauli term",
        cfg.plan.repetitions, cfg.plan.shots
    );
    println!("param   κ      noiseless ω    mean ω         std ω       cond Σ      excluded");
    for s in run_noise_ensemble(&he, &cfg)? {
        let f = |x: Option<f64>| x.map_or("      -      ".to_string(), |v| format!("{v:.10}"));
        println!(
            "{:<6} {:5.2}   {}  {}  {:.3e}   {:.3e}   {}",
            s.param.as_str(),
            s.kappa,
            f(s.noiseless_omega),
            f(s.mean_omega),
            s.std_omega.unwrap_or(f64::NAN),
            s.cond_sigma,
            s.n_excluded
        );
    }
    Ok(())
}
