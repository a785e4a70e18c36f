//! Nelder–Mead search over redundant orbital rotations of H₄ for an ill-conditioned metric
//! (a shortened version of `qlrlab cond_max`).

use qlrlab::labcli::{compute, Command, ExperimentConfig, Overrides, Report, Settings};
use qlrlab::response::Parameterization;

fn main() -> qlrlab::Result<()> {
    let cfg = ExperimentConfig::parse(
        r#"
params = ["naive", "proj"]
[cond_max]
restarts = 2
max_evals = 120
"#,
    )?;
    let settings = Settings::resolve(Command::CondMax, &cfg, &Overrides::default())?;
    let Report::CondMax(report) = compute(&settings)? else {
        unreachable!("cond_max returns its own report")
    };
    println!("redundant pairs: {:?}", report.redundant_pairs);
    for param in [Parameterization::Naive, Parameterization::Proj] {
        let best = report.best(param).expect("at least one restart");
        println!(
            "{:<5} cond at HF orbitals {:.3}  ->  {:.3e} after {} evaluations (drift {:.1e} Eh)",
            param.as_str(),
            report.cond_before(param).unwrap_or(f64::NAN),
            best.cond,
            best.evaluations,
            best.energy_drift
        );
        let k: Vec<String> = best.kappa.iter().map(|v| format!("{v:+.4}")).collect();
        println!("      κ = [{}]", k.join(", "));
    }
    Ok(())
}
