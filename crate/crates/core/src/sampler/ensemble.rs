use rayon::prelude::*;

use crate::ansatz::{AnsatzProgram, GroundStateOptions};
use crate::error::Result;
use crate::orbrot::KappaParams;
use crate::response::{
    build_excitation_basis, build_response_matrices, solve_response, Parameterization, SolveOptions,
};
use crate::sampler::noisy::{Estimator, NoisyResponseModel};
use crate::sampler::shots::ShotPlan;
use crate::systems::System;

/// Roots with `|Im ω| > REAL_ROOT_TOL · max(1, ω)` do not count as real.
pub const REAL_ROOT_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct NoiseEnsembleConfig {
    pub params: Vec<Parameterization>,
    /// Rotated orbital pair `(p, q)`.
    pub pq: (usize, usize),
    pub kappas: Vec<f64>,
    pub layers: usize,
    pub plan: ShotPlan,
    /// Substitute exact Pauli expectations for the samples.
    pub zero_noise: bool,
    pub solve: SolveOptions,
    pub ground: GroundStateOptions,
}

/// Statistics of the lowest real positive ω at one κ.
#[derive(Debug, Clone)]
pub struct KappaNoiseStats {
    pub kappa: f64,
    pub param: Parameterization,
    pub noiseless_omega: Option<f64>,
    pub noiseless_flagged: bool,
    /// Noiseless `cond₂(Σ)`.
    pub cond_sigma: f64,
    pub mean_omega: Option<f64>,
    /// Sample standard deviation (`n − 1`).
    pub std_omega: Option<f64>,
    /// Repetitions without a real positive root.
    pub n_excluded: usize,
    pub omegas: Vec<Option<f64>>,
    pub seed: u64,
}

/// Mean and sample standard deviation of the finite entries.
pub fn mean_std(values: &[Option<f64>]) -> (Option<f64>, Option<f64>) {
    let xs: Vec<f64> = values.iter().flatten().copied().collect();
    if xs.is_empty() {
        return (None, None);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let std = if xs.len() > 1 {
        Some((xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt())
    } else {
        None
    };
    (Some(mean), std)
}

/// Noise ensembles over a κ grid with a tUPS ground state optimized noiselessly at every point.
pub fn run_noise_ensemble(
    system: &System,
    cfg: &NoiseEnsembleConfig,
) -> Result<Vec<KappaNoiseStats>> {
    let program = AnsatzProgram::tups(&system.sector, system.n_occ(), cfg.layers)?;
    let g = build_excitation_basis(&system.sector, system.reference())?;
    let (p, q) = cfg.pq;
    let per_kappa: Vec<Result<Vec<KappaNoiseStats>>> = cfg
        .kappas
        .par_iter()
        .enumerate()
        .map(|(ik, &kappa)| {
            let k = KappaParams::single(system.n_mo(), p, q, kappa)?;
            let point = system.solve_at(&k, Some(&program), &cfg.ground, None)?;
            let mut out = Vec::new();
            for (ip, &param) in cfg.params.iter().enumerate() {
                let exact = solve_response(
                    &build_response_matrices(param, &point.ground, &point.h, &g)?,
                    &cfg.solve,
                )?;
                let model = NoisyResponseModel::new(param, &point.ground, &point.mo, &g)?;
                let stream = ((ik as u64) << 8) | ip as u64;
                let omegas: Vec<Option<f64>> = (0..cfg.plan.repetitions)
                    .into_par_iter()
                    .map(|rep| {
                        let estimator = if cfg.zero_noise {
                            Estimator::Exact
                        } else {
                            Estimator::Sampled {
                                stream,
                                repetition: rep,
                            }
                        };
                        let (rm, _) = model.build(Some(&cfg.plan), estimator)?;
                        if !rm.is_finite() {
                            return Ok(None);
                        }
                        Ok(solve_response(&rm, &cfg.solve)?.lowest_real(REAL_ROOT_TOL))
                    })
                    .collect::<Result<_>>()?;
                let (mean_omega, std_omega) = mean_std(&omegas);
                out.push(KappaNoiseStats {
                    kappa,
                    param,
                    noiseless_omega: exact.lowest_real(REAL_ROOT_TOL),
                    noiseless_flagged: exact.flagged(),
                    cond_sigma: exact.diagnostics.cond_sigma,
                    mean_omega,
                    std_omega,
                    n_excluded: omegas.iter().filter(|w| w.is_none()).count(),
                    omegas,
                    seed: cfg.plan.master_seed,
                });
            }
            Ok(out)
        })
        .collect();
    let mut stats = Vec::new();
    for r in per_kappa {
        stats.extend(r?);
    }
    Ok(stats)
}
