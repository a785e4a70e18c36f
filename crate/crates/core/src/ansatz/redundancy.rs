use std::sync::Arc;

use rayon::prelude::*;

use crate::ansatz::optimize::{optimize_ground_state_from, GroundState, GroundStateOptions};
use crate::ansatz::program::AnsatzProgram;
use crate::error::{Error, Result};
use crate::fockspace::build_hamiltonian;
use crate::orbrot::{rotate_integrals, KappaParams, MOIntegrals};

/// Energy changes below this make a rotation redundant.
pub const REDUNDANCY_TOL: f64 = 1e-8;

const ESCALATION_SEED: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Debug, Clone)]
pub struct RedundancyPoint {
    pub kappa: f64,
    pub energy: f64,
    pub theta: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct RedundancyReport {
    pub p: usize,
    pub q: usize,
    pub baseline: f64,
    pub points: Vec<RedundancyPoint>,
    /// Grid points whose optimization failed, with the reason.
    pub failures: Vec<(f64, String)>,
    pub max_deviation: f64,
    pub redundant: bool,
}

/// Re-optimizes the ansatz at every `κ_pq` on `grid` and compares with the baseline energy.
///
/// Each grid point starts from the baseline parameters; restarts stop once
/// the baseline energy is recovered.
pub fn check_kappa_redundancy(
    program: &AnsatzProgram,
    mo: &MOIntegrals,
    pq: (usize, usize),
    grid: &[f64],
    baseline: &GroundState,
    options: &GroundStateOptions,
) -> Result<RedundancyReport> {
    let (p, q) = pq;
    KappaParams::zeros(mo.n_mo).index_of(p, q)?;
    if baseline.theta.len() != program.n_params() {
        return Err(Error::Precondition(
            "baseline parameters do not match the program".into(),
        ));
    }
    let basis: Arc<_> = program.basis().clone();
    let results: Vec<Result<RedundancyPoint>> = grid
        .par_iter()
        .map(|&kappa| {
            let k = KappaParams::single(mo.n_mo, p, q, kappa)?;
            let h = build_hamiltonian(&rotate_integrals(mo, &k)?, &basis)?;
            let mut opts = *options;
            opts.tol = REDUNDANCY_TOL * 0.1;
            let target = Some(baseline.energy);
            let mut wide = opts;
            wide.restarts = 4 * opts.restarts.max(1);
            wide.seed = opts.seed ^ ESCALATION_SEED;
            // the landscape has shallow local minima, so a miss first widens the search;
            // the target only stops restarts early, and a final miss is reported, not raised
            let gs = match optimize_ground_state_from(program, &h, &baseline.theta, &opts, target) {
                Ok(gs) => gs,
                Err(Error::OptimizationFailed(_)) => {
                    match optimize_ground_state_from(program, &h, &baseline.theta, &wide, target) {
                        Ok(gs) => gs,
                        Err(Error::OptimizationFailed(_)) => {
                            optimize_ground_state_from(program, &h, &baseline.theta, &wide, None)?
                        }
                        Err(e) => return Err(e),
                    }
                }
                Err(e) => return Err(e),
            };
            Ok(RedundancyPoint {
                kappa,
                energy: gs.energy,
                theta: gs.theta,
            })
        })
        .collect();
    let mut points = Vec::new();
    let mut failures = Vec::new();
    for (kappa, r) in grid.iter().zip(results) {
        match r {
            Ok(pt) => points.push(pt),
            Err(e) => failures.push((*kappa, e.to_string())),
        }
    }
    let max_deviation = points
        .iter()
        .map(|pt| (pt.energy - baseline.energy).abs())
        .fold(0.0, f64::max);
    Ok(RedundancyReport {
        p,
        q,
        baseline: baseline.energy,
        redundant: failures.is_empty() && max_deviation <= REDUNDANCY_TOL,
        points,
        failures,
        max_deviation,
    })
}
