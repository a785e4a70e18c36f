//! Adversarial search for orbitals that make the metric ill-conditioned.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ansatz::{
    check_kappa_redundancy, optimize_ground_state_from, AnsatzProgram, GroundState,
    GroundStateOptions, RedundancyReport,
};
use crate::error::{Error, Result};
use crate::fockspace::{build_hamiltonian, fci_solve};
use crate::labcli::config::{uniform, AnsatzChoice, CondMaxSettings, Settings};
use crate::labcli::output::{flag, int, num, Table};
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::orbrot::KappaParams;
use crate::response::{
    build_excitation_basis, metric_condition, ExcitationOperatorSet, Parameterization,
};
use crate::sampler::derive_seed;
use crate::systems::System;

/// Condition numbers are capped here inside the objective so `log10` stays finite.
pub const COND_CAP: f64 = 1e16;

const START_STREAM: u64 = 0xC0_4D;

#[derive(Debug, Clone)]
pub struct RestartResult {
    pub param: Parameterization,
    pub restart: usize,
    pub start: Vec<f64>,
    /// Best redundant κ found, in `redundant_pairs` order.
    pub kappa: Vec<f64>,
    pub cond: f64,
    /// `E(κ) − E_FCI(κ)` at the best point.
    pub energy_drift: f64,
    /// Largest drift over all accepted trials.
    pub max_energy_drift: f64,
    pub evaluations: usize,
    pub rejected: usize,
    pub theta: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct CondMaxReport {
    pub system: String,
    pub baseline_energy: f64,
    pub fci_energy: f64,
    pub redundancy: Vec<RedundancyReport>,
    pub redundant_pairs: Vec<(usize, usize)>,
    /// `cond₂(Σ)` at κ = 0 per parameterization.
    pub cond_before: Vec<(Parameterization, f64)>,
    pub restarts: Vec<RestartResult>,
}

impl CondMaxReport {
    pub fn cond_before(&self, param: Parameterization) -> Option<f64> {
        self.cond_before
            .iter()
            .find(|(p, _)| *p == param)
            .map(|(_, c)| *c)
    }

    /// Restart with the largest achieved condition number (first one on ties).
    pub fn best(&self, param: Parameterization) -> Option<&RestartResult> {
        self.restarts.iter().filter(|r| r.param == param).fold(
            None,
            |best: Option<&RestartResult>, r| match best {
                Some(b) if b.cond >= r.cond => Some(b),
                _ => Some(r),
            },
        )
    }

    /// Full κ (all pairs) at the best point for `param`.
    pub fn kappa_div(&self, param: Parameterization, n_mo: usize) -> Option<KappaParams> {
        let best = self.best(param)?;
        let mut k = KappaParams::zeros(n_mo);
        for (&(p, q), &v) in self.redundant_pairs.iter().zip(&best.kappa) {
            k.set(p, q, v).ok()?;
        }
        Some(k)
    }

    pub fn tables(&self) -> Vec<Table> {
        let mut red = Table::new(
            "redundancy.csv",
            &["p", "q", "max_deviation", "redundant", "failures"],
        );
        for r in &self.redundancy {
            red.push(vec![
                int(r.p),
                int(r.q),
                num(r.max_deviation),
                flag(r.redundant),
                int(r.failures.len()),
            ]);
        }
        let mut cm = Table::new(
            "cond_max.csv",
            &[
                "param",
                "restart",
                "best",
                "cond_before",
                "cond_after",
                "log10_cond_after",
                "energy_drift",
                "max_energy_drift",
                "evaluations",
                "rejected",
            ],
        );
        let mut kd = Table::new("kappa_div.csv", &["param", "p", "q", "kappa"]);
        for r in &self.restarts {
            let is_best = self.best(r.param).is_some_and(|b| b.restart == r.restart);
            cm.push(vec![
                r.param.to_string(),
                int(r.restart),
                flag(is_best),
                num(self.cond_before(r.param).unwrap_or(f64::NAN)),
                num(r.cond),
                num(r.cond.log10()),
                num(r.energy_drift),
                num(r.max_energy_drift),
                int(r.evaluations),
                int(r.rejected),
            ]);
            if is_best {
                for (&(p, q), &v) in self.redundant_pairs.iter().zip(&r.kappa) {
                    kd.push(vec![r.param.to_string(), int(p), int(q), num(v)]);
                }
            }
        }
        vec![cm, kd, red]
    }
}

/// Ground state of `program` at `kappa`, held at the FCI energy.
///
/// Returns the state and `E − E_FCI`. Misses above `energy_tol` are retried
/// without the target and reported through the drift.
pub fn constrained_ground_state(
    system: &System,
    program: &AnsatzProgram,
    kappa: &KappaParams,
    theta0: &[f64],
    opts: &GroundStateOptions,
) -> Result<(GroundState, f64)> {
    let mo = system.rotated_integrals(kappa)?;
    let h = build_hamiltonian(&mo, &system.sector)?;
    let fci = fci_solve(&h)?;
    let gs = match optimize_ground_state_from(program, &h, theta0, opts, Some(fci.e0)) {
        Ok(gs) => gs,
        Err(Error::OptimizationFailed(_)) => {
            optimize_ground_state_from(program, &h, theta0, opts, None)?
        }
        Err(e) => return Err(e),
    };
    let drift = gs.energy - fci.e0;
    Ok((gs, drift))
}

struct Search<'a> {
    system: &'a System,
    program: &'a AnsatzProgram,
    g: &'a ExcitationOperatorSet,
    pairs: &'a [(usize, usize)],
    opts: GroundStateOptions,
    cfg: &'a CondMaxSettings,
    baseline_theta: &'a [f64],
}

impl Search<'_> {
    fn kappa(&self, x: &[f64]) -> Result<KappaParams> {
        let mut k = KappaParams::zeros(self.system.n_mo());
        for (&(p, q), &v) in self.pairs.iter().zip(x) {
            k.set(p, q, v)?;
        }
        Ok(k)
    }

    fn restart(
        &self,
        param: Parameterization,
        restart: usize,
        start: Vec<f64>,
    ) -> Result<RestartResult> {
        let mut theta = self.baseline_theta.to_vec();
        let mut evaluations = 0;
        let mut rejected = 0;
        let mut max_drift = 0.0f64;
        let mut best: Option<(Vec<f64>, f64, f64, Vec<f64>)> = None;
        let mut err = None;
        let nm = NelderMeadOptions {
            max_evals: self.cfg.max_evals,
            initial_step: self.cfg.initial_step,
            ftol: 1e-10,
            xtol: 1e-10,
        };
        nelder_mead(
            |x| {
                evaluations += 1;
                if err.is_some() || x.iter().any(|v| v.abs() > std::f64::consts::PI) {
                    return f64::INFINITY;
                }
                let eval = || -> Result<Option<(GroundState, f64, f64)>> {
                    let k = self.kappa(x)?;
                    let (gs, drift) = constrained_ground_state(
                        self.system,
                        self.program,
                        &k,
                        &theta,
                        &self.opts,
                    )?;
                    if drift.abs() > self.cfg.reject_tol {
                        return Ok(None);
                    }
                    let cond = metric_condition(param, &gs, self.g)?;
                    Ok(Some((gs, drift, cond)))
                };
                match eval() {
                    Ok(Some((gs, drift, cond))) => {
                        max_drift = max_drift.max(drift.abs());
                        theta.clone_from(&gs.theta);
                        let c = if cond.is_nan() { f64::INFINITY } else { cond };
                        if best
                            .as_ref()
                            .is_none_or(|b| c.min(COND_CAP) > b.1.min(COND_CAP))
                        {
                            best = Some((x.to_vec(), c, drift, gs.theta));
                        }
                        -c.min(COND_CAP).log10()
                    }
                    Ok(None) => {
                        rejected += 1;
                        f64::INFINITY
                    }
                    Err(e) => {
                        err = Some(e);
                        f64::INFINITY
                    }
                }
            },
            &start,
            &nm,
        );
        if let Some(e) = err {
            return Err(e);
        }
        let (kappa, cond, energy_drift, theta) = best.ok_or_else(|| {
            Error::OptimizationFailed(format!(
                "cond_max restart {restart} ({param}): every trial was rejected"
            ))
        })?;
        Ok(RestartResult {
            param,
            restart,
            start,
            kappa,
            cond,
            energy_drift,
            max_energy_drift: max_drift,
            evaluations,
            rejected,
            theta,
        })
    }
}

pub fn run(settings: &Settings) -> Result<CondMaxReport> {
    let system = settings.system.build()?;
    let program = match settings.ansatz {
        AnsatzChoice::Tups => AnsatzProgram::tups(&system.sector, system.n_occ(), settings.layers)?,
        AnsatzChoice::Uccsd => AnsatzProgram::uccsd(&system.sector, system.n_occ())?,
    };
    let cfg = &settings.cond_max;
    let opts = GroundStateOptions {
        tol: cfg.energy_tol,
        ..GroundStateOptions::default()
    };
    let base = system.solve_at(&system.zero_kappa(), Some(&program), &opts, None)?;
    let g = build_excitation_basis(&system.sector, system.reference())?;

    let grid = uniform(
        -std::f64::consts::PI,
        std::f64::consts::PI,
        cfg.redundancy_points,
    );
    let redundancy: Vec<RedundancyReport> = system
        .zero_kappa()
        .pairs()
        .into_iter()
        .map(|pq| check_kappa_redundancy(&program, &system.mo, pq, &grid, &base.ground, &opts))
        .collect::<Result<_>>()?;
    let redundant_pairs: Vec<(usize, usize)> = redundancy
        .iter()
        .filter(|r| r.redundant)
        .map(|r| (r.p, r.q))
        .collect();
    if redundant_pairs.is_empty() {
        return Err(Error::Precondition(
            "no orbital rotation is redundant for this ansatz".into(),
        ));
    }

    let params = settings.parameterizations();
    let cond_before = params
        .iter()
        .map(|&p| Ok((p, metric_condition(p, &base.ground, &g)?)))
        .collect::<Result<Vec<_>>>()?;

    let search = Search {
        system: &system,
        program: &program,
        g: &g,
        pairs: &redundant_pairs,
        opts,
        cfg,
        baseline_theta: &base.ground.theta,
    };
    let m = redundant_pairs.len();
    let jobs: Vec<(Parameterization, usize, Vec<f64>)> = params
        .iter()
        .enumerate()
        .flat_map(|(ip, &param)| {
            (0..cfg.restarts).map(move |r| {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
                    settings.seed,
                    &[START_STREAM, ip as u64, r as u64],
                ));
                let start = (0..m)
                    .map(|_| {
                        if r == 0 {
                            0.0
                        } else {
                            rng.random_range(-1.0..1.0) * std::f64::consts::FRAC_PI_2
                        }
                    })
                    .collect();
                (param, r, start)
            })
        })
        .collect();
    let restarts = jobs
        .into_par_iter()
        .map(|(param, r, start)| search.restart(param, r, start))
        .collect::<Result<Vec<_>>>()?;

    Ok(CondMaxReport {
        system: system.name.clone(),
        baseline_energy: base.ground.energy,
        fci_energy: base.fci.e0,
        redundancy,
        redundant_pairs,
        cond_before,
        restarts,
    })
}
