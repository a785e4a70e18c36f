use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ansatz::program::AnsatzProgram;
use crate::error::{Error, Result};
use crate::fockspace::{FciSolution, OperatorMatrix};
use crate::optim::{bfgs, nelder_mead, BfgsOptions, NelderMeadOptions, OptimResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Optimizer {
    /// BFGS on analytic gradients followed by a few Newton polish steps.
    Bfgs,
    NelderMead,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundStateOptions {
    pub optimizer: Optimizer,
    /// Extra starts from randomly perturbed best parameters.
    pub restarts: usize,
    /// Allowed gap to the target energy when one is supplied.
    pub tol: f64,
    /// Half-width of the uniform restart perturbation (radians).
    pub perturbation: f64,
    pub seed: u64,
    pub bfgs: BfgsOptions,
    pub nelder_mead: NelderMeadOptions,
}

impl Default for GroundStateOptions {
    fn default() -> Self {
        Self {
            optimizer: Optimizer::Bfgs,
            restarts: 8,
            tol: 1e-9,
            perturbation: 1.0,
            seed: 0x5eed,
            bfgs: BfgsOptions::default(),
            nelder_mead: NelderMeadOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerTrace {
    pub iterations: usize,
    pub evaluations: usize,
    pub starts: usize,
    /// `‖∇E‖∞` at the optimum (NaN for derivative-free runs).
    pub grad_norm: f64,
}

/// Variational ground state `|0⟩ = U(θ*)|CSF⟩`, or a state taken directly from FCI.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub state: DVector<f64>,
    pub energy: f64,
    pub theta: Vec<f64>,
    pub program: Option<AnsatzProgram>,
    pub trace: OptimizerTrace,
}

impl GroundState {
    /// Wraps an FCI ground state. There is no state-preparation unitary.
    pub fn from_fci(fci: &FciSolution) -> Self {
        Self {
            state: fci.ground.clone(),
            energy: fci.e0,
            theta: Vec::new(),
            program: None,
            trace: OptimizerTrace {
                iterations: 0,
                evaluations: 0,
                starts: 0,
                grad_norm: 0.0,
            },
        }
    }

    /// Dense `U(θ*)`; `None` for FCI-derived states.
    pub fn unitary(&self) -> Option<DMatrix<f64>> {
        self.program
            .as_ref()
            .and_then(|p| p.unitary(&self.theta).ok())
    }
}

fn run_once(
    program: &AnsatzProgram,
    h: &DMatrix<f64>,
    x0: &[f64],
    opts: &GroundStateOptions,
) -> OptimResult {
    match opts.optimizer {
        Optimizer::Bfgs => bfgs(
            |x| program.energy_and_gradient(h, x).expect("length checked"),
            x0,
            &opts.bfgs,
        ),
        Optimizer::NelderMead => nelder_mead(
            |x| program.energy(h, x).expect("length checked"),
            x0,
            &opts.nelder_mead,
        ),
    }
}

/// Minimizes `⟨ψ(θ)|H|ψ(θ)⟩` starting from `θ = 0`.
///
/// With `target = Some(E_fci)`, restarts stop as soon as the target is met
/// within `tol`, and missing it after all restarts is an error.
pub fn optimize_ground_state(
    program: &AnsatzProgram,
    h: &OperatorMatrix,
    options: &GroundStateOptions,
    target: Option<f64>,
) -> Result<GroundState> {
    optimize_ground_state_from(program, h, &vec![0.0; program.n_params()], options, target)
}

/// Same as [`optimize_ground_state`] from a given starting point.
pub fn optimize_ground_state_from(
    program: &AnsatzProgram,
    h: &OperatorMatrix,
    theta0: &[f64],
    options: &GroundStateOptions,
    target: Option<f64>,
) -> Result<GroundState> {
    if !std::sync::Arc::ptr_eq(program.basis(), h.basis()) && **program.basis() != **h.basis() {
        return Err(Error::DimensionMismatch(
            "program and Hamiltonian use different bases".into(),
        ));
    }
    if theta0.len() != program.n_params() {
        return Err(Error::DimensionMismatch(format!(
            "{} starting parameters for {} slots",
            theta0.len(),
            program.n_params()
        )));
    }
    let hm = h.matrix();
    let met = |e: f64| target.is_some_and(|t| e - t <= options.tol);
    let mut best = run_once(program, hm, theta0, options);
    let mut iterations = best.iterations;
    let mut evaluations = best.evaluations;
    let mut starts = 1;
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    if program.n_params() > 0 {
        for _ in 0..options.restarts {
            if met(best.f) {
                break;
            }
            let x0: Vec<f64> = best
                .x
                .iter()
                .map(|v| v + rng.random_range(-options.perturbation..=options.perturbation))
                .collect();
            let r = run_once(program, hm, &x0, options);
            iterations += r.iterations;
            evaluations += r.evaluations;
            starts += 1;
            if r.f < best.f {
                best = r;
            }
        }
    }
    if let Some(t) = target {
        if best.f - t > options.tol {
            return Err(Error::OptimizationFailed(format!(
                "ansatz energy {:.12} misses the target {t:.12} by {:.3e} after {starts} starts",
                best.f,
                best.f - t
            )));
        }
    }
    let state = program.state(&best.x)?;
    let energy = state.dot(&(hm * &state));
    Ok(GroundState {
        state,
        energy,
        theta: best.x,
        program: Some(program.clone()),
        trace: OptimizerTrace {
            iterations,
            evaluations,
            starts,
            grad_norm: best.grad_norm,
        },
    })
}
