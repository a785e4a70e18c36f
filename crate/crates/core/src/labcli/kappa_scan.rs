//! Redundant-rotation scan of a two-electron, two-orbital system.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::ansatz::{AnsatzProgram, GroundState, GroundStateOptions};
use crate::error::{Error, Result};
use crate::fockspace::TwoInTwoCoefficients;
use crate::labcli::config::{AnsatzChoice, Settings};
use crate::labcli::output::{flag, num, opt, Table};
use crate::labcli::roots::{bisect, golden_min, sign_changes};
use crate::linalg::max_abs;
use crate::orbrot::KappaParams;
use crate::response::{
    analytic_metric_det_2in2, build_excitation_basis, build_response_matrices, response_operators,
    solve_response, ExcitationOperatorSet, Parameterization, SolveOptions,
};
use crate::systems::System;

/// Bracket width for the CI-condition roots.
pub const ROOT_TOL: f64 = 1e-10;
/// Bracket width for the determinant minimum search.
pub const DET_ROOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct ParamPoint {
    pub param: Parameterization,
    /// Lowest ω, `None` when the metric is flagged or no positive root exists.
    pub omega: Option<f64>,
    pub flagged: bool,
    pub det_sigma: f64,
    pub det_analytic: f64,
    pub cond_sigma: f64,
    /// `max |Σ − I|`.
    pub sigma_identity_dev: f64,
    pub det_s2: f64,
}

#[derive(Debug, Clone)]
pub struct KappaRow {
    pub kappa: f64,
    pub energy: f64,
    /// FCI coefficients with the sign made continuous along the grid.
    pub coeffs: TwoInTwoCoefficients,
    /// The FCI ground level was degenerate at this κ.
    pub degenerate: bool,
    pub points: Vec<ParamPoint>,
}

#[derive(Debug, Clone)]
pub struct SingularPoint {
    pub param: Parameterization,
    pub condition: &'static str,
    pub bracket: (f64, f64),
    /// Midpoint of the bisected CI-condition bracket.
    pub kappa_root: f64,
    pub root_bracket: (f64, f64),
    /// Minimizer of `|det Σ|` inside the grid bracket.
    pub kappa_det_root: f64,
    pub det_at_root: f64,
}

impl SingularPoint {
    pub fn gap(&self) -> f64 {
        (self.kappa_root - self.kappa_det_root).abs()
    }
}

#[derive(Debug, Clone)]
pub struct KappaScanReport {
    pub system: String,
    pub pair: (usize, usize),
    pub rows: Vec<KappaRow>,
    pub singular: Vec<SingularPoint>,
}

impl KappaScanReport {
    pub fn singular_for(&self, param: Parameterization) -> Vec<&SingularPoint> {
        self.singular.iter().filter(|s| s.param == param).collect()
    }

    /// `(κ, point)` for one parameterization along the grid.
    pub fn series(&self, param: Parameterization) -> Vec<(f64, &ParamPoint)> {
        self.rows
            .iter()
            .filter_map(|r| {
                r.points
                    .iter()
                    .find(|p| p.param == param)
                    .map(|p| (r.kappa, p))
            })
            .collect()
    }

    pub fn tables(&self) -> Vec<Table> {
        let mut ci = Table::new(
            "ci_coeffs.csv",
            &["kappa", "c_1100", "c_s", "c_0011", "energy", "degenerate"],
        );
        let mut om = Table::new(
            "omega_vs_kappa.csv",
            &["kappa", "param", "omega", "flagged", "cond_sigma"],
        );
        let mut det = Table::new(
            "det_sigma.csv",
            &[
                "kappa",
                "param",
                "det_sigma",
                "det_sigma_analytic",
                "cond_sigma",
                "sigma_minus_identity",
                "det_s2",
                "flagged",
            ],
        );
        for r in &self.rows {
            let c = &r.coeffs;
            ci.push(vec![
                num(r.kappa),
                num(c.c_1100),
                num(c.c_s),
                num(c.c_0011),
                num(r.energy),
                flag(r.degenerate),
            ]);
            for p in &r.points {
                om.push(vec![
                    num(r.kappa),
                    p.param.to_string(),
                    opt(p.omega),
                    flag(p.flagged),
                    num(p.cond_sigma),
                ]);
                det.push(vec![
                    num(r.kappa),
                    p.param.to_string(),
                    num(p.det_sigma),
                    num(p.det_analytic),
                    num(p.cond_sigma),
                    num(p.sigma_identity_dev),
                    num(p.det_s2),
                    flag(p.flagged),
                ]);
            }
        }
        let mut sp = Table::new(
            "singular_points.csv",
            &[
                "param",
                "condition",
                "grid_lo",
                "grid_hi",
                "kappa_root",
                "root_lo",
                "root_hi",
                "kappa_det_root",
                "det_at_root",
                "root_gap",
            ],
        );
        for s in &self.singular {
            sp.push(vec![
                s.param.to_string(),
                s.condition.to_string(),
                num(s.bracket.0),
                num(s.bracket.1),
                num(s.kappa_root),
                num(s.root_bracket.0),
                num(s.root_bracket.1),
                num(s.kappa_det_root),
                num(s.det_at_root),
                num(s.gap()),
            ]);
        }
        vec![ci, om, det, sp]
    }
}

struct Scan<'a> {
    system: &'a System,
    g: ExcitationOperatorSet,
    program: Option<AnsatzProgram>,
    pair: (usize, usize),
    solve: SolveOptions,
    ground_opts: GroundStateOptions,
}

impl Scan<'_> {
    fn kappa(&self, k: f64) -> Result<KappaParams> {
        KappaParams::single(self.system.n_mo(), self.pair.0, self.pair.1, k)
    }

    fn fci_state(&self, k: f64) -> Result<(f64, DVector<f64>, crate::fockspace::OperatorMatrix)> {
        let point = self
            .system
            .solve_at(&self.kappa(k)?, None, &self.ground_opts, None)?;
        Ok((point.fci.e0, point.fci.ground, point.h))
    }

    fn coeffs(&self, psi: &DVector<f64>) -> TwoInTwoCoefficients {
        TwoInTwoCoefficients::from_state(&self.system.sector, psi).expect("2-in-2 sector checked")
    }

    fn det_sigma(&self, param: Parameterization, k: f64) -> Result<f64> {
        let point = self
            .system
            .solve_at(&self.kappa(k)?, None, &self.ground_opts, None)?;
        let gs = GroundState::from_fci(&point.fci);
        Ok(build_response_matrices(param, &gs, &point.h, &self.g)?
            .sigma
            .determinant())
    }

    /// Function whose minimum is the determinant root and which grows linearly away from it.
    ///
    /// The naive root is double, so `√|det Σ|` is used. The projected metric
    /// is the Gram matrix of the vectors `R_J|0⟩` (since `R_J†|0⟩ = 0`) and its
    /// root is quartic; `det Σ = ∏ r_ii²` from a QR factorization of those
    /// vectors keeps full relative accuracy where `Σ.determinant()` cancels.
    fn det_root_objective(&self, param: Parameterization, k: f64) -> Result<f64> {
        match param {
            Parameterization::Proj => {
                let point = self
                    .system
                    .solve_at(&self.kappa(k)?, None, &self.ground_opts, None)?;
                let gs = GroundState::from_fci(&point.fci);
                let r = response_operators(param, &gs, &self.g)?;
                let cols: Vec<DVector<f64>> = r.iter().map(|m| m * &gs.state).collect();
                let x = DMatrix::from_columns(&cols);
                let prod: f64 = x.qr().r().diagonal().iter().product();
                Ok(prod.abs().sqrt())
            }
            _ => Ok(self.det_sigma(param, k)?.abs().sqrt()),
        }
    }

    fn row(&self, k: f64, params: &[Parameterization]) -> Result<RawRow> {
        let kp = self.kappa(k)?;
        let fci_point = self.system.solve_at(&kp, None, &self.ground_opts, None)?;
        let fci_gs = GroundState::from_fci(&fci_point.fci);
        let mut ansatz_gs: Option<GroundState> = None;
        let mut points = Vec::new();
        for &param in params {
            let gs = if param.needs_unitary() {
                if ansatz_gs.is_none() {
                    let program = self.program.as_ref().expect("program built for sc/st");
                    let p = self
                        .system
                        .solve_at(&kp, Some(program), &self.ground_opts, None)?;
                    ansatz_gs = Some(p.ground);
                }
                ansatz_gs.as_ref().expect("just set")
            } else {
                &fci_gs
            };
            let rm = build_response_matrices(param, gs, &fci_point.h, &self.g)?;
            let sol = solve_response(&rm, &self.solve)?;
            let d = &sol.diagnostics;
            let n = rm.n();
            let gc = self.coeffs(&gs.state);
            points.push(ParamPoint {
                param,
                omega: if d.singular { None } else { sol.lowest() },
                flagged: d.singular,
                det_sigma: d.det_sigma,
                det_analytic: analytic_metric_det_2in2(param, gc.c_1100, gc.c_s, gc.c_0011)?,
                cond_sigma: d.cond_sigma,
                sigma_identity_dev: max_abs(&(&rm.sigma - DMatrix::<f64>::identity(n, n))),
                det_s2: d.det_s2,
            });
        }
        let degenerate = fci_point.fci.is_degenerate();
        Ok((fci_point.fci.e0, fci_point.fci.ground, degenerate, points))
    }

    fn det_root(&self, param: Parameterization, lo: f64, hi: f64) -> Result<(f64, f64)> {
        let mut err = None;
        let x = golden_min(
            |k| match self.det_root_objective(param, k) {
                Ok(v) => v,
                Err(e) => {
                    err.get_or_insert(e);
                    f64::INFINITY
                }
            },
            lo,
            hi,
            DET_ROOT_TOL,
        );
        if let Some(e) = err {
            return Err(e);
        }
        Ok((x, self.det_sigma(param, x)?))
    }
}

/// Energy, ground state, degeneracy flag and per-parameterization points at one κ.
type RawRow = (f64, DVector<f64>, bool, Vec<ParamPoint>);

pub fn run(settings: &Settings) -> Result<KappaScanReport> {
    let system = settings.system.build()?;
    if system.n_mo() != 2 || system.molecule.n_electrons() != 2 {
        return Err(Error::Scope(format!(
            "kappa_scan needs a two-electron, two-orbital system; {} has {} electrons in {} orbitals",
            system.name,
            system.molecule.n_electrons(),
            system.n_mo()
        )));
    }
    let params = settings.parameterizations();
    let pair = (settings.kappa.pair[0], settings.kappa.pair[1]);
    system.zero_kappa().index_of(pair.0, pair.1)?;
    let program = if params.iter().any(|p| p.needs_unitary()) {
        Some(match settings.ansatz {
            AnsatzChoice::Tups => {
                AnsatzProgram::tups(&system.sector, system.n_occ(), settings.layers)?
            }
            AnsatzChoice::Uccsd => AnsatzProgram::uccsd(&system.sector, system.n_occ())?,
        })
    } else {
        None
    };
    let scan = Scan {
        g: build_excitation_basis(&system.sector, system.reference())?,
        system: &system,
        program,
        pair,
        solve: settings.solver.options(),
        ground_opts: GroundStateOptions::default(),
    };

    let grid = settings.kappa.values();
    let computed: Vec<Result<RawRow>> = grid.par_iter().map(|&k| scan.row(k, &params)).collect();
    let mut rows = Vec::with_capacity(grid.len());
    let mut aligned: Vec<DVector<f64>> = Vec::with_capacity(grid.len());
    for (&k, r) in grid.iter().zip(computed) {
        let (energy, mut psi, degenerate, points) = r?;
        if let Some(prev) = aligned.last() {
            if psi.dot(prev) < 0.0 {
                psi.neg_mut();
            }
        }
        rows.push(KappaRow {
            kappa: k,
            energy,
            coeffs: scan.coeffs(&psi),
            degenerate,
            points,
        });
        aligned.push(psi);
    }

    let mut singular = Vec::new();
    for &param in &params {
        let (condition, values): (&'static str, Vec<f64>) = match param {
            Parameterization::Naive => (
                "|c_1100| = |c_0011|",
                rows.iter()
                    .map(|r| r.coeffs.c_1100.powi(2) - r.coeffs.c_0011.powi(2))
                    .collect(),
            ),
            Parameterization::Proj => {
                ("c_1100 = 0", rows.iter().map(|r| r.coeffs.c_1100).collect())
            }
            _ => continue,
        };
        let found: Vec<Result<SingularPoint>> = sign_changes(&values)
            .into_par_iter()
            .map(|i| {
                let (lo, hi) = (grid[i], grid[i + 1]);
                let left = &aligned[i];
                let mut err = None;
                let mut f = |k: f64| -> f64 {
                    let psi = match scan.fci_state(k) {
                        Ok((_, mut psi, _)) => {
                            if psi.dot(left) < 0.0 {
                                psi.neg_mut();
                            }
                            psi
                        }
                        Err(e) => {
                            err.get_or_insert(e);
                            return f64::NAN;
                        }
                    };
                    let c = scan.coeffs(&psi);
                    match param {
                        Parameterization::Naive => c.c_1100.powi(2) - c.c_0011.powi(2),
                        _ => c.c_1100,
                    }
                };
                let root_bracket = bisect(&mut f, lo, hi, ROOT_TOL);
                if let Some(e) = err {
                    return Err(e);
                }
                let (kappa_det_root, det_at_root) = scan.det_root(param, lo, hi)?;
                Ok(SingularPoint {
                    param,
                    condition,
                    bracket: (lo, hi),
                    kappa_root: 0.5 * (root_bracket.0 + root_bracket.1),
                    root_bracket,
                    kappa_det_root,
                    det_at_root,
                })
            })
            .collect();
        for s in found {
            singular.push(s?);
        }
    }

    Ok(KappaScanReport {
        system: system.name.clone(),
        pair,
        rows,
        singular,
    })
}
