//! H₂ bond-stretching scan with HF orbitals.

use rayon::prelude::*;

use crate::ansatz::{AnsatzProgram, GroundState, GroundStateOptions};
use crate::error::Result;
use crate::fockspace::TwoInTwoCoefficients;
use crate::labcli::config::{AnsatzChoice, Settings, SystemSettings};
use crate::labcli::output::{flag, num, opt, Table};
use crate::molint::BOHR_PER_ANGSTROM;
use crate::response::{
    build_excitation_basis, build_response_matrices, solve_response, Parameterization,
};

#[derive(Debug, Clone)]
pub struct OmegaPoint {
    pub param: Parameterization,
    /// Lowest ω, `None` when flagged.
    pub omega: Option<f64>,
    pub flagged: bool,
    pub cond_sigma: f64,
    pub det_sigma: f64,
    pub det_s2: f64,
    pub max_imag: f64,
}

#[derive(Debug, Clone)]
pub struct DistancePoint {
    pub r_angstrom: f64,
    pub coeffs: TwoInTwoCoefficients,
    pub e_fci: f64,
    pub e_scf: f64,
    /// The FCI ground level was degenerate at this distance.
    pub degenerate: bool,
    pub omegas: Vec<OmegaPoint>,
}

impl DistancePoint {
    pub fn r_bohr(&self) -> f64 {
        self.r_angstrom * BOHR_PER_ANGSTROM
    }

    pub fn get(&self, param: Parameterization) -> Option<&OmegaPoint> {
        self.omegas.iter().find(|o| o.param == param)
    }
}

#[derive(Debug, Clone)]
pub struct DissociationReport {
    pub points: Vec<DistancePoint>,
}

impl DissociationReport {
    /// Smallest distance whose `param` solution is flagged.
    pub fn first_flagged(&self, param: Parameterization) -> Option<f64> {
        self.points
            .iter()
            .find(|p| p.get(param).is_some_and(|o| o.flagged))
            .map(|p| p.r_angstrom)
    }

    pub fn tables(&self) -> Vec<Table> {
        let mut co = Table::new(
            "coeffs_vs_R.csv",
            &[
                "r_angstrom",
                "r_bohr",
                "c_1100",
                "c_s",
                "c_0011",
                "e_scf",
                "e_fci",
                "det_sigma_naive",
                "degenerate",
            ],
        );
        let mut om = Table::new(
            "omega_vs_R.csv",
            &[
                "r_angstrom",
                "param",
                "omega",
                "flagged",
                "cond_sigma",
                "det_sigma",
                "det_s2",
                "max_imag",
            ],
        );
        for p in &self.points {
            let c = &p.coeffs;
            let det_naive = p.get(Parameterization::Naive).map(|o| o.det_sigma);
            co.push(vec![
                num(p.r_angstrom),
                num(p.r_bohr()),
                num(c.c_1100),
                num(c.c_s),
                num(c.c_0011),
                num(p.e_scf),
                num(p.e_fci),
                opt(det_naive),
                flag(p.degenerate),
            ]);
            for o in &p.omegas {
                om.push(vec![
                    num(p.r_angstrom),
                    o.param.to_string(),
                    opt(o.omega),
                    flag(o.flagged),
                    num(o.cond_sigma),
                    num(o.det_sigma),
                    num(o.det_s2),
                    num(o.max_imag),
                ]);
            }
        }
        vec![co, om]
    }
}

pub fn run(settings: &Settings) -> Result<DissociationReport> {
    let params = settings.parameterizations();
    let ground_opts = GroundStateOptions::default();
    let solve = settings.solver.options();
    let points: Vec<Result<DistancePoint>> = settings
        .dissociation
        .distances()
        .into_par_iter()
        .map(|r| {
            let mut spec = SystemSettings::preset("h2", r, [1.0, 1.0])?;
            spec.basis = settings.dissociation.basis.clone();
            spec.charge = settings.system.charge;
            let system = spec.build()?;
            let g = build_excitation_basis(&system.sector, system.reference())?;
            let kappa = system.zero_kappa();
            let fci_point = system.solve_at(&kappa, None, &ground_opts, None)?;
            let fci_gs = GroundState::from_fci(&fci_point.fci);
            let coeffs = TwoInTwoCoefficients::from_state(&system.sector, &fci_point.fci.ground)
                .ok_or_else(|| {
                    crate::error::Error::Scope("dissociation expects a two-orbital H2 basis".into())
                })?;
            let mut ansatz_gs = None;
            let mut omegas = Vec::new();
            for &param in &params {
                let gs = if param.needs_unitary() {
                    if ansatz_gs.is_none() {
                        let program = match settings.ansatz {
                            AnsatzChoice::Uccsd => {
                                AnsatzProgram::uccsd(&system.sector, system.n_occ())?
                            }
                            AnsatzChoice::Tups => AnsatzProgram::tups(
                                &system.sector,
                                system.n_occ(),
                                settings.layers,
                            )?,
                        };
                        ansatz_gs = Some(
                            system
                                .solve_at(&kappa, Some(&program), &ground_opts, None)?
                                .ground,
                        );
                    }
                    ansatz_gs.as_ref().expect("just set")
                } else {
                    &fci_gs
                };
                let rm = build_response_matrices(param, gs, &fci_point.h, &g)?;
                let sol = solve_response(&rm, &solve)?;
                let d = sol.diagnostics;
                omegas.push(OmegaPoint {
                    param,
                    omega: if d.singular { None } else { sol.lowest() },
                    flagged: d.singular,
                    cond_sigma: d.cond_sigma,
                    det_sigma: d.det_sigma,
                    det_s2: d.det_s2,
                    max_imag: sol.max_imag,
                });
            }
            Ok(DistancePoint {
                r_angstrom: r,
                coeffs,
                e_fci: fci_point.fci.e0,
                e_scf: system.scf.e_hf,
                degenerate: fci_point.fci.is_degenerate(),
                omegas,
            })
        })
        .collect();
    Ok(DissociationReport {
        points: points.into_iter().collect::<Result<_>>()?,
    })
}
