//! Noiseless and shot-noise absorption spectra in HF or adversarial orbitals.

use std::path::Path;

use rayon::prelude::*;

use crate::ansatz::{AnsatzProgram, GroundState, GroundStateOptions};
use crate::error::{Error, Result};
use crate::labcli::cond_max::constrained_ground_state;
use crate::labcli::config::{AnsatzChoice, OrbitalChoice, Settings};
use crate::labcli::output::{flag, int, num, opt, read_table, Table};
use crate::orbrot::KappaParams;
use crate::response::{
    broaden, build_excitation_basis, build_response_matrices, compute_spectrum, dipole_operators,
    fci_oscillator_strengths, solve_response, Broadening, Parameterization, PropertyGradient,
    ResponseSolution, Stick,
};
use crate::sampler::{NoisyResponseModel, ShotPlan, REAL_ROOT_TOL};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumStick {
    pub omega: f64,
    pub imag: f64,
    pub strength: Option<f64>,
    /// Real root with a positive metric norm.
    pub physical: bool,
}

#[derive(Debug, Clone)]
pub struct SpectrumRun {
    /// `None` for the noiseless reference.
    pub repetition: Option<usize>,
    pub sticks: Vec<SpectrumStick>,
    pub intensities: Vec<f64>,
    pub peak: Option<(f64, f64)>,
}

impl SpectrumRun {
    pub fn peak_omega(&self) -> Option<f64> {
        self.peak.map(|p| p.0)
    }

    pub fn has_physical(&self) -> bool {
        self.sticks.iter().any(|s| s.physical)
    }
}

#[derive(Debug, Clone)]
pub struct ParamSpectra {
    pub param: Parameterization,
    pub kappa: KappaParams,
    pub energy_drift: f64,
    pub noiseless: SpectrumRun,
    pub noisy: Vec<SpectrumRun>,
    /// FCI transitions `(ω, f)` in the same orbitals.
    pub fci: Vec<(f64, f64)>,
}

impl ParamSpectra {
    pub fn noisy_peaks(&self) -> Vec<f64> {
        self.noisy.iter().filter_map(|r| r.peak_omega()).collect()
    }

    /// `max − min` of the noisy peak positions.
    pub fn peak_spread(&self) -> Option<f64> {
        let p = self.noisy_peaks();
        if p.is_empty() {
            return None;
        }
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some(hi - lo)
    }

    /// Largest `|peak_noisy − peak_noiseless|`.
    pub fn max_peak_deviation(&self) -> Option<f64> {
        let reference = self.noiseless.peak_omega()?;
        self.noisy
            .iter()
            .map(|r| r.peak_omega().map(|p| (p - reference).abs()))
            .try_fold(0.0f64, |acc, d| d.map(|d| acc.max(d)))
    }
}

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub orbitals: String,
    pub energies: Vec<f64>,
    pub spectra: Vec<ParamSpectra>,
}

impl SpectrumReport {
    pub fn get(&self, param: Parameterization) -> Option<&ParamSpectra> {
        self.spectra.iter().find(|s| s.param == param)
    }

    /// `(param, repetition)` pairs without any physical solution.
    pub fn empty_repetitions(&self) -> Vec<(Parameterization, usize)> {
        self.spectra
            .iter()
            .flat_map(|s| {
                s.noisy
                    .iter()
                    .filter(|r| !r.has_physical())
                    .filter_map(move |r| r.repetition.map(|rep| (s.param, rep)))
            })
            .collect()
    }

    pub fn tables(&self) -> Vec<Table> {
        let mut st = Table::new(
            "sticks.csv",
            &[
                "param",
                "source",
                "repetition",
                "omega",
                "imag",
                "strength",
                "physical",
            ],
        );
        let mut br = Table::new(
            "broadened.csv",
            &["param", "source", "repetition", "energy", "intensity"],
        );
        let mut pk = Table::new(
            "peaks.csv",
            &[
                "param",
                "source",
                "repetition",
                "peak_omega",
                "peak_intensity",
                "n_physical",
            ],
        );
        for s in &self.spectra {
            let param = s.param.to_string();
            for &(w, f) in &s.fci {
                st.push(vec![
                    param.clone(),
                    "fci".into(),
                    String::new(),
                    num(w),
                    num(0.0),
                    num(f),
                    flag(true),
                ]);
            }
            for run in std::iter::once(&s.noiseless).chain(&s.noisy) {
                let (source, rep) = match run.repetition {
                    None => ("noiseless", String::new()),
                    Some(r) => ("noisy", int(r)),
                };
                for k in &run.sticks {
                    st.push(vec![
                        param.clone(),
                        source.into(),
                        rep.clone(),
                        num(k.omega),
                        num(k.imag),
                        opt(k.strength),
                        flag(k.physical),
                    ]);
                }
                for (e, i) in self.energies.iter().zip(&run.intensities) {
                    br.push(vec![
                        param.clone(),
                        source.into(),
                        rep.clone(),
                        num(*e),
                        num(*i),
                    ]);
                }
                pk.push(vec![
                    param.clone(),
                    source.into(),
                    rep.clone(),
                    opt(run.peak.map(|p| p.0)),
                    opt(run.peak.map(|p| p.1)),
                    int(run.sticks.iter().filter(|k| k.physical).count()),
                ]);
            }
        }
        vec![st, br, pk]
    }
}

/// Position and height of the broadened maximum, refined by a parabola through its neighbours.
pub fn peak_position(energies: &[f64], intensities: &[f64]) -> Option<(f64, f64)> {
    let (i, &top) = intensities
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))?;
    // also rejects NaN
    if top.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return None;
    }
    if i == 0 || i + 1 >= intensities.len() {
        return Some((energies[i], top));
    }
    let (y0, y1, y2) = (intensities[i - 1], top, intensities[i + 1]);
    let denom = y0 - 2.0 * y1 + y2;
    if denom >= 0.0 {
        return Some((energies[i], top));
    }
    let h = energies[i + 1] - energies[i];
    let t = 0.5 * (y0 - y2) / denom;
    Some((energies[i] + t * h, y1 - 0.25 * (y0 - y2) * t))
}

fn run_from(
    sol: &ResponseSolution,
    pg: &PropertyGradient,
    broadening: &Broadening,
    energies: &[f64],
    repetition: Option<usize>,
) -> Result<SpectrumRun> {
    let data = compute_spectrum(sol, pg, broadening, true)?;
    let sticks: Vec<SpectrumStick> = data
        .sticks
        .iter()
        .zip(&sol.imag)
        .map(|(s, &im)| SpectrumStick {
            omega: s.omega,
            imag: im,
            strength: s.strength,
            physical: s.strength.is_some() && im.abs() <= REAL_ROOT_TOL * s.omega.abs().max(1.0),
        })
        .collect();
    let physical: Vec<Stick> = data
        .sticks
        .iter()
        .zip(&sticks)
        .filter(|(_, k)| k.physical)
        .map(|(s, _)| *s)
        .collect();
    let (_, intensities) = broaden(&physical, broadening);
    let peak = peak_position(energies, &intensities);
    Ok(SpectrumRun {
        repetition,
        sticks,
        intensities,
        peak,
    })
}

fn empty_run(repetition: usize, n_points: usize) -> SpectrumRun {
    SpectrumRun {
        repetition: Some(repetition),
        sticks: Vec::new(),
        intensities: vec![0.0; n_points],
        peak: None,
    }
}

/// Reads the per-parameterization κ written by `cond_max` (`kappa_div.csv`).
pub fn read_kappa_div(path: &Path, param: Parameterization, n_mo: usize) -> Result<KappaParams> {
    let t = read_table(path)?;
    let col = |name: &str| {
        t.column(name)
            .ok_or_else(|| Error::Config(format!("{} lacks a '{name}' column", path.display())))
    };
    let (cp, ip, iq, ik) = (col("param")?, col("p")?, col("q")?, col("kappa")?);
    let mut k = KappaParams::zeros(n_mo);
    let mut found = false;
    for row in &t.rows {
        if row[cp].parse::<Parameterization>()? != param {
            continue;
        }
        let parse_usize = |s: &str| {
            s.parse::<usize>().map_err(|_| {
                Error::Config(format!("bad orbital index '{s}' in {}", path.display()))
            })
        };
        let v: f64 = row[ik]
            .parse()
            .map_err(|_| Error::Config(format!("bad kappa '{}' in {}", row[ik], path.display())))?;
        k.set(parse_usize(&row[ip])?, parse_usize(&row[iq])?, v)?;
        found = true;
    }
    if !found {
        return Err(Error::Config(format!(
            "{} has no rows for {param}",
            path.display()
        )));
    }
    Ok(k)
}

pub fn run(settings: &Settings) -> Result<SpectrumReport> {
    let system = settings.system.build()?;
    let program = match settings.ansatz {
        AnsatzChoice::Tups => AnsatzProgram::tups(&system.sector, system.n_occ(), settings.layers)?,
        AnsatzChoice::Uccsd => AnsatzProgram::uccsd(&system.sector, system.n_occ())?,
    };
    let opts = GroundStateOptions {
        tol: settings.cond_max.energy_tol,
        ..GroundStateOptions::default()
    };
    let base = system.solve_at(&system.zero_kappa(), Some(&program), &opts, None)?;
    let g = build_excitation_basis(&system.sector, system.reference())?;
    let sp = &settings.spectrum;
    let broadening = Broadening {
        fwhm: sp.fwhm,
        e_min: sp.e_min,
        e_max: sp.e_max,
        n_points: sp.n_points,
    };
    let (energies, _) = broaden(&[], &broadening);
    let plan = ShotPlan::new(
        settings.shots.shots,
        settings.shots.repetitions,
        settings.seed,
    )?;

    let mut spectra = Vec::new();
    for (ip, param) in settings.parameterizations().into_iter().enumerate() {
        let kappa = match &sp.orbitals {
            OrbitalChoice::Hf => system.zero_kappa(),
            OrbitalChoice::KappaDiv(path) => read_kappa_div(path, param, system.n_mo())?,
        };
        // walk from κ = 0 so the ansatz stays on the ground-state branch
        let (ground, drift): (GroundState, f64) = if kappa.values().iter().all(|v| *v == 0.0) {
            let drift = base.ground.energy - base.fci.e0;
            (base.ground.clone(), drift)
        } else {
            let steps = sp.homotopy_steps.max(1);
            let mut theta = base.ground.theta.clone();
            let mut last = None;
            for s in 1..=steps {
                let scaled: Vec<f64> = kappa
                    .values()
                    .iter()
                    .map(|v| v * s as f64 / steps as f64)
                    .collect();
                let ks = KappaParams::from_values(system.n_mo(), &scaled)?;
                let (gs, drift) = constrained_ground_state(&system, &program, &ks, &theta, &opts)?;
                theta.clone_from(&gs.theta);
                last = Some((gs, drift));
            }
            last.expect("at least one step")
        };
        if drift.abs() > settings.cond_max.reject_tol {
            return Err(Error::OptimizationFailed(format!(
                "{param} ground state misses the FCI energy by {drift:e} in the requested orbitals"
            )));
        }
        let point_mo = system.rotated_integrals(&kappa)?;
        let h = crate::fockspace::build_hamiltonian(&point_mo, &system.sector)?;
        let fci = crate::fockspace::fci_solve(&h)?;
        let dipole = dipole_operators(&point_mo, &system.sector)?;

        let rm = build_response_matrices(param, &ground, &h, &g)?;
        let sol = solve_response(&rm, &settings.solver.options())?;
        let pg = PropertyGradient::exact(param, &ground, &g, &dipole)?;
        let noiseless = run_from(&sol, &pg, &broadening, &energies, None)?;

        let model = NoisyResponseModel::new(param, &ground, &point_mo, &g)?;
        let noisy = (0..plan.repetitions)
            .into_par_iter()
            .map(|rep| {
                let (rm, pg) = if settings.shots.zero_noise {
                    model.exact()?
                } else {
                    model.sample(&plan, ip as u64, rep)?
                };
                if !rm.is_finite() {
                    return Ok(empty_run(rep, energies.len()));
                }
                match solve_response(&rm, &settings.solver.options()) {
                    Ok(sol) => run_from(&sol, &pg, &broadening, &energies, Some(rep)),
                    Err(Error::Linalg(_)) => Ok(empty_run(rep, energies.len())),
                    Err(e) => Err(e),
                }
            })
            .collect::<Result<Vec<_>>>()?;

        spectra.push(ParamSpectra {
            param,
            kappa,
            energy_drift: drift,
            noiseless,
            noisy,
            fci: fci_oscillator_strengths(&fci, &dipole),
        });
    }
    Ok(SpectrumReport {
        orbitals: match &sp.orbitals {
            OrbitalChoice::Hf => "hf".into(),
            OrbitalChoice::KappaDiv(_) => "kappa_div".into(),
        },
        energies,
        spectra,
    })
}
