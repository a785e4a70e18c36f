use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::molint::{Molecule, BOHR_PER_ANGSTROM};
use crate::response::{Parameterization, SolveOptions};
use crate::systems::System;

/// The five experiments the driver knows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    #[value(name = "kappa_scan")]
    KappaScan,
    #[value(name = "dissociation")]
    Dissociation,
    #[value(name = "noise_study")]
    NoiseStudy,
    #[value(name = "cond_max")]
    CondMax,
    #[value(name = "spectrum")]
    Spectrum,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::KappaScan => "kappa_scan",
            Self::Dissociation => "dissociation",
            Self::NoiseStudy => "noise_study",
            Self::CondMax => "cond_max",
            Self::Spectrum => "spectrum",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kappa_scan" => Ok(Self::KappaScan),
            "dissociation" => Ok(Self::Dissociation),
            "noise_study" => Ok(Self::NoiseStudy),
            "cond_max" => Ok(Self::CondMax),
            "spectrum" => Ok(Self::Spectrum),
            other => Err(Error::Config(format!("unknown experiment '{other}'"))),
        }
    }
}

// ---------------------------------------------------------------------------
// Raw file schema: every key optional, unknown keys rejected.

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub params: Option<Vec<String>>,
    #[serde(default)]
    pub system: RawSystem,
    #[serde(default)]
    pub ansatz: RawAnsatz,
    #[serde(default)]
    pub kappa: RawKappa,
    #[serde(default)]
    pub shots: RawShots,
    #[serde(default)]
    pub solver: RawSolver,
    #[serde(default)]
    pub dissociation: RawDissociation,
    #[serde(default)]
    pub cond_max: RawCondMax,
    #[serde(default)]
    pub spectrum: RawSpectrum,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAtom {
    pub element: String,
    /// Cartesian position in Ångström.
    pub xyz: [f64; 3],
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSystem {
    pub preset: Option<String>,
    pub basis: Option<String>,
    pub charge: Option<i32>,
    pub h2_distance: Option<f64>,
    pub h4_sides: Option<[f64; 2]>,
    pub atoms: Option<Vec<RawAtom>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAnsatz {
    pub kind: Option<String>,
    pub layers: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawKappa {
    pub pair: Option<[usize; 2]>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub points: Option<usize>,
    pub extra: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawShots {
    pub shots: Option<u64>,
    pub repetitions: Option<usize>,
    pub zero_noise: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSolver {
    pub singularity_threshold: Option<f64>,
    pub det_rel_tol: Option<f64>,
    pub regularize: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDissociation {
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub points: Option<usize>,
    pub extra: Option<Vec<f64>>,
    pub basis: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCondMax {
    pub restarts: Option<usize>,
    pub max_evals: Option<usize>,
    pub initial_step: Option<f64>,
    pub energy_tol: Option<f64>,
    pub reject_tol: Option<f64>,
    pub redundancy_points: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSpectrum {
    pub orbitals: Option<String>,
    pub kappa_div_file: Option<PathBuf>,
    pub fwhm: Option<f64>,
    pub e_min: Option<f64>,
    pub e_max: Option<f64>,
    pub n_points: Option<usize>,
    pub homotopy_steps: Option<usize>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }
}

// ---------------------------------------------------------------------------
// Resolved settings: defaults filled in per command, values validated.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AnsatzChoice {
    Tups,
    Uccsd,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemSettings {
    pub preset: String,
    pub basis: String,
    pub charge: i32,
    /// Element and position in Ångström.
    pub atoms: Vec<(String, [f64; 3])>,
}

impl SystemSettings {
    pub fn preset(preset: &str, h2_distance: f64, h4_sides: [f64; 2]) -> Result<Self> {
        let (basis, atoms) = match preset {
            "he" => ("6-31g", vec![("He".to_string(), [0.0; 3])]),
            "h2" => (
                "sto-3g",
                vec![
                    ("H".to_string(), [0.0; 3]),
                    ("H".to_string(), [0.0, 0.0, h2_distance]),
                ],
            ),
            "h4" => {
                let [a, b] = h4_sides;
                (
                    "sto-3g",
                    vec![
                        ("H".to_string(), [0.0, 0.0, 0.0]),
                        ("H".to_string(), [a, 0.0, 0.0]),
                        ("H".to_string(), [0.0, b, 0.0]),
                        ("H".to_string(), [a, b, 0.0]),
                    ],
                )
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown system preset '{other}' (he, h2, h4, custom)"
                )))
            }
        };
        Ok(Self {
            preset: preset.to_string(),
            basis: basis.to_string(),
            charge: 0,
            atoms,
        })
    }

    /// Runs SCF and builds the determinant sector.
    pub fn build(&self) -> Result<System> {
        let atoms: Vec<(&str, [f64; 3])> =
            self.atoms.iter().map(|(e, p)| (e.as_str(), *p)).collect();
        let mol = Molecule::from_angstrom(&atoms, self.charge)?;
        let name = format!("{}/{}", self.preset, self.basis);
        System::prepare(&name, mol, &self.basis)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaGrid {
    pub pair: [usize; 2],
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub extra: Vec<f64>,
}

impl KappaGrid {
    /// Uniform grid plus the extra values, sorted, duplicates removed.
    pub fn values(&self) -> Vec<f64> {
        let mut v = uniform(self.min, self.max, self.points);
        v.extend(&self.extra);
        v.sort_by(f64::total_cmp);
        v.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        v
    }
}

/// `points` evenly spaced values from `min` to `max` inclusive.
pub fn uniform(min: f64, max: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![min],
        n => (0..n)
            .map(|i| min + (max - min) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShotSettings {
    pub shots: u64,
    pub repetitions: usize,
    pub zero_noise: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DissociationSettings {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub extra: Vec<f64>,
    pub basis: String,
}

impl DissociationSettings {
    pub fn distances(&self) -> Vec<f64> {
        let mut v = uniform(self.min, self.max, self.points);
        v.extend(&self.extra);
        v.sort_by(f64::total_cmp);
        v.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CondMaxSettings {
    pub restarts: usize,
    pub max_evals: usize,
    pub initial_step: f64,
    pub energy_tol: f64,
    pub reject_tol: f64,
    pub redundancy_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitalChoice {
    Hf,
    KappaDiv(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumSettings {
    pub orbitals: OrbitalChoice,
    pub fwhm: f64,
    pub e_min: f64,
    pub e_max: f64,
    pub n_points: usize,
    pub homotopy_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverSettings {
    pub singularity_threshold: f64,
    pub det_rel_tol: f64,
    /// `eps` added to Σ before every solve; off unless requested.
    pub regularize: Option<f64>,
}

impl SolverSettings {
    pub fn options(&self) -> SolveOptions {
        SolveOptions {
            singularity_threshold: self.singularity_threshold,
            det_rel_tol: self.det_rel_tol,
            regularize: self.regularize,
            ..SolveOptions::default()
        }
    }
}

/// Fully resolved run description; its JSON form is hashed into every output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub command: Command,
    pub seed: u64,
    #[serde(skip)]
    pub out: PathBuf,
    pub params: Vec<String>,
    pub system: SystemSettings,
    pub ansatz: AnsatzChoice,
    pub layers: usize,
    pub kappa: KappaGrid,
    pub shots: ShotSettings,
    pub solver: SolverSettings,
    pub dissociation: DissociationSettings,
    pub cond_max: CondMaxSettings,
    pub spectrum: SpectrumSettings,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub shots: Option<u64>,
    pub reps: Option<usize>,
    pub param: Option<Parameterization>,
    pub regularize: Option<f64>,
}

pub const DEFAULT_SEED: u64 = 20_240_611;

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::Config(format!(
            "{name} must be a positive finite number, got {v}"
        )))
    }
}

fn finite(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Config(format!("{name} must be finite")))
    }
}

impl Settings {
    /// Resolves `cfg` for `command`, applying per-command defaults and `overrides`.
    pub fn resolve(
        command: Command,
        cfg: &ExperimentConfig,
        overrides: &Overrides,
    ) -> Result<Self> {
        if let Some(e) = &cfg.experiment {
            let declared: Command = e.parse()?;
            if declared != command {
                return Err(Error::Config(format!(
                    "config declares experiment '{declared}' but command '{command}' was requested"
                )));
            }
        }
        use Command::*;
        let half_pi = std::f64::consts::FRAC_PI_2;

        // system
        let default_preset = match command {
            KappaScan | NoiseStudy => "he",
            Dissociation => "h2",
            CondMax | Spectrum => "h4",
        };
        let preset = cfg
            .system
            .preset
            .clone()
            .unwrap_or_else(|| default_preset.to_string());
        let mut system = if preset == "custom" {
            let atoms = cfg
                .system
                .atoms
                .as_ref()
                .filter(|a| !a.is_empty())
                .ok_or_else(|| {
                    Error::Config("preset 'custom' needs a non-empty system.atoms list".into())
                })?;
            let basis = cfg
                .system
                .basis
                .clone()
                .ok_or_else(|| Error::Config("preset 'custom' needs system.basis".into()))?;
            for a in atoms {
                for c in a.xyz {
                    finite("atom coordinate", c)?;
                }
            }
            SystemSettings {
                preset,
                basis,
                charge: 0,
                atoms: atoms.iter().map(|a| (a.element.clone(), a.xyz)).collect(),
            }
        } else {
            if cfg.system.atoms.is_some() {
                return Err(Error::Config(
                    "system.atoms is only allowed with preset = \"custom\"".into(),
                ));
            }
            let d = positive("system.h2_distance", cfg.system.h2_distance.unwrap_or(0.74))?;
            let sides = cfg.system.h4_sides.unwrap_or([1.5, 1.8]);
            positive("system.h4_sides", sides[0])?;
            positive("system.h4_sides", sides[1])?;
            let mut s = SystemSettings::preset(&preset, d, sides)?;
            if let Some(b) = &cfg.system.basis {
                s.basis = b.clone();
            }
            s
        };
        system.charge = cfg.system.charge.unwrap_or(0);
        if command == Dissociation && system.preset != "h2" {
            return Err(Error::Config(
                "dissociation scans H2 only (system.preset = \"h2\")".into(),
            ));
        }

        // parameterizations
        let default_params: &[&str] = match command {
            KappaScan => &["naive", "proj", "sc", "st"],
            Dissociation => &["naive", "sc"],
            NoiseStudy | CondMax | Spectrum => &["naive", "proj"],
        };
        let mut params: Vec<Parameterization> = match &cfg.params {
            Some(list) => list.iter().map(|s| s.parse()).collect::<Result<_>>()?,
            None => default_params
                .iter()
                .map(|s| s.parse().expect("valid"))
                .collect(),
        };
        if let Some(p) = overrides.param {
            params = vec![p];
        }
        if params.is_empty() {
            return Err(Error::Config("params must not be empty".into()));
        }
        let mut seen = params.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != params.len() {
            return Err(Error::Config("params contains duplicates".into()));
        }
        if matches!(command, NoiseStudy | CondMax | Spectrum)
            && params
                .iter()
                .any(|p| matches!(p, Parameterization::Sc | Parameterization::St))
        {
            return Err(Error::Config(format!(
                "{command} only supports naive and proj (sc and st have an identity metric)"
            )));
        }
        if command == Dissociation
            && params
                .iter()
                .any(|p| !matches!(p, Parameterization::Naive | Parameterization::Sc))
        {
            return Err(Error::Config(
                "dissociation compares naive and sc only".into(),
            ));
        }

        // ansatz
        let ansatz = match cfg
            .ansatz
            .kind
            .as_deref()
            .unwrap_or(if command == Dissociation {
                "uccsd"
            } else {
                "tups"
            }) {
            "tups" => AnsatzChoice::Tups,
            "uccsd" => AnsatzChoice::Uccsd,
            other => {
                return Err(Error::Config(format!(
                    "unknown ansatz kind '{other}' (tups, uccsd)"
                )))
            }
        };
        let layers = cfg.ansatz.layers.unwrap_or(match command {
            CondMax | Spectrum => 3,
            _ => 1,
        });
        if ansatz == AnsatzChoice::Tups && layers == 0 {
            return Err(Error::Config("ansatz.layers must be at least 1".into()));
        }

        // kappa grid
        let kappa = KappaGrid {
            pair: cfg.kappa.pair.unwrap_or([0, 1]),
            min: finite("kappa.min", cfg.kappa.min.unwrap_or(-half_pi))?,
            max: finite("kappa.max", cfg.kappa.max.unwrap_or(half_pi))?,
            points: cfg.kappa.points.unwrap_or(129),
            extra: cfg.kappa.extra.clone().unwrap_or_else(|| match command {
                NoiseStudy => vec![0.5],
                _ => Vec::new(),
            }),
        };
        if kappa.pair[0] >= kappa.pair[1] {
            return Err(Error::Config("kappa.pair must be [p, q] with p < q".into()));
        }
        if kappa.max <= kappa.min || kappa.points < 2 {
            return Err(Error::Config(
                "kappa grid needs max > min and at least 2 points".into(),
            ));
        }
        for &e in &kappa.extra {
            finite("kappa.extra", e)?;
        }

        // shots
        let (def_shots, def_reps) = match command {
            Spectrum => (100_000, 10),
            _ => (1000, 100),
        };
        let shots = ShotSettings {
            shots: overrides.shots.or(cfg.shots.shots).unwrap_or(def_shots),
            repetitions: overrides.reps.or(cfg.shots.repetitions).unwrap_or(def_reps),
            zero_noise: cfg.shots.zero_noise.unwrap_or(false),
        };
        if shots.shots == 0 || shots.repetitions == 0 {
            return Err(Error::Config(
                "shots and repetitions must be at least 1".into(),
            ));
        }

        let solver = SolverSettings {
            singularity_threshold: positive(
                "solver.singularity_threshold",
                cfg.solver
                    .singularity_threshold
                    .unwrap_or(SolveOptions::default().singularity_threshold),
            )?,
            det_rel_tol: positive(
                "solver.det_rel_tol",
                cfg.solver
                    .det_rel_tol
                    .unwrap_or(SolveOptions::default().det_rel_tol),
            )?,
            regularize: overrides
                .regularize
                .or(cfg.solver.regularize)
                .map(|eps| positive("solver.regularize", eps))
                .transpose()?,
        };

        let dissociation = DissociationSettings {
            min: positive("dissociation.min", cfg.dissociation.min.unwrap_or(0.5))?,
            max: positive("dissociation.max", cfg.dissociation.max.unwrap_or(10.0))?,
            points: cfg.dissociation.points.unwrap_or(39),
            extra: cfg
                .dissociation
                .extra
                .clone()
                .unwrap_or_else(|| vec![50.0 / BOHR_PER_ANGSTROM]),
            basis: cfg
                .dissociation
                .basis
                .clone()
                .unwrap_or_else(|| "sto-3g".into()),
        };
        if dissociation.max < dissociation.min || dissociation.points == 0 {
            return Err(Error::Config(
                "dissociation grid needs max >= min and at least 1 point".into(),
            ));
        }
        for &e in &dissociation.extra {
            positive("dissociation.extra", e)?;
        }

        let cond_max = CondMaxSettings {
            restarts: cfg.cond_max.restarts.unwrap_or(5),
            max_evals: cfg.cond_max.max_evals.unwrap_or(400),
            initial_step: positive(
                "cond_max.initial_step",
                cfg.cond_max.initial_step.unwrap_or(0.5),
            )?,
            energy_tol: positive(
                "cond_max.energy_tol",
                cfg.cond_max.energy_tol.unwrap_or(1e-7),
            )?,
            reject_tol: positive(
                "cond_max.reject_tol",
                cfg.cond_max.reject_tol.unwrap_or(1e-6),
            )?,
            redundancy_points: cfg.cond_max.redundancy_points.unwrap_or(5),
        };
        if cond_max.restarts == 0 || cond_max.max_evals == 0 || cond_max.redundancy_points < 2 {
            return Err(Error::Config(
                "cond_max needs restarts >= 1, max_evals >= 1 and redundancy_points >= 2".into(),
            ));
        }
        if cond_max.reject_tol < cond_max.energy_tol {
            return Err(Error::Config(
                "cond_max.reject_tol must not be below energy_tol".into(),
            ));
        }

        let orbitals = match cfg.spectrum.orbitals.as_deref().unwrap_or("hf") {
            "hf" => OrbitalChoice::Hf,
            "kappa_div" => {
                OrbitalChoice::KappaDiv(cfg.spectrum.kappa_div_file.clone().ok_or_else(|| {
                    Error::Config(
                        "spectrum.orbitals = \"kappa_div\" needs spectrum.kappa_div_file".into(),
                    )
                })?)
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown spectrum.orbitals '{other}' (hf, kappa_div)"
                )))
            }
        };
        let spectrum = SpectrumSettings {
            orbitals,
            fwhm: positive("spectrum.fwhm", cfg.spectrum.fwhm.unwrap_or(0.05))?,
            e_min: finite("spectrum.e_min", cfg.spectrum.e_min.unwrap_or(0.0))?,
            e_max: finite("spectrum.e_max", cfg.spectrum.e_max.unwrap_or(2.5))?,
            n_points: cfg.spectrum.n_points.unwrap_or(1001),
            homotopy_steps: cfg.spectrum.homotopy_steps.unwrap_or(16),
        };
        if spectrum.e_max <= spectrum.e_min || spectrum.n_points < 3 {
            return Err(Error::Config(
                "spectrum grid needs e_max > e_min and at least 3 points".into(),
            ));
        }

        Ok(Self {
            command,
            seed: overrides.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED),
            out: overrides
                .out
                .clone()
                .or_else(|| cfg.out.clone())
                .unwrap_or_else(|| PathBuf::from("results").join(command.as_str())),
            params: params.iter().map(|p| p.as_str().to_string()).collect(),
            system,
            ansatz,
            layers,
            kappa,
            shots,
            solver,
            dissociation,
            cond_max,
            spectrum,
        })
    }

    pub fn parameterizations(&self) -> Vec<Parameterization> {
        self.params
            .iter()
            .map(|s| s.parse().expect("validated"))
            .collect()
    }

    /// Canonical JSON of the settings (output directory excluded).
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("settings serialize")
    }

    /// SHA-256 of [`Settings::canonical_json`], hex encoded.
    pub fn sha256(&self) -> String {
        use sha2::{Digest, Sha256};
        let digest = Sha256::digest(self.canonical_json().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
