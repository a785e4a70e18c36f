//! Experiment driver: configuration, the five commands, and CSV/manifest output.

pub mod cond_max;
mod config;
pub mod dissociation;
pub mod kappa_scan;
pub mod noise_study;
mod output;
pub mod roots;
pub mod spectrum;

use std::path::Path;

pub use config::{
    uniform, AnsatzChoice, Command, CondMaxSettings, DissociationSettings, ExperimentConfig,
    KappaGrid, OrbitalChoice, Overrides, Settings, ShotSettings, SolverSettings, SpectrumSettings,
    SystemSettings, DEFAULT_SEED,
};
pub use output::{hex_sha256, num, read_table, FileRecord, Manifest, RunWriter, Table};

use crate::error::Result;

/// Typed result of one command.
#[derive(Debug, Clone)]
pub enum Report {
    KappaScan(kappa_scan::KappaScanReport),
    Dissociation(dissociation::DissociationReport),
    NoiseStudy(noise_study::NoiseStudyReport),
    CondMax(cond_max::CondMaxReport),
    Spectrum(spectrum::SpectrumReport),
}

impl Report {
    pub fn tables(&self, settings: &Settings) -> Vec<Table> {
        match self {
            Report::KappaScan(r) => r.tables(),
            Report::Dissociation(r) => r.tables(),
            Report::NoiseStudy(r) => r.tables(&settings.parameterizations()),
            Report::CondMax(r) => r.tables(),
            Report::Spectrum(r) => r.tables(),
        }
    }

    fn notes(&self) -> Vec<String> {
        match self {
            Report::Spectrum(r) => r
                .empty_repetitions()
                .into_iter()
                .map(|(p, rep)| {
                    format!("{p} repetition {rep}: no physical solutions (empty stick list)")
                })
                .collect(),
            Report::CondMax(r) => r
                .redundancy
                .iter()
                .filter(|x| !x.redundant)
                .map(|x| {
                    format!(
                        "kappa ({}, {}) is not redundant and was excluded from the search",
                        x.p, x.q
                    )
                })
                .collect(),
            _ => Vec::new(),
        }
    }
}

/// Runs the command described by `settings` without touching the filesystem.
pub fn compute(settings: &Settings) -> Result<Report> {
    Ok(match settings.command {
        Command::KappaScan => Report::KappaScan(kappa_scan::run(settings)?),
        Command::Dissociation => Report::Dissociation(dissociation::run(settings)?),
        Command::NoiseStudy => Report::NoiseStudy(noise_study::run(settings)?),
        Command::CondMax => Report::CondMax(cond_max::run(settings)?),
        Command::Spectrum => Report::Spectrum(spectrum::run(settings)?),
    })
}

/// Runs the command and writes its CSV files plus `manifest.json` into `settings.out`.
pub fn run_and_write(
    settings: &Settings,
    config_file: Option<&Path>,
) -> Result<(Report, Manifest)> {
    let report = compute(settings)?;
    let mut writer = RunWriter::create(settings, config_file)?;
    for table in report.tables(settings) {
        writer.write(&table)?;
    }
    for note in report.notes() {
        writer.note(note);
    }
    let manifest = writer.finish()?;
    Ok((report, manifest))
}

/// Loads the optional config file and resolves it for `command`.
pub fn load_settings(
    command: Command,
    config_file: Option<&Path>,
    overrides: &Overrides,
) -> Result<Settings> {
    let cfg = match config_file {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    Settings::resolve(command, &cfg, overrides)
}
