//! Shot-noise ensembles of the lowest excitation energy along a redundant rotation.

use crate::ansatz::GroundStateOptions;
use crate::error::{Error, Result};
use crate::labcli::config::{AnsatzChoice, Settings};
use crate::labcli::output::{flag, int, num, opt, Table};
use crate::response::Parameterization;
use crate::sampler::{run_noise_ensemble, KappaNoiseStats, NoiseEnsembleConfig, ShotPlan};

#[derive(Debug, Clone)]
pub struct NoiseStudyReport {
    pub stats: Vec<KappaNoiseStats>,
}

impl NoiseStudyReport {
    pub fn series(&self, param: Parameterization) -> Vec<&KappaNoiseStats> {
        self.stats.iter().filter(|s| s.param == param).collect()
    }

    pub fn tables(&self, params: &[Parameterization]) -> Vec<Table> {
        let mut out = Vec::new();
        for &param in params {
            let mut t = Table::new(
                &format!("noise_{param}.csv"),
                &[
                    "kappa",
                    "mean_omega",
                    "std_omega",
                    "cond_sigma",
                    "n_excluded",
                    "seed",
                ],
            );
            for s in self.series(param) {
                t.push(vec![
                    num(s.kappa),
                    opt(s.mean_omega),
                    opt(s.std_omega),
                    num(s.cond_sigma),
                    int(s.n_excluded),
                    int(s.seed),
                ]);
            }
            out.push(t);
        }
        let mut noiseless = Table::new(
            "noise_noiseless.csv",
            &[
                "kappa",
                "param",
                "noiseless_omega",
                "noiseless_flagged",
                "cond_sigma",
            ],
        );
        let mut samples = Table::new(
            "noise_samples.csv",
            &["kappa", "param", "repetition", "omega"],
        );
        for s in &self.stats {
            noiseless.push(vec![
                num(s.kappa),
                s.param.to_string(),
                opt(s.noiseless_omega),
                flag(s.noiseless_flagged),
                num(s.cond_sigma),
            ]);
            for (rep, w) in s.omegas.iter().enumerate() {
                samples.push(vec![num(s.kappa), s.param.to_string(), int(rep), opt(*w)]);
            }
        }
        out.push(noiseless);
        out.push(samples);
        out
    }
}

pub fn run(settings: &Settings) -> Result<NoiseStudyReport> {
    if settings.ansatz != AnsatzChoice::Tups {
        return Err(Error::Unsupported(
            "noise_study prepares its ground state with tUPS only".into(),
        ));
    }
    let system = settings.system.build()?;
    let cfg = NoiseEnsembleConfig {
        params: settings.parameterizations(),
        pq: (settings.kappa.pair[0], settings.kappa.pair[1]),
        kappas: settings.kappa.values(),
        layers: settings.layers,
        plan: ShotPlan::new(
            settings.shots.shots,
            settings.shots.repetitions,
            settings.seed,
        )?,
        zero_noise: settings.shots.zero_noise,
        solve: settings.solver.options(),
        ground: GroundStateOptions::default(),
    };
    Ok(NoiseStudyReport {
        stats: run_noise_ensemble(&system, &cfg)?,
    })
}
