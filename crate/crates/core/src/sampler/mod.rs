//! Jordan–Wigner mapping, Pauli expectations and shot-noise response matrices.

mod ensemble;
mod noisy;
mod pauli;
mod shots;

pub use ensemble::{
    mean_std, run_noise_ensemble, KappaNoiseStats, NoiseEnsembleConfig, REAL_ROOT_TOL,
};
pub use noisy::{build_noisy_response_matrices, Estimator, NoisyResponseModel};
pub use pauli::{
    exact_pauli_expectation, jw_map, PauliString, PauliSum, PauliTable, RealPauliSum, PRUNE_TOL,
};
pub use shots::{derive_seed, sample_expectation, splitmix64, ShotPlan};
