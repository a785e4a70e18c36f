//! Linear-response matrices for the naive, projected, self-consistent and
//! state-transfer parameterizations; QZ solve, metric diagnostics and spectra.

mod analytic;
mod excitation;
mod matrices;
mod solve;
mod spectrum;

pub use analytic::{analytic_metric_2in2, analytic_metric_det_2in2};
pub use excitation::{build_excitation_basis, ExcitationOperatorSet};
pub use matrices::{
    build_response_matrices, metric_condition, metric_matrix, response_matrices_from_operators,
    response_operators, Parameterization, ResponseMatrices, SymmetryResiduals,
};
pub use solve::{
    condition_number, metric_diagnostics, solve_response, MetricDiagnostics, ResponseSolution,
    SolveOptions,
};
pub use spectrum::{
    broaden, compute_spectrum, dipole_operators, fci_oscillator_strengths, Broadening,
    PropertyGradient, SpectrumData, Stick, MIN_METRIC_NORM,
};
