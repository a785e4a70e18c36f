//! Spin-adapted cluster generators, UCC and tUPS state preparation, and
//! variational ground-state optimization.

mod generators;
mod optimize;
mod program;
mod redundancy;

pub use generators::{
    build_cluster_generators, closed_shell_occupation, excitation_labels, ClusterGenerator,
    ClusterGeneratorSet, ExcitationLabel, Truncation, NULL_TOL,
};
pub use optimize::{
    optimize_ground_state, optimize_ground_state_from, GroundState, GroundStateOptions, Optimizer,
    OptimizerTrace,
};
pub use program::{AnsatzKind, AnsatzProgram, Factor};
pub use redundancy::{check_kappa_redundancy, RedundancyPoint, RedundancyReport, REDUNDANCY_TOL};
