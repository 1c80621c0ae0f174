//! A desk-scale numerical laboratory for discretized sum-over-histories
//! probabilities.
//!
//! The crate enumerates every discretized trajectory between two fixed
//! measurement events, evaluates classical actions under pluggable
//! Lagrangians, checks the algebraic identities between the amplitude-sum
//! and pair-trajectory forms of the joint probability, searches for
//! partitions of the trajectory set into non-interfering subsets with
//! strictly positive classical probabilities, and reconstructs each subset
//! as a spacetime field history with a quantified phase anomaly.
//!
//! Data-parallel inner loops (action fills, pair sums, per-set work) run on
//! rayon when the default `parallel` feature is enabled; disabling it
//! yields a dependency-free sequential build with bit-identical results.

pub mod action;
pub mod config;
pub mod error;
pub mod field;
pub mod kahan;
pub mod lattice;
pub mod parsing;
pub mod propagator;
pub mod report;
pub mod scenario;

pub use action::{
    compute_action, evaluate_ensemble, ActionFunctional, EnsemblePhaseSums, EvaluatedEnsemble,
    Grid, PhysicsConfig,
};
pub use error::{PathlabError, Result};
pub use lattice::{enumerate_paths, path_count, LatticeConfig, Path, PathEnsemble, SpacetimeLattice};
pub use parsing::{
    cross_interference, enumerate_all_parsings, find_parsing, set_probability, validate_partition,
    Partition, PathSet, SetClass, SolveOutcome, SolverConfig, Strategy, ValidityMode,
};
pub use propagator::{
    conditional_distribution, joint_probability, pair_sum, pair_sum_direct,
    transfer_matrix_amplitudes, ProbabilityReport,
};
pub use field::{anomaly_measure, phase_front_check, reconstruct_field, FieldHistory};
