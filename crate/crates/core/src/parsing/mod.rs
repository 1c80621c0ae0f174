//! Parsing the path ensemble into non-interfering sets.
//!
//! A parsing is a disjoint cover of Q by path sets. A set is admissible when
//! its cross-interference with the rest of the ensemble vanishes (to
//! tolerance); its probability is the squared magnitude of its own amplitude
//! sum, so valid parsings turn the joint probability into a plain sum of
//! nonnegative per-set terms.

pub mod partitions;
pub mod solver;

use serde::{Deserialize, Serialize};

use crate::action::EvaluatedEnsemble;
use crate::error::{PathlabError, Result};
use crate::kahan::CompensatedSum;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub use solver::{enumerate_all_parsings, find_parsing, AnnealingParams, SolveOutcome, SolverTrace, Strategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetClass {
    /// Squared magnitude strictly above the null threshold: carries
    /// realistic probability.
    Positive,
    /// Squared magnitude within the null threshold of zero: cancels out.
    Null,
    /// Fails the strict cross-interference constraint.
    Invalid,
}

/// One candidate set of paths with its cached phase sums.
#[derive(Debug, Clone, Serialize)]
pub struct PathSet {
    /// Sorted indices into the ensemble.
    pub members: Vec<usize>,
    /// Sum of cos(S/hbar) over members.
    pub set_cos: f64,
    /// Sum of sin(S/hbar) over members.
    pub set_sin: f64,
    /// Squared magnitude of the set amplitude.
    pub probability: f64,
    /// Cross-interference with the complement.
    pub residual: f64,
    pub classification: SetClass,
}

impl PathSet {
    /// Builds a set and fills the sums, probability and residual; the
    /// classification is left `Invalid` until a partition-level validation
    /// assigns it against concrete tolerances.
    pub fn from_members(mut members: Vec<usize>, ensemble: &EvaluatedEnsemble) -> Self {
        members.sort_unstable();
        let mut cos = CompensatedSum::new();
        let mut sin = CompensatedSum::new();
        for &i in &members {
            cos.add(ensemble.phase_cos()[i]);
            sin.add(ensemble.phase_sin()[i]);
        }
        let set_cos = cos.value();
        let set_sin = sin.value();
        let mut set = PathSet {
            members,
            set_cos,
            set_sin,
            probability: set_cos * set_cos + set_sin * set_sin,
            residual: 0.0,
            classification: SetClass::Invalid,
        };
        set.residual = cross_interference(&set, ensemble);
        set
    }
}

/// Cross-interference between a set and its complement:
/// `sc (C - sc) + ss (D - ss)` with `(sc, ss)` the set's phase sums and
/// `(C, D)` the global ones. Equal to the two-sided cross-pair cosine sum
/// because every path lies in exactly one set.
pub fn cross_interference(set: &PathSet, ensemble: &EvaluatedEnsemble) -> f64 {
    let totals = ensemble.phase_sums();
    set.set_cos * (totals.total_cos - set.set_cos) + set.set_sin * (totals.total_sin - set.set_sin)
}

/// Per-set probability F: the squared magnitude of the set's amplitude sum.
pub fn set_probability(set: &PathSet) -> f64 {
    set.set_cos * set.set_cos + set.set_sin * set.set_sin
}

/// The pairwise double-cosine form of F, O(k^2); kept as an independent
/// cross-check of [`set_probability`] for modest sets.
pub fn set_probability_pairwise(set: &PathSet, ensemble: &EvaluatedEnsemble) -> Result<f64> {
    if set.members.len() > crate::propagator::DIRECT_PAIR_LIMIT {
        return Err(PathlabError::budget(format!(
            "pairwise set probability limited to {} members, got {}",
            crate::propagator::DIRECT_PAIR_LIMIT,
            set.members.len()
        )));
    }
    let hbar = ensemble.physics().hbar;
    let actions = ensemble.actions();
    let mut acc = CompensatedSum::new();
    for &a in &set.members {
        for &b in &set.members {
            acc.add(((actions[a] - actions[b]) / hbar).cos());
        }
    }
    Ok(acc.value())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ValidityMode {
    #[default]
    Strict,
    Relaxed,
}

/// A validated disjoint cover of the ensemble.
#[derive(Debug, Clone, Serialize)]
pub struct Partition {
    pub sets: Vec<PathSet>,
    /// Total joint probability minus the sum of set probabilities.
    pub global_residual: f64,
    pub mode: ValidityMode,
    pub valid: bool,
    pub total_probability: f64,
    pub epsilon_x: f64,
    pub epsilon_f: f64,
}

impl Partition {
    pub fn num_sets(&self) -> usize {
        self.sets.len()
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.sets
            .iter()
            .map(|s| s.residual.abs())
            .fold(0.0, f64::max)
    }

    /// Sum of per-set probabilities (null sets included, so conservation is
    /// exact rather than up to dropped terms).
    pub fn probability_sum(&self) -> f64 {
        CompensatedSum::sum_iter(self.sets.iter().map(|s| s.probability))
    }

    /// Canonical member-list form: sets ordered by smallest member.
    pub fn member_sets(&self) -> Vec<Vec<usize>> {
        self.sets.iter().map(|s| s.members.clone()).collect()
    }
}

/// Tolerances and search knobs for the parsing solver.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Cross-interference tolerance; default 1e-9 * n.
    #[serde(default)]
    pub epsilon_x: Option<f64>,
    /// Null-set threshold; default 1e-9 * n^2.
    #[serde(default)]
    pub epsilon_f: Option<f64>,
    #[serde(default)]
    pub strategy: Strategy,
    #[serde(default = "default_max_exhaustive")]
    pub max_paths_exhaustive: usize,
    #[serde(default)]
    pub annealing: AnnealingParams,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub mode: ValidityMode,
}

fn default_max_exhaustive() -> usize {
    10
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            epsilon_x: None,
            epsilon_f: None,
            strategy: Strategy::default(),
            max_paths_exhaustive: default_max_exhaustive(),
            annealing: AnnealingParams::default(),
            seed: 0,
            mode: ValidityMode::Strict,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(e) = self.epsilon_x {
            if !(e > 0.0) {
                return Err(PathlabError::validation("epsilon_x must be positive"));
            }
        }
        if let Some(e) = self.epsilon_f {
            if !(e > 0.0) {
                return Err(PathlabError::validation("epsilon_f must be positive"));
            }
        }
        Ok(())
    }

    pub fn eps_x(&self, n: usize) -> f64 {
        self.epsilon_x.unwrap_or(1e-9 * n.max(1) as f64)
    }

    pub fn eps_f(&self, n: usize) -> f64 {
        let n = n.max(1) as f64;
        self.epsilon_f.unwrap_or(1e-9 * n * n)
    }
}

/// Checks the structural cover, fills residuals, probabilities and
/// classifications, and marks validity under the configured mode.
pub fn validate_partition(
    member_sets: &[Vec<usize>],
    ensemble: &EvaluatedEnsemble,
    config: &SolverConfig,
) -> Result<Partition> {
    config.validate()?;
    let n = ensemble.len();
    let mut seen = vec![false; n];
    for set in member_sets {
        if set.is_empty() {
            return Err(PathlabError::validation("partition contains an empty set"));
        }
        for &i in set {
            if i >= n {
                return Err(PathlabError::validation(format!(
                    "path index {i} out of range for an ensemble of {n}"
                )));
            }
            if seen[i] {
                return Err(PathlabError::validation(format!(
                    "path {i} appears in more than one set"
                )));
            }
            seen[i] = true;
        }
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(PathlabError::validation(format!(
            "path {missing} is not covered by any set"
        )));
    }

    let eps_x = config.eps_x(n);
    let eps_f = config.eps_f(n);

    #[cfg(feature = "parallel")]
    let mut sets: Vec<PathSet> = member_sets
        .par_iter()
        .map(|m| PathSet::from_members(m.clone(), ensemble))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let mut sets: Vec<PathSet> = member_sets
        .iter()
        .map(|m| PathSet::from_members(m.clone(), ensemble))
        .collect();

    sets.sort_by_key(|s| s.members[0]);

    let totals = ensemble.phase_sums();
    let total_probability =
        totals.total_cos * totals.total_cos + totals.total_sin * totals.total_sin;

    let mut all_residuals_ok = true;
    for set in &mut sets {
        if set.probability < -eps_f {
            return Err(PathlabError::integrity(format!(
                "set probability {} below -epsilon_f; squared magnitudes cannot be negative",
                set.probability
            )));
        }
        let residual_ok = set.residual.abs() <= eps_x;
        if !residual_ok {
            all_residuals_ok = false;
        }
        set.classification = if config.mode == ValidityMode::Strict && !residual_ok {
            SetClass::Invalid
        } else if set.probability > eps_f {
            SetClass::Positive
        } else {
            SetClass::Null
        };
    }

    let probability_sum = CompensatedSum::sum_iter(sets.iter().map(|s| s.probability));
    let global_residual = total_probability - probability_sum;

    let conservation_ok =
        global_residual.abs() <= f64::max(1e-8 * total_probability.abs(), eps_x);
    let valid = match config.mode {
        ValidityMode::Strict => all_residuals_ok && conservation_ok,
        ValidityMode::Relaxed => global_residual.abs() <= eps_x,
    };

    Ok(Partition {
        sets,
        global_residual,
        mode: config.mode,
        valid,
        total_probability,
        epsilon_x: eps_x,
        epsilon_f: eps_f,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::PhysicsConfig;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn ens(phases: &[f64]) -> EvaluatedEnsemble {
        EvaluatedEnsemble::from_actions(phases.to_vec(), PhysicsConfig::default()).unwrap()
    }

    #[test]
    fn whole_ensemble_set_has_zero_cross_interference() {
        let e = ens(&[0.3, 1.1, 2.9, 4.0]);
        let s = PathSet::from_members((0..4).collect(), &e);
        assert_eq!(cross_interference(&s, &e), 0.0);
    }

    #[test]
    fn hand_case_cross_interference_values() {
        // phases {0, 0, pi/2}: C = 2, D = 1
        let e = ens(&[0.0, 0.0, PI / 2.0]);
        // the two in-phase paths: 2*(2-2) + 0*(1-0) = 0
        let good = PathSet::from_members(vec![0, 1], &e);
        assert!(cross_interference(&good, &e).abs() < 1e-14);
        // one in-phase path plus the quadrature path: 1*(2-1) + 1*(1-1) = 1
        let bad = PathSet::from_members(vec![0, 2], &e);
        assert_relative_eq!(cross_interference(&bad, &e), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn set_probability_hand_cases() {
        let e = ens(&[0.7]);
        let s = PathSet::from_members(vec![0], &e);
        assert_relative_eq!(set_probability(&s), 1.0, max_relative = 1e-14);

        let e = ens(&[0.0, PI]);
        let s = PathSet::from_members(vec![0, 1], &e);
        assert!(set_probability(&s).abs() < 1e-14);

        let e = ens(&[0.0, 0.0]);
        let s = PathSet::from_members(vec![0, 1], &e);
        assert_relative_eq!(set_probability(&s), 4.0, max_relative = 1e-14);
    }

    #[test]
    fn pairwise_form_matches_squared_magnitude() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let phases: Vec<f64> = (0..40).map(|_| rng.gen::<f64>() * 2.0 * PI).collect();
        let e = ens(&phases);
        let s = PathSet::from_members((0..17).collect(), &e);
        let pairwise = set_probability_pairwise(&s, &e).unwrap();
        assert_relative_eq!(pairwise, set_probability(&s), max_relative = 1e-10, epsilon = 1e-12);
    }

    #[test]
    fn validate_null_null_partition() {
        // phases {0, pi/2, pi, 3pi/2}: C = D = 0; both halves are null sets.
        let e = ens(&[0.0, PI / 2.0, PI, 1.5 * PI]);
        let p = validate_partition(
            &[vec![0, 2], vec![1, 3]],
            &e,
            &SolverConfig::default(),
        )
        .unwrap();
        assert!(p.valid);
        assert!(p.total_probability.abs() < 1e-24);
        for s in &p.sets {
            assert_eq!(s.classification, SetClass::Null);
            assert!(s.residual.abs() < 1e-14);
        }
    }

    #[test]
    fn validate_worked_partition_and_its_invalid_sibling() {
        let e = ens(&[0.0, 0.0, PI / 2.0]);
        let cfg = SolverConfig::default();

        let good = validate_partition(&[vec![0, 1], vec![2]], &e, &cfg).unwrap();
        assert!(good.valid);
        assert_relative_eq!(good.sets[0].probability, 4.0, max_relative = 1e-12);
        assert_relative_eq!(good.sets[1].probability, 1.0, max_relative = 1e-12);
        assert_relative_eq!(good.probability_sum(), 5.0, max_relative = 1e-12);

        let bad = validate_partition(&[vec![0, 2], vec![1]], &e, &cfg).unwrap();
        assert!(!bad.valid);
        assert_relative_eq!(bad.sets[0].residual, 1.0, max_relative = 1e-12);
        assert_eq!(bad.sets[0].classification, SetClass::Invalid);
    }

    #[test]
    fn structural_errors_are_distinct_from_constraint_violations() {
        let e = ens(&[0.0, 1.0, 2.0]);
        let cfg = SolverConfig::default();
        let overlap = validate_partition(&[vec![0, 1], vec![1, 2]], &e, &cfg);
        assert!(matches!(overlap, Err(PathlabError::Validation(_))));
        let gap = validate_partition(&[vec![0, 1]], &e, &cfg);
        assert!(matches!(gap, Err(PathlabError::Validation(_))));
        let empty = validate_partition(&[vec![0, 1, 2], vec![]], &e, &cfg);
        assert!(matches!(empty, Err(PathlabError::Validation(_))));
    }

    #[test]
    fn relaxed_mode_accepts_globally_cancelling_partitions() {
        // Two sets whose residuals cancel exactly: any 2-set split has
        // residual_1 = residual_2 sign-matched... use the global criterion on
        // a partition whose per-set residuals are nonzero but sum to ~0.
        let e = ens(&[0.0, 0.0, PI / 2.0]);
        let mut cfg = SolverConfig {
            mode: ValidityMode::Relaxed,
            epsilon_x: Some(1e-6),
            ..Default::default()
        };
        // {0,2},{1}: residuals 1 and 1, global residual = P - (2 + 1) = 5 - 3 = 2.
        let p = validate_partition(&[vec![0, 2], vec![1]], &e, &cfg).unwrap();
        assert!(!p.valid);
        assert_relative_eq!(p.global_residual, 2.0, max_relative = 1e-12);
        // the strict-valid split is of course also relaxed-valid
        cfg.epsilon_x = None;
        let p = validate_partition(&[vec![0, 1], vec![2]], &e, &cfg).unwrap();
        assert!(p.valid);
    }

    #[test]
    fn monotone_tolerance() {
        let e = ens(&[0.1, 2.0, 3.7, 5.1, 0.9]);
        let members = vec![vec![0, 3], vec![1, 2, 4]];
        let base = validate_partition(&members, &e, &SolverConfig::default()).unwrap();
        // validity at a given epsilon implies validity at any larger epsilon
        let mut prev_valid = base.valid;
        for eps in [1e-9, 1e-6, 1e-3, 1.0, 1e3] {
            let cfg = SolverConfig {
                epsilon_x: Some(eps),
                ..Default::default()
            };
            let p = validate_partition(&members, &e, &cfg).unwrap();
            assert!(!prev_valid || p.valid);
            prev_valid = p.valid;
        }
    }
}
