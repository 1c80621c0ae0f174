//! Search for valid parsings: exhaustive oracle, phase-binning construction,
//! and annealing repair.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::action::EvaluatedEnsemble;
use crate::error::{PathlabError, Result};
use crate::kahan::CompensatedSum;

use super::partitions::{bell_number, SetPartitions};
use super::{validate_partition, Partition, SolverConfig, ValidityMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Exhaustive,
    #[default]
    PhaseBinning,
    Annealing,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnnealingParams {
    pub initial_temperature: f64,
    pub cooling_rate: f64,
    pub move_budget: usize,
}

impl Default for AnnealingParams {
    fn default() -> Self {
        Self {
            initial_temperature: 1.0,
            cooling_rate: 0.9995,
            move_budget: 20_000,
        }
    }
}

/// What the solver did, for reports.
#[derive(Debug, Clone, Serialize)]
pub struct SolverTrace {
    pub strategy: Strategy,
    pub seed: u64,
    pub moves_tried: usize,
    pub moves_accepted: usize,
    /// True when the result is the trivial single-set fallback.
    pub fell_back_to_trivial: bool,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveOutcome {
    pub partition: Partition,
    /// Quality flag: whether the result is finer than the trivial partition.
    pub finer_than_trivial: bool,
    pub trace: SolverTrace,
}

/// Enumerates every set partition of the ensemble, validates each under the
/// strict mode, and returns the valid ones sorted finest-first.
///
/// This is the brute-force oracle; it refuses ensembles above the configured
/// exhaustive budget, reporting exactly how many partitions enumeration
/// would visit.
pub fn enumerate_all_parsings(
    ensemble: &EvaluatedEnsemble,
    config: &SolverConfig,
) -> Result<Vec<Partition>> {
    config.validate()?;
    let n = ensemble.len();
    if n == 0 {
        return Err(PathlabError::validation(
            "cannot parse an empty ensemble",
        ));
    }
    if n > config.max_paths_exhaustive {
        let count = bell_number(n)
            .map(|b| b.to_string())
            .unwrap_or_else(|| "more than u128 can hold".to_string());
        return Err(PathlabError::budget(format!(
            "exhaustive parsing of {n} paths refused: it would enumerate B({n}) = {count} partitions (budget {})",
            config.max_paths_exhaustive
        )));
    }
    let strict = SolverConfig {
        mode: ValidityMode::Strict,
        ..config.clone()
    };
    let mut valid = Vec::new();
    for assignment in SetPartitions::new(n) {
        let blocks = SetPartitions::blocks(&assignment);
        let p = validate_partition(&blocks, ensemble, &strict)?;
        if p.valid {
            valid.push(p);
        }
    }
    sort_finest_first(&mut valid);
    Ok(valid)
}

fn sort_finest_first(partitions: &mut [Partition]) {
    partitions.sort_by(|a, b| {
        b.num_sets()
            .cmp(&a.num_sets())
            .then_with(|| {
                a.max_abs_residual()
                    .partial_cmp(&b.max_abs_residual())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .then_with(|| a.member_sets().cmp(&b.member_sets()))
    });
}

/// Finds a valid partition, preferring more sets over fewer. Never fails:
/// the trivial single-set partition (zero cross-interference by
/// construction) is the guaranteed fallback, flagged in the trace.
pub fn find_parsing(ensemble: &EvaluatedEnsemble, config: &SolverConfig) -> Result<SolveOutcome> {
    config.validate()?;
    let n = ensemble.len();
    if n == 0 {
        return Err(PathlabError::validation("cannot parse an empty ensemble"));
    }
    let mut notes = Vec::new();
    let mut strategy = config.strategy;
    if strategy == Strategy::Exhaustive && n > config.max_paths_exhaustive {
        notes.push(format!(
            "exhaustive refused at n = {n}; falling back to phase binning"
        ));
        strategy = Strategy::PhaseBinning;
    }
    match strategy {
        Strategy::Exhaustive => {
            let valid = enumerate_all_parsings(ensemble, config)?;
            // the trivial partition is always valid, so the list is nonempty
            let best = valid.into_iter().next().expect("trivial partition is always valid");
            let finer = best.num_sets() > 1;
            Ok(SolveOutcome {
                partition: best,
                finer_than_trivial: finer,
                trace: SolverTrace {
                    strategy: Strategy::Exhaustive,
                    seed: config.seed,
                    moves_tried: 0,
                    moves_accepted: 0,
                    fell_back_to_trivial: false,
                    notes,
                },
            })
        }
        Strategy::PhaseBinning => {
            let (partition, mut pb_notes, fell_back) = phase_binning(ensemble, config)?;
            notes.append(&mut pb_notes);
            let finer = partition.num_sets() > 1;
            Ok(SolveOutcome {
                finer_than_trivial: finer,
                partition,
                trace: SolverTrace {
                    strategy: Strategy::PhaseBinning,
                    seed: config.seed,
                    moves_tried: 0,
                    moves_accepted: 0,
                    fell_back_to_trivial: fell_back,
                    notes,
                },
            })
        }
        Strategy::Annealing => anneal(ensemble, config, notes),
    }
}

fn trivial_partition(ensemble: &EvaluatedEnsemble, config: &SolverConfig) -> Result<Partition> {
    validate_partition(&[(0..ensemble.len()).collect::<Vec<_>>()], ensemble, config)
}

/// Deterministic constructive strategy.
///
/// Seeds candidate sets from antipodal phase pairings (each pair's cosine and
/// sine sums near zero, the simple zero-sum category) and from equal-phase
/// groups whose cross term happens to vanish, then puts everything else in
/// one remainder set and validates the whole cover. Repairs by dropping the
/// equal-phase commits first, then falls back to the trivial partition.
fn phase_binning(
    ensemble: &EvaluatedEnsemble,
    config: &SolverConfig,
) -> Result<(Partition, Vec<String>, bool)> {
    use std::f64::consts::TAU;
    let n = ensemble.len();
    let hbar = ensemble.physics().hbar;
    let eps_x = config.eps_x(n);
    let phases: Vec<f64> = ensemble
        .actions()
        .iter()
        .map(|s| (s / hbar).rem_euclid(TAU))
        .collect();
    let mut matched = vec![false; n];
    let mut pair_sets: Vec<Vec<usize>> = Vec::new();
    let mut notes = Vec::new();

    let residual_of = |members: &[usize]| {
        let set = super::PathSet::from_members(members.to_vec(), ensemble);
        set.residual
    };

    // Antipodal pairing: for each path, the best unmatched partner near
    // phase + pi. Committed only when the pair really is a zero-sum set.
    for i in 0..n {
        if matched[i] {
            continue;
        }
        let target = (phases[i] + TAU / 2.0).rem_euclid(TAU);
        let mut best: Option<(f64, usize)> = None;
        for j in 0..n {
            if j == i || matched[j] {
                continue;
            }
            let mut d = (phases[j] - target).abs();
            if d > TAU / 2.0 {
                d = TAU - d;
            }
            if best.map_or(true, |(bd, _)| d < bd) {
                best = Some((d, j));
            }
        }
        if let Some((_, j)) = best {
            let pair = [i, j];
            if residual_of(&pair).abs() <= eps_x {
                matched[i] = true;
                matched[j] = true;
                pair_sets.push(vec![i, j]);
            }
        }
    }

    // Equal-phase grouping over the remainder.
    let mut group_sets: Vec<Vec<usize>> = Vec::new();
    let mut order: Vec<usize> = (0..n).filter(|&i| !matched[i]).collect();
    order.sort_by(|&a, &b| phases[a].partial_cmp(&phases[b]).unwrap().then(a.cmp(&b)));
    let mut idx = 0;
    while idx < order.len() {
        let mut group = vec![order[idx]];
        let mut next = idx + 1;
        while next < order.len() && (phases[order[next]] - phases[order[idx]]).abs() <= 1e-12 {
            group.push(order[next]);
            next += 1;
        }
        if group.len() >= 2 && residual_of(&group).abs() <= eps_x {
            for &g in &group {
                matched[g] = true;
            }
            group_sets.push(group);
        }
        idx = next;
    }

    let remainder: Vec<usize> = (0..n).filter(|&i| !matched[i]).collect();

    let assemble = |pairs: &[Vec<usize>], groups: &[Vec<usize>], rest: &[usize]| {
        let mut sets: Vec<Vec<usize>> = Vec::new();
        sets.extend(pairs.iter().cloned());
        sets.extend(groups.iter().cloned());
        if !rest.is_empty() {
            sets.push(rest.to_vec());
        }
        sets
    };

    let candidate = assemble(&pair_sets, &group_sets, &remainder);
    if !candidate.is_empty() {
        let p = validate_partition(&candidate, ensemble, config)?;
        if p.valid {
            return Ok((p, notes, false));
        }
        notes.push("full phase-binned cover failed validation".to_string());
    }

    // Repair: keep only the antipodal pairs, fold the rest together.
    if !pair_sets.is_empty() {
        let mut rest: Vec<usize> = remainder.clone();
        for g in &group_sets {
            rest.extend(g.iter().copied());
        }
        rest.sort_unstable();
        let candidate = assemble(&pair_sets, &[], &rest);
        let p = validate_partition(&candidate, ensemble, config)?;
        if p.valid {
            notes.push("kept antipodal pairs only".to_string());
            return Ok((p, notes, false));
        }
    }

    let trivial = trivial_partition(ensemble, config)?;
    Ok((trivial, notes, true))
}

/// Seeded annealing over block assignments.
///
/// The chain minimizes the sum of squared per-set residuals with relocate,
/// merge and split moves; every strict-valid state visited is snapshotted and
/// the finest one wins. The assignment representation keeps the cover
/// property structurally intact across moves.
fn anneal(
    ensemble: &EvaluatedEnsemble,
    config: &SolverConfig,
    mut notes: Vec<String>,
) -> Result<SolveOutcome> {
    let n = ensemble.len();
    let eps_x = config.eps_x(n);
    let eps_f = config.eps_f(n);
    let totals = ensemble.phase_sums();
    let cos = ensemble.phase_cos();
    let sin = ensemble.phase_sin();

    // Start from the phase-binning construction when it is finer.
    let (seed_partition, _, seeded_trivial) = phase_binning(ensemble, config)?;
    let mut assignment = vec![0usize; n];
    for (b, set) in seed_partition.member_sets().iter().enumerate() {
        for &i in set {
            assignment[i] = b;
        }
    }
    if seeded_trivial {
        notes.push("annealing seeded from the trivial partition".to_string());
    }

    let block_sums = |assignment: &[usize]| -> Vec<(f64, f64)> {
        let k = assignment.iter().copied().max().unwrap_or(0) + 1;
        let mut sums = vec![(CompensatedSum::new(), CompensatedSum::new()); k];
        for i in 0..n {
            sums[assignment[i]].0.add(cos[i]);
            sums[assignment[i]].1.add(sin[i]);
        }
        sums.into_iter().map(|(c, s)| (c.value(), s.value())).collect()
    };
    let cost_of = |sums: &[(f64, f64)]| -> f64 {
        sums.iter()
            .map(|&(sc, ss)| {
                let r = sc * (totals.total_cos - sc) + ss * (totals.total_sin - ss);
                r * r
            })
            .sum()
    };
    let state_valid = |sums: &[(f64, f64)]| -> bool {
        sums.iter().all(|&(sc, ss)| {
            let r = sc * (totals.total_cos - sc) + ss * (totals.total_sin - ss);
            let f = sc * sc + ss * ss;
            r.abs() <= eps_x && f >= -eps_f
        })
    };
    let compact = |assignment: &mut Vec<usize>| {
        let mut map = std::collections::BTreeMap::new();
        for a in assignment.iter_mut() {
            let next = map.len();
            *a = *map.entry(*a).or_insert(next);
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut temperature = config.annealing.initial_temperature.max(1e-12);
    let mut tried = 0usize;
    let mut accepted = 0usize;

    compact(&mut assignment);
    let mut sums = block_sums(&assignment);
    let mut cost = cost_of(&sums);

    // Best strict-valid snapshot: (num sets, neg max residual) lexicographic.
    let mut best: Option<(usize, Vec<usize>)> = None;
    let note_best = |assignment: &[usize], sums: &[(f64, f64)], best: &mut Option<(usize, Vec<usize>)>| {
        if state_valid(sums) {
            let k = sums.len();
            if best.as_ref().map_or(true, |(bk, _)| k > *bk) {
                *best = Some((k, assignment.to_vec()));
            }
        }
    };
    note_best(&assignment, &sums, &mut best);

    for _ in 0..config.annealing.move_budget {
        tried += 1;
        let mut proposal = assignment.clone();
        let k = sums.len();
        match rng.gen_range(0..3u8) {
            0 => {
                // relocate one path to an existing or fresh block
                let i = rng.gen_range(0..n);
                proposal[i] = rng.gen_range(0..=k);
            }
            1 => {
                // merge two blocks
                if k >= 2 {
                    let a = rng.gen_range(0..k);
                    let mut b = rng.gen_range(0..k);
                    if a == b {
                        b = (b + 1) % k;
                    }
                    for v in proposal.iter_mut() {
                        if *v == b {
                            *v = a;
                        }
                    }
                }
            }
            _ => {
                // split a block with a random mask
                let target = rng.gen_range(0..k);
                for v in proposal.iter_mut() {
                    if *v == target && rng.gen_bool(0.5) {
                        *v = k;
                    }
                }
            }
        }
        compact(&mut proposal);
        let new_sums = block_sums(&proposal);
        let new_cost = cost_of(&new_sums);
        let delta = new_cost - cost;
        let accept = delta <= 0.0 || rng.gen::<f64>() < (-delta / temperature).exp();
        if accept {
            accepted += 1;
            assignment = proposal;
            sums = new_sums;
            cost = new_cost;
            note_best(&assignment, &sums, &mut best);
        }
        temperature *= config.annealing.cooling_rate;
    }

    let (partition, fell_back) = match best {
        Some((_, assignment)) => {
            let blocks = SetPartitions::blocks(&assignment);
            let p = validate_partition(&blocks, ensemble, config)?;
            if p.valid {
                (p, false)
            } else {
                // per-set residuals passed but the aggregate conservation
                // margin did not; fall back rather than return an invalid cover
                (trivial_partition(ensemble, config)?, true)
            }
        }
        None => (trivial_partition(ensemble, config)?, true),
    };
    let finer = partition.num_sets() > 1;
    Ok(SolveOutcome {
        finer_than_trivial: finer,
        partition,
        trace: SolverTrace {
            strategy: Strategy::Annealing,
            seed: config.seed,
            moves_tried: tried,
            moves_accepted: accepted,
            fell_back_to_trivial: fell_back,
            notes,
        },
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
    fn oracle_on_singleton() {
        let e = ens(&[0.4]);
        let valid = enumerate_all_parsings(&e, &SolverConfig::default()).unwrap();
        assert_eq!(valid.len(), 1);
        assert!(valid[0].valid);
    }

    #[test]
    fn oracle_contains_the_worked_partitions() {
        let e = ens(&[0.0, 0.0, PI / 2.0]);
        let valid = enumerate_all_parsings(&e, &SolverConfig::default()).unwrap();
        let covers: Vec<Vec<Vec<usize>>> = valid.iter().map(|p| p.member_sets()).collect();
        assert!(covers.contains(&vec![vec![0, 1, 2]]));
        assert!(covers.contains(&vec![vec![0, 1], vec![2]]));
        // finest-first ordering
        assert!(valid[0].num_sets() >= valid.last().unwrap().num_sets());
    }

    #[test]
    fn oracle_never_empty_for_positive_probability() {
        let e = ens(&[0.3, 1.7, 2.2, 5.5]);
        let valid = enumerate_all_parsings(&e, &SolverConfig::default()).unwrap();
        assert!(!valid.is_empty());
    }

    #[test]
    fn oracle_refuses_over_budget_with_bell_count() {
        let e = ens(&vec![0.0; 11]);
        let err = enumerate_all_parsings(&e, &SolverConfig::default()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("678570"), "{msg}");
    }

    #[test]
    fn find_parsing_recovers_the_worked_split() {
        let e = ens(&[0.0, 0.0, PI / 2.0]);
        let out = find_parsing(&e, &SolverConfig::default()).unwrap();
        assert!(out.partition.valid);
        assert_eq!(out.partition.num_sets(), 2);
        assert!(out.finer_than_trivial);
        // containment in the oracle's valid list
        let valid = enumerate_all_parsings(&e, &SolverConfig::default()).unwrap();
        let covers: Vec<_> = valid.iter().map(|p| p.member_sets()).collect();
        assert!(covers.contains(&out.partition.member_sets()));
    }

    #[test]
    fn equal_action_ensemble_stays_trivial() {
        let e = ens(&[1.0; 5]);
        let out = find_parsing(&e, &SolverConfig::default()).unwrap();
        assert!(out.partition.valid);
        assert_eq!(out.partition.num_sets(), 1);
        assert!(!out.finer_than_trivial);
        assert_relative_eq!(out.partition.sets[0].probability, 25.0, max_relative = 1e-12);
        // the oracle agrees that no finer valid split exists
        let valid = enumerate_all_parsings(&e, &SolverConfig::default()).unwrap();
        assert!(valid.iter().all(|p| p.num_sets() == 1));
    }

    #[test]
    fn antipodal_structure_is_found() {
        // two cancelling pairs plus a remainder path
        let e = ens(&[0.3, 0.3 + PI, 1.9, 1.9 + PI, 0.7]);
        let out = find_parsing(&e, &SolverConfig::default()).unwrap();
        assert!(out.partition.valid);
        assert!(out.partition.num_sets() >= 3, "got {}", out.partition.num_sets());
        let valid = enumerate_all_parsings(&e, &SolverConfig::default()).unwrap();
        let covers: Vec<_> = valid.iter().map(|p| p.member_sets()).collect();
        assert!(covers.contains(&out.partition.member_sets()));
    }

    #[test]
    fn annealing_is_deterministic_per_seed() {
        let phases: Vec<f64> = vec![0.1, 0.1 + PI, 2.0, 4.5, 2.0, 5.9];
        let e = ens(&phases);
        let cfg = SolverConfig {
            strategy: Strategy::Annealing,
            seed: 42,
            ..Default::default()
        };
        let a = find_parsing(&e, &cfg).unwrap();
        let b = find_parsing(&e, &cfg).unwrap();
        assert_eq!(a.partition.member_sets(), b.partition.member_sets());
        assert!(a.partition.valid);
    }

    #[test]
    fn exhaustive_strategy_falls_back_above_budget() {
        let phases: Vec<f64> = (0..12).map(|i| i as f64 * 0.5).collect();
        let e = ens(&phases);
        let cfg = SolverConfig {
            strategy: Strategy::Exhaustive,
            ..Default::default()
        };
        let out = find_parsing(&e, &cfg).unwrap();
        assert!(out.partition.valid);
        assert!(out.trace.notes.iter().any(|n| n.contains("falling back")));
    }
}
