//! Joint and conditional probabilities from amplitude sums, the real
//! pair-trajectory form, and the slice-product (transfer-matrix) oracle.
//!
//! Three algebraically identical routes to the same joint probability are
//! kept deliberately: |sum exp(iS/hbar)|^2, the global C^2 + D^2, and the
//! direct double sum of cos((S_A - S_B)/hbar) over the Cartesian square of
//! the ensemble. Their agreement is the main test surface of the crate.

use num_complex::Complex64;
use serde::Serialize;

use crate::action::{evaluate_ensemble, step_action, ActionFunctional, EvaluatedEnsemble, PhysicsConfig};
use crate::error::{PathlabError, Result};
use crate::kahan::CompensatedSum;
use crate::lattice::{enumerate_paths, SpacetimeLattice};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Above this ensemble size the O(n^2) pair route defers to C^2 + D^2.
pub const DIRECT_PAIR_LIMIT: usize = 200;

#[derive(Debug, Clone, Serialize)]
pub struct ProbabilityReport {
    /// Unnormalized joint probability |amplitude|^2.
    pub joint: f64,
    pub amplitude_re: f64,
    pub amplitude_im: f64,
    /// The real pair-trajectory value (equal to `joint` up to rounding).
    pub pair_sum: f64,
    /// True when barriers sever every route (empty ensemble).
    pub severed: bool,
}

/// Amplitude sum over the evaluated ensemble.
pub fn amplitude(ensemble: &EvaluatedEnsemble) -> Complex64 {
    let sums = ensemble.phase_sums();
    Complex64::new(sums.total_cos, sums.total_sin)
}

/// Joint probability of the two measurement events from the amplitude sum.
pub fn joint_probability(ensemble: &EvaluatedEnsemble) -> ProbabilityReport {
    let amp = amplitude(ensemble);
    ProbabilityReport {
        joint: amp.norm_sqr(),
        amplitude_re: amp.re,
        amplitude_im: amp.im,
        pair_sum: pair_sum(ensemble),
        severed: ensemble.is_empty(),
    }
}

/// Real pair-trajectory probability; direct double sum up to
/// [`DIRECT_PAIR_LIMIT`] paths, the C^2 + D^2 identity beyond.
pub fn pair_sum(ensemble: &EvaluatedEnsemble) -> f64 {
    if ensemble.len() <= DIRECT_PAIR_LIMIT {
        pair_sum_direct(ensemble)
    } else {
        let s = ensemble.phase_sums();
        s.total_cos * s.total_cos + s.total_sin * s.total_sin
    }
}

fn pair_row(ensemble: &EvaluatedEnsemble, a: usize) -> f64 {
    let hbar = ensemble.physics().hbar;
    let actions = ensemble.actions();
    let sa = actions[a];
    let mut row = CompensatedSum::new();
    for &sb in actions {
        row.add(((sa - sb) / hbar).cos());
    }
    row.value()
}

/// Direct double sum over ordered path pairs, O(n^2).
///
/// Rows are summed independently and combined in row order, so the result is
/// identical at every thread count.
#[cfg(feature = "parallel")]
pub fn pair_sum_direct(ensemble: &EvaluatedEnsemble) -> f64 {
    let rows: Vec<f64> = (0..ensemble.len())
        .into_par_iter()
        .map(|a| pair_row(ensemble, a))
        .collect();
    CompensatedSum::sum_iter(rows)
}

#[cfg(not(feature = "parallel"))]
pub fn pair_sum_direct(ensemble: &EvaluatedEnsemble) -> f64 {
    pair_sum_direct_seq(ensemble)
}

/// Sequential pair sum, kept for the bench comparison.
pub fn pair_sum_direct_seq(ensemble: &EvaluatedEnsemble) -> f64 {
    let rows = (0..ensemble.len()).map(|a| pair_row(ensemble, a));
    CompensatedSum::sum_iter(rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionalRow {
    pub site_index: usize,
    pub position: f64,
    /// Unnormalized joint value for this final site.
    pub joint: f64,
    /// Normalized conditional probability.
    pub probability: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionalReport {
    pub rows: Vec<ConditionalRow>,
    pub normalization: f64,
}

/// Conditional distribution over final sites: per-site joint values divided
/// by their discrete sum.
pub fn conditional_distribution(
    lattice: &SpacetimeLattice,
    functional: &ActionFunctional,
    physics: &PhysicsConfig,
) -> Result<ConditionalReport> {
    let last = lattice.num_slices() - 1;
    let mut rows = Vec::new();
    let mut norm = CompensatedSum::new();
    for site in 0..lattice.num_sites() {
        if lattice.is_blocked(last, site) {
            continue;
        }
        let swept = lattice.with_end_site(site)?;
        let evaluated = evaluate_ensemble(enumerate_paths(&swept), functional, physics)?;
        let joint = amplitude(&evaluated).norm_sqr();
        norm.add(joint);
        rows.push(ConditionalRow {
            site_index: site,
            position: lattice.position(site),
            joint,
            probability: 0.0,
        });
    }
    let normalization = norm.value();
    if normalization <= 0.0 {
        return Err(PathlabError::validation(
            "conditional normalization is zero: every final site is severed or dark",
        ));
    }
    for row in &mut rows {
        row.probability = row.joint / normalization;
    }
    Ok(ConditionalReport {
        rows,
        normalization,
    })
}

/// Slice-product amplitudes, one per final site.
///
/// The per-step kernel exponentiates exactly the same `step_action` the path
/// sum uses, so the two routes differ only in summation order. This is the
/// independent implementation the path sum is checked against.
pub fn transfer_matrix_amplitudes(
    lattice: &SpacetimeLattice,
    functional: &ActionFunctional,
    physics: &PhysicsConfig,
) -> Result<Vec<Complex64>> {
    physics.validate()?;
    functional.validate_for(lattice)?;
    let t = lattice.num_slices();
    let m = lattice.num_sites();
    let hbar = physics.hbar;
    let mut state = vec![Complex64::new(0.0, 0.0); m];
    state[lattice.start_site()] = Complex64::new(1.0, 0.0);
    for k in 0..t - 1 {
        let mut next = vec![Complex64::new(0.0, 0.0); m];
        for (to, slot) in next.iter_mut().enumerate() {
            if lattice.is_blocked(k + 1, to) {
                continue;
            }
            let mut re = CompensatedSum::new();
            let mut im = CompensatedSum::new();
            for (from, amp) in state.iter().enumerate() {
                if amp.re == 0.0 && amp.im == 0.0 {
                    continue;
                }
                if lattice.is_blocked(k, from) {
                    continue;
                }
                let phase = step_action(lattice, functional, physics, k, from, to) / hbar;
                let kernel = Complex64::new(phase.cos(), phase.sin());
                let term = amp * kernel;
                re.add(term.re);
                im.add(term.im);
            }
            *slot = Complex64::new(re.value(), im.value());
        }
        state = next;
    }
    Ok(state)
}

/// Transfer-matrix amplitude at the lattice's own end site.
pub fn transfer_matrix_end_amplitude(
    lattice: &SpacetimeLattice,
    functional: &ActionFunctional,
    physics: &PhysicsConfig,
) -> Result<Complex64> {
    Ok(transfer_matrix_amplitudes(lattice, functional, physics)?[lattice.end_site()])
}
