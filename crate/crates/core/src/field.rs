//! Reconstruction of a spacetime field history from one path set.
//!
//! Amplitude comes from the path density: the squared amplitude at a cell is
//! the fraction of member paths occupying it, so each slice is normalized.
//! Phase is grown slice by slice from the start event, each step adding
//! `(m/hbar) * v * dx` with `v` the mean velocity of the member paths
//! leaving the cell; crossing paths therefore share the averaged velocity.

use serde::Serialize;

use crate::action::EvaluatedEnsemble;
use crate::error::{PathlabError, Result};
use crate::kahan::CompensatedSum;
use crate::parsing::PathSet;

/// A reconstructed amplitude/phase history plus its anomaly measures.
#[derive(Debug, Clone, Serialize)]
pub struct FieldHistory {
    /// Normalized amplitude per `[slice][site]`; sum of squares is 1 on
    /// every slice.
    pub amplitude: Vec<Vec<f64>>,
    /// Raw member-path counts per `[slice][site]`.
    pub counts: Vec<Vec<usize>>,
    /// Unwrapped phase, defined only where the amplitude is positive.
    /// Reference phase 0 at the start event; reports wrap it modulo 2 pi.
    pub phase: Vec<Vec<Option<f64>>>,
    /// Sorted member indices of the source set.
    pub members: Vec<usize>,
    /// F / n^2: 1 for equal-phase sets.
    pub coherence: f64,
    /// 1 - coherence.
    pub anomaly: f64,
}

/// Mean incoming/outgoing site velocities (physical units) for a cell.
fn mean_velocity(
    members: &[usize],
    ensemble: &EvaluatedEnsemble,
    slice: usize,
    site: usize,
    outgoing: bool,
) -> Option<f64> {
    let geometry = ensemble.geometry()?;
    let lattice = geometry.lattice();
    let mut acc = CompensatedSum::new();
    let mut count = 0usize;
    for &m in members {
        let path = &geometry.paths()[m];
        if path.sites()[slice] != site {
            continue;
        }
        let step = if outgoing {
            path.site_step(slice)
        } else {
            path.site_step(slice - 1)
        };
        acc.add(step as f64 * lattice.dx() / lattice.dt());
        count += 1;
    }
    if count == 0 {
        None
    } else {
        Some(acc.value() / count as f64)
    }
}

/// Coherence measure F / n^2 of a set (1 iff all member phases agree mod 2 pi).
pub fn coherence_measure(set: &PathSet) -> f64 {
    let n = set.members.len() as f64;
    (set.probability / (n * n)).clamp(0.0, 1.0)
}

/// Phase-anomaly measure 1 - F / n^2.
pub fn anomaly_measure(set: &PathSet) -> f64 {
    1.0 - coherence_measure(set)
}

/// Maps a path set to an amplitude/phase field history.
pub fn reconstruct_field(set: &PathSet, ensemble: &EvaluatedEnsemble) -> Result<FieldHistory> {
    if set.members.is_empty() {
        return Err(PathlabError::validation("cannot reconstruct an empty set"));
    }
    let geometry = ensemble
        .geometry()
        .ok_or_else(|| PathlabError::validation("explicit-action ensembles have no geometry to reconstruct"))?;
    let lattice = geometry.lattice();
    let t = lattice.num_slices();
    let m = lattice.num_sites();
    let n = set.members.len();
    let physics = ensemble.physics();
    let momentum_scale = physics.mass / physics.hbar * lattice.dx();

    let mut counts = vec![vec![0usize; m]; t];
    for &idx in &set.members {
        for (slice, &site) in geometry.paths()[idx].sites().iter().enumerate() {
            counts[slice][site] += 1;
        }
    }
    // amplitude^2 proportional to path density, normalized per slice
    let amplitude: Vec<Vec<f64>> = counts
        .iter()
        .map(|row| row.iter().map(|&c| (c as f64 / n as f64).sqrt()).collect())
        .collect();

    let mut phase: Vec<Vec<Option<f64>>> = vec![vec![None; m]; t];
    phase[0][lattice.start_site()] = Some(0.0);
    for slice in 1..t {
        for site in 0..m {
            if counts[slice][site] == 0 {
                continue;
            }
            // mean over incoming member paths of (previous phase + increment
            // from the previous cell's averaged outgoing velocity)
            let mut acc = CompensatedSum::new();
            let mut k = 0usize;
            for &idx in &set.members {
                let path = geometry.paths()[idx].sites();
                if path[slice] != site {
                    continue;
                }
                let prev_site = path[slice - 1];
                let prev_phase = phase[slice - 1][prev_site]
                    .expect("predecessor cell of a member path is occupied");
                let v_out = mean_velocity(&set.members, ensemble, slice - 1, prev_site, true)
                    .expect("occupied cell has outgoing members");
                acc.add(prev_phase + momentum_scale * v_out);
                k += 1;
            }
            phase[slice][site] = Some(acc.value() / k as f64);
        }
    }

    let coherence = coherence_measure(set);
    Ok(FieldHistory {
        amplitude,
        counts,
        phase,
        members: set.members.clone(),
        coherence,
        anomaly: 1.0 - coherence,
    })
}

/// Deviation between the reconstructed phase jumps and the de Broglie
/// increment from the mean incoming velocity, per occupied cell.
#[derive(Debug, Clone, Serialize)]
pub struct PhaseFrontReport {
    pub max_deviation: f64,
    /// Worst (slice, site), if any cell was checked.
    pub worst_cell: Option<(usize, usize)>,
    /// Maximum deviation per slice (slice 0 carries the reference phase and
    /// reports 0).
    pub per_slice_max: Vec<f64>,
}

/// Self-consistency check that member trajectories are normal to the phase
/// fronts: at every occupied cell past the start slice, compares the actual
/// phase jump into the cell against `(m/hbar) * v_in * dx`. Exact for
/// singleton sets by construction.
pub fn phase_front_check(field: &FieldHistory, ensemble: &EvaluatedEnsemble) -> Result<PhaseFrontReport> {
    let geometry = ensemble
        .geometry()
        .ok_or_else(|| PathlabError::validation("phase front check requires geometry"))?;
    let lattice = geometry.lattice();
    let physics = ensemble.physics();
    let momentum_scale = physics.mass / physics.hbar * lattice.dx();
    let t = lattice.num_slices();
    let m = lattice.num_sites();

    let mut per_slice_max = vec![0.0f64; t];
    let mut max_deviation = 0.0f64;
    let mut worst_cell = None;
    for slice in 1..t {
        for site in 0..m {
            if field.counts[slice][site] == 0 {
                continue;
            }
            // mean phase of predecessor cells, weighted per incoming path
            let mut acc = CompensatedSum::new();
            let mut k = 0usize;
            for &idx in &field.members {
                let path = geometry.paths()[idx].sites();
                if path[slice] != site {
                    continue;
                }
                acc.add(field.phase[slice - 1][path[slice - 1]].unwrap());
                k += 1;
            }
            let mean_prev = acc.value() / k as f64;
            let v_in = mean_velocity(&field.members, ensemble, slice, site, false).unwrap();
            let expected = mean_prev + momentum_scale * v_in;
            let actual = field.phase[slice][site].unwrap();
            let deviation = (actual - expected).abs();
            per_slice_max[slice] = per_slice_max[slice].max(deviation);
            if deviation > max_deviation {
                max_deviation = deviation;
                worst_cell = Some((slice, site));
            }
        }
    }
    Ok(PhaseFrontReport {
        max_deviation,
        worst_cell,
        per_slice_max,
    })
}
