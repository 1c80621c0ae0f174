//! Classical action evaluation and ensemble phase sums.
//!
//! The discretization rule is fixed once here and reused verbatim by the
//! transfer-matrix oracle: forward-difference velocity, midpoint-averaged
//! potential, positions in physical units `site * dx`. For massive-particle
//! kinds each step contributes `[(m/2) v^2 - V_mid] dt`; for the optical
//! kind each step contributes the optical phase `k0 * n_mid * length` with
//! `length` the geometric length of the step segment in the (t, x) plane.

use serde::{Deserialize, Serialize};

use crate::error::{PathlabError, Result};
use crate::kahan::CompensatedSum;
use crate::lattice::{Path, PathEnsemble, SpacetimeLattice};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Global physical constants, natural units.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PhysicsConfig {
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub mass: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
        }
    }
}

impl PhysicsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.hbar > 0.0) {
            return Err(PathlabError::validation("hbar must be strictly positive"));
        }
        if !(self.mass > 0.0) {
            return Err(PathlabError::validation("mass must be strictly positive"));
        }
        Ok(())
    }
}

/// Per-cell scalar field covering the whole lattice, indexed `[slice][site]`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Grid(pub Vec<Vec<f64>>);

impl Grid {
    pub fn uniform(lattice: &SpacetimeLattice, value: f64) -> Self {
        Grid(vec![
            vec![value; lattice.num_sites()];
            lattice.num_slices()
        ])
    }

    pub fn at(&self, slice: usize, site: usize) -> f64 {
        self.0[slice][site]
    }

    pub fn set(&mut self, slice: usize, site: usize, value: f64) {
        self.0[slice][site] = value;
    }

    fn check_covers(&self, lattice: &SpacetimeLattice, what: &str) -> Result<()> {
        if self.0.len() != lattice.num_slices()
            || self.0.iter().any(|row| row.len() != lattice.num_sites())
        {
            return Err(PathlabError::validation(format!(
                "{what} grid does not cover the lattice ({} slices x {} sites required)",
                lattice.num_slices(),
                lattice.num_sites()
            )));
        }
        Ok(())
    }
}

/// The pluggable Lagrangian behind the action.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ActionFunctional {
    Free,
    Harmonic { omega: f64 },
    PotentialGrid { values: Grid },
    OpticalIndex { k0: f64, values: Grid },
}

impl ActionFunctional {
    pub fn validate_for(&self, lattice: &SpacetimeLattice) -> Result<()> {
        match self {
            ActionFunctional::Free => Ok(()),
            ActionFunctional::Harmonic { omega } => {
                if *omega < 0.0 {
                    Err(PathlabError::validation("omega must be nonnegative"))
                } else {
                    Ok(())
                }
            }
            ActionFunctional::PotentialGrid { values } => {
                values.check_covers(lattice, "potential")
            }
            ActionFunctional::OpticalIndex { k0, values } => {
                values.check_covers(lattice, "index")?;
                if !(*k0 > 0.0) {
                    return Err(PathlabError::validation("k0 must be strictly positive"));
                }
                if values.0.iter().flatten().any(|&n| n < 1.0) {
                    return Err(PathlabError::validation(
                        "optical index must be at least 1 everywhere",
                    ));
                }
                Ok(())
            }
        }
    }

    /// Potential at a cell, for the massive-particle kinds.
    fn potential(&self, lattice: &SpacetimeLattice, physics: &PhysicsConfig, slice: usize, site: usize) -> f64 {
        match self {
            ActionFunctional::Free => 0.0,
            ActionFunctional::Harmonic { omega } => {
                let x = lattice.position(site);
                0.5 * physics.mass * omega * omega * x * x
            }
            ActionFunctional::PotentialGrid { values } => values.at(slice, site),
            ActionFunctional::OpticalIndex { .. } => unreachable!("optical kind has no potential"),
        }
    }
}

/// Action contribution of the single step from `(k, from)` to `(k+1, to)`.
///
/// This is the one place the discretization rule lives; the path action is a
/// plain sum of these and the transfer-matrix kernel exponentiates them.
pub fn step_action(
    lattice: &SpacetimeLattice,
    functional: &ActionFunctional,
    physics: &PhysicsConfig,
    k: usize,
    from: usize,
    to: usize,
) -> f64 {
    let dt = lattice.dt();
    match functional {
        ActionFunctional::OpticalIndex { k0, values } => {
            let dxp = lattice.position(to) - lattice.position(from);
            let length = (dt * dt + dxp * dxp).sqrt();
            let n_mid = 0.5 * (values.at(k, from) + values.at(k + 1, to));
            physics.hbar * k0 * n_mid * length
        }
        _ => {
            let v = (lattice.position(to) - lattice.position(from)) / dt;
            let kinetic = 0.5 * physics.mass * v * v;
            let v_mid = 0.5
                * (functional.potential(lattice, physics, k, from)
                    + functional.potential(lattice, physics, k + 1, to));
            (kinetic - v_mid) * dt
        }
    }
}

/// Classical action S of one path.
pub fn compute_action(
    path: &Path,
    functional: &ActionFunctional,
    physics: &PhysicsConfig,
    lattice: &SpacetimeLattice,
) -> f64 {
    let sites = path.sites();
    let mut acc = CompensatedSum::new();
    for k in 0..sites.len() - 1 {
        acc.add(step_action(lattice, functional, physics, k, sites[k], sites[k + 1]));
    }
    acc.value()
}

/// The two global phase sums C = sum cos(S/hbar), D = sum sin(S/hbar).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EnsemblePhaseSums {
    pub total_cos: f64,
    pub total_sin: f64,
}

/// An ensemble with every path's action cached, ready for probability and
/// partition work. Construction consumes the geometric ensemble, so an
/// already-evaluated ensemble can never be evaluated again.
#[derive(Debug, Clone)]
pub struct EvaluatedEnsemble {
    geometry: Option<PathEnsemble>,
    actions: Vec<f64>,
    phase_cos: Vec<f64>,
    phase_sin: Vec<f64>,
    phase_sums: EnsemblePhaseSums,
    physics: PhysicsConfig,
}

impl EvaluatedEnsemble {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// The lattice-backed geometry, absent for explicit-action ensembles.
    pub fn geometry(&self) -> Option<&PathEnsemble> {
        self.geometry.as_ref()
    }

    pub fn actions(&self) -> &[f64] {
        &self.actions
    }

    /// cos(S/hbar) per path, in enumeration order.
    pub fn phase_cos(&self) -> &[f64] {
        &self.phase_cos
    }

    /// sin(S/hbar) per path, in enumeration order.
    pub fn phase_sin(&self) -> &[f64] {
        &self.phase_sin
    }

    pub fn phase_sums(&self) -> EnsemblePhaseSums {
        self.phase_sums
    }

    pub fn physics(&self) -> &PhysicsConfig {
        &self.physics
    }

    /// Builds an ensemble straight from a list of actions, bypassing lattice
    /// enumeration. Geometry-dependent operations reject such ensembles.
    pub fn from_actions(actions: Vec<f64>, physics: PhysicsConfig) -> Result<Self> {
        physics.validate()?;
        Ok(Self::finish(None, actions, physics))
    }

    fn finish(geometry: Option<PathEnsemble>, actions: Vec<f64>, physics: PhysicsConfig) -> Self {
        let hbar = physics.hbar;
        let phase_cos: Vec<f64> = actions.iter().map(|s| (s / hbar).cos()).collect();
        let phase_sin: Vec<f64> = actions.iter().map(|s| (s / hbar).sin()).collect();
        // Fixed-order compensated reduction: identical result at any thread count.
        let total_cos = CompensatedSum::sum_iter(phase_cos.iter().copied());
        let total_sin = CompensatedSum::sum_iter(phase_sin.iter().copied());
        Self {
            geometry,
            actions,
            phase_cos,
            phase_sin,
            phase_sums: EnsemblePhaseSums {
                total_cos,
                total_sin,
            },
            physics,
        }
    }
}

/// Fills every path's action and the global phase sums.
pub fn evaluate_ensemble(
    ensemble: PathEnsemble,
    functional: &ActionFunctional,
    physics: &PhysicsConfig,
) -> Result<EvaluatedEnsemble> {
    physics.validate()?;
    functional.validate_for(ensemble.lattice())?;
    let actions = compute_actions(&ensemble, functional, physics);
    Ok(EvaluatedEnsemble::finish(Some(ensemble), actions, *physics))
}

#[cfg(feature = "parallel")]
fn compute_actions(
    ensemble: &PathEnsemble,
    functional: &ActionFunctional,
    physics: &PhysicsConfig,
) -> Vec<f64> {
    ensemble
        .paths()
        .par_iter()
        .map(|p| compute_action(p, functional, physics, ensemble.lattice()))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn compute_actions(
    ensemble: &PathEnsemble,
    functional: &ActionFunctional,
    physics: &PhysicsConfig,
) -> Vec<f64> {
    ensemble
        .paths()
        .iter()
        .map(|p| compute_action(p, functional, physics, ensemble.lattice()))
        .collect()
}

/// Sequential action fill, kept callable with the parallel feature on so the
/// bench suite can compare both routes.
pub fn compute_actions_seq(
    ensemble: &PathEnsemble,
    functional: &ActionFunctional,
    physics: &PhysicsConfig,
) -> Vec<f64> {
    ensemble
        .paths()
        .iter()
        .map(|p| compute_action(p, functional, physics, ensemble.lattice()))
        .collect()
}
