//! Run configuration documents (JSON).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::action::{evaluate_ensemble, ActionFunctional, EvaluatedEnsemble, PhysicsConfig};
use crate::error::{PathlabError, Result};
use crate::lattice::{enumerate_paths, path_count, LatticeConfig, SpacetimeLattice};
use crate::parsing::SolverConfig;
use crate::scenario::ScenarioConfig;

pub const DEFAULT_BUDGET: u64 = 10_000_000;

fn default_budget() -> u64 {
    DEFAULT_BUDGET
}

/// One config document drives one run. Either a lattice (with a functional)
/// or an explicit action list defines the ensemble; `explicit_actions`
/// bypasses enumeration entirely and feeds hand-chosen actions straight to
/// the propagator and solver.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunDocument {
    #[serde(default)]
    pub lattice: Option<LatticeConfig>,
    #[serde(default)]
    pub functional: Option<ActionFunctional>,
    #[serde(default)]
    pub physics: PhysicsConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub explicit_actions: Option<Vec<f64>>,
    #[serde(default)]
    pub scenario: Option<ScenarioConfig>,
    /// Explicit member lists for `reconstruct`; when absent, the solver's
    /// partition supplies the sets.
    #[serde(default)]
    pub set_members: Option<Vec<Vec<usize>>>,
    /// Path-count enumeration budget.
    #[serde(default = "default_budget")]
    pub budget: u64,
}

impl RunDocument {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let doc: RunDocument = serde_json::from_str(&text)?;
        Ok(doc)
    }

    pub fn functional(&self) -> ActionFunctional {
        self.functional.clone().unwrap_or(ActionFunctional::Free)
    }

    /// Builds the validated lattice, or errors if the document has none.
    pub fn lattice(&self) -> Result<SpacetimeLattice> {
        let cfg = self
            .lattice
            .as_ref()
            .ok_or_else(|| PathlabError::validation("config document has no lattice section"))?;
        SpacetimeLattice::build(cfg)
    }

    /// Builds the evaluated ensemble from whichever source the document
    /// provides, enforcing the path-count budget for lattice runs.
    pub fn evaluated_ensemble(&self) -> Result<EvaluatedEnsemble> {
        if let Some(actions) = &self.explicit_actions {
            if self.lattice.is_some() {
                return Err(PathlabError::validation(
                    "provide either explicit_actions or a lattice, not both",
                ));
            }
            return EvaluatedEnsemble::from_actions(actions.clone(), self.physics);
        }
        let lattice = self.lattice()?;
        path_count(&lattice, self.budget as u128)?;
        evaluate_ensemble(enumerate_paths(&lattice), &self.functional(), &self.physics)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_actions_document_round_trips() {
        let doc: RunDocument = serde_json::from_str(
            r#"{"explicit_actions": [0.0, 0.0, 1.5707963267948966]}"#,
        )
        .unwrap();
        let e = doc.evaluated_ensemble().unwrap();
        assert_eq!(e.len(), 3);
    }

    #[test]
    fn lattice_document_builds_and_respects_budget() {
        let doc: RunDocument = serde_json::from_str(
            r#"{
                "lattice": {"num_slices": 3, "num_sites": 5, "dt": 1.0, "dx": 1.0,
                            "start_site": 2, "end_site": 2},
                "functional": {"kind": "free"},
                "budget": 4
            }"#,
        )
        .unwrap();
        assert!(matches!(
            doc.evaluated_ensemble(),
            Err(PathlabError::Budget(_))
        ));
    }

    #[test]
    fn ambiguous_source_is_rejected() {
        let doc: RunDocument = serde_json::from_str(
            r#"{
                "lattice": {"num_slices": 2, "num_sites": 2, "dt": 1.0, "dx": 1.0,
                            "start_site": 0, "end_site": 1},
                "explicit_actions": [1.0]
            }"#,
        )
        .unwrap();
        assert!(doc.evaluated_ensemble().is_err());
    }
}
