//! The discretized spacetime stage and exhaustive trajectory enumeration.
//!
//! A lattice has `T` time slices (both measurement events included) and `M`
//! spatial sites per slice. A trajectory visits exactly one site per slice,
//! is pinned to the start and end events, and may jump any number of sites
//! between consecutive slices. Barriers are forbidden `(slice, site)` pairs;
//! a trajectory touching one is excluded entirely.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{PathlabError, Result};

/// Raw lattice parameters as they appear in config documents.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LatticeConfig {
    pub num_slices: usize,
    pub num_sites: usize,
    pub dt: f64,
    pub dx: f64,
    pub start_site: usize,
    pub end_site: usize,
    #[serde(default)]
    pub blocked: Vec<(usize, usize)>,
}

/// A validated discretized spacetime stage.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacetimeLattice {
    num_slices: usize,
    num_sites: usize,
    dt: f64,
    dx: f64,
    start_site: usize,
    end_site: usize,
    blocked: BTreeSet<(usize, usize)>,
}

impl SpacetimeLattice {
    /// Validates the parameters and builds the lattice.
    pub fn build(config: &LatticeConfig) -> Result<Self> {
        if config.num_slices < 2 {
            return Err(PathlabError::validation(format!(
                "num_slices must be at least 2, got {}",
                config.num_slices
            )));
        }
        if config.num_sites < 1 {
            return Err(PathlabError::validation("num_sites must be at least 1"));
        }
        if !(config.dt > 0.0) {
            return Err(PathlabError::validation(format!(
                "dt must be positive, got {}",
                config.dt
            )));
        }
        if !(config.dx > 0.0) {
            return Err(PathlabError::validation(format!(
                "dx must be positive, got {}",
                config.dx
            )));
        }
        if config.start_site >= config.num_sites {
            return Err(PathlabError::validation(format!(
                "start_site {} out of range [0, {})",
                config.start_site, config.num_sites
            )));
        }
        if config.end_site >= config.num_sites {
            return Err(PathlabError::validation(format!(
                "end_site {} out of range [0, {})",
                config.end_site, config.num_sites
            )));
        }
        let blocked: BTreeSet<(usize, usize)> = config.blocked.iter().copied().collect();
        for &(slice, site) in &blocked {
            if slice >= config.num_slices || site >= config.num_sites {
                return Err(PathlabError::validation(format!(
                    "blocked cell ({slice}, {site}) outside the lattice"
                )));
            }
        }
        if blocked.contains(&(0, config.start_site)) {
            return Err(PathlabError::validation("start event site is blocked"));
        }
        if blocked.contains(&(config.num_slices - 1, config.end_site)) {
            return Err(PathlabError::validation("end event site is blocked"));
        }
        Ok(Self {
            num_slices: config.num_slices,
            num_sites: config.num_sites,
            dt: config.dt,
            dx: config.dx,
            start_site: config.start_site,
            end_site: config.end_site,
            blocked,
        })
    }

    pub fn num_slices(&self) -> usize {
        self.num_slices
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn start_site(&self) -> usize {
        self.start_site
    }

    pub fn end_site(&self) -> usize {
        self.end_site
    }

    pub fn is_blocked(&self, slice: usize, site: usize) -> bool {
        self.blocked.contains(&(slice, site))
    }

    pub fn blocked_cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.blocked.iter().copied()
    }

    /// Physical position of a site, in units of `dx`.
    pub fn position(&self, site: usize) -> f64 {
        site as f64 * self.dx
    }

    /// Returns a copy with a different end site (used for conditional sweeps).
    pub fn with_end_site(&self, end_site: usize) -> Result<Self> {
        let mut cfg = self.to_config();
        cfg.end_site = end_site;
        Self::build(&cfg)
    }

    /// Returns a copy with extra blocked cells.
    pub fn with_blocked(&self, extra: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut cfg = self.to_config();
        cfg.blocked.extend(extra);
        Self::build(&cfg)
    }

    pub fn to_config(&self) -> LatticeConfig {
        LatticeConfig {
            num_slices: self.num_slices,
            num_sites: self.num_sites,
            dt: self.dt,
            dx: self.dx,
            start_site: self.start_site,
            end_site: self.end_site,
            blocked: self.blocked.iter().copied().collect(),
        }
    }
}

/// One spacetime trajectory: one site per time slice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Path {
    sites: Vec<usize>,
}

impl Path {
    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    /// Site-index velocity on step `k` (slice k to k+1), in sites per step.
    pub fn site_step(&self, k: usize) -> isize {
        self.sites[k + 1] as isize - self.sites[k] as isize
    }
}

/// The complete endpoint-constrained trajectory set Q for one lattice.
///
/// Immutable once constructed; the pair set R is never materialized and is
/// always treated as the Cartesian square of `paths`.
#[derive(Debug, Clone)]
pub struct PathEnsemble {
    lattice: SpacetimeLattice,
    paths: Vec<Path>,
}

impl PathEnsemble {
    pub fn lattice(&self) -> &SpacetimeLattice {
        &self.lattice
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }
}

/// Enumerates every unblocked trajectory from the start event to the end
/// event, in lexicographic order of interior sites. A fully severed lattice
/// yields an empty ensemble, which is data rather than an error.
pub fn enumerate_paths(lattice: &SpacetimeLattice) -> PathEnsemble {
    let t = lattice.num_slices();
    let mut paths = Vec::new();
    if lattice.is_blocked(0, lattice.start_site())
        || lattice.is_blocked(t - 1, lattice.end_site())
    {
        return PathEnsemble {
            lattice: lattice.clone(),
            paths,
        };
    }
    let mut sites = vec![0usize; t];
    sites[0] = lattice.start_site();
    sites[t - 1] = lattice.end_site();
    if t == 2 {
        paths.push(Path { sites });
        return PathEnsemble {
            lattice: lattice.clone(),
            paths,
        };
    }

    // Odometer over interior slices 1..T-1, lexicographic, skipping barriers.
    let interior = t - 2;
    let m = lattice.num_sites();
    let mut cursor: Vec<usize> = Vec::with_capacity(interior);
    let mut slice = 1usize;
    let mut candidate = 0usize;
    loop {
        if candidate < m {
            if lattice.is_blocked(slice, candidate) {
                candidate += 1;
                continue;
            }
            cursor.push(candidate);
            if cursor.len() == interior {
                sites[1..t - 1].copy_from_slice(&cursor);
                paths.push(Path {
                    sites: sites.clone(),
                });
                candidate = cursor.pop().unwrap() + 1;
            } else {
                slice += 1;
                candidate = 0;
            }
        } else {
            // Backtrack one interior slice.
            match cursor.pop() {
                Some(prev) => {
                    slice -= 1;
                    candidate = prev + 1;
                }
                None => break,
            }
        }
    }
    PathEnsemble {
        lattice: lattice.clone(),
        paths,
    }
}

/// Counts endpoint-constrained unblocked trajectories by slice-to-slice
/// reachability, without enumerating them. Fails if the count exceeds
/// `budget`.
pub fn path_count(lattice: &SpacetimeLattice, budget: u128) -> Result<u128> {
    let t = lattice.num_slices();
    let m = lattice.num_sites();
    let mut counts = vec![0u128; m];
    counts[lattice.start_site()] = 1;
    for slice in 1..t {
        let reachable: u128 = counts.iter().sum();
        let mut next = vec![0u128; m];
        let sites: Box<dyn Iterator<Item = usize>> = if slice == t - 1 {
            Box::new(std::iter::once(lattice.end_site()))
        } else {
            Box::new(0..m)
        };
        for site in sites {
            if !lattice.is_blocked(slice, site) {
                next[site] = reachable;
            }
        }
        counts = next;
        let total: u128 = counts.iter().sum();
        if total > budget {
            return Err(PathlabError::budget(format!(
                "path count exceeds budget {budget} by slice {slice} (at least {total} routes)"
            )));
        }
    }
    Ok(counts[lattice.end_site()])
}
