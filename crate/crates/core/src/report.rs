//! Report emission: JSON documents, CSV grids and tables, run manifests.
//!
//! Schemas (version 1):
//! - conditional / fringe CSV: `site_index,position,probability`
//! - field grid CSV: `slice,site,amplitude,phase,path_count` (phase wrapped
//!   to [0, 2 pi), empty where the amplitude vanishes)
//! - Sorkin CSV: `site_index,position,i1,i2,i3,i12,i13,i23,i123,sorkin`
//!
//! Reports carry no timestamps; only the manifest does, so identical runs
//! produce byte-identical report files.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::field::FieldHistory;
use crate::propagator::ConditionalReport;
use crate::scenario::TripleSlitReport;

pub const SCHEMA_VERSION: u32 = 1;

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn fmt_f64(value: f64) -> String {
    // shortest round-trippable representation, stable across runs
    format!("{value:?}")
}

pub fn conditional_csv(report: &ConditionalReport) -> String {
    let mut out = String::from("site_index,position,probability\n");
    for row in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{}",
            row.site_index,
            fmt_f64(row.position),
            fmt_f64(row.probability)
        );
    }
    out
}

pub fn field_csv(field: &FieldHistory) -> String {
    use std::f64::consts::TAU;
    let mut out = String::from("slice,site,amplitude,phase,path_count\n");
    for (slice, row) in field.amplitude.iter().enumerate() {
        for (site, &amp) in row.iter().enumerate() {
            let phase = field.phase[slice][site]
                .map(|p| fmt_f64(p.rem_euclid(TAU)))
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                slice,
                site,
                fmt_f64(amp),
                phase,
                field.counts[slice][site]
            );
        }
    }
    out
}

pub fn sorkin_csv(report: &TripleSlitReport) -> String {
    let mut out = String::from("site_index,position");
    for key in &report.combinations {
        let _ = write!(out, ",i{key}");
    }
    out.push_str(",sorkin\n");
    for row in &report.rows {
        let _ = write!(out, "{},{}", row.site_index, fmt_f64(row.position));
        for v in &row.intensities {
            let _ = write!(out, ",{}", fmt_f64(*v));
        }
        let _ = writeln!(out, ",{}", fmt_f64(row.sorkin));
    }
    out
}

/// Reproducibility metadata, one per run directory. The timestamp lives here
/// and nowhere else.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool_version: String,
    pub schema_version: u32,
    pub command: String,
    pub config_sha256: String,
    pub seed: u64,
    pub timestamp_unix: u64,
}

impl Manifest {
    pub fn new(command: &str, config_text: &str, seed: u64) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(config_text.as_bytes());
        let config_sha256 = format!("{:x}", hasher.finalize());
        let timestamp_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            config_sha256,
            seed,
            timestamp_unix,
        }
    }
}
