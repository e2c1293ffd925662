use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;
use super::run::{ExperimentResult, ResultRow};
use crate::rates::{csv_field, LINK_RATE_CSV_HEADER};

pub const RESULTS_CSV_HEADER: &str = "experiment,n,scheme,statistic,value,stderr";
pub const CDF_CSV_HEADER: &str = "n,scheme,kind,value,cdf";

/// Revision recorded at build time, or `unknown`.
pub const GIT_REV: &str = match option_env!("ITLINQ_GIT_REV") {
    Some(r) => r,
    None => "unknown",
};

/// Hex SHA-256 of the canonical config JSON.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    hex::encode(Sha256::digest(cfg.to_canonical_json().as_bytes()))
}

pub fn results_csv(result: &ExperimentResult) -> String {
    let mut out = String::from(RESULTS_CSV_HEADER);
    out.push('\n');
    for r in &result.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.experiment.as_str(),
            r.n,
            csv_field(&r.scheme),
            r.statistic,
            r.value,
            r.stderr
        ));
    }
    out
}

pub fn cdf_csv(result: &ExperimentResult) -> String {
    let mut out = String::from(CDF_CSV_HEADER);
    out.push('\n');
    for c in &result.cdfs {
        for (v, f) in &c.points {
            out.push_str(&format!("{},{},{},{v},{f}\n", c.n, csv_field(&c.scheme), c.kind));
        }
    }
    out
}

pub fn link_rows_csv(result: &ExperimentResult) -> String {
    let mut out = String::from(LINK_RATE_CSV_HEADER);
    out.push('\n');
    for r in &result.link_rows {
        out.push_str(r);
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct Summary<'a> {
    config_hash: String,
    git_rev: &'a str,
    rows: &'a [ResultRow],
}

pub fn summary_json(cfg: &ExperimentConfig, result: &ExperimentResult) -> String {
    let s = Summary { config_hash: config_hash(cfg), git_rev: GIT_REV, rows: &result.rows };
    let mut out = serde_json::to_string_pretty(&s).expect("summary serializes");
    out.push('\n');
    out
}
