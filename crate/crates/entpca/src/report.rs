//! Runs a [`RunConfig`] end to end and renders the report.

use std::collections::BTreeMap;
use std::io::Write;

use entpca_core::pca::PcaBasis;
use entpca_core::{ErrorStats, Formula, Population, Space};
use serde::Serialize;

use crate::bench::{self, KMatchResult, RqVectors, Subsample, SweepConfig, RNG_DESCRIPTION};
use crate::config::RunConfig;
use crate::error::{contract, Error, Result};
use crate::io::load_csv;

pub const REPORT_FORMAT: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Versions {
    pub format: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub std_convention: &'static str,
    pub error_metric: &'static str,
    pub rng: &'static str,
    pub preprocessing_assumption: &'static str,
    pub m: usize,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub config: RunConfig,
    pub results: Vec<ErrorStats>,
    pub kmatch: Vec<KMatchResult>,
    pub versions: Versions,
    pub metadata: Metadata,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is always serializable");
        s.push('\n');
        s
    }

    pub fn find(&self, formula: Formula, k: usize, population: Population) -> Option<&ErrorStats> {
        self.results.iter().find(|s| s.formula == formula && s.k == k && s.population == population)
    }
}

/// Runs every experiment the config asks for, in a fixed order: for each k
/// in the listed order pairs, queries, column and row Rayleigh quotients;
/// then the k-match sweeps over pairs and queries.
pub fn run(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let data = load_csv(&cfg.dataset_path(), cfg.orientation, cfg.has_header)?;
    let (m, n) = (data.m(), data.n());
    if let Some(size) = cfg.subsample {
        if size > n {
            return Err(contract(format!("subsample size {size} exceeds n = {n}")));
        }
    }
    let basis = PcaBasis::new(&data, cfg.center)?;
    let subsample = cfg.subsample.map(|size| Subsample { size, seed: cfg.seed });

    let mut results = Vec::new();
    for &k in &cfg.k {
        let model = basis.model(k)?;
        results.extend(bench::pairwise_error_stats(&data, &model, subsample)?);
        if cfg.num_queries > 0 {
            results.extend(bench::query_error_stats(&data, &model, cfg.num_queries, cfg.seed)?);
        }
        if cfg.rq_vectors > 0 {
            let vectors = RqVectors::Gaussian { count: cfg.rq_vectors, seed: cfg.seed };
            for space in [Space::Column, Space::Row] {
                results.extend(bench::rq_error_stats(&data, &model, vectors, space)?);
            }
        }
    }

    let mut kmatch = Vec::new();
    if let Some(target_k) = cfg.kmatch_target_k {
        let sweep = SweepConfig {
            center: cfg.center,
            num_queries: cfg.num_queries,
            seed: cfg.seed,
            subsample: cfg.subsample,
        };
        kmatch.push(bench::k_match_sweep(&data, target_k, Population::Pairs, &sweep)?);
        if cfg.num_queries > 0 {
            kmatch.push(bench::k_match_sweep(&data, target_k, Population::Queries, &sweep)?);
        }
    }

    Ok(Report {
        config: cfg.clone(),
        results,
        kmatch,
        versions: Versions { format: REPORT_FORMAT },
        metadata: Metadata {
            std_convention: "population (divide by count)",
            error_metric: "absolute error of squared distances and Rayleigh quotients",
            rng: RNG_DESCRIPTION,
            preprocessing_assumption: if cfg.center {
                "centered: row means subtracted, no scaling"
            } else {
                "uncentered: raw values, no centering or scaling"
            },
            m,
            n,
        },
    })
}

/// Flat table: one row per (k, formula), one mean/std column pair per
/// population present in the results.
pub fn write_table_csv<W: Write>(results: &[ErrorStats], sink: W) -> Result<()> {
    let mut populations: Vec<Population> = results.iter().map(|s| s.population).collect();
    populations.sort();
    populations.dedup();
    let mut rows: BTreeMap<(usize, Formula), BTreeMap<Population, &ErrorStats>> = BTreeMap::new();
    for s in results {
        rows.entry((s.k, s.formula)).or_default().insert(s.population, s);
    }

    let mut w = csv::Writer::from_writer(sink);
    let mut header = vec!["k".to_string(), "formula".to_string()];
    for p in &populations {
        header.push(format!("{}_mean", p.name()));
        header.push(format!("{}_std", p.name()));
    }
    let csv_err = |e: csv::Error| Error::Write(e.into());
    w.write_record(&header).map_err(csv_err)?;
    for ((k, formula), cells) in &rows {
        let mut record = vec![k.to_string(), formula.name().to_string()];
        for p in &populations {
            match cells.get(p) {
                Some(s) => {
                    record.push(format!("{:.16e}", s.mean_abs_err));
                    record.push(format!("{:.16e}", s.std_abs_err));
                }
                None => record.extend([String::new(), String::new()]),
            }
        }
        w.write_record(&record).map_err(csv_err)?;
    }
    w.flush().map_err(Error::Write)
}
