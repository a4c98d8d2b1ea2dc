//! Error statistics of the estimators against exact values, over column
//! pairs, Gaussian queries and Rayleigh-quotient vectors, plus the
//! k-to-match-error sweep.
//!
//! Randomness comes from `ChaCha8Rng` seeded with `seed_from_u64(seed)` and a
//! fixed stream per purpose (see the `STREAM_*` constants), with
//! `StandardNormal` samples drawn in order, one vector after another. Work is
//! spread over the current rayon pool, but every per-item error lands in a
//! fixed slot and sums run serially in index order, so results do not depend
//! on the thread count.

use entpca_core::estimators::{batch_query, estimate_cols};
use entpca_core::pca::PcaBasis;
use entpca_core::rayleigh::{rq_estimate, rq_exact};
use entpca_core::{Dataset, ErrorStats, Formula, PcaModel, Population, Preprocessing, Space};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{contract, Result};

pub const RNG_DESCRIPTION: &str =
    "ChaCha8Rng::seed_from_u64(seed) with per-purpose stream ids (rand_chacha 0.9); N(0,1) via rand_distr 0.5 StandardNormal";

pub const STREAM_SUBSAMPLE: u64 = 1;
pub const STREAM_QUERIES: u64 = 2;
pub const STREAM_RQ_COLUMN: u64 = 3;
pub const STREAM_RQ_ROW: u64 = 4;

pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `count` i.i.d. standard Gaussian vectors of length `len`.
pub fn gaussian_vectors(seed: u64, stream: u64, count: usize, len: usize) -> Vec<Vec<f64>> {
    let mut rng = seeded_rng(seed, stream);
    (0..count).map(|_| (0..len).map(|_| rng.sample(StandardNormal)).collect()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Subsample {
    pub size: usize,
    pub seed: u64,
}

/// Column indices to evaluate, ascending. `None` keeps every column.
pub fn subsample_columns(n: usize, subsample: Option<Subsample>) -> Result<Vec<usize>> {
    match subsample {
        None => Ok((0..n).collect()),
        Some(Subsample { size, .. }) if size > n => {
            Err(contract(format!("subsample size {size} exceeds n = {n}")))
        }
        Some(Subsample { size, .. }) if size < 2 => Err(contract("subsample needs at least 2 columns")),
        Some(Subsample { size, seed }) => {
            let mut rng = seeded_rng(seed, STREAM_SUBSAMPLE);
            let mut cols = index::sample(&mut rng, n, size).into_vec();
            cols.sort_unstable();
            Ok(cols)
        }
    }
}

fn check_fitted(data: &Dataset, model: &PcaModel) -> Result<()> {
    if data.m() != model.m() || data.n() != model.n() {
        return Err(contract(format!(
            "dataset is {}x{} but model was fitted on {}x{}",
            data.m(),
            data.n(),
            model.m(),
            model.n()
        )));
    }
    Ok(())
}

/// `|estimate − exact|` for classic, lower, ent over pairs `i < j` of `cols`,
/// in lexicographic order.
pub fn pair_errors(data: &Dataset, model: &PcaModel, cols: &[usize]) -> Result<Vec<[f64; 3]>> {
    check_fitted(data, model)?;
    let rows: Vec<Vec<[f64; 3]>> = (0..cols.len())
        .into_par_iter()
        .map(|a| {
            let i = cols[a];
            cols[a + 1..]
                .iter()
                .map(|&j| {
                    let e = estimate_cols(model, i, j).expect("indices checked");
                    let exact = sq_dist(data.item(i), data.item(j));
                    [(e.classic - exact).abs(), (e.lower - exact).abs(), (e.ent - exact).abs()]
                })
                .collect()
        })
        .collect();
    Ok(rows.concat())
}

/// `|estimate − exact|` for every (query, column) pair, query-major.
pub fn query_errors(data: &Dataset, model: &PcaModel, queries: &[Vec<f64>]) -> Result<Vec<[f64; 3]>> {
    check_fitted(data, model)?;
    let rows: Vec<Vec<[f64; 3]>> = queries
        .par_iter()
        .map(|x| {
            let est = batch_query(model, x)?;
            Ok(est
                .iter()
                .enumerate()
                .map(|(j, e)| {
                    let exact = sq_dist(x, data.item(j));
                    [(e.classic - exact).abs(), (e.lower - exact).abs(), (e.ent - exact).abs()]
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(rows.concat())
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn stats<const N: usize>(
    errors: &[[f64; N]],
    formulas: [Formula; N],
    k: usize,
    population: Population,
) -> Result<Vec<ErrorStats>> {
    formulas
        .iter()
        .enumerate()
        .map(|(f, &formula)| {
            let column: Vec<f64> = errors.iter().map(|e| e[f]).collect();
            Ok(ErrorStats::from_abs_errors(formula, k, population, &column)?)
        })
        .collect()
}

fn mean_errors<const N: usize>(errors: &[[f64; N]]) -> [f64; N] {
    let mut out = [0.0; N];
    for (f, slot) in out.iter_mut().enumerate() {
        *slot = errors.iter().map(|e| e[f]).sum::<f64>() / errors.len() as f64;
    }
    out
}

/// Statistics over all unordered column pairs of the (optionally subsampled)
/// columns.
pub fn pairwise_error_stats(data: &Dataset, model: &PcaModel, subsample: Option<Subsample>) -> Result<Vec<ErrorStats>> {
    let cols = subsample_columns(data.n(), subsample)?;
    let errors = pair_errors(data, model, &cols)?;
    stats(&errors, Formula::DISTANCE, model.k(), Population::Pairs)
}

/// Statistics over `num_queries` seeded standard-Gaussian queries against
/// every column.
pub fn query_error_stats(data: &Dataset, model: &PcaModel, num_queries: usize, seed: u64) -> Result<Vec<ErrorStats>> {
    if num_queries == 0 {
        return Err(contract("num_queries must be at least 1"));
    }
    let queries = gaussian_vectors(seed, STREAM_QUERIES, num_queries, data.m());
    let errors = query_errors(data, model, &queries)?;
    stats(&errors, Formula::DISTANCE, model.k(), Population::Queries)
}

/// Which vectors a Rayleigh-quotient experiment evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RqVectors {
    Gaussian { count: usize, seed: u64 },
    /// Every standard basis vector of the space, in order.
    Basis,
}

pub fn rq_vectors(data: &Dataset, vectors: RqVectors, space: Space) -> Vec<Vec<f64>> {
    let len = match space {
        Space::Column => data.m(),
        Space::Row => data.n(),
    };
    match vectors {
        RqVectors::Gaussian { count, seed } => {
            let stream = if space == Space::Column { STREAM_RQ_COLUMN } else { STREAM_RQ_ROW };
            gaussian_vectors(seed, stream, count, len)
        }
        RqVectors::Basis => (0..len)
            .map(|i| {
                let mut e = vec![0.0; len];
                e[i] = 1.0;
                e
            })
            .collect(),
    }
}

/// `|r_classic − r|` and `|r_ent − r|`. A centered model is compared against
/// the centered data, since that is the matrix it approximates.
pub fn rq_error_stats(data: &Dataset, model: &PcaModel, vectors: RqVectors, space: Space) -> Result<Vec<ErrorStats>> {
    check_fitted(data, model)?;
    if let RqVectors::Gaussian { count: 0, .. } = vectors {
        return Err(contract("need at least one Rayleigh-quotient vector"));
    }
    let centered;
    let data = if model.preprocessing() == Preprocessing::Centered && data.preprocessing() == Preprocessing::None {
        centered = data.centered();
        &centered
    } else {
        data
    };
    let vs = rq_vectors(data, vectors, space);
    let errors: Vec<[f64; 2]> = vs
        .par_iter()
        .map(|v| {
            let est = rq_estimate(model, v, space)?;
            let exact = rq_exact(data, v, space)?;
            Ok([(est.classic - exact).abs(), (est.ent - exact).abs()])
        })
        .collect::<Result<_>>()?;
    let population = match space {
        Space::Column => Population::RqColumn,
        Space::Row => Population::RqRow,
    };
    stats(&errors, Formula::RAYLEIGH, model.k(), population)
}

/// Settings shared by every rank visited in a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepConfig {
    pub center: bool,
    pub num_queries: usize,
    pub seed: u64,
    pub subsample: Option<usize>,
}

/// Mean absolute error of each distance formula at one rank.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub k: usize,
    pub classic: f64,
    pub lower: f64,
    pub ent: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatchedK {
    pub formula: Formula,
    /// Smallest rank whose mean error reaches the target, if any rank below
    /// m does.
    #[serde(serialize_with = "matched_k_or_sentinel")]
    pub k: Option<usize>,
}

pub const NOT_REACHED: &str = "not reached at k = m-1";

fn matched_k_or_sentinel<S: Serializer>(k: &Option<usize>, s: S) -> Result<S::Ok, S::Error> {
    match k {
        Some(k) => s.serialize_u64(*k as u64),
        None => s.serialize_str(NOT_REACHED),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KMatchResult {
    pub target_formula: Formula,
    pub target_k: usize,
    pub target_err: f64,
    pub population: Population,
    pub matched: Vec<MatchedK>,
    /// Mean errors for every rank `1..m`, ready for plotting.
    pub curve: Vec<CurvePoint>,
}

impl KMatchResult {
    pub fn matched_k(&self, formula: Formula) -> Option<usize> {
        self.matched.iter().find(|m| m.formula == formula).and_then(|m| m.k)
    }
}

type MeanErrorsAt<'a> = Box<dyn Fn(&PcaModel) -> Result<[f64; 3]> + Sync + 'a>;

/// Measures `ent`'s mean error at `target_k`, then the smallest rank at which
/// `classic` and `lower` do at least as well. The same pair subsample or
/// query set is used at every rank.
pub fn k_match_sweep(data: &Dataset, target_k: usize, population: Population, cfg: &SweepConfig) -> Result<KMatchResult> {
    let m = data.m();
    if target_k == 0 || target_k + 1 >= m {
        return Err(contract(format!("target k = {target_k} must satisfy 1 <= k < m - 1 = {}", m - 1)));
    }
    let basis = PcaBasis::new(data, cfg.center)?;
    let curve_at: MeanErrorsAt = match population {
        Population::Pairs => {
            let cols = subsample_columns(data.n(), cfg.subsample.map(|size| Subsample { size, seed: cfg.seed }))?;
            Box::new(move |model| Ok(mean_errors(&pair_errors(data, model, &cols)?)))
        }
        Population::Queries => {
            if cfg.num_queries == 0 {
                return Err(contract("num_queries must be at least 1"));
            }
            let queries = gaussian_vectors(cfg.seed, STREAM_QUERIES, cfg.num_queries, m);
            Box::new(move |model| Ok(mean_errors(&query_errors(data, model, &queries)?)))
        }
        other => return Err(contract(format!("k-match sweep needs pairs or queries, got {}", other.name()))),
    };

    let mut curve = Vec::with_capacity(m - 1);
    for k in 1..m {
        let [classic, lower, ent] = curve_at(&basis.model(k)?)?;
        curve.push(CurvePoint { k, classic, lower, ent });
    }
    let target_err = curve[target_k - 1].ent;
    let first_reaching = |pick: fn(&CurvePoint) -> f64| curve.iter().find(|p| pick(p) <= target_err).map(|p| p.k);
    let matched = vec![
        MatchedK { formula: Formula::Classic, k: first_reaching(|p| p.classic) },
        MatchedK { formula: Formula::Lower, k: first_reaching(|p| p.lower) },
    ];
    Ok(KMatchResult { target_formula: Formula::Ent, target_k, target_err, population, matched, curve })
}
