//! Squared-distance estimators between model columns and between an external
//! query and a model column.
//!
//! All three cost `O(k)` per pair once the model (and, for queries, the
//! [`QueryProjection`]) is available:
//!
//! - `classic = ‖w1_i − w1_j‖²`, the distance inside the captured subspace;
//! - `lower = classic + (√z_i − √z_j)²`, the tightest bound given only the
//!   residual norms, never above the true distance;
//! - `ent = classic + z_i + z_j`, the expected distance under the
//!   maximum-entropy residual model.
//!
//! `ent` is an expectation, not a metric: `ent(i, i) = 2 z_i`, and it can land
//! on either side of the true distance.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{contract, Result};
use crate::pca::{project, Dataset, PcaModel, QueryProjection};

/// The three estimates of one squared distance. `classic ≤ lower ≤ ent`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DistanceEstimate {
    pub classic: f64,
    pub lower: f64,
    pub ent: f64,
}

#[inline]
fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

// (√a − √b)² equals a + b − 2√(ab) but never goes negative and is exactly 0
// when a == b. Capped at a + b so that lower ≤ ent survives rounding.
#[inline]
fn lower_gap(za: f64, zb: f64) -> f64 {
    let d = libm::sqrt(za) - libm::sqrt(zb);
    (d * d).min(za + zb)
}

#[inline]
fn combine(classic: f64, za: f64, zb: f64) -> DistanceEstimate {
    DistanceEstimate { classic, lower: classic + lower_gap(za, zb), ent: classic + (za + zb) }
}

pub fn d_classic_cols(model: &PcaModel, i: usize, j: usize) -> Result<f64> {
    model.check_index(i)?;
    model.check_index(j)?;
    Ok(sq_dist(model.w1_col(i), model.w1_col(j)))
}

pub fn d_lower_cols(model: &PcaModel, i: usize, j: usize) -> Result<f64> {
    let z = model.z();
    Ok(d_classic_cols(model, i, j)? + lower_gap(z[i], z[j]))
}

/// Expected squared distance; `d_ent_cols(m, i, i) = 2 z_i`, not zero.
pub fn d_ent_cols(model: &PcaModel, i: usize, j: usize) -> Result<f64> {
    let z = model.z();
    Ok(d_classic_cols(model, i, j)? + (z[i] + z[j]))
}

pub fn estimate_cols(model: &PcaModel, i: usize, j: usize) -> Result<DistanceEstimate> {
    let classic = d_classic_cols(model, i, j)?;
    Ok(combine(classic, model.z()[i], model.z()[j]))
}

fn check_query(model: &PcaModel, q: &QueryProjection, j: usize) -> Result<()> {
    if q.w1_x.len() != model.k() {
        return Err(contract(format!("query projection has {} coefficients, model k = {}", q.w1_x.len(), model.k())));
    }
    model.check_index(j)
}

pub fn d_classic_query(model: &PcaModel, q: &QueryProjection, j: usize) -> Result<f64> {
    check_query(model, q, j)?;
    Ok(sq_dist(&q.w1_x, model.w1_col(j)))
}

pub fn d_lower_query(model: &PcaModel, q: &QueryProjection, j: usize) -> Result<f64> {
    Ok(d_classic_query(model, q, j)? + lower_gap(q.z_x, model.z()[j]))
}

pub fn d_ent_query(model: &PcaModel, q: &QueryProjection, j: usize) -> Result<f64> {
    Ok(d_classic_query(model, q, j)? + (q.z_x + model.z()[j]))
}

pub fn estimate_query(model: &PcaModel, q: &QueryProjection, j: usize) -> Result<DistanceEstimate> {
    let classic = d_classic_query(model, q, j)?;
    Ok(combine(classic, q.z_x, model.z()[j]))
}

/// Estimates from `x` to every column: one projection (`O(km)`) then `n`
/// evaluations of `O(k)` each.
pub fn batch_query(model: &PcaModel, x: &[f64]) -> Result<Vec<DistanceEstimate>> {
    let q = project(model, x)?;
    Ok(model
        .w1()
        .columns()
        .zip(model.z())
        .map(|(w, &zj)| combine(sq_dist(&q.w1_x, w), q.z_x, zj))
        .collect())
}

/// `‖a_i − a_j‖²` computed from the data, in `O(m)`.
pub fn exact_distance_cols(data: &Dataset, i: usize, j: usize) -> Result<f64> {
    for idx in [i, j] {
        if idx >= data.n() {
            return Err(contract(format!("column index {idx} out of range for n = {}", data.n())));
        }
    }
    Ok(sq_dist(data.item(i), data.item(j)))
}

/// `‖x − a_j‖²` computed from the data, in `O(m)`.
pub fn exact_distance_query(data: &Dataset, x: &[f64], j: usize) -> Result<f64> {
    if x.len() != data.m() {
        return Err(contract(format!("query has length {}, data has m = {}", x.len(), data.m())));
    }
    if j >= data.n() {
        return Err(contract(format!("column index {j} out of range for n = {}", data.n())));
    }
    Ok(sq_dist(x, data.item(j)))
}

/// Squared Euclidean distance between two equal-length vectors.
pub fn exact_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(contract(format!("vectors have lengths {} and {}", a.len(), b.len())));
    }
    Ok(sq_dist(a, b))
}
