//! The maximum-entropy model of the discarded residual coefficients.
//!
//! Write `A = V1 W1 + V2 W2` where `V2` spans the `r = m − k` dimensional
//! orthogonal complement of the captured subspace. Only the column norms of
//! `W2` are known: `‖w2_i‖² = z_i`. The maximum-entropy distribution subject
//! to those constraints makes every entry of column `i` an independent
//! `N(0, z_i / r)`. Its log-determinant is
//!
//! ```text
//! ln Δ = Σ_i r·ln z_i − r·n·ln r
//! ```
//!
//! and its differential entropy is `½·r·n·ln(2πe) + ½·ln Δ`.
//!
//! `V2` and `W2` are never formed. The two expected matrices
//!
//! ```text
//! E[AᵀA] = W1ᵀW1 + Diag(z)
//! E[AAᵀ] = V1 W1 W1ᵀ V1ᵀ + δ (I − V1 V1ᵀ)
//! ```
//!
//! only need `z`, `δ` and projector algebra.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{E, PI};

use crate::error::{contract, Error, Result};
use crate::matrix::DenseMatrix;
use crate::pca::PcaModel;
use crate::{dot, sq_norm};

/// Log-determinant and entropy of the max-entropy residual distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxEntSummary {
    k_resid: usize,
    z: Vec<f64>,
    log_delta: f64,
    entropy: f64,
}

impl MaxEntSummary {
    /// Summary for residual dimension `k_resid` and per-column energies `z`,
    /// all of which must be strictly positive.
    pub fn from_residuals(k_resid: usize, z: Vec<f64>) -> Result<Self> {
        if k_resid == 0 {
            return Err(contract("residual dimension must be at least 1"));
        }
        if z.is_empty() {
            return Err(contract("need at least one column"));
        }
        if let Some(column) = z.iter().position(|&zi| zi.is_nan() || zi <= 0.0) {
            if z[column] == 0.0 {
                return Err(Error::Degenerate { column });
            }
            return Err(contract(format!("residual energy of column {column} is {}", z[column])));
        }
        let r = k_resid as f64;
        let n = z.len() as f64;
        let log_delta = r * z.iter().map(|&zi| libm::log(zi)).sum::<f64>() - r * n * libm::log(r);
        let entropy = 0.5 * r * n * libm::log(2.0 * PI * E) + 0.5 * log_delta;
        Ok(Self { k_resid, z, log_delta, entropy })
    }

    pub fn k_resid(&self) -> usize {
        self.k_resid
    }

    pub fn n(&self) -> usize {
        self.z.len()
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    /// Natural log of the determinant of the residual covariance.
    pub fn log_delta(&self) -> f64 {
        self.log_delta
    }

    /// Differential entropy in nats.
    pub fn entropy(&self) -> f64 {
        self.entropy
    }

    /// Log-density at an explicit residual sample `w2` of shape `k_resid × n`,
    /// whose column `i` has variance `z_i / k_resid` per entry.
    ///
    /// Only meant for toy sizes; real models never materialize `W2`.
    pub fn log_density(&self, w2: &DenseMatrix) -> Result<f64> {
        if w2.rows() != self.k_resid || w2.cols() != self.n() {
            return Err(contract(format!(
                "sample is {}x{}, summary expects {}x{}",
                w2.rows(),
                w2.cols(),
                self.k_resid,
                self.n()
            )));
        }
        let r = self.k_resid as f64;
        let quad: f64 = w2.columns().zip(&self.z).map(|(col, zi)| sq_norm(col) / zi).sum();
        let n = self.n() as f64;
        Ok(-0.5 * r * n * libm::log(2.0 * PI) - 0.5 * self.log_delta - 0.5 * r * quad)
    }
}

/// Max-entropy summary of a fitted model, with `k_resid = m − k`.
///
/// Fails with [`Error::Degenerate`] when some `z_i = 0`.
pub fn summarize(model: &PcaModel) -> Result<MaxEntSummary> {
    MaxEntSummary::from_residuals(model.m() - model.k(), model.z().to_vec())
}

/// `E[AᵀA] = W1ᵀW1 + Diag(z)`, an n×n matrix.
pub fn expected_gram(model: &PcaModel) -> DenseMatrix {
    let n = model.n();
    let mut data = alloc::vec![0.0; n * n];
    for j in 0..n {
        for i in 0..=j {
            let g = dot(model.w1_col(i), model.w1_col(j));
            data[j * n + i] = g;
            data[i * n + j] = g;
        }
        data[j * n + j] += model.z()[j];
    }
    DenseMatrix::from_raw(n, n, data)
}

/// `E[AAᵀ]·v` without forming the m×m matrix: the captured part
/// `V1 (W1 W1ᵀ)(V1ᵀ v)` plus `δ` times the component of `v` outside `span(V1)`.
pub fn expected_outer_apply(model: &PcaModel, v: &[f64]) -> Result<Vec<f64>> {
    if v.len() != model.m() {
        return Err(contract(format!("vector has length {}, model has m = {}", v.len(), model.m())));
    }
    let t = model.v1().tr_mul_vec(v)?;
    // W1 (W1ᵀ t)
    let s = model.w1().tr_mul_vec(&t)?;
    let u = model.w1().mul_vec(&s)?;
    let captured = model.v1().mul_vec(&u)?;
    let in_span = model.v1().mul_vec(&t)?;
    let delta = model.delta();
    Ok(captured
        .iter()
        .zip(v)
        .zip(&in_span)
        .map(|((c, x), p)| c + delta * (x - p))
        .collect())
}
