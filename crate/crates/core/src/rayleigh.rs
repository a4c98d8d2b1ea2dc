//! Rayleigh quotients `r(v) = vᵀBv / ‖v‖²` for the column-space form
//! `B = AAᵀ` and the row-space form `B = AᵀA`, exact and estimated.
//!
//! The corrected ("ent") estimates add the expected contribution of the
//! discarded residual:
//!
//! - column space: `δ·(1 − ‖V1ᵀx‖²/‖x‖²)`, with the factor clamped to `[0, 1]`;
//! - row space: `Σ z_i y_i² / ‖y‖²`.
//!
//! Both corrections are non-negative, so `ent ≥ classic` always.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{contract, Result};
use crate::pca::{Dataset, PcaModel};
use crate::{dot, sq_norm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Space {
    /// `B = AAᵀ`, vectors of length m.
    Column,
    /// `B = AᵀA`, vectors of length n.
    Row,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RayleighEstimate {
    pub classic: f64,
    pub ent: f64,
}

fn checked_norm(v: &[f64], len: usize, what: &str) -> Result<f64> {
    if v.len() != len {
        return Err(contract(format!("{what} vector has length {}, expected {len}", v.len())));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(contract(format!("{what} vector has non-finite entries")));
    }
    let norm = sq_norm(v);
    if norm == 0.0 {
        return Err(contract(format!("{what} vector is zero")));
    }
    Ok(norm)
}

/// Exact quotient, without forming `B`: `‖Aᵀv‖²/‖v‖²` or `‖Av‖²/‖v‖²`.
pub fn rq_exact(data: &Dataset, v: &[f64], space: Space) -> Result<f64> {
    let a = data.matrix();
    match space {
        Space::Column => {
            let norm = checked_norm(v, data.m(), "column-space")?;
            Ok(sq_norm(&a.tr_mul_vec(v)?) / norm)
        }
        Space::Row => {
            let norm = checked_norm(v, data.n(), "row-space")?;
            Ok(sq_norm(&a.mul_vec(v)?) / norm)
        }
    }
}

fn col_parts(model: &PcaModel, x: &[f64]) -> Result<(f64, f64)> {
    let norm = checked_norm(x, model.m(), "column-space")?;
    let t = model.v1().tr_mul_vec(x)?;
    let captured: f64 = model.w1().columns().map(|w| {
        let s = dot(w, &t);
        s * s
    }).sum();
    let outside = (1.0 - sq_norm(&t) / norm).clamp(0.0, 1.0);
    Ok((captured / norm, model.delta() * outside))
}

/// `‖W1ᵀ V1ᵀ x‖² / ‖x‖²`.
pub fn rq_classic_col(model: &PcaModel, x: &[f64]) -> Result<f64> {
    Ok(col_parts(model, x)?.0)
}

/// `rq_classic_col(x) + δ·(1 − ‖V1ᵀx‖²/‖x‖²)`.
pub fn rq_ent_col(model: &PcaModel, x: &[f64]) -> Result<f64> {
    let (classic, correction) = col_parts(model, x)?;
    Ok(classic + correction)
}

fn row_parts(model: &PcaModel, y: &[f64]) -> Result<(f64, f64)> {
    let norm = checked_norm(y, model.n(), "row-space")?;
    let s: Vec<f64> = model.w1().mul_vec(y)?;
    let resid: f64 = model.z().iter().zip(y).map(|(z, yi)| z * yi * yi).sum();
    Ok((sq_norm(&s) / norm, resid / norm))
}

/// `‖W1 y‖² / ‖y‖²`.
pub fn rq_classic_row(model: &PcaModel, y: &[f64]) -> Result<f64> {
    Ok(row_parts(model, y)?.0)
}

/// `rq_classic_row(y) + Σ z_i y_i² / ‖y‖²`. Exact on standard basis vectors.
pub fn rq_ent_row(model: &PcaModel, y: &[f64]) -> Result<f64> {
    let (classic, correction) = row_parts(model, y)?;
    Ok(classic + correction)
}

pub fn rq_estimate(model: &PcaModel, v: &[f64], space: Space) -> Result<RayleighEstimate> {
    let (classic, correction) = match space {
        Space::Column => col_parts(model, v)?,
        Space::Row => row_parts(model, v)?,
    };
    Ok(RayleighEstimate { classic, ent: classic + correction })
}
