//! PCA models augmented with per-column residual energies, and the
//! maximum-entropy estimators built on top of them.
//!
//! A truncated PCA of a data matrix `A` (items are columns) keeps the top-k
//! eigenvectors `V1` of `A Aᵀ` and the coefficients `W1 = V1ᵀ A`. Everything
//! that falls outside `span(V1)` is usually thrown away. This crate keeps one
//! extra number per column, the residual energy `z_i = ‖a_i‖² − ‖w1_i‖²`, and
//! uses it to correct the classical estimates:
//!
//! | quantity | classical | corrected |
//! |----------|-----------|-----------|
//! | `‖a_i − a_j‖²` | `‖w1_i − w1_j‖²` | `+ z_i + z_j` (expected value), `+ (√z_i − √z_j)²` (lower bound) |
//! | `xᵀAAᵀx/‖x‖²` | `‖W1ᵀV1ᵀx‖²/‖x‖²` | `+ δ(1 − ‖V1ᵀx‖²/‖x‖²)` |
//! | `yᵀAᵀAy/‖y‖²` | `‖W1y‖²/‖y‖²` | `+ Σ z_i y_i²/‖y‖²` |
//!
//! where `δ = Σ z_i / (m − k)`. The corrected forms are the expectations under
//! the maximum-entropy distribution of the unseen residual coefficients,
//! which is an independent zero-mean Gaussian per column with variance
//! `z_i / (m − k)`; see [`maxent`].
//!
//! The crate is `no_std` and only needs `alloc`. File formats, CSV input and
//! the benchmark harness live in the `entpca` crate.
//!
//! ```
//! use entpca_core::{estimators, pca, DenseMatrix, Dataset};
//!
//! let a = DenseMatrix::from_rows(&[&[2.0, 0.0], &[0.0, 1.0]]).unwrap();
//! let model = pca::fit(&Dataset::new(a).unwrap(), 1, false).unwrap();
//! assert_eq!(estimators::d_classic_cols(&model, 0, 1).unwrap(), 4.0);
//! assert_eq!(estimators::d_ent_cols(&model, 0, 1).unwrap(), 5.0);
//! ```

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod eig;
mod error;
pub mod estimators;
mod matrix;
pub mod maxent;
pub mod pca;
pub mod persist;
pub mod rayleigh;
pub mod stats;

pub use eig::{sym_eig, SymEigResult};
pub use error::{Error, PersistFault, Result};
pub use estimators::DistanceEstimate;
pub use matrix::{matmul, DenseMatrix};
pub use maxent::MaxEntSummary;
pub use pca::{Dataset, PcaBasis, PcaModel, Preprocessing, QueryProjection};
pub use rayleigh::{RayleighEstimate, Space};
pub use stats::{ErrorStats, Formula, Population};

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn sq_norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum()
}
