//! Truncated PCA with the side information the corrected estimators need.
//!
//! Fitting is uncentered by default: the basis is the top-k eigenvectors of
//! `B = A Aᵀ` of the data as given. With `center = true` the row means are
//! subtracted first and stored in the model, and [`project`] subtracts them
//! from every query.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::eig::{sym_eig, SymEigResult};
use crate::error::{contract, Error, Result};
use crate::matrix::DenseMatrix;
use crate::{dot, sq_norm};

/// Residual energies above `-CLAMP_TOL * ‖a_i‖²` are roundoff and clamp to 0.
pub const CLAMP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Preprocessing {
    #[default]
    None,
    Centered,
}

/// Data items are the columns of `matrix` (m features × n items).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    matrix: DenseMatrix,
    item_labels: Option<Vec<String>>,
    preprocessing: Preprocessing,
}

impl Dataset {
    pub fn new(matrix: DenseMatrix) -> Result<Self> {
        if matrix.rows() < 2 || matrix.cols() < 2 {
            return Err(contract(format!(
                "dataset needs m >= 2 features and n >= 2 items, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self { matrix, item_labels: None, preprocessing: Preprocessing::None })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(contract(format!("{} labels for {} items", labels.len(), self.n())));
        }
        self.item_labels = Some(labels);
        Ok(self)
    }

    /// Wraps a matrix whose rows already sum to zero.
    pub fn new_centered(matrix: DenseMatrix) -> Result<Self> {
        let mut ds = Self::new(matrix)?;
        let n = ds.n() as f64;
        let tol = 1e-9 * n * ds.matrix.max_abs();
        for r in 0..ds.m() {
            let s: f64 = (0..ds.n()).map(|c| ds.matrix.get(r, c)).sum();
            if s.abs() > tol {
                return Err(contract(format!("row {r} sums to {s:e}, not centered")));
            }
        }
        ds.preprocessing = Preprocessing::Centered;
        Ok(ds)
    }

    /// Row means of the matrix.
    pub fn row_means(&self) -> Vec<f64> {
        let n = self.n() as f64;
        let mut mean = alloc::vec![0.0; self.m()];
        for col in self.matrix.columns() {
            for (s, x) in mean.iter_mut().zip(col) {
                *s += x;
            }
        }
        mean.iter_mut().for_each(|s| *s /= n);
        mean
    }

    /// Copy with row means subtracted.
    pub fn centered(&self) -> Self {
        let mean = self.row_means();
        let mut data = Vec::with_capacity(self.m() * self.n());
        for col in self.matrix.columns() {
            data.extend(col.iter().zip(&mean).map(|(x, mu)| x - mu));
        }
        Self {
            matrix: DenseMatrix::from_raw(self.m(), self.n(), data),
            item_labels: self.item_labels.clone(),
            preprocessing: Preprocessing::Centered,
        }
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn item_labels(&self) -> Option<&[String]> {
        self.item_labels.as_deref()
    }

    pub fn preprocessing(&self) -> Preprocessing {
        self.preprocessing
    }

    /// Feature size.
    pub fn m(&self) -> usize {
        self.matrix.rows()
    }

    /// Number of items.
    pub fn n(&self) -> usize {
        self.matrix.cols()
    }

    pub fn item(&self, i: usize) -> &[f64] {
        self.matrix.col(i)
    }
}

/// Truncated PCA model `A ≈ V1 W1` plus column norms and residual energies.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    pub(crate) v1: DenseMatrix,
    pub(crate) w1: DenseMatrix,
    pub(crate) col_sq_norms: Vec<f64>,
    pub(crate) z: Vec<f64>,
    pub(crate) delta: f64,
    pub(crate) preprocessing: Preprocessing,
    pub(crate) mean: Option<Vec<f64>>,
}

impl PcaModel {
    /// Reassembles a model from stored parts, checking shapes and signs.
    ///
    /// The algebraic invariants (orthonormal `v1`, energy split) are not
    /// re-derived here since the data matrix is not available.
    pub fn from_parts(
        v1: DenseMatrix,
        w1: DenseMatrix,
        col_sq_norms: Vec<f64>,
        z: Vec<f64>,
        delta: f64,
        mean: Option<Vec<f64>>,
    ) -> Result<Self> {
        let (m, k, n) = (v1.rows(), v1.cols(), w1.cols());
        if k >= m {
            return Err(Error::RankOutOfRange { k, m });
        }
        if w1.rows() != k {
            return Err(contract(format!("w1 has {} rows, expected k = {k}", w1.rows())));
        }
        if col_sq_norms.len() != n || z.len() != n {
            return Err(contract(format!("per-column vectors must have length n = {n}")));
        }
        let bad = |x: &f64| !x.is_finite() || *x < 0.0;
        if col_sq_norms.iter().any(bad) || z.iter().any(bad) || bad(&delta) {
            return Err(contract("norms, residual energies and delta must be finite and >= 0"));
        }
        if let Some(mu) = &mean {
            if mu.len() != m || mu.iter().any(|x| !x.is_finite()) {
                return Err(contract(format!("mean vector must have {m} finite entries")));
            }
        }
        let preprocessing = if mean.is_some() { Preprocessing::Centered } else { Preprocessing::None };
        Ok(Self { v1, w1, col_sq_norms, z, delta, preprocessing, mean })
    }

    pub fn k(&self) -> usize {
        self.v1.cols()
    }

    pub fn m(&self) -> usize {
        self.v1.rows()
    }

    pub fn n(&self) -> usize {
        self.w1.cols()
    }

    /// m×k basis with orthonormal columns.
    pub fn v1(&self) -> &DenseMatrix {
        &self.v1
    }

    /// k×n coefficients; column `i` is `w1_i = V1ᵀ a_i`.
    pub fn w1(&self) -> &DenseMatrix {
        &self.w1
    }

    pub fn w1_col(&self, i: usize) -> &[f64] {
        self.w1.col(i)
    }

    /// `‖a_i‖²` of the (possibly centered) columns.
    pub fn col_sq_norms(&self) -> &[f64] {
        &self.col_sq_norms
    }

    /// Residual energies `z_i = ‖a_i‖² − ‖w1_i‖²`.
    pub fn z(&self) -> &[f64] {
        &self.z
    }

    /// `Σ z_i / (m − k)`.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn preprocessing(&self) -> Preprocessing {
        self.preprocessing
    }

    /// Row means subtracted before fitting, when centered.
    pub fn mean(&self) -> Option<&[f64]> {
        self.mean.as_deref()
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.n() {
            return Err(contract(format!("column index {i} out of range for n = {}", self.n())));
        }
        Ok(())
    }
}

/// Projection of an external vector onto a model's captured subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryProjection {
    pub w1_x: Vec<f64>,
    pub z_x: f64,
    pub x_sq_norm: f64,
}

/// The full eigendecomposition of `A Aᵀ`, from which models of any rank are
/// cut without refactoring.
#[derive(Debug, Clone)]
pub struct PcaBasis {
    data: DenseMatrix,
    mean: Option<Vec<f64>>,
    col_sq_norms: Vec<f64>,
    spectrum: SymEigResult,
}

impl PcaBasis {
    pub fn new(data: &Dataset, center: bool) -> Result<Self> {
        let (matrix, mean) = if center {
            let mean = data.row_means();
            (data.centered().matrix, Some(mean))
        } else {
            (data.matrix.clone(), None)
        };
        let col_sq_norms = matrix.columns().map(sq_norm).collect();
        let spectrum = sym_eig(&matrix.outer_gram())?;
        Ok(Self { data: matrix, mean, col_sq_norms, spectrum })
    }

    /// Eigenvalues of `A Aᵀ`, non-increasing.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum.eigenvalues
    }

    pub fn m(&self) -> usize {
        self.data.rows()
    }

    /// Rank-k model: top-k eigenvectors, coefficients and residual energies.
    pub fn model(&self, k: usize) -> Result<PcaModel> {
        let (m, n) = (self.data.rows(), self.data.cols());
        if k == 0 || k >= m {
            return Err(Error::RankOutOfRange { k, m });
        }
        let basis = &self.spectrum.eigenvectors.as_col_major()[..m * k];
        let v1 = DenseMatrix::from_raw(m, k, basis.to_vec());

        let mut w1 = Vec::with_capacity(k * n);
        let mut z = Vec::with_capacity(n);
        for (i, col) in self.data.columns().enumerate() {
            let start = w1.len();
            w1.extend(v1.columns().map(|v| dot(v, col)));
            z.push(residual_energy(self.col_sq_norms[i], &w1[start..]).map_err(|value| {
                Error::NegativeResidual { column: i, value }
            })?);
        }
        let delta = z.iter().sum::<f64>() / (m - k) as f64;
        Ok(PcaModel {
            v1,
            w1: DenseMatrix::from_raw(k, n, w1),
            col_sq_norms: self.col_sq_norms.clone(),
            z,
            delta,
            preprocessing: if self.mean.is_some() { Preprocessing::Centered } else { Preprocessing::None },
            mean: self.mean.clone(),
        })
    }
}

/// `‖a‖² − ‖w‖²` clamped at zero, or the raw value when it is too negative
/// to be roundoff.
fn residual_energy(a_sq_norm: f64, w: &[f64]) -> core::result::Result<f64, f64> {
    let z = a_sq_norm - sq_norm(w);
    if z >= 0.0 {
        Ok(z)
    } else if z > -CLAMP_TOL * a_sq_norm {
        Ok(0.0)
    } else {
        Err(z)
    }
}

/// Fits a rank-k model. Costs one m×m eigendecomposition plus `O(kmn)`.
pub fn fit(data: &Dataset, k: usize, center: bool) -> Result<PcaModel> {
    let m = data.m();
    if k == 0 || k >= m {
        return Err(Error::RankOutOfRange { k, m });
    }
    PcaBasis::new(data, center)?.model(k)
}

/// Projects `x` onto the captured subspace. A centered model subtracts its
/// stored mean from `x` first.
pub fn project(model: &PcaModel, x: &[f64]) -> Result<QueryProjection> {
    if x.len() != model.m() {
        return Err(contract(format!("query has length {}, model has m = {}", x.len(), model.m())));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(contract("query has non-finite entries"));
    }
    let shifted;
    let x = match &model.mean {
        Some(mu) => {
            shifted = x.iter().zip(mu).map(|(a, b)| a - b).collect::<Vec<_>>();
            &shifted[..]
        }
        None => x,
    };
    let x_sq_norm = sq_norm(x);
    let w1_x: Vec<f64> = model.v1.columns().map(|v| dot(v, x)).collect();
    let z_x = residual_energy(x_sq_norm, &w1_x)
        .map_err(|value| Error::NegativeQueryResidual { value })?;
    Ok(QueryProjection { w1_x, z_x, x_sq_norm })
}
