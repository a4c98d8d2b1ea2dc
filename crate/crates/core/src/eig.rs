//! Dense symmetric eigendecomposition: Householder reduction to tridiagonal
//! form followed by the implicit QL iteration (the EISPACK `tred2`/`tql2`
//! pair).

use alloc::format;
use alloc::vec::Vec;

use crate::error::{contract, Error, Result};
use crate::matrix::DenseMatrix;

const MAX_QL_SWEEPS: usize = 64;

/// Full spectrum of a symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymEigResult {
    /// Non-increasing.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal columns, column `i` pairs with `eigenvalues[i]`. Each column
    /// has its largest-magnitude entry positive (lowest index wins ties).
    pub eigenvectors: DenseMatrix,
}

pub fn sym_eig(b: &DenseMatrix) -> Result<SymEigResult> {
    let n = b.rows();
    if b.cols() != n {
        return Err(contract(format!("sym_eig needs a square matrix, got {}x{}", n, b.cols())));
    }
    let tol = 1e-12 * b.max_abs();
    for c in 0..n {
        for r in c + 1..n {
            if (b.get(r, c) - b.get(c, r)).abs() > tol {
                return Err(contract(format!("matrix not symmetric at ({r}, {c})")));
            }
        }
    }

    // row-major working copy, v[i * n + j]
    let mut v: Vec<f64> = (0..n * n).map(|idx| b.get(idx / n, idx % n)).collect();
    let mut d = alloc::vec![0.0; n];
    let mut e = alloc::vec![0.0; n];
    tred2(n, &mut v, &mut d, &mut e);
    tql2(n, &mut v, &mut d, &mut e)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].total_cmp(&d[i]).then(i.cmp(&j)));

    let eigenvalues = order.iter().map(|&i| d[i]).collect();
    let mut data = Vec::with_capacity(n * n);
    for &src in &order {
        let start = data.len();
        data.extend((0..n).map(|r| v[r * n + src]));
        normalize_sign(&mut data[start..]);
    }
    Ok(SymEigResult {
        eigenvalues,
        eigenvectors: DenseMatrix::from_raw(n, n, data),
    })
}

fn normalize_sign(col: &mut [f64]) {
    let mut best = 0;
    for (i, x) in col.iter().enumerate() {
        if x.abs() > col[best].abs() {
            best = i;
        }
    }
    if col[best] < 0.0 {
        col.iter_mut().for_each(|x| *x = -*x);
    }
}

fn tred2(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    let at = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for x in &d[..i] {
            scale += x.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
                v[at(j, i)] = 0.0;
            }
        } else {
            for x in &mut d[..i] {
                *x /= scale;
                h += *x * *x;
            }
            let mut f = d[i - 1];
            let mut g = libm::sqrt(h);
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for x in &mut e[..i] {
                *x = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[at(j, i)] = f;
                g = e[j] + v[at(j, j)] * f;
                for k in j + 1..i {
                    g += v[at(k, j)] * d[k];
                    e[k] += v[at(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[at(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    // accumulate transformations
    for i in 0..n.saturating_sub(1) {
        v[at(n - 1, i)] = v[at(i, i)];
        v[at(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[at(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[at(k, i + 1)] * v[at(k, j)];
                }
                for k in 0..=i {
                    v[at(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[at(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
        v[at(n - 1, j)] = 0.0;
    }
    v[at(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

fn tql2(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let at = |i: usize, j: usize| i * n + j;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        // e[n-1] == 0, so m < n here
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > MAX_QL_SWEEPS {
                    return Err(Error::NumericFailure {
                        size: n,
                        reason: "implicit QL iteration did not converge",
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = libm::hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for x in &mut d[l + 2..n] {
                    *x -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = libm::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        h = v[at(k, i + 1)];
                        v[at(k, i + 1)] = s * v[at(k, i)] + c * h;
                        v[at(k, i)] = c * v[at(k, i)] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}
