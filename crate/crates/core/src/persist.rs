//! Binary model container, version 1.
//!
//! All integers and floats are little-endian. Matrices are column-major.
//!
//! | offset | size | field |
//! |--------|------|-------|
//! | 0  | 4 | magic `b"EPCA"` |
//! | 4  | 4 | `u32` format version (= 1) |
//! | 8  | 8 | `u64` m |
//! | 16 | 8 | `u64` n |
//! | 24 | 8 | `u64` k |
//! | 32 | 1 | `u8` preprocessing: 0 = none, 1 = centered |
//! | 33 | 8·m | mean vector, present only when centered |
//! | …  | 8·m·k | `v1` |
//! | …  | 8·k·n | `w1` |
//! | …  | 8·n | `col_sq_norms` |
//! | …  | 8·n | `z` |
//! | …  | 8 | `delta` |
//!
//! Nothing may follow `delta`. Floats are stored bit-exactly, so
//! `decode(encode(m)) == m`.

use alloc::vec::Vec;

use crate::error::{Error, PersistFault, Result};
use crate::matrix::DenseMatrix;
use crate::pca::PcaModel;

pub const MAGIC: [u8; 4] = *b"EPCA";
pub const FORMAT_VERSION: u32 = 1;

/// Upper bound on any single dimension accepted by [`decode`].
const MAX_DIM: u64 = 1 << 32;

pub fn encode(model: &PcaModel) -> Vec<u8> {
    let (m, n, k) = (model.m(), model.n(), model.k());
    let centered = model.mean().is_some();
    let floats = if centered { m } else { 0 } + m * k + k * n + 2 * n + 1;
    let mut out = Vec::with_capacity(33 + 8 * floats);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    for d in [m, n, k] {
        out.extend_from_slice(&(d as u64).to_le_bytes());
    }
    out.push(u8::from(centered));
    let mut put = |xs: &[f64]| xs.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes()));
    if let Some(mean) = model.mean() {
        put(mean);
    }
    put(model.v1().as_col_major());
    put(model.w1().as_col_major());
    put(model.col_sq_norms());
    put(model.z());
    put(&[model.delta()]);
    out
}

struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize, field: &'static str) -> Result<&'a [u8]> {
        if self.buf.len() < len {
            return Err(fault(field, PersistFault::Truncated));
        }
        let (head, tail) = self.buf.split_at(len);
        self.buf = tail;
        Ok(head)
    }

    fn u32(&mut self, field: &'static str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, field)?.try_into().unwrap()))
    }

    fn dim(&mut self, field: &'static str) -> Result<usize> {
        let v = u64::from_le_bytes(self.take(8, field)?.try_into().unwrap());
        if v == 0 || v > MAX_DIM {
            return Err(fault(field, PersistFault::Invalid));
        }
        Ok(v as usize)
    }

    fn floats(&mut self, count: usize, field: &'static str) -> Result<Vec<f64>> {
        let bytes = count.checked_mul(8).ok_or(fault(field, PersistFault::Invalid))?;
        let raw = self.take(bytes, field)?;
        let xs: Vec<f64> = raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        if xs.iter().any(|x| !x.is_finite()) {
            return Err(fault(field, PersistFault::Invalid));
        }
        Ok(xs)
    }
}

fn fault(field: &'static str, fault: PersistFault) -> Error {
    Error::Persist { field, fault }
}

pub fn decode(bytes: &[u8]) -> Result<PcaModel> {
    let mut r = Reader { buf: bytes };
    if r.take(4, "magic")? != MAGIC {
        return Err(fault("magic", PersistFault::BadMagic));
    }
    let version = r.u32("version")?;
    if version != FORMAT_VERSION {
        return Err(fault("version", PersistFault::Version(version)));
    }
    let m = r.dim("m")?;
    let n = r.dim("n")?;
    let k = r.dim("k")?;
    if k >= m {
        return Err(fault("k", PersistFault::Invalid));
    }
    let mean = match r.take(1, "preprocessing")?[0] {
        0 => None,
        1 => Some(r.floats(m, "mean")?),
        _ => return Err(fault("preprocessing", PersistFault::Invalid)),
    };
    let v1 = r.floats(m * k, "v1")?;
    let w1 = r.floats(k * n, "w1")?;
    let col_sq_norms = r.floats(n, "col_sq_norms")?;
    let z = r.floats(n, "z")?;
    let delta = r.floats(1, "delta")?[0];
    if !r.buf.is_empty() {
        return Err(fault("delta", PersistFault::Trailing));
    }
    if col_sq_norms.iter().any(|x| *x < 0.0) {
        return Err(fault("col_sq_norms", PersistFault::Invalid));
    }
    if z.iter().any(|x| *x < 0.0) {
        return Err(fault("z", PersistFault::Invalid));
    }
    if delta < 0.0 {
        return Err(fault("delta", PersistFault::Invalid));
    }
    PcaModel::from_parts(
        DenseMatrix::from_raw(m, k, v1),
        DenseMatrix::from_raw(k, n, w1),
        col_sq_norms,
        z,
        delta,
        mean,
    )
}
