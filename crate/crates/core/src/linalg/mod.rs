//! Dense row-major matrices and vectors over any [`Scalar`], with the direct
//! solver (LU with partial pivoting) and the products and norms it needs.

mod batch;
mod lu;
mod ops;
mod scalar;

pub use batch::{axpy_batch, elementwise_add_batch, elementwise_mul_batch, KernelPath};
pub use lu::{lu_factor_pp, lu_solve, PivotRecord};
pub use ops::{mat_mul_blocked, mat_norm_fro, mat_vec, max_rel_err, vec_norm2, DEFAULT_BLOCK};
pub use scalar::Scalar;

use crate::bigfloat::{BigFloat, PrecisionContext};
use crate::error::{Error, Result};
use crate::mcfloat::MultiComp;
use crate::par::Execution;

/// Kernel path and threading used by the factorization and products.
/// Results do not depend on either setting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Kernels {
    pub path: KernelPath,
    pub exec: Execution,
}

impl Kernels {
    pub fn sequential(path: KernelPath) -> Self {
        Kernels { path, exec: Execution::Sequential }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S> DenseMatrix<S> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<S>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [S] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [S] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<S> {
        self.data
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let (head, tail) = self.data.split_at_mut(hi * self.cols);
        head[lo * self.cols..(lo + 1) * self.cols].swap_with_slice(&mut tail[..self.cols]);
    }

    pub fn try_map<T>(&self, f: impl FnMut(&S) -> Result<T>) -> Result<DenseMatrix<T>> {
        let data = self.data.iter().map(f).collect::<Result<Vec<T>>>()?;
        Ok(DenseMatrix { rows: self.rows, cols: self.cols, data })
    }
}

impl<S: Scalar> DenseMatrix<S> {
    pub fn zeros(rows: usize, cols: usize, ctx: &S::Ctx) -> Self {
        DenseMatrix { rows, cols, data: vec![S::zero(ctx); rows * cols] }
    }

    pub fn identity(n: usize, ctx: &S::Ctx) -> Self {
        let mut m = Self::zeros(n, n, ctx);
        for i in 0..n {
            m.set(i, i, S::one(ctx));
        }
        m
    }

    pub fn from_f64_rows(rows: &[Vec<f64>], ctx: &S::Ctx) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch { expected: c, found: row.len() });
            }
            for &x in row {
                data.push(S::from_f64(x, ctx)?);
            }
        }
        Ok(DenseMatrix { rows: r, cols: c, data })
    }
}

impl DenseMatrix<BigFloat> {
    /// Entrywise split into `K` components.
    pub fn to_multicomp<const K: usize>(&self) -> Result<DenseMatrix<MultiComp<K>>> {
        self.try_map(BigFloat::to_multicomp::<K>)
    }

    pub fn round_to(&self, ctx: &PrecisionContext) -> Result<Self> {
        self.try_map(|v| v.round_to(ctx))
    }
}

impl<const K: usize> DenseMatrix<MultiComp<K>> {
    pub fn to_bigfloat(&self, ctx: &PrecisionContext) -> Result<DenseMatrix<BigFloat>> {
        self.try_map(|v| BigFloat::from_multicomp(v, ctx))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Vector<S> {
    data: Vec<S>,
}

impl<S> Vector<S> {
    pub fn from_vec(data: Vec<S>) -> Self {
        Vector { data }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, i: usize) -> &S {
        &self.data[i]
    }

    pub fn set(&mut self, i: usize, v: S) {
        self.data[i] = v;
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [S] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<S> {
        self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, S> {
        self.data.iter()
    }

    pub fn try_map<T>(&self, f: impl FnMut(&S) -> Result<T>) -> Result<Vector<T>> {
        Ok(Vector { data: self.data.iter().map(f).collect::<Result<Vec<T>>>()? })
    }
}

impl<S: Scalar> Vector<S> {
    pub fn zeros(n: usize, ctx: &S::Ctx) -> Self {
        Vector { data: vec![S::zero(ctx); n] }
    }

    pub fn from_f64(xs: &[f64], ctx: &S::Ctx) -> Result<Self> {
        Ok(Vector { data: xs.iter().map(|&x| S::from_f64(x, ctx)).collect::<Result<_>>()? })
    }
}

impl Vector<BigFloat> {
    pub fn to_multicomp<const K: usize>(&self) -> Result<Vector<MultiComp<K>>> {
        self.try_map(BigFloat::to_multicomp::<K>)
    }

    pub fn round_to(&self, ctx: &PrecisionContext) -> Result<Self> {
        self.try_map(|v| v.round_to(ctx))
    }
}

impl<const K: usize> Vector<MultiComp<K>> {
    pub fn to_bigfloat(&self, ctx: &PrecisionContext) -> Result<Vector<BigFloat>> {
        self.try_map(|v| BigFloat::from_multicomp(v, ctx))
    }
}

impl<S> FromIterator<S> for Vector<S> {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Vector { data: iter.into_iter().collect() }
    }
}
