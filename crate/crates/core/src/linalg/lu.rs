use std::cmp::Ordering;

use super::{axpy_batch, DenseMatrix, Kernels, Scalar, Vector};
use crate::error::{Error, Result};
use crate::par::Execution;

/// Row exchanges of a partial-pivoting factorization: at step `k` rows `k` and
/// `perm[k]` were swapped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PivotRecord {
    perm: Vec<usize>,
}

impl PivotRecord {
    pub fn from_vec(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        for (k, &p) in perm.iter().enumerate() {
            if p < k || p >= n {
                return Err(Error::InvalidArgument(format!("pivot {p} invalid at step {k}")));
            }
        }
        Ok(PivotRecord { perm })
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn swap_count(&self) -> usize {
        self.perm.iter().enumerate().filter(|(k, &p)| *k != p).count()
    }

    /// Applies the recorded exchanges, in order, to `v`.
    pub fn apply<T>(&self, v: &mut [T]) {
        for (k, &p) in self.perm.iter().enumerate() {
            v.swap(k, p);
        }
    }
}

/// Below this many trailing entries the update stays on the calling thread.
const PAR_MIN_ENTRIES: usize = 4096;

/// In-place LU factorization with partial pivoting. On return `a` holds the
/// unit lower factor strictly below the diagonal and the upper factor on and
/// above it. The pivot is the first row holding the largest magnitude in the
/// current column.
pub fn lu_factor_pp<S: Scalar>(a: &mut DenseMatrix<S>, ctx: &S::Ctx, k: Kernels) -> Result<PivotRecord> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: a.cols() });
    }
    let n = a.rows();
    let mut perm = Vec::with_capacity(n);
    for step in 0..n {
        let mut p = step;
        for i in step + 1..n {
            if a.get(i, step).cmp_abs(a.get(p, step)) == Ordering::Greater {
                p = i;
            }
        }
        if a.get(p, step).is_zero() {
            return Err(Error::Singular { step });
        }
        a.swap_rows(step, p);
        perm.push(p);
        if step + 1 == n {
            break;
        }

        let cols = a.cols();
        let (head, tail) = a.as_mut_slice().split_at_mut((step + 1) * cols);
        let pivot_row = &head[step * cols..];
        let pivot = &pivot_row[step];
        let upper = &pivot_row[step + 1..];
        let eliminate = |row: &mut [S]| -> Result<()> {
            let l = row[step].div(pivot, ctx)?;
            axpy_batch(&l.neg(), upper, &mut row[step + 1..], ctx, k.path)?;
            row[step] = l;
            Ok(())
        };
        let parallel = k.exec == Execution::Parallel && tail.len() * (n - step) >= PAR_MIN_ENTRIES;
        if parallel {
            for_each_row(tail, cols, eliminate)?;
        } else {
            tail.chunks_mut(cols).try_for_each(eliminate)?;
        }
    }
    Ok(PivotRecord { perm })
}

#[cfg(feature = "parallel")]
fn for_each_row<S: Scalar>(
    data: &mut [S],
    cols: usize,
    f: impl Fn(&mut [S]) -> Result<()> + Sync + Send,
) -> Result<()> {
    use rayon::prelude::*;
    data.par_chunks_mut(cols).try_for_each(f)
}

#[cfg(not(feature = "parallel"))]
fn for_each_row<S: Scalar>(data: &mut [S], cols: usize, f: impl Fn(&mut [S]) -> Result<()>) -> Result<()> {
    data.chunks_mut(cols).try_for_each(f)
}

/// Solves `A x = b` from the output of [`lu_factor_pp`]; `b` is not modified.
pub fn lu_solve<S: Scalar>(lu: &DenseMatrix<S>, piv: &PivotRecord, b: &Vector<S>, ctx: &S::Ctx) -> Result<Vector<S>> {
    let n = lu.rows();
    if !lu.is_square() || piv.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: piv.len() });
    }
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: b.len() });
    }
    let mut x = b.as_slice().to_vec();
    piv.apply(&mut x);
    for i in 0..n {
        let row = lu.row(i);
        let mut acc = x[i].clone();
        for j in 0..i {
            acc = acc.sub(&row[j].mul(&x[j], ctx)?, ctx)?;
        }
        x[i] = acc;
    }
    for i in (0..n).rev() {
        let row = lu.row(i);
        if row[i].is_zero() {
            return Err(Error::Singular { step: i });
        }
        let mut acc = x[i].clone();
        for j in i + 1..n {
            acc = acc.sub(&row[j].mul(&x[j], ctx)?, ctx)?;
        }
        x[i] = acc.div(&row[i], ctx)?;
    }
    Ok(Vector::from_vec(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigfloat::{BigFloat, PrecisionContext};
    use crate::linalg::KernelPath;
    use crate::mcfloat::{DoubleDouble, TripleDouble};

    fn seq() -> Kernels {
        Kernels { path: KernelPath::Scalar, exec: Execution::Sequential }
    }

    #[test]
    fn permutation_matrix() {
        let mut a = DenseMatrix::<DoubleDouble>::from_f64_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]], &()).unwrap();
        let piv = lu_factor_pp(&mut a, &(), seq()).unwrap();
        assert_eq!(piv.as_slice(), &[1, 1]);
        assert_eq!(piv.swap_count(), 1);
        assert_eq!(a, DenseMatrix::identity(2, &()));
    }

    #[test]
    fn hand_elimination() {
        // Rational oracle: pivot 6, l = 4/6 = 2/3, u11 = 3 - (2/3)*3 = 1.
        let ctx = PrecisionContext::new(200).unwrap();
        let mut a = DenseMatrix::<BigFloat>::from_f64_rows(&[vec![4.0, 3.0], vec![6.0, 3.0]], &ctx).unwrap();
        let piv = lu_factor_pp(&mut a, &ctx, seq()).unwrap();
        assert_eq!(piv.as_slice(), &[1, 1]);
        let two_thirds = BigFloat::from_u64(2, &ctx).div(&BigFloat::from_u64(3, &ctx), &ctx).unwrap();
        assert_eq!(a.get(1, 0), &two_thirds);
        assert_eq!(a.row(0), &[BigFloat::from_u64(6, &ctx), BigFloat::from_u64(3, &ctx)]);
        let u11 = a.get(1, 1).to_f64();
        assert!((u11 - 1.0).abs() < 1e-59);

        let b = Vector::<BigFloat>::from_f64(&[10.0, 12.0], &ctx).unwrap();
        let x = lu_solve(&a, &piv, &b, &ctx).unwrap();
        assert!((x.get(0).to_f64() - 1.0).abs() < 1e-55);
        assert!((x.get(1).to_f64() - 2.0).abs() < 1e-55);
        assert_eq!(b.get(0).to_f64(), 10.0);
    }

    #[test]
    fn identity_untouched() {
        let mut a = DenseMatrix::<TripleDouble>::identity(5, &());
        let piv = lu_factor_pp(&mut a, &(), Kernels::default()).unwrap();
        assert_eq!(piv.swap_count(), 0);
        assert_eq!(a, DenseMatrix::identity(5, &()));
        let b = Vector::<TripleDouble>::from_f64(&[1.0, -2.0, 0.5, 7.0, 0.1], &()).unwrap();
        assert_eq!(lu_solve(&a, &piv, &b, &()).unwrap(), b);
    }

    #[test]
    fn ties_pick_first_row() {
        let mut a = DenseMatrix::<DoubleDouble>::from_f64_rows(
            &[vec![1.0, 2.0, 0.0], vec![-3.0, 1.0, 1.0], vec![3.0, 5.0, 2.0]],
            &(),
        )
        .unwrap();
        let piv = lu_factor_pp(&mut a, &(), seq()).unwrap();
        assert_eq!(piv.as_slice()[0], 1);
    }

    #[test]
    fn singular_reports_step() {
        let mut a = DenseMatrix::<DoubleDouble>::from_f64_rows(
            &[vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0], vec![0.0, 0.0, 1.0]],
            &(),
        )
        .unwrap();
        assert_eq!(lu_factor_pp(&mut a, &(), seq()), Err(Error::Singular { step: 1 }));
        let mut r = DenseMatrix::<DoubleDouble>::zeros(2, 3, &());
        assert!(matches!(lu_factor_pp(&mut r, &(), seq()), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn exact_integer_system() {
        // Elimination with power-of-two multipliers is exact.
        let rows = [vec![4.0, 0.0, 2.0], vec![2.0, 2.0, 1.0], vec![1.0, 1.0, 3.0]];
        let mut a = DenseMatrix::<DoubleDouble>::from_f64_rows(&rows, &()).unwrap();
        let piv = lu_factor_pp(&mut a, &(), seq()).unwrap();
        // x = [1, -1, 2]
        let b = Vector::from_f64(&[8.0, 2.0, 6.0], &()).unwrap();
        let x = lu_solve(&a, &piv, &b, &()).unwrap();
        assert_eq!(x, Vector::from_f64(&[1.0, -1.0, 2.0], &()).unwrap());
    }

    #[test]
    fn pivot_record_validation() {
        assert!(PivotRecord::from_vec(vec![1, 0]).is_err());
        assert!(PivotRecord::from_vec(vec![2, 1]).is_err());
        let p = PivotRecord::from_vec(vec![2, 2, 2]).unwrap();
        let mut v = [0, 1, 2];
        p.apply(&mut v);
        assert_eq!(v, [2, 0, 1]);
    }
}
