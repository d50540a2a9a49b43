use super::{axpy_batch, DenseMatrix, Kernels, Scalar, Vector};
use crate::bigfloat::{BigFloat, PrecisionContext};
use crate::error::{Error, Result};
use crate::par::{try_map_range, Execution};

pub const DEFAULT_BLOCK: usize = 64;

/// Rows computed per parallel task in products.
const ROW_CHUNK: usize = 8;

fn exec_for(k: Kernels, work: usize) -> Execution {
    if work < 4096 {
        Execution::Sequential
    } else {
        k.exec
    }
}

/// `y_i = Σ_j A_ij x_j`, summed in increasing `j` from zero.
pub fn mat_vec<S: Scalar>(a: &DenseMatrix<S>, x: &Vector<S>, ctx: &S::Ctx, k: Kernels) -> Result<Vector<S>> {
    if a.cols() != x.len() {
        return Err(Error::DimensionMismatch { expected: a.cols(), found: x.len() });
    }
    let ys = try_map_range(a.rows(), exec_for(k, a.rows() * a.cols()), |i| {
        let mut acc = S::zero(ctx);
        for (aij, xj) in a.row(i).iter().zip(x.iter()) {
            acc = acc.add(&aij.mul(xj, ctx)?, ctx)?;
        }
        Ok(acc)
    })?;
    Ok(Vector::from_vec(ys))
}

/// `C = A B` tiled by `block` along both the inner and output-column
/// dimensions. Every `C_ij` starts at zero and accumulates `A_il · B_lj` in
/// increasing `l`, which is the triple-loop order, so the result does not
/// depend on `block`.
pub fn mat_mul_blocked<S: Scalar>(
    a: &DenseMatrix<S>,
    b: &DenseMatrix<S>,
    block: usize,
    ctx: &S::Ctx,
    k: Kernels,
) -> Result<DenseMatrix<S>> {
    if a.cols() != b.rows() {
        return Err(Error::DimensionMismatch { expected: a.cols(), found: b.rows() });
    }
    if block == 0 {
        return Err(Error::InvalidArgument("block size must be at least 1".into()));
    }
    let (m, inner, n) = (a.rows(), a.cols(), b.cols());
    let chunks = m.div_ceil(ROW_CHUNK);
    let parts = try_map_range(chunks, exec_for(k, m * inner * n / 16), |c| {
        let rows = c * ROW_CHUNK..((c + 1) * ROW_CHUNK).min(m);
        let mut out = vec![S::zero(ctx); rows.len() * n];
        for l0 in (0..inner).step_by(block) {
            let l1 = (l0 + block).min(inner);
            for j0 in (0..n).step_by(block) {
                let j1 = (j0 + block).min(n);
                for (r, i) in rows.clone().enumerate() {
                    let c_row = &mut out[r * n + j0..r * n + j1];
                    for l in l0..l1 {
                        axpy_batch(a.get(i, l), &b.row(l)[j0..j1], c_row, ctx, k.path)?;
                    }
                }
            }
        }
        Ok(out)
    })?;
    DenseMatrix::from_vec(m, n, parts.concat())
}

fn sum_squares_sqrt<'a, S: Scalar>(xs: impl Iterator<Item = &'a S>, ctx: &S::Ctx) -> Result<S> {
    let mut acc = S::zero(ctx);
    for x in xs {
        acc = acc.add(&x.mul(x, ctx)?, ctx)?;
    }
    acc.sqrt(ctx)
}

/// Euclidean norm without scaling.
pub fn vec_norm2<S: Scalar>(x: &Vector<S>, ctx: &S::Ctx) -> Result<S> {
    sum_squares_sqrt(x.iter(), ctx)
}

/// Frobenius norm without scaling.
pub fn mat_norm_fro<S: Scalar>(a: &DenseMatrix<S>, ctx: &S::Ctx) -> Result<S> {
    sum_squares_sqrt(a.as_slice().iter(), ctx)
}

/// `max_i |x_i - t_i| / |t_i|`, taking the absolute error where `t_i = 0`.
pub fn max_rel_err(x: &Vector<BigFloat>, x_true: &Vector<BigFloat>, ctx: &PrecisionContext) -> Result<BigFloat> {
    if x.len() != x_true.len() {
        return Err(Error::DimensionMismatch { expected: x_true.len(), found: x.len() });
    }
    let mut worst = BigFloat::zero(ctx);
    for (xi, ti) in x.iter().zip(x_true.iter()) {
        let err = xi.sub(ti, ctx)?.abs();
        let e = if ti.is_zero() { err } else { err.div(&ti.abs(), ctx)? };
        if e > worst {
            worst = e;
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::KernelPath;
    use crate::mcfloat::{DoubleDouble, QuadDouble};

    fn int_matrix<S: Scalar>(rows: usize, cols: usize, seed: i64, ctx: &S::Ctx) -> DenseMatrix<S> {
        DenseMatrix::from_fn(rows, cols, |i, j| {
            let v = ((i as i64 * 7 + j as i64 * 13 + seed) % 11) - 5;
            S::from_f64(v as f64, ctx).unwrap()
        })
    }

    #[test]
    fn mat_vec_examples() {
        let id = DenseMatrix::<DoubleDouble>::identity(3, &());
        let x = Vector::from_f64(&[1.0, 2.0, 3.0], &()).unwrap();
        assert_eq!(mat_vec(&id, &x, &(), Kernels::default()).unwrap(), x);
        let z = DenseMatrix::<DoubleDouble>::zeros(2, 3, &());
        assert_eq!(mat_vec(&z, &x, &(), Kernels::default()).unwrap(), Vector::zeros(2, &()));
        let a = DenseMatrix::<DoubleDouble>::from_f64_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]], &()).unwrap();
        let ones = Vector::from_f64(&[1.0, 1.0], &()).unwrap();
        assert_eq!(mat_vec(&a, &ones, &(), Kernels::default()).unwrap(), Vector::from_f64(&[3.0, 7.0], &()).unwrap());
        assert!(mat_vec(&a, &x, &(), Kernels::default()).is_err());
    }

    #[test]
    fn mat_vec_linear_on_exact_inputs() {
        let a = int_matrix::<QuadDouble>(6, 6, 3, &());
        let x = Vector::<QuadDouble>::from_f64(&[1.0, -2.0, 3.0, 0.0, 5.0, 1.0], &()).unwrap();
        let y = Vector::<QuadDouble>::from_f64(&[4.0, 4.0, -1.0, 2.0, 0.0, 7.0], &()).unwrap();
        let xy: Vector<QuadDouble> = x.iter().zip(y.iter()).map(|(p, q)| p.add(q).unwrap()).collect();
        let k = Kernels::default();
        let lhs = mat_vec(&a, &xy, &(), k).unwrap();
        let ax = mat_vec(&a, &x, &(), k).unwrap();
        let ay = mat_vec(&a, &y, &(), k).unwrap();
        let rhs: Vector<QuadDouble> = ax.iter().zip(ay.iter()).map(|(p, q)| p.add(q).unwrap()).collect();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn matmul_matches_integer_oracle() {
        for n in 1..=8 {
            let a = int_matrix::<DoubleDouble>(n, n, 1, &());
            let b = int_matrix::<DoubleDouble>(n, n, 4, &());
            for block in [1, 3, 64] {
                let c = mat_mul_blocked(&a, &b, block, &(), Kernels::default()).unwrap();
                for i in 0..n {
                    for j in 0..n {
                        let exact: i64 = (0..n)
                            .map(|l| a.get(i, l).to_f64() as i64 * b.get(l, j).to_f64() as i64)
                            .sum();
                        assert_eq!(c.get(i, j).to_f64(), exact as f64);
                    }
                }
            }
        }
    }

    #[test]
    fn matmul_identity_and_shape() {
        let a = DenseMatrix::<DoubleDouble>::from_fn(5, 4, |i, j| {
            DoubleDouble::renormalize(&[1.0 / (i + j + 1) as f64, 1e-20]).unwrap()
        });
        let id = DenseMatrix::identity(4, &());
        for block in [1, 2, 64] {
            assert_eq!(mat_mul_blocked(&a, &id, block, &(), Kernels::default()).unwrap(), a);
        }
        assert!(mat_mul_blocked(&a, &a, 4, &(), Kernels::default()).is_err());
        assert!(mat_mul_blocked(&id, &id, 0, &(), Kernels::default()).is_err());
    }

    #[test]
    fn matmul_independent_of_block_and_path() {
        let a = DenseMatrix::<DoubleDouble>::from_fn(16, 16, |i, j| {
            DoubleDouble::from_f64(((i * 31 + j * 17) as f64).sin()).unwrap()
        });
        let b = DenseMatrix::<DoubleDouble>::from_fn(16, 16, |i, j| {
            DoubleDouble::from_f64(((i * 5 + j * 3) as f64 + 0.5).cos()).unwrap()
        });
        let scalar = Kernels { path: KernelPath::Scalar, exec: Execution::Sequential };
        let reference = mat_mul_blocked(&a, &b, 64, &(), scalar).unwrap();
        for block in [1, 5, 16] {
            for path in [KernelPath::Scalar, KernelPath::Lanes] {
                let k = Kernels { path, exec: Execution::Parallel };
                assert_eq!(mat_mul_blocked(&a, &b, block, &(), k).unwrap(), reference);
            }
        }
    }

    #[test]
    fn norms() {
        let v = Vector::<DoubleDouble>::from_f64(&[3.0, 4.0], &()).unwrap();
        assert_eq!(vec_norm2(&v, &()).unwrap().to_f64(), 5.0);
        assert!(vec_norm2(&Vector::<DoubleDouble>::zeros(4, &()), &()).unwrap().is_zero());
        let ctx = PrecisionContext::new(200).unwrap();
        let id = DenseMatrix::<BigFloat>::identity(7, &ctx);
        let expect = BigFloat::from_u64(7, &ctx).sqrt(&ctx).unwrap();
        assert_eq!(mat_norm_fro(&id, &ctx).unwrap(), expect);
    }

    #[test]
    fn max_rel_err_rules() {
        let ctx = PrecisionContext::new(200).unwrap();
        let v = |xs: &[&str]| Vector::from_vec(xs.iter().map(|s| BigFloat::parse(s, &ctx).unwrap()).collect());
        let t = v(&["0", "1"]);
        assert!(max_rel_err(&t, &t, &ctx).unwrap().is_zero());
        let e = max_rel_err(&v(&["1e-5", "1.001"]), &t, &ctx).unwrap();
        let tol = BigFloat::parse("1e-50", &ctx).unwrap();
        assert!(e.sub(&BigFloat::parse("1e-3", &ctx).unwrap(), &ctx).unwrap().abs() < tol);
        let e = max_rel_err(&v(&["0.5", "2"]), &v(&["0", "2"]), &ctx).unwrap();
        assert_eq!(e, BigFloat::parse("0.5", &ctx).unwrap());
    }
}
