//! Mixed-precision iterative refinement: factor once in a `K`-component
//! precision, correct with residuals computed in [`BigFloat`].

use std::fmt;
use std::str::FromStr;

use crate::bigfloat::{BigFloat, PrecisionContext};
use crate::error::{Error, Result};
use crate::linalg::{lu_factor_pp, lu_solve, mat_norm_fro, mat_vec, vec_norm2, DenseMatrix, Kernels, Vector};
use crate::mcfloat::{MultiComp, PrecisionTag};

/// Consecutive non-decreasing residual norms that end the iteration.
pub const STAGNATION_WINDOW: usize = 3;

#[derive(Clone, Debug)]
pub struct RefineConfig {
    pub short: PrecisionTag,
    pub long_bits: u32,
    pub rtol: BigFloat,
    pub atol: BigFloat,
    pub max_iter: usize,
    /// Scale each residual to unit norm before the short solve.
    pub normalize: bool,
    pub kernels: Kernels,
}

impl RefineConfig {
    pub fn new(short: PrecisionTag) -> Self {
        let ctx = PrecisionContext::LONG_DEFAULT;
        RefineConfig {
            short,
            long_bits: ctx.bits(),
            rtol: BigFloat::parse_decimal("1e-100", &ctx).expect("valid literal"),
            atol: BigFloat::zero(&ctx),
            max_iter: 50,
            normalize: true,
            kernels: Kernels::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.long_bits <= self.short.bits() {
            return Err(Error::InvalidArgument(format!(
                "long precision {} bits must exceed the short precision {} bits",
                self.long_bits,
                self.short.bits()
            )));
        }
        if self.rtol.is_sign_negative() || self.atol.is_sign_negative() {
            return Err(Error::InvalidArgument("tolerances must be nonnegative".into()));
        }
        if self.rtol.is_zero() && self.atol.is_zero() {
            return Err(Error::InvalidArgument("rtol or atol must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    Converged,
    MaxIter,
    Stagnated,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::Converged => "converged",
            StopReason::MaxIter => "max_iter",
            StopReason::Stagnated => "stagnated",
        }
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StopReason {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "converged" => Ok(StopReason::Converged),
            "max_iter" => Ok(StopReason::MaxIter),
            "stagnated" => Ok(StopReason::Stagnated),
            _ => Err(Error::Parse(format!("unknown stop reason '{s}'"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RefineReport {
    pub solution: Vector<BigFloat>,
    /// Corrections applied after the initial short solve.
    pub iterations: usize,
    /// Residual 2-norms, starting with the residual of the initial solution.
    pub residual_history: Vec<BigFloat>,
    pub stop_reason: StopReason,
}

/// `res_norm < sqrt(n)·rtol·a_fro·x_norm + atol`, evaluated in `ctx`.
pub fn check_stop(
    res_norm: &BigFloat,
    x_norm: &BigFloat,
    a_fro: &BigFloat,
    n: usize,
    rtol: &BigFloat,
    atol: &BigFloat,
    ctx: &PrecisionContext,
) -> Result<bool> {
    let sqrt_n = BigFloat::from_u64(n as u64, ctx).sqrt(ctx)?;
    let threshold = sqrt_n.mul(rtol, ctx)?.mul(a_fro, ctx)?.mul(x_norm, ctx)?.add(atol, ctx)?;
    Ok(res_norm < &threshold)
}

pub fn iterative_refinement(a: &DenseMatrix<BigFloat>, b: &Vector<BigFloat>, cfg: &RefineConfig) -> Result<RefineReport> {
    cfg.validate()?;
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: a.cols() });
    }
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: b.len() });
    }
    match cfg.short.components() {
        2 => refine_k::<2>(a, b, cfg),
        3 => refine_k::<3>(a, b, cfg),
        4 => refine_k::<4>(a, b, cfg),
        k => Err(Error::InvalidArgument(format!("unsupported component count {k}"))),
    }
}

fn refine_k<const K: usize>(a: &DenseMatrix<BigFloat>, b: &Vector<BigFloat>, cfg: &RefineConfig) -> Result<RefineReport> {
    let ctx = PrecisionContext::new(cfg.long_bits)?;
    let n = a.rows();
    let a = a.round_to(&ctx)?;
    let b = b.round_to(&ctx)?;

    // Short-precision copies, factorization and initial solve.
    let mut af: DenseMatrix<MultiComp<K>> = a.to_multicomp()?;
    let bf: Vector<MultiComp<K>> = b.to_multicomp()?;
    let piv = lu_factor_pp(&mut af, &(), cfg.kernels)?;
    let xf = lu_solve(&af, &piv, &bf, &())?;
    let mut x = xf.to_bigfloat(&ctx)?;

    let norm_a = mat_norm_fro(&a, &ctx)?;
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut rising = 0;
    let stop_reason = loop {
        // Residual in long precision.
        let ax = mat_vec(&a, &x, &ctx, cfg.kernels)?;
        let mut res: Vector<BigFloat> =
            b.iter().zip(ax.iter()).map(|(bi, axi)| bi.sub(axi, &ctx)).collect::<Result<_>>()?;
        let norm_res = vec_norm2(&res, &ctx)?;
        let norm_x = vec_norm2(&x, &ctx)?;
        if let Some(prev) = history.last() {
            rising = if &norm_res >= prev { rising + 1 } else { 0 };
        }
        history.push(norm_res.clone());
        if norm_res.is_zero() || check_stop(&norm_res, &norm_x, &norm_a, n, &cfg.rtol, &cfg.atol, &ctx)? {
            break StopReason::Converged;
        }
        if rising >= STAGNATION_WINDOW {
            break StopReason::Stagnated;
        }
        if iterations == cfg.max_iter {
            break StopReason::MaxIter;
        }

        // Normalization: res := coef * res.
        if cfg.normalize {
            let coef = BigFloat::one(&ctx).div(&norm_res, &ctx)?;
            for r in res.as_mut_slice() {
                *r = r.mul(&coef, &ctx)?;
            }
        }
        // Back-solve on the short residual with the short factors.
        let resf: Vector<MultiComp<K>> = res.to_multicomp()?;
        let zf = lu_solve(&af, &piv, &resf, &())?;
        let mut z = zf.to_bigfloat(&ctx)?;
        // Reverse normalization.
        if cfg.normalize {
            for zi in z.as_mut_slice() {
                *zi = zi.mul(&norm_res, &ctx)?;
            }
        }
        // Update the solution in long precision.
        for (xi, zi) in x.as_mut_slice().iter_mut().zip(z.iter()) {
            *xi = xi.add(zi, &ctx)?;
        }
        iterations += 1;
    };

    Ok(RefineReport { solution: x, iterations, residual_history: history, stop_reason })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(424).unwrap()
    }

    fn bf(s: &str) -> BigFloat {
        BigFloat::parse(s, &ctx()).unwrap()
    }

    #[test]
    fn stop_test_examples() {
        let c = ctx();
        let z = bf("0");
        assert!(check_stop(&z, &bf("1"), &bf("1"), 3, &bf("1e-100"), &z, &c).unwrap());
        let (rtol, a, x) = (bf("1e-2"), bf("10"), bf("1"));
        assert!(!check_stop(&bf("0.21"), &x, &a, 4, &rtol, &z, &c).unwrap());
        assert!(check_stop(&bf("0.19"), &x, &a, 4, &rtol, &z, &c).unwrap());
        // Strict comparison at the threshold itself.
        assert!(!check_stop(&bf("0.2"), &x, &a, 4, &rtol, &z, &c).unwrap());
        assert!(check_stop(&bf("0.5"), &x, &a, 4, &z, &bf("1"), &c).unwrap());
    }

    #[test]
    fn config_validation() {
        let mut cfg = RefineConfig::new(PrecisionTag::QD);
        assert!(cfg.validate().is_ok());
        cfg.long_bits = 212;
        assert!(cfg.validate().is_err());
        let mut cfg = RefineConfig::new(PrecisionTag::DD);
        cfg.max_iter = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = RefineConfig::new(PrecisionTag::DD);
        cfg.rtol = BigFloat::zero(&ctx());
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn identity_needs_no_correction() {
        let c = ctx();
        let a = DenseMatrix::<BigFloat>::identity(5, &c);
        // Binary64 entries: the short copy of b is exact.
        let b = Vector::from_f64(&[3.0, -1.5, 0.1, 7.0, 1e-20], &c).unwrap();
        for tag in [PrecisionTag::DD, PrecisionTag::TD, PrecisionTag::QD] {
            let r = iterative_refinement(&a, &b, &RefineConfig::new(tag)).unwrap();
            assert_eq!(r.iterations, 0);
            assert_eq!(r.stop_reason, StopReason::Converged);
            assert_eq!(r.residual_history.len(), 1);
        }
    }

    #[test]
    fn singular_after_rounding() {
        let c = ctx();
        let a = DenseMatrix::<BigFloat>::from_f64_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]], &c).unwrap();
        let b = Vector::from_f64(&[1.0, 2.0], &c).unwrap();
        let r = iterative_refinement(&a, &b, &RefineConfig::new(PrecisionTag::DD));
        assert_eq!(r.unwrap_err(), Error::Singular { step: 1 });
    }

    #[test]
    fn max_iter_is_reported() {
        let c = ctx();
        let a = DenseMatrix::<BigFloat>::from_f64_rows(&[vec![3.0, 1.0], vec![1.0, 3.0]], &c).unwrap();
        let third = BigFloat::one(&c).div(&BigFloat::from_u64(3, &c), &c).unwrap();
        let b = Vector::from_vec(vec![third.clone(), third]);
        let mut cfg = RefineConfig::new(PrecisionTag::DD);
        cfg.max_iter = 1;
        let r = iterative_refinement(&a, &b, &cfg).unwrap();
        assert_eq!(r.stop_reason, StopReason::MaxIter);
        assert_eq!(r.iterations, 1);
        assert_eq!(r.residual_history.len(), 2);
        cfg.max_iter = 50;
        let r = iterative_refinement(&a, &b, &cfg).unwrap();
        assert_eq!(r.stop_reason, StopReason::Converged);
        assert!(r.iterations >= 2);
    }

    #[test]
    fn stop_reason_text() {
        for r in [StopReason::Converged, StopReason::MaxIter, StopReason::Stagnated] {
            assert_eq!(r.as_str().parse::<StopReason>().unwrap(), r);
        }
        assert!("done".parse::<StopReason>().is_err());
    }
}
