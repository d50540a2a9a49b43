use super::Scalar;
use crate::error::{Error, Result};

/// Execution path of the multi-component batch kernels. Both paths produce
/// bitwise-identical results; `Lanes` evaluates several elements at once in
/// component-planar layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelPath {
    Scalar,
    Lanes,
}

impl KernelPath {
    /// `Lanes` when the `simd` feature is enabled, unless `MPCORE_SIMD=off`.
    pub fn from_env() -> Self {
        let off = std::env::var("MPCORE_SIMD").is_ok_and(|v| v.eq_ignore_ascii_case("off"));
        if cfg!(feature = "simd") && !off {
            KernelPath::Lanes
        } else {
            KernelPath::Scalar
        }
    }

    /// Requested path, downgraded to `Scalar` if the build or environment
    /// disables lanes.
    pub fn resolve(requested: KernelPath) -> Self {
        match requested {
            KernelPath::Lanes => Self::from_env(),
            KernelPath::Scalar => KernelPath::Scalar,
        }
    }

    pub fn is_lanes(self) -> bool {
        self == KernelPath::Lanes
    }
}

impl Default for KernelPath {
    fn default() -> Self {
        Self::from_env()
    }
}

fn same_len(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: a, found: b })
    }
}

/// `y[i] <- y[i] + alpha * x[i]`.
pub fn axpy_batch<S: Scalar>(alpha: &S, x: &[S], y: &mut [S], ctx: &S::Ctx, path: KernelPath) -> Result<()> {
    same_len(x.len(), y.len())?;
    S::axpy(alpha, x, y, ctx, path)
}

/// `out[i] <- x[i] * y[i]`.
pub fn elementwise_mul_batch<S: Scalar>(
    x: &[S],
    y: &[S],
    out: &mut [S],
    ctx: &S::Ctx,
    path: KernelPath,
) -> Result<()> {
    same_len(x.len(), y.len())?;
    same_len(x.len(), out.len())?;
    S::mul_elementwise(x, y, out, ctx, path)
}

/// `out[i] <- x[i] + y[i]`.
pub fn elementwise_add_batch<S: Scalar>(
    x: &[S],
    y: &[S],
    out: &mut [S],
    ctx: &S::Ctx,
    path: KernelPath,
) -> Result<()> {
    same_len(x.len(), y.len())?;
    same_len(x.len(), out.len())?;
    S::add_elementwise(x, y, out, ctx, path)
}
