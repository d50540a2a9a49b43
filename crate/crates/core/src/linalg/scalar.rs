use std::cmp::Ordering;
use std::fmt::Debug;

use super::KernelPath;
use crate::bigfloat::{BigFloat, PrecisionContext};
use crate::error::Result;
use crate::mcfloat::{lanes, MultiComp};

/// Field operations shared by the multi-component and arbitrary-precision
/// types. Every fallible operation reports overflow or domain errors instead
/// of producing non-finite values.
pub trait Scalar: Clone + Debug + Send + Sync + 'static {
    /// Arithmetic context: `()` for fixed-width types, the precision for
    /// [`BigFloat`].
    type Ctx: Clone + Debug + Send + Sync;

    fn zero(ctx: &Self::Ctx) -> Self;
    fn from_f64(x: f64, ctx: &Self::Ctx) -> Result<Self>;
    fn add(&self, rhs: &Self, ctx: &Self::Ctx) -> Result<Self>;
    fn sub(&self, rhs: &Self, ctx: &Self::Ctx) -> Result<Self>;
    fn mul(&self, rhs: &Self, ctx: &Self::Ctx) -> Result<Self>;
    fn div(&self, rhs: &Self, ctx: &Self::Ctx) -> Result<Self>;
    fn sqrt(&self, ctx: &Self::Ctx) -> Result<Self>;
    fn neg(&self) -> Self;
    fn abs(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn cmp_abs(&self, other: &Self) -> Ordering;
    /// Leading binary64 approximation.
    fn approx(&self) -> f64;

    fn one(ctx: &Self::Ctx) -> Self {
        Self::from_f64(1.0, ctx).expect("1 is representable")
    }

    /// `y[i] <- y[i] + alpha * x[i]`.
    fn axpy(alpha: &Self, x: &[Self], y: &mut [Self], ctx: &Self::Ctx, _path: KernelPath) -> Result<()> {
        for (xi, yi) in x.iter().zip(y.iter_mut()) {
            *yi = yi.add(&alpha.mul(xi, ctx)?, ctx)?;
        }
        Ok(())
    }

    fn mul_elementwise(x: &[Self], y: &[Self], out: &mut [Self], ctx: &Self::Ctx, _path: KernelPath) -> Result<()> {
        for ((xi, yi), oi) in x.iter().zip(y).zip(out.iter_mut()) {
            *oi = xi.mul(yi, ctx)?;
        }
        Ok(())
    }

    fn add_elementwise(x: &[Self], y: &[Self], out: &mut [Self], ctx: &Self::Ctx, _path: KernelPath) -> Result<()> {
        for ((xi, yi), oi) in x.iter().zip(y).zip(out.iter_mut()) {
            *oi = xi.add(yi, ctx)?;
        }
        Ok(())
    }
}

impl<const K: usize> Scalar for MultiComp<K> {
    type Ctx = ();

    fn zero(_: &()) -> Self {
        Self::ZERO
    }
    fn from_f64(x: f64, _: &()) -> Result<Self> {
        MultiComp::from_f64(x)
    }
    fn add(&self, rhs: &Self, _: &()) -> Result<Self> {
        MultiComp::add(self, rhs)
    }
    fn sub(&self, rhs: &Self, _: &()) -> Result<Self> {
        MultiComp::sub(self, rhs)
    }
    fn mul(&self, rhs: &Self, _: &()) -> Result<Self> {
        MultiComp::mul(self, rhs)
    }
    fn div(&self, rhs: &Self, _: &()) -> Result<Self> {
        MultiComp::div(self, rhs)
    }
    fn sqrt(&self, _: &()) -> Result<Self> {
        MultiComp::sqrt(self)
    }
    fn neg(&self) -> Self {
        MultiComp::neg(self)
    }
    fn abs(&self) -> Self {
        MultiComp::abs(self)
    }
    fn is_zero(&self) -> bool {
        MultiComp::is_zero(self)
    }
    fn cmp_abs(&self, other: &Self) -> Ordering {
        MultiComp::cmp_abs(self, other)
    }
    fn approx(&self) -> f64 {
        self.to_f64()
    }

    fn axpy(alpha: &Self, x: &[Self], y: &mut [Self], ctx: &(), path: KernelPath) -> Result<()> {
        match path {
            KernelPath::Lanes => lanes::axpy(alpha, x, y),
            KernelPath::Scalar => {
                for (xi, yi) in x.iter().zip(y.iter_mut()) {
                    *yi = Scalar::add(yi, &Scalar::mul(alpha, xi, ctx)?, ctx)?;
                }
                Ok(())
            }
        }
    }

    fn mul_elementwise(x: &[Self], y: &[Self], out: &mut [Self], _: &(), path: KernelPath) -> Result<()> {
        match path {
            KernelPath::Lanes => lanes::mul_elementwise(x, y, out),
            KernelPath::Scalar => {
                for ((xi, yi), oi) in x.iter().zip(y).zip(out.iter_mut()) {
                    *oi = MultiComp::mul(xi, yi)?;
                }
                Ok(())
            }
        }
    }

    fn add_elementwise(x: &[Self], y: &[Self], out: &mut [Self], _: &(), path: KernelPath) -> Result<()> {
        match path {
            KernelPath::Lanes => lanes::add_elementwise(x, y, out),
            KernelPath::Scalar => {
                for ((xi, yi), oi) in x.iter().zip(y).zip(out.iter_mut()) {
                    *oi = MultiComp::add(xi, yi)?;
                }
                Ok(())
            }
        }
    }
}

impl Scalar for BigFloat {
    type Ctx = PrecisionContext;

    fn zero(ctx: &PrecisionContext) -> Self {
        BigFloat::zero(ctx)
    }
    fn from_f64(x: f64, ctx: &PrecisionContext) -> Result<Self> {
        BigFloat::from_f64(x, ctx)
    }
    fn add(&self, rhs: &Self, ctx: &PrecisionContext) -> Result<Self> {
        BigFloat::add(self, rhs, ctx)
    }
    fn sub(&self, rhs: &Self, ctx: &PrecisionContext) -> Result<Self> {
        BigFloat::sub(self, rhs, ctx)
    }
    fn mul(&self, rhs: &Self, ctx: &PrecisionContext) -> Result<Self> {
        BigFloat::mul(self, rhs, ctx)
    }
    fn div(&self, rhs: &Self, ctx: &PrecisionContext) -> Result<Self> {
        BigFloat::div(self, rhs, ctx)
    }
    fn sqrt(&self, ctx: &PrecisionContext) -> Result<Self> {
        BigFloat::sqrt(self, ctx)
    }
    fn neg(&self) -> Self {
        BigFloat::neg(self)
    }
    fn abs(&self) -> Self {
        BigFloat::abs(self)
    }
    fn is_zero(&self) -> bool {
        BigFloat::is_zero(self)
    }
    fn cmp_abs(&self, other: &Self) -> Ordering {
        BigFloat::cmp_abs(self, other)
    }
    fn approx(&self) -> f64 {
        self.to_f64()
    }
}
