//! Error-free transformations.
//!
//! The primitives are written against [`Lane`] so that the scalar path and the
//! component-planar batch path execute the same IEEE operation sequence.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// A value that supports the binary64 operations used by the kernels, applied
/// elementwise when the type carries several lanes.
pub trait Lane:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    const ZERO: Self;

    fn fma(a: Self, b: Self, c: Self) -> Self;
}

impl Lane for f64 {
    const ZERO: f64 = 0.0;

    #[inline(always)]
    fn fma(a: f64, b: f64, c: f64) -> f64 {
        a.mul_add(b, c)
    }
}

#[inline(always)]
pub(crate) fn two_sum_lane<L: Lane>(a: L, b: L) -> (L, L) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline(always)]
pub(crate) fn quick_two_sum_lane<L: Lane>(a: L, b: L) -> (L, L) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

#[inline(always)]
pub(crate) fn two_prod_lane<L: Lane>(a: L, b: L) -> (L, L) {
    let p = a * b;
    let e = L::fma(a, b, -p);
    (p, e)
}

/// `s = fl(a + b)` and `e` with `s + e == a + b` exactly.
pub fn two_sum(a: f64, b: f64) -> Result<(f64, f64)> {
    let (s, e) = two_sum_lane(a, b);
    if !s.is_finite() || !e.is_finite() {
        return Err(Error::Overflow);
    }
    Ok((s, e))
}

/// Fast variant of [`two_sum`]; requires `|a| >= |b|` or `a == 0`.
pub fn quick_two_sum(a: f64, b: f64) -> Result<(f64, f64)> {
    debug_assert!(
        a == 0.0 || a.abs() >= b.abs() || !a.is_finite(),
        "quick_two_sum precondition violated: |{a:e}| < |{b:e}|"
    );
    let (s, e) = quick_two_sum_lane(a, b);
    if !s.is_finite() || !e.is_finite() {
        return Err(Error::Overflow);
    }
    Ok((s, e))
}

// Below this magnitude the FMA residual of a product may be subnormal and lose bits.
const PROD_UNDERFLOW_GUARD: f64 = f64::from_bits((1023 - 969) << 52); // 2^-969

/// `p = fl(a * b)` and `e = fma(a, b, -p)` with `p + e == a * b` exactly.
pub fn two_prod(a: f64, b: f64) -> Result<(f64, f64)> {
    let (p, e) = two_prod_lane(a, b);
    if !p.is_finite() || !e.is_finite() {
        return Err(Error::Overflow);
    }
    if p != 0.0 && p.abs() < PROD_UNDERFLOW_GUARD {
        return Err(Error::Overflow);
    }
    Ok((p, e))
}
