//! Arbitrary-precision binary floating point.
//!
//! A non-zero value is `(-1)^neg · mant · 2^exp` where `mant` has exactly `prec`
//! significant bits. All arithmetic is correctly rounded (nearest, ties to even)
//! to the precision carried by the [`PrecisionContext`] passed in.

mod arith;
mod convert;
mod text;

pub use text::{f64_from_hex, f64_to_hex};

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Mantissa width of every result produced under this context.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    bits: u32,
}

impl PrecisionContext {
    /// Long precision used by the refinement experiments.
    pub const LONG_DEFAULT: PrecisionContext = PrecisionContext { bits: 424 };

    pub fn new(bits: u32) -> Result<Self> {
        if bits < 2 {
            return Err(Error::InvalidArgument(format!("precision {bits} < 2 bits")));
        }
        Ok(PrecisionContext { bits })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Same context widened by `extra` bits.
    pub fn widen(&self, extra: u32) -> PrecisionContext {
        PrecisionContext { bits: self.bits + extra }
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self::LONG_DEFAULT
    }
}

/// Largest admissible magnitude of the binary exponent.
pub(crate) const EXP_LIMIT: i64 = 1 << 62;

#[derive(Clone)]
pub struct BigFloat {
    neg: bool,
    exp: i64,
    mant: BigUint,
    prec: u32,
}

impl BigFloat {
    pub fn zero(ctx: &PrecisionContext) -> Self {
        BigFloat { neg: false, exp: 0, mant: BigUint::zero(), prec: ctx.bits }
    }

    pub fn one(ctx: &PrecisionContext) -> Self {
        Self::from_u64(1, ctx)
    }

    pub fn from_u64(v: u64, ctx: &PrecisionContext) -> Self {
        arith::round_from(false, BigUint::from(v), 0, false, ctx.bits)
            .expect("u64 values are in range")
    }

    pub fn from_i64(v: i64, ctx: &PrecisionContext) -> Self {
        let mag = Self::from_u64(v.unsigned_abs(), ctx);
        if v < 0 {
            mag.neg()
        } else {
            mag
        }
    }

    /// `mant · 2^exp` rounded to the context precision.
    pub fn from_parts(neg: bool, mant: BigUint, exp: i64, ctx: &PrecisionContext) -> Result<Self> {
        arith::round_from(neg, mant, exp, false, ctx.bits)
    }

    /// Exact `mant · 2^exp` carrying exactly as many bits as needed.
    pub(crate) fn exact(neg: bool, mant: BigUint, exp: i64) -> Result<Self> {
        let bits = (mant.bits() as u32).max(2);
        arith::round_from(neg, mant, exp, false, bits)
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_sign_negative(&self) -> bool {
        self.neg
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Binary exponent of the least significant mantissa bit.
    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn mantissa(&self) -> &BigUint {
        &self.mant
    }

    /// `e` with `2^(e-1) <= |self| < 2^e`; `None` for zero.
    pub fn magnitude_exponent(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.exp + self.mant.bits() as i64)
        }
    }

    pub fn neg(&self) -> Self {
        let mut r = self.clone();
        if !r.is_zero() {
            r.neg = !r.neg;
        }
        r
    }

    pub fn abs(&self) -> Self {
        let mut r = self.clone();
        r.neg = false;
        r
    }

    /// Rounds to another precision.
    pub fn round_to(&self, ctx: &PrecisionContext) -> Result<Self> {
        if self.is_zero() {
            return Ok(Self::zero(ctx));
        }
        arith::round_from(self.neg, self.mant.clone(), self.exp, false, ctx.bits)
    }

    /// Exact comparison of values, independent of precision.
    pub fn cmp_value(&self, other: &Self) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => {
                return if other.neg { Ordering::Greater } else { Ordering::Less };
            }
            (false, true) => {
                return if self.neg { Ordering::Less } else { Ordering::Greater };
            }
            _ => {}
        }
        if self.neg != other.neg {
            return if self.neg { Ordering::Less } else { Ordering::Greater };
        }
        let mag = arith::cmp_magnitude(self, other);
        if self.neg {
            mag.reverse()
        } else {
            mag
        }
    }

    pub fn cmp_abs(&self, other: &Self) -> Ordering {
        arith::cmp_magnitude(self, other)
    }

    pub fn max_value<'a>(&'a self, other: &'a Self) -> &'a Self {
        if self.cmp_value(other) == Ordering::Less {
            other
        } else {
            self
        }
    }
}

impl PartialEq for BigFloat {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_value(other) == Ordering::Equal
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_value(other))
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigFloat[{}]({})", self.prec, self.to_hex())
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(((self.prec as f64) * std::f64::consts::LOG10_2).ceil() as usize + 2);
        f.write_str(&self.format_decimal(digits.max(1)))
    }
}
