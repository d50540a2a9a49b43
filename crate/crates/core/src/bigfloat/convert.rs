use num_bigint::BigUint;
use num_traits::ToPrimitive;

use super::arith::{add_exact, round_from};
use super::{BigFloat, PrecisionContext};
use crate::error::{Error, Result};
use crate::mcfloat::MultiComp;

/// Integer significand and exponent of a finite binary64: `x = ±m · 2^e`.
fn decompose(x: f64) -> (bool, u64, i64) {
    let bits = x.to_bits();
    let neg = bits >> 63 == 1;
    let biased = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    if biased == 0 {
        (neg, frac, -1074)
    } else {
        (neg, frac | (1u64 << 52), biased - 1075)
    }
}

impl BigFloat {
    /// Exact for `ctx.bits() >= 53`; rounded otherwise.
    pub fn from_f64(x: f64, ctx: &PrecisionContext) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::Overflow);
        }
        if x == 0.0 {
            return Ok(BigFloat::zero(ctx));
        }
        let (neg, m, e) = decompose(x);
        round_from(neg, BigUint::from(m), e, false, ctx.bits())
    }

    /// Exact binary64 value with 53-bit precision.
    pub(crate) fn from_f64_exact(x: f64) -> Result<Self> {
        Self::from_f64(x, &PrecisionContext::new(53)?)
    }

    /// Nearest binary64, ties to even. Values beyond the binary64 range map
    /// to infinities; [`BigFloat::to_f64_checked`] reports them instead.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let top = self.exp + self.mant.bits() as i64;
        if top > 1024 {
            return if self.neg { f64::NEG_INFINITY } else { f64::INFINITY };
        }
        // Subnormal results keep fewer bits.
        let keep = if top - 1 >= -1022 { 53 } else { 53 - (-1022 - (top - 1)) };
        let mag = if keep <= 0 {
            // Below half the smallest subnormal rounds to zero; above rounds up.
            let half_min = -1075;
            let above_half = top - 1 > half_min
                || (top - 1 == half_min && self.mant.trailing_zeros() != Some(self.mant.bits() - 1));
            if keep == 0 && above_half {
                f64::from_bits(1)
            } else {
                0.0
            }
        } else {
            let r = round_from(false, self.mant.clone(), self.exp, false, keep as u32)
                .expect("rounding to fewer bits stays in range");
            let m = r.mant.to_u64().expect("at most 53 bits");
            scale(m as f64, r.exp)
        };
        if self.neg {
            -mag
        } else {
            mag
        }
    }

    pub fn to_f64_checked(&self) -> Result<f64> {
        let v = self.to_f64();
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Overflow)
        }
    }

    /// Greedy split into `K` binary64 components; each component is the
    /// nearest binary64 of what the previous ones left over.
    pub fn to_multicomp<const K: usize>(&self) -> Result<MultiComp<K>> {
        let mut comps = [0.0; K];
        let mut rest = self.clone();
        for slot in comps.iter_mut() {
            if rest.is_zero() {
                break;
            }
            let c = rest.to_f64_checked()?;
            *slot = c;
            rest = add_exact(&rest, &Self::from_f64_exact(-c)?)?;
        }
        MultiComp::renormalize(&comps)
    }

    /// Exact sum of the components, rounded to `ctx`.
    pub fn from_multicomp<const K: usize>(m: &MultiComp<K>, ctx: &PrecisionContext) -> Result<Self> {
        let mut acc = BigFloat::zero(&PrecisionContext::new(53)?);
        for &c in m.components().iter().rev() {
            if c != 0.0 {
                acc = add_exact(&acc, &Self::from_f64_exact(c)?)?;
            }
        }
        acc.round_to(ctx)
    }
}

/// `m · 2^e` for `m < 2^53`, exact whenever the result is representable.
fn scale(m: f64, e: i64) -> f64 {
    let mut v = m;
    let mut e = e;
    while e > 0 {
        let step = e.min(1000);
        v *= 2f64.powi(step as i32);
        e -= step;
    }
    while e < 0 {
        let step = (-e).min(1000);
        v /= 2f64.powi(step as i32);
        e += step;
    }
    v
}
