use std::cmp::Ordering;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{BigFloat, PrecisionContext, EXP_LIMIT};
use crate::error::{Error, Result};

/// Rounds `(-1)^neg · (mant + δ) · 2^exp` to `prec` bits, nearest-even, where
/// `δ ∈ (0, 1)` when `sticky` is set. With `sticky`, `mant` must carry at least
/// `prec + 2` bits.
pub(crate) fn round_from(
    neg: bool,
    mant: BigUint,
    exp: i64,
    sticky: bool,
    prec: u32,
) -> Result<BigFloat> {
    if mant.is_zero() {
        debug_assert!(!sticky);
        return Ok(BigFloat { neg: false, exp: 0, mant, prec });
    }
    let bits = mant.bits();
    let prec64 = prec as u64;
    let (mant, exp) = if bits <= prec64 {
        debug_assert!(!sticky || bits >= prec64 + 2);
        let shift = prec64 - bits;
        (mant << shift, exp - shift as i64)
    } else {
        let shift = bits - prec64;
        let guard = mant.bit(shift - 1);
        let rest = sticky || mant.trailing_zeros().is_some_and(|tz| tz < shift - 1);
        let mut q = mant >> shift;
        let mut exp = exp + shift as i64;
        if guard && (rest || q.bit(0)) {
            q += 1u32;
            if q.bits() > prec64 {
                q >>= 1u32;
                exp += 1;
            }
        }
        (q, exp)
    };
    let top = exp.checked_add(prec as i64).ok_or(Error::Overflow)?;
    if top.abs() > EXP_LIMIT || exp.abs() > EXP_LIMIT {
        return Err(Error::Overflow);
    }
    Ok(BigFloat { neg, exp, mant, prec })
}

fn top(a: &BigFloat) -> i64 {
    a.exp + a.mant.bits() as i64
}

pub(crate) fn cmp_magnitude(a: &BigFloat, b: &BigFloat) -> Ordering {
    match (a.is_zero(), b.is_zero()) {
        (true, true) => return Ordering::Equal,
        (true, false) => return Ordering::Less,
        (false, true) => return Ordering::Greater,
        _ => {}
    }
    match top(a).cmp(&top(b)) {
        Ordering::Equal => {}
        ord => return ord,
    }
    let e = a.exp.min(b.exp);
    let am = &a.mant << (a.exp - e) as u64;
    let bm = &b.mant << (b.exp - e) as u64;
    am.cmp(&bm)
}

/// Signed sum of two magnitudes aligned at exponent `e`.
fn signed_combine(
    xneg: bool,
    xm: BigUint,
    yneg: bool,
    ym: BigUint,
) -> (bool, BigUint) {
    if xneg == yneg {
        (xneg, xm + ym)
    } else {
        match xm.cmp(&ym) {
            Ordering::Greater => (xneg, xm - ym),
            Ordering::Less => (yneg, ym - xm),
            Ordering::Equal => (false, BigUint::zero()),
        }
    }
}

fn add_signed(a: &BigFloat, b: &BigFloat, bneg: bool, prec: u32) -> Result<BigFloat> {
    if b.is_zero() {
        return round_from(a.neg, a.mant.clone(), a.exp, false, prec);
    }
    if a.is_zero() {
        return round_from(bneg, b.mant.clone(), b.exp, false, prec);
    }
    // x is the operand reaching higher.
    let (x, xneg, y, yneg) =
        if top(a) >= top(b) { (a, a.neg, b, bneg) } else { (b, bneg, a, a.neg) };
    let low = x.exp.min(top(x) - prec as i64 - 2);
    if top(y) < low - 1 {
        // y lies entirely below every bit and rounding boundary of the result;
        // a unit two positions below `low` stands in for it.
        let e = low - 2;
        let xm = &x.mant << (x.exp - e) as u64;
        let (neg, m) = signed_combine(xneg, xm, yneg, BigUint::one());
        return round_from(neg, m, e, false, prec);
    }
    let e = x.exp.min(y.exp);
    let xm = &x.mant << (x.exp - e) as u64;
    let ym = &y.mant << (y.exp - e) as u64;
    let (neg, m) = signed_combine(xneg, xm, yneg, ym);
    round_from(neg, m, e, false, prec)
}

/// Exact sum with as many bits as needed.
pub(crate) fn add_exact(a: &BigFloat, b: &BigFloat) -> Result<BigFloat> {
    if a.is_zero() {
        return Ok(b.clone());
    }
    if b.is_zero() {
        return Ok(a.clone());
    }
    let e = a.exp.min(b.exp);
    let am = &a.mant << (a.exp - e) as u64;
    let bm = &b.mant << (b.exp - e) as u64;
    let (neg, m) = signed_combine(a.neg, am, b.neg, bm);
    if m.is_zero() {
        return Ok(BigFloat { neg: false, exp: 0, mant: m, prec: a.prec.max(b.prec) });
    }
    BigFloat::exact(neg, m, e)
}

impl BigFloat {
    pub fn add(&self, rhs: &Self, ctx: &PrecisionContext) -> Result<Self> {
        add_signed(self, rhs, rhs.neg, ctx.bits)
    }

    pub fn sub(&self, rhs: &Self, ctx: &PrecisionContext) -> Result<Self> {
        add_signed(self, rhs, !rhs.neg && !rhs.is_zero(), ctx.bits)
    }

    pub fn mul(&self, rhs: &Self, ctx: &PrecisionContext) -> Result<Self> {
        if self.is_zero() || rhs.is_zero() {
            return Ok(BigFloat::zero(ctx));
        }
        let exp = self.exp.checked_add(rhs.exp).ok_or(Error::Overflow)?;
        round_from(self.neg != rhs.neg, &self.mant * &rhs.mant, exp, false, ctx.bits)
    }

    /// Correctly rounded quotient.
    pub fn div(&self, rhs: &Self, ctx: &PrecisionContext) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivideByZero);
        }
        if self.is_zero() {
            return Ok(BigFloat::zero(ctx));
        }
        let want = ctx.bits as u64 + 3 + rhs.mant.bits();
        let shift = want.saturating_sub(self.mant.bits());
        let num = &self.mant << shift;
        let (q, r) = num.div_rem(&rhs.mant);
        let exp = self.exp - shift as i64 - rhs.exp;
        round_from(self.neg != rhs.neg, q, exp, !r.is_zero(), ctx.bits)
    }

    /// Correctly rounded square root.
    pub fn sqrt(&self, ctx: &PrecisionContext) -> Result<Self> {
        if self.is_zero() {
            return Ok(BigFloat::zero(ctx));
        }
        if self.neg {
            return Err(Error::Domain("square root of a negative value"));
        }
        let want = 2 * (ctx.bits as u64 + 2);
        let mut shift = want.saturating_sub(self.mant.bits());
        if (self.exp - shift as i64).rem_euclid(2) != 0 {
            shift += 1;
        }
        let radicand = &self.mant << shift;
        let root = radicand.sqrt();
        let inexact = &root * &root != radicand;
        let exp = (self.exp - shift as i64) / 2;
        round_from(false, root, exp, inexact, ctx.bits)
    }

    /// `self · 2^k`, exact.
    pub fn mul_pow2(&self, k: i64) -> Result<Self> {
        if self.is_zero() {
            return Ok(self.clone());
        }
        let exp = self.exp.checked_add(k).ok_or(Error::Overflow)?;
        round_from(self.neg, self.mant.clone(), exp, false, self.prec)
    }

    /// Integer power by repeated squaring, each step rounded to `ctx`.
    pub fn powi(&self, mut n: u64, ctx: &PrecisionContext) -> Result<Self> {
        let mut base = self.round_to(ctx)?;
        let mut acc = BigFloat::one(ctx);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base, ctx)?;
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base, ctx)?;
            }
        }
        Ok(acc)
    }
}
