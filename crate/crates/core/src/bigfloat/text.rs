//! Decimal and hexadecimal text forms.
//!
//! Decimal: `[+-]digits[.digits][(e|E)[+-]digits]`, correctly rounded on input.
//! Hex: `[+-]0xH[.H][p[+-]digits]`, exact on input whenever the context is wide
//! enough, and exact on output.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Pow, Zero};

use super::arith::round_from;
use super::{BigFloat, PrecisionContext};
use crate::error::{Error, Result};

fn parse_err(s: &str, why: &str) -> Error {
    Error::Parse(format!("{why}: '{s}'"))
}

fn split_sign(s: &str) -> (bool, &str) {
    if let Some(r) = s.strip_prefix('-') {
        (true, r)
    } else if let Some(r) = s.strip_prefix('+') {
        (false, r)
    } else {
        (false, s)
    }
}

fn parse_exponent(s: &str, full: &str) -> Result<i64> {
    let (neg, digits) = split_sign(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(parse_err(full, "malformed exponent"));
    }
    let v: i64 = digits.parse().map_err(|_| parse_err(full, "exponent out of range"))?;
    Ok(if neg { -v } else { v })
}

impl BigFloat {
    /// Parses decimal or hex-float text, rounding to `ctx`.
    pub fn parse(s: &str, ctx: &PrecisionContext) -> Result<Self> {
        let t = s.trim();
        let (_, body) = split_sign(t);
        if body.starts_with("0x") || body.starts_with("0X") {
            Self::parse_hex(t, ctx)
        } else {
            Self::parse_decimal(t, ctx)
        }
    }

    pub fn parse_decimal(s: &str, ctx: &PrecisionContext) -> Result<Self> {
        let (neg, body) = split_sign(s.trim());
        let (mantissa, exp10) = match body.find(['e', 'E']) {
            Some(i) => (&body[..i], parse_exponent(&body[i + 1..], s)?),
            None => (body, 0),
        };
        let (int_part, frac_part) = match mantissa.find('.') {
            Some(i) => (&mantissa[..i], &mantissa[i + 1..]),
            None => (mantissa, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(parse_err(s, "no digits"));
        }
        if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
            return Err(parse_err(s, "invalid digit"));
        }
        let digits: String = format!("{int_part}{frac_part}");
        let digits = digits.trim_start_matches('0');
        if digits.is_empty() {
            return Ok(BigFloat::zero(ctx));
        }
        let n = BigUint::parse_bytes(digits.as_bytes(), 10).ok_or_else(|| parse_err(s, "digits"))?;
        let e10 = exp10
            .checked_sub(frac_part.len() as i64)
            .ok_or_else(|| parse_err(s, "exponent out of range"))?;
        from_decimal_parts(neg, n, e10, ctx.bits())
    }

    pub fn parse_hex(s: &str, ctx: &PrecisionContext) -> Result<Self> {
        let (neg, body) = split_sign(s.trim());
        let body = body
            .strip_prefix("0x")
            .or_else(|| body.strip_prefix("0X"))
            .ok_or_else(|| parse_err(s, "missing 0x prefix"))?;
        let (mantissa, exp2) = match body.find(['p', 'P']) {
            Some(i) => (&body[..i], parse_exponent(&body[i + 1..], s)?),
            None => (body, 0),
        };
        let (int_part, frac_part) = match mantissa.find('.') {
            Some(i) => (&mantissa[..i], &mantissa[i + 1..]),
            None => (mantissa, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(parse_err(s, "no digits"));
        }
        if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_hexdigit()) {
            return Err(parse_err(s, "invalid hex digit"));
        }
        let digits = format!("{int_part}{frac_part}");
        let m = BigUint::parse_bytes(digits.as_bytes(), 16).ok_or_else(|| parse_err(s, "digits"))?;
        if m.is_zero() {
            return Ok(BigFloat::zero(ctx));
        }
        let e = exp2 - 4 * frac_part.len() as i64;
        round_from(neg, m, e, false, ctx.bits())
    }

    /// Exact hex-float text: `0x1.hhhp±e`, trailing zero digits dropped.
    pub fn to_hex(&self) -> String {
        if self.is_zero() {
            return "0x0p+0".to_string();
        }
        let bits = self.mant.bits();
        let frac_bits = bits - 1;
        let frac = &self.mant - (BigUint::one() << frac_bits);
        let pad = (4 - frac_bits % 4) % 4;
        let ndigits = ((frac_bits + pad) / 4) as usize;
        let mut hex = if ndigits == 0 { String::new() } else { (frac << pad).to_str_radix(16) };
        if hex.len() < ndigits {
            hex = format!("{}{}", "0".repeat(ndigits - hex.len()), hex);
        }
        let hex = hex.trim_end_matches('0');
        let e = self.exp + frac_bits as i64;
        let sign = if self.neg { "-" } else { "" };
        if hex.is_empty() {
            format!("{sign}0x1p{e:+}")
        } else {
            format!("{sign}0x1.{hex}p{e:+}")
        }
    }

    /// Decimal scientific notation with `digits` significant digits, rounded
    /// to nearest (ties to even).
    pub fn format_decimal(&self, digits: usize) -> String {
        let digits = digits.max(1);
        if self.is_zero() {
            return "0".to_string();
        }
        let top = self.exp + self.mant.bits() as i64;
        // floor(log10|x|) is within one of this estimate.
        let mut e10 = ((top - 1) as f64 * std::f64::consts::LOG10_2).floor() as i64;
        let mut d;
        loop {
            let shift = e10 - digits as i64 + 1;
            d = scaled_integer(&self.mant, self.exp, shift);
            let nd = d.to_str_radix(10).len();
            if nd > digits {
                e10 += 1;
            } else if nd < digits {
                e10 -= 1;
            } else {
                break;
            }
        }
        let s = d.to_str_radix(10);
        let sign = if self.neg { "-" } else { "" };
        if digits == 1 {
            format!("{sign}{s}e{e10}")
        } else {
            format!("{sign}{}.{}e{e10}", &s[..1], &s[1..])
        }
    }
}

/// `round(mant · 2^exp / 10^shift)` to nearest, ties to even.
fn scaled_integer(mant: &BigUint, exp: i64, shift: i64) -> BigUint {
    let ten = BigUint::from(10u32);
    let mut num = mant.clone();
    let mut den = BigUint::one();
    if exp >= 0 {
        num <<= exp as u64;
    } else {
        den <<= (-exp) as u64;
    }
    if shift >= 0 {
        den *= ten.pow(shift as u32);
    } else {
        num *= ten.pow((-shift) as u32);
    }
    let (q, r) = num.div_rem(&den);
    let twice = r << 1u32;
    if twice > den || (twice == den && q.bit(0)) {
        q + 1u32
    } else {
        q
    }
}

/// Correctly rounded `n · 10^e10` at `prec` bits.
fn from_decimal_parts(neg: bool, n: BigUint, e10: i64, prec: u32) -> Result<BigFloat> {
    if e10.unsigned_abs() > 400_000 {
        return Err(Error::Overflow);
    }
    let ten = BigUint::from(10u32);
    if e10 >= 0 {
        return round_from(neg, n * ten.pow(e10 as u32), 0, false, prec);
    }
    let den = ten.pow((-e10) as u32);
    let want = prec as u64 + 3 + den.bits();
    let shift = want.saturating_sub(n.bits());
    let (q, r) = (n << shift).div_rem(&den);
    round_from(neg, q, -(shift as i64), !r.is_zero(), prec)
}

/// Exact hex text of a binary64, preserving the sign of zero.
pub fn f64_to_hex(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0x0p+0".into() } else { "0x0p+0".into() };
    }
    BigFloat::from_f64_exact(x).expect("finite binary64").to_hex()
}

/// Inverse of [`f64_to_hex`]; rejects text that is not exactly a binary64.
pub fn f64_from_hex(s: &str) -> Result<f64> {
    let t = s.trim();
    let p53 = PrecisionContext::new(53)?;
    let v = BigFloat::parse_hex(t, &p53)?;
    if v.is_zero() {
        return Ok(if t.starts_with('-') { -0.0 } else { 0.0 });
    }
    let x = v.to_f64_checked()?;
    let wide = PrecisionContext::new(64)?;
    if BigFloat::parse_hex(t, &wide)? != BigFloat::from_f64(x, &wide)? {
        return Err(parse_err(s, "not exactly representable in binary64"));
    }
    Ok(x)
}
