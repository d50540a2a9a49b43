//! Multi-component floating point: unevaluated sums of two, three or four
//! binary64 values (double-double, triple-double, quad-double).

mod eft;
mod kernels;
pub mod lanes;
mod renorm;

use std::cmp::Ordering;
use std::fmt;
use std::sync::Once;

pub use eft::{quick_two_sum, two_prod, two_sum, Lane};

use crate::error::{Error, Result};
use kernels::{add_is_benign, add_sweep, mul_sweep, resweep};
use renorm::{is_strictly_separated, renormalize_robust};

/// `K` binary64 components, most significant first, in canonical form: each
/// component is the correctly rounded value of the exact sum of itself and
/// every component below it.
#[derive(Clone, Copy, PartialEq)]
#[repr(transparent)]
pub struct MultiComp<const K: usize>(pub(crate) [f64; K]);

pub type DoubleDouble = MultiComp<2>;
pub type TripleDouble = MultiComp<3>;
pub type QuadDouble = MultiComp<4>;

/// Component count and the matching mantissa width in bits (`53·k`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrecisionTag {
    k: usize,
}

impl PrecisionTag {
    pub const DD: PrecisionTag = PrecisionTag { k: 2 };
    pub const TD: PrecisionTag = PrecisionTag { k: 3 };
    pub const QD: PrecisionTag = PrecisionTag { k: 4 };

    pub fn from_components(k: usize) -> Result<Self> {
        match k {
            2..=4 => Ok(PrecisionTag { k }),
            _ => Err(Error::InvalidArgument(format!("component count {k} not in 2..=4"))),
        }
    }

    pub fn components(self) -> usize {
        self.k
    }

    pub fn bits(self) -> u32 {
        53 * self.k as u32
    }

    /// Short name used in files and reports.
    pub fn name(self) -> &'static str {
        match self.k {
            2 => "dd",
            3 => "td",
            _ => "qd",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dd" => Ok(Self::DD),
            "td" => Ok(Self::TD),
            "qd" => Ok(Self::QD),
            other => Err(Error::InvalidArgument(format!("unknown precision '{other}'"))),
        }
    }
}

impl fmt::Display for PrecisionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

static ROUNDING_CHECK: Once = Once::new();

/// Panics unless binary64 arithmetic rounds to nearest, ties to even.
pub fn assert_round_to_nearest() {
    ROUNDING_CHECK.call_once(|| {
        let bb = std::hint::black_box;
        let one = bb(1.0f64);
        let h = bb(f64::EPSILON / 2.0);
        assert!(
            one + h == 1.0
                && one + 3.0 * h == 1.0 + 2.0 * f64::EPSILON
                && -one - h == -1.0
                && one - h / 2.0 == 1.0,
            "binary64 rounding mode is not round-to-nearest-even"
        );
    });
}

impl<const K: usize> MultiComp<K> {
    const VALID: () = assert!(K >= 2 && K <= 4, "MultiComp supports 2, 3 or 4 components");

    pub const ZERO: Self = MultiComp([0.0; K]);

    pub const TAG: PrecisionTag = PrecisionTag { k: K };

    pub fn from_f64(x: f64) -> Result<Self> {
        let () = Self::VALID;
        if !x.is_finite() {
            return Err(Error::Overflow);
        }
        let mut c = [0.0; K];
        c[0] = x + 0.0;
        Ok(MultiComp(c))
    }

    pub fn to_f64(&self) -> f64 {
        self.0[0]
    }

    pub fn components(&self) -> &[f64; K] {
        &self.0
    }

    /// Accepts components only if they are already canonical.
    pub fn from_components(c: [f64; K]) -> Result<Self> {
        let () = Self::VALID;
        let canon = renormalize_robust::<K>(&c)?;
        if canon.iter().zip(&c).all(|(a, b)| a.to_bits() == b.to_bits()) {
            Ok(MultiComp(c))
        } else {
            Err(Error::InvalidArgument(format!("components {c:?} are not normalized")))
        }
    }

    /// Canonical `K`-component value closest to the exact sum of `raw`.
    pub fn renormalize(raw: &[f64]) -> Result<Self> {
        let () = Self::VALID;
        renormalize_robust::<K>(raw).map(MultiComp)
    }

    pub fn is_zero(&self) -> bool {
        self.0[0] == 0.0
    }

    pub fn is_sign_negative(&self) -> bool {
        self.0[0] < 0.0
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if add_is_benign(self.0[0], rhs.0[0]) {
            return Self::finish(add_sweep::<f64, K>(&self.0, &rhs.0));
        }
        let mut raw = [0.0; 8];
        raw[..K].copy_from_slice(&self.0);
        raw[K..2 * K].copy_from_slice(&rhs.0);
        renormalize_robust::<K>(&raw[..2 * K]).map(MultiComp)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        Self::finish(mul_sweep::<f64, K>(&self.0, &rhs.0))
    }

    /// Accepts a cascade result in canonical form, otherwise repairs it.
    #[inline]
    fn finish(c: [f64; K]) -> Result<Self> {
        if is_strictly_separated(&c) {
            Ok(MultiComp(c))
        } else {
            Self::repair(c)
        }
    }

    #[cold]
    fn repair(c: [f64; K]) -> Result<Self> {
        if c.iter().any(|x| !x.is_finite()) {
            return Err(Error::Overflow);
        }
        let r = resweep(&c);
        if is_strictly_separated(&r) {
            return Ok(MultiComp(r));
        }
        renormalize_robust::<K>(&c).map(MultiComp)
    }

    /// Long division producing `K + 1` quotient digits.
    pub fn div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivideByZero);
        }
        if self.is_zero() {
            return Ok(Self::ZERO);
        }
        let d0 = rhs.0[0];
        let mut q = [0.0; 5];
        let mut r = *self;
        for (i, slot) in q.iter_mut().enumerate().take(K + 1) {
            let qi = r.0[0] / d0;
            if !qi.is_finite() {
                return Err(Error::Overflow);
            }
            *slot = qi;
            if i == K || qi == 0.0 {
                break;
            }
            r = r.sub(&rhs.mul(&Self::from_f64(qi)?)?)?;
            if r.is_zero() {
                break;
            }
        }
        let swept = renorm::sweep::<f64, K>(&q);
        let mut c = [0.0; K];
        c.copy_from_slice(&swept[..K]);
        if is_strictly_separated(&c) {
            return Ok(MultiComp(c));
        }
        renormalize_robust::<K>(&q[..K + 1]).map(MultiComp)
    }

    /// Newton iteration `x <- x + (a - x²) / 2x` from the binary64 root.
    pub fn sqrt(&self) -> Result<Self> {
        if self.is_zero() {
            return Ok(Self::ZERO);
        }
        if self.is_sign_negative() {
            return Err(Error::Domain("square root of a negative value"));
        }
        let mut x = Self::from_f64(self.0[0].sqrt())?;
        let steps = if K == 2 { 2 } else { 3 };
        for _ in 0..steps {
            let resid = self.sub(&x.mul(&x)?)?;
            if resid.is_zero() {
                break;
            }
            let two_x = x.scale_pow2(2.0);
            x = x.add(&resid.div(&two_x)?)?;
        }
        Ok(x)
    }

    /// Exact scaling by a power of two.
    fn scale_pow2(&self, p: f64) -> Self {
        let mut c = self.0;
        for x in c.iter_mut() {
            *x *= p;
        }
        MultiComp(c)
    }

    pub fn neg(&self) -> Self {
        let mut c = self.0;
        for x in c.iter_mut() {
            *x = 0.0 - *x;
        }
        MultiComp(c)
    }

    pub fn abs(&self) -> Self {
        if self.is_sign_negative() {
            self.neg()
        } else {
            *self
        }
    }

    /// Exact comparison of the represented values.
    pub fn cmp_value(&self, other: &Self) -> Ordering {
        for i in 0..K {
            match self.0[i].partial_cmp(&other.0[i]).expect("MultiComp holds no NaN") {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }

    /// Exact comparison of absolute values.
    pub fn cmp_abs(&self, other: &Self) -> Ordering {
        self.abs().cmp_value(&other.abs())
    }
}

impl<const K: usize> Default for MultiComp<K> {
    fn default() -> Self {
        Self::ZERO
    }
}

impl<const K: usize> fmt::Debug for MultiComp<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", Self::TAG.name().to_uppercase())?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c:e}")?;
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2(e: i32) -> f64 {
        2f64.powi(e)
    }

    fn dd(a: f64, b: f64) -> DoubleDouble {
        DoubleDouble::from_components([a, b]).unwrap()
    }

    #[test]
    fn rounding_mode_is_nearest() {
        assert_round_to_nearest();
    }

    #[test]
    fn tags() {
        assert_eq!(PrecisionTag::TD.bits(), 159);
        assert_eq!(QuadDouble::TAG.bits(), 212);
        assert_eq!(PrecisionTag::parse("DD").unwrap(), PrecisionTag::DD);
        assert!(PrecisionTag::from_components(5).is_err());
        assert!(PrecisionTag::parse("xd").is_err());
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(dd(2.0, 0.0).mul(&dd(3.0, 0.0)).unwrap(), dd(6.0, 0.0));
        assert_eq!(dd(1.0, 0.0).add(&dd(p2(-100), 0.0)).unwrap(), dd(1.0, p2(-100)));
        assert_eq!(dd(4.0, 0.0).sqrt().unwrap(), dd(2.0, 0.0));
        assert_eq!(dd(0.0, 0.0).sqrt().unwrap(), dd(0.0, 0.0));
        assert_eq!(dd(6.0, 0.0).div(&dd(3.0, 0.0)).unwrap(), dd(2.0, 0.0));
    }

    #[test]
    fn comparisons_and_signs() {
        assert_eq!(dd(1.0, p2(-60)).cmp_value(&dd(1.0, 0.0)), Ordering::Greater);
        assert_eq!(dd(-1.0, p2(-60)).abs(), dd(1.0, -p2(-60)));
        let td = TripleDouble::from_components([5.0, p2(-60), 0.0]).unwrap();
        assert_eq!(td.to_f64(), 5.0);
        assert_eq!(DoubleDouble::from_f64(7.5).unwrap().components(), &[7.5, 0.0]);
        let n = dd(1.0, 0.0).neg();
        assert!(n.components().iter().skip(1).all(|c| c.to_bits() == 0));
    }

    #[test]
    fn error_paths() {
        assert_eq!(dd(1.0, 0.0).div(&DoubleDouble::ZERO), Err(Error::DivideByZero));
        assert!(matches!(dd(-4.0, 0.0).sqrt(), Err(Error::Domain(_))));
        assert_eq!(dd(1e300, 0.0).mul(&dd(1e300, 0.0)), Err(Error::Overflow));
        assert_eq!(DoubleDouble::from_f64(f64::INFINITY), Err(Error::Overflow));
        assert!(DoubleDouble::from_components([1.0, 1.0]).is_err());
    }

    #[test]
    fn cancellation_is_exact() {
        let a = QuadDouble::from_components([1.0, p2(-60), p2(-120), p2(-180)]).unwrap();
        let b = QuadDouble::from_components([1.0, p2(-60), p2(-120), 0.0]).unwrap();
        assert_eq!(a.sub(&b).unwrap().components(), &[p2(-180), 0.0, 0.0, 0.0]);
        assert!(a.sub(&a).unwrap().is_zero());
    }

    #[test]
    fn multiplying_by_one_is_identity() {
        let a = TripleDouble::renormalize(&[std::f64::consts::PI, 1.2e-16, -3.4e-33]).unwrap();
        let one = TripleDouble::from_f64(1.0).unwrap();
        assert_eq!(a.mul(&one).unwrap().components(), a.components());
    }
}
