//! Renormalization of raw binary64 expansions into canonical k-component form.
//!
//! Canonical form: every component is the round-to-nearest-even binary64 value
//! of the exact sum of itself and all lower components. Zero components only
//! appear after all non-zero ones and are always `+0.0`.

use super::eft::{two_sum_lane, Lane};
use crate::error::{Error, Result};

/// Exact expansions of raw sequences longer than this fall back to the heap.
const INLINE_TERMS: usize = 40;

/// Non-overlapping expansion in increasing magnitude, zero-free.
struct Expansion {
    terms: Vec<f64>,
}

impl Expansion {
    fn with_capacity(n: usize) -> Self {
        Expansion { terms: Vec::with_capacity(n.max(INLINE_TERMS)) }
    }

    /// Adds `b` exactly (Shewchuk's grow-expansion with zero elimination).
    fn grow(&mut self, b: f64) {
        let mut q = b;
        let mut w = 0;
        for i in 0..self.terms.len() {
            let (s, h) = two_sum_lane(q, self.terms[i]);
            if h != 0.0 {
                self.terms[w] = h;
                w += 1;
            }
            q = s;
        }
        self.terms.truncate(w);
        if q != 0.0 {
            self.terms.push(q);
        }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sign of the exact sum: the sign of its largest component.
    fn signum(&self) -> f64 {
        match self.terms.last() {
            None => 0.0,
            Some(t) => t.signum(),
        }
    }

    fn approx(&self) -> f64 {
        self.terms.iter().fold(0.0, |acc, &t| acc + t)
    }

    /// Sign of `self - d` evaluated exactly, leaving `self` untouched.
    fn sign_minus(&self, d: f64) -> f64 {
        let mut tmp = Expansion { terms: self.terms.clone() };
        tmp.grow(-d);
        tmp.signum()
    }
}

/// Distance from `x` to its neighbour in the direction of `dir` (`±1`).
pub(crate) fn gap_toward(x: f64, dir: f64) -> f64 {
    debug_assert!(x.is_finite() && x != 0.0);
    let ax = x.abs();
    let bits = ax.to_bits();
    let away = (dir > 0.0) == (x > 0.0);
    if away {
        f64::from_bits(bits + 1) - ax
    } else {
        ax - f64::from_bits(bits - 1)
    }
}

fn step_toward(x: f64, dir: f64) -> f64 {
    let ax = x.abs();
    let bits = ax.to_bits();
    let away = (dir > 0.0) == (x > 0.0);
    let stepped = if away { f64::from_bits(bits + 1) } else { f64::from_bits(bits - 1) };
    stepped.copysign(x)
}

fn mantissa_is_odd(x: f64) -> bool {
    x.to_bits() & 1 == 1
}

/// Correctly rounded binary64 value of the expansion; the expansion becomes the
/// exact remainder.
fn extract_nearest(e: &mut Expansion) -> Result<f64> {
    if e.is_zero() {
        return Ok(0.0);
    }
    let mut h = e.approx();
    if !h.is_finite() {
        return Err(Error::Overflow);
    }
    e.grow(-h);
    if h == 0.0 {
        // The naive sum cancelled to zero; restart from the dominant term.
        h = e.terms.last().copied().unwrap_or(0.0);
        e.grow(-h);
    }
    loop {
        if e.is_zero() || h == 0.0 {
            break;
        }
        let dir = e.signum();
        let half = gap_toward(h, dir) * 0.5;
        let cmp = e.sign_minus(dir * half) * dir;
        if cmp > 0.0 || (cmp == 0.0 && mantissa_is_odd(h)) {
            let next = step_toward(h, dir);
            if !next.is_finite() {
                return Err(Error::Overflow);
            }
            e.grow(-(next - h));
            h = next;
        } else {
            break;
        }
    }
    Ok(h + 0.0)
}

/// Converts an arbitrary finite sequence into a canonical `K`-component value.
///
/// Components are extracted greedily as correctly rounded binary64 values of
/// the exact remaining sum. The sum of the result differs from the exact sum of
/// `raw` by at most half a unit in the last place of the last component.
pub fn renormalize_robust<const K: usize>(raw: &[f64]) -> Result<[f64; K]> {
    let mut e = Expansion::with_capacity(raw.len());
    for &x in raw {
        if !x.is_finite() {
            return Err(Error::Overflow);
        }
        e.grow(x);
    }
    let mut out = extract_k::<K>(&mut e)?;
    // Truncation can leave a tie undecided; re-extract until the components
    // reproduce themselves exactly.
    for _ in 0..4 {
        let mut again = Expansion::with_capacity(K);
        for &c in &out {
            again.grow(c);
        }
        let next = extract_k::<K>(&mut again)?;
        if again.is_zero() {
            return Ok(next);
        }
        out = next;
    }
    Ok(out)
}

fn extract_k<const K: usize>(e: &mut Expansion) -> Result<[f64; K]> {
    let mut out = [0.0; K];
    for slot in out.iter_mut() {
        if e.is_zero() {
            break;
        }
        *slot = extract_nearest(e)?;
    }
    Ok(out)
}

/// Cheap sufficient test for canonical form: every lower component lies
/// strictly inside half the gap of the one above it, no component is `-0` or
/// non-finite, and zeros are followed only by zeros.
#[inline]
pub(crate) fn is_strictly_separated(c: &[f64]) -> bool {
    let mut ok = true;
    for (i, &x) in c.iter().enumerate() {
        ok &= component_ok(x);
        if i + 1 < c.len() {
            ok &= pair_ok(x, c[i + 1]);
        }
    }
    ok
}

#[inline(always)]
pub(crate) fn component_ok(x: f64) -> bool {
    x.is_finite() & (x.to_bits() != (-0.0f64).to_bits())
}

/// `lo` is `+0`, or `hi` is nonzero and `|lo|` is below half the gap from `hi`
/// toward `lo`. Branch-free so it vectorizes across lanes.
#[inline(always)]
pub(crate) fn pair_ok(hi: f64, lo: f64) -> bool {
    let ax = hi.abs();
    let bits = ax.to_bits();
    let away = ((hi.to_bits() ^ lo.to_bits()) >> 63) == 0;
    let next = if away { bits.wrapping_add(1) } else { bits.wrapping_sub(1) };
    let gap = (f64::from_bits(next) - ax).abs();
    (lo.to_bits() == 0) | ((hi != 0.0) & (lo.abs() < 0.5 * gap))
}

/// Branch-free sweep of `K + 1` raw components into `K`.
///
/// The bottom-up pass makes the leading term an approximation of the whole sum;
/// the top-down pass peels off exact errors. The last component absorbs the
/// remainder with one rounding.
#[inline(always)]
pub(crate) fn sweep<L: Lane, const K: usize>(raw: &[L; 5]) -> [L; 4] {
    let mut t = [L::ZERO; 5];
    let mut s = raw[K];
    for i in (0..K).rev() {
        let (hi, lo) = two_sum_lane(raw[i], s);
        t[i + 1] = lo;
        s = hi;
    }
    t[0] = s;
    let mut out = [L::ZERO; 4];
    let mut s = t[0];
    for i in 1..K {
        let (hi, lo) = two_sum_lane(s, t[i]);
        out[i - 1] = hi;
        s = lo;
    }
    out[K - 1] = s + t[K];
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Straightforward form of the canonical-form test.
    fn separated_reference(c: &[f64]) -> bool {
        for i in 0..c.len() {
            let hi = c[i];
            if !hi.is_finite() {
                return false;
            }
            if i + 1 == c.len() {
                break;
            }
            let lo = c[i + 1];
            if hi == 0.0 {
                return c[i..].iter().all(|&x| x == 0.0 && !x.is_sign_negative());
            }
            if lo == 0.0 {
                if lo.is_sign_negative() {
                    return false;
                }
                continue;
            }
            if lo.abs() >= gap_toward(hi, lo) * 0.5 {
                return false;
            }
        }
        !c.last().is_some_and(|x| *x == 0.0 && x.is_sign_negative())
    }

    #[test]
    fn separation_test_matches_reference() {
        let specials = [
            0.0,
            -0.0,
            1.0,
            -1.0,
            p2(-53),
            -p2(-53),
            p2(-54),
            p2(-53) * (1.0 - p2(-53)),
            f64::MAX,
            f64::MIN_POSITIVE,
            5e-324,
            f64::INFINITY,
            f64::NAN,
            1.5,
            p2(-52),
        ];
        for &a in &specials {
            for &b in &specials {
                for &c in &specials {
                    let v = [a, b, c];
                    assert_eq!(is_strictly_separated(&v), separated_reference(&v), "{v:?}");
                    let w = [a, a * b, a * b * c];
                    assert_eq!(is_strictly_separated(&w), separated_reference(&w), "{w:?}");
                }
            }
        }
    }

    fn p2(e: i32) -> f64 {
        2f64.powi(e)
    }

    #[test]
    fn examples() {
        assert_eq!(renormalize_robust::<2>(&[1.0, 0.0, 0.0]).unwrap(), [1.0, 0.0]);
        assert_eq!(
            renormalize_robust::<3>(&[1.0, p2(-60), p2(-120)]).unwrap(),
            [1.0, p2(-60), p2(-120)]
        );
        assert_eq!(renormalize_robust::<2>(&[p2(-60), 1.0]).unwrap(), [1.0, p2(-60)]);
    }

    #[test]
    fn ties_follow_the_tail_sign() {
        // 1 + 2^-53 + 2^-200 rounds up in binary64 because of the tail.
        let c = renormalize_robust::<3>(&[1.0, p2(-53), p2(-200)]).unwrap();
        assert_eq!(c[0], 1.0 + p2(-52));
        assert_eq!(c[1], -p2(-53));
        assert_eq!(c[2], p2(-200));
        // Exact tie without tail stays on the even neighbour.
        let c = renormalize_robust::<2>(&[1.0, p2(-53)]).unwrap();
        assert_eq!(c, [1.0, p2(-53)]);
        let c = renormalize_robust::<2>(&[1.0 + p2(-52), p2(-53)]).unwrap();
        assert_eq!(c, [1.0 + p2(-51), -p2(-53)]);
    }

    #[test]
    fn cancellation_to_zero() {
        let c = renormalize_robust::<4>(&[1.0, -1.0, p2(-80), -p2(-80)]).unwrap();
        assert_eq!(c, [0.0; 4]);
        assert!(c.iter().all(|x| !x.is_sign_negative()));
    }

    #[test]
    fn overflow() {
        assert_eq!(renormalize_robust::<2>(&[f64::MAX, f64::MAX]), Err(Error::Overflow));
        assert_eq!(renormalize_robust::<2>(&[f64::NAN]), Err(Error::Overflow));
    }

    #[test]
    fn separation_check() {
        assert!(is_strictly_separated(&[1.0, p2(-60), 0.0]));
        assert!(!is_strictly_separated(&[1.0, p2(-53)]));
        assert!(!is_strictly_separated(&[0.0, 1.0]));
        assert!(!is_strictly_separated(&[1.0, 0.0, p2(-120)]));
        // Power of two: the gap below is half the gap above.
        assert!(!is_strictly_separated(&[1.0, -p2(-54)]));
        assert!(is_strictly_separated(&[1.0, -p2(-55)]));
    }

    #[test]
    fn sweep_matches_robust_on_simple_input() {
        let raw = [1.0, p2(-60), p2(-130), 0.0, 0.0];
        let c = sweep::<f64, 2>(&raw);
        assert_eq!(c[..2], renormalize_robust::<2>(&raw[..3]).unwrap());
    }
}
