//! Straight-line cascades for k-component addition and multiplication.
//!
//! For `K >= 3` terms are grouped by order of magnitude ("levels"): level `l`
//! holds terms of size about `2^(-53 l)` relative to the result. Each level is
//! summed with `two_sum`, pushing exact errors one level down; level `K` is
//! summed plainly. The `K + 1` level sums are then swept into `K` components.
//! `K = 2` uses the classic double-double formulas.
//!
//! Every function here is generic over [`Lane`] and free of data-dependent
//! branches, so the batch path computes bit-for-bit what the scalar path does.

use super::eft::{quick_two_sum_lane, two_prod_lane, two_sum_lane, Lane};
use super::renorm::sweep;

#[inline(always)]
fn pad<L: Lane, const K: usize>(a: &[L; K]) -> [L; 4] {
    let mut p = [L::ZERO; 4];
    p[..K].copy_from_slice(a);
    p
}

#[inline(always)]
fn unpad<L: Lane, const K: usize>(p: [L; 4]) -> [L; K] {
    let mut out = [L::ZERO; K];
    out.copy_from_slice(&p[..K]);
    out
}

#[inline(always)]
fn dd_add<L: Lane>(a: [L; 4], b: [L; 4]) -> [L; 4] {
    let (s, e) = two_sum_lane(a[0], b[0]);
    let (t, f) = two_sum_lane(a[1], b[1]);
    let (s, e) = quick_two_sum_lane(s, e + t);
    let (s, e) = quick_two_sum_lane(s, e + f);
    [s, e, L::ZERO, L::ZERO]
}

#[inline(always)]
fn dd_mul<L: Lane>(a: [L; 4], b: [L; 4]) -> [L; 4] {
    let (p, e) = two_prod_lane(a[0], b[0]);
    let e = L::fma(a[0], b[1], e);
    let e = L::fma(a[1], b[0], e);
    let (p, e) = quick_two_sum_lane(p, e);
    [p, e, L::ZERO, L::ZERO]
}

#[inline(always)]
fn td_add<L: Lane>(a: [L; 4], b: [L; 4]) -> [L; 4] {
    let (s0, e0) = two_sum_lane(a[0], b[0]);
    let (u, f1) = two_sum_lane(a[1], b[1]);
    let (s1, f2) = two_sum_lane(u, e0);
    let (v, g1) = two_sum_lane(a[2], b[2]);
    let (v, g2) = two_sum_lane(v, f1);
    let (s2, g3) = two_sum_lane(v, f2);
    let s3 = g1 + g2 + g3;
    sweep::<L, 3>(&[s0, s1, s2, s3, L::ZERO])
}

#[inline(always)]
fn qd_add<L: Lane>(a: [L; 4], b: [L; 4]) -> [L; 4] {
    let (s0, e0) = two_sum_lane(a[0], b[0]);
    let (u, f1) = two_sum_lane(a[1], b[1]);
    let (s1, f2) = two_sum_lane(u, e0);
    let (v, g1) = two_sum_lane(a[2], b[2]);
    let (v, g2) = two_sum_lane(v, f1);
    let (s2, g3) = two_sum_lane(v, f2);
    let (w, h1) = two_sum_lane(a[3], b[3]);
    let (w, h2) = two_sum_lane(w, g1);
    let (w, h3) = two_sum_lane(w, g2);
    let (s3, h4) = two_sum_lane(w, g3);
    let s4 = h1 + h2 + h3 + h4;
    sweep::<L, 4>(&[s0, s1, s2, s3, s4])
}

#[inline(always)]
fn td_mul<L: Lane>(a: [L; 4], b: [L; 4]) -> [L; 4] {
    let (p00, q00) = two_prod_lane(a[0], b[0]);

    let (p01, q01) = two_prod_lane(a[0], b[1]);
    let (p10, q10) = two_prod_lane(a[1], b[0]);
    let (x, e1) = two_sum_lane(p01, p10);
    let (s1, e2) = two_sum_lane(x, q00);

    let (p02, q02) = two_prod_lane(a[0], b[2]);
    let (p11, q11) = two_prod_lane(a[1], b[1]);
    let (p20, q20) = two_prod_lane(a[2], b[0]);
    let (x, f1) = two_sum_lane(p02, p11);
    let (x, f2) = two_sum_lane(x, p20);
    let (x, f3) = two_sum_lane(x, q01);
    let (x, f4) = two_sum_lane(x, q10);
    let (x, f5) = two_sum_lane(x, e1);
    let (s2, f6) = two_sum_lane(x, e2);

    let s3 = (f1 + f2 + f3) + (f4 + f5 + f6) + (q02 + q11 + q20) + (a[1] * b[2] + a[2] * b[1]);
    sweep::<L, 3>(&[p00, s1, s2, s3, L::ZERO])
}

#[inline(always)]
fn qd_mul<L: Lane>(a: [L; 4], b: [L; 4]) -> [L; 4] {
    let (p00, q00) = two_prod_lane(a[0], b[0]);

    let (p01, q01) = two_prod_lane(a[0], b[1]);
    let (p10, q10) = two_prod_lane(a[1], b[0]);
    let (x, e1) = two_sum_lane(p01, p10);
    let (s1, e2) = two_sum_lane(x, q00);

    let (p02, q02) = two_prod_lane(a[0], b[2]);
    let (p11, q11) = two_prod_lane(a[1], b[1]);
    let (p20, q20) = two_prod_lane(a[2], b[0]);
    let (x, f1) = two_sum_lane(p02, p11);
    let (x, f2) = two_sum_lane(x, p20);
    let (x, f3) = two_sum_lane(x, q01);
    let (x, f4) = two_sum_lane(x, q10);
    let (x, f5) = two_sum_lane(x, e1);
    let (s2, f6) = two_sum_lane(x, e2);

    let (p03, q03) = two_prod_lane(a[0], b[3]);
    let (p12, q12) = two_prod_lane(a[1], b[2]);
    let (p21, q21) = two_prod_lane(a[2], b[1]);
    let (p30, q30) = two_prod_lane(a[3], b[0]);
    let (x, g1) = two_sum_lane(p03, p12);
    let (x, g2) = two_sum_lane(x, p21);
    let (x, g3) = two_sum_lane(x, p30);
    let (x, g4) = two_sum_lane(x, q02);
    let (x, g5) = two_sum_lane(x, q11);
    let (x, g6) = two_sum_lane(x, q20);
    let (x, g7) = two_sum_lane(x, f1);
    let (x, g8) = two_sum_lane(x, f2);
    let (x, g9) = two_sum_lane(x, f3);
    let (x, g10) = two_sum_lane(x, f4);
    let (x, g11) = two_sum_lane(x, f5);
    let (s3, g12) = two_sum_lane(x, f6);

    let errs = ((g1 + g2) + (g3 + g4)) + ((g5 + g6) + (g7 + g8)) + ((g9 + g10) + (g11 + g12));
    let prods = (q03 + q12) + (q21 + q30) + (a[1] * b[3] + a[2] * b[2] + a[3] * b[1]);
    sweep::<L, 4>(&[p00, s1, s2, s3, errs + prods])
}

#[inline(always)]
pub(crate) fn add_sweep<L: Lane, const K: usize>(a: &[L; K], b: &[L; K]) -> [L; K] {
    let (a, b) = (pad(a), pad(b));
    let r = match K {
        2 => dd_add(a, b),
        3 => td_add(a, b),
        4 => qd_add(a, b),
        _ => unreachable!("component count {K}"),
    };
    canonical_zeros(unpad(r))
}

#[inline(always)]
pub(crate) fn mul_sweep<L: Lane, const K: usize>(a: &[L; K], b: &[L; K]) -> [L; K] {
    let (a, b) = (pad(a), pad(b));
    let r = match K {
        2 => dd_mul(a, b),
        3 => td_mul(a, b),
        4 => qd_mul(a, b),
        _ => unreachable!("component count {K}"),
    };
    canonical_zeros(unpad(r))
}

/// Turns `-0` components into `+0`.
#[inline(always)]
fn canonical_zeros<L: Lane, const K: usize>(mut c: [L; K]) -> [L; K] {
    for x in c.iter_mut() {
        *x = *x + L::ZERO;
    }
    c
}

/// One top-down `two_sum` pass; repairs most outputs that fail the canonical
/// check after heavy cancellation.
#[inline(always)]
pub(crate) fn resweep<const K: usize>(c: &[f64; K]) -> [f64; K] {
    let mut out = [0.0; K];
    let mut s = c[0];
    for i in 1..K {
        let (hi, lo) = two_sum_lane(s, c[i]);
        out[i - 1] = hi;
        s = lo;
    }
    out[K - 1] = s;
    canonical_zeros(out)
}

/// The cascades are trusted unless the leading terms cancel almost entirely;
/// below this ratio the exact renormalizer takes over.
#[inline(always)]
pub(crate) fn add_is_benign(a0: f64, b0: f64) -> bool {
    const RATIO: f64 = 1.0 / (1u64 << 30) as f64;
    let s = a0 + b0;
    s.abs() >= RATIO * a0.abs().max(b0.abs())
}
