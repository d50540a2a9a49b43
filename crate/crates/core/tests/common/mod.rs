//! Independent oracles shared by the integration suites: exact dyadic
//! arithmetic on binary64 values, a reference xoshiro256** stream, and random
//! operand generators.

#![allow(dead_code)]

use mpcore::linalg::{DenseMatrix, PivotRecord};
use mpcore::mcfloat::{two_prod, two_sum};
use mpcore::{BigFloat, MultiComp, PrecisionContext};
use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;

/// `m · 2^e`, exact.
#[derive(Clone, Debug)]
pub struct Dyadic {
    pub m: BigInt,
    pub e: i64,
}

impl Dyadic {
    pub fn of(x: f64) -> Self {
        assert!(x.is_finite());
        let bits = x.to_bits();
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, e) = if biased == 0 { (frac, -1074) } else { (frac | (1u64 << 52), biased - 1075) };
        let m = BigInt::from(mant);
        Dyadic { m: if x.is_sign_negative() { -m } else { m }, e }
    }

    fn aligned(&self, other: &Self) -> (BigInt, BigInt, i64) {
        let e = self.e.min(other.e);
        (&self.m << (self.e - e) as usize, &other.m << (other.e - e) as usize, e)
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b, e) = self.aligned(other);
        Dyadic { m: a + b, e }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Dyadic { m: &self.m * &other.m, e: self.e + other.e }
    }

    pub fn same_value(&self, other: &Self) -> bool {
        let (a, b, _) = self.aligned(other);
        a == b
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }
}

/// Finite binary64 with random sign, mantissa and binary exponent in `lo..=hi`.
pub fn rand_f64_exp<R: Rng>(rng: &mut R, lo: i32, hi: i32) -> f64 {
    let e = rng.gen_range(lo..=hi);
    let frac: u64 = rng.gen::<u64>() & ((1u64 << 52) - 1);
    let bits = ((e + 1023) as u64) << 52 | frac;
    let x = f64::from_bits(bits);
    if rng.gen::<bool>() {
        -x
    } else {
        x
    }
}

/// `s + e == a + b` exactly.
pub fn two_sum_exact(a: f64, b: f64) -> bool {
    let Ok((s, e)) = two_sum(a, b) else { return false };
    Dyadic::of(s).add(&Dyadic::of(e)).same_value(&Dyadic::of(a).add(&Dyadic::of(b)))
        && s == a + b
}

/// `p + e == a · b` exactly.
pub fn two_prod_exact(a: f64, b: f64) -> bool {
    let Ok((p, e)) = two_prod(a, b) else { return false };
    Dyadic::of(p).add(&Dyadic::of(e)).same_value(&Dyadic::of(a).mul(&Dyadic::of(b))) && p == a * b
}

/// Random normalized value whose leading exponent is in `lo..=hi`; the
/// components fill the full `53·K` bits.
pub fn rand_mc<const K: usize, R: Rng>(rng: &mut R, lo: i32, hi: i32) -> MultiComp<K> {
    let x0 = rand_f64_exp(rng, lo, hi);
    let mut raw = [0.0; K];
    raw[0] = x0;
    for (i, r) in raw.iter_mut().enumerate().skip(1) {
        *r = x0 * 2f64.powi(-53 * i as i32) * rng.gen_range(-1.0..1.0);
    }
    MultiComp::renormalize(&raw).expect("in range")
}

/// Relative error bound of add/sub/mul/div for `K` components.
pub fn op_bound_log2(k: usize) -> i64 {
    match k {
        2 => -99,
        3 => -152,
        _ => -205,
    }
}

pub fn oracle_ctx() -> PrecisionContext {
    PrecisionContext::new(1536).unwrap()
}

/// `|got - exact| <= |exact| · 2^log2_bound`.
pub fn within(got: &BigFloat, exact: &BigFloat, log2_bound: i64, ctx: &PrecisionContext) -> bool {
    let err = got.sub(exact, ctx).unwrap().abs();
    let tol = exact.abs().mul_pow2(log2_bound).unwrap();
    err <= tol
}

pub fn bf<const K: usize>(m: &MultiComp<K>) -> BigFloat {
    BigFloat::from_multicomp(m, &oracle_ctx()).unwrap()
}

/// Reference SplitMix64 and xoshiro256**, written from the published
/// algorithms.
pub struct RefXoshiro {
    s: [u64; 4],
}

impl RefXoshiro {
    pub fn from_seed_u64(seed: u64) -> Self {
        let mut z = seed;
        let mut s = [0u64; 4];
        for slot in &mut s {
            z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
            let mut x = z;
            x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            *slot = x ^ (x >> 31);
        }
        RefXoshiro { s }
    }

    pub fn next(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }
}

#[derive(Clone, Copy, Debug)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn check<const K: usize>(op: Op, a: &MultiComp<K>, b: &MultiComp<K>) -> Result<(), String> {
    let ctx = oracle_ctx();
    let (x, y) = (bf(a), bf(b));
    let (got, exact) = match op {
        Op::Add => (a.add(b), x.add(&y, &ctx)),
        Op::Sub => (a.sub(b), x.sub(&y, &ctx)),
        Op::Mul => (a.mul(b), x.mul(&y, &ctx)),
        Op::Div => (a.div(b), x.div(&y, &ctx)),
    };
    let got = got.map_err(|e| format!("{op:?}: {e}"))?;
    let exact = exact.unwrap();
    let c = got.components();
    for i in 0..K - 1 {
        // Each component is the rounded value of the tail it heads.
        let tail = MultiComp::<K>::renormalize(&c[i..]).unwrap();
        if tail.components()[0] != c[i] {
            return Err(format!("{op:?}: component {i} not canonical: {c:?}"));
        }
    }
    if !within(&bf(&got), &exact, op_bound_log2(K), &ctx) {
        return Err(format!("{op:?}({a:?}, {b:?}) = {got:?} outside envelope"));
    }
    Ok(())
}

/// Exact `max |PA - LU|` and `max |A|` over all entries, in the oracle precision.
pub fn lu_residual<const K: usize>(a: &DenseMatrix<MultiComp<K>>, lu: &DenseMatrix<MultiComp<K>>, piv: &PivotRecord) -> (f64, f64) {
    let ctx = oracle_ctx();
    let n = a.rows();
    let mut rows: Vec<usize> = (0..n).collect();
    piv.apply(&mut rows);
    let mut worst = BigFloat::zero(&ctx);
    let mut amax = BigFloat::zero(&ctx);
    for i in 0..n {
        for j in 0..n {
            let mut s = BigFloat::zero(&ctx);
            for k in 0..=i.min(j) {
                let l = if k == i { BigFloat::one(&ctx) } else { bf(lu.get(i, k)) };
                s = s.add(&l.mul(&bf(lu.get(k, j)), &ctx).unwrap(), &ctx).unwrap();
            }
            let pa = bf(a.get(rows[i], j));
            let d = pa.sub(&s, &ctx).unwrap().abs();
            if d > worst {
                worst = d;
            }
            if pa.abs() > amax {
                amax = pa.abs();
            }
        }
    }
    (worst.to_f64(), amax.to_f64())
}
