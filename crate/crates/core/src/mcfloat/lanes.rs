//! Component-planar batch evaluation.
//!
//! A chunk of `LANES` values is transposed into `K` planes of `LANES` binary64
//! each, and the scalar cascades run once over the planes. Lanes whose result
//! fails the canonical-form check are recomputed on the scalar path, which
//! executes the identical cascade before its own fallback, so outputs are
//! bitwise equal to the scalar loop.

use std::ops::{Add, Mul, Neg, Sub};

use super::eft::Lane;
use super::kernels::{add_is_benign, add_sweep, mul_sweep};
use super::renorm::{component_ok, pair_ok};
use super::MultiComp;
use crate::error::Result;

pub const LANES: usize = 8;

#[derive(Clone, Copy, Debug)]
#[repr(transparent)]
pub struct Lanes(pub [f64; LANES]);

macro_rules! lanewise {
    ($tr:ident, $f:ident, $op:tt) => {
        impl $tr for Lanes {
            type Output = Lanes;
            #[inline(always)]
            fn $f(self, rhs: Lanes) -> Lanes {
                let mut out = [0.0; LANES];
                for i in 0..LANES {
                    out[i] = self.0[i] $op rhs.0[i];
                }
                Lanes(out)
            }
        }
    };
}

lanewise!(Add, add, +);
lanewise!(Sub, sub, -);
lanewise!(Mul, mul, *);

impl Neg for Lanes {
    type Output = Lanes;
    #[inline(always)]
    fn neg(self) -> Lanes {
        let mut out = self.0;
        for x in out.iter_mut() {
            *x = -*x;
        }
        Lanes(out)
    }
}

impl Lane for Lanes {
    const ZERO: Lanes = Lanes([0.0; LANES]);

    #[inline(always)]
    fn fma(a: Lanes, b: Lanes, c: Lanes) -> Lanes {
        let mut out = [0.0; LANES];
        for i in 0..LANES {
            out[i] = a.0[i].mul_add(b.0[i], c.0[i]);
        }
        Lanes(out)
    }
}

#[inline(always)]
fn planes<const K: usize>(chunk: &[MultiComp<K>]) -> [Lanes; K] {
    let mut p = [Lanes::ZERO; K];
    for (lane, v) in chunk.iter().enumerate() {
        for c in 0..K {
            p[c].0[lane] = v.0[c];
        }
    }
    p
}

#[inline(always)]
fn broadcast<const K: usize>(v: &MultiComp<K>) -> [Lanes; K] {
    let mut p = [Lanes::ZERO; K];
    for c in 0..K {
        p[c] = Lanes([v.0[c]; LANES]);
    }
    p
}

#[inline(always)]
fn lane_of<const K: usize>(p: &[Lanes; K], lane: usize) -> [f64; K] {
    let mut c = [0.0; K];
    for i in 0..K {
        c[i] = p[i].0[lane];
    }
    c
}

/// Per-lane canonical-form test, evaluated plane by plane.
#[inline(always)]
fn separated<const K: usize>(p: &[Lanes; K]) -> [bool; LANES] {
    let mut ok = [true; LANES];
    for i in 0..K {
        for lane in 0..LANES {
            ok[lane] &= component_ok(p[i].0[lane]);
            if i + 1 < K {
                ok[lane] &= pair_ok(p[i].0[lane], p[i + 1].0[lane]);
            }
        }
    }
    ok
}

#[inline(always)]
fn benign(a: &Lanes, b: &Lanes) -> [bool; LANES] {
    let mut ok = [false; LANES];
    for lane in 0..LANES {
        ok[lane] = add_is_benign(a.0[lane], b.0[lane]);
    }
    ok
}

/// `y[i] <- y[i] + alpha * x[i]`.
pub fn axpy<const K: usize>(
    alpha: &MultiComp<K>,
    x: &[MultiComp<K>],
    y: &mut [MultiComp<K>],
) -> Result<()> {
    debug_assert_eq!(x.len(), y.len());
    let a = broadcast(alpha);
    let mut xs = x.chunks_exact(LANES);
    let mut ys = y.chunks_exact_mut(LANES);
    for (xc, yc) in (&mut xs).zip(&mut ys) {
        let xp = planes(xc);
        let yp = planes(yc);
        let prod = mul_sweep::<Lanes, K>(&a, &xp);
        let sum = add_sweep::<Lanes, K>(&yp, &prod);
        let (okp, okb, oks) = (separated(&prod), benign(&yp[0], &prod[0]), separated(&sum));
        for lane in 0..LANES {
            if okp[lane] & okb[lane] & oks[lane] {
                yc[lane] = MultiComp(lane_of(&sum, lane));
            } else {
                yc[lane] = yc[lane].add(&alpha.mul(&xc[lane])?)?;
            }
        }
    }
    for (xi, yi) in xs.remainder().iter().zip(ys.into_remainder()) {
        *yi = yi.add(&alpha.mul(xi)?)?;
    }
    Ok(())
}

/// `out[i] <- x[i] * y[i]`.
pub fn mul_elementwise<const K: usize>(
    x: &[MultiComp<K>],
    y: &[MultiComp<K>],
    out: &mut [MultiComp<K>],
) -> Result<()> {
    let mut xs = x.chunks_exact(LANES);
    let mut ys = y.chunks_exact(LANES);
    let mut os = out.chunks_exact_mut(LANES);
    for ((xc, yc), oc) in (&mut xs).zip(&mut ys).zip(&mut os) {
        let prod = mul_sweep::<Lanes, K>(&planes(xc), &planes(yc));
        let ok = separated(&prod);
        for lane in 0..LANES {
            oc[lane] = if ok[lane] {
                MultiComp(lane_of(&prod, lane))
            } else {
                xc[lane].mul(&yc[lane])?
            };
        }
    }
    for ((xi, yi), oi) in xs.remainder().iter().zip(ys.remainder()).zip(os.into_remainder()) {
        *oi = xi.mul(yi)?;
    }
    Ok(())
}

/// `out[i] <- x[i] + y[i]`.
pub fn add_elementwise<const K: usize>(
    x: &[MultiComp<K>],
    y: &[MultiComp<K>],
    out: &mut [MultiComp<K>],
) -> Result<()> {
    let mut xs = x.chunks_exact(LANES);
    let mut ys = y.chunks_exact(LANES);
    let mut os = out.chunks_exact_mut(LANES);
    for ((xc, yc), oc) in (&mut xs).zip(&mut ys).zip(&mut os) {
        let (xp, yp) = (planes(xc), planes(yc));
        let sum = add_sweep::<Lanes, K>(&xp, &yp);
        let (okb, oks) = (benign(&xp[0], &yp[0]), separated(&sum));
        for lane in 0..LANES {
            oc[lane] = if okb[lane] & oks[lane] {
                MultiComp(lane_of(&sum, lane))
            } else {
                xc[lane].add(&yc[lane])?
            };
        }
    }
    for ((xi, yi), oi) in xs.remainder().iter().zip(ys.remainder()).zip(os.into_remainder()) {
        *oi = xi.add(yi)?;
    }
    Ok(())
}
