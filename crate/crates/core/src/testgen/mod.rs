//! Ill-conditioned benchmark systems `A = R·D·R⁻¹` with a geometric diagonal
//! `d_i = 10^(-c·(i-1)/n)`, true solution `[0, 1, …, n-1]` and `b = A·x`.
//!
//! Random entries come from xoshiro256** seeded through splitmix64, so every
//! bit of the output is a function of `(n, seed, c, gen_bits)`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Pow;
use rand_xoshiro::rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

use crate::bigfloat::{BigFloat, PrecisionContext};
use crate::error::{Error, Result};
use crate::linalg::{lu_factor_pp, lu_solve, mat_mul_blocked, mat_vec, DenseMatrix, Kernels, Vector, DEFAULT_BLOCK};
use crate::par::try_map_range;

/// Seeds tried after the requested one when `R` turns out singular.
pub const MAX_RETRIES: u64 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProblemSpec {
    pub n: usize,
    pub seed: u64,
    /// Decimal exponent `c`; the nominal condition number is `10^(c(n-1)/n)`.
    pub cond_exponent: u32,
    pub gen_bits: u32,
}

impl ProblemSpec {
    pub const DEFAULT_COND_EXPONENT: u32 = 26;
    pub const DEFAULT_GEN_BITS: u32 = 512;

    pub fn new(n: usize, seed: u64) -> Self {
        ProblemSpec {
            n,
            seed,
            cond_exponent: Self::DEFAULT_COND_EXPONENT,
            gen_bits: Self::DEFAULT_GEN_BITS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidArgument(format!("n = {} but at least 2 is required", self.n)));
        }
        if self.gen_bits < 64 {
            return Err(Error::InvalidArgument(format!("gen_bits = {} below 64", self.gen_bits)));
        }
        Ok(())
    }
}

/// A square system with its known solution.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSystem {
    pub a: DenseMatrix<BigFloat>,
    pub b: Vector<BigFloat>,
    pub x_true: Vector<BigFloat>,
}

impl LinearSystem {
    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn round_to(&self, ctx: &PrecisionContext) -> Result<Self> {
        Ok(LinearSystem { a: self.a.round_to(ctx)?, b: self.b.round_to(ctx)?, x_true: self.x_true.round_to(ctx)? })
    }
}

#[derive(Clone, Debug)]
pub struct GeneratedSystem {
    pub system: LinearSystem,
    pub spec: ProblemSpec,
    /// Seed that produced a nonsingular `R`; differs from `spec.seed` after
    /// retries.
    pub seed_used: u64,
}

impl GeneratedSystem {
    /// `A`, `b` and `x_true` rounded to the consumer's long precision.
    pub fn export(&self, ctx: &PrecisionContext) -> Result<LinearSystem> {
        if ctx.bits() > self.spec.gen_bits {
            return Err(Error::InvalidArgument(format!(
                "export at {} bits exceeds generation precision {}",
                ctx.bits(),
                self.spec.gen_bits
            )));
        }
        self.system.round_to(ctx)
    }
}

/// Entries `(u / 2^63) - 1` for successive 64-bit outputs `u`, row-major.
pub fn gen_random_matrix(n: usize, seed: u64, gen_bits: u32) -> Result<DenseMatrix<BigFloat>> {
    let ctx = PrecisionContext::new(gen_bits)?;
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    let mut data = Vec::with_capacity(n * n);
    for _ in 0..n * n {
        // u - 2^63 as a signed integer, scaled by 2^-63.
        let v = (rng.next_u64() ^ (1 << 63)) as i64;
        data.push(BigFloat::from_parts(v < 0, BigUint::from(v.unsigned_abs()), -63, &ctx)?);
    }
    DenseMatrix::from_vec(n, n, data)
}

/// `d_i = 10^(-c·(i-1)/n)` for `i = 1..n`. The ratio `10^(-c/n)` comes from an
/// integer `n`-th root; the powers are accumulated with 64 guard bits.
pub fn gen_diag(n: usize, c: u32, gen_bits: u32) -> Result<Vector<BigFloat>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n = {n} but at least 2 is required")));
    }
    let ctx = PrecisionContext::new(gen_bits)?;
    let work = ctx.widen(64);
    let one = BigFloat::one(&work);
    if c == 0 {
        return Ok(Vector::from_vec(vec![BigFloat::one(&ctx); n]));
    }
    let g = (c as u64).gcd(&(n as u64));
    let (p, q) = (c as u64 / g, n as u64 / g);
    // root = floor(2^w · 10^(p/q)), relative error below 2^-w.
    let w = work.bits() as u64 + 4;
    let radicand = BigUint::from(10u32).pow(p as u32) << (w * q);
    let root = radicand.nth_root(q as u32);
    let root = BigFloat::from_parts(false, root, -(w as i64), &work)?;
    let ratio = one.div(&root, &work)?;

    let mut d = Vec::with_capacity(n);
    let mut cur = one;
    for _ in 0..n {
        d.push(cur.round_to(&ctx)?);
        cur = cur.mul(&ratio, &work)?;
    }
    Ok(Vector::from_vec(d))
}

fn inverse(r: &DenseMatrix<BigFloat>, ctx: &PrecisionContext, k: Kernels) -> Result<DenseMatrix<BigFloat>> {
    let n = r.rows();
    let mut lu = r.clone();
    let piv = lu_factor_pp(&mut lu, ctx, k)?;
    let cols = try_map_range(n, k.exec, |j| {
        let mut e = Vector::zeros(n, ctx);
        e.set(j, BigFloat::one(ctx));
        lu_solve(&lu, &piv, &e, ctx)
    })?;
    Ok(DenseMatrix::from_fn(n, n, |i, j| cols[j].get(i).clone()))
}

/// Every `b_i` must match `Σ_j A_ij x_j` to `2^-(gen_bits-10)` relative to
/// `Σ_j |A_ij x_j|`, evaluated with 64 extra bits.
fn self_check(sys: &LinearSystem, gen_bits: u32) -> Result<()> {
    let ctx = PrecisionContext::new(gen_bits + 64)?;
    for i in 0..sys.n() {
        let mut acc = sys.b.get(i).neg();
        let mut mag = BigFloat::zero(&ctx);
        for (aij, xj) in sys.a.row(i).iter().zip(sys.x_true.iter()) {
            let t = aij.mul(xj, &ctx)?;
            mag = mag.add(&t.abs(), &ctx)?;
            acc = acc.add(&t, &ctx)?;
        }
        let bound = mag.mul_pow2(-(gen_bits as i64 - 10))?;
        if acc.abs() > bound {
            return Err(Error::InvalidArgument(format!("generated row {i} fails the residual self-check")));
        }
    }
    Ok(())
}

pub fn build_system(spec: &ProblemSpec) -> Result<GeneratedSystem> {
    build_system_with(spec, Kernels::default())
}

pub fn build_system_with(spec: &ProblemSpec, k: Kernels) -> Result<GeneratedSystem> {
    spec.validate()?;
    let ctx = PrecisionContext::new(spec.gen_bits)?;
    let n = spec.n;
    let d = gen_diag(n, spec.cond_exponent, spec.gen_bits)?;
    for attempt in 0..=MAX_RETRIES {
        let seed = spec.seed.wrapping_add(attempt);
        let r = gen_random_matrix(n, seed, spec.gen_bits)?;
        let r_inv = match inverse(&r, &ctx, k) {
            Ok(m) => m,
            Err(Error::Singular { .. }) => continue,
            Err(e) => return Err(e),
        };
        let mut dr = r_inv;
        for i in 0..n {
            let di = d.get(i).clone();
            for v in dr.row_mut(i) {
                *v = v.mul(&di, &ctx)?;
            }
        }
        let a = mat_mul_blocked(&r, &dr, DEFAULT_BLOCK, &ctx, k)?;
        let x_true: Vector<BigFloat> = (0..n as u64).map(|i| BigFloat::from_u64(i, &ctx)).collect();
        let b = mat_vec(&a, &x_true, &ctx, k)?;
        let system = LinearSystem { a, b, x_true };
        self_check(&system, spec.gen_bits)?;
        return Ok(GeneratedSystem { system, spec: *spec, seed_used: seed });
    }
    Err(Error::GenerationFailure { attempts: (MAX_RETRIES + 1) as u32 })
}
