//! C ABI over mpcore.
//!
//! Every function returns an `i32` status (see [`Status`]) and writes results
//! through out-pointers. Objects live in a library-owned table and are named
//! by opaque 64-bit handles; a released handle is reported as invalid, never
//! dereferenced. Panics are caught at the boundary and reported as
//! [`Status::Internal`].
//!
//! The C declarations are in `include/mpcore.h`.

#![allow(clippy::missing_safety_doc)]

mod handles;
mod status;

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::{RwLockReadGuard, RwLockWriteGuard};

use mpcore::linalg::{lu_factor_pp, lu_solve, KernelPath, Kernels, Vector};
use mpcore::matfile::{load_matrix, load_vector};
use mpcore::refine::{iterative_refinement, RefineConfig, StopReason};
use mpcore::{BigFloat, PrecisionContext, PrecisionTag};

use handles::{McMatrix, Object, Shared};
pub use status::Status;

/// Bumped whenever an exported signature changes.
pub const ABI_VERSION: u32 = 1;

/// Precision used to read element text before splitting into components.
const TEXT_BITS: u32 = 1024;

type Res<T = ()> = Result<T, Status>;

fn guard(f: impl FnOnce() -> Res) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => Status::Ok as i32,
        Ok(Err(s)) => s as i32,
        Err(_) => Status::Internal as i32,
    }
}

unsafe fn put<T>(out: *mut T, v: T) -> Res {
    if out.is_null() {
        return Err(Status::Internal);
    }
    out.write(v);
    Ok(())
}

unsafe fn text<'a>(p: *const c_char) -> Res<&'a str> {
    if p.is_null() {
        return Err(Status::Parse);
    }
    CStr::from_ptr(p).to_str().map_err(|_| Status::Parse)
}

/// Copies `s` with a NUL terminator; `needed` receives the full size.
unsafe fn put_text(s: &str, buf: *mut c_char, cap: usize, needed: *mut usize) -> Res {
    let size = s.len() + 1;
    if !needed.is_null() {
        needed.write(size);
    }
    if buf.is_null() || cap < size {
        return Err(Status::DimensionMismatch);
    }
    std::ptr::copy_nonoverlapping(s.as_ptr().cast::<c_char>(), buf, s.len());
    buf.add(s.len()).write(0);
    Ok(())
}

// A write attempt on an object already in use by another call fails instead
// of blocking.
fn read(o: &Shared) -> Res<RwLockReadGuard<'_, Object>> {
    o.try_read().map_err(|_| Status::Internal)
}

fn write(o: &Shared) -> Res<RwLockWriteGuard<'_, Object>> {
    o.try_write().map_err(|_| Status::Internal)
}

macro_rules! each_k {
    ($m:expr, $x:ident => $body:expr) => {
        match $m {
            McMatrix::K2($x) => $body,
            McMatrix::K3($x) => $body,
            McMatrix::K4($x) => $body,
        }
    };
}

fn kernels() -> Kernels {
    Kernels { path: KernelPath::from_env(), ..Kernels::default() }
}

#[no_mangle]
pub extern "C" fn mpcore_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub extern "C" fn mpcore_abi_version() -> u32 {
    ABI_VERSION
}

/// 1 when batch kernels take the lane path, 0 otherwise.
#[no_mangle]
pub extern "C" fn mpcore_simd_enabled() -> i32 {
    KernelPath::from_env().is_lanes() as i32
}

#[no_mangle]
pub unsafe extern "C" fn mpcore_mc_matrix_new(k: u32, rows: usize, cols: usize, out: *mut u64) -> i32 {
    guard(|| {
        let m = McMatrix::zeros(k as usize, rows, cols).ok_or(Status::Internal)?;
        put(out, handles::insert(Object::Matrix { m, is_vector: false })?)
    })
}

#[no_mangle]
pub unsafe extern "C" fn mpcore_mc_vector_new(k: u32, len: usize, out: *mut u64) -> i32 {
    guard(|| {
        let m = McMatrix::zeros(k as usize, len, 1).ok_or(Status::Internal)?;
        put(out, handles::insert(Object::Matrix { m, is_vector: true })?)
    })
}

#[no_mangle]
pub extern "C" fn mpcore_release(h: u64) -> i32 {
    guard(|| handles::remove(h))
}

/// Component count and shape of a matrix or vector handle.
#[no_mangle]
pub unsafe extern "C" fn mpcore_mc_shape(h: u64, k: *mut u32, rows: *mut usize, cols: *mut usize) -> i32 {
    guard(|| {
        let o = handles::get(h)?;
        let g = read(&o)?;
        let Object::Matrix { m, .. } = &*g else { return Err(Status::InvalidHandle) };
        let (r, c) = m.shape();
        put(k, m.k() as u32)?;
        put(rows, r)?;
        put(cols, c)
    })
}

/// Sets element `(i, j)` from decimal or hex-float text, rounded to the
/// handle's precision. Vectors use `j = 0`.
#[no_mangle]
pub unsafe extern "C" fn mpcore_mc_set_element_from_decimal(h: u64, i: usize, j: usize, s: *const c_char) -> i32 {
    guard(|| {
        let s = text(s)?;
        let v = BigFloat::parse(s, &PrecisionContext::new(TEXT_BITS)?)?;
        let o = handles::get(h)?;
        let mut g = write(&o)?;
        let Object::Matrix { m, .. } = &mut *g else { return Err(Status::InvalidHandle) };
        let (r, c) = m.shape();
        if i >= r || j >= c {
            return Err(Status::DimensionMismatch);
        }
        each_k!(m, x => x.set(i, j, v.to_multicomp()?));
        Ok(())
    })
}

/// Writes the `k` components of element `(i, j)` to `out[0..k]`.
#[no_mangle]
pub unsafe extern "C" fn mpcore_mc_get_element_components(h: u64, i: usize, j: usize, out: *mut f64, cap: usize) -> i32 {
    guard(|| {
        let o = handles::get(h)?;
        let g = read(&o)?;
        let Object::Matrix { m, .. } = &*g else { return Err(Status::InvalidHandle) };
        let (r, c) = m.shape();
        if i >= r || j >= c || cap < m.k() {
            return Err(Status::DimensionMismatch);
        }
        if out.is_null() {
            return Err(Status::Internal);
        }
        let comps: Vec<f64> = each_k!(m, x => x.get(i, j).components().to_vec());
        std::ptr::copy_nonoverlapping(comps.as_ptr(), out, comps.len());
        Ok(())
    })
}

/// Factors the square matrix `h` in place (`P·A = L·U`, unit-lower `L` below
/// the diagonal) and returns a pivot handle. `h` is unchanged on failure.
#[no_mangle]
pub unsafe extern "C" fn mpcore_mc_lu_factor(h: u64, piv_out: *mut u64) -> i32 {
    guard(|| {
        if piv_out.is_null() {
            return Err(Status::Internal);
        }
        let o = handles::get(h)?;
        let mut g = write(&o)?;
        let Object::Matrix { m, is_vector: false } = &mut *g else { return Err(Status::InvalidHandle) };
        let piv = each_k!(m, x => {
            let mut lu = x.clone();
            let piv = lu_factor_pp(&mut lu, &(), kernels())?;
            *x = lu;
            piv
        });
        put(piv_out, handles::insert(Object::Pivot(piv))?)
    })
}

fn column<T: Clone>(m: &mpcore::linalg::DenseMatrix<T>) -> Vector<T> {
    Vector::from_vec(m.as_slice().to_vec())
}

/// Solves with factors from [`mpcore_mc_lu_factor`]; `x_h` may equal `b_h`.
#[no_mangle]
pub extern "C" fn mpcore_mc_lu_solve(lu_h: u64, piv_h: u64, b_h: u64, x_h: u64) -> i32 {
    guard(|| {
        let (lu_o, piv_o, b_o, x_o) =
            (handles::get(lu_h)?, handles::get(piv_h)?, handles::get(b_h)?, handles::get(x_h)?);
        let solved = {
            let lu_g = read(&lu_o)?;
            let piv_g = read(&piv_o)?;
            let b_g = read(&b_o)?;
            let Object::Matrix { m: lu, is_vector: false } = &*lu_g else { return Err(Status::InvalidHandle) };
            let Object::Pivot(piv) = &*piv_g else { return Err(Status::InvalidHandle) };
            let Object::Matrix { m: b, is_vector: true } = &*b_g else { return Err(Status::InvalidHandle) };
            match (lu, b) {
                (McMatrix::K2(a), McMatrix::K2(b)) => McMatrix::K2(column_of(lu_solve(a, piv, &column(b), &())?)),
                (McMatrix::K3(a), McMatrix::K3(b)) => McMatrix::K3(column_of(lu_solve(a, piv, &column(b), &())?)),
                (McMatrix::K4(a), McMatrix::K4(b)) => McMatrix::K4(column_of(lu_solve(a, piv, &column(b), &())?)),
                _ => return Err(Status::DimensionMismatch),
            }
        };
        let mut x_g = write(&x_o)?;
        let Object::Matrix { m: x, is_vector: true } = &mut *x_g else { return Err(Status::InvalidHandle) };
        if x.k() != solved.k() || x.shape() != solved.shape() {
            return Err(Status::DimensionMismatch);
        }
        *x = solved;
        Ok(())
    })
}

fn column_of<T>(v: Vector<T>) -> mpcore::linalg::DenseMatrix<T> {
    let n = v.len();
    mpcore::linalg::DenseMatrix::from_vec(n, 1, v.into_vec()).expect("n × 1 shape")
}

/// Iterative refinement of the system stored in two `bf` matrix files
/// (`b` as an `n × 1` file). `rtol` and `atol` are decimal or hex-float text.
#[no_mangle]
pub unsafe extern "C" fn mpcore_mc_refine(
    a_path: *const c_char,
    b_path: *const c_char,
    k: u32,
    long_bits: u32,
    rtol: *const c_char,
    atol: *const c_char,
    max_iter: usize,
    report_out: *mut u64,
) -> i32 {
    guard(|| {
        if report_out.is_null() {
            return Err(Status::Internal);
        }
        let tag = PrecisionTag::from_components(k as usize)?;
        let ctx = PrecisionContext::new(long_bits)?;
        let cfg = RefineConfig {
            long_bits,
            rtol: BigFloat::parse(text(rtol)?, &ctx)?,
            atol: BigFloat::parse(text(atol)?, &ctx)?,
            max_iter,
            kernels: kernels(),
            ..RefineConfig::new(tag)
        };
        let (a, _) = load_matrix::<BigFloat>(Path::new(text(a_path)?))?;
        let (b, _) = load_vector::<BigFloat>(Path::new(text(b_path)?))?;
        let report = iterative_refinement(&a, &b, &cfg)?;
        put(report_out, handles::insert(Object::Report(report))?)
    })
}

fn with_report<T>(h: u64, f: impl FnOnce(&mpcore::refine::RefineReport) -> Res<T>) -> Res<T> {
    let o = handles::get(h)?;
    let g = read(&o)?;
    let Object::Report(r) = &*g else { return Err(Status::InvalidHandle) };
    f(r)
}

#[no_mangle]
pub unsafe extern "C" fn mpcore_report_iterations(h: u64, out: *mut usize) -> i32 {
    guard(|| with_report(h, |r| put(out, r.iterations)))
}

/// 0 converged, 1 max_iter, 2 stagnated.
#[no_mangle]
pub unsafe extern "C" fn mpcore_report_stop_reason(h: u64, out: *mut i32) -> i32 {
    guard(|| {
        with_report(h, |r| {
            put(
                out,
                match r.stop_reason {
                    StopReason::Converged => 0,
                    StopReason::MaxIter => 1,
                    StopReason::Stagnated => 2,
                },
            )
        })
    })
}

#[no_mangle]
pub unsafe extern "C" fn mpcore_report_residual_count(h: u64, out: *mut usize) -> i32 {
    guard(|| with_report(h, |r| put(out, r.residual_history.len())))
}

/// Residual norm `idx` rounded to binary64.
#[no_mangle]
pub unsafe extern "C" fn mpcore_report_residual(h: u64, idx: usize, out: *mut f64) -> i32 {
    guard(|| {
        with_report(h, |r| {
            let v = r.residual_history.get(idx).ok_or(Status::DimensionMismatch)?;
            put(out, v.to_f64())
        })
    })
}

#[no_mangle]
pub unsafe extern "C" fn mpcore_report_solution_len(h: u64, out: *mut usize) -> i32 {
    guard(|| with_report(h, |r| put(out, r.solution.len())))
}

/// Solution element `i` as exact hex-float text. When `cap` is too small the
/// call returns 2 and `needed` holds the required size.
#[no_mangle]
pub unsafe extern "C" fn mpcore_report_solution_element(
    h: u64,
    i: usize,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> i32 {
    guard(|| {
        with_report(h, |r| {
            if i >= r.solution.len() {
                return Err(Status::DimensionMismatch);
            }
            put_text(&r.solution.get(i).to_hex(), buf, cap, needed)
        })
    })
}
