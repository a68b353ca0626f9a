//! C ABI for bimult.
//!
//! Complex arrays cross the boundary as interleaved `double` pairs
//! `(re, im)` in row-major order. Every fallible call returns a
//! [`BimultStatus`]; on failure [`bimult_last_error`] describes it.
//! Objects are opaque handles released with the matching `_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bimult::multiplier::{apply_schur, apply_tau};
use bimult::norms::{gamma2, norm_bilinear, norm_tau, Target};
use bimult::symbols::{embed_schur, SchurSymbol, Symbol3};
use bimult::{CMatrix, Complex64, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BimultStatus {
    Ok = 0,
    Shape = 1,
    IndexOutOfRange = 2,
    SvdConvergence = 3,
    EigConvergence = 4,
    NotPsd = 5,
    ModularityMethodMismatch = 6,
    InvalidArgument = 7,
    Parse = 8,
    NullPointer = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BimultTarget {
    S2 = 0,
    B = 1,
    S1 = 2,
}

impl From<BimultTarget> for Target {
    fn from(t: BimultTarget) -> Self {
        match t {
            BimultTarget::S2 => Target::S2,
            BimultTarget::B => Target::B,
            BimultTarget::S1 => Target::S1,
        }
    }
}

/// Dense complex matrix.
pub struct BimultMatrix(CMatrix);

/// Schur symbol of dims `(d1, d2, d3)`.
pub struct BimultSchur(SchurSymbol);

/// General trilinear symbol of dims `(d1, d2, d3)`.
pub struct BimultSymbol(Symbol3);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> BimultStatus {
    match e {
        Error::Shape(_) => BimultStatus::Shape,
        Error::IndexOutOfRange { .. } => BimultStatus::IndexOutOfRange,
        Error::SvdConvergence { .. } => BimultStatus::SvdConvergence,
        Error::EigConvergence { .. } => BimultStatus::EigConvergence,
        Error::NotPsd { .. } => BimultStatus::NotPsd,
        Error::ModularityMethodMismatch { .. } => BimultStatus::ModularityMethodMismatch,
        Error::InvalidArgument(_) => BimultStatus::InvalidArgument,
        Error::Parse(_) => BimultStatus::Parse,
    }
}

enum Fail {
    Core(Error),
    Null(&'static str),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> BimultStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BimultStatus::Ok,
        Ok(Err(Fail::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            BimultStatus::NullPointer
        }
        Err(_) => {
            set_error("internal panic".to_string());
            BimultStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn read_complex(data: *const f64, n: usize) -> Result<Vec<Complex64>, Fail> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if data.is_null() {
        return Err(Fail::Null("data"));
    }
    let raw = std::slice::from_raw_parts(data, 2 * n);
    Ok(raw
        .chunks_exact(2)
        .map(|c| Complex64::new(c[0], c[1]))
        .collect())
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn count(dims: [usize; 3], pow: u32) -> Result<usize, Fail> {
    dims.iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d.checked_pow(pow)?))
        .ok_or_else(|| Fail::Core(Error::InvalidArgument("dimensions overflow".into())))
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bimult_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Creates a `rows × cols` matrix from `2·rows·cols` interleaved doubles.
///
/// # Safety
/// `data` must point to `2·rows·cols` readable doubles (may be NULL when
/// the matrix is empty). `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bimult_matrix_new(
    rows: usize,
    cols: usize,
    data: *const f64,
    out: *mut *mut BimultMatrix,
) -> BimultStatus {
    guard(|| {
        let n = rows
            .checked_mul(cols)
            .ok_or_else(|| Fail::Core(Error::InvalidArgument("dimensions overflow".into())))?;
        let m = CMatrix::from_vec(rows, cols, read_complex(data, n)?)?;
        write_out(out, BimultMatrix(m))
    })
}

/// # Safety
/// `m` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bimult_matrix_free(m: *mut BimultMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` must be a live handle; `rows` and `cols` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bimult_matrix_shape(
    m: *const BimultMatrix,
    rows: *mut usize,
    cols: *mut usize,
) -> BimultStatus {
    guard(|| {
        let m = deref(m, "matrix")?;
        if rows.is_null() || cols.is_null() {
            return Err(Fail::Null("shape out"));
        }
        *rows = m.0.rows();
        *cols = m.0.cols();
        Ok(())
    })
}

/// Copies the entries into `out`, which holds `len` doubles. `len` must be
/// at least `2·rows·cols`.
///
/// # Safety
/// `m` must be a live handle and `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bimult_matrix_data(
    m: *const BimultMatrix,
    out: *mut f64,
    len: usize,
) -> BimultStatus {
    guard(|| {
        let m = deref(m, "matrix")?;
        let need = 2 * m.0.data().len();
        if len < need {
            return Err(
                Error::InvalidArgument(format!("buffer holds {len} doubles, need {need}")).into(),
            );
        }
        if need == 0 {
            return Ok(());
        }
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let dst = std::slice::from_raw_parts_mut(out, need);
        for (pair, z) in dst.chunks_exact_mut(2).zip(m.0.data()) {
            pair[0] = z.re;
            pair[1] = z.im;
        }
        Ok(())
    })
}

/// Creates a Schur symbol from `2·d1·d2·d3` interleaved doubles indexed
/// `(t1, t2, t3)` row-major.
///
/// # Safety
/// `dims` must point to three `size_t`; `data` to the entries; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bimult_schur_new(
    dims: *const usize,
    data: *const f64,
    out: *mut *mut BimultSchur,
) -> BimultStatus {
    guard(|| {
        let d = read_dims(dims)?;
        let s = SchurSymbol::from_vec(d, read_complex(data, count(d, 1)?)?)?;
        write_out(out, BimultSchur(s))
    })
}

/// # Safety
/// `s` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bimult_schur_free(s: *mut BimultSchur) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Creates a general symbol from `2·(d1·d2·d3)²` interleaved doubles indexed
/// `(a1, b1, a2, b2, a3, b3)` row-major.
///
/// # Safety
/// Same contract as [`bimult_schur_new`].
#[no_mangle]
pub unsafe extern "C" fn bimult_symbol_new(
    dims: *const usize,
    data: *const f64,
    out: *mut *mut BimultSymbol,
) -> BimultStatus {
    guard(|| {
        let d = read_dims(dims)?;
        let s = Symbol3::from_vec(d, read_complex(data, count(d, 2)?)?)?;
        write_out(out, BimultSymbol(s))
    })
}

/// # Safety
/// `s` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bimult_symbol_free(s: *mut BimultSymbol) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// General symbol of a Schur symbol.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bimult_schur_embed(
    s: *const BimultSchur,
    out: *mut *mut BimultSymbol,
) -> BimultStatus {
    guard(|| {
        let s = deref(s, "schur")?;
        write_out(out, BimultSymbol(embed_schur(&s.0)))
    })
}

/// `out = M_φ(y, x)` for a Schur symbol.
///
/// # Safety
/// All handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bimult_apply_schur(
    s: *const BimultSchur,
    y: *const BimultMatrix,
    x: *const BimultMatrix,
    out: *mut *mut BimultMatrix,
) -> BimultStatus {
    guard(|| {
        let r = apply_schur(&deref(s, "schur")?.0, &deref(y, "y")?.0, &deref(x, "x")?.0)?;
        write_out(out, BimultMatrix(r))
    })
}

/// `out = τ_φ(y, x)` for a general symbol.
///
/// # Safety
/// All handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bimult_apply_tau(
    phi: *const BimultSymbol,
    y: *const BimultMatrix,
    x: *const BimultMatrix,
    out: *mut *mut BimultMatrix,
) -> BimultStatus {
    guard(|| {
        let r = apply_tau(
            &deref(phi, "symbol")?.0,
            &deref(y, "y")?.0,
            &deref(x, "x")?.0,
        )?;
        write_out(out, BimultMatrix(r))
    })
}

/// Factorization norm of `m`. `tol` must be at least 1e-10.
///
/// # Safety
/// `m` must be a live handle; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bimult_gamma2(
    m: *const BimultMatrix,
    tol: f64,
    value: *mut f64,
) -> BimultStatus {
    guard(|| {
        let g = gamma2(&deref(m, "matrix")?.0, tol)?;
        write_value(value, g.value)
    })
}

/// Lower bound for the norm of a Schur multiplier into `target`.
///
/// # Safety
/// `s` must be a live handle; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bimult_norm_schur(
    s: *const BimultSchur,
    target: BimultTarget,
    restarts: usize,
    seed: u64,
    value: *mut f64,
) -> BimultStatus {
    guard(|| {
        let e = norm_bilinear(&deref(s, "schur")?.0, target.into(), restarts, seed)?;
        write_value(value, e.value)
    })
}

/// Lower bound for the norm of a general multiplier into `target`.
///
/// # Safety
/// `phi` must be a live handle; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bimult_norm_tau(
    phi: *const BimultSymbol,
    target: BimultTarget,
    restarts: usize,
    seed: u64,
    value: *mut f64,
) -> BimultStatus {
    guard(|| {
        let e = norm_tau(&deref(phi, "symbol")?.0, target.into(), restarts, seed)?;
        write_value(value, e.value)
    })
}

unsafe fn read_dims(dims: *const usize) -> Result<[usize; 3], Fail> {
    if dims.is_null() {
        return Err(Fail::Null("dims"));
    }
    let d = std::slice::from_raw_parts(dims, 3);
    Ok([d[0], d[1], d[2]])
}

unsafe fn write_value(out: *mut f64, v: f64) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null("value"));
    }
    *out = v;
    Ok(())
}
