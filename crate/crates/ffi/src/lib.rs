//! C ABI over `dilated-core`.
//!
//! Conventions shared by every function:
//!
//! * The return value is a [`DfStatus`]; results go through out-pointers,
//!   which are written only on `DF_STATUS_OK`.
//! * Handles (`DfCache`, `DfIndexSet`) are opaque, created by `*_new` or
//!   `*_parse` functions and released by the matching `*_free`. Passing
//!   NULL to a `*_free` is a no-op.
//! * On failure a message is kept per thread; [`df_last_error`] copies it.
//! * Panics never cross the boundary; they surface as `DF_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use dilated_core::dilated::{exact_norm_collisions, norm_sq_powerlaw, CoefficientSeq, FourierProfile};
use dilated_core::ntheory::{zeta, ArithmeticCache};
use dilated_core::sequences::{parse_spec, theta, IndexSet};
use dilated_core::spectral::{build_gcd_matrix, eigen_extremes};
use dilated_core::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DfStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    OutOfRange = 3,
    Parse = 4,
    Usage = 5,
    Precondition = 6,
    Numeric = 7,
    Dimension = 8,
    Precision = 9,
    Io = 10,
    Config = 11,
    Utf8 = 12,
    Panic = 13,
}

impl From<&Error> for DfStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Config(_) => DfStatus::Config,
            Error::OutOfRange { .. } => DfStatus::OutOfRange,
            Error::Domain(_) => DfStatus::Domain,
            Error::Parse { .. } => DfStatus::Parse,
            Error::Usage(_) => DfStatus::Usage,
            Error::Precondition(_) => DfStatus::Precondition,
            Error::Numeric(_) => DfStatus::Numeric,
            Error::Dimension { .. } => DfStatus::Dimension,
            Error::Precision(_) => DfStatus::Precision,
            Error::Io(_) => DfStatus::Io,
        }
    }
}

/// Arithmetic tables up to a fixed limit.
pub struct DfCache {
    inner: ArithmeticCache,
}

/// Sorted set of positive integers.
pub struct DfIndexSet {
    inner: IndexSet,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn fail(status: DfStatus, msg: impl Into<String>) -> DfStatus {
    set_error(msg.into());
    status
}

/// Runs `f`, mapping errors and panics to status codes.
fn guard(f: impl FnOnce() -> Result<(), DfStatus>) -> DfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DfStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(DfStatus::Panic, msg)
        }
    }
}

fn core<T>(r: dilated_core::Result<T>) -> Result<T, DfStatus> {
    r.map_err(|e| fail(DfStatus::from(&e), e.to_string()))
}

fn nonnull<T>(p: *const T, what: &str) -> Result<(), DfStatus> {
    if p.is_null() {
        Err(fail(DfStatus::NullPointer, format!("{what} is NULL")))
    } else {
        Ok(())
    }
}

/// # Safety
/// `p` must be NULL or point to `len` readable values.
unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], DfStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    nonnull(p, what)?;
    Ok(std::slice::from_raw_parts(p, len))
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `len - 1` bytes) and returns the full message
/// length. With `buf` NULL only the length is returned.
///
/// # Safety
/// `buf` must be NULL or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn df_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn df_cache_new(limit: u64, out: *mut *mut DfCache) -> DfStatus {
    guard(|| {
        nonnull(out, "out")?;
        let inner = core(ArithmeticCache::new(limit))?;
        *out = Box::into_raw(Box::new(DfCache { inner }));
        Ok(())
    })
}

/// # Safety
/// `cache` must be NULL or a handle from [`df_cache_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn df_cache_free(cache: *mut DfCache) {
    if !cache.is_null() {
        drop(Box::from_raw(cache));
    }
}

/// # Safety
/// `cache` must be a live handle.
unsafe fn cache_ref<'a>(cache: *const DfCache) -> Result<&'a ArithmeticCache, DfStatus> {
    nonnull(cache, "cache")?;
    Ok(&(*cache).inner)
}

macro_rules! cache_fn {
    ($(#[$doc:meta])* $name:ident, $ty:ty, |$c:ident, $n:ident| $body:expr) => {
        $(#[$doc])*
        ///
        /// # Safety
        /// `cache` must be a live handle and `out` writable.
        #[no_mangle]
        pub unsafe extern "C" fn $name(cache: *const DfCache, n: u64, out: *mut $ty) -> DfStatus {
            guard(|| {
                let $c = cache_ref(cache)?;
                nonnull(out, "out")?;
                let $n = n;
                *out = core($body)?;
                Ok(())
            })
        }
    };
}

cache_fn!(
    /// Number of divisors of `n`.
    df_divisor_count, u64, |c, n| c.divisor_count(n)
);
cache_fn!(
    /// Möbius function of `n`.
    df_mobius, i8, |c, n| c.mobius(n)
);
cache_fn!(
    /// Euler's totient of `n`.
    df_phi, u64, |c, n| c.phi(n)
);
cache_fn!(
    /// Average of `gcd(d, n)` over `1 <= d <= n`.
    df_pillai_mean, f64, |c, n| c.pillai_mean(n)
);
cache_fn!(
    /// Largest number of divisors of `n` in an interval `(x, e x]`.
    df_erdos_hooley_delta, u64, |c, n| c.erdos_hooley_delta(n)
);

/// `sum_{d | n} d^alpha`.
///
/// # Safety
/// `cache` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn df_sigma(cache: *const DfCache, n: u64, alpha: f64, out: *mut f64) -> DfStatus {
    guard(|| {
        let c = cache_ref(cache)?;
        nonnull(out, "out")?;
        *out = core(c.sigma_alpha(n, alpha))?;
        Ok(())
    })
}

/// Jordan totient `J_eps(n)`.
///
/// # Safety
/// `cache` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn df_jordan_totient(cache: *const DfCache, n: u64, eps: f64, out: *mut f64) -> DfStatus {
    guard(|| {
        let c = cache_ref(cache)?;
        nonnull(out, "out")?;
        *out = core(c.jordan_totient(n, eps))?;
        Ok(())
    })
}

/// Riemann zeta at real `s > 1`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn df_zeta(s: f64, out: *mut f64) -> DfStatus {
    guard(|| {
        nonnull(out, "out")?;
        *out = core(zeta(s))?;
        Ok(())
    })
}

/// Builds a set from a sequence expression such as `"range[1,10]"` or
/// `"hadamard(2,20,1)"`.
///
/// # Safety
/// `cache` must be a live handle, `spec` a NUL-terminated string and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn df_index_set_parse(
    cache: *const DfCache,
    spec: *const c_char,
    out: *mut *mut DfIndexSet,
) -> DfStatus {
    guard(|| {
        let c = cache_ref(cache)?;
        nonnull(spec, "spec")?;
        nonnull(out, "out")?;
        let text = CStr::from_ptr(spec)
            .to_str()
            .map_err(|e| fail(DfStatus::Utf8, e.to_string()))?;
        let inner = core(parse_spec(text, c))?;
        *out = Box::into_raw(Box::new(DfIndexSet { inner }));
        Ok(())
    })
}

/// Builds a set from `len` integers; order and repeats do not matter.
///
/// # Safety
/// `values` must point to `len` readable integers and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn df_index_set_from_array(
    values: *const u64,
    len: usize,
    out: *mut *mut DfIndexSet,
) -> DfStatus {
    guard(|| {
        let v = slice(values, len, "values")?;
        nonnull(out, "out")?;
        let inner = core(IndexSet::new(v.iter().copied()))?;
        *out = Box::into_raw(Box::new(DfIndexSet { inner }));
        Ok(())
    })
}

/// # Safety
/// `set` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn df_index_set_free(set: *mut DfIndexSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// # Safety
/// `set` must be a live handle.
unsafe fn set_ref<'a>(set: *const DfIndexSet) -> Result<&'a IndexSet, DfStatus> {
    nonnull(set, "set")?;
    Ok(&(*set).inner)
}

/// Number of elements.
///
/// # Safety
/// `set` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn df_index_set_len(set: *const DfIndexSet, out: *mut usize) -> DfStatus {
    guard(|| {
        let s = set_ref(set)?;
        nonnull(out, "out")?;
        *out = s.len();
        Ok(())
    })
}

/// Copies up to `cap` elements in increasing order into `buf`; `out_len`
/// receives the full size. `DF_STATUS_DIMENSION` when `cap` is too small.
///
/// # Safety
/// `set` must be a live handle, `buf` writable for `cap` integers and
/// `out_len` writable.
#[no_mangle]
pub unsafe extern "C" fn df_index_set_elements(
    set: *const DfIndexSet,
    buf: *mut u64,
    cap: usize,
    out_len: *mut usize,
) -> DfStatus {
    guard(|| {
        let s = set_ref(set)?;
        nonnull(out_len, "out_len")?;
        *out_len = s.len();
        if cap < s.len() {
            return Err(fail(
                DfStatus::Dimension,
                format!("buffer holds {cap}, set has {}", s.len()),
            ));
        }
        if !s.is_empty() {
            nonnull(buf, "buf")?;
            std::ptr::copy_nonoverlapping(s.elements().as_ptr(), buf, s.len());
        }
        Ok(())
    })
}

/// `sup_k theta_K(k)`.
///
/// # Safety
/// `set` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn df_theta_sup(set: *const DfIndexSet, out: *mut f64) -> DfStatus {
    guard(|| {
        let s = set_ref(set)?;
        nonnull(out, "out")?;
        *out = core(theta(s))?.sup_value;
        Ok(())
    })
}

/// Smallest and largest eigenvalues of the GCD matrix of `set` at `s`.
///
/// # Safety
/// `set` must be a live handle; `out_min` and `out_max` writable.
#[no_mangle]
pub unsafe extern "C" fn df_gcd_eigen_extremes(
    set: *const DfIndexSet,
    s: f64,
    out_min: *mut f64,
    out_max: *mut f64,
) -> DfStatus {
    guard(|| {
        let k = set_ref(set)?;
        nonnull(out_min, "out_min")?;
        nonnull(out_max, "out_max")?;
        let e = core(build_gcd_matrix(k, s).and_then(|m| eigen_extremes(&m)))?;
        *out_min = e.lambda_min;
        *out_max = e.lambda_max;
        Ok(())
    })
}

/// `‖sum_k c_k f(kx)‖²` for the power-law profile `a_j = j^{-s}`.
///
/// # Safety
/// `set` must be a live handle, `coeffs` readable for `len` values and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn df_norm_sq_powerlaw(
    set: *const DfIndexSet,
    coeffs: *const f64,
    len: usize,
    s: f64,
    out: *mut f64,
) -> DfStatus {
    guard(|| {
        let k = set_ref(set)?;
        let c = core(CoefficientSeq::new(slice(coeffs, len, "coeffs")?.to_vec()))?;
        nonnull(out, "out")?;
        *out = core(norm_sq_powerlaw(k, &c, s))?;
        Ok(())
    })
}

/// `‖sum_k c_k f(kx)‖²` for `f = sum_j a_j e(jx)` with `nterms` explicit
/// `(freqs[i], amps[i])`, by exact frequency-collision counting.
///
/// # Safety
/// `set` must be a live handle; `coeffs` readable for `len` values,
/// `freqs` and `amps` for `nterms` values; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn df_norm_sq_explicit(
    set: *const DfIndexSet,
    coeffs: *const f64,
    len: usize,
    freqs: *const u64,
    amps: *const f64,
    nterms: usize,
    out: *mut f64,
) -> DfStatus {
    guard(|| {
        let k = set_ref(set)?;
        let c = core(CoefficientSeq::new(slice(coeffs, len, "coeffs")?.to_vec()))?;
        let f = slice(freqs, nterms, "freqs")?;
        let a = slice(amps, nterms, "amps")?;
        let profile = core(FourierProfile::explicit(f.iter().copied().zip(a.iter().copied())))?;
        nonnull(out, "out")?;
        *out = core(exact_norm_collisions(k, &c, &profile))?;
        Ok(())
    })
}
