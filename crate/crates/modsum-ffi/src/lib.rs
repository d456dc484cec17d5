//! C ABI for the modsum library.
//!
//! Sources are opaque handles created with `modsum_source_new` or
//! `modsum_source_probdist` and released with `modsum_source_free`. Every
//! fallible call returns a `ModsumStatus`; results are written through out
//! pointers only on `MODSUM_OK`.

use std::panic::{catch_unwind, AssertUnwindSafe};

use modsum::bounds::{self, SolverSettings};
use modsum::model::{probdist_source, BinaryMarkovSource};
use modsum::schemes::{min_sum_message_entropy, Budget};

/// Opaque source handle. The layout is private to this crate.
pub struct ModsumSource {
    inner: BinaryMarkovSource,
}

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModsumStatus {
    /// Success; the out parameter has been written.
    ModsumOk = 0,
    /// A parameter is outside its domain.
    ModsumErrDomain = 1,
    /// The requested optimization problem has no feasible point.
    ModsumErrInfeasible = 2,
    /// Internal solver failure.
    ModsumErrInternal = 3,
    /// A required pointer argument was null.
    ModsumErrNullPointer = 4,
}

fn status_of(e: &modsum::Error) -> ModsumStatus {
    match e {
        modsum::Error::Domain(_) => ModsumStatus::ModsumErrDomain,
        modsum::Error::Infeasible(_) => ModsumStatus::ModsumErrInfeasible,
        modsum::Error::Internal(_) => ModsumStatus::ModsumErrInternal,
    }
}

fn write_result(
    out: *mut f64,
    f: impl FnOnce() -> modsum::Result<f64>,
) -> ModsumStatus {
    if out.is_null() {
        return ModsumStatus::ModsumErrNullPointer;
    }
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(v)) => {
            // SAFETY: `out` was checked non-null; the caller guarantees it
            // points to writable f64 storage.
            unsafe { *out = v };
            ModsumStatus::ModsumOk
        }
        Ok(Err(e)) => status_of(&e),
        Err(_) => ModsumStatus::ModsumErrInternal,
    }
}

/// Creates a source from P(Z=0) = `p` and the conditionals
/// P(X=0|Z=0) = `x0`, P(X=0|Z=1) = `x1`, P(Y=0|Z=0) = `y0`,
/// P(Y=0|Z=1) = `y1`. On success writes an owned handle to `out`.
#[no_mangle]
pub extern "C" fn modsum_source_new(
    p: f64,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    out: *mut *mut ModsumSource,
) -> ModsumStatus {
    if out.is_null() {
        return ModsumStatus::ModsumErrNullPointer;
    }
    match BinaryMarkovSource::new(p, (x0, x1), (y0, y1)) {
        Ok(inner) => {
            let handle = Box::into_raw(Box::new(ModsumSource { inner }));
            // SAFETY: `out` was checked non-null.
            unsafe { *out = handle };
            ModsumStatus::ModsumOk
        }
        Err(e) => status_of(&e),
    }
}

/// Creates the running-example source with P(Z=0) = `p`.
#[no_mangle]
pub extern "C" fn modsum_source_probdist(p: f64, out: *mut *mut ModsumSource) -> ModsumStatus {
    if out.is_null() {
        return ModsumStatus::ModsumErrNullPointer;
    }
    match probdist_source(p) {
        Ok(inner) => {
            let handle = Box::into_raw(Box::new(ModsumSource { inner }));
            // SAFETY: `out` was checked non-null.
            unsafe { *out = handle };
            ModsumStatus::ModsumOk
        }
        Err(e) => status_of(&e),
    }
}

/// Releases a handle created by `modsum_source_new` or
/// `modsum_source_probdist`. Null is accepted and ignored.
#[no_mangle]
pub extern "C" fn modsum_source_free(source: *mut ModsumSource) {
    if !source.is_null() {
        // SAFETY: the handle was produced by Box::into_raw in this crate and
        // ownership is transferred back here exactly once.
        drop(unsafe { Box::from_raw(source) });
    }
}

macro_rules! require_source {
    ($ptr:expr) => {
        match unsafe { $ptr.as_ref() } {
            Some(s) => &s.inner,
            None => return ModsumStatus::ModsumErrNullPointer,
        }
    };
}

/// Cut-set sum-rate lower bound, in bits per symbol.
#[no_mangle]
pub extern "C" fn modsum_cut_set(source: *const ModsumSource, out: *mut f64) -> ModsumStatus {
    let src = require_source!(source);
    write_result(out, || bounds::cut_set(src).map(|b| b.value))
}

/// Closed-form sum-rate lower bound for the running-example family with
/// P(Z=0) = `p`.
#[no_mangle]
pub extern "C" fn modsum_theorem1(p: f64, out: *mut f64) -> ModsumStatus {
    write_result(out, || {
        bounds::theorem1(p, &SolverSettings::default()).map(|b| b.value)
    })
}

/// Auxiliary-variable (envelope) sum-rate lower bound.
#[no_mangle]
pub extern "C" fn modsum_nw_extension(
    source: *const ModsumSource,
    out: *mut f64,
) -> ModsumStatus {
    let src = require_source!(source);
    write_result(out, || {
        bounds::nw_extension(src, &SolverSettings::default()).map(|b| b.value)
    })
}

/// General coupling-based sum-rate lower bound.
#[no_mangle]
pub extern "C" fn modsum_theorem2(source: *const ModsumSource, out: *mut f64) -> ModsumStatus {
    let src = require_source!(source);
    write_result(out, || {
        bounds::theorem2(src, &SolverSettings::default()).map(|b| b.value)
    })
}

/// Minimum of H(M1) + H(M2) over all zero-error schemes at blocklength `n`
/// (1 or 2), via exhaustive enumeration under the default search budget.
#[no_mangle]
pub extern "C" fn modsum_min_sum_message_entropy(
    source: *const ModsumSource,
    n: u32,
    out: *mut f64,
) -> ModsumStatus {
    let src = require_source!(source);
    write_result(out, || {
        min_sum_message_entropy(src, n as usize, Budget::default()).map(|r| r.min_entropy_sum)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    fn probdist(p: f64) -> *mut ModsumSource {
        let mut handle: *mut ModsumSource = ptr::null_mut();
        assert_eq!(modsum_source_probdist(p, &mut handle), ModsumStatus::ModsumOk);
        assert!(!handle.is_null());
        handle
    }

    #[test]
    fn bound_round_trip() {
        let src = probdist(0.5);
        let mut v = 0.0;
        assert_eq!(modsum_cut_set(src, &mut v), ModsumStatus::ModsumOk);
        assert!((v - 1.0).abs() < 1e-12);
        assert_eq!(modsum_theorem1(0.5, &mut v), ModsumStatus::ModsumOk);
        assert!((v - 1.415037).abs() < 1e-4);
        assert_eq!(modsum_min_sum_message_entropy(src, 1, &mut v), ModsumStatus::ModsumOk);
        assert!((v - 1.622556).abs() < 1e-4);
        modsum_source_free(src);
    }

    #[test]
    fn error_paths() {
        let mut handle: *mut ModsumSource = ptr::null_mut();
        assert_eq!(
            modsum_source_probdist(1.5, &mut handle),
            ModsumStatus::ModsumErrDomain
        );
        assert_eq!(
            modsum_source_new(0.5, 2.0, 0.0, 0.0, 0.5, &mut handle),
            ModsumStatus::ModsumErrDomain
        );
        assert_eq!(
            modsum_source_probdist(0.5, ptr::null_mut()),
            ModsumStatus::ModsumErrNullPointer
        );
        let mut v = 0.0;
        assert_eq!(modsum_cut_set(ptr::null(), &mut v), ModsumStatus::ModsumErrNullPointer);
        let src = probdist(0.5);
        assert_eq!(modsum_cut_set(src, ptr::null_mut()), ModsumStatus::ModsumErrNullPointer);
        assert_eq!(
            modsum_min_sum_message_entropy(src, 7, &mut v),
            ModsumStatus::ModsumErrDomain
        );
        modsum_source_free(src);
        modsum_source_free(ptr::null_mut());
    }
}
