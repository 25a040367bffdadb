//! C ABI over `cubekh`.
//!
//! Diagrams live behind an opaque [`CubekhDiagram`] handle. Every function
//! returns a [`CubekhStatus`]; on failure the message is available from
//! [`cubekh_last_error`] until the next call on the same thread. Strings
//! returned through out-pointers must be released with [`cubekh_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cubekh::diagram::Diagram;
use cubekh::job::{self, ErrorKind, JobError, RunOptions};
use cubekh::khovanov::{kh_ranks, khr_ranks, KhOptions};

/// Opaque link diagram.
pub struct CubekhDiagram {
    inner: Diagram,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CubekhStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Validation = 3,
    BudgetExceeded = 4,
    Internal = 5,
    Panic = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &JobError) -> CubekhStatus {
    match e.kind {
        ErrorKind::Validation => CubekhStatus::Validation,
        ErrorKind::BudgetExceeded => CubekhStatus::BudgetExceeded,
        ErrorKind::Internal => CubekhStatus::Internal,
    }
}

fn guarded(f: impl FnOnce() -> Result<(), (CubekhStatus, String)>) -> CubekhStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CubekhStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("panic inside cubekh");
            CubekhStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, (CubekhStatus, String)> {
    if s.is_null() {
        return Err((CubekhStatus::NullPointer, "null string".into()));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| (CubekhStatus::InvalidUtf8, e.to_string()))
}

fn job_err(e: JobError) -> (CubekhStatus, String) {
    (status_of(&e), e.detail)
}

/// Message of the last failed call on this thread, or NULL. Owned by the library.
#[no_mangle]
pub extern "C" fn cubekh_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses `{"pd": [[...]], "free_loops": n, "orientation": [...]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cubekh_diagram_from_json(json: *const c_char, out: *mut *mut CubekhDiagram) -> CubekhStatus {
    guarded(|| {
        if out.is_null() {
            return Err((CubekhStatus::NullPointer, "null out pointer".into()));
        }
        *out = ptr::null_mut();
        let text = read_str(json)?;
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| (CubekhStatus::Validation, format!("input is not valid JSON: {e}")))?;
        let d = job::diagram_from_job(&value).map_err(job_err)?;
        *out = Box::into_raw(Box::new(CubekhDiagram { inner: d }));
        Ok(())
    })
}

/// Releases a diagram. NULL is ignored.
///
/// # Safety
/// `d` must come from [`cubekh_diagram_from_json`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cubekh_diagram_free(d: *mut CubekhDiagram) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

unsafe fn with_diagram(
    d: *const CubekhDiagram,
    out: *mut u64,
    f: impl FnOnce(&Diagram) -> Result<u64, (CubekhStatus, String)>,
) -> CubekhStatus {
    guarded(|| {
        if d.is_null() || out.is_null() {
            return Err((CubekhStatus::NullPointer, "null pointer argument".into()));
        }
        *out = f(&(*d).inner)?;
        Ok(())
    })
}

fn options(max_crossings: usize) -> Result<KhOptions, (CubekhStatus, String)> {
    let cap = job::resolve_max_crossings((max_crossings > 0).then_some(max_crossings)).map_err(job_err)?;
    Ok(KhOptions {
        max_crossings: cap,
        ..Default::default()
    })
}

/// Number of crossings.
///
/// # Safety
/// `d` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cubekh_diagram_crossings(d: *const CubekhDiagram, out: *mut u64) -> CubekhStatus {
    with_diagram(d, out, |d| Ok(d.crossing_count() as u64))
}

/// Total rank of reduced Khovanov homology over F2. `max_crossings` 0 uses the default cap.
///
/// # Safety
/// `d` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cubekh_khr_total(d: *const CubekhDiagram, max_crossings: usize, out: *mut u64) -> CubekhStatus {
    with_diagram(d, out, |d| {
        let r = khr_ranks(d, &options(max_crossings)?).map_err(|e| job_err(e.into()))?;
        Ok(r.total as u64)
    })
}

/// Total rank of Khovanov homology over F2. `max_crossings` 0 uses the default cap.
///
/// # Safety
/// `d` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cubekh_kh_total(d: *const CubekhDiagram, max_crossings: usize, out: *mut u64) -> CubekhStatus {
    with_diagram(d, out, |d| {
        let r = kh_ranks(d, &options(max_crossings)?).map_err(|e| job_err(e.into()))?;
        Ok(r.total as u64)
    })
}

/// Link determinant, cross-checked between the Goeritz matrix and the state sum.
///
/// # Safety
/// `d` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cubekh_det(d: *const CubekhDiagram, out: *mut u64) -> CubekhStatus {
    with_diagram(d, out, |d| {
        let cap = options(0)?.max_crossings;
        let r = cubekh::branched::det(d, cap).map_err(|e| job_err(e.into()))?;
        Ok(r.det)
    })
}

/// Runs a JSON job as the command-line tool would. `*out` receives the result
/// document, or the `{"error": ...}` document when the status is not OK.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cubekh_run_job_json(json: *const c_char, out: *mut *mut c_char) -> CubekhStatus {
    guarded(|| {
        if out.is_null() {
            return Err((CubekhStatus::NullPointer, "null out pointer".into()));
        }
        *out = ptr::null_mut();
        let text = read_str(json)?;
        let (doc, status) = match job::run_str(text, None, &RunOptions::default()) {
            Ok(v) => (v, None),
            Err(e) => (e.to_json(), Some(job_err(e))),
        };
        let s = CString::new(job::render(&doc, 0)).unwrap_or_default();
        *out = s.into_raw();
        match status {
            None => Ok(()),
            Some(err) => Err(err),
        }
    })
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cubekh_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cstr(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    fn diagram(json: &str) -> *mut CubekhDiagram {
        let mut d = ptr::null_mut();
        let st = unsafe { cubekh_diagram_from_json(cstr(json).as_ptr(), &mut d) };
        assert_eq!(st, CubekhStatus::Ok);
        d
    }

    #[test]
    fn trefoil_invariants() {
        let d = diagram(r#"{"pd":[[1,4,2,5],[3,6,4,1],[5,2,6,3]]}"#);
        let mut x = 0u64;
        unsafe {
            assert_eq!(cubekh_diagram_crossings(d, &mut x), CubekhStatus::Ok);
            assert_eq!(x, 3);
            assert_eq!(cubekh_khr_total(d, 0, &mut x), CubekhStatus::Ok);
            assert_eq!(x, 3);
            assert_eq!(cubekh_kh_total(d, 0, &mut x), CubekhStatus::Ok);
            assert_eq!(x, 6);
            assert_eq!(cubekh_det(d, &mut x), CubekhStatus::Ok);
            assert_eq!(x, 3);
            assert_eq!(cubekh_khr_total(d, 2, &mut x), CubekhStatus::BudgetExceeded);
            assert!(!cubekh_last_error().is_null());
            cubekh_diagram_free(d);
        }
    }

    #[test]
    fn bad_inputs() {
        let mut d = ptr::null_mut();
        unsafe {
            assert_eq!(cubekh_diagram_from_json(ptr::null(), &mut d), CubekhStatus::NullPointer);
            let st = cubekh_diagram_from_json(cstr(r#"{"pd":[[1,2,3]]}"#).as_ptr(), &mut d);
            assert_eq!(st, CubekhStatus::Validation);
            assert!(d.is_null());
            let msg = CStr::from_ptr(cubekh_last_error()).to_str().unwrap();
            assert!(msg.contains("4"), "{msg}");
            let mut x = 0;
            assert_eq!(cubekh_det(ptr::null(), &mut x), CubekhStatus::NullPointer);
            cubekh_diagram_free(ptr::null_mut());
            cubekh_string_free(ptr::null_mut());
        }
    }

    #[test]
    fn run_job_round_trip() {
        let mut out = ptr::null_mut();
        unsafe {
            let job = cstr(r#"{"command":"plumbing","plumbing":{"mult":[2,2],"edges":[[0,1]]}}"#);
            assert_eq!(cubekh_run_job_json(job.as_ptr(), &mut out), CubekhStatus::Ok);
            let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(out).to_str().unwrap()).unwrap();
            assert_eq!(v["h1"], 3);
            cubekh_string_free(out);
            let job = cstr(r#"{"command":"khr"}"#);
            assert_eq!(cubekh_run_job_json(job.as_ptr(), &mut out), CubekhStatus::Validation);
            let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(out).to_str().unwrap()).unwrap();
            assert_eq!(v["error"]["kind"], "validation");
            cubekh_string_free(out);
        }
    }
}
