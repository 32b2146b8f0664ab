//! C ABI over `unitorus`.
//!
//! Groups are opaque `UtGroup` handles created by [`ut_group_from_json`] or
//! [`ut_gallery_u_n`] and released with [`ut_group_free`]. Every fallible
//! call returns a [`UtStatus`]; on failure [`ut_last_error_message`] holds a
//! description for the calling thread. Strings handed out by the library
//! are released with [`ut_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use unitorus::gallery::u_n_on_torus;
use unitorus::group::{derived_length, nilpotency_class, MatrixGroup};
use unitorus::groupfile::GroupFile;
use unitorus::growth::growth_exponent;
use unitorus::report::analyze_group;
use unitorus::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvariantViolation = 4,
    NotUnipotent = 5,
    BadArgument = 6,
    Panic = 7,
    Internal = 8,
}

/// Opaque group handle.
pub struct UtGroup {
    file: GroupFile,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> UtStatus {
    match e {
        Error::Parse(_) | Error::BadComplexStructure(_) => UtStatus::ParseError,
        Error::Invariant { .. } => UtStatus::InvariantViolation,
        Error::NotUnipotent(_) | Error::NotQuasiUnipotent => UtStatus::NotUnipotent,
        Error::BadDegree { .. } | Error::BadParameters(_) | Error::WrongArity { .. } => UtStatus::BadArgument,
        _ => UtStatus::Internal,
    }
}

fn guard(f: impl FnOnce() -> Result<(), UtStatus>) -> UtStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => UtStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic inside unitorus");
            UtStatus::Panic
        }
    }
}

fn fail(e: Error) -> UtStatus {
    set_error(&e.to_string());
    status_of(&e)
}

unsafe fn group_ref<'a>(g: *const UtGroup) -> Result<&'a UtGroup, UtStatus> {
    if g.is_null() {
        set_error("null group handle");
        return Err(UtStatus::NullPointer);
    }
    Ok(&*g)
}

unsafe fn write_out<T>(out: *mut T, v: T) -> Result<(), UtStatus> {
    if out.is_null() {
        set_error("null output pointer");
        return Err(UtStatus::NullPointer);
    }
    out.write(v);
    Ok(())
}

fn lattice_group(g: &UtGroup) -> Result<MatrixGroup, UtStatus> {
    let mats = g.file.generators.iter().map(|a| a.m.clone()).collect();
    MatrixGroup::new(2 * g.file.n(), mats).map_err(fail)
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("JSON has no NUL bytes").into_raw()
}

/// Parses a version 1 group file from a NUL-terminated UTF-8 string.
///
/// # Safety
/// `json` must be a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ut_group_from_json(json: *const c_char, out: *mut *mut UtGroup) -> UtStatus {
    guard(|| {
        if json.is_null() {
            set_error("null input string");
            return Err(UtStatus::NullPointer);
        }
        let text = CStr::from_ptr(json).to_str().map_err(|e| {
            set_error(&format!("input is not UTF-8: {e}"));
            UtStatus::InvalidUtf8
        })?;
        let file = GroupFile::parse(text).map_err(fail)?;
        write_out(out, Box::into_raw(Box::new(UtGroup { file })))
    })
}

/// The `U(n, ℤ)` gallery group on the square-curve torus of dimension `n`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ut_gallery_u_n(n: usize, out: *mut *mut UtGroup) -> UtStatus {
    guard(|| {
        let case = u_n_on_torus(n).map_err(fail)?;
        write_out(out, Box::into_raw(Box::new(UtGroup { file: GroupFile::from_case(&case) })))
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `g` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ut_group_free(g: *mut UtGroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Complex dimension of the torus.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ut_group_dimension(g: *const UtGroup, out: *mut usize) -> UtStatus {
    guard(|| write_out(out, group_ref(g)?.file.n()))
}

/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ut_group_generator_count(g: *const UtGroup, out: *mut usize) -> UtStatus {
    guard(|| write_out(out, group_ref(g)?.file.generators.len()))
}

/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ut_group_nilpotency_class(g: *const UtGroup, out: *mut usize) -> UtStatus {
    guard(|| {
        let c = nilpotency_class(&lattice_group(group_ref(g)?)?).map_err(fail)?;
        write_out(out, c)
    })
}

/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ut_group_derived_length(g: *const UtGroup, out: *mut usize) -> UtStatus {
    guard(|| {
        let l = derived_length(&lattice_group(group_ref(g)?)?).map_err(fail)?;
        write_out(out, l)
    })
}

/// Growth exponent of generator `generator` on `H^{p,q}`.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ut_growth_exponent(
    g: *const UtGroup,
    generator: usize,
    p: usize,
    q: usize,
    out: *mut usize,
) -> UtStatus {
    guard(|| {
        let grp = group_ref(g)?;
        let n = grp.file.n();
        let Some(aut) = grp.file.generators.get(generator) else {
            return Err(fail(Error::BadParameters(format!("generator {generator} out of range"))));
        };
        if p > n || q > n {
            return Err(fail(Error::BadDegree { p, q, n }));
        }
        let e = growth_exponent(&grp.file.torus, aut, p, q).map_err(fail)?;
        write_out(out, e)
    })
}

/// The analyze-group report as JSON. Free the result with [`ut_string_free`].
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ut_analyze_json(g: *const UtGroup, out: *mut *mut c_char) -> UtStatus {
    guard(|| {
        let r = analyze_group(&group_ref(g)?.file).map_err(fail)?;
        write_out(out, into_c_string(r.to_json()))
    })
}

/// Canonical group-file text. Free the result with [`ut_string_free`].
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ut_group_to_json(g: *const UtGroup, out: *mut *mut c_char) -> UtStatus {
    guard(|| write_out(out, into_c_string(group_ref(g)?.file.to_canonical())))
}

/// # Safety
/// `s` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn ut_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn ut_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn ut_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    #[test]
    fn null_handles_are_reported() {
        let mut out = 0usize;
        unsafe {
            assert_eq!(ut_group_nilpotency_class(ptr::null(), &mut out), UtStatus::NullPointer);
            assert_eq!(ut_group_from_json(ptr::null(), ptr::null_mut()), UtStatus::NullPointer);
            ut_group_free(ptr::null_mut());
            ut_string_free(ptr::null_mut());
        }
        let msg = unsafe { CStr::from_ptr(ut_last_error_message()) };
        assert_eq!(msg.to_str().unwrap(), "null input string");
    }

    #[test]
    fn error_statuses() {
        assert_eq!(status_of(&Error::Parse("x".into())), UtStatus::ParseError);
        assert_eq!(status_of(&Error::Invariant { generator: Some(1), invariant: "MJ = JM".into() }), UtStatus::InvariantViolation);
        assert_eq!(status_of(&Error::NotUnipotent(None)), UtStatus::NotUnipotent);
        assert_eq!(status_of(&Error::Singular), UtStatus::Internal);
    }
}
