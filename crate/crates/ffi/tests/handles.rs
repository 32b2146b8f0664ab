use std::ffi::{CStr, CString};
use std::ptr;

use unitorus_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(ut_last_error_message()) }.to_str().unwrap().to_owned()
}

fn u_n(n: usize) -> *mut UtGroup {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { ut_gallery_u_n(n, &mut g) }, UtStatus::Ok);
    g
}

#[test]
fn gallery_group_invariants() {
    let g = u_n(4);
    let (mut c, mut l, mut k, mut n) = (0, 0, 0, 0);
    unsafe {
        assert_eq!(ut_group_nilpotency_class(g, &mut c), UtStatus::Ok);
        assert_eq!(ut_group_derived_length(g, &mut l), UtStatus::Ok);
        assert_eq!(ut_group_generator_count(g, &mut k), UtStatus::Ok);
        assert_eq!(ut_group_dimension(g, &mut n), UtStatus::Ok);
        ut_group_free(g);
    }
    assert_eq!((c, l, k, n), (3, 2, 6, 4));
}

#[test]
fn json_round_trip_through_handles() {
    let g = u_n(3);
    let mut text = ptr::null_mut();
    assert_eq!(unsafe { ut_group_to_json(g, &mut text) }, UtStatus::Ok);
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { ut_group_from_json(text, &mut h) }, UtStatus::Ok);
    let mut again = ptr::null_mut();
    assert_eq!(unsafe { ut_group_to_json(h, &mut again) }, UtStatus::Ok);
    unsafe {
        assert_eq!(CStr::from_ptr(text), CStr::from_ptr(again));
        ut_string_free(text);
        ut_string_free(again);
        ut_group_free(g);
        ut_group_free(h);
    }
}

#[test]
fn growth_and_report() {
    let g = u_n(2);
    let mut e = 99;
    unsafe {
        assert_eq!(ut_growth_exponent(g, 0, 1, 1, &mut e), UtStatus::Ok);
        assert_eq!(e, 2);
        assert_eq!(ut_growth_exponent(g, 0, 3, 0, &mut e), UtStatus::BadArgument);
        assert!(last_error().contains("degree"));
        assert_eq!(ut_growth_exponent(g, 5, 1, 1, &mut e), UtStatus::BadArgument);
        let mut json = ptr::null_mut();
        assert_eq!(ut_analyze_json(g, &mut json), UtStatus::Ok);
        let s = CStr::from_ptr(json).to_str().unwrap().to_owned();
        ut_string_free(json);
        ut_group_free(g);
        assert!(s.contains("\"nilpotency_class\": 1"));
        assert!(s.contains("\"outcome\": \"ok\""));
    }
    assert_eq!(last_error(), "");
}

#[test]
fn rejected_inputs() {
    let mut g = ptr::null_mut();
    let bad = CString::new(
        r#"{"schema_version": 1, "torus": {"n": 1, "j": [["0","-1"],["1","0"]]},
            "generators": [{"matrix": [[1,1],[0,1]]}], "metadata": {}}"#,
    )
    .unwrap();
    assert_eq!(unsafe { ut_group_from_json(bad.as_ptr(), &mut g) }, UtStatus::InvariantViolation);
    assert!(last_error().contains("generator 0"));
    assert!(g.is_null());
    let junk = CString::new("{").unwrap();
    assert_eq!(unsafe { ut_group_from_json(junk.as_ptr(), &mut g) }, UtStatus::ParseError);
    let bytes = [0xffu8, 0xfe, 0];
    assert_eq!(unsafe { ut_group_from_json(bytes.as_ptr().cast(), &mut g) }, UtStatus::InvalidUtf8);
    assert_eq!(unsafe { ut_gallery_u_n(1, &mut g) }, UtStatus::BadArgument);
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(ut_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
