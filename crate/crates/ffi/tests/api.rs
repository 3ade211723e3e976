use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use reeb_forcing_ffi::*;

fn surd(s: &str) -> *mut RfSurd {
    let c = CString::new(s).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { rf_surd_parse(c.as_ptr(), &mut out) }, RfStatus::Ok);
    out
}

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    let mut n = 0usize;
    assert_eq!(unsafe { rf_last_error_message(buf.as_mut_ptr(), buf.len(), &mut n) }, RfStatus::Ok);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap().to_string()
}

fn surd_text(s: *const RfSurd) -> String {
    let mut n = 0usize;
    assert_eq!(unsafe { rf_surd_to_string(s, ptr::null_mut(), 0, &mut n) }, RfStatus::BufferTooSmall);
    let mut buf = vec![0 as c_char; n + 1];
    assert_eq!(unsafe { rf_surd_to_string(s, buf.as_mut_ptr(), buf.len(), &mut n) }, RfStatus::Ok);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap().to_string()
}

#[test]
fn surd_round_trip_and_order() {
    let a = surd("-1+sqrt(2)");
    let b = surd("( 0+1*sqrt(8))/2");
    assert_eq!(surd_text(a), "(-1+1*sqrt(2))/1");
    assert_eq!(surd_text(b), "(0+1*sqrt(2))/1");

    let mut ord = 9;
    unsafe {
        assert_eq!(rf_surd_cmp(a, b, &mut ord), RfStatus::Ok);
        assert_eq!(ord, -1);
        assert_eq!(rf_surd_cmp(b, a, &mut ord), RfStatus::Ok);
        assert_eq!(ord, 1);
        assert_eq!(rf_surd_cmp(b, b, &mut ord), RfStatus::Ok);
        assert_eq!(ord, 0);

        let mut f = 0i64;
        assert_eq!(rf_surd_floor(b, &mut f), RfStatus::Ok);
        assert_eq!(f, 1);
        let mut x = 0f64;
        assert_eq!(rf_surd_to_f64(a, &mut x), RfStatus::Ok);
        assert!((x - (2f64.sqrt() - 1.0)).abs() < 1e-15);

        let mut c = ptr::null_mut();
        assert_eq!(rf_surd_new(3, -1, 4, 12, &mut c), RfStatus::Ok);
        assert_eq!(surd_text(c), "(3-2*sqrt(3))/4");
        rf_surd_free(c);
        rf_surd_free(a);
        rf_surd_free(b);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    let mut out = ptr::null_mut();
    let bad = CString::new("sqrt(2").unwrap();
    unsafe {
        assert_eq!(rf_surd_parse(bad.as_ptr(), &mut out), RfStatus::Parse);
        assert!(out.is_null());
        assert!(last_error().contains("sqrt(2"), "{}", last_error());

        assert_eq!(rf_surd_parse(ptr::null(), &mut out), RfStatus::NullPointer);
        assert_eq!(rf_surd_new(1, 0, 0, 1, &mut out), RfStatus::InvalidInput);

        let invalid = [0xffu8 as c_char, 0];
        assert_eq!(rf_surd_parse(invalid.as_ptr(), &mut out), RfStatus::InvalidUtf8);

        let half = surd("1/2");
        let name = CString::new("A").unwrap();
        let mut orbit = ptr::null_mut();
        assert_eq!(rf_orbit_elliptic(name.as_ptr(), half, &mut orbit), RfStatus::Ok);
        let mut cz = 0i64;
        assert_eq!(rf_orbit_cz(orbit, 2, &mut cz), RfStatus::Resonant);
        assert!(last_error().contains("resonant"));
        assert_eq!(rf_orbit_cz(orbit, 1, &mut cz), RfStatus::Ok);
        assert_eq!(last_error(), "");
        assert_eq!(rf_orbit_cz(orbit, 1, ptr::null_mut()), RfStatus::NullPointer);
        rf_orbit_free(orbit);
        rf_surd_free(half);

        let mut m = ptr::null_mut();
        assert_eq!(rf_monodromy_new(1, 1, 0, 1, &mut m), RfStatus::InvalidInput);
        assert!(m.is_null());

        let mut small = [0 as c_char; 2];
        let mut n = 0usize;
        assert_eq!(rf_last_error_message(small.as_mut_ptr(), small.len(), &mut n), RfStatus::BufferTooSmall);
        assert!(n > 2);

        rf_surd_free(ptr::null_mut());
        rf_orbit_free(ptr::null_mut());
        rf_monodromy_free(ptr::null_mut());
        rf_fraction_list_free(ptr::null_mut());
    }
}

#[test]
fn orbit_indices() {
    let theta = surd("(1+1*sqrt(2))/1");
    let name = CString::new("gamma").unwrap();
    unsafe {
        let mut e = ptr::null_mut();
        assert_eq!(rf_orbit_elliptic(name.as_ptr(), theta, &mut e), RfStatus::Ok);
        let (mut cz, mut lo, mut hi, mut par) = (0i64, 0i64, 0i64, 0u8);
        assert_eq!(rf_orbit_cz(e, 1, &mut cz), RfStatus::Ok);
        assert_eq!(rf_orbit_alpha_minus(e, 1, &mut lo), RfStatus::Ok);
        assert_eq!(rf_orbit_alpha_plus(e, 1, &mut hi), RfStatus::Ok);
        assert_eq!(rf_orbit_parity(e, 1, &mut par), RfStatus::Ok);
        assert_eq!((cz, lo, hi, par), (5, 2, 3, 1));
        for k in 1..20u64 {
            assert_eq!(rf_orbit_cz(e, k, &mut cz), RfStatus::Ok);
            assert_eq!(rf_orbit_alpha_minus(e, k, &mut lo), RfStatus::Ok);
            assert_eq!(cz, 2 * lo + 1);
        }
        rf_orbit_free(e);

        let mut h = ptr::null_mut();
        assert_eq!(rf_orbit_hyperbolic(name.as_ptr(), -3, &mut h), RfStatus::Ok);
        assert_eq!(rf_orbit_cz(h, 4, &mut cz), RfStatus::Ok);
        assert_eq!(cz, -12);
        rf_orbit_free(h);
        rf_surd_free(theta);
    }
}

#[test]
fn forcing_list() {
    let t1 = surd("(-1+1*sqrt(2))/1");
    let t2 = surd("(0+1*sqrt(2))/1");
    unsafe {
        let mut list = ptr::null_mut();
        assert_eq!(rf_forcing_hopf(t1, t2, 2, &mut list), RfStatus::Ok);
        assert_eq!(rf_fraction_list_len(list), 2);
        let mut f = RfFraction::default();
        assert_eq!(rf_fraction_list_get(list, 0, &mut f), RfStatus::Ok);
        assert_eq!(f, RfFraction { p: 1, q: 1 });
        assert_eq!(rf_fraction_list_get(list, 1, &mut f), RfStatus::Ok);
        assert_eq!(f, RfFraction { p: 2, q: 1 });
        assert_eq!(rf_fraction_list_get(list, 2, &mut f), RfStatus::OutOfRange);
        assert_eq!(rf_fraction_list_len(ptr::null()), 0);
        rf_fraction_list_free(list);
        rf_surd_free(t1);
        rf_surd_free(t2);
    }
}

#[test]
fn monodromy_counts() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(rf_monodromy_new(2, 1, 1, 1, &mut m), RfStatus::Ok);
        let mut n = 0u64;
        let lucas_minus_two = [1u64, 5, 16, 45, 121];
        for (k, want) in (1..=5).zip(lucas_minus_two) {
            assert_eq!(rf_monodromy_count_u64(m, k, &mut n), RfStatus::Ok);
            assert_eq!(n, want);
        }
        assert_eq!(rf_monodromy_count_u64(m, 60, &mut n), RfStatus::Overflow);

        let mut len = 0usize;
        assert_eq!(rf_monodromy_count(m, 60, ptr::null_mut(), 0, &mut len), RfStatus::BufferTooSmall);
        let mut buf = vec![0 as c_char; len + 1];
        assert_eq!(rf_monodromy_count(m, 60, buf.as_mut_ptr(), buf.len(), &mut len), RfStatus::Ok);
        let text = CStr::from_ptr(buf.as_ptr()).to_str().unwrap();
        assert_eq!(text.len(), len);
        assert!(text.bytes().all(|b| b.is_ascii_digit()));
        assert!(text.len() > 20);
        rf_monodromy_free(m);
    }
}

#[test]
fn version_matches_package() {
    let v = unsafe { CStr::from_ptr(rf_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_api() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/reeb_forcing.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "rf_version",
        "rf_last_error_message",
        "rf_surd_parse",
        "rf_surd_new",
        "rf_surd_free",
        "rf_surd_to_string",
        "rf_surd_cmp",
        "rf_surd_floor",
        "rf_surd_to_f64",
        "rf_orbit_elliptic",
        "rf_orbit_hyperbolic",
        "rf_orbit_free",
        "rf_orbit_cz",
        "rf_orbit_alpha_minus",
        "rf_orbit_alpha_plus",
        "rf_orbit_parity",
        "rf_forcing_hopf",
        "rf_fraction_list_len",
        "rf_fraction_list_get",
        "rf_fraction_list_free",
        "rf_monodromy_new",
        "rf_monodromy_free",
        "rf_monodromy_count",
        "rf_monodromy_count_u64",
        "typedef struct RfSurd RfSurd",
        "RF_STATUS_OK = 0",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let src = std::env::temp_dir().join(format!("rf-header-{}.c", std::process::id()));
    std::fs::write(&src, "#include \"reeb_forcing.h\"\nint main(void) { return rf_version() == 0; }\n").unwrap();
    let status = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&src)
        .status();
    match status {
        Ok(s) => assert!(s.success(), "{cc} rejected the header"),
        Err(e) => eprintln!("skipping: no C compiler ({e})"),
    }
}
