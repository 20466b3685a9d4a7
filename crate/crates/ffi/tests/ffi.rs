use std::ffi::{CStr, CString};
use std::path::Path;
use std::ptr;
use std::slice;

use zkmc_ffi::*;

fn model(name: &str) -> CString {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/models").join(name);
    CString::new(std::fs::read_to_string(p).unwrap()).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(zkmc_last_error()) }.to_string_lossy().into_owned()
}

unsafe fn take(buf: *mut ZkmcBuffer) -> Vec<u8> {
    let v = slice::from_raw_parts(zkmc_buffer_data(buf), zkmc_buffer_len(buf)).to_vec();
    zkmc_buffer_free(buf);
    v
}

unsafe fn unit(src: &CString, bound: u64) -> *mut ZkmcUnit {
    let mut u = ptr::null_mut();
    assert_eq!(zkmc_unit_parse(src.as_ptr(), bound, &mut u), ZkmcStatus::Ok, "{}", last_error());
    u
}

unsafe fn graph(src: &CString) -> *mut ZkmcGraph {
    let mut g = ptr::null_mut();
    assert_eq!(zkmc_graph_parse(src.as_ptr(), &mut g), ZkmcStatus::Ok, "{}", last_error());
    g
}

const TINY: &str = "system {
  var x in [0, 3];
  init: x = 0;
  command inc: guard x <= 2 update x' = x + 1;
  command stay: guard x >= 3 update skip;
}
automaton {
  vars: x;
  states: q0;
  init: q0;
  aps: low := x <= 1;
  trans:
    q0 -- {low} --> q0 fair;
    q0 -- {} --> q0;
}
ranking {
  at q0:
    case x <= 1 => 2 - x;
    case x >= 2, x <= 3 => 0;
    inf x >= 4;
}
";

#[test]
fn explicit_round_trip_through_the_c_abi() {
    unsafe {
        let cert = unit(&model("handshake_table.zkgc"), 1 << 32);
        let sys = graph(&model("handshake.zkx.json"));
        let space = graph(&model("handshake.space.json"));
        assert_eq!(zkmc_check(cert, sys, 1 << 32), ZkmcStatus::Ok);

        let mut buf = ptr::null_mut();
        assert_eq!(zkmc_explicit_setup(cert, space, &mut buf), ZkmcStatus::Ok);
        let srs = take(buf);
        assert_eq!(zkmc_explicit_prove(cert, sys, srs.as_ptr(), srs.len(), &mut buf), ZkmcStatus::Ok);
        let mut bundle = take(buf);
        assert_eq!(zkmc_explicit_verify(cert, space, srs.as_ptr(), srs.len(), bundle.as_ptr(), bundle.len()), ZkmcStatus::Ok);
        assert_eq!(last_error(), "");

        let n = bundle.len();
        bundle[n - 1] ^= 1;
        let status = zkmc_explicit_verify(cert, space, srs.as_ptr(), srs.len(), bundle.as_ptr(), bundle.len());
        assert_eq!(status, ZkmcStatus::Invalid);
        assert!(!last_error().is_empty());

        zkmc_unit_free(cert);
        zkmc_graph_free(sys);
        zkmc_graph_free(space);
    }
}

#[test]
fn symbolic_round_trip_through_the_c_abi() {
    let bound = 1 << 16;
    unsafe {
        let u = unit(&CString::new(TINY).unwrap(), bound);
        assert_eq!(zkmc_check(u, ptr::null(), bound), ZkmcStatus::Ok);
        let mut buf = ptr::null_mut();
        assert_eq!(zkmc_symbolic_setup(u, bound, &mut buf), ZkmcStatus::Ok);
        let params = take(buf);
        assert_eq!(zkmc_symbolic_prove(u, bound, params.as_ptr(), params.len(), 8, &mut buf), ZkmcStatus::Ok);
        let bundle = take(buf);

        let public = unit(&CString::new(&TINY[TINY.find("automaton").unwrap()..]).unwrap(), bound);
        let status = zkmc_symbolic_verify(public, bound, params.as_ptr(), params.len(), bundle.as_ptr(), bundle.len(), 8);
        assert_eq!(status, ZkmcStatus::Ok, "{}", last_error());
        let status = zkmc_symbolic_verify(public, bound + 1, params.as_ptr(), params.len(), bundle.as_ptr(), bundle.len(), 8);
        assert_eq!(status, ZkmcStatus::Invalid);

        // Public-only units cannot be proved.
        assert_eq!(zkmc_symbolic_prove(public, bound, params.as_ptr(), params.len(), 8, &mut buf), ZkmcStatus::InvalidArgument);
        zkmc_unit_free(u);
        zkmc_unit_free(public);
    }
}

#[test]
fn errors_are_reported_by_status() {
    unsafe {
        let mut u = ptr::null_mut();
        let bad = CString::new("system {\n  var x in [0, 3;\n}\n").unwrap();
        assert_eq!(zkmc_unit_parse(bad.as_ptr(), 10, &mut u), ZkmcStatus::Parse);
        assert!(u.is_null());
        assert!(last_error().contains("2:17"), "{}", last_error());

        assert_eq!(zkmc_unit_parse(ptr::null(), 10, &mut u), ZkmcStatus::NullPointer);
        assert_eq!(zkmc_check(ptr::null(), ptr::null(), 10), ZkmcStatus::NullPointer);

        let flat = CString::new(TINY.replace("2 - x", "1")).unwrap();
        let u = unit(&flat, 1 << 16);
        assert_eq!(zkmc_check(u, ptr::null(), 1 << 16), ZkmcStatus::Invalid);
        let mut buf = ptr::null_mut();
        assert_eq!(zkmc_explicit_setup(u, ptr::null(), &mut buf), ZkmcStatus::InvalidArgument);
        let table = unit(&model("handshake_table.zkgc"), 1 << 32);
        assert_eq!(zkmc_explicit_setup(table, ptr::null(), &mut buf), ZkmcStatus::NullPointer);
        zkmc_unit_free(table);
        let junk = [1u8, 2, 3];
        assert_eq!(zkmc_symbolic_prove(u, 1 << 16, junk.as_ptr(), junk.len(), 1, &mut buf), ZkmcStatus::Invalid);
        let good = unit(&CString::new(TINY).unwrap(), 1 << 16);
        assert_eq!(zkmc_symbolic_prove(good, 1 << 16, junk.as_ptr(), junk.len(), 1, &mut buf), ZkmcStatus::Decode);
        zkmc_unit_free(u);
        zkmc_unit_free(good);
        zkmc_unit_free(ptr::null_mut());
        zkmc_buffer_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/zkmc.h")).unwrap();
    for name in [
        "ZKMC_STATUS_OK",
        "ZKMC_STATUS_INVALID",
        "typedef struct ZkmcUnit ZkmcUnit",
        "zkmc_unit_parse",
        "zkmc_check",
        "zkmc_explicit_verify",
        "zkmc_symbolic_verify",
        "zkmc_buffer_free",
        "zkmc_last_error",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
}
