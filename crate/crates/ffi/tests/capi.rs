use std::ffi::{CStr, CString};
use std::ptr;

use multiorder_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(mo_last_error()) }.to_string_lossy().into_owned()
}

fn z(n: i64) -> MoElement {
    MoElement { group: MoGroup::Z, coords: [n, 0, 0] }
}

unsafe fn take_string(p: *mut libc::c_char) -> String {
    let s = CStr::from_ptr(p).to_string_lossy().into_owned();
    mo_string_free(p);
    s
}

#[test]
fn sample_act_and_index_round_trip() {
    unsafe {
        let family = CString::new("hierarchical").unwrap();
        let mut order = ptr::null_mut();
        assert_eq!(mo_order_sample(MoGroup::Z2, family.as_ptr(), 3, 9, &mut order), MoStatus::Ok);
        let mut group = MoGroup::Z;
        assert_eq!(mo_order_group(order, &mut group), MoStatus::Ok);
        assert_eq!(group, MoGroup::Z2);

        for k in -20..=20 {
            let mut g = z(0);
            assert_eq!(mo_order_element_at(order, k, &mut g), MoStatus::Ok);
            assert_eq!(g.group, MoGroup::Z2);
            let mut back = 0;
            assert_eq!(mo_order_index_of(order, &g, &mut back), MoStatus::Ok);
            assert_eq!(back, k);
        }

        let mut g = z(0);
        assert_eq!(mo_order_element_at(order, 5, &mut g), MoStatus::Ok);
        let mut acted = ptr::null_mut();
        assert_eq!(mo_order_act(order, &g, &mut acted), MoStatus::Ok);
        // (-5)^{g(≺)} = g⁻¹
        let mut h = z(0);
        assert_eq!(mo_order_element_at(acted, -5, &mut h), MoStatus::Ok);
        let mut prod = z(0);
        assert_eq!(mo_element_mul(&g, &h, &mut prod), MoStatus::Ok);
        assert_eq!(prod.coords, [0, 0, 0]);

        let mut ok = false;
        assert_eq!(mo_reindex_check(order, &g, 3, &mut ok), MoStatus::Ok);
        assert!(ok);

        mo_order_free(acted);
        mo_order_free(order);
    }
}

#[test]
fn window_text_parses_back_and_metric_is_exact() {
    unsafe {
        let mut std_order = ptr::null_mut();
        assert_eq!(mo_order_standard(&mut std_order), MoStatus::Ok);
        let mut text = ptr::null_mut();
        assert_eq!(mo_order_window_text(std_order, -4, 4, &mut text), MoStatus::Ok);
        let text = take_string(text);
        assert!(text.starts_with("-4\t-4\n"));

        let swapped = CString::new("-4\t-4\n-3\t-3\n-2\t-2\n-1\t-1\n0\t0\n1\t2\n2\t1\n3\t3\n4\t4\n").unwrap();
        let mut win = ptr::null_mut();
        assert_eq!(mo_order_parse_window(MoGroup::Z, swapped.as_ptr(), &mut win), MoStatus::Ok);
        let mut value = ptr::null_mut();
        assert_eq!(mo_order_metric(std_order, win, 4, &mut value), MoStatus::Ok);
        assert_eq!(take_string(value), "3/16");

        let own = CString::new(text).unwrap();
        let mut copy = ptr::null_mut();
        assert_eq!(mo_order_parse_window(MoGroup::Z, own.as_ptr(), &mut copy), MoStatus::Ok);
        let mut value = ptr::null_mut();
        assert_eq!(mo_order_metric(std_order, copy, 4, &mut value), MoStatus::Ok);
        assert_eq!(take_string(value), "0");

        mo_order_free(copy);
        mo_order_free(win);
        mo_order_free(std_order);
    }
}

#[test]
fn failures_map_to_status_codes() {
    unsafe {
        let mut order = ptr::null_mut();
        assert_eq!(mo_order_standard(&mut order), MoStatus::Ok);
        assert_eq!(last_error(), "");

        let bad = CString::new("0\t1\n").unwrap();
        let mut w = ptr::null_mut();
        assert_eq!(mo_order_parse_window(MoGroup::Z, bad.as_ptr(), &mut w), MoStatus::Parse);
        assert!(w.is_null());
        assert!(!last_error().is_empty());

        let window = CString::new("0\t0\n1\t1\n").unwrap();
        assert_eq!(mo_order_parse_window(MoGroup::Z, window.as_ptr(), &mut w), MoStatus::Ok);
        let mut g = z(0);
        assert_eq!(mo_order_element_at(w, 7, &mut g), MoStatus::Horizon);
        assert!(last_error().contains('7'));

        let pair = MoElement { group: MoGroup::Z2, coords: [1, 1, 0] };
        let mut k = 0;
        assert_eq!(mo_order_index_of(order, &pair, &mut k), MoStatus::Usage);

        let family = CString::new("pair-swap-Z").unwrap();
        let mut o = ptr::null_mut();
        assert_eq!(mo_order_sample(MoGroup::Z2, family.as_ptr(), 0, 0, &mut o), MoStatus::Usage);
        let family = CString::new("nonsense").unwrap();
        assert_eq!(mo_order_sample(MoGroup::Z, family.as_ptr(), 0, 0, &mut o), MoStatus::Parse);

        assert_eq!(mo_order_element_at(ptr::null(), 0, &mut g), MoStatus::NullPointer);
        assert_eq!(mo_order_element_at(order, 0, ptr::null_mut()), MoStatus::NullPointer);
        assert_eq!(mo_order_sample(MoGroup::Z, ptr::null(), 0, 0, &mut o), MoStatus::NullPointer);
        assert!(last_error().contains("family"));

        mo_order_free(ptr::null_mut());
        mo_string_free(ptr::null_mut());
        mo_order_free(w);
        mo_order_free(order);
    }
}

#[test]
fn element_parsing() {
    unsafe {
        let text = CString::new("1,-2,3").unwrap();
        let mut e = z(0);
        assert_eq!(mo_element_parse(MoGroup::H3, text.as_ptr(), &mut e), MoStatus::Ok);
        assert_eq!(e, MoElement { group: MoGroup::H3, coords: [1, -2, 3] });
        assert_eq!(mo_element_parse(MoGroup::Z2, text.as_ptr(), &mut e), MoStatus::Parse);

        // Heisenberg product (1,0,0)(0,1,0) = (1,1,1)
        let a = MoElement { group: MoGroup::H3, coords: [1, 0, 0] };
        let b = MoElement { group: MoGroup::H3, coords: [0, 1, 0] };
        assert_eq!(mo_element_mul(&a, &b, &mut e), MoStatus::Ok);
        assert_eq!(e.coords, [1, 1, 1]);
        assert_eq!(mo_element_mul(&a, &z(1), &mut e), MoStatus::Usage);
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/multiorder.h")).unwrap();
    for name in [
        "mo_last_error",
        "mo_string_free",
        "mo_order_standard",
        "mo_order_sample",
        "mo_order_parse_window",
        "mo_order_free",
        "mo_order_group",
        "mo_order_element_at",
        "mo_order_index_of",
        "mo_order_act",
        "mo_order_window_text",
        "mo_order_metric",
        "mo_reindex_check",
        "mo_element_parse",
        "mo_element_mul",
        "typedef struct MoOrder MoOrder;",
        "MO_STATUS_HORIZON = 2",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
