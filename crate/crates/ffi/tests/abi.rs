use std::ffi::{CStr, CString};
use std::ptr;

use clsched_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(clsched_last_error()) }.to_string_lossy().into_owned()
}

unsafe fn take_string(s: *mut std::ffi::c_char) -> String {
    let text = CStr::from_ptr(s).to_str().unwrap().to_owned();
    clsched_string_free(s);
    text
}

#[test]
fn folded_chain_round_trip() {
    unsafe {
        let mut net = ptr::null_mut();
        assert_eq!(clsched_network_generate(ClschedFamily::FoldedTwoLayer, 3, 2, &mut net), ClschedStatus::Ok);
        assert_eq!(clsched_network_num_pairs(net), 3);

        let (mut num, mut den) = (0, 0);
        assert_eq!(clsched_upper_bound(net, &mut num, &mut den), ClschedStatus::Ok);
        assert_eq!((num, den), (1, 2));

        let mut coloring = ptr::null_mut();
        assert_eq!(clsched_color(net, ClschedStrategy::Constructive, 0, 1000, &mut coloring), ClschedStatus::Ok);
        assert_eq!(clsched_coloring_num_colors(coloring), 2);

        let mut v = ClschedVerification::default();
        assert_eq!(clsched_verify(net, coloring, &mut v), ClschedStatus::Ok);
        assert!(v.checker_valid && v.deterministic_ok && v.gaussian_ok);
        assert_eq!(v.violations, 0);

        let mut passed = 0;
        assert_eq!(clsched_simulate(net, coloring, 5, 20, 7, &mut passed), ClschedStatus::Ok);
        assert_eq!(passed, 20);

        let mut text = ptr::null_mut();
        assert_eq!(clsched_network_descriptor(net, &mut text), ClschedStatus::Ok);
        let descriptor = CString::new(take_string(text)).unwrap();
        let mut again = ptr::null_mut();
        assert_eq!(clsched_network_parse(descriptor.as_ptr(), &mut again), ClschedStatus::Ok);

        assert_eq!(clsched_coloring_text(net, coloring, &mut text), ClschedStatus::Ok);
        let written = take_string(text);
        let c_text = CString::new(written.clone()).unwrap();
        let mut parsed = ptr::null_mut();
        assert_eq!(clsched_coloring_parse(again, c_text.as_ptr(), &mut parsed), ClschedStatus::Ok);
        assert_eq!(clsched_coloring_text(again, parsed, &mut text), ClschedStatus::Ok);
        assert_eq!(take_string(text), written);

        clsched_coloring_free(parsed);
        clsched_coloring_free(coloring);
        clsched_network_free(again);
        clsched_network_free(net);
    }
}

#[test]
fn errors_are_reported_with_codes_and_messages() {
    unsafe {
        let mut net = ptr::null_mut();
        assert_eq!(clsched_network_parse(ptr::null(), &mut net), ClschedStatus::NullPointer);
        let bad = CString::new("layers = 3").unwrap();
        assert_eq!(clsched_network_parse(bad.as_ptr(), &mut net), ClschedStatus::ParseError);
        assert!(!last_error().is_empty());
        assert!(net.is_null());

        assert_eq!(
            clsched_network_generate(ClschedFamily::FoldedSingle, 2, 3, &mut net),
            ClschedStatus::InvalidArgument
        );
        assert_eq!(clsched_network_generate(ClschedFamily::Nested, 1, 0, &mut net), ClschedStatus::Ok);
        assert!(last_error().is_empty());

        let mut coloring = ptr::null_mut();
        assert_eq!(clsched_color(net, ClschedStrategy::Tdma, 2, 0, &mut coloring), ClschedStatus::SearchFailed);
        assert_eq!(clsched_color(net, ClschedStrategy::Mcl, 99, 0, &mut coloring), ClschedStatus::InvalidArgument);
        let junk = CString::new("T=2\nS1:1 T={0}").unwrap();
        assert_eq!(clsched_coloring_parse(net, junk.as_ptr(), &mut coloring), ClschedStatus::ParseError);

        let mut other = ptr::null_mut();
        assert_eq!(clsched_network_generate(ClschedFamily::FoldedSingle, 4, 2, &mut other), ClschedStatus::Ok);
        assert_eq!(clsched_color(other, ClschedStrategy::Tdma, 0, 0, &mut coloring), ClschedStatus::Ok);
        let mut v = ClschedVerification::default();
        assert_eq!(clsched_verify(net, coloring, &mut v), ClschedStatus::InvalidArgument);
        assert_eq!(clsched_verify(ptr::null(), coloring, &mut v), ClschedStatus::NullPointer);

        assert_eq!(clsched_network_num_pairs(ptr::null()), 0);
        clsched_network_free(ptr::null_mut());
        clsched_coloring_free(coloring);
        clsched_network_free(other);
        clsched_network_free(net);
    }
}
