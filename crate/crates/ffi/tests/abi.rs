use std::ffi::{c_char, CStr};
use std::ptr;

use dpgraph_ffi::*;

const TOY: &CStr = c"H undirected\nN a 1\nN b 1\nN c 2\nN d 3\nE a b\nE c a\nE b c\nE d c\n";

fn toy() -> *mut DpgSequence {
    let mut seq = ptr::null_mut();
    assert_eq!(
        unsafe { dpg_sequence_from_edge_list(TOY.as_ptr(), ptr::null(), &mut seq) },
        DpgStatus::Ok
    );
    seq
}

fn config(statistic: &CStr, mechanism: DpgMechanism, bounds: *const c_char) -> DpgReleaseConfig {
    DpgReleaseConfig {
        statistic: statistic.as_ptr(),
        mechanism,
        epsilon: 1.0,
        bounds,
        projection_thresholds: ptr::null(),
        seed: 1,
        trial: 0,
        zero_noise: true,
    }
}

fn last_error() -> String {
    let p = dpg_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn histogram_release_is_row_major() {
    let seq = toy();
    let cfg = config(c"degree_histogram", DpgMechanism::SensDiff, c"3".as_ptr());
    let mut rel = ptr::null_mut();
    unsafe {
        assert_eq!(dpg_release(seq, &cfg, &mut rel), DpgStatus::Ok);
        assert_eq!(dpg_release_len(rel), 3);
        assert_eq!(dpg_release_width(rel), 4);
        assert_eq!(dpg_release_sensitivity(rel), 43);
        let v = std::slice::from_raw_parts(dpg_release_values(rel), 12);
        // t=3: degrees a:2 b:2 c:3 d:1
        assert_eq!(&v[8..12], &[0.0, 1.0, 2.0, 1.0]);
        dpg_release_free(rel);
        dpg_sequence_free(seq);
    }
}

#[test]
fn noisy_release_reports_its_scale() {
    let seq = toy();
    let mut cfg = config(c"edge", DpgMechanism::ComposeBounded, c"3".as_ptr());
    cfg.zero_noise = false;
    cfg.epsilon = 2.0;
    let mut rel = ptr::null_mut();
    unsafe {
        assert_eq!(dpg_release(seq, &cfg, &mut rel), DpgStatus::Ok);
        assert_eq!(dpg_release_noise_scale(rel), 3.0 * 3.0 / 2.0);
        dpg_release_free(rel);
        dpg_sequence_free(seq);
    }
}

#[test]
fn errors_map_to_status_codes() {
    let seq = toy();
    let mut rel = ptr::null_mut();
    unsafe {
        let tight = config(c"edge", DpgMechanism::SensDiff, c"1".as_ptr());
        assert_eq!(dpg_release(seq, &tight, &mut rel), DpgStatus::BoundViolation);
        assert!(last_error().contains("bound"));

        let hist = config(c"degree_histogram", DpgMechanism::ComposeBounded, c"3".as_ptr());
        assert_eq!(dpg_release(seq, &hist, &mut rel), DpgStatus::Unsupported);

        let wrong_mode = config(c"edge", DpgMechanism::SensDiff, c"3:3".as_ptr());
        assert_eq!(dpg_release(seq, &wrong_mode, &mut rel), DpgStatus::GraphError);

        let mut buf = [0.0; 2];
        let mut len = 0;
        assert_eq!(
            dpg_statistic_series(seq, c"triangle".as_ptr(), buf.as_mut_ptr(), 2, &mut len),
            DpgStatus::BufferTooSmall
        );
        assert_eq!(len, 3);

        let bad = [0xffu8, 0];
        let mut gs = 0;
        assert_eq!(
            dpg_diff_sensitivity(bad.as_ptr().cast(), c"2".as_ptr(), &mut gs),
            DpgStatus::InvalidUtf8
        );
        assert_eq!(
            dpg_diff_sensitivity(ptr::null(), c"2".as_ptr(), &mut gs),
            DpgStatus::NullPointer
        );
        assert_eq!(
            dpg_diff_sensitivity(c"edge".as_ptr(), c"x".as_ptr(), &mut gs),
            DpgStatus::ParseError
        );

        let mut other = ptr::null_mut();
        assert_eq!(
            dpg_sequence_from_edge_list(c"N a 1\n".as_ptr(), ptr::null(), &mut other),
            DpgStatus::ParseError
        );
        assert!(last_error().contains("line 1"));

        // success clears the message
        assert_eq!(
            dpg_diff_sensitivity(c"edge".as_ptr(), c"2".as_ptr(), &mut gs),
            DpgStatus::Ok
        );
        assert!(dpg_last_error_message().is_null());
        dpg_sequence_free(seq);
    }
}

#[test]
fn time_origin_and_null_handles() {
    let text = c"H directed\nN x 1995\nN y 2001\nN z 2003\nE x y\nE y z\n";
    let origin = 2001i64;
    let mut seq = ptr::null_mut();
    unsafe {
        assert_eq!(
            dpg_sequence_from_edge_list(text.as_ptr(), &origin, &mut seq),
            DpgStatus::Ok
        );
        assert_eq!(dpg_sequence_horizon(seq), 3);
        let mut buf = [0.0; 3];
        let mut len = 0;
        assert_eq!(
            dpg_statistic_series(seq, c"in_k_star:1".as_ptr(), buf.as_mut_ptr(), 3, &mut len),
            DpgStatus::Ok
        );
        assert_eq!(buf, [1.0, 1.0, 2.0]);
        dpg_sequence_free(seq);

        assert_eq!(dpg_sequence_horizon(ptr::null()), 0);
        assert!(dpg_release_values(ptr::null()).is_null());
        dpg_sequence_free(ptr::null_mut());
        dpg_release_free(ptr::null_mut());
        dpg_string_free(ptr::null_mut());
    }
}

#[test]
fn synthetic2_through_the_abi() {
    let mut p = dpg_synthetic2_default_params();
    p.population = 200;
    p.initial_infected = 3;
    p.max_steps = 8;
    let mut seq = ptr::null_mut();
    unsafe {
        assert_eq!(dpg_generate_synthetic2(&p, &mut seq), DpgStatus::Ok);
        assert_eq!(dpg_sequence_horizon(seq), 8);
        dpg_sequence_free(seq);
        p.population = 0;
        assert_eq!(dpg_generate_synthetic2(&p, &mut seq), DpgStatus::InvalidArgument);
    }
}
