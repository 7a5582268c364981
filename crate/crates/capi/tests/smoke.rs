//! Exercise the C ABI through the exported symbols.

use std::ptr;

use cavity_pointer_capi::*;

fn make_default_model() -> *mut CavityPointerModel {
    let masses = [1e-6];
    let forces = [1e-14];
    let widths = [1e-5];
    let counts = [1_000_000u64];
    let mut handle: *mut CavityPointerModel = ptr::null_mut();
    let status = unsafe {
        cavity_pointer_model_from_modes(
            masses.as_ptr(),
            forces.as_ptr(),
            widths.as_ptr(),
            counts.as_ptr(),
            1,
            1.0,
            1.0,
            1.0,
            0.0,
            1.0,
            &mut handle,
        )
    };
    assert_eq!(status, CavityPointerStatus::Ok);
    assert!(!handle.is_null());
    handle
}

#[test]
fn mode_construction_and_quantities() {
    let handle = make_default_model();

    let mut count = 0u64;
    assert_eq!(
        unsafe { cavity_pointer_mode_count(handle, &mut count) },
        CavityPointerStatus::Ok
    );
    assert_eq!(count, 1_000_000);

    let mut gamma = 0.0;
    assert_eq!(
        unsafe { cavity_pointer_gamma_longtime(handle, &mut gamma) },
        CavityPointerStatus::Ok
    );
    assert!((gamma - 3.125e-2).abs() < 1e-12);

    let (mut long_time, mut exact) = (0.0, 0.0);
    assert_eq!(
        unsafe { cavity_pointer_decoherence_time(handle, 1, 0, &mut long_time, &mut exact) },
        CavityPointerStatus::Ok
    );
    assert!((long_time - 32f64.powf(0.25)).abs() < 1e-10);
    assert!((exact - long_time).abs() < 1e-6);

    // |F(tau_d)| = e^{-1}
    let (mut re, mut im, mut log_mag) = (0.0, 0.0, 0.0);
    assert_eq!(
        unsafe {
            cavity_pointer_decoherence_factor(handle, 1, 0, exact, &mut re, &mut im, &mut log_mag)
        },
        CavityPointerStatus::Ok
    );
    assert!((log_mag + 1.0).abs() < 1e-6, "log_mag = {log_mag}");
    assert!(((re * re + im * im).sqrt() - (-1.0f64).exp()).abs() < 1e-6);

    // phase spread satisfies the exact identity at tau_d: exp(-phi^2/2) = e^{-1}
    let mut phi = 0.0;
    assert_eq!(
        unsafe { cavity_pointer_phase_std_total(handle, 1, 0, exact, &mut phi) },
        CavityPointerStatus::Ok
    );
    assert!((phi - 2f64.sqrt()).abs() < 1e-6);

    unsafe { cavity_pointer_model_free(handle) };
}

#[test]
fn lab_construction_matches_effective_model() {
    let masses = [1.0, 2.0];
    let couplings = [3.0, 4.0];
    let mut handle: *mut CavityPointerModel = ptr::null_mut();
    let status = unsafe {
        cavity_pointer_model_from_lab(
            masses.as_ptr(),
            couplings.as_ptr(),
            2,
            1.0,
            1.0,
            0.0,
            1.0,
            &mut handle,
        )
    };
    assert_eq!(status, CavityPointerStatus::Ok);

    // single relative mode: m' = 1.5, f = 1, a = 1 -> Gamma = 1/(32 * 2.25)
    let mut gamma = 0.0;
    unsafe { cavity_pointer_gamma_longtime(handle, &mut gamma) };
    assert!((gamma - 1.0 / 72.0).abs() < 1e-14);

    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(
        unsafe {
            cavity_pointer_pointer_overlap(handle, 0, 1, 1.0, &mut re, &mut im, ptr::null_mut())
        },
        CavityPointerStatus::Ok
    );
    // same displaced-Gaussian law with M = 3, G = 7, sigma_x = 1
    let expect = (-(49.0f64) * (1.0 / (32.0 * 9.0) + 0.5)).exp();
    assert!(((re * re + im * im).sqrt() - expect).abs() < 1e-10);

    unsafe { cavity_pointer_model_free(handle) };
}

#[test]
fn error_codes() {
    let mut handle: *mut CavityPointerModel = ptr::null_mut();

    // null array
    let status = unsafe {
        cavity_pointer_model_from_modes(
            ptr::null(),
            ptr::null(),
            ptr::null(),
            ptr::null(),
            1,
            1.0,
            1.0,
            1.0,
            0.0,
            1.0,
            &mut handle,
        )
    };
    assert_eq!(status, CavityPointerStatus::NullPointer);

    // negative mass
    let masses = [-1.0];
    let forces = [1.0];
    let widths = [1.0];
    let counts = [1u64];
    let status = unsafe {
        cavity_pointer_model_from_modes(
            masses.as_ptr(),
            forces.as_ptr(),
            widths.as_ptr(),
            counts.as_ptr(),
            1,
            1.0,
            1.0,
            1.0,
            0.0,
            1.0,
            &mut handle,
        )
    };
    assert_eq!(status, CavityPointerStatus::InvalidInput);

    // m == n has no decoherence time
    let real = make_default_model();
    let status =
        unsafe { cavity_pointer_decoherence_time(real, 2, 2, ptr::null_mut(), ptr::null_mut()) };
    assert_eq!(status, CavityPointerStatus::NoDecoherence);
    unsafe { cavity_pointer_model_free(real) };

    // freeing null is a no-op
    unsafe { cavity_pointer_model_free(ptr::null_mut()) };

    // status strings are static C strings
    let msg = cavity_pointer_status_message(CavityPointerStatus::NoDecoherence);
    let text = unsafe { std::ffi::CStr::from_ptr(msg) }.to_str().unwrap();
    assert!(text.contains("tau_d"));
}
