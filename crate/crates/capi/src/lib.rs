//! C ABI over the cavity-pointer simulator.
//!
//! The surface is a single opaque model handle plus plain functions that
//! write results through out-pointers and return a status code. Every
//! function is panic-safe at the boundary. The generated header lives at
//! `include/cavity_pointer.h`.

use std::panic::{catch_unwind, AssertUnwindSafe};

use cavity_pointer::decoherence::{
    decoherence_time, factor_total, gamma_longtime, EnvMode, ModeEnsemble,
};
use cavity_pointer::error::Error;
use cavity_pointer::model::{build_effective_model, ModelSpec};
use cavity_pointer::phase::phase_std_total;
use cavity_pointer::pointer::{log_pointer_overlap, PointerParams};

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CavityPointerStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument was outside its domain (sizes, signs, finiteness).
    InvalidInput = 2,
    /// Decoherence time undefined: equal Fock labels or all forces zero.
    NoDecoherence = 3,
    /// Internal panic; the out-values are untouched.
    Internal = 4,
}

/// Opaque simulator handle: internal mode ensemble, pointer parameters and
/// the hbar convention.
pub struct CavityPointerModel {
    modes: ModeEnsemble,
    pointer: PointerParams,
    hbar: f64,
}

fn status_of(err: &Error) -> CavityPointerStatus {
    match err {
        Error::NoDecoherence(_) => CavityPointerStatus::NoDecoherence,
        _ => CavityPointerStatus::InvalidInput,
    }
}

fn guarded(body: impl FnOnce() -> CavityPointerStatus) -> CavityPointerStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => CavityPointerStatus::Internal,
    }
}

unsafe fn slice_arg<'a, T>(ptr: *const T, len: usize) -> Option<&'a [T]> {
    if ptr.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(ptr, len))
    }
}

/// Build a model from an explicit internal-mode list.
///
/// `masses`, `forces`, `widths` and `counts` are parallel arrays of length
/// `n_modes`. On success `*out` owns the handle; release it with
/// [`cavity_pointer_model_free`].
///
/// # Safety
/// Array pointers must reference `n_modes` readable elements and `out` must
/// be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn cavity_pointer_model_from_modes(
    masses: *const f64,
    forces: *const f64,
    widths: *const f64,
    counts: *const u64,
    n_modes: usize,
    pointer_mass: f64,
    pointer_coupling: f64,
    pointer_width: f64,
    pointer_position: f64,
    hbar: f64,
    out: *mut *mut CavityPointerModel,
) -> CavityPointerStatus {
    guarded(|| {
        if out.is_null() {
            return CavityPointerStatus::NullPointer;
        }
        let (Some(masses), Some(forces), Some(widths), Some(counts)) = (
            slice_arg(masses, n_modes),
            slice_arg(forces, n_modes),
            slice_arg(widths, n_modes),
            slice_arg(counts, n_modes),
        ) else {
            return CavityPointerStatus::NullPointer;
        };
        if n_modes == 0 || hbar <= 0.0 || !hbar.is_finite() {
            return CavityPointerStatus::InvalidInput;
        }
        let mut modes = ModeEnsemble::new();
        for i in 0..n_modes {
            let mode = EnvMode { mass: masses[i], force: forces[i], width: widths[i] };
            if modes.push(mode, counts[i]).is_err() {
                return CavityPointerStatus::InvalidInput;
            }
        }
        let pointer = PointerParams {
            mass: pointer_mass,
            coupling: pointer_coupling,
            width: pointer_width,
            position: pointer_position,
        };
        if pointer.validate().is_err() {
            return CavityPointerStatus::InvalidInput;
        }
        let handle = Box::new(CavityPointerModel { modes, pointer, hbar });
        *out = Box::into_raw(handle);
        CavityPointerStatus::Ok
    })
}

/// Build a model from the laboratory description: per-particle masses and
/// radiation-pressure couplings. The pointer is the center of mass (mass
/// `sum m_i`, coupling `sum g_i`); the internal modes are derived by
/// diagonalizing the relative-coordinate mass matrix.
///
/// # Safety
/// `masses` and `couplings` must reference `n_particles` readable elements
/// and `out` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn cavity_pointer_model_from_lab(
    masses: *const f64,
    couplings: *const f64,
    n_particles: usize,
    packet_width: f64,
    pointer_width: f64,
    pointer_position: f64,
    hbar: f64,
    out: *mut *mut CavityPointerModel,
) -> CavityPointerStatus {
    guarded(|| {
        if out.is_null() {
            return CavityPointerStatus::NullPointer;
        }
        let (Some(masses), Some(couplings)) = (
            slice_arg(masses, n_particles),
            slice_arg(couplings, n_particles),
        ) else {
            return CavityPointerStatus::NullPointer;
        };
        // cavity-field parameters do not enter the exposed quantities
        let spec = ModelSpec {
            masses: masses.to_vec(),
            couplings: couplings.to_vec(),
            omega0: 1.0,
            alpha: cavity_pointer::num_complex::Complex64::new(1.0, 0.0),
            packet_width,
            pointer_width,
            hbar,
        };
        let effective = match build_effective_model(&spec) {
            Ok(m) => m,
            Err(e) => return status_of(&e),
        };
        let modes = match ModeEnsemble::from_model(&effective, &[packet_width]) {
            Ok(m) => m,
            Err(e) => return status_of(&e),
        };
        let pointer = PointerParams {
            mass: effective.total_mass,
            coupling: effective.g_total,
            width: pointer_width,
            position: pointer_position,
        };
        let handle = Box::new(CavityPointerModel { modes, pointer, hbar });
        *out = Box::into_raw(handle);
        CavityPointerStatus::Ok
    })
}

/// Release a model handle. Null is accepted and ignored.
///
/// # Safety
/// `model` must be null or a pointer previously returned by a constructor,
/// not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cavity_pointer_model_free(model: *mut CavityPointerModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Total internal mode count (with multiplicity).
///
/// # Safety
/// `model` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cavity_pointer_mode_count(
    model: *const CavityPointerModel,
    out: *mut u64,
) -> CavityPointerStatus {
    guarded(|| {
        if model.is_null() || out.is_null() {
            return CavityPointerStatus::NullPointer;
        }
        *out = (*model).modes.mode_count();
        CavityPointerStatus::Ok
    })
}

/// Decoherence factor `F_mn(t)`: real and imaginary parts plus the log
/// magnitude (finite even when the factor itself underflows). Out-pointers
/// may be null to skip an output.
///
/// # Safety
/// `model` must be valid; non-null out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn cavity_pointer_decoherence_factor(
    model: *const CavityPointerModel,
    m: u32,
    n: u32,
    t: f64,
    out_re: *mut f64,
    out_im: *mut f64,
    out_log_mag: *mut f64,
) -> CavityPointerStatus {
    guarded(|| {
        if model.is_null() {
            return CavityPointerStatus::NullPointer;
        }
        let handle = &*model;
        match factor_total(&handle.modes, m, n, t, handle.hbar) {
            Ok(record) => {
                if !out_re.is_null() {
                    *out_re = record.total.re;
                }
                if !out_im.is_null() {
                    *out_im = record.total.im;
                }
                if !out_log_mag.is_null() {
                    *out_log_mag = record.log_mag;
                }
                CavityPointerStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Long-time decay rate `Gamma = sum_j f_j^2 / (32 m'_j^2 a_j^2)`.
///
/// # Safety
/// `model` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cavity_pointer_gamma_longtime(
    model: *const CavityPointerModel,
    out: *mut f64,
) -> CavityPointerStatus {
    guarded(|| {
        if model.is_null() || out.is_null() {
            return CavityPointerStatus::NullPointer;
        }
        *out = gamma_longtime(&(*model).modes);
        CavityPointerStatus::Ok
    })
}

/// Decoherence time: the long-time-law solution `[(m-n)^2 Gamma]^{-1/4}` and
/// the exact crossing of the full decay law.
///
/// # Safety
/// `model` must be valid; non-null out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn cavity_pointer_decoherence_time(
    model: *const CavityPointerModel,
    m: u32,
    n: u32,
    out_long_time: *mut f64,
    out_exact: *mut f64,
) -> CavityPointerStatus {
    guarded(|| {
        if model.is_null() {
            return CavityPointerStatus::NullPointer;
        }
        let handle = &*model;
        match decoherence_time(&handle.modes, m, n, handle.hbar) {
            Ok(tau) => {
                if !out_long_time.is_null() {
                    *out_long_time = tau.long_time;
                }
                if !out_exact.is_null() {
                    *out_exact = tau.exact_crossing;
                }
                CavityPointerStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Total random phase spread `Delta phi_mn(t)` over all internal modes.
///
/// # Safety
/// `model` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cavity_pointer_phase_std_total(
    model: *const CavityPointerModel,
    m: u32,
    n: u32,
    t: f64,
    out: *mut f64,
) -> CavityPointerStatus {
    guarded(|| {
        if model.is_null() || out.is_null() {
            return CavityPointerStatus::NullPointer;
        }
        let handle = &*model;
        match phase_std_total(&handle.modes, m, n, t, handle.hbar) {
            Ok(report) => {
                *out = report.total_std;
                CavityPointerStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Pointer-state overlap `<x_n(t)|x_m(t)>` (real, imaginary, log magnitude).
///
/// # Safety
/// `model` must be valid; non-null out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn cavity_pointer_pointer_overlap(
    model: *const CavityPointerModel,
    m: u32,
    n: u32,
    t: f64,
    out_re: *mut f64,
    out_im: *mut f64,
    out_log_mag: *mut f64,
) -> CavityPointerStatus {
    guarded(|| {
        if model.is_null() {
            return CavityPointerStatus::NullPointer;
        }
        let handle = &*model;
        match log_pointer_overlap(&handle.pointer, m, n, t, handle.hbar) {
            Ok(log) => {
                let value = log.exp();
                if !out_re.is_null() {
                    *out_re = value.re;
                }
                if !out_im.is_null() {
                    *out_im = value.im;
                }
                if !out_log_mag.is_null() {
                    *out_log_mag = log.re;
                }
                CavityPointerStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn cavity_pointer_status_message(
    status: CavityPointerStatus,
) -> *const std::os::raw::c_char {
    let message: &'static [u8] = match status {
        CavityPointerStatus::Ok => b"ok\0",
        CavityPointerStatus::NullPointer => b"null pointer argument\0",
        CavityPointerStatus::InvalidInput => b"invalid input\0",
        CavityPointerStatus::NoDecoherence => b"no decoherence: tau_d undefined\0",
        CavityPointerStatus::Internal => b"internal error\0",
    };
    message.as_ptr() as *const std::os::raw::c_char
}
