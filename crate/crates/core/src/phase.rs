//! Phase-uncertainty account of decoherence.
//!
//! Relative to the branch with `m` photons, mode `j` imprints the random
//! phase operator `phi_j = (n - m) f_j t D_j / hbar` on the branch with `n`
//! photons, where `D_j = t p_j / (2 m'_j) + x_j`. For the real, symmetric
//! initial packets used here the cross moment `<xp + px>` vanishes, so
//!
//! `(Delta D_j)^2 = (t / 2 m'_j)^2 (Delta p_j)^2 + (Delta x_j)^2`,
//!
//! and because the modes are independent the total phase spread is the
//! quadrature sum. For Gaussian packets the identity
//! `|F_mn| = exp(-(Delta phi_mn)^2 / 2)` is exact; `gaussian_phase_relation`
//! computes the two sides through their independent routes (packet overlaps
//! vs moment algebra) so tests can check them against each other.

use crate::decoherence::{factor_total, EnvMode, ModeEnsemble};
use crate::error::{Error, Result};
use crate::linalg::pairwise_sum;

/// Per-mode and total phase spread between Fock branches `m` and `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseReport {
    pub m: u32,
    pub n: u32,
    pub t: f64,
    /// Phase std per distinct mode entry (order of the ensemble).
    pub per_mode_std: Vec<f64>,
    /// `(Delta D_j)^2` per distinct mode entry.
    pub d_variances: Vec<f64>,
    /// Quadrature total over all modes, multiplicity included.
    pub total_std: f64,
    pub min_mode_std: f64,
    /// `sqrt(mode count) * min_mode_std`, a lower bound on `total_std`.
    pub sqrt_n_bound: f64,
    pub mode_count: u64,
}

/// `(Delta D)^2 = (t / 2m')^2 (hbar / 2a)^2 + a^2` for a standard packet of
/// width `a` (the cross term vanishes for real packets).
pub fn d_variance(mode: &EnvMode, t: f64, hbar: f64) -> Result<f64> {
    mode.validate()?;
    let dp = hbar / (2.0 * mode.width);
    let drift = t / (2.0 * mode.mass) * dp;
    Ok(drift * drift + mode.width * mode.width)
}

/// Phase std of one mode: `|n - m| |f| |t| Delta D / hbar`.
pub fn phase_std_mode(mode: &EnvMode, m: u32, n: u32, t: f64, hbar: f64) -> Result<f64> {
    let dn = (f64::from(n) - f64::from(m)).abs();
    Ok(dn * mode.force.abs() * t.abs() * d_variance(mode, t, hbar)?.sqrt() / hbar)
}

/// Quadrature sum over all modes plus the sqrt(N) lower bound.
pub fn phase_std_total(
    modes: &ModeEnsemble,
    m: u32,
    n: u32,
    t: f64,
    hbar: f64,
) -> Result<PhaseReport> {
    let mut per_mode_std = Vec::with_capacity(modes.entries().len());
    let mut d_variances = Vec::with_capacity(modes.entries().len());
    let mut weighted_sq = Vec::with_capacity(modes.entries().len());
    let mut min_mode_std = f64::INFINITY;
    for (mode, count) in modes.entries() {
        let dv = d_variance(mode, t, hbar)?;
        let std = phase_std_mode(mode, m, n, t, hbar)?;
        d_variances.push(dv);
        per_mode_std.push(std);
        weighted_sq.push(*count as f64 * std * std);
        min_mode_std = min_mode_std.min(std);
    }
    if per_mode_std.is_empty() {
        return Err(Error::invalid("phase report needs at least one mode"));
    }
    let mode_count = modes.mode_count();
    let total_std = pairwise_sum(&weighted_sq).sqrt();
    Ok(PhaseReport {
        m,
        n,
        t,
        per_mode_std,
        d_variances,
        total_std,
        min_mode_std,
        sqrt_n_bound: (mode_count as f64).sqrt() * min_mode_std,
        mode_count,
    })
}

/// Both sides of the exact Gaussian identity `|F_mn| = exp(-Delta phi^2 / 2)`:
/// the left from the packet-overlap route, the right from the moment route.
pub fn gaussian_phase_relation(
    modes: &ModeEnsemble,
    m: u32,
    n: u32,
    t: f64,
    hbar: f64,
) -> Result<(f64, f64)> {
    let lhs = factor_total(modes, m, n, t, hbar)?.magnitude();
    let report = phase_std_total(modes, m, n, t, hbar)?;
    let rhs = (-0.5 * report.total_std * report.total_std).exp();
    Ok((lhs, rhs))
}

/// Log-space version of [`gaussian_phase_relation`], usable when the factors
/// underflow: returns `(log |F_mn|, -Delta phi^2 / 2)`.
pub fn log_gaussian_phase_relation(
    modes: &ModeEnsemble,
    m: u32,
    n: u32,
    t: f64,
    hbar: f64,
) -> Result<(f64, f64)> {
    let lhs = factor_total(modes, m, n, t, hbar)?.log_mag;
    let report = phase_std_total(modes, m, n, t, hbar)?;
    Ok((lhs, -0.5 * report.total_std * report.total_std))
}

/// Width minimizing `(Delta D)^2` at fixed `t`, and the minimum itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalWidth {
    /// `a_opt^2 = t hbar / (4 mass)`.
    pub width_sq: f64,
    /// `min Delta D = sqrt(t hbar / (2 mass))`.
    pub d_min: f64,
}

/// Minimize `(Delta D)^2 = a^2 + (t hbar / (4 mass))^2 / a^2` over the packet
/// width. By the AM-GM inequality the minimum sits at `a^2 = t hbar / (4 mass)`
/// with value `t hbar / (2 mass)`; every other width strictly exceeds it.
pub fn optimal_width(t: f64, mass: f64, hbar: f64) -> Result<OptimalWidth> {
    if t <= 0.0 || !t.is_finite() {
        return Err(Error::invalid(format!("time must be positive, got {t}")));
    }
    if mass <= 0.0 || !mass.is_finite() {
        return Err(Error::invalid(format!("mass must be positive, got {mass}")));
    }
    let width_sq = t * hbar / (4.0 * mass);
    Ok(OptimalWidth {
        width_sq,
        d_min: (t * hbar / (2.0 * mass)).sqrt(),
    })
}

/// Smallest mode count for which the total phase spread of identical modes
/// exceeds `target` (e.g. `2 pi`): the many-particle amplification threshold.
pub fn modes_exceeding_phase(
    mode: &EnvMode,
    m: u32,
    n: u32,
    t: f64,
    hbar: f64,
    target: f64,
) -> Result<u64> {
    let single = phase_std_mode(mode, m, n, t, hbar)?;
    if single <= 0.0 || single.is_nan() {
        return Err(Error::NoDecoherence(
            "single-mode phase std vanishes; no count reaches the target".to_string(),
        ));
    }
    Ok(((target / single).powi(2).floor() as u64) + 1)
}
