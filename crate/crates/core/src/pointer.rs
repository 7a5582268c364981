//! Pointer dynamics, the cavity state, and the reduced density matrix of the
//! system-plus-pointer pair after tracing out the internal environment.
//!
//! The pointer (the mirror's center of mass, mass `M`) is prepared in a
//! normalized Gaussian of width `sigma_x` centered at `X` - the
//! position-eigenstate limit is recovered as `sigma_x -> 0` - and evolves
//! under the force `n * G` conditioned on the photon number. The reduced
//! density matrix is kept in factored form: the operator weight of
//! `|n><m| (x) |x_n><x_m|` is `c_n(t) conj(c_m(t)) conj(F_mn(t))`, which is
//! exact and compact for any truncation.

use num_complex::Complex64;

use crate::decoherence::{factor_total, ModeEnsemble};
use crate::error::{Error, Result};
use crate::gaussian::{log_overlap, GaussianPacket};
use crate::linalg::invert_complex;

/// Pointer parameters: total mass `M`, per-photon force `G`, initial packet
/// width and center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointerParams {
    pub mass: f64,
    pub coupling: f64,
    pub width: f64,
    pub position: f64,
}

impl PointerParams {
    pub fn validate(&self) -> Result<()> {
        if self.mass <= 0.0 || !self.mass.is_finite() {
            return Err(Error::invalid(format!(
                "pointer mass must be positive, got {}",
                self.mass
            )));
        }
        if self.width <= 0.0 || !self.width.is_finite() {
            return Err(Error::invalid(format!(
                "pointer width must be positive, got {}",
                self.width
            )));
        }
        if !self.coupling.is_finite() || !self.position.is_finite() {
            return Err(Error::invalid("pointer coupling/position must be finite"));
        }
        Ok(())
    }
}

/// Pointer state entangled with the `n`-photon branch at time `t`.
pub fn evolve_pointer(
    pointer: &PointerParams,
    n: u32,
    t: f64,
    hbar: f64,
) -> Result<GaussianPacket> {
    pointer.validate()?;
    let initial = GaussianPacket::displaced(pointer.width, pointer.position, 0.0, hbar)?;
    initial.evolve(pointer.mass, f64::from(n) * pointer.coupling, t, hbar)
}

/// `ln <x_n(t) | x_m(t)>`; same displaced-Gaussian law as the environment
/// factors with `(M, G, sigma_x)` in place of `(m', f, a)`.
pub fn log_pointer_overlap(
    pointer: &PointerParams,
    m: u32,
    n: u32,
    t: f64,
    hbar: f64,
) -> Result<Complex64> {
    pointer.validate()?;
    if m == n || t == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let bra = evolve_pointer(pointer, n, t, hbar)?;
    let ket = evolve_pointer(pointer, m, t, hbar)?;
    Ok(log_overlap(&bra, &ket))
}

/// `<x_n(t) | x_m(t)>`.
pub fn pointer_overlap(
    pointer: &PointerParams,
    m: u32,
    n: u32,
    t: f64,
    hbar: f64,
) -> Result<Complex64> {
    Ok(log_pointer_overlap(pointer, m, n, t, hbar)?.exp())
}

/// Truncated cavity state with Fock amplitudes `c_0 .. c_n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct CavityState {
    pub amplitudes: Vec<Complex64>,
    pub omega0: f64,
    /// Tail-mass tolerance used to pick the truncation.
    pub truncation_tol: f64,
}

impl CavityState {
    pub fn n_max(&self) -> usize {
        self.amplitudes.len() - 1
    }

    /// Amplitudes at time `t`: `c_n(t) = c_n exp(-i (n + 1/2) omega0 t)`.
    /// The probability distribution `|c_n|^2` is invariant.
    pub fn amplitudes_at(&self, t: f64) -> Vec<Complex64> {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(n, c)| {
                c * Complex64::from_polar(1.0, -(n as f64 + 0.5) * self.omega0 * t)
            })
            .collect()
    }

    pub fn total_weight(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.amplitudes.is_empty() {
            return Err(Error::invalid("cavity state needs at least one amplitude"));
        }
        if (self.total_weight() - 1.0).abs() > self.truncation_tol.max(1e-15) * 10.0 {
            return Err(Error::invalid(format!(
                "cavity state weight {} violates truncation tolerance {}",
                self.total_weight(),
                self.truncation_tol
            )));
        }
        Ok(())
    }
}

/// Coherent state `|alpha>` truncated so the tail mass stays below `tol`:
/// `c_n = exp(-|alpha|^2 / 2) alpha^n / sqrt(n!)`.
pub fn coherent_amplitudes(alpha: Complex64, tol: f64, omega0: f64) -> Result<CavityState> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::invalid(format!("tolerance must be in (0, 1), got {tol}")));
    }
    let lambda = alpha.norm_sqr();
    let mut amplitudes = Vec::new();
    let mut c = Complex64::new((-0.5 * lambda).exp(), 0.0);
    let mut cumulative = 0.0;
    for n in 0..10_000u32 {
        amplitudes.push(c);
        cumulative += c.norm_sqr();
        if 1.0 - cumulative < tol {
            return Ok(CavityState {
                amplitudes,
                omega0,
                truncation_tol: tol,
            });
        }
        c *= alpha / f64::from(n + 1).sqrt();
    }
    Err(Error::invalid(format!(
        "coherent amplitude |alpha|^2 = {lambda} needs more than 10000 Fock levels"
    )))
}

/// One factored entry of the reduced density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityEntry {
    /// `c_n(t) conj(c_m(t))`, the bare cavity coefficient.
    pub coeff: Complex64,
    /// Environment factor `conj(F_mn(t))`.
    pub env: Complex64,
    /// `ln |F_mn(t)|`, finite even when `env` underflows.
    pub env_log_mag: f64,
    /// Pointer overlap `<x_n | x_m>` (kept explicit, not traced).
    pub pointer: Complex64,
    /// `ln |<x_n | x_m>|`.
    pub pointer_log_mag: f64,
}

impl DensityEntry {
    /// Operator weight of `|n><m| (x) |x_n><x_m|`.
    pub fn weight(&self) -> Complex64 {
        self.coeff * self.env
    }
}

/// Reduced density matrix of system + pointer in factored form.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedDensity {
    pub t: f64,
    dim: usize,
    entries: Vec<DensityEntry>,
    pub trace: f64,
    pub purity: f64,
    /// `sum_{n != m} |c_n c_m F_mn|`.
    pub offdiag_norm: f64,
}

impl ReducedDensity {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, n: usize, m: usize) -> &DensityEntry {
        &self.entries[n * self.dim + m]
    }
}

/// Trace out the environment from the triple-entangled state at time `t`.
pub fn reduced_density(
    cavity: &CavityState,
    modes: &ModeEnsemble,
    pointer: &PointerParams,
    t: f64,
    hbar: f64,
) -> Result<ReducedDensity> {
    cavity.validate()?;
    let dim = cavity.n_max() + 1;
    let c_t = cavity.amplitudes_at(t);

    let mut entries =
        vec![
            DensityEntry {
                coeff: Complex64::new(0.0, 0.0),
                env: Complex64::new(0.0, 0.0),
                env_log_mag: 0.0,
                pointer: Complex64::new(0.0, 0.0),
                pointer_log_mag: 0.0,
            };
            dim * dim
        ];
    let mut trace = 0.0;
    let mut purity = 0.0;
    let mut offdiag = 0.0;

    for n in 0..dim {
        for m in n..dim {
            let coeff = c_t[n] * c_t[m].conj();
            let (env, env_log, ptr, ptr_log) = if n == m {
                (Complex64::new(1.0, 0.0), 0.0, Complex64::new(1.0, 0.0), 0.0)
            } else {
                let record = factor_total(modes, m as u32, n as u32, t, hbar)?;
                let lp = log_pointer_overlap(pointer, m as u32, n as u32, t, hbar)?;
                (record.total.conj(), record.log_mag, lp.exp(), lp.re)
            };
            entries[n * dim + m] = DensityEntry {
                coeff,
                env,
                env_log_mag: env_log,
                pointer: ptr,
                pointer_log_mag: ptr_log,
            };
            if n != m {
                // Hermitian mirror, exact by construction.
                entries[m * dim + n] = DensityEntry {
                    coeff: coeff.conj(),
                    env: env.conj(),
                    env_log_mag: env_log,
                    pointer: ptr.conj(),
                    pointer_log_mag: ptr_log,
                };
                let mag = coeff.norm() * env_log.exp();
                offdiag += 2.0 * mag;
                purity += 2.0 * mag * mag;
            } else {
                trace += coeff.re;
                purity += coeff.norm_sqr();
            }
        }
    }

    Ok(ReducedDensity {
        t,
        dim,
        entries,
        trace,
        purity,
        offdiag_norm: offdiag,
    })
}

/// Re-expansion of the correlated state in a rotated system basis
/// `|s_n> = sum_{n'} s_{n n'} |n'>`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtRebasis {
    /// Weights `p_n = sum_{n'} |s^{-1}_{n' n} c_{n'}|^2`.
    pub weights: Vec<f64>,
    /// Coefficient vector of each `|t_n>` over the original pointer states,
    /// `t_n[n'] = s^{-1}_{n' n} c_{n'} / sqrt(p_n)` (zero vector when the
    /// weight vanishes).
    pub components: Vec<Vec<Complex64>>,
}

/// Compute the rotated-basis weights and partner states. `s` is the change of
/// system basis (rows indexed by `n`, columns by `n'`), which must be
/// invertible on the truncated space.
pub fn schmidt_rebasis(cavity: &CavityState, s: &[Vec<Complex64>]) -> Result<SchmidtRebasis> {
    let dim = cavity.amplitudes.len();
    if s.len() != dim || s.iter().any(|row| row.len() != dim) {
        return Err(Error::invalid(format!(
            "basis change must be {dim} x {dim} to match the truncated state"
        )));
    }
    let s_inv = invert_complex(s)?;
    let c = &cavity.amplitudes;

    let mut weights = Vec::with_capacity(dim);
    let mut components = Vec::with_capacity(dim);
    for n in 0..dim {
        let column: Vec<Complex64> =
            s_inv.iter().zip(c).map(|(row, cn)| row[n] * cn).collect();
        let p: f64 = column.iter().map(|z| z.norm_sqr()).sum();
        weights.push(p);
        if p > 0.0 {
            let inv_sqrt = 1.0 / p.sqrt();
            components.push(column.into_iter().map(|z| z * inv_sqrt).collect());
        } else {
            components.push(vec![Complex64::new(0.0, 0.0); dim]);
        }
    }
    Ok(SchmidtRebasis { weights, components })
}

/// Magnitude of the sigma_x -> 0 limit of the pointer wavefunction at fixed
/// `t`: the packet flattens toward the constant
/// `(integral of the initial packet) * sqrt(M / (2 pi hbar t))`.
pub fn pointer_flat_limit_amplitude(pointer: &PointerParams, t: f64, hbar: f64) -> f64 {
    standard_packet_integral(pointer.width)
        * (pointer.mass / (std::f64::consts::TAU * hbar * t)).sqrt()
}

/// `∫ psi_0 dx` for a normalized standard packet of width `a`:
/// `2^{3/4} pi^{1/4} sqrt(a)`.
pub(crate) fn standard_packet_integral(width: f64) -> f64 {
    2f64.powf(0.75) * std::f64::consts::PI.powf(0.25) * width.sqrt()
}
