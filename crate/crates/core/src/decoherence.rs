//! Decoherence factors of the internal environment.
//!
//! Conditioned on the cavity holding `n` photons, internal mode `j` evolves
//! under the force `n * f_j`. The decoherence factor between the branches for
//! photon numbers `m` and `n` is the product over modes of the overlaps of
//! the two conditionally evolved packets,
//!
//! `F_mn(t) = prod_j <e_n^j(t) | e_m^j(t)>`,
//!
//! with the closed-form magnitude (see `docs/decay_law.md`)
//!
//! `|F_mn| = exp[-(n-m)^2 sum_j f_j^2 (t^4 / (32 m'_j^2 a_j^2)
//!                                     + a_j^2 t^2 / (2 hbar^2))]`.
//!
//! Products run over up to 10^7 modes, so magnitudes are accumulated as log
//! magnitudes and phases separately; the reduction is a fixed-topology
//! pairwise tree, bit-stable under any parallel schedule.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::{log_overlap, GaussianPacket};
use crate::linalg::pairwise_sum;
use crate::model::EffectiveModel;

const TAU: f64 = std::f64::consts::TAU;

/// One internal environment mode: a free particle of mass `mass` prepared in
/// a width-`width` Gaussian, forced by `force` per cavity photon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvMode {
    pub mass: f64,
    pub force: f64,
    pub width: f64,
}

impl EnvMode {
    pub fn validate(&self) -> Result<()> {
        if self.mass <= 0.0 || !self.mass.is_finite() {
            return Err(Error::invalid(format!("mode mass must be positive, got {}", self.mass)));
        }
        if self.width <= 0.0 || !self.width.is_finite() {
            return Err(Error::invalid(format!("mode width must be positive, got {}", self.width)));
        }
        if !self.force.is_finite() {
            return Err(Error::invalid(format!("mode force must be finite, got {}", self.force)));
        }
        Ok(())
    }
}

/// A multiset of environment modes: distinct modes with multiplicities.
///
/// Identical modes are the common case (a mirror of N equal particles), so
/// they are stored once with a count; per-mode work is then done once and
/// scaled, which is what makes 10^7-particle sweeps run in milliseconds.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeEnsemble {
    entries: Vec<(EnvMode, u64)>,
}

impl ModeEnsemble {
    pub fn new() -> Self {
        ModeEnsemble { entries: Vec::new() }
    }

    /// Append `count` copies of `mode`, merging with an existing entry when
    /// the parameters are bitwise equal.
    pub fn push(&mut self, mode: EnvMode, count: u64) -> Result<()> {
        mode.validate()?;
        if count == 0 {
            return Err(Error::invalid("mode count must be at least 1"));
        }
        if let Some((_, c)) = self.entries.iter_mut().find(|(m, _)| *m == mode) {
            *c += count;
        } else {
            self.entries.push((mode, count));
        }
        Ok(())
    }

    /// Ensemble of `count` identical modes.
    pub fn uniform(mode: EnvMode, count: u64) -> Result<Self> {
        let mut e = ModeEnsemble::new();
        e.push(mode, count)?;
        Ok(e)
    }

    /// The N-1 normal modes of an effective model, all sharing one packet
    /// width (pass a per-mode slice to override).
    pub fn from_model(model: &EffectiveModel, widths: &[f64]) -> Result<Self> {
        let k = model.effective_masses.len();
        if widths.len() != k && widths.len() != 1 {
            return Err(Error::invalid(format!(
                "need 1 or {k} widths, got {}",
                widths.len()
            )));
        }
        let mut e = ModeEnsemble::new();
        for i in 0..k {
            let width = if widths.len() == 1 { widths[0] } else { widths[i] };
            e.push(
                EnvMode {
                    mass: model.effective_masses[i],
                    force: model.mode_forces[i],
                    width,
                },
                1,
            )?;
        }
        Ok(e)
    }

    /// Distinct entries with multiplicities.
    pub fn entries(&self) -> &[(EnvMode, u64)] {
        &self.entries
    }

    /// Total mode count (with multiplicity).
    pub fn mode_count(&self) -> u64 {
        self.entries.iter().map(|(_, c)| c).sum()
    }

    /// Same modes with every multiplicity scaled by `factor`.
    pub fn scaled_counts(&self, factor: u64) -> Result<Self> {
        if factor == 0 {
            return Err(Error::invalid("count factor must be at least 1"));
        }
        Ok(ModeEnsemble {
            entries: self
                .entries
                .iter()
                .map(|&(m, c)| (m, c * factor))
                .collect(),
        })
    }

    /// Same modes with every packet width replaced by `width`.
    pub fn with_width(&self, width: f64) -> Result<Self> {
        let mut e = ModeEnsemble::new();
        for &(m, c) in &self.entries {
            e.push(EnvMode { width, ..m }, c)?;
        }
        Ok(e)
    }
}

impl Default for ModeEnsemble {
    fn default() -> Self {
        Self::new()
    }
}

/// Decoherence factor between photon-number branches `m` and `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceRecord {
    pub m: u32,
    pub n: u32,
    pub t: f64,
    /// One factor per distinct mode entry (order of the ensemble).
    pub per_mode: Vec<Complex64>,
    /// `sum_j ln |F^j|` over all modes, multiplicity included.
    pub log_mag: f64,
    /// Accumulated phase, reduced modulo 2 pi.
    pub phase: f64,
    /// `prod_j F^j`; underflows to zero once `log_mag < ~-745`, while
    /// `log_mag` stays meaningful.
    pub total: Complex64,
}

impl DecoherenceRecord {
    pub fn magnitude(&self) -> f64 {
        self.log_mag.exp()
    }
}

/// `ln <e_n^j(t) | e_m^j(t)>` for a single mode: both branches start from the
/// same standard packet and evolve under forces `n * f` and `m * f`.
pub fn log_factor_mode(mode: &EnvMode, m: u32, n: u32, t: f64, hbar: f64) -> Result<Complex64> {
    mode.validate()?;
    if m == n || t == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let initial = GaussianPacket::standard(mode.width)?;
    let bra = initial.evolve(mode.mass, f64::from(n) * mode.force, t, hbar)?;
    let ket = initial.evolve(mode.mass, f64::from(m) * mode.force, t, hbar)?;
    Ok(log_overlap(&bra, &ket))
}

/// Single-mode decoherence factor `<e_n^j(t) | e_m^j(t)>`.
///
/// Equals 1 exactly for `m == n` or `t == 0` (identical evolutions).
pub fn factor_mode(mode: &EnvMode, m: u32, n: u32, t: f64, hbar: f64) -> Result<Complex64> {
    Ok(log_factor_mode(mode, m, n, t, hbar)?.exp())
}

/// Total decoherence factor with per-mode breakdown.
pub fn factor_total(
    modes: &ModeEnsemble,
    m: u32,
    n: u32,
    t: f64,
    hbar: f64,
) -> Result<DecoherenceRecord> {
    let mut per_mode = Vec::with_capacity(modes.entries().len());
    let mut log_mags = Vec::with_capacity(modes.entries().len());
    let mut phases = Vec::with_capacity(modes.entries().len());
    for (mode, count) in modes.entries() {
        let lo = log_factor_mode(mode, m, n, t, hbar)?;
        per_mode.push(lo.exp());
        let k = *count as f64;
        log_mags.push(k * lo.re);
        phases.push((k * lo.im).rem_euclid(TAU));
    }
    let log_mag = pairwise_sum(&log_mags);
    let phase = pairwise_sum(&phases).rem_euclid(TAU);
    let total = Complex64::from_polar(log_mag.exp(), phase);
    Ok(DecoherenceRecord {
        m,
        n,
        t,
        per_mode,
        log_mag,
        phase,
        total,
    })
}

/// `ln |F_mn(t)|` from the closed-form decay law:
/// `-(n-m)^2 sum_j f_j^2 (t^4 / (32 m'_j^2 a_j^2) + a_j^2 t^2 / (2 hbar^2))`.
///
/// Note the `a_j^2` in the quartic denominator: it is required by the
/// Gaussian-overlap derivation and by consistency with the long-time rate,
/// and the grid oracle pins it down (see `oracle::typo_pin_down`).
pub fn log_norm_analytic(modes: &ModeEnsemble, m: u32, n: u32, t: f64, hbar: f64) -> f64 {
    let dn = f64::from(n) - f64::from(m);
    if dn == 0.0 {
        return 0.0;
    }
    let t2 = t * t;
    let terms: Vec<f64> = modes
        .entries()
        .iter()
        .map(|(mode, count)| {
            let f2 = mode.force * mode.force;
            let a2 = mode.width * mode.width;
            let quartic = t2 * t2 / (32.0 * mode.mass * mode.mass * a2);
            let quadratic = a2 * t2 / (2.0 * hbar * hbar);
            *count as f64 * f2 * (quartic + quadratic)
        })
        .collect();
    -dn * dn * pairwise_sum(&terms)
}

/// `|F_mn(t)|` from the closed-form decay law.
pub fn norm_analytic(modes: &ModeEnsemble, m: u32, n: u32, t: f64, hbar: f64) -> f64 {
    log_norm_analytic(modes, m, n, t, hbar).exp()
}

/// Long-time decay rate: `|F_mn| ~ exp[-(m-n)^2 Gamma t^4]` with
/// `Gamma = sum_j f_j^2 / (32 m'_j^2 a_j^2)`.
pub fn gamma_longtime(modes: &ModeEnsemble) -> f64 {
    let terms: Vec<f64> = modes
        .entries()
        .iter()
        .map(|(mode, count)| {
            *count as f64 * mode.force * mode.force
                / (32.0 * mode.mass * mode.mass * mode.width * mode.width)
        })
        .collect();
    pairwise_sum(&terms)
}

/// Characteristic decoherence time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceTime {
    /// Long-time-law solution of `|F(t)| = e^{-1}`: `[(m-n)^2 Gamma]^{-1/4}`.
    pub long_time: f64,
    /// Exact crossing of the full decay law (quartic in t^2).
    pub exact_crossing: f64,
}

/// Solve `|F_mn(tau_d)| = e^{-1}` both in the long-time approximation and
/// exactly. Errors when `m == n` or all mode forces vanish.
pub fn decoherence_time(
    modes: &ModeEnsemble,
    m: u32,
    n: u32,
    hbar: f64,
) -> Result<DecoherenceTime> {
    if m == n {
        return Err(Error::NoDecoherence(format!(
            "equal Fock labels m = n = {m}"
        )));
    }
    let gamma = gamma_longtime(modes);
    if gamma <= 0.0 {
        return Err(Error::NoDecoherence(
            "all mode forces vanish (Gamma = 0)".to_string(),
        ));
    }
    let dn2 = {
        let d = f64::from(n) - f64::from(m);
        d * d
    };
    let long_time = (dn2 * gamma).powf(-0.25);

    // Full law: dn^2 (Gamma u^2 + B u) = 1 with u = t^2,
    // B = sum_j count f_j^2 a_j^2 / (2 hbar^2). Stable quadratic root.
    let b_terms: Vec<f64> = modes
        .entries()
        .iter()
        .map(|(mode, count)| {
            *count as f64 * mode.force * mode.force * mode.width * mode.width
                / (2.0 * hbar * hbar)
        })
        .collect();
    let b = pairwise_sum(&b_terms);
    let c = 1.0 / dn2;
    let u = 2.0 * c / (b + (b * b + 4.0 * gamma * c).sqrt());
    Ok(DecoherenceTime {
        long_time,
        exact_crossing: u.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_mode() -> EnvMode {
        EnvMode { mass: 1.0, force: 1.0, width: 1.0 }
    }

    fn fig3_mode() -> EnvMode {
        EnvMode { mass: 1e-6, force: 1e-14, width: 1e-5 }
    }

    #[test]
    fn ensemble_from_model_with_width_overrides() {
        let spec = crate::model::ModelSpec {
            masses: vec![1.0, 2.0, 3.0],
            couplings: vec![0.5, -0.25, 1.0],
            omega0: 1.0,
            alpha: Complex64::new(1.0, 0.0),
            packet_width: 0.7,
            pointer_width: 1.0,
            hbar: 1.0,
        };
        let model = crate::model::build_effective_model(&spec).unwrap();

        let shared = ModeEnsemble::from_model(&model, &[0.7]).unwrap();
        assert_eq!(shared.mode_count(), 2);
        assert!(shared.entries().iter().all(|(m, _)| m.width == 0.7));

        let per_mode = ModeEnsemble::from_model(&model, &[0.5, 1.5]).unwrap();
        let widths: Vec<f64> = per_mode.entries().iter().map(|(m, _)| m.width).collect();
        assert_eq!(widths, vec![0.5, 1.5]);

        assert!(ModeEnsemble::from_model(&model, &[0.5, 1.5, 2.0]).is_err());
    }

    #[test]
    fn factor_mode_trivial_cases() {
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(factor_mode(&unit_mode(), 3, 3, 1.7, 1.0).unwrap(), one);
        assert_eq!(factor_mode(&unit_mode(), 0, 2, 0.0, 1.0).unwrap(), one);
    }

    #[test]
    fn factor_mode_matches_decay_law() {
        // exponent 1/32 + 1/2 at unit parameters
        let f = factor_mode(&unit_mode(), 0, 1, 1.0, 1.0).unwrap();
        assert_relative_eq!(f.norm(), (-0.53125f64).exp(), max_relative = 1e-12);

        let modes = ModeEnsemble::uniform(unit_mode(), 1).unwrap();
        assert_relative_eq!(
            norm_analytic(&modes, 0, 1, 1.0, 1.0),
            f.norm(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn closed_forms_agree_on_random_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let mode = EnvMode {
                mass: rng.gen_range(0.25..4.0),
                force: rng.gen_range(0.25..4.0),
                width: rng.gen_range(0.25..4.0),
            };
            let t = rng.gen_range(0.25..4.0);
            let m = rng.gen_range(0..3u32);
            let n = m + rng.gen_range(1..=3u32);
            let modes = ModeEnsemble::uniform(mode, rng.gen_range(1..5u64)).unwrap();

            let record = factor_total(&modes, m, n, t, 1.0).unwrap();
            let log_direct = log_norm_analytic(&modes, m, n, t, 1.0);
            // compare as a ratio of magnitudes
            let ratio = (record.log_mag - log_direct).exp();
            assert!(
                (ratio - 1.0).abs() < 1e-9,
                "overlap route vs decay law: ratio {ratio}"
            );
        }
    }

    #[test]
    fn total_is_product_and_scales_with_count() {
        let record1 = factor_total(
            &ModeEnsemble::uniform(unit_mode(), 1).unwrap(),
            0,
            1,
            0.8,
            1.0,
        )
        .unwrap();
        let single = factor_mode(&unit_mode(), 0, 1, 0.8, 1.0).unwrap();
        assert!((record1.total - single).norm() < 1e-14);

        let k = 7u64;
        let record_k = factor_total(
            &ModeEnsemble::uniform(unit_mode(), k).unwrap(),
            0,
            1,
            0.8,
            1.0,
        )
        .unwrap();
        assert_relative_eq!(
            record_k.log_mag,
            k as f64 * record1.log_mag,
            max_relative = 1e-12
        );
    }

    #[test]
    fn fig3_crossing_at_tau_d() {
        let modes = ModeEnsemble::uniform(fig3_mode(), 1_000_000).unwrap();
        let tau = decoherence_time(&modes, 0, 1, 1.0).unwrap();
        assert_relative_eq!(tau.long_time, 32.0f64.powf(0.25), max_relative = 1e-10);
        assert_relative_eq!(
            norm_analytic(&modes, 0, 1, tau.exact_crossing, 1.0),
            (-1.0f64).exp(),
            max_relative = 1e-10
        );
        // overlap route as cross-check; per-mode logs of order 1e-6 emerge
        // from order-1 cancellations, so expect ~1e-8 here
        let record = factor_total(&modes, 0, 1, tau.exact_crossing, 1.0).unwrap();
        assert_relative_eq!(record.magnitude(), (-1.0f64).exp(), max_relative = 1e-7);
    }

    #[test]
    fn decay_law_label_scaling() {
        let modes = ModeEnsemble::uniform(unit_mode(), 3).unwrap();
        for t in [0.3, 1.0, 2.5] {
            assert_eq!(norm_analytic(&modes, 4, 4, t, 1.0), 1.0);
            let l1 = log_norm_analytic(&modes, 0, 1, t, 1.0);
            let l2 = log_norm_analytic(&modes, 0, 2, t, 1.0);
            assert_relative_eq!(l2, 4.0 * l1, max_relative = 1e-14);
            // |F| depends on (m, n) only through n - m
            let shifted = log_norm_analytic(&modes, 2, 3, t, 1.0);
            assert_relative_eq!(shifted, l1, max_relative = 1e-14);
        }
    }

    #[test]
    fn overlap_route_symmetries() {
        let modes = ModeEnsemble::uniform(unit_mode(), 2).unwrap();
        let f01 = factor_total(&modes, 0, 1, 1.3, 1.0).unwrap();
        let f10 = factor_total(&modes, 1, 0, 1.3, 1.0).unwrap();
        assert!((f01.total - f10.total.conj()).norm() < 1e-12);

        let f25 = factor_total(&modes, 2, 5, 1.3, 1.0).unwrap();
        let f03 = factor_total(&modes, 0, 3, 1.3, 1.0).unwrap();
        assert_relative_eq!(f25.log_mag, f03.log_mag, max_relative = 1e-12);
    }

    #[test]
    fn magnitude_monotone_in_time() {
        let modes = ModeEnsemble::uniform(unit_mode(), 1).unwrap();
        let mut last = f64::INFINITY;
        for i in 0..40 {
            let t = 0.1 * f64::from(i);
            let lm = log_norm_analytic(&modes, 0, 2, t, 1.0);
            assert!(lm <= last + 1e-15);
            last = lm;
            // even in t
            assert_eq!(lm, log_norm_analytic(&modes, 0, 2, -t, 1.0));
        }
    }

    #[test]
    fn gamma_examples() {
        let single = ModeEnsemble::uniform(unit_mode(), 1).unwrap();
        assert_relative_eq!(gamma_longtime(&single), 1.0 / 32.0, max_relative = 1e-15);

        let fig3 = ModeEnsemble::uniform(fig3_mode(), 1_000_000).unwrap();
        assert_relative_eq!(gamma_longtime(&fig3), 3.125e-2, max_relative = 1e-12);

        let doubled = ModeEnsemble::uniform(
            EnvMode { force: 2.0, ..unit_mode() },
            1,
        )
        .unwrap();
        assert_relative_eq!(
            gamma_longtime(&doubled),
            4.0 / 32.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn asymptotic_rate() {
        let modes = ModeEnsemble::uniform(unit_mode(), 1).unwrap();
        let gamma = gamma_longtime(&modes);
        let tau = decoherence_time(&modes, 0, 2, 1.0).unwrap().long_time;
        let t = 1e3 * tau;
        let ratio = log_norm_analytic(&modes, 0, 2, t, 1.0) / t.powi(4);
        assert_relative_eq!(ratio, -4.0 * gamma, max_relative = 1e-4);
    }

    #[test]
    fn tau_d_examples_and_scaling() {
        let single = ModeEnsemble::uniform(unit_mode(), 1).unwrap();
        let tau = decoherence_time(&single, 0, 1, 1.0).unwrap();
        assert_relative_eq!(tau.long_time, 32.0f64.powf(0.25), max_relative = 1e-12);

        // quadrupling the mode count scales tau_d by 4^{-1/4}
        let quad = ModeEnsemble::uniform(unit_mode(), 4).unwrap();
        let tau4 = decoherence_time(&quad, 0, 1, 1.0).unwrap();
        assert_relative_eq!(
            tau4.long_time / tau.long_time,
            4.0f64.powf(-0.25),
            max_relative = 1e-10
        );
    }

    #[test]
    fn no_decoherence_errors() {
        let modes = ModeEnsemble::uniform(unit_mode(), 1).unwrap();
        assert!(matches!(
            decoherence_time(&modes, 2, 2, 1.0),
            Err(Error::NoDecoherence(_))
        ));
        let forceless = ModeEnsemble::uniform(
            EnvMode { force: 0.0, ..unit_mode() },
            5,
        )
        .unwrap();
        assert!(matches!(
            decoherence_time(&forceless, 0, 1, 1.0),
            Err(Error::NoDecoherence(_))
        ));
    }

    #[test]
    fn huge_ensembles_do_not_underflow_logs() {
        let modes = ModeEnsemble::uniform(fig3_mode(), 10_000_000).unwrap();
        let record = factor_total(&modes, 0, 1, 20.0, 1.0).unwrap();
        assert!(record.log_mag.is_finite());
        assert!(record.log_mag < -1e4);
        assert_eq!(record.total.norm(), 0.0); // underflow is expected here
        assert_eq!(record.magnitude(), 0.0);
    }
}
