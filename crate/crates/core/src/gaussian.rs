//! Exact algebra of one-dimensional complex Gaussian wave packets under
//! free-plus-linear-force Hamiltonians.
//!
//! A packet is stored in exponent form `psi(x) = exp(-quad x^2 + lin x + phase)`,
//! which is closed under every factor of the propagator
//! `exp(-i (p^2/2m - F x) t / hbar)`: the scalar phase, the momentum boost and
//! the position shift are affine updates of `(quad, lin, phase)`, and free
//! propagation is a Moebius-style update derived by Fourier transform. All
//! moments, norms and overlaps have closed forms, so nothing in this module is
//! iterative.

use num_complex::Complex64;

use crate::error::{Error, Result};

const TWO_PI: f64 = std::f64::consts::TAU;

/// Complex Gaussian wavefunction `exp(-quad x^2 + lin x + phase)`.
///
/// `Re(quad) > 0` is required for normalizability. The constant term `phase`
/// carries both the normalization (real part) and the global phase
/// (imaginary part); it is tracked exactly because downstream overlap phases
/// are meaningful.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacket {
    pub quad: Complex64,
    pub lin: Complex64,
    pub phase: Complex64,
}

/// First and second moments of a packet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketMoments {
    pub mean_pos: f64,
    pub mean_mom: f64,
    pub std_pos: f64,
    pub std_mom: f64,
    /// Symmetrized central cross moment `<xp + px>/2 - <x><p>`.
    pub cross: f64,
}

impl GaussianPacket {
    /// Build from raw exponent coefficients; rejects non-normalizable input.
    pub fn new(quad: Complex64, lin: Complex64, phase: Complex64) -> Result<Self> {
        if quad.re <= 0.0 || !quad.is_finite() || !lin.is_finite() || !phase.is_finite() {
            return Err(Error::invalid(format!(
                "packet requires finite parameters with Re(quad) > 0, got quad = {quad}"
            )));
        }
        Ok(GaussianPacket { quad, lin, phase })
    }

    /// The normalized zero-mean packet `(2 pi a^2)^(-1/4) exp(-x^2 / 4a^2)`.
    pub fn standard(width: f64) -> Result<Self> {
        if width <= 0.0 || !width.is_finite() {
            return Err(Error::invalid(format!("width must be positive, got {width}")));
        }
        Ok(GaussianPacket {
            quad: Complex64::new(1.0 / (4.0 * width * width), 0.0),
            lin: Complex64::new(0.0, 0.0),
            phase: Complex64::new(-0.25 * (TWO_PI * width * width).ln(), 0.0),
        })
    }

    /// Normalized packet of width `a` centered at `x0` with mean momentum `p0`:
    /// `(2 pi a^2)^(-1/4) exp(-(x-x0)^2/4a^2 + i p0 x / hbar)`.
    pub fn displaced(width: f64, x0: f64, p0: f64, hbar: f64) -> Result<Self> {
        let mut pkt = Self::standard(width)?;
        if hbar <= 0.0 || !hbar.is_finite() {
            return Err(Error::invalid(format!("hbar must be positive, got {hbar}")));
        }
        let a2 = width * width;
        pkt.lin = Complex64::new(x0 / (2.0 * a2), p0 / hbar);
        pkt.phase += Complex64::new(-x0 * x0 / (4.0 * a2), 0.0);
        Ok(pkt)
    }

    /// Evaluate the wavefunction at `x`.
    pub fn eval(&self, x: f64) -> Complex64 {
        (-self.quad * x * x + self.lin * x + self.phase).exp()
    }

    /// `ln ∫ |psi|^2 dx`, exact closed form.
    pub fn log_norm_sq(&self) -> f64 {
        let qr = self.quad.re;
        let lr = self.lin.re;
        0.5 * (std::f64::consts::PI / (2.0 * qr)).ln() + lr * lr / (2.0 * qr)
            + 2.0 * self.phase.re
    }

    /// `∫ |psi|^2 dx`.
    pub fn norm_sq(&self) -> f64 {
        self.log_norm_sq().exp()
    }

    /// Rescale `Re(phase)` so that `norm_sq() == 1`.
    pub fn normalized(&self) -> Self {
        let mut out = *self;
        out.phase.re -= 0.5 * self.log_norm_sq();
        out
    }

    /// Position/momentum moments; `hbar` sets the momentum scale.
    pub fn moments(&self, hbar: f64) -> PacketMoments {
        let q = self.quad;
        let l = self.lin;
        let qr = q.re;
        let mean_pos = l.re / (2.0 * qr);
        let var_pos = 1.0 / (4.0 * qr);
        let mean_mom = hbar * (l.im - 2.0 * q.im * mean_pos);

        // <p^2> = -hbar^2 [ 4q^2 <x^2> - 4 q l <x> + l^2 - 2q ], real part.
        let x2 = Complex64::new(var_pos + mean_pos * mean_pos, 0.0);
        let p2 = -hbar * hbar
            * (4.0 * q * q * x2 - 4.0 * q * l * mean_pos + l * l - 2.0 * q);
        let var_mom = p2.re - mean_mom * mean_mom;

        // <xp> = -i hbar ( -2q <x^2> + l <x> ); cross = Re<xp> - <x><p>.
        let xp = Complex64::new(0.0, -hbar) * (-2.0 * q * x2 + l * mean_pos);
        let cross = xp.re - mean_pos * mean_mom;

        PacketMoments {
            mean_pos,
            mean_mom,
            std_pos: var_pos.sqrt(),
            std_mom: var_mom.max(0.0).sqrt(),
            cross,
        }
    }

    /// Exact evolution under `H = p^2 / 2m - force * x` for time `t`
    /// (negative `t` runs the inverse propagator; `t = 0` is the identity,
    /// bit for bit).
    ///
    /// The propagator factors into a scalar phase, a momentum boost, a
    /// position shift and free propagation; each acts in closed form on the
    /// exponent coefficients. Norm is preserved exactly and the means follow
    /// the classical trajectory.
    pub fn evolve(&self, mass: f64, force: f64, t: f64, hbar: f64) -> Result<Self> {
        if mass <= 0.0 || !mass.is_finite() {
            return Err(Error::invalid(format!("mass must be positive, got {mass}")));
        }
        if hbar <= 0.0 || !hbar.is_finite() {
            return Err(Error::invalid(format!("hbar must be positive, got {hbar}")));
        }
        if !t.is_finite() {
            return Err(Error::invalid(format!("time must be finite, got {t}")));
        }
        if t == 0.0 {
            return Ok(*self);
        }

        let mut q = self.quad;
        let mut l = self.lin;
        let mut c = self.phase;

        // scalar phase exp(-i F^2 t^3 / (6 m hbar))
        c += Complex64::new(0.0, -force * force * t * t * t / (6.0 * mass * hbar));
        // momentum boost exp(i F t x / hbar)
        l += Complex64::new(0.0, force * t / hbar);
        // position shift psi(x) -> psi(x + s), s = F t^2 / 2m
        let s = force * t * t / (2.0 * mass);
        c += l * s - q * s * s;
        l -= 2.0 * q * s;
        // free propagation: with kappa = hbar t / 2m and d = 1 + 4 i kappa q,
        // q -> q/d, l -> l/d, phase += i kappa l^2 / d - ln(d)/2.
        let kappa = hbar * t / (2.0 * mass);
        let d = Complex64::new(1.0, 0.0) + Complex64::new(0.0, 4.0 * kappa) * q;
        c += Complex64::new(0.0, kappa) * l * l / d - 0.5 * d.ln();
        q /= d;
        l /= d;

        GaussianPacket::new(q, l, c)
    }
}

/// `ln <p1|p2>` in closed form (principal branch):
/// `<p1|p2> = sqrt(pi / s) exp(t)` with `s = conj(q1) + q2` and
/// `t = (conj(l1) + l2)^2 / 4s + conj(c1) + c2`.
///
/// Working in log space keeps products over millions of factors away from
/// underflow; the real part is the log magnitude.
pub fn log_overlap(p1: &GaussianPacket, p2: &GaussianPacket) -> Complex64 {
    let s = p1.quad.conj() + p2.quad;
    let l = p1.lin.conj() + p2.lin;
    let c = p1.phase.conj() + p2.phase;
    0.5 * (Complex64::new(std::f64::consts::PI, 0.0).ln() - s.ln()) + l * l / (4.0 * s) + c
}

/// Inner product `∫ conj(psi1) psi2 dx`.
pub fn overlap(p1: &GaussianPacket, p2: &GaussianPacket) -> Complex64 {
    log_overlap(p1, p2).exp()
}
