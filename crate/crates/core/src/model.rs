//! Effective model of a cavity photon-number measurement by a composite
//! moving mirror.
//!
//! The mirror is N free particles pushed by the radiation pressure of the
//! cavity mode. Separating the center of mass (the pointer) from the N-1
//! relative coordinates (the internal environment) and diagonalizing the
//! relative-coordinate mass matrix yields decoupled modes: each internal
//! mode is a free particle of effective mass `m'_i` feeling a force
//! `n * f_i` when the cavity holds `n` photons, and the pointer is a free
//! particle of mass `M` feeling `n * G`.
//!
//! The center-of-mass elimination used throughout is
//! `x_N = X - sum_{i<N} (m_i / m_N) xi_i`, which makes the coupling sum
//! transform as `sum_i g_i x_i = G X + sum_j G_j xi_j` with
//! `G = sum_{i=1..N} g_i` and `G_j = g_j - (m_j / m_N) g_N`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, Matrix};

/// Laboratory description of the mirror-cavity system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    /// Particle masses, N >= 2.
    pub masses: Vec<f64>,
    /// Per-particle radiation-pressure couplings (force per photon).
    pub couplings: Vec<f64>,
    /// Cavity mode frequency.
    pub omega0: f64,
    /// Coherent-state amplitude of the initial cavity field.
    pub alpha: Complex64,
    /// Shared width of the internal-mode Gaussian packets.
    pub packet_width: f64,
    /// Width of the Gaussian regularizing the pointer's initial position.
    pub pointer_width: f64,
    /// Planck constant; the default convention is hbar = 1.
    pub hbar: f64,
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        if self.masses.len() < 2 {
            return Err(Error::invalid(format!(
                "need at least 2 particles, got {}",
                self.masses.len()
            )));
        }
        if self.couplings.len() != self.masses.len() {
            return Err(Error::invalid(format!(
                "couplings length {} does not match masses length {}",
                self.couplings.len(),
                self.masses.len()
            )));
        }
        for (i, &m) in self.masses.iter().enumerate() {
            if m <= 0.0 || !m.is_finite() {
                return Err(Error::invalid(format!("mass[{i}] must be positive, got {m}")));
            }
        }
        for &(name, v) in &[
            ("packet_width", self.packet_width),
            ("pointer_width", self.pointer_width),
            ("hbar", self.hbar),
        ] {
            if v <= 0.0 || !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Derived quantities of the pointer + internal-environment decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveModel {
    /// Total mirror mass `M = sum m_i`.
    pub total_mass: f64,
    /// Pointer coupling `G = sum_{i=1..N} g_i`.
    pub g_total: f64,
    /// Relative-coordinate couplings `G_i = g_i - (m_i/m_N) g_N`, length N-1.
    pub relative_couplings: Vec<f64>,
    /// Relative-coordinate mass matrix `tau`, (N-1) x (N-1).
    pub mass_matrix: Matrix,
    /// Orthogonal diagonalizer: rows are eigenvectors, `U tau U^T = diag(m')`.
    pub diagonalizer: Matrix,
    /// Effective masses `m'_i` (eigenvalues of tau, ascending).
    pub effective_masses: Vec<f64>,
    /// Per-photon forces on the normal coordinates, `f_i = sum_j U_ij G_j`.
    pub mode_forces: Vec<f64>,
}

fn check_masses(masses: &[f64]) -> Result<()> {
    if masses.len() < 2 {
        return Err(Error::invalid(format!(
            "need at least 2 masses, got {}",
            masses.len()
        )));
    }
    for (i, &m) in masses.iter().enumerate() {
        if m <= 0.0 || !m.is_finite() {
            return Err(Error::invalid(format!("mass[{i}] must be positive, got {m}")));
        }
    }
    Ok(())
}

/// Mass matrix of the relative coordinates:
/// `tau_ij = m_i delta_ij + m_i m_j / m_N`, symmetric positive definite.
pub fn mass_matrix(masses: &[f64]) -> Result<Matrix> {
    check_masses(masses)?;
    let n = masses.len();
    let m_last = masses[n - 1];
    let mut tau = Matrix::zeros(n - 1, n - 1);
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            let mut v = masses[i] * masses[j] / m_last;
            if i == j {
                v += masses[i];
            }
            tau[(i, j)] = v;
        }
    }
    Ok(tau)
}

/// Effective couplings of the center-of-mass decomposition:
/// `G = sum_{i=1..N} g_i` and `G_i = g_i - (m_i/m_N) g_N` for `i < N`.
pub fn effective_couplings(masses: &[f64], couplings: &[f64]) -> Result<(f64, Vec<f64>)> {
    check_masses(masses)?;
    if couplings.len() != masses.len() {
        return Err(Error::invalid(format!(
            "couplings length {} does not match masses length {}",
            couplings.len(),
            masses.len()
        )));
    }
    let n = masses.len();
    let g_total = couplings.iter().sum();
    let g_last = couplings[n - 1];
    let m_last = masses[n - 1];
    let rel = (0..n - 1)
        .map(|i| couplings[i] - masses[i] / m_last * g_last)
        .collect();
    Ok((g_total, rel))
}

/// Diagonalize a symmetric positive-definite mass matrix.
///
/// Returns `(u, m')` with `u tau u^T = diag(m')`, eigenvalues ascending,
/// rows sign-normalized (largest-magnitude entry positive).
pub fn diagonalize_mass(tau: &Matrix) -> Result<(Matrix, Vec<f64>)> {
    let (u, eigenvalues) = symmetric_eigen(tau)?;
    if eigenvalues.iter().any(|&l| l <= 0.0 || l.is_nan()) {
        return Err(Error::invalid(
            "mass matrix is not positive definite".to_string(),
        ));
    }
    Ok((u, eigenvalues))
}

/// Compose the full decomposition for a model spec.
pub fn build_effective_model(spec: &ModelSpec) -> Result<EffectiveModel> {
    spec.validate()?;
    let tau = mass_matrix(&spec.masses)?;
    let (g_total, relative_couplings) = effective_couplings(&spec.masses, &spec.couplings)?;
    let (u, effective_masses) = diagonalize_mass(&tau)?;
    let mode_forces = u.matvec(&relative_couplings);
    Ok(EffectiveModel {
        total_mass: spec.masses.iter().sum(),
        g_total,
        relative_couplings,
        mass_matrix: tau,
        diagonalizer: u,
        effective_masses,
        mode_forces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spec(masses: Vec<f64>, couplings: Vec<f64>) -> ModelSpec {
        ModelSpec {
            masses,
            couplings,
            omega0: 1.0,
            alpha: Complex64::new(1.0, 0.0),
            packet_width: 1.0,
            pointer_width: 1.0,
            hbar: 1.0,
        }
    }

    #[test]
    fn mass_matrix_examples() {
        let tau = mass_matrix(&[1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(tau[(0, 0)], 2.0, epsilon = 1e-15);

        let tau = mass_matrix(&[1.0, 2.0, 3.0]).unwrap();
        assert_relative_eq!(tau[(0, 0)], 4.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(tau[(0, 1)], 2.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(tau[(1, 0)], 2.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(tau[(1, 1)], 10.0 / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn mass_matrix_rejects_bad_input() {
        assert!(mass_matrix(&[1.0]).is_err());
        assert!(mass_matrix(&[1.0, -2.0]).is_err());
        assert!(mass_matrix(&[1.0, 0.0]).is_err());
    }

    /// Oracle: tau must be the quadratic form of the relative kinetic energy
    /// obtained by eliminating x_N. Evaluate both forms on random velocities.
    #[test]
    fn mass_matrix_matches_kinetic_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut max_residual = 0.0f64;
        for _ in 0..100 {
            let n = rng.gen_range(2..=8usize);
            let masses: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..5.0)).collect();
            let tau = mass_matrix(&masses).unwrap();
            let total: f64 = masses.iter().sum();

            let v_cm: f64 = rng.gen_range(-2.0..2.0);
            let v_rel: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-2.0..2.0)).collect();

            // laboratory velocities from (v_cm, v_rel)
            let mut v_lab: Vec<f64> = (0..n - 1).map(|i| v_rel[i] + v_cm).collect();
            let v_last = v_cm
                - v_rel
                    .iter()
                    .zip(&masses)
                    .map(|(vr, m)| m / masses[n - 1] * vr)
                    .sum::<f64>();
            v_lab.push(v_last);

            let ke_lab: f64 = masses
                .iter()
                .zip(&v_lab)
                .map(|(m, v)| 0.5 * m * v * v)
                .sum();
            let ke_split = 0.5 * total * v_cm * v_cm + 0.5 * tau.quadratic_form(&v_rel);
            max_residual = max_residual.max((ke_lab - ke_split).abs() / ke_lab.abs().max(1.0));
        }
        assert!(max_residual < 1e-12, "max residual {max_residual}");
    }

    #[test]
    fn effective_couplings_examples() {
        let (g, rel) = effective_couplings(&[1.0, 1.0], &[1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(g, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rel[0], 0.0, epsilon = 1e-15);

        let (g, rel) = effective_couplings(&[1.0, 2.0], &[3.0, 4.0]).unwrap();
        assert_abs_diff_eq!(g, 7.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rel[0], 1.0, epsilon = 1e-15);

        let (g, rel) = effective_couplings(&[2.0, 5.0, 1.0], &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(g, 0.0);
        assert!(rel.iter().all(|&x| x == 0.0));
    }

    /// Oracle: substituting the center-of-mass elimination into the coupling
    /// sum must reproduce (G, G_i) as coefficients of (X, xi_i).
    #[test]
    fn effective_couplings_match_substitution() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..100 {
            let n = rng.gen_range(2..=8usize);
            let masses: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..5.0)).collect();
            let couplings: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let (g_total, rel) = effective_couplings(&masses, &couplings).unwrap();

            let x_cm: f64 = rng.gen_range(-2.0..2.0);
            let xi: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let mut x_lab: Vec<f64> = (0..n - 1).map(|i| xi[i] + x_cm).collect();
            x_lab.push(
                x_cm
                    - xi.iter()
                        .zip(&masses)
                        .map(|(x, m)| m / masses[n - 1] * x)
                        .sum::<f64>(),
            );

            let direct: f64 = couplings.iter().zip(&x_lab).map(|(g, x)| g * x).sum();
            let split: f64 =
                g_total * x_cm + rel.iter().zip(&xi).map(|(g, x)| g * x).sum::<f64>();
            assert_abs_diff_eq!(direct, split, epsilon = 1e-12);
        }
    }

    #[test]
    fn diagonalize_examples() {
        let tau = Matrix::from_rows(&[vec![2.0]]);
        let (u, m) = diagonalize_mass(&tau).unwrap();
        assert_eq!(u[(0, 0)], 1.0);
        assert_eq!(m, vec![2.0]);

        // roots of lambda^2 - (14/3) lambda + 4
        let tau = mass_matrix(&[1.0, 2.0, 3.0]).unwrap();
        let (_, m) = diagonalize_mass(&tau).unwrap();
        let disc = 52.0f64.sqrt();
        assert_relative_eq!(m[0], (14.0 - disc) / 6.0, max_relative = 1e-12);
        assert_relative_eq!(m[1], (14.0 + disc) / 6.0, max_relative = 1e-12);

        let (u, m) = diagonalize_mass(&Matrix::identity(3)).unwrap();
        assert_eq!(m, vec![1.0, 1.0, 1.0]);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(u[(i, j)], if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn diagonalize_rejects_non_spd() {
        let bad = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert!(diagonalize_mass(&bad).is_err());
        let negative = Matrix::from_rows(&[vec![-1.0, 0.0], vec![0.0, 2.0]]);
        assert!(diagonalize_mass(&negative).is_err());
    }

    #[test]
    fn build_symmetric_mirror_decouples() {
        let model = build_effective_model(&spec(vec![1.0, 1.0], vec![1.0, 1.0])).unwrap();
        assert_abs_diff_eq!(model.mode_forces[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(model.g_total, 2.0, epsilon = 1e-15);

        // N identical particles with identical couplings: rigid mirror,
        // no relative forcing at all.
        let model =
            build_effective_model(&spec(vec![2.0; 5], vec![0.3; 5])).unwrap();
        for f in &model.mode_forces {
            assert_abs_diff_eq!(*f, 0.0, epsilon = 1e-14);
        }
        assert_relative_eq!(model.g_total, 1.5, max_relative = 1e-14);
    }

    #[test]
    fn build_two_particle_example() {
        let model = build_effective_model(&spec(vec![1.0, 2.0], vec![3.0, 4.0])).unwrap();
        assert_relative_eq!(model.mass_matrix[(0, 0)], 1.5, max_relative = 1e-15);
        assert_eq!(model.diagonalizer[(0, 0)], 1.0);
        assert_relative_eq!(model.effective_masses[0], 1.5, max_relative = 1e-15);
        assert_relative_eq!(model.mode_forces[0], 1.0, max_relative = 1e-14);
        assert_relative_eq!(model.total_mass, 3.0, max_relative = 1e-15);
    }

    #[test]
    fn random_specs_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..1000 {
            let n = rng.gen_range(2..=8usize);
            let masses: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..10.0)).collect();
            let couplings: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let model = build_effective_model(&spec(masses, couplings)).unwrap();

            let u = &model.diagonalizer;
            let id = u.matmul(&u.transpose());
            let k = u.rows();
            for i in 0..k {
                for j in 0..k {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (id[(i, j)] - expect).abs() < 1e-12,
                        "orthogonality violated"
                    );
                }
            }

            let d = u.matmul(&model.mass_matrix).matmul(&u.transpose());
            let max_m = model
                .effective_masses
                .iter()
                .cloned()
                .fold(0.0f64, f64::max);
            assert!(d.max_offdiag_abs() < 1e-10 * max_m);

            // similarity invariance of the trace
            let trace: f64 = (0..k).map(|i| model.mass_matrix[(i, i)]).sum();
            let sum: f64 = model.effective_masses.iter().sum();
            assert!((trace - sum).abs() <= 1e-12 * trace.abs().max(1.0));

            assert!(model.effective_masses.iter().all(|&m| m > 0.0));
        }
    }

    #[test]
    fn coupling_scaling_is_exact() {
        let base = spec(vec![1.0, 2.0, 3.0, 0.5], vec![0.3, -1.0, 2.0, 0.7]);
        let model = build_effective_model(&base).unwrap();
        let s = 3.5;
        let mut scaled_spec = base.clone();
        for g in &mut scaled_spec.couplings {
            *g *= s;
        }
        let scaled = build_effective_model(&scaled_spec).unwrap();

        assert_relative_eq!(scaled.g_total, s * model.g_total, max_relative = 1e-14);
        for (a, b) in scaled
            .relative_couplings
            .iter()
            .zip(&model.relative_couplings)
        {
            assert_relative_eq!(*a, s * *b, max_relative = 1e-14);
        }
        for (a, b) in scaled.mode_forces.iter().zip(&model.mode_forces) {
            assert_relative_eq!(*a, s * *b, max_relative = 1e-14);
        }
        assert_eq!(scaled.mass_matrix, model.mass_matrix);
        assert_eq!(scaled.effective_masses, model.effective_masses);
    }
}
