//! TOML experiment configuration.
//!
//! A config either describes the mirror in laboratory terms (`[model.lab]`:
//! masses and couplings, from which the effective model is built) or lists
//! the internal modes directly (`[[model.modes]]`: effective mass, per-photon
//! force, packet width, count). The direct form exists because decay-family
//! runs treat the per-mode force as a given rather than deriving it from
//! per-particle couplings (identical particles would make every relative
//! force vanish).
//!
//! Parsing and serialization round-trip exactly; the resolved config is
//! echoed into every output file as comment lines.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::decoherence::{EnvMode, ModeEnsemble};
use crate::error::{Error, Result};
use crate::model::{build_effective_model, ModelSpec};
use crate::pointer::PointerParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Planck constant; all quantities use the hbar = 1 dimensionless
    /// convention unless stated otherwise.
    pub hbar: f64,
    /// Fock pair `[m, n]` whose decoherence factor F_mn is reported.
    pub fock: [u32; 2],
    pub model: ModelConfig,
    pub pointer: PointerConfig,
    pub cavity: CavityConfig,
    pub sweep: SweepConfig,
    pub outputs: OutputConfig,
    pub oracle: OracleConfig,
    pub fig3: Fig3Config,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    /// Laboratory description: the effective model is derived from it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lab: Option<LabModelConfig>,
    /// Direct internal-mode list.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modes: Option<Vec<ModeConfig>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabModelConfig {
    pub masses: Vec<f64>,
    pub couplings: Vec<f64>,
    /// Shared internal packet width; per-mode override below.
    pub packet_width: f64,
    /// Per-mode packet widths (length N-1) overriding `packet_width`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode_widths: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    pub mass: f64,
    pub force: f64,
    pub width: f64,
    #[serde(default = "one_u64")]
    pub count: u64,
}

fn one_u64() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PointerConfig {
    /// Pointer mass M; defaults to the summed lab masses when those exist.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    /// Pointer coupling G; defaults to the summed lab couplings.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupling: Option<f64>,
    /// Width of the Gaussian regularizing the initial position eigenstate.
    pub width: f64,
    /// Initial pointer position X.
    pub position: f64,
}

impl Default for PointerConfig {
    fn default() -> Self {
        // mass/coupling stay unset so the lab form can derive them
        PointerConfig {
            mass: None,
            coupling: None,
            width: 1.0,
            position: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CavityConfig {
    /// Coherent amplitude as `[re, im]`.
    pub alpha: [f64; 2],
    pub omega0: f64,
    /// Tail-mass tolerance for the Fock truncation.
    pub truncation_tol: f64,
}

impl Default for CavityConfig {
    fn default() -> Self {
        CavityConfig {
            alpha: [1.0, 0.0],
            omega0: 1.0,
            truncation_tol: 1e-10,
        }
    }
}

impl CavityConfig {
    pub fn alpha_complex(&self) -> Complex64 {
        Complex64::new(self.alpha[0], self.alpha[1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    /// Time.
    T,
    /// Mode count (identical-modes configs only).
    N,
    /// Internal packet width.
    A,
    /// Pointer packet width.
    SigmaX,
}

impl SweepVariable {
    pub fn label(&self) -> &'static str {
        match self {
            SweepVariable::T => "t",
            SweepVariable::N => "n_modes",
            SweepVariable::A => "a",
            SweepVariable::SigmaX => "sigma_x",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub spacing: Spacing,
    /// Fixed evaluation time for sweeps over anything other than t.
    pub at_time: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            variable: SweepVariable::T,
            start: 0.0,
            stop: 4.0,
            count: 81,
            spacing: Spacing::Linear,
            at_time: 1.0,
        }
    }
}

impl SweepConfig {
    /// The sample points, deterministic for a given config.
    pub fn samples(&self) -> Vec<f64> {
        let n = self.count;
        match self.spacing {
            Spacing::Linear => (0..n)
                .map(|i| self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64)
                .collect(),
            Spacing::Log => {
                let (lo, hi) = (self.start.log10(), self.stop.log10());
                (0..n)
                    .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / (n - 1) as f64))
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svg: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    pub enabled: bool,
    pub tolerance: f64,
    pub samples: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            enabled: true,
            tolerance: 1e-6,
            samples: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Fig3Config {
    /// Mode counts of the decay-curve family.
    pub counts: Vec<u64>,
}

impl Default for Fig3Config {
    fn default() -> Self {
        Fig3Config {
            counts: vec![1_000_000, 2_000_000, 4_000_000, 10_000_000],
        }
    }
}

impl Default for ExperimentConfig {
    /// Decay-family defaults: 10^6 identical modes with effective mass 1e-6,
    /// per-photon force 1e-14 and packet width 1e-5, in hbar = 1 units.
    fn default() -> Self {
        ExperimentConfig {
            hbar: 1.0,
            fock: [1, 0],
            model: ModelConfig {
                lab: None,
                modes: Some(vec![ModeConfig {
                    mass: 1e-6,
                    force: 1e-14,
                    width: 1e-5,
                    count: 1_000_000,
                }]),
            },
            pointer: PointerConfig {
                mass: Some(1.0),
                coupling: Some(1.0),
                ..PointerConfig::default()
            },
            cavity: CavityConfig::default(),
            sweep: SweepConfig::default(),
            outputs: OutputConfig::default(),
            oracle: OracleConfig::default(),
            fig3: Fig3Config::default(),
        }
    }
}

/// Model-level quantities resolved from a config.
#[derive(Debug, Clone)]
pub struct ResolvedModel {
    pub modes: ModeEnsemble,
    pub pointer: PointerParams,
    pub hbar: f64,
    /// Present when the config used the laboratory form.
    pub lab_spec: Option<ModelSpec>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serialization cannot fail")
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.model.lab, &self.model.modes) {
            (None, None) => {
                return Err(Error::Config(
                    "model: one of model.lab or model.modes is required".to_string(),
                ))
            }
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "model: model.lab and model.modes are mutually exclusive".to_string(),
                ))
            }
            _ => {}
        }
        if let Some(lab) = &self.model.lab {
            if lab.masses.len() < 2 {
                return Err(Error::Config(
                    "model.lab.masses: need at least 2 particles".to_string(),
                ));
            }
            if lab.couplings.len() != lab.masses.len() {
                return Err(Error::Config(
                    "model.lab.couplings: length must match masses".to_string(),
                ));
            }
            if let Some(w) = &lab.mode_widths {
                if w.len() != lab.masses.len() - 1 {
                    return Err(Error::Config(format!(
                        "model.lab.mode_widths: need {} entries, got {}",
                        lab.masses.len() - 1,
                        w.len()
                    )));
                }
            }
        }
        if let Some(modes) = &self.model.modes {
            if modes.is_empty() {
                return Err(Error::Config("model.modes: must not be empty".to_string()));
            }
            for (i, m) in modes.iter().enumerate() {
                if m.count < 1 {
                    return Err(Error::Config(format!(
                        "model.modes[{i}].count: must be at least 1"
                    )));
                }
            }
            if self.pointer.mass.is_none() || self.pointer.coupling.is_none() {
                return Err(Error::Config(
                    "pointer.mass and pointer.coupling are required with model.modes"
                        .to_string(),
                ));
            }
        }
        if self.hbar <= 0.0 || !self.hbar.is_finite() {
            return Err(Error::Config(format!("hbar: must be positive, got {}", self.hbar)));
        }
        if !(self.sweep.start.is_finite() && self.sweep.stop.is_finite())
            || self.sweep.stop <= self.sweep.start
        {
            return Err(Error::Config(format!(
                "sweep: range [{}, {}] must be finite and ordered",
                self.sweep.start, self.sweep.stop
            )));
        }
        if self.sweep.count < 2 {
            return Err(Error::Config(format!(
                "sweep.count: must be at least 2, got {}",
                self.sweep.count
            )));
        }
        if self.sweep.spacing == Spacing::Log && self.sweep.start <= 0.0 {
            return Err(Error::Config(
                "sweep: log spacing requires a positive start".to_string(),
            ));
        }
        if !(self.cavity.truncation_tol > 0.0 && self.cavity.truncation_tol < 1.0) {
            return Err(Error::Config(format!(
                "cavity.truncation_tol: must lie in (0, 1), got {}",
                self.cavity.truncation_tol
            )));
        }
        if self.fig3.counts.is_empty() || self.fig3.counts.contains(&0) {
            return Err(Error::Config(
                "fig3.counts: need at least one nonzero count".to_string(),
            ));
        }
        Ok(())
    }

    /// Build the laboratory `ModelSpec` (lab form only).
    pub fn model_spec(&self) -> Result<ModelSpec> {
        let lab = self.model.lab.as_ref().ok_or_else(|| {
            Error::Config("this command requires the model.lab form".to_string())
        })?;
        let spec = ModelSpec {
            masses: lab.masses.clone(),
            couplings: lab.couplings.clone(),
            omega0: self.cavity.omega0,
            alpha: self.cavity.alpha_complex(),
            packet_width: lab.packet_width,
            pointer_width: self.pointer.width,
            hbar: self.hbar,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Resolve mode ensemble and pointer parameters from either model form.
    pub fn resolve(&self) -> Result<ResolvedModel> {
        self.validate()?;
        if let Some(lab) = &self.model.lab {
            let spec = self.model_spec()?;
            let effective = build_effective_model(&spec)?;
            let widths: Vec<f64> = match &lab.mode_widths {
                Some(w) => w.clone(),
                None => vec![lab.packet_width],
            };
            let modes = ModeEnsemble::from_model(&effective, &widths)?;
            let pointer = PointerParams {
                mass: self.pointer.mass.unwrap_or(effective.total_mass),
                coupling: self.pointer.coupling.unwrap_or(effective.g_total),
                width: self.pointer.width,
                position: self.pointer.position,
            };
            pointer.validate()?;
            Ok(ResolvedModel {
                modes,
                pointer,
                hbar: self.hbar,
                lab_spec: Some(spec),
            })
        } else {
            let mut modes = ModeEnsemble::new();
            for m in self.model.modes.as_ref().unwrap() {
                modes
                    .push(EnvMode { mass: m.mass, force: m.force, width: m.width }, m.count)
                    .map_err(|e| Error::Config(format!("model.modes: {e}")))?;
            }
            let pointer = PointerParams {
                mass: self.pointer.mass.unwrap(),
                coupling: self.pointer.coupling.unwrap(),
                width: self.pointer.width,
                position: self.pointer.position,
            };
            pointer.validate()?;
            Ok(ResolvedModel {
                modes,
                pointer,
                hbar: self.hbar,
                lab_spec: None,
            })
        }
    }

    /// Comment lines echoing the full resolved config.
    pub fn comment_lines(&self) -> Vec<String> {
        let mut lines = vec![
            "units: dimensionless, hbar-as-configured convention".to_string(),
            "config:".to_string(),
        ];
        for line in self.to_toml().lines() {
            lines.push(format!("  {line}"));
        }
        lines
    }
}
