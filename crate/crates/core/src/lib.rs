//! Closed-form simulator of a photon-number measurement performed by a
//! composite moving mirror.
//!
//! A cavity mode pushes a mirror of N free particles. The mirror's center of
//! mass is the pointer that records the photon number; the N-1 relative
//! coordinates form an internal environment whose conditional evolution
//! suppresses interference between photon-number branches. This crate builds
//! the effective model from laboratory parameters ([`model`]), evolves every
//! Gaussian packet in closed form ([`gaussian`]), computes decoherence
//! factors, rates and times ([`decoherence`]), pointer overlaps and reduced
//! density matrices ([`pointer`]), and the equivalent phase-uncertainty
//! description ([`phase`]). A grid-based split-step propagator ([`oracle`])
//! independently verifies every closed form.
//!
//! The command-line binary exposes config-driven sweeps, the decay-curve
//! family, density/phase tables and the oracle suite; see the README.

pub mod config;
pub mod decoherence;
pub mod error;
pub mod gaussian;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod phase;
pub mod pointer;
pub mod runner;
pub mod svg;
pub mod table;

pub use error::{Error, Result};
pub use num_complex;
