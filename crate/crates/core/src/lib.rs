//! Spin-boson dynamics with engineered harmonic environments.
//!
//! A single Lindblad-damped bosonic mode presents an effective Lorentzian
//! spectral density to a spin coupled to it; sums of damped modes tailor
//! arbitrary structured environments. This crate evaluates and fits those
//! spectral densities, computes the reservoir correlation functions of both
//! the Lindblad-damped and the Ohmic-damped oscillator, evolves the
//! spin ⊗ truncated-mode density matrix under the Lindblad equation,
//! quantifies non-Markovianity of the reduced spin dynamics (RHP and BLP
//! measures), translates model parameters to trapped-ion experimental knobs,
//! and cross-validates against an orthogonal-polynomial chain-mapped
//! environment at desk scale.
//!
//! All internal frequencies are angular (rad/s); configuration files take
//! ordinary frequencies in Hz and are converted on load.

pub mod chainmap;
pub mod cli;
pub mod config;
pub mod correlation;
pub mod error;
pub mod iontrap;
pub mod lindblad;
pub mod linalg;
pub mod nonmarkov;
pub mod optim;
pub mod output;
pub mod quad;
pub mod spectral;
pub mod units;

pub use error::{Error, Result};
