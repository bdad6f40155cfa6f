//! Physical constants and unit helpers.
//!
//! Internal convention: every frequency and rate is angular (rad/s), every
//! time is in seconds, temperature enters as the product hbar*beta in seconds.

use std::f64::consts::TAU;

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Atomic mass unit (kg).
pub const AMU: f64 = 1.660_539_066_60e-27;

/// Ordinary frequency in Hz to angular frequency in rad/s.
pub fn hz_to_angular(f_hz: f64) -> f64 {
    TAU * f_hz
}

/// Angular frequency in rad/s to ordinary frequency in Hz.
pub fn angular_to_hz(omega: f64) -> f64 {
    omega / TAU
}

/// coth(x), stable for small and large arguments.
pub fn coth(x: f64) -> f64 {
    if x.abs() > 20.0 {
        x.signum()
    } else {
        1.0 / x.tanh()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hz_round_trip() {
        assert!((angular_to_hz(hz_to_angular(1.0e5)) - 1.0e5).abs() < 1e-9);
    }

    #[test]
    fn coth_limits() {
        assert!((coth(50.0) - 1.0).abs() < 1e-15);
        assert!((coth(1e-8) - 1e8).abs() / 1e8 < 1e-6);
        assert!((coth(1.0) - 1.0f64.cosh() / 1.0f64.sinh()).abs() < 1e-15);
    }
}
