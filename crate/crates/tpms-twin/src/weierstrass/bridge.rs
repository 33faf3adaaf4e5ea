//! Numeric bridge between the sphere-form parameter `t` and the torus-form
//! parameter `tau` of the rPD family.
//!
//! The edge-midpoint flat points of `S_tau` sit at the half-periods `i tau/2`
//! and `1/2` of the torus, where the Gauss map takes the value of modulus `t`
//! (the sphere-form branch points of that class lie on the circle `|g| = t`).
//! With the Lopez-Ros factor 1 this gives the closed-form bridge
//! `t(tau) = |theta(i tau/2; tau) / theta(1/2; tau)|^(2/3)`, anchored by the
//! known torus parameter 1.563401... of the t = sqrt(2) surface.

use num_complex::Complex64;

use crate::elliptic::jacobi_theta;
use crate::numeric::bisect;
use crate::{Error, Result};

/// Sphere-form parameter of the rPD surface with torus parameter `tau`.
pub fn rpd_t_from_tau(tau: f64) -> Result<f64> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::Domain(format!("bridge: tau must be positive, got {tau}")));
    }
    let num = jacobi_theta(Complex64::new(0.0, 0.5 * tau), tau)?;
    let den = jacobi_theta(Complex64::new(0.5, 0.0), tau)?;
    Ok((num.norm() / den.norm()).powf(2.0 / 3.0))
}

/// Torus-form parameter of the rPD surface `S_t`, found by monotone
/// bisection of [`rpd_t_from_tau`].
pub fn rpd_tau_from_t(t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("bridge: t must be positive, got {t}")));
    }
    let (mut lo, mut hi) = (0.05, 20.0);
    let f = |tau: f64| rpd_t_from_tau(tau).map(|v| v - t).unwrap_or(f64::NAN);
    // expand the bracket if needed (t(tau) is increasing)
    while f(lo) > 0.0 && lo > 1e-3 {
        lo *= 0.5;
    }
    while f(hi) < 0.0 && hi < 1e3 {
        hi *= 2.0;
    }
    bisect(f, lo, hi, 1e-12)
}
