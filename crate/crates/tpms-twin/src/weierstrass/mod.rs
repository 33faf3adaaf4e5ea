//! Weierstrass representations of the rPD family and its twin surfaces.
//!
//! The rPD surface `S_t` is evaluated in its sphere form
//! `omega -> Re int (1 - z^2, i(1 + z^2), 2z) R_t(z) dz` with
//! `R_t(z) = [z (z^3 - t^3)(z^3 + t^-3)]^{-1/2}`; the twin surfaces live on
//! the torus `<delta, i tau>` with a Gauss map built from scaled Jacobi
//! theta quotients. [`rpd`] computes the catenoid-unit height and area
//! curves, [`twin`] evaluates the twin Gauss map and its surface integrals,
//! [`period`] solves the period problem, and [`bridge`] converts between
//! the two parameterizations of the family.

mod bridge;
mod period;
mod rpd;
mod twin;

pub use bridge::{rpd_t_from_tau, rpd_tau_from_t};
pub use period::{
    find_tau_star, period_equations_d3, period_residual, solve_period, PeriodSolution,
};
pub use rpd::{
    branch_points, catenoid_area_ratio, catenoid_height, height_max, area_max, area_unit_crossing,
    rpd_integrate, rt_weight, triangle_half_edge, Sheet,
};
pub use twin::{debug_singular_integrand, gauss_map_twin, twin_flat_points, twin_integrate, TwinSpec};

use nalgebra::Vector3;
use num_complex::Complex64;

/// Parameter of an rPD surface in both available forms. The sphere-form
/// parameter `t` is primary; `tau` is filled in on demand through the
/// numeric bridge.
#[derive(Debug, Clone, Copy)]
pub struct RpdParam {
    pub t: f64,
    pub tau: Option<f64>,
}

impl RpdParam {
    pub fn from_t(t: f64) -> crate::Result<RpdParam> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(crate::Error::Domain(format!("rPD parameter t must be positive, got {t}")));
        }
        Ok(RpdParam { t, tau: None })
    }

    /// The conjugate surface of `S_t` is `S_{1/t}`.
    pub fn conjugate(&self) -> RpdParam {
        RpdParam {
            t: 1.0 / self.t,
            tau: self.tau.map(|tau| 1.0 / tau),
        }
    }

    /// Torus-form parameter, computed by the numeric bridge when absent.
    pub fn tau(&mut self) -> crate::Result<f64> {
        if let Some(tau) = self.tau {
            return Ok(tau);
        }
        let tau = rpd_tau_from_t(self.t)?;
        self.tau = Some(tau);
        Ok(tau)
    }
}

/// A surface point together with the domain coordinate it came from.
#[derive(Debug, Clone, Copy)]
pub struct SurfacePoint {
    pub position: Vector3<f64>,
    pub source: Complex64,
}

/// Displacement integral routed through the singularity-free midline
/// `Im z = tau/4`; the endpoint may be a flat point.
pub fn twin_image_via_midline(
    spec: &TwinSpec,
    from: num_complex::Complex64,
    to: num_complex::Complex64,
) -> crate::Result<nalgebra::Vector3<f64>> {
    twin::image_via_midline(spec, from, to)
}
