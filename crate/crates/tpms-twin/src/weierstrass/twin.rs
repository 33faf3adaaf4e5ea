//! The twin Gauss map `G_{tau,delta}` built from Jacobi theta quotients
//! scaled by `1/delta` on the torus `<delta, i tau>`, and path integration
//! of the twin Weierstrass representation
//! `omega -> Re int (1/2 (G^-1 - G), i/2 (G^-1 + G), 1) dz`.
//!
//! The 2/3-powers are evaluated through a tracked complex logarithm: each
//! theta factor's argument is continued along the integration path, so the
//! branch is continuous by construction and anchored to the principal value
//! at the path start.

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::elliptic::jacobi_theta;
use crate::numeric::{integrate, integrate_singular_end, BranchChart};
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Parameters `(tau, delta, p_1..p_delta, rho)` of the twin Gauss map.
///
/// Invariants: `0 < p_1 < ... < p_delta < delta/2`,
/// `p_k + p_{delta+1-k} = delta/2`, and `rho = 1` (the Lopez-Ros factor is
/// fixed so that `|G| = 1` on the imaginary axis).
#[derive(Debug, Clone)]
pub struct TwinSpec {
    pub tau: f64,
    pub delta: usize,
    pub p: Vec<f64>,
    pub rho: f64,
}

impl TwinSpec {
    pub fn new(tau: f64, delta: usize, p: Vec<f64>) -> Result<TwinSpec> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::Domain(format!("twin: tau must be positive, got {tau}")));
        }
        if delta == 0 || p.len() != delta {
            return Err(Error::Domain(format!(
                "twin: need delta >= 1 values p_k, got delta = {delta}, {} values",
                p.len()
            )));
        }
        let half = delta as f64 / 2.0;
        for (i, &pk) in p.iter().enumerate() {
            if !(pk > 0.0 && pk < half) {
                return Err(Error::Domain(format!("twin: p_{} = {pk} outside (0, {half})", i + 1)));
            }
            if i > 0 && p[i] <= p[i - 1] {
                return Err(Error::Domain("twin: p_k must be strictly increasing".into()));
            }
            let mate = p[delta - 1 - i];
            if (pk + mate - half).abs() > 1e-9 {
                return Err(Error::Domain(format!(
                    "twin: symmetric pairing violated: p_{} + p_{} = {}",
                    i + 1,
                    delta - i,
                    pk + mate
                )));
            }
        }
        Ok(TwinSpec { tau, delta, p, rho: 1.0 })
    }

    /// Theta factors of `log G`: `(center, weight)` meaning
    /// `weight * log theta((z - center)/delta; tau/delta)`.
    fn factors(&self) -> Vec<(Complex64, f64)> {
        let shift = I * (0.5 * self.tau);
        let mut f = Vec::with_capacity(2 * self.delta);
        for (i, &pk) in self.p.iter().enumerate() {
            let k = i + 1;
            if k % 2 == 1 {
                f.push((Complex64::new(pk, 0.0), 2.0 / 3.0));
                f.push((Complex64::new(-pk, 0.0), -2.0 / 3.0));
            } else {
                f.push((Complex64::new(pk, 0.0) + shift, -2.0 / 3.0));
                f.push((Complex64::new(-pk, 0.0) + shift, 2.0 / 3.0));
            }
        }
        f
    }

    /// Zeros of the Gauss map: `+p_k` for odd k and `-p_k + i tau/2` for
    /// even k, modulo `<delta, i tau>`.
    pub fn gauss_zeros(&self) -> Vec<Complex64> {
        self.factors().iter().filter(|(_, w)| *w > 0.0).map(|(c, _)| *c).collect()
    }

    /// Poles of the Gauss map, arranged mirror to the zeros.
    pub fn gauss_poles(&self) -> Vec<Complex64> {
        self.factors().iter().filter(|(_, w)| *w < 0.0).map(|(c, _)| *c).collect()
    }

    /// Distance from `z` to the nearest zero/pole on the torus.
    pub fn singular_distance(&self, z: Complex64) -> f64 {
        let mut d = f64::INFINITY;
        for (c, _) in self.factors() {
            let mut w = z - c;
            w.re -= (w.re / self.delta as f64).round() * self.delta as f64;
            w.im -= (w.im / self.tau).round() * self.tau;
            d = d.min(w.norm());
        }
        d
    }
}

/// Flat-point positions of the twin inside the strip `0 < Re z < delta/2`:
/// `p_k` on the real axis for odd k, `p_k + i tau/2` for even k.
pub fn twin_flat_points(spec: &TwinSpec) -> Vec<Complex64> {
    spec.p
        .iter()
        .enumerate()
        .map(|(i, &pk)| {
            if (i + 1) % 2 == 1 {
                Complex64::new(pk, 0.0)
            } else {
                Complex64::new(pk, 0.5 * spec.tau)
            }
        })
        .collect()
}

/// Single-point evaluation of the Gauss map with principal 2/3-powers per
/// theta quotient. Flags evaluation within 1e-10 of a zero or pole.
pub fn gauss_map_twin(z: Complex64, spec: &TwinSpec) -> Result<Complex64> {
    if spec.singular_distance(z) < 1e-10 {
        return Err(Error::Singular(format!("gauss_map_twin: {z} is at a zero/pole of G")));
    }
    let d = spec.delta as f64;
    let tq = spec.tau / d;
    let e = Complex64::new(2.0 / 3.0, 0.0);
    let mut g = Complex64::new(spec.rho, 0.0);
    for chunk in spec.factors().chunks(2) {
        let (num_c, w) = chunk[0];
        let (den_c, _) = chunk[1];
        let q = jacobi_theta((z - num_c) / d, tq)? / jacobi_theta((z - den_c) / d, tq)?;
        let powed = q.powc(e);
        g *= if w > 0.0 { powed } else { powed.inv() };
    }
    Ok(g)
}

/// Tracked evaluation of `log G` along polyline segments.
pub(crate) struct TwinMap {
    spec: TwinSpec,
    factors: Vec<(Complex64, f64)>,
}

impl TwinMap {
    pub fn new(spec: &TwinSpec) -> TwinMap {
        TwinMap {
            factors: spec.factors(),
            spec: spec.clone(),
        }
    }

    fn theta(&self, w: Complex64) -> Result<Complex64> {
        jacobi_theta(w, self.spec.tau / self.spec.delta as f64)
    }

    /// Integrate the representation form along `path`. The final point may
    /// sit on a flat point (zero/pole of G) when `allow_final_flat`; all
    /// other points must stay clear of the singular set.
    pub fn integrate(&self, path: &[Complex64], allow_final_flat: bool) -> Result<Vector3<f64>> {
        if path.len() < 2 {
            return Ok(Vector3::zeros());
        }
        for (i, &z) in path.iter().enumerate() {
            let d = self.spec.singular_distance(z);
            let last = i + 1 == path.len();
            if d < 1e-9 && !(last && allow_final_flat) {
                return Err(Error::Singular(format!(
                    "twin_integrate: path point {z} is at a zero/pole of the Gauss map"
                )));
            }
        }
        // continuous per-factor theta arguments, principal at the start
        let mut args: Vec<f64> = self
            .factors
            .iter()
            .map(|&(c, _)| self.theta((path[0] - c) / self.spec.delta as f64).map(|v| v.arg()))
            .collect::<Result<_>>()?;
        let mut acc = Vector3::zeros();
        for (si, seg) in path.windows(2).enumerate() {
            let (a, b) = (seg[0], seg[1]);
            if (b - a).norm() == 0.0 {
                continue;
            }
            let last_seg = si + 2 == path.len();
            let singular_end = last_seg && allow_final_flat && self.spec.singular_distance(b) < 1e-9;
            acc += self.integrate_segment(a, b, &mut args, singular_end)?;
        }
        Ok(acc)
    }

    /// One segment from `a` to `b`, parameterized by the distance fraction
    /// `d` from `b` (so `d = 1` at `a`). `args` holds the continuous theta
    /// arguments at `a` and is updated to the values at the segment end.
    fn integrate_segment(
        &self,
        a: Complex64,
        b: Complex64,
        args: &mut [f64],
        singular_end: bool,
    ) -> Result<Vector3<f64>> {
        let delta = self.spec.delta as f64;
        let dz = b - a;

        // which factor (if any) vanishes at b
        let mut vanishing: Option<usize> = None;
        if singular_end {
            for (fi, &(c, _)) in self.factors.iter().enumerate() {
                let mut w = b - c;
                w.re -= (w.re / delta).round() * delta;
                w.im -= (w.im / self.spec.tau).round() * self.spec.tau;
                if w.norm() < 1e-9 {
                    vanishing = Some(fi);
                    break;
                }
            }
        }

        // Per-factor branch charts in the s = 1 - d parameterization (s = 0
        // at `a`). The vanishing factor is charted as theta(w)/w, which is
        // nonzero through the flat point.
        let d_floor = if singular_end { 1e-7 } else { 0.0 };
        let mut charts: Vec<(BranchChart, Complex64)> = Vec::with_capacity(self.factors.len());
        for (fi, &(c, _)) in self.factors.iter().enumerate() {
            let base = b - c;
            let is_vanishing = Some(fi) == vanishing;
            let mut g = |s: f64| -> Complex64 {
                let d = (1.0 - s).max(d_floor);
                let w = (base + (a - b) * d) / delta;
                let th = self.theta(w).unwrap_or(Complex64::new(f64::NAN, 0.0));
                if is_vanishing {
                    th / w
                } else {
                    th
                }
            };
            let base_arg = if is_vanishing {
                args[fi] - ((a - c) / delta).arg()
            } else {
                args[fi]
            };
            charts.push((BranchChart::build(&mut g, base_arg)?, base));
        }

        // tracked log G at distance fraction d from b
        let log_gauss = |d: f64| -> Complex64 {
            let mut log_g = Complex64::new(self.spec.rho.ln(), 0.0);
            for (fi, &(_, weight)) in self.factors.iter().enumerate() {
                let (chart, base) = &charts[fi];
                let w = (base + (a - b) * d) / delta;
                let (ln_abs, arg) = if Some(fi) == vanishing {
                    let v = self.theta(w).unwrap_or(Complex64::new(f64::NAN, 0.0)) / w;
                    (v.norm().ln() + w.norm().ln(), chart.arg_at(1.0 - d, v) + w.arg())
                } else {
                    let v = self.theta(w).unwrap_or(Complex64::new(f64::NAN, 0.0));
                    (v.norm().ln(), chart.arg_at(1.0 - d, v))
                };
                log_g += weight * Complex64::new(ln_abs, arg);
            }
            log_g
        };

        let eval = |d: f64| -> [Complex64; 3] {
            let log_g = log_gauss(d);
            let g = log_g.exp();
            let gi = (-log_g).exp();
            [0.5 * (gi - g) * dz, 0.5 * I * (gi + g) * dz, dz]
        };

        let val: [Complex64; 3] = if singular_end {
            integrate_singular_end(eval, 3, 1e-10)?
        } else {
            integrate(|s| eval(1.0 - s), 0.0, 1.0, 1e-10)?
        };

        // update args to the segment end (just shy of b when singular)
        for (fi, (chart, base)) in charts.iter().enumerate() {
            let d_query = d_floor;
            let w = (base + (a - b) * d_query) / delta;
            if Some(fi) == vanishing {
                let v = self.theta(w)? / w;
                args[fi] = chart.arg_at(1.0 - d_query, v) + w.arg();
            } else {
                let v = self.theta(w)?;
                args[fi] = chart.arg_at(1.0 - d_query, v);
            }
        }
        Ok(Vector3::new(val[0].re, val[1].re, val[2].re))
    }
}


/// Debug probe: sample the substituted integrand of the final singular
/// segment (temporary instrumentation).
pub fn debug_singular_integrand(
    spec: &TwinSpec,
    a: num_complex::Complex64,
    b: num_complex::Complex64,
    us: &[f64],
) -> Vec<[Complex64; 3]> {
    let tm = TwinMap::new(spec);
    let mut args: Vec<f64> = tm
        .factors
        .iter()
        .map(|&(c, _)| tm.theta((a - c) / spec.delta as f64).unwrap().arg())
        .collect();
    tm.debug_segment(a, b, &mut args, us)
}

impl TwinMap {
    pub(crate) fn debug_segment(
        &self,
        a: Complex64,
        b: Complex64,
        args: &mut [f64],
        us: &[f64],
    ) -> Vec<[Complex64; 3]> {
        let delta = self.spec.delta as f64;
        let dz = b - a;
        let mut vanishing: Option<usize> = None;
        for (fi, &(c, _)) in self.factors.iter().enumerate() {
            let mut w = b - c;
            w.re -= (w.re / delta).round() * delta;
            w.im -= (w.im / self.spec.tau).round() * self.spec.tau;
            if w.norm() < 1e-9 {
                vanishing = Some(fi);
                break;
            }
        }
        let d_floor = 1e-7;
        let mut charts: Vec<(BranchChart, Complex64)> = Vec::new();
        for (fi, &(c, _)) in self.factors.iter().enumerate() {
            let base = b - c;
            let is_vanishing = Some(fi) == vanishing;
            let mut g = |s: f64| -> Complex64 {
                let d = (1.0 - s).max(d_floor);
                let w = (base + (a - b) * d) / delta;
                let th = self.theta(w).unwrap_or(Complex64::new(f64::NAN, 0.0));
                if is_vanishing { th / w } else { th }
            };
            let base_arg = if is_vanishing {
                args[fi] - ((a - c) / delta).arg()
            } else {
                args[fi]
            };
            charts.push((BranchChart::build(&mut g, base_arg).unwrap(), base));
        }
        let log_gauss = |d: f64| -> Complex64 {
            let mut log_g = Complex64::new(self.spec.rho.ln(), 0.0);
            for (fi, &(_, weight)) in self.factors.iter().enumerate() {
                let (chart, base) = &charts[fi];
                let w = (base + (a - b) * d) / delta;
                let (ln_abs, arg) = if Some(fi) == vanishing {
                    let v = self.theta(w).unwrap_or(Complex64::new(f64::NAN, 0.0)) / w;
                    (v.norm().ln() + w.norm().ln(), chart.arg_at(1.0 - d, v) + w.arg())
                } else {
                    let v = self.theta(w).unwrap_or(Complex64::new(f64::NAN, 0.0));
                    (v.norm().ln(), chart.arg_at(1.0 - d, v))
                };
                log_g += weight * Complex64::new(ln_abs, arg);
            }
            log_g
        };
        us.iter()
            .map(|&u| {
                let d = u * u * u;
                let log_g = log_gauss(d);
                let g = log_g.exp();
                let gi = (-log_g).exp();
                let j = 3.0 * u * u;
                [
                    0.5 * (gi - g) * dz * j,
                    0.5 * Complex64::new(0.0, 1.0) * (gi + g) * dz * j,
                    dz * j,
                ]
            })
            .collect()
    }
}

/// Surface displacement of the twin representation along a polyline; the
/// path must avoid the zeros and poles of the Gauss map.
pub fn twin_integrate(path: &[Complex64], spec: &TwinSpec) -> Result<Vector3<f64>> {
    TwinMap::new(spec).integrate(path, false)
}

/// Displacement `Re int (phi_1, phi_2, 1) dz` from `from` to a flat point or
/// corner `to`, routed through the mid-line `Im z = tau/4` which carries no
/// singularities for any valid spec.
pub(crate) fn image_via_midline(
    spec: &TwinSpec,
    from: Complex64,
    to: Complex64,
) -> Result<Vector3<f64>> {
    let mid = 0.25 * spec.tau;
    let path = [from, Complex64::new(from.re, mid), Complex64::new(to.re, mid), to];
    TwinMap::new(spec).integrate(&path, true)
}
