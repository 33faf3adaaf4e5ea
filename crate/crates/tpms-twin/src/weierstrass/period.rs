//! The period problem for the twin surfaces: choose the flat-point levels
//! `p_k` so that the horizontal images of the flat points land on the
//! vertices of an equiangular triangle (the lateral edges of the mirror
//! prism), making the surface close up.
//!
//! Under the symmetric ansatz `p_k + p_{delta+1-k} = delta/2` the unknowns
//! reduce to `m = floor(delta/2)` values, and the closing conditions reduce
//! to `m` scalar residuals.

use num_complex::Complex64;

use super::twin::{image_via_midline, twin_flat_points, TwinSpec};
use crate::numeric::bisect;
use crate::{Error, Result};

/// Result of a period solve: either the full symmetric p-list or the
/// (normal) verdict that no solution exists at this `tau`.
#[derive(Debug, Clone)]
pub enum PeriodSolution {
    Solved(Vec<f64>),
    NoSolution,
}

/// Fill the symmetric ansatz: given the free lower half `q` (length
/// `floor(delta/2)`), produce the full p-list with the middle value
/// `delta/4` for odd delta and mirrors `delta/2 - q_k` on top.
pub(crate) fn symmetric_p(delta: usize, q: &[f64]) -> Vec<f64> {
    let m = delta / 2;
    assert_eq!(q.len(), m);
    let half = delta as f64 / 2.0;
    let mut p = Vec::with_capacity(delta);
    p.extend_from_slice(q);
    if delta % 2 == 1 {
        p.push(half / 2.0);
    }
    for k in (0..m).rev() {
        p.push(half - q[k]);
    }
    p
}

/// The two closing equations of the one-dimensional symmetric family
/// `p = (p1, 3/4, 3/2 - p1)` at `delta = 3`: with `c_k` the horizontal
/// images `Re int^{flat k} (phi_1, phi_2) dz`,
///
/// * `f1 = 1/2 [c_3 - c_1]_y` (the phi_2 period between the odd flats),
/// * `f2 = cos(pi/6) [c_2 - c_1]_x + sin(pi/6) [c_2 - c_1]_y`.
///
/// Both vanish exactly when the flat images span an equiangular triangle,
/// and under the ansatz the two left-hand sides agree. `p1` ranges over
/// (0, 3/2) \ {3/4}; values above 3/4 mean the mirrored branch (p1 read
/// as p3).
pub fn period_equations_d3(tau: f64, p1: f64) -> Result<(f64, f64)> {
    if !(p1 > 0.0 && p1 < 1.5) || (p1 - 0.75).abs() < 1e-12 {
        return Err(Error::Domain(format!(
            "period_equations_d3: p1 = {p1} outside (0, 3/2) \\ {{3/4}}"
        )));
    }
    let (lo, hi) = (p1.min(1.5 - p1), p1.max(1.5 - p1));
    let spec = TwinSpec::new(tau, 3, vec![lo, 0.75, hi])?;
    let base = Complex64::new(0.0, 0.0);
    let c1 = image_via_midline(&spec, base, Complex64::new(lo, 0.0))?;
    let c2 = image_via_midline(&spec, base, Complex64::new(0.75, 0.5 * tau))?;
    let c3 = image_via_midline(&spec, base, Complex64::new(hi, 0.0))?;
    // vertical-plane closure between the two odd flats, and the pi/6
    // projection of the step onto the even flat; equal under the ansatz
    let f1 = 0.5 * (c3[1] - c1[1]);
    let f2 = (std::f64::consts::PI / 6.0).cos() * (c2[0] - c1[0])
        + (std::f64::consts::PI / 6.0).sin() * (c2[1] - c1[1]);
    Ok((f1, f2))
}

/// Residual vector of the period problem under the symmetric ansatz,
/// one scalar per free level; empty for `delta = 1` (solved identically).
pub fn period_residual(spec: &TwinSpec) -> Result<Vec<f64>> {
    let m = spec.delta / 2;
    if m == 0 {
        return Ok(Vec::new());
    }
    if spec.delta == 3 {
        let (_f1, f2) = period_equations_d3(spec.tau, spec.p[0])?;
        return Ok(vec![f2]);
    }
    chain_residual(spec)
}

/// General residual: inside the slab the horizontal flat-point images
/// step around an equiangular triangle, each step turned by +120 degrees
/// from its predecessor; at the twin boundaries the pattern reflects. The
/// residual takes the step-rotation mismatches (perpendicular components)
/// for the first floor(delta/2) steps; for even delta the last component is
/// the boundary closure against the slab corner.
fn chain_residual(spec: &TwinSpec) -> Result<Vec<f64>> {
    let m = spec.delta / 2;
    let base = Complex64::new(0.0, 0.0);
    let flats = twin_flat_points(spec);
    let mut images = Vec::with_capacity(flats.len());
    for &z in &flats {
        let v = image_via_midline(spec, base, z)?;
        images.push(Complex64::new(v[0], v[1]));
    }
    let steps: Vec<Complex64> = images.windows(2).map(|w| w[1] - w[0]).collect();
    let rot = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let mut res = Vec::with_capacity(m);
    let angle_terms = if spec.delta % 2 == 0 { m - 1 } else { m };
    for j in 0..angle_terms {
        let predicted = rot * steps[j];
        let diff = steps[j + 1] - predicted;
        let perp = if predicted.norm() > 1e-14 {
            (diff * predicted.conj()).im / predicted.norm()
        } else {
            diff.norm()
        };
        res.push(perp);
    }
    if spec.delta % 2 == 0 {
        // boundary closure: the first flat's vertical passes through the
        // image of the top slab corner (validated on the delta = 2 family)
        let top = image_via_midline(spec, base, Complex64::new(spec.delta as f64 / 2.0, 0.0))?;
        res.push(images[0].re - top[0]);
    }
    Ok(res)
}

const P_TOL: f64 = 1e-9;

/// Solve the period problem at `(tau, delta)` on the symmetric ansatz:
/// damped Newton (factor 0.5) with a bisection fallback; `NoSolution` when
/// the root search exhausts its bracket.
pub fn solve_period(tau: f64, delta: usize) -> Result<PeriodSolution> {
    if !(tau > 0.0) || delta == 0 {
        return Err(Error::Domain("solve_period: need tau > 0 and delta >= 1".into()));
    }
    match delta {
        1 => Ok(PeriodSolution::Solved(vec![0.25])),
        2 | 3 => solve_1d(tau, delta),
        _ => solve_multi(tau, delta),
    }
}

fn residual_1d(tau: f64, delta: usize, q: f64) -> Result<f64> {
    let spec = TwinSpec::new(tau, delta, symmetric_p(delta, &[q]))?;
    Ok(period_residual(&spec)?[0])
}

fn solve_1d(tau: f64, delta: usize) -> Result<PeriodSolution> {
    // scan for a sign change of the residual over the admissible interval
    let hi = delta as f64 / 4.0;
    let n = 60;
    let eps = hi * 1e-3;
    let mut prev: Option<(f64, f64)> = None;
    let mut bracket = None;
    for i in 0..=n {
        let q = eps + (hi - 2.0 * eps) * i as f64 / n as f64;
        let r = match residual_1d(tau, delta, q) {
            Ok(r) => r,
            Err(_) => continue,
        };
        if let Some((q0, r0)) = prev {
            if r0.signum() != r.signum() {
                bracket = Some((q0, q));
                break;
            }
        }
        prev = Some((q, r));
    }
    let Some((lo, hi)) = bracket else {
        return Ok(PeriodSolution::NoSolution);
    };
    // bisection is the fallback-grade solver; polish with damped Newton
    let rough = bisect(|q| residual_1d(tau, delta, q).unwrap_or(f64::NAN), lo, hi, 1e-11)?;
    let polished = crate::numeric::newton_damped(
        |q| residual_1d(tau, delta, q).unwrap_or(f64::NAN),
        rough,
        lo - (hi - lo),
        hi + (hi - lo),
        0.5,
        200,
        P_TOL * 1e-2,
    )
    .unwrap_or(rough);
    let q = if residual_1d(tau, delta, polished).map(|r| r.abs()).unwrap_or(f64::MAX)
        <= residual_1d(tau, delta, rough).map(|r| r.abs()).unwrap_or(f64::MAX)
    {
        polished
    } else {
        rough
    };
    if residual_1d(tau, delta, q)?.abs() > P_TOL {
        return Ok(PeriodSolution::NoSolution);
    }
    Ok(PeriodSolution::Solved(symmetric_p(delta, &[q])))
}

fn solve_multi(tau: f64, delta: usize) -> Result<PeriodSolution> {
    let m = delta / 2;
    // rPD-like equispaced start: p_k = (2k - 1)/4
    let mut q: Vec<f64> = (1..=m).map(|k| (2.0 * k as f64 - 1.0) / 4.0).collect();
    let res = |q: &[f64]| -> Result<Vec<f64>> {
        let spec = TwinSpec::new(tau, delta, symmetric_p(delta, q))?;
        period_residual(&spec)
    };
    let mut damping = 0.5;
    for _iter in 0..200 {
        let r = match res(&q) {
            Ok(r) => r,
            Err(_) => return Ok(PeriodSolution::NoSolution),
        };
        let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < P_TOL {
            return Ok(PeriodSolution::Solved(symmetric_p(delta, &q)));
        }
        // finite-difference Jacobian
        let h = 1e-6;
        let mut jac = nalgebra::DMatrix::<f64>::zeros(m, m);
        for j in 0..m {
            let mut qp = q.clone();
            qp[j] += h;
            let mut qm = q.clone();
            qm[j] -= h;
            let (rp, rm) = match (res(&qp), res(&qm)) {
                (Ok(a), Ok(b)) => (a, b),
                _ => return Ok(PeriodSolution::NoSolution),
            };
            for i in 0..m {
                jac[(i, j)] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        let rhs = nalgebra::DVector::from_vec(r);
        let Some(step) = jac.lu().solve(&rhs) else {
            return Ok(PeriodSolution::NoSolution);
        };
        let mut ok = false;
        for j in 0..m {
            let nq = q[j] - damping * step[j];
            if nq > 1e-4 && nq < delta as f64 / 4.0 {
                q[j] = nq;
                ok = true;
            }
        }
        if !ok {
            return Ok(PeriodSolution::NoSolution);
        }
        damping = (damping * 1.2).min(1.0);
    }
    Ok(PeriodSolution::NoSolution)
}

/// The coalescence parameter of the delta = 3 family: bisection on the
/// existence of a period solution with `p_1 < 3/4`.
pub fn find_tau_star() -> Result<f64> {
    let has_root = |tau: f64| -> f64 {
        match solve_period(tau, 3) {
            Ok(PeriodSolution::Solved(_)) => 1.0,
            _ => -1.0,
        }
    };
    bisect(has_root, 2.5, 3.2, 5e-6)
}
