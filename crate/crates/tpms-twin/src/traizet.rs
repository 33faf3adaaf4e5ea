//! Traizet configurations: layered catenoid-neck positions with periods,
//! the force acting on each neck, balance and non-degeneracy checks, and
//! the preset configurations used throughout.
//!
//! A configuration describes a TPMS degenerating to parallel horizontal
//! planes `H_0, ..., H_{N-1}` joined by small catenoid necks: `m_k` necks
//! between `H_k` and `H_{k+1}` at limit positions `p_{k,i}` in the 2-D
//! lattice spanned by `t1, t2`, with `t3` the horizontal part of the third
//! period. Layer indices are cyclic; crossing the seam between layer `N-1`
//! and layer `0` shifts positions by `t3`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::elliptic::{eta_half_periods, weierstrass_zeta, ComplexLattice};
use crate::{Error, Result};

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

mod complex_serde {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [v.re, v.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

mod complex_vec_serde {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Vec<Complex64>], s: S) -> Result<S::Ok, S::Error> {
        let raw: Vec<Vec<[f64; 2]>> = v
            .iter()
            .map(|layer| layer.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        raw.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Complex64>>, D::Error> {
        let raw = <Vec<Vec<[f64; 2]>>>::deserialize(d)?;
        Ok(raw
            .into_iter()
            .map(|layer| layer.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
            .collect())
    }
}

/// Layered neck positions and periods of a Traizet configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraizetConfig {
    /// Neck positions; `positions[k][i]` is the i-th neck between layers
    /// k and k+1. The layer count N is `positions.len()`.
    #[serde(with = "complex_vec_serde")]
    pub positions: Vec<Vec<Complex64>>,
    #[serde(with = "complex_serde")]
    pub t1: Complex64,
    #[serde(with = "complex_serde")]
    pub t2: Complex64,
    /// Horizontal part of the third period, applied when layer indices wrap.
    #[serde(with = "complex_serde")]
    pub t3: Complex64,
}

/// Per-neck forces with the balance verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForceReport {
    #[serde(with = "complex_vec_serde")]
    pub forces: Vec<Vec<Complex64>>,
    pub max_norm: f64,
    pub balanced: bool,
    pub tolerance: f64,
}

impl TraizetConfig {
    pub fn n_layers(&self) -> usize {
        self.positions.len()
    }

    pub fn neck_counts(&self) -> Vec<usize> {
        self.positions.iter().map(|l| l.len()).collect()
    }

    fn validate(&self) -> Result<ComplexLattice> {
        if self.positions.is_empty() || self.positions.iter().any(|l| l.is_empty()) {
            return Err(Error::Domain("config: every layer needs at least one neck".into()));
        }
        ComplexLattice::new(self.t1, self.t2)
    }

    /// Positions of layer `k` with cyclic index arithmetic: wrapping past the
    /// seam shifts by `t3`.
    fn layer_positions(&self, k: i64) -> Vec<Complex64> {
        let n = self.positions.len() as i64;
        let kk = k.rem_euclid(n) as usize;
        let wraps = (k - kk as i64).div_euclid(n); // full periods up
        let shift = self.t3 * wraps as f64;
        self.positions[kk].iter().map(|p| p + shift).collect()
    }

    /// Center of mass of layer `k` expressed in the (t1, t2) basis.
    fn layer_com_coeffs(&self, k: i64) -> (f64, f64) {
        let ps = self.layer_positions(k);
        let com = ps.iter().sum::<Complex64>() / ps.len() as f64;
        // solve com = x t1 + y t2 over the reals
        let det = self.t1.re * self.t2.im - self.t1.im * self.t2.re;
        let x = (com.re * self.t2.im - com.im * self.t2.re) / det;
        let y = (self.t1.re * com.im - self.t1.im * com.re) / det;
        (x, y)
    }
}

/// Force on the i-th neck between layers k and k+1: the intra-layer and
/// adjacent-layer zeta interactions plus the second-difference
/// center-of-mass term with the half-period sums eta_1, eta_2.
pub fn force(cfg: &TraizetConfig, k: usize, i: usize) -> Result<Complex64> {
    let lat = cfg.validate()?;
    let (eta1, eta2) = eta_half_periods(&lat)?;
    force_inner(cfg, &lat, eta1, eta2, k as i64, i)
}

fn force_inner(
    cfg: &TraizetConfig,
    lat: &ComplexLattice,
    eta1: Complex64,
    eta2: Complex64,
    k: i64,
    i: usize,
) -> Result<Complex64> {
    let here = cfg.layer_positions(k);
    let m_k = here.len() as f64;
    let p = here[i];

    let mut f = c64(0.0, 0.0);
    for (j, q) in here.iter().enumerate() {
        if j == i {
            continue;
        }
        f += 2.0 / (m_k * m_k) * zeta_sep(p - q, lat)?;
    }
    for dk in [-1i64, 1] {
        // for N = 1 both neighbors are this layer's own periodic images and
        // still count separately
        let other = cfg.layer_positions(k + dk);
        let m_o = other.len() as f64;
        for q in &other {
            f -= 1.0 / (m_k * m_o) * zeta_sep(p - q, lat)?;
        }
    }
    let (xk, yk) = cfg.layer_com_coeffs(k);
    let (xm, ym) = cfg.layer_com_coeffs(k - 1);
    let (xp, yp) = cfg.layer_com_coeffs(k + 1);
    f += ((2.0 * xk - xm - xp) * eta1 + (2.0 * yk - ym - yp) * eta2) / m_k;
    Ok(f)
}

fn zeta_sep(d: Complex64, lat: &ComplexLattice) -> Result<Complex64> {
    weierstrass_zeta(d, lat).map_err(|e| match e {
        Error::Singular(_) => Error::Singular("coincident necks".into()),
        other => other,
    })
}

/// Default balance tolerance.
pub const BALANCE_TOL: f64 = 1e-10;

/// Evaluate every force; balanced iff `max |F| < tol`.
pub fn all_forces(cfg: &TraizetConfig, tol: f64) -> Result<ForceReport> {
    let lat = cfg.validate()?;
    let (eta1, eta2) = eta_half_periods(&lat)?;
    let mut forces = Vec::with_capacity(cfg.positions.len());
    let mut max_norm: f64 = 0.0;
    for k in 0..cfg.positions.len() {
        let mut layer = Vec::with_capacity(cfg.positions[k].len());
        for i in 0..cfg.positions[k].len() {
            let f = force_inner(cfg, &lat, eta1, eta2, k as i64, i)?;
            max_norm = max_norm.max(f.norm());
            layer.push(f);
        }
        forces.push(layer);
    }
    Ok(ForceReport {
        forces,
        max_norm,
        balanced: max_norm < tol,
        tolerance: tol,
    })
}

/// Real co-rank of the finite-difference Jacobian of the positions-to-forces
/// map, using singular values; sigma < 1e-6 * sigma_max counts as zero.
/// Errors when called on an unbalanced configuration.
pub fn nondegeneracy_corank(cfg: &TraizetConfig) -> Result<usize> {
    let report = all_forces(cfg, BALANCE_TOL)?;
    if !report.balanced {
        return Err(Error::Contract(format!(
            "nondegeneracy_corank requires a balanced configuration (max |F| = {:.3e})",
            report.max_norm
        )));
    }
    let dim: usize = 2 * cfg.positions.iter().map(|l| l.len()).sum::<usize>();
    let step = 1e-6 * cfg.t1.norm().max(cfg.t2.norm());
    let mut jac = nalgebra::DMatrix::<f64>::zeros(dim, dim);
    let mut col = 0;
    for k in 0..cfg.positions.len() {
        for i in 0..cfg.positions[k].len() {
            for reim in 0..2 {
                let delta = if reim == 0 { c64(step, 0.0) } else { c64(0.0, step) };
                let mut plus = cfg.clone();
                plus.positions[k][i] += delta;
                let mut minus = cfg.clone();
                minus.positions[k][i] -= delta;
                let fp = all_forces(&plus, BALANCE_TOL)?;
                let fm = all_forces(&minus, BALANCE_TOL)?;
                let mut row = 0;
                for kk in 0..cfg.positions.len() {
                    for ii in 0..cfg.positions[kk].len() {
                        let d = (fp.forces[kk][ii] - fm.forces[kk][ii]) / (2.0 * step);
                        jac[(row, col)] = d.re;
                        jac[(row + 1, col)] = d.im;
                        row += 2;
                    }
                }
                col += 1;
            }
        }
    }
    let svd = jac.svd(false, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    Ok(svd.singular_values.iter().filter(|&&s| s < 1e-6 * smax).count())
}

/// Position unit `u = (1 + a)/3` of the three neck sites `0, u, 2u` used by
/// the stacking-sequence configurations, with `a = exp(i pi / 3)`.
fn hex_unit() -> (Complex64, Complex64) {
    let a = Complex64::from_polar(1.0, PI / 3.0);
    ((1.0 + a) / 3.0, a)
}

/// Configuration of a stacking word over the letters {0, 1, 2}: N layers with
/// one neck each at positions `letter * (1+a)/3` on the lattice `<1, a>`.
///
/// `t3` is the net drift of the letter pattern over one period (so the
/// pattern closes up), plus `extra_turns` additional windings of `1 + a`.
pub fn sequence_config(word: &str, extra_turns: i64) -> Result<TraizetConfig> {
    let letters: Vec<u32> = word
        .chars()
        .map(|ch| {
            ch.to_digit(10)
                .filter(|&d| d <= 2)
                .ok_or_else(|| Error::Domain(format!("sequence word must use letters 0,1,2; got {ch:?}")))
        })
        .collect::<Result<_>>()?;
    if letters.is_empty() {
        return Err(Error::Domain("sequence word must be nonempty".into()));
    }
    for i in 0..letters.len() {
        let next = letters[(i + 1) % letters.len()];
        if letters[i] == next {
            return Err(Error::Domain(format!(
                "adjacent equal letters at position {i}: necks would coincide"
            )));
        }
    }
    let (u, a) = hex_unit();
    // net drift of the helix over one period, in units of u; each step
    // advances by +1 or -1 site and the total is a multiple of 3
    let mut drift = 0i64;
    for i in 0..letters.len() {
        let x = letters[i] as i64;
        let y = letters[(i + 1) % letters.len()] as i64;
        drift += if (y - x).rem_euclid(3) == 1 { 1 } else { -1 };
    }
    debug_assert_eq!(drift.rem_euclid(3), 0);
    let t3 = (drift / 3 + extra_turns) as f64 * (1.0 + a);
    Ok(TraizetConfig {
        positions: letters.iter().map(|&l| vec![l as f64 * u]).collect(),
        t1: c64(1.0, 0.0),
        t2: a,
        t3,
    })
}

/// The rPD limit configuration: two layers, necks at 0 and (1+a)/3,
/// third period 2(1+a)/3.
pub fn preset_rpd() -> TraizetConfig {
    let (u, a) = hex_unit();
    TraizetConfig {
        positions: vec![vec![c64(0.0, 0.0)], vec![u]],
        t1: c64(1.0, 0.0),
        t2: a,
        t3: 2.0 * u,
    }
}

/// The H limit configuration: as rPD but with vanishing horizontal drift.
pub fn preset_h() -> TraizetConfig {
    TraizetConfig {
        t3: c64(0.0, 0.0),
        ..preset_rpd()
    }
}

/// The mG family: N = 2, one neck per layer at 0 and t1/2, with
/// t3 = (t1 + t2)/2. Balanced for any linearly independent periods.
pub fn preset_mg(t1: Complex64, t2: Complex64) -> Result<TraizetConfig> {
    ComplexLattice::new(t1, t2)?;
    Ok(TraizetConfig {
        positions: vec![vec![c64(0.0, 0.0)], vec![0.5 * t1]],
        t1,
        t2,
        t3: 0.5 * (t1 + t2),
    })
}

/// Aspect ratio `b = sqrt(8/9)` of the vertical-twin configurations.
pub fn od_aspect() -> f64 {
    (8.0f64 / 9.0).sqrt()
}

/// The four-layer vertical-twin family with parameter `x`:
/// positions 0, 1/2, x + 1/2 + b i/2, x + b i/2 on `<1, b i>` with t3 = 0.
pub fn preset_od(x: f64) -> TraizetConfig {
    let b = od_aspect();
    TraizetConfig {
        positions: vec![
            vec![c64(0.0, 0.0)],
            vec![c64(0.5, 0.0)],
            vec![c64(x + 0.5, 0.5 * b)],
            vec![c64(x, 0.5 * b)],
        ],
        t1: c64(1.0, 0.0),
        t2: c64(0.0, b),
        t3: c64(0.0, 0.0),
    }
}

/// Solve `F_{0,1}(x) = 0` for the [`preset_od`] family over one period of
/// `x`: sign scan at resolution 1e-3 followed by bisection to 1e-10.
pub fn solve_od_roots() -> Result<Vec<f64>> {
    // F is purely real along this family (checked in tests); scan Re F.
    let f = |x: f64| -> Result<f64> {
        let cfg = preset_od(x);
        Ok(force(&cfg, 0, 0)?.re)
    };
    let n = 1000;
    let mut roots = Vec::new();
    // scan a window centered so that the x = 0 root is interior
    let lo = -0.25;
    let mut prev = f(lo)?;
    for i in 1..=n {
        let x0 = lo + (i - 1) as f64 / n as f64;
        let x1 = lo + i as f64 / n as f64;
        let cur = f(x1)?;
        if prev == 0.0 {
            roots.push(x0);
        } else if prev.signum() != cur.signum() {
            let r = crate::numeric::bisect(|x| f(x).unwrap_or(f64::NAN), x0, x1, 1e-12)?;
            roots.push(r);
        }
        prev = cur;
    }
    // report in [0, 1), merging duplicates
    let mut out: Vec<f64> = roots
        .into_iter()
        .map(|r| {
            let mut v = r.rem_euclid(1.0);
            if v > 1.0 - 1e-9 || v.abs() < 1e-9 {
                v = 0.0;
            }
            v
        })
        .collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-8);
    Ok(out)
}
