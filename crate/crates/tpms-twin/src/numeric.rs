//! Shared numerical machinery: adaptive Gauss–Kronrod quadrature (with
//! endpoint substitutions for integrable singularities), 1-D root finding
//! and extremum search, and continuous-argument tracking along paths.

use num_complex::Complex64;

use crate::{Error, Result};

/// Output space of an integrand: enough structure for quadrature sums.
pub trait Accumulate: Copy {
    fn zero() -> Self;
    fn add_scaled(&mut self, other: &Self, scale: f64);
    /// Max-norm, used for error control.
    fn norm(&self) -> f64;
}

impl Accumulate for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add_scaled(&mut self, other: &Self, scale: f64) {
        *self += other * scale;
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
}

impl Accumulate for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add_scaled(&mut self, other: &Self, scale: f64) {
        *self += other * scale;
    }
    fn norm(&self) -> f64 {
        self.re.abs().max(self.im.abs())
    }
}

impl Accumulate for [Complex64; 3] {
    fn zero() -> Self {
        [Complex64::new(0.0, 0.0); 3]
    }
    fn add_scaled(&mut self, other: &Self, scale: f64) {
        for (a, b) in self.iter_mut().zip(other.iter()) {
            *a += b * scale;
        }
    }
    fn norm(&self) -> f64 {
        self.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

impl Accumulate for [f64; 2] {
    fn zero() -> Self {
        [0.0; 2]
    }
    fn add_scaled(&mut self, other: &Self, scale: f64) {
        self[0] += other[0] * scale;
        self[1] += other[1] * scale;
    }
    fn norm(&self) -> f64 {
        self[0].abs().max(self[1].abs())
    }
}

// Gauss 7 / Kronrod 15 rule on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_17,
    0.207_784_955_007_898_47,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_69,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

/// One Gauss–Kronrod 7–15 panel on `[a, b]`. Returns `(kronrod, |k - g|)`.
fn gk15<V: Accumulate>(f: &mut impl FnMut(f64) -> V, a: f64, b: f64) -> (V, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = V::zero();
    let mut g = V::zero();
    for (i, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        if x == 0.0 {
            let v = f(c);
            k.add_scaled(&v, wk * h);
            g.add_scaled(&v, WG[3] * h);
        } else {
            let vm = f(c - h * x);
            let vp = f(c + h * x);
            k.add_scaled(&vm, wk * h);
            k.add_scaled(&vp, wk * h);
            if i % 2 == 1 {
                // odd Kronrod indices are the embedded Gauss nodes
                let wg = WG[i / 2];
                g.add_scaled(&vm, wg * h);
                g.add_scaled(&vp, wg * h);
            }
        }
    }
    let mut diff = k;
    diff.add_scaled(&g, -1.0);
    (k, diff.norm())
}

/// Adaptive Gauss–Kronrod quadrature of `f` over `[a, b]` to absolute
/// tolerance `tol` (max-norm, per component).
pub static QUAD_EVALS: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(0);
pub static QUAD_MAXDEPTH: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(0);

pub fn integrate<V: Accumulate>(
    mut f: impl FnMut(f64) -> V,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<V> {
    if a == b {
        return Ok(V::zero());
    }
    let total = (b - a).abs();
    let mut stack = vec![(a, b, 0u32)];
    let mut acc = V::zero();
    let mut evals = 0usize;
    while let Some((lo, hi, depth)) = stack.pop() {
        let (val, err) = gk15(&mut f, lo, hi);
        evals += 15;
        QUAD_EVALS.fetch_add(15, std::sync::atomic::Ordering::Relaxed);
        QUAD_MAXDEPTH.fetch_max(depth as u64, std::sync::atomic::Ordering::Relaxed);
        if evals > 2_000_000 {
            return Err(Error::Numeric("quadrature: evaluation budget exhausted".into()));
        }
        let local_tol = tol * ((hi - lo).abs() / total).max(1e-3);
        if err <= local_tol || depth >= 48 {
            if depth >= 48 && err > 10.0 * local_tol {
                return Err(Error::Numeric(format!(
                    "quadrature failed to converge on [{lo}, {hi}] (err {err:.3e})"
                )));
            }
            acc.add_scaled(&val, 1.0);
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, depth + 1));
            stack.push((mid, hi, depth + 1));
        }
    }
    Ok(acc)
}

/// Integrate `g(d) := f(1 - d)` over `d in (0, 1]` where `f` has an
/// integrable algebraic singularity `d^(-(m-1)/m)` as `d -> 0`; the
/// substitution `d = u^m` makes the integrand smooth.
///
/// The integrand receives `d` (the distance from the singular endpoint)
/// rather than `s = 1 - d`, so it can form differences from the singular
/// point without cancellation.
pub fn integrate_singular_end<V: Accumulate>(
    mut f: impl FnMut(f64) -> V,
    m: u32,
    tol: f64,
) -> Result<V> {
    let mf = m as f64;
    integrate(
        |u| {
            let d = u.powi(m as i32);
            let v = f(d);
            let w = mf * u.powi(m as i32 - 1);
            let mut out = V::zero();
            out.add_scaled(&v, w);
            out
        },
        0.0,
        1.0,
        tol,
    )
}

/// Bisection for a root of `f` on `[a, b]`; requires a sign change.
pub fn bisect(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, xtol: f64) -> Result<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Numeric("bisect: no sign change in bracket".into()));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= xtol {
            return Ok(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Damped Newton iteration on a scalar function with numeric derivative,
/// falling back to bisection steps inside `[lo, hi]` when Newton leaves the
/// bracket. `f` should be smooth; `damping` scales each Newton step.
pub fn newton_damped(
    mut f: impl FnMut(f64) -> f64,
    x0: f64,
    lo: f64,
    hi: f64,
    damping: f64,
    max_iters: usize,
    ftol: f64,
) -> Result<f64> {
    let mut x = x0;
    let h0 = 1e-6 * (hi - lo).abs().max(1.0);
    for _ in 0..max_iters {
        let fx = f(x);
        if fx.abs() <= ftol {
            return Ok(x);
        }
        let h = h0.min(0.25 * ((x - lo).abs().min((hi - x).abs()) + h0));
        let d = (f(x + h) - f(x - h)) / (2.0 * h);
        if d == 0.0 || !d.is_finite() {
            return Err(Error::Numeric("newton: vanishing derivative".into()));
        }
        let mut step = -damping * fx / d;
        // keep iterates inside the bracket
        while x + step <= lo || x + step >= hi {
            step *= 0.5;
            if step.abs() < 1e-18 {
                return Err(Error::Numeric("newton: step collapsed at bracket edge".into()));
            }
        }
        x += step;
    }
    let fx = f(x);
    if fx.abs() <= ftol * 10.0 {
        Ok(x)
    } else {
        Err(Error::Numeric(format!("newton: no convergence (residual {fx:.3e})")))
    }
}

/// Golden-section search for a maximum of `f` on `[a, b]`.
/// Returns `(argmax, max)`.
pub fn golden_max(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, xtol: f64) -> (f64, f64) {
    const INVPHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > xtol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INVPHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INVPHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Continuous-argument chart of a nonvanishing complex function along a
/// segment parameterized by `s in [0, 1]`.
///
/// The chart is built by sampling adaptively until the argument rotates by
/// less than pi/3 between neighbors; [`BranchChart::arg_at`] then extends any
/// principal-value argument to the tracked branch.
pub struct BranchChart {
    /// (s, value, accumulated argument)
    samples: Vec<(f64, Complex64, f64)>,
}

impl BranchChart {
    pub fn build(f: &mut impl FnMut(f64) -> Complex64, base_arg: f64) -> Result<BranchChart> {
        let mut samples = vec![(0.0, f(0.0), base_arg)];
        // initial uniform grid, then local refinement
        let n0 = 8;
        for i in 1..=n0 {
            let s = i as f64 / n0 as f64;
            samples.push((s, f(s), 0.0));
        }
        // refine until each step is tame
        let mut i = 0;
        let mut budget = 100_000;
        while i + 1 < samples.len() {
            let (s0, w0, _) = samples[i];
            let (s1, w1, _) = samples[i + 1];
            if w0.norm() == 0.0 || w1.norm() == 0.0 {
                return Err(Error::Singular("branch tracking hit a zero of the function".into()));
            }
            let rot = (w1 / w0).arg().abs();
            if rot < std::f64::consts::FRAC_PI_3 || (s1 - s0) < 1e-12 {
                i += 1;
            } else {
                let sm = 0.5 * (s0 + s1);
                samples.insert(i + 1, (sm, f(sm), 0.0));
                budget -= 1;
                if budget == 0 {
                    return Err(Error::Numeric("branch tracking budget exhausted".into()));
                }
            }
        }
        for i in 1..samples.len() {
            let (_, w0, a0) = samples[i - 1];
            let (_, w1, _) = samples[i];
            let a1 = a0 + (w1 / w0).arg();
            samples[i].2 = a1;
        }
        Ok(BranchChart { samples })
    }

    /// Continuous argument at parameter `s` for the value `w = f(s)`.
    pub fn arg_at(&self, s: f64, w: Complex64) -> f64 {
        // nearest sample at or before s
        let idx = match self
            .samples
            .binary_search_by(|probe| probe.0.partial_cmp(&s).unwrap())
        {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        };
        let (_, w0, a0) = self.samples[idx.min(self.samples.len() - 1)];
        a0 + (w / w0).arg()
    }

    /// Accumulated argument at the end of the segment.
    pub fn end_arg(&self) -> f64 {
        self.samples.last().unwrap().2
    }
}

/// Stable complex cotangent of `pi * w`.
pub fn cot_pi(w: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    if w.im >= 0.0 {
        // |e^{2 pi i w}| <= 1
        let u = (2.0 * std::f64::consts::PI * i * w).exp();
        i * (u + 1.0) / (u - 1.0)
    } else {
        let v = (-2.0 * std::f64::consts::PI * i * w).exp(); // |v| <= 1
        i * (1.0 + v) / (1.0 - v)
    }
}

/// Stable complex `1 / sin^2(pi * w)`.
pub fn inv_sin2_pi(w: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    if w.im >= 0.0 {
        let u = (2.0 * std::f64::consts::PI * i * w).exp();
        let d = 1.0 - u;
        -4.0 * u / (d * d)
    } else {
        let v = (-2.0 * std::f64::consts::PI * i * w).exp();
        let d = v - 1.0;
        -4.0 * v / (d * d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomial_exactly() {
        let v = integrate(|x| x * x * x - 2.0 * x + 1.0, -1.0, 3.0, 1e-12).unwrap();
        // antiderivative x^4/4 - x^2 + x
        let exact = (81.0 / 4.0 - 9.0 + 3.0) - (0.25 - 1.0 - 1.0);
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn integrates_sqrt_singularity() {
        // int_0^1 d^(-1/2) dd = 2 via d = u^2
        let v = integrate_singular_end(|d: f64| d.powf(-0.5), 2, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-10);
    }

    #[test]
    fn integrates_cbrt_singularity() {
        // int_0^1 d^(-2/3) dd = 3 via d = u^3
        let v = integrate_singular_end(|d: f64| d.powf(-2.0 / 3.0), 3, 1e-12).unwrap();
        assert!((v - 3.0).abs() < 1e-10);
    }

    #[test]
    fn golden_finds_parabola_max() {
        let (x, fx) = golden_max(|x| 1.0 - (x - 0.3) * (x - 0.3), -1.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cot_matches_naive_for_moderate_args() {
        let w = Complex64::new(0.3, 0.2);
        let z = std::f64::consts::PI * w;
        let naive = z.cos() / z.sin();
        assert!((cot_pi(w) - naive).norm() < 1e-13);
        let s = z.sin();
        assert!((inv_sin2_pi(w) - 1.0 / (s * s)).norm() < 1e-12);
    }

    #[test]
    fn branch_chart_tracks_full_turn() {
        // w(s) = e^{2 pi i s} winds once; tracked argument ends at 2 pi.
        let mut f = |s: f64| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * s);
        let chart = BranchChart::build(&mut f, 0.0).unwrap();
        assert!((chart.end_arg() - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        let w = f(0.7);
        assert!((chart.arg_at(0.7, w) - 0.7 * 2.0 * std::f64::consts::PI).abs() < 1e-12);
    }
}
