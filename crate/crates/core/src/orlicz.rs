//! Young functions, Fenchel conjugation, doubling constants, and Orlicz norms
//! on finite measure vectors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scale::TwoScaleFn;

/// Sentinel for a conjugate value of `+inf`.
pub const INF_SENTINEL: f64 = 1e300;

/// A convex gauge with `phi(0) = 0` in one of the built-in families.
///
/// `MinPower` is the doubling gauge `s^gamma /\ s^kappa` with
/// `1 <= gamma <= kappa`; the raw minimum has a concave kink at 1, so it is
/// stored as its lower convex envelope (power branch, double-tangent segment,
/// power branch). Tabulated samples are convexified the same way, with the
/// adjustment magnitude kept on the value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum YoungFunction {
    Power {
        p: f64,
    },
    MinPower {
        gamma: f64,
        kappa: f64,
        hull: PowerHull,
    },
    TwoScalePower {
        sigma: TwoScaleFn,
    },
    Tabulated {
        s: Vec<f64>,
        phi: Vec<f64>,
        convex_adjustment: f64,
    },
}

/// Convex envelope of `min(s^kappa, s^gamma)`: `s^kappa` up to `s0`, a tangent
/// segment, then `s^gamma` from `s1` on (`s1 = inf` when `gamma = 1`).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PowerHull {
    s0: f64,
    s1: f64,
    slope: f64,
    intercept: f64,
}

impl YoungFunction {
    pub fn power(p: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::InvalidArgument(format!("power form needs p >= 1, got {p}")));
        }
        Ok(YoungFunction::Power { p })
    }

    pub fn min_power(gamma: f64, kappa: f64) -> Result<Self> {
        if !(1.0 <= gamma && gamma <= kappa && kappa.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "min-power form needs 1 <= gamma <= kappa, got ({gamma}, {kappa})"
            )));
        }
        let hull = PowerHull::for_min_power(gamma, kappa);
        Ok(YoungFunction::MinPower { gamma, kappa, hull })
    }

    pub fn two_scale(sigma: TwoScaleFn) -> Result<Self> {
        if sigma.a_small() < 1.0 || sigma.a_large() < 1.0 {
            return Err(Error::InvalidArgument(format!(
                "two-scale Young function needs both exponents >= 1, got ({}, {})",
                sigma.a_small(),
                sigma.a_large()
            )));
        }
        Ok(YoungFunction::TwoScalePower { sigma })
    }

    /// Builds from monotone samples, replacing them by their lower convex hull.
    pub fn tabulated(samples: &[(f64, f64)]) -> Result<Self> {
        if samples.len() < 3 {
            return Err(Error::InvalidArgument("need at least 3 samples".into()));
        }
        let mut pts: Vec<(f64, f64)> = samples.to_vec();
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        if pts[0] != (0.0, 0.0) {
            pts.insert(0, (0.0, 0.0));
        }
        for w in pts.windows(2) {
            if !(w[1].0 > w[0].0 && w[1].1 >= w[0].1) {
                return Err(Error::InvalidArgument(
                    "tabulated samples must be increasing in s and nondecreasing in phi".into(),
                ));
            }
        }
        // Monotone-chain lower hull.
        let mut hull: Vec<(f64, f64)> = Vec::new();
        for &p in &pts {
            while hull.len() >= 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
                if cross <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        let adjust = pts
            .iter()
            .map(|&(s, v)| v - interp_linear(&hull, s))
            .fold(0.0f64, f64::max);
        Ok(YoungFunction::Tabulated {
            s: hull.iter().map(|p| p.0).collect(),
            phi: hull.iter().map(|p| p.1).collect(),
            convex_adjustment: adjust,
        })
    }

    pub fn eval(&self, s: f64) -> f64 {
        assert!(s >= 0.0, "Young function evaluated at negative s={s}");
        match self {
            YoungFunction::Power { p } => s.powf(*p),
            YoungFunction::MinPower { gamma, kappa, hull } => hull.eval(*gamma, *kappa, s),
            YoungFunction::TwoScalePower { sigma } => sigma.eval(s),
            YoungFunction::Tabulated { s: xs, phi, .. } => {
                let pts: Vec<(f64, f64)> = xs.iter().copied().zip(phi.iter().copied()).collect();
                interp_linear(&pts, s)
            }
        }
    }

    /// Numeric inverse on `[0, inf)`; exact for the power form.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if let YoungFunction::Power { p } = self {
            return Ok(y.powf(1.0 / p));
        }
        numeric_inverse(&|s| self.eval(s), y)
    }

    /// `sup phi(2s)/phi(s)` over the grid points where `phi(s) > 0`.
    pub fn doubling_constant(&self, grid: &[f64]) -> f64 {
        grid.iter()
            .filter(|&&s| s > 0.0 && self.eval(s) > 0.0)
            .map(|&s| self.eval(2.0 * s) / self.eval(s))
            .fold(0.0, f64::max)
    }

    /// Worst normalized concavity over the grid; convex functions give ~0.
    pub fn convexity_defect(&self, grid: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for w in grid.windows(3) {
            let (a, b, c) = (w[0], w[1], w[2]);
            let chord = self.eval(a) + (self.eval(c) - self.eval(a)) * (b - a) / (c - a);
            let defect = (self.eval(b) - chord) / self.eval(c).max(1e-300);
            worst = worst.max(defect);
        }
        worst
    }

    pub fn describe(&self) -> String {
        match self {
            YoungFunction::Power { p } => format!("power:{p}"),
            YoungFunction::MinPower { gamma, kappa, .. } => format!("minpower:{gamma},{kappa}"),
            YoungFunction::TwoScalePower { sigma } => {
                format!("twoscale:{},{}", sigma.a_small(), sigma.a_large())
            }
            YoungFunction::Tabulated { s, .. } => format!("tabulated[{}]", s.len()),
        }
    }
}

impl PowerHull {
    fn for_min_power(gamma: f64, kappa: f64) -> PowerHull {
        if (kappa - gamma).abs() < 1e-12 {
            return PowerHull {
                s0: 1.0,
                s1: 1.0,
                slope: gamma,
                intercept: 1.0 - gamma,
            };
        }
        if gamma < 1.0 + 1e-9 {
            // Tangent segment parallel to the linear branch; never rejoins it.
            let s0 = (1.0 / kappa).powf(1.0 / (kappa - 1.0));
            return PowerHull {
                s0,
                s1: f64::INFINITY,
                slope: 1.0,
                intercept: s0.powf(kappa) - s0,
            };
        }
        // Double tangent with common slope m in [gamma, kappa]: tangency points
        // s0 = (m/kappa)^{1/(kappa-1)} <= 1 <= s1 = (m/gamma)^{1/(gamma-1)}.
        let chord_gap = |m: f64| {
            let s0 = (m / kappa).powf(1.0 / (kappa - 1.0));
            let s1 = (m / gamma).powf(1.0 / (gamma - 1.0));
            s1.powf(gamma) - s0.powf(kappa) - m * (s1 - s0)
        };
        let (mut lo, mut hi) = (gamma, kappa);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if chord_gap(mid) >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let m = 0.5 * (lo + hi);
        let s0 = (m / kappa).powf(1.0 / (kappa - 1.0));
        let s1 = (m / gamma).powf(1.0 / (gamma - 1.0));
        PowerHull {
            s0,
            s1,
            slope: m,
            intercept: s0.powf(kappa) - m * s0,
        }
    }

    fn eval(&self, gamma: f64, kappa: f64, s: f64) -> f64 {
        if s <= self.s0 {
            s.powf(kappa)
        } else if s < self.s1 {
            self.slope * s + self.intercept
        } else {
            s.powf(gamma)
        }
    }
}

fn interp_linear(pts: &[(f64, f64)], x: f64) -> f64 {
    let n = pts.len();
    if x <= pts[0].0 {
        return pts[0].1;
    }
    if x >= pts[n - 1].0 {
        // extrapolate with the final slope
        let (a, b) = (pts[n - 2], pts[n - 1]);
        return b.1 + (b.1 - a.1) / (b.0 - a.0) * (x - b.0);
    }
    let i = pts.partition_point(|p| p.0 < x);
    let (a, b) = (pts[i - 1], pts[i]);
    a.1 + (b.1 - a.1) / (b.0 - a.0) * (x - a.0)
}

/// Bisection inverse of a nondecreasing curve, with bracket expansion.
pub fn numeric_inverse(curve: &dyn Fn(f64) -> f64, y: f64) -> Result<f64> {
    if y < 0.0 {
        return Err(Error::InvalidArgument("inverse target must be nonnegative".into()));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    let mut hi = 1.0f64;
    let mut guard = 0;
    while curve(hi) < y {
        hi *= 2.0;
        guard += 1;
        if guard > 1100 {
            return Err(Error::InverseOutOfRange(format!(
                "curve never reaches {y:.3e} on the sampled range (max value {:.3e})",
                curve(hi / 2.0)
            )));
        }
    }
    let mut lo = hi / 2.0;
    guard = 0;
    while curve(lo) > y {
        lo /= 2.0;
        guard += 1;
        if guard > 1100 {
            return Err(Error::InverseOutOfRange(format!(
                "curve exceeds {y:.3e} arbitrarily close to 0"
            )));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if curve(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= 1e-13 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Fenchel transform `psi(t) = sup_{s>0} (st - phi(s))`.
///
/// Log-grid scan (400 points per decade) refined by golden section; the grid
/// extends on either side while the supremum sits at an edge with positive
/// slope, and collapses to the `+inf` sentinel past the overflow threshold.
pub fn young_conjugate(phi: &YoungFunction, t: f64) -> f64 {
    assert!(t >= 0.0);
    if t == 0.0 {
        return 0.0;
    }
    let g = |s: f64| s * t - phi.eval(s);
    let per_decade = 400usize;
    let (mut lo_exp, mut hi_exp) = (-4.0f64, 4.0f64);
    loop {
        let n = ((hi_exp - lo_exp) * per_decade as f64) as usize + 1;
        let mut best = (0usize, f64::NEG_INFINITY);
        for i in 0..n {
            let s = 10f64.powf(lo_exp + (hi_exp - lo_exp) * i as f64 / (n - 1) as f64);
            let v = g(s);
            if v > best.1 {
                best = (i, v);
            }
        }
        if best.1 > INF_SENTINEL {
            return INF_SENTINEL;
        }
        if best.0 == n - 1 {
            // positive slope at the right edge
            if hi_exp > 295.0 {
                return INF_SENTINEL;
            }
            hi_exp += 4.0;
            continue;
        }
        if best.0 == 0 && lo_exp > -290.0 {
            let s0 = 10f64.powf(lo_exp);
            if g(s0 * 0.9) > best.1 {
                lo_exp -= 4.0;
                continue;
            }
        }
        let i = best.0;
        let step = (hi_exp - lo_exp) / (n - 1) as f64;
        let a = 10f64.powf(lo_exp + step * (i.saturating_sub(1)) as f64);
        let b = 10f64.powf(lo_exp + step * ((i + 1).min(n - 1)) as f64);
        return golden_max(&g, a, b).max(0.0);
    }
}

fn golden_max(g: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - (b - a) * INV_PHI;
    let mut d = a + (b - a) * INV_PHI;
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..120 {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - (b - a) * INV_PHI;
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + (b - a) * INV_PHI;
            gd = g(d);
        }
        if (b - a) <= 1e-10 * b.abs().max(1e-30) {
            break;
        }
    }
    gc.max(gd)
}

/// Conjugate of `phi` as a reusable curve with a numeric inverse.
pub struct Conjugate<'a> {
    phi: &'a YoungFunction,
}

impl<'a> Conjugate<'a> {
    pub fn new(phi: &'a YoungFunction) -> Self {
        Self { phi }
    }

    pub fn eval(&self, t: f64) -> f64 {
        young_conjugate(self.phi, t)
    }

    pub fn inverse(&self, y: f64) -> Result<f64> {
        numeric_inverse(&|t| self.eval(t), y)
    }
}

/// Numeric biconjugate `(phi*)*` on a grid of `s` values.
///
/// The inner conjugate is tabulated on a range wide enough to cover the
/// subdifferential of `phi` over `s_grid`; the outer supremum scans the table
/// and then refines around the best node with exact conjugate evaluations,
/// which matters where the subgradient concentrates (affine pieces of `phi`).
pub fn double_conjugate_profile(phi: &YoungFunction, s_grid: &[f64]) -> Vec<f64> {
    let s_min = s_grid.iter().cloned().fold(f64::INFINITY, f64::min);
    let s_max = s_grid.iter().cloned().fold(0.0f64, f64::max);
    let slope = |s: f64| (phi.eval(s * 1.001) - phi.eval(s)) / (0.001 * s);
    let t_lo = (slope(s_min) / 100.0).max(1e-290);
    let t_hi = slope(s_max) * 100.0 + 1.0;
    let per_decade = 400usize;
    let decades = (t_hi / t_lo).log10().ceil().max(1.0);
    let n = (decades * per_decade as f64) as usize + 1;
    let ts: Vec<f64> = (0..n)
        .map(|i| t_lo * (t_hi / t_lo).powf(i as f64 / (n - 1) as f64))
        .collect();
    let psis: Vec<f64> = ts.iter().map(|&t| young_conjugate(phi, t)).collect();
    s_grid
        .iter()
        .map(|&s| {
            let mut best = (0usize, 0.0f64);
            for (i, (&t, &psi)) in ts.iter().zip(psis.iter()).enumerate() {
                if psi >= INF_SENTINEL {
                    continue;
                }
                let v = s * t - psi;
                if v > best.1 {
                    best = (i, v);
                }
            }
            // golden refinement over t with exact conjugate values; the
            // objective is concave in t
            let a = ts[best.0.saturating_sub(1)];
            let b = ts[(best.0 + 1).min(ts.len() - 1)];
            let g = |t: f64| {
                let psi = young_conjugate(phi, t);
                if psi >= INF_SENTINEL {
                    f64::NEG_INFINITY
                } else {
                    s * t - psi
                }
            };
            golden_max(&g, a, b).max(best.1)
        })
        .collect()
}

/// Finite measure vector: values `f_i` with strictly positive masses.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureVector {
    pub values: Vec<f64>,
    pub masses: Vec<f64>,
}

impl MeasureVector {
    pub fn new(values: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        if values.len() != masses.len() || values.is_empty() {
            return Err(Error::InvalidArgument(
                "values and masses must have equal nonzero length".into(),
            ));
        }
        if masses.iter().any(|&m| !(m > 0.0 && m.is_finite())) {
            return Err(Error::InvalidArgument("masses must be strictly positive".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("values must be finite".into()));
        }
        Ok(Self { values, masses })
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }
}

/// Luxembourg gauge `inf { s > 0 : sum phi(|f_i|/s) mu_i <= 1 }` by bisection
/// to relative 1e-12; zero for the zero vector.
pub fn luxembourg_norm(f: &MeasureVector, phi: &YoungFunction) -> f64 {
    let max_abs = f.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max_abs == 0.0 {
        return 0.0;
    }
    let rho = |s: f64| -> f64 {
        f.values
            .iter()
            .zip(&f.masses)
            .map(|(v, m)| phi.eval(v.abs() / s) * m)
            .sum()
    };
    let mut hi = max_abs;
    while rho(hi) > 1.0 {
        hi *= 2.0;
    }
    let mut lo = hi;
    while rho(lo) <= 1.0 && lo > 1e-300 {
        lo *= 0.5;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if rho(mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    hi
}

/// `||1_E||_phi = mu(E) psi^{-1}(1/mu(E))` where `psi` is the conjugate curve.
pub fn indicator_norm(mass: f64, psi: &dyn Fn(f64) -> f64) -> Result<f64> {
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::InvalidArgument("mass must be positive and finite".into()));
    }
    let inv = numeric_inverse(psi, 1.0 / mass)?;
    Ok(mass * inv)
}

/// Worst slack of `s <= phi^{-1}(s) psi^{-1}(s) <= 2s` over the grid. Both
/// entries are nonnegative when the inequality holds; the returned pair is
/// (worst lower slack, worst upper slack), relative to `s`.
pub fn young_pair_check(
    phi: &YoungFunction,
    psi: &dyn Fn(f64) -> f64,
    grid: &[f64],
) -> Result<(f64, f64)> {
    let mut lower = f64::INFINITY;
    let mut upper = f64::INFINITY;
    for &s in grid {
        if !(s > 0.0) {
            return Err(Error::InvalidArgument("pair-check grid must be positive".into()));
        }
        let prod = phi.inverse(s)? * numeric_inverse(psi, s)?;
        lower = lower.min((prod - s) / s);
        upper = upper.min((2.0 * s - prod) / s);
    }
    Ok((lower, upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scale::log_grid;
    use approx::assert_relative_eq;

    #[test]
    fn conjugate_of_square() {
        let phi = YoungFunction::power(2.0).unwrap();
        assert_relative_eq!(young_conjugate(&phi, 1.0), 0.25, max_relative = 1e-9);
        assert_relative_eq!(young_conjugate(&phi, 3.0), 9.0 / 4.0, max_relative = 1e-9);
    }

    #[test]
    fn conjugate_of_linear() {
        let phi = YoungFunction::power(1.0).unwrap();
        assert!(young_conjugate(&phi, 0.5).abs() < 1e-12);
        assert_eq!(young_conjugate(&phi, 2.0), INF_SENTINEL);
    }

    #[test]
    fn conjugate_handles_small_arguments() {
        // argmax of st - s^3 is sqrt(t/3), far below the default grid for
        // small t; psi(t) = 2 (t/3)^{3/2}.
        let phi = YoungFunction::power(3.0).unwrap();
        let t = 1e-9;
        let expected = 2.0 * (t / 3.0f64).powf(1.5);
        assert_relative_eq!(young_conjugate(&phi, t), expected, max_relative = 1e-8);
    }

    #[test]
    fn doubling_constants() {
        let grid = log_grid(1e-3, 1e3, 600);
        let p2 = YoungFunction::power(2.0).unwrap();
        assert_relative_eq!(p2.doubling_constant(&grid), 4.0, max_relative = 1e-12);
        let mp = YoungFunction::min_power(1.0, 3.0).unwrap();
        let b = mp.doubling_constant(&grid);
        assert!((b - 8.0).abs() < 1e-6, "doubling constant {b}");
    }

    #[test]
    fn non_doubling_tabulated_flagged_by_growth() {
        let samples: Vec<(f64, f64)> = (1..60)
            .map(|i| {
                let s = 0.2 * i as f64;
                (s, s.exp() - 1.0)
            })
            .collect();
        let phi = YoungFunction::tabulated(&samples).unwrap();
        let narrow = phi.doubling_constant(&log_grid(0.3, 2.0, 50));
        let wide = phi.doubling_constant(&log_grid(0.3, 5.0, 50));
        assert!(wide > 2.0 * narrow, "doubling should grow with extent: {narrow} vs {wide}");
    }

    #[test]
    fn min_power_hull_is_convex_and_below_min() {
        let grid = log_grid(1e-3, 1e3, 400);
        for (g, k) in [(1.0, 3.0), (1.5, 2.5), (2.0, 4.0)] {
            let phi = YoungFunction::min_power(g, k).unwrap();
            assert!(phi.convexity_defect(&grid) <= 1e-10);
            for &s in &grid {
                let raw = s.powf(g).min(s.powf(k));
                assert!(phi.eval(s) <= raw * (1.0 + 1e-12), "hull above min at {s}");
            }
            // hull touches the steep branch near zero; for gamma > 1 it
            // rejoins the flat branch, for gamma = 1 it stays on the parallel
            // tangent segment forever
            assert_relative_eq!(phi.eval(1e-3), 1e-3f64.powf(k), max_relative = 1e-12);
            if g > 1.0 {
                assert_relative_eq!(phi.eval(1e3), 1e3f64.powf(g), max_relative = 1e-12);
            } else {
                let s0 = (1.0 / k).powf(1.0 / (k - 1.0));
                let expected = 1e3 + s0.powf(k) - s0;
                assert_relative_eq!(phi.eval(1e3), expected, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn luxembourg_matches_p_norm() {
        let f = MeasureVector::new(vec![1.0, -2.0, 0.5], vec![0.2, 0.3, 0.5]).unwrap();
        for p in [1.0, 1.5, 2.0, 3.0] {
            let phi = YoungFunction::power(p).unwrap();
            let expected = f
                .values
                .iter()
                .zip(&f.masses)
                .map(|(v, m)| v.abs().powf(p) * m)
                .sum::<f64>()
                .powf(1.0 / p);
            assert_relative_eq!(luxembourg_norm(&f, &phi), expected, max_relative = 1e-10);
        }
    }

    #[test]
    fn luxembourg_zero_and_homogeneous() {
        let phi = YoungFunction::min_power(1.0, 3.0).unwrap();
        let zero = MeasureVector::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(luxembourg_norm(&zero, &phi), 0.0);
        let f = MeasureVector::new(vec![0.3, -1.4, 2.0], vec![0.1, 1.0, 0.4]).unwrap();
        let base = luxembourg_norm(&f, &phi);
        let scaled = MeasureVector::new(
            f.values.iter().map(|v| -3.5 * v).collect(),
            f.masses.clone(),
        )
        .unwrap();
        assert_relative_eq!(luxembourg_norm(&scaled, &phi), 3.5 * base, max_relative = 1e-9);
    }

    #[test]
    fn indicator_norm_square_case() {
        // phi = s^2, psi(t) = t^2/4, psi^{-1}(1) = 2.
        let phi = YoungFunction::power(2.0).unwrap();
        let conj = Conjugate::new(&phi);
        let norm = indicator_norm(1.0, &|t| conj.eval(t)).unwrap();
        assert_relative_eq!(norm, 2.0, max_relative = 1e-8);
    }

    #[test]
    fn indicator_norm_unit_psi() {
        // Any power-type psi with psi(1) = 1 gives norm 1 at mass 1.
        let psi = YoungFunction::power(3.0).unwrap();
        let norm = indicator_norm(1.0, &|t| psi.eval(t)).unwrap();
        assert_relative_eq!(norm, 1.0, max_relative = 1e-10);
    }

    #[test]
    fn indicator_norm_monotone_in_mass() {
        let phi = YoungFunction::power(2.0).unwrap();
        let conj = Conjugate::new(&phi);
        let mut prev = 0.0;
        for mass in [1e-3, 1e-2, 0.1, 0.5, 1.0, 4.0] {
            let norm = indicator_norm(mass, &|t| conj.eval(t)).unwrap();
            assert!(norm > prev, "indicator norm must grow with mass");
            prev = norm;
        }
    }

    #[test]
    fn young_pair_self_conjugate_product() {
        // phi(s) = s^2: phi^{-1}(s) psi^{-1}(s) = sqrt(s) * 2 sqrt(s) = 2s.
        let phi = YoungFunction::power(2.0).unwrap();
        let conj = Conjugate::new(&phi);
        let grid = log_grid(1e-2, 1e2, 17);
        for &s in &grid {
            let prod = phi.inverse(s).unwrap() * conj.inverse(s).unwrap();
            assert_relative_eq!(prod, 2.0 * s, max_relative = 1e-7);
        }
    }

    #[test]
    fn young_pair_inequality_powers() {
        let grid = log_grid(1e-3, 1e3, 61);
        for p in [1.5, 2.0, 3.0] {
            let phi = YoungFunction::power(p).unwrap();
            let conj = Conjugate::new(&phi);
            let (lower, upper) = young_pair_check(&phi, &|t| conj.eval(t), &grid).unwrap();
            assert!(lower >= -1e-7, "lower slack {lower} for p={p}");
            assert!(upper >= -1e-7, "upper slack {upper} for p={p}");
        }
    }

    #[test]
    fn double_conjugate_recovers_powers() {
        let s_grid = log_grid(1e-2, 1e2, 41);
        for p in [1.5, 2.0, 3.0] {
            let phi = YoungFunction::power(p).unwrap();
            let back = double_conjugate_profile(&phi, &s_grid);
            for (&s, &b) in s_grid.iter().zip(back.iter()) {
                assert_relative_eq!(b, phi.eval(s), max_relative = 1e-4);
            }
        }
    }

    #[test]
    fn double_conjugate_recovers_min_power_hull() {
        let s_grid = log_grid(1e-2, 1e2, 41);
        let phi = YoungFunction::min_power(1.0, 3.0).unwrap();
        let back = double_conjugate_profile(&phi, &s_grid);
        for (&s, &b) in s_grid.iter().zip(back.iter()) {
            assert_relative_eq!(b, phi.eval(s), max_relative = 1e-4);
        }
    }

    #[test]
    fn embedding_gauge_conjugate_bracket() {
        // Gauge with exponents a_i/d_i for (a1,b1,d1)=(1,2,0.3) and
        // (a2,b2,d2)=(1.9,2.4,0.2), i.e. kappa=(1.3,0.7). Its conjugate must be
        // bracketed by sigma_{a1/(b1-k1), a2/(b2-k2)} within fixed constants.
        let phi = YoungFunction::two_scale(TwoScaleFn::new(1.0 / 0.3, 1.9 / 0.2).unwrap()).unwrap();
        let target = TwoScaleFn::new(1.0 / 0.7, 1.9 / 1.7).unwrap();
        let grid = log_grid(1e-3, 1e3, 61);
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for &t in &grid {
            let r = young_conjugate(&phi, t) / target.eval(t);
            lo = lo.min(r);
            hi = hi.max(r);
        }
        assert!(lo > 0.0 && hi.is_finite());
        assert!(hi / lo < 4.0, "bracket too wide: [{lo}, {hi}]");
    }
}
