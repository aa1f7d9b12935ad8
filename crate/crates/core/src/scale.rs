//! Two-scale power functions, their algebra, and quadrature checks for the
//! integral bounds that drive the rest of the crate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `x^a_small` on `[0,1]`, `x^a_large` on `(1,inf)`. Both exponents positive,
/// so the function is a strictly increasing homeomorphism of `[0,inf)` with
/// value 0 at 0 and 1 at 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoScaleFn {
    a_small: f64,
    a_large: f64,
}

impl TwoScaleFn {
    pub fn new(a_small: f64, a_large: f64) -> Result<Self> {
        if !(a_small.is_finite() && a_large.is_finite() && a_small > 0.0 && a_large > 0.0) {
            return Err(Error::ExponentConstraint(format!(
                "two-scale exponents must be positive and finite, got ({a_small}, {a_large})"
            )));
        }
        Ok(Self { a_small, a_large })
    }

    pub fn a_small(&self) -> f64 {
        self.a_small
    }

    pub fn a_large(&self) -> f64 {
        self.a_large
    }

    pub fn eval(&self, x: f64) -> f64 {
        assert!(x >= 0.0, "two-scale function evaluated at negative x={x}");
        if x <= 1.0 {
            x.powf(self.a_small)
        } else {
            x.powf(self.a_large)
        }
    }

    /// Exponent-reciprocal function, which is the exact inverse.
    pub fn inverse(&self) -> TwoScaleFn {
        TwoScaleFn {
            a_small: 1.0 / self.a_small,
            a_large: 1.0 / self.a_large,
        }
    }

    pub fn eval_inverse(&self, y: f64) -> f64 {
        assert!(y >= 0.0, "two-scale inverse evaluated at negative y={y}");
        self.inverse().eval(y)
    }

    /// Pointwise power: `(sigma_{a,b})^q = sigma_{aq,bq}` for `q > 0`.
    pub fn pow(&self, q: f64) -> Result<TwoScaleFn> {
        TwoScaleFn::new(self.a_small * q, self.a_large * q)
    }

    /// Pointwise product: exponents add.
    pub fn product(&self, other: &TwoScaleFn) -> TwoScaleFn {
        TwoScaleFn {
            a_small: self.a_small + other.a_small,
            a_large: self.a_large + other.a_large,
        }
    }

    /// Composition `self(inner(x))`: exponents multiply branchwise because the
    /// inner function maps `[0,1]` onto `[0,1]`.
    pub fn compose(&self, inner: &TwoScaleFn) -> TwoScaleFn {
        TwoScaleFn {
            a_small: self.a_small * inner.a_small,
            a_large: self.a_large * inner.a_large,
        }
    }
}

/// A scaling function `h` for seminorms: either a two-scale power or a
/// tabulated monotone function interpolated linearly in log-log coordinates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum ScalingFn {
    Sigma(TwoScaleFn),
    Table(MonotoneTable),
}

impl ScalingFn {
    pub fn sigma(a_small: f64, a_large: f64) -> Result<Self> {
        Ok(ScalingFn::Sigma(TwoScaleFn::new(a_small, a_large)?))
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            ScalingFn::Sigma(s) => s.eval(x),
            ScalingFn::Table(t) => t.eval(x),
        }
    }

    pub fn eval_inverse(&self, y: f64) -> f64 {
        match self {
            ScalingFn::Sigma(s) => s.eval_inverse(y),
            ScalingFn::Table(t) => t.eval_inverse(y),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ScalingFn::Sigma(s) => format!("sigma:{},{}", s.a_small(), s.a_large()),
            ScalingFn::Table(t) => format!("table[{}]", t.xs.len()),
        }
    }
}

/// Strictly increasing positive samples; queries interpolate linearly in
/// log-log coordinates and extrapolate with the boundary slopes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonotoneTable {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl MonotoneTable {
    pub fn new(samples: &[(f64, f64)]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidArgument(
                "monotone table needs at least two samples".into(),
            ));
        }
        for w in samples.windows(2) {
            if !(w[0].0 < w[1].0 && w[0].1 < w[1].1) {
                return Err(Error::InvalidArgument(format!(
                    "monotone table samples must be strictly increasing, got {:?} then {:?}",
                    w[0], w[1]
                )));
            }
        }
        if samples[0].0 <= 0.0 || samples[0].1 <= 0.0 {
            return Err(Error::InvalidArgument(
                "monotone table samples must be positive".into(),
            ));
        }
        Ok(Self {
            xs: samples.iter().map(|s| s.0).collect(),
            ys: samples.iter().map(|s| s.1).collect(),
        })
    }

    fn interp(grid: &[f64], vals: &[f64], x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let lx = x.ln();
        let lgrid: Vec<f64> = grid.iter().map(|g| g.ln()).collect();
        let lvals: Vec<f64> = vals.iter().map(|v| v.ln()).collect();
        let i = match lgrid.iter().position(|&g| g >= lx) {
            Some(0) => 1,
            Some(i) => i,
            None => lgrid.len() - 1,
        };
        let slope = (lvals[i] - lvals[i - 1]) / (lgrid[i] - lgrid[i - 1]);
        (lvals[i - 1] + slope * (lx - lgrid[i - 1])).exp()
    }

    pub fn eval(&self, x: f64) -> f64 {
        Self::interp(&self.xs, &self.ys, x)
    }

    pub fn eval_inverse(&self, y: f64) -> f64 {
        Self::interp(&self.ys, &self.xs, y)
    }
}

/// Worst defects seen while verifying the two-scale algebra on a grid.
#[derive(Debug, Clone, Serialize)]
pub struct SigmaAlgebraReport {
    pub power_defect: f64,
    pub product_defect: f64,
    pub ratio_bound_defect: f64,
    pub inverse_defect: f64,
    pub max_defect: f64,
}

/// Checks the power rule, product rule, two-sided ratio bound and inverse
/// round-trip for `f` and `g` pointwise on `grid`. Defects are relative.
pub fn sigma_algebra_check(f: &TwoScaleFn, g: &TwoScaleFn, grid: &[f64]) -> Result<SigmaAlgebraReport> {
    if grid.is_empty() || grid.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::InvalidArgument(
            "sigma algebra grid must be nonempty with positive entries".into(),
        ));
    }
    let mut power_defect: f64 = 0.0;
    let mut product_defect: f64 = 0.0;
    let mut ratio_defect: f64 = 0.0;
    let mut inverse_defect: f64 = 0.0;

    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1e-300);

    for &x in grid {
        for q in [0.5, 2.0, 3.0] {
            let lhs = f.eval(x).powf(q);
            let rhs = f.pow(q)?.eval(x);
            power_defect = power_defect.max(rel(lhs, rhs));
        }
        let lhs = f.eval(x) * g.eval(x);
        let rhs = f.product(g).eval(x);
        product_defect = product_defect.max(rel(lhs, rhs));

        inverse_defect = inverse_defect.max(rel(f.eval(f.eval_inverse(x)), x));
        inverse_defect = inverse_defect.max(rel(f.eval_inverse(f.eval(x)), x));
    }

    let mut sorted = grid.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let lo = f.a_small.min(f.a_large);
    let hi = f.a_small.max(f.a_large);
    for (i, &r) in sorted.iter().enumerate() {
        for &rr in &sorted[i..] {
            let ratio = f.eval(rr) / f.eval(r);
            let lower = (rr / r).powf(lo);
            let upper = (rr / r).powf(hi);
            // Violations only; being inside the bracket is defect 0.
            ratio_defect = ratio_defect.max((lower - ratio).max(0.0) / lower);
            ratio_defect = ratio_defect.max((ratio - upper).max(0.0) / upper);
        }
    }

    let max_defect = power_defect
        .max(product_defect)
        .max(ratio_defect)
        .max(inverse_defect);
    Ok(SigmaAlgebraReport {
        power_defect,
        product_defect,
        ratio_bound_defect: ratio_defect,
        inverse_defect,
        max_defect,
    })
}

/// Resolution knobs for the composite Gauss rule used on the appendix
/// integrals. Doubling `panels_per_decade` is the stability probe.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    pub panels_per_decade: usize,
    pub gauss_order: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            panels_per_decade: 8,
            gauss_order: 12,
        }
    }
}

impl QuadratureSpec {
    pub fn doubled(&self) -> Self {
        Self {
            panels_per_decade: self.panels_per_decade * 2,
            gauss_order: self.gauss_order,
        }
    }
}

/// One row of the integral-lemma sweep.
#[derive(Debug, Clone, Serialize)]
pub struct IntegralBoundRow {
    pub t: f64,
    pub integral: f64,
    pub ratio: f64,
    pub error_estimate: f64,
}

/// Rate function `sigma_{b2/(b2-1), b1/(b1-1)}` appearing inside the heat
/// kernel exponential.
pub fn kernel_rate_fn(beta1: f64, beta2: f64) -> Result<TwoScaleFn> {
    if beta1 <= 1.0 || beta2 <= 1.0 {
        return Err(Error::ExponentConstraint(format!(
            "walk exponents must exceed 1, got ({beta1}, {beta2})"
        )));
    }
    TwoScaleFn::new(beta2 / (beta2 - 1.0), beta1 / (beta1 - 1.0))
}

/// Evaluates `int_0^inf sigma_alpha(u) exp(-C t sigma_rate(u/t)) du/u` for each
/// grid `t` and returns its ratio to `sigma_{a1/b1, a2/b2}(t)`. The lemma's
/// claim is that the ratios have a finite sup over `t`.
pub fn appendix_integral_bound(
    alpha: &TwoScaleFn,
    beta1: f64,
    beta2: f64,
    c: f64,
    t_grid: &[f64],
    quad: QuadratureSpec,
) -> Result<Vec<IntegralBoundRow>> {
    if c <= 0.0 {
        return Err(Error::InvalidArgument("C must be positive".into()));
    }
    let rate = kernel_rate_fn(beta1, beta2)?;
    let bound = TwoScaleFn::new(alpha.a_small / beta1, alpha.a_large / beta2)?;
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        if !(t > 0.0) {
            return Err(Error::InvalidArgument("t grid must be positive".into()));
        }
        let integrand = |u: f64| alpha.eval(u) * (-c * t * rate.eval(u / t)).exp() / u;
        let rough = bound.eval(t);
        let mut u_min = 1e-8 * t.powf(1.0 / beta1).min(t.powf(1.0 / beta2)).min(1.0);
        // Head bound: integrand <= u^{a1-1} below u_min <= 1. Shrink the cutoff
        // until the bound is negligible; small exponents need a deep window.
        while u_min.powf(alpha.a_small) / alpha.a_small > 1e-14 * rough && u_min > 1e-280 {
            u_min *= 0.1;
        }
        let head = u_min.powf(alpha.a_small) / alpha.a_small;

        // Grow the window until the analytic tail bound is negligible.
        let b = beta1 / (beta1 - 1.0);
        let mut u_max = t.max(1.0) * 2.0;
        let mut tail;
        loop {
            let e_u = c * t * (u_max / t).powf(b);
            let m = e_u / u_max;
            let a2 = alpha.a_large;
            tail = if a2 <= 1.0 {
                u_max.powf(a2 - 1.0) * (-m * u_max).exp() / m
            } else if m * u_max > 2.0 * (a2 - 1.0) + 2.0 {
                // Incomplete-gamma tail: Gamma(a, x) <= 2 x^{a-1} e^{-x} once
                // x dominates a.
                2.0 * m.powf(-a2) * (m * u_max).powf(a2 - 1.0) * (-m * u_max).exp()
            } else {
                f64::INFINITY
            };
            if tail.is_finite() && tail <= 1e-14 * rough {
                break;
            }
            u_max *= 2.0;
            if u_max > 1e30 {
                return Err(Error::QuadratureNonConvergence {
                    achieved: tail,
                    wanted: 1e-14 * rough,
                });
            }
        }

        // split at the branch points of sigma_alpha (u=1) and the rate (u=t)
        let mut cuts = vec![u_min, u_max];
        for c in [1.0, t] {
            if c > u_min && c < u_max {
                cuts.push(c);
            }
        }
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let piecewise = |q: QuadratureSpec| -> f64 {
            cuts.windows(2)
                .map(|w| gauss_log_panels(&integrand, w[0], w[1], q))
                .sum()
        };
        let coarse = piecewise(quad);
        let fine = piecewise(quad.doubled());
        let integral = fine + head + tail;
        let error_estimate = (fine - coarse).abs() + head + tail;
        if error_estimate > 1e-8 * integral.max(1e-300) {
            return Err(Error::QuadratureNonConvergence {
                achieved: error_estimate,
                wanted: 1e-8 * integral,
            });
        }
        rows.push(IntegralBoundRow {
            t,
            integral,
            ratio: integral / bound.eval(t),
            error_estimate,
        });
    }
    Ok(rows)
}

/// One row of the dyadic-sum lemma sweep.
#[derive(Debug, Clone, Serialize)]
pub struct DyadicSumRow {
    pub r: f64,
    pub t: f64,
    pub sum: f64,
    pub ratio: f64,
    pub terms: usize,
}

/// Evaluates the dyadic sum
/// `sum_{k>=1} exp(-C t sigma_rate(2^{-k} r / t)) sigma_{n1 b1, n2 b2}(2^{1-k} r)^p sigma_alpha(2^{1-k} r)`
/// and its ratio to `sigma_{a1/b1, a2/b2}(t) sigma_nu(t)^p` on the `(r, t)` pairs.
pub fn appendix_dyadic_sum_bound(
    alpha: &TwoScaleFn,
    beta1: f64,
    beta2: f64,
    nu: &TwoScaleFn,
    p: f64,
    c: f64,
    pairs: &[(f64, f64)],
) -> Result<Vec<DyadicSumRow>> {
    if p < 1.0 {
        return Err(Error::InvalidArgument("p must be >= 1".into()));
    }
    let rate = kernel_rate_fn(beta1, beta2)?;
    let nu_beta = TwoScaleFn::new(nu.a_small * beta1, nu.a_large * beta2)?;
    let denom_fn = TwoScaleFn::new(alpha.a_small / beta1, alpha.a_large / beta2)?;
    let mut rows = Vec::with_capacity(pairs.len());
    for &(r, t) in pairs {
        if !(r > 0.0 && t > 0.0) {
            return Err(Error::InvalidArgument("(r, t) pairs must be positive".into()));
        }
        let mut sum = 0.0;
        let mut prev = f64::INFINITY;
        let mut terms = 0usize;
        for k in 1..=20_000usize {
            let scale = (2.0f64).powi(1 - k as i32) * r;
            let term = (-c * t * rate.eval(scale / (2.0 * t))).exp()
                * nu_beta.eval(scale).powf(p)
                * alpha.eval(scale);
            sum += term;
            terms = k;
            if term <= 1e-16 * sum && term <= prev {
                break;
            }
            prev = term;
            if k == 20_000 {
                return Err(Error::TruncationFailure(format!(
                    "dyadic terms not decaying at r={r}, t={t}"
                )));
            }
        }
        let denom = denom_fn.eval(t) * nu.eval(t).powf(p);
        rows.push(DyadicSumRow {
            r,
            t,
            sum,
            ratio: sum / denom,
            terms,
        });
    }
    Ok(rows)
}

/// Exact value of `int_0^t du / sigma_nu(u)` for exponents in `(0,1)` together
/// with its ratio to `sigma_{1-n1, 1-n2}(t)`.
///
/// The source bound is stated for exponents above 1, where the integral
/// diverges at 0; the convergent range implemented here is the one the
/// pseudo-Poincare argument actually uses.
pub fn appendix_inverse_sigma_integral(nu: &TwoScaleFn, t: f64) -> Result<(f64, f64)> {
    let (n1, n2) = (nu.a_small(), nu.a_large());
    if !(n1 > 0.0 && n1 < 1.0 && n2 > 0.0 && n2 < 1.0) {
        return Err(Error::ExponentConstraint(format!(
            "inverse-sigma integral needs exponents in (0,1); got ({n1}, {n2}). \
             For exponents >= 1 the integrand u^-nu1 diverges at 0"
        )));
    }
    if !(t > 0.0) {
        return Err(Error::InvalidArgument("t must be positive".into()));
    }
    let integral = if t <= 1.0 {
        t.powf(1.0 - n1) / (1.0 - n1)
    } else {
        1.0 / (1.0 - n1) + (t.powf(1.0 - n2) - 1.0) / (1.0 - n2)
    };
    let bound = TwoScaleFn::new(1.0 - n1, 1.0 - n2)?;
    Ok((integral, integral / bound.eval(t)))
}

/// Composite Gauss-Legendre rule over log-spaced panels of `[a, b]`.
fn gauss_log_panels(f: &dyn Fn(f64) -> f64, a: f64, b: f64, quad: QuadratureSpec) -> f64 {
    let decades = (b / a).log10().max(1e-9);
    let panels = ((decades * quad.panels_per_decade as f64).ceil() as usize).max(1);
    let (nodes, weights) = gauss_legendre(quad.gauss_order);
    let la = a.ln();
    let step = (b.ln() - la) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = la + p as f64 * step;
        let hi = lo + step;
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let mut acc = 0.0;
        for (x, w) in nodes.iter().zip(weights.iter()) {
            let lu = mid + half * x;
            let u = lu.exp();
            // du = u d(ln u)
            acc += w * f(u) * u;
        }
        total += acc * half;
    }
    total
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Log-spaced grid with `points` entries from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && points >= 2);
    let (ll, lh) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (ll + (lh - ll) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn eval_branches() {
        let s = TwoScaleFn::new(2.0, 3.0).unwrap();
        assert_relative_eq!(s.eval(0.5), 0.25);
        assert_relative_eq!(s.eval(2.0), 8.0);
        assert_eq!(s.eval(0.0), 0.0);
        assert_relative_eq!(s.eval(1.0), 1.0);
        let id = TwoScaleFn::new(1.0, 1.0).unwrap();
        for x in [0.3, 1.0, 7.5] {
            assert_relative_eq!(id.eval(x), x);
        }
    }

    #[test]
    fn rejects_bad_exponents() {
        assert!(TwoScaleFn::new(0.0, 1.0).is_err());
        assert!(TwoScaleFn::new(1.0, -2.0).is_err());
        assert!(TwoScaleFn::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn inverse_round_trip() {
        let s = TwoScaleFn::new(2.0, 3.0).unwrap();
        assert_relative_eq!(s.eval_inverse(8.0), 2.0, max_relative = 1e-12);
        let s = TwoScaleFn::new(2.0, 4.0).unwrap();
        assert_relative_eq!(s.eval_inverse(0.25), 0.5, max_relative = 1e-12);
        for x in [1e-6, 0.1, 0.99, 1.0, 1.7, 42.0, 1e8] {
            assert_relative_eq!(s.eval(s.eval_inverse(x)), x, max_relative = 1e-12);
        }
    }

    #[test]
    fn algebra_on_grid() {
        let f = TwoScaleFn::new(2.0, 3.0).unwrap();
        let g = TwoScaleFn::new(1.0, 2.0).unwrap();
        // sigma_{2,3} * sigma_{1,2} = sigma_{3,5}: at 0.5 the small branch
        // gives 0.5^3 = 0.125 = 0.25 * 0.5
        assert_relative_eq!(f.product(&g).eval(0.5), 0.125);
        assert_relative_eq!(f.eval(0.5) * g.eval(0.5), f.product(&g).eval(0.5));
        // sigma_{2,3}^2 at 2 -> sigma_{4,6}(2) = 64
        assert_relative_eq!(f.pow(2.0).unwrap().eval(2.0), 64.0);
        let grid = log_grid(1e-3, 1e3, 200);
        let report = sigma_algebra_check(&f, &g, &grid).unwrap();
        assert!(report.max_defect <= 1e-12, "defect {}", report.max_defect);
    }

    #[test]
    fn ratio_bound_direct() {
        // sigma_{1,2}: sigma(4)/sigma(0.5) must sit inside [(R/r)^1, (R/r)^2].
        let f = TwoScaleFn::new(1.0, 2.0).unwrap();
        let ratio = f.eval(4.0) / f.eval(0.5);
        assert!(ratio >= 8.0 - 1e-12 && ratio <= 64.0 + 1e-12);
    }

    #[test]
    fn integral_lemma_gamma_oracle() {
        // alpha=(1,1), beta1=beta2=2, C=1: the exponent collapses to u^2/t and
        // the integral is int_0^inf exp(-u^2/t) du = sqrt(pi t)/2.
        let alpha = TwoScaleFn::new(1.0, 1.0).unwrap();
        let rows =
            appendix_integral_bound(&alpha, 2.0, 2.0, 1.0, &[1.0], QuadratureSpec::default())
                .unwrap();
        let expected = std::f64::consts::PI.sqrt() / 2.0;
        assert_relative_eq!(rows[0].integral, expected, max_relative = 1e-9);
        assert_relative_eq!(rows[0].ratio, expected, max_relative = 1e-9);
    }

    #[test]
    fn integral_lemma_single_regime_constant_ratio() {
        // For single-regime exponents the ratio is exactly constant in t:
        // C^{-a/b} Gamma(a/b) / b with b the rate exponent.
        let alpha = TwoScaleFn::new(1.5, 1.5).unwrap();
        let beta = 3.0;
        let c = 2.0;
        let t_grid = log_grid(1e-3, 1e3, 13);
        let rows =
            appendix_integral_bound(&alpha, beta, beta, c, &t_grid, QuadratureSpec::default())
                .unwrap();
        let b = beta / (beta - 1.0);
        let a_over_b = 1.5 / b;
        let expected = c.powf(-a_over_b) * gamma_fn(a_over_b) / b;
        for row in &rows {
            assert_relative_eq!(row.ratio, expected, max_relative = 1e-7);
        }
    }

    #[test]
    fn integral_lemma_monotone_in_c() {
        let alpha = TwoScaleFn::new(1.2, 0.8).unwrap();
        let t_grid = log_grid(1e-2, 1e2, 9);
        let base =
            appendix_integral_bound(&alpha, 2.5, 3.0, 1.0, &t_grid, QuadratureSpec::default())
                .unwrap();
        let doubled =
            appendix_integral_bound(&alpha, 2.5, 3.0, 2.0, &t_grid, QuadratureSpec::default())
                .unwrap();
        for (b, d) in base.iter().zip(doubled.iter()) {
            assert!(d.ratio <= b.ratio * (1.0 + 1e-12));
        }
    }

    #[test]
    fn dyadic_sum_small_r_vanishes() {
        let alpha = TwoScaleFn::new(1.585, 1.0).unwrap();
        let nu = TwoScaleFn::new(0.5, 0.4).unwrap();
        let rows = appendix_dyadic_sum_bound(
            &alpha,
            2.3,
            2.1,
            &nu,
            1.0,
            1.0,
            &[(1e-9, 1.0), (1e-12, 1.0)],
        )
        .unwrap();
        assert!(rows[0].ratio < 1e-6);
        assert!(rows[1].ratio < rows[0].ratio);
    }

    #[test]
    fn dyadic_sum_single_regime_matches_brute_force() {
        // Exponents chosen single-regime, r and t below 1 so every term stays
        // on the small branch; the brute-force sum is the oracle.
        let a = 1.3f64;
        let nb = 0.6f64 * 2.0;
        let alpha = TwoScaleFn::new(a, a).unwrap();
        let nu = TwoScaleFn::new(0.6, 0.6).unwrap();
        let (r, t, c, p) = (0.25f64, 0.1f64, 1.5f64, 2.0f64);
        let rate = kernel_rate_fn(2.0, 2.0).unwrap();
        let mut oracle = 0.0;
        for k in 1..200 {
            let scale = (2.0f64).powi(1 - k) * r;
            oracle += (-c * t * rate.eval(scale / (2.0 * t))).exp()
                * scale.powf(nb * p)
                * scale.powf(a);
        }
        let rows =
            appendix_dyadic_sum_bound(&alpha, 2.0, 2.0, &nu, p, c, &[(r, t)]).unwrap();
        assert_relative_eq!(rows[0].sum, oracle, max_relative = 1e-12);
    }

    #[test]
    fn inverse_sigma_integral_exact_values() {
        let nu = TwoScaleFn::new(0.5, 0.5).unwrap();
        let (integral, ratio) = appendix_inverse_sigma_integral(&nu, 1.0).unwrap();
        assert_relative_eq!(integral, 2.0);
        assert_relative_eq!(ratio, 2.0);

        // nu=(1/2,3/4), t=4: 2 + 4(4^{1/4}-1) against sigma_{1/2,1/4}(4).
        let nu = TwoScaleFn::new(0.5, 0.75).unwrap();
        let (integral, ratio) = appendix_inverse_sigma_integral(&nu, 4.0).unwrap();
        let expected = 2.0 + 4.0 * (4.0f64.powf(0.25) - 1.0);
        assert_relative_eq!(integral, expected, max_relative = 1e-14);
        assert_relative_eq!(ratio, expected / 4.0f64.powf(0.25), max_relative = 1e-14);
        assert!(ratio.is_finite());
    }

    #[test]
    fn inverse_sigma_integral_small_t_limit() {
        let nu = TwoScaleFn::new(0.3, 0.6).unwrap();
        let (_, ratio) = appendix_inverse_sigma_integral(&nu, 1e-9).unwrap();
        assert_relative_eq!(ratio, 1.0 / 0.7, max_relative = 1e-12);
    }

    #[test]
    fn inverse_sigma_integral_rejects_divergent_range() {
        let nu = TwoScaleFn::new(1.5, 2.0).unwrap();
        let err = appendix_inverse_sigma_integral(&nu, 1.0).unwrap_err();
        assert!(err.to_string().contains("diverges"));
    }

    #[test]
    fn gauss_rule_integrates_polynomials() {
        let (nodes, weights) = gauss_legendre(12);
        // exact for degree <= 23
        let value: f64 = nodes
            .iter()
            .zip(&weights)
            .map(|(x, w)| w * x.powi(10))
            .sum();
        assert_relative_eq!(value, 2.0 / 11.0, max_relative = 1e-13);
    }

    // Lanczos approximation, test-only oracle support.
    fn gamma_fn(x: f64) -> f64 {
        let g = 7.0;
        let c = [
            0.99999999999980993,
            676.5203681218851,
            -1259.1392167224028,
            771.32342877765313,
            -176.61502916214059,
            12.507343278686905,
            -0.13857109526572012,
            9.9843695780195716e-6,
            1.5056327351493116e-7,
        ];
        if x < 0.5 {
            std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma_fn(1.0 - x))
        } else {
            let x = x - 1.0;
            let mut a = c[0];
            let t = x + g + 0.5;
            for (i, &ci) in c.iter().enumerate().skip(1) {
                a += ci / (x + i as f64);
            }
            (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
        }
    }
}
