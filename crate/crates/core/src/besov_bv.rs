//! Heat-semigroup Besov seminorms, variation, perimeter, level sets, co-area,
//! Cheeger constants and the p=1 bounded-variation layer.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::heat::SpectralHeat;
use crate::scale::ScalingFn;

/// Log-spaced time grid with a designated small-t decade acting as the
/// `liminf` proxy window. At least 10 points per decade.
#[derive(Debug, Clone, Serialize)]
pub struct TGrid {
    points: Vec<f64>,
    small_decade_end: f64,
}

impl TGrid {
    pub fn new(t_min: f64, t_max: f64, points: usize) -> Result<Self> {
        if !(t_min > 0.0 && t_max > t_min) {
            return Err(Error::InvalidArgument("need 0 < t_min < t_max".into()));
        }
        let decades = (t_max / t_min).log10();
        if (points as f64) < 10.0 * decades - 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "{points} points under-resolve {decades:.2} decades; need >= 10 per decade"
            )));
        }
        Ok(Self {
            points: crate::scale::log_grid(t_min, t_max, points),
            small_decade_end: 10.0 * t_min,
        })
    }

    /// Default grid for a space: `t_min = (min edge length)^2 / 10`, three
    /// decades, 30 points.
    pub fn default_for(space: &crate::spaces::MMSpace) -> TGrid {
        let t_min = space.min_edge_length().powi(2) / 10.0;
        TGrid::new(t_min, 1000.0 * t_min, 30).unwrap()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn t_min(&self) -> f64 {
        self.points[0]
    }

    pub fn t_max(&self) -> f64 {
        *self.points.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Indices of the liminf proxy window `[t_min, 10 t_min]`.
    pub fn small_decade(&self) -> Vec<usize> {
        (0..self.points.len())
            .filter(|&i| self.points[i] <= self.small_decade_end * (1.0 + 1e-12))
            .collect()
    }

    /// Same span, doubled resolution.
    pub fn doubled(&self) -> TGrid {
        TGrid::new(self.t_min(), self.t_max(), 2 * self.points.len() - 1).unwrap()
    }
}

/// A spectral semigroup with its kernel matrices precomputed on a time grid.
/// Memory is `len * n^2` floats, which is the price of reusing every kernel
/// across all probes.
pub struct HeatGrid<'a> {
    heat: &'a SpectralHeat,
    grid: TGrid,
    kernels: Vec<DMatrix<f64>>,
}

impl<'a> HeatGrid<'a> {
    pub fn new(heat: &'a SpectralHeat, grid: TGrid) -> Result<Self> {
        let kernels = grid
            .points()
            .iter()
            .map(|&t| heat.kernel_matrix(t))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            heat,
            grid,
            kernels,
        })
    }

    pub fn heat(&self) -> &SpectralHeat {
        self.heat
    }

    pub fn grid(&self) -> &TGrid {
        &self.grid
    }

    pub fn kernel(&self, i: usize) -> &DMatrix<f64> {
        &self.kernels[i]
    }

    /// `int int p_t |f(x)-f(y)|^p dmu dmu` at grid index `i`.
    pub fn pair_energy(&self, i: usize, f: &Field, p: f64) -> f64 {
        let mass = self.heat.space().mass();
        let k = &self.kernels[i];
        let v = f.values();
        let n = v.len();
        let mut acc = 0.0;
        for x in 0..n {
            let vx = v[x];
            let mx = mass[x];
            for y in (x + 1)..n {
                let diff = (vx - v[y]).abs();
                if diff == 0.0 {
                    continue;
                }
                let w = k[(x, y)] * mx * mass[y];
                acc += if p == 1.0 {
                    w * diff
                } else if p == 2.0 {
                    w * diff * diff
                } else {
                    w * diff.powf(p)
                };
            }
        }
        2.0 * acc
    }

    /// Besov quotient `(1/h(t)) (pair energy)^{1/p}` for every grid time.
    pub fn quotients(&self, f: &Field, p: f64, h: &ScalingFn) -> Vec<f64> {
        (0..self.grid.len())
            .map(|i| self.pair_energy(i, f, p).powf(1.0 / p) / h.eval(self.grid.points()[i]))
            .collect()
    }
}

/// Seminorm value together with the maximizing grid time, so under-resolved
/// suprema stay visible.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SeminormValue {
    pub value: f64,
    pub argmax_t: f64,
}

/// `sup_t (1/h(t)) (int P_t(|f - f(y)|^p)(y) dmu)^{1/p}` over the grid.
pub fn besov_seminorm(hg: &HeatGrid, f: &Field, p: f64, h: &ScalingFn) -> SeminormValue {
    assert!(p >= 1.0, "seminorm needs p >= 1");
    let qs = hg.quotients(f, p, h);
    let (mut best, mut best_t) = (0.0f64, hg.grid().t_min());
    for (i, &q) in qs.iter().enumerate() {
        if q > best {
            best = q;
            best_t = hg.grid().points()[i];
        }
    }
    SeminormValue {
        value: best,
        argmax_t: best_t,
    }
}

/// Checks, for each grid `t`, the tail bound
/// `sup_s quotient(s) <= 2 ||f||_p / h(t) + sup_{s<=t} quotient(s)`.
/// Returns the worst slack (nonnegative when the inequality holds).
pub fn limsup_characterization_check(hg: &HeatGrid, f: &Field, p: f64, h: &ScalingFn) -> f64 {
    let qs = hg.quotients(f, p, h);
    let full_sup = qs.iter().cloned().fold(0.0f64, f64::max);
    let lp = f.lp_norm(p, hg.heat().space().mass());
    let mut worst = f64::INFINITY;
    let mut running = 0.0f64;
    for (i, &q) in qs.iter().enumerate() {
        running = running.max(q);
        let rhs = 2.0 * lp / h.eval(hg.grid().points()[i]) + running;
        worst = worst.min(rhs - full_sup);
    }
    worst
}

#[derive(Debug, Clone, Serialize)]
pub struct PseudoPoincareReport {
    pub worst_ratio: f64,
    pub worst_t: f64,
    pub seminorm: f64,
}

/// `max_t ||P_t f - f||_p / (h(t) ||f||_{p,h})`; the inequality is exact on a
/// finite space whenever the seminorm grid contains the tested `t`, so the
/// ratio must not exceed 1 beyond roundoff. A constant field reports 0 by the
/// 0/0 convention; a zero seminorm with a nonzero numerator is contradictory
/// and is surfaced as an error.
pub fn pseudo_poincare_check(
    hg: &HeatGrid,
    f: &Field,
    p: f64,
    h: &ScalingFn,
) -> Result<PseudoPoincareReport> {
    let seminorm = besov_seminorm(hg, f, p, h);
    let mass = hg.heat().space().mass();
    let mut worst = 0.0f64;
    let mut worst_t = hg.grid().t_min();
    for &t in hg.grid().points() {
        let diff = hg.heat().apply(t, f).minus(f).lp_norm(p, mass);
        if seminorm.value == 0.0 {
            if diff > 1e-9 * f.lp_norm(p, mass).max(1.0) {
                return Err(Error::InvalidArgument(format!(
                    "zero seminorm but ||P_t f - f||_p = {diff:.3e}: nonconstant field \
                     with vanishing seminorm"
                )));
            }
            continue;
        }
        let ratio = diff / (h.eval(t) * seminorm.value);
        if ratio > worst {
            worst = ratio;
            worst_t = t;
        }
    }
    Ok(PseudoPoincareReport {
        worst_ratio: worst,
        worst_t,
        seminorm: seminorm.value,
    })
}

/// Liminf proxy for the p=1 energy: the minimum of the quotient over the
/// small-t decade of the grid.
pub fn variation(hg: &HeatGrid, f: &Field, h: &ScalingFn) -> f64 {
    hg.grid()
        .small_decade()
        .into_iter()
        .map(|i| hg.pair_energy(i, f, 1.0) / h.eval(hg.grid().points()[i]))
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Serialize)]
pub struct PerimeterReport {
    /// liminf-form perimeter `Var(1_E)`.
    pub variation_form: f64,
    /// sup-form perimeter `||1_E||_{1,h}`.
    pub seminorm_form: f64,
    pub note: Option<String>,
}

/// Both perimeter notions of an indicator set.
pub fn perimeter(hg: &HeatGrid, set: &[usize], h: &ScalingFn) -> PerimeterReport {
    let n = hg.heat().space().n();
    if set.is_empty() || set.len() >= n {
        return PerimeterReport {
            variation_form: 0.0,
            seminorm_form: 0.0,
            note: Some("empty or full set has zero perimeter".into()),
        };
    }
    let f = Field::indicator(n, set);
    PerimeterReport {
        variation_form: variation(hg, &f, h),
        seminorm_form: besov_seminorm(hg, &f, 1.0, h).value,
        note: None,
    }
}

/// Strict superlevel set `{f > lambda}`.
pub fn level_set(f: &Field, lambda: f64) -> Vec<usize> {
    f.level_set(lambda)
}

/// Evenly spaced thresholds covering `[0, max f]`.
pub fn lambda_grid(f: &Field, points: usize) -> Vec<f64> {
    let top = f.max().max(0.0);
    (0..points)
        .map(|i| top * i as f64 / (points - 1) as f64)
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct CoareaReport {
    pub variation: f64,
    pub coarea_integral: f64,
    pub ratio: f64,
}

/// Compares `Var(f)` with the trapezoid quadrature of
/// `lambda -> Var(1_{S_lambda(f)})` over `lambda_grid`; the claim is a
/// two-sided comparison, reported as a ratio.
pub fn coarea_check(
    hg: &HeatGrid,
    f: &Field,
    h: &ScalingFn,
    lambdas: &[f64],
) -> Result<CoareaReport> {
    if f.min() < -1e-12 {
        return Err(Error::InvalidArgument("coarea check needs a nonnegative field".into()));
    }
    let var_f = variation(hg, f, h);
    let n = hg.heat().space().n();
    let pers: Vec<f64> = lambdas
        .iter()
        .map(|&l| {
            let set = f.level_set(l);
            if set.is_empty() || set.len() >= n {
                0.0
            } else {
                variation(hg, &Field::indicator(n, &set), h)
            }
        })
        .collect();
    let mut integral = 0.0;
    for i in 1..lambdas.len() {
        integral += 0.5 * (pers[i] + pers[i - 1]) * (lambdas[i] - lambdas[i - 1]);
    }
    let ratio = if integral > 0.0 { var_f / integral } else { f64::NAN };
    Ok(CoareaReport {
        variation: var_f,
        coarea_integral: integral,
        ratio,
    })
}

/// Minimum of `Per_h(E) / mu(E)` over candidate sets with mass below 1/2,
/// using the sup-form perimeter. Requires a mass-normalized space.
pub fn cheeger_estimate(
    hg: &HeatGrid,
    h: &ScalingFn,
    candidates: &[Vec<usize>],
) -> Result<(f64, Vec<usize>)> {
    let space = hg.heat().space();
    if (space.total_mass() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "Cheeger constant needs total mass 1, got {}",
            space.total_mass()
        )));
    }
    let mut best: Option<(f64, &Vec<usize>)> = None;
    for set in candidates {
        if set.is_empty() || set.len() >= space.n() {
            continue;
        }
        let mass: f64 = set.iter().map(|&i| space.mass()[i]).sum();
        if mass >= 0.5 {
            continue;
        }
        let per = besov_seminorm(hg, &Field::indicator(space.n(), set), 1.0, h).value;
        let quot = per / mass;
        if best.as_ref().map(|(b, _)| quot < *b).unwrap_or(true) {
            best = Some((quot, set));
        }
    }
    match best {
        Some((value, set)) => Ok((value, set.clone())),
        None => Err(Error::NoAdmissibleCandidate(
            "no candidate with 0 < mass < 1/2".into(),
        )),
    }
}

/// The standard candidate family: sublevel sets of the first four nonconstant
/// eigenvectors at 20 thresholds, balls around seeded centers, singletons, and
/// seeded random sets.
pub fn standard_cheeger_candidates(heat: &SpectralHeat, seed: u64) -> Vec<Vec<usize>> {
    let space = heat.space();
    let n = space.n();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for k in 1..=4.min(n - 1) {
        let v = heat.eigenvector(k);
        let (lo, hi) = (v.min(), v.max());
        for j in 1..=20 {
            let thresh = lo + (hi - lo) * j as f64 / 21.0;
            let set: Vec<usize> = (0..n).filter(|&x| v.values()[x] < thresh).collect();
            if !set.is_empty() && set.len() < n {
                out.push(set);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let diam = space.diameter();
    for _ in 0..4 {
        let center = rng.gen_range(0..n);
        for frac in [0.05, 0.1, 0.2, 0.3, 0.45] {
            let ball = space.ball(center, frac * diam);
            if !ball.is_empty() && ball.len() < n {
                out.push(ball);
            }
        }
    }
    out.push(vec![0]);
    for _ in 0..10 {
        let set: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        if !set.is_empty() && set.len() < n {
            out.push(set);
        }
    }
    out
}

/// Spectral lower bound `sup_t (1 - e^{-lambda_1 t}) / h(t)` on the grid and
/// the slack of the estimated constant against it.
pub fn cheeger_lower_bound_check(
    c_h_hat: f64,
    lambda_1: f64,
    h: &ScalingFn,
    tgrid: &TGrid,
) -> (f64, f64) {
    let bound = tgrid
        .points()
        .iter()
        .map(|&t| (1.0 - (-lambda_1 * t).exp()) / h.eval(t))
        .fold(0.0f64, f64::max);
    (bound, c_h_hat - bound)
}

#[derive(Debug, Clone, Serialize)]
pub struct WeakMonotonicityReport {
    pub seminorm: f64,
    pub variation: f64,
    pub ratio: f64,
    /// ratio recomputed on the shifted positive parts `(f + n)_+`.
    pub truncation_ratios: Vec<(f64, f64)>,
    pub degenerate: bool,
}

/// `||f||_{1,Psi_1} / Var_{Psi_1}(f)` plus the truncation-stability ledger
/// used in its proof. Finiteness and refinement stability are the claims.
pub fn weak_monotonicity_ratio(hg: &HeatGrid, f: &Field, psi_1: &ScalingFn) -> WeakMonotonicityReport {
    let sem = besov_seminorm(hg, f, 1.0, psi_1).value;
    let var = variation(hg, f, psi_1);
    let (ratio, degenerate) = if var > 0.0 {
        (sem / var, false)
    } else if sem > 0.0 {
        (f64::INFINITY, true)
    } else {
        (0.0, false)
    };
    let mut truncation_ratios = Vec::new();
    for n in [1.0, 2.0, 4.0, 8.0] {
        let fn_field = Field::new(
            f.values()
                .iter()
                .map(|v| (v + n).max(0.0))
                .collect::<Vec<f64>>(),
        );
        let s = besov_seminorm(hg, &fn_field, 1.0, psi_1).value;
        let v = variation(hg, &fn_field, psi_1);
        truncation_ratios.push((n, if v > 0.0 { s / v } else { 0.0 }));
    }
    WeakMonotonicityReport {
        seminorm: sem,
        variation: var,
        ratio,
        truncation_ratios,
        degenerate,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VarPropertiesReport {
    /// slack of `Var(f+g) <= C (Var f + Var g)`.
    pub subadditivity_slack: f64,
    /// slack of `Var(fg) <= C (||f||_inf Var g + ||g||_inf Var f)`.
    pub leibniz_slack: f64,
    pub var_f: f64,
    pub var_g: f64,
    pub var_sum: f64,
    pub var_product: f64,
}

/// Quasi-subadditivity and the Leibniz-type bound with a supplied constant
/// (typically the empirical weak-monotonicity constant).
pub fn var_properties_check(
    hg: &HeatGrid,
    f: &Field,
    g: &Field,
    psi_1: &ScalingFn,
    c: f64,
) -> VarPropertiesReport {
    let var_f = variation(hg, f, psi_1);
    let var_g = variation(hg, g, psi_1);
    let var_sum = variation(hg, &f.plus(g), psi_1);
    let var_product = variation(hg, &f.times(g), psi_1);
    VarPropertiesReport {
        subadditivity_slack: c * (var_f + var_g) - var_sum,
        leibniz_slack: c * (f.linf_norm() * var_g + g.linf_norm() * var_f) - var_product,
        var_f,
        var_g,
        var_sum,
        var_product,
    }
}

/// `Osc(f)` against `Var(f)` for the degenerate exponent case.
pub fn oscillation_check(hg: &HeatGrid, f: &Field, psi_1: &ScalingFn) -> Result<(f64, f64)> {
    let osc = f.oscillation();
    let var = variation(hg, f, psi_1);
    if var == 0.0 {
        if osc > 1e-12 {
            return Err(Error::InvalidArgument(
                "nonconstant field with zero variation".into(),
            ));
        }
        return Ok((osc, 0.0));
    }
    Ok((osc, osc / var))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heat::spectral_decompose;
    use crate::probe::build_probes;
    use crate::spaces::{build_cycle, Edge, MMSpace};
    use approx::assert_relative_eq;

    fn cycle_grid(n: usize) -> (SpectralHeat, TGrid) {
        let h = spectral_decompose(build_cycle(n, 1.0).unwrap()).unwrap();
        let g = TGrid::default_for(h.space());
        (h, g)
    }

    #[test]
    fn tgrid_resolution_invariant() {
        assert!(TGrid::new(0.1, 100.0, 30).is_ok());
        assert!(TGrid::new(0.1, 100.0, 20).is_err());
        let g = TGrid::new(0.1, 100.0, 31).unwrap();
        assert_eq!(g.small_decade().len(), 11);
    }

    #[test]
    fn seminorm_vanishes_on_constants_and_scales() {
        let (heat, grid) = cycle_grid(24);
        let hg = HeatGrid::new(&heat, grid).unwrap();
        let h = ScalingFn::sigma(0.5, 0.5).unwrap();
        let c = Field::constant(24, 3.0);
        assert_eq!(besov_seminorm(&hg, &c, 1.0, &h).value, 0.0);

        let f = heat.eigenvector(2);
        let base = besov_seminorm(&hg, &f, 2.0, &h).value;
        let scaled = besov_seminorm(&hg, &f.scaled(-4.0), 2.0, &h).value;
        assert_relative_eq!(scaled, 4.0 * base, max_relative = 1e-9);
    }

    #[test]
    fn two_point_seminorm_closed_form() {
        // p=1, h(t)=t on the two-point chain: quotient(t) =
        // 2 mu1 mu2 |f1-f2| (1 - e^{-lambda t}) / (M t), maximal at the
        // smallest grid time.
        let (mu1, mu2, c) = (0.4, 1.1, 0.7);
        let space = MMSpace::from_graph(
            2,
            vec![Edge { i: 0, j: 1, conductance: c, length: 1.0 }],
            vec![mu1, mu2],
            Vec::new(),
            None,
            "two-point".into(),
        )
        .unwrap();
        let heat = spectral_decompose(space).unwrap();
        let grid = TGrid::new(0.01, 10.0, 31).unwrap();
        let hg = HeatGrid::new(&heat, grid).unwrap();
        let h = ScalingFn::sigma(1.0, 1.0).unwrap();
        let f = Field::new(vec![2.0, -1.0]);
        let lambda = c * (1.0 / mu1 + 1.0 / mu2);
        let m = mu1 + mu2;
        let expect = |t: f64| 2.0 * mu1 * mu2 * 3.0 * (1.0 - (-lambda * t).exp()) / (m * t);
        let got = besov_seminorm(&hg, &f, 1.0, &h);
        assert_relative_eq!(got.value, expect(0.01), max_relative = 1e-9);
        assert_relative_eq!(got.argmax_t, 0.01, max_relative = 1e-12);
    }

    #[test]
    fn limsup_bound_holds_on_probes() {
        let (heat, grid) = cycle_grid(32);
        let hg = HeatGrid::new(&heat, grid).unwrap();
        let h = ScalingFn::sigma(0.5, 0.5).unwrap();
        for (name, f) in build_probes(&heat, 3, None).iter() {
            for p in [1.0, 2.0] {
                let slack = limsup_characterization_check(&hg, f, p, &h);
                assert!(slack >= -1e-9, "{name} p={p} slack {slack}");
            }
        }
        let zero = Field::constant(32, 0.0);
        assert!(limsup_characterization_check(&hg, &zero, 1.0, &h) >= 0.0);
    }

    #[test]
    fn pseudo_poincare_exact_instance() {
        let (heat, grid) = cycle_grid(48);
        let hg = HeatGrid::new(&heat, grid).unwrap();
        for h in [
            ScalingFn::sigma(0.5, 0.5).unwrap(),
            ScalingFn::sigma(0.4, 0.7).unwrap(),
        ] {
            for (name, f) in build_probes(&heat, 11, None).iter() {
                for p in [1.0, 1.5, 2.0] {
                    let report = pseudo_poincare_check(&hg, f, p, &h).unwrap();
                    assert!(
                        report.worst_ratio <= 1.0 + 1e-9,
                        "{name} p={p}: ratio {}",
                        report.worst_ratio
                    );
                }
            }
        }
        // constant field: 0/0 convention
        let c = Field::constant(48, 5.0);
        let h = ScalingFn::sigma(0.5, 0.5).unwrap();
        assert_eq!(pseudo_poincare_check(&hg, &c, 1.0, &h).unwrap().worst_ratio, 0.0);
    }

    #[test]
    fn pseudo_poincare_eigenvector_spectral_oracle() {
        let (heat, grid) = cycle_grid(32);
        let mass = heat.space().mass().to_vec();
        let f = heat.eigenvector(3);
        let lambda = heat.eigenvalues()[3];
        for &t in grid.points() {
            let lhs = heat.apply(t, &f).minus(&f).lp_norm(2.0, &mass);
            let rhs = (1.0 - (-lambda * t).exp()) * f.lp_norm(2.0, &mass);
            assert_relative_eq!(lhs, rhs, max_relative = 1e-9, epsilon = 1e-12);
        }
    }

    #[test]
    fn variation_under_seminorm_and_refinement() {
        let h = ScalingFn::sigma(0.5, 0.5).unwrap();
        let mut per_n = Vec::new();
        for n in [64usize, 128] {
            let heat = spectral_decompose(build_cycle(n, 1.0).unwrap()).unwrap();
            let hg = HeatGrid::new(&heat, TGrid::default_for(heat.space())).unwrap();
            let arc: Vec<usize> = (0..n / 2).collect();
            let f = Field::indicator(n, &arc);
            let var = variation(&hg, &f, &h);
            let sem = besov_seminorm(&hg, &f, 1.0, &h).value;
            assert!(var <= sem + 1e-12, "liminf proxy above sup proxy");
            per_n.push(var);
        }
        let drift = (per_n[1] / per_n[0] - 1.0).abs();
        assert!(drift < 0.1, "half-cycle variation moved {drift:.3} under refinement");
    }

    #[test]
    fn perimeter_complement_symmetric() {
        let (heat, grid) = cycle_grid(40);
        let hg = HeatGrid::new(&heat, grid).unwrap();
        let h = ScalingFn::sigma(0.5, 0.5).unwrap();
        let set: Vec<usize> = (5..17).collect();
        let complement: Vec<usize> = (0..40).filter(|i| !set.contains(i)).collect();
        let a = perimeter(&hg, &set, &h);
        let b = perimeter(&hg, &complement, &h);
        assert_relative_eq!(a.seminorm_form, b.seminorm_form, max_relative = 1e-10);
        assert_relative_eq!(a.variation_form, b.variation_form, max_relative = 1e-10);

        let full = perimeter(&hg, &(0..40).collect::<Vec<_>>(), &h);
        assert_eq!(full.seminorm_form, 0.0);
        assert!(full.note.is_some());
    }

    #[test]
    fn coarea_indicator_scale_invariance() {
        let (heat, grid) = cycle_grid(32);
        let hg = HeatGrid::new(&heat, grid).unwrap();
        let h = ScalingFn::sigma(0.5, 0.5).unwrap();
        let set: Vec<usize> = (0..10).collect();
        let mut ratios = Vec::new();
        for c in [1.0, 5.0] {
            let f = Field::indicator(32, &set).scaled(c);
            let lambdas = lambda_grid(&f, 21);
            let report = coarea_check(&hg, &f, &h, &lambdas).unwrap();
            ratios.push(report.ratio);
        }
        assert_relative_eq!(ratios[0], ratios[1], max_relative = 1e-9);
    }

    #[test]
    fn coarea_zero_field() {
        let (heat, grid) = cycle_grid(16);
        let hg = HeatGrid::new(&heat, grid).unwrap();
        let h = ScalingFn::sigma(0.5, 0.5).unwrap();
        let f = Field::constant(16, 0.0);
        let report = coarea_check(&hg, &f, &h, &[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(report.variation, 0.0);
        assert_eq!(report.coarea_integral, 0.0);
    }

    #[test]
    fn cheeger_arc_oracle_on_cycle() {
        let n = 48;
        let heat = spectral_decompose(build_cycle(n, 1.0).unwrap().normalized()).unwrap();
        let grid = TGrid::default_for(heat.space());
        let hg = HeatGrid::new(&heat, grid).unwrap();
        let h = ScalingFn::sigma(0.5, 0.5).unwrap();

        // exhaustive arcs (by translation invariance, one start point per length)
        let mut arcs: Vec<Vec<usize>> = Vec::new();
        for len in 1..n / 2 {
            for start in 0..n {
                arcs.push((0..len).map(|k| (start + k) % n).collect());
            }
        }
        let (arc_min, arc_set) = cheeger_estimate(&hg, &h, &arcs).unwrap();

        let candidates = standard_cheeger_candidates(&heat, 5);
        let (family_min, _) = cheeger_estimate(&hg, &h, &candidates).unwrap();

        // the eigenvector sublevel family contains near-optimal arcs
        assert!(family_min >= arc_min - 1e-12);
        assert!(family_min <= arc_min * 1.05, "family {family_min} vs arcs {arc_min}");
        // minimizer is a near-half arc, and no singleton wins
        assert!(arc_set.len() >= n / 2 - 2);
        let singleton_quot = {
            let f = Field::indicator(n, &[0]);
            besov_seminorm(&hg, &f, 1.0, &h).value / heat.space().mass()[0]
        };
        assert!(singleton_quot > arc_min);
    }

    #[test]
    fn cheeger_requires_normalized_mass() {
        let (heat, grid) = cycle_grid(16);
        let hg = HeatGrid::new(&heat, grid).unwrap();
        let h = ScalingFn::sigma(0.5, 0.5).unwrap();
        assert!(cheeger_estimate(&hg, &h, &[vec![0, 1]]).is_err());
    }

    #[test]
    fn cheeger_spectral_bound_on_cycle() {
        let heat = spectral_decompose(build_cycle(32, 1.0).unwrap().normalized()).unwrap();
        let grid = TGrid::default_for(heat.space());
        let hg = HeatGrid::new(&heat, grid).unwrap();
        let h = ScalingFn::sigma(0.5, 0.5).unwrap();
        let candidates = standard_cheeger_candidates(&heat, 5);
        let (c_hat, _) = cheeger_estimate(&hg, &h, &candidates).unwrap();
        let (bound, slack) = cheeger_lower_bound_check(c_hat, heat.lambda_1(), &h, hg.grid());
        assert!(bound > 0.0);
        assert!(slack >= -1e-9, "Cheeger bound violated by {slack}");

        // enlarging the family can only lower the estimate, never below the bound
        let mut enlarged = candidates.clone();
        enlarged.extend((0..16).map(|k| (0..(k + 1)).collect::<Vec<usize>>()));
        let (c_hat2, _) = cheeger_estimate(&hg, &h, &enlarged).unwrap();
        assert!(c_hat2 <= c_hat + 1e-12);
        assert!(c_hat2 - bound >= -1e-9);
    }

    #[test]
    fn weak_monotonicity_on_cycle_indicators() {
        let h = ScalingFn::sigma(0.5, 0.5).unwrap();
        let mut ratios = Vec::new();
        for n in [64usize, 128] {
            let heat = spectral_decompose(build_cycle(n, 1.0).unwrap()).unwrap();
            let hg = HeatGrid::new(&heat, TGrid::default_for(heat.space())).unwrap();
            let arc: Vec<usize> = (0..n / 4).collect();
            let report = weak_monotonicity_ratio(&hg, &Field::indicator(n, &arc), &h);
            assert!(!report.degenerate);
            assert!(report.ratio <= 4.0, "ratio {} exceeds 4", report.ratio);
            // truncations (f+n)_+ shift by constants, preserving the ratio
            for &(_, r) in &report.truncation_ratios {
                assert_relative_eq!(r, report.ratio, max_relative = 1e-6);
            }
            ratios.push(report.ratio);
        }
        let drift = ratios[1] / ratios[0];
        assert!(drift < 2.0 && drift > 0.5, "ratio unstable under refinement: {drift}");
    }

    #[test]
    fn weak_monotonicity_constant_field() {
        let (heat, grid) = cycle_grid(16);
        let hg = HeatGrid::new(&heat, grid).unwrap();
        let h = ScalingFn::sigma(0.5, 0.5).unwrap();
        let report = weak_monotonicity_ratio(&hg, &Field::constant(16, 2.0), &h);
        assert_eq!(report.ratio, 0.0);
    }

    #[test]
    fn var_properties_trivial_and_random() {
        let (heat, grid) = cycle_grid(32);
        let hg = HeatGrid::new(&heat, grid).unwrap();
        let h = ScalingFn::sigma(0.5, 0.5).unwrap();
        let f = heat.eigenvector(1);
        let zero = Field::constant(32, 0.0);
        let r = var_properties_check(&hg, &f, &zero, &h, 1.0);
        assert!(r.subadditivity_slack >= -1e-12, "Var(f+0) = Var(f)");
        // f = g: Var(2f) = 2 Var(f) <= 2C Var(f) for C >= 1
        let r2 = var_properties_check(&hg, &f, &f, &h, 1.0);
        assert_relative_eq!(r2.var_sum, 2.0 * r2.var_f, max_relative = 1e-9);
        assert!(r2.subadditivity_slack >= -1e-12);

        let probes = build_probes(&heat, 9, None);
        let (na, fa) = &probes.probes[20];
        let (nb, fb) = &probes.probes[21];
        let c = 4.0;
        let r3 = var_properties_check(&hg, fa, fb, &h, c);
        assert!(r3.subadditivity_slack >= 0.0, "{na}+{nb}: {:?}", r3);
        assert!(r3.leibniz_slack >= 0.0, "{na}*{nb}: {:?}", r3);
    }

    #[test]
    fn oscillation_trivial_cases() {
        let (heat, grid) = cycle_grid(24);
        let hg = HeatGrid::new(&heat, grid).unwrap();
        let h = ScalingFn::sigma(0.5, 0.5).unwrap();
        let c = Field::constant(24, 1.0);
        assert_eq!(oscillation_check(&hg, &c, &h).unwrap().0, 0.0);
        let ind = Field::indicator(24, &[0, 1, 2]);
        let (osc, ratio) = oscillation_check(&hg, &ind, &h).unwrap();
        assert_eq!(osc, 1.0);
        assert!(ratio.is_finite() && ratio > 0.0);
    }

    #[test]
    fn seminorm_triangle_inequality() {
        let (heat, grid) = cycle_grid(32);
        let hg = HeatGrid::new(&heat, grid).unwrap();
        let h = ScalingFn::sigma(0.5, 0.5).unwrap();
        let probes = build_probes(&heat, 17, None);
        for p in [1.0, 2.0] {
            for pair in probes.probes.chunks(2) {
                if pair.len() < 2 {
                    continue;
                }
                let (a, b) = (&pair[0].1, &pair[1].1);
                let lhs = besov_seminorm(&hg, &a.plus(b), p, &h).value;
                let rhs = besov_seminorm(&hg, a, p, &h).value
                    + besov_seminorm(&hg, b, p, &h).value;
                assert!(lhs <= rhs + 1e-9, "triangle violated: {lhs} > {rhs}");
            }
        }
    }
}
