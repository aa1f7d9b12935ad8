//! Dirichlet form assembly, spectral heat semigroup, heat kernel, spectral
//! gap, two-regime kernel fitting and regularization-constant estimation.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::scale::{kernel_rate_fn, TwoScaleFn};
use crate::spaces::MMSpace;

/// Eigendecomposition of the weighted Laplacian
/// `L f(x) = (1/mu_x) sum_y c_xy (f(x) - f(y))`, stored as a mu-orthonormal
/// basis. The semigroup is conservative by construction.
#[derive(Debug, Clone)]
pub struct SpectralHeat {
    space: MMSpace,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

pub fn spectral_decompose(space: MMSpace) -> Result<SpectralHeat> {
    let n = space.n();
    let mass = space.mass().to_vec();

    // Symmetrize: M = D^{-1/2} (diag(sum c) - C) D^{-1/2}; then map the
    // orthonormal eigenvectors back with D^{-1/2} to get mu-orthonormality.
    let mut a: DMatrix<f64> = DMatrix::zeros(n, n);
    for e in space.edges() {
        a[(e.i, e.j)] -= e.conductance;
        a[(e.j, e.i)] -= e.conductance;
        a[(e.i, e.i)] += e.conductance;
        a[(e.j, e.j)] += e.conductance;
    }
    let dinv_sqrt: Vec<f64> = mass.iter().map(|m| 1.0 / m.sqrt()).collect();
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] *= dinv_sqrt[i] * dinv_sqrt[j];
        }
    }

    let eig = nalgebra::SymmetricEigen::new(a);
    let raw_values: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| raw_values[i].total_cmp(&raw_values[j]));

    let mut eigenvalues: DVector<f64> = DVector::zeros(n);
    let mut eigenvectors: DMatrix<f64> = DMatrix::zeros(n, n);
    for (k, &idx) in order.iter().enumerate() {
        eigenvalues[k] = raw_values[idx];
        for x in 0..n {
            eigenvectors[(x, k)] = eig.eigenvectors[(x, idx)] * dinv_sqrt[x];
        }
        // deterministic sign: largest-magnitude component positive
        let mut pivot = 0usize;
        for x in 0..n {
            if eigenvectors[(x, k)].abs() > eigenvectors[(pivot, k)].abs() {
                pivot = x;
            }
        }
        if eigenvectors[(pivot, k)] < 0.0 {
            for x in 0..n {
                eigenvectors[(x, k)] = -eigenvectors[(x, k)];
            }
        }
    }

    let lambda_max = eigenvalues[n - 1].max(1.0);
    if eigenvalues[0].abs() > 1e-10 * lambda_max {
        return Err(Error::Eigensolver(format!(
            "ground eigenvalue {:.3e} not numerically zero; is the graph connected?",
            eigenvalues[0]
        )));
    }
    if n > 1 && eigenvalues[1].abs() < 1e-10 * lambda_max {
        return Err(Error::Disconnected { components: 2 });
    }
    // lambda_0 is exactly zero for a connected graph; remove its roundoff so
    // the constant mode cannot drift over long times.
    eigenvalues[0] = 0.0;

    let h = SpectralHeat {
        space,
        eigenvalues,
        eigenvectors,
    };
    let c = h.eigenvectors.column(0);
    let spread = c.max() - c.min();
    if spread.abs() > 1e-9 * c.amax() {
        return Err(Error::Eigensolver(format!(
            "ground eigenvector not constant (spread {spread:.3e})"
        )));
    }
    Ok(h)
}

impl SpectralHeat {
    pub fn space(&self) -> &MMSpace {
        &self.space
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// Spectral gap (first nonzero eigenvalue).
    pub fn lambda_1(&self) -> f64 {
        self.eigenvalues[1]
    }

    /// k-th eigenvector as a field (mu-orthonormal basis).
    pub fn eigenvector(&self, k: usize) -> Field {
        Field::new(self.eigenvectors.column(k).iter().cloned().collect())
    }

    /// Worst absolute defect of mu-orthonormality over all basis pairs.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.space.n();
        let mass = self.space.mass();
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in a..n {
                let dot: f64 = (0..n)
                    .map(|x| self.eigenvectors[(x, a)] * self.eigenvectors[(x, b)] * mass[x])
                    .sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// Kernel value `p_t(x,y) = sum_k e^{-lambda_k t} phi_k(x) phi_k(y)`
    /// (density with respect to mu).
    pub fn heat_kernel(&self, t: f64, x: usize, y: usize) -> f64 {
        assert!(t > 0.0, "heat kernel needs t > 0");
        (0..self.space.n())
            .map(|k| {
                (-self.eigenvalues[k] * t).exp()
                    * self.eigenvectors[(x, k)]
                    * self.eigenvectors[(y, k)]
            })
            .sum()
    }

    /// Full kernel matrix at time `t`. Values in `[-tau, 0)` with
    /// `tau = 1e-12 * max(1, max_x p_t(x,x))` are clamped to zero; anything
    /// more negative signals an assembly bug and aborts.
    pub fn kernel_matrix(&self, t: f64) -> Result<DMatrix<f64>> {
        assert!(t > 0.0, "heat kernel needs t > 0");
        let n = self.space.n();
        let damp = DVector::from_iterator(
            n,
            self.eigenvalues.iter().map(|&l| (-l * t / 2.0).exp()),
        );
        let mut w = self.eigenvectors.clone();
        for k in 0..n {
            let d = damp[k];
            for x in 0..n {
                w[(x, k)] *= d;
            }
        }
        let mut kernel = &w * w.transpose();
        let diag_max = (0..n).map(|x| kernel[(x, x)]).fold(1.0f64, f64::max);
        let threshold = 1e-12 * diag_max;
        for v in kernel.iter_mut() {
            if *v < 0.0 {
                if *v < -threshold {
                    return Err(Error::KernelNegative {
                        value: *v,
                        t,
                        threshold,
                    });
                }
                *v = 0.0;
            }
        }
        Ok(kernel)
    }

    /// `P_t f` through the spectral representation; `P_0 f = f`.
    pub fn apply(&self, t: f64, f: &Field) -> Field {
        assert!(t >= 0.0);
        let n = self.space.n();
        let mass = self.space.mass();
        let fv = DVector::from_iterator(n, f.values().iter().cloned());
        let weighted = DVector::from_iterator(n, (0..n).map(|x| fv[x] * mass[x]));
        let mut coeffs = self.eigenvectors.transpose() * weighted;
        for k in 0..n {
            coeffs[k] *= (-self.eigenvalues[k] * t).exp();
        }
        let out = &self.eigenvectors * coeffs;
        Field::new(out.iter().cloned().collect())
    }
}

/// Dirichlet energy `sum_edges c_xy (f(x) - f(y))^2`, computed from the edge
/// list rather than the spectrum.
pub fn dirichlet_energy(space: &MMSpace, f: &Field) -> f64 {
    space
        .edges()
        .iter()
        .map(|e| e.conductance * (f.values()[e.i] - f.values()[e.j]).powi(2))
        .sum()
}

/// Ultracontractivity profile `V(t) = 1 / max_{x,y} p_t(x,y)`, the optimal
/// constant in the L1 -> Linf smoothing bound on a finite space.
#[derive(Debug, Clone, Serialize)]
pub struct VProfile {
    pub rows: Vec<(f64, f64)>,
}

impl VProfile {
    /// Log-log interpolation, clamped to the tabulated range.
    pub fn eval(&self, t: f64) -> f64 {
        let rows = &self.rows;
        if t <= rows[0].0 {
            return rows[0].1;
        }
        if t >= rows[rows.len() - 1].0 {
            return rows[rows.len() - 1].1;
        }
        let i = rows.partition_point(|r| r.0 < t);
        let (a, b) = (rows[i - 1], rows[i]);
        let w = (t.ln() - a.0.ln()) / (b.0.ln() - a.0.ln());
        (a.1.ln() * (1.0 - w) + b.1.ln() * w).exp()
    }

    /// Largest tabulated value at or below `t`: a conservative lower bound
    /// for the nondecreasing profile between nodes.
    pub fn floor(&self, t: f64) -> f64 {
        let rows = &self.rows;
        if t <= rows[0].0 {
            return rows[0].1;
        }
        let i = rows.partition_point(|r| r.0 <= t);
        rows[i - 1].1
    }

    /// `V^{-1}(y) = inf { s : V(s) > y }` on the tabulated range.
    pub fn inverse(&self, y: f64) -> f64 {
        let rows = &self.rows;
        if y < rows[0].1 {
            return rows[0].0;
        }
        if y >= rows[rows.len() - 1].1 {
            return rows[rows.len() - 1].0;
        }
        let i = rows.partition_point(|r| r.1 <= y);
        let (a, b) = (rows[i - 1], rows[i]);
        let w = (y.ln() - a.1.ln()) / (b.1.ln() - a.1.ln());
        (a.0.ln() * (1.0 - w) + b.0.ln() * w).exp()
    }
}

pub fn ultracontractivity_profile(h: &SpectralHeat, t_grid: &[f64]) -> Result<VProfile> {
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let k = h.kernel_matrix(t)?;
        let max = k.iter().cloned().fold(0.0f64, f64::max);
        rows.push((t, 1.0 / max));
    }
    Ok(VProfile { rows })
}

/// Two-regime kernel fit: broken-slope regression of the on-diagonal decay
/// and exponential-rate constants from off-diagonal values.
#[derive(Debug, Clone, Serialize)]
pub struct HKEFit {
    pub beta_small: Option<f64>,
    pub beta_large: Option<f64>,
    pub slope_small: f64,
    pub slope_large: f64,
    pub break_t: f64,
    pub on_diag_const: f64,
    pub on_diag_residual: f64,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub off_diag_residual: f64,
    pub window: (f64, f64),
}

/// Fits the on-diagonal decay over the window between the lattice time and
/// the mixing time, then the off-diagonal exponential rates on `pairs`.
/// `alpha` are the volume exponents used to convert slopes to walk exponents;
/// `betas` fix the structural rate function for the off-diagonal fit.
pub fn hke_fit(
    h: &SpectralHeat,
    t_grid: &[f64],
    pairs: &[(usize, usize)],
    sample_points: &[usize],
    alpha: (f64, f64),
    betas: (f64, f64),
) -> Result<HKEFit> {
    if t_grid.len() < 8 {
        return Err(Error::InvalidArgument("need at least 8 grid times".into()));
    }
    let space = h.space();
    let equilibrium = 1.0 / space.total_mass();
    // lattice relaxation scale: slowest single-vertex rate
    let mut rates = vec![0.0f64; space.n()];
    for e in space.edges() {
        rates[e.i] += e.conductance / space.mass()[e.i];
        rates[e.j] += e.conductance / space.mass()[e.j];
    }
    let t_lattice = rates
        .iter()
        .map(|&r| 1.0 / r)
        .fold(0.0f64, f64::max);

    let mut data: Vec<(f64, f64)> = Vec::new();
    for &t in t_grid {
        if t < t_lattice {
            continue;
        }
        let mean: f64 = sample_points
            .iter()
            .map(|&x| h.heat_kernel(t, x, x))
            .sum::<f64>()
            / sample_points.len() as f64;
        if mean < 1.2 * equilibrium {
            continue;
        }
        data.push((t.ln(), mean.ln()));
    }
    if data.len() < 6 {
        return Err(Error::InvalidArgument(format!(
            "only {} usable grid times between lattice scale {t_lattice:.3e} and mixing",
            data.len()
        )));
    }

    // broken regression: best split minimizing total squared residual
    let single = linfit(&data).unwrap();
    let mut best: Option<(usize, (f64, f64, f64), (f64, f64, f64))> = None;
    for split in 3..data.len().saturating_sub(3) {
        let left = linfit(&data[..split]).unwrap();
        let right = linfit(&data[split..]).unwrap();
        let sse = left.2 + right.2;
        if best
            .as_ref()
            .map(|(_, l, r)| sse < l.2 + r.2)
            .unwrap_or(true)
        {
            best = Some((split, left, right));
        }
    }
    let (slope_small, slope_large, break_t, residual, intercept) = match best {
        Some((split, l, r)) if l.2 + r.2 < 0.95 * single.2 => {
            (l.0, r.0, data[split].0.exp(), (l.2 + r.2), l.1)
        }
        _ => (single.0, single.0, f64::INFINITY, single.2, single.1),
    };
    let beta_small = if slope_small < -1e-6 {
        Some(-alpha.0 / slope_small)
    } else {
        None
    };
    let beta_large = if slope_large < -1e-6 {
        Some(-alpha.1 / slope_large)
    } else {
        None
    };

    // off-diagonal: log p ~ log C + c * (-t sigma_rate(d/t)), split at t = d
    let rate = kernel_rate_fn(betas.0, betas.1)?;
    let v_sigma = TwoScaleFn::new(alpha.0 / betas.0, alpha.1 / betas.1)?;
    let mut below: Vec<(f64, f64)> = Vec::new();
    let mut above: Vec<(f64, f64)> = Vec::new();
    for &(x, y) in pairs {
        let d = space.dist(x, y);
        if d <= 0.0 {
            continue;
        }
        for &t in t_grid {
            let p = h.heat_kernel(t, x, y);
            if p <= 0.0 {
                continue;
            }
            let xval = -t * rate.eval(d / t);
            if xval < -700.0 {
                continue;
            }
            let yval = (p * v_sigma.eval(t)).ln();
            if t < d {
                below.push((xval, yval));
            } else {
                above.push((xval, yval));
            }
        }
    }
    let fit_c = |pts: &[(f64, f64)]| -> (Option<f64>, f64) {
        match linfit(pts) {
            Some((slope, _, res)) if pts.len() >= 4 => (Some(slope), res / pts.len() as f64),
            _ => (None, 0.0),
        }
    };
    let (c1, r1) = fit_c(&below);
    let (c2, r2) = fit_c(&above);

    Ok(HKEFit {
        beta_small,
        beta_large,
        slope_small,
        slope_large,
        break_t,
        on_diag_const: intercept.exp(),
        on_diag_residual: (residual / data.len() as f64).sqrt(),
        c1,
        c2,
        off_diag_residual: r1.max(r2).sqrt(),
        window: (data[0].0.exp(), data[data.len() - 1].0.exp()),
    })
}

fn linfit(pts: &[(f64, f64)]) -> Option<(f64, f64, f64)> {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return None;
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let res: f64 = pts
        .iter()
        .map(|&(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    Some((slope, intercept, res))
}

/// Empirical regularization constant: the supremum over probes, grid times
/// and point pairs of `|P_t f(x) - P_t f(y)| sigma_{k/b}(t) / (sigma_k(d) ||f||_inf)`.
#[derive(Debug, Clone, Serialize)]
pub struct WbeEstimate {
    pub constant: f64,
    pub argmax_probe: String,
    pub argmax_t: f64,
    pub argmax_pair: (usize, usize),
}

pub fn wbe_estimate(
    h: &SpectralHeat,
    probes: &[(String, Field)],
    t_grid: &[f64],
    kappa: (f64, f64),
    betas: (f64, f64),
) -> Result<WbeEstimate> {
    if !(kappa.0 > 0.0 && kappa.1 > 0.0) {
        return Err(Error::ExponentConstraint("kappa must be positive".into()));
    }
    let space_sigma = TwoScaleFn::new(kappa.0, kappa.1)?;
    let time_sigma = TwoScaleFn::new(kappa.0 / betas.0, kappa.1 / betas.1)?;
    let n = h.space().n();
    let mut best = WbeEstimate {
        constant: 0.0,
        argmax_probe: String::new(),
        argmax_t: 0.0,
        argmax_pair: (0, 0),
    };
    for (name, f) in probes {
        let sup = f.linf_norm();
        if sup == 0.0 {
            continue;
        }
        for &t in t_grid {
            let pf = h.apply(t, f);
            let damp = time_sigma.eval(t) / sup;
            for x in 0..n {
                for y in (x + 1)..n {
                    let d = h.space().dist(x, y);
                    if d <= 0.0 {
                        continue;
                    }
                    let value =
                        (pf.values()[x] - pf.values()[y]).abs() * damp / space_sigma.eval(d);
                    if value > best.constant {
                        best = WbeEstimate {
                            constant: value,
                            argmax_probe: name.clone(),
                            argmax_t: t,
                            argmax_pair: (x, y),
                        };
                    }
                }
            }
        }
    }
    Ok(best)
}
