//! Finite metric measure spaces: cycles, Sierpinski-gasket pre-fractals with
//! truncated blow-ups, and l1-metric product spaces.

use std::cmp::Reverse;
use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scale::TwoScaleFn;

pub const MAX_POINTS: usize = 4096;

/// Finite point set with a geodesic metric, strictly positive masses and
/// symmetric edge conductances (the Dirichlet form data). Immutable after
/// construction.
#[derive(Debug, Clone)]
pub struct MMSpace {
    n: usize,
    dist: DMatrix<f64>,
    mass: Vec<f64>,
    edges: Vec<Edge>,
    boundary: Vec<usize>,
    labels: Option<Vec<String>>,
    descriptor: String,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub conductance: f64,
    pub length: f64,
}

/// Serialized form: point count, edge list, masses.
#[derive(Debug, Serialize, Deserialize)]
struct SpaceFile {
    points: usize,
    edges: Vec<(usize, usize, f64, f64)>,
    mass: Vec<f64>,
    #[serde(default)]
    boundary: Vec<usize>,
    #[serde(default)]
    labels: Option<Vec<String>>,
    #[serde(default)]
    descriptor: String,
}

impl MMSpace {
    /// Builds from graph data: shortest-path metric, connectivity check.
    pub fn from_graph(
        n: usize,
        edges: Vec<Edge>,
        mass: Vec<f64>,
        boundary: Vec<usize>,
        labels: Option<Vec<String>>,
        descriptor: String,
    ) -> Result<Self> {
        if n == 0 || mass.len() != n {
            return Err(Error::InvalidArgument("need n > 0 masses".into()));
        }
        if n > MAX_POINTS {
            return Err(Error::SizeOverflow { n, max: MAX_POINTS });
        }
        if mass.iter().any(|&m| !(m > 0.0 && m.is_finite())) {
            return Err(Error::InvalidArgument("masses must be strictly positive".into()));
        }
        for e in &edges {
            if e.i >= n || e.j >= n || e.i == e.j {
                return Err(Error::InvalidArgument(format!("bad edge ({}, {})", e.i, e.j)));
            }
            if !(e.conductance >= 0.0 && e.length > 0.0) {
                return Err(Error::InvalidArgument(
                    "edges need nonnegative conductance and positive length".into(),
                ));
            }
        }
        let dist = shortest_paths(n, &edges)?;
        Ok(Self {
            n,
            dist,
            mass,
            edges,
            boundary,
            labels,
            descriptor,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[(i, j)]
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().cloned().fold(0.0, f64::max)
    }

    pub fn min_edge_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).fold(f64::INFINITY, f64::min)
    }

    pub fn median_edge_length(&self) -> f64 {
        let mut lens: Vec<f64> = self.edges.iter().map(|e| e.length).collect();
        lens.sort_by(|a, b| a.partial_cmp(b).unwrap());
        lens[lens.len() / 2]
    }

    /// Open metric ball `{y : d(x,y) < r}`.
    pub fn ball(&self, x: usize, r: f64) -> Vec<usize> {
        (0..self.n).filter(|&y| self.dist[(x, y)] < r).collect()
    }

    pub fn ball_mass(&self, x: usize, r: f64) -> f64 {
        (0..self.n)
            .filter(|&y| self.dist[(x, y)] < r)
            .map(|y| self.mass[y])
            .sum()
    }

    /// Mass-normalized copy. Conductances are scaled along with the masses so
    /// the generator, and hence the spectrum, is unchanged.
    pub fn normalized(&self) -> MMSpace {
        let total = self.total_mass();
        let mut out = self.clone();
        for m in &mut out.mass {
            *m /= total;
        }
        for e in &mut out.edges {
            e.conductance /= total;
        }
        out.descriptor = format!("{} (normalized)", self.descriptor);
        out
    }

    /// Points at least `frac * diameter` away from every truncation-boundary
    /// point; all points when there is no boundary.
    pub fn core_mask(&self, frac: f64) -> Vec<bool> {
        if self.boundary.is_empty() {
            return vec![true; self.n];
        }
        let cut = frac * self.diameter();
        (0..self.n)
            .map(|x| self.boundary.iter().all(|&b| self.dist[(x, b)] >= cut))
            .collect()
    }

    /// Worst triangle-inequality violation over seeded random triples.
    pub fn triangle_defect(&self, triples: usize, seed: u64) -> f64 {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        for _ in 0..triples {
            let a = rng.gen_range(0..self.n);
            let b = rng.gen_range(0..self.n);
            let c = rng.gen_range(0..self.n);
            worst = worst.max(self.dist[(a, b)] - self.dist[(a, c)] - self.dist[(c, b)]);
        }
        worst
    }

    /// Empirical volume-doubling constant `sup mu(B(x,2r)) / mu(B(x,r))` over
    /// all points and a log grid of radii.
    pub fn doubling_constant(&self, radii: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for x in 0..self.n {
            for &r in radii {
                worst = worst.max(self.ball_mass(x, 2.0 * r) / self.ball_mass(x, r));
            }
        }
        worst
    }

    pub fn to_json(&self) -> Result<String> {
        let file = SpaceFile {
            points: self.n,
            edges: self
                .edges
                .iter()
                .map(|e| (e.i, e.j, e.conductance, e.length))
                .collect(),
            mass: self.mass.clone(),
            boundary: self.boundary.clone(),
            labels: self.labels.clone(),
            descriptor: self.descriptor.clone(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SpaceFile = serde_json::from_str(text)?;
        let edges = file
            .edges
            .into_iter()
            .map(|(i, j, conductance, length)| Edge {
                i,
                j,
                conductance,
                length,
            })
            .collect();
        MMSpace::from_graph(
            file.points,
            edges,
            file.mass,
            file.boundary,
            file.labels,
            file.descriptor,
        )
    }
}

fn shortest_paths(n: usize, edges: &[Edge]) -> Result<DMatrix<f64>> {
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for e in edges {
        adj[e.i].push((e.j, e.length));
        adj[e.j].push((e.i, e.length));
    }
    let mut dist = DMatrix::from_element(n, n, f64::INFINITY);
    let mut heap = std::collections::BinaryHeap::new();
    for src in 0..n {
        dist[(src, src)] = 0.0;
        heap.clear();
        heap.push(Reverse((OrdF64(0.0), src)));
        while let Some(Reverse((OrdF64(d), u))) = heap.pop() {
            if d > dist[(src, u)] {
                continue;
            }
            for &(v, len) in &adj[u] {
                let nd = d + len;
                if nd < dist[(src, v)] {
                    dist[(src, v)] = nd;
                    heap.push(Reverse((OrdF64(nd), v)));
                }
            }
        }
    }
    let unreachable = (0..n).filter(|&j| !dist[(0, j)].is_finite()).count();
    if unreachable > 0 {
        return Err(Error::Disconnected {
            components: unreachable + 1,
        });
    }
    // enforce exact symmetry against Dijkstra roundoff asymmetry
    let mut sym = dist.clone();
    for i in 0..n {
        for j in 0..i {
            let d = 0.5 * (dist[(i, j)] + dist[(j, i)]);
            sym[(i, j)] = d;
            sym[(j, i)] = d;
        }
    }
    Ok(sym)
}

#[derive(PartialEq, PartialOrd)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// n-cycle with uniform masses `edge_length` and conductances `1/edge_length`,
/// so the generator matches the second difference quotient on the circle of
/// circumference `n * edge_length`.
pub fn build_cycle(n: usize, edge_length: f64) -> Result<MMSpace> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("cycle needs n >= 3, got {n}")));
    }
    if !(edge_length > 0.0) {
        return Err(Error::InvalidArgument("edge length must be positive".into()));
    }
    let edges = (0..n)
        .map(|i| Edge {
            i,
            j: (i + 1) % n,
            conductance: 1.0 / edge_length,
            length: edge_length,
        })
        .collect();
    MMSpace::from_graph(
        n,
        edges,
        vec![edge_length; n],
        Vec::new(),
        None,
        format!("cycle:{n},{edge_length}"),
    )
}

/// Self-similar scaling knobs for the gasket Dirichlet form. The defaults are
/// the standard resistance factor 5/3 per level and measure weight 1/3 per
/// cell; they are configuration, not constants baked into the geometry.
#[derive(Debug, Clone, Copy)]
pub struct GasketConfig {
    pub conductance_scale: f64,
    pub mass_scale: f64,
}

impl Default for GasketConfig {
    fn default() -> Self {
        Self {
            conductance_scale: 5.0 / 3.0,
            mass_scale: 1.0 / 3.0,
        }
    }
}

pub fn build_gasket(level: usize, blowup: usize) -> Result<MMSpace> {
    build_gasket_with(level, blowup, GasketConfig::default())
}

/// Level-`level` pre-fractal gasket, blown up `blowup` times (truncated).
///
/// The blow-up is realized as a chain of `3^blowup` unit gaskets glued corner
/// to corner: each unit cell keeps diameter 1, mass 1 and the standard dyadic
/// subdivision, while the whole object has diameter and mass `3^blowup`. The
/// local scaling inside a cell and the global scaling along the chain then
/// genuinely differ; the chain ends are the truncation boundary.
pub fn build_gasket_with(level: usize, blowup: usize, config: GasketConfig) -> Result<MMSpace> {
    if level < 1 {
        return Err(Error::InvalidArgument("gasket level must be >= 1".into()));
    }
    let copies = 3usize
        .checked_pow(blowup as u32)
        .ok_or(Error::SizeOverflow { n: usize::MAX, max: MAX_POINTS })?;
    let cell_points = 3 * (3usize.pow(level as u32) + 1) / 2;
    let n_estimate = copies
        .checked_mul(cell_points)
        .map(|t| t - (copies - 1))
        .ok_or(Error::SizeOverflow { n: usize::MAX, max: MAX_POINTS })?;
    if n_estimate > MAX_POINTS {
        return Err(Error::SizeOverflow {
            n: n_estimate,
            max: MAX_POINTS,
        });
    }

    // Lattice coordinates (a, b) for a*(1,0) + b*(1/2, sqrt(3)/2); every
    // subdivision midpoint stays integral because sides are powers of two.
    // Unit cell c spans [c*side, (c+1)*side] along the first axis, so
    // neighboring cells share a corner vertex.
    let side = 1i64 << level;
    let mut index: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    let mut cells: Vec<[(i64, i64); 3]> = Vec::new();
    for c in 0..copies as i64 {
        let top = [(c * side, 0i64), ((c + 1) * side, 0i64), (c * side, side)];
        subdivide(top, level, &mut cells);
    }
    for cell in &cells {
        for &p in cell {
            let next = index.len();
            index.entry(p).or_insert(next);
        }
    }
    let n = index.len();
    debug_assert_eq!(n, n_estimate);

    let edge_length = 1.0 / 2f64.powi(level as i32);
    let conductance = config.conductance_scale.powi(level as i32);
    let cell_mass = config.mass_scale.powi(level as i32);

    let mut mass = vec![0.0; n];
    let mut edges = Vec::with_capacity(3 * cells.len());
    for cell in &cells {
        let ids: Vec<usize> = cell.iter().map(|p| index[p]).collect();
        for v in &ids {
            mass[*v] += cell_mass / 3.0;
        }
        for (a, b) in [(0, 1), (1, 2), (0, 2)] {
            edges.push(Edge {
                i: ids[a].min(ids[b]),
                j: ids[a].max(ids[b]),
                conductance,
                length: edge_length,
            });
        }
    }
    let boundary = if blowup == 0 {
        vec![
            index[&(0, 0)],
            index[&(side, 0)],
            index[&(0, side)],
        ]
    } else {
        vec![index[&(0, 0)], index[&(copies as i64 * side, 0)]]
    };
    MMSpace::from_graph(
        n,
        edges,
        mass,
        boundary,
        None,
        format!("gasket:{level},{blowup}"),
    )
}

fn subdivide(cell: [(i64, i64); 3], depth: usize, out: &mut Vec<[(i64, i64); 3]>) {
    if depth == 0 {
        out.push(cell);
        return;
    }
    let [p0, p1, p2] = cell;
    let mid = |a: (i64, i64), b: (i64, i64)| ((a.0 + b.0) / 2, (a.1 + b.1) / 2);
    let (m01, m12, m02) = (mid(p0, p1), mid(p1, p2), mid(p0, p2));
    subdivide([p0, m01, m02], depth - 1, out);
    subdivide([m01, p1, m12], depth - 1, out);
    subdivide([m02, m12, p2], depth - 1, out);
}

/// `copies`-fold product with the l1 metric, product masses, and
/// Kronecker-sum conductances so the product semigroup factorizes.
pub fn build_product(x: &MMSpace, copies: usize) -> Result<MMSpace> {
    if copies == 0 {
        return Err(Error::InvalidArgument("copies must be >= 1".into()));
    }
    if copies == 1 {
        return Ok(x.clone());
    }
    let n = x.n();
    let total = n
        .checked_pow(copies as u32)
        .filter(|&t| t <= MAX_POINTS)
        .ok_or(Error::SizeOverflow {
            n: usize::MAX,
            max: MAX_POINTS,
        })?;

    let decode = |mut idx: usize| -> Vec<usize> {
        let mut coords = Vec::with_capacity(copies);
        for _ in 0..copies {
            coords.push(idx % n);
            idx /= n;
        }
        coords
    };

    let mut mass = Vec::with_capacity(total);
    for idx in 0..total {
        let coords = decode(idx);
        mass.push(coords.iter().map(|&c| x.mass[c]).product());
    }

    let mut edges = Vec::new();
    for idx in 0..total {
        let coords = decode(idx);
        for (axis, &c) in coords.iter().enumerate() {
            let stride = n.pow(axis as u32);
            // weight = product of masses over the other coordinates
            let weight: f64 = coords
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != axis)
                .map(|(_, &cc)| x.mass[cc])
                .product();
            for e in &x.edges {
                // emitted once per factor edge: at the tuple whose axis digit is e.i
                if e.i == c {
                    let other = idx - c * stride + e.j * stride;
                    edges.push(Edge {
                        i: idx.min(other),
                        j: idx.max(other),
                        conductance: e.conductance * weight,
                        length: e.length,
                    });
                }
            }
        }
    }

    let factor_boundary: std::collections::BTreeSet<usize> =
        x.boundary.iter().copied().collect();
    let boundary = (0..total)
        .filter(|&idx| decode(idx).iter().any(|c| factor_boundary.contains(c)))
        .collect();

    let mut space = MMSpace::from_graph(
        total,
        edges,
        mass,
        boundary,
        None,
        format!("({})^{copies}", x.descriptor),
    )?;
    // The graph metric on the Kronecker construction is exactly the l1 sum of
    // factor distances; install it directly to avoid Dijkstra roundoff.
    for a in 0..total {
        let ca = decode(a);
        for b in 0..total {
            let cb = decode(b);
            let d: f64 = ca.iter().zip(&cb).map(|(&i, &j)| x.dist[(i, j)]).sum();
            space.dist[(a, b)] = d;
        }
    }
    Ok(space)
}

/// Two-regime fit of `log mu(B(x,r))` against `log r`, split at `r_split`.
#[derive(Debug, Clone, Serialize)]
pub struct VolumeFit {
    pub alpha_small: Option<f64>,
    pub alpha_large: Option<f64>,
    pub const_small: Option<f64>,
    pub const_large: Option<f64>,
    pub residual_small: f64,
    pub residual_large: f64,
    pub radii: Vec<f64>,
}

/// Least-squares slopes of `log mu(B(x,r))` vs `log r`, averaged over base
/// points, separately below and above `r_split`. Radii below the smallest
/// edge length are excluded.
pub fn volume_growth_fit(space: &MMSpace, r_split: f64) -> Result<VolumeFit> {
    let r_min = space.min_edge_length();
    let r_max = space.diameter();
    if !(r_split > 0.0) || r_split > r_max {
        return Err(Error::InvalidArgument(format!(
            "r_split {r_split} outside the distance span (0, {r_max}]"
        )));
    }
    let radii = crate::scale::log_grid(r_min, r_max, 40);
    let base: Vec<usize> = if space.n() <= 256 {
        (0..space.n()).collect()
    } else {
        let stride = space.n() / 128;
        (0..space.n()).step_by(stride.max(1)).collect()
    };

    let fit_regime = |lo: f64, hi: f64| -> (Option<f64>, Option<f64>, f64) {
        let rs: Vec<f64> = radii.iter().cloned().filter(|&r| r >= lo && r < hi).collect();
        if rs.len() < 3 {
            return (None, None, 0.0);
        }
        let mut slopes = Vec::new();
        let mut intercepts = Vec::new();
        let mut sq_res = 0.0;
        let mut count = 0usize;
        for &x in &base {
            let pts: Vec<(f64, f64)> = rs
                .iter()
                .map(|&r| (r.ln(), space.ball_mass(x, r).ln()))
                .collect();
            if let Some((slope, intercept, res)) = linfit(&pts) {
                slopes.push(slope);
                intercepts.push(intercept);
                sq_res += res;
                count += pts.len();
            }
        }
        if slopes.is_empty() {
            return (None, None, 0.0);
        }
        let slope = slopes.iter().sum::<f64>() / slopes.len() as f64;
        let intercept = intercepts.iter().sum::<f64>() / intercepts.len() as f64;
        (
            Some(slope),
            Some(intercept.exp()),
            (sq_res / count.max(1) as f64).sqrt(),
        )
    };

    let (alpha_small, const_small, residual_small) = fit_regime(r_min, r_split);
    let (alpha_large, const_large, residual_large) = fit_regime(r_split, r_max * (1.0 + 1e-12));
    Ok(VolumeFit {
        alpha_small,
        alpha_large,
        const_small,
        const_large,
        residual_small,
        residual_large,
        radii,
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

/// Volume, walk, and regularity exponents attached to a space.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct SpaceExponents {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub kappa1: f64,
    pub kappa2: f64,
}

impl SpaceExponents {
    pub fn new(alpha1: f64, alpha2: f64, beta1: f64, beta2: f64, kappa1: f64, kappa2: f64) -> Self {
        Self {
            alpha1,
            alpha2,
            beta1,
            beta2,
            kappa1,
            kappa2,
        }
    }

    /// Validity of the sub-Gaussian estimate exponents: `2 <= beta_i <= 1 + alpha_i`.
    pub fn validate_hke(&self) -> Result<()> {
        for (beta, alpha) in [(self.beta1, self.alpha1), (self.beta2, self.alpha2)] {
            if !(2.0 <= beta && beta <= 1.0 + alpha) {
                return Err(Error::ExponentConstraint(format!(
                    "walk/volume exponents must satisfy 2<=\u{3b2}\u{1d62}<=1+\u{3b1}\u{1d62}; \
                     got beta={beta}, alpha={alpha}"
                )));
            }
        }
        if !(self.kappa1 > 0.0 && self.kappa2 > 0.0) {
            return Err(Error::ExponentConstraint("kappa exponents must be positive".into()));
        }
        Ok(())
    }

    /// `sigma_{(1-2/p) k1/b1 + 1/p, (1-2/p) k2/b2 + 1/p}`.
    pub fn psi_p(&self, p: f64) -> Result<TwoScaleFn> {
        if p < 1.0 {
            return Err(Error::InvalidArgument("p must be >= 1".into()));
        }
        let e = |kappa: f64, beta: f64| (1.0 - 2.0 / p) * kappa / beta + 1.0 / p;
        TwoScaleFn::new(e(self.kappa1, self.beta1), e(self.kappa2, self.beta2))
    }

    pub fn psi_1(&self) -> Result<TwoScaleFn> {
        self.psi_p(1.0)
    }

    /// Gauge of the p=1 embedding: `sigma_{a1/(a1-b1+k1), a2/(a2-b2+k2)}`.
    /// Needs `b_i - a_i < k_i <= b_i` for positive exponents not below 1.
    pub fn phi_1(&self) -> Result<TwoScaleFn> {
        for (a, b, k) in [
            (self.alpha1, self.beta1, self.kappa1),
            (self.alpha2, self.beta2, self.kappa2),
        ] {
            if !(k > b - a) {
                return Err(Error::ExponentConstraint(format!(
                    "embedding gauge needs kappa > beta - alpha (got kappa={k}, beta-alpha={})",
                    b - a
                )));
            }
            if !(k <= b) {
                return Err(Error::ExponentConstraint(format!(
                    "embedding gauge needs kappa <= beta (got kappa={k}, beta={b})"
                )));
            }
        }
        TwoScaleFn::new(
            self.alpha1 / (self.alpha1 - self.beta1 + self.kappa1),
            self.alpha2 / (self.alpha2 - self.beta2 + self.kappa2),
        )
    }

    /// Conjugate bracket of `phi_1`: `sigma_{a1/(b1-k1), a2/(b2-k2)}`.
    pub fn psi_1_bracket(&self) -> Result<TwoScaleFn> {
        TwoScaleFn::new(
            self.alpha1 / (self.beta1 - self.kappa1),
            self.alpha2 / (self.beta2 - self.kappa2),
        )
    }

    /// Isoperimetric gauge `sigma_{1+(k1-b1)/a1, 1+(k2-b2)/a2}`.
    pub fn big_phi_1(&self) -> Result<TwoScaleFn> {
        TwoScaleFn::new(
            1.0 + (self.kappa1 - self.beta1) / self.alpha1,
            1.0 + (self.kappa2 - self.beta2) / self.alpha2,
        )
    }

    /// On-diagonal volume profile `sigma_{a1/b1, a2/b2}`.
    pub fn v_sigma(&self) -> Result<TwoScaleFn> {
        TwoScaleFn::new(self.alpha1 / self.beta1, self.alpha2 / self.beta2)
    }

    /// Radius-from-time map `sigma_{1/b1, 1/b2}` coupling time and radius grids.
    pub fn radius_map(&self) -> Result<TwoScaleFn> {
        TwoScaleFn::new(1.0 / self.beta1, 1.0 / self.beta2)
    }

    /// Holder profile of the regularization estimate,
    /// `sigma_{k1/b1, k2/b2}` in the time variable.
    pub fn wbe_time_sigma(&self) -> Result<TwoScaleFn> {
        TwoScaleFn::new(self.kappa1 / self.beta1, self.kappa2 / self.beta2)
    }

    pub fn wbe_space_sigma(&self) -> Result<TwoScaleFn> {
        TwoScaleFn::new(self.kappa1, self.kappa2)
    }
}

/// Default exponents for the built-in spaces.
pub fn cycle_exponents() -> SpaceExponents {
    SpaceExponents::new(1.0, 1.0, 2.0, 2.0, 1.0, 1.0)
}

pub fn gasket_exponents() -> SpaceExponents {
    let alpha = 3f64.ln() / 2f64.ln();
    let beta = 5f64.ln() / 2f64.ln();
    SpaceExponents::new(alpha, alpha, beta, beta, beta - alpha, beta - alpha)
}

/// Parses a space descriptor: `cycle:n[,len]`, `gasket:level[,blowup]`,
/// optional `^copies` product suffix, or `file:path.json`.
pub fn from_descriptor(desc: &str) -> Result<(MMSpace, SpaceExponents)> {
    let (base, copies) = match desc.split_once('^') {
        Some((b, c)) => (
            b,
            c.parse::<usize>()
                .map_err(|_| Error::Config(format!("bad product copies in {desc}")))?,
        ),
        None => (desc, 1),
    };
    let (space, mut exps) = parse_base(base)?;
    let space = if copies > 1 {
        exps.alpha1 *= copies as f64;
        exps.alpha2 *= copies as f64;
        build_product(&space, copies)?
    } else {
        space
    };
    Ok((space, exps))
}

fn parse_base(desc: &str) -> Result<(MMSpace, SpaceExponents)> {
    let (kind, args) = desc
        .split_once(':')
        .ok_or_else(|| Error::Config(format!("space descriptor '{desc}' needs kind:args")))?;
    let nums: Vec<&str> = args.split(',').collect();
    match kind {
        "cycle" => {
            let n: usize = nums[0]
                .parse()
                .map_err(|_| Error::Config(format!("bad cycle size in {desc}")))?;
            let len: f64 = if nums.len() > 1 {
                nums[1]
                    .parse()
                    .map_err(|_| Error::Config(format!("bad edge length in {desc}")))?
            } else {
                1.0
            };
            Ok((build_cycle(n, len)?, cycle_exponents()))
        }
        "gasket" => {
            let level: usize = nums[0]
                .parse()
                .map_err(|_| Error::Config(format!("bad gasket level in {desc}")))?;
            let blowup: usize = if nums.len() > 1 {
                nums[1]
                    .parse()
                    .map_err(|_| Error::Config(format!("bad blowup in {desc}")))?
            } else {
                0
            };
            Ok((build_gasket(level, blowup)?, gasket_exponents()))
        }
        "file" => {
            let text = std::fs::read_to_string(args)?;
            Ok((MMSpace::from_json(&text)?, cycle_exponents()))
        }
        other => Err(Error::Config(format!("unknown space kind '{other}'"))),
    }
}
