//! Deterministic probe family: low eigenvectors, ball indicators, and seeded
//! random fields smoothed by the semigroup.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::Field;
use crate::heat::SpectralHeat;

pub const BALL_RADIUS_FRACTIONS: [f64; 5] = [0.05, 0.1, 0.2, 0.3, 0.45];

/// Named probe fields; 8 + 5 + 10 for spaces with enough points.
#[derive(Debug, Clone)]
pub struct ProbeSet {
    pub probes: Vec<(String, Field)>,
}

impl ProbeSet {
    pub fn names(&self) -> Vec<&str> {
        self.probes.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(String, Field)> {
        self.probes.iter()
    }

    pub fn len(&self) -> usize {
        self.probes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probes.is_empty()
    }
}

/// Builds the standard family: the first 8 nonconstant eigenvectors
/// (sup-normalized), indicators of balls at 5 radii around the most eccentric
/// point, and 10 seeded random fields smoothed by `P_{t0}` with
/// `t0 = (median edge length)^2`. Probes that a core mask degenerates to
/// constants are dropped.
pub fn build_probes(h: &SpectralHeat, seed: u64, mask: Option<&[bool]>) -> ProbeSet {
    let space = h.space();
    let n = space.n();
    let mut probes: Vec<(String, Field)> = Vec::new();

    let finish = |values: Vec<f64>| -> Field {
        match mask {
            Some(m) => Field::with_mask(values, m),
            None => Field::new(values),
        }
    };

    for k in 1..=8.min(n - 1) {
        let raw = h.eigenvector(k);
        let sup = raw.linf_norm();
        let f = finish(raw.scaled(1.0 / sup).values().to_vec());
        if !f.is_constant(1e-12) {
            probes.push((format!("eig{k}"), f));
        }
    }

    // most eccentric point, ties to the lowest index
    let center = (0..n)
        .max_by(|&a, &b| {
            let ea: f64 = (0..n).map(|y| space.dist(a, y) * space.mass()[y]).sum();
            let eb: f64 = (0..n).map(|y| space.dist(b, y) * space.mass()[y]).sum();
            ea.partial_cmp(&eb).unwrap().then(b.cmp(&a))
        })
        .unwrap_or(0);
    let diam = space.diameter();
    for frac in BALL_RADIUS_FRACTIONS {
        let ball = space.ball(center, frac * diam);
        let f = finish(Field::indicator(n, &ball).values().to_vec());
        if !f.is_constant(1e-12) {
            probes.push((format!("ball{frac}"), f));
        }
    }

    let t0 = space.median_edge_length().powi(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for r in 0..10 {
        let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let smooth = h.apply(t0, &Field::new(raw));
        let sup = smooth.linf_norm();
        let f = finish(smooth.scaled(1.0 / sup).values().to_vec());
        if !f.is_constant(1e-12) {
            probes.push((format!("rand{r}"), f));
        }
    }

    ProbeSet { probes }
}
