//! Critical points of the Riesz energy of N particles on the unit circle.

mod field;
mod n5;
mod optimize;

use std::cmp::Ordering;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::classify::StabilityClass;
use crate::energy::{ExtendedEnergy, RieszParam};
use crate::error::{Error, Result};

pub use n5::{
    n5_antipodal_energy, n5_best_antipodal, n5_best_triangle, n5_crossover, n5_gap,
    n5_triangle_energy,
};
pub use optimize::{
    local_minimize, multistart, probe_critical, MultistartReport, SearchFailure, SearchOptions,
    MAX_ITERATIONS,
};

/// Stationarity threshold on the Euclidean gradient norm.
pub const GRADIENT_TOL: f64 = 1e-8;
/// Two shapes are the same when their gap sequences agree to this, up to
/// rotation and reflection.
pub const DEDUP_TOL: f64 = 1e-6;
/// Minimum angular separation kept by the optimizer when coincidences are
/// not admissible (`s >= -1`).
pub const MIN_SEPARATION: f64 = 1e-9;

/// N particle angles on the circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleConfig {
    pub thetas: Vec<f64>,
}

impl CircleConfig {
    /// Angles are reduced to `[0, 2 pi)`; `N >= 2`.
    pub fn new(thetas: Vec<f64>) -> Result<Self> {
        if thetas.len() < 2 {
            return Err(Error::Config(format!("need at least 2 particles, got {}", thetas.len())));
        }
        if let Some(t) = thetas.iter().find(|t| !t.is_finite()) {
            return Err(Error::Config(format!("angle {t} is not finite")));
        }
        Ok(CircleConfig {
            thetas: thetas.into_iter().map(wrap).collect(),
        })
    }

    /// `N` equally spaced particles.
    pub fn regular(n: usize) -> Result<Self> {
        CircleConfig::new((0..n).map(|k| TAU * k as f64 / n as f64).collect())
    }

    /// Particles placed by consecutive gaps, starting at 0.
    pub fn from_gaps(gaps: &[f64]) -> Result<Self> {
        let mut thetas = Vec::with_capacity(gaps.len());
        let mut t = 0.0;
        for g in gaps {
            thetas.push(t);
            t += g;
        }
        CircleConfig::new(thetas)
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    /// Arcs between cyclically consecutive particles, summing to `2 pi`.
    pub fn gaps(&self) -> Vec<f64> {
        let mut t: Vec<f64> = self.thetas.iter().map(|&x| wrap(x)).collect();
        t.sort_by(f64::total_cmp);
        let n = t.len();
        (0..n)
            .map(|k| if k + 1 < n { t[k + 1] - t[k] } else { t[0] + TAU - t[k] })
            .collect()
    }

    /// Representative modulo rotation, reflection and relabeling: the
    /// lexicographically smallest gap sequence, laid out from angle 0.
    pub fn canonical(&self) -> CircleConfig {
        let gaps = canonical_gaps(&self.gaps());
        let mut thetas = Vec::with_capacity(gaps.len());
        let mut t = 0.0;
        for g in &gaps {
            thetas.push(t);
            t += g;
        }
        CircleConfig { thetas }
    }
}

fn wrap(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

const LEX_TOL: f64 = 1e-9;

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > LEX_TOL {
            return x < y;
        }
    }
    false
}

/// All rotations and reflections of a cyclic sequence.
fn dihedral(gaps: &[f64]) -> impl Iterator<Item = Vec<f64>> + '_ {
    let n = gaps.len();
    (0..n).flat_map(move |shift| {
        let fwd: Vec<f64> = (0..n).map(|k| gaps[(shift + k) % n]).collect();
        let rev: Vec<f64> = (0..n).map(|k| gaps[(shift + n - k) % n]).collect();
        [fwd, rev]
    })
}

/// Smallest gap sequence in the dihedral orbit (differences below `1e-9`
/// count as ties).
pub fn canonical_gaps(gaps: &[f64]) -> Vec<f64> {
    let mut best = gaps.to_vec();
    for cand in dihedral(gaps) {
        if lex_less(&cand, &best) {
            best = cand;
        }
    }
    best
}

/// Max-abs distance between two gap sequences, minimized over rotations and
/// reflections; `inf` for different particle counts.
pub fn gap_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    dihedral(b)
        .map(|c| a.iter().zip(&c).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())))
        .fold(f64::INFINITY, f64::min)
}

/// How a critical point was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchSource {
    /// Energy descent.
    Minimize,
    /// Newton iteration on the gradient.
    Probe,
}

/// A stationary configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    /// Canonical form.
    pub config: CircleConfig,
    pub gaps: Vec<f64>,
    pub energy: f64,
    pub gradient_norm: f64,
    /// Eigenvalues of the full Hessian in ascending order; `None` where the
    /// Hessian does not exist (coincident particles with `-2 < s < -1`).
    pub hessian_spectrum: Option<Vec<f64>>,
    pub class: StabilityClass,
    /// True when the class came from sampling the energy around the point
    /// rather than from the Hessian.
    pub degenerate: bool,
    pub source: SearchSource,
    /// Number of search runs that ended at this shape.
    pub hits: usize,
}

impl CriticalPoint {
    pub fn same_shape(&self, other: &CriticalPoint) -> bool {
        gap_distance(&self.gaps, &other.gaps) < DEDUP_TOL
    }
}

pub(crate) fn energy_order(a: &CriticalPoint, b: &CriticalPoint) -> Ordering {
    a.energy
        .total_cmp(&b.energy)
        .then_with(|| {
            a.gaps
                .iter()
                .zip(&b.gaps)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
}

/// Sum of the pair energies over all `N (N - 1) / 2` pairs.
pub fn total_energy(p: RieszParam, c: &CircleConfig) -> ExtendedEnergy {
    let ones = vec![1.0; c.len()];
    ExtendedEnergy::from_f64(field::weighted_energy(p.s(), &c.thetas, &ones))
}

/// `dE / d theta_i`; fails with [`Error::PseudoForce`] at coincident
/// particles unless `s < -1`.
pub fn gradient(p: RieszParam, c: &CircleConfig) -> Result<Vec<f64>> {
    let ones = vec![1.0; c.len()];
    field::weighted_gradient(p.s(), &c.thetas, &ones)
}

/// Hessian of the energy in the particle angles, row-major `N x N`;
/// non-finite entries where it does not exist.
pub fn hessian(p: RieszParam, c: &CircleConfig) -> Vec<Vec<f64>> {
    let ones = vec![1.0; c.len()];
    let h = field::weighted_hessian(p.s(), &c.thetas, &ones);
    (0..c.len())
        .map(|i| (0..c.len()).map(|j| h[(i, j)]).collect())
        .collect()
}
