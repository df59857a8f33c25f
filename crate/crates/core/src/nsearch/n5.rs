//! Five particles: antipodal splits against the 1:2:2 triangle family.

use std::f64::consts::FRAC_PI_2;

use crate::energy::{pair_energy_value, RieszParam};
use crate::error::Result;
use crate::roots::{bisect, golden_section_min, Root};

const SCAN_POINTS: usize = 256;
const GAMMA_TOL: f64 = 1e-10;
const CROSSOVER_BRACKET: (f64, f64) = (-2.6, -2.1);

/// `m` particles at one pole and `5 - m` at the other.
pub fn n5_antipodal_energy(p: RieszParam, m: usize) -> f64 {
    let s = p.s();
    let m = m.min(5) as f64;
    let k = 5.0 - m;
    let same = 0.5 * (m * (m - 1.0) + k * (k - 1.0));
    same * pair_energy_value(s, 0.0) + m * k * pair_energy_value(s, 2.0)
}

/// Lower of the 1+4 and 2+3 splits.
pub fn n5_best_antipodal(p: RieszParam) -> f64 {
    n5_antipodal_energy(p, 1).min(n5_antipodal_energy(p, 2))
}

/// One particle at the apex of an isosceles triangle with apex angle
/// `gamma` and two particles on each base corner.
pub fn n5_triangle_energy(p: RieszParam, gamma: f64) -> f64 {
    let s = p.s();
    2.0 * pair_energy_value(s, 0.0)
        + 4.0 * pair_energy_value(s, 2.0 * (0.5 * gamma).cos())
        + 4.0 * pair_energy_value(s, 2.0 * gamma.sin())
}

/// Optimal apex angle on `(0, pi/2]` and its energy: grid scan, then
/// golden-section refinement around the best grid point.
pub fn n5_best_triangle(p: RieszParam) -> (f64, f64) {
    let f = |g: f64| n5_triangle_energy(p, g);
    let h = FRAC_PI_2 / SCAN_POINTS as f64;
    let best = (1..=SCAN_POINTS)
        .map(|k| k as f64 * h)
        .min_by(|a, b| f(*a).total_cmp(&f(*b)))
        .unwrap_or(FRAC_PI_2);
    let lo = (best - h).max(f64::EPSILON);
    let hi = (best + h).min(FRAC_PI_2);
    golden_section_min(f, lo, hi, GAMMA_TOL)
}

/// Best antipodal split minus the optimized triangle.
pub fn n5_gap(p: RieszParam) -> f64 {
    n5_best_antipodal(p) - n5_best_triangle(p).1
}

/// Exponent where the best antipodal split and the optimized 1:2:2 triangle
/// exchange optimality, bracketed on `[-2.6, -2.1]`.
pub fn n5_crossover(tol: f64) -> Result<Root> {
    let (lo, hi) = CROSSOVER_BRACKET;
    bisect(
        |s| RieszParam::new(s).map(n5_gap).unwrap_or(f64::NAN),
        lo,
        hi,
        tol,
    )
}
