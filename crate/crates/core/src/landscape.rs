//! The mean pair energy over the fundamental triangle: contour grids and
//! the local shape of the energy around the equilateral point.

use std::f64::consts::{FRAC_PI_3, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::{mean_pair_energy_value, u_profile_value, ExtendedEnergy, RieszParam};
use crate::error::{domain, Result};

pub const MIN_RESOLUTION: usize = 8;
pub const SIGNATURE_SAMPLES: usize = 720;
pub const MAX_SIGNATURE_RADIUS: f64 = 0.2;
const DEAD_BAND: f64 = 1e-14;

/// Energy sampled on the square `[0, pi]^2` of `(alpha, beta)`; cells with
/// `alpha + beta > pi` are masked (`None`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeGrid {
    pub s: f64,
    pub n: usize,
    /// Row-major, `values[i * n + j]` at `(alpha_i, beta_j)`.
    pub values: Vec<Option<ExtendedEnergy>>,
}

/// A grid point inside the triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub i: usize,
    pub j: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub energy: ExtendedEnergy,
}

impl LandscapeGrid {
    pub fn spacing(&self) -> f64 {
        PI / (self.n - 1) as f64
    }

    /// Grid coordinate `pi * k / (n - 1)`.
    pub fn coord(&self, k: usize) -> f64 {
        grid_coord(self.n, k)
    }

    pub fn get(&self, i: usize, j: usize) -> Option<ExtendedEnergy> {
        if i >= self.n || j >= self.n {
            return None;
        }
        self.values[i * self.n + j]
    }

    /// Unmasked points in row-major order.
    pub fn points(&self) -> impl Iterator<Item = GridPoint> + '_ {
        (0..self.n).flat_map(move |i| {
            (0..self.n - i).map(move |j| GridPoint {
                i,
                j,
                alpha: self.coord(i),
                beta: self.coord(j),
                gamma: self.coord(self.n - 1 - i - j),
                energy: self.values[i * self.n + j].expect("cell inside the triangle"),
            })
        })
    }

    /// Lowest finite cell (first in row-major order on ties).
    pub fn argmin(&self) -> Option<GridPoint> {
        self.points()
            .filter(|p| p.energy.is_finite())
            .min_by(|a, b| a.energy.to_f64().total_cmp(&b.energy.to_f64()))
    }

    /// Highest cell (first in row-major order on ties); `+inf` cells win when
    /// present.
    pub fn argmax(&self) -> Option<GridPoint> {
        self.points()
            .reduce(|best, p| if p.energy.to_f64() > best.energy.to_f64() { p } else { best })
    }
}

fn grid_coord(n: usize, k: usize) -> f64 {
    PI * k as f64 / (n - 1) as f64
}

/// Evaluates `<V_s>` on an `n x n` grid over the closed triangle.
///
/// `gamma` is taken from its own grid index, so values are bit-identical
/// under `alpha <-> beta`.
pub fn evaluate_grid(p: RieszParam, n: usize) -> Result<LandscapeGrid> {
    if n < MIN_RESOLUTION {
        return Err(domain("n", n as f64, "[8, inf)"));
    }
    let s = p.s();
    let values = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            (0..n).map(move |j| {
                (i + j < n).then(|| {
                    let angles = [grid_coord(n, i), grid_coord(n, j), grid_coord(n, n - 1 - i - j)];
                    ExtendedEnergy::from_f64(mean_pair_energy_value(s, angles))
                })
            })
        })
        .collect();
    Ok(LandscapeGrid {
        s,
        n,
        values,
    })
}

/// Orthonormal basis of the plane `alpha + beta + gamma = 0`; a cyclic
/// permutation of the angles is a rotation by 120 degrees in it.
pub fn plane_basis() -> [[f64; 3]; 2] {
    let a = 1.0 / 2f64.sqrt();
    let b = 1.0 / 6f64.sqrt();
    [[a, -a, 0.0], [b, b, -2.0 * b]]
}

/// Energy on a small circle around the equilateral point.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddleSignature {
    /// Circular sign changes of `delta(psi)`.
    pub sign_changes: usize,
    pub min_delta: f64,
    pub max_delta: f64,
    pub max_abs_delta: f64,
    /// `delta(psi_k)` for `psi_k = 2 pi k / 720`.
    pub deltas: Vec<f64>,
}

/// Counts sign changes of `delta(psi) = <V_s>(center + radius * u(psi)) -
/// <V_s>(center)` around the equilateral point, `0 < radius <= 0.2`.
pub fn saddle_signature(p: RieszParam, radius: f64) -> Result<SaddleSignature> {
    if !(radius > 0.0 && radius <= MAX_SIGNATURE_RADIUS) {
        return Err(domain("radius", radius, "(0, 0.2]"));
    }
    let s = p.s();
    let center = mean_pair_energy_value(s, [FRAC_PI_3; 3]);
    let [u1, u2] = plane_basis();
    let deltas: Vec<f64> = (0..SIGNATURE_SAMPLES)
        .map(|k| {
            let psi = 2.0 * PI * k as f64 / SIGNATURE_SAMPLES as f64;
            let (sn, cs) = psi.sin_cos();
            let angles: [f64; 3] =
                std::array::from_fn(|m| FRAC_PI_3 + radius * (u1[m] * cs + u2[m] * sn));
            mean_pair_energy_value(s, angles) - center
        })
        .collect();
    if deltas.iter().any(|d| !d.is_finite()) {
        return Err(crate::error::Error::InfiniteStencil);
    }
    let max_abs_delta = deltas.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let min_delta = deltas.iter().copied().fold(f64::INFINITY, f64::min);
    let max_delta = deltas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let band = DEAD_BAND * max_abs_delta;
    let signs: Vec<bool> = deltas
        .iter()
        .filter(|d| d.abs() > band)
        .map(|d| *d > 0.0)
        .collect();
    let sign_changes = if signs.is_empty() {
        0
    } else {
        (0..signs.len())
            .filter(|&k| signs[k] != signs[(k + 1) % signs.len()])
            .count()
    };
    Ok(SaddleSignature {
        sign_changes,
        min_delta,
        max_delta,
        max_abs_delta,
        deltas,
    })
}

pub const THIRD_DERIVATIVE_STEP: f64 = 1e-3;

/// Third derivative of the height profile `U_s` at `pi/3`, `s < 0`.
pub fn third_derivative_height(p: RieszParam) -> Result<f64> {
    third_derivative_height_with_step(p, THIRD_DERIVATIVE_STEP)
}

pub fn third_derivative_height_with_step(p: RieszParam, h: f64) -> Result<f64> {
    let s = p.s();
    if s >= 0.0 {
        return Err(domain("s", s, "(-inf, 0)"));
    }
    if !(h > 0.0 && h < 0.5) {
        return Err(domain("h", h, "(0, 0.5)"));
    }
    let u = |g: f64| u_profile_value(s, g);
    let x = FRAC_PI_3;
    Ok((u(x + 2.0 * h) - 2.0 * u(x + h) + 2.0 * u(x - h) - u(x - 2.0 * h)) / (2.0 * h * h * h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::u_second_derivative_equilateral;
    use std::f64::consts::FRAC_PI_2;

    fn p(s: f64) -> RieszParam {
        RieszParam::new(s).unwrap()
    }

    #[test]
    fn grid_special_values() {
        // n - 1 divisible by 6 puts pi/3 and pi/2 on the grid
        let g = evaluate_grid(p(-4.0), 61).unwrap();
        assert!((g.get(20, 20).unwrap().to_f64() + 2.0).abs() < 1e-13);
        assert!((g.get(0, 0).unwrap().to_f64() - 0.25).abs() < 1e-15);
        assert!((g.get(30, 30).unwrap().to_f64() + 29.0 / 12.0).abs() < 1e-13);
        assert_eq!(g.get(31, 30), None);
        assert_eq!(g.values.iter().filter(|v| v.is_some()).count(), 61 * 62 / 2);
    }

    #[test]
    fn grid_rejects_small_n() {
        assert!(evaluate_grid(p(-1.0), 7).is_err());
        assert!(evaluate_grid(p(-1.0), 8).is_ok());
    }

    #[test]
    fn grid_is_bit_symmetric() {
        for s in [-4.0, -1.3, 0.0, 2.5] {
            let g = evaluate_grid(p(s), 37).unwrap();
            for i in 0..37 {
                for j in 0..37 {
                    assert_eq!(g.get(i, j), g.get(j, i));
                }
            }
        }
    }

    #[test]
    fn corners_and_edge_midpoints() {
        let s = -3.0;
        let g = evaluate_grid(p(s), 41).unwrap();
        for (i, j) in [(0, 0), (40, 0), (0, 40)] {
            assert!((g.get(i, j).unwrap().to_f64() + 1.0 / s).abs() < 1e-15);
        }
        let antipodal = ((2.0 / 3.0) * 2f64.powf(-s) - 1.0) / s;
        for (i, j) in [(20, 20), (20, 0), (0, 20)] {
            assert!((g.get(i, j).unwrap().to_f64() - antipodal).abs() < 1e-13);
        }
        let g = evaluate_grid(p(1.0), 41).unwrap();
        assert_eq!(g.get(0, 0), Some(ExtendedEnergy::PositiveInfinity));
        assert_eq!(g.get(20, 0), Some(ExtendedEnergy::PositiveInfinity));
    }

    #[test]
    fn minus_four_minimum_at_edge_midpoint() {
        let g = evaluate_grid(p(-4.0), 128).unwrap();
        let m = g.argmin().unwrap();
        let h = g.spacing();
        let near_mid = [(FRAC_PI_2, FRAC_PI_2), (FRAC_PI_2, 0.0), (0.0, FRAC_PI_2)]
            .iter()
            .any(|(a, b)| (m.alpha - a).abs() <= h && (m.beta - b).abs() <= h);
        assert!(near_mid, "{m:?}");
    }

    #[test]
    fn signature_examples() {
        let sig = saddle_signature(p(-4.0), 0.01).unwrap();
        assert_eq!(sig.sign_changes, 6);
        let big = saddle_signature(p(-4.0), 0.02).unwrap();
        let ratio = big.max_abs_delta / sig.max_abs_delta;
        assert!((6.4..=9.6).contains(&ratio), "{ratio}");

        let sig = saddle_signature(p(-3.0), 0.01).unwrap();
        assert_eq!(sig.sign_changes, 0);
        assert!(sig.min_delta > 0.0);

        let sig = saddle_signature(p(-5.0), 0.01).unwrap();
        assert_eq!(sig.sign_changes, 0);
        assert!(sig.max_delta < 0.0);

        assert!(saddle_signature(p(-4.0), 0.3).is_err());
        assert!(saddle_signature(p(-4.0), 0.0).is_err());
    }

    #[test]
    fn signature_three_fold_symmetry() {
        let sig = saddle_signature(p(-4.0), 0.01).unwrap();
        let third = SIGNATURE_SAMPLES / 3;
        for k in 0..SIGNATURE_SAMPLES {
            let d = sig.deltas[k] - sig.deltas[(k + third) % SIGNATURE_SAMPLES];
            assert!(d.abs() < 1e-9, "k={k}");
        }
    }

    #[test]
    fn basis_is_orthonormal_and_in_plane() {
        let [u1, u2] = plane_basis();
        let dot = |a: [f64; 3], b: [f64; 3]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        assert!((dot(u1, u1) - 1.0).abs() < 1e-15);
        assert!((dot(u2, u2) - 1.0).abs() < 1e-15);
        assert!(dot(u1, u2).abs() < 1e-15);
        assert!(u1.iter().sum::<f64>().abs() < 1e-15);
        assert!(u2.iter().sum::<f64>().abs() < 1e-15);
    }

    #[test]
    fn third_derivative_examples() {
        let d = third_derivative_height(p(-4.0)).unwrap();
        assert!(d.abs() > 0.1);
        // 4.5 sqrt(3)
        assert!((d - 7.794_228_634).abs() < 1e-4, "{d}");
        let a = third_derivative_height_with_step(p(-3.0), 1e-3).unwrap();
        let b = third_derivative_height_with_step(p(-3.0), 5e-4).unwrap();
        assert!(((a - b) / b).abs() < 1e-2);
        assert!(third_derivative_height(p(0.5)).is_err());
    }

    #[test]
    fn second_derivative_cross_check() {
        let h = 1e-4;
        let s = -3.0;
        let u = |g: f64| u_profile_value(s, g);
        let d2 = (u(FRAC_PI_3 + h) - 2.0 * u(FRAC_PI_3) + u(FRAC_PI_3 - h)) / (h * h);
        let closed = u_second_derivative_equilateral(p(s));
        assert!(((d2 - closed) / closed).abs() < 1e-5);
    }
}
