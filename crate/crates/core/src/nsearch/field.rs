//! Energy, gradient and Hessian of weighted point systems on the circle.
//!
//! A weighted system places `w_k` coincident particles at angle `theta_k`;
//! unit weights give the ordinary N-particle system.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;

use crate::energy::{chord, pair_energy_value};
use crate::error::{Error, Result};

/// Central angle folded into `[-pi, pi]`.
#[inline]
pub(crate) fn fold(d: f64) -> f64 {
    let r = d - TAU * (d / TAU).round();
    r.clamp(-PI, PI)
}

/// Pair energy at central angle `d`.
#[inline]
pub(crate) fn pair_value(s: f64, d: f64) -> f64 {
    pair_energy_value(s, chord(0.5 * fold(d)))
}

/// Derivative of the pair energy in the central angle.
#[inline]
pub(crate) fn pair_slope(s: f64, d: f64) -> Result<f64> {
    let d = fold(d);
    let r = chord(0.5 * d);
    if r == 0.0 {
        // the force between coincident particles vanishes only for s < -1
        return if s < -1.0 { Ok(0.0) } else { Err(Error::PseudoForce(s)) };
    }
    Ok(-r.powf(-s - 1.0) * d.signum() * (0.5 * d).cos())
}

/// Second derivative of the pair energy; `+-inf` or NaN where it does not
/// exist (coincidence with `s > -2`).
#[inline]
pub(crate) fn pair_curvature(s: f64, d: f64) -> f64 {
    let d = fold(d);
    let r = chord(0.5 * d);
    if r == 0.0 {
        return if s < -2.0 {
            0.0
        } else if s == -2.0 {
            -1.0
        } else {
            f64::NAN
        };
    }
    let c = (0.5 * d).cos();
    (s + 1.0) * r.powf(-s - 2.0) * c * c + 0.25 * r.powf(-s)
}

pub(crate) fn weighted_energy(s: f64, thetas: &[f64], weights: &[f64]) -> f64 {
    let n = thetas.len();
    let self_term = pair_energy_value(s, 0.0);
    let mut total = 0.0;
    for i in 0..n {
        let w = weights[i];
        if w > 1.0 {
            total += 0.5 * w * (w - 1.0) * self_term;
        }
        for j in i + 1..n {
            total += w * weights[j] * pair_value(s, thetas[i] - thetas[j]);
        }
    }
    total
}

pub(crate) fn weighted_gradient(s: f64, thetas: &[f64], weights: &[f64]) -> Result<Vec<f64>> {
    let n = thetas.len();
    let mut g = vec![0.0; n];
    for i in 0..n {
        for j in i + 1..n {
            let f = weights[i] * weights[j] * pair_slope(s, thetas[i] - thetas[j])?;
            g[i] += f;
            g[j] -= f;
        }
    }
    Ok(g)
}

pub(crate) fn weighted_hessian(s: f64, thetas: &[f64], weights: &[f64]) -> DMatrix<f64> {
    let n = thetas.len();
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let c = weights[i] * weights[j] * pair_curvature(s, thetas[i] - thetas[j]);
            h[(i, j)] -= c;
            h[(j, i)] -= c;
            h[(i, i)] += c;
            h[(j, j)] += c;
        }
    }
    h
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
