//! Local descent, Newton probing for saddles and maxima, and the seeded
//! multistart driver.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::{fold, norm, weighted_energy, weighted_gradient, weighted_hessian};
use super::{
    canonical_gaps, energy_order, CircleConfig, CriticalPoint, SearchSource, GRADIENT_TOL, MIN_SEPARATION,
};
use crate::classify::StabilityClass;
use crate::energy::RieszParam;
use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 10_000;
const NEWTON_SWITCH: f64 = 1e-3;
const MAX_STEP: f64 = 0.5;
const PROBE_ITERATIONS: usize = 200;
/// Particles closer than this are tried as exactly coincident.
const SNAP_RADIUS: f64 = 1e-3;
const SPECTRUM_ZERO: f64 = 1e-6;
/// A point with a small gradient is accepted only once the Newton step from
/// it is this short; flat degenerate regions otherwise pass the gradient test
/// far from the critical point.
const STEP_TOL: f64 = 1e-7;
const PERTURBATION: f64 = 1e-3;
const PERTURBATION_DIRECTIONS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub max_iterations: usize,
    /// Also run a Newton iteration on the gradient from every start, which
    /// can land on saddles and maxima.
    pub probe: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            max_iterations: MAX_ITERATIONS,
            probe: true,
        }
    }
}

/// A descent run that did not reach a stationary point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchFailure {
    pub start: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultistartReport {
    pub n: usize,
    pub s: f64,
    pub starts: usize,
    pub seed: u64,
    /// Distinct shapes in ascending energy.
    pub points: Vec<CriticalPoint>,
    /// Descent runs that hit the iteration cap or stalled.
    pub failures: Vec<SearchFailure>,
    /// Newton probes that did not settle; expected and not an error.
    pub probe_failures: usize,
    /// Descent runs that touched the minimum-separation constraint.
    pub boundary_hits: usize,
}

fn min_separation(x: &[f64]) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            m = m.min(fold(x[i] - x[j]).abs());
        }
    }
    m
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(x: &[f64], t: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(a, b)| a + t * b).collect()
}

fn cap_step(d: &mut [f64]) {
    let m = d.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if m > MAX_STEP {
        let k = MAX_STEP / m;
        d.iter_mut().for_each(|x| *x *= k);
    }
}

fn is_finite_matrix(h: &DMatrix<f64>) -> bool {
    h.iter().all(|x| x.is_finite())
}

/// `-sum (v.g) / f(lambda) v` over the eigenpairs of `h` that are not
/// numerically zero.
fn spectral_step(h: DMatrix<f64>, g: &[f64], modified: bool) -> Vec<f64> {
    let n = g.len();
    let eig = SymmetricEigen::new(h);
    let scale = eig.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let floor = 1e-10 * scale.max(f64::MIN_POSITIVE);
    let mut d = vec![0.0; n];
    for k in 0..n {
        let lambda = eig.eigenvalues[k];
        if lambda.abs() <= floor {
            continue;
        }
        let v = eig.eigenvectors.column(k);
        let proj: f64 = (0..n).map(|i| v[i] * g[i]).sum();
        let coef = -proj / if modified { lambda.abs() } else { lambda };
        for i in 0..n {
            d[i] += coef * v[i];
        }
    }
    d
}

fn settled(s: f64, x: &[f64], g: &[f64]) -> bool {
    if norm(g) >= GRADIENT_TOL {
        return false;
    }
    let h = weighted_hessian(s, x, &vec![1.0; x.len()]);
    if !is_finite_matrix(&h) {
        return true;
    }
    norm(&spectral_step(h, g, false)) < STEP_TOL
}

struct Descent {
    thetas: Vec<f64>,
    boundary_hit: bool,
}

fn descend(s: f64, start: &[f64], max_iterations: usize) -> std::result::Result<Descent, Error> {
    let n = start.len();
    let ones = vec![1.0; n];
    let guard_separation = s >= -1.0;
    let mut x = start.to_vec();
    let mut e = weighted_energy(s, &x, &ones);
    let mut boundary_hit = false;
    let mut gd_step: f64 = 1.0;
    let mut gn = f64::INFINITY;
    for _ in 0..max_iterations {
        let g = weighted_gradient(s, &x, &ones)?;
        gn = norm(&g);
        if settled(s, &x, &g) {
            return Ok(Descent { thetas: x, boundary_hit });
        }
        let mut newton = false;
        let mut d: Vec<f64> = g.iter().map(|v| -v).collect();
        if gn < NEWTON_SWITCH {
            let h = weighted_hessian(s, &x, &ones);
            if is_finite_matrix(&h) {
                let cand = spectral_step(h, &g, true);
                let dn = norm(&cand);
                if dn > 0.0 && dot(&g, &cand) < -1e-3 * gn * dn {
                    d = cand;
                    newton = true;
                }
            }
        }
        cap_step(&mut d);
        let slope = dot(&g, &d);
        let mut t = if newton { 1.0 } else { (2.0 * gd_step).min(1.0 / gn.max(1e-300)).max(1e-12) };
        let mut accepted = None;
        for _ in 0..80 {
            let cand = axpy(&x, t, &d);
            if guard_separation && min_separation(&cand) < MIN_SEPARATION {
                boundary_hit = true;
                t *= 0.5;
                continue;
            }
            let ec = weighted_energy(s, &cand, &ones);
            let armijo = ec <= e + 1e-4 * t * slope;
            // near a minimum the energy decrease drops below rounding
            let flat = newton
                && ec <= e + 4.0 * f64::EPSILON * e.abs()
                && weighted_gradient(s, &cand, &ones).map(|gc| norm(&gc) < gn).unwrap_or(false);
            if ec.is_finite() && (armijo || flat) {
                accepted = Some((cand, ec));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((cand, ec)) => {
                if !newton {
                    gd_step = t;
                }
                x = cand;
                e = ec;
            }
            None => {
                return snap(s, &x).map(|thetas| Descent { thetas, boundary_hit }).ok_or(
                    Error::NoConvergence {
                        iterations: max_iterations,
                        gradient_norm: gn,
                    },
                )
            }
        }
    }
    snap(s, &x)
        .map(|thetas| Descent { thetas, boundary_hit })
        .ok_or(Error::NoConvergence {
            iterations: max_iterations,
            gradient_norm: gn,
        })
}

/// Merges particles within [`SNAP_RADIUS`] into exactly coincident clusters,
/// solves the reduced weighted system by Newton's method and returns the
/// expanded configuration when it is stationary (`s < -1` only).
fn snap(s: f64, x: &[f64]) -> Option<Vec<f64>> {
    if s >= -1.0 {
        return None;
    }
    let n = x.len();
    let mut order: Vec<usize> = (0..n).collect();
    let wrapped: Vec<f64> = x.iter().map(|t| t.rem_euclid(TAU)).collect();
    order.sort_by(|&a, &b| wrapped[a].total_cmp(&wrapped[b]));
    let gap_after = |k: usize| fold(wrapped[order[(k + 1) % n]] - wrapped[order[k]]).abs();
    // start a cluster right after a wide gap
    let first = match (0..n).find(|&k| gap_after(k) >= SNAP_RADIUS) {
        Some(k) => (k + 1) % n,
        None => 0,
    };
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for step in 0..n {
        let k = (first + step) % n;
        let idx = order[k];
        let prev = (k + n - 1) % n;
        if step > 0 && gap_after(prev) < SNAP_RADIUS {
            clusters.last_mut().unwrap().push(idx);
        } else {
            clusters.push(vec![idx]);
        }
    }
    if clusters.len() == n {
        return None;
    }
    let mut y: Vec<f64> = clusters
        .iter()
        .map(|c| {
            let base = x[c[0]];
            base + c.iter().map(|&i| fold(x[i] - base)).sum::<f64>() / c.len() as f64
        })
        .collect();
    let w: Vec<f64> = clusters.iter().map(|c| c.len() as f64).collect();
    for _ in 0..100 {
        if y.len() == 1 {
            break;
        }
        let g = weighted_gradient(s, &y, &w).ok()?;
        let gn = norm(&g);
        if gn == 0.0 {
            break;
        }
        let h = weighted_hessian(s, &y, &w);
        if !is_finite_matrix(&h) {
            break;
        }
        let mut d = spectral_step(h, &g, false);
        if norm(&d) < 1e-3 * STEP_TOL {
            y = axpy(&y, 1.0, &d);
            break;
        }
        cap_step(&mut d);
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..40 {
            let cand = axpy(&y, t, &d);
            if let Ok(gc) = weighted_gradient(s, &cand, &w) {
                if norm(&gc) < gn {
                    y = cand;
                    moved = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    let mut out = vec![0.0; n];
    for (c, &yc) in clusters.iter().zip(&y) {
        for &i in c {
            out[i] = yc;
        }
    }
    let ones = vec![1.0; n];
    let g = weighted_gradient(s, &out, &ones).ok()?;
    settled(s, &out, &g).then_some(out)
}

fn has_close_pair(x: &[f64]) -> bool {
    min_separation(x) < SNAP_RADIUS
}

fn probe(s: f64, start: &[f64]) -> Option<Vec<f64>> {
    let n = start.len();
    let ones = vec![1.0; n];
    let mut x = start.to_vec();
    for _ in 0..PROBE_ITERATIONS {
        let g = weighted_gradient(s, &x, &ones).ok()?;
        let gn = norm(&g);
        if settled(s, &x, &g) {
            return Some(x);
        }
        if s < -1.0 && has_close_pair(&x) {
            if let Some(y) = snap(s, &x) {
                return Some(y);
            }
        }
        let h = weighted_hessian(s, &x, &ones);
        if !is_finite_matrix(&h) {
            return snap(s, &x);
        }
        let mut d = spectral_step(h, &g, false);
        cap_step(&mut d);
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..30 {
            let cand = axpy(&x, t, &d);
            if let Ok(gc) = weighted_gradient(s, &cand, &ones) {
                if norm(&gc) < (1.0 - 1e-4 * t) * gn {
                    x = cand;
                    moved = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !moved {
            return snap(s, &x);
        }
    }
    snap(s, &x)
}

/// Class from the Hessian with the rotation mode removed, falling back to
/// sampling the energy on a small sphere around the point when the Hessian
/// is singular or does not exist.
fn classify_point(s: f64, x: &[f64]) -> (StabilityClass, Option<Vec<f64>>, bool) {
    let n = x.len();
    let ones = vec![1.0; n];
    let h = weighted_hessian(s, x, &ones);
    let spectrum = is_finite_matrix(&h).then(|| {
        let mut ev: Vec<f64> = SymmetricEigen::new(h.clone()).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    });
    if spectrum.is_some() && n >= 2 {
        let reduced = h.view((1, 1), (n - 1, n - 1)).into_owned();
        let ev = SymmetricEigen::new(reduced).eigenvalues;
        let scale = ev.iter().fold(1.0f64, |m, l| m.max(l.abs()));
        let zero = SPECTRUM_ZERO * scale;
        let pos = ev.iter().any(|&l| l > zero);
        let neg = ev.iter().any(|&l| l < -zero);
        let singular = ev.iter().any(|&l| l.abs() <= zero);
        if pos && neg {
            return (StabilityClass::Saddle, spectrum, false);
        }
        if !singular {
            let class = if pos { StabilityClass::RelativeMin } else { StabilityClass::RelativeMax };
            return (class, spectrum, false);
        }
    }
    (perturbation_class(s, x), spectrum, true)
}

fn perturbation_class(s: f64, x: &[f64]) -> StabilityClass {
    let n = x.len();
    let ones = vec![1.0; n];
    let e0 = weighted_energy(s, x, &ones);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut directions: Vec<Vec<f64>> = Vec::new();
    for i in 1..n {
        for sign in [1.0, -1.0] {
            let mut v = vec![0.0; n];
            v[i] = sign;
            directions.push(v);
        }
    }
    for _ in 0..PERTURBATION_DIRECTIONS {
        let mut v: Vec<f64> = (0..n).map(|i| if i == 0 { 0.0 } else { rng.random_range(-1.0..1.0) }).collect();
        let l = norm(&v);
        v.iter_mut().for_each(|c| *c /= l);
        directions.push(v);
    }
    let mut up = false;
    let mut down = false;
    for v in &directions {
        let e = weighted_energy(s, &axpy(x, PERTURBATION, v), &ones);
        if e > e0 {
            up = true;
        } else if e < e0 {
            down = true;
        }
    }
    match (up, down) {
        (true, false) => StabilityClass::RelativeMin,
        (false, true) => StabilityClass::RelativeMax,
        _ => StabilityClass::Saddle,
    }
}

fn critical_point(p: RieszParam, x: Vec<f64>, source: SearchSource) -> Result<CriticalPoint> {
    let s = p.s();
    // a nearly coincident pair at a degenerate point: prefer exact coincidence
    let x = if s < -1.0 && has_close_pair(&x) {
        snap(s, &x).unwrap_or(x)
    } else {
        x
    };
    let ones = vec![1.0; x.len()];
    let g = weighted_gradient(s, &x, &ones)?;
    let (class, hessian_spectrum, degenerate) = classify_point(s, &x);
    let raw = CircleConfig::new(x.clone())?;
    let config = raw.canonical();
    Ok(CriticalPoint {
        gaps: canonical_gaps(&raw.gaps()),
        config,
        energy: weighted_energy(s, &x, &ones),
        gradient_norm: norm(&g),
        hessian_spectrum,
        class,
        degenerate,
        source,
        hits: 1,
    })
}

/// Descends the energy from `start` to a stationary point.
pub fn local_minimize(p: RieszParam, start: &CircleConfig) -> Result<CriticalPoint> {
    local_minimize_with(p, start, SearchOptions::default()).map(|(c, _)| c)
}

fn local_minimize_with(
    p: RieszParam,
    start: &CircleConfig,
    opts: SearchOptions,
) -> Result<(CriticalPoint, bool)> {
    let d = descend(p.s(), &start.thetas, opts.max_iterations)?;
    Ok((critical_point(p, d.thetas, SearchSource::Minimize)?, d.boundary_hit))
}

/// Newton iteration on the gradient from `start`; may end at any kind of
/// stationary point.
pub fn probe_critical(p: RieszParam, start: &CircleConfig) -> Result<CriticalPoint> {
    let x = probe(p.s(), &start.thetas).ok_or(Error::NoConvergence {
        iterations: PROBE_ITERATIONS,
        gradient_norm: f64::NAN,
    })?;
    critical_point(p, x, SearchSource::Probe)
}

struct StartOutcome {
    minimum: std::result::Result<(CriticalPoint, bool), String>,
    probe: Option<Result<CriticalPoint>>,
}

fn random_start(n: usize, seed: u64, index: usize) -> CircleConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    CircleConfig {
        thetas: (0..n).map(|_| rng.random_range(0.0..TAU)).collect(),
    }
}

/// Runs descent (and, by default, a Newton probe) from `starts` random
/// configurations and merges the stationary shapes found.
///
/// Start `k` is drawn from a ChaCha8 stream keyed by `(seed, k)`, so the
/// report does not depend on the thread count.
pub fn multistart(p: RieszParam, n: usize, starts: usize, seed: u64) -> Result<MultistartReport> {
    multistart_with(p, n, starts, seed, SearchOptions::default())
}

pub fn multistart_with(
    p: RieszParam,
    n: usize,
    starts: usize,
    seed: u64,
    opts: SearchOptions,
) -> Result<MultistartReport> {
    if n < 2 {
        return Err(Error::Config(format!("need at least 2 particles, got {n}")));
    }
    if starts == 0 {
        return Err(Error::Config("need at least one start".into()));
    }
    let outcomes: Vec<StartOutcome> = (0..starts)
        .into_par_iter()
        .map(|k| {
            let start = random_start(n, seed, k);
            StartOutcome {
                minimum: local_minimize_with(p, &start, opts).map_err(|e| e.to_string()),
                probe: opts.probe.then(|| probe_critical(p, &start)),
            }
        })
        .collect();

    let mut points: Vec<CriticalPoint> = Vec::new();
    let mut failures = Vec::new();
    let mut probe_failures = 0;
    let mut boundary_hits = 0;
    let merge = |cp: CriticalPoint, points: &mut Vec<CriticalPoint>| {
        match points.iter_mut().find(|q| q.same_shape(&cp)) {
            Some(q) => q.hits += 1,
            None => points.push(cp),
        }
    };
    for (k, o) in outcomes.into_iter().enumerate() {
        match o.minimum {
            Ok((cp, hit)) => {
                boundary_hits += hit as usize;
                merge(cp, &mut points);
            }
            Err(reason) => failures.push(SearchFailure { start: k, reason }),
        }
        match o.probe {
            Some(Ok(cp)) => merge(cp, &mut points),
            Some(Err(_)) => probe_failures += 1,
            None => {}
        }
    }
    points.sort_by(energy_order);
    Ok(MultistartReport {
        n,
        s: p.s(),
        starts,
        seed,
        points,
        failures,
        probe_failures,
        boundary_hits,
    })
}
