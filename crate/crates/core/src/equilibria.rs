//! Force equilibria of three particles on the circle.
//!
//! Every equilibrium is isosceles (possibly degenerate), so it is reported
//! on the height `alpha = beta = (pi - gamma)/2` of the fundamental triangle.
//! The `s`-independent ones are the equilateral triangle, the antipodal
//! arrangement and the single-point arrangement. For `s < -2`, `s != -4`
//! one more isosceles equilibrium exists; its chord `xi = 2 sin(gamma/2)`
//! is the non-trivial zero of `g_s(xi) = xi^|s| - 2 xi^(|s|-2) + 1`.
//!
//! Close to `s = -2` the branch behaves like `2^(1/(2+s))` and leaves the
//! range of doubles, so the zero is computed for `t = ln xi` (low branch)
//! or `w = ln(2 - xi^2)` (high branch), with the trivial zero `xi = 1`
//! divided out in both cases.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, LN_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::energy::{RieszParam, TriangleConfig};
use crate::error::{domain, Result};
use crate::roots::newton_bisect;

/// Default tolerance in the log variable.
pub const DEFAULT_TOL: f64 = 1e-12;
const MAX_NEWTON: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EquilibriumBranch {
    Equilateral,
    Antipodal,
    SinglePoint,
    /// `s` in `(-4, -2)`, `gamma` in `(0, pi/3)`.
    IsoscelesLow,
    /// `s < -4`, `gamma` in `(pi/3, pi/2)`.
    IsoscelesHigh,
}

impl EquilibriumBranch {
    pub const ALL: [EquilibriumBranch; 5] = [
        EquilibriumBranch::Equilateral,
        EquilibriumBranch::Antipodal,
        EquilibriumBranch::SinglePoint,
        EquilibriumBranch::IsoscelesLow,
        EquilibriumBranch::IsoscelesHigh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EquilibriumBranch::Equilateral => "Equilateral",
            EquilibriumBranch::Antipodal => "Antipodal",
            EquilibriumBranch::SinglePoint => "SinglePoint",
            EquilibriumBranch::IsoscelesLow => "IsoscelesLow",
            EquilibriumBranch::IsoscelesHigh => "IsoscelesHigh",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        EquilibriumBranch::ALL.into_iter().find(|b| b.name() == name)
    }

    pub fn is_universal(self) -> bool {
        !matches!(
            self,
            EquilibriumBranch::IsoscelesLow | EquilibriumBranch::IsoscelesHigh
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Properness {
    Proper,
    Pseudo,
}

impl Properness {
    pub fn name(self) -> &'static str {
        match self {
            Properness::Proper => "Proper",
            Properness::Pseudo => "Pseudo",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "Proper" => Some(Properness::Proper),
            "Pseudo" => Some(Properness::Pseudo),
            _ => None,
        }
    }
}

/// One equilibrium shape, represented on the height `alpha = beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub branch: EquilibriumBranch,
    /// Apex angle `gamma`.
    pub gamma_star: f64,
    /// `ln xi` with `xi = 2 sin(gamma/2)`; absent for the antipodal arrangement.
    pub log_xi: Option<f64>,
    pub properness: Properness,
    /// `xi` is below the smallest normal double; `gamma_star` is reported as 0
    /// and only `log_xi` carries the branch.
    pub underflow_gamma: bool,
}

impl Equilibrium {
    pub fn xi(&self) -> Option<f64> {
        self.log_xi.map(f64::exp)
    }

    pub fn config(&self) -> TriangleConfig {
        match self.branch {
            EquilibriumBranch::Equilateral => TriangleConfig::equilateral(),
            EquilibriumBranch::Antipodal => TriangleConfig::antipodal(),
            EquilibriumBranch::SinglePoint => TriangleConfig::single_point(),
            _ => TriangleConfig::isosceles(self.gamma_star).expect("gamma_star in [0, pi]"),
        }
    }

    /// Arcs between consecutive particles on the circle, `(2 alpha, 2 beta, 2 gamma)`.
    pub fn circle_gaps(&self) -> [f64; 3] {
        let c = self.config();
        c.angles().map(|a| 2.0 * a)
    }
}

fn universal(branch: EquilibriumBranch, p: RieszParam) -> Equilibrium {
    let pseudo = if p.s() >= -1.0 {
        Properness::Pseudo
    } else {
        Properness::Proper
    };
    match branch {
        EquilibriumBranch::Equilateral => Equilibrium {
            branch,
            gamma_star: FRAC_PI_3,
            log_xi: Some(0.0),
            properness: Properness::Proper,
            underflow_gamma: false,
        },
        EquilibriumBranch::Antipodal => Equilibrium {
            branch,
            gamma_star: 0.0,
            log_xi: None,
            properness: pseudo,
            underflow_gamma: false,
        },
        EquilibriumBranch::SinglePoint => Equilibrium {
            branch,
            gamma_star: PI,
            log_xi: Some(LN_2),
            properness: pseudo,
            underflow_gamma: false,
        },
        _ => unreachable!("not a universal branch"),
    }
}

/// `F_s(phi) = cos(phi) / sin^(s+1)(phi)` on `(0, pi)`.
pub fn f_profile(p: RieszParam, phi: f64) -> Result<f64> {
    if !(phi > 0.0 && phi < PI) {
        return Err(domain("phi", phi, "(0, pi)"));
    }
    Ok(f_profile_value(p.s(), phi))
}

#[inline]
fn f_profile_value(s: f64, phi: f64) -> f64 {
    // sin evaluated from the nearer end keeps F_s(phi) = -F_s(pi - phi) exact
    let sin = if phi <= FRAC_PI_2 { phi.sin() } else { (PI - phi).sin() };
    phi.cos() * sin.powf(-(s + 1.0))
}

/// The unique maximizer `arccos sqrt(-1/s)` of `F_s` on `(0, pi/2)`, `s < -1`.
pub fn f_critical_angle(p: RieszParam) -> Result<f64> {
    let s = p.s();
    if s >= -1.0 {
        return Err(domain("s", s, "(-inf, -1)"));
    }
    if s == -4.0 {
        return Ok(FRAC_PI_3);
    }
    Ok((-1.0 / s).sqrt().acos())
}

/// `L(s) = max F_s` on `(0, pi/2)`.
pub fn f_max_value(p: RieszParam) -> Result<f64> {
    let phi = f_critical_angle(p)?;
    Ok(f_profile_value(p.s(), phi))
}

/// Left-hand sides of the two stationarity equations at `(alpha, beta, pi - alpha - beta)`:
/// `F_s(alpha) + F_s(alpha + beta)` and `F_s(beta) + F_s(alpha + beta)`.
///
/// Requires `s < -1` when an angle sits on the boundary.
pub fn stationarity_equations(p: RieszParam, alpha: f64, beta: f64) -> (f64, f64) {
    let s = p.s();
    let f = |phi: f64| {
        if (phi == 0.0 || phi == PI) && s < -1.0 {
            0.0
        } else {
            f_profile_value(s, phi)
        }
    };
    let sum = f(alpha + beta);
    (f(alpha) + sum, f(beta) + sum)
}

/// `g_s(xi) = xi^|s| - 2 xi^(|s|-2) + 1` for `s < 0`, `0 < xi < sqrt 2`.
pub fn g_poly(p: RieszParam, xi: f64) -> Result<f64> {
    let s = p.s();
    if s >= 0.0 {
        return Err(domain("s", s, "(-inf, 0)"));
    }
    if !(xi > 0.0 && xi < SQRT_2) {
        return Err(domain("xi", xi, "(0, sqrt 2)"));
    }
    Ok(g_value(s, xi))
}

#[inline]
pub(crate) fn g_value(s: f64, xi: f64) -> f64 {
    let a = s.abs();
    xi.powf(a) - 2.0 * xi.powf(a - 2.0) + 1.0
}

/// Location `sqrt(2 - 4/|s|)` of the interior minimum of `g_s`, `s < -2`.
pub fn g_interior_min(p: RieszParam) -> Result<f64> {
    let s = p.s();
    if s >= -2.0 {
        return Err(domain("s", s, "(-inf, -2)"));
    }
    Ok((2.0 - 4.0 / s.abs()).sqrt())
}

/// `ln(2 - e^(2t)) / t` and its derivative, with the removable point `t = 0`.
fn low_branch_fn(a: f64, t: f64) -> (f64, f64) {
    if t == 0.0 {
        return (a - 2.0, -4.0);
    }
    let em1 = (2.0 * t).exp_m1();
    let l = (-em1).ln_1p();
    let dl = -2.0 * (em1 + 1.0) / (1.0 - em1);
    (a + l / t, (dl * t - l) / (t * t))
}

/// `1 + (a/2) ln(2 - e^w) / w` and its derivative, with the removable point `w = 0`.
fn high_branch_fn(a: f64, w: f64) -> (f64, f64) {
    if w == 0.0 {
        return (1.0 - 0.5 * a, -0.5 * a);
    }
    let em1 = w.exp_m1();
    let m = (-em1).ln_1p();
    let dm = -(em1 + 1.0) / (1.0 - em1);
    (1.0 + 0.5 * a * m / w, 0.5 * a * (dm * w - m) / (w * w))
}

/// The non-universal isosceles equilibrium, if one exists at this `s`.
///
/// `tol` bounds the final bracket in the log variable.
pub fn solve_nonuniversal(p: RieszParam, tol: f64) -> Option<Equilibrium> {
    let s = p.s();
    let tol = if tol > 0.0 { tol } else { DEFAULT_TOL };
    if !p.nonuniversal_possible() {
        return None;
    }
    let a = s.abs() - 2.0;
    if s > -4.0 {
        // xi^a >= 1/2 puts the zero above -ln2/a; four times that is a safe lower end
        let t_lo = -4.0 * LN_2 / a;
        let root = newton_bisect(|t| low_branch_fn(a, t), t_lo, 0.0, tol, MAX_NEWTON).ok()?;
        let t = root.x;
        let xi = t.exp();
        let underflow = xi < f64::MIN_POSITIVE;
        let gamma_star = if underflow { 0.0 } else { 2.0 * (0.5 * xi).asin() };
        Some(Equilibrium {
            branch: EquilibriumBranch::IsoscelesLow,
            gamma_star,
            log_xi: Some(t),
            properness: Properness::Proper,
            underflow_gamma: underflow,
        })
    } else {
        // 2 - xi^2 = xi^-a > 2^(-a/2) bounds w = ln(2 - xi^2) from below
        let w_lo = -2.0 * a * LN_2;
        let root = newton_bisect(|w| high_branch_fn(a, w), w_lo, 0.0, tol, MAX_NEWTON).ok()?;
        let w = root.x;
        let t = 0.5 * (-w.exp_m1()).ln_1p();
        // cos(gamma) = 1 - xi^2/2 = e^w / 2
        let gamma_star = (0.5 * w.exp()).acos();
        Some(Equilibrium {
            branch: EquilibriumBranch::IsoscelesHigh,
            gamma_star,
            log_xi: Some(t),
            properness: Properness::Proper,
            underflow_gamma: false,
        })
    }
}

/// All equilibria at `s`: the three universal ones plus the non-universal
/// isosceles one when it exists.
pub fn enumerate_equilibria(p: RieszParam) -> Vec<Equilibrium> {
    let mut out = vec![
        universal(EquilibriumBranch::Equilateral, p),
        universal(EquilibriumBranch::Antipodal, p),
        universal(EquilibriumBranch::SinglePoint, p),
    ];
    if let Some(e) = solve_nonuniversal(p, DEFAULT_TOL) {
        out.push(e);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::mean_pair_energy_value;

    fn p(s: f64) -> RieszParam {
        RieszParam::new(s).unwrap()
    }

    /// Independent oracle: plain bisection on g_s in xi-space.
    fn bisect_g(s: f64, lo: f64, hi: f64) -> f64 {
        let (mut a, mut b) = (lo, hi);
        let fa = g_value(s, a);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if (g_value(s, m) > 0.0) == (fa > 0.0) {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn f_profile_examples() {
        for s in [-5.0, -1.0, 0.0, 2.0] {
            assert!(f_profile(p(s), FRAC_PI_2).unwrap().abs() < 1e-16);
        }
        for phi in [0.1, 0.7, 2.0, 3.0] {
            assert!((f_profile(p(-1.0), phi).unwrap() - phi.cos()).abs() < 1e-15);
        }
        let v = f_profile(p(-5.0), PI / 4.0).unwrap();
        assert!((v - (2f64.sqrt() / 2.0) * 0.25).abs() < 1e-15);
        assert!(f_profile(p(-2.0), 0.0).is_err());
        assert!(f_profile(p(-2.0), PI).is_err());
    }

    #[test]
    fn critical_angle_examples() {
        assert_eq!(f_critical_angle(p(-4.0)).unwrap(), FRAC_PI_3);
        assert!((f_critical_angle(p(-2.0)).unwrap() - PI / 4.0).abs() < 1e-15);
        let phi = f_critical_angle(p(-100.0)).unwrap();
        assert!((phi - 0.1f64.acos()).abs() < 1e-15);
        assert!((1.0 - 100.0 * phi.cos().powi(2)).abs() < 1e-14);
        assert!(f_critical_angle(p(-1.0)).is_err());
    }

    #[test]
    fn max_value_examples() {
        assert!((f_max_value(p(-2.0)).unwrap() - 0.5).abs() < 1e-15);
        let expected = 0.5 * (3f64.sqrt() / 2.0).powi(3);
        assert!((f_max_value(p(-4.0)).unwrap() - expected).abs() < 1e-15);
        let h = 1e-6;
        for s in [-3.0, -5.0, -10.0] {
            let phi = f_critical_angle(p(s)).unwrap();
            let d = (f_profile_value(s, phi + h) - f_profile_value(s, phi - h)) / (2.0 * h);
            assert!(d.abs() < 1e-6, "s={s} F'={d}");
        }
    }

    #[test]
    fn g_poly_examples() {
        for s in [-1.0, -2.5, -3.0, -7.0] {
            assert_eq!(g_poly(p(s), 1.0).unwrap(), 0.0);
        }
        assert!((g_poly(p(-4.0), 0.5).unwrap() - 0.5625).abs() < 1e-15);
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        assert!(g_poly(p(-3.0), golden).unwrap().abs() < 1e-14);
        assert!(g_poly(p(-3.0), 0.0).is_err());
        assert!(g_poly(p(-3.0), SQRT_2).is_err());
        assert!(g_poly(p(1.0), 1.0).is_err());
    }

    #[test]
    fn interior_min_examples() {
        assert_eq!(g_interior_min(p(-4.0)).unwrap(), 1.0);
        assert!((g_interior_min(p(-6.0)).unwrap() - (4.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((g_interior_min(p(-2.5)).unwrap() - 0.4f64.sqrt()).abs() < 1e-15);
        assert!(g_interior_min(p(-2.0)).is_err());
    }

    #[test]
    fn solve_s_minus3_golden_ratio() {
        let e = solve_nonuniversal(p(-3.0), DEFAULT_TOL).unwrap();
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        assert_eq!(e.branch, EquilibriumBranch::IsoscelesLow);
        assert!((e.xi().unwrap() - golden).abs() < 1e-12);
        assert!((e.gamma_star - PI / 5.0).abs() < 1e-12);
        let oracle = bisect_g(-3.0, 1e-9, g_interior_min(p(-3.0)).unwrap());
        assert!((oracle - e.xi().unwrap()).abs() < 1e-10);
    }

    #[test]
    fn solve_s_minus6_sqrt_golden() {
        let e = solve_nonuniversal(p(-6.0), DEFAULT_TOL).unwrap();
        let expected = ((1.0 + 5f64.sqrt()) / 2.0).sqrt();
        assert_eq!(e.branch, EquilibriumBranch::IsoscelesHigh);
        assert!((e.xi().unwrap() - expected).abs() < 1e-12);
        assert!((e.gamma_star - 1.378_632_838_875_17).abs() < 1e-10);
        let oracle = bisect_g(-6.0, g_interior_min(p(-6.0)).unwrap(), SQRT_2 - 1e-12);
        assert!((oracle - e.xi().unwrap()).abs() < 1e-10);
    }

    #[test]
    fn no_branch_outside_range() {
        for s in [-4.0, -2.0, -1.5, -1.0, 0.0, 3.0] {
            assert!(solve_nonuniversal(p(s), DEFAULT_TOL).is_none(), "s={s}");
        }
    }

    #[test]
    fn underflow_near_minus_two() {
        let e = solve_nonuniversal(p(-2.0005), DEFAULT_TOL).unwrap();
        assert!(e.underflow_gamma);
        assert_eq!(e.gamma_star, 0.0);
        let t = e.log_xi.unwrap();
        // xi^a ~ 1/2 with a = 5e-4
        assert!((t / (-LN_2 / 5e-4) - 1.0).abs() < 1e-9);
        let e = solve_nonuniversal(p(-2.05), DEFAULT_TOL).unwrap();
        assert!(!e.underflow_gamma);
        assert!(e.gamma_star > 0.0);
    }

    #[test]
    fn branch_near_minus_four() {
        for ds in [1e-3, 1e-6, 1e-9] {
            let low = solve_nonuniversal(p(-4.0 + ds), DEFAULT_TOL).unwrap();
            let high = solve_nonuniversal(p(-4.0 - ds), DEFAULT_TOL).unwrap();
            assert!(low.gamma_star < FRAC_PI_3 && high.gamma_star > FRAC_PI_3);
            assert!((low.xi().unwrap() - (1.0 - ds / 4.0)).abs() < 2.0 * ds * ds + 1e-12);
            assert!((high.xi().unwrap() - (1.0 + ds / 4.0)).abs() < 2.0 * ds * ds + 1e-12);
        }
    }

    #[test]
    fn enumerate_examples() {
        let e = enumerate_equilibria(p(1.0));
        assert_eq!(e.len(), 3);
        assert_eq!(e[0].properness, Properness::Proper);
        assert_eq!(e[1].properness, Properness::Pseudo);
        assert_eq!(e[2].properness, Properness::Pseudo);

        let e = enumerate_equilibria(p(-4.0));
        assert_eq!(e.len(), 3);
        assert!(e.iter().all(|q| q.properness == Properness::Proper));

        let e = enumerate_equilibria(p(-3.0));
        assert_eq!(e.len(), 4);
        assert!(e.iter().all(|q| q.properness == Properness::Proper));
        assert!((e[3].gamma_star - PI / 5.0).abs() < 1e-12);

        // properness switches at s = -1
        assert_eq!(enumerate_equilibria(p(-1.0))[1].properness, Properness::Pseudo);
        assert_eq!(enumerate_equilibria(p(-1.0001))[1].properness, Properness::Proper);
    }

    #[test]
    fn xi_matches_gamma() {
        for s in [-2.3, -3.0, -3.9, -4.2, -7.0, -30.0] {
            for e in enumerate_equilibria(p(s)) {
                if e.gamma_star > 0.0 {
                    let xi = 2.0 * (0.5 * e.gamma_star).sin();
                    assert!((xi - e.xi().unwrap()).abs() < 1e-12, "s={s} {e:?}");
                }
            }
        }
    }

    #[test]
    fn proper_equilibria_are_stationary() {
        let h = 1e-7;
        for s in [-1.5, -2.5, -3.0, -3.7, -4.0, -4.5, -6.0, -12.0] {
            for e in enumerate_equilibria(p(s)) {
                if e.properness != Properness::Proper {
                    continue;
                }
                let c = e.config();
                let (al, be) = (c.alpha(), c.beta());
                let en = |a: f64, b: f64| mean_pair_energy_value(s, [a, b, PI - a - b]);
                let da = (en(al + h, be) - en(al - h, be)) / (2.0 * h);
                let db = (en(al, be + h) - en(al, be - h)) / (2.0 * h);
                assert!(da.abs() < 1e-6 && db.abs() < 1e-6, "s={s} {e:?} {da} {db}");
                let (ra, rb) = stationarity_equations(p(s), al, be);
                assert!(ra.abs() < 1e-9 && rb.abs() < 1e-9, "s={s} {e:?} {ra} {rb}");
            }
        }
    }

    #[test]
    fn root_uniqueness_by_sign_scan() {
        for s in [-2.5, -3.0, -3.5, -5.0, -8.0, -20.0] {
            let n = 1_000_000;
            let mut brackets = Vec::new();
            let x = |i: usize| SQRT_2 * i as f64 / n as f64;
            let mut prev = g_value(s, x(1));
            for i in 2..n {
                let cur = g_value(s, x(i));
                if (cur > 0.0) != (prev > 0.0) {
                    brackets.push((x(i - 1), x(i)));
                }
                prev = cur;
            }
            assert_eq!(brackets.len(), 2, "s={s}: {brackets:?}");
            let xi = solve_nonuniversal(p(s), DEFAULT_TOL).unwrap().xi().unwrap();
            let hit = |b: &(f64, f64), v: f64| b.0 <= v && v <= b.1;
            assert!(brackets.iter().any(|b| hit(b, 1.0)));
            assert!(brackets.iter().any(|b| hit(b, xi)), "s={s} xi={xi} {brackets:?}");
        }
    }

    #[test]
    fn f_profile_antisymmetry() {
        use proptest::prelude::*;
        proptest!(|(s in -8.0f64..3.0, phi in 0.01f64..(PI - 0.01))| {
            let l = f_profile(p(s), phi).unwrap();
            let r = f_profile(p(s), PI - phi).unwrap();
            prop_assert!((l + r).abs() <= 1e-12 * l.abs().max(1.0));
        });
    }
}
