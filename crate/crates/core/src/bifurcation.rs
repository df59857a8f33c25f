//! Parameter sweeps over `s` and the asymptotic shape of the isosceles
//! branches.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, LN_2};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{boundary_note, classify, equilibrium_energy, StabilityClass};
use crate::energy::{ExtendedEnergy, RieszParam};
use crate::equilibria::{enumerate_equilibria, EquilibriumBranch, Properness};
use crate::error::{Error, Result};

/// Grid points closer than this to a structural value are snapped onto it.
pub const SNAP_TOL: f64 = 1e-9;
const SNAP_POINTS: [f64; 2] = [-4.0, 0.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub branch: EquilibriumBranch,
    pub gamma_star: f64,
    pub energy: ExtendedEnergy,
    pub class: StabilityClass,
    pub log_xi: Option<f64>,
    pub properness: Properness,
    #[serde(default)]
    pub underflow_gamma: bool,
    /// Remark on a boundary case of the classification.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub s: f64,
    pub records: Vec<SweepRecord>,
    /// Branches with no equilibrium at this `s`.
    pub missing: Vec<EquilibriumBranch>,
}

impl SweepRow {
    pub fn record(&self, branch: EquilibriumBranch) -> Option<&SweepRecord> {
        self.records.iter().find(|r| r.branch == branch)
    }
}

/// All equilibria at one exponent, classified.
pub fn sweep_row(p: RieszParam) -> SweepRow {
    let records: Vec<SweepRecord> = enumerate_equilibria(p)
        .into_iter()
        .map(|e| SweepRecord {
            branch: e.branch,
            gamma_star: e.gamma_star,
            energy: equilibrium_energy(p, &e),
            class: classify(p, &e),
            log_xi: e.log_xi,
            properness: e.properness,
            underflow_gamma: e.underflow_gamma,
            note: boundary_note(p, &e).map(String::from),
        })
        .collect();
    let missing = EquilibriumBranch::ALL
        .into_iter()
        .filter(|b| records.iter().all(|r| r.branch != *b))
        .collect();
    SweepRow {
        s: p.s(),
        records,
        missing,
    }
}

/// Uniform grid on `[s_min, s_max]` including both endpoints.
pub fn sweep_grid(s_min: f64, s_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !s_min.is_finite() || !s_max.is_finite() {
        return Err(Error::Range(format!("bounds must be finite, got [{s_min}, {s_max}]")));
    }
    if !(s_min < s_max) {
        return Err(Error::Range(format!("s_min = {s_min} must be below s_max = {s_max}")));
    }
    if steps < 2 {
        return Err(Error::Range(format!("steps = {steps} must be at least 2")));
    }
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            let s = if i == steps - 1 {
                s_max
            } else {
                s_min + (s_max - s_min) * (i as f64 / last)
            };
            SNAP_POINTS
                .into_iter()
                .find(|c| (s - c).abs() <= SNAP_TOL)
                .unwrap_or(s)
        })
        .collect())
}

/// Classified equilibria on a uniform `s` grid, in grid order.
pub fn sweep(s_min: f64, s_max: f64, steps: usize) -> Result<Vec<SweepRow>> {
    let grid = sweep_grid(s_min, s_max, steps)?;
    grid.into_par_iter()
        .map(|s| RieszParam::new(s).map(sweep_row))
        .collect()
}

/// Far-field branch angle `pi/2 - 2^((1 + s)/2)`, for `s < -4`.
pub fn asymptote_far(s: f64) -> f64 {
    FRAC_PI_2 - 2f64.powf(0.5 * (1.0 + s))
}

/// Linear branch angle near `s = -4`: `pi/3 - (4 + s) / (2 sqrt 3)`.
pub fn asymptote_center(s: f64) -> f64 {
    FRAC_PI_3 - (4.0 + s) / (2.0 * 3f64.sqrt())
}

/// Branch angle near `s = -2`: `2^(1 / (2 + s))`, for `-4 < s < -2`.
/// Underflows to zero close to `-2`; see [`asymptote_near2_log`].
pub fn asymptote_near2(s: f64) -> f64 {
    2f64.powf(1.0 / (2.0 + s))
}

/// Natural log of [`asymptote_near2`], finite for every `s` in `(-4, -2)`.
pub fn asymptote_near2_log(s: f64) -> f64 {
    LN_2 / (2.0 + s)
}

/// First-order chord of the branch near `s = -4`: `1 - (s + 4) / 4`.
pub fn taylor_branch_xi(s: f64) -> f64 {
    1.0 - 0.25 * (s + 4.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::{g_interior_min, g_poly, solve_nonuniversal, DEFAULT_TOL};

    fn p(s: f64) -> RieszParam {
        RieszParam::new(s).unwrap()
    }

    fn gamma(s: f64) -> f64 {
        solve_nonuniversal(p(s), DEFAULT_TOL).unwrap().gamma_star
    }

    fn log_gamma(s: f64) -> f64 {
        // gamma = 2 asin(xi / 2) ~ xi for tiny xi
        let e = solve_nonuniversal(p(s), DEFAULT_TOL).unwrap();
        let lx = e.log_xi.unwrap();
        if e.underflow_gamma {
            lx
        } else {
            e.gamma_star.ln()
        }
    }

    #[test]
    fn sweep_examples() {
        let rows = sweep(-5.0, -3.0, 3).unwrap();
        let s: Vec<f64> = rows.iter().map(|r| r.s).collect();
        assert_eq!(s, vec![-5.0, -4.0, -3.0]);
        let counts: Vec<usize> = rows.iter().map(|r| r.records.len()).collect();
        assert_eq!(counts, vec![4, 3, 4]);
        assert_eq!(
            rows[1].missing,
            vec![EquilibriumBranch::IsoscelesLow, EquilibriumBranch::IsoscelesHigh]
        );
        for row in sweep(-1.0, 1.0, 2).unwrap() {
            assert_eq!(row.records.len(), 3);
        }
    }

    #[test]
    fn sweep_snaps_structural_points() {
        let grid = sweep_grid(-6.0, 0.0, 601).unwrap();
        assert_eq!(grid.len(), 601);
        assert!(grid.contains(&-4.0));
        assert_eq!(*grid.last().unwrap(), 0.0);
        assert!(sweep_grid(1.0, 1.0, 5).is_err());
        assert!(sweep_grid(0.0, 1.0, 1).is_err());
        assert!(sweep_grid(f64::NEG_INFINITY, 1.0, 3).is_err());
    }

    #[test]
    fn sweep_classes_at_minus_two_and_a_half() {
        let rows = sweep(-2.5, -2.5 + 1e-3, 2).unwrap();
        let row = &rows[0];
        assert_eq!(row.record(EquilibriumBranch::Antipodal).unwrap().class, StabilityClass::RelativeMin);
        assert_eq!(row.record(EquilibriumBranch::IsoscelesLow).unwrap().class, StabilityClass::Saddle);
    }

    #[test]
    fn continuity_through_minus_four() {
        for s in [-4.001, -3.999] {
            assert!((gamma(s) - FRAC_PI_3).abs() < 5e-4, "s={s}");
        }
    }

    #[test]
    fn branch_monotone_in_sweep() {
        for (lo, hi) in [(-12.0, -4.05), (-3.95, -2.05)] {
            let rows = sweep(lo, hi, 200).unwrap();
            let g: Vec<f64> = rows
                .iter()
                .map(|r| {
                    r.records
                        .iter()
                        .find(|x| !x.branch.is_universal())
                        .unwrap()
                        .gamma_star
                })
                .collect();
            assert!(g.windows(2).all(|w| w[1] < w[0]), "[{lo}, {hi}]");
        }
    }

    #[test]
    fn asymptote_substitutions() {
        assert!((asymptote_far(-20.0) - (FRAC_PI_2 - 2f64.powf(-9.5))).abs() < 1e-15);
        assert!((asymptote_far(-20.0) - 1.569_415_26).abs() < 1e-8);
        assert!((asymptote_far(-30.0) - (FRAC_PI_2 - 2f64.powf(-14.5))).abs() < 1e-15);
        assert_eq!(asymptote_center(-4.0), FRAC_PI_3);
        assert!((asymptote_center(-4.1) - 1.076_065_06).abs() < 1e-8);
        assert!((asymptote_near2(-2.05) / 2f64.powi(-20) - 1.0).abs() < 1e-12);
        assert_eq!(asymptote_near2(-2.5), 0.25);
        assert_eq!(taylor_branch_xi(-4.0), 1.0);
        assert!((taylor_branch_xi(-3.9) - 0.975).abs() < 1e-15);
    }

    #[test]
    fn far_branch_gap_scales_like_two_to_half_s() {
        // pi/2 - gamma ~ cos(gamma) = (2 - xi^2)/2 and 2 - xi^2 ~ 2^(s/2 + 1)
        for s in [-20.0, -30.0, -40.0] {
            let ratio = (FRAC_PI_2 - gamma(s)) / 2f64.powf(0.5 * s);
            assert!((ratio - 1.0).abs() < 0.03, "s={s} ratio={ratio}");
        }
        let ratio = (FRAC_PI_2 - gamma(-20.0)) / 2f64.powf(0.5 * (1.0 - 20.0));
        assert!((ratio - 0.7134).abs() < 1e-3, "{ratio}");
    }

    #[test]
    fn center_asymptote_error() {
        for s in [-4.01, -3.99] {
            assert!((gamma(s) - asymptote_center(s)).abs() < 1e-3);
        }
        let xi = solve_nonuniversal(p(-3.9), DEFAULT_TOL).unwrap().xi().unwrap();
        assert!((xi - taylor_branch_xi(-3.9)).abs() < 2e-3);
    }

    #[test]
    fn near_two_asymptote_in_log_space() {
        let lg = log_gamma(-2.05);
        let ratio = (lg - asymptote_near2_log(-2.05)).exp();
        assert!((0.95..=1.05).contains(&ratio), "{ratio}");
        // still resolvable once gamma underflows
        let e = solve_nonuniversal(p(-2.0005), DEFAULT_TOL).unwrap();
        assert!(e.underflow_gamma);
        let ratio = (e.log_xi.unwrap() - asymptote_near2_log(-2.0005)).exp();
        assert!((0.95..=1.05).contains(&ratio), "{ratio}");
    }

    #[test]
    fn asymptote_discrepancy_shrinks_toward_boundary() {
        let center: Vec<f64> = (1..8)
            .map(|k| {
                let d = 0.2 / 2f64.powi(k);
                (gamma(-4.0 - d) - asymptote_center(-4.0 - d)).abs()
            })
            .collect();
        assert!(center.windows(2).all(|w| w[1] < w[0]), "{center:?}");

        let near: Vec<f64> = (1..8)
            .map(|k| {
                let s = -2.0 - 0.4 / 2f64.powi(k);
                (log_gamma(s) - asymptote_near2_log(s)).abs() / asymptote_near2_log(s).abs()
            })
            .collect();
        // the relative gap reaches rounding level within a few halvings
        assert!(near.windows(2).all(|w| w[1] < w[0] || w[1] <= 1e-15), "{near:?}");

        let far: Vec<f64> = [-10.0, -20.0, -40.0, -80.0]
            .into_iter()
            .map(|s| ((FRAC_PI_2 - gamma(s)) / 2f64.powf(0.5 * s) - 1.0).abs())
            .collect();
        assert!(far.windows(2).all(|w| w[1] < w[0]), "{far:?}");
    }

    #[test]
    fn g_slope_at_one() {
        let h = 1e-6;
        for s in [-6.0, -4.0, -3.0, -2.5] {
            let d = (g_poly(p(s), 1.0 + h).unwrap() - g_poly(p(s), 1.0 - h).unwrap()) / (2.0 * h);
            assert!((d - (s + 4.0)).abs() < 1e-8, "s={s} {d}");
        }
    }

    #[test]
    fn root_sits_on_the_expected_side_of_the_interior_min() {
        for s in [-2.2, -2.8, -3.5, -3.99] {
            let e = solve_nonuniversal(p(s), DEFAULT_TOL).unwrap();
            assert!(e.xi().unwrap() < g_interior_min(p(s)).unwrap());
        }
        for s in [-4.01, -5.0, -9.0, -20.0] {
            let e = solve_nonuniversal(p(s), DEFAULT_TOL).unwrap();
            assert!(e.xi().unwrap() > g_interior_min(p(s)).unwrap());
        }
    }
}
