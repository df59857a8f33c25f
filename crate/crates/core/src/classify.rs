//! Stability classification of the three-particle equilibria.
//!
//! The labels follow the proven taxonomy (rule based, driven by `s` and
//! the crossover exponent `s3`). Closed-form and finite-difference Hessians
//! of `<V_s>(alpha, beta, pi - alpha - beta)` are provided as an
//! independent check of that taxonomy.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::energy::{self, mean_pair_energy, mean_pair_energy_value, ExtendedEnergy, RieszParam};
use crate::equilibria::{Equilibrium, EquilibriumBranch};
use crate::error::{domain, Error, Result};
use crate::roots::bisect;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StabilityClass {
    AbsoluteMin,
    RelativeMin,
    Saddle,
    RelativeMax,
    AbsoluteMax,
    /// Degenerate arrangement with `+inf` energy (`s >= 0`).
    InfiniteEnergy,
}

impl StabilityClass {
    pub const ALL: [StabilityClass; 6] = [
        StabilityClass::AbsoluteMin,
        StabilityClass::RelativeMin,
        StabilityClass::Saddle,
        StabilityClass::RelativeMax,
        StabilityClass::AbsoluteMax,
        StabilityClass::InfiniteEnergy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StabilityClass::AbsoluteMin => "AbsoluteMin",
            StabilityClass::RelativeMin => "RelativeMin",
            StabilityClass::Saddle => "Saddle",
            StabilityClass::RelativeMax => "RelativeMax",
            StabilityClass::AbsoluteMax => "AbsoluteMax",
            StabilityClass::InfiniteEnergy => "InfiniteEnergy",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        StabilityClass::ALL.into_iter().find(|c| c.name() == name)
    }
}

/// Symmetric 2x2 matrix `[[h11, h12], [h12, h22]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetricMatrix2 {
    pub h11: f64,
    pub h12: f64,
    pub h22: f64,
}

impl SymmetricMatrix2 {
    pub fn new(h11: f64, h12: f64, h22: f64) -> Self {
        SymmetricMatrix2 { h11, h12, h22 }
    }

    pub fn scaled(self, k: f64) -> Self {
        SymmetricMatrix2::new(k * self.h11, k * self.h12, k * self.h22)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let mean = 0.5 * (self.h11 + self.h22);
        let half_diff = 0.5 * (self.h11 - self.h22);
        let radius = half_diff.hypot(self.h12);
        [mean - radius, mean + radius]
    }

    /// One strictly positive and one strictly negative eigenvalue.
    pub fn is_indefinite(&self) -> bool {
        let [lo, hi] = self.eigenvalues();
        lo < 0.0 && hi > 0.0
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.h11.abs().max(self.h12.abs()).max(self.h22.abs())
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(&self, other: &SymmetricMatrix2) -> f64 {
        (self.h11 - other.h11)
            .abs()
            .max((self.h12 - other.h12).abs())
            .max((self.h22 - other.h22).abs())
    }
}

/// Hessian at the antipodal arrangement, `(1 / (3 * 2^s)) I`, for `s < -2`.
pub fn hessian_closed_antipodal(p: RieszParam) -> Result<SymmetricMatrix2> {
    let s = p.s();
    if s >= -2.0 {
        return Err(domain("s", s, "(-inf, -2)"));
    }
    let d = 1.0 / (3.0 * 2f64.powf(s));
    Ok(SymmetricMatrix2::new(d, 0.0, d))
}

/// Hessian at the equilateral triangle, `(4 + s) / (9 sqrt(3)^s) [[2, 1], [1, 2]]`.
pub fn hessian_closed_equilateral(p: RieszParam) -> SymmetricMatrix2 {
    let s = p.s();
    let k = (4.0 + s) / (9.0 * 3f64.sqrt().powf(s));
    SymmetricMatrix2::new(2.0 * k, k, 2.0 * k)
}

/// A finite-difference Hessian together with its Richardson error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericHessian {
    pub matrix: SymmetricMatrix2,
    /// Entrywise difference between the refined and the coarse estimate.
    pub error_estimate: f64,
    /// Order of the leading truncation term that was eliminated.
    pub order: f64,
}

fn fd_hessian(s: f64, alpha: f64, beta: f64, h: f64) -> Result<SymmetricMatrix2> {
    let e = |a: f64, b: f64| mean_pair_energy_value(s, [a, b, PI - a - b]);
    let f00 = e(alpha, beta);
    let fpa = e(alpha + h, beta);
    let fma = e(alpha - h, beta);
    let fpb = e(alpha, beta + h);
    let fmb = e(alpha, beta - h);
    let fpp = e(alpha + h, beta + h);
    let fpm = e(alpha + h, beta - h);
    let fmp = e(alpha - h, beta + h);
    let fmm = e(alpha - h, beta - h);
    let all = [f00, fpa, fma, fpb, fmb, fpp, fpm, fmp, fmm];
    if all.iter().any(|v| !v.is_finite()) {
        return Err(Error::InfiniteStencil);
    }
    let h2 = h * h;
    Ok(SymmetricMatrix2::new(
        (fpa - 2.0 * f00 + fma) / h2,
        (fpp - fpm - fmp + fmm) / (4.0 * h2),
        (fpb - 2.0 * f00 + fmb) / h2,
    ))
}

/// Central-difference Hessian of `<V_s>(alpha, beta, pi - alpha - beta)`
/// with Richardson refinement at `h/2`.
///
/// Stencils may cross an edge of the fundamental triangle when `s < -2`:
/// angles are then read on the circle (chord `2|sin|`), where the energy is
/// still twice differentiable. A coincident pair contributes a term
/// `|x|^|s|`, so the leading truncation error is of order `h^min(2, |s|-2)`
/// and that order is the one eliminated.
pub fn hessian_numeric_detailed(
    p: RieszParam,
    alpha: f64,
    beta: f64,
    h: f64,
) -> Result<NumericHessian> {
    let s = p.s();
    if !(h > 0.0) || !h.is_finite() {
        return Err(domain("h", h, "(0, inf)"));
    }
    if !alpha.is_finite() || !beta.is_finite() {
        return Err(domain("alpha/beta", if alpha.is_finite() { beta } else { alpha }, "finite"));
    }
    let gamma = PI - alpha - beta;
    let reach = 2.0 * h;
    let near_edge = [alpha, beta, gamma].iter().any(|&a| a < reach || a > PI - reach);
    let mut order: f64 = 2.0;
    if near_edge {
        if s >= 0.0 {
            return Err(Error::InfiniteStencil);
        }
        if s >= -2.0 {
            return Err(Error::StencilOutsideDomain);
        }
        order = order.min(s.abs() - 2.0);
    }
    let coarse = fd_hessian(s, alpha, beta, h)?;
    let fine = fd_hessian(s, alpha, beta, 0.5 * h)?;
    let k = 2f64.powf(order);
    let extrapolate = |c: f64, f: f64| (k * f - c) / (k - 1.0);
    let matrix = SymmetricMatrix2::new(
        extrapolate(coarse.h11, fine.h11),
        extrapolate(coarse.h12, fine.h12),
        extrapolate(coarse.h22, fine.h22),
    );
    Ok(NumericHessian {
        matrix,
        error_estimate: matrix.max_abs_diff(&fine),
        order,
    })
}

/// Finite-difference Hessian, see [`hessian_numeric_detailed`].
pub fn hessian_numeric(p: RieszParam, alpha: f64, beta: f64, h: f64) -> Result<SymmetricMatrix2> {
    hessian_numeric_detailed(p, alpha, beta, h).map(|n| n.matrix)
}

/// Closed-form crossover exponent `ln(4/9) / ln(4/3)`.
pub fn s3_crossover() -> f64 {
    energy::s3()
}

/// Equilateral minus antipodal mean energy, `s < 0`.
fn equilateral_minus_antipodal(s: f64) -> f64 {
    equilateral_energy(s) - antipodal_energy(s)
}

fn equilateral_energy(s: f64) -> f64 {
    if s == 0.0 {
        -0.5 * 3f64.ln()
    } else {
        (3f64.sqrt().powf(-s) - 1.0) / s
    }
}

fn antipodal_energy(s: f64) -> f64 {
    ((2.0 / 3.0) * 2f64.powf(-s) - 1.0) / s
}

/// `s3` located by bisection of the energy difference on `(-3.5, -2.1)`.
pub fn s3_crossover_bisection(tol: f64) -> Result<crate::roots::Root> {
    bisect(equilateral_minus_antipodal, -3.5, -2.1, tol)
}

/// Mean pair energy of an equilibrium.
pub fn equilibrium_energy(p: RieszParam, e: &Equilibrium) -> ExtendedEnergy {
    let s = p.s();
    match e.branch {
        EquilibriumBranch::Equilateral => ExtendedEnergy::Finite(equilateral_energy(s)),
        EquilibriumBranch::Antipodal if s < 0.0 => ExtendedEnergy::Finite(antipodal_energy(s)),
        EquilibriumBranch::SinglePoint if s < 0.0 => ExtendedEnergy::Finite(-1.0 / s),
        EquilibriumBranch::Antipodal | EquilibriumBranch::SinglePoint => {
            ExtendedEnergy::PositiveInfinity
        }
        EquilibriumBranch::IsoscelesLow | EquilibriumBranch::IsoscelesHigh => {
            mean_pair_energy(p, &e.config())
        }
    }
}

/// Options for [`classify_with`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClassifyOptions {
    /// Compress pair energies through `tanh`, so coincident pairs carry the
    /// finite energy 1 and degenerate arrangements are classified for `s >= 0`
    /// too.
    pub compressed: bool,
}

/// Stability class of an equilibrium of `<V_s>`.
pub fn classify(p: RieszParam, e: &Equilibrium) -> StabilityClass {
    classify_with(p, e, ClassifyOptions::default())
}

pub fn classify_with(p: RieszParam, e: &Equilibrium, opts: ClassifyOptions) -> StabilityClass {
    use StabilityClass::*;
    let s = p.s();
    let s3 = s3_crossover();
    match e.branch {
        EquilibriumBranch::Equilateral => {
            if s >= s3 {
                AbsoluteMin
            } else if s > -4.0 {
                RelativeMin
            } else if s == -4.0 {
                Saddle
            } else {
                RelativeMax
            }
        }
        EquilibriumBranch::Antipodal => {
            if s <= s3 {
                AbsoluteMin
            } else if s < -2.0 {
                RelativeMin
            } else if s < 0.0 || opts.compressed {
                Saddle
            } else {
                InfiniteEnergy
            }
        }
        EquilibriumBranch::SinglePoint => {
            if s < 0.0 || opts.compressed {
                AbsoluteMax
            } else {
                InfiniteEnergy
            }
        }
        EquilibriumBranch::IsoscelesLow | EquilibriumBranch::IsoscelesHigh => Saddle,
    }
}

/// Boundary remark attached to a classification, if any.
///
/// At `s = -2` the antipodal arrangement is labelled a saddle although the
/// closed-form Hessian only covers `s < -2`.
pub fn boundary_note(p: RieszParam, e: &Equilibrium) -> Option<&'static str> {
    let s = p.s();
    match e.branch {
        EquilibriumBranch::Antipodal if s == -2.0 => {
            Some("boundary: antipodal switches from relative minimum to saddle at s = -2")
        }
        EquilibriumBranch::Equilateral | EquilibriumBranch::Antipodal if s == s3_crossover() => {
            Some("boundary: equilateral and antipodal tie at s = s3")
        }
        EquilibriumBranch::Equilateral if s == -4.0 => {
            Some("boundary: degenerate (monkey) saddle at s = -4")
        }
        _ => None,
    }
}

/// Second derivative of `U_s` at `gamma = 0`: `-s/2` (closed form, `s < -2`).
pub fn u_second_derivative_antipodal(p: RieszParam) -> f64 {
    -0.5 * p.s()
}

/// Second derivative of `U_s` at `gamma = pi/3`: `-(s/2) (2/sqrt 3)^s (4 + s)`.
pub fn u_second_derivative_equilateral(p: RieszParam) -> f64 {
    let s = p.s();
    -0.5 * s * (2.0 / 3f64.sqrt()).powf(s) * (4.0 + s)
}
