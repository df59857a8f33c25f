//! Standardized Riesz pair energies and the three-point configuration space.
//!
//! A pair of points at chordal distance `r` carries the energy
//! `V_s(r) = (r^-s - 1)/s` for `s != 0` and `V_0(r) = -ln r`. At `r = 0` the
//! energy is extended by its limit: `-1/s` for `s < 0` and `+inf` otherwise.
//! Three points on the unit circle are described by the inscribed angles
//! `(alpha, beta, gamma)` of the triangle they span, with the opposite chords
//! `2 sin(alpha)` etc.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Error, Result};

/// Below this |s| the pair energy is evaluated as `expm1(-s ln r)/s`.
const SMALL_S: f64 = 1e-6;

/// Tolerance on `alpha + beta + gamma - pi` accepted by [`TriangleConfig::new`].
pub const ANGLE_SUM_TOL: f64 = 1e-12;

/// The exponent `s` at which the equilateral triangle and the antipodal
/// arrangement have equal mean pair energy: `ln(4/9) / ln(4/3)`.
pub fn s3() -> f64 {
    (4.0f64 / 9.0).ln() / (4.0f64 / 3.0).ln()
}

/// The Riesz exponent `s`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct RieszParam(f64);

impl RieszParam {
    pub fn new(s: f64) -> Result<Self> {
        if s.is_finite() {
            Ok(RieszParam(s))
        } else {
            Err(Error::NonFiniteExponent(s))
        }
    }

    #[inline]
    pub fn s(self) -> f64 {
        self.0
    }

    /// `s = 0`, the logarithmic branch.
    pub fn is_log(self) -> bool {
        self.0 == 0.0
    }

    /// Pair forces stay well defined for coincident particles iff `s < -1`.
    pub fn force_proper_everywhere(self) -> bool {
        self.0 < -1.0
    }

    /// A non-universal isosceles equilibrium exists iff `s < -2` and `s != -4`.
    pub fn nonuniversal_possible(self) -> bool {
        self.0 < -2.0 && self.0 != -4.0
    }
}

impl TryFrom<f64> for RieszParam {
    type Error = Error;

    fn try_from(s: f64) -> Result<Self> {
        RieszParam::new(s)
    }
}

impl From<RieszParam> for f64 {
    fn from(p: RieszParam) -> f64 {
        p.0
    }
}

impl fmt::Display for RieszParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Parses a decimal exponent, or the literal `s3` for the crossover exponent.
impl FromStr for RieszParam {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let t = text.trim();
        if t.eq_ignore_ascii_case("s3") {
            return RieszParam::new(s3());
        }
        let valid = !t.is_empty()
            && t
                .bytes()
                .all(|b| b.is_ascii_digit() || matches!(b, b'+' | b'-' | b'.' | b'e' | b'E'));
        if !valid {
            return Err(Error::ParseExponent(text.to_string()));
        }
        let s: f64 = t
            .parse()
            .map_err(|_| Error::ParseExponent(text.to_string()))?;
        RieszParam::new(s)
    }
}

/// An energy on the extended real line (only `+inf` is ever needed).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedEnergy {
    Finite(f64),
    PositiveInfinity,
}

impl ExtendedEnergy {
    /// Wraps a platform float; `+inf` maps to [`ExtendedEnergy::PositiveInfinity`].
    pub fn from_f64(v: f64) -> Self {
        if v == f64::INFINITY {
            ExtendedEnergy::PositiveInfinity
        } else {
            ExtendedEnergy::Finite(v)
        }
    }

    /// The value as a platform float (`+inf` for the infinite case).
    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedEnergy::Finite(v) => v,
            ExtendedEnergy::PositiveInfinity => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedEnergy::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedEnergy::Finite(v) => Some(v),
            ExtendedEnergy::PositiveInfinity => None,
        }
    }
}

impl fmt::Display for ExtendedEnergy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedEnergy::Finite(v) => write!(f, "{v}"),
            ExtendedEnergy::PositiveInfinity => f.write_str("inf"),
        }
    }
}

/// Finite energies serialize as numbers, the infinite one as the string `"inf"`.
impl Serialize for ExtendedEnergy {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedEnergy::Finite(v) => serializer.serialize_f64(*v),
            ExtendedEnergy::PositiveInfinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedEnergy {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct EnergyVisitor;

        impl Visitor<'_> for EnergyVisitor {
            type Value = ExtendedEnergy;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a finite number or the string \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<ExtendedEnergy, E> {
                if v.is_finite() {
                    Ok(ExtendedEnergy::Finite(v))
                } else {
                    Err(E::custom("non-finite energy"))
                }
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<ExtendedEnergy, E> {
                Ok(ExtendedEnergy::Finite(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<ExtendedEnergy, E> {
                Ok(ExtendedEnergy::Finite(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<ExtendedEnergy, E> {
                if v == "inf" {
                    Ok(ExtendedEnergy::PositiveInfinity)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }

        deserializer.deserialize_any(EnergyVisitor)
    }
}

/// `V_s(r)` as a platform float; `r` is assumed to be in `[0, 2]`.
#[inline]
pub(crate) fn pair_energy_value(s: f64, r: f64) -> f64 {
    if r == 0.0 {
        return if s < 0.0 { -1.0 / s } else { f64::INFINITY };
    }
    if s == 0.0 {
        -r.ln()
    } else if s.abs() < SMALL_S {
        (-s * r.ln()).exp_m1() / s
    } else {
        (r.powf(-s) - 1.0) / s
    }
}

/// Standardized Riesz pair energy `V_s(r)` on `0 <= r <= 2`.
pub fn pair_energy(p: RieszParam, r: f64) -> Result<ExtendedEnergy> {
    if !(0.0..=2.0).contains(&r) {
        return Err(domain("chord length", r, "[0, 2]"));
    }
    Ok(ExtendedEnergy::from_f64(pair_energy_value(p.s(), r)))
}

/// Unstandardized Riesz pair energy `sign(s) r^-s` (`-ln r` at `s = 0`).
///
/// For fixed `s != 0` this is `|s| V_s(r) + sign(s)`.
pub fn pair_energy_raw(p: RieszParam, r: f64) -> Result<ExtendedEnergy> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(domain("chord length", r, "[0, inf)"));
    }
    let s = p.s();
    if r == 0.0 && s >= 0.0 {
        return Ok(ExtendedEnergy::PositiveInfinity);
    }
    let v = if s == 0.0 {
        -r.ln()
    } else {
        s.signum() * r.powf(-s)
    };
    Ok(ExtendedEnergy::from_f64(v))
}

/// Chord `2 sin(phi)` subtended by the inscribed angle `phi` in `[0, pi]`.
pub fn chord_from_angle(phi: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&phi) {
        return Err(domain("inscribed angle", phi, "[0, pi]"));
    }
    Ok(chord(phi))
}

/// `2 |sin(phi)|`, evaluated through the nearer of `0` and `pi` so that both
/// degenerate ends give an exact zero.
#[inline]
pub(crate) fn chord(phi: f64) -> f64 {
    if phi.abs() <= std::f64::consts::FRAC_PI_2 {
        2.0 * phi.sin().abs()
    } else {
        2.0 * (PI - phi).sin().abs()
    }
}

/// Mean pair energy of the three chords spanned by `angles`, as a float.
///
/// The three pair terms are summed in sorted order so the result does not
/// depend on how the angles are permuted.
pub(crate) fn mean_pair_energy_value(s: f64, angles: [f64; 3]) -> f64 {
    let mut terms = angles.map(|a| pair_energy_value(s, chord(a)));
    terms.sort_by(f64::total_cmp);
    (terms[0] + terms[1] + terms[2]) / 3.0
}

/// A point of the fundamental triangle `alpha + beta + gamma = pi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangleConfig {
    alpha: f64,
    beta: f64,
    gamma: f64,
}

impl TriangleConfig {
    /// Validates the angles and recomputes `gamma = pi - alpha - beta`.
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        for (name, a) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
            if !(0.0..=PI).contains(&a) {
                return Err(domain(name, a, "[0, pi]"));
            }
        }
        if ((alpha + beta + gamma) - PI).abs() > ANGLE_SUM_TOL {
            return Err(Error::AngleSum(alpha, beta, gamma));
        }
        let gamma = (PI - alpha - beta).clamp(0.0, PI);
        Ok(TriangleConfig { alpha, beta, gamma })
    }

    /// The point `(alpha, beta, pi - alpha - beta)`.
    pub fn from_alpha_beta(alpha: f64, beta: f64) -> Result<Self> {
        TriangleConfig::new(alpha, beta, PI - alpha - beta)
    }

    /// The isosceles point on the height `alpha = beta = (pi - gamma)/2`.
    pub fn isosceles(gamma: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&gamma) {
            return Err(domain("gamma", gamma, "[0, pi]"));
        }
        let base = 0.5 * (PI - gamma);
        Ok(TriangleConfig {
            alpha: base,
            beta: base,
            gamma,
        })
    }

    pub fn equilateral() -> Self {
        let t = PI / 3.0;
        TriangleConfig {
            alpha: t,
            beta: t,
            gamma: t,
        }
    }

    pub fn antipodal() -> Self {
        TriangleConfig {
            alpha: std::f64::consts::FRAC_PI_2,
            beta: std::f64::consts::FRAC_PI_2,
            gamma: 0.0,
        }
    }

    pub fn single_point() -> Self {
        TriangleConfig {
            alpha: 0.0,
            beta: 0.0,
            gamma: PI,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn angles(&self) -> [f64; 3] {
        [self.alpha, self.beta, self.gamma]
    }

    /// Chords `(|a|, |b|, |c|)` opposite to `(alpha, beta, gamma)`.
    pub fn chords(&self) -> [f64; 3] {
        self.angles().map(chord)
    }

    /// Some pair of particles coincides.
    pub fn is_degenerate(&self) -> bool {
        self.chords().contains(&0.0)
    }
}

/// Mean of the three pair energies of a triangle configuration.
pub fn mean_pair_energy(p: RieszParam, c: &TriangleConfig) -> ExtendedEnergy {
    ExtendedEnergy::from_f64(mean_pair_energy_value(p.s(), c.angles()))
}

/// Mean pair energy on the height `alpha = beta`, as a function of `gamma`.
pub fn height_energy(p: RieszParam, gamma: f64) -> Result<ExtendedEnergy> {
    Ok(mean_pair_energy(p, &TriangleConfig::isosceles(gamma)?))
}

/// Height profile `U_s(gamma) = -2 sin^|s|((pi - gamma)/2) - sin^|s|(gamma)`
/// for `s < 0`.
///
/// On the height, `<V_s> = (-2^|s| U_s(gamma) - 3) / (3 s)`; the coefficient
/// of `U_s` is positive, so both share critical points and their type.
pub fn u_profile(p: RieszParam, gamma: f64) -> Result<f64> {
    let s = p.s();
    if s >= 0.0 {
        return Err(domain("s", s, "(-inf, 0)"));
    }
    if !(0.0..=PI).contains(&gamma) {
        return Err(domain("gamma", gamma, "[0, pi]"));
    }
    Ok(u_profile_value(s, gamma))
}

#[inline]
pub(crate) fn u_profile_value(s: f64, gamma: f64) -> f64 {
    let a = s.abs();
    let half = (0.5 * (PI - gamma)).sin();
    -2.0 * half.powf(a) - (0.5 * chord(gamma)).powf(a)
}

/// Mean pair energy on the height recovered from `U_s` via the affine relation.
pub fn height_energy_from_profile(p: RieszParam, gamma: f64) -> Result<f64> {
    let s = p.s();
    let u = u_profile(p, gamma)?;
    Ok((-(2f64.powf(s.abs())) * u - 3.0) / (3.0 * s))
}
