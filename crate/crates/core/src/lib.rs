//! Riesz s-energy equilibria of three particles on the unit circle, their
//! stability classes and bifurcation structure, with a general-N
//! critical-point search for cross-checks.

pub mod bifurcation;
pub mod classify;
pub mod energy;
pub mod equilibria;
pub mod error;
pub mod export;
pub mod landscape;
pub mod nsearch;
pub mod roots;

pub use classify::{classify, StabilityClass, SymmetricMatrix2};
pub use energy::{mean_pair_energy, pair_energy, ExtendedEnergy, RieszParam, TriangleConfig};
pub use equilibria::{enumerate_equilibria, Equilibrium, EquilibriumBranch, Properness};
pub use error::{Error, Result};
