use thiserror::Error;

/// Errors raised by the energy, equilibrium and search routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Riesz exponent must be finite, got {0}")]
    NonFiniteExponent(f64),

    #[error("{what} = {value} is outside its domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("angles ({0}, {1}, {2}) do not sum to pi")]
    AngleSum(f64, f64, f64),

    #[error("energy is +inf somewhere in the finite-difference stencil")]
    InfiniteStencil,

    #[error("finite-difference stencil leaves the region where the energy is twice differentiable")]
    StencilOutsideDomain,

    #[error("force between coincident particles is undefined for s = {0} (pseudo-force regime)")]
    PseudoForce(f64),

    #[error("no stationary point reached after {iterations} iterations (gradient norm {gradient_norm:e})")]
    NoConvergence { iterations: usize, gradient_norm: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid sweep range: {0}")]
    Range(String),

    #[error("cannot parse {0:?} as a Riesz exponent")]
    ParseExponent(String),

    #[error("malformed input: {0}")]
    Decode(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(what: &'static str, value: f64, domain_desc: &'static str) -> Error {
    Error::Domain {
        what,
        value,
        domain: domain_desc,
    }
}
