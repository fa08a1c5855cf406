use thiserror::Error;

use crate::params::Parity;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("energy {energy} does not solve the matching condition (residual {residual:.3e})")]
    MatchingResidual { energy: f64, residual: f64 },
    #[error("wavevector must be positive, got {0}")]
    NonPositiveMomentum(f64),
    #[error("energy {energy} lies inside the gap |E| <= m = {mass}")]
    InsideGap { energy: f64, mass: f64 },
    #[error("{parity:?} level {index} lost at V = {depth}")]
    LevelLost { parity: Parity, index: usize, depth: f64 },
    #[error("{parity:?} level {index} is not monotone near V = {depth}")]
    NonMonotoneLevel { parity: Parity, index: usize, depth: f64 },
    #[error("V = {depth} sits on a transition depth ({kind} at {transition})")]
    AmbiguousDepth { depth: f64, kind: &'static str, transition: f64 },
    #[error("no N = {n} transmission resonance at V = {depth}; nearest depth with one is {nearest_depth}")]
    NoResonance { n: u32, depth: f64, nearest_depth: f64 },
    #[error("invalid transition scenario: {0}")]
    Scenario(String),
    #[error("box half-length {half_length} too small: bound-state tail weight {tail:.3e} exceeds 1e-6")]
    BoxTooSmall { tail: f64, half_length: f64 },
    #[error("closed-form overlap {closed} disagrees with quadrature {quadrature}")]
    QuadratureMismatch { closed: f64, quadrature: f64 },
    #[error("root finding failed: {0}")]
    NoBracket(String),
}

pub type Result<T> = std::result::Result<T, Error>;
