//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors produced by algebra, space and operator construction.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A constructor argument is outside its allowed range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Two operands live on different truncations (q, K, α or M differ).
    #[error("parameter mismatch: {0}")]
    Mismatch(String),

    /// The boundary value of some coefficient function is infinite, so the
    /// element has no symbol on the boundary circle.
    #[error("unbounded symbol: coefficient at shift degree {degree} diverges at the boundary")]
    UnboundedSymbol { degree: i64 },

    /// A derivation result grows without bound along the grid, i.e. the
    /// input is outside the computational domain of the derivation.
    #[error("domain violation: result table at shift degree {degree} grows unboundedly (sup ratio {ratio:.3e})")]
    OutOfDomain { degree: i64, ratio: f64 },

    /// The integral functional diverges for the requested weight exponent.
    #[error("divergent integral: {0}")]
    Divergence(String),

    /// Twist and weight exponent are paired as (1, α=2) and (2, α=1); any
    /// other combination is rejected.
    #[error("twist {twist} requires alpha = {expected}, got alpha = {alpha}")]
    TwistAlphaMismatch { twist: u8, alpha: f64, expected: f64 },

    /// A dense eigensolve was requested for a block above the size cap.
    #[error("grade block {grade} has dimension {dim}, above the cap {cap}; restrict the grade range or raise the cap")]
    BlockTooLarge { grade: i64, dim: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
