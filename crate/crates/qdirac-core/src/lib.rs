//! Finite truncations of the quantum disc function algebra, the weighted
//! Hilbert spaces built on it, and the twisted Dirac operators of quantum
//! SU(2).
//!
//! The building blocks, bottom to top:
//!
//! - [`qdisc`]: the graded function algebra on the quantum disc in normal
//!   form `Σ sⁿ fₙ(y) + Σ f₋ₙ(y) s*ⁿ`, with exact table arithmetic on the
//!   spectral grid `{qᵏ}`, the star structure and the scaling automorphisms
//!   `σ^α`, and the boundary symbol map onto trigonometric polynomials.
//! - [`l2`]: the weighted space `L₂(𝔻_q, μ_α)` realised on matrix units,
//!   the Jackson-type integral functional, and left/right multiplication
//!   with their adjoint relations.
//! - [`calculus`]: quantised partial derivatives and the twisted
//!   derivations `T₁`, `T₂`, `T₀` (twist `σ¹`) and their `σ²` counterparts,
//!   with twisted Leibniz and commutator identities.
//! - [`su2q`]: quantum SU(2) as disc elements tensored with circle Fourier
//!   modes, the multiplication representation, and boundedness diagnostics
//!   for candidate differentiable functions.
//! - [`dirac`]: assembly of the twisted operators `Ĥ, Ê, F̂` (and their
//!   twist-2 variants), the grade-blocked Dirac matrices, adjoint-identity
//!   verification and truncated spectra.
//!
//! All types are immutable values and all operations are pure functions, so
//! everything here is safe to evaluate concurrently.

pub mod calculus;
pub mod dirac;
pub mod error;
pub mod l2;
pub mod linalg;
pub mod ops;
pub mod qdisc;
pub mod sampling;
pub mod su2q;

pub use error::Error;

/// Residual threshold for identities that are exact by construction and
/// only accumulate floating-point rounding.
pub const EXACT_TOL: f64 = 1e-12;

/// Residual threshold for identities verified through inner products and
/// operator compositions, where rounding accumulates over larger sums.
pub const ADJOINT_TOL: f64 = 1e-10;

/// Complex double-precision scalar used throughout.
pub type C64 = num_complex::Complex<f64>;
