//! Quantised partial derivatives and twisted derivations.
//!
//! The partial derivatives on the quantum disc are commutator formulas,
//!
//! ```text
//!     ∂/∂z(f)  = −1/(1−q²) · y⁻² [z*, f],      ∂/∂z̄(f) = 1/(1−q²) · y⁻² [z, f],
//! ```
//!
//! and the vector-field analogues absorb one power of `y`:
//!
//! ```text
//!     T₁(f) = y ∂/∂z(f) = −1/(1−q²) · y⁻¹ [z*, f],      T₂(f) = y ∂/∂z̄(f).
//! ```
//!
//! `T₁`, `T₂` (and the mode derivative `T̂₀ = y⁻¹ ∂/∂t`) obey the twisted
//! Leibniz rule for the automorphism `σ¹`; the partial derivatives and
//! `Ŝ₀ = y⁻² ∂/∂t` obey it for `σ²`.  The computational domain of each
//! derivation is decided numerically: the result tables must stay bounded
//! along the grid, checked through the tail models and a growth
//! comparison between the two halves of the truncation window.

use crate::error::{Error, Result};
use crate::l2::ModedL2;
use crate::linalg::interior_sup;
use crate::ops::SumOp;
use crate::qdisc::{DiscElement, Generator};
use crate::C64;

/// Growth ratio between the two halves of the grid window above which a
/// result table is declared unbounded.
const GROWTH_FACTOR: f64 = 8.0;

/// The four commutator derivations on the disc algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivationKind {
    /// `∂/∂z`, twist `σ²`.
    DZ,
    /// `∂/∂z̄`, twist `σ²`.
    DZbar,
    /// `T₁ = y ∂/∂z`, twist `σ¹`.
    T1,
    /// `T₂ = y ∂/∂z̄`, twist `σ¹`.
    T2,
}

impl DerivationKind {
    /// Exponent `w` of the twisting automorphism `σ^w`.
    pub fn twist(self) -> u8 {
        match self {
            DerivationKind::DZ | DerivationKind::DZbar => 2,
            DerivationKind::T1 | DerivationKind::T2 => 1,
        }
    }
}

/// A twisted derivation bound to a truncation.
#[derive(Debug, Clone)]
pub struct TwistedDerivation {
    kind: DerivationKind,
    q: f64,
    kdim: usize,
}

impl TwistedDerivation {
    pub fn new(kind: DerivationKind, q: f64, kdim: usize) -> Result<Self> {
        crate::qdisc::check_params(q, kdim)?;
        Ok(TwistedDerivation { kind, q, kdim })
    }

    pub fn kind(&self) -> DerivationKind {
        self.kind
    }

    pub fn twist(&self) -> u8 {
        self.kind.twist()
    }

    fn pieces(&self) -> Result<(C64, DiscElement, DiscElement)> {
        // (coefficient, commutator partner, y-power on the left)
        let c = 1.0 / (1.0 - self.q * self.q);
        let (sign, partner) = match self.kind {
            DerivationKind::DZ | DerivationKind::T1 => (-c, Generator::ZStar),
            DerivationKind::DZbar | DerivationKind::T2 => (c, Generator::Z),
        };
        let ypow = -(self.twist() as f64);
        Ok((
            C64::new(sign, 0.0),
            DiscElement::generator(partner, self.q, self.kdim)?,
            DiscElement::generator(Generator::YPow(ypow), self.q, self.kdim)?,
        ))
    }

    /// Apply the derivation inside the algebra.  Fails when the result
    /// leaves the computational domain.
    pub fn apply(&self, f: &DiscElement) -> Result<DiscElement> {
        let (coeff, partner, yinv) = self.pieces()?;
        let result = yinv.try_mul(&partner.commutator(f)?)?.scaled(coeff);
        domain_check(&result)?;
        Ok(result)
    }

    /// The same derivation as an operator on `L₂` vectors.
    pub fn vector_op(&self, alpha: f64) -> Result<SumOp> {
        let (coeff, partner, yinv) = self.pieces()?;
        let one = DiscElement::generator(Generator::One, self.q, self.kdim)?;
        let mut op = SumOp::new(self.q, self.kdim, alpha);
        op.push(coeff, 0, yinv.try_mul(&partner)?, one)?;
        op.push(-coeff, 0, yinv, partner)?;
        Ok(op)
    }
}

/// Unboundedness test for derivation results: a tail power that grows, or
/// an unexplained blow-up of the table between the window halves.
fn domain_check(el: &DiscElement) -> Result<()> {
    let kdim = el.kdim();
    let scale = el.sup_norm().max(f64::MIN_POSITIVE);
    for n in el.degrees() {
        let d = el.diagonal(n).unwrap();
        if let Some(beta) = d.tail.min_exponent() {
            if beta < -1e-9 {
                return Err(Error::OutOfDomain { degree: n, ratio: f64::INFINITY });
            }
        }
        if d.tail.is_exact() {
            continue;
        }
        let half = kdim / 2;
        let near = d.values[..half].iter().map(|v| v.norm()).fold(0.0, f64::max);
        let far = d.values[half..].iter().map(|v| v.norm()).fold(0.0, f64::max);
        if far > GROWTH_FACTOR * near.max(1e-9 * scale) {
            return Err(Error::OutOfDomain { degree: n, ratio: far / near.max(f64::MIN_POSITIVE) });
        }
    }
    Ok(())
}

/// `‖D(fg) − D(f)g − σ^w(f) D(g)‖` over the interior of the truncated
/// matrix picture, relative to the size of the two sides.  (The unscaled
/// defect grows with the `y⁻ʷ` amplification inside the derivation, so a
/// raw sup would measure floating-point noise, not the identity.)
pub fn leibniz_residual(
    deriv: &TwistedDerivation,
    f: &DiscElement,
    g: &DiscElement,
    margin: usize,
) -> Result<f64> {
    let w = deriv.twist() as f64;
    let lhs = deriv.apply(&f.try_mul(g)?)?;
    let rhs = deriv.apply(f)?.try_mul(g)?.try_add(&f.sigma(w).try_mul(&deriv.apply(g)?)?)?;
    let diff = lhs.try_sub(&rhs)?;
    let scale = interior_sup(&lhs.to_matrix(), margin)
        .max(interior_sup(&rhs.to_matrix(), margin))
        .max(1.0);
    Ok(interior_sup(&diff.to_matrix(), margin) / scale)
}

/// The mode derivative `T̂₀ = y⁻¹ ∂/∂t` (`alpha_kind = 1`) or
/// `Ŝ₀ = y⁻² ∂/∂t` (`alpha_kind = 2`) on an element carried by the circle
/// mode `m`: multiplication by `i·m` and by `y^{−kind}` on the left.  The
/// mode itself is unchanged.
pub fn t0_apply(f: &DiscElement, mode: i64, alpha_kind: u8) -> Result<DiscElement> {
    let ypow = DiscElement::generator(Generator::YPow(-(alpha_kind as f64)), f.q(), f.kdim())?;
    Ok(ypow.try_mul(f)?.scaled(C64::new(0.0, mode as f64)))
}

/// `T̂₀`/`Ŝ₀` as an operator on moded vectors.
pub fn t0_vector_op(alpha_kind: u8, q: f64, kdim: usize, alpha: f64) -> Result<SumOp> {
    let ypow = DiscElement::generator(Generator::YPow(-(alpha_kind as f64)), q, kdim)?;
    let one = DiscElement::generator(Generator::One, q, kdim)?;
    let mut op = SumOp::new(q, kdim, alpha);
    op.push_mode_scaled(C64::new(0.0, 1.0), 0, ypow, one)?;
    Ok(op)
}

/// Twisted Leibniz defect of the mode derivative on
/// `(f ⊗ e^{im_f t})·(g ⊗ e^{im_g t})`.
pub fn t0_leibniz_residual(
    f: &DiscElement,
    f_mode: i64,
    g: &DiscElement,
    g_mode: i64,
    alpha_kind: u8,
    margin: usize,
) -> Result<f64> {
    let w = alpha_kind as f64;
    let lhs = t0_apply(&f.try_mul(g)?, f_mode + g_mode, alpha_kind)?;
    let rhs = t0_apply(f, f_mode, alpha_kind)?
        .try_mul(g)?
        .try_add(&f.sigma(w).try_mul(&t0_apply(g, g_mode, alpha_kind)?)?)?;
    let scale = interior_sup(&lhs.to_matrix(), margin)
        .max(interior_sup(&rhs.to_matrix(), margin))
        .max(1.0);
    Ok(interior_sup(&lhs.try_sub(&rhs)?.to_matrix(), margin) / scale)
}

/// The operator `T` of the commutator identity: a twisted derivation
/// tensored with the circle identity, or a mode derivative.
#[derive(Debug, Clone)]
pub enum LemmaOperator {
    Derivation(TwistedDerivation),
    ModeDerivative { alpha_kind: u8, q: f64, kdim: usize },
}

impl LemmaOperator {
    pub fn twist(&self) -> u8 {
        match self {
            LemmaOperator::Derivation(d) => d.twist(),
            LemmaOperator::ModeDerivative { alpha_kind, .. } => *alpha_kind,
        }
    }

    /// `T f` inside the algebra, for `f` carried by circle mode `f_mode`.
    pub fn element_image(&self, f: &DiscElement, f_mode: i64) -> Result<DiscElement> {
        match self {
            LemmaOperator::Derivation(d) => d.apply(f),
            LemmaOperator::ModeDerivative { alpha_kind, .. } => t0_apply(f, f_mode, *alpha_kind),
        }
    }

    pub fn vector_op(&self, alpha: f64) -> Result<SumOp> {
        match self {
            LemmaOperator::Derivation(d) => d.vector_op(alpha),
            LemmaOperator::ModeDerivative { alpha_kind, q, kdim } => {
                t0_vector_op(*alpha_kind, *q, *kdim, alpha)
            }
        }
    }
}

/// Both evaluations of the twisted commutator `[x̂ T, π(f)]_σ ψ` and their
/// interior disagreement.
///
/// `residual` is backward-relative: the commutator is a cancellation of
/// two compositions whose entries are far larger than the result, so the
/// disagreement is measured against the size of those compositions — the
/// scale on which double precision can certify anything at all.
#[derive(Debug, Clone)]
pub struct Lemma1Outcome {
    pub composed: ModedL2,
    pub closed: ModedL2,
    pub residual: f64,
}

/// Evaluate `[x̂ T, π(f ⊗ e^{i m_f t})]_σ ψ` two ways: by operator
/// composition, and through the closed form `ψ ↦ (Tf)·ψ·x` with the mode
/// shift of `f`.  On interior vectors the two agree.
pub fn lemma1_commutator(
    t_op: &LemmaOperator,
    x: &DiscElement,
    f: &DiscElement,
    f_mode: i64,
    psi: &ModedL2,
    margin: usize,
) -> Result<Lemma1Outcome> {
    let (q, kdim, alpha) = (psi.q(), psi.kdim(), psi.alpha());
    let one = DiscElement::generator(Generator::One, q, kdim)?;
    let unit = C64::new(1.0, 0.0);

    let t = t_op.vector_op(alpha)?;
    let mut xop = SumOp::new(q, kdim, alpha);
    xop.push(unit, 0, one.clone(), x.clone())?;
    let mut pf = SumOp::new(q, kdim, alpha);
    pf.push(unit, f_mode, f.clone(), one.clone())?;
    let mut pf_twisted = SumOp::new(q, kdim, alpha);
    pf_twisted.push(unit, f_mode, f.sigma(t_op.twist() as f64), one.clone())?;

    let first = xop.apply(&t.apply(&pf.apply(psi)?)?)?;
    let second = pf_twisted.apply(&xop.apply(&t.apply(psi)?)?)?;
    let composed = first.sub(&second)?;

    let mut closed_op = SumOp::new(q, kdim, alpha);
    closed_op.push(unit, f_mode, t_op.element_image(f, f_mode)?, x.clone())?;
    let closed = closed_op.apply(psi)?;

    let diff = composed.sub(&closed)?.masked(margin);
    let scale = first
        .masked(margin)
        .sup_norm()
        .max(second.masked(margin).sup_norm())
        .max(closed.masked(margin).sup_norm())
        .max(1.0);
    Ok(Lemma1Outcome { composed, closed, residual: diff.sup_norm() / scale })
}
