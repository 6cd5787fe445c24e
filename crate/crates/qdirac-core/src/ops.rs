//! Operators on `L₂(𝔻_q, μ_α) ⊗ L₂(S¹)` built from two-sided
//! multiplication terms.
//!
//! Everything this crate applies to vectors — the twisted derivations,
//! the multiplication representation of quantum SU(2), and the blocks of
//! the Dirac operators — is a finite sum of terms of the shape
//!
//! ```text
//!     v ⊗ e^{imt}  ↦  scalar · (m + offset)^[mode_scale] · (L v R) ⊗ e^{i(m+μ)t},
//! ```
//!
//! with `L`, `R` algebra elements acting by left and right multiplication.
//! The optional factor `(m + offset)` carries `i·∂/∂t` acting on circle
//! modes, and `μ` carries multiplication by `e^{iμt}`.  Keeping operators
//! in this shape gives one code path for applying them, for taking
//! adjoints with respect to the weighted inner product, for scanning
//! their grade structure, and for assembling sparse matrices from exact
//! basis-vector images.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::l2::{L2Vector, ModedL2};
use crate::qdisc::DiscElement;
use crate::C64;

/// One two-sided multiplication term of an operator sum.
#[derive(Debug, Clone)]
pub struct OpTerm {
    pub scalar: C64,
    /// Multiply by the circle mode (shifted by `mode_scale_offset`) of the
    /// input component; this is how `i ∂/∂t` enters.
    pub mode_scale: bool,
    pub mode_scale_offset: i64,
    /// Added to the circle mode of the output; multiplication by `e^{iμt}`.
    pub mode_shift: i64,
    pub left: DiscElement,
    pub right: DiscElement,
    lmat: Array2<C64>,
    rmat: Array2<C64>,
}

impl OpTerm {
    fn build(
        scalar: C64,
        mode_scale: bool,
        mode_scale_offset: i64,
        mode_shift: i64,
        left: DiscElement,
        right: DiscElement,
    ) -> Self {
        let lmat = left.to_matrix();
        let rmat = right.to_matrix();
        OpTerm { scalar, mode_scale, mode_scale_offset, mode_shift, left, right, lmat, rmat }
    }

    fn factor(&self, mode: i64) -> C64 {
        if self.mode_scale {
            self.scalar * (mode + self.mode_scale_offset) as f64
        } else {
            self.scalar
        }
    }
}

/// A finite sum of [`OpTerm`]s on a fixed truncation.
#[derive(Debug, Clone)]
pub struct SumOp {
    q: f64,
    kdim: usize,
    alpha: f64,
    terms: Vec<OpTerm>,
}

impl SumOp {
    pub fn new(q: f64, kdim: usize, alpha: f64) -> Self {
        SumOp { q, kdim, alpha, terms: Vec::new() }
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn kdim(&self) -> usize {
        self.kdim
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn terms(&self) -> &[OpTerm] {
        &self.terms
    }

    /// Append the term `scalar · (L · R^op) e^{iμt}` (no mode factor).
    pub fn push(&mut self, scalar: C64, mode_shift: i64, left: DiscElement, right: DiscElement) -> Result<()> {
        self.push_term(scalar, false, 0, mode_shift, left, right)
    }

    /// Append a term carrying `i ∂/∂t`: the input mode multiplies in.
    pub fn push_mode_scaled(
        &mut self,
        scalar: C64,
        mode_shift: i64,
        left: DiscElement,
        right: DiscElement,
    ) -> Result<()> {
        self.push_term(scalar, true, 0, mode_shift, left, right)
    }

    fn push_term(
        &mut self,
        scalar: C64,
        mode_scale: bool,
        mode_scale_offset: i64,
        mode_shift: i64,
        left: DiscElement,
        right: DiscElement,
    ) -> Result<()> {
        if left.q() != self.q || left.kdim() != self.kdim || right.q() != self.q || right.kdim() != self.kdim {
            return Err(Error::Mismatch("operator coefficients on a different truncation".into()));
        }
        self.terms.push(OpTerm::build(scalar, mode_scale, mode_scale_offset, mode_shift, left, right));
        Ok(())
    }

    pub fn extend(&mut self, other: &SumOp) {
        self.terms.extend(other.terms.iter().cloned());
    }

    pub fn scaled(&self, factor: C64) -> SumOp {
        let mut out = self.clone();
        for t in out.terms.iter_mut() {
            t.scalar *= factor;
        }
        out
    }

    pub fn apply(&self, v: &ModedL2) -> Result<ModedL2> {
        if v.q() != self.q || v.kdim() != self.kdim {
            return Err(Error::Mismatch("vector on a different truncation".into()));
        }
        let mut out = ModedL2::zero(self.q, self.kdim, v.alpha())?;
        for (mode, block) in v.modes() {
            for t in &self.terms {
                let f = t.factor(mode);
                if f.norm_sqr() == 0.0 {
                    continue;
                }
                let img = t.lmat.dot(block).dot(&t.rmat).mapv(|x| f * x);
                out.add_coeffs(mode + t.mode_shift, img);
            }
        }
        Ok(out)
    }

    pub fn apply_vector(&self, v: &L2Vector, mode: i64) -> Result<ModedL2> {
        self.apply(&ModedL2::from_vector(v, mode))
    }

    /// Adjoint with respect to the μ_α inner product: left coefficients
    /// conjugate-transpose, right coefficients twist through
    /// `R ↦ σ^α(R)*`, mode shifts reverse.
    pub fn adjoint(&self) -> SumOp {
        let mut out = SumOp::new(self.q, self.kdim, self.alpha);
        for t in &self.terms {
            out.terms.push(OpTerm::build(
                t.scalar.conj(),
                t.mode_scale,
                t.mode_scale_offset - t.mode_shift,
                -t.mode_shift,
                t.left.star(),
                t.right.sigma(self.alpha).star(),
            ));
        }
        out
    }

    /// Exact image of the basis vector `E_{jk} ⊗ e^{imt}` as a sparse list
    /// `(j', k', m', coefficient)`, using only stored grid values.
    pub fn apply_basis(&self, j: usize, k: usize, mode: i64) -> Vec<(usize, usize, i64, C64)> {
        let kdim = self.kdim as i64;
        let mut out = Vec::new();
        for t in &self.terms {
            let f = t.factor(mode);
            if f.norm_sqr() == 0.0 {
                continue;
            }
            for dl in t.left.degrees() {
                let jq = j as i64 + dl;
                if jq < 0 || jq >= kdim {
                    continue;
                }
                let vl = t.left.diagonal(dl).unwrap().values[j.min(jq as usize)];
                if vl.norm_sqr() == 0.0 {
                    continue;
                }
                for dr in t.right.degrees() {
                    let kq = k as i64 - dr;
                    if kq < 0 || kq >= kdim {
                        continue;
                    }
                    let vr = t.right.diagonal(dr).unwrap().values[k.min(kq as usize)];
                    if vr.norm_sqr() == 0.0 {
                        continue;
                    }
                    out.push((jq as usize, kq as usize, mode + t.mode_shift, f * vl * vr));
                }
            }
        }
        out
    }

    /// The uniform shift of the grade `g = (j−k) − m` produced by every
    /// nonzero term, or `None` if the terms shift grades inconsistently.
    pub fn uniform_grade_shift(&self) -> Option<i64> {
        let mut shift: Option<i64> = None;
        for t in &self.terms {
            for dl in t.left.degrees() {
                for dr in t.right.degrees() {
                    let s = dl + dr - t.mode_shift;
                    match shift {
                        None => shift = Some(s),
                        Some(prev) if prev != s => return None,
                        _ => {}
                    }
                }
            }
        }
        shift
    }
}

/// Drop all circle modes with `|m| > mmax`.
pub fn project_modes(v: &ModedL2, mmax: i64) -> ModedL2 {
    let mut out = ModedL2::zero(v.q(), v.kdim(), v.alpha()).expect("valid space");
    for (m, block) in v.modes() {
        if m.abs() <= mmax {
            out.add_coeffs(m, block.clone());
        }
    }
    out
}

/// Operator-norm estimate of `P_M T P_M` by power iteration on `T†T`.
///
/// Deterministic start vector; returns a tight lower bound on the norm of
/// the mode-truncated operator.
pub fn operator_norm(op: &SumOp, mmax: i64, max_iter: usize) -> f64 {
    let adj = op.adjoint();
    let mut v = ModedL2::zero(op.q(), op.kdim(), op.alpha()).expect("valid space");
    for m in -mmax..=mmax {
        let mut block = Array2::<C64>::zeros((op.kdim(), op.kdim()));
        for j in 0..op.kdim() {
            for k in 0..op.kdim() {
                let t = (j as f64 * 0.61 + k as f64 * 1.27 + m as f64 * 0.35) % 1.0;
                block[(j, k)] = C64::new(1.0 + t.sin(), t.cos());
            }
        }
        v.add_coeffs(m, block);
    }
    let nv = v.norm();
    if nv == 0.0 {
        return 0.0;
    }
    v = v.scaled(C64::new(1.0 / nv, 0.0));
    let mut est = 0.0f64;
    for _ in 0..max_iter {
        let w = project_modes(&op.apply(&v).expect("same space"), mmax);
        let u = project_modes(&adj.apply(&w).expect("same space"), mmax);
        let nu = u.norm();
        if nu == 0.0 {
            return 0.0;
        }
        let new_est = nu.sqrt();
        v = u.scaled(C64::new(1.0 / nu, 0.0));
        if (new_est - est).abs() <= 1e-10 * new_est.max(1.0) {
            return new_est;
        }
        est = new_est;
    }
    est
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qdisc::Generator;
    use crate::sampling::{case_rng, random_interior_vector};

    const Q: f64 = 0.5;
    const K: usize = 12;

    fn gen(kind: Generator) -> DiscElement {
        DiscElement::generator(kind, Q, K).unwrap()
    }

    #[test]
    fn apply_matches_basis_images() {
        let mut op = SumOp::new(Q, K, 2.0);
        op.push(C64::new(1.0, 0.0), 1, gen(Generator::Z), gen(Generator::Y)).unwrap();
        op.push_mode_scaled(C64::new(0.0, 1.0), -1, gen(Generator::YPow(-1.0)), gen(Generator::ZStar))
            .unwrap();
        let (j, k, m) = (3, 2, 2);
        let e = L2Vector::matrix_unit(Q, K, 2.0, j, k).unwrap();
        let dense = op.apply_vector(&e, m).unwrap();
        let mut sparse = ModedL2::zero(Q, K, 2.0).unwrap();
        for (jq, kq, mq, c) in op.apply_basis(j, k, m) {
            let mut block = Array2::<C64>::zeros((K, K));
            block[(jq, kq)] = c;
            sparse.add_coeffs(mq, block);
        }
        assert!(dense.sub(&sparse).unwrap().sup_norm() <= 1e-14);
    }

    #[test]
    fn adjoint_agrees_with_inner_products() {
        let alpha = 2.0;
        let mut op = SumOp::new(Q, K, alpha);
        op.push(C64::new(0.7, -0.3), 1, gen(Generator::Z), gen(Generator::YPow(-1.0))).unwrap();
        op.push_mode_scaled(C64::new(0.0, 1.0), 0, gen(Generator::Y), gen(Generator::ZStar)).unwrap();
        let adj = op.adjoint();
        for case in 0..10 {
            let mut rng = case_rng(31, case);
            let f = ModedL2::from_vector(&random_interior_vector(&mut rng, Q, K, alpha, 3), 1);
            let g = ModedL2::from_vector(&random_interior_vector(&mut rng, Q, K, alpha, 3), 2);
            let lhs = op.apply(&f).unwrap().inner(&g).unwrap();
            let rhs = f.inner(&adj.apply(&g).unwrap()).unwrap();
            assert!(
                (lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0),
                "case {case}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn adjoint_is_involutive() {
        let alpha = 1.0;
        let mut op = SumOp::new(Q, K, alpha);
        op.push_mode_scaled(C64::new(0.2, 0.4), 1, gen(Generator::Z), gen(Generator::Y)).unwrap();
        let back = op.adjoint().adjoint();
        let mut rng = case_rng(32, 0);
        let f = ModedL2::from_vector(&random_interior_vector(&mut rng, Q, K, alpha, 3), 1);
        let a = op.apply(&f).unwrap();
        let b = back.apply(&f).unwrap();
        assert!(a.sub(&b).unwrap().sup_norm() <= 1e-12);
    }

    #[test]
    fn grade_shift_scan() {
        let mut op = SumOp::new(Q, K, 2.0);
        // z on the left (degree −1) with mode shift −1: grade shift 0
        op.push(C64::new(1.0, 0.0), -1, gen(Generator::Z), gen(Generator::One)).unwrap();
        // y both sides, no mode shift: grade shift 0
        op.push(C64::new(1.0, 0.0), 0, gen(Generator::Y), gen(Generator::YPow(2.0))).unwrap();
        assert_eq!(op.uniform_grade_shift(), Some(0));
        op.push(C64::new(1.0, 0.0), 1, gen(Generator::Z), gen(Generator::One)).unwrap();
        assert_eq!(op.uniform_grade_shift(), None);
    }

    #[test]
    fn operator_norm_of_diagonal_multiplier() {
        // lmul(y) has norm ‖y‖ = 1 on any truncation
        let mut op = SumOp::new(Q, K, 2.0);
        op.push(C64::new(1.0, 0.0), 0, gen(Generator::Y), gen(Generator::One)).unwrap();
        let n = operator_norm(&op, 2, 200);
        assert!((n - 1.0).abs() <= 1e-6, "norm estimate {n}");
    }
}
