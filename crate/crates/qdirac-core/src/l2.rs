//! The weighted Hilbert space `L₂(𝔻_q, μ_α)` in finite truncation.
//!
//! The space is realised on matrix units: the element `s^{j−k}·χₖ`
//! (for `j ≥ k`, mirrored for `j < k`) corresponds to the rank-one
//! operator `E_{jk} = |eⱼ⟩⟨eₖ|`, and the functional
//! `μ_α(f) = (1−q)·Tr(f y^α)` induces
//!
//! ```text
//!     ⟨E_{jk}, E_{lm}⟩ = (1−q) q^{αk} δ_{jl} δ_{km}.
//! ```
//!
//! A vector is stored as its K×K coefficient array against this basis.
//! Left and right multiplication by algebra elements act by matrix
//! products; they are exact on interior-supported vectors, i.e. vectors
//! whose coefficients vanish once an index comes within the truncation
//! margin of `K`.

use std::collections::BTreeMap;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::qdisc::{check_params, Boundary, DiscElement};
use crate::C64;

/// Element of `L₂(𝔻_q, μ_α)` at truncation `K`.
#[derive(Debug, Clone)]
pub struct L2Vector {
    q: f64,
    kdim: usize,
    alpha: f64,
    coeffs: Array2<C64>,
}

impl L2Vector {
    pub fn zero(q: f64, kdim: usize, alpha: f64) -> Result<Self> {
        check_params(q, kdim)?;
        Ok(L2Vector { q, kdim, alpha, coeffs: Array2::zeros((kdim, kdim)) })
    }

    /// The basis vector `E_{jk}`.
    pub fn matrix_unit(q: f64, kdim: usize, alpha: f64, j: usize, k: usize) -> Result<Self> {
        let mut v = L2Vector::zero(q, kdim, alpha)?;
        if j >= kdim || k >= kdim {
            return Err(Error::InvalidParameter(format!(
                "matrix unit ({j}, {k}) outside truncation {kdim}"
            )));
        }
        v.coeffs[(j, k)] = C64::new(1.0, 0.0);
        Ok(v)
    }

    /// View an algebra element as a vector of the space.
    pub fn from_element(x: &DiscElement, alpha: f64) -> Self {
        L2Vector { q: x.q(), kdim: x.kdim(), alpha, coeffs: x.to_matrix() }
    }

    pub fn from_coeffs(q: f64, kdim: usize, alpha: f64, coeffs: Array2<C64>) -> Result<Self> {
        check_params(q, kdim)?;
        if coeffs.nrows() != kdim || coeffs.ncols() != kdim {
            return Err(Error::InvalidParameter("coefficient array must be K×K".into()));
        }
        Ok(L2Vector { q, kdim, alpha, coeffs })
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

    pub fn coeffs(&self) -> &Array2<C64> {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut Array2<C64> {
        &mut self.coeffs
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.q != other.q || self.kdim != other.kdim || self.alpha != other.alpha {
            return Err(Error::Mismatch(format!(
                "vectors live on different spaces: (q={}, K={}, α={}) vs (q={}, K={}, α={})",
                self.q, self.kdim, self.alpha, other.q, other.kdim, other.alpha
            )));
        }
        Ok(())
    }

    /// Weighted inner product, antilinear in the first argument.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.check_same(other)?;
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..self.kdim {
            let w = (1.0 - self.q) * self.q.powf(self.alpha * k as f64);
            for j in 0..self.kdim {
                acc += self.coeffs[(j, k)].conj() * other.coeffs[(j, k)] * w;
            }
        }
        Ok(acc)
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).expect("same space").re.max(0.0).sqrt()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(L2Vector {
            q: self.q,
            kdim: self.kdim,
            alpha: self.alpha,
            coeffs: &self.coeffs + &other.coeffs,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(L2Vector {
            q: self.q,
            kdim: self.kdim,
            alpha: self.alpha,
            coeffs: &self.coeffs - &other.coeffs,
        })
    }

    pub fn scaled(&self, factor: C64) -> Self {
        L2Vector {
            q: self.q,
            kdim: self.kdim,
            alpha: self.alpha,
            coeffs: self.coeffs.mapv(|v| factor * v),
        }
    }

    /// Copy with all coefficients at indices `≥ K − margin` zeroed.
    pub fn masked(&self, margin: usize) -> Self {
        let mut out = self.clone();
        let cut = self.kdim.saturating_sub(margin);
        for j in 0..self.kdim {
            for k in 0..self.kdim {
                if j >= cut || k >= cut {
                    out.coeffs[(j, k)] = C64::new(0.0, 0.0);
                }
            }
        }
        out
    }

    pub fn sup_norm(&self) -> f64 {
        self.coeffs.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Left multiplication `x · v` as a matrix product.
pub fn lmul(x: &DiscElement, v: &L2Vector) -> Result<L2Vector> {
    check_operand(x, v)?;
    Ok(L2Vector {
        q: v.q,
        kdim: v.kdim,
        alpha: v.alpha,
        coeffs: x.to_matrix().dot(&v.coeffs),
    })
}

/// Right multiplication `v · x`; the representation of the opposite
/// algebra.  Its adjoint is right multiplication by `σ^α(x)*`, not `x*`.
pub fn rmul(x: &DiscElement, v: &L2Vector) -> Result<L2Vector> {
    check_operand(x, v)?;
    Ok(L2Vector {
        q: v.q,
        kdim: v.kdim,
        alpha: v.alpha,
        coeffs: v.coeffs.dot(&x.to_matrix()),
    })
}

fn check_operand(x: &DiscElement, v: &L2Vector) -> Result<()> {
    if x.q() != v.q || x.kdim() != v.kdim {
        return Err(Error::Mismatch(
            "element and vector live on different truncations".into(),
        ));
    }
    Ok(())
}

/// The integral value together with the truncation-tail bound
/// `(1−q)·sup|f₀|·q^{αK} / (1−q^α)`.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: C64,
    pub tail_bound: f64,
}

/// The weighted integral `μ_α(f) = (1−q)·Σ_{k<K} f₀(qᵏ) q^{αk}`.
///
/// Only the shift-degree-0 part contributes: off-diagonal terms of the
/// trace vanish.  Fails when the weighted series diverges, i.e. when some
/// tail power `q^{βk}` of the diagonal coefficient does not decay against
/// the weight `q^{αk}`.
pub fn integrate(f: &DiscElement, alpha: f64) -> Result<Integral> {
    let q = f.q();
    let kdim = f.kdim();
    let diag = f.diagonal(0);
    if let Some(d) = diag {
        if let Some(beta) = d.tail.min_exponent() {
            if alpha + beta <= 0.0 {
                return Err(Error::Divergence(format!(
                    "diagonal tail behaves like q^({beta}k); needs alpha > {}, got alpha = {alpha}",
                    -beta
                )));
            }
        }
    }
    let mut value = C64::new(0.0, 0.0);
    let mut sup = 0.0f64;
    if let Some(d) = diag {
        for (k, v) in d.values.iter().enumerate() {
            value += v * q.powf(alpha * k as f64);
            sup = sup.max(v.norm());
        }
        if let Boundary::Finite(c) = d.tail.limit() {
            sup = sup.max(c.norm());
        }
    }
    value *= 1.0 - q;
    let tail_bound = if alpha > 0.0 {
        (1.0 - q) * sup * q.powf(alpha * kdim as f64) / (1.0 - q.powf(alpha))
    } else {
        f64::INFINITY
    };
    Ok(Integral { value, tail_bound })
}

/// The `F₀` element behind the matrix unit `E_{jk}`: `s^{j−k}·χₖ` for
/// `j ≥ k` and `χⱼ·s*^{k−j}` for `j < k`.
pub fn matrix_unit_element(q: f64, kdim: usize, j: usize, k: usize) -> Result<DiscElement> {
    check_params(q, kdim)?;
    if j >= kdim || k >= kdim {
        return Err(Error::InvalidParameter(format!(
            "matrix unit ({j}, {k}) outside truncation {kdim}"
        )));
    }
    let mut values = vec![C64::new(0.0, 0.0); kdim];
    values[j.min(k)] = C64::new(1.0, 0.0);
    DiscElement::from_table(q, kdim, j as i64 - k as i64, values)
}

/// A vector of `L₂(𝔻_q, μ_α) ⊗ L₂(S¹)`: one coefficient array per circle
/// Fourier mode.  Modes are unbounded here; only the assembled Dirac
/// matrix truncates them.
#[derive(Debug, Clone)]
pub struct ModedL2 {
    q: f64,
    kdim: usize,
    alpha: f64,
    modes: BTreeMap<i64, Array2<C64>>,
}

impl ModedL2 {
    pub fn zero(q: f64, kdim: usize, alpha: f64) -> Result<Self> {
        check_params(q, kdim)?;
        Ok(ModedL2 { q, kdim, alpha, modes: BTreeMap::new() })
    }

    pub fn from_vector(v: &L2Vector, mode: i64) -> Self {
        let mut m = ModedL2 {
            q: v.q(),
            kdim: v.kdim(),
            alpha: v.alpha(),
            modes: BTreeMap::new(),
        };
        m.add_coeffs(mode, v.coeffs().clone());
        m
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

    pub fn modes(&self) -> impl Iterator<Item = (i64, &Array2<C64>)> + '_ {
        self.modes.iter().map(|(&m, a)| (m, a))
    }

    pub fn mode(&self, m: i64) -> Option<&Array2<C64>> {
        self.modes.get(&m)
    }

    pub fn add_coeffs(&mut self, mode: i64, coeffs: Array2<C64>) {
        match self.modes.get_mut(&mode) {
            Some(slot) => *slot = &*slot + &coeffs,
            None => {
                self.modes.insert(mode, coeffs);
            }
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.q != other.q || self.kdim != other.kdim || self.alpha != other.alpha {
            return Err(Error::Mismatch("moded vectors live on different spaces".into()));
        }
        Ok(())
    }

    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.check_same(other)?;
        let mut acc = C64::new(0.0, 0.0);
        for (&m, a) in &self.modes {
            if let Some(b) = other.modes.get(&m) {
                for k in 0..self.kdim {
                    let w = (1.0 - self.q) * self.q.powf(self.alpha * k as f64);
                    for j in 0..self.kdim {
                        acc += a[(j, k)].conj() * b[(j, k)] * w;
                    }
                }
            }
        }
        Ok(acc)
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).expect("same space").re.max(0.0).sqrt()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (&m, a) in &other.modes {
            out.add_coeffs(m, a.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scaled(C64::new(-1.0, 0.0)))
    }

    pub fn scaled(&self, factor: C64) -> Self {
        ModedL2 {
            q: self.q,
            kdim: self.kdim,
            alpha: self.alpha,
            modes: self.modes.iter().map(|(&m, a)| (m, a.mapv(|v| factor * v))).collect(),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.modes
            .values()
            .flat_map(|a| a.iter())
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// Copy with all coefficients at indices `≥ K − margin` zeroed, in
    /// every mode block.
    pub fn masked(&self, margin: usize) -> Self {
        let cut = self.kdim.saturating_sub(margin);
        let mut out = self.clone();
        for (_, block) in out.modes.iter_mut() {
            for j in 0..self.kdim {
                for k in 0..self.kdim {
                    if j >= cut || k >= cut {
                        block[(j, k)] = C64::new(0.0, 0.0);
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qdisc::Generator;
    use crate::sampling::{case_rng, random_f0_element, random_interior_vector};
    use ndarray::Array2;

    const Q: f64 = 0.5;
    const K: usize = 16;

    fn gen(kind: Generator) -> DiscElement {
        DiscElement::generator(kind, Q, K).unwrap()
    }

    /// Brute-force oracle: μ_α(x) = (1−q)·Tr(M(x)·M(y^α)) on dense matrices.
    fn trace_oracle(x: &DiscElement, alpha: f64) -> C64 {
        let m = x.to_matrix();
        let w = DiscElement::generator(Generator::YPow(alpha), x.q(), x.kdim())
            .unwrap()
            .to_matrix();
        let p = m.dot(&w);
        let mut tr = C64::new(0.0, 0.0);
        for i in 0..x.kdim() {
            tr += p[(i, i)];
        }
        tr * (1.0 - x.q())
    }

    #[test]
    fn inner_products_of_matrix_units() {
        let alpha = 2.0;
        let e01 = L2Vector::matrix_unit(Q, K, alpha, 0, 1).unwrap();
        let e10 = L2Vector::matrix_unit(Q, K, alpha, 1, 0).unwrap();
        let ip = e01.inner(&e01).unwrap();
        let expected = (1.0 - Q) * Q.powf(alpha);
        assert!((ip - C64::new(expected, 0.0)).norm() <= 1e-15);
        assert_eq!(e01.inner(&e10).unwrap(), C64::new(0.0, 0.0));

        // cross-check against the brute-force weighted trace of (E₀₁)*·E₀₁·y^α
        let e01_el = matrix_unit_element(Q, K, 0, 1).unwrap();
        let prod = e01_el.star().try_mul(&e01_el).unwrap();
        let oracle = trace_oracle(&prod, alpha);
        assert!((ip - oracle).norm() <= 1e-15);
    }

    #[test]
    fn inner_product_is_positive_definite() {
        for case in 0..100 {
            let mut rng = case_rng(11, case);
            let v = random_interior_vector(&mut rng, Q, K, 2.0, 2);
            assert!(v.inner(&v).unwrap().re > 0.0, "case {case} not positive");
        }
    }

    #[test]
    fn integrate_one_matches_geometric_series() {
        // (1−q)·Σ q^{2n} → (1−q)/(1−q²) = 1/(1+q) = 2/3 at q = 1/2
        let one = DiscElement::generator(Generator::One, Q, 64).unwrap();
        let r = integrate(&one, 2.0).unwrap();
        let exact = 1.0 / (1.0 + Q);
        assert!((r.value.re - exact).abs() <= r.tail_bound + 1e-15);
        assert!(r.value.im == 0.0);
    }

    #[test]
    fn integrate_kills_off_diagonal_terms() {
        let s = gen(Generator::S);
        let y = gen(Generator::Y);
        let sy = s.try_mul(&y).unwrap();
        let r = integrate(&sy, 1.5).unwrap();
        assert_eq!(r.value, C64::new(0.0, 0.0));
        // oracle: Tr(s f(y) y^α) = 0 on dense matrices
        assert!(trace_oracle(&sy, 1.5).norm() <= 1e-16);
    }

    #[test]
    fn integrate_indicator_gives_single_grid_term() {
        let chi0 = gen(Generator::Indicator(0));
        let r = integrate(&chi0, 2.0).unwrap();
        assert!((r.value.re - (1.0 - Q)).abs() <= 1e-15);
    }

    #[test]
    fn integrate_rejects_divergent_weight() {
        let one = gen(Generator::One);
        assert!(matches!(integrate(&one, 0.0), Err(Error::Divergence(_))));
        let yinv = gen(Generator::YPow(-1.0));
        assert!(matches!(integrate(&yinv, 1.0), Err(Error::Divergence(_))));
        // y⁻¹ against α = 2 still converges
        assert!(integrate(&yinv, 2.0).is_ok());
    }

    #[test]
    fn lmul_by_one_is_identity() {
        let mut rng = case_rng(1, 0);
        let v = random_interior_vector(&mut rng, Q, K, 2.0, 2);
        let w = lmul(&gen(Generator::One), &v).unwrap();
        assert!(w.sub(&v).unwrap().sup_norm() == 0.0);
    }

    #[test]
    fn lmul_rmul_commute() {
        let mut rng = case_rng(2, 0);
        let v = random_interior_vector(&mut rng, Q, K, 2.0, 4);
        let x = gen(Generator::Z);
        let w = gen(Generator::Y);
        let a = lmul(&x, &rmul(&w, &v).unwrap()).unwrap();
        let b = rmul(&w, &lmul(&x, &v).unwrap()).unwrap();
        assert!(a.sub(&b).unwrap().sup_norm() <= 1e-14);
    }

    #[test]
    fn y_powers_act_diagonally() {
        let alpha = 2.0;
        let beta = -1.5;
        let yb = DiscElement::generator(Generator::YPow(beta), Q, K).unwrap();
        let (j, k) = (3, 5);
        let e = L2Vector::matrix_unit(Q, K, alpha, j, k).unwrap();
        let left = lmul(&yb, &e).unwrap();
        let right = rmul(&yb, &e).unwrap();
        assert!((left.coeffs()[(j, k)].re - Q.powf(beta * j as f64)).abs() <= 1e-12);
        assert!((right.coeffs()[(j, k)].re - Q.powf(beta * k as f64)).abs() <= 1e-12);
    }

    #[test]
    fn lmul_is_a_star_representation() {
        let alpha = 2.0;
        let margin = 4;
        for case in 0..20 {
            let mut rng = case_rng(21, case);
            let x = random_f0_element(&mut rng, Q, K, 2, K - margin);
            let f = random_interior_vector(&mut rng, Q, K, alpha, margin);
            let g = random_interior_vector(&mut rng, Q, K, alpha, margin);
            let lhs = lmul(&x, &f).unwrap().inner(&g).unwrap();
            let rhs = f.inner(&lmul(&x.star(), &g).unwrap()).unwrap();
            assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0), "case {case}");
        }
    }

    #[test]
    fn rmul_adjoint_twists_by_sigma() {
        let alpha = 2.0;
        let margin = 4;
        for case in 0..20 {
            let mut rng = case_rng(22, case);
            let x = random_f0_element(&mut rng, Q, K, 2, K - margin);
            let f = random_interior_vector(&mut rng, Q, K, alpha, margin);
            let g = random_interior_vector(&mut rng, Q, K, alpha, margin);
            let lhs = rmul(&x, &f).unwrap().inner(&g).unwrap();
            let rhs = f.inner(&rmul(&x.sigma(alpha).star(), &g).unwrap()).unwrap();
            assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0), "case {case}");
        }
    }

    #[test]
    fn modular_identity_under_the_integral() {
        let alpha = 1.0;
        for case in 0..20 {
            let mut rng = case_rng(23, case);
            let g = random_f0_element(&mut rng, Q, K, 2, K / 2);
            let h = random_f0_element(&mut rng, Q, K, 2, K / 2);
            let lhs = integrate(&g.try_mul(&h).unwrap(), alpha).unwrap().value;
            let rhs = integrate(&h.sigma(alpha).try_mul(&g).unwrap(), alpha).unwrap().value;
            assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0), "case {case}");
        }
    }

    #[test]
    fn matrix_unit_dictionary_matches_basis() {
        for &(j, k) in &[(0usize, 0usize), (3, 1), (1, 4), (5, 5)] {
            let el = matrix_unit_element(Q, K, j, k).unwrap();
            let m = el.to_matrix();
            let mut expected = Array2::<C64>::zeros((K, K));
            expected[(j, k)] = C64::new(1.0, 0.0);
            let diff = (&m - &expected).iter().map(|v| v.norm()).fold(0.0, f64::max);
            assert!(diff == 0.0, "dictionary broken at ({j}, {k})");
        }
    }

    #[test]
    fn moded_vectors_keep_modes_orthogonal() {
        let v = L2Vector::matrix_unit(Q, K, 2.0, 0, 0).unwrap();
        let a = ModedL2::from_vector(&v, 1);
        let b = ModedL2::from_vector(&v, 2);
        assert_eq!(a.inner(&b).unwrap(), C64::new(0.0, 0.0));
        assert!((a.inner(&a).unwrap().re - (1.0 - Q)).abs() <= 1e-15);
    }
}
