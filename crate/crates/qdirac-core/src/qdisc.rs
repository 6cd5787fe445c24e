//! The quantum disc function algebra in finite truncation.
//!
//! An element is kept in the normal form
//!
//! ```text
//!     Σ_{n≥0} sⁿ fₙ(y)  +  Σ_{n≥1} f₋ₙ(y) s*ⁿ,
//! ```
//!
//! where `s` is the unilateral shift, `y eₖ = qᵏ eₖ`, and each coefficient
//! function `fₙ` lives on the spectrum `{qᵏ : k ∈ ℕ} ∪ {0}` of `y`.  A
//! coefficient function is stored as its value table on the grid points
//! `q⁰ … q^{K−1}` together with a *tail model*: a finite power sum
//! `Σ cᵢ q^{βᵢ k}` describing the values at grid indices `k ≥ K` plus the
//! boundary value at the spectrum point `0`.  Every algebra operation acts
//! by index shifts and pointwise products on the grid, so arithmetic is
//! exact wherever only stored grid values are touched; reads past the grid
//! are resolved through the tail model and flagged when that model is not
//! exact for the diagonal in question.
//!
//! The normal form makes the structural relations `s*s = 1` and
//! `ss* = 1 − P₀` automatic: they are encoded in the index bookkeeping of
//! [`DiscElement::try_mul`], not special-cased.

use std::collections::BTreeMap;
use std::fmt;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::C64;

/// Largest number of power terms kept in a tail model before truncation.
const TAIL_CAP: usize = 512;

/// Coefficients with modulus below this are dropped from tail models.
const TAIL_EPS: f64 = 0.0;

/// Value of a coefficient function at the boundary spectrum point `0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    Finite(C64),
    Infinite,
}

impl Boundary {
    pub fn finite(self) -> Option<C64> {
        match self {
            Boundary::Finite(c) => Some(c),
            Boundary::Infinite => None,
        }
    }
}

/// Power-sum model `Σ cᵢ q^{βᵢ k}` for grid values at indices `k ≥ K`.
///
/// `exact` records whether the model reproduces the true coefficient
/// function beyond the grid (true for shift generators, powers of `y` and
/// finitely supported functions; false for the square-root tables of `z`
/// and `z*`, whose tails are only approximated by their limit).
#[derive(Debug, Clone)]
pub struct Tail {
    terms: Vec<(C64, f64)>,
    exact: bool,
}

impl Tail {
    pub fn zero() -> Self {
        Tail { terms: Vec::new(), exact: true }
    }

    pub fn power(coeff: C64, exponent: f64, exact: bool) -> Self {
        let mut t = Tail { terms: vec![(coeff, exponent)], exact };
        t.normalise();
        t
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Value of the model at grid index `k`.
    pub fn eval(&self, q: f64, k: usize) -> C64 {
        let mut v = C64::new(0.0, 0.0);
        for &(c, beta) in &self.terms {
            v += c * q.powf(beta * k as f64);
        }
        v
    }

    /// Limit of the model as `k → ∞`, i.e. the boundary value at `0`.
    pub fn limit(&self) -> Boundary {
        let mut v = C64::new(0.0, 0.0);
        for &(c, beta) in &self.terms {
            if beta < 0.0 {
                return Boundary::Infinite;
            }
            if beta == 0.0 {
                v += c;
            }
        }
        Boundary::Finite(v)
    }

    /// Smallest exponent present, if any.  Negative values signal growth.
    pub fn min_exponent(&self) -> Option<f64> {
        self.terms.iter().map(|&(_, b)| b).fold(None, |m, b| match m {
            None => Some(b),
            Some(x) => Some(x.min(b)),
        })
    }

    fn add_assign(&mut self, other: &Tail) {
        self.exact &= other.exact;
        self.terms.extend_from_slice(&other.terms);
        self.normalise();
    }

    fn scaled(&self, factor: C64) -> Tail {
        let mut t = Tail {
            terms: self.terms.iter().map(|&(c, b)| (factor * c, b)).collect(),
            exact: self.exact,
        };
        t.normalise();
        t
    }

    fn conj(&self) -> Tail {
        Tail {
            terms: self.terms.iter().map(|&(c, b)| (c.conj(), b)).collect(),
            exact: self.exact,
        }
    }

    /// Tail of a product diagonal whose value at index `k` is
    /// `self(k + shift_a) · other(k + shift_b)`: each power `q^{βk}` picks
    /// up the constant `q^{β·shift}`.
    fn product_shifted(&self, other: &Tail, q: f64, shift_a: i64, shift_b: i64) -> Tail {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for &(ca, ba) in &self.terms {
            let fa = q.powf(ba * shift_a as f64);
            for &(cb, bb) in &other.terms {
                let fb = q.powf(bb * shift_b as f64);
                terms.push((ca * cb * (fa * fb), ba + bb));
            }
        }
        let mut t = Tail { terms, exact: self.exact && other.exact };
        t.normalise();
        t
    }

    /// Binomial series of `√(1 − q^{2(k+1)})` in powers of `q^{2k}`,
    /// truncated once the residual at grid index `kdim` drops below
    /// double-precision resolution.  Marked exact when it converged.
    fn sqrt_one_minus(q: f64, kdim: usize) -> Tail {
        let mut terms: Vec<(C64, f64)> = Vec::new();
        let x_at_k = q.powf(2.0 * kdim as f64);
        let mut a = 1.0f64; // binomial coefficient of x^j in √(1−x)
        let mut exact = false;
        for j in 0..48usize {
            if j > 0 {
                a *= (j as f64 - 1.5) / j as f64;
            }
            let coeff = a * q.powf(2.0 * j as f64);
            terms.push((C64::new(coeff, 0.0), 2.0 * j as f64));
            if (coeff * x_at_k.powi(j as i32)).abs() < 1e-18 {
                exact = true;
                break;
            }
        }
        let mut t = Tail { terms, exact };
        t.normalise();
        t
    }

    /// Merge equal exponents, drop vanished coefficients, keep the terms
    /// dominant at large `k` if the cap is exceeded.
    fn normalise(&mut self) {
        self.terms.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut merged: Vec<(C64, f64)> = Vec::with_capacity(self.terms.len());
        for &(c, b) in &self.terms {
            match merged.last_mut() {
                Some(last) if last.1 == b => last.0 += c,
                _ => merged.push((c, b)),
            }
        }
        merged.retain(|&(c, _)| c.norm_sqr() > TAIL_EPS);
        if merged.len() > TAIL_CAP {
            merged.truncate(TAIL_CAP);
            self.exact = false;
        }
        self.terms = merged;
    }
}

/// One diagonal of an element: the value table `fₙ(qᵏ)` for `k < K` plus
/// the tail model for `k ≥ K`.
#[derive(Debug, Clone)]
pub struct Diagonal {
    pub values: Vec<C64>,
    pub tail: Tail,
}

impl Diagonal {
    fn zeros(kdim: usize) -> Self {
        Diagonal { values: vec![C64::new(0.0, 0.0); kdim], tail: Tail::zero() }
    }

    fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.norm_sqr() == 0.0) && self.tail.is_zero()
    }

    /// Grid value at index `i`; reads past the table go through the tail
    /// model and set `*approx` when that model is inexact.
    fn value_at(&self, q: f64, i: usize, approx: &mut bool) -> C64 {
        if i < self.values.len() {
            self.values[i]
        } else {
            if !self.tail.exact {
                *approx = true;
            }
            self.tail.eval(q, i)
        }
    }

    fn sup(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Generator kinds accepted by [`DiscElement::generator`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Generator {
    One,
    Z,
    ZStar,
    Y,
    /// `y^β` for any real `β`; covers `y⁻¹`, `y⁻²` and `√y`.
    YPow(f64),
    S,
    SStar,
    /// Spectral projection onto the grid point `qᵏ` (the matrix unit `E_{kk}`).
    Indicator(usize),
}

/// An element of the truncated quantum disc function algebra.
///
/// `terms` maps the shift degree `n` to its coefficient table; degree
/// `n ≥ 0` stands for `sⁿ fₙ(y)` and degree `n < 0` for `fₙ(y) s*^{|n|}`.
/// On the matrix side, degree `n` populates the diagonal `row − col = n`
/// with entry value `fₙ(q^{min(row,col)})`.
///
/// `approx` is set when some operation had to read a grid value at an
/// index `≥ K` that the tail model could only approximate; sizing `K` at
/// least [working support] + [total shift degree] keeps it clear.
#[derive(Debug, Clone)]
pub struct DiscElement {
    q: f64,
    kdim: usize,
    terms: BTreeMap<i64, Diagonal>,
    approx: bool,
}

pub(crate) fn check_params(q: f64, kdim: usize) -> Result<()> {
    if !(q > 0.0 && q < 1.0) || !q.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "deformation parameter q must lie in (0, 1), got {q}"
        )));
    }
    if kdim == 0 {
        return Err(Error::InvalidParameter("truncation size K must be at least 1".into()));
    }
    Ok(())
}

impl DiscElement {
    /// The zero element on the given truncation.
    pub fn zero(q: f64, kdim: usize) -> Result<Self> {
        check_params(q, kdim)?;
        Ok(DiscElement { q, kdim, terms: BTreeMap::new(), approx: false })
    }

    /// Normal form of a generator.
    ///
    /// `z` is stored through its polar decomposition `z = √(1−y²) s*` as
    /// degree −1 with table `√(1 − q^{2(k+1)})`, matching the lowering
    /// action `z eₙ = √(1−q^{2n}) e_{n−1}`.
    pub fn generator(kind: Generator, q: f64, kdim: usize) -> Result<Self> {
        check_params(q, kdim)?;
        let one = C64::new(1.0, 0.0);
        let mut el = DiscElement::zero(q, kdim)?;
        match kind {
            Generator::One => {
                el.terms.insert(0, Diagonal {
                    values: vec![one; kdim],
                    tail: Tail::power(one, 0.0, true),
                });
            }
            Generator::Y => {
                return DiscElement::generator(Generator::YPow(1.0), q, kdim);
            }
            Generator::YPow(beta) => {
                if beta == 0.0 {
                    return DiscElement::generator(Generator::One, q, kdim);
                }
                let values = (0..kdim)
                    .map(|k| C64::new(q.powf(beta * k as f64), 0.0))
                    .collect();
                el.terms.insert(0, Diagonal { values, tail: Tail::power(one, beta, true) });
            }
            Generator::S => {
                el.terms.insert(1, Diagonal {
                    values: vec![one; kdim],
                    tail: Tail::power(one, 0.0, true),
                });
            }
            Generator::SStar => {
                el.terms.insert(-1, Diagonal {
                    values: vec![one; kdim],
                    tail: Tail::power(one, 0.0, true),
                });
            }
            Generator::Z => {
                let values = (0..kdim)
                    .map(|k| C64::new((1.0 - q.powf(2.0 * (k + 1) as f64)).sqrt(), 0.0))
                    .collect();
                el.terms.insert(-1, Diagonal { values, tail: Tail::sqrt_one_minus(q, kdim) });
            }
            Generator::ZStar => {
                let values = (0..kdim)
                    .map(|k| C64::new((1.0 - q.powf(2.0 * (k + 1) as f64)).sqrt(), 0.0))
                    .collect();
                el.terms.insert(1, Diagonal { values, tail: Tail::sqrt_one_minus(q, kdim) });
            }
            Generator::Indicator(k) => {
                if k >= kdim {
                    return Err(Error::InvalidParameter(format!(
                        "indicator index {k} must be below the truncation size {kdim}"
                    )));
                }
                let mut values = vec![C64::new(0.0, 0.0); kdim];
                values[k] = one;
                el.terms.insert(0, Diagonal { values, tail: Tail::zero() });
            }
        }
        Ok(el)
    }

    /// Element with a single diagonal given by explicit table values.
    /// The tail is zero, so the coefficient function is finitely supported.
    pub fn from_table(q: f64, kdim: usize, degree: i64, values: Vec<C64>) -> Result<Self> {
        check_params(q, kdim)?;
        if values.len() != kdim {
            return Err(Error::InvalidParameter(format!(
                "table length {} does not match truncation size {kdim}",
                values.len()
            )));
        }
        let mut el = DiscElement::zero(q, kdim)?;
        let d = Diagonal { values, tail: Tail::zero() };
        if !d.is_zero() {
            el.terms.insert(degree, d);
        }
        Ok(el)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn kdim(&self) -> usize {
        self.kdim
    }

    pub fn is_approximate(&self) -> bool {
        self.approx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Shift degrees carrying a nonzero coefficient table.
    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.terms.keys().copied()
    }

    pub fn diagonal(&self, degree: i64) -> Option<&Diagonal> {
        self.terms.get(&degree)
    }

    /// Largest |shift degree| present; zero for diagonal elements.
    pub fn max_abs_degree(&self) -> i64 {
        self.terms.keys().map(|n| n.abs()).max().unwrap_or(0)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.q != other.q || self.kdim != other.kdim {
            return Err(Error::Mismatch(format!(
                "operands live on different truncations: (q={}, K={}) vs (q={}, K={})",
                self.q, self.kdim, other.q, other.kdim
            )));
        }
        Ok(())
    }

    /// Normal-ordered product.
    ///
    /// For each pair of diagonals `m` (left) and `n` (right) the product
    /// contributes to diagonal `p = m + n`; the matrix entry of the result
    /// at column `k` is `a(j, l) · b(l, k)` with `j = k + p`, `l = k + n`,
    /// and vanishes when the intermediate index `l` is negative — which is
    /// exactly how `s s* = 1 − P₀` keeps the result in normal form.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let kdim = self.kdim;
        let mut approx = self.approx || other.approx;
        let mut terms: BTreeMap<i64, Diagonal> = BTreeMap::new();
        for (&m, da) in &self.terms {
            for (&n, db) in &other.terms {
                let p = m + n;
                let out = terms.entry(p).or_insert_with(|| Diagonal::zeros(kdim));
                for d in 0..kdim {
                    let col = d as i64 + (-p).max(0);
                    let l = col + n;
                    if l < 0 {
                        continue;
                    }
                    let ia = (l + m.min(0)) as usize;
                    let ib = (col + n.min(0)) as usize;
                    let va = da.value_at(self.q, ia, &mut approx);
                    let vb = db.value_at(self.q, ib, &mut approx);
                    out.values[d] += va * vb;
                }
                // value at output index d is a(d + sa)·b(d + sb)
                let sa = (-p).max(0) + n + m.min(0);
                let sb = (-p).max(0) + n.min(0);
                out.tail.add_assign(&da.tail.product_shifted(&db.tail, self.q, sa, sb));
            }
        }
        terms.retain(|_, d| !d.is_zero());
        Ok(DiscElement { q: self.q, kdim, terms, approx })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut terms = self.terms.clone();
        for (&n, d) in &other.terms {
            let slot = terms.entry(n).or_insert_with(|| Diagonal::zeros(self.kdim));
            for (a, b) in slot.values.iter_mut().zip(&d.values) {
                *a += *b;
            }
            slot.tail.add_assign(&d.tail);
        }
        terms.retain(|_, d| !d.is_zero());
        Ok(DiscElement {
            q: self.q,
            kdim: self.kdim,
            terms,
            approx: self.approx || other.approx,
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scaled(C64::new(-1.0, 0.0)))
    }

    pub fn scaled(&self, factor: C64) -> Self {
        if factor.norm_sqr() == 0.0 {
            return DiscElement { q: self.q, kdim: self.kdim, terms: BTreeMap::new(), approx: self.approx };
        }
        let terms = self
            .terms
            .iter()
            .map(|(&n, d)| {
                (n, Diagonal {
                    values: d.values.iter().map(|v| factor * v).collect(),
                    tail: d.tail.scaled(factor),
                })
            })
            .collect();
        DiscElement { q: self.q, kdim: self.kdim, terms, approx: self.approx }
    }

    /// The involution: `(sⁿ fₙ(y))* = f̄ₙ(y) s*ⁿ`, i.e. degree `n ↦ −n`
    /// with the table conjugated in place (both layouts are indexed by
    /// `min(row, col)`, so the table itself does not move).
    pub fn star(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(&n, d)| {
                (-n, Diagonal {
                    values: d.values.iter().map(|v| v.conj()).collect(),
                    tail: d.tail.conj(),
                })
            })
            .collect();
        DiscElement { q: self.q, kdim: self.kdim, terms, approx: self.approx }
    }

    /// The scaling automorphism `σ^α`: `σ^α(s) = q^{−α} s`,
    /// `σ^α(s*) = q^α s*`, functions of `y` fixed.  On the degree-`n`
    /// component this is multiplication by `q^{−αn}`.
    pub fn sigma(&self, alpha: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(&n, d)| {
                let factor = C64::new(self.q.powf(-alpha * n as f64), 0.0);
                (n, Diagonal {
                    values: d.values.iter().map(|v| factor * v).collect(),
                    tail: d.tail.scaled(factor),
                })
            })
            .collect();
        DiscElement { q: self.q, kdim: self.kdim, terms, approx: self.approx }
    }

    /// Commutator `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.try_mul(other)?.try_sub(&other.try_mul(self)?)
    }

    /// Dense K×K matrix on the basis `e₀ … e_{K−1}`.
    pub fn to_matrix(&self) -> Array2<C64> {
        let k = self.kdim;
        let mut m = Array2::zeros((k, k));
        for (&n, d) in &self.terms {
            for i in 0..k.saturating_sub(n.unsigned_abs() as usize) {
                let (row, col) = if n >= 0 { (i + n as usize, i) } else { (i, i + (-n) as usize) };
                m[(row, col)] = d.values[i];
            }
        }
        m
    }

    /// Boundary value of the coefficient function at shift degree `n`.
    pub fn boundary(&self, degree: i64) -> Boundary {
        match self.terms.get(&degree) {
            None => Boundary::Finite(C64::new(0.0, 0.0)),
            Some(d) => d.tail.limit(),
        }
    }

    /// The symbol on the boundary circle: degree `n` contributes its
    /// boundary value `fₙ(0)` at Fourier mode `n`.  Fails when some
    /// boundary value is infinite (e.g. any element containing `y⁻¹`).
    pub fn symbol(&self) -> Result<CircleElement> {
        let mut modes = BTreeMap::new();
        for (&n, d) in &self.terms {
            match d.tail.limit() {
                Boundary::Infinite => return Err(Error::UnboundedSymbol { degree: n }),
                Boundary::Finite(c) => {
                    if c.norm_sqr() > 0.0 {
                        modes.insert(n, c);
                    }
                }
            }
        }
        Ok(CircleElement { modes })
    }

    /// Largest table modulus across all diagonals.
    pub fn sup_norm(&self) -> f64 {
        self.terms.values().map(Diagonal::sup).fold(0.0, f64::max)
    }

    /// Largest entrywise difference of the coefficient tables.
    pub fn sup_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.try_sub(other)?.sup_norm())
    }
}

impl fmt::Display for DiscElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&n, d) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if n > 0 {
                write!(f, "s^{n}·f(y)")?;
            } else if n < 0 {
                write!(f, "f(y)·s*^{}", -n)?;
            } else {
                write!(f, "f(y)")?;
            }
            write!(f, "[{:.3e}]", d.sup())?;
        }
        Ok(())
    }
}

macro_rules! panicking_op {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl std::ops::$trait for &DiscElement {
            type Output = DiscElement;
            fn $method(self, rhs: &DiscElement) -> DiscElement {
                self.$checked(rhs).expect("operands on mismatched truncations")
            }
        }
    };
}

panicking_op!(Add, add, try_add);
panicking_op!(Sub, sub, try_sub);
panicking_op!(Mul, mul, try_mul);

/// A trigonometric polynomial `Σ γₘ e^{imt}` on the boundary circle.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CircleElement {
    modes: BTreeMap<i64, C64>,
}

impl CircleElement {
    pub fn zero() -> Self {
        CircleElement::default()
    }

    pub fn mode(m: i64, coeff: C64) -> Self {
        let mut modes = BTreeMap::new();
        if coeff.norm_sqr() > 0.0 {
            modes.insert(m, coeff);
        }
        CircleElement { modes }
    }

    pub fn coeff(&self, m: i64) -> C64 {
        self.modes.get(&m).copied().unwrap_or_else(|| C64::new(0.0, 0.0))
    }

    pub fn modes(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        self.modes.iter().map(|(&m, &c)| (m, c))
    }

    pub fn is_zero(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut modes: BTreeMap<i64, C64> = BTreeMap::new();
        for (&m, &a) in &self.modes {
            for (&n, &b) in &other.modes {
                *modes.entry(m + n).or_insert_with(|| C64::new(0.0, 0.0)) += a * b;
            }
        }
        modes.retain(|_, c| c.norm_sqr() > 0.0);
        CircleElement { modes }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut modes = self.modes.clone();
        for (&m, &c) in &other.modes {
            *modes.entry(m).or_insert_with(|| C64::new(0.0, 0.0)) += c;
        }
        modes.retain(|_, c| c.norm_sqr() > 0.0);
        CircleElement { modes }
    }

    /// Star: mode `m` goes to the conjugated coefficient at `−m`.
    pub fn star(&self) -> Self {
        CircleElement {
            modes: self.modes.iter().map(|(&m, &c)| (-m, c.conj())).collect(),
        }
    }

    pub fn sup_diff(&self, other: &Self) -> f64 {
        let mut keys: Vec<i64> = self.modes.keys().chain(other.modes.keys()).copied().collect();
        keys.dedup();
        keys.iter()
            .map(|&m| (self.coeff(m) - other.coeff(m)).norm())
            .fold(0.0, f64::max)
    }
}
