//! Closed-form conversions among P-Q, Q-P and Weyl ordering.
//!
//! All coefficients come from one family of integers,
//! `m! r! / (l! (m-l)! (r-l)!) = l! C(m,l) C(r,l)`, weighted by powers of
//! `±i/2` (Weyl conversions) or `±i` (P-Q ↔ Q-P). Sums stop at
//! `min(m, r)`, past which the binomials vanish.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;

use crate::exactnum::{binomial, factorial, ExactScalar};
use crate::opalg::{Monomial, OrderTag, OrderedPolynomial};

/// Commutative polynomial in two variables; key `(i, j)` is the power of
/// the first and second variable.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct CommutativePoly2 {
    terms: BTreeMap<(u32, u32), ExactScalar>,
}

impl CommutativePoly2 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: ExactScalar) -> Self {
        let mut p = Self::zero();
        p.add_term(0, 0, c);
        p
    }

    pub fn monomial(i: u32, j: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(i, j, ExactScalar::one());
        p
    }

    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), ExactScalar)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for ((i, j), c) in terms {
            p.add_term(i, j, c);
        }
        p
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: ExactScalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((i, j)).or_default();
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn coefficient(&self, i: u32, j: u32) -> ExactScalar {
        self.terms.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &ExactScalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(i, j), c) in &other.terms {
            out.add_term(i, j, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, v)| (*k, v * c)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &other.terms {
                out.add_term(i1 + i2, j1 + j2, c1 * c2);
            }
        }
        out
    }

    /// `p(x, y) ↦ p(α x, β y)`.
    pub fn scale_variables(&self, alpha: &ExactScalar, beta: &ExactScalar) -> Self {
        Self::from_terms(self.terms.iter().map(|(&(i, j), c)| ((i, j), c * alpha.pow(i) * beta.pow(j))))
    }

    /// Partial derivative in the first (`var == 0`) or second variable.
    pub fn derivative(&self, var: usize) -> Self {
        Self::from_terms(self.terms.iter().filter_map(|(&(i, j), c)| {
            let (k, key) = if var == 0 { (i, (i.wrapping_sub(1), j)) } else { (j, (i, j.wrapping_sub(1))) };
            (k > 0).then(|| (key, c * ExactScalar::from_integer(k as i64)))
        }))
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|(i, j)| i + j).max().unwrap_or(0)
    }

    /// Floating-point coefficients, ready for repeated evaluation.
    pub fn to_float(&self) -> FloatPoly2 {
        FloatPoly2 { terms: self.terms.iter().map(|(&(i, j), c)| (i, j, c.to_complex())).collect() }
    }

    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        self.to_float().eval(x, y)
    }

    /// Reads the polynomial as a Weyl symbol `⋮Q^i P^j⋮`.
    pub fn to_weyl(&self) -> OrderedPolynomial {
        OrderedPolynomial::from_terms(OrderTag::Weyl, self.terms.iter().map(|(&(i, j), c)| (Monomial::new(i, j), c.clone())))
    }

    /// The commutative image of an ordered polynomial (tag dropped).
    pub fn from_ordered(p: &OrderedPolynomial) -> Self {
        Self::from_terms(p.terms().map(|(mono, c)| ((mono.m, mono.r), c.clone())))
    }
}

impl fmt::Display for CommutativePoly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut keys: Vec<_> = self.terms.iter().collect();
        keys.sort_by(|(a, _), (b, _)| (b.0 + b.1).cmp(&(a.0 + a.1)).then(b.0.cmp(&a.0)));
        for (n, ((i, j), c)) in keys.into_iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})*x^{i}*y^{j}")?;
        }
        Ok(())
    }
}

/// Double-precision copy of a [`CommutativePoly2`].
#[derive(Debug, Clone, PartialEq)]
pub struct FloatPoly2 {
    terms: Vec<(u32, u32, Complex64)>,
}

impl FloatPoly2 {
    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|&(i, j, c)| c * (powu(x, i) * powu(y, j)))
            .sum()
    }
}

fn powu(x: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, _| acc * x)
}

/// `m! r! / (l! (m-l)! (r-l)!)`, zero outside `l ≤ min(m, r)`.
pub fn contraction_count(m: u32, r: u32, l: u32) -> BigInt {
    factorial(l) * binomial(m, l) * binomial(r, l)
}

fn half_i(sign: i64) -> ExactScalar {
    ExactScalar::i() * ExactScalar::ratio(sign, 2)
}

/// `Σ_l weight^l · l! C(m,l) C(r,l) · mono(m-l, r-l)`
fn contraction_series(tag: OrderTag, m: u32, r: u32, weight: &ExactScalar) -> OrderedPolynomial {
    OrderedPolynomial::from_terms(
        tag,
        (0..=m.min(r)).map(|l| {
            (Monomial::new(m - l, r - l), weight.pow(l) * ExactScalar::from_bigint(contraction_count(m, r, l)))
        }),
    )
}

/// Two-variable Hermite polynomial
/// `H_{m,r}(t, s) = Σ_l m! r! (-1)^l / (l! (m-l)! (r-l)!) t^{m-l} s^{r-l}`.
pub fn hermite_two_var(m: u32, r: u32) -> CommutativePoly2 {
    CommutativePoly2::from_terms((0..=m.min(r)).map(|l| {
        let sign = if l % 2 == 0 { 1 } else { -1 };
        ((m - l, r - l), ExactScalar::from_bigint(contraction_count(m, r, l) * sign))
    }))
}

/// `⋮Q^m P^r⋮ = Σ_l (i/2)^l l! C(r,l) C(m,l) P^{r-l} Q^{m-l}`
pub fn weyl_to_pq(m: u32, r: u32) -> OrderedPolynomial {
    contraction_series(OrderTag::PQ, m, r, &half_i(1))
}

/// `⋮Q^m P^r⋮ = Σ_l (-i/2)^l l! C(r,l) C(m,l) Q^{m-l} P^{r-l}`
pub fn weyl_to_qp(m: u32, r: u32) -> OrderedPolynomial {
    contraction_series(OrderTag::QP, m, r, &half_i(-1))
}

/// `Q^m P^r` in Weyl order: coefficients `(i/2)^l l! C(m,l) C(r,l)`.
pub fn qp_to_weyl(m: u32, r: u32) -> OrderedPolynomial {
    contraction_series(OrderTag::Weyl, m, r, &half_i(1))
}

/// `P^r Q^m` in Weyl order: coefficients `(-i/2)^l l! C(m,l) C(r,l)`.
pub fn pq_to_weyl(m: u32, r: u32) -> OrderedPolynomial {
    contraction_series(OrderTag::Weyl, m, r, &half_i(-1))
}

/// `Q^m P^r = Σ_k m! r! / ((m-k)! (r-k)! k!) i^k P^{r-k} Q^{m-k}`
pub fn qp_to_pq(m: u32, r: u32) -> OrderedPolynomial {
    contraction_series(OrderTag::PQ, m, r, &ExactScalar::i())
}

/// `P^r Q^m = Σ_k m! r! / ((m-k)! (r-k)! k!) (-i)^k Q^{m-k} P^{r-k}`
pub fn pq_to_qp(m: u32, r: u32) -> OrderedPolynomial {
    contraction_series(OrderTag::QP, m, r, &-ExactScalar::i())
}

/// The Hermite-polynomial image of a single ordered monomial before the
/// `√2` and `i` powers are reduced, as a commutative symbol in `(q, p)`.
///
/// * `OrderTag::QP`: `Q^m P^r = (1/√2)^{m+r} (-i)^r ⋮H_{m,r}(√2 Q, i√2 P)⋮`
/// * `OrderTag::PQ`: `P^r Q^m = (1/√2)^{m+r} i^r ⋮H_{m,r}(√2 Q, -i√2 P)⋮`
///
/// Returns `None` for the Weyl tag.
pub fn hermite_weyl_symbol(m: u32, r: u32, source: OrderTag) -> Option<CommutativePoly2> {
    let root2 = ExactScalar::sqrt2();
    let inv_root2 = root2.inv().expect("√2 is invertible");
    let (i_sign, prefactor_i) = match source {
        OrderTag::QP => (1, -ExactScalar::i()),
        OrderTag::PQ => (-1, ExactScalar::i()),
        OrderTag::Weyl => return None,
    };
    let beta = &root2 * ExactScalar::i() * ExactScalar::from_integer(i_sign);
    let prefactor = inv_root2.pow(m + r) * prefactor_i.pow(r);
    Some(hermite_two_var(m, r).scale_variables(&root2, &beta).scale(&prefactor))
}

/// Which ordering a closed-form commutator is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommutatorVariant {
    PQ,
    QP,
}

/// `[Q^m, P^r]` from the closed-form series.
///
/// PQ: `Σ_{k≥1} c_k i^k P^{r-k} Q^{m-k}`. QP: `-Σ_{k≥1} c_k (-i)^k Q^{m-k} P^{r-k}`,
/// the overall sign following from subtracting the `P^r Q^m` expansion.
pub fn commutator_closed_form(m: u32, r: u32, variant: CommutatorVariant) -> OrderedPolynomial {
    let (tag, weight, sign) = match variant {
        CommutatorVariant::PQ => (OrderTag::PQ, ExactScalar::i(), ExactScalar::one()),
        CommutatorVariant::QP => (OrderTag::QP, -ExactScalar::i(), -ExactScalar::one()),
    };
    OrderedPolynomial::from_terms(
        tag,
        (1..=m.min(r)).map(|k| {
            let c = weight.pow(k) * ExactScalar::from_bigint(contraction_count(m, r, k)) * &sign;
            (Monomial::new(m - k, r - k), c)
        }),
    )
}

/// `(P + Q)^n` in the requested ordering.
///
/// Weyl: `Σ_l C(n,l) ⋮Q^l P^{n-l}⋮`. PQ and QP substitute the Weyl-to-P-Q
/// and Weyl-to-Q-P series term by term.
pub fn p_plus_q_power(n: u32, target: OrderTag) -> OrderedPolynomial {
    let mut out = OrderedPolynomial::zero(target);
    for l in 0..=n {
        let outer = ExactScalar::from_bigint(binomial(n, l));
        match target {
            OrderTag::Weyl => out.add_term(Monomial::new(l, n - l), outer),
            OrderTag::PQ | OrderTag::QP => {
                let sign = if target == OrderTag::PQ { 1 } else { -1 };
                let weight = half_i(sign);
                for k in 0..=l.min(n - l) {
                    let c = &outer * weight.pow(k) * ExactScalar::from_bigint(factorial(k) * binomial(l, k) * binomial(n - l, k));
                    // PQ: P^{l-k} Q^{n-l-k}; QP: Q^{l-k} P^{n-l-k}
                    let mono = if target == OrderTag::PQ {
                        Monomial::new(n - l - k, l - k)
                    } else {
                        Monomial::new(l - k, n - l - k)
                    };
                    out.add_term(mono, c);
                }
            }
        }
    }
    out
}

fn monomial_map(source: OrderTag, target: OrderTag) -> fn(u32, u32) -> OrderedPolynomial {
    match (source, target) {
        (OrderTag::PQ, OrderTag::QP) => pq_to_qp,
        (OrderTag::QP, OrderTag::PQ) => qp_to_pq,
        (OrderTag::PQ, OrderTag::Weyl) => pq_to_weyl,
        (OrderTag::QP, OrderTag::Weyl) => qp_to_weyl,
        (OrderTag::Weyl, OrderTag::PQ) => weyl_to_pq,
        (OrderTag::Weyl, OrderTag::QP) => weyl_to_qp,
        _ => |m, r| OrderedPolynomial::monomial(OrderTag::PQ, m, r),
    }
}

/// Re-expresses `p` in the `target` ordering.
pub fn convert(p: &OrderedPolynomial, target: OrderTag) -> OrderedPolynomial {
    if p.tag() == target {
        return p.clone();
    }
    let map = monomial_map(p.tag(), target);
    let mut out = OrderedPolynomial::zero(target);
    for (mono, c) in p.terms() {
        for (image, ic) in map(mono.m, mono.r).terms() {
            out.add_term(*image, ic * c);
        }
    }
    out
}
