//! The two-fold phase-space transform
//! `G(p,q) = (1/π) ∬ h(p',q') e^{2i(p-p')(q-q')} dq' dp'` and its inverse
//! (kernel sign flipped), numerically on sampled grids and symbolically on
//! polynomials.
//!
//! On grids the kernel factors as `e^{2ipq} e^{-2ipq'} e^{-2ip'q} e^{2ip'q'}`,
//! so the double sum is two dense matrix products with precomputed phase
//! tables, `O(n³)` instead of `O(n⁴)`.
//!
//! Polynomials are in `(t, s)` with the first variable paired with `q` (or
//! `x`) and the second with `p` (or `y`).

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // float methods resolve inherently when std is linked
use num_traits::Float;

use crate::exactnum::ExactScalar;
use crate::fockspace::pairwise_sum;
use crate::ordering::{contraction_count, hermite_two_var, CommutativePoly2};

/// Largest boundary magnitude for which a field counts as decayed.
pub const BOUNDARY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TransformError {
    #[error("invalid sampled field: {0}")]
    InvalidField(&'static str),
    #[error("expected {expected} samples, found {found}")]
    SampleCount { expected: usize, found: usize },
}

/// Complex samples of a phase-space function on a uniform tensor grid.
///
/// Nodes include both endpoints; `values[iq * np + ip]` is the sample at
/// `(q_iq, p_ip)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    q_min: f64,
    q_max: f64,
    p_min: f64,
    p_max: f64,
    nq: usize,
    np: usize,
    values: Vec<Complex64>,
}

impl SampledField {
    pub fn new(
        (q_min, q_max): (f64, f64),
        (p_min, p_max): (f64, f64),
        nq: usize,
        np: usize,
        values: Vec<Complex64>,
    ) -> Result<Self, TransformError> {
        if nq < 2 || np < 2 {
            return Err(TransformError::InvalidField("at least two samples per axis are required"));
        }
        if ![q_min, q_max, p_min, p_max].iter().all(|x| x.is_finite()) || q_max <= q_min || p_max <= p_min {
            return Err(TransformError::InvalidField("bounds must be finite with max > min"));
        }
        if values.len() != nq * np {
            return Err(TransformError::SampleCount { expected: nq * np, found: values.len() });
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(TransformError::InvalidField("samples must be finite"));
        }
        Ok(SampledField { q_min, q_max, p_min, p_max, nq, np, values })
    }

    pub fn from_fn(
        q_range: (f64, f64),
        p_range: (f64, f64),
        nq: usize,
        np: usize,
        f: impl Fn(f64, f64) -> Complex64,
    ) -> Result<Self, TransformError> {
        let mut field = Self::new(q_range, p_range, nq, np, vec![Complex64::new(0.0, 0.0); nq.max(2) * np.max(2)])?;
        for iq in 0..nq {
            for ip in 0..np {
                field.values[iq * np + ip] = f(field.q(iq), field.p(ip));
            }
        }
        Self::new(q_range, p_range, nq, np, field.values)
    }

    /// `e^{-q²-p²}` on `[-half_width, half_width]²` with `n` nodes per axis.
    pub fn gaussian(half_width: f64, n: usize) -> Result<Self, TransformError> {
        let r = (-half_width, half_width);
        Self::from_fn(r, r, n, n, |q, p| Complex64::new((-q * q - p * p).exp(), 0.0))
    }

    /// Same grid, new samples.
    pub fn with_values(&self, values: Vec<Complex64>) -> Result<Self, TransformError> {
        Self::new(self.q_range(), self.p_range(), self.nq, self.np, values)
    }

    pub fn q_range(&self) -> (f64, f64) {
        (self.q_min, self.q_max)
    }

    pub fn p_range(&self) -> (f64, f64) {
        (self.p_min, self.p_max)
    }

    pub fn nq(&self) -> usize {
        self.nq
    }

    pub fn np(&self) -> usize {
        self.np
    }

    pub fn q_step(&self) -> f64 {
        (self.q_max - self.q_min) / (self.nq - 1) as f64
    }

    pub fn p_step(&self) -> f64 {
        (self.p_max - self.p_min) / (self.np - 1) as f64
    }

    pub fn q(&self, iq: usize) -> f64 {
        self.q_min + iq as f64 * self.q_step()
    }

    pub fn p(&self, ip: usize) -> f64 {
        self.p_min + ip as f64 * self.p_step()
    }

    pub fn get(&self, iq: usize, ip: usize) -> Complex64 {
        self.values[iq * self.np + ip]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// `α·self + β·other` on a shared grid.
    pub fn combine(&self, alpha: Complex64, other: &Self, beta: Complex64) -> Result<Self, TransformError> {
        if self.q_range() != other.q_range() || self.p_range() != other.p_range() || self.nq != other.nq || self.np != other.np {
            return Err(TransformError::InvalidField("grids differ"));
        }
        self.with_values(self.values.iter().zip(&other.values).map(|(a, b)| a * alpha + b * beta).collect())
    }

    /// Largest sample modulus on the outermost rows and columns.
    pub fn boundary_max(&self) -> f64 {
        let mut worst = 0.0f64;
        for iq in 0..self.nq {
            for ip in 0..self.np {
                if iq == 0 || ip == 0 || iq + 1 == self.nq || ip + 1 == self.np {
                    worst = worst.max(self.get(iq, ip).norm());
                }
            }
        }
        worst
    }

    /// `∬ |f|² dq dp` with uniform node weights.
    pub fn norm_squared(&self) -> f64 {
        let sq: Vec<Complex64> = self.values.iter().map(|v| Complex64::new(v.norm_sqr(), 0.0)).collect();
        pairwise_sum(&sq).re * self.q_step() * self.p_step()
    }
}

/// The input did not decay to [`BOUNDARY_TOLERANCE`] at the grid edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainWarning {
    pub boundary_max: f64,
}

/// A transformed field and whether the decay precondition held.
#[derive(Debug, Clone, PartialEq)]
pub struct Transformed {
    pub field: SampledField,
    pub warning: Option<DomainWarning>,
}

impl Transformed {
    pub fn is_reliable(&self) -> bool {
        self.warning.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Direction {
    Forward,
    Inverse,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Inverse => -1.0,
        }
    }
}

fn cis(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), theta.sin())
}

fn transform(h: &SampledField, dir: Direction) -> Transformed {
    let s = dir.sign();
    let (nq, np) = (h.nq, h.np);
    let w = h.q_step() * h.p_step() / PI;
    let qs: Vec<f64> = (0..nq).map(|i| h.q(i)).collect();
    let ps: Vec<f64> = (0..np).map(|j| h.p(j)).collect();
    // F(k,l) = w h(q'_k,p'_l) e^{2is p'_l q'_k}
    let mut f = vec![Complex64::new(0.0, 0.0); nq * np];
    for k in 0..nq {
        for l in 0..np {
            f[k * np + l] = h.get(k, l) * cis(2.0 * s * ps[l] * qs[k]) * w;
        }
    }
    // E1(l,i) = e^{-2is p'_l q_i}, E2(k,j) = e^{-2is p_j q'_k}
    let e1: Vec<Complex64> = ps.iter().flat_map(|&pl| qs.iter().map(move |&q| cis(-2.0 * s * pl * q))).collect();
    let e2: Vec<Complex64> = qs.iter().flat_map(|&qk| ps.iter().map(move |&p| cis(-2.0 * s * p * qk))).collect();
    // A(k,i) = Σ_l F(k,l) E1(l,i)
    let mut a = vec![Complex64::new(0.0, 0.0); nq * nq];
    for k in 0..nq {
        let row = &mut a[k * nq..(k + 1) * nq];
        for l in 0..np {
            let fk = f[k * np + l];
            for (dst, e) in row.iter_mut().zip(&e1[l * nq..(l + 1) * nq]) {
                *dst += fk * e;
            }
        }
    }
    // B(i,j) = Σ_k A(k,i) E2(k,j)
    let mut b = vec![Complex64::new(0.0, 0.0); nq * np];
    for k in 0..nq {
        let e2k = &e2[k * np..(k + 1) * np];
        for i in 0..nq {
            let aki = a[k * nq + i];
            for (dst, e) in b[i * np..(i + 1) * np].iter_mut().zip(e2k) {
                *dst += aki * e;
            }
        }
    }
    for i in 0..nq {
        for j in 0..np {
            b[i * np + j] *= cis(2.0 * s * ps[j] * qs[i]);
        }
    }
    let boundary = h.boundary_max();
    Transformed {
        field: h.with_values(b).expect("same grid"),
        warning: (!(boundary < BOUNDARY_TOLERANCE)).then_some(DomainWarning { boundary_max: boundary }),
    }
}

/// `G(p,q) = (1/π) ∬ h(p',q') e^{2i(p-p')(q-q')} dq' dp'` on the input grid.
pub fn forward_transform(h: &SampledField) -> Transformed {
    transform(h, Direction::Forward)
}

/// `h(p,q) = (1/π) ∬ G(p',q') e^{-2i(p-p')(q-q')} dq' dp'` on the input grid.
pub fn inverse_transform(g: &SampledField) -> Transformed {
    transform(g, Direction::Inverse)
}

fn transform_at(h: &SampledField, q: f64, p: f64, dir: Direction) -> Complex64 {
    let s = dir.sign();
    let w = h.q_step() * h.p_step() / PI;
    let terms: Vec<Complex64> = (0..h.nq)
        .map(|k| {
            let qk = h.q(k);
            let row: Vec<Complex64> = (0..h.np).map(|l| h.get(k, l) * cis(2.0 * s * (p - h.p(l)) * (q - qk))).collect();
            pairwise_sum(&row)
        })
        .collect();
    pairwise_sum(&terms) * w
}

/// The forward transform at an arbitrary point, by direct summation.
pub fn forward_at(h: &SampledField, q: f64, p: f64) -> Complex64 {
    transform_at(h, q, p, Direction::Forward)
}

/// The inverse transform at an arbitrary point, by direct summation.
pub fn inverse_at(g: &SampledField, q: f64, p: f64) -> Complex64 {
    transform_at(g, q, p, Direction::Inverse)
}

/// `(∬|h|²/π, ∬|G|²/π)` with `G` the forward transform of `h`.
pub fn parseval_check(h: &SampledField) -> (f64, f64) {
    let g = forward_transform(h).field;
    (h.norm_squared() / PI, g.norm_squared() / PI)
}

/// `(1/√2) e^{-(q²+p²)/2 + ipq}`, the transform of `e^{-q²-p²}`.
pub fn gaussian_image(q: f64, p: f64) -> Complex64 {
    cis(p * q) * ((-(q * q + p * p) / 2.0).exp() * core::f64::consts::FRAC_1_SQRT_2)
}

fn half_i(sign: i64) -> ExactScalar {
    ExactScalar::i() * ExactScalar::ratio(sign, 2)
}

fn contraction_image(m: u32, r: u32, weight: &ExactScalar) -> CommutativePoly2 {
    CommutativePoly2::from_terms(
        (0..=m.min(r)).map(|l| ((m - l, r - l), weight.pow(l) * ExactScalar::from_bigint(contraction_count(m, r, l)))),
    )
}

/// Forward image of `x^m y^r`:
/// `(1/√2)^{m+r} (-i)^r H_{m,r}(√2 t, i√2 s)`.
pub fn monomial_forward(m: u32, r: u32) -> CommutativePoly2 {
    let root2 = ExactScalar::sqrt2();
    let prefactor = root2.inv().expect("√2 is invertible").pow(m + r) * (-ExactScalar::i()).pow(r);
    hermite_two_var(m, r).scale_variables(&root2, &(&root2 * ExactScalar::i())).scale(&prefactor)
}

/// Inverse-kernel image of `x^m y^r`: `Σ_l (-i/2)^l l! C(m,l) C(r,l) t^{m-l} s^{r-l}`.
pub fn inverse_image(m: u32, r: u32) -> CommutativePoly2 {
    contraction_image(m, r, &half_i(-1))
}

fn apply_linear(h: &CommutativePoly2, image: fn(u32, u32) -> CommutativePoly2) -> CommutativePoly2 {
    let mut out = CommutativePoly2::zero();
    for (&(m, r), c) in h.terms() {
        out = out.add(&image(m, r).scale(c));
    }
    out
}

/// The forward transform of a polynomial symbol.
pub fn forward_poly(h: &CommutativePoly2) -> CommutativePoly2 {
    apply_linear(h, monomial_forward)
}

/// The inverse transform of a polynomial symbol.
pub fn inverse_poly(g: &CommutativePoly2) -> CommutativePoly2 {
    apply_linear(g, inverse_image)
}

/// The inverse transform applied to `monomial_forward(m, r)`; always `t^m s^r`.
pub fn monomial_inverse(m: u32, r: u32) -> CommutativePoly2 {
    inverse_poly(&monomial_forward(m, r))
}

/// `e^{2ist} (∂_t)^r (∂_s)^m e^{-2ist}` as a polynomial in `(t, s)`, before
/// normalization.
pub fn derivative_raw(m: u32, r: u32) -> CommutativePoly2 {
    let minus_2i = ExactScalar::i() * ExactScalar::from_integer(-2);
    let t = CommutativePoly2::monomial(1, 0).scale(&minus_2i);
    let s = CommutativePoly2::monomial(0, 1).scale(&minus_2i);
    let mut f = CommutativePoly2::constant(ExactScalar::one());
    // ∂_s (f E) = (∂_s f - 2it f) E, ∂_t (f E) = (∂_t f - 2is f) E
    for _ in 0..m {
        f = f.derivative(1).add(&f.mul(&t));
    }
    for _ in 0..r {
        f = f.derivative(0).add(&f.mul(&s));
    }
    f
}

/// [`derivative_raw`] times `(-2i)^{-(m+r)}`; equals `monomial_forward(m, r)`.
pub fn derivative_representation(m: u32, r: u32) -> CommutativePoly2 {
    derivative_raw(m, r).scale(&half_i(1).pow(m + r))
}

/// `(1/π) ∬ x^m y^r e^{-ε(x²+y²)} e^{2i(y-s)(x-t)} dx dy` at each `(t, s)`,
/// for every `(m, r)` with `m + r ≤ max_degree`.
///
/// The result is indexed `[monomial][point]` with monomials ordered by total
/// degree, then by `r`: `(0,0), (1,0), (0,1), (2,0), …`.
pub fn regularized_monomial_forward(eps: f64, max_degree: u32, points: &[(f64, f64)]) -> Vec<Vec<Complex64>> {
    let monomials = monomial_list(max_degree);
    let d = max_degree as i32;
    let mut out = vec![Vec::with_capacity(points.len()); monomials.len()];
    // With u = x - t, v = y - s the u-integral is a Gaussian transform at
    // frequency 2v, negligible once v² ≫ ε; the v grid only spans that core
    // but must be fine enough for u up to the x cutoff.
    let x_cut = ((23.0 + 3.0 * 100f64.ln() + 3.0 * d as f64) / eps).sqrt() + 2.0;
    let v_cut = (eps * (40.0 + 3.0 * (1.0 + 1.0 / eps).ln())).sqrt();
    let hu = PI / (2.0 * v_cut + 4.0);
    for &(t, s) in points {
        let hv = 0.9 * PI / (x_cut + t.abs() + 1.0);
        let nu = (2.0 * x_cut / hu).ceil() as usize + 1;
        let nv = (2.0 * v_cut / hv).ceil() as usize + 1;
        let us: Vec<f64> = (0..nu).map(|k| -t - x_cut + k as f64 * hu).collect();
        let vs: Vec<f64> = (0..nv).map(|k| -v_cut + k as f64 * hv).collect();
        // a_m(u) = (u+t)^m e^{-ε(u+t)²}
        let a: Vec<Vec<f64>> = (0..=max_degree)
            .map(|m| us.iter().map(|&u| (u + t).powi(m as i32) * (-eps * (u + t) * (u + t)).exp()).collect())
            .collect();
        // S_m(v) = Σ_u a_m(u) e^{2iuv}
        let smv: Vec<Vec<Complex64>> = vs
            .iter()
            .map(|&v| {
                let rot = cis(2.0 * hu * v);
                let mut c = cis(2.0 * us[0] * v);
                let mut acc = vec![Complex64::new(0.0, 0.0); a.len()];
                for k in 0..nu {
                    for (slot, am) in acc.iter_mut().zip(&a) {
                        *slot += c * am[k];
                    }
                    c *= rot;
                }
                acc
            })
            .collect();
        for (idx, &(m, r)) in monomials.iter().enumerate() {
            let terms: Vec<Complex64> = vs
                .iter()
                .zip(&smv)
                .map(|(&v, sv)| sv[m as usize] * ((v + s).powi(r as i32) * (-eps * (v + s) * (v + s)).exp()))
                .collect();
            out[idx].push(pairwise_sum(&terms) * (hu * hv / PI));
        }
    }
    out
}

/// Monomials `(m, r)` with `m + r ≤ max_degree`, by degree then `r`.
pub fn monomial_list(max_degree: u32) -> Vec<(u32, u32)> {
    (0..=max_degree).flat_map(|d| (0..=d).map(move |r| (d - r, r))).collect()
}

/// Richardson extrapolation to `ε → 0` of [`regularized_monomial_forward`]
/// from `ε = 0.02, 0.01, 0.005`.
pub fn extrapolated_monomial_forward(max_degree: u32, points: &[(f64, f64)]) -> Vec<Vec<Complex64>> {
    let f1 = regularized_monomial_forward(0.02, max_degree, points);
    let f2 = regularized_monomial_forward(0.01, max_degree, points);
    let f3 = regularized_monomial_forward(0.005, max_degree, points);
    f1.iter()
        .zip(&f2)
        .zip(&f3)
        .map(|((a, b), c)| {
            a.iter()
                .zip(b)
                .zip(c)
                .map(|((x1, x2), x3)| {
                    let r1 = x2 * 2.0 - x1;
                    let r2 = x3 * 2.0 - x2;
                    (r2 * 4.0 - r1) / 3.0
                })
                .collect()
        })
        .collect()
}

/// The forward transform of the constant `c`, which is `c` itself.
pub fn forward_constant(c: &ExactScalar) -> CommutativePoly2 {
    forward_poly(&CommutativePoly2::constant(c.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::Rational;

    fn rational(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn poly(terms: &[((u32, u32), ExactScalar)]) -> CommutativePoly2 {
        CommutativePoly2::from_terms(terms.iter().cloned())
    }

    #[test]
    fn monomial_forward_examples() {
        assert_eq!(monomial_forward(0, 0), CommutativePoly2::constant(ExactScalar::one()));
        assert_eq!(
            monomial_forward(1, 1),
            poly(&[((1, 1), ExactScalar::one()), ((0, 0), ExactScalar::from_rational(rational(1, 2)) * ExactScalar::i())])
        );
        assert_eq!(monomial_forward(2, 0), CommutativePoly2::monomial(2, 0));
    }

    #[test]
    fn monomial_forward_matches_contraction_series() {
        for m in 0..=6 {
            for r in 0..=6 {
                assert_eq!(monomial_forward(m, r), contraction_image(m, r, &half_i(1)), "({m},{r})");
            }
        }
    }

    #[test]
    fn inverse_undoes_forward() {
        assert_eq!(monomial_inverse(1, 1), CommutativePoly2::monomial(1, 1));
        assert_eq!(monomial_inverse(3, 2), CommutativePoly2::monomial(3, 2));
        assert_eq!(monomial_inverse(0, 0), CommutativePoly2::constant(ExactScalar::one()));
        assert_eq!(forward_constant(&ExactScalar::one()), CommutativePoly2::constant(ExactScalar::one()));
    }

    #[test]
    fn derivative_examples() {
        let raw = derivative_raw(1, 1);
        assert_eq!(
            raw,
            poly(&[((1, 1), ExactScalar::from_integer(-4)), ((0, 0), ExactScalar::i() * ExactScalar::from_integer(-2))])
        );
        assert_eq!(derivative_representation(1, 1), monomial_forward(1, 1));
        let minus_2i = ExactScalar::i() * ExactScalar::from_integer(-2);
        assert_eq!(derivative_raw(1, 0), CommutativePoly2::monomial(1, 0).scale(&minus_2i));
        assert_eq!(derivative_representation(1, 0), CommutativePoly2::monomial(1, 0));
        assert_eq!(derivative_raw(0, 1), CommutativePoly2::monomial(0, 1).scale(&minus_2i));
        assert_eq!(derivative_representation(0, 1), CommutativePoly2::monomial(0, 1));
        assert_eq!(derivative_representation(0, 0), CommutativePoly2::constant(ExactScalar::one()));
    }

    #[test]
    fn gaussian_pair_small_grid() {
        let h = SampledField::gaussian(6.0, 121).unwrap();
        let g = forward_transform(&h);
        assert!(g.is_reliable());
        for iq in (0..121).step_by(10) {
            for ip in (0..121).step_by(10) {
                let expect = gaussian_image(h.q(iq), h.p(ip));
                assert!((g.field.get(iq, ip) - expect).norm() < 1e-9);
            }
        }
        assert!((forward_at(&h, 0.0, 0.0).re - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
        let back = inverse_transform(&g.field);
        for iq in 30..91 {
            for ip in 30..91 {
                assert!((back.field.get(iq, ip) - h.get(iq, ip)).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn boundary_violation_is_flagged() {
        let h = SampledField::from_fn((-1.0, 1.0), (-1.0, 1.0), 8, 8, |_, _| Complex64::new(1.0, 0.0)).unwrap();
        let g = forward_transform(&h);
        assert_eq!(g.warning, Some(DomainWarning { boundary_max: 1.0 }));
    }

    #[test]
    fn zero_field_parseval() {
        let h = SampledField::from_fn((-2.0, 2.0), (-2.0, 2.0), 16, 16, |_, _| Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(parseval_check(&h), (0.0, 0.0));
    }

    #[test]
    fn field_validation() {
        assert!(SampledField::new((0.0, 1.0), (0.0, 1.0), 1, 4, vec![]).is_err());
        assert!(SampledField::new((1.0, 0.0), (0.0, 1.0), 2, 2, vec![Complex64::new(0.0, 0.0); 4]).is_err());
        assert_eq!(
            SampledField::new((0.0, 1.0), (0.0, 1.0), 2, 2, vec![Complex64::new(0.0, 0.0); 3]),
            Err(TransformError::SampleCount { expected: 4, found: 3 })
        );
    }

    #[test]
    fn regularized_constant_and_linear() {
        let pts = [(0.5, -0.5), (1.0, 1.0)];
        let ext = extrapolated_monomial_forward(2, &pts);
        for (idx, &(m, r)) in monomial_list(2).iter().enumerate() {
            let exact = monomial_forward(m, r);
            for (k, &(t, s)) in pts.iter().enumerate() {
                assert!((ext[idx][k] - exact.eval(t, s)).norm() < 1e-2, "({m},{r}) at ({t},{s}): {}", ext[idx][k]);
            }
        }
    }
}
