//! Truncated Fock-space numerics: ladder and quadrature matrices, coherent
//! states, the Wigner operator as a displaced parity, Wigner functions,
//! marginals and phase-space quadratures of the Wigner operator.
//!
//! Two realizations of `Δ(q,p) = (1/π) D(α) Π D(α)†` are provided.
//! [`wigner_operator`] exponentiates the truncated generator
//! `α a† - α* a` and is trustworthy only on a reliable top-left block;
//! [`wigner_block`] uses the closed-form (Laguerre) matrix elements of
//! `D(2α)` and is exact on whatever block it returns. The quadrature
//! routines use the latter, because phase-space grids reach far beyond the
//! displacement a 64-level truncation can hold.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};
use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;
#[allow(unused_imports)] // float methods resolve inherently when std is linked
use num_traits::Float;

use crate::opalg::{OrderTag, OrderedPolynomial};
use crate::ordering::CommutativePoly2;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FockError {
    #[error("Fock dimension {0} is too small (need at least 2)")]
    DimensionTooSmall(usize),
    #[error("truncation inadequate: {what} = {value} exceeds {limit}")]
    Truncation { what: &'static str, value: f64, limit: f64 },
    #[error("Weyl-tagged polynomial must be converted to P-Q or Q-P ordering before evaluation")]
    WeylTag,
    #[error("polynomial degree {degree} leaves no reliable block at dimension {dim}")]
    DegreeTooHigh { degree: u32, dim: usize },
    #[error("density matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("density matrix trace {0} is not 1")]
    TraceNotUnit(f64),
    #[error("marginal position {0} outside [-4, 4]")]
    MarginalRange(f64),
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
}

/// Dense square complex matrix on the first `dim` number states.
///
/// Only the top-left `reliable_dim × reliable_dim` block is claimed to
/// match the untruncated operator.
#[derive(Debug, Clone, PartialEq)]
pub struct FockMatrix {
    dim: usize,
    reliable_dim: usize,
    entries: Vec<Complex64>,
}

impl FockMatrix {
    pub fn zeros(dim: usize) -> Self {
        FockMatrix { dim, reliable_dim: dim, entries: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        FockMatrix { dim, reliable_dim: dim, entries }
    }

    /// Row-major entries; `None` unless `entries.len() == dim²`.
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Option<Self> {
        (entries.len() == dim * dim).then_some(FockMatrix { dim, reliable_dim: dim, entries })
    }

    /// `|v⟩⟨v|`
    pub fn projector(v: &[Complex64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn diagonal(d: &[Complex64]) -> Self {
        Self::from_fn(d.len(), |i, j| if i == j { d[i] } else { Complex64::new(0.0, 0.0) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn reliable_dim(&self) -> usize {
        self.reliable_dim
    }

    /// Same entries with the reliable block set to `k` (clamped to `1..=dim`).
    pub fn with_reliable_dim(mut self, k: usize) -> Self {
        self.reliable_dim = k.clamp(1, self.dim.max(1));
        self
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn scale(&self, c: Complex64) -> Self {
        FockMatrix { dim: self.dim, reliable_dim: self.reliable_dim, entries: self.entries.iter().map(|x| x * c).collect() }
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::from_fn(self.dim, |i, j| self.get(j, i).conj());
        out.reliable_dim = self.reliable_dim;
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `self · other - other · self`
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "vector length does not match matrix dimension");
        (0..self.dim).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// Top-left `k × k` block, fully reliable up to `min(k, reliable_dim)`.
    pub fn block(&self, k: usize) -> Self {
        let k = k.min(self.dim);
        let mut out = Self::from_fn(k, |i, j| self.get(i, j));
        out.reliable_dim = k.min(self.reliable_dim);
        out
    }

    /// Largest entry modulus of `self - other` on the top-left `k × k` block.
    pub fn max_abs_diff(&self, other: &Self, k: usize) -> f64 {
        let k = k.min(self.dim).min(other.dim);
        let mut worst = 0.0f64;
        for i in 0..k {
            for j in 0..k {
                worst = worst.max((self.get(i, j) - other.get(i, j)).norm());
            }
        }
        worst
    }

    /// `max |M - M†|` over all entries.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// `(M + M†) / 2`
    pub fn hermitian_part(&self) -> Self {
        let mut out = Self::from_fn(self.dim, |i, j| (self.get(i, j) + self.get(j, i).conj()) * 0.5);
        out.reliable_dim = self.reliable_dim;
        out
    }

    fn one_norm(&self) -> f64 {
        (0..self.dim).map(|j| (0..self.dim).map(|i| self.get(i, j).norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    fn check_same_dim(&self, other: &Self) {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
    }
}

impl<'b> Mul<&'b FockMatrix> for &FockMatrix {
    type Output = FockMatrix;
    fn mul(self, rhs: &'b FockMatrix) -> FockMatrix {
        self.check_same_dim(rhs);
        let n = self.dim;
        let mut out = FockMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let dst = &mut out.entries[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(rhs.row(k)) {
                    *d += a * b;
                }
            }
        }
        out.reliable_dim = self.reliable_dim.min(rhs.reliable_dim);
        out
    }
}

impl<'b> Add<&'b FockMatrix> for &FockMatrix {
    type Output = FockMatrix;
    fn add(self, rhs: &'b FockMatrix) -> FockMatrix {
        self.check_same_dim(rhs);
        FockMatrix {
            dim: self.dim,
            reliable_dim: self.reliable_dim.min(rhs.reliable_dim),
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'b> Sub<&'b FockMatrix> for &FockMatrix {
    type Output = FockMatrix;
    fn sub(self, rhs: &'b FockMatrix) -> FockMatrix {
        self.check_same_dim(rhs);
        FockMatrix {
            dim: self.dim,
            reliable_dim: self.reliable_dim.min(rhs.reliable_dim),
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

/// A phase-space point; `α = (q + i p)/√2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub q: f64,
    pub p: f64,
}

impl PhasePoint {
    pub fn new(q: f64, p: f64) -> Self {
        PhasePoint { q, p }
    }

    pub fn from_alpha(alpha: Complex64) -> Self {
        PhasePoint { q: alpha.re * core::f64::consts::SQRT_2, p: alpha.im * core::f64::consts::SQRT_2 }
    }

    pub fn alpha(&self) -> Complex64 {
        Complex64::new(self.q, self.p) * FRAC_1_SQRT_2
    }
}

fn check_dim(n: usize) -> Result<(), FockError> {
    if n < 2 {
        return Err(FockError::DimensionTooSmall(n));
    }
    Ok(())
}

/// Annihilation and creation matrices; `a(n-1, n) = √n`.
pub fn build_ladder(n: usize) -> Result<(FockMatrix, FockMatrix), FockError> {
    check_dim(n)?;
    let mut a = FockMatrix::zeros(n);
    for k in 1..n {
        a.set(k - 1, k, Complex64::new((k as f64).sqrt(), 0.0));
    }
    let a = a.with_reliable_dim(n - 1);
    let adag = a.adjoint();
    Ok((a, adag))
}

/// `Q = (a + a†)/√2`, `P = (a - a†)/(√2 i)`.
pub fn build_qp(n: usize) -> Result<(FockMatrix, FockMatrix), FockError> {
    let (a, adag) = build_ladder(n)?;
    let q = (&a + &adag).scale(Complex64::new(FRAC_1_SQRT_2, 0.0));
    let p = (&a - &adag).scale(Complex64::new(0.0, -FRAC_1_SQRT_2));
    Ok((q, p))
}

/// Components `e^{-|β|²/2} β^k / √(k!)` of the coherent state `|β⟩`.
pub fn coherent_state(beta: Complex64, n: usize) -> Result<Vec<Complex64>, FockError> {
    check_dim(n)?;
    let limit = n as f64 / 4.0;
    if beta.norm_sqr() > limit {
        return Err(FockError::Truncation { what: "|beta|^2", value: beta.norm_sqr(), limit });
    }
    let mut out = Vec::with_capacity(n);
    let mut c = Complex64::new((-beta.norm_sqr() / 2.0).exp(), 0.0);
    for k in 0..n {
        out.push(c);
        c = c * beta / ((k + 1) as f64).sqrt();
    }
    Ok(out)
}

/// Matrix exponential by scaling and squaring with a Taylor core.
pub fn expm(a: &FockMatrix) -> FockMatrix {
    let n = a.dim();
    let norm = a.one_norm();
    let mut squarings = 0u32;
    let mut factor = 1.0;
    while norm * factor > 0.5 {
        factor *= 0.5;
        squarings += 1;
    }
    let x = a.scale(Complex64::new(factor, 0.0));
    let mut result = FockMatrix::identity(n);
    let mut term = FockMatrix::identity(n);
    for k in 1..=40 {
        term = (&term * &x).scale(Complex64::new(1.0 / k as f64, 0.0));
        result = &result + &term;
        if term.one_norm() <= 1e-18 * result.one_norm() {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result.with_reliable_dim(a.reliable_dim())
}

fn displacement_reliable(n: usize, alpha: Complex64) -> usize {
    let lost = (8.0 * alpha.norm_sqr()).ceil() as usize;
    n.saturating_sub(lost).max(1)
}

/// `D(α) = exp(α a† - α* a)` from the truncated generator.
pub fn displacement(alpha: Complex64, n: usize) -> Result<FockMatrix, FockError> {
    let (a, adag) = build_ladder(n)?;
    let gen = &adag.scale(alpha) - &a.scale(alpha.conj());
    Ok(expm(&gen).with_reliable_dim(displacement_reliable(n, alpha)))
}

/// `(1/π) D(α) Π D(α)†` at dimension `n`, requiring `|α|² ≤ n/8`.
pub fn wigner_operator(pt: PhasePoint, n: usize) -> Result<FockMatrix, FockError> {
    check_dim(n)?;
    let alpha = pt.alpha();
    let limit = n as f64 / 8.0;
    if !(alpha.norm_sqr() <= limit) {
        return Err(FockError::Truncation { what: "|alpha|^2", value: alpha.norm_sqr(), limit });
    }
    let d = displacement(alpha, n)?;
    let parity: Vec<Complex64> = (0..n).map(|k| Complex64::new(if k % 2 == 0 { 1.0 } else { -1.0 }, 0.0)).collect();
    let delta = &(&d * &FockMatrix::diagonal(&parity)) * &d.adjoint();
    Ok(delta.scale(Complex64::new(1.0 / PI, 0.0)).hermitian_part().with_reliable_dim(displacement_reliable(n, alpha)))
}

/// Exact matrix elements `⟨j|D(γ)|k⟩` for `j, k < size`.
///
/// For `j = k + d`: `√(k!/j!) γ^d e^{-|γ|²/2} L_k^{(d)}(|γ|²)`; the upper
/// triangle carries `(-γ*)^d` instead of `γ^d`.
pub fn displacement_block(gamma: Complex64, size: usize) -> FockMatrix {
    let x = gamma.norm_sqr();
    let damp = (-x / 2.0).exp();
    let mut out = FockMatrix::zeros(size);
    if damp == 0.0 {
        return out;
    }
    let minus_conj = -gamma.conj();
    let mut lower = Complex64::new(damp, 0.0);
    let mut upper = Complex64::new(damp, 0.0);
    for d in 0..size {
        let (mut cl, mut cu) = (lower, upper);
        let (mut l_prev, mut l) = (0.0, 1.0);
        for k in 0..size - d {
            out.set(k + d, k, cl * l);
            if d > 0 {
                out.set(k, k + d, cu * l);
            }
            let kf = k as f64;
            let df = d as f64;
            let next = ((2.0 * kf + 1.0 + df - x) * l - (kf + df) * l_prev) / (kf + 1.0);
            l_prev = l;
            l = next;
            let shrink = ((kf + 1.0) / (kf + df + 1.0)).sqrt();
            cl *= shrink;
            cu *= shrink;
        }
        let grow = 1.0 / ((d + 1) as f64).sqrt();
        lower = lower * gamma * grow;
        upper = upper * minus_conj * grow;
    }
    out
}

/// Exact top-left `size × size` block of `Δ(q,p) = (1/π) D(2α) Π`.
pub fn wigner_block(pt: PhasePoint, size: usize) -> FockMatrix {
    let mut out = displacement_block(pt.alpha() * 2.0, size);
    for j in 0..size {
        for k in 0..size {
            let sign = if k % 2 == 0 { 1.0 / PI } else { -1.0 / PI };
            out.set(j, k, out.get(j, k) * sign);
        }
    }
    out
}

fn powers(m: &FockMatrix, k: u32) -> Vec<FockMatrix> {
    let mut out = vec![FockMatrix::identity(m.dim())];
    for _ in 0..k {
        let next = out.last().map(|last| last * m).unwrap_or_else(|| m.clone());
        out.push(next);
    }
    out
}

/// Matrix of a P-Q or Q-P ordered polynomial; reliable on `n - degree` levels.
pub fn evaluate(poly: &OrderedPolynomial, n: usize) -> Result<FockMatrix, FockError> {
    check_dim(n)?;
    if poly.tag() == OrderTag::Weyl {
        return Err(FockError::WeylTag);
    }
    let degree = poly.max_degree();
    if degree as usize >= n {
        return Err(FockError::DegreeTooHigh { degree, dim: n });
    }
    let (q, p) = build_qp(n)?;
    let max_m = poly.terms().map(|(mono, _)| mono.m).max().unwrap_or(0);
    let max_r = poly.terms().map(|(mono, _)| mono.r).max().unwrap_or(0);
    let qs = powers(&q, max_m);
    let ps = powers(&p, max_r);
    let mut out = FockMatrix::zeros(n);
    for (mono, c) in poly.sorted_terms() {
        let (qm, pr) = (&qs[mono.m as usize], &ps[mono.r as usize]);
        let product = match poly.tag() {
            OrderTag::PQ => pr * qm,
            _ => qm * pr,
        };
        out = &out + &product.scale(c.to_complex());
    }
    Ok(out.with_reliable_dim(n - degree as usize))
}

fn validate_density(rho: &FockMatrix) -> Result<(), FockError> {
    let defect = rho.hermitian_defect();
    if !(defect <= 1e-8) {
        return Err(FockError::NotHermitian(defect));
    }
    let tr = rho.trace();
    if !((tr - 1.0).norm() <= 1e-8) {
        return Err(FockError::TraceNotUnit(tr.re));
    }
    Ok(())
}

/// Smallest `k` such that every entry of `rho` outside the top-left `k × k`
/// block is negligible.
fn support(rho: &FockMatrix) -> usize {
    let n = rho.dim();
    let mut k = 0;
    for i in 0..n {
        for j in 0..n {
            if rho.get(i, j).norm() > 1e-20 {
                k = k.max(i + 1).max(j + 1);
            }
        }
    }
    k.max(1)
}

/// `W(q,p) = Tr[ρ Δ(q,p)]` at each point.
pub fn wigner_function(rho: &FockMatrix, points: &[PhasePoint]) -> Result<Vec<Complex64>, FockError> {
    validate_density(rho)?;
    let k = support(rho);
    Ok(points
        .iter()
        .map(|&pt| {
            let delta = wigner_block(pt, k);
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..k {
                for j in 0..k {
                    acc += rho.get(i, j) * delta.get(j, i);
                }
            }
            acc
        })
        .collect())
}

/// Sum with a fixed binary reduction tree, independent of any scheduling.
pub fn pairwise_sum(xs: &[Complex64]) -> Complex64 {
    match xs.len() {
        0 => Complex64::new(0.0, 0.0),
        1..=8 => xs.iter().sum(),
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

fn pairwise_sum_vecs(rows: &[Vec<Complex64>]) -> Vec<Complex64> {
    match rows.len() {
        0 => Vec::new(),
        1 => rows[0].clone(),
        n => {
            let mut left = pairwise_sum_vecs(&rows[..n / 2]);
            let right = pairwise_sum_vecs(&rows[n / 2..]);
            for (l, r) in left.iter_mut().zip(right) {
                *l += r;
            }
            left
        }
    }
}

/// Uniform midpoint-rule grid on `[lo, hi]`: nodes `lo + (k + ½) h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MidpointGrid {
    lo: f64,
    hi: f64,
    count: usize,
}

impl MidpointGrid {
    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self, FockError> {
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(FockError::InvalidGrid("bounds must be finite with hi > lo"));
        }
        if count == 0 {
            return Err(FockError::InvalidGrid("at least one cell is required"));
        }
        Ok(MidpointGrid { lo, hi, count })
    }

    /// Cell count rounded so the actual step is as close to `step` as possible.
    pub fn with_step(lo: f64, hi: f64, step: f64) -> Result<Self, FockError> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(FockError::InvalidGrid("step must be positive"));
        }
        let count = ((hi - lo) / step).round().max(1.0) as usize;
        Self::new(lo, hi, count)
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / self.count as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        self.lo + (k as f64 + 0.5) * self.step()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |k| self.node(k))
    }
}

/// `∬ q^a p^b Δ(q,p) dq dp` for all `a + b ≤ max_degree`, on a top-left
/// block, by the midpoint rule.
#[derive(Debug, Clone)]
pub struct QuadratureMoments {
    max_degree: u32,
    block: usize,
    moments: Vec<FockMatrix>,
}

fn moment_index(a: u32, b: u32) -> usize {
    let d = (a + b) as usize;
    d * (d + 1) / 2 + b as usize
}

impl QuadratureMoments {
    pub fn compute(max_degree: u32, q: &MidpointGrid, p: &MidpointGrid, block: usize) -> Self {
        let count = moment_index(0, max_degree) + 1;
        let cells = block * block;
        let exps: Vec<(u32, u32)> = (0..=max_degree).flat_map(|d| (0..=d).map(move |b| (d - b, b))).collect();
        let rows: Vec<Vec<Complex64>> = q
            .nodes()
            .map(|qv| {
                let mut acc = vec![Complex64::new(0.0, 0.0); count * cells];
                let qpow: Vec<f64> = (0..=max_degree).scan(1.0, |s, _| { let v = *s; *s *= qv; Some(v) }).collect();
                for pv in p.nodes() {
                    let delta = wigner_block(PhasePoint::new(qv, pv), block);
                    let ppow: Vec<f64> = (0..=max_degree).scan(1.0, |s, _| { let v = *s; *s *= pv; Some(v) }).collect();
                    for &(a, b) in &exps {
                        let w = qpow[a as usize] * ppow[b as usize];
                        let dst = &mut acc[moment_index(a, b) * cells..][..cells];
                        for (d, e) in dst.iter_mut().zip(delta.entries()) {
                            *d += e * w;
                        }
                    }
                }
                acc
            })
            .collect();
        let total = pairwise_sum_vecs(&rows);
        let weight = q.step() * p.step();
        let moments = (0..count)
            .map(|idx| {
                let slice = total[idx * cells..(idx + 1) * cells].iter().map(|x| x * weight).collect();
                FockMatrix::from_entries(block, slice).expect("block sized slice")
            })
            .collect();
        QuadratureMoments { max_degree, block, moments }
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn block(&self) -> usize {
        self.block
    }

    /// `∬ q^a p^b Δ dq dp`, if `a + b ≤ max_degree`.
    pub fn moment(&self, a: u32, b: u32) -> Option<&FockMatrix> {
        (a + b <= self.max_degree).then(|| &self.moments[moment_index(a, b)])
    }

    /// `∬ h(q,p) Δ dq dp` for a polynomial symbol in `(q, p)`.
    pub fn quantize(&self, symbol: &CommutativePoly2) -> Result<FockMatrix, FockError> {
        if symbol.max_degree() > self.max_degree {
            return Err(FockError::DegreeTooHigh { degree: symbol.max_degree(), dim: self.block });
        }
        let mut out = FockMatrix::zeros(self.block);
        for (&(a, b), c) in symbol.terms() {
            out = &out + &self.moments[moment_index(a, b)].scale(c.to_complex());
        }
        Ok(out)
    }
}

/// Weyl quantization `∬ h(q,p) Δ(q,p) dq dp` of a polynomial symbol.
pub fn weyl_quantize(symbol: &CommutativePoly2, q: &MidpointGrid, p: &MidpointGrid, block: usize) -> FockMatrix {
    QuadratureMoments::compute(symbol.max_degree(), q, p, block)
        .quantize(symbol)
        .expect("moments computed at the symbol degree")
}

/// Harmonic-oscillator eigenfunctions `ψ_0(x), …, ψ_{count-1}(x)` by the
/// normalized three-term recurrence.
pub fn oscillator_eigenfunctions(x: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-x * x / 2.0).exp();
    for n in 0..count {
        out.push(cur);
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * cur - (nf / (nf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarginalAxis {
    /// Integrate out `p`, leaving `|q⟩⟨q|`.
    Q,
    /// Integrate out `q`, leaving `|p⟩⟨p|`.
    P,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginalParams {
    /// Integration over `[-half_width, half_width]`.
    pub half_width: f64,
    pub step: f64,
    pub block: usize,
}

impl Default for MarginalParams {
    fn default() -> Self {
        MarginalParams { half_width: 12.0, step: 0.01, block: 8 }
    }
}

/// Marginal of `Δ` along one axis with default quadrature settings.
pub fn marginal_check(axis: MarginalAxis, value: f64, n: usize) -> Result<(FockMatrix, FockMatrix), FockError> {
    marginal_check_with(axis, value, n, &MarginalParams::default())
}

/// `(∫ Δ d(other), projector)` on the top-left `min(block, n)` block.
///
/// The projector is `⟨m|x⟩⟨x|n⟩`: `ψ_m(q) ψ_n(q)` on the q axis and
/// `i^m (-i)^n ψ_m(p) ψ_n(p)` on the p axis, where `⟨p|n⟩ = (-i)^n ψ_n(p)`.
pub fn marginal_check_with(
    axis: MarginalAxis,
    value: f64,
    n: usize,
    params: &MarginalParams,
) -> Result<(FockMatrix, FockMatrix), FockError> {
    check_dim(n)?;
    if !(value.abs() <= 4.0) {
        return Err(FockError::MarginalRange(value));
    }
    let size = params.block.min(n);
    let grid = MidpointGrid::with_step(-params.half_width, params.half_width, params.step)?;
    let cells = size * size;
    let samples: Vec<Vec<Complex64>> = grid
        .nodes()
        .map(|u| {
            let pt = match axis {
                MarginalAxis::Q => PhasePoint::new(value, u),
                MarginalAxis::P => PhasePoint::new(u, value),
            };
            wigner_block(pt, size).entries().to_vec()
        })
        .collect();
    let mut total = pairwise_sum_vecs(&samples);
    total.truncate(cells);
    let numeric = FockMatrix::from_entries(size, total.iter().map(|x| x * grid.step()).collect()).expect("block sized");
    let psi = oscillator_eigenfunctions(value, size);
    let phase = |k: usize| match axis {
        MarginalAxis::Q => Complex64::new(1.0, 0.0),
        MarginalAxis::P => Complex64::new(0.0, -1.0).powu(k as u32),
    };
    let analytic = FockMatrix::from_fn(size, |j, k| phase(j).conj() * phase(k) * psi[j] * psi[k]);
    Ok((numeric, analytic))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::ExactScalar;
    use crate::opalg::Monomial;
    use crate::ordering::weyl_to_pq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ladder_entries() {
        let (a, adag) = build_ladder(3).unwrap();
        assert_eq!(a.get(0, 1), c(1.0, 0.0));
        assert_eq!(a.get(1, 2), c(2.0f64.sqrt(), 0.0));
        assert_eq!(adag.get(2, 1), c(2.0f64.sqrt(), 0.0));
        let nonzero = a.entries().iter().filter(|x| x.norm() > 0.0).count();
        assert_eq!(nonzero, 2);
        assert!(build_ladder(1).is_err());
        let comm = a.commutator(&adag);
        assert!(comm.max_abs_diff(&FockMatrix::identity(3), 2) < 1e-14);
    }

    #[test]
    fn qp_matrices() {
        let (q, p) = build_qp(2).unwrap();
        assert!((q.get(0, 1).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((q.get(1, 0).re - FRAC_1_SQRT_2).abs() < 1e-15);
        let (q, p3) = build_qp(3).unwrap();
        assert!(((&q * &q).get(0, 0) - c(0.5, 0.0)).norm() < 1e-15);
        assert_eq!(p.hermitian_defect(), 0.0);
        let (q, p) = build_qp(10).unwrap();
        let comm = q.commutator(&p);
        assert!(comm.max_abs_diff(&FockMatrix::identity(10).scale(c(0.0, 1.0)), 9) < 1e-14);
        assert_eq!(p3.hermitian_defect(), 0.0);
    }

    #[test]
    fn coherent_state_is_eigenvector() {
        let beta = c(0.6, -0.8);
        let v = coherent_state(beta, 64).unwrap();
        let (a, _) = build_ladder(64).unwrap();
        let av = a.apply(&v);
        for k in 0..60 {
            assert!((av[k] - beta * v[k]).norm() < 1e-8);
        }
        let norm: f64 = coherent_state(c(2.0, 0.0), 64).unwrap().iter().map(|x| x.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-10);
        assert_eq!(coherent_state(c(0.0, 0.0), 4).unwrap()[0], c(1.0, 0.0));
        assert!(coherent_state(c(5.0, 0.0), 64).is_err());
    }

    #[test]
    fn wigner_operator_at_origin_is_parity() {
        let d = wigner_operator(PhasePoint::new(0.0, 0.0), 8).unwrap();
        for k in 0..8 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((d.get(k, k) - c(sign / PI, 0.0)).norm() < 1e-15);
        }
        assert_eq!(d.hermitian_defect(), 0.0);
        assert!(wigner_operator(PhasePoint::new(3.0, 3.0), 64).is_err());
    }

    #[test]
    fn matrix_exponential_route_agrees_with_closed_form() {
        for &(q, p) in &[(0.3, -0.2), (1.0, 0.5), (-1.2, 1.1), (0.0, 1.9)] {
            let pt = PhasePoint::new(q, p);
            let dense = wigner_operator(pt, 64).unwrap();
            let exact = wigner_block(pt, 16);
            assert!(dense.max_abs_diff(&exact, 16) < 1e-10, "({q},{p})");
            assert!(dense.reliable_dim() < 64);
        }
    }

    #[test]
    fn coherent_expectation_of_wigner_operator() {
        let beta = c(0.5, 0.5);
        let v = coherent_state(beta, 64).unwrap();
        let qb = beta.re * 2.0f64.sqrt();
        let pb = beta.im * 2.0f64.sqrt();
        for &(q, p) in &[(0.0, 0.0), (1.0, -0.5), (-0.7, 1.2)] {
            let d = wigner_operator(PhasePoint::new(q, p), 64).unwrap();
            let dv = d.apply(&v);
            let e: Complex64 = v.iter().zip(&dv).map(|(a, b)| a.conj() * b).sum();
            let expected = (-(q - qb) * (q - qb) - (p - pb) * (p - pb)).exp() / PI;
            assert!((e - expected).norm() < 1e-6);
        }
    }

    #[test]
    fn vacuum_wigner_at_origin() {
        let mut rho = FockMatrix::zeros(64);
        rho.set(0, 0, c(1.0, 0.0));
        let w = wigner_function(&rho, &[PhasePoint::new(0.0, 0.0)]).unwrap();
        assert!((w[0] - c(1.0 / PI, 0.0)).norm() < 1e-15);
        let bad = FockMatrix::identity(2);
        assert!(matches!(wigner_function(&bad, &[]), Err(FockError::TraceNotUnit(_))));
        let mut skew = FockMatrix::zeros(2);
        skew.set(0, 0, c(1.0, 0.0));
        skew.set(0, 1, c(0.1, 0.0));
        assert!(matches!(wigner_function(&skew, &[]), Err(FockError::NotHermitian(_))));
    }

    #[test]
    fn evaluate_matches_commutator_identity() {
        let pq_plus_i = OrderedPolynomial::from_terms(
            OrderTag::PQ,
            [(Monomial::new(1, 1), ExactScalar::one()), (Monomial::new(0, 0), ExactScalar::i())],
        );
        let qp = OrderedPolynomial::monomial(OrderTag::QP, 1, 1);
        let a = evaluate(&pq_plus_i, 12).unwrap();
        let b = evaluate(&qp, 12).unwrap();
        assert!(a.max_abs_diff(&b, a.reliable_dim().min(b.reliable_dim())) < 1e-14);
        let zero = evaluate(&OrderedPolynomial::zero(OrderTag::QP), 5).unwrap();
        assert_eq!(zero, FockMatrix::zeros(5));
        assert_eq!(evaluate(&OrderedPolynomial::monomial(OrderTag::Weyl, 1, 0), 5), Err(FockError::WeylTag));
    }

    #[test]
    fn weyl_conversion_evaluates_to_symmetric_product() {
        let (q, p) = build_qp(32).unwrap();
        let lhs = evaluate(&weyl_to_pq(1, 1), 32).unwrap();
        let sym = (&(&q * &p) + &(&p * &q)).scale(c(0.5, 0.0));
        assert!(lhs.max_abs_diff(&sym, 30) < 1e-12);
    }

    #[test]
    fn oscillator_functions() {
        let psi = oscillator_eigenfunctions(0.0, 3);
        assert!((psi[0] - PI.powf(-0.25)).abs() < 1e-15);
        assert_eq!(psi[1], 0.0);
        let x = 0.7;
        let psi = oscillator_eigenfunctions(x, 3);
        let h2 = 4.0 * x * x - 2.0;
        let expected = PI.powf(-0.25) * (-x * x / 2.0).exp() * h2 / (8.0f64).sqrt();
        assert!((psi[2] - expected).abs() < 1e-14);
    }

    #[test]
    fn marginal_at_origin() {
        let (num, exact) = marginal_check(MarginalAxis::Q, 0.0, 64).unwrap();
        assert!((num.get(0, 0).re - 1.0 / PI.sqrt()).abs() < 1e-6);
        assert!(num.get(0, 1).norm() < 1e-6);
        assert!(num.max_abs_diff(&exact, 8) < 1e-6);
        let (num, exact) = marginal_check(MarginalAxis::P, 0.0, 64).unwrap();
        assert!((num.get(0, 0).re - 1.0 / PI.sqrt()).abs() < 1e-6);
        assert!(num.max_abs_diff(&exact, 8) < 1e-6);
        assert!(marginal_check(MarginalAxis::P, 4.5, 64).is_err());
    }

    #[test]
    fn midpoint_grid_layout() {
        let g = MidpointGrid::with_step(-7.0, 7.0, 0.02).unwrap();
        assert_eq!(g.len(), 700);
        assert!((g.node(0) + 6.99).abs() < 1e-12);
        assert!(MidpointGrid::new(1.0, 0.0, 4).is_err());
    }

    #[test]
    fn pairwise_sum_is_exact_on_small_integers() {
        let xs: Vec<Complex64> = (0..1000).map(|k| c(k as f64, -(k as f64))).collect();
        assert_eq!(pairwise_sum(&xs), c(499500.0, -499500.0));
    }
}
