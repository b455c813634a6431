//! Noncommutative polynomials in `(Q, P)` and `(a, a†)`.
//!
//! Everything here works on explicit words and the two commutation rules
//! `QP → PQ + i` and `a a† → a† a + 1`, applied one adjacent swap at a time.
//! Nothing in this module knows a closed-form ordering formula, which is what
//! makes it usable as the reference the `ordering` module is checked against.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use crate::exactnum::{binomial, ExactScalar};

/// Upper bound on the number of distinct words an expansion may produce.
pub const MAX_EXPANSION_WORDS: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OpalgError {
    #[error("symbol {0} is not allowed here")]
    UnsupportedSymbol(Symbol),
    #[error("expansion exceeds {MAX_EXPANSION_WORDS} words")]
    ExpansionTooLarge,
    #[error("ordering tags differ: {0:?} vs {1:?}")]
    TagMismatch(OrderTag, OrderTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Q,
    P,
    A,
    Adag,
}

impl Symbol {
    pub fn is_ladder(self) -> bool {
        matches!(self, Symbol::A | Symbol::Adag)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Symbol::Q => "Q",
            Symbol::P => "P",
            Symbol::A => "a",
            Symbol::Adag => "adag",
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How the monomials of an [`OrderedPolynomial`] are read as operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OrderTag {
    /// `P^r Q^m`: momentum factors to the left.
    PQ,
    /// `Q^m P^r`: coordinate factors to the left.
    QP,
    /// The fully symmetrized product `⋮Q^m P^r⋮`.
    Weyl,
}

impl OrderTag {
    pub const ALL: [OrderTag; 3] = [OrderTag::PQ, OrderTag::QP, OrderTag::Weyl];

    pub fn keyword(self) -> &'static str {
        match self {
            OrderTag::PQ => "pq",
            OrderTag::QP => "qp",
            OrderTag::Weyl => "weyl",
        }
    }
}

/// Exponent pair of `Q^m P^r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub m: u32,
    pub r: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { m: 0, r: 0 };

    pub fn new(m: u32, r: u32) -> Self {
        Monomial { m, r }
    }

    pub fn degree(self) -> u32 {
        self.m + self.r
    }
}

/// A finite combination of `Q^m P^r` monomials under one ordering rule.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderedPolynomial {
    tag: OrderTag,
    terms: BTreeMap<Monomial, ExactScalar>,
}

impl OrderedPolynomial {
    pub fn zero(tag: OrderTag) -> Self {
        OrderedPolynomial { tag, terms: BTreeMap::new() }
    }

    pub fn constant(tag: OrderTag, c: ExactScalar) -> Self {
        let mut p = Self::zero(tag);
        p.add_term(Monomial::ONE, c);
        p
    }

    pub fn monomial(tag: OrderTag, m: u32, r: u32) -> Self {
        let mut p = Self::zero(tag);
        p.add_term(Monomial::new(m, r), ExactScalar::one());
        p
    }

    pub fn from_terms<I>(tag: OrderTag, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, ExactScalar)>,
    {
        let mut p = Self::zero(tag);
        for (mono, c) in terms {
            p.add_term(mono, c);
        }
        p
    }

    pub fn tag(&self) -> OrderTag {
        self.tag
    }

    /// Reinterprets the same coefficients under another tag.
    pub fn retagged(mut self, tag: OrderTag) -> Self {
        self.tag = tag;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: u32, r: u32) -> ExactScalar {
        self.terms.get(&Monomial::new(m, r)).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &ExactScalar)> {
        self.terms.iter()
    }

    /// Terms in rendering order: descending total degree, then descending `m`.
    pub fn sorted_terms(&self) -> Vec<(Monomial, &ExactScalar)> {
        let mut v: Vec<_> = self.terms.iter().map(|(k, c)| (*k, c)).collect();
        v.sort_by(|(a, _), (b, _)| b.degree().cmp(&a.degree()).then(b.m.cmp(&a.m)));
        v
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|k| k.degree()).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, mono: Monomial, c: ExactScalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(mono).or_default();
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&mono);
        }
    }

    pub fn try_add(&self, other: &OrderedPolynomial) -> Result<OrderedPolynomial, OpalgError> {
        if self.tag != other.tag {
            return Err(OpalgError::TagMismatch(self.tag, other.tag));
        }
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(*k, c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &OrderedPolynomial) -> Result<OrderedPolynomial, OpalgError> {
        self.try_add(&other.scale(&-ExactScalar::one()))
    }

    pub fn scale(&self, c: &ExactScalar) -> OrderedPolynomial {
        OrderedPolynomial::from_terms(self.tag, self.terms.iter().map(|(k, v)| (*k, v * c)))
    }

    /// Formal adjoint: each word reversed, coefficients conjugated.
    ///
    /// `P^r Q^m` becomes `Q^m P^r`, so PQ and QP swap; Weyl symbols are
    /// self-adjoint and keep their tag.
    pub fn adjoint(&self) -> OrderedPolynomial {
        let tag = match self.tag {
            OrderTag::PQ => OrderTag::QP,
            OrderTag::QP => OrderTag::PQ,
            OrderTag::Weyl => OrderTag::Weyl,
        };
        OrderedPolynomial::from_terms(tag, self.terms.iter().map(|(k, v)| (*k, v.conj())))
    }

    /// The operator as a noncommutative expression. Weyl polynomials become a
    /// single ordering block.
    pub fn to_expression(&self) -> FreeExpression {
        if self.tag == OrderTag::Weyl {
            return FreeExpression::Block(self.clone());
        }
        let terms = self
            .terms
            .iter()
            .map(|(mono, c)| {
                let mut factors = vec![FreeExpression::Scalar(c.clone())];
                factors.extend(ordered_word(self.tag, *mono).into_iter().map(FreeExpression::Symbol));
                FreeExpression::Product(factors)
            })
            .collect();
        FreeExpression::Sum(terms)
    }
}

fn ordered_word(tag: OrderTag, mono: Monomial) -> Vec<Symbol> {
    let qs = core::iter::repeat_n(Symbol::Q, mono.m as usize);
    let ps = core::iter::repeat_n(Symbol::P, mono.r as usize);
    match tag {
        OrderTag::PQ => ps.chain(qs).collect(),
        _ => qs.chain(ps).collect(),
    }
}

/// Ordering of ladder-operator words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LadderOrder {
    /// `(a†)^j a^k`
    Normal,
    /// `a^k (a†)^j`
    Antinormal,
}

/// Polynomial in `a, a†`; the key `(j, k)` holds the powers of `a†` and `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LadderPolynomial {
    order: LadderOrder,
    terms: BTreeMap<(u32, u32), ExactScalar>,
}

impl LadderPolynomial {
    pub fn order(&self) -> LadderOrder {
        self.order
    }

    pub fn coefficient(&self, adag_power: u32, a_power: u32) -> ExactScalar {
        self.terms.get(&(adag_power, a_power)).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &ExactScalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn to_expression(&self) -> FreeExpression {
        let terms = self
            .terms
            .iter()
            .map(|(&(j, k), c)| {
                let adags = core::iter::repeat_n(Symbol::Adag, j as usize);
                let annihilators = core::iter::repeat_n(Symbol::A, k as usize);
                let word: Vec<Symbol> = match self.order {
                    LadderOrder::Normal => adags.chain(annihilators).collect(),
                    LadderOrder::Antinormal => annihilators.chain(adags).collect(),
                };
                let mut factors = vec![FreeExpression::Scalar(c.clone())];
                factors.extend(word.into_iter().map(FreeExpression::Symbol));
                FreeExpression::Product(factors)
            })
            .collect();
        FreeExpression::Sum(terms)
    }
}

/// Unreduced noncommutative expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum FreeExpression {
    Scalar(ExactScalar),
    Symbol(Symbol),
    Sum(Vec<FreeExpression>),
    /// Ordered product; factor order is operator order.
    Product(Vec<FreeExpression>),
    Power(Box<FreeExpression>, u32),
    /// An ordering block, already reduced to its tagged polynomial.
    Block(OrderedPolynomial),
}

impl FreeExpression {
    pub fn scalar(c: impl Into<ExactScalar>) -> Self {
        FreeExpression::Scalar(c.into())
    }

    pub fn q() -> Self {
        FreeExpression::Symbol(Symbol::Q)
    }

    pub fn p() -> Self {
        FreeExpression::Symbol(Symbol::P)
    }

    pub fn a() -> Self {
        FreeExpression::Symbol(Symbol::A)
    }

    pub fn adag() -> Self {
        FreeExpression::Symbol(Symbol::Adag)
    }

    pub fn word(symbols: &[Symbol]) -> Self {
        FreeExpression::Product(symbols.iter().map(|s| FreeExpression::Symbol(*s)).collect())
    }

    pub fn pow(self, k: u32) -> Self {
        FreeExpression::Power(Box::new(self), k)
    }

    /// Visits every symbol leaf, including symbols inside ordering blocks.
    pub fn symbols(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut Vec<Symbol>) {
        match self {
            FreeExpression::Scalar(_) => {}
            FreeExpression::Symbol(s) => out.push(*s),
            FreeExpression::Sum(v) | FreeExpression::Product(v) => {
                v.iter().for_each(|e| e.collect_symbols(out))
            }
            FreeExpression::Power(e, _) => e.collect_symbols(out),
            FreeExpression::Block(p) => {
                for (mono, _) in p.terms() {
                    if mono.m > 0 {
                        out.push(Symbol::Q);
                    }
                    if mono.r > 0 {
                        out.push(Symbol::P);
                    }
                }
            }
        }
    }

    /// Replaces `a` by `(Q + iP)/√2` and `a†` by `(Q - iP)/√2`.
    pub fn to_canonical(&self) -> FreeExpression {
        match self {
            FreeExpression::Symbol(Symbol::A) | FreeExpression::Symbol(Symbol::Adag) => {
                let sign = if matches!(self, FreeExpression::Symbol(Symbol::A)) { 1 } else { -1 };
                let half_root = ExactScalar::sqrt2() * ExactScalar::ratio(1, 2);
                let ip = ExactScalar::i() * ExactScalar::from_integer(sign);
                FreeExpression::Sum(vec![
                    FreeExpression::Product(vec![FreeExpression::Scalar(half_root.clone()), FreeExpression::q()]),
                    FreeExpression::Product(vec![FreeExpression::Scalar(half_root * ip), FreeExpression::p()]),
                ])
            }
            FreeExpression::Scalar(_) | FreeExpression::Symbol(_) | FreeExpression::Block(_) => self.clone(),
            FreeExpression::Sum(v) => FreeExpression::Sum(v.iter().map(|e| e.to_canonical()).collect()),
            FreeExpression::Product(v) => FreeExpression::Product(v.iter().map(|e| e.to_canonical()).collect()),
            FreeExpression::Power(e, k) => FreeExpression::Power(Box::new(e.to_canonical()), *k),
        }
    }
}

impl Add for FreeExpression {
    type Output = FreeExpression;
    fn add(self, rhs: FreeExpression) -> FreeExpression {
        FreeExpression::Sum(vec![self, rhs])
    }
}

impl Sub for FreeExpression {
    type Output = FreeExpression;
    fn sub(self, rhs: FreeExpression) -> FreeExpression {
        FreeExpression::Sum(vec![self, -rhs])
    }
}

impl Mul for FreeExpression {
    type Output = FreeExpression;
    fn mul(self, rhs: FreeExpression) -> FreeExpression {
        FreeExpression::Product(vec![self, rhs])
    }
}

impl Neg for FreeExpression {
    type Output = FreeExpression;
    fn neg(self) -> FreeExpression {
        FreeExpression::Product(vec![FreeExpression::Scalar(ExactScalar::from_integer(-1)), self])
    }
}

/// Linear combination of words; the empty word is the identity.
pub type WordSum = BTreeMap<Vec<Symbol>, ExactScalar>;

fn accumulate(sum: &mut WordSum, word: Vec<Symbol>, c: ExactScalar) {
    if c.is_zero() {
        return;
    }
    match sum.get_mut(&word) {
        Some(existing) => {
            *existing += c;
            if existing.is_zero() {
                sum.remove(&word);
            }
        }
        None => {
            sum.insert(word, c);
        }
    }
}

fn multiply_words(x: &WordSum, y: &WordSum, limit: usize) -> Result<WordSum, OpalgError> {
    if x.len().saturating_mul(y.len()) > limit {
        return Err(OpalgError::ExpansionTooLarge);
    }
    let mut out = WordSum::new();
    for (wx, cx) in x {
        for (wy, cy) in y {
            let mut w = wx.clone();
            w.extend_from_slice(wy);
            accumulate(&mut out, w, cx * cy);
        }
    }
    Ok(out)
}

/// The symmetrized words of `⋮Q^m P^r⋮`: `(1/2)^m Σ_l C(m,l) Q^{m-l} P^r Q^l`.
pub fn weyl_symmetrized_words(m: u32, r: u32) -> WordSum {
    let weight = ExactScalar::ratio(1, 2).pow(m);
    let mut out = WordSum::new();
    for l in 0..=m {
        let mut w = vec![Symbol::Q; (m - l) as usize];
        w.extend(core::iter::repeat_n(Symbol::P, r as usize));
        w.extend(core::iter::repeat_n(Symbol::Q, l as usize));
        accumulate(&mut out, w, &weight * ExactScalar::from_bigint(binomial(m, l)));
    }
    out
}

/// Distributes every product, giving a sum of words.
///
/// PQ/QP blocks expand to their ordered words and Weyl blocks to their
/// symmetrized words.
pub fn expand(e: &FreeExpression) -> Result<WordSum, OpalgError> {
    expand_limited(e, MAX_EXPANSION_WORDS)
}

fn expand_limited(e: &FreeExpression, limit: usize) -> Result<WordSum, OpalgError> {
    let mut out = WordSum::new();
    match e {
        FreeExpression::Scalar(c) => accumulate(&mut out, Vec::new(), c.clone()),
        FreeExpression::Symbol(s) => accumulate(&mut out, vec![*s], ExactScalar::one()),
        FreeExpression::Sum(items) => {
            for item in items {
                for (w, c) in expand_limited(item, limit)? {
                    accumulate(&mut out, w, c);
                }
                if out.len() > limit {
                    return Err(OpalgError::ExpansionTooLarge);
                }
            }
        }
        FreeExpression::Product(items) => {
            accumulate(&mut out, Vec::new(), ExactScalar::one());
            for item in items {
                out = multiply_words(&out, &expand_limited(item, limit)?, limit)?;
            }
        }
        FreeExpression::Power(base, k) => {
            let base = expand_limited(base, limit)?;
            accumulate(&mut out, Vec::new(), ExactScalar::one());
            for _ in 0..*k {
                out = multiply_words(&out, &base, limit)?;
            }
        }
        FreeExpression::Block(poly) => {
            for (mono, c) in poly.terms() {
                match poly.tag() {
                    OrderTag::Weyl => {
                        for (w, wc) in weyl_symmetrized_words(mono.m, mono.r) {
                            accumulate(&mut out, w, wc * c);
                        }
                    }
                    tag => accumulate(&mut out, ordered_word(tag, *mono), c.clone()),
                }
            }
        }
    }
    Ok(out)
}

/// `left · right → right · left + constant`
#[derive(Debug, Clone)]
pub struct SwapRule {
    pub left: Symbol,
    pub right: Symbol,
    pub constant: ExactScalar,
}

impl SwapRule {
    /// `QP → PQ + i`
    pub fn p_before_q() -> Self {
        SwapRule { left: Symbol::Q, right: Symbol::P, constant: ExactScalar::i() }
    }

    /// `PQ → QP - i`
    pub fn q_before_p() -> Self {
        SwapRule { left: Symbol::P, right: Symbol::Q, constant: -ExactScalar::i() }
    }

    /// `a a† → a† a + 1`
    pub fn normal() -> Self {
        SwapRule { left: Symbol::A, right: Symbol::Adag, constant: ExactScalar::one() }
    }

    /// `a† a → a a† - 1`
    pub fn antinormal() -> Self {
        SwapRule { left: Symbol::Adag, right: Symbol::A, constant: -ExactScalar::one() }
    }
}

/// Bookkeeping from a rewrite run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RewriteStats {
    /// Total swaps performed across all words.
    pub applications: usize,
    /// Longest chain of swaps leading from an input word to a normal word.
    pub max_depth: usize,
}

/// Applies `rule` at the leftmost redex until no word contains
/// `rule.left` immediately followed by `rule.right`.
///
/// Each swap removes exactly one `(left, right)` inversion from a word and
/// the contraction removes a pair of letters, so every derivation chain is
/// bounded by the inversion count of its starting word.
pub fn rewrite_words(input: WordSum, rule: &SwapRule) -> (WordSum, RewriteStats) {
    let mut pending: BTreeMap<Vec<Symbol>, (ExactScalar, usize)> =
        input.into_iter().map(|(w, c)| (w, (c, 0))).collect();
    let mut done = WordSum::new();
    let mut stats = RewriteStats::default();

    let push = |pending: &mut BTreeMap<Vec<Symbol>, (ExactScalar, usize)>, w: Vec<Symbol>, c: ExactScalar, depth: usize| {
        if c.is_zero() {
            return;
        }
        match pending.get_mut(&w) {
            Some((existing, d)) => {
                *existing += c;
                *d = (*d).max(depth);
                if existing.is_zero() {
                    pending.remove(&w);
                }
            }
            None => {
                pending.insert(w, (c, depth));
            }
        }
    };

    while let Some((word, (c, depth))) = pending.pop_first() {
        let redex = word.windows(2).position(|pair| pair[0] == rule.left && pair[1] == rule.right);
        match redex {
            None => {
                stats.max_depth = stats.max_depth.max(depth);
                accumulate(&mut done, word, c);
            }
            Some(j) => {
                stats.applications += 1;
                let mut swapped = word.clone();
                swapped.swap(j, j + 1);
                let mut contracted = word;
                contracted.drain(j..j + 2);
                push(&mut pending, swapped, c.clone(), depth + 1);
                push(&mut pending, contracted, c * &rule.constant, depth + 1);
            }
        }
    }
    (done, stats)
}

fn require_canonical(e: &FreeExpression) -> Result<(), OpalgError> {
    match e.symbols().into_iter().find(|s| s.is_ladder()) {
        Some(s) => Err(OpalgError::UnsupportedSymbol(s)),
        None => Ok(()),
    }
}

fn words_to_ordered(words: WordSum, tag: OrderTag) -> OrderedPolynomial {
    OrderedPolynomial::from_terms(
        tag,
        words.into_iter().map(|(w, c)| {
            let m = w.iter().filter(|s| **s == Symbol::Q).count() as u32;
            (Monomial::new(m, w.len() as u32 - m), c)
        }),
    )
}

/// Rewrites to P-before-Q order, also returning rewrite statistics.
pub fn rewrite_to_pq_with_stats(e: &FreeExpression) -> Result<(OrderedPolynomial, RewriteStats), OpalgError> {
    require_canonical(e)?;
    let (words, stats) = rewrite_words(expand(e)?, &SwapRule::p_before_q());
    Ok((words_to_ordered(words, OrderTag::PQ), stats))
}

/// Reduces an expression over `{Q, P}` to P-Q order using `QP → PQ + i`.
pub fn rewrite_to_pq(e: &FreeExpression) -> Result<OrderedPolynomial, OpalgError> {
    rewrite_to_pq_with_stats(e).map(|(p, _)| p)
}

/// Reduces an expression over `{Q, P}` to Q-P order using `PQ → QP - i`.
pub fn rewrite_to_qp(e: &FreeExpression) -> Result<OrderedPolynomial, OpalgError> {
    require_canonical(e)?;
    let (words, _) = rewrite_words(expand(e)?, &SwapRule::q_before_p());
    Ok(words_to_ordered(words, OrderTag::QP))
}

fn ladder_words(e: &FreeExpression) -> Result<WordSum, OpalgError> {
    // Q = (a + a†)/√2, P = (a - a†)/(√2 i) = (i a† - i a)/√2
    let root_half = ExactScalar::sqrt2() * ExactScalar::ratio(1, 2);
    let i_root_half = &root_half * ExactScalar::i();
    let q_image: WordSum = [(vec![Symbol::Adag], root_half.clone()), (vec![Symbol::A], root_half)].into_iter().collect();
    let p_image: WordSum = [(vec![Symbol::Adag], i_root_half.clone()), (vec![Symbol::A], -i_root_half)].into_iter().collect();

    let mut out = WordSum::new();
    for (word, c) in expand(e)? {
        let mut acc = WordSum::new();
        acc.insert(Vec::new(), c);
        for s in word {
            let image = match s {
                Symbol::Q => q_image.clone(),
                Symbol::P => p_image.clone(),
                other => [(vec![other], ExactScalar::one())].into_iter().collect(),
            };
            acc = multiply_words(&acc, &image, MAX_EXPANSION_WORDS)?;
        }
        for (w, wc) in acc {
            accumulate(&mut out, w, wc);
        }
    }
    Ok(out)
}

fn ladder_poly(words: WordSum, order: LadderOrder) -> LadderPolynomial {
    let mut terms = BTreeMap::new();
    for (w, c) in words {
        let j = w.iter().filter(|s| **s == Symbol::Adag).count() as u32;
        let k = w.len() as u32 - j;
        terms.insert((j, k), c);
    }
    LadderPolynomial { order, terms }
}

/// Substitutes `Q = (a + a†)/√2`, `P = (a - a†)/(√2 i)` and normal orders
/// with `a a† → a† a + 1`. Ladder symbols already present pass through.
pub fn substitute_ladder(e: &FreeExpression) -> Result<LadderPolynomial, OpalgError> {
    let (words, _) = rewrite_words(ladder_words(e)?, &SwapRule::normal());
    Ok(ladder_poly(words, LadderOrder::Normal))
}

/// As [`substitute_ladder`] but antinormal ordered (`a` to the left).
pub fn substitute_ladder_antinormal(e: &FreeExpression) -> Result<LadderPolynomial, OpalgError> {
    let (words, _) = rewrite_words(ladder_words(e)?, &SwapRule::antinormal());
    Ok(ladder_poly(words, LadderOrder::Antinormal))
}

/// `[x, y] = xy - yx` in P-Q order.
pub fn commutator(x: &FreeExpression, y: &FreeExpression) -> Result<OrderedPolynomial, OpalgError> {
    let xy = x.clone() * y.clone();
    let yx = y.clone() * x.clone();
    rewrite_to_pq(&(xy - yx))
}

/// `⋮Q^m P^r⋮` in P-Q order, computed by rewriting the symmetrized words.
pub fn weyl_symbol_by_rewriting(m: u32, r: u32) -> OrderedPolynomial {
    let (words, _) = rewrite_words(weyl_symmetrized_words(m, r), &SwapRule::p_before_q());
    words_to_ordered(words, OrderTag::PQ)
}

fn canonical_pq(x: &OrderedPolynomial) -> Result<OrderedPolynomial, OpalgError> {
    match x.tag() {
        OrderTag::PQ => Ok(x.clone()),
        OrderTag::QP => rewrite_to_pq(&x.to_expression()),
        OrderTag::Weyl => Ok(crate::ordering::convert(x, OrderTag::PQ)),
    }
}

/// Operator equality, decided in the canonical P-Q form.
pub fn poly_equal(x: &OrderedPolynomial, y: &OrderedPolynomial) -> bool {
    match (canonical_pq(x), canonical_pq(y)) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: i64, im: i64) -> ExactScalar {
        ExactScalar::from_integer(re) + ExactScalar::i() * ExactScalar::from_integer(im)
    }

    fn pq(terms: &[(u32, u32, ExactScalar)]) -> OrderedPolynomial {
        OrderedPolynomial::from_terms(OrderTag::PQ, terms.iter().map(|(m, r, c)| (Monomial::new(*m, *r), c.clone())))
    }

    fn qp(terms: &[(u32, u32, ExactScalar)]) -> OrderedPolynomial {
        OrderedPolynomial::from_terms(OrderTag::QP, terms.iter().map(|(m, r, c)| (Monomial::new(*m, *r), c.clone())))
    }

    use Symbol::{P, Q};

    #[test]
    fn rewrite_examples_pq() {
        assert_eq!(rewrite_to_pq(&FreeExpression::q()).unwrap(), OrderedPolynomial::monomial(OrderTag::PQ, 1, 0));
        assert_eq!(rewrite_to_pq(&FreeExpression::word(&[Q, P])).unwrap(), pq(&[(1, 1, c(1, 0)), (0, 0, c(0, 1))]));
        assert_eq!(
            rewrite_to_pq(&FreeExpression::word(&[Q, P, Q])).unwrap(),
            pq(&[(2, 1, c(1, 0)), (1, 0, c(0, 1))])
        );
    }

    #[test]
    fn rewrite_examples_qp() {
        assert_eq!(rewrite_to_qp(&FreeExpression::word(&[P, Q])).unwrap(), qp(&[(1, 1, c(1, 0)), (0, 0, c(0, -1))]));
        assert_eq!(
            rewrite_to_qp(&FreeExpression::word(&[P, P, Q, Q])).unwrap(),
            qp(&[(2, 2, c(1, 0)), (1, 1, c(0, -4)), (0, 0, c(-2, 0))])
        );
        assert_eq!(rewrite_to_qp(&FreeExpression::p().pow(3)).unwrap(), OrderedPolynomial::monomial(OrderTag::QP, 0, 3));
    }

    #[test]
    fn ladder_symbols_rejected_by_canonical_rewrite() {
        let e = FreeExpression::a() * FreeExpression::q();
        assert_eq!(rewrite_to_pq(&e), Err(OpalgError::UnsupportedSymbol(Symbol::A)));
        assert!(rewrite_to_qp(&FreeExpression::adag()).is_err());
    }

    #[test]
    fn ladder_substitution_examples() {
        let root_half = ExactScalar::sqrt2() * ExactScalar::ratio(1, 2);
        let q = substitute_ladder(&FreeExpression::q()).unwrap();
        assert_eq!(q.len(), 2);
        assert_eq!(q.coefficient(1, 0), root_half);
        assert_eq!(q.coefficient(0, 1), root_half);

        let aadag = substitute_ladder(&(FreeExpression::a() * FreeExpression::adag())).unwrap();
        assert_eq!(aadag.len(), 2);
        assert_eq!(aadag.coefficient(1, 1), ExactScalar::one());
        assert_eq!(aadag.coefficient(0, 0), ExactScalar::one());

        let half_i = ExactScalar::i() * ExactScalar::ratio(1, 2);
        let qp_ = substitute_ladder(&FreeExpression::word(&[Q, P])).unwrap();
        assert_eq!(qp_.len(), 3);
        assert_eq!(qp_.coefficient(2, 0), half_i);
        assert_eq!(qp_.coefficient(0, 2), -half_i.clone());
        assert_eq!(qp_.coefficient(0, 0), half_i);
    }

    #[test]
    fn antinormal_order_of_number_operator() {
        let n = substitute_ladder_antinormal(&(FreeExpression::adag() * FreeExpression::a())).unwrap();
        assert_eq!(n.order(), LadderOrder::Antinormal);
        assert_eq!(n.coefficient(1, 1), ExactScalar::one());
        assert_eq!(n.coefficient(0, 0), -ExactScalar::one());
    }

    #[test]
    fn commutator_examples() {
        assert_eq!(commutator(&FreeExpression::q(), &FreeExpression::p()).unwrap(), pq(&[(0, 0, c(0, 1))]));
        assert_eq!(
            commutator(&FreeExpression::q().pow(2), &FreeExpression::p().pow(2)).unwrap(),
            pq(&[(1, 1, c(0, 4)), (0, 0, c(-2, 0))])
        );
        assert!(commutator(&FreeExpression::q().pow(3), &FreeExpression::scalar(1)).unwrap().is_zero());
    }

    #[test]
    fn poly_equal_examples() {
        let lhs = pq(&[(1, 1, c(1, 0)), (0, 0, c(0, 1))]);
        let rhs = rewrite_to_pq(&FreeExpression::word(&[Q, P])).unwrap();
        assert!(poly_equal(&lhs, &rhs));
        assert!(!poly_equal(&OrderedPolynomial::monomial(OrderTag::QP, 1, 1), &OrderedPolynomial::monomial(OrderTag::PQ, 1, 1)));
        let eq55 = crate::ordering::qp_to_pq(2, 2);
        let oracle = rewrite_to_pq(&FreeExpression::word(&[Q, Q, P, P])).unwrap();
        assert!(poly_equal(&eq55, &oracle));
    }

    #[test]
    fn weyl_qp_symmetrization() {
        let expected = pq(&[(1, 1, c(1, 0)), (0, 0, ExactScalar::i() * ExactScalar::ratio(1, 2))]);
        assert_eq!(weyl_symbol_by_rewriting(1, 1), expected);
    }

    #[test]
    fn expansion_guard() {
        let big = (FreeExpression::q() + FreeExpression::p()).pow(12);
        assert_eq!(expand_limited(&big, 1000), Err(OpalgError::ExpansionTooLarge));
        assert_eq!(expand_limited(&big, 1 << 13).unwrap().len(), 1 << 12);
    }

    #[test]
    fn adjoint_swaps_tags() {
        let x = pq(&[(1, 1, c(1, 0)), (0, 0, c(0, 1))]);
        let adj = x.adjoint();
        assert_eq!(adj.tag(), OrderTag::QP);
        assert_eq!(adj.coefficient(0, 0), c(0, -1));
    }

    #[test]
    fn tag_mismatch_is_reported() {
        let a = OrderedPolynomial::monomial(OrderTag::PQ, 1, 0);
        let b = OrderedPolynomial::monomial(OrderTag::QP, 1, 0);
        assert_eq!(a.try_add(&b), Err(OpalgError::TagMismatch(OrderTag::PQ, OrderTag::QP)));
    }
}
