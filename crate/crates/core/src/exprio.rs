//! Text syntax for operator expressions and ordered polynomials.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := factor ('*' factor)*
//! factor  := '-' factor | primary ('^' uint)?
//! primary := scalar | symbol | '(' expr ')' | block
//! block   := ('pq{' | 'qp{' | 'weyl{') expr '}'
//! scalar  := integer | integer '/' integer | 'i' | 'r2'
//! symbol  := 'Q' | 'P' | 'a' | 'adag'
//! ```
//!
//! Outside blocks products are noncommutative. Inside a block `Q` and `P`
//! commute and the block denotes the ordered polynomial with that tag.
//! There is no implicit multiplication: `2Q` and `Q2` are errors.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::exactnum::{ExactScalar, Rational};
use crate::opalg::{
    rewrite_to_pq, rewrite_to_qp, FreeExpression, LadderOrder, LadderPolynomial, Monomial, OpalgError, OrderTag,
    OrderedPolynomial, Symbol,
};
use crate::ordering::{convert, CommutativePoly2};

/// Deepest allowed nesting of parentheses, blocks and unary minus.
pub const MAX_NESTING: usize = 200;
/// Largest exponent accepted after `^`.
pub const MAX_EXPONENT: u32 = 64;
/// Largest total degree a block may reach while being reduced.
pub const MAX_BLOCK_DEGREE: u32 = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Symbol(Symbol),
    Integer(BigInt),
    Rational(Rational),
    ImaginaryUnit,
    Sqrt2,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    BlockOpen(OrderTag),
    BlockClose,
}

impl TokenKind {
    fn describe(&self) -> String {
        match self {
            TokenKind::Symbol(s) => format!("symbol '{s}'"),
            TokenKind::Integer(n) => format!("integer {n}"),
            TokenKind::Rational(r) => format!("rational {r}"),
            TokenKind::ImaginaryUnit => "'i'".to_string(),
            TokenKind::Sqrt2 => "'r2'".to_string(),
            TokenKind::Plus => "'+'".to_string(),
            TokenKind::Minus => "'-'".to_string(),
            TokenKind::Star => "'*'".to_string(),
            TokenKind::Caret => "'^'".to_string(),
            TokenKind::LParen => "'('".to_string(),
            TokenKind::RParen => "')'".to_string(),
            TokenKind::BlockOpen(tag) => format!("'{}{{'", tag.keyword()),
            TokenKind::BlockClose => "'}'".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// Byte offsets into the source text.
    pub span: Range<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub message: String,
    pub span: Range<usize>,
    pub expected: Vec<&'static str>,
}

impl ParseError {
    fn new(message: impl Into<String>, span: Range<usize>) -> Self {
        ParseError { message: message.into(), span, expected: Vec::new() }
    }

    fn expecting(mut self, expected: &[&'static str]) -> Self {
        self.expected = expected.to_vec();
        self
    }

    /// The error with the offending line and a caret marker underneath.
    pub fn annotate(&self, source: &str) -> String {
        let start = floor_char_boundary(source, self.span.start.min(source.len()));
        let end = floor_char_boundary(source, self.span.end.min(source.len())).max(start);
        let line_start = source[..start].rfind('\n').map_or(0, |k| k + 1);
        let line_end = source[start..].find('\n').map_or(source.len(), |k| start + k);
        let line = &source[line_start..line_end];
        let pad = source[line_start..start].chars().count();
        let width = source[start..end.min(line_end)].chars().count().max(1);
        format!("{self}\n  {line}\n  {}{}", " ".repeat(pad), "^".repeat(width))
    }
}

fn floor_char_boundary(s: &str, mut k: usize) -> usize {
    while k > 0 && !s.is_char_boundary(k) {
        k -= 1;
    }
    k
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}..{}", self.message, self.span.start, self.span.end)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl core::error::Error for ParseError {}

/// Splits `text` into tokens.
pub fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut k = 0;
    while k < bytes.len() {
        let c = bytes[k];
        let start = k;
        let single = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                k += 1;
                continue;
            }
            b'+' => Some(TokenKind::Plus),
            b'-' => Some(TokenKind::Minus),
            b'*' => Some(TokenKind::Star),
            b'^' => Some(TokenKind::Caret),
            b'(' => Some(TokenKind::LParen),
            b')' => Some(TokenKind::RParen),
            b'}' => Some(TokenKind::BlockClose),
            _ => None,
        };
        if let Some(kind) = single {
            k += 1;
            out.push(Token { kind, span: start..k });
            continue;
        }
        if c.is_ascii_digit() {
            while k < bytes.len() && bytes[k].is_ascii_digit() {
                k += 1;
            }
            let numer: BigInt = text[start..k].parse().expect("ascii digits");
            if k + 1 < bytes.len() && bytes[k] == b'/' && bytes[k + 1].is_ascii_digit() {
                let dstart = k + 1;
                k = dstart;
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                let denom: BigInt = text[dstart..k].parse().expect("ascii digits");
                if denom.is_zero() {
                    return Err(ParseError::new("zero denominator in rational literal", start..k));
                }
                out.push(Token { kind: TokenKind::Rational(Rational::new(numer, denom)), span: start..k });
            } else {
                out.push(Token { kind: TokenKind::Integer(numer), span: start..k });
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while k < bytes.len() && (bytes[k].is_ascii_alphanumeric() || bytes[k] == b'_') {
                k += 1;
            }
            let word = &text[start..k];
            let kind = match word {
                "Q" => TokenKind::Symbol(Symbol::Q),
                "P" => TokenKind::Symbol(Symbol::P),
                "a" => TokenKind::Symbol(Symbol::A),
                "adag" => TokenKind::Symbol(Symbol::Adag),
                "i" => TokenKind::ImaginaryUnit,
                "r2" => TokenKind::Sqrt2,
                "pq" | "qp" | "weyl" => {
                    if k < bytes.len() && bytes[k] == b'{' {
                        k += 1;
                        let tag = match word {
                            "pq" => OrderTag::PQ,
                            "qp" => OrderTag::QP,
                            _ => OrderTag::Weyl,
                        };
                        TokenKind::BlockOpen(tag)
                    } else {
                        return Err(ParseError::new(format!("'{word}' must be followed by '{{'"), start..k).expecting(&["'{'"]));
                    }
                }
                _ => {
                    return Err(ParseError::new(format!("unknown identifier '{word}'"), start..k)
                        .expecting(&["'Q'", "'P'", "'a'", "'adag'", "'i'", "'r2'"]))
                }
            };
            out.push(Token { kind, span: start..k });
            continue;
        }
        let ch = text[start..].chars().next().expect("in bounds");
        let end = start + ch.len_utf8();
        let message = match ch {
            '{' => "'{' must follow pq, qp or weyl".to_string(),
            '/' => "'/' is only allowed inside a rational literal such as 1/2".to_string(),
            _ => format!("unexpected character {ch:?}"),
        };
        return Err(ParseError::new(message, start..end));
    }
    Ok(out)
}

#[derive(Debug, Clone)]
struct Node {
    kind: NodeKind,
    span: Range<usize>,
}

#[derive(Debug, Clone)]
enum NodeKind {
    Scalar(ExactScalar),
    Symbol(Symbol),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Vec<Node>),
    Pow(Box<Node>, u32),
    Block(OrderTag, Box<Node>),
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    depth: usize,
    end: usize,
}

const OPERAND: &[&str] = &["integer", "rational", "'i'", "'r2'", "'Q'", "'P'", "'a'", "'adag'", "'('", "'-'", "ordering block"];

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn here(&self) -> Range<usize> {
        self.peek().map_or(self.end..self.end, |t| t.span.clone())
    }

    fn descend(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return Err(ParseError::new(format!("nesting deeper than {MAX_NESTING}"), self.here()));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        while let Some(tok) = self.peek() {
            let is_add = match tok.kind {
                TokenKind::Plus => true,
                TokenKind::Minus => false,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.term()?;
            let span = lhs.span.start..rhs.span.end;
            let kind = if is_add {
                NodeKind::Add(Box::new(lhs), Box::new(rhs))
            } else {
                NodeKind::Sub(Box::new(lhs), Box::new(rhs))
            };
            lhs = Node { kind, span };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let first = self.factor()?;
        let mut factors = vec![first];
        while matches!(self.peek().map(|t| &t.kind), Some(TokenKind::Star)) {
            self.pos += 1;
            factors.push(self.factor()?);
        }
        if factors.len() == 1 {
            return Ok(factors.pop().expect("one factor"));
        }
        let span = factors[0].span.start..factors[factors.len() - 1].span.end;
        Ok(Node { kind: NodeKind::Mul(factors), span })
    }

    fn factor(&mut self) -> Result<Node, ParseError> {
        if let Some(tok) = self.peek() {
            if tok.kind == TokenKind::Minus {
                let start = tok.span.start;
                self.pos += 1;
                self.descend()?;
                let inner = self.factor()?;
                self.depth -= 1;
                let span = start..inner.span.end;
                return Ok(Node { kind: NodeKind::Neg(Box::new(inner)), span });
            }
        }
        let base = self.primary()?;
        if let Some(tok) = self.peek() {
            if tok.kind == TokenKind::Caret {
                self.pos += 1;
                let exp_tok = self.peek().ok_or_else(|| {
                    ParseError::new("missing exponent after '^'", self.end..self.end).expecting(&["non-negative integer"])
                })?;
                let TokenKind::Integer(n) = &exp_tok.kind else {
                    return Err(ParseError::new(format!("exponent must be a non-negative integer, found {}", exp_tok.kind.describe()), exp_tok.span.clone())
                        .expecting(&["non-negative integer"]));
                };
                let k = u32::try_from(n).ok().filter(|&k| k <= MAX_EXPONENT).ok_or_else(|| {
                    ParseError::new(format!("exponent {n} exceeds {MAX_EXPONENT}"), exp_tok.span.clone())
                })?;
                self.pos += 1;
                let span = base.span.start..exp_tok.span.end;
                return Ok(Node { kind: NodeKind::Pow(Box::new(base), k), span });
            }
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Node, ParseError> {
        let Some(tok) = self.peek() else {
            return Err(ParseError::new("unexpected end of input", self.end..self.end).expecting(OPERAND));
        };
        let span = tok.span.clone();
        let leaf = |kind| Ok(Node { kind, span: span.clone() });
        match &tok.kind {
            TokenKind::Integer(n) => {
                self.pos += 1;
                leaf(NodeKind::Scalar(ExactScalar::from_bigint(n.clone())))
            }
            TokenKind::Rational(r) => {
                self.pos += 1;
                leaf(NodeKind::Scalar(ExactScalar::from_rational(r.clone())))
            }
            TokenKind::ImaginaryUnit => {
                self.pos += 1;
                leaf(NodeKind::Scalar(ExactScalar::i()))
            }
            TokenKind::Sqrt2 => {
                self.pos += 1;
                leaf(NodeKind::Scalar(ExactScalar::sqrt2()))
            }
            TokenKind::Symbol(s) => {
                self.pos += 1;
                leaf(NodeKind::Symbol(*s))
            }
            TokenKind::LParen | TokenKind::BlockOpen(_) => {
                let opener = tok.kind.clone();
                self.pos += 1;
                self.descend()?;
                let inner = self.expr()?;
                self.depth -= 1;
                let (closer, name) = match opener {
                    TokenKind::LParen => (TokenKind::RParen, "')'"),
                    _ => (TokenKind::BlockClose, "'}'"),
                };
                match self.peek() {
                    Some(t) if t.kind == closer => {
                        self.pos += 1;
                        let span = span.start..t.span.end;
                        let kind = match opener {
                            TokenKind::BlockOpen(tag) => NodeKind::Block(tag, Box::new(inner)),
                            _ => return Ok(Node { kind: inner.kind, span }),
                        };
                        Ok(Node { kind, span })
                    }
                    Some(t) => Err(ParseError::new(format!("unexpected {}", t.kind.describe()), t.span.clone())
                        .expecting(&[name, "'+'", "'-'", "'*'"])),
                    None => Err(ParseError::new(format!("unclosed {}", opener.describe()), span).expecting(&[name])),
                }
            }
            other => Err(ParseError::new(format!("unexpected {}", other.describe()), span.clone()).expecting(OPERAND)),
        }
    }
}

/// Result of [`parse`].
#[derive(Debug, Clone, PartialEq)]
pub enum Parsed {
    /// A general noncommutative expression (may contain blocks).
    Expression(FreeExpression),
    /// The whole input was a linear combination of blocks with one tag.
    Ordered(OrderedPolynomial),
}

impl Parsed {
    pub fn as_ordered(&self) -> Option<&OrderedPolynomial> {
        match self {
            Parsed::Ordered(p) => Some(p),
            Parsed::Expression(_) => None,
        }
    }

    pub fn to_expression(&self) -> FreeExpression {
        match self {
            Parsed::Expression(e) => e.clone(),
            Parsed::Ordered(p) => p.to_expression(),
        }
    }
}

/// Parses an expression.
pub fn parse(text: &str) -> Result<Parsed, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens: &tokens, pos: 0, depth: 0, end: text.len() };
    let root = parser.expr()?;
    if let Some(tok) = parser.peek() {
        let message = match tok.kind {
            TokenKind::RParen => "unmatched ')'".to_string(),
            TokenKind::BlockClose => "unmatched '}'".to_string(),
            _ => format!("unexpected {} (multiplication must be written with '*')", tok.kind.describe()),
        };
        return Err(ParseError::new(message, tok.span.clone()).expecting(&["'+'", "'-'", "'*'", "'^'", "end of input"]));
    }
    if let Some(poly) = block_combination(&root)? {
        return Ok(Parsed::Ordered(poly));
    }
    Ok(Parsed::Expression(lower(&root)?))
}

fn scalar_of(node: &Node) -> Option<ExactScalar> {
    match &node.kind {
        NodeKind::Scalar(c) => Some(c.clone()),
        NodeKind::Symbol(_) | NodeKind::Block(..) => None,
        NodeKind::Neg(x) => scalar_of(x).map(|c| -c),
        NodeKind::Add(a, b) => Some(scalar_of(a)? + scalar_of(b)?),
        NodeKind::Sub(a, b) => Some(scalar_of(a)? - scalar_of(b)?),
        NodeKind::Mul(fs) => fs.iter().try_fold(ExactScalar::one(), |acc, f| Some(acc * scalar_of(f)?)),
        NodeKind::Pow(x, k) => scalar_of(x).map(|c| c.pow(*k)),
    }
}

/// `Some` when `node` is a scalar combination of blocks sharing one tag.
fn block_combination(node: &Node) -> Result<Option<OrderedPolynomial>, ParseError> {
    let out = match &node.kind {
        NodeKind::Block(tag, inner) => Some(commutative(inner)?.retag(*tag)),
        NodeKind::Neg(x) => block_combination(x)?.map(|p| p.scale(&-ExactScalar::one())),
        NodeKind::Add(a, b) | NodeKind::Sub(a, b) => {
            let sign = if matches!(node.kind, NodeKind::Add(..)) { 1 } else { -1 };
            match (block_combination(a)?, block_combination(b)?) {
                (Some(x), Some(y)) => x.try_add(&y.scale(&ExactScalar::from_integer(sign))).ok(),
                _ => None,
            }
        }
        NodeKind::Mul(fs) => {
            let mut block = None;
            let mut scale = ExactScalar::one();
            for f in fs {
                if let Some(c) = scalar_of(f) {
                    scale *= c;
                } else if block.is_none() {
                    match block_combination(f)? {
                        Some(p) => block = Some(p),
                        None => return Ok(None),
                    }
                } else {
                    return Ok(None);
                }
            }
            block.map(|p| p.scale(&scale))
        }
        NodeKind::Pow(x, 1) => block_combination(x)?,
        _ => None,
    };
    Ok(out)
}

trait Retag {
    fn retag(self, tag: OrderTag) -> OrderedPolynomial;
}

impl Retag for CommutativePoly2 {
    fn retag(self, tag: OrderTag) -> OrderedPolynomial {
        OrderedPolynomial::from_terms(tag, self.terms().map(|(&(m, r), c)| (Monomial::new(m, r), c.clone())))
    }
}

fn degree_guard(degree: u32, span: &Range<usize>) -> Result<(), ParseError> {
    if degree > MAX_BLOCK_DEGREE {
        return Err(ParseError::new(format!("ordering block degree exceeds {MAX_BLOCK_DEGREE}"), span.clone()));
    }
    Ok(())
}

/// Reduces block contents with `Q` and `P` commuting.
fn commutative(node: &Node) -> Result<CommutativePoly2, ParseError> {
    Ok(match &node.kind {
        NodeKind::Scalar(c) => CommutativePoly2::constant(c.clone()),
        NodeKind::Symbol(Symbol::Q) => CommutativePoly2::monomial(1, 0),
        NodeKind::Symbol(Symbol::P) => CommutativePoly2::monomial(0, 1),
        NodeKind::Symbol(s) => {
            return Err(ParseError::new(
                format!("ladder operator '{s}' cannot appear inside an ordering block; blocks take Q and P only"),
                node.span.clone(),
            ))
        }
        NodeKind::Neg(x) => commutative(x)?.scale(&-ExactScalar::one()),
        NodeKind::Add(a, b) => commutative(a)?.add(&commutative(b)?),
        NodeKind::Sub(a, b) => commutative(a)?.add(&commutative(b)?.scale(&-ExactScalar::one())),
        NodeKind::Mul(fs) => {
            let mut acc = CommutativePoly2::constant(ExactScalar::one());
            for f in fs {
                let next = commutative(f)?;
                degree_guard(acc.max_degree() + next.max_degree(), &node.span)?;
                acc = acc.mul(&next);
            }
            acc
        }
        NodeKind::Pow(x, k) => {
            let base = commutative(x)?;
            degree_guard(base.max_degree().saturating_mul(*k), &node.span)?;
            let mut acc = CommutativePoly2::constant(ExactScalar::one());
            for _ in 0..*k {
                acc = acc.mul(&base);
            }
            acc
        }
        NodeKind::Block(..) => return Err(ParseError::new("ordering blocks cannot be nested", node.span.clone())),
    })
}

fn lower(node: &Node) -> Result<FreeExpression, ParseError> {
    if let Some(c) = scalar_of(node) {
        return Ok(FreeExpression::Scalar(c));
    }
    Ok(match &node.kind {
        NodeKind::Scalar(c) => FreeExpression::Scalar(c.clone()),
        NodeKind::Symbol(s) => FreeExpression::Symbol(*s),
        NodeKind::Block(tag, inner) => FreeExpression::Block(commutative(inner)?.retag(*tag)),
        NodeKind::Neg(x) => product(ExactScalar::from_integer(-1), vec![lower(x)?]),
        NodeKind::Add(a, b) => sum(lower(a)?, lower(b)?),
        NodeKind::Sub(a, b) => sum(lower(a)?, product(ExactScalar::from_integer(-1), vec![lower(b)?])),
        NodeKind::Mul(fs) => {
            let mut head = ExactScalar::one();
            let mut rest = Vec::new();
            for f in fs {
                match scalar_of(f) {
                    Some(c) => head *= c,
                    None => rest.push(lower(f)?),
                }
            }
            product(head, rest)
        }
        NodeKind::Pow(x, k) => FreeExpression::Power(Box::new(lower(x)?), *k),
    })
}

fn sum(a: FreeExpression, b: FreeExpression) -> FreeExpression {
    let mut items = match a {
        FreeExpression::Sum(v) => v,
        other => vec![other],
    };
    items.push(b);
    FreeExpression::Sum(items)
}

/// `head · f₁ · f₂ ⋯`, merging a leading scalar of a nested product.
fn product(mut head: ExactScalar, factors: Vec<FreeExpression>) -> FreeExpression {
    let mut items = Vec::new();
    for f in factors {
        match f {
            FreeExpression::Product(inner) => {
                for g in inner {
                    match g {
                        FreeExpression::Scalar(c) => head *= c,
                        other => items.push(other),
                    }
                }
            }
            FreeExpression::Scalar(c) => head *= c,
            other => items.push(other),
        }
    }
    if items.is_empty() {
        return FreeExpression::Scalar(head);
    }
    if head.is_one() && items.len() == 1 {
        return items.pop().expect("one factor");
    }
    if !head.is_one() {
        items.insert(0, FreeExpression::Scalar(head));
    }
    FreeExpression::Product(items)
}

/// Reads a parse result as a polynomial in the `target` ordering. Ladder
/// operators are first rewritten in terms of `Q` and `P`.
pub fn interpret(parsed: &Parsed, target: OrderTag) -> Result<OrderedPolynomial, OpalgError> {
    let expr = match parsed {
        Parsed::Ordered(p) => return Ok(convert(p, target)),
        Parsed::Expression(e) => e.to_canonical(),
    };
    match target {
        OrderTag::PQ => rewrite_to_pq(&expr),
        OrderTag::QP => rewrite_to_qp(&expr),
        OrderTag::Weyl => Ok(convert(&rewrite_to_pq(&expr)?, OrderTag::Weyl)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReadError {
    #[error("{0}")]
    Parse(ParseError),
    #[error("{0}")]
    Algebra(OpalgError),
}

/// [`parse`] followed by [`interpret`].
pub fn parse_polynomial(text: &str, target: OrderTag) -> Result<OrderedPolynomial, ReadError> {
    let parsed = parse(text).map_err(ReadError::Parse)?;
    interpret(&parsed, target).map_err(ReadError::Algebra)
}

/// Coefficient text: `2`, `-1/2`, `i`, `-i`, `3/4*i*r2`, or the
/// parenthesized canonical form when several components are present.
pub fn render_scalar(c: &ExactScalar) -> String {
    match c.as_monomial() {
        None if c.is_zero() => "0".to_string(),
        None => format!("({c})"),
        Some((q, "")) => q.to_string(),
        Some((q, unit)) if q.is_one() => unit.to_string(),
        Some((q, unit)) if (-q).is_one() => format!("-{unit}"),
        Some((q, unit)) => format!("{q}*{unit}"),
    }
}

fn power(sym: &str, k: u32) -> Option<String> {
    match k {
        0 => None,
        1 => Some(sym.to_string()),
        _ => Some(format!("{sym}^{k}")),
    }
}

fn render_term(c: &ExactScalar, factors: Vec<String>) -> String {
    if factors.is_empty() {
        return render_scalar(c);
    }
    let word = factors.join("*");
    if c.is_one() {
        return word;
    }
    if (-c).is_one() {
        return format!("-{word}");
    }
    format!("{}*{word}", render_scalar(c))
}

fn render_terms(terms: Vec<(&ExactScalar, Vec<String>)>) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    terms.into_iter().map(|(c, f)| render_term(c, f)).collect::<Vec<_>>().join(" + ")
}

/// Text that [`parse_polynomial`] reads back to exactly `p`.
///
/// Terms run by descending total degree, then descending power of `Q`.
/// P-Q terms print as `P^r*Q^m`, Q-P terms as `Q^m*P^r`, and a Weyl
/// polynomial is wrapped whole in `weyl{…}`.
pub fn render(p: &OrderedPolynomial) -> String {
    let terms = p
        .sorted_terms()
        .into_iter()
        .map(|(mono, c)| {
            let q = power("Q", mono.m);
            let pp = power("P", mono.r);
            let factors: Vec<String> = match p.tag() {
                OrderTag::PQ => pp.into_iter().chain(q).collect(),
                _ => q.into_iter().chain(pp).collect(),
            };
            (c, factors)
        })
        .collect();
    let body = render_terms(terms);
    match p.tag() {
        OrderTag::Weyl if !p.is_zero() => format!("weyl{{{body}}}"),
        _ => body,
    }
}

/// `adag^j*a^k` terms (normal order) or `a^k*adag^j` terms (antinormal).
pub fn render_ladder(p: &LadderPolynomial) -> String {
    let mut keys: Vec<_> = p.terms().collect();
    keys.sort_by(|((j1, k1), _), ((j2, k2), _)| (j2 + k2).cmp(&(j1 + k1)).then(j2.cmp(j1)));
    let terms = keys
        .into_iter()
        .map(|(&(j, k), c)| {
            let ad = power("adag", j);
            let a = power("a", k);
            let factors = match p.order() {
                LadderOrder::Normal => ad.into_iter().chain(a).collect(),
                LadderOrder::Antinormal => a.into_iter().chain(ad).collect(),
            };
            (c, factors)
        })
        .collect();
    render_terms(terms)
}

/// Renders any expression in the input grammar (fully parenthesized sums).
pub fn render_expression(e: &FreeExpression) -> String {
    match e {
        FreeExpression::Scalar(c) => {
            let s = render_scalar(c);
            if s.starts_with('-') {
                format!("({s})")
            } else {
                s
            }
        }
        FreeExpression::Symbol(s) => s.as_str().to_string(),
        FreeExpression::Sum(items) if items.is_empty() => "0".to_string(),
        FreeExpression::Sum(items) => {
            format!("({})", items.iter().map(render_expression).collect::<Vec<_>>().join(" + "))
        }
        FreeExpression::Product(items) if items.is_empty() => "1".to_string(),
        FreeExpression::Product(items) => items.iter().map(render_expression).collect::<Vec<_>>().join("*"),
        FreeExpression::Power(base, k) => {
            let inner = render_expression(base);
            match **base {
                FreeExpression::Product(_) => format!("({inner})^{k}"),
                _ => format!("{inner}^{k}"),
            }
        }
        FreeExpression::Block(p) => {
            let body = render(&p.clone().retagged(OrderTag::QP));
            format!("{}{{{body}}}", p.tag().keyword())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordering::{weyl_to_pq, weyl_to_qp};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn commutator_text_rewrites_to_i() {
        let parsed = parse("Q*P - P*Q").unwrap();
        assert!(matches!(parsed, Parsed::Expression(_)));
        assert_eq!(interpret(&parsed, OrderTag::PQ).unwrap(), OrderedPolynomial::constant(OrderTag::PQ, ExactScalar::i()));
    }

    #[test]
    fn weyl_block_parses_to_monomial() {
        let parsed = parse("weyl{Q^2*P}").unwrap();
        assert_eq!(parsed.as_ordered(), Some(&OrderedPolynomial::monomial(OrderTag::Weyl, 2, 1)));
        let commuted = parse("weyl{P*Q^2}").unwrap();
        assert_eq!(parsed, commuted);
    }

    #[test]
    fn scalar_head_is_folded() {
        let Parsed::Expression(FreeExpression::Product(items)) = parse("(1/2 + 3/4*i)*P*Q*P").unwrap() else {
            panic!("expected a product");
        };
        assert_eq!(items[0], FreeExpression::Scalar(ExactScalar::gaussian(q(1, 2), q(3, 4))));
        assert_eq!(items[1..], [FreeExpression::p(), FreeExpression::q(), FreeExpression::p()]);
    }

    #[test]
    fn render_examples() {
        let p = OrderedPolynomial::from_terms(
            OrderTag::PQ,
            [(Monomial::new(1, 1), ExactScalar::one()), (Monomial::ONE, ExactScalar::i())],
        );
        assert_eq!(render(&p), "P*Q + i");
        assert_eq!(render(&OrderedPolynomial::monomial(OrderTag::Weyl, 1, 1)), "weyl{Q*P}");
        assert_eq!(render(&OrderedPolynomial::zero(OrderTag::QP)), "0");
        assert_eq!(render(&weyl_to_pq(2, 2)), "P^2*Q^2 + 2*i*P*Q + -1/2");
        assert_eq!(render(&weyl_to_qp(1, 1)), "Q*P + -1/2*i");
    }

    #[test]
    fn scalar_rendering() {
        assert_eq!(render_scalar(&ExactScalar::from_integer(-2)), "-2");
        assert_eq!(render_scalar(&-ExactScalar::i()), "-i");
        assert_eq!(render_scalar(&(ExactScalar::i() * ExactScalar::sqrt2() * ExactScalar::ratio(1, 2))), "1/2*i*r2");
        assert_eq!(render_scalar(&ExactScalar::gaussian(q(1, 2), q(-3, 4))), "(1/2+-3/4*i)");
    }

    #[test]
    fn round_trip_mixed_coefficient() {
        let p = OrderedPolynomial::from_terms(
            OrderTag::QP,
            [
                (Monomial::new(2, 1), ExactScalar::new(q(1, 3), q(-2, 1), q(0, 1), q(5, 7))),
                (Monomial::new(0, 3), -ExactScalar::sqrt2()),
                (Monomial::ONE, ExactScalar::from_integer(-1)),
            ],
        );
        assert_eq!(parse_polynomial(&render(&p), OrderTag::QP).unwrap(), p);
    }

    #[test]
    fn syntax_errors_carry_spans() {
        let e = parse("Q2").unwrap_err();
        assert_eq!(e.span, 0..2);
        let e = parse("2Q").unwrap_err();
        assert_eq!(e.span, 1..2);
        assert!(e.message.contains("'*'"));
        let e = parse("(Q + P").unwrap_err();
        assert_eq!(e.span, 0..1);
        assert!(e.expected.contains(&"')'"));
        let e = parse("Q +").unwrap_err();
        assert_eq!(e.span, 3..3);
        assert!(parse("1/0").is_err());
        assert!(parse("Q^-1").is_err());
        assert!(parse("Q^65").is_err());
        assert!(parse("weyl {Q}").is_err());
        assert!(parse("").is_err());
        assert!(parse("Q }").is_err());
    }

    #[test]
    fn block_semantic_errors() {
        let e = parse("weyl{Q*a}").unwrap_err();
        assert_eq!(e.span, 7..8);
        assert!(parse("pq{adag}").is_err());
        assert!(parse("pq{qp{Q}}").is_err());
        assert!(parse("weyl{Q^64*Q^64*Q^64*Q^64*Q^64}").is_err());
    }

    #[test]
    fn deep_nesting_is_rejected() {
        let deep = "(".repeat(5000) + "Q" + &")".repeat(5000);
        assert!(parse(&deep).is_err());
        let minus = "-".repeat(5000) + "Q";
        assert!(parse(&minus).is_err());
    }

    #[test]
    fn ladder_expression_is_interpreted() {
        let parsed = parse("a*adag - adag*a").unwrap();
        assert_eq!(interpret(&parsed, OrderTag::PQ).unwrap(), OrderedPolynomial::constant(OrderTag::PQ, ExactScalar::one()));
    }

    #[test]
    fn annotated_error() {
        let text = "Q * ? + P";
        let e = parse(text).unwrap_err();
        assert_eq!(e.annotate(text).lines().last(), Some("      ^"));
    }

    #[test]
    fn expression_rendering_reparses() {
        for text in ["-Q*(P + 2)^3*weyl{Q*P}", "(1/2+i)*a*adag", "Q^2 - r2*P"] {
            let e = parse(text).unwrap().to_expression();
            let again = parse(&render_expression(&e)).unwrap().to_expression();
            assert_eq!(
                interpret(&Parsed::Expression(e), OrderTag::PQ),
                interpret(&Parsed::Expression(again), OrderTag::PQ)
            );
        }
    }
}
