//! Verification suites run by `weylcalc verify`.
//!
//! Exact checks compare closed forms against the word-rewriting oracle;
//! numeric checks report the worst deviation and where it occurred.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use weylcalc_core::exprio::render;
use weylcalc_core::fockspace::{
    build_qp, coherent_state, evaluate, marginal_check, pairwise_sum, wigner_function, wigner_operator, MarginalAxis,
    MidpointGrid, QuadratureMoments,
};
use weylcalc_core::opalg::{commutator, rewrite_to_pq, rewrite_to_qp, Symbol};
use weylcalc_core::ordering::{
    commutator_closed_form, convert, hermite_two_var, hermite_weyl_symbol, p_plus_q_power, pq_to_qp, pq_to_weyl,
    qp_to_pq, qp_to_weyl, weyl_to_pq, weyl_to_qp, CommutatorVariant,
};
use weylcalc_core::phasexform::{
    derivative_representation, extrapolated_monomial_forward, forward_transform, gaussian_image, inverse_transform,
    monomial_forward, monomial_inverse, monomial_list, parseval_check,
};
use weylcalc_core::{
    CommutativePoly2, ExactScalar, FockMatrix, FreeExpression, OrderTag, OrderedPolynomial, PhasePoint, SampledField,
};

use crate::error::CliError;

pub const MAX_DEGREE_LIMIT: u32 = 8;
pub const MAX_DIM_LIMIT: usize = 128;
pub const MIN_DIM: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Orderings,
    Commutators,
    Hermite,
    Wigner,
    Transform,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Orderings => "orderings",
            Suite::Commutators => "commutators",
            Suite::Hermite => "hermite",
            Suite::Wigner => "wigner",
            Suite::Transform => "transform",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteParams {
    pub max_degree: u32,
    pub dim: usize,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams { max_degree: 6, dim: 64 }
    }
}

impl SuiteParams {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.max_degree > MAX_DEGREE_LIMIT {
            return Err(CliError::Guard(format!("--max-degree {} exceeds {MAX_DEGREE_LIMIT}", self.max_degree)));
        }
        if self.dim > MAX_DIM_LIMIT || self.dim < MIN_DIM {
            return Err(CliError::Guard(format!("--dim {} outside {MIN_DIM}..={MAX_DIM_LIMIT}", self.dim)));
        }
        Ok(())
    }
}

/// The first failing case of a check, or the worst case of a numeric one.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub case: String,
    pub computed: Value,
    pub oracle: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub kind: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub mismatches: usize,
    pub max_error: Option<f64>,
    pub tolerance: Option<f64>,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub max_degree: u32,
    pub dim: usize,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let verdict = if c.passed { "PASS" } else { "FAIL" };
            let metric = match (c.max_error, c.tolerance) {
                (Some(e), Some(t)) => format!("max error {e:.3e} (tolerance {t:.0e})"),
                _ => format!("{} mismatches", c.mismatches),
            };
            let noun = if c.cases == 1 { "case" } else { "cases" };
            out.push_str(&format!("[{verdict}] {}: {} {noun}, {metric}\n", c.name, c.cases));
            if let (false, Some(w)) = (c.passed, &c.witness) {
                out.push_str(&format!("       at {}: computed {} vs oracle {}\n", w.case, w.computed, w.oracle));
            }
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        out.push_str(&format!("{}: {passed} of {} checks passed", self.suite, self.checks.len()));
        out
    }
}

struct Exact {
    name: String,
    cases: usize,
    mismatches: usize,
    witness: Option<Witness>,
}

impl Exact {
    fn new(name: impl Into<String>) -> Self {
        Exact { name: name.into(), cases: 0, mismatches: 0, witness: None }
    }

    fn compare(&mut self, case: impl FnOnce() -> String, computed: &OrderedPolynomial, oracle: &OrderedPolynomial) {
        self.cases += 1;
        if computed != oracle {
            self.mismatches += 1;
            if self.witness.is_none() {
                self.witness = Some(Witness { case: case(), computed: json!(render(computed)), oracle: json!(render(oracle)) });
            }
        }
    }

    fn compare_poly2(&mut self, case: impl FnOnce() -> String, computed: &CommutativePoly2, oracle: &CommutativePoly2) {
        self.cases += 1;
        if computed != oracle {
            self.mismatches += 1;
            if self.witness.is_none() {
                self.witness =
                    Some(Witness { case: case(), computed: json!(computed.to_string()), oracle: json!(oracle.to_string()) });
            }
        }
    }

    fn finish(self) -> Check {
        Check {
            name: self.name,
            kind: "exact",
            passed: self.mismatches == 0,
            cases: self.cases,
            mismatches: self.mismatches,
            max_error: None,
            tolerance: None,
            witness: self.witness,
        }
    }
}

struct Numeric {
    name: String,
    tolerance: f64,
    cases: usize,
    mismatches: usize,
    worst: f64,
    witness: Option<Witness>,
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

impl Numeric {
    fn new(name: impl Into<String>, tolerance: f64) -> Self {
        Numeric { name: name.into(), tolerance, cases: 0, mismatches: 0, worst: 0.0, witness: None }
    }

    fn compare(&mut self, case: impl FnOnce() -> String, computed: Complex64, oracle: Complex64) {
        self.cases += 1;
        let err = (computed - oracle).norm();
        let bad = !(err < self.tolerance);
        if bad {
            self.mismatches += 1;
        }
        if !(err <= self.worst) || self.witness.is_none() {
            self.worst = if err.is_nan() { f64::INFINITY } else { err.max(self.worst) };
            self.witness = Some(Witness { case: case(), computed: complex_json(computed), oracle: complex_json(oracle) });
        }
    }

    fn compare_matrices(&mut self, case: &str, computed: &FockMatrix, oracle: &FockMatrix, k: usize) {
        for i in 0..k {
            for j in 0..k {
                self.compare(|| format!("{case} entry ({i},{j})"), computed.get(i, j), oracle.get(i, j));
            }
        }
    }

    fn finish(self) -> Check {
        Check {
            name: self.name,
            kind: "numeric",
            passed: self.mismatches == 0,
            cases: self.cases,
            mismatches: self.mismatches,
            max_error: Some(self.worst),
            tolerance: Some(self.tolerance),
            witness: self.witness,
        }
    }
}

pub fn run(suite: Suite, params: SuiteParams) -> Result<SuiteReport, CliError> {
    params.validate()?;
    let checks = match suite {
        Suite::Orderings => orderings(params.max_degree),
        Suite::Commutators => commutators(params.max_degree)?,
        Suite::Hermite => hermite(params.max_degree),
        Suite::Wigner => wigner(params.max_degree, params.dim)?,
        Suite::Transform => transform(params.max_degree)?,
    };
    Ok(SuiteReport {
        suite: suite.name(),
        max_degree: params.max_degree,
        dim: params.dim,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

fn word(m: u32, r: u32, p_first: bool) -> FreeExpression {
    let qs = std::iter::repeat_n(Symbol::Q, m as usize);
    let ps = std::iter::repeat_n(Symbol::P, r as usize);
    let w: Vec<Symbol> = if p_first { ps.chain(qs).collect() } else { qs.chain(ps).collect() };
    FreeExpression::word(&w)
}

fn block(p: OrderedPolynomial) -> FreeExpression {
    FreeExpression::Block(p)
}

fn pairs(d: u32) -> impl Iterator<Item = (u32, u32)> {
    (0..=d).flat_map(move |m| (0..=d).map(move |r| (m, r)))
}

fn orderings(d: u32) -> Vec<Check> {
    let mut w2pq = Exact::new("Weyl to P-Q vs symmetrized-word rewriting");
    let mut w2qp = Exact::new("Weyl to Q-P vs symmetrized-word rewriting");
    let mut qp2w = Exact::new("Q-P to Weyl vs rewriting");
    let mut pq2w = Exact::new("P-Q to Weyl vs rewriting");
    let mut qp2pq = Exact::new("Q-P to P-Q vs rewriting");
    let mut pq2qp = Exact::new("P-Q to Q-P vs rewriting");
    let mut trip = Exact::new("conversion round trips over all tag pairs");
    for (m, r) in pairs(d) {
        let case = || format!("({m},{r})");
        let weyl = OrderedPolynomial::monomial(OrderTag::Weyl, m, r);
        let qp_oracle = rewrite_to_pq(&word(m, r, false)).expect("word");
        let pq_oracle = rewrite_to_pq(&word(m, r, true)).expect("word");
        w2pq.compare(case, &weyl_to_pq(m, r), &rewrite_to_pq(&block(weyl.clone())).expect("block"));
        w2qp.compare(case, &weyl_to_qp(m, r), &rewrite_to_qp(&block(weyl)).expect("block"));
        qp2w.compare(case, &rewrite_to_pq(&block(qp_to_weyl(m, r))).expect("block"), &qp_oracle);
        pq2w.compare(case, &rewrite_to_pq(&block(pq_to_weyl(m, r))).expect("block"), &pq_oracle);
        qp2pq.compare(case, &qp_to_pq(m, r), &qp_oracle);
        pq2qp.compare(case, &pq_to_qp(m, r), &rewrite_to_qp(&word(m, r, true)).expect("word"));
        for from in OrderTag::ALL {
            for to in OrderTag::ALL {
                let x = OrderedPolynomial::monomial(from, m, r);
                trip.compare(
                    || format!("({m},{r}) {} -> {} -> {}", from.keyword(), to.keyword(), from.keyword()),
                    &convert(&convert(&x, to), from),
                    &x,
                );
            }
        }
    }
    [w2pq, w2qp, qp2w, pq2w, qp2pq, pq2qp, trip].into_iter().map(Exact::finish).collect()
}

fn commutators(d: u32) -> Result<Vec<Check>, CliError> {
    let mut basic = Exact::new("[Q,P] = i");
    basic.compare(
        || "[Q,P]".into(),
        &commutator(&FreeExpression::q(), &FreeExpression::p())?,
        &OrderedPolynomial::constant(OrderTag::PQ, ExactScalar::i()),
    );
    let mut pq = Exact::new("[Q^m,P^r] P-Q closed form vs rewriting");
    let mut qp = Exact::new("[Q^m,P^r] Q-P closed form vs rewriting");
    for (m, r) in pairs(d) {
        let case = || format!("({m},{r})");
        let x = word(m, 0, false);
        let y = word(0, r, false);
        pq.compare(case, &commutator_closed_form(m, r, CommutatorVariant::PQ), &commutator(&x, &y)?);
        let oracle_qp = rewrite_to_qp(&(x.clone() * y.clone() - y * x))?;
        qp.compare(case, &commutator_closed_form(m, r, CommutatorVariant::QP), &oracle_qp);
    }
    let mut power = [
        Exact::new("(P+Q)^n in P-Q order"),
        Exact::new("(P+Q)^n in Q-P order"),
        Exact::new("(P+Q)^n in Weyl order"),
    ];
    for n in 0..=d {
        let sum = (FreeExpression::p() + FreeExpression::q()).pow(n);
        let oracle = rewrite_to_pq(&sum)?;
        let case = || format!("n = {n}");
        power[0].compare(case, &p_plus_q_power(n, OrderTag::PQ), &oracle);
        power[1].compare(case, &p_plus_q_power(n, OrderTag::QP), &rewrite_to_qp(&sum)?);
        power[2].compare(case, &rewrite_to_pq(&block(p_plus_q_power(n, OrderTag::Weyl)))?, &oracle);
    }
    let mut out = vec![basic.finish(), pq.finish(), qp.finish()];
    out.extend(power.into_iter().map(Exact::finish));
    Ok(out)
}

fn hermite(d: u32) -> Vec<Check> {
    let mut low = Exact::new("H_{1,1} = ts - 1 and H_{2,1} = t^2 s - 2t");
    let one = ExactScalar::one();
    low.compare_poly2(
        || "H_{1,1}".into(),
        &hermite_two_var(1, 1),
        &CommutativePoly2::from_terms([((1, 1), one.clone()), ((0, 0), -one.clone())]),
    );
    low.compare_poly2(
        || "H_{2,1}".into(),
        &hermite_two_var(2, 1),
        &CommutativePoly2::from_terms([((2, 1), one), ((1, 0), ExactScalar::from_integer(-2))]),
    );
    let mut qp = Exact::new("Hermite form of Q^m P^r vs Weyl series");
    let mut pq = Exact::new("Hermite form of P^r Q^m vs Weyl series");
    let mut deriv = Exact::new("derivative representation vs Hermite image");
    let mut inverse = Exact::new("inverse image undoes forward image");
    for (m, r) in pairs(d) {
        let case = || format!("({m},{r})");
        qp.compare_poly2(
            case,
            &hermite_weyl_symbol(m, r, OrderTag::QP).expect("QP tag"),
            &CommutativePoly2::from_ordered(&qp_to_weyl(m, r)),
        );
        pq.compare_poly2(
            case,
            &hermite_weyl_symbol(m, r, OrderTag::PQ).expect("PQ tag"),
            &CommutativePoly2::from_ordered(&pq_to_weyl(m, r)),
        );
        deriv.compare_poly2(case, &derivative_representation(m, r), &monomial_forward(m, r));
        inverse.compare_poly2(case, &monomial_inverse(m, r), &CommutativePoly2::monomial(m, r));
    }
    [low, qp, pq, deriv, inverse].into_iter().map(Exact::finish).collect()
}

fn wigner(d: u32, n: usize) -> Result<Vec<Check>, CliError> {
    let block_size = 8.min(n);
    let mut herm = Numeric::new("Wigner operator is Hermitian", 1e-12);
    let mut parity = Numeric::new("Wigner operator at the origin is parity/pi", 1e-12);
    let delta0 = wigner_operator(PhasePoint::new(0.0, 0.0), n)?;
    let parity_matrix =
        FockMatrix::diagonal(&(0..n).map(|k| Complex64::new(if k % 2 == 0 { 1.0 } else { -1.0 } / PI, 0.0)).collect::<Vec<_>>());
    parity.compare_matrices("origin", &delta0, &parity_matrix, block_size);
    for (q, p) in [(0.5, -0.3), (1.0, 1.0), (-1.2, 0.4)] {
        let delta = wigner_operator(PhasePoint::new(q, p), n)?;
        herm.compare_matrices(&format!("({q},{p})"), &delta, &delta.adjoint(), delta.reliable_dim());
    }

    let mut marginal_q = Numeric::new("q-marginal equals |q><q|", 1e-6);
    let mut marginal_p = Numeric::new("p-marginal equals |p><p|", 1e-6);
    for x in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        let (numeric, analytic) = marginal_check(MarginalAxis::Q, x, n)?;
        marginal_q.compare_matrices(&format!("q = {x}"), &numeric, &analytic, numeric.dim());
        let (numeric, analytic) = marginal_check(MarginalAxis::P, x, n)?;
        marginal_p.compare_matrices(&format!("p = {x}"), &numeric, &analytic, numeric.dim());
    }

    let grid = MidpointGrid::with_step(-7.0, 7.0, 0.02)?;
    let quant_degree = d.min(4);
    let moments = QuadratureMoments::compute(quant_degree, &grid, &grid, block_size);
    let mut quant = Numeric::new("Weyl quantization of q^m p^r", 1e-3);
    for (m, r) in pairs(quant_degree).filter(|(m, r)| m + r <= quant_degree) {
        let numeric = moments.quantize(&CommutativePoly2::monomial(m, r))?;
        let exact = evaluate(&weyl_to_pq(m, r), n)?;
        quant.compare_matrices(&format!("({m},{r})"), &numeric, &exact, block_size.min(exact.reliable_dim()));
    }
    let (qm, pm) = build_qp(n)?;
    let mut smeared = Numeric::new("Weyl symbol of P^r Q^m quantizes back", 1e-3);
    let smeared_degree = d.min(3);
    for (m, r) in pairs(smeared_degree).filter(|(m, r)| m + r <= smeared_degree) {
        let numeric = moments.quantize(&CommutativePoly2::from_ordered(&pq_to_weyl(m, r)))?;
        let mut direct = FockMatrix::identity(n);
        for _ in 0..r {
            direct = &direct * &pm;
        }
        for _ in 0..m {
            direct = &direct * &qm;
        }
        smeared.compare_matrices(&format!("({m},{r})"), &numeric, &direct, block_size.min(n - (m + r) as usize));
    }

    let mut coherent = Numeric::new("coherent-state Wigner function", 1e-6);
    let mut norm = Numeric::new("coherent-state Wigner function integrates to 1", 1e-4);
    let window = MidpointGrid::with_step(-3.0, 3.0, 0.25)?;
    let window_pts: Vec<PhasePoint> = window.nodes().flat_map(|q| window.nodes().map(move |p| PhasePoint::new(q, p))).collect();
    let total = MidpointGrid::with_step(-6.0, 6.0, 0.1)?;
    let total_pts: Vec<PhasePoint> = total.nodes().flat_map(|q| total.nodes().map(move |p| PhasePoint::new(q, p))).collect();
    for beta in [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.6, 0.8), Complex64::new(-0.5, 0.3)] {
        let rho = FockMatrix::projector(&coherent_state(beta, n)?);
        let centre = PhasePoint::from_alpha(beta);
        let w = wigner_function(&rho, &window_pts)?;
        for (pt, v) in window_pts.iter().zip(&w) {
            let exact = (-(pt.q - centre.q).powi(2) - (pt.p - centre.p).powi(2)).exp() / PI;
            coherent.compare(|| format!("beta = {beta}, ({:.3},{:.3})", pt.q, pt.p), *v, Complex64::new(exact, 0.0));
        }
        let w = wigner_function(&rho, &total_pts)?;
        let integral = pairwise_sum(&w) * (total.step() * total.step());
        norm.compare(|| format!("beta = {beta}"), integral, Complex64::new(1.0, 0.0));
    }
    Ok([herm, parity, marginal_q, marginal_p, quant, smeared, coherent, norm].into_iter().map(Numeric::finish).collect())
}

fn transform(d: u32) -> Result<Vec<Check>, CliError> {
    let h = SampledField::gaussian(8.0, 400)?;
    let g = forward_transform(&h);
    let mut pair = Numeric::new("Gaussian maps to its closed-form image", 1e-6);
    for iq in (0..h.nq()).step_by(7) {
        for ip in (0..h.np()).step_by(7) {
            pair.compare(
                || format!("({:.4},{:.4})", h.q(iq), h.p(ip)),
                g.field.get(iq, ip),
                gaussian_image(h.q(iq), h.p(ip)),
            );
        }
    }
    let mut domain = Exact::new("Gaussian on [-8,8]^2 is not flagged as truncated");
    domain.cases += 1;
    if !g.is_reliable() {
        domain.mismatches += 1;
        domain.witness = Some(Witness {
            case: "boundary".into(),
            computed: json!(g.warning.map(|w| w.boundary_max)),
            oracle: json!(0.0),
        });
    }

    let round = inverse_transform(&g.field).field;
    let mut trip = Numeric::new("inverse recovers the Gaussian on the central region", 1e-5);
    for iq in (100..300).step_by(3) {
        for ip in (100..300).step_by(3) {
            trip.compare(|| format!("({:.4},{:.4})", h.q(iq), h.p(ip)), round.get(iq, ip), h.get(iq, ip));
        }
    }

    let mut parseval = Numeric::new("Parseval identity for Gaussians", 1e-5);
    for (q0, p0) in [(0.0, 0.0), (-1.0, 1.0), (1.5, -0.5)] {
        let f = SampledField::from_fn((-8.0, 8.0), (-8.0, 8.0), 400, 400, |q, p| {
            Complex64::new((-(q - q0).powi(2) - (p - p0).powi(2)).exp(), 0.0)
        })?;
        let (lhs, rhs) = parseval_check(&f);
        parseval.compare(|| format!("centre ({q0},{p0}), field side"), Complex64::new(lhs, 0.0), Complex64::new(0.5, 0.0));
        parseval.compare(|| format!("centre ({q0},{p0}), image side"), Complex64::new(rhs, 0.0), Complex64::new(0.5, 0.0));
    }

    let symbolic_degree = d.min(2);
    let points = [(0.0, 0.0), (0.5, -0.3), (-0.8, 0.4), (1.0, 1.0)];
    let numeric = extrapolated_monomial_forward(symbolic_degree, &points);
    let mut symbolic = Numeric::new("regularized quadrature vs symbolic monomial images", 1e-2);
    for (row, (m, r)) in numeric.iter().zip(monomial_list(symbolic_degree)) {
        let exact = monomial_forward(m, r);
        for (value, &(q, p)) in row.iter().zip(&points) {
            let expected = exact.eval(q, p);
            let scale = 1.0 + expected.norm();
            symbolic.compare(|| format!("q^{m} p^{r} at ({q},{p})"), value / scale, expected / scale);
        }
    }
    Ok(vec![pair.finish(), domain.finish(), trip.finish(), parseval.finish(), symbolic.finish()])
}
