//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test --test acceptance`.

use std::f64::consts::PI;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use weylcalc_core::exprio::{parse, parse_polynomial, render};
use weylcalc_core::fockspace::{
    build_qp, coherent_state, evaluate, marginal_check, pairwise_sum, wigner_function, FockMatrix, MarginalAxis,
    MidpointGrid, PhasePoint, QuadratureMoments,
};
use weylcalc_core::opalg::{
    commutator, expand, rewrite_to_pq, rewrite_to_qp, FreeExpression, OrderTag, OrderedPolynomial, Symbol,
};
use weylcalc_core::ordering::{
    commutator_closed_form, hermite_two_var, p_plus_q_power, pq_to_qp, pq_to_weyl, qp_to_pq, qp_to_weyl, weyl_to_pq,
    weyl_to_qp, CommutatorVariant,
};
use weylcalc_core::phasexform::{
    derivative_representation, forward_at, forward_transform, gaussian_image, inverse_transform, monomial_forward,
    parseval_check, SampledField,
};
use weylcalc_core::{CommutativePoly2, ExactScalar};

type Outcome = Result<String, String>;

fn word(m: u32, r: u32, p_first: bool) -> FreeExpression {
    let qs = std::iter::repeat_n(Symbol::Q, m as usize);
    let ps = std::iter::repeat_n(Symbol::P, r as usize);
    let w: Vec<Symbol> = if p_first { ps.chain(qs).collect() } else { qs.chain(ps).collect() };
    FreeExpression::word(&w)
}

fn weyl_block(m: u32, r: u32) -> FreeExpression {
    FreeExpression::Block(OrderedPolynomial::monomial(OrderTag::Weyl, m, r))
}

/// Every closed-form conversion for `m, r ≤ 6`, paired with the oracle.
fn conversion_table() -> Vec<(String, OrderedPolynomial, OrderedPolynomial)> {
    let mut out = Vec::new();
    for m in 0..=6 {
        for r in 0..=6 {
            // Weyl side: ground truth is the symmetrized word sum (1/2)^m Σ C(m,l) Q^{m-l} P^r Q^l.
            out.push((format!("weyl_to_pq({m},{r})"), weyl_to_pq(m, r), rewrite_to_pq(&weyl_block(m, r)).unwrap()));
            out.push((format!("weyl_to_qp({m},{r})"), weyl_to_qp(m, r), rewrite_to_qp(&weyl_block(m, r)).unwrap()));
            // Weyl targets: expand the result's symmetrized words and compare operators.
            let qp_w = qp_to_weyl(m, r);
            out.push((
                format!("qp_to_weyl({m},{r})"),
                rewrite_to_pq(&FreeExpression::Block(qp_w.clone())).unwrap(),
                rewrite_to_pq(&word(m, r, false)).unwrap(),
            ));
            let pq_w = pq_to_weyl(m, r);
            out.push((
                format!("pq_to_weyl({m},{r})"),
                rewrite_to_pq(&FreeExpression::Block(pq_w.clone())).unwrap(),
                rewrite_to_pq(&word(m, r, true)).unwrap(),
            ));
            out.push((format!("qp_to_pq({m},{r})"), qp_to_pq(m, r), rewrite_to_pq(&word(m, r, false)).unwrap()));
            out.push((format!("pq_to_qp({m},{r})"), pq_to_qp(m, r), rewrite_to_qp(&word(m, r, true)).unwrap()));
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let table = conversion_table();
    let bad: Vec<_> = table.iter().filter(|(_, a, b)| a != b).map(|(n, _, _)| n.clone()).collect();
    if !bad.is_empty() {
        return Err(format!("{} mismatches, first {}", bad.len(), bad[0]));
    }
    Ok(format!("{} conversions exact", table.len()))
}

fn criterion_2() -> Outcome {
    let qp_case = commutator(&FreeExpression::q(), &FreeExpression::p()).unwrap();
    if qp_case != OrderedPolynomial::constant(OrderTag::PQ, ExactScalar::i()) {
        return Err(format!("[Q,P] = {}", render(&qp_case)));
    }
    let mut checked = 0;
    for m in 0..=6 {
        for r in 0..=6 {
            let brute = commutator(&word(m, 0, false), &word(0, r, false)).unwrap();
            let pq = commutator_closed_form(m, r, CommutatorVariant::PQ);
            let qp = commutator_closed_form(m, r, CommutatorVariant::QP);
            if pq != brute {
                return Err(format!("PQ form differs at ({m},{r})"));
            }
            if rewrite_to_pq(&qp.to_expression()).unwrap() != brute {
                return Err(format!("QP form differs at ({m},{r})"));
            }
            let brute_qp = rewrite_to_qp(&(word(m, 0, false) * word(0, r, false) - word(0, r, false) * word(m, 0, false))).unwrap();
            if qp != brute_qp {
                return Err(format!("QP form differs from Q-P rewriting at ({m},{r})"));
            }
            checked += 1;
        }
    }
    Ok(format!("[Q,P] = i; {checked} pairs, both closed forms exact"))
}

fn criterion_3() -> Outcome {
    for n in 0..=8 {
        let sum = (FreeExpression::p() + FreeExpression::q()).pow(n);
        let pq = rewrite_to_pq(&sum).unwrap();
        let qp = rewrite_to_qp(&sum).unwrap();
        if p_plus_q_power(n, OrderTag::PQ) != pq {
            return Err(format!("P-Q form differs at n={n}"));
        }
        if p_plus_q_power(n, OrderTag::QP) != qp {
            return Err(format!("Q-P form differs at n={n}"));
        }
        let weyl = p_plus_q_power(n, OrderTag::Weyl);
        if rewrite_to_pq(&FreeExpression::Block(weyl)).unwrap() != pq {
            return Err(format!("Weyl form differs at n={n}"));
        }
    }
    Ok("n = 0..=8 in all three orderings".into())
}

fn criterion_4() -> Outcome {
    for m in 0..=8 {
        for r in 0..=8 {
            if derivative_representation(m, r) != monomial_forward(m, r) {
                return Err(format!("derivative form differs at ({m},{r})"));
            }
        }
    }
    let one = ExactScalar::one();
    let h11 = CommutativePoly2::from_terms([((1, 1), one.clone()), ((0, 0), -one.clone())]);
    let h21 = CommutativePoly2::from_terms([((2, 1), one.clone()), ((1, 0), ExactScalar::from_integer(-2))]);
    if hermite_two_var(1, 1) != h11 || hermite_two_var(2, 1) != h21 {
        return Err("H_{1,1} or H_{2,1} wrong".into());
    }
    Ok("81 pairs exact; H11 = ts - 1, H21 = t^2 s - 2t".into())
}

fn criterion_5() -> Outcome {
    let mut worst = 0.0f64;
    for axis in [MarginalAxis::Q, MarginalAxis::P] {
        for x in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            let (numeric, analytic) = marginal_check(axis, x, 64).map_err(|e| e.to_string())?;
            if numeric.dim() != 8 {
                return Err(format!("block is {}x{}", numeric.dim(), numeric.dim()));
            }
            worst = worst.max(numeric.max_abs_diff(&analytic, 8));
        }
    }
    let (origin, _) = marginal_check(MarginalAxis::Q, 0.0, 64).map_err(|e| e.to_string())?;
    let origin_err = (origin.get(0, 0) - Complex64::new(1.0 / PI.sqrt(), 0.0)).norm();
    if worst >= 1e-6 || origin_err >= 1e-6 {
        return Err(format!("max error {worst:.3e}, (0,0) error {origin_err:.3e}"));
    }
    Ok(format!("max error {worst:.2e}; (0,0) at 0 = {:.6}", origin.get(0, 0).re))
}

fn criterion_6() -> Outcome {
    let grid = MidpointGrid::with_step(-7.0, 7.0, 0.02).map_err(|e| e.to_string())?;
    let moments = QuadratureMoments::compute(4, &grid, &grid, 8);
    let (q, p) = build_qp(64).map_err(|e| e.to_string())?;
    let mut worst_weyl = 0.0f64;
    for d in 0..=4 {
        for r in 0..=d {
            let m = d - r;
            let numeric = moments.quantize(&CommutativePoly2::monomial(m, r)).map_err(|e| e.to_string())?;
            let exact = evaluate(&weyl_to_pq(m, r), 64).map_err(|e| e.to_string())?;
            worst_weyl = worst_weyl.max(numeric.max_abs_diff(&exact, 8));
        }
    }
    let mut worst_smeared = 0.0f64;
    for d in 0..=3 {
        for r in 0..=d {
            let m = d - r;
            let symbol = CommutativePoly2::from_ordered(&pq_to_weyl(m, r));
            let numeric = moments.quantize(&symbol).map_err(|e| e.to_string())?;
            let mut direct = FockMatrix::identity(64);
            for _ in 0..r {
                direct = &direct * &p;
            }
            for _ in 0..m {
                direct = &direct * &q;
            }
            worst_smeared = worst_smeared.max(numeric.max_abs_diff(&direct, 8));
        }
    }
    if worst_weyl >= 1e-3 || worst_smeared >= 1e-3 {
        return Err(format!("Weyl quantization {worst_weyl:.3e}, smeared transform {worst_smeared:.3e}"));
    }
    Ok(format!("Weyl quantization {worst_weyl:.2e}, smeared transform {worst_smeared:.2e}"))
}

fn criterion_7() -> Outcome {
    let betas = [
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, -1.0),
        Complex64::new(0.6, 0.8),
        Complex64::new(-0.5, 0.3),
    ];
    let window = MidpointGrid::with_step(-3.0, 3.0, 0.1).map_err(|e| e.to_string())?;
    let mut window_pts: Vec<PhasePoint> =
        window.nodes().flat_map(|q| window.nodes().map(move |p| PhasePoint::new(q, p))).collect();
    window_pts.extend([PhasePoint::new(-3.0, -3.0), PhasePoint::new(3.0, 3.0), PhasePoint::new(0.0, 0.0)]);
    let total = MidpointGrid::with_step(-6.0, 6.0, 0.05).map_err(|e| e.to_string())?;
    let total_pts: Vec<PhasePoint> =
        total.nodes().flat_map(|q| total.nodes().map(move |p| PhasePoint::new(q, p))).collect();
    let mut worst = 0.0f64;
    let mut worst_norm = 0.0f64;
    for beta in betas {
        let rho = FockMatrix::projector(&coherent_state(beta, 64).map_err(|e| e.to_string())?);
        let (qb, pb) = (beta.re * 2f64.sqrt(), beta.im * 2f64.sqrt());
        let w = wigner_function(&rho, &window_pts).map_err(|e| e.to_string())?;
        for (pt, v) in window_pts.iter().zip(&w) {
            let exact = (-(pt.q - qb).powi(2) - (pt.p - pb).powi(2)).exp() / PI;
            worst = worst.max((v - exact).norm());
        }
        let w = wigner_function(&rho, &total_pts).map_err(|e| e.to_string())?;
        let integral = pairwise_sum(&w) * (total.step() * total.step());
        worst_norm = worst_norm.max((integral - 1.0).norm());
    }
    if worst >= 1e-6 || worst_norm >= 1e-4 {
        return Err(format!("pointwise {worst:.3e}, normalization {worst_norm:.3e}"));
    }
    Ok(format!("pointwise {worst:.2e}, |integral - 1| {worst_norm:.2e}"))
}

fn criterion_8() -> Outcome {
    let h = SampledField::gaussian(8.0, 400).map_err(|e| e.to_string())?;
    let g = forward_transform(&h);
    if !g.is_reliable() {
        return Err("Gaussian flagged as not decaying".into());
    }
    let mut pair = 0.0f64;
    for iq in 0..h.nq() {
        for ip in 0..h.np() {
            pair = pair.max((g.field.get(iq, ip) - gaussian_image(h.q(iq), h.p(ip))).norm());
        }
    }
    let at_origin = (forward_at(&h, 0.0, 0.0) - Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)).norm();
    let at_one = (forward_at(&h, 1.0, 1.0) - Complex64::from_polar((-1f64).exp() * std::f64::consts::FRAC_1_SQRT_2, 1.0)).norm();
    pair = pair.max(at_origin).max(at_one);

    let analytic_g = SampledField::from_fn(h.q_range(), h.p_range(), 400, 400, gaussian_image).map_err(|e| e.to_string())?;
    let from_analytic = inverse_transform(&analytic_g).field;
    let round = inverse_transform(&g.field).field;
    let mut trip = 0.0f64;
    for iq in 100..300 {
        for ip in 100..300 {
            trip = trip.max((round.get(iq, ip) - h.get(iq, ip)).norm());
            trip = trip.max((from_analytic.get(iq, ip) - h.get(iq, ip)).norm());
        }
    }
    let (lhs, rhs) = parseval_check(&h);
    let shifted = SampledField::from_fn((-8.0, 8.0), (-8.0, 8.0), 400, 400, |q, p| {
        Complex64::new((-(p - 1.0).powi(2) - (q + 1.0).powi(2)).exp(), 0.0)
    })
    .map_err(|e| e.to_string())?;
    let (slhs, srhs) = parseval_check(&shifted);
    let parseval = [lhs, rhs, slhs, srhs].iter().map(|v| (v - 0.5).abs()).fold(0.0, f64::max);
    if pair >= 1e-6 || trip >= 1e-5 || parseval >= 1e-5 {
        return Err(format!("pair {pair:.3e}, round trip {trip:.3e}, Parseval {parseval:.3e}"));
    }
    Ok(format!("pair {pair:.2e}, round trip {trip:.2e}, Parseval lhs {lhs:.8} rhs {rhs:.8}"))
}

fn random_input(rng: &mut StdRng) -> String {
    const PIECES: &[&str] = &[
        "Q", "P", "a", "adag", "i", "r2", "1", "2", "17", "1/2", "3/0", "+", "-", "*", "^", "^2", "(", ")", "pq{", "qp{",
        "weyl{", "}", " ", "{", "/", "Q2", "x", "é", "\u{0}", "99999999999999999999",
    ];
    let len = rng.gen_range(0..24);
    let mut s = String::new();
    for _ in 0..len {
        if rng.gen_bool(0.1) {
            let bytes: Vec<u8> = (0..rng.gen_range(1..4)).map(|_| rng.gen()).collect();
            s.push_str(&String::from_utf8_lossy(&bytes));
        } else {
            s.push_str(PIECES[rng.gen_range(0..PIECES.len())]);
        }
    }
    s
}

fn criterion_9() -> Outcome {
    let table = conversion_table();
    let mut polys: Vec<OrderedPolynomial> = Vec::new();
    for m in 0..=6 {
        for r in 0..=6 {
            polys.extend([weyl_to_pq(m, r), weyl_to_qp(m, r), qp_to_weyl(m, r), pq_to_weyl(m, r), qp_to_pq(m, r), pq_to_qp(m, r)]);
        }
    }
    polys.extend(table.into_iter().map(|(_, a, _)| a));
    for p in &polys {
        let text = render(p);
        let back = parse_polynomial(&text, p.tag()).map_err(|e| format!("{text:?}: {e}"))?;
        if &back != p {
            return Err(format!("round trip changed {text:?}"));
        }
        if p.tag() == OrderTag::Weyl && !p.is_zero() && parse(&text).ok().and_then(|x| x.as_ordered().cloned()).as_ref() != Some(p) {
            return Err(format!("{text:?} not read back as a Weyl polynomial"));
        }
    }
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let (mut ok, mut rejected) = (0usize, 0usize);
    for _ in 0..100_000 {
        let text = random_input(&mut rng);
        match panic::catch_unwind(|| parse(&text).map(|p| p.to_expression())) {
            Ok(Ok(expr)) => {
                ok += 1;
                let _ = expand(&expr);
            }
            Ok(Err(e)) => {
                if e.span.start > e.span.end || e.span.end > text.len() {
                    return Err(format!("span {:?} outside {text:?}", e.span));
                }
                rejected += 1;
            }
            Err(_) => return Err(format!("parser panicked on {text:?}")),
        }
    }
    Ok(format!("{} polynomials round-trip; fuzz: {ok} parsed, {rejected} rejected, 0 panics", polys.len()))
}

fn main() -> ExitCode {
    panic::set_hook(Box::new(|_| {}));
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("exact ordering equivalence", criterion_1),
        ("commutator identity", criterion_2),
        ("(P+Q)^n expansions", criterion_3),
        ("Hermite/derivative consistency", criterion_4),
        ("Wigner marginals", criterion_5),
        ("Weyl quantization and smeared transform", criterion_6),
        ("coherent-state Wigner function", criterion_7),
        ("phase-space transform", criterion_8),
        ("parser round trip and fuzz", criterion_9),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] criterion {}: {name}: {detail} ({secs:.1} s)", k + 1),
            Err(detail) => {
                failures += 1;
                println!("[FAIL] criterion {}: {name}: {detail} ({secs:.1} s)", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
