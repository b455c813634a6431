use num_complex::Complex64;
use std::f64::consts::PI;
use weylcalc_core::fockspace::{
    build_qp, coherent_state, evaluate, marginal_check, weyl_quantize, wigner_function, wigner_operator, MarginalAxis,
    MidpointGrid,
};
use weylcalc_core::ordering::{qp_to_pq, weyl_to_pq};
use weylcalc_core::phasexform::{
    extrapolated_monomial_forward, forward_transform, inverse_transform, monomial_forward, monomial_list,
    parseval_check,
};
use weylcalc_core::{CommutativePoly2, FockError, FockMatrix, OrderTag, OrderedPolynomial, PhasePoint, SampledField};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn reordered_monomial_evaluates_to_the_matrix_product() {
    let n = 32;
    let (q, p) = build_qp(n).unwrap();
    let q2 = &q * &q;
    let p2 = &p * &p;
    let direct = &q2 * &p2;
    let m = evaluate(&qp_to_pq(2, 2), n).unwrap();
    assert!(m.max_abs_diff(&direct, n - 4) < 1e-10);
    let qp = evaluate(&OrderedPolynomial::monomial(OrderTag::QP, 2, 2), n).unwrap();
    assert!(qp.max_abs_diff(&direct, n - 4) < 1e-10);
}

#[test]
fn weyl_tag_and_high_degree_are_rejected() {
    assert!(matches!(evaluate(&OrderedPolynomial::monomial(OrderTag::Weyl, 1, 1), 8), Err(FockError::WeylTag)));
    assert!(matches!(
        evaluate(&OrderedPolynomial::monomial(OrderTag::PQ, 5, 5), 8),
        Err(FockError::DegreeTooHigh { .. })
    ));
    assert!(wigner_operator(PhasePoint::new(3.0, 3.0), 16).is_err());
}

#[test]
fn wigner_operator_is_hermitian_with_unit_trace_weight() {
    let pt = PhasePoint::new(0.4, -0.3);
    let delta = wigner_operator(pt, 48).unwrap();
    assert!(delta.hermitian_defect() < 1e-12);
    let vacuum = FockMatrix::projector(&coherent_state(c(0.0, 0.0), 48).unwrap());
    let w = (&vacuum * &delta).trace();
    let expected = (-(pt.q * pt.q + pt.p * pt.p)).exp() / PI;
    assert!((w - c(expected, 0.0)).norm() < 1e-12);
}

#[test]
fn coherent_state_wigner_function_is_a_shifted_gaussian() {
    let beta = c(0.6, -0.4);
    let centre = PhasePoint::from_alpha(beta);
    let rho = FockMatrix::projector(&coherent_state(beta, 40).unwrap());
    let points: Vec<PhasePoint> =
        [(-1.0, 0.5), (0.0, 0.0), (centre.q, centre.p), (1.2, -0.9)].iter().map(|&(q, p)| PhasePoint::new(q, p)).collect();
    let values = wigner_function(&rho, &points).unwrap();
    for (pt, w) in points.iter().zip(values) {
        let expected = (-((pt.q - centre.q).powi(2) + (pt.p - centre.p).powi(2))).exp() / PI;
        assert!((w - c(expected, 0.0)).norm() < 1e-10, "{pt:?}");
    }
}

#[test]
fn first_excited_state_is_negative_at_the_origin() {
    let mut v = vec![c(0.0, 0.0); 12];
    v[1] = c(1.0, 0.0);
    let w = wigner_function(&FockMatrix::projector(&v), &[PhasePoint::new(0.0, 0.0)]).unwrap();
    assert!((w[0] + c(1.0 / PI, 0.0)).norm() < 1e-12);
}

#[test]
fn marginals_reproduce_position_and_momentum_projectors() {
    for axis in [MarginalAxis::Q, MarginalAxis::P] {
        for value in [-1.3, 0.0, 0.7] {
            let (numeric, analytic) = marginal_check(axis, value, 16).unwrap();
            let k = numeric.dim();
            assert!(numeric.max_abs_diff(&analytic, k) < 1e-7, "{axis:?} {value}");
        }
    }
    assert!(marginal_check(MarginalAxis::Q, 5.0, 16).is_err());
}

#[test]
fn weyl_quantization_of_real_symbols_is_hermitian() {
    let grid = MidpointGrid::with_step(-10.0, 10.0, 0.05).unwrap();
    let symbol = CommutativePoly2::monomial(2, 1).add(&CommutativePoly2::monomial(0, 2));
    let op = weyl_quantize(&symbol, &grid, &grid, 6);
    assert!(op.hermitian_defect() < 1e-9);
    let q2p = evaluate(&weyl_to_pq(2, 1), 12).unwrap().block(6);
    let p2 = evaluate(&OrderedPolynomial::monomial(OrderTag::PQ, 0, 2), 12).unwrap().block(6);
    assert!(op.max_abs_diff(&(&q2p + &p2), 3) < 1e-6);
}

fn shifted(q0: f64, p0: f64) -> SampledField {
    SampledField::from_fn((-8.0, 8.0), (-8.0, 8.0), 96, 96, move |q, p| {
        c((-(q - q0).powi(2) - (p - p0).powi(2)).exp(), 0.0)
    })
    .unwrap()
}

#[test]
fn parseval_holds_for_shifted_gaussians() {
    for (q0, p0) in [(0.0, 0.0), (1.0, -0.5), (-1.5, 2.0)] {
        let (lhs, rhs) = parseval_check(&shifted(q0, p0));
        assert!((lhs - 0.5).abs() < 1e-6 && (rhs - 0.5).abs() < 1e-6, "{lhs} {rhs}");
    }
}

#[test]
fn inverse_transform_is_linear() {
    let g1 = forward_transform(&shifted(0.5, 0.0)).field;
    let g2 = forward_transform(&shifted(-1.0, 1.0)).field;
    let (a, b) = (c(0.3, -1.2), c(-2.0, 0.5));
    let lhs = inverse_transform(&g1.combine(a, &g2, b).unwrap()).field;
    let rhs = inverse_transform(&g1).field.combine(a, &inverse_transform(&g2).field, b).unwrap();
    for (x, y) in lhs.values().iter().zip(rhs.values()) {
        assert!((x - y).norm() < 1e-10);
    }
}

#[test]
fn undersized_domains_are_flagged() {
    let wide = SampledField::from_fn((-2.0, 2.0), (-2.0, 2.0), 32, 32, |q, p| c((-(q * q + p * p) / 4.0).exp(), 0.0))
        .unwrap();
    let out = forward_transform(&wide);
    assert!(!out.is_reliable());
    assert!(out.warning.unwrap().boundary_max > 1e-10);
    assert!(forward_transform(&shifted(0.0, 0.0)).is_reliable());
}

#[test]
fn regularized_quadrature_matches_symbolic_images() {
    let points = [(0.0, 0.0), (0.5, -0.3), (-0.8, 0.4)];
    let numeric = extrapolated_monomial_forward(2, &points);
    for (row, (m, r)) in numeric.iter().zip(monomial_list(2)) {
        let symbolic = monomial_forward(m, r);
        for (value, &(q, p)) in row.iter().zip(&points) {
            let expected = symbolic.eval(q, p);
            assert!((value - expected).norm() < 1e-2 * (1.0 + expected.norm()), "({m},{r}) at ({q},{p})");
        }
    }
}
