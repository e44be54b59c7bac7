//! Tests for truncation-order selection (a-priori least-term and
//! a-posteriori oracle argmin) and the norm-growth fit.

mod common;

use common::*;
use rug::Float;
use std::sync::OnceLock;
use wkbsolve::expr::Expr;
use wkbsolve::oracle::{self, OracleMethod, OracleSolution};
use wkbsolve::scalar::Scalar;
use wkbsolve::truncation::{
    error_curve, fit_norm_growth, least_term_n, oracle_optimal_n, SelectionMode,
};
use wkbsolve::wkb::{IVProblem, PhaseTable};
use wkbsolve::{Error, Precision};

fn table_for(prec: Precision, a: &str, lo: i64, hi: i64, n_max: usize, m: usize) -> PhaseTable {
    let a = Expr::parse(a).unwrap();
    PhaseTable::build(
        &a,
        &prec.real_from_i64(lo),
        &prec.real_from_i64(hi),
        n_max,
        m,
        prec,
    )
    .unwrap()
}

/// Shared deep table for a(x) = x on [1, 2]: several tests need the scores
/// far past the optimal order and the recurrence cost dominates this suite.
fn airy_table_60() -> &'static PhaseTable {
    static TABLE: OnceLock<PhaseTable> = OnceLock::new();
    TABLE.get_or_init(|| table_for(p50(), "x", 1, 2, 60, 64))
}

/// Problem on [1, 2] with a(x) = x and data that continues to Ai(-x ε^{-2/3}).
fn airy_problem(prec: Precision, eps: &Float) -> IVProblem {
    let lo = prec.real_from_i64(1);
    let hi = prec.real_from_i64(2);
    let (phi0, phi1) = oracle::airy_initial_data(&lo, eps, prec).unwrap();
    IVProblem::new(
        Expr::parse("x").unwrap(),
        &lo,
        &hi,
        eps,
        phi0,
        phi1,
        257,
        prec,
    )
    .unwrap()
}

/// Ascending Chebyshev-distributed error grid on [1, 2].
fn error_grid(prec: Precision, points: usize) -> Vec<Float> {
    let g = wkbsolve::cheb::ChebGrid::new(
        &prec.real_from_i64(1),
        &prec.real_from_i64(2),
        points - 1,
        prec,
    )
    .unwrap();
    let mut xs = g.nodes().to_vec();
    xs.reverse();
    xs
}

// ---------------------------------------------------------------------------
// Least-term selection
// ---------------------------------------------------------------------------

#[test]
fn least_term_constant_coefficient_stops_at_one() {
    let prec = p34();
    let table = table_for(prec, "1", 0, 1, 6, 16);
    let eps = real(prec, "0.1");
    let report = least_term_n(&table, &eps, false).unwrap();
    // Scores are (1, 0, 0, ...): the first vanishing term wins.
    assert_eq!(report.n_selected(), 1);
    assert_eq!(report.mode(), SelectionMode::LeastTerm);
    assert!(!report.boundary_hit());
    assert_eq!(report.scores().len(), 7);
    assert!(*report.selected_score() == 0);
}

#[test]
fn least_term_rejects_small_table() {
    let prec = p34();
    let table = table_for(prec, "x", 1, 2, 1, 16);
    let eps = real(prec, "0.1");
    assert!(matches!(
        least_term_n(&table, &eps, false),
        Err(Error::TableTooSmall { .. })
    ));
}

#[test]
fn least_term_rejects_bad_epsilon() {
    let prec = p34();
    let table = table_for(prec, "x", 1, 2, 4, 16);
    for text in ["0", "-1"] {
        let eps = real(prec, text);
        assert!(matches!(
            least_term_n(&table, &eps, false),
            Err(Error::BadEpsilon { .. })
        ));
    }
}

#[test]
fn least_term_order_scales_inversely_with_epsilon() {
    let prec = p50();
    let table = airy_table_60();

    // At eps = 0.1 the norm growth K2 ≈ 0.27 puts the least term near
    // n = 1/(e·K2·eps) ≈ 14.
    let n_01 = least_term_n(table, &real(prec, "0.1"), true)
        .unwrap()
        .n_selected();
    assert!((10..=17).contains(&n_01), "N(0.1) = {n_01} outside [10, 17]");

    // Halving eps approximately doubles the selected order.
    let n_005 = least_term_n(table, &real(prec, "0.05"), true)
        .unwrap()
        .n_selected();
    let doubled = 2 * n_01;
    assert!(
        n_005 >= doubled - 2 && n_005 <= doubled + 2,
        "N(0.05) = {n_005}, expected within 2 of {doubled}"
    );
}

#[test]
fn least_term_order_monotone_in_epsilon() {
    let prec = p50();
    let table = airy_table_60();
    // Shrinking eps pushes the least term deeper into the series.
    let mut last = 0usize;
    for text in ["0.2", "0.15", "0.1", "0.07", "0.05"] {
        let n = least_term_n(table, &real(prec, text), true)
            .unwrap()
            .n_selected();
        assert!(
            n >= last,
            "selected order must not shrink as eps falls: N({text}) = {n} < {last}"
        );
        last = n;
    }
}

#[test]
fn least_term_scores_trace_the_term_magnitudes() {
    let prec = p50();
    let table = table_for(prec, "x", 1, 2, 6, 32);
    let eps = real(prec, "0.1");
    let report = least_term_n(&table, &eps, false).unwrap();
    let tol = prec.pow10(-40);
    let mut pw = Float::with_val(prec.bits(), 1);
    for (n, score) in report.scores().iter().enumerate() {
        let want = Float::with_val(prec.bits(), table.sup_norm(n).unwrap() * &pw);
        assert_close_real(&format!("score {n}"), score, &want, &tol);
        pw *= &eps;
    }
}

#[test]
fn boundary_argmin_flagged_and_escalated() {
    let prec = p34();
    // Table far too shallow for eps = 0.01: terms still falling at n_max.
    let table = table_for(prec, "x", 1, 2, 3, 16);
    let eps = real(prec, "0.01");
    let report = least_term_n(&table, &eps, false).unwrap();
    assert_eq!(report.n_selected(), 3);
    assert!(report.boundary_hit());
    assert!(matches!(
        least_term_n(&table, &eps, true),
        Err(Error::BoundaryArgmin { n_max: 3 })
    ));
}

// ---------------------------------------------------------------------------
// Oracle-measured selection
// ---------------------------------------------------------------------------

/// Exact reference for a(x) = 1 with data (1, -i): phi = exp(-ix/eps).
fn plane_wave_reference(prec: Precision, eps: &Float, xs: Vec<Float>) -> OracleSolution {
    let mut phi = Vec::with_capacity(xs.len());
    let mut dphi = Vec::with_capacity(xs.len());
    for x in &xs {
        let arg = -Float::with_val(prec.bits(), x / eps);
        let w = Scalar::new(arg.clone().cos(), arg.sin());
        dphi.push(w.mul_neg_i());
        phi.push(w);
    }
    OracleSolution::from_parts(xs, phi, dphi, prec.pow10(-40), OracleMethod::BruteForceOde)
        .unwrap()
}

#[test]
fn oracle_constant_coefficient_optimal_is_zero() {
    let prec = p34();
    let eps = real(prec, "0.1");
    let problem = IVProblem::new(
        Expr::parse("1").unwrap(),
        &prec.real_from_i64(0),
        &prec.real_from_i64(1),
        &eps,
        Scalar::one(prec),
        scalar(prec, "0", "-1"),
        257,
        prec,
    )
    .unwrap();
    let table = table_for(prec, "1", 0, 1, 5, 16);
    let g = wkbsolve::cheb::ChebGrid::new(
        &prec.real_from_i64(0),
        &prec.real_from_i64(1),
        32,
        prec,
    )
    .unwrap();
    let mut xs = g.nodes().to_vec();
    xs.reverse();
    let reference = plane_wave_reference(prec, &eps, xs);
    let report = oracle_optimal_n(&problem, &table, &reference).unwrap();
    // Every order is exact to rounding; ties break toward N = 0.
    assert_eq!(report.n_selected(), 0);
    assert_eq!(report.mode(), SelectionMode::OracleMeasured);
    assert!(!report.boundary_hit());
    // The whole curve sits at the precision floor.
    for (n, s) in report.scores().iter().enumerate() {
        assert!(
            *s < prec.pow10(-28),
            "score at N={n} should be rounding-level, got {:e}",
            s.to_f64()
        );
    }
}

#[test]
fn oracle_optimal_product_with_airy_reference() {
    let prec = p50();
    let eps = real(prec, "0.1");
    let table = airy_table_60();
    let problem = airy_problem(prec, &eps);
    let reference = oracle::airy_analytic(&problem, &error_grid(prec, 65)).unwrap();
    let report = oracle_optimal_n(&problem, table, &reference).unwrap();
    let n_opt = report.n_selected();

    // Superasymptotic scaling: N_opt·eps lands in a fixed window.
    let product = n_opt as f64 * 0.1;
    assert!(
        (0.7..=2.7).contains(&product),
        "N_opt·eps = {product} outside [0.7, 2.7] (N_opt = {n_opt})"
    );
    assert!(!report.boundary_hit());

    // Divergent-series signature: the curve falls by orders of magnitude
    // into the minimum and rises back out.
    let scores = report.scores();
    let floor = report.selected_score();
    let hundred = Float::with_val(prec.bits(), 100);
    let early = Float::with_val(prec.bits(), &scores[0] / floor);
    let late = Float::with_val(prec.bits(), &scores[table.n_max()] / floor);
    assert!(early > hundred, "curve must fall from N=0 into the minimum");
    assert!(late > hundred, "curve must rise out of the minimum by n_max");
}

#[test]
fn least_term_error_is_near_optimal() {
    let prec = p50();
    let eps = real(prec, "0.1");
    let table = airy_table_60();
    let problem = airy_problem(prec, &eps);
    let reference = oracle::airy_analytic(&problem, &error_grid(prec, 65)).unwrap();
    let curve = error_curve(&problem, table, &reference).unwrap();
    let n_least = least_term_n(table, &eps, true).unwrap().n_selected();
    let n_opt = oracle_optimal_n(&problem, table, &reference)
        .unwrap()
        .n_selected();
    let ratio = Float::with_val(prec.bits(), &curve[n_least] / &curve[n_opt]);
    assert!(
        ratio <= 100,
        "least-term error at N={n_least} is {:e}x the optimum at N={n_opt}",
        ratio.to_f64()
    );
}

#[test]
fn error_curve_rejects_unmatchable_epsilon() {
    let prec = p34();
    let table = table_for(prec, "1", 0, 1, 4, 16);
    let eps = real(prec, "0.5");
    let problem = IVProblem::new(
        Expr::parse("1").unwrap(),
        &prec.real_from_i64(0),
        &prec.real_from_i64(1),
        &eps,
        Scalar::one(prec),
        scalar(prec, "0", "-1"),
        257,
        prec,
    )
    .unwrap();
    // Reference lives on a different-length grid than the curve needs: the
    // curve is evaluated on the reference's own grid, so any grid works —
    // this call exercises the happy path for a coarse 9-point grid instead.
    let g = wkbsolve::cheb::ChebGrid::new(
        &prec.real_from_i64(0),
        &prec.real_from_i64(1),
        8,
        prec,
    )
    .unwrap();
    let mut xs = g.nodes().to_vec();
    xs.reverse();
    let reference = plane_wave_reference(prec, &eps, xs);
    let curve = error_curve(&problem, &table, &reference).unwrap();
    assert_eq!(curve.len(), 5);
}

// ---------------------------------------------------------------------------
// Norm-growth fit
// ---------------------------------------------------------------------------

#[test]
fn norm_growth_fit_recovers_k2() {
    let prec = p50();
    let table = table_for(prec, "x", 1, 2, 30, 64);
    let fit = fit_norm_growth(&table).unwrap();
    let k2 = fit.k2().to_f64();
    assert!(
        (0.22..=0.33).contains(&k2),
        "fitted K2 = {k2} outside [0.22, 0.33]"
    );
    assert!(*fit.prefactor() > 0);
    // The law is asymptotic, not exact: residuals stay modest.
    assert_eq!(fit.residuals().len(), 29);
    for (n, r) in fit.residuals() {
        assert!(
            r.clone().abs() < 3,
            "fit residual at n = {n} is {:e}",
            r.to_f64()
        );
    }
}

#[test]
fn norm_growth_fit_rejects_degenerate_input() {
    let prec = p34();
    // Constant coefficient: every fit point has zero norm.
    let table = table_for(prec, "1", 0, 1, 10, 16);
    assert!(matches!(
        fit_norm_growth(&table),
        Err(Error::DegenerateFit { got: 0, min: 5 })
    ));
    // Too-shallow table is refused outright.
    let shallow = table_for(prec, "x", 1, 2, 5, 16);
    assert!(matches!(
        fit_norm_growth(&shallow),
        Err(Error::TableTooSmall { .. })
    ));
}

#[test]
fn norm_growth_fit_other_coefficient_is_finite() {
    let prec = p50();
    let table = table_for(prec, "2*x", 1, 2, 12, 32);
    let fit = fit_norm_growth(&table).unwrap();
    assert!(fit.k2().is_finite() && *fit.k2() > 0);
    assert!(fit.prefactor().is_finite() && *fit.prefactor() > 0);
}
