//! Unit tests for the coefficient-expression parser, printer, and
//! evaluators.

mod common;

use common::*;
use wkbsolve::expr::Func;
use wkbsolve::scalar::Scalar;
use wkbsolve::{Error, Expr};

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

#[test]
fn parse_variable() {
    assert_eq!(Expr::parse("x").unwrap(), Expr::Var);
    assert_eq!(Expr::parse("  x  ").unwrap(), Expr::Var);
}

#[test]
fn parse_precedence() {
    // 2+3*x^2 must group as 2 + (3 * (x^2)).
    let e = Expr::parse("2+3*x^2").unwrap();
    let want = Expr::Add(
        Box::new(Expr::Number("2".into())),
        Box::new(Expr::Mul(
            Box::new(Expr::Number("3".into())),
            Box::new(Expr::Pow(Box::new(Expr::Var), 2)),
        )),
    );
    assert_eq!(e, want);
}

#[test]
fn parse_left_associativity() {
    // 8-4-2 = (8-4)-2, 8/4/2 = (8/4)/2.
    let prec = p34();
    let x = prec.real_from_i64(1);
    let d = Expr::parse("8-4-2").unwrap().eval_scalar(&x, prec).unwrap();
    assert_eq!(d, Scalar::from_i64(2, prec));
    let q = Expr::parse("8/4/2").unwrap().eval_scalar(&x, prec).unwrap();
    assert_eq!(q, Scalar::from_i64(1, prec));
}

#[test]
fn parse_unary_minus_and_power() {
    let prec = p34();
    let x = prec.real_from_i64(3);
    // Power binds tighter than unary minus: -x^2 = -(x^2) = -9.
    let v = Expr::parse("-x^2").unwrap().eval_scalar(&x, prec).unwrap();
    assert_eq!(v, Scalar::from_i64(-9, prec));
    // Parenthesized base: (-x)^2 = 9.
    let v = Expr::parse("(-x)^2").unwrap().eval_scalar(&x, prec).unwrap();
    assert_eq!(v, Scalar::from_i64(9, prec));
}

#[test]
fn parse_test_coefficient() {
    let e = Expr::parse("1+0.25*sin(10*x)").unwrap();
    let want = Expr::Add(
        Box::new(Expr::Number("1".into())),
        Box::new(Expr::Mul(
            Box::new(Expr::Number("0.25".into())),
            Box::new(Expr::Call(
                Func::Sin,
                Box::new(Expr::Mul(
                    Box::new(Expr::Number("10".into())),
                    Box::new(Expr::Var),
                )),
            )),
        )),
    );
    assert_eq!(e, want);
}

#[test]
fn parse_functions_and_nesting() {
    for src in [
        "sqrt(x)",
        "exp(-x/2)",
        "ln(1+x^2)",
        "cos(sin(x))",
        "2 + sin(x)",
        "(1+x)*(2-x)/(3+x)",
        "1e-3 + 2.5e2*x",
    ] {
        assert!(Expr::parse(src).is_ok(), "should parse: {src}");
    }
}

#[test]
fn parse_errors_carry_position() {
    match Expr::parse("x +") {
        Err(Error::Parse { pos, .. }) => assert_eq!(pos, 3),
        other => panic!("expected parse error, got {other:?}"),
    }
    match Expr::parse("x + $") {
        Err(Error::Parse { pos, .. }) => assert_eq!(pos, 4),
        other => panic!("expected parse error, got {other:?}"),
    }
    // Unknown identifier.
    assert!(matches!(Expr::parse("y + 1"), Err(Error::Parse { .. })));
    // Non-integer exponent.
    assert!(matches!(Expr::parse("x^0.5"), Err(Error::Parse { .. })));
    assert!(matches!(Expr::parse("x^x"), Err(Error::Parse { .. })));
    // Unbalanced parentheses.
    assert!(matches!(Expr::parse("(1+x"), Err(Error::Parse { .. })));
    // Empty input.
    assert!(matches!(Expr::parse(""), Err(Error::Parse { .. })));
    // Trailing garbage after a complete expression.
    assert!(matches!(Expr::parse("x 1"), Err(Error::Parse { .. })));
}

#[test]
fn display_round_trips_structurally() {
    for src in [
        "x",
        "2+3*x^2",
        "1+0.25*sin(10*x)",
        "-x^2",
        "(-x)^2",
        "(1+x)*(2-x)/(3+x)",
        "8-4-2",
        "8/4/2",
        "2-(3-4)",
        "2/(3/4)",
        "sqrt(exp(x))",
        "x^-2",
        "1.5e-3*x+ln(x)",
    ] {
        let e = Expr::parse(src).unwrap();
        let printed = e.to_string();
        let reparsed = Expr::parse(&printed)
            .unwrap_or_else(|err| panic!("reparse of `{printed}` (from `{src}`): {err}"));
        assert_eq!(reparsed, e, "round trip through `{printed}` from `{src}`");
    }
}

// ---------------------------------------------------------------------------
// Scalar evaluation
// ---------------------------------------------------------------------------

#[test]
fn eval_scalar_matches_closed_forms() {
    let prec = p50();
    let tol = prec.pow10(-46);
    let x = real(prec, "0.5");

    let e = Expr::parse("2+3*x^2").unwrap();
    let want = scalar(prec, "2.75", "0");
    assert_close_scalar("2+3*x^2 at 0.5", &e.eval_scalar(&x, prec).unwrap(), &want, &tol);

    let e = Expr::parse("exp(x)*exp(-x)").unwrap();
    assert_close_scalar(
        "exp(x)exp(-x)",
        &e.eval_scalar(&x, prec).unwrap(),
        &Scalar::one(prec),
        &tol,
    );

    let e = Expr::parse("sin(x)^2+cos(x)^2").unwrap();
    assert_close_scalar(
        "sin^2+cos^2",
        &e.eval_scalar(&x, prec).unwrap(),
        &Scalar::one(prec),
        &tol,
    );

    let e = Expr::parse("ln(exp(x))").unwrap();
    assert_close_scalar(
        "ln(exp(x))",
        &e.eval_scalar(&x, prec).unwrap(),
        &Scalar::from_real(x.clone()),
        &tol,
    );
}

#[test]
fn eval_scalar_domain_errors_name_subexpression() {
    let prec = p34();
    let zero = prec.real_from_i64(0);
    let neg = prec.real_from_i64(-1);

    match Expr::parse("1/x").unwrap().eval_scalar(&zero, prec) {
        Err(Error::ExprDomain { subexpr, .. }) => assert!(subexpr.contains('/')),
        other => panic!("expected domain error, got {other:?}"),
    }
    assert!(Expr::parse("ln(x)")
        .unwrap()
        .eval_scalar(&neg, prec)
        .is_err());
    assert!(Expr::parse("sqrt(x)")
        .unwrap()
        .eval_scalar(&neg, prec)
        .is_err());
    assert!(Expr::parse("x^-1")
        .unwrap()
        .eval_scalar(&zero, prec)
        .is_err());
}

// ---------------------------------------------------------------------------
// Jet evaluation
// ---------------------------------------------------------------------------

#[test]
fn eval_jet_variable() {
    let prec = p34();
    let j = Expr::parse("x")
        .unwrap()
        .eval_jet(&prec.real_from_i64(1), 2, prec)
        .unwrap();
    assert_eq!(j.coeff(0), &Scalar::one(prec));
    assert_eq!(j.coeff(1), &Scalar::one(prec));
    assert!(j.coeff(2).is_zero());
}

#[test]
fn eval_jet_quadratic() {
    let prec = p34();
    // 2+3*x^2 at 1: value 5, slope 6, half-curvature 3.
    let j = Expr::parse("2+3*x^2")
        .unwrap()
        .eval_jet(&prec.real_from_i64(1), 2, prec)
        .unwrap();
    assert_eq!(j.coeff(0), &Scalar::from_i64(5, prec));
    assert_eq!(j.coeff(1), &Scalar::from_i64(6, prec));
    assert_eq!(j.coeff(2), &Scalar::from_i64(3, prec));
}

#[test]
fn eval_jet_sqrt_matches_jet_op() {
    let prec = p34();
    let j = Expr::parse("sqrt(x)")
        .unwrap()
        .eval_jet(&prec.real_from_i64(1), 3, prec)
        .unwrap();
    assert_eq!(j.coeff(0), &scalar(prec, "1", "0"));
    assert_eq!(j.coeff(1), &scalar(prec, "0.5", "0"));
    assert_eq!(j.coeff(2), &scalar(prec, "-0.125", "0"));
    assert_eq!(j.coeff(3), &scalar(prec, "0.0625", "0"));
}

#[test]
fn eval_jet_coefficients_match_finite_differences() {
    // Low-order Taylor coefficients vs central finite differences.
    let prec = p50();
    let h = real(prec, "1e-10");
    for (src, x0_text) in [
        ("exp(x)*cos(x)", "0.7"),
        ("1/(2+x)", "1.5"),
        ("sqrt(1+x^2)", "0.25"),
    ] {
        let e = Expr::parse(src).unwrap();
        let x0 = real(prec, x0_text);
        let jet = e.eval_jet(&x0, 3, prec).unwrap();

        let f = |x: &rug::Float| e.eval_scalar(x, prec).unwrap();
        let xp = rug::Float::with_val(prec.bits(), &x0 + &h);
        let xm = rug::Float::with_val(prec.bits(), &x0 - &h);
        let fp = f(&xp);
        let fm = f(&xm);
        let f0 = f(&x0);

        // f'(x0) ~ (f(x0+h)-f(x0-h)) / 2h, error O(h^2) ~ 1e-20.
        let inv_two_h = rug::Float::with_val(prec.bits(), &h * 2u32).recip();
        let d1 = (&fp - &fm).scale_real(&inv_two_h);
        let tol = prec.pow10(-18);
        assert_close_scalar(&format!("{src}: first derivative"), &d1, jet.coeff(1), &tol);

        // f''(x0)/2 ~ (f(x0+h)-2f(x0)+f(x0-h)) / (2h^2), error O(h^2).
        let mut num = &fp + &fm;
        num -= &(&f0 * &Scalar::from_i64(2, prec));
        let h2 = rug::Float::with_val(prec.bits(), &h * &h);
        let inv_two_h2 = rug::Float::with_val(prec.bits(), &h2 * 2u32).recip();
        let d2 = num.scale_real(&inv_two_h2);
        // Curvature loses more digits to cancellation: h^2 = 1e-20 eats 20
        // of the 50 digits, leaving ~1e-10 accuracy around O(1) values.
        let tol = prec.pow10(-8);
        assert_close_scalar(&format!("{src}: half curvature"), &d2, jet.coeff(2), &tol);
    }
}

#[test]
fn eval_jet_domain_error_reports_subexpression() {
    let prec = p34();
    match Expr::parse("1/(x-1)")
        .unwrap()
        .eval_jet(&prec.real_from_i64(1), 2, prec)
    {
        Err(Error::ExprDomain { subexpr, .. }) => {
            assert!(subexpr.contains("x-1") || subexpr.contains('/'), "{subexpr}")
        }
        other => panic!("expected domain error, got {other:?}"),
    }
}

// ---------------------------------------------------------------------------
// Positivity validation
// ---------------------------------------------------------------------------

#[test]
fn positivity_monotone_coefficient() {
    let prec = p34();
    let a = Expr::parse("x").unwrap();
    let min = a
        .validate_positivity(&prec.real_from_i64(1), &prec.real_from_i64(2), 257, prec)
        .unwrap();
    let tol = prec.pow10(-30);
    assert_close_real("min of x on [1,2]", &min, &prec.real_from_i64(1), &tol);
}

#[test]
fn positivity_rejects_sign_change() {
    let prec = p34();
    let a = Expr::parse("x").unwrap();
    let err = a
        .validate_positivity(&prec.real_from_i64(-1), &prec.real_from_i64(2), 257, prec)
        .unwrap_err();
    assert!(matches!(err, Error::NonpositiveCoefficient { .. }), "{err}");
}

#[test]
fn positivity_bounded_oscillation() {
    let prec = p34();
    let a = Expr::parse("2+sin(x)").unwrap();
    let min = a
        .validate_positivity(&prec.real_from_i64(0), &prec.real_from_i64(10), 257, prec)
        .unwrap();
    assert!(min >= 1, "2+sin(x) >= 1, sampled min {:e}", min.to_f64());
}
