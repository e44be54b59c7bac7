//! Helpers shared by the integration-test suites.
#![allow(dead_code)]

use rug::Float;
use wkbsolve::scalar::{Precision, Scalar};

pub fn p34() -> Precision {
    Precision::new(34).unwrap()
}

pub fn p50() -> Precision {
    Precision::new(50).unwrap()
}

/// Parse a decimal literal at the given precision (panics on bad text).
pub fn real(prec: Precision, text: &str) -> Float {
    prec.real_from_decimal(text).unwrap()
}

pub fn scalar(prec: Precision, re: &str, im: &str) -> Scalar {
    Scalar::from_decimal(re, im, prec).unwrap()
}

/// Assert |got − want| ≤ tol with a diagnostic that shows the difference.
pub fn assert_close_real(label: &str, got: &Float, want: &Float, tol: &Float) {
    let diff = Float::with_val(got.prec(), got - want).abs();
    assert!(
        diff <= *tol,
        "{label}: |{:e} - {:e}| = {:e} > tol {:e}",
        got.to_f64(),
        want.to_f64(),
        diff.to_f64(),
        tol.to_f64()
    );
}

pub fn assert_close_scalar(label: &str, got: &Scalar, want: &Scalar, tol: &Float) {
    let diff = (got - want).abs();
    assert!(
        diff <= *tol,
        "{label}: got ({:e}, {:e}), want ({:e}, {:e}), |diff| = {:e} > tol {:e}",
        got.re().to_f64(),
        got.im().to_f64(),
        want.re().to_f64(),
        want.im().to_f64(),
        diff.to_f64(),
        tol.to_f64()
    );
}

/// Ascending uniform grid with exact endpoints.
pub fn uniform_grid(prec: Precision, lo: &Float, hi: &Float, points: usize) -> Vec<Float> {
    assert!(points >= 2);
    let bits = prec.bits();
    let span = Float::with_val(bits, hi - lo);
    let denom = (points - 1) as u32;
    (0..points)
        .map(|i| {
            if i == 0 {
                lo.clone()
            } else if i == points - 1 {
                hi.clone()
            } else {
                Float::with_val(bits, &span * (i as u32)) / denom + lo
            }
        })
        .collect()
}
