//! Truncation-order selection and norm-growth fitting.
//!
//! The phase series is asymptotic, not convergent: past an `ε`-dependent
//! order its terms grow and the approximation degrades. Two selectors are
//! provided:
//!
//! - [`least_term_n`] — a-priori: truncate before the smallest term
//!   `ε^n·‖S_n′‖`. Needs nothing but the phase table; this is the default
//!   for problems without a known reference.
//! - [`oracle_optimal_n`] — a-posteriori: measure the sup-error against a
//!   reference solution for every `N` and take the argmin. This reproduces
//!   the "optimal truncation" experiments exactly.
//!
//! Both report the full score vector so callers can inspect the
//! divergent-series signature (errors fall, bottom out, rise again).
//! [`fit_norm_growth`] fits the growth law `‖S_n′‖ ≈ c·K₂ⁿ·nⁿ` that makes
//! the least-term order scale like `1/ε`.

use crate::error::{Error, Result};
use crate::oracle::OracleSolution;
use crate::scalar::{fmt_real, Scalar};
use crate::wkb::{IVProblem, PhaseTable, EXPONENT_GUARD};
use rayon::prelude::*;
use rug::{float::Special, Assign, Float};

/// How a truncation order was chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SelectionMode {
    /// Scores are the a-priori term magnitudes `ε^n·‖S_n′‖`.
    LeastTerm,
    /// Scores are measured sup-errors against a reference solution.
    OracleMeasured,
}

/// Outcome of a truncation-order selection: the chosen order, the full
/// per-`N` score vector it minimizes (ties broken toward smaller `N`), and
/// whether the argmin sat on the table boundary (suggesting `n_max` was too
/// small to see the minimum).
#[derive(Clone, Debug)]
pub struct TruncationReport {
    eps: Float,
    n_selected: usize,
    scores: Vec<Float>,
    mode: SelectionMode,
    boundary_hit: bool,
}

impl TruncationReport {
    pub fn eps(&self) -> &Float {
        &self.eps
    }

    pub fn n_selected(&self) -> usize {
        self.n_selected
    }

    /// Score of candidate order `n` (index = `n`). Overflowed candidates in
    /// oracle mode carry `+∞`.
    pub fn scores(&self) -> &[Float] {
        &self.scores
    }

    pub fn mode(&self) -> SelectionMode {
        self.mode
    }

    /// True when the argmin landed on `n_max` itself.
    pub fn boundary_hit(&self) -> bool {
        self.boundary_hit
    }

    /// Score at the selected order.
    pub fn selected_score(&self) -> &Float {
        &self.scores[self.n_selected]
    }
}

/// Argmin with ties broken toward the smaller index (strict improvement
/// required to move the winner).
fn argmin(scores: &[Float]) -> usize {
    let mut best = 0;
    for (i, s) in scores.iter().enumerate().skip(1) {
        if s < &scores[best] {
            best = i;
        }
    }
    best
}

/// Least-term truncation: `N = argmin_n ε^n·‖S_n′‖` over the table.
///
/// With `‖S_n′‖ ~ c·K₂ⁿnⁿ` the minimum sits near `n ≈ 1/(e·K₂·ε)`, the
/// `N ∝ 1/ε` scaling of superasymptotics. When the argmin lands on `n_max`
/// the table was too small to contain the minimum; `strict_boundary`
/// escalates that from a report flag to an error.
pub fn least_term_n(
    table: &PhaseTable,
    eps: &Float,
    strict_boundary: bool,
) -> Result<TruncationReport> {
    if table.n_max() < 2 {
        return Err(Error::TableTooSmall {
            detail: format!(
                "least-term selection needs n_max >= 2, table has {}",
                table.n_max()
            ),
        });
    }
    let prec = table.prec();
    if !(eps.is_finite() && *eps > 0) {
        return Err(Error::BadEpsilon {
            eps: fmt_real(eps, prec.digits()),
        });
    }
    let bits = prec.bits();
    let mut scores = Vec::with_capacity(table.n_max() + 1);
    let mut eps_pow = Float::with_val(bits, 1);
    for norm in table.sup_norms() {
        scores.push(Float::with_val(bits, norm * &eps_pow));
        eps_pow *= eps;
    }
    let n_selected = argmin(&scores);
    let boundary_hit = n_selected == table.n_max();
    if strict_boundary && boundary_hit {
        return Err(Error::BoundaryArgmin {
            n_max: table.n_max(),
        });
    }
    Ok(TruncationReport {
        eps: Float::with_val(bits, eps),
        n_selected,
        scores,
        mode: SelectionMode::LeastTerm,
        boundary_hit,
    })
}

/// Sup-error of the order-`N` ansatz against the reference, for every
/// `N = 0..=n_max` (index = `N`).
///
/// Shares the per-point `S_n(x)` evaluations across all `N` by accumulating
/// the branch exponents incrementally, so the whole curve costs two complex
/// exponentials per `(N, point)` pair. Candidates whose exponent passes the
/// overflow guard score `+∞` (they cannot be optimal; erroring out would
/// hide the rest of the curve).
pub fn error_curve(
    problem: &IVProblem,
    table: &PhaseTable,
    reference: &OracleSolution,
) -> Result<Vec<Float>> {
    let prec = table.prec();
    let bits = prec.bits();
    let n_max = table.n_max();
    let eps = problem.eps();

    // Matching coefficients for every candidate order.
    let coeffs: Vec<(Scalar, Scalar)> = (0..=n_max)
        .map(|n| table.match_initial_conditions(eps, n, problem.phi0(), problem.phi1()))
        .collect::<Result<Vec<_>>>()?;

    // Per-point error columns, parallel over the grid.
    let columns: Vec<Vec<Float>> = reference
        .xs()
        .par_iter()
        .zip(reference.phi().par_iter())
        .map(|(x, ref_phi)| -> Result<Vec<Float>> {
            let mut errs = Vec::with_capacity(n_max + 1);
            let mut e_minus = Scalar::zero(prec);
            let mut e_plus = Scalar::zero(prec);
            let mut eps_pow = Float::with_val(bits, 1) / eps;
            for (n, (alpha, beta)) in coeffs.iter().enumerate() {
                let s_n = table.s(n)?.eval(x)?;
                let term = s_n.scale_real(&eps_pow);
                e_minus += &term;
                if n % 2 == 0 {
                    e_plus -= &term;
                } else {
                    e_plus += &term;
                }
                eps_pow *= eps;
                if !(*e_minus.re() < EXPONENT_GUARD) || !(*e_plus.re() < EXPONENT_GUARD) {
                    errs.push(Float::with_val(bits, Special::Infinity));
                    continue;
                }
                let mut phi = alpha * &e_minus.exp();
                phi += &(beta * &e_plus.exp());
                phi -= ref_phi;
                errs.push(phi.abs());
            }
            Ok(errs)
        })
        .collect::<Result<Vec<_>>>()?;

    // Columns → per-N maxima.
    let mut scores = vec![Float::new(bits); n_max + 1];
    for col in &columns {
        for (n, e) in col.iter().enumerate() {
            if e > &scores[n] {
                scores[n].assign(e);
            }
        }
    }
    Ok(scores)
}

/// A-posteriori optimal order: argmin over `N` of the measured sup-error
/// against the reference (ties toward smaller `N`, boundary flagged).
pub fn oracle_optimal_n(
    problem: &IVProblem,
    table: &PhaseTable,
    reference: &OracleSolution,
) -> Result<TruncationReport> {
    let scores = error_curve(problem, table, reference)?;
    let n_selected = argmin(&scores);
    Ok(TruncationReport {
        eps: problem.eps().clone(),
        n_selected,
        scores,
        mode: SelectionMode::OracleMeasured,
        boundary_hit: n_selected == table.n_max(),
    })
}

/// Least-squares fit of the norm-growth law `‖S_n′‖ ≈ c·K₂ⁿ·nⁿ`.
#[derive(Clone, Debug)]
pub struct NormGrowthFit {
    k2: Float,
    prefactor: Float,
    residuals: Vec<(usize, Float)>,
}

impl NormGrowthFit {
    /// Fitted growth base `K₂`.
    pub fn k2(&self) -> &Float {
        &self.k2
    }

    /// Fitted prefactor `c`.
    pub fn prefactor(&self) -> &Float {
        &self.prefactor
    }

    /// Per-`n` residuals `ln‖S_n′‖ − ln(c·K₂ⁿnⁿ)` at the fitted orders.
    pub fn residuals(&self) -> &[(usize, Float)] {
        &self.residuals
    }
}

/// Fits `ln‖S_n′‖ − n·ln n = ln c + n·ln K₂` by least squares over
/// `n ∈ [2, n_max]` (the `n = 0, 1` terms are structural special cases).
/// Orders with zero norm are skipped; fewer than 5 usable points is a
/// degenerate fit and refused.
pub fn fit_norm_growth(table: &PhaseTable) -> Result<NormGrowthFit> {
    if table.n_max() < 6 {
        return Err(Error::TableTooSmall {
            detail: format!(
                "norm-growth fit needs n_max >= 6, table has {}",
                table.n_max()
            ),
        });
    }
    let prec = table.prec();
    let bits = prec.bits();
    let mut points: Vec<(usize, Float)> = Vec::new();
    for (n, norm) in table.sup_norms().iter().enumerate().skip(2) {
        if !(*norm > 0) {
            continue;
        }
        // y_n = ln‖S_n′‖ − n·ln n
        let mut y = norm.clone().ln();
        let n_f = Float::with_val(bits, n as u64);
        y -= Float::with_val(bits, n_f.clone().ln() * &n_f);
        points.push((n, y));
    }
    if points.len() < 5 {
        return Err(Error::DegenerateFit {
            got: points.len(),
            min: 5,
        });
    }

    // Normal equations for y = intercept + slope·n.
    let count = Float::with_val(bits, points.len() as u64);
    let mut sum_x = Float::new(bits);
    let mut sum_y = Float::new(bits);
    let mut sum_xx = Float::new(bits);
    let mut sum_xy = Float::new(bits);
    for (n, y) in &points {
        let x = Float::with_val(bits, *n as u64);
        sum_x += &x;
        sum_y += y;
        sum_xx += Float::with_val(bits, &x * &x);
        sum_xy += Float::with_val(bits, &x * y);
    }
    let denom = Float::with_val(bits, &sum_xx * &count) - Float::with_val(bits, &sum_x * &sum_x);
    let numer = Float::with_val(bits, &sum_xy * &count) - Float::with_val(bits, &sum_x * &sum_y);
    let slope = numer / &denom;
    let mut intercept = Float::with_val(bits, &slope * &sum_x);
    intercept = (sum_y - intercept) / &count;

    let residuals: Vec<(usize, Float)> = points
        .iter()
        .map(|(n, y)| {
            let fit = Float::with_val(bits, &slope * (*n as u64)) + &intercept;
            (*n, Float::with_val(bits, y - &fit))
        })
        .collect();
    Ok(NormGrowthFit {
        k2: slope.exp(),
        prefactor: intercept.exp(),
        residuals,
    })
}
