//! Phase-series construction and evaluation for
//! `eps² φ″(x) + a(x) φ(x) = 0` on `[lo, hi]` with `a > 0`.
//!
//! The solution ansatz is `φ ≈ α·exp(Σ_n ε^{n−1} S_n^-) + β·exp(Σ_n ε^{n−1}
//! S_n^+)` where the phase derivatives obey the recurrence
//!
//! ```text
//! (S_0^-)′ = −i√a,
//! (S_1^-)′ = −a′/(4a),
//! (S_n^-)′ = −( Σ_{j=1}^{n−1} (S_j^-)′(S_{n−j}^-)′ + (S_{n−1}^-)″ ) / (2 (S_0^-)′),
//! ```
//!
//! and the plus branch follows from the sign symmetry `(S_{2k}^+)′ =
//! −(S_{2k}^-)′`, `(S_{2k+1}^+)′ = (S_{2k+1}^-)′`. Each `S_n^±` is the
//! antiderivative normalized to vanish at `lo`.
//!
//! The recurrence runs in jet arithmetic at every Chebyshev node: the jet of
//! `S_n′` is carried to order `n_max + 2 − n`, so the one differentiation per
//! level is exact and always has an order in reserve. Crucially the recurrence
//! never involves `ε`, so one [`PhaseTable`] serves every `ε` in a sweep.

use crate::cheb::{ChebGrid, ChebSeries, SUP_NORM_REFINEMENT};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jet::Jet;
use crate::scalar::{fmt_real, Precision, Scalar};
use rayon::prelude::*;
use rug::Float;

/// Default node count for the positivity pre-check of `a` (4× the default
/// spectral resolution of 64+1).
pub const DEFAULT_POSITIVITY_GRID: usize = 257;

/// Evaluating the ansatz requires `Re(exponent)` below this limit; beyond it
/// the "solution" is a pure exponential blow-up (non-oscillatory misuse or a
/// far-divergent truncation order) and the evaluation refuses.
pub const EXPONENT_GUARD: f64 = 1.0e9;

/// An initial-value problem `eps² φ″ + a φ = 0`, `φ(lo) = φ0`,
/// `eps·φ′(lo) = φ1`, with `a` validated positive on a sample grid.
#[derive(Clone, Debug)]
pub struct IVProblem {
    a: Expr,
    lo: Float,
    hi: Float,
    eps: Float,
    phi0: Scalar,
    phi1: Scalar,
    a_min: Float,
    prec: Precision,
}

impl IVProblem {
    /// Validates the data and the (sampled) positivity of `a` on
    /// `[lo, hi]` using `positivity_grid` Chebyshev-distributed nodes.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a: Expr,
        lo: &Float,
        hi: &Float,
        eps: &Float,
        phi0: Scalar,
        phi1: Scalar,
        positivity_grid: usize,
        prec: Precision,
    ) -> Result<IVProblem> {
        if !(eps.is_finite() && *eps > 0 && *eps < 1) {
            return Err(Error::BadEpsilon {
                eps: fmt_real(eps, prec.digits()),
            });
        }
        let a_min = a.validate_positivity(lo, hi, positivity_grid, prec)?;
        Ok(IVProblem {
            a,
            lo: Float::with_val(prec.bits(), lo),
            hi: Float::with_val(prec.bits(), hi),
            eps: Float::with_val(prec.bits(), eps),
            phi0,
            phi1,
            a_min,
            prec,
        })
    }

    pub fn a(&self) -> &Expr {
        &self.a
    }

    pub fn lo(&self) -> &Float {
        &self.lo
    }

    pub fn hi(&self) -> &Float {
        &self.hi
    }

    pub fn eps(&self) -> &Float {
        &self.eps
    }

    pub fn phi0(&self) -> &Scalar {
        &self.phi0
    }

    pub fn phi1(&self) -> &Scalar {
        &self.phi1
    }

    /// Minimum of `a` over the validation sample (a positivity certificate
    /// for the sampled nodes only).
    pub fn a_min(&self) -> &Float {
        &self.a_min
    }

    pub fn prec(&self) -> Precision {
        self.prec
    }
}

/// Everything `ε`-independent about the phase series of one coefficient
/// function on one interval: for each `n = 0..=n_max`, the minus-branch
/// node values of `S_n′`, its Chebyshev series, the antiderivative `S_n`
/// (zero at `lo`), its sup-norm, and the boundary value `S_n′(lo)`.
#[derive(Clone, Debug)]
pub struct PhaseTable {
    grid: ChebGrid,
    n_max: usize,
    /// `node_values[n][k]` = `(S_n^-)′` at grid node `x_k`.
    node_values: Vec<Vec<Scalar>>,
    /// Chebyshev series of `(S_n^-)′`.
    s_prime: Vec<ChebSeries>,
    /// Chebyshev series of `S_n^-` (antiderivative, zero at `lo`).
    s: Vec<ChebSeries>,
    /// Sup-norm estimates of `(S_n^-)′` on the refined grid.
    sup_norms: Vec<Float>,
    /// `(S_n^-)′(lo)` — the matching denominators live here.
    boundary: Vec<Scalar>,
    prec: Precision,
}

impl PhaseTable {
    /// Runs the phase recurrence for `a` on `[lo, hi]` up to order `n_max`
    /// on a degree-`m` Chebyshev grid.
    ///
    /// Positivity of `a` is re-validated on a sample grid first (callers
    /// holding an [`IVProblem`] have already paid this; it is cheap compared
    /// to the recurrence and turns a downstream jet-domain error into a
    /// direct diagnostic). Node computations run in parallel.
    pub fn build(
        a: &Expr,
        lo: &Float,
        hi: &Float,
        n_max: usize,
        m: usize,
        prec: Precision,
    ) -> Result<PhaseTable> {
        let sample = DEFAULT_POSITIVITY_GRID.max(4 * m + 1);
        a.validate_positivity(lo, hi, sample, prec)?;
        let grid = ChebGrid::new(lo, hi, m, prec)?;

        // Per-node jet recurrence, parallel across nodes. Each node yields
        // the column of values (S_0′ .. S_{n_max}′)(x_k).
        let columns: Vec<Vec<Scalar>> = grid
            .nodes()
            .par_iter()
            .map(|x| Self::node_column(a, x, n_max, prec))
            .collect::<Result<Vec<_>>>()?;

        // Transpose columns into per-n rows and build the series.
        let mut node_values = Vec::with_capacity(n_max + 1);
        let mut s_prime = Vec::with_capacity(n_max + 1);
        let mut s = Vec::with_capacity(n_max + 1);
        let mut sup_norms = Vec::with_capacity(n_max + 1);
        let mut boundary = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let row: Vec<Scalar> = columns.iter().map(|col| col[n].clone()).collect();
            let series = ChebSeries::from_values(&grid, &row)?;
            let anti = series.antiderivative();
            let norm = series.sup_norm(SUP_NORM_REFINEMENT)?;
            boundary.push(row[m].clone());
            node_values.push(row);
            s_prime.push(series);
            s.push(anti);
            sup_norms.push(norm);
        }
        Ok(PhaseTable {
            grid,
            n_max,
            node_values,
            s_prime,
            s,
            sup_norms,
            boundary,
            prec,
        })
    }

    /// The jet recurrence at a single point: returns the order-0
    /// coefficients of `(S_n^-)′` for `n = 0..=n_max`, with the jet of
    /// `S_n′` carried to order `n_max + 2 − n`.
    fn node_column(a: &Expr, x: &Float, n_max: usize, prec: Precision) -> Result<Vec<Scalar>> {
        let top_order = n_max + 2;
        let jet_a = a.eval_jet(x, top_order, prec)?;
        let neg_i = Scalar::i(prec).conj();
        let two = Scalar::from_i64(2, prec);
        let four = Scalar::from_i64(4, prec);

        let mut jets: Vec<Jet> = Vec::with_capacity(n_max + 1);
        // S_0′ = −i√a at full order.
        jets.push(jet_a.sqrt()?.scale(&neg_i));
        if n_max >= 1 {
            // S_1′ = −a′/(4a), one order lower.
            let a_deriv = jet_a.derivative()?;
            let denom = jet_a.truncated(top_order - 1).scale(&four);
            jets.push(a_deriv.div(&denom)?.neg());
        }
        for n in 2..=n_max {
            let order_n = top_order - n;
            // Σ_{j=1}^{n−1} S_j′ S_{n−j}′, truncated to this level's order.
            let mut acc = jets[1]
                .truncated(order_n)
                .mul(&jets[n - 1].truncated(order_n))?;
            for j in 2..n {
                let prod = jets[j]
                    .truncated(order_n)
                    .mul(&jets[n - j].truncated(order_n))?;
                acc = acc.add(&prod)?;
            }
            // S_{n−1}″ from the stored jet of S_{n−1}′ (order drops by one,
            // landing exactly on order_n).
            acc = acc.add(&jets[n - 1].derivative()?)?;
            let denom = jets[0].truncated(order_n).scale(&two);
            jets.push(acc.div(&denom)?.neg());
        }
        Ok(jets.iter().map(|j| j.coeff(0).clone()).collect())
    }

    pub fn grid(&self) -> &ChebGrid {
        &self.grid
    }

    pub fn lo(&self) -> &Float {
        self.grid.lo()
    }

    pub fn hi(&self) -> &Float {
        self.grid.hi()
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Chebyshev degree `M` of the underlying grid.
    pub fn m(&self) -> usize {
        self.grid.degree()
    }

    pub fn prec(&self) -> Precision {
        self.prec
    }

    fn check_order(&self, n: usize) -> Result<()> {
        if n > self.n_max {
            return Err(Error::OrderOutOfRange {
                n,
                n_max: self.n_max,
            });
        }
        Ok(())
    }

    /// Node values of `(S_n^-)′` in grid order.
    pub fn node_values(&self, n: usize) -> Result<&[Scalar]> {
        self.check_order(n)?;
        Ok(&self.node_values[n])
    }

    /// Series of `(S_n^-)′`.
    pub fn s_prime(&self, n: usize) -> Result<&ChebSeries> {
        self.check_order(n)?;
        Ok(&self.s_prime[n])
    }

    /// Series of `S_n^-` (vanishes at `lo`).
    pub fn s(&self, n: usize) -> Result<&ChebSeries> {
        self.check_order(n)?;
        Ok(&self.s[n])
    }

    /// Sup-norm estimate of `(S_n^-)′`.
    pub fn sup_norm(&self, n: usize) -> Result<&Float> {
        self.check_order(n)?;
        Ok(&self.sup_norms[n])
    }

    /// All sup-norms, index = n.
    pub fn sup_norms(&self) -> &[Float] {
        &self.sup_norms
    }

    /// Boundary value `(S_n^-)′(lo)`.
    pub fn boundary_value(&self, n: usize) -> Result<&Scalar> {
        self.check_order(n)?;
        Ok(&self.boundary[n])
    }

    /// Plus-branch series `((S_n^+)′, S_n^+)` materialized from the sign
    /// symmetry: even `n` negates the minus branch, odd `n` copies it.
    pub fn plus_branch_series(&self, n: usize) -> Result<(ChebSeries, ChebSeries)> {
        self.check_order(n)?;
        if n.is_multiple_of(2) {
            Ok((self.s_prime[n].neg(), self.s[n].neg()))
        } else {
            Ok((self.s_prime[n].clone(), self.s[n].clone()))
        }
    }

    /// Escalates the tail-resolution warning to an error: the degree-`m`
    /// interpolation of `(S_0^-)′ = −i√a` must be resolved (last two
    /// Chebyshev coefficients below `10^(8−P)` of the largest).
    pub fn require_resolved(&self) -> Result<()> {
        if !self.s_prime[0].is_resolved() {
            return Err(Error::Unresolved { m: self.m() });
        }
        Ok(())
    }

    /// Matching coefficients `(α, β)` so that the order-`n` ansatz takes the
    /// data `(φ0, φ1)` at `lo`:
    ///
    /// ```text
    /// A = Σ_{k=0}^{n} ε^k (S_k^+)′(lo),   B = Σ_{k=0}^{n} ε^k (S_k^-)′(lo),
    /// α = (φ0·A − φ1)/(A − B),            β = (φ1 − φ0·B)/(A − B).
    /// ```
    ///
    /// The denominator is `2i√(a(lo)) + O(ε²)`; it is guarded against
    /// large-`ε` misuse by the threshold `10^(6−P)`.
    pub fn match_initial_conditions(
        &self,
        eps: &Float,
        n: usize,
        phi0: &Scalar,
        phi1: &Scalar,
    ) -> Result<(Scalar, Scalar)> {
        self.check_order(n)?;
        if !(eps.is_finite() && *eps > 0) {
            return Err(Error::BadEpsilon {
                eps: fmt_real(eps, self.prec.digits()),
            });
        }
        let (a_sum, b_sum) = self.boundary_sums(eps, n);
        let d = &a_sum - &b_sum;
        let threshold = self.prec.pow10(6 - self.prec.digits() as i32);
        if d.abs() <= threshold {
            return Err(Error::IllConditionedMatching {
                magnitude: fmt_real(&d.abs(), self.prec.digits()),
                threshold: fmt_real(&threshold, self.prec.digits()),
            });
        }
        let alpha = &(&(phi0 * &a_sum) - phi1) / &d;
        let beta = &(phi1 - &(phi0 * &b_sum)) / &d;
        Ok((alpha, beta))
    }

    /// `(A, B)` = plus/minus boundary sums `Σ ε^k (S_k^±)′(lo)`.
    fn boundary_sums(&self, eps: &Float, n: usize) -> (Scalar, Scalar) {
        let bits = self.prec.bits();
        let mut a_sum = Scalar::zero(self.prec);
        let mut b_sum = Scalar::zero(self.prec);
        let mut eps_pow = Float::with_val(bits, 1);
        for (k, b_k) in self.boundary.iter().take(n + 1).enumerate() {
            let term = b_k.scale_real(&eps_pow);
            b_sum += &term;
            if k % 2 == 0 {
                a_sum -= &term;
            } else {
                a_sum += &term;
            }
            eps_pow *= eps;
        }
        (a_sum, b_sum)
    }
}

/// A matched order-`N` approximation for one problem, borrowing the
/// (shared, `ε`-independent) phase table.
#[derive(Clone, Debug)]
pub struct WKBSolution<'a> {
    table: &'a PhaseTable,
    eps: Float,
    n: usize,
    alpha: Scalar,
    beta: Scalar,
    prec: Precision,
}

impl<'a> WKBSolution<'a> {
    /// Matches the problem's initial data at truncation order `n`.
    ///
    /// The table must cover the problem's interval (equal endpoints) and
    /// must have been built for the same coefficient function — the latter
    /// is the caller's contract and is not re-derivable from the table.
    pub fn new(table: &'a PhaseTable, problem: &IVProblem, n: usize) -> Result<WKBSolution<'a>> {
        if table.lo() != problem.lo() || table.hi() != problem.hi() {
            return Err(Error::GridMismatch {
                detail: format!(
                    "table interval [{}, {}] != problem interval [{}, {}]",
                    fmt_real(table.lo(), 6),
                    fmt_real(table.hi(), 6),
                    fmt_real(problem.lo(), 6),
                    fmt_real(problem.hi(), 6)
                ),
            });
        }
        let (alpha, beta) =
            table.match_initial_conditions(problem.eps(), n, problem.phi0(), problem.phi1())?;
        Ok(WKBSolution {
            table,
            eps: problem.eps().clone(),
            n,
            alpha,
            beta,
            prec: table.prec(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> &Scalar {
        &self.alpha
    }

    pub fn beta(&self) -> &Scalar {
        &self.beta
    }

    /// Both branch exponents `E^± = Σ_{n=0}^{N} ε^{n−1} S_n^±(x)`, guarded
    /// against exponential blow-up.
    fn exponents(&self, x: &Float) -> Result<(Scalar, Scalar)> {
        let bits = self.prec.bits();
        let mut e_minus = Scalar::zero(self.prec);
        let mut e_plus = Scalar::zero(self.prec);
        // ε^{n−1} starting at n = 0.
        let mut eps_pow = Float::with_val(bits, 1) / &self.eps;
        for n in 0..=self.n {
            let s_n = self.table.s(n)?.eval(x)?;
            let term = s_n.scale_real(&eps_pow);
            e_minus += &term;
            if n.is_multiple_of(2) {
                e_plus -= &term;
            } else {
                e_plus += &term;
            }
            eps_pow *= &self.eps;
        }
        for e in [&e_minus, &e_plus] {
            if !(*e.re() < EXPONENT_GUARD) {
                return Err(Error::ExponentOverflow {
                    re: fmt_real(e.re(), 6),
                    limit: format!("{EXPONENT_GUARD:e}"),
                });
            }
        }
        Ok((e_minus, e_plus))
    }

    /// Both branch phase-derivative sums `Σ_{n=0}^{N} ε^n (S_n^±)′(x)`.
    fn phase_sums(&self, x: &Float) -> Result<(Scalar, Scalar)> {
        let bits = self.prec.bits();
        let mut p_minus = Scalar::zero(self.prec);
        let mut p_plus = Scalar::zero(self.prec);
        let mut eps_pow = Float::with_val(bits, 1);
        for n in 0..=self.n {
            let d_n = self.table.s_prime(n)?.eval(x)?;
            let term = d_n.scale_real(&eps_pow);
            p_minus += &term;
            if n.is_multiple_of(2) {
                p_plus -= &term;
            } else {
                p_plus += &term;
            }
            eps_pow *= &self.eps;
        }
        Ok((p_minus, p_plus))
    }

    /// `φ_N(x) = α·exp(E^-) + β·exp(E^+)`.
    pub fn evaluate(&self, x: &Float) -> Result<Scalar> {
        let (e_minus, e_plus) = self.exponents(x)?;
        let mut value = &self.alpha * &e_minus.exp();
        value += &(&self.beta * &e_plus.exp());
        Ok(value)
    }

    /// `ε·φ_N′(x) = α·exp(E^-)·Σ ε^n (S_n^-)′ + β·exp(E^+)·Σ ε^n (S_n^+)′`.
    pub fn evaluate_scaled_derivative(&self, x: &Float) -> Result<Scalar> {
        Ok(self.evaluate_with_derivative(x)?.1)
    }

    /// `(φ_N(x), ε·φ_N′(x))` sharing the exponent work.
    pub fn evaluate_with_derivative(&self, x: &Float) -> Result<(Scalar, Scalar)> {
        let (e_minus, e_plus) = self.exponents(x)?;
        let (p_minus, p_plus) = self.phase_sums(x)?;
        let w_minus = &self.alpha * &e_minus.exp();
        let w_plus = &self.beta * &e_plus.exp();
        let mut phi = w_minus.clone();
        phi += &w_plus;
        let mut dphi = &w_minus * &p_minus;
        dphi += &(&w_plus * &p_plus);
        Ok((phi, dphi))
    }
}
