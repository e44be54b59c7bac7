//! Ground-truth reference solutions.
//!
//! Two independent routes:
//!
//! 1. **Analytic** — for the linear coefficient `a(x) = x` the problem has
//!    the closed-form solution `φ(x) = c_A·Ai(−x ε^{−2/3}) + c_B·Bi(−x
//!    ε^{−2/3})`; the Airy pair is evaluated by Maclaurin series with
//!    adaptively chosen guard digits (the series cancels ≈ `0.29·|t|^{3/2}`
//!    decimal digits, so the working precision is raised until two
//!    evaluations agree to the requested digits).
//! 2. **Brute force** — a fixed-step Taylor one-step method of order 32 on
//!    the scaled system `(φ, εφ′)`, with the step halved until two runs
//!    agree to the requested tolerance. Expensive (cost ∝ 1/ε) but makes no
//!    use of the phase recurrence, Chebyshev machinery, or special
//!    functions, so it cross-checks everything else.
//!
//! The two routes are deliberately kept independent; tests compare them
//! against each other rather than trusting either alone.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::scalar::{fmt_real, Precision, Scalar};
use crate::wkb::IVProblem;
use rug::{ops::Pow, Assign, Float};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Largest `|t|` accepted by [`airy_pair`]. Beyond this the Maclaurin
/// cancellation (≈ 0.29·|t|^{3/2} digits ≈ 73 at the limit) makes the
/// adaptive precision loop disproportionately expensive; asymptotic
/// expansions are out of scope.
pub const AIRY_T_MAX: f64 = 40.0;

/// Taylor order of the brute-force one-step integrator.
const TAYLOR_ORDER: usize = 32;

/// Step-halving budget of the brute-force integrator.
const MAX_HALVINGS: usize = 14;

/// Which route produced an [`OracleSolution`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleMethod {
    AiryAnalytic,
    BruteForceOde,
}

/// A reference solution sampled on a grid: `φ` and the scaled derivative
/// `εφ′`, plus an achieved-tolerance estimate.
#[derive(Clone, Debug)]
pub struct OracleSolution {
    xs: Vec<Float>,
    phi: Vec<Scalar>,
    eps_dphi: Vec<Scalar>,
    tol: Float,
    method: OracleMethod,
}

impl OracleSolution {
    /// Assembles a solution from parts, validating the lengths.
    pub fn from_parts(
        xs: Vec<Float>,
        phi: Vec<Scalar>,
        eps_dphi: Vec<Scalar>,
        tol: Float,
        method: OracleMethod,
    ) -> Result<OracleSolution> {
        if phi.len() != xs.len() || eps_dphi.len() != xs.len() {
            return Err(Error::LengthMismatch {
                expected: xs.len(),
                got: phi.len().min(eps_dphi.len()),
            });
        }
        Ok(OracleSolution {
            xs,
            phi,
            eps_dphi,
            tol,
            method,
        })
    }

    pub fn xs(&self) -> &[Float] {
        &self.xs
    }

    pub fn phi(&self) -> &[Scalar] {
        &self.phi
    }

    pub fn eps_dphi(&self) -> &[Scalar] {
        &self.eps_dphi
    }

    /// Achieved-tolerance estimate (self-consistency scale, not a rigorous
    /// bound).
    pub fn tol(&self) -> &Float {
        &self.tol
    }

    pub fn method(&self) -> OracleMethod {
        self.method
    }
}

// ---------------------------------------------------------------------------
// Gamma (Spouge's approximation)
// ---------------------------------------------------------------------------

/// Γ(z) for `z ∈ (0, 1]` by Spouge's approximation with the parameter sized
/// for the requested precision, computed with 64 guard bits.
pub fn gamma_spouge(z: &Float, bits: u32) -> Float {
    let work = bits + 64;
    let digits = f64::from(bits) / std::f64::consts::LOG2_10;
    // Relative error ~ (2π)^{-(a+1/2)}: a grows like digits / log10(2π).
    let a_param = ((digits + 6.0) / std::f64::consts::TAU.log10()).ceil() as u32 + 3;

    let z = Float::with_val(work, z);
    let two_pi = Float::with_val(work, rug::float::Constant::Pi) * 2u32;
    let mut sum = two_pi.sqrt();
    let mut ln_fact = Float::new(work); // ln((k-1)!) accumulated
    for k in 1..a_param {
        if k >= 2 {
            ln_fact += Float::with_val(work, k - 1).ln();
        }
        // c_k = (−1)^{k−1}/(k−1)! · (a−k)^{k−1/2} · e^{a−k}
        let a_minus_k = Float::with_val(work, a_param - k);
        let mut ln_c = Float::with_val(work, &a_minus_k).ln();
        ln_c *= Float::with_val(work, k) - Float::with_val(work, 0.5);
        ln_c += &a_minus_k;
        ln_c -= &ln_fact;
        let mut term = ln_c.exp();
        term /= Float::with_val(work, &z + k);
        if k % 2 == 0 {
            sum -= &term;
        } else {
            sum += &term;
        }
    }

    // Γ(z+1) = (z+a)^{z+1/2} e^{−(z+a)} · sum;  Γ(z) = Γ(z+1)/z.
    let z_plus_a = Float::with_val(work, &z + a_param);
    let mut ln_front = z_plus_a.clone().ln();
    ln_front *= Float::with_val(work, &z + 0.5f64);
    ln_front -= &z_plus_a;
    let mut result = ln_front.exp();
    result *= &sum;
    result /= &z;
    Float::with_val(bits, &result)
}

/// The Maclaurin normalization constants `c1 = Ai(0) = 3^{−2/3}/Γ(2/3)` and
/// `c2 = −Ai′(0) = 3^{−1/3}/Γ(1/3)`, cached per working precision.
fn airy_constants(bits: u32) -> (Float, Float) {
    static CACHE: OnceLock<Mutex<HashMap<u32, (Float, Float)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("airy constant cache poisoned");
    map.entry(bits)
        .or_insert_with(|| {
            let third = Float::with_val(bits + 32, 1) / 3u32;
            let two_thirds = Float::with_val(bits + 32, 2) / 3u32;
            let three = Float::with_val(bits + 32, 3);
            let g13 = gamma_spouge(&third, bits + 32);
            let g23 = gamma_spouge(&two_thirds, bits + 32);
            let neg_third = -third.clone();
            let neg_two_thirds = -two_thirds.clone();
            let c1 = three.clone().pow(&neg_two_thirds) / &g23;
            let c2 = three.pow(&neg_third) / &g13;
            (Float::with_val(bits, &c1), Float::with_val(bits, &c2))
        })
        .clone()
}

/// One Maclaurin sum `Σ term_k` with `term_{k} = term_{k−1}·t³/den(k)`,
/// starting from `term_{k0}` = `start`. Stops when terms are decreasing and
/// negligible against the largest term seen (cancellation is the caller's
/// problem — it sizes the working precision).
fn sum_series(
    start: Float,
    t3: &Float,
    k0: u64,
    den: impl Fn(u64) -> u64,
    bits: u32,
) -> Float {
    let mut term = start;
    let mut sum = term.clone();
    let mut max_abs = term.clone().abs();
    for k in (k0 + 1)..200_000 {
        term *= t3;
        term /= Float::with_val(bits, den(k));
        sum += &term;
        let abs = term.clone().abs();
        if abs > max_abs {
            max_abs.assign(&abs);
        } else {
            let threshold = max_abs.clone() >> (bits + 16);
            if abs < threshold {
                break;
            }
        }
    }
    sum
}

/// The four Maclaurin sums `(f, g, f′, g′)` at one working precision.
fn airy_series(t: &Float, bits: u32) -> (Float, Float, Float, Float) {
    let t = Float::with_val(bits, t);
    let t3 = Float::with_val(bits, &t * &t) * &t;
    let f = sum_series(Float::with_val(bits, 1), &t3, 0, |k| (3 * k) * (3 * k - 1), bits);
    let g = sum_series(t.clone(), &t3, 0, |k| (3 * k + 1) * (3 * k), bits);
    let fp = sum_series(
        Float::with_val(bits, &t * &t) / 2u32,
        &t3,
        1,
        |k| (3 * k - 1) * (3 * k - 3),
        bits,
    );
    let gp = sum_series(Float::with_val(bits, 1), &t3, 0, |k| (3 * k) * (3 * k - 2), bits);
    (f, g, fp, gp)
}

/// `(Ai, Bi, Ai′, Bi′)` at one working precision, from the Maclaurin sums.
fn airy_quartet(t: &Float, bits: u32) -> (Float, Float, Float, Float) {
    let (c1, c2) = airy_constants(bits);
    let (f, g, fp, gp) = airy_series(t, bits);
    let sqrt3 = Float::with_val(bits, 3).sqrt();
    let combine = |u: &Float, v: &Float| -> (Float, Float) {
        let mut ai = Float::with_val(bits, &c1 * u);
        let bi_term = Float::with_val(bits, &c2 * v);
        let mut bi = Float::with_val(bits, &ai + &bi_term);
        bi *= &sqrt3;
        ai -= &bi_term;
        (ai, bi)
    };
    let (ai, bi) = combine(&f, &g);
    let (aip, bip) = combine(&fp, &gp);
    (ai, bi, aip, bip)
}

/// `(Ai, Bi, Ai′, Bi′)` at `t ≤ 0`, `|t| ≤ 40`, correct to the context's
/// `P` digits.
///
/// The Maclaurin series loses ≈ `(2/3)|t|^{3/2}/ln 10` digits to
/// cancellation; the evaluation starts with that many guard digits plus
/// slack and re-evaluates at two precisions, raising them until the two
/// agree to `P` digits (scaled by the largest component, which is bounded
/// away from zero since `Ai` and `Bi` have no common zeros).
pub fn airy_pair(t: &Float, prec: Precision) -> Result<(Float, Float, Float, Float)> {
    if !t.is_finite() || *t > 0 || t.clone().abs() > AIRY_T_MAX {
        return Err(Error::AiryOutOfRange {
            t: fmt_real(t, prec.digits().min(17)),
            t_max: format!("{AIRY_T_MAX}"),
        });
    }
    let digits = prec.digits();
    let abs_t = t.clone().abs().to_f64();
    let cancel_digits = (0.30 * abs_t.powf(1.5)).ceil() as u32 + 15;
    let out_bits = prec.bits();

    let mut guard = cancel_digits;
    for _attempt in 0..20 {
        let w1 = crate::scalar::bits_for_digits(digits + guard);
        let w2 = crate::scalar::bits_for_digits(digits + guard + 10);
        let a1 = airy_quartet(t, w1);
        let a2 = airy_quartet(t, w2);
        let scale = {
            let mut s = Float::with_val(w2, 1);
            for v in [&a2.0, &a2.1, &a2.2, &a2.3] {
                let abs = v.clone().abs();
                if abs > s {
                    s.assign(&abs);
                }
            }
            s
        };
        let tolerance = scale * prec.pow10(-(digits as i32));
        let agree = [
            (&a1.0, &a2.0),
            (&a1.1, &a2.1),
            (&a1.2, &a2.2),
            (&a1.3, &a2.3),
        ]
        .iter()
        .all(|(u, v)| Float::with_val(w2, *u - *v).abs() <= tolerance);
        if agree {
            return Ok((
                Float::with_val(out_bits, &a2.0),
                Float::with_val(out_bits, &a2.1),
                Float::with_val(out_bits, &a2.2),
                Float::with_val(out_bits, &a2.3),
            ));
        }
        guard += 20;
    }
    Err(Error::OracleFailure {
        detail: format!(
            "Airy adaptive precision did not converge at t = {}",
            fmt_real(t, 17)
        ),
    })
}

// ---------------------------------------------------------------------------
// Analytic oracle (a(x) = x)
// ---------------------------------------------------------------------------

/// Exact solution of `ε²φ″ + xφ = 0` through the problem's initial data,
/// sampled at `xs`: `φ(x) = c_A·Ai(t) + c_B·Bi(t)` with `t = −x·ε^{−2/3}`,
/// the coefficients solved from the data by Cramer's rule (the system's
/// determinant is `−ε^{1/3}/π`, never small).
///
/// Requires the coefficient expression to be literally `x`; any other
/// expression — even one algebraically equal to `x` — is refused, because
/// the closed form is specific to this coefficient.
pub fn airy_analytic(problem: &IVProblem, xs: &[Float]) -> Result<OracleSolution> {
    if *problem.a() != Expr::Var {
        return Err(Error::Unsupported {
            detail: format!(
                "analytic oracle requires the coefficient `x`, got `{}`",
                problem.a()
            ),
        });
    }
    let prec = problem.prec();
    let bits = prec.bits();
    let eps = problem.eps();
    // ε^{−2/3} and ε^{1/3} via ln/exp (ε > 0 is guaranteed by IVProblem).
    let ln_eps = Float::with_val(bits, eps).ln();
    let em23 = (Float::with_val(bits, &ln_eps * -2i32) / 3u32).exp();
    let e13 = (Float::with_val(bits, &ln_eps) / 3u32).exp();

    // Boundary data → (c_A, c_B) by Cramer's rule on
    //   c_A·Ai(t0)            + c_B·Bi(t0)            = φ0
    //   c_A·(−ε^{1/3}Ai′(t0)) + c_B·(−ε^{1/3}Bi′(t0)) = φ1
    let t0 = -Float::with_val(bits, problem.lo() * &em23);
    let (ai0, bi0, aip0, bip0) = airy_pair(&t0, prec)?;
    let m10 = -Float::with_val(bits, &e13 * &aip0);
    let m11 = -Float::with_val(bits, &e13 * &bip0);
    let det = Float::with_val(bits, &ai0 * &m11) - Float::with_val(bits, &bi0 * &m10);
    let phi0 = problem.phi0();
    let phi1 = problem.phi1();
    let mut c_a = phi0.scale_real(&m11);
    {
        let t = phi1.scale_real(&bi0);
        c_a -= &t;
    }
    let inv_det = Float::with_val(bits, 1) / &det;
    let c_a = c_a.scale_real(&inv_det);
    let mut c_b = phi1.scale_real(&ai0);
    {
        let t = phi0.scale_real(&m10);
        c_b -= &t;
    }
    let c_b = c_b.scale_real(&inv_det);

    let mut phi = Vec::with_capacity(xs.len());
    let mut eps_dphi = Vec::with_capacity(xs.len());
    let neg_e13 = -e13.clone();
    for x in xs {
        let t = -Float::with_val(bits, x * &em23);
        let (ai, bi, aip, bip) = airy_pair(&t, prec)?;
        let mut value = c_a.scale_real(&ai);
        {
            let t2 = c_b.scale_real(&bi);
            value += &t2;
        }
        let mut deriv = c_a.scale_real(&aip);
        {
            let t2 = c_b.scale_real(&bip);
            deriv += &t2;
        }
        phi.push(value);
        eps_dphi.push(deriv.scale_real(&neg_e13));
    }
    OracleSolution::from_parts(
        xs.to_vec(),
        phi,
        eps_dphi,
        prec.pow10(6 - prec.digits() as i32),
        OracleMethod::AiryAnalytic,
    )
}

/// The standard oscillatory initial data for the linear-coefficient test
/// problem: `φ0 = Ai(t0) + i·Bi(t0)`, `φ1 = −ε^{1/3}(Ai′(t0) + i·Bi′(t0))`
/// with `t0 = −ξ·ε^{−2/3}`, so that the exact solution is
/// `Ai(−x·ε^{−2/3}) + i·Bi(−x·ε^{−2/3})`.
pub fn airy_initial_data(xi: &Float, eps: &Float, prec: Precision) -> Result<(Scalar, Scalar)> {
    let bits = prec.bits();
    if !(eps.is_finite() && *eps > 0) {
        return Err(Error::BadEpsilon {
            eps: fmt_real(eps, prec.digits()),
        });
    }
    let ln_eps = Float::with_val(bits, eps).ln();
    let em23 = (Float::with_val(bits, &ln_eps * -2i32) / 3u32).exp();
    let e13 = (Float::with_val(bits, &ln_eps) / 3u32).exp();
    let t0 = -Float::with_val(bits, xi * &em23);
    let (ai, bi, aip, bip) = airy_pair(&t0, prec)?;
    let phi0 = Scalar::new(ai, bi);
    let neg_e13 = -e13;
    let phi1 = Scalar::new(
        Float::with_val(bits, &aip * &neg_e13),
        Float::with_val(bits, &bip * &neg_e13),
    );
    Ok((phi0, phi1))
}

// ---------------------------------------------------------------------------
// Brute-force integrator
// ---------------------------------------------------------------------------

/// One Taylor step of order [`TAYLOR_ORDER`]: given `(φ, εφ′)` at `x`,
/// returns them at `x + h`, using the local Taylor coefficients
/// `ε²(k+2)(k+1)c_{k+2} = −Σ_j a_j c_{k−j}` (from the ODE) with the jet of
/// `a` at `x`.
fn taylor_step(
    a: &Expr,
    x: &Float,
    u: &Scalar,
    v: &Scalar,
    h: &Float,
    eps: &Float,
    prec: Precision,
) -> Result<(Scalar, Scalar)> {
    let bits = prec.bits();
    let q = TAYLOR_ORDER;
    let a_jet = a.eval_jet(x, q - 2, prec)?;
    let a_coeffs = a_jet.coeffs();
    let eps_sq = Float::with_val(bits, eps * eps);

    let mut c: Vec<Scalar> = Vec::with_capacity(q + 1);
    c.push(u.clone());
    // c_1 = φ′(x) = v/ε.
    let inv_eps = Float::with_val(bits, 1) / eps;
    c.push(v.scale_real(&inv_eps));
    let mut tmp = Float::new(bits);
    for k in 0..=(q - 2) {
        let mut acc = Scalar::zero(prec);
        for (j, a_j) in a_coeffs.iter().take(k + 1).enumerate() {
            acc.mul_acc(a_j, &c[k - j], &mut tmp);
        }
        let denom = Float::with_val(bits, ((k + 2) * (k + 1)) as u64) * &eps_sq;
        let inv = Float::with_val(bits, -1) / &denom;
        c.push(acc.scale_real(&inv));
    }

    // Horner for φ(x+h) and φ′(x+h).
    let mut phi = c[q].clone();
    for k in (0..q).rev() {
        phi = phi.scale_real(h);
        phi += &c[k];
    }
    let mut dphi = c[q].scale_real(&Float::with_val(bits, q as u64));
    for k in (1..q).rev() {
        dphi = dphi.scale_real(h);
        let term = c[k].scale_real(&Float::with_val(bits, k as u64));
        dphi += &term;
    }
    Ok((phi, dphi.scale_real(eps)))
}

/// One fixed-step run over the grid: integrates from `lo` through each
/// target in `xs` (ascending), stepping in sub-steps of at most `h`.
fn integrate_run(
    problem: &IVProblem,
    xs: &[Float],
    h: &Float,
) -> Result<(Vec<Scalar>, Vec<Scalar>)> {
    let prec = problem.prec();
    let bits = prec.bits();
    let mut x = problem.lo().clone();
    let mut u = problem.phi0().clone();
    let mut v = problem.phi1().clone();
    let mut phi = Vec::with_capacity(xs.len());
    let mut eps_dphi = Vec::with_capacity(xs.len());
    for target in xs {
        let seg = Float::with_val(bits, target - &x);
        if seg.is_sign_negative() && !seg.is_zero() {
            return Err(Error::GridMismatch {
                detail: "integrator grid must be ascending".to_owned(),
            });
        }
        if !seg.is_zero() {
            let ratio = Float::with_val(53, &seg / h).to_f64();
            let n_steps = ratio.ceil().max(1.0) as u64;
            let mut x_cur = x.clone();
            for i in 0..n_steps {
                let x_next = if i + 1 == n_steps {
                    target.clone()
                } else {
                    let mut t = Float::with_val(bits, &seg * (i + 1));
                    t /= n_steps;
                    t += &x;
                    t
                };
                let h_step = Float::with_val(bits, &x_next - &x_cur);
                let (nu, nv) = taylor_step(problem.a(), &x_cur, &u, &v, &h_step, problem.eps(), prec)?;
                u = nu;
                v = nv;
                x_cur = x_next;
            }
            x = x_cur;
        }
        phi.push(u.clone());
        eps_dphi.push(v.clone());
    }
    Ok((phi, eps_dphi))
}

/// Brute-force reference solution: order-32 Taylor stepping with the step
/// halved until two successive runs agree to `tol` on the grid (both `φ`
/// and `εφ′`). Returns the **finer** run, whose own error is smaller than
/// the measured inter-run difference by roughly `2^{32}`.
///
/// Cost grows like `1/ε`; requires `ε ≥ 10⁻⁴` and `tol ≥ 10^(8−P)`.
pub fn integrate_ivp(problem: &IVProblem, tol: &Float, xs: &[Float]) -> Result<OracleSolution> {
    let prec = problem.prec();
    let bits = prec.bits();
    if *problem.eps() < 1e-4 {
        return Err(Error::Unsupported {
            detail: "brute-force integrator requires eps >= 1e-4".to_owned(),
        });
    }
    let tol_floor = prec.pow10(8 - prec.digits() as i32);
    if !(tol.is_finite() && *tol >= tol_floor) {
        return Err(Error::Unsupported {
            detail: format!(
                "integrator tolerance must be at least 10^(8-P) = {}",
                fmt_real(&tol_floor, 3)
            ),
        });
    }
    if xs.is_empty() {
        return Err(Error::GridMismatch {
            detail: "integrator grid is empty".to_owned(),
        });
    }
    for (i, x) in xs.iter().enumerate() {
        if x < problem.lo() || x > problem.hi() {
            return Err(Error::GridMismatch {
                detail: format!("grid point {i} outside the problem interval"),
            });
        }
        if i > 0 && !(x > &xs[i - 1]) {
            return Err(Error::GridMismatch {
                detail: "integrator grid must be strictly ascending".to_owned(),
            });
        }
    }

    let mut h = Float::with_val(bits, problem.eps()) / 2u32;
    let mut prev = integrate_run(problem, xs, &h)?;
    for _ in 0..MAX_HALVINGS {
        h /= 2u32;
        let cur = integrate_run(problem, xs, &h)?;
        let mut diff = Float::new(bits);
        for i in 0..xs.len() {
            for (a, b) in [(&cur.0[i], &prev.0[i]), (&cur.1[i], &prev.1[i])] {
                let d = (a - b).abs();
                if d > diff {
                    diff.assign(&d);
                }
            }
        }
        if diff <= *tol {
            return OracleSolution::from_parts(
                xs.to_vec(),
                cur.0,
                cur.1,
                diff,
                OracleMethod::BruteForceOde,
            );
        }
        prev = cur;
    }
    Err(Error::OracleFailure {
        detail: format!(
            "step halving did not reach tolerance {} within {} halvings",
            fmt_real(tol, 3),
            MAX_HALVINGS
        ),
    })
}

/// Discrete sup-error `max_i |approx_i − oracle.phi_i|` over the shared grid.
pub fn sup_error(approx: &[Scalar], oracle: &OracleSolution) -> Result<Float> {
    if approx.len() != oracle.phi.len() {
        return Err(Error::GridMismatch {
            detail: format!(
                "approximation has {} samples, oracle {}",
                approx.len(),
                oracle.phi.len()
            ),
        });
    }
    let bits = oracle.tol.prec();
    let mut max = Float::new(bits);
    for (a, b) in approx.iter().zip(&oracle.phi) {
        let d = (a - b).abs();
        if d > max {
            max.assign(&d);
        }
    }
    Ok(max)
}
