//! Truncated Taylor-series (jet) arithmetic.
//!
//! A [`Jet`] of order K at a real point x0 stores the normalized derivatives
//! c_j = f^(j)(x0)/j! for j = 0..K. Arithmetic on jets propagates derivatives
//! exactly (up to rounding), which is how the phase recurrence obtains second
//! derivatives without any symbolic or spectral differentiation.
//!
//! Binary operations require matching expansion point and order; violations
//! are contract errors, not silent coercions. Division and square root treat
//! a leading coefficient below the context underflow threshold as zero.

use crate::error::{Error, Result};
use crate::scalar::{underflow_threshold_for_bits, Scalar};
use rug::{Assign, Float};

/// Truncated Taylor expansion at a real expansion point.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    x0: Float,
    coeffs: Vec<Scalar>,
}

impl Jet {
    /// Builds a jet from raw coefficients (c_0 first). Panics on an empty
    /// coefficient list; that is a programming error, not an input error.
    pub fn from_coeffs(x0: Float, coeffs: Vec<Scalar>) -> Jet {
        assert!(!coeffs.is_empty(), "a jet needs at least the order-0 coefficient");
        Jet { x0, coeffs }
    }

    /// Jet of a constant function.
    pub fn constant(value: Scalar, x0: &Float, order: usize) -> Jet {
        let bits = value.prec_bits();
        let mut coeffs = Vec::with_capacity(order + 1);
        coeffs.push(value);
        for _ in 0..order {
            coeffs.push(Scalar::new(Float::new(bits), Float::new(bits)));
        }
        Jet {
            x0: x0.clone(),
            coeffs,
        }
    }

    /// Jet of the identity function: coefficients (x0, 1, 0, ..., 0).
    pub fn identity(x0: &Float, order: usize) -> Jet {
        let bits = x0.prec();
        let mut coeffs = Vec::with_capacity(order + 1);
        coeffs.push(Scalar::from_real(x0.clone()));
        if order >= 1 {
            coeffs.push(Scalar::from_real(Float::with_val(bits, 1)));
        }
        for _ in 1..order {
            coeffs.push(Scalar::new(Float::new(bits), Float::new(bits)));
        }
        Jet {
            x0: x0.clone(),
            coeffs,
        }
    }

    /// Expansion point.
    pub fn x0(&self) -> &Float {
        &self.x0
    }

    /// Truncation order K (the jet stores K+1 coefficients).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient c_j = f^(j)(x0)/j!.
    pub fn coeff(&self, j: usize) -> &Scalar {
        &self.coeffs[j]
    }

    /// All coefficients, c_0 first.
    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    /// Copy truncated to a lower (or equal) order.
    pub fn truncated(&self, order: usize) -> Jet {
        assert!(order <= self.order(), "truncation cannot raise the order");
        Jet {
            x0: self.x0.clone(),
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    fn check_compatible(&self, other: &Jet) -> Result<()> {
        if self.x0 != other.x0 {
            return Err(Error::JetContract {
                detail: format!(
                    "mismatched expansion points {} and {}",
                    self.x0, other.x0
                ),
            });
        }
        if self.order() != other.order() {
            return Err(Error::JetContract {
                detail: format!(
                    "mismatched orders {} and {}",
                    self.order(),
                    other.order()
                ),
            });
        }
        Ok(())
    }

    fn bits(&self) -> u32 {
        self.coeffs[0].prec_bits()
    }

    fn zero_like(&self) -> Vec<Scalar> {
        let bits = self.bits();
        (0..self.coeffs.len())
            .map(|_| Scalar::new(Float::new(bits), Float::new(bits)))
            .collect()
    }

    /// Coefficient-wise sum.
    pub fn add(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(u, v)| u + v)
            .collect();
        Ok(Jet {
            x0: self.x0.clone(),
            coeffs,
        })
    }

    /// Coefficient-wise difference.
    pub fn sub(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(u, v)| u - v)
            .collect();
        Ok(Jet {
            x0: self.x0.clone(),
            coeffs,
        })
    }

    /// Truncated Cauchy product: w_j = sum_{i=0..j} u_i v_{j-i}.
    pub fn mul(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        let mut coeffs = self.zero_like();
        let mut tmp = Float::new(self.bits());
        for (j, w) in coeffs.iter_mut().enumerate() {
            for i in 0..=j {
                w.mul_acc(&self.coeffs[i], &other.coeffs[j - i], &mut tmp);
            }
        }
        Ok(Jet {
            x0: self.x0.clone(),
            coeffs,
        })
    }

    /// Quotient w with w * v = u to order K, computed by forward
    /// substitution: w_j = (u_j - sum_{i<j} w_i v_{j-i}) / v_0.
    pub fn div(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        let v0 = &other.coeffs[0];
        let v0_abs = v0.abs();
        if v0_abs < underflow_threshold_for_bits(self.bits()) {
            return Err(Error::JetDivisionByZero {
                magnitude: format!("{:e}", v0_abs),
            });
        }
        let v0_inv = v0.recip();
        let mut tmp = Float::new(self.bits());
        let mut coeffs: Vec<Scalar> = Vec::with_capacity(self.coeffs.len());
        for j in 0..self.coeffs.len() {
            let mut w = self.coeffs[j].clone();
            for (i, wi) in coeffs.iter().enumerate() {
                w.mul_sub(wi, &other.coeffs[j - i], &mut tmp);
            }
            coeffs.push(&w * &v0_inv);
        }
        Ok(Jet {
            x0: self.x0.clone(),
            coeffs,
        })
    }

    /// Principal square root: w_0 = sqrt(u_0) and
    /// w_j = (u_j - sum_{0<i<j} w_i w_{j-i}) / (2 w_0).
    ///
    /// Rejects leading coefficients on the principal branch cut (negative
    /// real axis) and magnitudes below the underflow threshold.
    pub fn sqrt(&self) -> Result<Jet> {
        let c0 = &self.coeffs[0];
        let on_cut = c0.im().is_zero() && c0.re().is_sign_negative() && !c0.re().is_zero();
        if on_cut || c0.abs() < underflow_threshold_for_bits(self.bits()) {
            return Err(Error::JetBranchCut {
                value: c0.to_string(),
            });
        }
        let w0 = c0.sqrt();
        let two_w0_inv = w0.scale_real(&Float::with_val(self.bits(), 2)).recip();
        let mut tmp = Float::new(self.bits());
        let mut coeffs: Vec<Scalar> = Vec::with_capacity(self.coeffs.len());
        coeffs.push(w0);
        for j in 1..self.coeffs.len() {
            let mut w = self.coeffs[j].clone();
            for i in 1..j {
                w.mul_sub(&coeffs[i], &coeffs[j - i], &mut tmp);
            }
            coeffs.push(&w * &two_w0_inv);
        }
        Ok(Jet {
            x0: self.x0.clone(),
            coeffs,
        })
    }

    /// Derivative jet of order K-1: c_j' = (j+1) c_{j+1}.
    pub fn derivative(&self) -> Result<Jet> {
        if self.order() == 0 {
            return Err(Error::JetContract {
                detail: "derivative of an order-0 jet".to_owned(),
            });
        }
        let bits = self.bits();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, c)| c.scale_real(&Float::with_val(bits, j as u32)))
            .collect();
        Ok(Jet {
            x0: self.x0.clone(),
            coeffs,
        })
    }

    /// Coefficient-wise negation.
    pub fn neg(&self) -> Jet {
        Jet {
            x0: self.x0.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    /// Multiplies every coefficient by a scalar.
    pub fn scale(&self, c: &Scalar) -> Jet {
        Jet {
            x0: self.x0.clone(),
            coeffs: self.coeffs.iter().map(|u| u * c).collect(),
        }
    }

    /// Exponential: w_0 = exp(u_0), w_k = (1/k) sum_{j=1..k} j u_j w_{k-j}.
    pub fn exp(&self) -> Jet {
        let bits = self.bits();
        let mut tmp = Float::new(bits);
        let mut coeffs: Vec<Scalar> = Vec::with_capacity(self.coeffs.len());
        coeffs.push(self.coeffs[0].exp());
        for k in 1..self.coeffs.len() {
            let mut acc = Scalar::new(Float::new(bits), Float::new(bits));
            for j in 1..=k {
                let ju = self.coeffs[j].scale_real(&Float::with_val(bits, j as u32));
                acc.mul_acc(&ju, &coeffs[k - j], &mut tmp);
            }
            let inv_k = Float::with_val(bits, k as u32).recip();
            coeffs.push(acc.scale_real(&inv_k));
        }
        Jet {
            x0: self.x0.clone(),
            coeffs,
        }
    }

    /// Principal logarithm:
    /// w_0 = ln(u_0), w_k = (u_k - (1/k) sum_{j=1..k-1} j w_j u_{k-j}) / u_0.
    ///
    /// Same branch-cut and underflow policy as [`Jet::sqrt`].
    pub fn ln(&self) -> Result<Jet> {
        let c0 = &self.coeffs[0];
        let on_cut = c0.im().is_zero() && c0.re().is_sign_negative() && !c0.re().is_zero();
        if on_cut || c0.abs() < underflow_threshold_for_bits(self.bits()) {
            return Err(Error::JetBranchCut {
                value: c0.to_string(),
            });
        }
        let bits = self.bits();
        let u0_inv = c0.recip();
        let mut tmp = Float::new(bits);
        let mut coeffs: Vec<Scalar> = Vec::with_capacity(self.coeffs.len());
        coeffs.push(c0.ln());
        for k in 1..self.coeffs.len() {
            let mut acc = Scalar::new(Float::new(bits), Float::new(bits));
            for j in 1..k {
                let jw = coeffs[j].scale_real(&Float::with_val(bits, j as u32));
                acc.mul_acc(&jw, &self.coeffs[k - j], &mut tmp);
            }
            let inv_k = Float::with_val(bits, k as u32).recip();
            let mut w = self.coeffs[k].clone();
            w -= &acc.scale_real(&inv_k);
            coeffs.push(&w * &u0_inv);
        }
        Ok(Jet {
            x0: self.x0.clone(),
            coeffs,
        })
    }

    /// Sine and cosine in one pass:
    /// s_k = (1/k) sum j u_j c_{k-j}, c_k = -(1/k) sum j u_j s_{k-j}.
    pub fn sin_cos(&self) -> (Jet, Jet) {
        let bits = self.bits();
        let mut tmp = Float::new(bits);
        let n = self.coeffs.len();
        let mut s: Vec<Scalar> = Vec::with_capacity(n);
        let mut c: Vec<Scalar> = Vec::with_capacity(n);
        s.push(self.coeffs[0].sin());
        c.push(self.coeffs[0].cos());
        for k in 1..n {
            let mut s_acc = Scalar::new(Float::new(bits), Float::new(bits));
            let mut c_acc = Scalar::new(Float::new(bits), Float::new(bits));
            for j in 1..=k {
                let ju = self.coeffs[j].scale_real(&Float::with_val(bits, j as u32));
                s_acc.mul_acc(&ju, &c[k - j], &mut tmp);
                c_acc.mul_sub(&ju, &s[k - j], &mut tmp);
            }
            let inv_k = Float::with_val(bits, k as u32).recip();
            s.push(s_acc.scale_real(&inv_k));
            c.push(c_acc.scale_real(&inv_k));
        }
        (
            Jet {
                x0: self.x0.clone(),
                coeffs: s,
            },
            Jet {
                x0: self.x0.clone(),
                coeffs: c,
            },
        )
    }

    /// Integer power by binary exponentiation; negative exponents go through
    /// the reciprocal and inherit the division underflow policy.
    pub fn powi(&self, e: i64) -> Result<Jet> {
        let bits = self.bits();
        let one = Jet::constant(
            Scalar::from_real(Float::with_val(bits, 1)),
            &self.x0,
            self.order(),
        );
        if e == 0 {
            return Ok(one);
        }
        let mut base = if e < 0 { one.div(self)? } else { self.clone() };
        let mut n = e.unsigned_abs();
        let mut acc: Option<Jet> = None;
        while n > 0 {
            if n & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base)?,
                });
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc.expect("nonzero exponent always selects at least one factor"))
    }
}

/// Scratch-free helper for tests: the antiderivative-by-coefficient-shift
/// (c_0, ..., c_K) -> (0, c_0/1, c_1/2, ..., c_{K-1}/K) at the same order.
pub fn shift_antiderivative(u: &Jet) -> Jet {
    let bits = u.coeff(0).prec_bits();
    let mut coeffs = Vec::with_capacity(u.order() + 1);
    coeffs.push(Scalar::new(Float::new(bits), Float::new(bits)));
    for j in 1..=u.order() {
        let inv = Float::with_val(bits, j as u32).recip();
        coeffs.push(u.coeff(j - 1).scale_real(&inv));
    }
    let mut x0 = Float::new(bits);
    x0.assign(u.x0());
    Jet::from_coeffs(x0, coeffs)
}
