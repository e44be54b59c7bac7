//! Chebyshev interpolation, antiderivatives, and Clenshaw–Curtis integration
//! on an interval `[lo, hi]`.
//!
//! Functions are represented by their values at the Chebyshev extreme points
//! `x_k = mid + half·cos(kπ/M)` (descending, endpoints exact) and by the
//! coefficients `b_0..b_M` of the plain sum `Σ_j b_j T_j(t)` in the mapped
//! variable `t = (2x − lo − hi)/(hi − lo)`. The transform between the two is
//! the direct O(M²) cosine sum — at extended precision and desk-scale `M`
//! an FFT would buy little and cost auditability.
//!
//! Differentiation is deliberately absent: derivatives enter this crate
//! through jets ([`crate::jet`]), never through spectral differentiation.
//! Antidifferentiation, by contrast, is spectrally stable and is provided
//! here (it divides by the mode index rather than multiplying).

use crate::error::{Error, Result};
use crate::scalar::{Precision, Scalar};
use rug::{Assign, Float};

/// Grid refinement factor used when estimating sup-norms.
pub const SUP_NORM_REFINEMENT: usize = 8;

/// Chebyshev extreme-point grid of degree `M` on `[lo, hi]`: the `M+1`
/// nodes `x_k = mid + half·cos(kπ/M)`, `k = 0..M`, strictly decreasing
/// from `hi` to `lo` with both endpoints exact.
#[derive(Clone, Debug)]
pub struct ChebGrid {
    lo: Float,
    hi: Float,
    degree: usize,
    nodes: Vec<Float>,
    /// `cos(rπ/M)` for `r = 0..=M`; shared by node construction and the
    /// coefficient transform (which folds `jk mod 2M` into this range).
    cos_table: Vec<Float>,
    prec: Precision,
}

impl ChebGrid {
    /// Builds the degree-`M` grid. Requires `lo < hi` and `degree ≥ 1`.
    pub fn new(lo: &Float, hi: &Float, degree: usize, prec: Precision) -> Result<ChebGrid> {
        if !(hi > lo) {
            return Err(Error::BadInterval {
                lo: crate::scalar::fmt_real(lo, prec.digits()),
                hi: crate::scalar::fmt_real(hi, prec.digits()),
            });
        }
        if degree < 1 {
            return Err(Error::Unsupported {
                detail: "Chebyshev grid degree must be at least 1".to_owned(),
            });
        }
        let bits = prec.bits();
        let lo = Float::with_val(bits, lo);
        let hi = Float::with_val(bits, hi);
        let mid = Float::with_val(bits, &lo + &hi) / 2u32;
        let half = Float::with_val(bits, &hi - &lo) / 2u32;
        let pi = prec.pi();
        let mut cos_table = Vec::with_capacity(degree + 1);
        for r in 0..=degree {
            let c = if r == 0 {
                Float::with_val(bits, 1)
            } else if r == degree {
                Float::with_val(bits, -1)
            } else {
                (Float::with_val(bits, &pi * (r as u32)) / (degree as u32)).cos()
            };
            cos_table.push(c);
        }
        let mut nodes = Vec::with_capacity(degree + 1);
        for (k, c) in cos_table.iter().enumerate() {
            // Endpoints are taken exactly; interior nodes via the table.
            let x = if k == 0 {
                hi.clone()
            } else if k == degree {
                lo.clone()
            } else {
                let mut x = Float::with_val(bits, c * &half);
                x += &mid;
                x
            };
            nodes.push(x);
        }
        Ok(ChebGrid {
            lo,
            hi,
            degree,
            nodes,
            cos_table,
            prec,
        })
    }

    pub fn lo(&self) -> &Float {
        &self.lo
    }

    pub fn hi(&self) -> &Float {
        &self.hi
    }

    /// Polynomial degree `M`; the grid has `M+1` nodes.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Nodes in descending order, `nodes()[0] == hi`, `nodes()[M] == lo`.
    pub fn nodes(&self) -> &[Float] {
        &self.nodes
    }

    pub fn prec(&self) -> Precision {
        self.prec
    }

    /// `cos(rπ/M)` with the transform's index folding: for any `r`,
    /// looks up `cos((r mod 2M)·π/M)` using symmetry about `π`.
    fn cos_at(&self, r: usize) -> &Float {
        let m2 = 2 * self.degree;
        let idx = r % m2;
        let folded = idx.min(m2 - idx);
        &self.cos_table[folded]
    }
}

/// Truncated Chebyshev expansion `Σ_{j=0}^{K} b_j T_j(t)` on `[lo, hi]`
/// with complex coefficients.
#[derive(Clone, Debug)]
pub struct ChebSeries {
    lo: Float,
    hi: Float,
    coeffs: Vec<Scalar>,
    prec: Precision,
}

impl ChebSeries {
    /// Wraps explicit coefficients (mostly useful in tests and for the
    /// branch-symmetry negation).
    pub fn from_coeffs(
        lo: &Float,
        hi: &Float,
        coeffs: Vec<Scalar>,
        prec: Precision,
    ) -> Result<ChebSeries> {
        if !(hi > lo) {
            return Err(Error::BadInterval {
                lo: crate::scalar::fmt_real(lo, prec.digits()),
                hi: crate::scalar::fmt_real(hi, prec.digits()),
            });
        }
        if coeffs.is_empty() {
            return Err(Error::Unsupported {
                detail: "Chebyshev series needs at least one coefficient".to_owned(),
            });
        }
        Ok(ChebSeries {
            lo: Float::with_val(prec.bits(), lo),
            hi: Float::with_val(prec.bits(), hi),
            coeffs,
            prec,
        })
    }

    /// Discrete Chebyshev transform: interpolates the `M+1` node values
    /// (ordered like [`ChebGrid::nodes`]) by a degree-`M` expansion.
    ///
    /// Direct cosine sums: `b_j = s_j Σ_k w_k v_k cos(jkπ/M)` with endpoint
    /// weights `w_0 = w_M = 1/2` and scales `s_j = 1/M` at `j ∈ {0, M}`,
    /// `2/M` otherwise. Exact (to rounding) for polynomials of degree ≤ M.
    pub fn from_values(grid: &ChebGrid, values: &[Scalar]) -> Result<ChebSeries> {
        let m = grid.degree();
        if values.len() != m + 1 {
            return Err(Error::LengthMismatch {
                expected: m + 1,
                got: values.len(),
            });
        }
        let prec = grid.prec();
        let bits = prec.bits();
        let half_scale = Float::with_val(bits, 1) / 2u32;
        // Fold the endpoint weights into a working copy once.
        let mut weighted: Vec<Scalar> = values.to_vec();
        weighted[0] = weighted[0].scale_real(&half_scale);
        weighted[m] = weighted[m].scale_real(&half_scale);

        let inv_m = Float::with_val(bits, 1) / (m as u32);
        let two_inv_m = Float::with_val(bits, 2) / (m as u32);
        let mut tmp = Float::new(bits);
        let mut coeffs = Vec::with_capacity(m + 1);
        for j in 0..=m {
            let mut acc = Scalar::zero(prec);
            for (k, v) in weighted.iter().enumerate() {
                acc.add_mul_real(v, grid.cos_at(j * k), &mut tmp);
            }
            let scale = if j == 0 || j == m { &inv_m } else { &two_inv_m };
            coeffs.push(acc.scale_real(scale));
        }
        Ok(ChebSeries {
            lo: grid.lo().clone(),
            hi: grid.hi().clone(),
            coeffs,
            prec,
        })
    }

    pub fn lo(&self) -> &Float {
        &self.lo
    }

    pub fn hi(&self) -> &Float {
        &self.hi
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    /// Highest retained mode index `K` (`coeffs` has `K+1` entries).
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Clenshaw evaluation at `x ∈ [lo, hi]`. No extrapolation: points
    /// outside the interval are rejected.
    pub fn eval(&self, x: &Float) -> Result<Scalar> {
        if x < &self.lo || x > &self.hi {
            let digits = self.prec.digits();
            return Err(Error::OutsideInterval {
                x: crate::scalar::fmt_real(x, digits),
                lo: crate::scalar::fmt_real(&self.lo, digits),
                hi: crate::scalar::fmt_real(&self.hi, digits),
            });
        }
        let bits = self.prec.bits();
        // t = (2x − lo − hi)/(hi − lo)
        let mut t = Float::with_val(bits, 2 * x);
        t -= &self.lo;
        t -= &self.hi;
        t /= Float::with_val(bits, &self.hi - &self.lo);
        let two_t = Float::with_val(bits, 2 * &t);

        let k_top = self.degree();
        let mut u1 = Scalar::zero(self.prec);
        let mut u2 = Scalar::zero(self.prec);
        let mut tmp = Float::new(bits);
        for k in (1..=k_top).rev() {
            // u = b_k + 2t·u1 − u2
            let mut u = self.coeffs[k].clone();
            u.add_mul_real(&u1, &two_t, &mut tmp);
            u -= &u2;
            u2 = u1;
            u1 = u;
        }
        // value = b_0 + t·u1 − u2
        let mut value = self.coeffs[0].clone();
        value.add_mul_real(&u1, &t, &mut tmp);
        value -= &u2;
        Ok(value)
    }

    /// Antiderivative normalized to vanish at `lo`, as a series of degree
    /// `K+1`.
    ///
    /// With `∫T_0 dt = T_1`, `∫T_1 dt = T_2/4 + c`, and
    /// `∫T_j dt = T_{j+1}/(2(j+1)) − T_{j−1}/(2(j−1))` for `j ≥ 2`, the
    /// mapped-interval coefficients are
    /// `A_1 = half·(b_0 − b_2/2)`, `A_m = half·(b_{m−1} − b_{m+1})/(2m)`
    /// for `m ≥ 2`, and `A_0` is fixed by `Σ_m (−1)^m A_m = 0`
    /// (value 0 at `t = −1`, i.e. at `x = lo`).
    pub fn antiderivative(&self) -> ChebSeries {
        let bits = self.prec.bits();
        let k_top = self.degree();
        let half = Float::with_val(bits, &self.hi - &self.lo) / 2u32;
        let zero = Scalar::zero(self.prec);
        let b = |m: usize| -> &Scalar { self.coeffs.get(m).unwrap_or(&zero) };

        let mut coeffs = vec![Scalar::zero(self.prec); k_top + 2];
        // A_1 = half·(b_0 − b_2/2)
        let half_scale = Float::with_val(bits, &half) / 2u32;
        let mut a1 = b(0).scale_real(&half);
        let mut tmp = Float::new(bits);
        {
            let neg_half_scale = Float::with_val(bits, -&half_scale);
            a1.add_mul_real(b(2), &neg_half_scale, &mut tmp);
        }
        coeffs[1] = a1;
        // A_m = half·(b_{m−1} − b_{m+1})/(2m), m ≥ 2
        for m in 2..=(k_top + 1) {
            let factor = Float::with_val(bits, &half) / (2 * m as u32);
            let mut a = b(m - 1).clone();
            a -= b(m + 1);
            coeffs[m] = a.scale_real(&factor);
        }
        // A_0 from the normalization Σ (−1)^m A_m = 0.
        let mut a0 = Scalar::zero(self.prec);
        for (m, a) in coeffs.iter().enumerate().skip(1) {
            if m % 2 == 0 {
                a0 -= a;
            } else {
                a0 += a;
            }
        }
        ChebSeries {
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            coeffs: {
                let mut c = coeffs;
                c[0] = a0;
                c
            },
            prec: self.prec,
        }
    }

    /// Clenshaw–Curtis integral over `[lo, hi]`: the antiderivative
    /// evaluated at `hi`, which is simply the sum of its coefficients
    /// (`T_j(1) = 1`).
    pub fn integrate(&self) -> Scalar {
        let anti = self.antiderivative();
        let mut sum = Scalar::zero(self.prec);
        for a in &anti.coeffs {
            sum += a;
        }
        sum
    }

    /// Sup-norm estimate: `max |s(x)|` over a refined Chebyshev grid of
    /// degree `refinement × K` (a lower bound on the true sup-norm, tight
    /// to spectral-interpolation accuracy).
    pub fn sup_norm(&self, refinement: usize) -> Result<Float> {
        if refinement < 1 {
            return Err(Error::Unsupported {
                detail: "sup-norm refinement must be at least 1".to_owned(),
            });
        }
        let bits = self.prec.bits();
        let r_top = (refinement * self.degree()).max(1);
        let mid = Float::with_val(bits, &self.lo + &self.hi) / 2u32;
        let half = Float::with_val(bits, &self.hi - &self.lo) / 2u32;
        let pi = self.prec.pi();
        let mut best = Float::new(bits);
        for r in 0..=r_top {
            let x = if r == 0 {
                self.hi.clone()
            } else if r == r_top {
                self.lo.clone()
            } else {
                let mut x =
                    (Float::with_val(bits, &pi * (r as u32)) / (r_top as u32)).cos();
                x *= &half;
                x += &mid;
                x
            };
            let v = self.eval(&x)?.abs();
            if v > best {
                best.assign(&v);
            }
        }
        Ok(best)
    }

    /// Tail-resolution check: the interpolation is considered resolved when
    /// the last two coefficients are below `10^(8−P) × max_j |b_j|`.
    pub fn is_resolved(&self) -> bool {
        let bits = self.prec.bits();
        let k_top = self.degree();
        if k_top < 2 {
            return true;
        }
        let mut max_abs = Float::new(bits);
        for b in &self.coeffs {
            let a = b.abs();
            if a > max_abs {
                max_abs.assign(&a);
            }
        }
        let threshold = self.prec.pow10(8 - self.prec.digits() as i32) * &max_abs;
        self.coeffs[k_top - 1].abs() <= threshold && self.coeffs[k_top].abs() <= threshold
    }

    /// Coefficient-wise negation (used for the even-index branch symmetry).
    pub fn neg(&self) -> ChebSeries {
        ChebSeries {
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            prec: self.prec,
        }
    }
}
