//! Arbitrary-precision complex scalars.
//!
//! [`Precision`] is the numeric context: a count of significant decimal
//! digits, fixed at startup and threaded through every constructor. It maps
//! to an MPFR mantissa size with two guard digits, so results round correctly
//! to the requested decimal precision. [`Scalar`] is a complex number carried
//! as a pair of [`rug::Float`] real parts at that precision; nothing in the
//! numeric path ever passes through a hardware float.

use crate::error::{Error, Result};
use rug::float::Constant;
use rug::ops::{NegAssign, Pow};
use rug::{Assign, Float};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

/// Smallest supported precision: quadruple-equivalent significant digits.
pub const MIN_DIGITS: u32 = 34;

/// Largest supported precision (sanity cap, far above practical use).
pub const MAX_DIGITS: u32 = 10_000;

const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Numeric context: significant decimal digits for all scalar arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Precision {
    digits: u32,
}

impl Precision {
    /// Creates a context with `digits` significant decimal digits
    /// (`MIN_DIGITS..=MAX_DIGITS`).
    pub fn new(digits: u32) -> Result<Self> {
        if digits < MIN_DIGITS {
            return Err(Error::PrecisionTooLow {
                got: digits,
                min: MIN_DIGITS,
            });
        }
        if digits > MAX_DIGITS {
            return Err(Error::Unsupported {
                detail: format!("precision {digits} exceeds the cap of {MAX_DIGITS} digits"),
            });
        }
        Ok(Precision { digits })
    }

    /// Significant decimal digits of the context.
    pub fn digits(self) -> u32 {
        self.digits
    }

    /// Mantissa bits backing the context: ceil((digits + 2) * log2(10)).
    /// The two extra digits absorb rounding in long reductions.
    pub fn bits(self) -> u32 {
        ((f64::from(self.digits) + 2.0) * LOG2_10).ceil() as u32
    }

    /// Underflow threshold 10^(3 - digits): magnitudes below it are treated
    /// as zero by jet division and square roots.
    pub fn underflow_threshold(self) -> Float {
        self.pow10(3 - self.digits as i32)
    }

    /// 10^e at this precision.
    pub fn pow10(self, e: i32) -> Float {
        Float::with_val(self.bits(), 10).pow(e)
    }

    /// Zero at this precision.
    pub fn zero(self) -> Float {
        Float::new(self.bits())
    }

    /// The circle constant at this precision.
    pub fn pi(self) -> Float {
        Float::with_val(self.bits(), Constant::Pi)
    }

    /// Exact small integer at this precision.
    pub fn real_from_i64(self, v: i64) -> Float {
        Float::with_val(self.bits(), v)
    }

    /// Parses a decimal literal into a finite real at this precision.
    pub fn real_from_decimal(self, text: &str) -> Result<Float> {
        let incomplete = Float::parse(text).map_err(|_| Error::InvalidNumber {
            text: text.to_owned(),
        })?;
        let v = Float::with_val(self.bits(), incomplete);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::InvalidNumber {
                text: text.to_owned(),
            })
        }
    }
}

/// Recovers the decimal-digit count a mantissa size was derived from.
/// Exact inverse of [`Precision::bits`] for all supported digit counts.
pub(crate) fn digits_for_bits(bits: u32) -> u32 {
    (f64::from(bits) / LOG2_10).floor() as u32 - 2
}

/// Mantissa size carrying `digits` significant decimal digits, with the same
/// two-digit headroom as [`Precision::bits`] (usable beyond `MAX_DIGITS` for
/// internal guard-digit work).
pub(crate) fn bits_for_digits(digits: u32) -> u32 {
    ((f64::from(digits) + 2.0) * LOG2_10).ceil() as u32
}

/// Underflow threshold 10^(3 - digits) reconstructed from a mantissa size.
pub(crate) fn underflow_threshold_for_bits(bits: u32) -> Float {
    Float::with_val(bits, 10).pow(3 - digits_for_bits(bits) as i32)
}

/// Formats a real to `digits` significant digits in scientific notation.
/// Negative zero is canonicalized so equal values print identically.
pub fn fmt_real(x: &Float, digits: u32) -> String {
    // rug's exponential formatting interprets the precision field as the
    // total number of significant digits (not digits after the point).
    if x.is_zero() {
        let plus_zero = Float::new(x.prec());
        return format!("{:.*e}", digits as usize, plus_zero);
    }
    format!("{:.*e}", digits as usize, x)
}

/// Complex number at the context precision.
#[derive(Clone, Debug, PartialEq)]
pub struct Scalar {
    re: Float,
    im: Float,
}

impl Scalar {
    /// Builds a scalar from parts; both must carry the same mantissa size.
    pub fn new(re: Float, im: Float) -> Self {
        assert_eq!(re.prec(), im.prec(), "mixed-precision scalar parts");
        Scalar { re, im }
    }

    /// A real number viewed as a scalar.
    pub fn from_real(re: Float) -> Self {
        let im = Float::new(re.prec());
        Scalar { re, im }
    }

    /// Zero.
    pub fn zero(prec: Precision) -> Self {
        Scalar::from_real(prec.zero())
    }

    /// One.
    pub fn one(prec: Precision) -> Self {
        Scalar::from_real(prec.real_from_i64(1))
    }

    /// The imaginary unit.
    pub fn i(prec: Precision) -> Self {
        Scalar::new(prec.zero(), prec.real_from_i64(1))
    }

    /// Exact small integer.
    pub fn from_i64(v: i64, prec: Precision) -> Self {
        Scalar::from_real(prec.real_from_i64(v))
    }

    /// Parses decimal literals for both parts.
    pub fn from_decimal(re: &str, im: &str, prec: Precision) -> Result<Self> {
        Ok(Scalar::new(
            prec.real_from_decimal(re)?,
            prec.real_from_decimal(im)?,
        ))
    }

    /// Real part.
    pub fn re(&self) -> &Float {
        &self.re
    }

    /// Imaginary part.
    pub fn im(&self) -> &Float {
        &self.im
    }

    /// Mantissa bits of both parts.
    pub fn prec_bits(&self) -> u32 {
        self.re.prec()
    }

    /// True when both parts are exactly zero.
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// True when both parts are finite.
    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Scalar {
        let mut im = self.im.clone();
        im.neg_assign();
        Scalar {
            re: self.re.clone(),
            im,
        }
    }

    /// Multiplication by the imaginary unit: (re, im) -> (-im, re).
    pub fn mul_i(&self) -> Scalar {
        let mut re = self.im.clone();
        re.neg_assign();
        Scalar {
            re,
            im: self.re.clone(),
        }
    }

    /// Multiplication by -i: (re, im) -> (im, -re).
    pub fn mul_neg_i(&self) -> Scalar {
        let mut im = self.re.clone();
        im.neg_assign();
        Scalar {
            re: self.im.clone(),
            im,
        }
    }

    /// Scales by a real factor.
    pub fn scale_real(&self, c: &Float) -> Scalar {
        Scalar {
            re: Float::with_val(self.re.prec(), &self.re * c),
            im: Float::with_val(self.im.prec(), &self.im * c),
        }
    }

    /// Modulus |z|.
    pub fn abs(&self) -> Float {
        self.re.clone().hypot(&self.im)
    }

    /// Squared modulus re^2 + im^2.
    pub fn abs_sq(&self) -> Float {
        let mut acc = Float::with_val(self.re.prec(), &self.re * &self.re);
        let im_sq = Float::with_val(self.im.prec(), &self.im * &self.im);
        acc += &im_sq;
        acc
    }

    /// Multiplicative inverse conj(z) / |z|^2. Division by an exact zero
    /// yields non-finite parts; callers guard with their own thresholds.
    pub fn recip(&self) -> Scalar {
        let denom = self.abs_sq();
        let re = Float::with_val(self.re.prec(), &self.re / &denom);
        let mut im = Float::with_val(self.im.prec(), &self.im / &denom);
        im.neg_assign();
        Scalar { re, im }
    }

    /// Principal square root (branch cut on the negative real axis; a
    /// negative real maps to the positive imaginary axis).
    pub fn sqrt(&self) -> Scalar {
        let prec = self.re.prec();
        if self.is_zero() {
            return Scalar::from_real(Float::new(prec));
        }
        let r = self.abs();
        // t = sqrt((|z| + |re|) / 2) is the dominant component.
        let mut t = r;
        t += self.re.clone().abs();
        t /= 2u32;
        let t = t.sqrt();
        if self.re.is_sign_negative() && !self.re.is_zero() {
            // Result is im-dominant: re = |im| / (2t), im = sign(im) * t.
            let mut re = self.im.clone().abs();
            re /= &t;
            re /= 2u32;
            let mut im = t;
            if self.im.is_sign_negative() && !self.im.is_zero() {
                im.neg_assign();
            }
            Scalar { re, im }
        } else {
            let mut im = self.im.clone();
            im /= &t;
            im /= 2u32;
            Scalar { re: t, im }
        }
    }

    /// Complex exponential.
    pub fn exp(&self) -> Scalar {
        let prec = self.re.prec();
        let mag = self.re.clone().exp();
        let (s, c) = self.im.clone().sin_cos(Float::new(prec));
        Scalar {
            re: Float::with_val(prec, &mag * &c),
            im: Float::with_val(prec, &mag * &s),
        }
    }

    /// Principal logarithm: ln|z| + i*atan2(im, re).
    pub fn ln(&self) -> Scalar {
        Scalar {
            re: self.abs().ln(),
            im: self.im.clone().atan2(&self.re),
        }
    }

    /// Complex sine: sin(x)cosh(y) + i cos(x)sinh(y).
    pub fn sin(&self) -> Scalar {
        let prec = self.re.prec();
        let (s, c) = self.re.clone().sin_cos(Float::new(prec));
        let ch = self.im.clone().cosh();
        let sh = self.im.clone().sinh();
        Scalar {
            re: Float::with_val(prec, &s * &ch),
            im: Float::with_val(prec, &c * &sh),
        }
    }

    /// Complex cosine: cos(x)cosh(y) - i sin(x)sinh(y).
    pub fn cos(&self) -> Scalar {
        let prec = self.re.prec();
        let (s, c) = self.re.clone().sin_cos(Float::new(prec));
        let ch = self.im.clone().cosh();
        let mut sh = self.im.clone().sinh();
        sh.neg_assign();
        Scalar {
            re: Float::with_val(prec, &c * &ch),
            im: Float::with_val(prec, &s * &sh),
        }
    }

    /// Integer power by binary exponentiation (negative via the inverse).
    pub fn powi(&self, e: i64) -> Scalar {
        let prec = self.re.prec();
        if e == 0 {
            return Scalar::from_real(Float::with_val(prec, 1));
        }
        let (mut base, mut n) = if e < 0 {
            (self.recip(), e.unsigned_abs())
        } else {
            (self.clone(), e.unsigned_abs())
        };
        let mut acc = Scalar::from_real(Float::with_val(prec, 1));
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Fused accumulate `self += a * b` with one scratch real.
    /// The workhorse of jet Cauchy products; avoids temporary scalars.
    pub(crate) fn mul_acc(&mut self, a: &Scalar, b: &Scalar, tmp: &mut Float) {
        tmp.assign(&a.re * &b.re);
        self.re += &*tmp;
        tmp.assign(&a.im * &b.im);
        self.re -= &*tmp;
        tmp.assign(&a.re * &b.im);
        self.im += &*tmp;
        tmp.assign(&a.im * &b.re);
        self.im += &*tmp;
    }

    /// Fused accumulate `self += v * r` with `r` real and one scratch real.
    pub(crate) fn add_mul_real(&mut self, v: &Scalar, r: &Float, tmp: &mut Float) {
        tmp.assign(&v.re * r);
        self.re += &*tmp;
        tmp.assign(&v.im * r);
        self.im += &*tmp;
    }

    /// Fused accumulate `self -= a * b` with one scratch real.
    pub(crate) fn mul_sub(&mut self, a: &Scalar, b: &Scalar, tmp: &mut Float) {
        tmp.assign(&a.re * &b.re);
        self.re -= &*tmp;
        tmp.assign(&a.im * &b.im);
        self.re += &*tmp;
        tmp.assign(&a.re * &b.im);
        self.im -= &*tmp;
        tmp.assign(&a.im * &b.re);
        self.im -= &*tmp;
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.re, self.im)
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar {
            re: Float::with_val(self.re.prec(), &self.re + &rhs.re),
            im: Float::with_val(self.im.prec(), &self.im + &rhs.im),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar {
            re: Float::with_val(self.re.prec(), &self.re - &rhs.re),
            im: Float::with_val(self.im.prec(), &self.im - &rhs.im),
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        let prec = self.re.prec();
        let mut re = Float::with_val(prec, &self.re * &rhs.re);
        let t = Float::with_val(prec, &self.im * &rhs.im);
        re -= &t;
        let mut im = Float::with_val(prec, &self.re * &rhs.im);
        let t = Float::with_val(prec, &self.im * &rhs.re);
        im += &t;
        Scalar { re, im }
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    #[allow(clippy::suspicious_arithmetic_impl)] // division via reciprocal
    fn div(self, rhs: &Scalar) -> Scalar {
        self * &rhs.recip()
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        let mut re = self.re.clone();
        let mut im = self.im.clone();
        re.neg_assign();
        im.neg_assign();
        Scalar { re, im }
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}
