//! Arbitrary-precision real and complex scalars and the precision policy that
//! governs every special-function evaluation.
//!
//! [`BigReal`] is a thin newtype over an MPFR float. Binary operations between
//! operands of different precision are carried out at the larger of the two.
//! [`BigComplex`] keeps its two components at identical precision.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};

/// Smallest precision any scalar may carry (IEEE double).
pub const MIN_PREC: u32 = 53;

/// Arbitrary-precision real number with an explicit precision in bits.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct BigReal(Float);

impl BigReal {
    pub fn from_f64(value: f64, prec: u32) -> Self {
        BigReal(Float::with_val(prec.max(MIN_PREC), value))
    }

    pub fn from_i64(value: i64, prec: u32) -> Self {
        BigReal(Float::with_val(prec.max(MIN_PREC), value))
    }

    /// Parses a decimal literal such as `"1.4142135623730950488"`.
    pub fn parse(text: &str, prec: u32) -> Result<Self> {
        let parsed =
            Float::parse(text).map_err(|e| Error::Domain(format!("cannot parse {text:?}: {e}")))?;
        Ok(BigReal(Float::with_val(prec.max(MIN_PREC), parsed)))
    }

    pub fn from_float(f: Float) -> Self {
        if f.prec() < MIN_PREC {
            BigReal(Float::with_val(MIN_PREC, f))
        } else {
            BigReal(f)
        }
    }

    pub fn zero(prec: u32) -> Self {
        BigReal::from_f64(0.0, prec)
    }

    pub fn pi(prec: u32) -> Self {
        BigReal(Float::with_val(prec.max(MIN_PREC), Constant::Pi))
    }

    pub fn precision_bits(&self) -> u32 {
        self.0.prec()
    }

    /// Rounds (or exactly widens) to `prec` bits.
    pub fn with_precision(&self, prec: u32) -> Self {
        BigReal(Float::with_val(prec.max(MIN_PREC), &self.0))
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn into_float(self) -> Float {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    /// `-1`, `0` or `1`.
    pub fn signum_i(&self) -> i32 {
        match self.0.cmp0() {
            Some(Ordering::Greater) => 1,
            Some(Ordering::Less) => -1,
            _ => 0,
        }
    }

    pub fn abs(&self) -> Self {
        BigReal(self.0.clone().abs())
    }

    pub fn sqrt(&self) -> Self {
        BigReal(Float::with_val(self.0.prec(), self.0.sqrt_ref()))
    }

    pub fn exp(&self) -> Self {
        BigReal(Float::with_val(self.0.prec(), self.0.exp_ref()))
    }

    pub fn ln(&self) -> Self {
        BigReal(Float::with_val(self.0.prec(), self.0.ln_ref()))
    }

    pub fn square(&self) -> Self {
        BigReal(Float::with_val(self.0.prec(), self.0.square_ref()))
    }

    /// log2 of the magnitude; `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        log2_abs(&self.0)
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        self.0.to_string_radix(10, Some(digits))
    }

    fn common_prec(&self, other: &BigReal) -> u32 {
        self.0.prec().max(other.0.prec())
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "BigReal({}, {} bits)",
            self.to_decimal(20),
            self.0.prec()
        )
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = ((self.0.prec() as f64) * std::f64::consts::LOG10_2).floor() as usize;
        write!(f, "{}", self.to_decimal(digits.max(1)))
    }
}

macro_rules! real_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl<'a> $tr<&'a BigReal> for &'a BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &'a BigReal) -> BigReal {
                let prec = self.common_prec(rhs);
                BigReal(Float::with_val(prec, &self.0 $op &rhs.0))
            }
        }
        impl $tr<BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                (&self).$method(&rhs)
            }
        }
    };
}

real_binop!(Add, add, +);
real_binop!(Sub, sub, -);
real_binop!(Mul, mul, *);
real_binop!(Div, div, /);

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal(-self.0)
    }
}

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal(Float::with_val(self.0.prec(), -&self.0))
    }
}

/// Arbitrary-precision complex number; both parts share one precision.
#[derive(Clone, PartialEq)]
pub struct BigComplex {
    re: Float,
    im: Float,
}

impl BigComplex {
    pub fn new(re: BigReal, im: BigReal) -> Self {
        let prec = re.common_prec(&im);
        BigComplex::from_floats(re.0, im.0, prec)
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        let prec = prec.max(MIN_PREC);
        BigComplex {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn from_real(re: &BigReal) -> Self {
        let prec = re.precision_bits();
        BigComplex {
            re: re.0.clone(),
            im: Float::new(prec),
        }
    }

    /// Purely imaginary `i·im`.
    pub fn imaginary(im: &BigReal) -> Self {
        let prec = im.precision_bits();
        BigComplex {
            re: Float::new(prec),
            im: im.0.clone(),
        }
    }

    pub(crate) fn from_floats(re: Float, im: Float, prec: u32) -> Self {
        let prec = prec.max(MIN_PREC);
        let re = if re.prec() == prec {
            re
        } else {
            Float::with_val(prec, re)
        };
        let im = if im.prec() == prec {
            im
        } else {
            Float::with_val(prec, im)
        };
        BigComplex { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        BigComplex::from_f64(0.0, 0.0, prec)
    }

    pub fn one(prec: u32) -> Self {
        BigComplex::from_f64(1.0, 0.0, prec)
    }

    pub fn precision_bits(&self) -> u32 {
        self.re.prec()
    }

    pub fn with_precision(&self, prec: u32) -> Self {
        BigComplex::from_floats(self.re.clone(), self.im.clone(), prec)
    }

    pub fn re(&self) -> BigReal {
        BigReal(self.re.clone())
    }

    pub fn im(&self) -> BigReal {
        BigReal(self.im.clone())
    }

    pub(crate) fn re_f(&self) -> &Float {
        &self.re
    }

    pub(crate) fn im_f(&self) -> &Float {
        &self.im
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn conj(&self) -> Self {
        BigComplex {
            re: self.re.clone(),
            im: Float::with_val(self.im.prec(), -&self.im),
        }
    }

    pub fn abs(&self) -> BigReal {
        BigReal(Float::with_val(self.re.prec(), self.re.hypot_ref(&self.im)))
    }

    /// log2 |z|, computed without forming |z| at full precision.
    pub fn log2_abs(&self) -> f64 {
        let a = log2_abs(&self.re);
        let b = log2_abs(&self.im);
        log2_sum(a, b) // within half a bit of the true modulus
    }

    pub fn arg(&self) -> BigReal {
        BigReal(Float::with_val(self.re.prec(), self.im.atan2_ref(&self.re)))
    }

    pub fn scale(&self, factor: &BigReal) -> Self {
        let prec = self.precision_bits().max(factor.precision_bits());
        BigComplex {
            re: Float::with_val(prec, &self.re * &factor.0),
            im: Float::with_val(prec, &self.im * &factor.0),
        }
    }

    /// Multiplication by `i`.
    pub fn mul_i(&self) -> Self {
        BigComplex {
            re: Float::with_val(self.im.prec(), -&self.im),
            im: self.re.clone(),
        }
    }

    pub fn exp(&self) -> Self {
        let prec = self.precision_bits();
        let modulus = Float::with_val(prec, self.re.exp_ref());
        let (s, c) = sin_cos(&self.im);
        BigComplex {
            re: Float::with_val(prec, &modulus * &c),
            im: Float::with_val(prec, &modulus * &s),
        }
    }

    /// Principal branch logarithm.
    pub fn ln(&self) -> Self {
        let prec = self.precision_bits();
        let modulus = Float::with_val(prec, self.re.hypot_ref(&self.im));
        BigComplex {
            re: Float::with_val(prec, modulus.ln_ref()),
            im: Float::with_val(prec, self.im.atan2_ref(&self.re)),
        }
    }

    pub fn recip(&self) -> Self {
        let prec = self.precision_bits();
        let one = BigComplex::one(prec);
        &one / self
    }

    pub fn to_decimal(&self, digits: usize) -> String {
        format!(
            "({} {} {}i)",
            self.re.to_string_radix(10, Some(digits)),
            if self.im.is_sign_negative() { "-" } else { "+" },
            Float::with_val(self.im.prec(), self.im.abs_ref()).to_string_radix(10, Some(digits))
        )
    }

    fn common_prec(&self, other: &BigComplex) -> u32 {
        self.precision_bits().max(other.precision_bits())
    }
}

impl fmt::Debug for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigComplex{}", self.to_decimal(20))
    }
}

impl<'a> Add<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn add(self, rhs: &'a BigComplex) -> BigComplex {
        let p = self.common_prec(rhs);
        BigComplex {
            re: Float::with_val(p, &self.re + &rhs.re),
            im: Float::with_val(p, &self.im + &rhs.im),
        }
    }
}

impl<'a> Sub<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn sub(self, rhs: &'a BigComplex) -> BigComplex {
        let p = self.common_prec(rhs);
        BigComplex {
            re: Float::with_val(p, &self.re - &rhs.re),
            im: Float::with_val(p, &self.im - &rhs.im),
        }
    }
}

impl<'a> Mul<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn mul(self, rhs: &'a BigComplex) -> BigComplex {
        let p = self.common_prec(rhs);
        let ac = Float::with_val(p, &self.re * &rhs.re);
        let bd = Float::with_val(p, &self.im * &rhs.im);
        let ad = Float::with_val(p, &self.re * &rhs.im);
        let bc = Float::with_val(p, &self.im * &rhs.re);
        BigComplex {
            re: ac - bd,
            im: ad + bc,
        }
    }
}

impl<'a> Div<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn div(self, rhs: &'a BigComplex) -> BigComplex {
        let p = self.common_prec(rhs);
        let denom =
            Float::with_val(p, rhs.re.square_ref()) + Float::with_val(p, rhs.im.square_ref());
        let ac = Float::with_val(p, &self.re * &rhs.re);
        let bd = Float::with_val(p, &self.im * &rhs.im);
        let bc = Float::with_val(p, &self.im * &rhs.re);
        let ad = Float::with_val(p, &self.re * &rhs.im);
        BigComplex {
            re: (ac + bd) / &denom,
            im: (bc - ad) / &denom,
        }
    }
}

macro_rules! complex_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: BigComplex) -> BigComplex {
                (&self).$method(&rhs)
            }
        }
    };
}

complex_owned!(Add, add);
complex_owned!(Sub, sub);
complex_owned!(Mul, mul);
complex_owned!(Div, div);

impl Neg for BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        self.clone().neg()
    }
}

/// Working-precision policy shared by all evaluations.
#[derive(Clone, Debug, PartialEq)]
pub struct PrecisionPolicy {
    pub base_bits: u32,
    pub max_bits: u32,
    pub escalation_factor: u32,
    pub target_rel_err: f64,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy {
            base_bits: 128,
            max_bits: 8192,
            escalation_factor: 2,
            target_rel_err: 1e-30,
        }
    }
}

impl PrecisionPolicy {
    pub fn new(
        base_bits: u32,
        max_bits: u32,
        escalation_factor: u32,
        target_rel_err: f64,
    ) -> Result<Self> {
        let policy = PrecisionPolicy {
            base_bits,
            max_bits,
            escalation_factor,
            target_rel_err,
        };
        policy.validate()?;
        Ok(policy)
    }

    pub fn validate(&self) -> Result<()> {
        if self.base_bits < MIN_PREC {
            return Err(Error::InvalidPolicy(format!(
                "base_bits {} below {MIN_PREC}",
                self.base_bits
            )));
        }
        if self.base_bits > self.max_bits {
            return Err(Error::InvalidPolicy(format!(
                "base_bits {} exceeds max_bits {}",
                self.base_bits, self.max_bits
            )));
        }
        if self.escalation_factor < 2 {
            return Err(Error::InvalidPolicy(
                "escalation_factor must be at least 2".into(),
            ));
        }
        if !(self.target_rel_err > 0.0 && self.target_rel_err < 1.0) {
            return Err(Error::InvalidPolicy(format!(
                "target_rel_err {} outside (0, 1)",
                self.target_rel_err
            )));
        }
        Ok(())
    }

    /// Number of correct bits demanded by `target_rel_err`.
    pub fn target_bits(&self) -> u32 {
        (-self.target_rel_err.log2()).ceil() as u32
    }

    /// Policy whose base precision is one escalation step higher, or `None`
    /// when already at `max_bits`.
    pub fn escalated(&self) -> Option<Self> {
        if self.base_bits >= self.max_bits {
            return None;
        }
        let next = self
            .base_bits
            .saturating_mul(self.escalation_factor)
            .min(self.max_bits);
        Some(PrecisionPolicy {
            base_bits: next,
            ..self.clone()
        })
    }

    /// Ladder of working precisions tried by the adaptive drivers.
    pub(crate) fn ladder(&self) -> impl Iterator<Item = u32> {
        let max = self.max_bits;
        let factor = self.escalation_factor;
        let mut next = Some(self.base_bits);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur >= max {
                None
            } else {
                Some(cur.saturating_mul(factor).min(max))
            };
            Some(cur)
        })
    }
}

pub(crate) fn log2_abs(x: &Float) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    if !x.is_finite() {
        return f64::INFINITY;
    }
    let (mant, exp) = x.to_f64_exp();
    mant.abs().log2() + exp as f64
}

/// log2(2^a + 2^b).
pub(crate) fn log2_sum(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (1.0 + (lo - hi).exp2()).log2()
}

pub(crate) fn sin_cos(x: &Float) -> (Float, Float) {
    let prec = x.prec();
    let s = Float::with_val(prec, x.sin_ref());
    let c = Float::with_val(prec, x.cos_ref());
    (s, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_precision_uses_the_larger() {
        let a = BigReal::from_f64(1.5, 64);
        let b = BigReal::from_f64(2.0, 300);
        assert_eq!((&a + &b).precision_bits(), 300);
        assert_eq!((&b * &a).precision_bits(), 300);
    }

    #[test]
    fn precision_never_below_53() {
        assert_eq!(BigReal::from_f64(1.0, 8).precision_bits(), 53);
        assert_eq!(BigComplex::from_f64(1.0, 1.0, 1).precision_bits(), 53);
    }

    #[test]
    fn complex_parts_share_precision() {
        let z = BigComplex::new(BigReal::from_f64(1.0, 80), BigReal::from_f64(2.0, 200));
        assert_eq!(z.re().precision_bits(), 200);
        assert_eq!(z.im().precision_bits(), 200);
    }

    #[test]
    fn complex_division_inverts_multiplication() {
        let a = BigComplex::from_f64(1.25, -3.5, 128);
        let b = BigComplex::from_f64(-0.75, 2.0, 128);
        let back = &(&a * &b) / &b;
        let err = (&back - &a).abs().to_f64();
        assert!(err < 1e-35, "{err}");
    }

    #[test]
    fn exp_ln_roundtrip() {
        let z = BigComplex::from_f64(0.3, 2.9, 160);
        let back = z.ln().exp();
        assert!((&back - &z).abs().to_f64() < 1e-45);
    }

    #[test]
    fn policy_validation() {
        assert!(PrecisionPolicy::default().validate().is_ok());
        assert!(PrecisionPolicy::new(40, 100, 2, 1e-10).is_err());
        assert!(PrecisionPolicy::new(200, 100, 2, 1e-10).is_err());
        assert!(PrecisionPolicy::new(64, 100, 1, 1e-10).is_err());
        assert_eq!(PrecisionPolicy::default().target_bits(), 100);
    }

    #[test]
    fn ladder_doubles_until_cap() {
        let p = PrecisionPolicy::new(128, 1000, 2, 1e-30).unwrap();
        let steps: Vec<u32> = p.ladder().collect();
        assert_eq!(steps, vec![128, 256, 512, 1000]);
    }

    #[test]
    fn log2_helpers() {
        let x = Float::with_val(64, 1024);
        assert!((log2_abs(&x) - 10.0).abs() < 1e-12);
        assert!((log2_sum(3.0, 3.0) - 4.0).abs() < 1e-12);
        assert_eq!(log2_sum(2.0, f64::NEG_INFINITY), 2.0);
    }
}
