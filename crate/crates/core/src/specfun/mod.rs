//! Arbitrary-precision complex gamma and modified Bessel functions of complex
//! (in practice imaginary or imaginary-plus-integer) order.
//!
//! Every function has a fixed-precision kernel returning an [`Estimate`]
//! (value plus the number of bits lost to cancellation) and a public adaptive
//! wrapper that walks the [`PrecisionPolicy`] ladder until the requested
//! relative accuracy is reached, or fails with
//! [`Error::PrecisionExhausted`].

mod bessel;
mod gamma;

use rug::float::Constant;
use rug::Float;

use crate::bigfloat::{BigComplex, BigReal, PrecisionPolicy};
use crate::error::{Error, Result};

pub(crate) use bessel::{
    bessel_i_at, bessel_k_at, bessel_k_shifted_at, k_imaginary_from_i, k_imaginary_order_at,
};
pub(crate) use gamma::gamma_at;

/// Bits of headroom demanded on top of `target_bits` before a value is accepted.
pub const SAFETY_BITS: f64 = 4.0;

/// A value computed at a fixed working precision together with the number of
/// bits lost to cancellation and error propagation.
#[derive(Clone, Debug)]
pub struct Estimate<T> {
    pub value: T,
    pub lost_bits: f64,
    pub prec: u32,
    /// log2 of the magnitude the absolute error is proportional to (the
    /// largest intermediate before the final cancellation).
    pub scale_log2: f64,
}

impl<T> Estimate<T> {
    /// Bits that can be trusted in the relative sense.
    pub fn good_bits(&self) -> f64 {
        self.prec as f64 - self.lost_bits
    }

    /// Estimated relative error, 2^(lost - prec).
    pub fn rel_err(&self) -> f64 {
        (self.lost_bits - self.prec as f64).exp2()
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Estimate<U> {
        Estimate {
            value: f(self.value),
            lost_bits: self.lost_bits,
            prec: self.prec,
            scale_log2: self.scale_log2,
        }
    }
}

/// Runs `eval` at each precision of the policy ladder until the result keeps
/// `target_bits + SAFETY_BITS` good bits.
pub(crate) fn adaptive<T>(
    policy: &PrecisionPolicy,
    what: &str,
    mut eval: impl FnMut(u32) -> Result<Estimate<T>>,
) -> Result<Estimate<T>> {
    policy.validate()?;
    let need = policy.target_bits() as f64 + SAFETY_BITS;
    let mut lost = 0.0;
    for prec in policy.ladder() {
        let est = eval(prec)?;
        if est.good_bits() >= need {
            return Ok(est);
        }
        log::trace!(
            "{what}: {prec} bits insufficient ({:.1} lost)",
            est.lost_bits
        );
        lost = est.lost_bits;
    }
    Err(Error::PrecisionExhausted {
        max_bits: policy.max_bits,
        detail: format!("{what}: {lost:.0} bits lost to cancellation"),
    })
}

fn positive_argument(x: &BigReal) -> Result<()> {
    if x.signum_i() <= 0 || !x.is_finite() {
        return Err(Error::Domain(format!(
            "argument must be > 0, got {}",
            x.to_f64()
        )));
    }
    Ok(())
}

/// Γ(z) for complex z away from the poles.
pub fn gamma_complex(z: &BigComplex, policy: &PrecisionPolicy) -> Result<BigComplex> {
    adaptive(policy, "gamma", |p| gamma_at(z, p)).map(|e| e.value)
}

/// I_ν(x) for complex ν and real x > 0.
pub fn bessel_i(nu: &BigComplex, x: &BigReal, policy: &PrecisionPolicy) -> Result<BigComplex> {
    positive_argument(x)?;
    adaptive(policy, "bessel_i", |p| bessel_i_at(nu, x.as_float(), p)).map(|e| e.value)
}

/// K_{iμ}(x), real for μ >= 0 and x > 0.
pub fn bessel_k_imag(mu: &BigReal, x: &BigReal, policy: &PrecisionPolicy) -> Result<BigReal> {
    positive_argument(x)?;
    if mu.signum_i() < 0 {
        return Err(Error::Domain(format!(
            "μ must be >= 0, got {}",
            mu.to_f64()
        )));
    }
    adaptive(policy, "bessel_k_imag", |p| {
        k_imaginary_order_at(mu.as_float(), x.as_float(), p)
    })
    .map(|e| BigReal::from_float(e.value))
}

/// K_{iμ+s}(x) for integer |s| <= 2.
pub fn bessel_k_shifted(
    mu: &BigReal,
    s: i32,
    x: &BigReal,
    policy: &PrecisionPolicy,
) -> Result<BigComplex> {
    positive_argument(x)?;
    if mu.signum_i() < 0 {
        return Err(Error::Domain(format!(
            "μ must be >= 0, got {}",
            mu.to_f64()
        )));
    }
    if s.abs() > 2 {
        return Err(Error::Domain(format!("shift |s| must be <= 2, got {s}")));
    }
    adaptive(policy, "bessel_k_shifted", |p| {
        bessel_k_shifted_at(mu.as_float(), s, x.as_float(), p)
    })
    .map(|e| e.value)
}

/// K_ν(x) for arbitrary complex order ν and real x > 0.
pub fn bessel_k(nu: &BigComplex, x: &BigReal, policy: &PrecisionPolicy) -> Result<BigComplex> {
    positive_argument(x)?;
    adaptive(policy, "bessel_k", |p| bessel_k_at(nu, x.as_float(), p)).map(|e| e.value)
}

/// H⁽¹⁾_ν(i·t) = (2/(iπ)) e^{-iπν/2} K_ν(t) for real t > 0.
pub fn hankel1(nu: &BigComplex, t: &BigReal, policy: &PrecisionPolicy) -> Result<BigComplex> {
    positive_argument(t)?;
    adaptive(policy, "hankel1", |p| hankel1_at(nu, t.as_float(), p)).map(|e| e.value)
}

pub(crate) fn hankel1_at(nu: &BigComplex, t: &Float, prec: u32) -> Result<Estimate<BigComplex>> {
    let k = bessel_k_at(nu, t, prec)?;
    let nu = nu.with_precision(prec);
    let half_pi = Float::with_val(prec, Constant::Pi) / 2u32;
    // -iπν/2
    let exponent = BigComplex::from_floats(
        Float::with_val(prec, nu.im_f() * &half_pi),
        Float::with_val(prec, -Float::with_val(prec, nu.re_f() * &half_pi)),
        prec,
    );
    let phase = exponent.exp();
    // 2/(iπ) = -2i/π
    let pi = Float::with_val(prec, Constant::Pi);
    let factor =
        BigComplex::from_floats(Float::new(prec), -(Float::with_val(prec, 2u32) / &pi), prec);
    let value = &(&factor * &phase) * &k.value;
    let lost = k.lost_bits + (1.0 + exponent.abs().to_f64()).log2() + 1.0;
    let scale_log2 = k.scale_log2 + value.log2_abs() - k.value.log2_abs();
    Ok(Estimate {
        value,
        lost_bits: lost,
        prec,
        scale_log2,
    })
}

/// |I_ν(x) K_{ν+1}(x) + I_{ν+1}(x) K_ν(x) - 1/x|.
pub fn wronskian_residual(
    nu: &BigComplex,
    x: &BigReal,
    policy: &PrecisionPolicy,
) -> Result<BigReal> {
    positive_argument(x)?;
    let nu1 = nu + &BigComplex::one(nu.precision_bits());
    let i0 = bessel_i(nu, x, policy)?;
    let i1 = bessel_i(&nu1, x, policy)?;
    let k0 = bessel_k(nu, x, policy)?;
    let k1 = bessel_k(&nu1, x, policy)?;
    let sum = &(&i0 * &k1) + &(&i1 * &k0);
    let prec = sum.precision_bits().max(x.precision_bits());
    let inv_x = &BigReal::from_i64(1, prec) / x;
    let resid = &sum - &BigComplex::from_real(&inv_x);
    Ok(resid.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn policy() -> PrecisionPolicy {
        PrecisionPolicy::default()
    }

    fn real(v: f64) -> BigReal {
        BigReal::from_f64(v, 128)
    }

    #[test]
    fn gamma_small_integers() {
        let one = gamma_complex(&BigComplex::from_f64(1.0, 0.0, 128), &policy()).unwrap();
        assert!((&one - &BigComplex::one(128)).abs().to_f64() < 1e-35);
        let five = gamma_complex(&BigComplex::from_f64(5.0, 0.0, 128), &policy()).unwrap();
        let err = (&five - &BigComplex::from_f64(24.0, 0.0, 128))
            .abs()
            .to_f64();
        assert!(err < 1e-33, "{err}");
    }

    #[test]
    fn gamma_half_is_sqrt_pi() {
        let g = gamma_complex(&BigComplex::from_f64(0.5, 0.0, 128), &policy()).unwrap();
        let sqrt_pi = BigReal::pi(200).sqrt();
        let err = (&g.re() - &sqrt_pi).abs().to_f64();
        assert!(err < 1e-33, "{err}");
        assert!(g.im().to_f64().abs() < 1e-40);
    }

    #[test]
    fn gamma_reflection_branch() {
        // Γ(-1/2) = -2√π
        let g = gamma_complex(&BigComplex::from_f64(-0.5, 0.0, 128), &policy()).unwrap();
        let expect = -(BigReal::pi(200).sqrt() * BigReal::from_f64(2.0, 200));
        assert!((&g.re() - &expect).abs().to_f64() < 1e-32);
    }

    #[test]
    fn gamma_pole_is_an_error() {
        let err = gamma_complex(&BigComplex::from_f64(-2.0, 0.0, 128), &policy()).unwrap_err();
        assert_eq!(err, Error::GammaPole(-2));
    }

    #[test]
    fn bessel_i0_small_argument_tends_to_one() {
        let v = bessel_i(&BigComplex::zero(128), &real(1e-20), &policy()).unwrap();
        assert!((v.re().to_f64() - 1.0).abs() < 1e-30);
    }

    #[test]
    fn bessel_k_shift_zero_is_bit_identical() {
        let mu = real(1.3);
        let x = real(2.5);
        let k = bessel_k_imag(&mu, &x, &policy()).unwrap();
        let ks = bessel_k_shifted(&mu, 0, &x, &policy()).unwrap();
        assert_eq!(ks.re(), k);
        assert!(ks.im().is_zero());
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            bessel_k_imag(&real(1.0), &real(0.0), &policy()),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            bessel_k_imag(&real(-1.0), &real(1.0), &policy()),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            bessel_i(&BigComplex::zero(128), &real(-1.0), &policy()),
            Err(Error::Domain(_))
        ));
        assert!(bessel_k_shifted(&real(1.0), 3, &real(1.0), &policy()).is_err());
    }

    #[test]
    fn exhausted_precision_is_reported() {
        // K_{i}(30) needs ~90 bits just to undo the I-series cancellation
        let tight = PrecisionPolicy::new(64, 96, 2, 1e-25).unwrap();
        let err = bessel_k_imag(&real(1.0), &real(30.0), &tight).unwrap_err();
        assert!(matches!(err, Error::PrecisionExhausted { .. }), "{err:?}");
    }

    #[test]
    fn estimate_bookkeeping() {
        let e = Estimate {
            value: 1.0,
            lost_bits: 10.0,
            prec: 64,
            scale_log2: 0.0,
        };
        assert_eq!(e.good_bits(), 54.0);
        assert!((e.rel_err() - 2f64.powi(-54)).abs() < 1e-30);
    }
}
