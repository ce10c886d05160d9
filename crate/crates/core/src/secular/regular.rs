//! The regular solution ψ = D1·K_ν(w) + D2·I_ν(w), w = 2g·e^{r/2}.
//!
//! Even: D1 = g·I_{ν+1}(2g) + ik·I_ν(2g), D2 = g·K_{ν+1}(2g) − ik·K_ν(2g),
//! giving ψ(0) = 1/2, ψ'(0) = 0. Odd: D1 = −I_ν(2g), D2 = K_ν(2g), giving
//! ψ(0) = 0, ψ'(0) = 1/2. Both follow from I_ν K_{ν+1} + I_{ν+1} K_ν = 1/x.

use std::sync::{Arc, Mutex};

use rug::Float;

use super::{adaptive_tracked, check_g, check_k, order, Parity, SecularValue, Tracked};
use crate::bigfloat::{BigComplex, BigReal, PrecisionPolicy};
use crate::error::{Error, Result};
use crate::specfun::{bessel_i_at, bessel_k_shifted_at, k_imaginary_from_i};

#[derive(Clone, Debug)]
pub struct RegularCoefficients {
    pub d1: BigComplex,
    pub d2: BigComplex,
}

/// Coefficients and the order-ν functions at x = 2g, all at one precision.
#[derive(Debug)]
pub(crate) struct CoeffsAt {
    d1: Tracked,
    d2: Tracked,
    i_x: Tracked,
    k_x: Tracked,
}

pub(crate) fn coeffs_at(parity: Parity, k: &BigReal, g: &BigReal, prec: u32) -> Result<CoeffsAt> {
    let (mu, nu) = order(k, prec);
    let x = Float::with_val(prec, g.as_float() * 2u32);
    let i_est = bessel_i_at(&nu, &x, prec)?;
    let k_x = Tracked::from_real_estimate(k_imaginary_from_i(&mu, &i_est, prec));
    let i_x = Tracked::from_estimate(i_est);
    let (d1, d2) = match parity {
        Parity::Odd => (i_x.neg(), k_x.clone()),
        Parity::Even => {
            let nu1 = &nu + &BigComplex::one(prec);
            let i1 = Tracked::from_estimate(bessel_i_at(&nu1, &x, prec)?);
            let k1 = Tracked::from_estimate(bessel_k_shifted_at(&mu, 1, &x, prec)?);
            let gt = Tracked::exact(BigComplex::from_real(&g.with_precision(prec)));
            let ik = Tracked::exact(BigComplex::imaginary(&k.with_precision(prec)));
            (
                gt.mul(&i1).add(&ik.mul(&i_x)),
                gt.mul(&k1).sub(&ik.mul(&k_x)),
            )
        }
    };
    Ok(CoeffsAt { d1, d2, i_x, k_x })
}

/// w = 2g·e^{r/2}; the rounding of w is charged to the functions evaluated at it.
fn argument(g: &BigReal, r: &BigReal, prec: u32) -> Float {
    let half_r = Float::with_val(prec, r.as_float() / 2u32);
    Float::with_val(prec, half_r.exp_ref()) * Float::with_val(prec, g.as_float() * 2u32)
}

fn charge_argument(mut t: Tracked, w: &Float, r: &BigReal) -> Tracked {
    t.err += (2.0 + w.to_f64() * (1.0 + r.to_f64().abs())).log2();
    t
}

/// (K_ν(w), I_ν(w)).
fn functions_at(
    c: &CoeffsAt,
    k: &BigReal,
    g: &BigReal,
    r: &BigReal,
    prec: u32,
) -> Result<(Tracked, Tracked)> {
    if r.is_zero() {
        return Ok((c.k_x.clone(), c.i_x.clone()));
    }
    let (mu, nu) = order(k, prec);
    let w = argument(g, r, prec);
    let i_est = bessel_i_at(&nu, &w, prec)?;
    let kw = Tracked::from_real_estimate(k_imaginary_from_i(&mu, &i_est, prec));
    let iw = Tracked::from_estimate(i_est);
    Ok((charge_argument(kw, &w, r), charge_argument(iw, &w, r)))
}

fn combine(c: &CoeffsAt, kw: &Tracked, iw: &Tracked) -> Tracked {
    c.d1.mul(kw).add(&c.d2.mul(iw))
}

pub(crate) fn psi_kernel(
    parity: Parity,
    k: &BigReal,
    g: &BigReal,
    r: &BigReal,
    prec: u32,
) -> Result<Tracked> {
    let c = coeffs_at(parity, k, g, prec)?;
    let (kw, iw) = functions_at(&c, k, g, r, prec)?;
    Ok(combine(&c, &kw, &iw))
}

/// dψ/dr = (w/2)(D1 K'_ν(w) + D2 I'_ν(w)) with K'_ν = −K_{ν+1} + (ν/w)K_ν and
/// I'_ν = I_{ν+1} + (ν/w)I_ν.
fn slope_kernel(c: &CoeffsAt, k: &BigReal, g: &BigReal, r: &BigReal, prec: u32) -> Result<Tracked> {
    let (mu, nu) = order(k, prec);
    let w = argument(g, r, prec);
    let (kw, iw) = functions_at(c, k, g, r, prec)?;
    let nu1 = &nu + &BigComplex::one(prec);
    let i1 = charge_argument(Tracked::from_estimate(bessel_i_at(&nu1, &w, prec)?), &w, r);
    let k1 = charge_argument(
        Tracked::from_estimate(bessel_k_shifted_at(&mu, 1, &w, prec)?),
        &w,
        r,
    );
    let wr = BigReal::from_float(w);
    let nu_over_w = Tracked::exact(BigComplex::imaginary(&(&BigReal::from_float(mu) / &wr)));
    let dk = k1.neg().add(&nu_over_w.mul(&kw));
    let di = i1.add(&nu_over_w.mul(&iw));
    let half_w = Tracked::exact(BigComplex::from_real(&(&wr / &BigReal::from_i64(2, prec))));
    Ok(half_w.mul(&c.d1.mul(&dk).add(&c.d2.mul(&di))))
}

/// D1, D2 with error/scale below the policy target.
pub fn regular_coeffs(
    parity: Parity,
    k: &BigReal,
    g: &BigReal,
    policy: &PrecisionPolicy,
) -> Result<RegularCoefficients> {
    check_k(k)?;
    check_g(g)?;
    policy.validate()?;
    let need = policy.target_bits() as f64 + crate::specfun::SAFETY_BITS;
    for prec in policy.ladder() {
        let c = coeffs_at(parity, k, g, prec)?;
        if c.d1.rel_scale_err() <= -need && c.d2.rel_scale_err() <= -need {
            return Ok(RegularCoefficients {
                d1: c.d1.v,
                d2: c.d2.v,
            });
        }
    }
    Err(Error::PrecisionExhausted {
        max_bits: policy.max_bits,
        detail: "regular coefficients".into(),
    })
}

/// ψ_regular(r).
pub fn psi_regular(
    parity: Parity,
    k: &BigReal,
    g: &BigReal,
    r: &BigReal,
    policy: &PrecisionPolicy,
) -> Result<BigReal> {
    RegularSolution::new(parity, k.clone(), g.clone(), policy.clone())?.value(r)
}

/// dψ_regular/dr, from the order recurrences (no numerical differentiation).
pub fn psi_regular_slope(
    parity: Parity,
    k: &BigReal,
    g: &BigReal,
    r: &BigReal,
    policy: &PrecisionPolicy,
) -> Result<BigReal> {
    RegularSolution::new(parity, k.clone(), g.clone(), policy.clone())?.slope(r)
}

/// The regular solution for fixed (parity, k, g); coefficients are computed
/// once per working precision and shared by all sample points.
#[derive(Debug)]
pub struct RegularSolution {
    parity: Parity,
    k: BigReal,
    g: BigReal,
    policy: PrecisionPolicy,
    cache: Mutex<Vec<(u32, Arc<CoeffsAt>)>>,
}

impl RegularSolution {
    pub fn new(parity: Parity, k: BigReal, g: BigReal, policy: PrecisionPolicy) -> Result<Self> {
        check_k(&k)?;
        check_g(&g)?;
        policy.validate()?;
        Ok(RegularSolution {
            parity,
            k,
            g,
            policy,
            cache: Mutex::new(Vec::new()),
        })
    }

    fn coeffs(&self, prec: u32) -> Result<Arc<CoeffsAt>> {
        if let Some((_, c)) = self.cache.lock().unwrap().iter().find(|(p, _)| *p == prec) {
            return Ok(c.clone());
        }
        // computed outside the lock; a racing duplicate is bit-identical
        let c = Arc::new(coeffs_at(self.parity, &self.k, &self.g, prec)?);
        self.cache.lock().unwrap().push((prec, c.clone()));
        Ok(c)
    }

    fn check_r(r: &BigReal) -> Result<()> {
        if r.signum_i() < 0 || !r.is_finite() {
            return Err(Error::Domain(format!("r must be >= 0, got {}", r.to_f64())));
        }
        Ok(())
    }

    pub fn value_tracked(&self, r: &BigReal) -> Result<SecularValue> {
        Self::check_r(r)?;
        adaptive_tracked(&self.policy, "regular wavefunction", |prec| {
            let c = self.coeffs(prec)?;
            let (kw, iw) = functions_at(&c, &self.k, &self.g, r, prec)?;
            Ok(combine(&c, &kw, &iw))
        })
    }

    pub fn value(&self, r: &BigReal) -> Result<BigReal> {
        self.value_tracked(r).map(|v| v.value)
    }

    pub fn slope(&self, r: &BigReal) -> Result<BigReal> {
        Self::check_r(r)?;
        adaptive_tracked(&self.policy, "regular wavefunction slope", |prec| {
            let c = self.coeffs(prec)?;
            slope_kernel(&c, &self.k, &self.g, r, prec)
        })
        .map(|v| v.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(v: f64) -> BigReal {
        BigReal::from_f64(v, 128)
    }

    #[test]
    fn initial_conditions() {
        let p = PrecisionPolicy::default();
        let zero = BigReal::zero(128);
        let (k, g) = (real(1.7), real(0.8));
        let even = psi_regular(Parity::Even, &k, &g, &zero, &p).unwrap();
        assert!((even.to_f64() - 0.5).abs() < 1e-25);
        let even_slope = psi_regular_slope(Parity::Even, &k, &g, &zero, &p).unwrap();
        assert!(even_slope.to_f64().abs() < 1e-25);
        let odd = psi_regular(Parity::Odd, &k, &g, &zero, &p).unwrap();
        assert!(odd.is_zero());
        let odd_slope = psi_regular_slope(Parity::Odd, &k, &g, &zero, &p).unwrap();
        assert!((odd_slope.to_f64() - 0.5).abs() < 1e-25);
    }

    #[test]
    fn odd_coefficients_are_the_order_functions() {
        let p = PrecisionPolicy::default();
        let (k, g) = (real(2.0), real(1.0));
        let c = regular_coeffs(Parity::Odd, &k, &g, &p).unwrap();
        let i =
            crate::specfun::bessel_i(&BigComplex::from_f64(0.0, 4.0, 128), &real(2.0), &p).unwrap();
        let kk = crate::specfun::bessel_k_imag(&real(4.0), &real(2.0), &p).unwrap();
        assert!((&c.d1 + &i).abs().to_f64() < 1e-28 * i.abs().to_f64());
        assert!((&c.d2.re() - &kk).abs().to_f64() < 1e-28 * i.abs().to_f64());
    }

    #[test]
    fn negative_r_rejected() {
        let p = PrecisionPolicy::default();
        assert!(psi_regular(Parity::Even, &real(1.0), &real(1.0), &real(-0.1), &p).is_err());
    }
}
