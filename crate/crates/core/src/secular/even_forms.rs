//! Equivalent forms of the even-parity condition d/dg H⁽¹⁾_ν(2ig) = 0, ν = 2ik.
//!
//! With H'_ν = H_{ν−1} − (ν/z) H_ν and ν/z = k/g at z = 2ig, the derivative
//! condition is H_{ν−1} − (k/g) H_ν = 0. The alternative with g/k in place of
//! k/g is evaluated side by side so the two can be compared numerically; only
//! k/g follows from the chain rule.

use rug::float::Constant;
use rug::Float;

use super::{adaptive_tracked, check_g, check_k, order, Tracked};
use crate::bigfloat::{BigComplex, BigReal, PrecisionPolicy};
use crate::error::Result;
use crate::specfun::{bessel_i_at, hankel1};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrossCoefficient {
    /// H_{ν−1} − (g/k) H_ν
    GOverK,
    /// H_{ν−1} − (k/g) H_ν
    KOverG,
}

#[derive(Clone, Debug)]
pub struct EvenForms {
    /// Re[H_{ν−1}(2ig) − H_{ν+1}(2ig)] = (4/π) e^{πk} Re K_{1+ν}(2g).
    pub primary: BigReal,
    /// −½ d/dg K_ν(2g) = −K'_ν(2g) = Re K_{1+ν}(2g), from I'_ν = I_{ν+1} + (ν/x) I_ν.
    pub derivative: BigReal,
    /// H_{ν−1}(2ig) − (g/k) H_ν(2ig).
    pub cross_g_over_k: BigComplex,
    /// H_{ν−1}(2ig) − (k/g) H_ν(2ig).
    pub cross_k_over_g: BigComplex,
    /// H'_ν(2ig) = (1/2i) d/dg H_ν(2ig) = (2/π) e^{πk} · derivative.
    pub hankel_derivative: BigComplex,
    /// |H_{ν−1}(2ig)|, the size of the terms that cancel at a root.
    pub term_scale: f64,
}

impl EvenForms {
    /// |variant − H'_ν| / term_scale for (g/k, k/g).
    pub fn cross_mismatch(&self) -> (f64, f64) {
        let m = |v: &BigComplex| (v - &self.hankel_derivative).abs().to_f64() / self.term_scale;
        (m(&self.cross_g_over_k), m(&self.cross_k_over_g))
    }

    /// The single coefficient whose variant equals the derivative to `tol`
    /// (relative to `term_scale`), if exactly one does.
    pub fn agreeing_coefficient(&self, tol: f64) -> Option<CrossCoefficient> {
        match self.cross_mismatch() {
            (p, d) if p < tol && d >= tol => Some(CrossCoefficient::GOverK),
            (p, d) if d < tol && p >= tol => Some(CrossCoefficient::KOverG),
            _ => None,
        }
    }
}

fn derivative_kernel(k: &BigReal, g: &BigReal, prec: u32) -> Result<Tracked> {
    let (mu, nu) = order(k, prec);
    let x = Float::with_val(prec, g.as_float() * 2u32);
    let nu1 = &nu + &BigComplex::one(prec);
    let i0 = Tracked::from_estimate(bessel_i_at(&nu, &x, prec)?);
    let i1 = Tracked::from_estimate(bessel_i_at(&nu1, &x, prec)?);
    let mu_over_x = Float::with_val(prec, &mu / &x);
    let coef = Tracked::exact(BigComplex::from_floats(Float::new(prec), mu_over_x, prec));
    let di = i1.add(&coef.mul(&i0));
    // −K' = π Im I'_ν / sinh(μπ)
    let pi = Float::with_val(prec, Constant::Pi);
    let sinh = Float::with_val(prec, Float::with_val(prec, &mu * &pi).sinh_ref());
    let factor = Tracked::exact(BigComplex::from_floats(pi / sinh, Float::new(prec), prec));
    Ok(factor.mul(&di.im()))
}

pub fn equivalent_even_forms_residual(
    k: &BigReal,
    g: &BigReal,
    policy: &PrecisionPolicy,
) -> Result<EvenForms> {
    check_k(k)?;
    check_g(g)?;
    let prec = policy
        .base_bits
        .max(k.precision_bits())
        .max(g.precision_bits());
    let (_, nu) = order(k, prec);
    let one = BigComplex::one(prec);
    let t = (g * &BigReal::from_i64(2, prec)).with_precision(prec);
    let h_minus = hankel1(&(&nu - &one), &t, policy)?;
    let h_mid = hankel1(&nu, &t, policy)?;
    let h_plus = hankel1(&(&nu + &one), &t, policy)?;

    let primary = (&h_minus - &h_plus).re();
    let derivative = adaptive_tracked(policy, "even-form derivative", |p| {
        derivative_kernel(k, g, p)
    })?
    .value;

    let g_over_k = g / k;
    let k_over_g = k / g;
    let cross_g_over_k = &h_minus - &h_mid.scale(&g_over_k);
    let cross_k_over_g = &h_minus - &h_mid.scale(&k_over_g);

    // (2/π) e^{πk}
    let pi = BigReal::pi(prec);
    let prefactor = &(&BigReal::from_i64(2, prec) / &pi) * &(&pi * k).exp();
    let hankel_derivative = BigComplex::from_real(&(&prefactor * &derivative));
    Ok(EvenForms {
        primary,
        derivative,
        cross_g_over_k,
        cross_k_over_g,
        hankel_derivative,
        term_scale: h_minus.abs().to_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_matches_production_form() {
        let p = PrecisionPolicy::default();
        let k = BigReal::from_f64(1.3, 128);
        let g = BigReal::from_f64(0.9, 128);
        let forms = equivalent_even_forms_residual(&k, &g, &p).unwrap();
        let spec = super::super::SecularSpec::asymptotic(super::super::Parity::Even, g, p).unwrap();
        let prod = spec.evaluate(&k).unwrap();
        let rel = ((&forms.derivative - &prod).abs() / prod.abs()).to_f64();
        assert!(rel < 1e-25, "{rel:e}");
    }
}
