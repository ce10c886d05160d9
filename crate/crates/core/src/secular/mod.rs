//! Real-valued secular functions of the trial momentum k (parity × method)
//! and the two wavefunction representations they come from.
//!
//! With ν = 2ik, w = 2g·e^{r/2}:
//!
//! * asymptotic: ψ(r) = K_ν(w). Odd levels solve K_ν(2g) = 0, even levels
//!   solve Re K_{1+ν}(2g) = 0 (proportional to d/dg K_ν(2g)).
//! * regular: ψ(r) = D1·K_ν(w) + D2·I_ν(w) with coefficients fixed by the
//!   parity conditions at r = 0; levels solve ψ(R) = 0 for a cutoff R.

mod even_forms;
mod regular;
mod tracked;
mod wavefunction;

use std::fmt;
use std::str::FromStr;

use rug::Float;

use crate::bigfloat::{BigComplex, BigReal, PrecisionPolicy};
use crate::error::{Error, Result};
use crate::specfun::{bessel_k_shifted_at, k_imaginary_order_at, SAFETY_BITS};

pub use even_forms::{equivalent_even_forms_residual, CrossCoefficient, EvenForms};
pub use regular::{
    psi_regular, psi_regular_slope, regular_coeffs, RegularCoefficients, RegularSolution,
};
pub use wavefunction::{
    ode_residual, psi_asym, psi_fullline, sample_asym, sample_regular, uniform_grid, OdeResidual,
    Representation, WavefunctionSample,
};

pub(crate) use tracked::Tracked;

/// Scan floor for k; no bound state has k below g.
pub const K_MIN: f64 = 1e-6;

/// Default distance of the Dirichlet cutoff beyond the turning point.
pub const DEFAULT_CUTOFF_MARGIN: f64 = 2.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_level(n: usize) -> Self {
        if n.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// ψ(-x) = sign · ψ(x).
    pub fn mirror_sign(self) -> i32 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Parity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            _ => Err(Error::Domain(format!("unknown parity {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Method {
    AsymptoticDecay,
    /// Dirichlet condition ψ(R) = 0 on the regular solution.
    RegularMatch(BigReal),
}

impl Method {
    pub fn regular(r: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("cutoff R must be > 0, got {r}")));
        }
        Ok(Method::RegularMatch(BigReal::from_f64(r, 128)))
    }

    /// R = ln(E/g²) + margin, at least `margin`.
    pub fn default_cutoff(energy_estimate: f64, g2: f64) -> f64 {
        (energy_estimate / g2).ln().max(0.0) + DEFAULT_CUTOFF_MARGIN
    }

    pub fn cutoff(&self) -> Option<&BigReal> {
        match self {
            Method::AsymptoticDecay => None,
            Method::RegularMatch(r) => Some(r),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Method::AsymptoticDecay => "asymptotic",
            Method::RegularMatch(_) => "regular",
        }
    }
}

/// One real secular function of k.
#[derive(Clone, Debug)]
pub struct SecularSpec {
    pub parity: Parity,
    pub method: Method,
    pub g: BigReal,
    pub policy: PrecisionPolicy,
}

/// A secular-function value at a fixed working precision with its absolute
/// error bound; the bound is proportional to `2^scale_log2`, the magnitude of
/// the intermediates that cancel near a root.
#[derive(Clone, Debug)]
pub struct SecularValue {
    pub value: BigReal,
    pub err_log2: f64,
    pub scale_log2: f64,
    pub prec: u32,
}

impl SecularValue {
    pub fn sign(&self) -> i32 {
        self.value.signum_i()
    }

    /// Estimated absolute error.
    pub fn abs_err(&self) -> f64 {
        self.err_log2.exp2()
    }

    /// The sign is trustworthy when |value| exceeds the error by `guard_bits`.
    pub fn sign_is_reliable(&self, guard_bits: f64) -> bool {
        self.value.log2_abs() >= self.err_log2 + guard_bits
    }

    fn from_tracked(t: Tracked, prec: u32) -> Self {
        SecularValue {
            value: t.v.re(),
            err_log2: t.err,
            scale_log2: t.scale,
            prec,
        }
    }
}

impl SecularSpec {
    pub fn new(
        parity: Parity,
        method: Method,
        g: BigReal,
        policy: PrecisionPolicy,
    ) -> Result<Self> {
        positive("g", &g)?;
        if let Some(r) = method.cutoff() {
            positive("R", r)?;
        }
        policy.validate()?;
        Ok(SecularSpec {
            parity,
            method,
            g,
            policy,
        })
    }

    pub fn asymptotic(parity: Parity, g: BigReal, policy: PrecisionPolicy) -> Result<Self> {
        Self::new(parity, Method::AsymptoticDecay, g, policy)
    }

    pub fn with_policy(&self, policy: PrecisionPolicy) -> Self {
        SecularSpec {
            policy,
            ..self.clone()
        }
    }

    /// Value with relative-to-scale error below the policy target.
    pub fn evaluate(&self, k: &BigReal) -> Result<BigReal> {
        self.evaluate_tracked(k).map(|v| v.value)
    }

    pub fn evaluate_tracked(&self, k: &BigReal) -> Result<SecularValue> {
        check_k(k)?;
        let what = format!("{} {} secular function", self.parity, self.method.name());
        adaptive_tracked(&self.policy, &what, |prec| self.kernel(k, prec))
    }

    /// Single evaluation at `prec` bits, no escalation.
    pub fn evaluate_at(&self, k: &BigReal, prec: u32) -> Result<SecularValue> {
        check_k(k)?;
        self.kernel(k, prec)
            .map(|t| SecularValue::from_tracked(t, prec))
    }

    fn kernel(&self, k: &BigReal, prec: u32) -> Result<Tracked> {
        match &self.method {
            Method::AsymptoticDecay => asym_kernel(self.parity, k, &self.g, prec),
            Method::RegularMatch(r) => regular::psi_kernel(self.parity, k, &self.g, r, prec),
        }
    }
}

/// K_{2ik}(2g) (odd) or Re K_{1+2ik}(2g) (even).
pub fn secular_asym(spec: &SecularSpec, k: &BigReal) -> Result<BigReal> {
    if spec.method != Method::AsymptoticDecay {
        return Err(Error::Domain(
            "secular_asym needs the asymptotic method".into(),
        ));
    }
    spec.evaluate(k)
}

/// ψ_regular(R) for the SecularSpec's cutoff R.
pub fn secular_regular(spec: &SecularSpec, k: &BigReal) -> Result<BigReal> {
    if spec.method.cutoff().is_none() {
        return Err(Error::Domain("secular_regular needs a cutoff R".into()));
    }
    spec.evaluate(k)
}

pub(crate) fn asym_kernel(parity: Parity, k: &BigReal, g: &BigReal, prec: u32) -> Result<Tracked> {
    let mu = Float::with_val(prec, k.as_float() * 2u32);
    let x = Float::with_val(prec, g.as_float() * 2u32);
    match parity {
        Parity::Odd => k_imaginary_order_at(&mu, &x, prec).map(Tracked::from_real_estimate),
        Parity::Even => {
            bessel_k_shifted_at(&mu, 1, &x, prec).map(|e| Tracked::from_estimate(e).re())
        }
    }
}

/// Walks the precision ladder until error/scale drops below the target, then
/// checks that the dropped imaginary part is negligible.
pub(crate) fn adaptive_tracked(
    policy: &PrecisionPolicy,
    what: &str,
    mut eval: impl FnMut(u32) -> Result<Tracked>,
) -> Result<SecularValue> {
    policy.validate()?;
    let need = policy.target_bits() as f64 + SAFETY_BITS;
    let mut last = 0.0;
    for prec in policy.ladder() {
        let t = eval(prec)?;
        let rel = t.rel_scale_err();
        if rel <= -need {
            check_real(&t, policy.target_rel_err)?;
            return Ok(SecularValue::from_tracked(t, prec));
        }
        log::trace!("{what}: {prec} bits leave error/scale 2^{rel:.1}");
        last = rel;
    }
    Err(Error::PrecisionExhausted {
        max_bits: policy.max_bits,
        detail: format!("{what}: error/scale stuck at 2^{last:.0}"),
    })
}

fn check_real(t: &Tracked, tolerance: f64) -> Result<()> {
    if t.scale == f64::NEG_INFINITY {
        return Ok(());
    }
    let residue = (crate::bigfloat::log2_abs(t.v.im_f()) - t.scale).exp2();
    if residue > tolerance {
        return Err(Error::ImaginaryResidue { residue, tolerance });
    }
    Ok(())
}

fn positive(name: &str, v: &BigReal) -> Result<()> {
    if v.signum_i() <= 0 || !v.is_finite() {
        return Err(Error::Domain(format!(
            "{name} must be > 0, got {}",
            v.to_f64()
        )));
    }
    Ok(())
}

pub(crate) fn check_k(k: &BigReal) -> Result<()> {
    if !k.is_finite() || k.to_f64() < K_MIN {
        return Err(Error::Domain(format!(
            "k must be >= {K_MIN:e}, got {}",
            k.to_f64()
        )));
    }
    Ok(())
}

pub(crate) fn check_g(g: &BigReal) -> Result<()> {
    positive("g", g)
}

/// ν = 2ik at `prec`.
pub(crate) fn order(k: &BigReal, prec: u32) -> (Float, BigComplex) {
    let mu = Float::with_val(prec, k.as_float() * 2u32);
    let nu = BigComplex::from_floats(Float::new(prec), mu.clone(), prec);
    (mu, nu)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(v: f64) -> BigReal {
        BigReal::from_f64(v, 128)
    }

    #[test]
    fn parity_helpers() {
        assert_eq!(Parity::of_level(0), Parity::Even);
        assert_eq!(Parity::of_level(7), Parity::Odd);
        assert_eq!("Odd".parse::<Parity>().unwrap(), Parity::Odd);
        assert!("up".parse::<Parity>().is_err());
        assert_eq!(Parity::Odd.mirror_sign(), -1);
    }

    #[test]
    fn spec_validation() {
        let p = PrecisionPolicy::default();
        assert!(SecularSpec::asymptotic(Parity::Odd, real(0.0), p.clone()).is_err());
        assert!(Method::regular(-1.0).is_err());
        let spec = SecularSpec::asymptotic(Parity::Odd, real(1.0), p).unwrap();
        assert!(spec.evaluate(&real(0.0)).is_err());
        assert!(secular_regular(&spec, &real(1.0)).is_err());
    }

    #[test]
    fn default_cutoff_follows_turning_point() {
        let r = Method::default_cutoff(4.12, 2.0);
        assert!((r - (2.06f64.ln() + 2.5)).abs() < 1e-12);
    }

    #[test]
    fn odd_asym_is_k_imaginary_order() {
        let p = PrecisionPolicy::default();
        let spec = SecularSpec::asymptotic(Parity::Odd, real(1.0), p.clone()).unwrap();
        let v = secular_asym(&spec, &real(1.5)).unwrap();
        let k = crate::specfun::bessel_k_imag(&real(3.0), &real(2.0), &p).unwrap();
        let diff = (&v - &k).abs().to_f64();
        assert!(diff < 1e-30 * k.abs().to_f64().max(1e-3), "{diff:e}");
    }

    #[test]
    fn fixed_precision_reports_error_bound() {
        let spec =
            SecularSpec::asymptotic(Parity::Even, real(1.0), PrecisionPolicy::default()).unwrap();
        let lo = spec.evaluate_at(&real(2.0), 53).unwrap();
        let hi = spec.evaluate_at(&real(2.0), 256).unwrap();
        let actual = (&lo.value - &hi.value).abs().to_f64();
        assert!(actual <= lo.abs_err(), "{actual:e} > {:e}", lo.abs_err());
        assert!(hi.err_log2 < lo.err_log2 - 150.0);
    }
}
