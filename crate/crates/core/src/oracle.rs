//! Independent checks: a hardware-float Numerov shooting solver for
//! −ψ″ + g²e^r ψ = Eψ on [0, R_max] with parity data at r = 0, and a direct
//! evaluator of the two-term I-Bessel general solution of
//! −y″ + a·e^{bx} y = c·y.

use crate::bigfloat::{BigComplex, BigReal, PrecisionPolicy};
use crate::error::{Error, Result};
use crate::secular::Parity;
use crate::specfun::{bessel_i, gamma_complex};

/// Renormalize by 2^-RESCALE_EXP once |ψ| exceeds 2^RESCALE_EXP.
const RESCALE_EXP: i32 = 500;

#[derive(Clone, Debug, PartialEq)]
pub struct NumerovConfig {
    pub h: f64,
    pub r_max: f64,
    /// Width of the returned energy bracket.
    pub e_tol: f64,
}

impl NumerovConfig {
    pub fn new(h: f64, r_max: f64, e_tol: f64) -> Result<Self> {
        let cfg = NumerovConfig { h, r_max, e_tol };
        if !(h > 0.0) || !(r_max > 0.0) || !(e_tol > 0.0) {
            return Err(Error::Oracle(format!(
                "h, R_max, E_tol must be > 0: {cfg:?}"
            )));
        }
        Ok(cfg)
    }

    /// Domain to x0 + 6 of an energy estimate and a step resolving the wall.
    pub fn for_energy(g: f64, energy: f64) -> Self {
        let x0 = (energy / (g * g)).ln().max(0.0);
        let r_max = x0 + 6.0;
        let v_max = g * g * r_max.exp();
        NumerovConfig {
            h: (0.25 / v_max.sqrt()).min(1e-4),
            r_max,
            e_tol: 1e-11 * energy.max(1.0),
        }
    }

    /// h ≤ 0.25/√V(R_max) for the given coupling.
    pub fn resolves(&self, g: f64) -> bool {
        self.h <= 0.25 / (g * g * self.r_max.exp()).sqrt()
    }
}

/// Result of one outward integration.
#[derive(Clone, Debug, PartialEq)]
pub struct Shot {
    /// ψ(R_max) up to a positive power-of-two factor.
    pub endpoint: f64,
    /// Sign changes on (0, R_max], counting a change at the endpoint.
    pub half_line_nodes: usize,
}

impl Shot {
    /// Nodes of the full-line function: mirrored nodes plus the origin for odd.
    pub fn full_line_nodes(&self, parity: Parity) -> usize {
        2 * self.half_line_nodes + usize::from(parity == Parity::Odd)
    }
}

/// Integrates ψ″ = (g²e^r − E)ψ from r = 0 with (ψ, ψ′) = (1, 0) (even) or
/// (0, 1) (odd). The second point comes from a fifth-order Taylor expansion.
pub fn shoot(g: f64, energy: f64, parity: Parity, cfg: &NumerovConfig) -> Result<Shot> {
    if !(g > 0.0) || !energy.is_finite() {
        return Err(Error::Oracle(format!(
            "bad arguments g = {g}, E = {energy}"
        )));
    }
    let g2 = g * g;
    let h = cfg.h;
    let steps = (cfg.r_max / h).round() as usize;
    if steps < 4 {
        return Err(Error::Oracle(format!("R_max/h = {steps} steps is too few")));
    }
    let f = |r: f64| g2 * r.exp() - energy;
    let (p0, d0) = match parity {
        Parity::Even => (1.0, 0.0),
        Parity::Odd => (0.0, 1.0),
    };
    // derivatives of ψ at 0 from ψ″ = fψ, with f′ = f″ = f‴ = g² at r = 0
    let f0 = g2 - energy;
    let p2 = f0 * p0;
    let p3 = g2 * p0 + f0 * d0;
    let p4 = g2 * p0 + 2.0 * g2 * d0 + f0 * p2;
    let p5 = g2 * p0 + 3.0 * g2 * d0 + 3.0 * g2 * p2 + f0 * p3;
    let mut prev = p0;
    let mut cur = p0
        + h * d0
        + h * h / 2.0 * p2
        + h.powi(3) / 6.0 * p3
        + h.powi(4) / 24.0 * p4
        + h.powi(5) / 120.0 * p5;

    let c = h * h / 12.0;
    let mut nodes = 0usize;
    let mut last_sign = if cur != 0.0 { cur.signum() } else { 0.0 };
    let mut f_prev = f(0.0);
    let mut f_cur = f(h);
    for j in 1..steps {
        let r_next = (j + 1) as f64 * h;
        let f_next = f(r_next);
        let next =
            (2.0 * cur * (1.0 + 5.0 * c * f_cur) - prev * (1.0 - c * f_prev)) / (1.0 - c * f_next);
        prev = cur;
        cur = next;
        f_prev = f_cur;
        f_cur = f_next;
        if cur.abs() > 2f64.powi(RESCALE_EXP) {
            let s = 2f64.powi(-RESCALE_EXP);
            cur *= s;
            prev *= s;
        }
        if !cur.is_finite() {
            return Err(Error::Oracle(format!("non-finite ψ at r = {r_next}")));
        }
        let s = cur.signum();
        if cur != 0.0 {
            if last_sign != 0.0 && s != last_sign {
                nodes += 1;
            }
            last_sign = s;
        }
    }
    Ok(Shot {
        endpoint: cur,
        half_line_nodes: nodes,
    })
}

/// ψ(R_max) up to a positive factor.
pub fn numerov_endpoint(g: f64, energy: f64, parity: Parity, cfg: &NumerovConfig) -> Result<f64> {
    if energy <= g * g {
        return Err(Error::Oracle(format!(
            "E = {energy} must exceed g² = {}",
            g * g
        )));
    }
    shoot(g, energy, parity, cfg).map(|s| s.endpoint)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleEnergy {
    pub e_lo: f64,
    pub e_hi: f64,
}

impl OracleEnergy {
    pub fn mid(&self) -> f64 {
        0.5 * (self.e_lo + self.e_hi)
    }
}

/// Level n of the given parity by node counting and bisection: the level
/// with m = ⌊n/2⌋ half-line nodes sits where the count first reaches m + 1.
pub fn numerov_energy(
    g: f64,
    n: usize,
    parity: Parity,
    cfg: &NumerovConfig,
) -> Result<OracleEnergy> {
    if Parity::of_level(n) != parity {
        return Err(Error::Oracle(format!("level {n} is not {parity}")));
    }
    let g2 = g * g;
    let m = n / 2;
    let too_small = || Error::DomainTooSmall {
        level: n,
        r_max: cfg.r_max,
    };
    let past = |e: f64| -> Result<bool> { Ok(shoot(g, e, parity, cfg)?.half_line_nodes > m) };
    let e_wall = g2 * cfg.r_max.exp();
    let mut lo = g2;
    let mut hi = g2 + 1.0;
    while !past(hi)? {
        lo = hi;
        hi = g2 + 2.0 * (hi - g2);
        if hi > e_wall {
            return Err(too_small());
        }
    }
    while hi - lo > cfg.e_tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if past(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // the Dirichlet wall must sit well beyond the turning point
    if (hi / g2).ln() + 2.0 > cfg.r_max {
        return Err(too_small());
    }
    Ok(OracleEnergy { e_lo: lo, e_hi: hi })
}

/// Parameters of −y″ + a·e^{bx} y = c·y and the two superposition weights.
#[derive(Clone, Debug)]
pub struct GeneralSolutionCoeffs {
    pub a: BigReal,
    pub b: BigReal,
    pub c: BigReal,
    pub k1: BigComplex,
    pub k2: BigComplex,
}

impl GeneralSolutionCoeffs {
    /// k2 = conj(k1)·e^{2π√c/b}, which makes y real on the real line.
    pub fn real_pair(a: BigReal, b: BigReal, c: BigReal, k1: BigComplex) -> Result<Self> {
        check_params(&a, &b, &c)?;
        let pi = BigReal::pi(a.precision_bits());
        let factor =
            (&(&BigReal::from_i64(2, pi.precision_bits()) * &(&pi * &c.sqrt())) / &b).exp();
        let k2 = k1.conj().scale(&factor);
        Ok(GeneralSolutionCoeffs { a, b, c, k1, k2 })
    }

    /// Weights reproducing the values y1 at x1 and y2 at x2.
    pub fn matching(
        a: BigReal,
        b: BigReal,
        c: BigReal,
        (x1, y1): (&BigReal, &BigComplex),
        (x2, y2): (&BigReal, &BigComplex),
        policy: &PrecisionPolicy,
    ) -> Result<Self> {
        check_params(&a, &b, &c)?;
        let (t11, t12) = basis(&a, &b, &c, x1, policy)?;
        let (t21, t22) = basis(&a, &b, &c, x2, policy)?;
        let det = &(&t11 * &t22) - &(&t12 * &t21);
        if det.is_zero() {
            return Err(Error::Oracle(
                "matching points give a singular system".into(),
            ));
        }
        let k1 = &(&(y1 * &t22) - &(y2 * &t12)) / &det;
        let k2 = &(&(&t11 * y2) - &(&t21 * y1)) / &det;
        Ok(GeneralSolutionCoeffs { a, b, c, k1, k2 })
    }
}

fn check_params(a: &BigReal, b: &BigReal, c: &BigReal) -> Result<()> {
    if a.signum_i() <= 0 {
        return Err(Error::Oracle(format!("a must be > 0, got {}", a.to_f64())));
    }
    if b.is_zero() {
        return Err(Error::Oracle("b must be nonzero".into()));
    }
    if c.signum_i() <= 0 {
        return Err(Error::Oracle(format!("c must be > 0, got {}", c.to_f64())));
    }
    Ok(())
}

/// The two basis terms e^{±π√c/b} Γ(1 ∓ iα) I_{∓iα}(z), α = 2√c/b,
/// z = 2√(a e^{bx})/b.
fn basis(
    a: &BigReal,
    b: &BigReal,
    c: &BigReal,
    x: &BigReal,
    policy: &PrecisionPolicy,
) -> Result<(BigComplex, BigComplex)> {
    let prec = policy
        .base_bits
        .max(a.precision_bits())
        .max(c.precision_bits());
    let two = BigReal::from_i64(2, prec);
    let alpha = &(&two * &c.sqrt()) / b;
    let z = &(&two * &(a * &(b * x).exp()).sqrt()) / b;
    let half_pi_alpha = &(&BigReal::pi(prec) * &alpha) / &two;
    let one = BigComplex::one(prec);
    let i_alpha = BigComplex::imaginary(&alpha);
    let z_abs = z.abs();
    let term = |nu: &BigComplex, pre: BigReal| -> Result<BigComplex> {
        let gamma = gamma_complex(&(&one - nu), policy)?;
        let mut i_val = bessel_i(nu, &z_abs, policy)?;
        if z.signum_i() < 0 {
            // I_ν(−x) = e^{iπν} I_ν(x)
            let phase = BigComplex::imaginary(&BigReal::pi(prec)) * nu.clone();
            i_val = &i_val * &phase.exp();
        }
        Ok((&gamma * &i_val).scale(&pre))
    };
    let t1 = term(&-&i_alpha, half_pi_alpha.exp())?;
    let t2 = term(&i_alpha, (-&half_pi_alpha).exp())?;
    Ok((t1, t2))
}

/// k1·e^{π√c/b}Γ(1−iα)I_{−iα}(z) + k2·e^{−π√c/b}Γ(1+iα)I_{iα}(z).
pub fn general_solution_value(
    coeffs: &GeneralSolutionCoeffs,
    x: &BigReal,
    policy: &PrecisionPolicy,
) -> Result<BigComplex> {
    check_params(&coeffs.a, &coeffs.b, &coeffs.c)?;
    let (t1, t2) = basis(&coeffs.a, &coeffs.b, &coeffs.c, x, policy)?;
    Ok(&(&coeffs.k1 * &t1) + &(&coeffs.k2 * &t2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn below_ground_state_has_no_node() {
        let cfg = NumerovConfig::new(1e-3, 6.0, 1e-9).unwrap();
        let s = shoot(2f64.sqrt(), 3.0, Parity::Even, &cfg).unwrap();
        assert_eq!(s.half_line_nodes, 0);
        assert!(s.endpoint > 0.0);
    }

    #[test]
    fn ground_state_table_value() {
        let cfg = NumerovConfig::new(1e-3, 8.0, 1e-9).unwrap();
        let e = numerov_energy(2f64.sqrt(), 0, Parity::Even, &cfg).unwrap();
        assert!(e.e_lo > 4.12005 && e.e_hi < 4.12010, "{e:?}");
    }

    #[test]
    fn parity_mismatch_and_small_domain() {
        let cfg = NumerovConfig::new(1e-3, 3.0, 1e-9).unwrap();
        assert!(numerov_energy(1.0, 1, Parity::Even, &cfg).is_err());
        assert!(matches!(
            numerov_energy(1.0, 10, Parity::Even, &cfg),
            Err(Error::DomainTooSmall { level: 10, .. })
        ));
    }

    #[test]
    fn config_helpers() {
        assert!(NumerovConfig::new(0.0, 1.0, 1.0).is_err());
        let cfg = NumerovConfig::for_energy(1.0, 10.0);
        assert!(cfg.resolves(1.0));
        assert!((cfg.r_max - (10f64.ln() + 6.0)).abs() < 1e-12);
    }
}
