//! Complex gamma function: upward argument shift followed by the Stirling
//! series with exact Bernoulli coefficients, and reflection for Re z < 1/2.

use std::sync::OnceLock;

use rug::float::Constant;
use rug::{Float, Integer, Rational};

use super::Estimate;
use crate::bigfloat::{log2_abs, BigComplex};
use crate::error::{Error, Result};

/// Number of Bernoulli numbers B_2, B_4, ..., B_{2N} kept in the cache.
const BERNOULLI_TERMS: usize = 400;

struct StirlingTable {
    /// B_{2j} / (2j (2j - 1)) for j = 1..=BERNOULLI_TERMS.
    coeffs: Vec<Rational>,
    /// log2 |coeffs[j]|, used for the a-priori remainder bound.
    log2_coeffs: Vec<f64>,
}

fn stirling_table() -> &'static StirlingTable {
    static TABLE: OnceLock<StirlingTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let bern = even_bernoulli(BERNOULLI_TERMS);
        let coeffs: Vec<Rational> = bern
            .iter()
            .enumerate()
            .map(|(idx, b)| {
                let j = (idx + 1) as u64;
                let denom = Integer::from(2 * j) * Integer::from(2 * j - 1);
                Rational::from(b / denom)
            })
            .collect();
        let log2_coeffs = coeffs
            .iter()
            .map(|c| log2_abs(&Float::with_val(64, c)))
            .collect();
        StirlingTable {
            coeffs,
            log2_coeffs,
        }
    })
}

/// Exact B_2, B_4, ..., B_{2n} from the tangent numbers (Brent–Harvey
/// in-place recurrence), B_{2k} = (-1)^{k-1} 2k T_k / (4^k (4^k - 1)).
pub(crate) fn even_bernoulli(n: usize) -> Vec<Rational> {
    let mut tangent: Vec<Integer> = vec![Integer::new(); n + 1];
    if n == 0 {
        return Vec::new();
    }
    tangent[1] = Integer::from(1);
    for k in 2..=n {
        tangent[k] = Integer::from(&tangent[k - 1] * (k as u64 - 1));
    }
    for k in 2..=n {
        for j in k..=n {
            let a = Integer::from(&tangent[j - 1] * (j as u64 - k as u64));
            let b = Integer::from(&tangent[j] * (j as u64 - k as u64 + 2));
            tangent[j] = a + b;
        }
    }
    (1..=n)
        .map(|k| {
            let four_k = Integer::from(1) << (2 * k as u32);
            let denom = &four_k * Integer::from(&four_k - 1u32);
            let mut num = Integer::from(&tangent[k] * (2 * k as u64));
            if k % 2 == 0 {
                num = -num;
            }
            Rational::from((num, denom))
        })
        .collect()
}

/// Returns `Some(n)` when z is exactly the nonpositive integer n.
fn nonpositive_integer(z: &BigComplex) -> Option<i64> {
    if !z.im_f().is_zero() || !z.re_f().is_integer() {
        return None;
    }
    let re = z.re_f().to_f64();
    if re <= 0.0 {
        Some(re as i64)
    } else {
        None
    }
}

/// Γ(z) at working precision `prec`, with an estimate of the bits lost.
pub(crate) fn gamma_at(z: &BigComplex, prec: u32) -> Result<Estimate<BigComplex>> {
    if let Some(n) = nonpositive_integer(z) {
        return Err(Error::GammaPole(n));
    }
    let z = z.with_precision(prec);
    let half = Float::with_val(prec, 0.5);
    if *z.re_f() < half {
        // Γ(z) = π / (sin(πz) Γ(1 - z))
        let one_minus = &BigComplex::one(prec) - &z;
        let g = gamma_shifted_stirling(&one_minus, prec)?;
        let (sin_pz, sin_lost) = sin_pi(&z, prec);
        let pi = Float::with_val(prec, Constant::Pi);
        let denom = &sin_pz * &g.value;
        let num = BigComplex::from_floats(pi, Float::new(prec), prec);
        let value = &num / &denom;
        let scale_log2 = value.log2_abs();
        return Ok(Estimate {
            value,
            lost_bits: g.lost_bits + sin_lost + 2.0,
            prec,
            scale_log2,
        });
    }
    gamma_shifted_stirling(&z, prec)
}

/// 1/Γ(z); exactly zero at the poles of Γ.
pub(crate) fn rgamma_at(z: &BigComplex, prec: u32) -> Result<Estimate<BigComplex>> {
    if nonpositive_integer(z).is_some() {
        return Ok(Estimate {
            value: BigComplex::zero(prec),
            lost_bits: 0.0,
            prec,
            scale_log2: f64::NEG_INFINITY,
        });
    }
    let g = gamma_at(z, prec)?;
    let value = g.value.recip();
    let scale_log2 = value.log2_abs();
    Ok(Estimate {
        value,
        lost_bits: g.lost_bits + 1.0,
        prec,
        scale_log2,
    })
}

/// sin(πz) and the bits lost to argument reduction near its zeros.
pub(crate) fn sin_pi(z: &BigComplex, prec: u32) -> (BigComplex, f64) {
    let pi = Float::with_val(prec, Constant::Pi);
    let a = Float::with_val(prec, z.re_f() * &pi);
    let b = Float::with_val(prec, z.im_f() * &pi);
    let (sa, ca) = crate::bigfloat::sin_cos(&a);
    let chb = Float::with_val(prec, b.cosh_ref());
    let shb = Float::with_val(prec, b.sinh_ref());
    let value = BigComplex::from_floats(
        Float::with_val(prec, &sa * &chb),
        Float::with_val(prec, &ca * &shb),
        prec,
    );
    // absolute error ≈ 2^-p |πz| cosh(πb), relative to |sin(πz)|
    let scale = log2_abs(&a).max(0.0) + log2_abs(&chb);
    let lost = (scale - value.log2_abs()).max(0.0) + 1.0;
    (value, lost)
}

fn gamma_shifted_stirling(z: &BigComplex, prec: u32) -> Result<Estimate<BigComplex>> {
    let table = stirling_table();
    let re = z.re_f().to_f64();
    let im = z.im_f().to_f64();
    let mut threshold = 0.16 * prec as f64 + 6.0;
    for _attempt in 0..8 {
        // smallest shift with |z + n| >= threshold and Re(z + n) >= 1
        let mut shift = 0u64;
        if threshold > im.abs() {
            let need = (threshold * threshold - im * im).sqrt() - re;
            if need > 0.0 {
                shift = need.ceil() as u64;
            }
        }
        if re + (shift as f64) < 1.0 {
            shift = (1.0 - re).ceil().max(0.0) as u64;
        }
        let w = shifted(z, shift, prec);
        if let Some((ln_gamma_w, terms_bits)) = stirling_ln_gamma(&w, prec, table) {
            let mut product = BigComplex::one(prec);
            for j in 0..shift {
                let zj = shifted(z, j, prec);
                product = &product * &zj;
            }
            let gamma_w = ln_gamma_w.exp();
            let value = if shift == 0 {
                gamma_w
            } else {
                &gamma_w / &product
            };
            let lost = terms_bits + ((shift + 1) as f64).log2() + 3.0;
            let scale_log2 = value.log2_abs();
            return Ok(Estimate {
                value,
                lost_bits: lost,
                prec,
                scale_log2,
            });
        }
        threshold *= 2.0;
    }
    Err(Error::PrecisionExhausted {
        max_bits: prec,
        detail: "Stirling series did not reach the requested accuracy".into(),
    })
}

fn shifted(z: &BigComplex, n: u64, prec: u32) -> BigComplex {
    BigComplex::from_floats(Float::with_val(prec, z.re_f() + n), z.im_f().clone(), prec)
}

/// ln Γ(w) for Re w >= 1 and |w| large; returns the value and the log2 of the
/// magnitude of its largest component (absolute error ≈ 2^(that - prec)).
fn stirling_ln_gamma(
    w: &BigComplex,
    prec: u32,
    table: &StirlingTable,
) -> Option<(BigComplex, f64)> {
    let modulus = w.abs().to_f64();
    let re = w.re_f().to_f64();
    // remainder bound carries sec^2(arg(w)/2)^(j+1)
    let log2_sec2 = (2.0 * modulus / (modulus + re)).log2();
    let log2_mod = modulus.log2();
    let target = -(prec as f64) - 8.0;

    let half = BigComplex::from_f64(0.5, 0.0, prec);
    let ln_w = w.ln();
    let ln_2pi_half = {
        let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
        Float::with_val(prec, two_pi.ln_ref()) / 2u32
    };
    let lead = &(&(w - &half) * &ln_w) - w;
    let mut sum = BigComplex::from_floats(
        Float::with_val(prec, lead.re_f() + &ln_2pi_half),
        lead.im_f().clone(),
        prec,
    );
    let magnitude_bits = lead.log2_abs().max(0.0);

    let w_inv = w.recip();
    let w_inv2 = &w_inv * &w_inv;
    let mut power = w_inv;
    let mut prev_bound = f64::INFINITY;
    for j in 1..table.coeffs.len() {
        let c = Float::with_val(prec, &table.coeffs[j - 1]);
        let term = BigComplex::from_floats(
            Float::with_val(prec, power.re_f() * &c),
            Float::with_val(prec, power.im_f() * &c),
            prec,
        );
        sum = &sum + &term;
        power = &power * &w_inv2;
        let bound =
            table.log2_coeffs[j] - (2 * j + 1) as f64 * log2_mod + (j + 1) as f64 * log2_sec2;
        if bound < target {
            return Some((sum, magnitude_bits));
        }
        if bound > prev_bound {
            return None;
        }
        prev_bound = bound;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_first_values() {
        let b = even_bernoulli(6);
        assert_eq!(b[0], Rational::from((1, 6)));
        assert_eq!(b[1], Rational::from((-1, 30)));
        assert_eq!(b[2], Rational::from((1, 42)));
        assert_eq!(b[3], Rational::from((-1, 30)));
        assert_eq!(b[4], Rational::from((5, 66)));
        assert_eq!(b[5], Rational::from((-691, 2730)));
    }

    #[test]
    fn pole_detection() {
        let z = BigComplex::from_f64(-3.0, 0.0, 128);
        assert_eq!(gamma_at(&z, 128).unwrap_err(), Error::GammaPole(-3));
        let z0 = BigComplex::from_f64(0.0, 0.0, 128);
        assert!(matches!(gamma_at(&z0, 128), Err(Error::GammaPole(0))));
        let r = rgamma_at(&z, 128).unwrap();
        assert!(r.value.is_zero());
    }
}
