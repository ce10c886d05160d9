//! Modified Bessel functions by ascending power series with cancellation
//! tracking. K is obtained from I through the connection formula, or through
//! the logarithmic series when the order is an integer.

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use super::gamma::{rgamma_at, sin_pi};
use super::Estimate;
use crate::bigfloat::{log2_abs, log2_sum, BigComplex};
use crate::error::{Error, Result};

const MAX_SERIES_TERMS: usize = 200_000;

fn check_argument(x: &Float) -> Result<()> {
    if !x.is_finite() || *x <= 0 {
        return Err(Error::Domain(format!(
            "Bessel argument must be > 0, got {}",
            x.to_f64()
        )));
    }
    Ok(())
}

fn integer_order(nu: &BigComplex) -> Option<i64> {
    if nu.im_f().is_zero() && nu.re_f().is_integer() {
        Some(nu.re_f().to_f64() as i64)
    } else {
        None
    }
}

/// I_ν(x) = (x/2)^ν Σ_m (x²/4)^m / (m! Γ(ν+m+1)), x > 0.
pub(crate) fn bessel_i_at(nu: &BigComplex, x: &Float, prec: u32) -> Result<Estimate<BigComplex>> {
    check_argument(x)?;
    let nu = match integer_order(nu) {
        // I_{-n} = I_n
        Some(n) if n < 0 => BigComplex::from_f64(-n as f64, 0.0, prec),
        _ => nu.with_precision(prec),
    };
    let half = Float::with_val(prec, x / 2u32);
    let quarter_sq = Float::with_val(prec, half.square_ref());
    let q_f64 = quarter_sq.to_f64();

    let nu_plus_one = &nu + &BigComplex::one(prec);
    let lead = rgamma_at(&nu_plus_one, prec)?;
    let mut term = lead.value.clone();
    let mut sum = term.clone();
    let mut max_log = term.log2_abs();
    let mut below = 0;
    let mut m: usize = 0;
    let (nu_re, nu_im) = nu.to_f64_pair();
    loop {
        m += 1;
        if m > MAX_SERIES_TERMS {
            return Err(Error::PrecisionExhausted {
                max_bits: prec,
                detail: "I-series did not converge".into(),
            });
        }
        let mf = m as f64;
        // denominator m (ν + m)
        let dre = Float::with_val(prec, nu.re_f() + m as u64) * m as u64;
        let dim = Float::with_val(prec, nu.im_f() * m as u64);
        let denom = BigComplex::from_floats(dre, dim, prec);
        let scaled = BigComplex::from_floats(
            Float::with_val(prec, term.re_f() * &quarter_sq),
            Float::with_val(prec, term.im_f() * &quarter_sq),
            prec,
        );
        term = &scaled / &denom;
        sum = &sum + &term;
        let lt = term.log2_abs();
        max_log = max_log.max(lt);
        // the term ratio q / ((m+1)|ν+m+1|) is decreasing in m once below one
        let next_ratio = q_f64 / ((mf + 1.0) * ((nu_re + mf + 1.0).powi(2) + nu_im * nu_im).sqrt());
        if lt < sum.log2_abs() - (prec as f64 + 2.0) && next_ratio < 1.0 {
            below += 1;
            if below >= 3 {
                break;
            }
        } else {
            below = 0;
        }
    }

    let ln_half = Float::with_val(prec, half.ln_ref());
    let exponent = BigComplex::from_floats(
        Float::with_val(prec, nu.re_f() * &ln_half),
        Float::with_val(prec, nu.im_f() * &ln_half),
        prec,
    );
    let prefactor = exponent.exp();
    let value = &prefactor * &sum;

    let cancellation = (max_log - sum.log2_abs()).max(0.0);
    let phase = (1.0 + exponent.abs().to_f64()).log2();
    let lost = lead.lost_bits + cancellation + 0.5 * (m as f64).log2() + phase + 2.0;
    let scale_log2 = max_log + prefactor.log2_abs();
    Ok(Estimate {
        value,
        lost_bits: lost,
        prec,
        scale_log2,
    })
}

/// K_ν(x) for arbitrary complex order.
pub(crate) fn bessel_k_at(nu: &BigComplex, x: &Float, prec: u32) -> Result<Estimate<BigComplex>> {
    check_argument(x)?;
    if let Some(n) = integer_order(nu) {
        return k_integer_at(n.unsigned_abs(), x, prec).map(real_to_complex);
    }
    if nu.re_f().is_zero() {
        let mu = Float::with_val(prec, nu.im_f().abs_ref());
        return k_imaginary_order_at(&mu, x, prec).map(real_to_complex);
    }
    k_reflection_at(&nu.with_precision(prec), x, prec)
}

/// K_{iμ+s}(x) for real μ >= 0 and integer shift s.
pub(crate) fn bessel_k_shifted_at(
    mu: &Float,
    s: i32,
    x: &Float,
    prec: u32,
) -> Result<Estimate<BigComplex>> {
    check_argument(x)?;
    if s == 0 {
        return k_imaginary_order_at(mu, x, prec).map(real_to_complex);
    }
    if mu.is_zero() {
        return k_integer_at(s.unsigned_abs() as u64, x, prec).map(real_to_complex);
    }
    let nu = BigComplex::from_floats(Float::with_val(prec, s), Float::with_val(prec, mu), prec);
    k_reflection_at(&nu, x, prec)
}

fn real_to_complex(est: Estimate<Float>) -> Estimate<BigComplex> {
    let prec = est.prec;
    Estimate {
        value: BigComplex::from_floats(est.value, Float::new(prec), prec),
        lost_bits: est.lost_bits,
        prec,
        scale_log2: est.scale_log2,
    }
}

/// K_{iμ}(x) = -π Im I_{iμ}(x) / sinh(μπ), real for real x > 0.
pub(crate) fn k_imaginary_order_at(mu: &Float, x: &Float, prec: u32) -> Result<Estimate<Float>> {
    check_argument(x)?;
    if mu.is_sign_negative() && !mu.is_zero() {
        return Err(Error::Domain(format!(
            "order parameter μ must be >= 0, got {}",
            mu.to_f64()
        )));
    }
    if mu.is_zero() {
        return k_integer_at(0, x, prec);
    }
    let nu = BigComplex::from_floats(Float::new(prec), Float::with_val(prec, mu), prec);
    let i_nu = bessel_i_at(&nu, x, prec)?;
    Ok(k_imaginary_from_i(mu, &i_nu, prec))
}

/// K_{iμ}(x) from an already computed I_{iμ}(x), μ > 0.
pub(crate) fn k_imaginary_from_i(
    mu: &Float,
    i_nu: &Estimate<BigComplex>,
    prec: u32,
) -> Estimate<Float> {
    let pi = Float::with_val(prec, Constant::Pi);
    let mu_pi = Float::with_val(prec, mu * &pi);
    let sinh = Float::with_val(prec, mu_pi.sinh_ref());
    let imag = i_nu.value.im_f();
    let value = Float::with_val(prec, imag * &pi) / &sinh;
    let value = -value;
    let cancellation = (i_nu.value.log2_abs() - log2_abs(imag)).max(0.0);
    let lost = i_nu.lost_bits + cancellation + (1.0 + mu_pi.to_f64()).log2() + 1.0;
    let scale_log2 = i_nu.scale_log2 + log2_abs(&pi) - log2_abs(&sinh);
    Estimate {
        value,
        lost_bits: lost,
        prec,
        scale_log2,
    }
}

/// K_ν = π (I_{-ν} - I_ν) / (2 sin νπ) for non-integer ν.
fn k_reflection_at(nu: &BigComplex, x: &Float, prec: u32) -> Result<Estimate<BigComplex>> {
    let plus = bessel_i_at(nu, x, prec)?;
    let minus = bessel_i_at(&-nu, x, prec)?;
    let diff = &minus.value - &plus.value;
    let (sin, sin_lost) = sin_pi(nu, prec);
    let pi = Float::with_val(prec, Constant::Pi);
    let num = diff.scale(&crate::bigfloat::BigReal::from_float(pi));
    let two_sin = BigComplex::from_floats(
        Float::with_val(prec, sin.re_f() * 2u32),
        Float::with_val(prec, sin.im_f() * 2u32),
        prec,
    );
    let value = &num / &two_sin;
    let cancellation =
        (plus.value.log2_abs().max(minus.value.log2_abs()) - diff.log2_abs()).max(0.0);
    let lost = plus.lost_bits.max(minus.lost_bits) + cancellation + sin_lost + 2.0;
    let scale_log2 = plus.scale_log2.max(minus.scale_log2)
        + log2_abs(&Float::with_val(prec, Constant::Pi))
        - two_sin.log2_abs();
    Ok(Estimate {
        value,
        lost_bits: lost,
        prec,
        scale_log2,
    })
}

/// Integer-order K_n(x), n >= 0, from the logarithmic ascending series
///
/// K_n(x) = ½(x/2)^{-n} Σ_{k<n} (n-k-1)!/k! (-x²/4)^k + (-1)^{n+1} ln(x/2) I_n(x)
///        + (-1)^n ½(x/2)^n Σ_k (ψ(k+1) + ψ(n+k+1)) (x²/4)^k / (k!(n+k)!).
pub(crate) fn k_integer_at(n: u64, x: &Float, prec: u32) -> Result<Estimate<Float>> {
    check_argument(x)?;
    let half = Float::with_val(prec, x / 2u32);
    let q = Float::with_val(prec, half.square_ref());
    let ln_half = Float::with_val(prec, half.ln_ref());
    let euler = Float::with_val(prec, Constant::Euler);

    // finite part
    let mut finite = Float::new(prec);
    let mut finite_log = f64::NEG_INFINITY;
    if n > 0 {
        let neg_q = Float::with_val(prec, -&q);
        // (n-1)! for k = 0
        let mut coef = Float::with_val(prec, 1u32);
        for j in 1..n {
            coef *= j;
        }
        let mut power = Float::with_val(prec, 1u32);
        for k in 0..n {
            if k > 0 {
                // (n-k-1)!/k! from (n-k)!/(k-1)!
                coef /= (n - k) * k;
                power *= &neg_q;
            }
            let t = Float::with_val(prec, &coef * &power);
            finite_log = finite_log.max(log2_abs(&t));
            finite += &t;
        }
        let half_pow = Float::with_val(prec, (&half).pow(n as i32));
        finite /= &half_pow;
        finite /= 2u32;
        finite_log -= log2_abs(&half_pow) + 1.0;
    }

    // u_k = q^k / (k! (n+k)!), starting from 1/n!
    let mut u = Float::with_val(prec, 1u32);
    for j in 1..=n {
        u /= j;
    }
    let mut harmonic_k = Float::new(prec); // H_k
    let mut harmonic_nk = Float::new(prec); // H_{n+k}
    for j in 1..=n {
        harmonic_nk += Float::with_val(prec, 1u32) / j;
    }
    let mut sum_i = Float::new(prec);
    let mut sum_psi = Float::new(prec);
    let mut max_log = f64::NEG_INFINITY;
    let mut below = 0;
    let mut k: u64 = 0;
    loop {
        // ψ(k+1) + ψ(n+k+1) = H_k + H_{n+k} - 2γ
        let psi_sum = Float::with_val(prec, &harmonic_k + &harmonic_nk)
            - Float::with_val(prec, &euler * 2u32);
        let t_psi = Float::with_val(prec, &u * &psi_sum);
        sum_i += &u;
        sum_psi += &t_psi;
        let weight = log2_sum(
            log2_abs(&t_psi),
            log2_abs(&u) + log2_abs(&ln_half).max(0.0) + 1.0,
        );
        max_log = max_log.max(weight);
        let current = log2_sum(log2_abs(&sum_i), log2_abs(&sum_psi));
        let decreasing = q.to_f64() < ((k + 1) * (n + k + 1)) as f64;
        if weight < current - (prec as f64 + 2.0) && decreasing {
            below += 1;
            if below >= 3 {
                break;
            }
        } else {
            below = 0;
        }
        k += 1;
        if k as usize > MAX_SERIES_TERMS {
            return Err(Error::PrecisionExhausted {
                max_bits: prec,
                detail: "integer-order K series did not converge".into(),
            });
        }
        u *= &q;
        u /= k * (n + k);
        harmonic_k += Float::with_val(prec, 1u32) / k;
        harmonic_nk += Float::with_val(prec, 1u32) / (n + k);
    }

    let half_pow_n = Float::with_val(prec, (&half).pow(n as i32));
    let i_n = Float::with_val(prec, &sum_i * &half_pow_n);
    let log_part = Float::with_val(prec, &ln_half * &i_n);
    let psi_part = Float::with_val(prec, &sum_psi * &half_pow_n) / 2u32;
    let odd = n % 2 == 1;
    let mut value = finite.clone();
    if odd {
        value += &log_part;
        value -= &psi_part;
    } else {
        value -= &log_part;
        value += &psi_part;
    }
    let scale = [
        finite_log,
        log2_abs(&log_part),
        log2_abs(&psi_part),
        max_log + log2_abs(&half_pow_n),
    ]
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max);
    let cancellation = (scale - log2_abs(&value)).max(0.0);
    let lost = cancellation + 0.5 * ((k + 1) as f64).log2() + 3.0;
    Ok(Estimate {
        value,
        lost_bits: lost,
        prec,
        scale_log2: scale,
    })
}
