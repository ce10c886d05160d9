//! Eigenvalue location: sign-change scans on a k grid, bisection refinement
//! to two-sided brackets, level numbering and precision-loss detection.

mod sweep;

use crate::bigfloat::{BigReal, PrecisionPolicy};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::secular::{Method, Parity, SecularSpec, SecularValue, K_MIN};
use crate::specfun::SAFETY_BITS;

pub use sweep::{
    find_levels, level_bracket, solve_levels, solve_spectrum, sweep_g, wkb_k_for_level,
    wkb_level_count, MethodChoice, SolveOptions, SweepPoint, SweepTemplate,
};

/// Precision of the k values carried by brackets.
const K_PREC: u32 = 128;

/// Default bisection tolerance on k.
pub const DEFAULT_K_TOL: f64 = 1e-12;

/// Anything whose sign can be evaluated as a function of k.
pub trait Secular: Sync {
    fn policy(&self) -> &PrecisionPolicy;
    /// Adaptive evaluation under `policy`.
    fn value(&self, k: &BigReal, policy: &PrecisionPolicy) -> Result<SecularValue>;
    /// One evaluation at `prec` bits.
    fn value_at(&self, k: &BigReal, prec: u32) -> Result<SecularValue>;
}

impl Secular for SecularSpec {
    fn policy(&self) -> &PrecisionPolicy {
        &self.policy
    }

    fn value(&self, k: &BigReal, policy: &PrecisionPolicy) -> Result<SecularValue> {
        if *policy == self.policy {
            self.evaluate_tracked(k)
        } else {
            self.with_policy(policy.clone()).evaluate_tracked(k)
        }
    }

    fn value_at(&self, k: &BigReal, prec: u32) -> Result<SecularValue> {
        self.evaluate_at(k, prec)
    }
}

/// Zero counts as positive so that every point has a definite side.
fn side(v: &SecularValue) -> i32 {
    if v.value.signum_i() < 0 {
        -1
    } else {
        1
    }
}

/// Adjacent grid points with opposite signs.
#[derive(Clone, Debug)]
pub struct RawBracket {
    pub k_lo: BigReal,
    pub k_hi: BigReal,
    pub sign_lo: i32,
}

#[derive(Clone, Debug)]
pub struct ScanFailure {
    pub k: f64,
    pub error: Error,
}

#[derive(Clone, Debug, Default)]
pub struct ScanResult {
    pub brackets: Vec<RawBracket>,
    pub failures: Vec<ScanFailure>,
}

/// Evaluates the sign on `steps + 1` equally spaced points of [k_lo, k_hi].
/// Intervals touching a failed point are not reported as brackets; the failure
/// is listed instead.
pub fn scan_sign_changes<F: Secular>(
    f: &F,
    k_lo: f64,
    k_hi: f64,
    steps: usize,
    exec: Execution,
) -> Result<ScanResult> {
    if !(k_lo >= K_MIN) || !(k_hi > k_lo) || steps < 2 {
        return Err(Error::Domain(format!(
            "scan needs {K_MIN:e} <= k_lo < k_hi and steps >= 2 (got [{k_lo}, {k_hi}], {steps})"
        )));
    }
    let dk = (k_hi - k_lo) / steps as f64;
    let ks: Vec<f64> = (0..=steps)
        .map(|j| {
            if j == steps {
                k_hi
            } else {
                k_lo + j as f64 * dk
            }
        })
        .collect();
    let policy = f.policy().clone();
    let signs = exec.map(&ks, |&k| {
        f.value(&BigReal::from_f64(k, K_PREC), &policy)
            .map(|v| side(&v))
    });

    let mut out = ScanResult::default();
    for (k, s) in ks.iter().zip(&signs) {
        if let Err(e) = s {
            out.failures.push(ScanFailure {
                k: *k,
                error: e.clone(),
            });
        }
    }
    for j in 0..steps {
        if let (Ok(a), Ok(b)) = (&signs[j], &signs[j + 1]) {
            if a != b {
                out.brackets.push(RawBracket {
                    k_lo: BigReal::from_f64(ks[j], K_PREC),
                    k_hi: BigReal::from_f64(ks[j + 1], K_PREC),
                    sign_lo: *a,
                });
            }
        }
    }
    Ok(out)
}

/// Two-sided bound on one eigenvalue.
#[derive(Clone, Debug)]
pub struct EnergyBracket {
    pub n: usize,
    pub parity: Parity,
    pub k_lo: BigReal,
    pub k_hi: BigReal,
    pub e_lo: BigReal,
    pub e_hi: BigReal,
    /// Turning point ln(E_mid/g²).
    pub x0: BigReal,
    pub method: Method,
    /// Set when the base precision could not resolve the bracket's signs
    /// and the bracket was re-refined at escalated precision.
    pub precision_flag: bool,
    /// Base precision of the policy that produced the accepted bracket.
    pub final_bits: u32,
}

impl EnergyBracket {
    pub fn k_mid(&self) -> BigReal {
        &(&self.k_lo + &self.k_hi) / &BigReal::from_i64(2, K_PREC)
    }

    pub fn e_mid(&self) -> BigReal {
        &(&self.e_lo + &self.e_hi) / &BigReal::from_i64(2, K_PREC)
    }

    pub fn width_k(&self) -> f64 {
        (&self.k_hi - &self.k_lo).to_f64()
    }

    /// Whether [e_lo, e_hi] intersects [lo, hi].
    pub fn intersects(&self, lo: f64, hi: f64) -> bool {
        self.e_lo.to_f64() <= hi && self.e_hi.to_f64() >= lo
    }
}

/// The sign at k, escalating past `policy` until it is resolved.
fn resolved_side<F: Secular>(f: &F, k: &BigReal, policy: &PrecisionPolicy) -> Result<i32> {
    let mut p = policy.clone();
    loop {
        let v = f.value(k, &p)?;
        if v.sign_is_reliable(SAFETY_BITS) {
            return Ok(side(&v));
        }
        p = p.escalated().ok_or_else(|| Error::PrecisionExhausted {
            max_bits: p.max_bits,
            detail: format!("sign at k = {} unresolved", k.to_f64()),
        })?;
    }
}

/// Bisection on [raw.k_lo, raw.k_hi] until the width is below `k_tol`.
/// Returns the final (k_lo, k_hi); the endpoints are re-checked at escalated
/// precision and `LostSignChange` is returned if they no longer differ.
pub fn bisect<F: Secular>(
    f: &F,
    raw: &RawBracket,
    k_tol: f64,
    policy: &PrecisionPolicy,
) -> Result<(BigReal, BigReal)> {
    if !(k_tol > 0.0) {
        return Err(Error::Domain(format!("k_tol must be > 0, got {k_tol}")));
    }
    let lost = || Error::LostSignChange {
        k_lo: raw.k_lo.to_f64(),
        k_hi: raw.k_hi.to_f64(),
    };
    let mut lo = raw.k_lo.with_precision(K_PREC);
    let mut hi = raw.k_hi.with_precision(K_PREC);
    let s_lo = resolved_side(f, &lo, policy)?;
    if s_lo == resolved_side(f, &hi, policy)? {
        return Err(lost());
    }
    let two = BigReal::from_i64(2, K_PREC);
    while (&hi - &lo).to_f64() >= k_tol {
        let mid = &(&lo + &hi) / &two;
        if mid == lo || mid == hi {
            break;
        }
        if resolved_side(f, &mid, policy)? == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let check = policy.escalated().unwrap_or_else(|| policy.clone());
    let a = resolved_side(f, &lo, &check)?;
    let b = resolved_side(f, &hi, &check)?;
    if a != s_lo || a == b {
        return Err(lost());
    }
    Ok((lo, hi))
}

fn make_bracket(
    spec: &SecularSpec,
    lo: BigReal,
    hi: BigReal,
    flag: bool,
    bits: u32,
) -> Result<EnergyBracket> {
    let e_lo = lo.square();
    let e_hi = hi.square();
    let g2 = spec.g.square();
    if e_lo <= g2 {
        return Err(Error::Domain(format!(
            "root k = {} below the potential minimum g = {}",
            lo.to_f64(),
            spec.g.to_f64()
        )));
    }
    let e_mid = &(&e_lo + &e_hi) / &BigReal::from_i64(2, K_PREC);
    let x0 = (&e_mid / &g2).ln();
    Ok(EnergyBracket {
        n: 0,
        parity: spec.parity,
        k_lo: lo,
        k_hi: hi,
        e_lo,
        e_hi,
        x0,
        method: spec.method.clone(),
        precision_flag: flag,
        final_bits: bits,
    })
}

/// Refines a raw bracket to width `k_tol`. A lost sign change or a precision
/// flag from [`detect_precision_loss`] escalates the policy and restarts.
/// The returned bracket has `n = 0`; numbering is done by [`assign_indices`].
pub fn refine(spec: &SecularSpec, raw: &RawBracket, k_tol: f64) -> Result<EnergyBracket> {
    let mut policy = spec.policy.clone();
    let mut flagged = false;
    loop {
        match bisect(spec, raw, k_tol, &policy) {
            Ok((lo, hi)) => {
                if !detect_at(spec, &lo, &hi, policy.base_bits) {
                    return make_bracket(spec, lo, hi, flagged, policy.base_bits);
                }
                log::debug!(
                    "precision flag at {} bits near k = {}",
                    policy.base_bits,
                    lo.to_f64()
                );
                flagged = true;
            }
            Err(Error::LostSignChange { k_lo, k_hi }) => {
                log::debug!(
                    "lost sign change on [{k_lo}, {k_hi}] at {} bits",
                    policy.base_bits
                );
                flagged = true;
            }
            Err(e) => return Err(e),
        }
        policy = policy
            .escalated()
            .ok_or_else(|| Error::PrecisionExhausted {
                max_bits: policy.max_bits,
                detail: format!("bracket near k = {} never resolved", raw.k_lo.to_f64()),
            })?;
    }
}

fn detect_at<F: Secular>(f: &F, k_lo: &BigReal, k_hi: &BigReal, prec: u32) -> bool {
    match (f.value_at(k_lo, prec), f.value_at(k_hi, prec)) {
        (Ok(a), Ok(b)) => {
            !a.sign_is_reliable(SAFETY_BITS)
                || !b.sign_is_reliable(SAFETY_BITS)
                || side(&a) == side(&b)
        }
        _ => true,
    }
}

/// True when, at the SecularSpec's base precision and without escalation, either
/// endpoint's value is within a factor 2^SAFETY_BITS of its tracked error
/// bound (or the endpoint signs fail to differ).
pub fn detect_precision_loss<F: Secular>(f: &F, bracket: &EnergyBracket) -> bool {
    detect_at(f, &bracket.k_lo, &bracket.k_hi, f.policy().base_bits)
}

/// Ascending table of levels with alternating parity, ground state even.
#[derive(Clone, Debug)]
pub struct SpectrumTable {
    pub g: BigReal,
    pub brackets: Vec<EnergyBracket>,
    pub method: Method,
    pub policy: PrecisionPolicy,
    pub k_tol: f64,
}

impl SpectrumTable {
    pub fn level(&self, n: usize) -> Option<&EnergyBracket> {
        self.brackets.get(n)
    }

    /// δ_n = E_{n+1} − E_n from bracket midpoints.
    pub fn spacings(&self) -> Vec<f64> {
        self.brackets
            .windows(2)
            .map(|w| (&w[1].e_mid() - &w[0].e_mid()).to_f64())
            .collect()
    }
}

/// Merges the parity lists by energy, numbers the levels 0, 1, 2, … and
/// checks that parities alternate starting from even.
pub fn assign_indices(
    even: Vec<EnergyBracket>,
    odd: Vec<EnergyBracket>,
    g: &BigReal,
    policy: &PrecisionPolicy,
    k_tol: f64,
) -> Result<SpectrumTable> {
    let method = even
        .first()
        .or(odd.first())
        .map_or(Method::AsymptoticDecay, |b| b.method.clone());
    let mut all: Vec<EnergyBracket> = even.into_iter().chain(odd).collect();
    all.sort_by(|a, b| a.e_lo.partial_cmp(&b.e_lo).expect("finite energies"));
    for (n, b) in all.iter_mut().enumerate() {
        if b.parity != Parity::of_level(n) {
            return Err(Error::MissedRoot { level: n });
        }
        b.n = n;
    }
    if all.windows(2).any(|w| w[1].e_lo <= w[0].e_hi) {
        return Err(Error::MissedRoot {
            level: all
                .windows(2)
                .position(|w| w[1].e_lo <= w[0].e_hi)
                .unwrap_or(0),
        });
    }
    Ok(SpectrumTable {
        g: g.clone(),
        brackets: all,
        method,
        policy: policy.clone(),
        k_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Stub {
        policy: PrecisionPolicy,
        f: fn(f64) -> f64,
    }

    impl Secular for Stub {
        fn policy(&self) -> &PrecisionPolicy {
            &self.policy
        }
        fn value(&self, k: &BigReal, policy: &PrecisionPolicy) -> Result<SecularValue> {
            self.value_at(k, policy.base_bits)
        }
        fn value_at(&self, k: &BigReal, prec: u32) -> Result<SecularValue> {
            let v = (self.f)(k.to_f64());
            Ok(SecularValue {
                value: BigReal::from_f64(v, prec),
                err_log2: -60.0,
                scale_log2: 0.0,
                prec,
            })
        }
    }

    fn stub(f: fn(f64) -> f64) -> Stub {
        Stub {
            policy: PrecisionPolicy::default(),
            f,
        }
    }

    #[test]
    fn constant_sign_has_no_brackets() {
        let s = scan_sign_changes(&stub(|_| 1.0), 0.1, 5.0, 50, Execution::Sequential).unwrap();
        assert!(s.brackets.is_empty());
        assert!(s.failures.is_empty());
    }

    #[test]
    fn scan_and_bisect_find_sine_zeros() {
        let f = stub(|k| k.sin());
        let s = scan_sign_changes(&f, 1.0, 10.0, 90, Execution::Parallel).unwrap();
        assert_eq!(s.brackets.len(), 3);
        let (lo, hi) = bisect(&f, &s.brackets[1], 1e-9, &f.policy).unwrap();
        assert!(
            lo.to_f64() <= 2.0 * std::f64::consts::PI && hi.to_f64() >= 2.0 * std::f64::consts::PI
        );
        assert!((&hi - &lo).to_f64() < 1e-9);
    }

    #[test]
    fn bad_scan_arguments() {
        assert!(scan_sign_changes(&stub(|k| k), 0.0, 1.0, 10, Execution::Sequential).is_err());
        assert!(scan_sign_changes(&stub(|k| k), 1.0, 2.0, 1, Execution::Sequential).is_err());
    }

    #[test]
    fn same_sign_bracket_is_lost() {
        let f = stub(|_| 1.0);
        let raw = RawBracket {
            k_lo: BigReal::from_f64(1.0, 128),
            k_hi: BigReal::from_f64(2.0, 128),
            sign_lo: 1,
        };
        assert!(matches!(
            bisect(&f, &raw, 1e-6, &f.policy),
            Err(Error::LostSignChange { .. })
        ));
    }
}
