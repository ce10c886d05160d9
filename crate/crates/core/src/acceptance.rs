//! The acceptance suite: nine end-to-end checks of the solver against the
//! reference bracketing table, the Numerov oracle, special-function
//! identities and the qualitative features of the spectrum.
//!
//! Shared by the `acceptance` integration test and the CLI `check` command.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use crate::bigfloat::{BigComplex, BigReal, PrecisionPolicy};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::oracle::{numerov_energy, NumerovConfig};
use crate::rootfind::{
    detect_precision_loss, find_levels, level_bracket, refine, scan_sign_changes, solve_spectrum,
    wkb_k_for_level, EnergyBracket, MethodChoice, SolveOptions, DEFAULT_K_TOL,
};
use crate::secular::{
    equivalent_even_forms_residual, ode_residual, psi_fullline, psi_regular, psi_regular_slope,
    sample_asym, sample_regular, uniform_grid, CrossCoefficient, Method, Parity, SecularSpec,
};
use crate::specfun::{bessel_k_shifted, wronskian_residual};

/// Reference even-level brackets at g² = 2: (n, R, E_lo, E_hi).
pub const TABLE1: [(usize, f64, f64, f64); 3] = [
    (0, 3.0, 4.12005, 4.12010),
    (2, 3.0, 11.0065, 11.0075),
    (4, 3.4, 18.2822, 18.2830),
];

/// (id, short name) of every criterion.
pub const CRITERIA: [(u8, &str); 9] = [
    (1, "table1 reproduction"),
    (2, "cross-method/oracle agreement"),
    (3, "special-function identities"),
    (4, "matching conditions and ODE residual"),
    (5, "even-form equivalence"),
    (6, "precision-loss region"),
    (7, "square-root equidistance"),
    (8, "wavefunction divergence onset"),
    (9, "high-n spacing growth"),
];

/// Criteria run by `--fast`.
pub const FAST: [u8; 5] = [1, 3, 4, 5, 8];

#[derive(Clone, Debug)]
pub struct AcceptanceOptions {
    pub policy: PrecisionPolicy,
    pub exec: Execution,
}

impl Default for AcceptanceOptions {
    fn default() -> Self {
        AcceptanceOptions {
            policy: PrecisionPolicy::default(),
            exec: Execution::Parallel,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl CriterionReport {
    /// One line: `[PASS] 3 special-function identities (1.2 s): ...`.
    pub fn line(&self) -> String {
        format!(
            "[{}] {} {} ({:.1} s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

/// Runs one criterion; computation errors count as failures.
pub fn run_criterion(id: u8, opts: &AcceptanceOptions) -> Result<CriterionReport> {
    let name = CRITERIA
        .iter()
        .find(|(i, _)| *i == id)
        .map(|(_, n)| *n)
        .ok_or_else(|| Error::Domain(format!("no criterion {id}")))?;
    let start = Instant::now();
    let outcome = match id {
        1 => table1(opts),
        2 => triple_agreement(opts),
        3 => identities(opts),
        4 => matching_conditions(opts),
        5 => even_forms(opts),
        6 => precision_region(opts),
        7 => equidistance(opts),
        8 => divergence_onset(opts),
        _ => spacing_growth(opts),
    };
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    Ok(CriterionReport {
        id,
        name,
        passed,
        detail,
        elapsed: start.elapsed(),
    })
}

pub fn run_all(ids: &[u8], opts: &AcceptanceOptions) -> Result<Vec<CriterionReport>> {
    ids.iter().map(|&id| run_criterion(id, opts)).collect()
}

type Outcome = Result<(bool, String)>;

fn big(v: f64, policy: &PrecisionPolicy) -> BigReal {
    BigReal::from_f64(v, policy.base_bits)
}

fn k_max_for(g: f64, n: usize) -> f64 {
    wkb_k_for_level(g * g, n + 1) * 1.05 + 0.5
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn level(spec: &SecularSpec, n: usize, k_tol: f64, exec: Execution) -> Result<EnergyBracket> {
    let opts = SolveOptions {
        k_tol,
        exec,
        ..SolveOptions::default()
    };
    level_bracket(spec, n, &opts)
}

fn table1(opts: &AcceptanceOptions) -> Outcome {
    let policy = &opts.policy;
    let g = big(2.0, policy).sqrt();
    let mut ok = true;
    let mut detail = String::new();
    for (n, r, lo, hi) in TABLE1 {
        // a bracket as wide as the reference one: ΔE = 2k Δk
        let k_tol = (hi - lo) / (2.0 * (0.5 * (lo + hi)).sqrt());
        let regular =
            SecularSpec::new(Parity::Even, Method::regular(r)?, g.clone(), policy.clone())?;
        let asym = SecularSpec::asymptotic(Parity::Even, g.clone(), policy.clone())?;
        let br = level(&regular, n, k_tol, opts.exec)?;
        let ba = level(&asym, n, DEFAULT_K_TOL, opts.exec)?;
        let hit_r = br.intersects(lo, hi);
        let hit_a = ba.intersects(lo, hi);
        ok &= hit_r && hit_a;
        let _ = write!(
            detail,
            "E{n}: regular(R={r}) [{:.7}, {:.7}]{} asym [{:.10}, {:.10}]{}; ",
            br.e_lo.to_f64(),
            br.e_hi.to_f64(),
            if hit_r { "" } else { " MISS" },
            ba.e_lo.to_f64(),
            ba.e_hi.to_f64(),
            if hit_a { "" } else { " MISS" },
        );
    }
    Ok((ok, detail.trim_end_matches("; ").to_string()))
}

fn triple_agreement(opts: &AcceptanceOptions) -> Outcome {
    let policy = &opts.policy;
    let solve = SolveOptions {
        k_tol: 1e-10,
        exec: opts.exec,
        ..SolveOptions::default()
    };
    let gs = [0.5, 1.0, std::f64::consts::SQRT_2, 2.0, 3.0];
    let mut worst: f64 = 0.0;
    let mut worst_at = String::new();
    for g in gs {
        let gb = big(g, policy);
        let asym = solve_spectrum(&gb, &MethodChoice::Asymptotic, 8, policy, &solve)?;
        let regular = solve_spectrum(&gb, &MethodChoice::Regular(None), 8, policy, &solve)?;
        let energies: Vec<(usize, f64)> = asym
            .brackets
            .iter()
            .map(|b| (b.n, b.e_mid().to_f64()))
            .collect();
        let oracle = opts.exec.map(&energies, |&(n, e)| {
            numerov_energy(g, n, Parity::of_level(n), &NumerovConfig::for_energy(g, e))
                .map(|o| o.mid())
        });
        for (((n, ea), br), eo) in energies.iter().zip(&regular.brackets).zip(oracle) {
            let er = br.e_mid().to_f64();
            let eo = eo?;
            let d = rel(er, *ea).max(rel(eo, *ea)).max(rel(eo, er));
            if d > worst {
                worst = d;
                worst_at = format!("g={g:.4} n={n}");
            }
        }
    }
    Ok((
        worst < 1e-6,
        format!(
            "45 levels, worst pairwise relative difference {worst:.2e} at {worst_at} (limit 1e-6)"
        ),
    ))
}

fn identities(opts: &AcceptanceOptions) -> Outcome {
    let policy = &opts.policy;
    let prec = policy.base_bits;
    let mut points = Vec::new();
    for i in 0..10 {
        for j in 0..10 {
            let mu = 80.0 * i as f64 / 9.0;
            // log-spaced x from 0.01 to 40
            let x = 0.01 * 4000f64.powf(j as f64 / 9.0);
            points.push((mu, x));
        }
    }
    let results = opts.exec.map(&points, |&(mu, x)| -> Result<(f64, f64)> {
        let m = big(mu, policy);
        let xb = big(x, policy);
        let nu = BigComplex::imaginary(&m);
        let w = (&wronskian_residual(&nu, &xb, policy)? * &xb).to_f64();
        // ν = 1 + iμ: K_{ν−1} − K_{ν+1} + (2ν/x) K_ν = 0
        let k0 = bessel_k_shifted(&m, 0, &xb, policy)?;
        let k1 = bessel_k_shifted(&m, 1, &xb, policy)?;
        let k2 = bessel_k_shifted(&m, 2, &xb, policy)?;
        let two_over_x = &BigReal::from_i64(2, prec) / &xb;
        let coef = BigComplex::new(two_over_x.clone(), &two_over_x * &m);
        let t = &coef * &k1;
        let resid = (&(&k0 - &k2) + &t).abs();
        let scale = [k0.abs(), k2.abs(), t.abs()]
            .into_iter()
            .fold(BigReal::zero(prec), |a, b| if b > a { b } else { a });
        Ok((w, (&resid / &scale).to_f64()))
    });
    let mut worst_w: f64 = 0.0;
    let mut worst_r: f64 = 0.0;
    for r in results {
        let (w, k) = r?;
        worst_w = worst_w.max(w);
        worst_r = worst_r.max(k);
    }
    Ok((
        worst_w < 1e-25 && worst_r < 1e-25,
        format!(
            "{} points μ∈[0,80] x∈[0.01,40]: max x·|Wronskian residual| {worst_w:.2e}, max relative K-recurrence residual {worst_r:.2e} (limit 1e-25)",
            points.len()
        ),
    ))
}

fn matching_conditions(opts: &AcceptanceOptions) -> Outcome {
    let policy = &opts.policy;
    let mut grid = Vec::new();
    for k in [0.7, 2.0, 5.0, 11.0, 19.0] {
        for g in [0.3, 1.0, 2.5, 4.0] {
            grid.push((k, g));
        }
    }
    let zero = big(0.0, policy);
    let half = 0.5;
    let ic = opts.exec.map(&grid, |&(k, g)| -> Result<f64> {
        let (kb, gb) = (big(k, policy), big(g, policy));
        let even = psi_regular(Parity::Even, &kb, &gb, &zero, policy)?.to_f64();
        let odd = psi_regular_slope(Parity::Odd, &kb, &gb, &zero, policy)?.to_f64();
        Ok((even - half).abs().max((odd - half).abs()))
    });
    let mut worst_ic: f64 = 0.0;
    for r in ic {
        worst_ic = worst_ic.max(r?);
    }

    // ODE residual at the two lowest levels of g² = 2, both representations
    let g = big(2.0, policy).sqrt();
    let solve = SolveOptions {
        exec: opts.exec,
        ..SolveOptions::default()
    };
    let table = solve_spectrum(&g, &MethodChoice::Asymptotic, 1, policy, &solve)?;
    let grid = uniform_grid(0.0, 2.5, 1e-3);
    let mut worst_ode: f64 = 0.0;
    let mut coarse = false;
    let mut parts = Vec::new();
    for b in &table.brackets {
        let k = b.k_mid();
        let e = k.square();
        let asym = sample_asym(&k, &g, &grid, policy, opts.exec)?;
        let regular = sample_regular(b.parity, &k, &g, &grid, policy, opts.exec)?;
        let full = psi_fullline(&asym, b.parity)?;
        for (label, s) in [("asym", &asym), ("regular", &regular), ("fullline", &full)] {
            let r = ode_residual(s, &g, &e)?;
            coarse |= r.coarse;
            worst_ode = worst_ode.max(r.residual.to_f64());
            parts.push(format!("{label}{} {:.1e}", b.n, r.residual.to_f64()));
        }
    }
    Ok((
        worst_ic < 1e-10 && worst_ode < 1e-4 && !coarse,
        format!(
            "initial conditions on {} (k,g) points: max deviation {worst_ic:.1e} (limit 1e-10); ODE residual at h=1e-3 on [0,2.5]: {} (limit 1e-4)",
            20,
            parts.join(", ")
        ),
    ))
}

fn even_forms(opts: &AcceptanceOptions) -> Outcome {
    let policy = &opts.policy;
    let g = big(2.0, policy);
    let spec = SecularSpec::asymptotic(Parity::Even, g.clone(), policy.clone())?;
    let solve = SolveOptions {
        exec: opts.exec,
        ..SolveOptions::default()
    };
    let roots = find_levels(&spec, 4, k_max_for(2.0, 6), &solve)?;
    let mut ok = true;
    let mut worst_width: f64 = 0.0;
    for b in &roots {
        let lo = equivalent_even_forms_residual(&b.k_lo, &g, policy)?;
        let hi = equivalent_even_forms_residual(&b.k_hi, &g, policy)?;
        let straddles = |a: &BigReal, c: &BigReal| a.signum_i() * c.signum_i() < 0;
        let h_lo = lo.hankel_derivative.re();
        let h_hi = hi.hankel_derivative.re();
        let cross_lo = lo.cross_k_over_g.re();
        let cross_hi = hi.cross_k_over_g.re();
        ok &= straddles(&lo.primary, &hi.primary)
            && straddles(&lo.derivative, &hi.derivative)
            && straddles(&h_lo, &h_hi)
            && straddles(&cross_lo, &cross_hi);
        worst_width = worst_width.max(b.width_k());
    }
    // resolve the coefficient away from any root
    let mut votes = Vec::new();
    let mut mismatch = Vec::new();
    for (k, gv) in [(3.3, 2.0), (1.7, 0.6), (6.1, 3.5)] {
        let f = equivalent_even_forms_residual(&big(k, policy), &big(gv, policy), policy)?;
        votes.push(f.agreeing_coefficient(1e-20));
        let (p, d) = f.cross_mismatch();
        mismatch.push(format!("(k={k}, g={gv}): g/k {p:.1e}, k/g {d:.1e}"));
    }
    let resolved = votes.iter().all(|v| *v == Some(CrossCoefficient::KOverG));
    Ok((
        ok && resolved,
        format!(
            "4 even roots at g=2: primary form, d/dg form, H'_ν and H_(ν-1)-(k/g)H_ν all change sign inside every production bracket (width <= {worst_width:.1e}); \
             cross-term coefficient {}: mismatch vs H'_ν {}",
            if resolved { "resolved as k/g" } else { "unresolved" },
            mismatch.join("; ")
        ),
    ))
}

fn precision_region(opts: &AcceptanceOptions) -> Outcome {
    const N: usize = 45;
    let gs = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.2];
    let low = PrecisionPolicy::new(
        53,
        opts.policy.max_bits.max(53),
        opts.policy.escalation_factor,
        1e-12,
    )?;
    let solve = SolveOptions {
        exec: Execution::Sequential,
        ..SolveOptions::default()
    };
    let rows = opts.exec.map(&gs, |&g| -> Result<(f64, bool, f64)> {
        let spec = SecularSpec::asymptotic(Parity::of_level(N), big(g, &low), low.clone())?;
        let levels = find_levels(&spec, N / 2 + 1, k_max_for(g, N), &solve)?;
        let b = levels.last().ok_or(Error::MissedRoot { level: N })?;
        // the base-precision verdict on the final bracket, plus any flag
        // raised during refinement
        let flagged = b.precision_flag || detect_precision_loss(&spec, b);
        let e = b.e_mid().to_f64();
        let oracle = numerov_energy(g, N, Parity::of_level(N), &NumerovConfig::for_energy(g, e))?;
        Ok((g, flagged, rel(e, oracle.mid())))
    });
    let mut flags = Vec::new();
    let mut worst: f64 = 0.0;
    for r in rows {
        let (g, f, d) = r?;
        flags.push((g, f));
        worst = worst.max(d);
    }
    // boundary: the smallest g above which no level is flagged
    let boundary = flags.iter().rev().find(|(_, f)| *f).map(|(g, _)| *g);
    let all_below_flagged = match boundary {
        Some(b) => flags.iter().filter(|(g, _)| *g <= b).all(|(_, f)| *f),
        None => false,
    };
    let boundary_ok = matches!(boundary, Some(b) if (b - 0.57).abs() <= 0.2) && all_below_flagged;
    let pattern: String = flags
        .iter()
        .map(|(g, f)| format!("{g}:{}", if *f { "flag" } else { "ok" }))
        .collect::<Vec<_>>()
        .join(" ");
    let boundary_text = match boundary {
        Some(b) if b >= gs[gs.len() - 1] => "every g flagged, no boundary".to_string(),
        Some(b) => format!("last flagged g = {b}"),
        None => "no g flagged".to_string(),
    };
    Ok((
        boundary_ok && worst < 1e-6,
        format!(
            "n=45 at 53 bits: {pattern} ({boundary_text}; expected 0.57 ± 0.2); escalated roots vs oracle worst {worst:.1e} (limit 1e-6)"
        ),
    ))
}

fn equidistance(opts: &AcceptanceOptions) -> Outcome {
    let policy = &opts.policy;
    let gs = [6.25, 6.75, 7.25, 7.75, 8.25, 8.75, 9.25, 9.75];
    let mut worst: f64 = 0.0;
    let mut worst_at = String::new();
    let mut counts = Vec::new();
    for g in gs {
        let spec = SecularSpec::asymptotic(Parity::Even, big(g, policy), policy.clone())?;
        let scan = scan_sign_changes(&spec, 25.0, 40.0, 600, opts.exec)?;
        if let Some(f) = scan.failures.first() {
            return Err(f.error.clone());
        }
        let ks = opts
            .exec
            .map(&scan.brackets, |raw| {
                refine(&spec, raw, 1e-9).map(|b| b.k_mid().to_f64())
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        let spacings: Vec<f64> = ks.windows(2).map(|w| w[1] - w[0]).collect();
        counts.push(ks.len());
        // deviation from the centred mean of up to five neighbouring spacings
        for j in 0..spacings.len() {
            let window = &spacings[j.saturating_sub(2)..(j + 3).min(spacings.len())];
            let mean = window.iter().sum::<f64>() / window.len() as f64;
            let d = (spacings[j] / mean - 1.0).abs();
            if d > worst {
                worst = d;
                worst_at = format!("g={g} k={:.3}", ks[j]);
            }
        }
    }
    Ok((
        worst < 0.05,
        format!(
            "even roots in k∈(25,40) for g∈{gs:?} ({counts:?} roots): worst deviation of a spacing from its local mean {:.2}% at {worst_at} (limit 5%)",
            100.0 * worst
        ),
    ))
}

fn divergence_onset(opts: &AcceptanceOptions) -> Outcome {
    const N: usize = 8;
    const DK: f64 = 1e-4;
    let policy = &opts.policy;
    let g = big(2.0, policy).sqrt();
    let spec = SecularSpec::asymptotic(Parity::Even, g.clone(), policy.clone())?;
    let b = level(&spec, N, DEFAULT_K_TOL, opts.exec)?;
    let k = b.k_mid();
    let x0 = b.x0.to_f64();
    let r_cut = Method::default_cutoff(b.e_mid().to_f64(), 2.0);
    let grid = uniform_grid(0.0, r_cut, 0.01);
    let dk = big(DK, policy);
    let centre = sample_regular(Parity::Even, &k, &g, &grid, policy, opts.exec)?.values_f64();
    let plus =
        sample_regular(Parity::Even, &(&k + &dk), &g, &grid, policy, opts.exec)?.values_f64();
    let minus =
        sample_regular(Parity::Even, &(&k - &dk), &g, &grid, policy, opts.exec)?.values_f64();
    // normalise by the amplitude in the classically allowed region
    let scale = grid
        .iter()
        .zip(&centre)
        .filter(|(r, _)| **r <= x0)
        .map(|(_, v)| v.abs())
        .fold(0.0, f64::max);
    let diff: Vec<f64> = plus
        .iter()
        .zip(&minus)
        .map(|(p, m)| (p - m).abs() / scale)
        .collect();
    let inner = grid
        .iter()
        .zip(&diff)
        .filter(|(r, _)| **r <= 3.5)
        .map(|(_, d)| *d)
        .fold(0.0, f64::max);
    let outer = grid
        .iter()
        .zip(&diff)
        .filter(|(r, _)| **r > 4.0)
        .map(|(_, d)| *d)
        .fold(0.0, f64::max);
    let onset = grid
        .iter()
        .zip(&diff)
        .find(|(_, d)| **d >= 0.05)
        .map(|(r, _)| *r);
    Ok((
        inner < 0.05 && outer > 0.05,
        format!(
            "E8={:.8} x0={x0:.3} R={r_cut:.3}: max |ψ+ − ψ−|/max|ψ| = {inner:.1e} on r<=3.5, {outer:.1e} on (4,R]; onset r≈{}",
            b.e_mid().to_f64(),
            onset.map_or("none".into(), |r| format!("{r:.2}"))
        ),
    ))
}

fn spacing_growth(opts: &AcceptanceOptions) -> Outcome {
    let policy = &opts.policy;
    let g = 2.0;
    let solve = SolveOptions {
        k_tol: 1e-10,
        exec: opts.exec,
        ..SolveOptions::default()
    };
    let table = solve_spectrum(
        &big(g, policy),
        &MethodChoice::Asymptotic,
        21,
        policy,
        &solve,
    )?;
    let e: Vec<f64> = table.brackets.iter().map(|b| b.e_mid().to_f64()).collect();
    let delta = table.spacings();
    let ratio = delta[20] / delta[4];
    // independent confirmation of the levels entering δ_20
    let checks = opts.exec.map(&[20usize, 21], |&n| {
        numerov_energy(
            g,
            n,
            Parity::of_level(n),
            &NumerovConfig::for_energy(g, e[n]),
        )
        .map(|o| rel(o.mid(), e[n]))
    });
    let mut oracle_worst: f64 = 0.0;
    for c in checks {
        oracle_worst = oracle_worst.max(c?);
    }
    let same_parity = (e[21] - e[19]) / (e[5] - e[3]);
    Ok((
        ratio > 3.0,
        format!(
            "g=2: δ4={:.4} δ20={:.4}, ratio {ratio:.3} (need > 3); same-parity ratio {same_parity:.3}; E20, E21 confirmed by oracle to {oracle_worst:.1e}",
            delta[4], delta[20]
        ),
    ))
}
