use expwell::acceptance::{run_criterion, AcceptanceOptions, CRITERIA, FAST, TABLE1};
use expwell::oracle::{numerov_energy, NumerovConfig};
use expwell::rootfind::{
    level_bracket, refine, scan_sign_changes, solve_levels, sweep_g, EnergyBracket, MethodChoice,
    SolveOptions, SweepTemplate, DEFAULT_K_TOL,
};
use expwell::secular::{
    ode_residual, psi_fullline, sample_asym, sample_regular, uniform_grid, Method, Parity,
    RegularSolution, SecularSpec,
};
use expwell::specfun::SAFETY_BITS;
use expwell::{BigReal, Execution, PrecisionPolicy};

use crate::args::*;
use crate::output::{big, float, status, CsvOut, FAILED, OK};
use crate::CliError;

fn real(v: f64, policy: &PrecisionPolicy) -> BigReal {
    BigReal::from_f64(v, policy.base_bits)
}

fn solve_options(k_tol: f64, exec: Execution) -> Result<SolveOptions, CliError> {
    Ok(SolveOptions {
        k_tol: positive("k-tol", k_tol)?,
        exec,
        ..SolveOptions::default()
    })
}

/// The physical k of level n from the asymptotically decaying solution.
fn physical_level(
    g: &BigReal,
    n: usize,
    policy: &PrecisionPolicy,
    exec: Execution,
) -> Result<EnergyBracket, CliError> {
    let spec = SecularSpec::asymptotic(Parity::of_level(n), g.clone(), policy.clone())?;
    Ok(level_bracket(
        &spec,
        n,
        &solve_options(DEFAULT_K_TOL, exec)?,
    )?)
}

fn bracket_fields(b: &EnergyBracket) -> [String; 4] {
    [
        big(&b.k_lo),
        big(&b.k_hi),
        big(&b.k_mid()),
        b.precision_flag.to_string(),
    ]
}

pub fn spectrum(a: &SpectrumArgs) -> Result<(), CliError> {
    let g = a.coupling.resolve(None)?;
    let policy = a.precision.policy()?;
    let opts = solve_options(a.k_tol, a.precision.exec())?;
    if let Some(r) = a.r {
        positive("r", r)?;
    }
    let methods = match a.method {
        MethodArg::Asym => vec![MethodChoice::Asymptotic],
        MethodArg::Regular => vec![MethodChoice::Regular(a.r)],
        MethodArg::Both => vec![MethodChoice::Asymptotic, MethodChoice::Regular(a.r)],
    };
    let mut tables = Vec::new();
    for method in methods {
        let template = SweepTemplate {
            method,
            parity: a.parity.map(Parity::from),
            n_max: a.n_max,
        };
        tables.push(solve_levels(&template, g, &policy, &opts)?);
    }
    let oracle: Vec<String> = if a.oracle {
        a.precision.exec().map(&tables[0], |b| {
            let e = b.e_mid().to_f64();
            numerov_energy(g, b.n, b.parity, &NumerovConfig::for_energy(g, e)).map_or_else(
                |e| {
                    log::warn!("oracle failed for n = {}: {e}", b.n);
                    String::new()
                },
                |o| float(o.mid()),
            )
        })
    } else {
        vec![String::new(); tables[0].len()]
    };

    let mut out = CsvOut::create(
        a.output.output.as_deref(),
        &[
            "n",
            "parity",
            "method",
            "e_lo",
            "e_hi",
            "k_lo",
            "k_hi",
            "x0",
            "precision_flag",
            "final_bits",
            "e_oracle",
            "status",
        ],
    )?;
    for (j, e_oracle) in oracle.iter().enumerate() {
        for table in &tables {
            let b = &table[j];
            let st = if a.oracle && e_oracle.is_empty() {
                FAILED
            } else {
                status(b.precision_flag)
            };
            out.row([
                b.n.to_string(),
                b.parity.name().to_string(),
                b.method.name().to_string(),
                big(&b.e_lo),
                big(&b.e_hi),
                big(&b.k_lo),
                big(&b.k_hi),
                big(&b.x0),
                b.precision_flag.to_string(),
                b.final_bits.to_string(),
                e_oracle.clone(),
                st.to_string(),
            ])?;
        }
    }
    out.finish()
}

pub fn table1(a: &Table1Args) -> Result<(), CliError> {
    let g = a.coupling.resolve(Some(2.0))?;
    let policy = a.precision.policy()?;
    let gb = real(g, &policy);
    let mut out = CsvOut::create(
        a.output.output.as_deref(),
        &[
            "n",
            "e_lo",
            "e_hi",
            "r",
            "x0",
            "ref_e_lo",
            "ref_e_hi",
            "intersects",
            "status",
        ],
    )?;
    eprintln!(
        "{:>3} {:>14} {:>14} {:>5} {:>7}   reference",
        "n", "E_lo", "E_hi", "R", "x0"
    );
    let mut misses = Vec::new();
    for (n, r_ref, lo, hi) in TABLE1 {
        let r = positive("r", a.r.unwrap_or(r_ref))?;
        // default: a bracket as wide as the reference one, ΔE = 2k·Δk
        let k_tol = a
            .k_tol
            .unwrap_or((hi - lo) / (2.0 * (0.5 * (lo + hi)).sqrt()));
        let spec = SecularSpec::new(
            Parity::Even,
            Method::regular(r)?,
            gb.clone(),
            policy.clone(),
        )?;
        let b = level_bracket(&spec, n, &solve_options(k_tol, a.precision.exec())?)?;
        let hit = b.intersects(lo, hi);
        if !hit {
            misses.push(format!(
                "n={n}: [{}, {}] vs reference ({lo}, {hi})",
                b.e_lo.to_decimal(10),
                b.e_hi.to_decimal(10)
            ));
        }
        eprintln!(
            "{n:>3} {:>14.8} {:>14.8} {r:>5.2} {:>7.3}   ({lo}, {hi}){}",
            b.e_lo.to_f64(),
            b.e_hi.to_f64(),
            b.x0.to_f64(),
            if hit { "" } else { "  MISMATCH" }
        );
        out.row([
            n.to_string(),
            big(&b.e_lo),
            big(&b.e_hi),
            float(r),
            big(&b.x0),
            float(lo),
            float(hi),
            hit.to_string(),
            status(b.precision_flag).to_string(),
        ])?;
    }
    out.finish()?;
    if misses.is_empty() {
        Ok(())
    } else {
        Err(CliError::Mismatch(misses.join("; ")))
    }
}

pub fn figure3(a: &Figure3Args) -> Result<(), CliError> {
    let policy = a.precision.policy()?;
    let gs = linspace("g", a.g_min, a.g_max, a.g_steps)?;
    let ks = linspace("k", a.k_min, a.k_max, a.k_steps)?;
    let points: Vec<(f64, f64)> = gs
        .iter()
        .flat_map(|&g| ks.iter().map(move |&k| (g, k)))
        .collect();
    let parity = Parity::from(a.parity);
    let rows = a.precision.exec().map(&points, |&(g, k)| {
        let value = SecularSpec::asymptotic(parity, real(g, &policy), policy.clone())
            .and_then(|spec| spec.evaluate_tracked(&real(k, &policy)));
        match value {
            Ok(v) => {
                // e^{πk} removes the overall decay of K_{2ik}
                let scaled = &v.value * &(&BigReal::pi(v.prec) * &real(k, &policy)).exp();
                [
                    big(&v.value),
                    big(&scaled),
                    format!("{:.3}", v.err_log2),
                    status(!v.sign_is_reliable(SAFETY_BITS)).to_string(),
                ]
            }
            Err(e) => {
                log::warn!("g = {g}, k = {k}: {e}");
                [
                    String::new(),
                    String::new(),
                    String::new(),
                    FAILED.to_string(),
                ]
            }
        }
    });
    let mut out = CsvOut::create(
        a.output.output.as_deref(),
        &["g", "k", "value", "scaled", "err_log2", "status"],
    )?;
    for ((g, k), r) in points.iter().zip(rows) {
        out.row([
            float(*g),
            float(*k),
            r[0].clone(),
            r[1].clone(),
            r[2].clone(),
            r[3].clone(),
        ])?;
    }
    out.finish()
}

const LEVEL_HEADER: [&str; 7] = ["g", "n", "k_lo", "k_hi", "k", "precision_flag", "status"];

fn failed_row(g: f64, n: Option<usize>) -> [String; 7] {
    [
        float(g),
        n.map_or(String::new(), |n| n.to_string()),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        FAILED.to_string(),
    ]
}

fn level_row(g: f64, b: &EnergyBracket) -> [String; 7] {
    let [lo, hi, mid, flag] = bracket_fields(b);
    [
        float(g),
        b.n.to_string(),
        lo,
        hi,
        mid,
        flag,
        status(b.precision_flag).to_string(),
    ]
}

pub fn figure4(a: &Figure4Args) -> Result<(), CliError> {
    let policy = a.precision.policy()?;
    let gs = linspace("g", a.g_min, a.g_max, a.g_steps)?;
    if a.n_max == 0 {
        return Err(CliError::Usage(
            "--n-max must include at least one odd level".into(),
        ));
    }
    let template = SweepTemplate {
        method: MethodChoice::Asymptotic,
        parity: Some(Parity::Odd),
        n_max: a.n_max,
    };
    let points = sweep_g(
        &template,
        &gs,
        &policy,
        &solve_options(a.k_tol, a.precision.exec())?,
    )?;
    let mut out = CsvOut::create(a.output.output.as_deref(), &LEVEL_HEADER)?;
    for p in points {
        match p.levels {
            Ok(levels) => {
                for b in &levels {
                    out.row(level_row(p.g, b))?;
                }
            }
            Err(e) => {
                log::warn!("g = {}: {e}", p.g);
                out.row(failed_row(p.g, None))?;
            }
        }
    }
    out.finish()
}

pub fn figure5(a: &Figure5Args) -> Result<(), CliError> {
    let g = a.coupling.resolve(Some(2.0))?;
    let policy = a.precision.policy()?;
    let exec = a.precision.exec();
    let gb = real(g, &policy);
    let b = physical_level(&gb, a.n, &policy, exec)?;
    let e = b.e_mid().to_f64();
    let r_max = positive(
        "r-max",
        a.r_max.unwrap_or_else(|| Method::default_cutoff(e, g * g)),
    )?;
    let grid = uniform_grid(0.0, r_max, positive("h", a.h)?);
    let k = b.k_mid();
    let dk = real(positive("dk", a.dk)?, &policy);
    eprintln!(
        "n = {}, E = {}, k = {}, x0 = {:.4}, R = {r_max}",
        a.n,
        b.e_mid().to_decimal(12),
        k.to_decimal(12),
        b.x0.to_f64()
    );
    let lower = RegularSolution::new(b.parity, &k - &dk, gb.clone(), policy.clone())?;
    let upper = RegularSolution::new(b.parity, &k + &dk, gb, policy.clone())?;
    let rows = exec.map(&grid, |&r| {
        let rb = real(r, &policy);
        match (lower.value(&rb), upper.value(&rb)) {
            (Ok(lo), Ok(hi)) => [big(&lo), big(&hi), OK.to_string()],
            _ => [String::new(), String::new(), FAILED.to_string()],
        }
    });
    let mut out = CsvOut::create(
        a.output.output.as_deref(),
        &["r", "psi_lower", "psi_upper", "status"],
    )?;
    for (r, row) in grid.iter().zip(rows) {
        let [lo, hi, st] = row;
        out.row([float(*r), lo, hi, st])?;
    }
    out.finish()
}

pub fn figure6(a: &Figure6Args) -> Result<(), CliError> {
    let policy = a.precision.policy()?;
    let gs = linspace("g", a.g_min, a.g_max, a.g_steps)?;
    positive("k-tol", a.k_tol)?;
    if !(a.k_max > a.k_min) {
        return Err(CliError::Usage("need --k-min < --k-max".into()));
    }
    let density = SolveOptions::default().density;
    let columns = a.precision.exec().map(&gs, |&g| -> Vec<[String; 7]> {
        let spec = match SecularSpec::asymptotic(Parity::Even, real(g, &policy), policy.clone()) {
            Ok(s) => s,
            Err(_) => return vec![failed_row(g, None)],
        };
        // scan from k = g so that the levels can be numbered
        let k_start = g.max(1e-3);
        if a.k_max <= k_start {
            return Vec::new();
        }
        let steps = ((a.k_max - k_start) * density).ceil() as usize;
        let scan =
            match scan_sign_changes(&spec, k_start, a.k_max, steps.max(4), Execution::Sequential) {
                Ok(s) if s.failures.is_empty() => s,
                _ => return vec![failed_row(g, None)],
            };
        scan.brackets
            .iter()
            .enumerate()
            .filter(|(_, raw)| raw.k_hi.to_f64() > a.k_min)
            .map(|(j, raw)| match refine(&spec, raw, a.k_tol) {
                Ok(mut b) => {
                    b.n = 2 * j;
                    level_row(g, &b)
                }
                Err(e) => {
                    log::warn!("g = {g}, level {}: {e}", 2 * j);
                    failed_row(g, Some(2 * j))
                }
            })
            .collect()
    });
    let mut out = CsvOut::create(a.output.output.as_deref(), &LEVEL_HEADER)?;
    for rows in columns {
        for row in rows {
            out.row(row)?;
        }
    }
    out.finish()
}

pub fn wavefunction(a: &WavefunctionArgs) -> Result<(), CliError> {
    let g = a.coupling.resolve(None)?;
    let policy = a.precision.policy()?;
    let exec = a.precision.exec();
    let gb = real(g, &policy);
    let (k, parity) = match (a.n, a.k) {
        (Some(n), _) => {
            if a.parity
                .is_some_and(|p| Parity::from(p) != Parity::of_level(n))
            {
                return Err(CliError::Usage(format!(
                    "level {n} has {} parity",
                    Parity::of_level(n)
                )));
            }
            (
                physical_level(&gb, n, &policy, exec)?.k_mid(),
                Parity::of_level(n),
            )
        }
        (None, Some(k)) => {
            let parity = match (a.parity, a.representation) {
                (Some(p), _) => p.into(),
                (None, RepresentationArg::Asym) => Parity::Even,
                (None, _) => return Err(CliError::Usage("--parity is required with --k".into())),
            };
            (real(positive("k", k)?, &policy), parity)
        }
        (None, None) => return Err(CliError::Usage("one of --n or --k is required".into())),
    };
    let energy = k.square();
    let r_max = a
        .r_max
        .unwrap_or_else(|| Method::default_cutoff(energy.to_f64(), g * g));
    let grid = uniform_grid(0.0, positive("r-max", r_max)?, positive("h", a.h)?);
    let sample = match a.representation {
        RepresentationArg::Asym => sample_asym(&k, &gb, &grid, &policy, exec)?,
        RepresentationArg::Regular => sample_regular(parity, &k, &gb, &grid, &policy, exec)?,
        RepresentationArg::Fullline => {
            psi_fullline(&sample_asym(&k, &gb, &grid, &policy, exec)?, parity)?
        }
    };
    if a.residual {
        let r = ode_residual(&sample, &gb, &energy)?;
        eprintln!(
            "ODE residual {:e}{}",
            r.residual.to_f64(),
            if r.coarse {
                " (grid too coarse for the wall)"
            } else {
                ""
            }
        );
    }
    let mut out = CsvOut::create(a.output.output.as_deref(), &["x", "psi", "status"])?;
    for (x, v) in sample.grid.iter().zip(&sample.values) {
        out.row([float(*x), big(v), OK.to_string()])?;
    }
    out.finish()
}

pub fn check(a: &CheckArgs) -> Result<(), CliError> {
    let policy = a.precision.policy()?;
    let ids: Vec<u8> = if a.fast {
        FAST.to_vec()
    } else if !a.only.is_empty() {
        a.only.clone()
    } else {
        CRITERIA.iter().map(|(id, _)| *id).collect()
    };
    if let Some(bad) = ids
        .iter()
        .find(|id| !CRITERIA.iter().any(|(c, _)| c == *id))
    {
        return Err(CliError::Usage(format!("no criterion {bad}")));
    }
    let opts = AcceptanceOptions {
        policy,
        exec: a.precision.exec(),
    };
    let mut out = CsvOut::create(
        a.output.output.as_deref(),
        &["criterion", "name", "status", "seconds", "detail"],
    )?;
    let mut failed = Vec::new();
    for id in ids {
        let report = run_criterion(id, &opts)?;
        eprintln!("{}", report.line());
        if !report.passed {
            failed.push(id.to_string());
        }
        out.row([
            id.to_string(),
            report.name.to_string(),
            if report.passed { OK } else { FAILED }.to_string(),
            format!("{:.2}", report.elapsed.as_secs_f64()),
            report.detail,
        ])?;
    }
    out.finish()?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Mismatch(format!(
            "criteria {} failed",
            failed.join(", ")
        )))
    }
}
