//! Whole spectra: scan range from a WKB level estimate, density doubling
//! until the root count is stable, refinement, numbering, and sweeps over g.

use super::{
    assign_indices, refine, scan_sign_changes, EnergyBracket, SpectrumTable, DEFAULT_K_TOL,
};
use crate::bigfloat::{BigReal, PrecisionPolicy};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::secular::{Method, Parity, SecularSpec, DEFAULT_CUTOFF_MARGIN, K_MIN};

/// Which secular function to solve.
#[derive(Clone, Debug, PartialEq)]
pub enum MethodChoice {
    Asymptotic,
    /// Fixed cutoff R, or (None) R = ln(E_max/g²) + margin for the highest
    /// level requested.
    Regular(Option<f64>),
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub k_tol: f64,
    /// Initial scan density in points per unit k.
    pub density: f64,
    /// Maximum number of density doublings while the root count changes.
    pub max_doublings: usize,
    /// Cutoff margin beyond the highest turning point for automatic R.
    pub cutoff_margin: f64,
    pub exec: Execution,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            k_tol: DEFAULT_K_TOL,
            density: 40.0,
            max_doublings: 4,
            cutoff_margin: DEFAULT_CUTOFF_MARGIN,
            exec: Execution::Parallel,
        }
    }
}

/// Semiclassical number of levels below E: (1/π)∫ √(E − V) dx + 1/2.
pub fn wkb_level_count(g2: f64, energy: f64) -> f64 {
    if energy <= g2 {
        return 0.0;
    }
    let root_e = energy.sqrt();
    let s0 = (energy - g2).sqrt();
    // ∫_0^{x0} √(E − g²e^x) dx = 2(√E artanh(s0/√E) − s0)
    let half = 2.0 * (root_e * (s0 / root_e).atanh() - s0);
    2.0 * half / std::f64::consts::PI + 0.5
}

/// k at which the semiclassical count reaches n + 1.
pub fn wkb_k_for_level(g2: f64, n: usize) -> f64 {
    let target = n as f64 + 1.0;
    let (mut lo, mut hi) = (g2, g2 * 2.0 + 4.0);
    while wkb_level_count(g2, hi) < target {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if wkb_level_count(g2, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi.sqrt()
}

fn resolve_method(choice: &MethodChoice, g: f64, k_max: f64, margin: f64) -> Result<Method> {
    match choice {
        MethodChoice::Asymptotic => Ok(Method::AsymptoticDecay),
        MethodChoice::Regular(Some(r)) => Method::regular(*r),
        MethodChoice::Regular(None) => {
            let x0 = (k_max * k_max / (g * g)).ln().max(0.0);
            Method::regular(x0 + margin)
        }
    }
}

/// The lowest `count` levels of one parity, numbered 0, 2, 4, … (even) or
/// 1, 3, 5, … (odd). The scan starts at k = g, below which no level exists.
pub fn find_levels(
    spec: &SecularSpec,
    count: usize,
    k_max_hint: f64,
    opts: &SolveOptions,
) -> Result<Vec<EnergyBracket>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let k_start = spec.g.to_f64().max(K_MIN);
    let mut k_end = k_max_hint.max(k_start + 1.0);
    let mut raws = Vec::new();
    for _widen in 0..12 {
        let mut density = opts.density;
        let mut previous: Option<usize> = None;
        for _ in 0..=opts.max_doublings {
            let steps = (((k_end - k_start) * density).ceil() as usize).max(4);
            let scan = scan_sign_changes(spec, k_start, k_end, steps, opts.exec)?;
            if let Some(fail) = scan.failures.first() {
                return Err(fail.error.clone());
            }
            let found = scan.brackets.len();
            raws = scan.brackets;
            if previous == Some(found) {
                break;
            }
            previous = Some(found);
            density *= 2.0;
        }
        if raws.len() >= count {
            break;
        }
        k_end = k_start + (k_end - k_start) * 1.3;
    }
    if raws.len() < count {
        return Err(Error::Domain(format!(
            "found only {} {} roots below k = {k_end:.3}",
            raws.len(),
            spec.parity
        )));
    }
    raws.truncate(count);
    let offset = match spec.parity {
        Parity::Even => 0,
        Parity::Odd => 1,
    };
    opts.exec
        .map(&raws, |raw| refine(spec, raw, opts.k_tol))
        .into_iter()
        .enumerate()
        .map(|(j, b)| {
            b.map(|mut b| {
                b.n = 2 * j + offset;
                b
            })
        })
        .collect()
}

/// Level n alone (its parity must match `spec`), found by counting the roots
/// below it.
pub fn level_bracket(spec: &SecularSpec, n: usize, opts: &SolveOptions) -> Result<EnergyBracket> {
    if Parity::of_level(n) != spec.parity {
        return Err(Error::Domain(format!("level {n} is not {}", spec.parity)));
    }
    let g = spec.g.to_f64();
    let k_max = wkb_k_for_level(g * g, n + 1) * 1.05 + 0.5;
    find_levels(spec, n / 2 + 1, k_max, opts)?
        .pop()
        .ok_or(Error::MissedRoot { level: n })
}

/// Levels n = 0..=n_max of both parities as a checked table.
pub fn solve_spectrum(
    g: &BigReal,
    choice: &MethodChoice,
    n_max: usize,
    policy: &PrecisionPolicy,
    opts: &SolveOptions,
) -> Result<SpectrumTable> {
    let gf = g.to_f64();
    let k_max = wkb_k_for_level(gf * gf, n_max + 1) * 1.05 + 0.5;
    let method = resolve_method(choice, gf, k_max, opts.cutoff_margin)?;
    let even_count = n_max / 2 + 1;
    let odd_count = n_max.div_ceil(2);
    let even = SecularSpec::new(Parity::Even, method.clone(), g.clone(), policy.clone())?;
    let odd = SecularSpec::new(Parity::Odd, method, g.clone(), policy.clone())?;
    let e = find_levels(&even, even_count, k_max, opts)?;
    let o = find_levels(&odd, odd_count, k_max, opts)?;
    assign_indices(e, o, g, policy, opts.k_tol)
}

#[derive(Clone, Debug)]
pub struct SweepTemplate {
    pub method: MethodChoice,
    /// Restrict to one parity (levels numbered within it), or both.
    pub parity: Option<Parity>,
    pub n_max: usize,
}

#[derive(Clone, Debug)]
pub struct SweepPoint {
    pub g: f64,
    pub levels: Result<Vec<EnergyBracket>>,
}

/// One spectrum per g value; a failure at one g is kept in its point.
pub fn sweep_g(
    template: &SweepTemplate,
    gs: &[f64],
    policy: &PrecisionPolicy,
    opts: &SolveOptions,
) -> Result<Vec<SweepPoint>> {
    if gs.iter().any(|g| !(*g > 0.0)) || gs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain(
            "g grid must be positive and ascending".into(),
        ));
    }
    let inner = SolveOptions {
        exec: Execution::Sequential,
        ..opts.clone()
    };
    Ok(opts.exec.map(gs, |&g| SweepPoint {
        g,
        levels: solve_levels(template, g, policy, &inner),
    }))
}

/// The levels a template asks for at one coupling.
pub fn solve_levels(
    template: &SweepTemplate,
    g: f64,
    policy: &PrecisionPolicy,
    opts: &SolveOptions,
) -> Result<Vec<EnergyBracket>> {
    let gb = BigReal::from_f64(g, policy.base_bits);
    match template.parity {
        None => {
            solve_spectrum(&gb, &template.method, template.n_max, policy, opts).map(|t| t.brackets)
        }
        Some(parity) => {
            let k_max = wkb_k_for_level(g * g, template.n_max + 1) * 1.05 + 0.5;
            let method = resolve_method(&template.method, g, k_max, opts.cutoff_margin)?;
            let count = match parity {
                Parity::Even => template.n_max / 2 + 1,
                Parity::Odd => template.n_max.div_ceil(2),
            };
            let spec = SecularSpec::new(parity, method, gb, policy.clone())?;
            find_levels(&spec, count, k_max, opts)
        }
    }
}
