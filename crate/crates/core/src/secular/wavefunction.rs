//! Sampled wavefunctions, the parity extension to the full line and the
//! finite-difference residual of −ψ″ + g²e^{|r|}ψ = Eψ.

use super::{check_g, check_k, Parity, RegularSolution};
use crate::bigfloat::{BigReal, PrecisionPolicy};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::specfun::bessel_k_imag;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    Asymptotic,
    Regular,
    FullLine,
}

impl Representation {
    pub fn name(self) -> &'static str {
        match self {
            Representation::Asymptotic => "asymptotic",
            Representation::Regular => "regular",
            Representation::FullLine => "fullline",
        }
    }
}

#[derive(Clone, Debug)]
pub struct WavefunctionSample {
    pub representation: Representation,
    pub grid: Vec<f64>,
    pub values: Vec<BigReal>,
    pub k: BigReal,
    pub g: BigReal,
}

impl WavefunctionSample {
    pub fn new(
        representation: Representation,
        grid: Vec<f64>,
        values: Vec<BigReal>,
        k: BigReal,
        g: BigReal,
    ) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::Domain(format!(
                "grid has {} points but {} values",
                grid.len(),
                values.len()
            )));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) || grid.iter().any(|r| !r.is_finite()) {
            return Err(Error::Domain(
                "grid must be finite and strictly increasing".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("wavefunction values must be finite".into()));
        }
        Ok(WavefunctionSample {
            representation,
            grid,
            values,
            k,
            g,
        })
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn max_abs(&self) -> BigReal {
        let prec = self.values.first().map_or(53, BigReal::precision_bits);
        self.values
            .iter()
            .map(BigReal::abs)
            .fold(BigReal::zero(prec), |a, b| if b > a { b } else { a })
    }

    pub fn values_f64(&self) -> Vec<f64> {
        self.values.iter().map(BigReal::to_f64).collect()
    }
}

/// start, start + h, …, up to `end` (rounded to a whole number of steps).
pub fn uniform_grid(start: f64, end: f64, h: f64) -> Vec<f64> {
    let n = ((end - start) / h).round().max(0.0) as usize;
    (0..=n).map(|j| start + j as f64 * h).collect()
}

fn check_r(r: &BigReal) -> Result<()> {
    if r.signum_i() < 0 || !r.is_finite() {
        return Err(Error::Domain(format!("r must be >= 0, got {}", r.to_f64())));
    }
    Ok(())
}

/// ψ_asym(r) = K_{2ik}(2g·e^{r/2}), relative error below the policy target.
pub fn psi_asym(
    k: &BigReal,
    g: &BigReal,
    r: &BigReal,
    policy: &PrecisionPolicy,
) -> Result<BigReal> {
    check_k(k)?;
    check_g(g)?;
    check_r(r)?;
    let prec = policy
        .base_bits
        .max(k.precision_bits())
        .max(g.precision_bits())
        .max(r.precision_bits());
    let two = BigReal::from_i64(2, prec);
    let w = &(&two * g) * &(&r.with_precision(prec) / &two).exp();
    bessel_k_imag(&(&two * k), &w, policy)
}

pub fn sample_asym(
    k: &BigReal,
    g: &BigReal,
    grid: &[f64],
    policy: &PrecisionPolicy,
    exec: Execution,
) -> Result<WavefunctionSample> {
    let values = exec
        .map(grid, |&r| {
            psi_asym(k, g, &BigReal::from_f64(r, policy.base_bits), policy)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    WavefunctionSample::new(
        Representation::Asymptotic,
        grid.to_vec(),
        values,
        k.clone(),
        g.clone(),
    )
}

pub fn sample_regular(
    parity: Parity,
    k: &BigReal,
    g: &BigReal,
    grid: &[f64],
    policy: &PrecisionPolicy,
    exec: Execution,
) -> Result<WavefunctionSample> {
    let sol = RegularSolution::new(parity, k.clone(), g.clone(), policy.clone())?;
    let values = exec
        .map(grid, |&r| {
            sol.value(&BigReal::from_f64(r, policy.base_bits))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    WavefunctionSample::new(
        Representation::Regular,
        grid.to_vec(),
        values,
        k.clone(),
        g.clone(),
    )
}

/// Mirrors a half-line sample: ψ(−x) = ±ψ(x). For odd parity the value at
/// x = 0 is set to exactly zero.
pub fn psi_fullline(sample: &WavefunctionSample, parity: Parity) -> Result<WavefunctionSample> {
    match sample.grid.first() {
        Some(&r0) if r0 >= 0.0 => {}
        Some(_) => {
            return Err(Error::Domain(
                "full-line extension needs a grid on r >= 0".into(),
            ))
        }
        None => return Err(Error::Domain("empty sample".into())),
    }
    let has_origin = sample.grid[0] == 0.0;
    let mirrored = if has_origin { 1 } else { 0 };
    let mut grid = Vec::with_capacity(2 * sample.len());
    let mut values = Vec::with_capacity(2 * sample.len());
    for (r, v) in sample.grid.iter().zip(&sample.values).skip(mirrored).rev() {
        grid.push(-r);
        values.push(match parity {
            Parity::Even => v.clone(),
            Parity::Odd => -v.clone(),
        });
    }
    for (idx, (r, v)) in sample.grid.iter().zip(&sample.values).enumerate() {
        grid.push(*r);
        if idx == 0 && has_origin && parity == Parity::Odd {
            values.push(BigReal::zero(v.precision_bits()));
        } else {
            values.push(v.clone());
        }
    }
    WavefunctionSample::new(
        Representation::FullLine,
        grid,
        values,
        sample.k.clone(),
        sample.g.clone(),
    )
}

#[derive(Clone, Debug)]
pub struct OdeResidual {
    /// max_j |(−ψ_{j−1} + 2ψ_j − ψ_{j+1})/h² + (V_j − E)ψ_j| / max|ψ|
    pub residual: BigReal,
    /// h²·max V > 0.1: the grid under-resolves the potential.
    pub coarse: bool,
}

/// Finite-difference residual over interior points. On full-line samples the
/// stencil centred on the potential's kink at x = 0 is skipped.
pub fn ode_residual(
    sample: &WavefunctionSample,
    g: &BigReal,
    energy: &BigReal,
) -> Result<OdeResidual> {
    let n = sample.len();
    if n < 5 {
        return Err(Error::Domain(format!(
            "need at least 5 grid points, got {n}"
        )));
    }
    let grid = &sample.grid;
    let h = (grid[n - 1] - grid[0]) / (n - 1) as f64;
    if grid
        .windows(2)
        .any(|w| ((w[1] - w[0]) - h).abs() > 1e-6 * h)
    {
        return Err(Error::Domain("ode_residual needs a uniform grid".into()));
    }
    let prec = sample.values[0].precision_bits().max(g.precision_bits());
    let g2 = g.square();
    let max_r = grid[0].abs().max(grid[n - 1].abs());
    let coarse = h * h * g2.to_f64() * max_r.exp() > 0.1;
    if coarse {
        log::warn!(
            "grid too coarse: h = {h}, max V = {:e}",
            g2.to_f64() * max_r.exp()
        );
    }
    let scale = sample.max_abs();
    if scale.is_zero() {
        return Ok(OdeResidual {
            residual: BigReal::zero(prec),
            coarse,
        });
    }
    let h2 = BigReal::from_f64(h, prec).square();
    let two = BigReal::from_i64(2, prec);
    let mut worst = BigReal::zero(prec);
    for j in 1..n - 1 {
        if sample.representation == Representation::FullLine
            && grid[j - 1] < 0.0
            && grid[j + 1] > 0.0
        {
            continue;
        }
        let v = &sample.values;
        let second = &(&(&(&two * &v[j]) - &v[j - 1]) - &v[j + 1]) / &h2;
        let potential = &g2 * &BigReal::from_f64(grid[j].abs(), prec).exp();
        let res = (&second + &(&(&potential - energy) * &v[j])).abs();
        if res > worst {
            worst = res;
        }
    }
    Ok(OdeResidual {
        residual: &worst / &scale,
        coarse,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(v: f64) -> BigReal {
        BigReal::from_f64(v, 128)
    }

    #[test]
    fn grid_construction() {
        let g = uniform_grid(0.0, 1.0, 0.25);
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn sample_validation() {
        let bad = WavefunctionSample::new(
            Representation::Regular,
            vec![0.0, 0.0],
            vec![real(1.0), real(1.0)],
            real(1.0),
            real(1.0),
        );
        assert!(bad.is_err());
    }

    #[test]
    fn zero_sample_has_zero_residual() {
        let grid = uniform_grid(0.0, 1.0, 0.1);
        let values = vec![BigReal::zero(128); grid.len()];
        let s =
            WavefunctionSample::new(Representation::Regular, grid, values, real(1.0), real(1.0))
                .unwrap();
        let r = ode_residual(&s, &real(1.0), &real(1.0)).unwrap();
        assert!(r.residual.is_zero());
        assert!(!r.coarse);
    }

    #[test]
    fn mirror_construction() {
        let grid = vec![0.0, 0.5, 1.0];
        let values = vec![real(0.3), real(0.2), real(0.1)];
        let s =
            WavefunctionSample::new(Representation::Regular, grid, values, real(1.0), real(1.0))
                .unwrap();
        let even = psi_fullline(&s, Parity::Even).unwrap();
        assert_eq!(even.grid, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(even.values[0], even.values[4]);
        let odd = psi_fullline(&s, Parity::Odd).unwrap();
        assert!(odd.values[2].is_zero());
        assert_eq!(odd.values[1], -odd.values[3].clone());
    }

    #[test]
    fn coarse_grid_flagged() {
        let grid = uniform_grid(0.0, 8.0, 0.5);
        let values = vec![real(1.0); grid.len()];
        let s = WavefunctionSample::new(
            Representation::Asymptotic,
            grid,
            values,
            real(1.0),
            real(1.0),
        )
        .unwrap();
        assert!(ode_residual(&s, &real(1.0), &real(1.0)).unwrap().coarse);
    }
}
