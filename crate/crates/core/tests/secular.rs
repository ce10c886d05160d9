use expwell::oracle::{numerov_energy, NumerovConfig};
use expwell::rootfind::{level_bracket, solve_spectrum, MethodChoice, SolveOptions};
use expwell::secular::*;
use expwell::specfun::{bessel_i, bessel_k, bessel_k_imag};
use expwell::{BigComplex, BigReal, Execution, PrecisionPolicy};

fn policy() -> PrecisionPolicy {
    PrecisionPolicy::default()
}

fn real(v: f64) -> BigReal {
    BigReal::from_f64(v, 128)
}

fn sqrt2() -> BigReal {
    real(2.0).sqrt()
}

fn opts(k_tol: f64) -> SolveOptions {
    SolveOptions {
        k_tol,
        ..SolveOptions::default()
    }
}

#[test]
fn odd_secular_changes_sign_across_each_root() {
    let spec = SecularSpec::asymptotic(Parity::Odd, sqrt2(), policy()).unwrap();
    let table = solve_spectrum(
        &sqrt2(),
        &MethodChoice::Asymptotic,
        7,
        &policy(),
        &opts(1e-10),
    )
    .unwrap();
    for b in table.brackets.iter().filter(|b| b.parity == Parity::Odd) {
        let lo = secular_asym(&spec, &b.k_lo).unwrap();
        let hi = secular_asym(&spec, &b.k_hi).unwrap();
        assert_eq!(lo.signum_i() * hi.signum_i(), -1, "n = {}", b.n);
    }
}

#[test]
fn first_odd_root_matches_oracle() {
    let spec = SecularSpec::asymptotic(Parity::Odd, real(1.0), policy()).unwrap();
    let b = level_bracket(&spec, 1, &opts(1e-12)).unwrap();
    let k = b.k_mid().to_f64();
    let e = numerov_energy(1.0, 1, Parity::Odd, &NumerovConfig::for_energy(1.0, k * k)).unwrap();
    assert!(
        (e.mid().sqrt() - k).abs() < 1e-8,
        "{} vs {k}",
        e.mid().sqrt()
    );
}

#[test]
fn secular_values_are_real_and_finite() {
    for parity in [Parity::Even, Parity::Odd] {
        for method in [Method::AsymptoticDecay, Method::regular(3.0).unwrap()] {
            let spec = SecularSpec::new(parity, method, real(1.3), policy()).unwrap();
            for k in [0.4, 1.7, 6.2, 15.0] {
                let v = spec.evaluate_tracked(&real(k)).unwrap();
                assert!(v.value.is_finite());
                assert!(v.abs_err() <= v.value.abs().to_f64() * 1e-20 || v.value.is_zero());
            }
        }
    }
}

#[test]
fn even_forms_vanish_together_at_a_root() {
    let g = real(2.0);
    let spec = SecularSpec::asymptotic(Parity::Even, g.clone(), policy()).unwrap();
    let b = level_bracket(&spec, 2, &opts(1e-14)).unwrap();
    let lo = equivalent_even_forms_residual(&b.k_lo, &g, &policy()).unwrap();
    let hi = equivalent_even_forms_residual(&b.k_hi, &g, &policy()).unwrap();
    assert_eq!(lo.primary.signum_i() * hi.primary.signum_i(), -1);
    assert_eq!(lo.derivative.signum_i() * hi.derivative.signum_i(), -1);
    // relative to the size of the cancelling terms both are at bisection level
    let mid = equivalent_even_forms_residual(&b.k_mid(), &g, &policy()).unwrap();
    let scale = mid.term_scale;
    assert!(mid.hankel_derivative.abs().to_f64() / scale < 1e-10);
    assert!(mid.cross_k_over_g.abs().to_f64() / scale < 1e-10);
}

#[test]
fn even_forms_share_sign_away_from_roots() {
    let f = equivalent_even_forms_residual(&real(1.0), &real(1.0), &policy()).unwrap();
    assert!(!f.primary.is_zero() && !f.derivative.is_zero());
    assert_eq!(f.primary.signum_i(), f.derivative.signum_i());
}

#[test]
fn exactly_one_cross_coefficient_matches_the_derivative() {
    let f = equivalent_even_forms_residual(&real(1.0), &real(2.0), &policy()).unwrap();
    assert_eq!(
        f.agreeing_coefficient(1e-20),
        Some(CrossCoefficient::KOverG)
    );
}

#[test]
fn odd_regular_coefficients_are_i_and_k() {
    let (k, g) = (real(1.4), real(0.9));
    let c = regular_coeffs(Parity::Odd, &k, &g, &policy()).unwrap();
    let nu = BigComplex::imaginary(&(&real(2.0) * &k));
    let x = &real(2.0) * &g;
    let i = bessel_i(&nu, &x, &policy()).unwrap();
    let kk = bessel_k(&nu, &x, &policy()).unwrap();
    assert!((&c.d1 + &i).abs().to_f64() < 1e-28 * i.abs().to_f64());
    assert!((&c.d2 - &kk).abs().to_f64() < 1e-28 * kk.abs().to_f64());
}

#[test]
fn regular_initial_conditions() {
    let zero = real(0.0);
    for (k, g) in [(0.3, 0.2), (2.0, 1.0), (9.0, 3.5)] {
        let (k, g) = (real(k), real(g));
        let even = psi_regular(Parity::Even, &k, &g, &zero, &policy())
            .unwrap()
            .to_f64();
        let even_slope = psi_regular_slope(Parity::Even, &k, &g, &zero, &policy())
            .unwrap()
            .to_f64();
        let odd = psi_regular(Parity::Odd, &k, &g, &zero, &policy())
            .unwrap()
            .to_f64();
        let odd_slope = psi_regular_slope(Parity::Odd, &k, &g, &zero, &policy())
            .unwrap()
            .to_f64();
        assert!((even - 0.5).abs() < 1e-25);
        assert!(even_slope.abs() < 1e-20);
        assert!(odd.abs() < 1e-25);
        assert!((odd_slope - 0.5).abs() < 1e-25);
    }
}

#[test]
fn psi_asym_is_k_imaginary_order_of_scaled_argument() {
    let v = psi_asym(&real(1.0), &real(1.0), &real(2.0), &policy()).unwrap();
    let e = real(1.0).exp();
    let want = bessel_k_imag(&real(2.0), &(&real(2.0) * &e), &policy()).unwrap();
    assert!((&v - &want).abs().to_f64() <= 1e-30 * want.abs().to_f64());
}

#[test]
fn psi_asym_tail_decreases_past_turning_point() {
    let (k, g) = (real(3.0), real(1.0));
    let x0 = 9f64.ln();
    let grid = uniform_grid(x0, x0 + 4.0, 0.1);
    let s = sample_asym(&k, &g, &grid, &policy(), Execution::Sequential).unwrap();
    let abs: Vec<f64> = s.values.iter().map(|v| v.abs().to_f64()).collect();
    assert!(abs.windows(2).all(|w| w[1] < w[0]), "{abs:?}");
}

#[test]
fn psi_asym_vanishes_at_origin_for_odd_levels() {
    let g = sqrt2();
    let spec = SecularSpec::asymptotic(Parity::Odd, g.clone(), policy()).unwrap();
    let b = level_bracket(&spec, 3, &opts(1e-20)).unwrap();
    let grid = uniform_grid(0.0, 3.0, 0.05);
    let s = sample_asym(&b.k_mid(), &g, &grid, &policy(), Execution::Sequential).unwrap();
    let ratio = s.values[0].abs().to_f64() / s.max_abs().to_f64();
    assert!(ratio < 1e-15, "{ratio:e}");
}

#[test]
fn regular_roots_bracket_table_values() {
    let spec = SecularSpec::new(
        Parity::Even,
        Method::regular(3.0).unwrap(),
        sqrt2(),
        policy(),
    )
    .unwrap();
    let k_tol = 5e-5 / (2.0 * 4.12f64.sqrt());
    let b = level_bracket(&spec, 0, &opts(k_tol)).unwrap();
    assert!(b.intersects(4.12005, 4.12010), "{b:?}");
    assert_eq!(b.method.name(), "regular");
    let v = secular_regular(&spec, &b.k_lo).unwrap();
    assert!(v.is_finite());
}

#[test]
fn regular_roots_converge_with_cutoff() {
    let root = |r: f64| {
        let spec =
            SecularSpec::new(Parity::Even, Method::regular(r).unwrap(), sqrt2(), policy()).unwrap();
        level_bracket(&spec, 2, &opts(1e-18)).unwrap().k_mid()
    };
    let ks: Vec<BigReal> = [2.7, 3.7, 4.7].iter().map(|&r| root(r)).collect();
    let d1 = (&ks[1] - &ks[0]).abs().to_f64();
    let d2 = (&ks[2] - &ks[1]).abs().to_f64();
    assert!(d2 < d1 && d1 > 0.0, "{d1:e} {d2:e}");
}

#[test]
fn methods_agree_on_lowest_levels() {
    let solve = SolveOptions {
        k_tol: 1e-10,
        cutoff_margin: 3.0,
        ..SolveOptions::default()
    };
    for g in [0.5, 1.0, std::f64::consts::SQRT_2, 2.0] {
        let gb = real(g);
        let a = solve_spectrum(&gb, &MethodChoice::Asymptotic, 11, &policy(), &solve).unwrap();
        let r = solve_spectrum(&gb, &MethodChoice::Regular(None), 11, &policy(), &solve).unwrap();
        for (x, y) in a.brackets.iter().zip(&r.brackets) {
            assert_eq!(x.n, y.n);
            let dk = (&x.k_mid() - &y.k_mid()).abs().to_f64();
            assert!(dk < 1e-7, "g = {g}, n = {}: {dk:e}", x.n);
            assert!(x.e_lo > gb.square());
        }
    }
}

#[test]
fn representations_agree_at_an_eigenvalue() {
    let g = sqrt2();
    for n in [0usize, 1, 4] {
        let parity = Parity::of_level(n);
        let spec = SecularSpec::asymptotic(parity, g.clone(), policy()).unwrap();
        let b = level_bracket(&spec, n, &opts(1e-20)).unwrap();
        let grid = uniform_grid(0.0, b.x0.to_f64() + 1.0, 0.02);
        let asym = sample_asym(&b.k_mid(), &g, &grid, &policy(), Execution::Sequential).unwrap();
        let reg = sample_regular(
            parity,
            &b.k_mid(),
            &g,
            &grid,
            &policy(),
            Execution::Sequential,
        )
        .unwrap();
        // rescale at an interior point away from nodes
        let j = (0..grid.len())
            .max_by(|&a, &c| {
                reg.values[a]
                    .abs()
                    .partial_cmp(&reg.values[c].abs())
                    .unwrap()
            })
            .unwrap();
        let factor = &asym.values[j] / &reg.values[j];
        let scale = asym.max_abs();
        for (a, r) in asym.values.iter().zip(&reg.values) {
            let d = (&(a - &(r * &factor)) / &scale).abs().to_f64();
            assert!(d < 1e-6, "n = {n}: {d:e}");
        }
    }
}

#[test]
fn full_line_extension_keeps_residual_level() {
    let g = sqrt2();
    let spec = SecularSpec::asymptotic(Parity::Odd, g.clone(), policy()).unwrap();
    let b = level_bracket(&spec, 1, &opts(1e-15)).unwrap();
    let k = b.k_mid();
    let grid = uniform_grid(0.0, 2.0, 1e-3);
    let half = sample_asym(&k, &g, &grid, &policy(), Execution::Parallel).unwrap();
    let full = psi_fullline(&half, Parity::Odd).unwrap();
    assert_eq!(full.len(), 2 * half.len() - 1);
    assert!(full.values[half.len() - 1].is_zero());
    let n = full.len();
    for j in 0..half.len() {
        assert_eq!(full.values[j], -full.values[n - 1 - j].clone());
    }
    let e = k.square();
    let r_half = ode_residual(&half, &g, &e).unwrap().residual.to_f64();
    let r_full = ode_residual(&full, &g, &e).unwrap().residual.to_f64();
    assert!(
        r_full < 1e-4 && r_full <= 2.0 * r_half,
        "{r_half:e} {r_full:e}"
    );
}

#[test]
fn ode_residual_of_both_representations_is_small() {
    let (k, g) = (real(1.0), real(1.0));
    let grid = uniform_grid(0.0, 3.0, 1e-3);
    let e = k.square();
    let asym = sample_asym(&k, &g, &grid, &policy(), Execution::Parallel).unwrap();
    let reg = sample_regular(Parity::Even, &k, &g, &grid, &policy(), Execution::Parallel).unwrap();
    for s in [&asym, &reg] {
        let r = ode_residual(s, &g, &e).unwrap();
        assert!(!r.coarse);
        assert!(
            r.residual.to_f64() < 1e-4,
            "{:?}: {:e}",
            s.representation,
            r.residual.to_f64()
        );
    }
}
