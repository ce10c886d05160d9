//! Special functions against values frozen from an independent 50-digit
//! multiprecision library, plus the identity-based invariants.

use expwell::specfun::{
    bessel_i, bessel_k, bessel_k_imag, bessel_k_shifted, gamma_complex, hankel1, wronskian_residual,
};
use expwell::{BigComplex, BigReal, PrecisionPolicy};
use proptest::prelude::*;

const P: u32 = 256;

fn policy() -> PrecisionPolicy {
    PrecisionPolicy::default()
}

fn real(text: &str) -> BigReal {
    BigReal::parse(text, P).unwrap()
}

fn cplx(re: &str, im: &str) -> BigComplex {
    BigComplex::new(real(re), real(im))
}

fn rel_err(got: &BigComplex, want: &BigComplex) -> f64 {
    ((got - want).abs() / want.abs()).to_f64()
}

fn rel_err_real(got: &BigReal, want: &BigReal) -> f64 {
    ((got - want).abs() / want.abs()).to_f64()
}

#[test]
fn gamma_reference_values() {
    let cases = [
        (
            ("1", "2"),
            (
                "0.1519040026700361374481609505450015036682",
                "0.01980488016185498197191013167096389454802",
            ),
        ),
        (
            ("0.25", "-3.5"),
            (
                "0.006609577111117995578126212923304699116327",
                "-0.003567616377284916725072208133029791498923",
            ),
        ),
        (
            ("-2.5", "0.5"),
            (
                "-0.3338752035224323374032772703395655880727",
                "-0.2064573079636084149182876075638729883835",
            ),
        ),
        (
            ("3", "40"),
            (
                "-1.586960998451476363330472698814294148767e-24",
                "-1.300714980038894280964552217847814908402e-23",
            ),
        ),
    ];
    for ((zr, zi), (wr, wi)) in cases {
        let g = gamma_complex(&cplx(zr, zi), &policy()).unwrap();
        let err = rel_err(&g, &cplx(wr, wi));
        assert!(err < 1e-30, "Γ({zr}+{zi}i): rel err {err:e}");
    }
}

#[test]
fn bessel_i_reference_values() {
    let i1 = bessel_i(&cplx("1", "0"), &real("2"), &policy()).unwrap();
    assert!(rel_err(&i1, &cplx("1.590636854637329063382254424999666247954", "0")) < 1e-30);

    let i2i = bessel_i(&cplx("0", "2"), &real("2"), &policy()).unwrap();
    let want = cplx(
        "7.161099217576451538350842286932907104742",
        "-4.090669412968850099785212435855270571271",
    );
    assert!(rel_err(&i2i, &want) < 1e-30);

    let i13 = bessel_i(&cplx("1", "3"), &real("0.7"), &policy()).unwrap();
    let want = cplx(
        "2.008528318308305826154431114798809362374",
        "2.080952212617460960470111284688233790626",
    );
    assert!(rel_err(&i13, &want) < 1e-30);
}

#[test]
fn bessel_k_imaginary_order_reference_values() {
    let cases = [
        ("0", "1", "0.4210244382407083333356273792126090361362"),
        ("1", "1", "0.289428037025992127634567159241523027434"),
        ("6", "5", "0.00009383313871646516721989523584971780983866"),
        (
            "20",
            "0.5",
            "-8.105606834724834090106448603233809248863e-15",
        ),
        ("3", "30", "1.839667453936973002060865441190007300709e-14"),
    ];
    for (mu, x, want) in cases {
        let k = bessel_k_imag(&real(mu), &real(x), &policy()).unwrap();
        let err = rel_err_real(&k, &real(want));
        assert!(err < 1e-28, "K_{{i{mu}}}({x}): rel err {err:e}");
    }
}

#[test]
fn bessel_k_integer_and_shifted_orders() {
    let k1 = bessel_k(&cplx("1", "0"), &real("1"), &policy()).unwrap();
    assert!(
        rel_err(
            &k1,
            &cplx("0.6019072301972345747375400015356173392616", "0")
        ) < 1e-30
    );
    let k2 = bessel_k(&cplx("2", "0"), &real("3.5"), &policy()).unwrap();
    assert!(
        rel_err(
            &k2,
            &cplx("0.03230712169946782267246648577380389223253", "0")
        ) < 1e-30
    );

    let plus = bessel_k_shifted(&real("2"), 1, &real("4"), &policy()).unwrap();
    let want = cplx(
        "0.007162072168676349100324044226829522417308",
        "0.003536920492898781351590616178195446141726",
    );
    assert!(rel_err(&plus, &want) < 1e-28);
    let minus = bessel_k_shifted(&real("2"), -1, &real("4"), &policy()).unwrap();
    assert!(rel_err(&minus, &want.conj()) < 1e-28);

    let k2s = bessel_k_shifted(&real("0.5"), 2, &real("1.5"), &policy()).unwrap();
    let want = cplx(
        "0.4920254625716017096886711753932731703321",
        "0.2571298607102584764557203356209885948918",
    );
    assert!(rel_err(&k2s, &want) < 1e-28);
}

#[test]
fn hankel_reference_values() {
    let h = hankel1(&cplx("0", "2"), &real("1"), &policy()).unwrap();
    assert!(rel_err(&h, &cplx("0", "-1.187635297545648170417040240281296377586")) < 1e-28);
    let h0 = hankel1(&cplx("0", "0"), &real("1"), &policy()).unwrap();
    assert!(
        rel_err(
            &h0,
            &cplx("0", "-0.2680324820339885487627693315332235784327")
        ) < 1e-28
    );

    // (2/(iπ)) K_0(1)
    let k0 = bessel_k_imag(&real("0"), &real("1"), &policy()).unwrap();
    let expect = BigComplex::imaginary(&-(&(&BigReal::from_f64(2.0, P) / &BigReal::pi(P)) * &k0));
    assert!(rel_err(&h0, &expect) < 1e-28);
}

#[test]
fn hankel_and_k_share_zeros() {
    // nonzero prefactor: |H| vanishes exactly when K does
    let mu = real("2.7");
    let t = real("1.3");
    let k = bessel_k_imag(&mu, &t, &policy()).unwrap();
    let h = hankel1(&BigComplex::imaginary(&mu), &t, &policy()).unwrap();
    let ratio = (h.abs() / k.abs()).to_f64();
    let prefactor = 2.0 / std::f64::consts::PI * (std::f64::consts::PI * 2.7 / 2.0).exp();
    assert!((ratio / prefactor - 1.0).abs() < 1e-14);
}

#[test]
fn wronskian_named_cases() {
    for (nu, x) in [
        (cplx("0", "0"), "1"),
        (cplx("0", "6"), "5"),
        (cplx("0", "20"), "0.5"),
    ] {
        let r = wronskian_residual(&nu, &real(x), &policy())
            .unwrap()
            .to_f64();
        assert!(r < 1e-25, "ν={nu:?} x={x}: {r:e}");
    }
}

#[test]
fn recurrence_named_case() {
    // μ = 2, s = 1, x = 4: K_{ν-1} - K_{ν+1} + (2ν/x) K_ν = 0 with ν = 1 + 2i
    let mu = real("2");
    let x = real("4");
    let k0 = bessel_k_shifted(&mu, 0, &x, &policy()).unwrap();
    let k1 = bessel_k_shifted(&mu, 1, &x, &policy()).unwrap();
    let k2 = bessel_k_shifted(&mu, 2, &x, &policy()).unwrap();
    let nu = cplx("1", "2");
    let two_nu_over_x = (&nu + &nu).scale(&(&BigReal::from_f64(1.0, P) / &x));
    let resid = &(&k0 - &k2) + &(&two_nu_over_x * &k1);
    let scale = k0
        .abs()
        .to_f64()
        .max(k2.abs().to_f64())
        .max((&two_nu_over_x * &k1).abs().to_f64());
    assert!(resid.abs().to_f64() / scale < 1e-25);
}

#[test]
fn re_of_shifted_is_mean_of_conjugate_pair() {
    let mu = real("3.1");
    let x = real("2.2");
    let plus = bessel_k_shifted(&mu, 1, &x, &policy()).unwrap();
    let minus = bessel_k_shifted(&mu, -1, &x, &policy()).unwrap();
    let mean = &(&plus + &minus).re() / &BigReal::from_f64(2.0, P);
    let diff = (&mean - &plus.re()).abs().to_f64();
    assert!(diff < 1e-28 * plus.abs().to_f64());
    // and the pair sums to a real number
    assert!((&plus + &minus).im().abs().to_f64() < 1e-28 * plus.abs().to_f64());
}

#[test]
fn results_are_bit_identical_across_threads() {
    let mu = real("7.25");
    let x = real("3.5");
    let here = bessel_k_imag(&mu, &x, &policy()).unwrap();
    let handles: Vec<_> = (0..4)
        .map(|_| {
            let mu = mu.clone();
            let x = x.clone();
            std::thread::spawn(move || bessel_k_imag(&mu, &x, &PrecisionPolicy::default()).unwrap())
        })
        .collect();
    for h in handles {
        assert_eq!(h.join().unwrap(), here);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn wronskian_identity_holds(mu in 0.0f64..25.0, x in 0.05f64..20.0) {
        let nu = BigComplex::from_f64(0.0, mu, P);
        let xr = BigReal::from_f64(x, P);
        let r = wronskian_residual(&nu, &xr, &policy()).unwrap().to_f64();
        prop_assert!(r < 10.0 * 1e-30 / x, "μ={} x={} residual {:e}", mu, x, r);
    }

    #[test]
    fn conjugation_symmetry(mu in 0.01f64..20.0, x in 0.1f64..15.0, s in 1i32..=2) {
        let m = BigReal::from_f64(mu, P);
        let xr = BigReal::from_f64(x, P);
        let plus = bessel_k_shifted(&m, s, &xr, &policy()).unwrap();
        let minus = bessel_k_shifted(&m, -s, &xr, &policy()).unwrap();
        let err = ((&plus.conj() - &minus).abs() / plus.abs()).to_f64();
        prop_assert!(err < 1e-29, "err {:e}", err);
    }

    #[test]
    fn k_recurrence_holds(mu in 0.01f64..20.0, x in 0.1f64..15.0) {
        // ν = 1 + iμ: K_{ν-1} - K_{ν+1} + (2ν/x) K_ν = 0
        let m = BigReal::from_f64(mu, P);
        let xr = BigReal::from_f64(x, P);
        let k0 = bessel_k_shifted(&m, 0, &xr, &policy()).unwrap();
        let k1 = bessel_k_shifted(&m, 1, &xr, &policy()).unwrap();
        let k2 = bessel_k_shifted(&m, 2, &xr, &policy()).unwrap();
        let two_over_x = &BigReal::from_f64(2.0, P) / &xr;
        let coef = BigComplex::new(two_over_x.clone(), &two_over_x * &m);
        let t = &coef * &k1;
        let resid = (&(&k0 - &k2) + &t).abs().to_f64();
        let scale = k0.abs().to_f64().max(k2.abs().to_f64()).max(t.abs().to_f64());
        prop_assert!(resid / scale < 1e-29, "rel {:e}", resid / scale);
    }
}
