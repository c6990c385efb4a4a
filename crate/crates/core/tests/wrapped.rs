use std::f64::consts::{PI, TAU};

use fracdisk::bernstein::BernsteinSpec;
use fracdisk::kernels::{build_table, dk, Method};
use fracdisk::mc::run_paths;
use fracdisk::subsim::RngStream;
use fracdisk::wrapped::*;
use fracdisk::Error;
use num_complex::Complex64;
use proptest::prelude::*;

fn trapezoid(n: usize, f: impl Fn(f64) -> f64) -> f64 {
    // periodic integrand: the plain rectangle sum is the trapezoid rule
    (0..n).map(|i| f(TAU * i as f64 / n as f64)).sum::<f64>() * TAU / n as f64
}

fn wn_direct(mean: f64, var: f64, phi: f64) -> f64 {
    (-10..=10)
        .map(|k| {
            let x = phi - mean + TAU * k as f64;
            (-x * x / (2.0 * var)).exp()
        })
        .sum::<f64>()
        / (TAU * var).sqrt()
}

#[test]
fn wrap_examples() {
    assert_eq!(wrap(0.0).value(), 0.0);
    assert_eq!(wrap(TAU).value(), 0.0);
    assert_eq!(wrap(-PI / 2.0).value(), 1.5 * PI);
    assert!((wrap(7.0).value() - (7.0 - TAU)).abs() < 1e-15);
}

#[test]
fn wrapped_normal_examples() {
    let wide = WrappedNormalParams::new(0.0, 100.0).unwrap();
    for i in 0..16 {
        let v = wrapped_normal_pdf(&wide, Angle::new(i as f64 * 0.4), 10).unwrap();
        assert!((v.value - 1.0 / TAU).abs() < 1e-6);
    }
    let unit = WrappedNormalParams::new(0.0, 1.0).unwrap();
    let v = wrapped_normal_pdf(&unit, Angle::new(0.0), 5).unwrap();
    assert!((v.value - wn_direct(0.0, 1.0, 0.0)).abs() < 1e-15);
    assert!((v.value - 0.3989422825).abs() < 1e-10);
}

#[test]
fn wrapped_normal_symmetry() {
    let p = WrappedNormalParams::new(1.1, 0.8).unwrap();
    for i in 1..20 {
        let x = i as f64 * 0.15;
        let a = wrapped_normal_pdf(&p, Angle::new(1.1 + x), 8)
            .unwrap()
            .value;
        let b = wrapped_normal_pdf(&p, Angle::new(1.1 - x), 8)
            .unwrap()
            .value;
        assert!((a - b).abs() < 1e-14, "{x}: {a} vs {b}");
    }
}

#[test]
fn wrapped_normal_rejects_bad_input() {
    assert!(WrappedNormalParams::new(0.0, -1.0).is_err());
    let p = WrappedNormalParams::new(0.0, 1.0).unwrap();
    assert!(wrapped_normal_pdf(&p, Angle::new(0.0), 0).is_err());
}

#[test]
fn density_unit_mass_and_uniform_limit() {
    let spec = BernsteinSpec::stable(0.6);
    let times = [0.3, 1.0, 1e6];
    let table = build_table(&spec, 512, &times, Method::Auto).unwrap();
    for &t in &times {
        let fd = FourierDensity::from_table(&table, t).unwrap();
        let mass = trapezoid(4096, |phi| fd.eval_raw(phi));
        assert!((mass - 1.0).abs() < 1e-8, "t = {t}: {mass}");
    }
    let fd = FourierDensity::from_table(&table, 1e6).unwrap();
    for i in 0..12 {
        let v = fd.eval(Angle::new(i as f64 * 0.5)).value;
        assert!((v - 1.0 / TAU).abs() < 1e-3, "{v}");
    }
}

#[test]
fn density_at_alpha_one_is_wrapped_normal() {
    let spec = BernsteinSpec::stable(1.0);
    let times = [0.2, 1.0, 3.0];
    let table = build_table(&spec, 100, &times, Method::Auto).unwrap();
    for &t in &times {
        let p = WrappedNormalParams::new(0.0, t).unwrap();
        for i in 0..64 {
            let phi = Angle::new(TAU * i as f64 / 64.0);
            let d = wrapped_density(&table, phi, t).unwrap().value;
            let w = wn_direct(0.0, t, phi.value());
            assert!((d - w).abs() < 1e-8, "t = {t}, phi = {}", phi.value());
            let v = wrapped_normal_pdf(&p, phi, 10).unwrap().value;
            assert!((v - w).abs() < 1e-13);
        }
    }
}

#[test]
fn density_needs_table_coverage() {
    let spec = BernsteinSpec::stable(0.5);
    let table = build_table(&spec, 2, &[0.05], Method::Auto).unwrap();
    let err = wrapped_density(&table, Angle::new(0.0), 0.05).unwrap_err();
    assert!(matches!(err, Error::TableCoverage(_)), "{err:?}");
}

#[test]
fn samples_reproducible_and_csv() {
    let spec = BernsteinSpec::stable(0.7);
    let times = [0.1, 0.5, 1.0];
    let s = RngStream::new(5, 9);
    let a = sample_wrapped(&spec, &times, 1e-3, &s).unwrap();
    let b = sample_wrapped(&spec, &times, 1e-3, &s).unwrap();
    assert_eq!(a, b);
    assert!(a.iter().all(|x| (0.0..TAU).contains(&x.value())));
    let csv = samples_csv(&times, &a);
    assert_eq!(csv.lines().next(), Some("t,theta"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn circular_fourier_trivial_cases() {
    let s: Vec<Angle> = [0.3, 2.0, 5.0].iter().map(|&x| Angle::new(x)).collect();
    let e = circular_fourier(&s, 0).unwrap();
    assert_eq!(e.mean, Complex64::new(1.0, 0.0));
    let zeros = vec![Angle::new(0.0); 10];
    let e = circular_fourier(&zeros, 3).unwrap();
    assert_eq!(e.mean, Complex64::new(1.0, 0.0));
    assert!(matches!(circular_fourier(&[], 1), Err(Error::EmptySample)));
}

#[test]
fn sampled_moments_match_kernel() {
    let dt = 2e-3;
    let t = 0.5;
    for (id, spec) in [
        BernsteinSpec::stable(0.6),
        BernsteinSpec::tempered(0.7, 1.0),
    ]
    .iter()
    .enumerate()
    {
        let angles = run_paths(100_000, &RngStream::new(77, id as u64), |p| {
            Ok(sample_wrapped(spec, &[t], dt, p)?[0])
        })
        .unwrap();
        for k in 1..=3u32 {
            let e = circular_fourier(&angles, k as i64).unwrap();
            let want = dk(spec, k, t).unwrap();
            let allow = (k * k) as f64 / 2.0 * dt;
            assert!(
                e.re().within(want, 3.0, allow),
                "{spec:?} k={k}: {e:?} vs {want}"
            );
            assert!(e.im().within(0.0, 3.0, 0.0), "{spec:?} k={k}: {e:?}");
        }
    }
}

#[test]
fn histogram_and_chi_square() {
    let spec = BernsteinSpec::stable(0.8);
    let table = build_table(&spec, 512, &[1.0], Method::Auto).unwrap();
    let fd = FourierDensity::from_table(&table, 1.0).unwrap();
    let probs = fd.bin_probabilities(16);
    assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    let angles = run_paths(20_000, &RngStream::new(3, 4), |p| {
        Ok(sample_wrapped(&spec, &[1.0], 1e-3, p)?[0])
    })
    .unwrap();
    let counts = histogram(&angles, 16);
    assert_eq!(counts.iter().sum::<u64>(), 20_000);
    let test = chi_square_gof(&counts, &probs).unwrap();
    assert!(test.p_value > 1e-4, "{test:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn wrap_lands_in_range(x in -1e6f64..1e6) {
        let a = wrap(x).value();
        prop_assert!((0.0..TAU).contains(&a));
        let turns = (x - a) / TAU;
        prop_assert!((turns - turns.round()).abs() < 1e-6);
    }

    #[test]
    fn wrapped_normal_fourier(mean in -3.0f64..3.0, var in 0.05f64..4.0) {
        let p = WrappedNormalParams::new(mean, var).unwrap();
        for k in 0..=4i32 {
            let re = trapezoid(1024, |phi| {
                (k as f64 * phi).cos() * wrapped_normal_pdf(&p, Angle::new(phi), 12).unwrap().value
            });
            let im = trapezoid(1024, |phi| {
                (k as f64 * phi).sin() * wrapped_normal_pdf(&p, Angle::new(phi), 12).unwrap().value
            });
            let want = Complex64::from_polar((-(k * k) as f64 * var / 2.0).exp(), k as f64 * mean);
            prop_assert!((Complex64::new(re, im) - want).norm() < 1e-8);
        }
    }

}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn density_integrates_to_one(alpha in 0.3f64..1.0, t in 0.2f64..5.0) {
        let spec = BernsteinSpec::stable(alpha);
        let table = build_table(&spec, 512, &[t], Method::Auto).unwrap();
        let fd = FourierDensity::from_table(&table, t).unwrap();
        let mass = trapezoid(4096, |phi| fd.eval_raw(phi));
        prop_assert!((mass - 1.0).abs() < 1e-8, "{mass}");
    }
}
