use fracdisk::bernstein::BernsteinSpec;
use fracdisk::kernels::*;
use libm::erfc;
use proptest::prelude::*;

// E_{1/2}(-y) = e^{y^2} erfc(y)
fn ml_half(y: f64) -> f64 {
    (y * y).exp() * erfc(y)
}

#[test]
fn stable_examples() {
    assert!((dk_stable(0.5, 1, 1.0).unwrap() - 0.6156903441).abs() < 1e-10);
    assert!((dk_stable(0.5, 1, 1.0).unwrap() - ml_half(0.5)).abs() < 1e-13);
    assert!((dk_stable(1.0, 2, 1.0).unwrap() - 0.1353352832).abs() < 1e-10);
    for k in 0..6u32 {
        for &t in &[0.1f64, 1.0, 3.0] {
            let y = 0.5 * (k * k) as f64 * t.sqrt();
            let d = dk_stable(0.5, k, t).unwrap();
            assert!((d / ml_half(y) - 1.0).abs() < 1e-12, "{k} {t}");
        }
    }
}

#[test]
fn nd_examples() {
    let s = BernsteinSpec::stable(0.5);
    assert_eq!(dk_nd(&s, &[3, 4], 0.7).unwrap(), dk(&s, 5, 0.7).unwrap());
    assert!((dk_nd(&s, &[1, 1], 1.0).unwrap() - 0.4275835762).abs() < 1e-10);
    let tt = BernsteinSpec::tempered(0.5, 1.0);
    assert_eq!(dk_nd(&tt, &[3, 4], 0.7).unwrap(), dk(&tt, 5, 0.7).unwrap());
}

#[test]
fn numeric_routes() {
    let s = BernsteinSpec::stable(0.5);
    assert!((dk_numeric(&s, 0, 1.0, 32).unwrap() - 1.0).abs() < 1e-10);
    let n = dk_numeric(&s, 1, 1.0, 32).unwrap();
    assert!((n / ml_half(0.5) - 1.0).abs() < 1e-6);
    let tt = BernsteinSpec::tempered(0.5, 2.0);
    let q = dk_tempered(0.5, 2.0, 3, 0.5, 1e-8).unwrap();
    let n = dk_numeric(&tt, 3, 0.5, 32).unwrap();
    assert!((q - n).abs() < 1e-5, "{q} {n}");
}

#[test]
fn classical_limit_by_inversion() {
    let s = BernsteinSpec::stable(0.999);
    for k in 0..=3u32 {
        for i in 1..=8 {
            let t = 0.1 + (2.0 - 0.1) * (i - 1) as f64 / 7.0;
            let n = dk_numeric(&s, k, t, 32).unwrap();
            let e = (-0.5 * (k * k) as f64 * t).exp();
            assert!((n - e).abs() <= 5e-3, "{k} {t}: {n} vs {e}");
        }
    }
    let s = BernsteinSpec::stable(0.99999);
    let n = dk_numeric(&s, 2, 1.0, 32).unwrap();
    assert!((n - (-2.0f64).exp()).abs() < 1e-4);
}

#[test]
fn stable_table_is_direct() {
    let s = BernsteinSpec::stable(0.6);
    let times: Vec<f64> = (0..50).map(|i| 0.1 * i as f64).collect();
    let t = build_table(&s, 49, &times, Method::Auto).unwrap();
    for k in [0u32, 7, 49] {
        for &tt in &[0.0, 1.3, 4.9] {
            let tt = times
                .iter()
                .copied()
                .find(|x| (x - tt).abs() < 1e-9)
                .unwrap();
            assert_eq!(t.get(k, tt).unwrap(), dk_stable(0.6, k, tt).unwrap());
        }
    }
    assert!(t.methods.iter().all(|m| *m == Method::ClosedForm));
}

#[test]
fn tempered_table_invariants() {
    let s = BernsteinSpec::tempered(0.5, 1.0);
    let times: Vec<f64> = (1..=6).map(|i| 0.25 * i as f64).collect();
    let t = build_table(&s, 4, &times, Method::Auto).unwrap();
    assert!(t.methods[times.len()..]
        .iter()
        .all(|m| *m == Method::Quadrature));
    t.check_invariants().unwrap();
}

#[test]
fn completely_monotone_proxy() {
    for spec in [
        BernsteinSpec::stable(0.5),
        BernsteinSpec::tempered(0.7, 1.0),
    ] {
        for k in 1..=4u32 {
            let d: Vec<f64> = (0..20)
                .map(|i| dk(&spec, k, 0.1 + 0.2 * i as f64).unwrap())
                .collect();
            for w in d.windows(3) {
                assert!(w[1] - w[0] < 0.0);
                assert!(w[2] - 2.0 * w[1] + w[0] > -1e-9);
            }
        }
    }
}

#[test]
fn stable_table_full_grid() {
    let s = BernsteinSpec::stable(0.45);
    let times: Vec<f64> = (0..50).map(|i| 0.08 * i as f64).collect();
    let t = build_table(&s, 49, &times, Method::Auto).unwrap();
    for k in 0..=49u32 {
        let row: Vec<f64> = times.iter().map(|&x| t.get(k, x).unwrap()).collect();
        assert!(row.windows(2).all(|w| w[1] <= w[0]));
        for (&x, v) in times.iter().zip(&row) {
            assert_eq!(*v, dk_stable(0.45, k, x).unwrap());
        }
    }
    for &x in &times {
        assert_eq!(t.get(0, x).unwrap(), 1.0);
    }
    t.check_invariants().unwrap();
}

#[test]
fn table_coverage_and_csv() {
    let s = BernsteinSpec::stable(0.5);
    let t = build_table(&s, 2, &[0.5, 1.0], Method::Auto).unwrap();
    assert!(matches!(
        t.get(3, 1.0),
        Err(fracdisk::Error::TableCoverage(_))
    ));
    assert!(matches!(
        t.get(1, 0.7),
        Err(fracdisk::Error::TableCoverage(_))
    ));
    let csv = t.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("k,t,dk,method"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 6);
    let cells: Vec<&str> = rows[3].split(',').collect();
    assert_eq!(cells.len(), 4);
    let v: f64 = cells[2].parse().unwrap();
    assert!((v - ml_half(0.5)).abs() < 1e-12);
    assert_eq!(cells[3], "closed_form");
    assert!(build_table(&s, 2, &[1.0, 0.5], Method::Auto).is_err());
}

#[test]
fn tempered_example_dual_oracle() {
    use fracdisk::mc::{run_paths, MeanEstimate};
    use fracdisk::subsim::{sample_inverse, RngStream};

    let spec = BernsteinSpec::tempered(0.5, 1.0);
    let q = dk_tempered(0.5, 1.0, 1, 1.0, DEFAULT_QUAD_TOL).unwrap();
    let n = dk_numeric(&spec, 1, 1.0, 32).unwrap();
    assert!((q - n).abs() < 1e-5);
    let dt = 1e-3;
    let xs = run_paths(100_000, &RngStream::new(21, 0), |p| {
        Ok((-0.5 * sample_inverse(&spec, &[1.0], dt, &mut p.rng())?[0]).exp())
    })
    .unwrap();
    let est = MeanEstimate::from_samples(&xs).unwrap();
    assert!(est.within(q, 3.0, 0.5 * dt), "{est:?} vs {q}");
}

#[test]
fn tables_match_monte_carlo() {
    use fracdisk::mc::{run_paths, MeanEstimate};
    use fracdisk::subsim::{sample_inverse, RngStream};

    let dt = 1e-3;
    let times = [0.25, 0.5, 1.0];
    for (id, spec) in [
        BernsteinSpec::stable(0.7),
        BernsteinSpec::tempered(0.6, 2.0),
    ]
    .iter()
    .enumerate()
    {
        let table = build_table(spec, 3, &times, Method::Auto).unwrap();
        let es = run_paths(100_000, &RngStream::new(22, id as u64), |p| {
            sample_inverse(spec, &times, dt, &mut p.rng())
        })
        .unwrap();
        for (k, j) in [(1u32, 0usize), (1, 2), (2, 1), (3, 2)] {
            let half_ksq = 0.5 * (k * k) as f64;
            let xs: Vec<f64> = es.iter().map(|e| (-half_ksq * e[j]).exp()).collect();
            let est = MeanEstimate::from_samples(&xs).unwrap();
            let want = table.get(k, times[j]).unwrap();
            assert!(
                est.within(want, 3.0, half_ksq * dt),
                "{spec:?} k {k} t {}: {est:?} vs {want}",
                times[j]
            );
        }
    }
}

#[test]
fn route_agreement_grid() {
    let ks = [1u32, 2, 3, 4, 5];
    let ts = [0.2, 0.5, 1.0, 2.0, 4.0];
    for &alpha in &[0.35, 0.75] {
        let s = BernsteinSpec::stable(alpha);
        for &k in &ks {
            for &t in &ts {
                let c = dk_stable(alpha, k, t).unwrap();
                let n = dk_numeric(&s, k, t, 32).unwrap();
                assert!((n - c).abs() <= 1e-6 * c);
            }
        }
    }
    let s = BernsteinSpec::tempered(0.65, 0.8);
    for &k in &ks {
        for &t in &ts {
            let q = dk_tempered(0.65, 0.8, k, t, DEFAULT_QUAD_TOL).unwrap();
            let n = dk_numeric(&s, k, t, 32).unwrap();
            assert!((n - q).abs() <= 1e-5);
        }
    }
}

#[test]
fn method_override() {
    let s = BernsteinSpec::stable(0.5);
    let (v, m, _) = dk_with(&s, 1.0, 1.0, Method::Inversion).unwrap();
    assert_eq!(m, Method::Inversion);
    assert!((v - ml_half(0.5)).abs() < 1e-8);
    let (v, m, _) = dk_with(&s, 1.0, 1.0, Method::Quadrature).unwrap();
    assert_eq!(m, Method::Quadrature);
    assert!((v - ml_half(0.5)).abs() < 1e-8);
    assert!(dk_with(
        &BernsteinSpec::tempered(0.5, 1.0),
        1.0,
        1.0,
        Method::ClosedForm
    )
    .is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stable_kernel_bounds(alpha in 0.2f64..1.0, k in 0u32..8, t in 0.0f64..5.0, dt in 0.0f64..1.0) {
        let a = dk_stable(alpha, k, t).unwrap();
        prop_assert!(a > 0.0 && a <= 1.0);
        prop_assert!(dk_stable(alpha, k, t + dt).unwrap() <= a + 1e-14);
        prop_assert!(dk_stable(alpha, k + 1, t).unwrap() <= a + 1e-14);
    }

    #[test]
    fn tempered_kernel_bounds(alpha in 0.3f64..0.9, mu in 0.0f64..3.0, k in 1u32..5, t in 0.05f64..3.0) {
        let a = dk_tempered(alpha, mu, k, t, 1e-8).unwrap();
        prop_assert!(a > 0.0 && a <= 1.0 + 1e-8);
        let b = dk_tempered(alpha, mu, k + 1, t, 1e-8).unwrap();
        prop_assert!(b <= a + 2e-8);
        // g_tempered <= theta^alpha, so the tempered clock E runs ahead
        prop_assert!(a <= dk_stable(alpha, k, t).unwrap() + 2e-8);
    }

    #[test]
    fn effective_ksq(alpha in 0.3f64..1.0, a in 0u32..6, b in 0u32..6, t in 0.0f64..3.0) {
        let s = BernsteinSpec::stable(alpha);
        let direct = dk_stable_ksq(alpha, (a * a + b * b) as f64, t).unwrap();
        prop_assert_eq!(dk_nd(&s, &[a, b], t).unwrap(), direct);
    }
}
