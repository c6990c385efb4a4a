use std::f64::consts::{E, PI};

use fracdisk::quad::{integrate, Tolerance};
use fracdisk::specfun::*;
use proptest::prelude::*;

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs()
}

// Reference values from 40-digit series (or, for alpha = 0.3 and large
// |x|, the branch-cut integral) evaluated with mpmath.
const ML: &[(f64, f64, f64)] = &[
    (0.3, -50.0, 0.015228201501792747828),
    (0.3, -20.0, 0.037406226213862505651),
    (0.3, -5.0, 0.13708086902027063889),
    (0.3, -1.0, 0.45659440832969067062),
    (0.3, -0.1, 0.8988115365027225481),
    (0.3, 0.5, 2.0620157899559994895),
    (0.3, 3.0, 272036108062510246.79),
    (0.5, -50.0, 0.0112815362653237725),
    (0.5, -20.0, 0.028174348741051319319),
    (0.5, -5.0, 0.11070463773306862637),
    (0.5, -1.0, 0.42758357615580700441),
    (0.5, -0.1, 0.89645697996912663666),
    (0.5, 0.5, 1.9523604891825570933),
    (0.5, 3.0, 16205.988853999586625),
    (0.75, -50.0, 0.0056311878629451302351),
    (0.75, -20.0, 0.014527522154459504195),
    (0.75, -5.0, 0.067923974332643942122),
    (0.75, -1.0, 0.39310830281575406177),
    (0.75, -0.1, 0.89833981373612591477),
    (0.75, 0.5, 1.7937773945015026827),
    (0.75, 3.0, 100.86180177510028035),
    (0.9, -50.0, 0.0021753530768569760498),
    (0.9, -20.0, 0.0057495078161091125836),
    (0.9, -5.0, 0.034431324804098418323),
    (0.9, -1.0, 0.37606602142464187902),
    (0.9, -0.1, 0.90175694244985939876),
    (0.9, 0.5, 1.7043087220993991136),
    (0.9, 3.0, 32.921897176850824779),
    (1.0, -50.0, 1.928749847963917783e-22),
    (1.0, -20.0, 2.061153622438557828e-9),
    (1.0, -5.0, 0.0067379469990854670966),
    (1.0, 3.0, 20.085536923187667741),
];

const ML2: &[(f64, f64, f64, f64)] = &[
    (0.7, 0.0, -2.0, -0.15471644867704244406),
    (0.5, 0.0, -3.0, -0.081558390010759307071),
    (0.6, 0.6, -4.0, 0.018264707855107769114),
    (0.8, 2.0, -10.0, 0.10411641940370937752),
    (0.4, 1.4, -1.0, 0.55793664031477648101),
    (0.9, 0.5, 2.0, 14.252371471374127726),
    (0.5, 0.5, -30.0, 0.00031291770525374203432),
    (0.6, 0.0, -25.0, -0.011127244915305897029),
];

const WRIGHT: &[(f64, f64, f64, f64)] = &[
    (-0.5, 0.5, -1.0, 0.43939128946772239705),
    (-0.5, 0.5, -3.0, 0.059465144611814685766),
    (-0.3, 0.7, -2.0, 0.16840030622678312198),
    (-0.7, 0.3, -1.5, 0.47242381177922884156),
    (-0.25, 0.75, 2.0, 2.2687501334508817218),
    (0.0, 1.0, 1.5, 4.4816890703380648226),
    (-0.5, 1.0, 2.5, 1.9229001282564582301),
];

const GAMMA_UI: &[(f64, f64, f64)] = &[
    (-2.5, 0.1, 107.73076554032768788),
    (-2.5, 0.5, 1.0724658257534470748),
    (-2.5, 1.0, 0.096556648631275160264),
    (-2.5, 3.0, 0.0005294328305010099745),
    (-2.5, 10.0, 1.0822186721237997758e-8),
    (-0.7, 0.1, 4.5378522677289294156),
    (-0.7, 0.5, 0.61188161802946188529),
    (-0.7, 1.0, 0.16516123160250590156),
    (-0.7, 3.0, 0.0052258131547545558304),
    (-0.7, 10.0, 7.8275402073814096048e-7),
    (-0.3, 0.1, 2.6033132817180211188),
    (-0.3, 0.5, 0.57452399843952342435),
    (-0.3, 1.0, 0.19295920811540390027),
    (-0.3, 3.0, 0.0087976822708421949614),
    (-0.3, 10.0, 2.0316133339671511483e-6),
    (0.4, 0.1, 1.2505175980236424715),
    (0.4, 0.5, 0.55893504768435543039),
    (0.4, 1.0, 0.26501216023403469423),
    (0.4, 3.0, 0.022184086849797644944),
    (0.4, 10.0, 0.000010807883494762375049),
    (1.5, 0.1, 0.86636595771082731728),
    (1.5, 0.5, 0.71009105827755696038),
    (1.5, 1.0, 0.50728223381177330985),
    (1.5, 3.0, 0.098911986634777369604),
    (1.5, 10.0, 0.00015043031677884429078),
    (5.0, 0.1, 23.999998159727595315),
    (5.0, 0.5, 23.995869224881059821),
    (5.0, 1.0, 23.912163676143750904),
    (5.0, 3.0, 19.566317868570529591),
    (5.0, 10.0, 0.70206451384706574415),
];

const BETA: &[(f64, f64, f64, f64)] = &[
    (1.5, 0.5, 0.5, 0.28539816339744830962),
    (0.5, 0.5, 0.9, 2.4980915447965089257),
    (0.3, 2.0, 0.2, 1.9618512558277230848),
    (2.5, 3.5, 0.7, 0.033974081211305035597),
    (0.5, 1.3, 0.99, 1.7059784483031871434),
    (4.0, 0.2, 0.6, 0.055926625652863478277),
];

#[test]
fn mittag_leffler_examples() {
    assert!(close(mittag_leffler(1.0, 1.0).unwrap(), E, 1e-15));
    assert_eq!(mittag_leffler(0.7, 0.0).unwrap(), 1.0);
    let v = mittag_leffler(0.5, -1.0).unwrap();
    assert!(close(v, E * libm::erfc(1.0), 1e-12));
    assert!(close(v, 0.4275835761558070, 1e-12));
}

#[test]
fn mittag_leffler_reference_table() {
    for &(a, x, want) in ML {
        let got = mittag_leffler(a, x).unwrap();
        assert!(close(got, want, 1e-10), "E_{a}({x}) = {got}, want {want}");
    }
}

#[test]
fn half_order_erfc_identity() {
    for i in 0..=70 {
        let y = 0.1 * i as f64;
        let want = (y * y).exp() * libm::erfc(y);
        let got = mittag_leffler(0.5, -y).unwrap();
        assert!(close(got, want, 1e-10), "y = {y}: {got} vs {want}");
    }
}

#[test]
fn two_parameter_examples() {
    assert!(close(mittag_leffler2(1.0, 1.0, 1.0).unwrap(), E, 1e-15));
    assert_eq!(mittag_leffler2(0.5, 0.0, 0.0).unwrap(), 0.0);
    assert!(close(
        mittag_leffler2(1.0, 0.0, 0.5).unwrap(),
        0.5 * 0.5f64.exp(),
        1e-12
    ));
    assert!(close(
        mittag_leffler2(1.0, 0.0, 0.5).unwrap(),
        0.824360635,
        1e-9
    ));
    for &(a, b, x, want) in ML2 {
        let got = mittag_leffler2(a, b, x).unwrap();
        assert!(
            close(got, want, 1e-10),
            "E_{a},{b}({x}) = {got}, want {want}"
        );
    }
}

#[test]
fn mittag_leffler_domain_errors() {
    for a in [0.0, -0.5, 1.5, f64::NAN] {
        assert!(mittag_leffler(a, -1.0).is_err());
        assert!(mittag_leffler2(a, 1.0, -1.0).is_err());
    }
}

#[test]
fn mittag_leffler_decreasing_grid() {
    for &a in &[0.2, 0.45, 0.7, 0.95, 1.0] {
        let mut prev = mittag_leffler(a, 0.0).unwrap();
        assert_eq!(prev, 1.0);
        for i in 1..=200 {
            let v = mittag_leffler(a, -0.1 * i as f64).unwrap();
            assert!(v > 0.0 && v < prev, "alpha {a}, x = -{}", 0.1 * i as f64);
            prev = v;
        }
    }
}

#[test]
fn wright_examples() {
    assert!(close(wright(0.0, 1.0, 1.0).unwrap(), E, 1e-14));
    assert!(close(
        wright(-0.5, 0.5, 0.0).unwrap(),
        1.0 / PI.sqrt(),
        1e-15
    ));
    assert!(close(wright(-0.5, 0.5, -1.0).unwrap(), 0.4393912894, 1e-9));
    for &(b, g, x, want) in WRIGHT {
        let got = wright(b, g, x).unwrap();
        assert!(
            close(got, want, 1e-8),
            "W_{b},{g}({x}) = {got}, want {want}"
        );
    }
}

#[test]
fn wright_reports_cancellation_past_safe_limit() {
    let x_max = wright_safe_limit(-0.5, 0.5).unwrap();
    assert!(x_max > 5.0);
    assert!(wright(-0.5, 0.5, -(x_max * 0.9)).is_ok());
    assert!(wright(-0.5, 0.5, -(x_max * 3.0)).is_err());
    assert!(wright(0.2, 1.0, 1.0).is_err());
    assert!(wright(-1.0, 1.0, 1.0).is_err());
}

#[test]
fn m_wright_half_is_gaussian() {
    for i in 0..=40 {
        let y = 0.25 * i as f64;
        let want = (-0.25 * y * y).exp() / PI.sqrt();
        assert!(close(m_wright(0.5, y).unwrap(), want, 1e-9), "y = {y}");
    }
}

#[test]
fn incomplete_gamma_examples() {
    assert!(close(
        upper_incomplete_gamma(1.0, 2.0).unwrap(),
        (-2.0f64).exp(),
        1e-14
    ));
    let half = upper_incomplete_gamma(0.5, 1.0).unwrap();
    assert!(close(half, PI.sqrt() * libm::erfc(1.0), 1e-12));
    assert!(close(half, 0.2788055853, 1e-9));
    let neg = upper_incomplete_gamma(-0.5, 1.0).unwrap();
    let q = integrate(
        |w| (-w).exp() * w.powf(-1.5),
        &[1.0, 10.0, 50.0, 200.0],
        Tolerance::default(),
    )
    .unwrap();
    assert!(close(neg, q.value, 1e-10));
    assert!(close(neg, 0.1781477118, 1e-9));
    for &(r, x, want) in GAMMA_UI {
        let got = upper_incomplete_gamma(r, x).unwrap();
        assert!(
            close(got, want, 1e-10),
            "Gamma({r}, {x}) = {got}, want {want}"
        );
    }
}

#[test]
fn incomplete_gamma_rejects() {
    assert!(upper_incomplete_gamma(0.5, 0.0).is_err());
    assert!(upper_incomplete_gamma(0.5, -1.0).is_err());
    for r in [0.0, -1.0, -3.0] {
        assert!(upper_incomplete_gamma(r, 1.0).is_err());
    }
}

#[test]
fn incomplete_beta_examples() {
    assert!(close(incomplete_beta(1.0, 1.0, 0.3).unwrap(), 0.3, 1e-14));
    assert!(close(incomplete_beta(2.0, 1.0, 1.0).unwrap(), 0.5, 1e-14));
    // z = sin^2 u gives pi/4 - 1/2 in closed form.
    let v = incomplete_beta(1.5, 0.5, 0.5).unwrap();
    assert!(close(v, PI / 4.0 - 0.5, 1e-12));
    for &(a, b, x, want) in BETA {
        let got = incomplete_beta(a, b, x).unwrap();
        assert!(
            close(got, want, 1e-10),
            "B({a}, {b}; {x}) = {got}, want {want}"
        );
    }
    assert_eq!(incomplete_beta(2.0, 3.0, 0.0).unwrap(), 0.0);
}

#[test]
fn incomplete_beta_rejects() {
    assert!(incomplete_beta(0.0, 1.0, 0.5).is_err());
    assert!(incomplete_beta(1.0, -1.0, 0.5).is_err());
    assert!(incomplete_beta(1.0, 1.0, 1.5).is_err());
    assert!(incomplete_beta(1.0, 1.0, -0.1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn zero_argument_is_first_term(a in 0.05f64..=1.0, b in 0.1f64..4.0) {
        prop_assert_eq!(mittag_leffler(a, 0.0).unwrap(), 1.0);
        let v = mittag_leffler2(a, b, 0.0).unwrap();
        prop_assert!(close(v, 1.0 / gamma(b), 1e-15));
    }

    #[test]
    fn one_and_two_parameter_agree(a in 0.1f64..=1.0, x in -50.0f64..5.0) {
        let one = mittag_leffler(a, x).unwrap();
        let two = mittag_leffler2(a, 1.0, x).unwrap();
        prop_assert!(close(one, two, 1e-12), "{} vs {}", one, two);
    }

    #[test]
    fn bounded_on_negative_axis(a in 0.1f64..=1.0, y in 0.0f64..50.0) {
        let v = mittag_leffler(a, -y).unwrap();
        prop_assert!(v > 0.0 && v <= 1.0);
    }

    #[test]
    fn wright_gaussian_bridge(z in 0.0f64..5.0) {
        let got = wright(-0.5, 0.5, -z).unwrap();
        let want = (-0.25 * z * z).exp() / PI.sqrt();
        prop_assert!((got - want).abs() <= 1e-8 * want.max(1e-3));
    }

    #[test]
    fn gamma_recurrence(i in 0usize..3, j in 0usize..3) {
        let rho = [-0.7, -0.3, 0.4][i];
        let x = [0.5, 1.0, 3.0][j];
        let lhs = upper_incomplete_gamma(rho + 1.0, x).unwrap();
        let rhs = rho * upper_incomplete_gamma(rho, x).unwrap() + x.powf(rho) * (-x).exp();
        prop_assert!(close(lhs, rhs, 1e-9));
    }

    #[test]
    fn gamma_recurrence_random(rho in -3.0f64..3.0, x in 0.05f64..20.0) {
        prop_assume!((rho - rho.round()).abs() > 1e-3);
        let lhs = upper_incomplete_gamma(rho + 1.0, x).unwrap();
        let rhs = rho * upper_incomplete_gamma(rho, x).unwrap() + x.powf(rho) * (-x).exp();
        prop_assert!(close(lhs, rhs, 1e-9), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn beta_reflection(a in 0.1f64..5.0, b in 0.1f64..5.0, x in 0.0f64..=1.0) {
        let full = incomplete_beta(a, b, 1.0).unwrap();
        let sum = incomplete_beta(a, b, x).unwrap() + incomplete_beta(b, a, 1.0 - x).unwrap();
        prop_assert!(close(sum, full, 1e-10));
        prop_assert!(close(full, (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp(), 1e-11));
    }
}
