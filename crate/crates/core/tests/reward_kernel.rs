use approx::assert_relative_eq;
use crowdnav_core::reward_kernel::{
    density_with, gaussian_density, tgrf, SqrtSigmaPrefactor, StandardNormal, TgrfParams,
};
use proptest::prelude::*;

const REL: f64 = 1e-12;

fn oracle(w: f64, mu: f64, sigma: f64, x: f64) -> f64 {
    w * (-(x - mu).powi(2) / (2.0 * sigma * sigma)).exp()
}

fn params() -> impl Strategy<Value = (f64, f64, f64)> {
    (-10.0..10.0f64, -5.0..5.0f64, 0.01..50.0f64)
}

proptest! {
    #[test]
    fn peak_equals_weight((w, mu, sigma) in params()) {
        let p = TgrfParams::new(w, mu, sigma).unwrap();
        let peak = tgrf(&p, mu).unwrap();
        prop_assert!((peak - w).abs() <= REL * w.abs());
    }

    #[test]
    fn symmetric_about_mean((w, mu, sigma) in params(), d in 0.0..20.0f64) {
        let p = TgrfParams::new(w, mu, sigma).unwrap();
        let l = tgrf(&p, mu - d).unwrap();
        let r = tgrf(&p, mu + d).unwrap();
        prop_assert!((l - r).abs() <= REL * l.abs().max(r.abs()) + f64::MIN_POSITIVE);
    }

    #[test]
    fn magnitude_decreases_away_from_mean((w, mu, sigma) in params(), a in 0.0..10.0f64, b in 0.0..10.0f64) {
        let p = TgrfParams::new(w, mu, sigma).unwrap();
        let (near, far) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(tgrf(&p, mu + near).unwrap().abs() >= tgrf(&p, mu + far).unwrap().abs());
        prop_assert!(tgrf(&p, mu - near).unwrap().abs() >= tgrf(&p, mu - far).unwrap().abs());
    }

    #[test]
    fn linear_in_weight((w, mu, sigma) in params(), c in -4.0..4.0f64, x in -20.0..20.0f64) {
        let p = TgrfParams::new(w, mu, sigma).unwrap();
        let scaled = p.with_weight(c * w).unwrap();
        let lhs = tgrf(&scaled, x).unwrap();
        let rhs = c * tgrf(&p, x).unwrap();
        prop_assert!((lhs - rhs).abs() <= REL * lhs.abs().max(rhs.abs()) + f64::MIN_POSITIVE);
    }

    #[test]
    fn prefactor_cancels((w, mu, sigma) in params(), x in -20.0..20.0f64) {
        let p = TgrfParams::new(w, mu, sigma).unwrap();
        let a = p.eval_with::<StandardNormal>(x).unwrap();
        let b = p.eval_with::<SqrtSigmaPrefactor>(x).unwrap();
        prop_assert!((a - b).abs() <= REL * a.abs().max(b.abs()) + f64::MIN_POSITIVE);
        let o = oracle(w, mu, sigma, x);
        prop_assert!((a - o).abs() <= REL * a.abs().max(o.abs()) + f64::MIN_POSITIVE);
    }

    #[test]
    fn c_norm_is_density_at_mean((_w, mu, sigma) in params()) {
        let p = TgrfParams::new(1.0, mu, sigma).unwrap();
        let expected = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
        prop_assert!((p.c_norm() - expected).abs() <= REL * expected);
        prop_assert_eq!(p.c_norm(), gaussian_density(mu, mu, sigma).unwrap());
    }
}

#[test]
fn density_integrates_to_one() {
    // Composite Simpson over +-10 sigma.
    for sigma in [0.2, 1.0, 3.0] {
        let n = 20_000;
        let (a, b) = (-10.0 * sigma, 10.0 * sigma);
        let h = (b - a) / n as f64;
        let f = |x: f64| density_with::<StandardNormal, f64>(x, 0.0, sigma).unwrap();
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        assert_relative_eq!(s * h / 3.0, 1.0, max_relative = 1e-10);
    }
}

#[test]
fn large_sigma_is_flat_over_the_arena() {
    let p = TgrfParams::new(1.5, 0.0, 5000.0).unwrap();
    let values: Vec<f64> = (0..=1200).map(|i| tgrf(&p, i as f64 * 0.01).unwrap()).collect();
    let spread = values.iter().cloned().fold(f64::MIN, f64::max) - values.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread < 1e-5, "spread {spread}");
}

#[test]
fn small_sigma_is_an_impulse() {
    let p = TgrfParams::<f64>::new(-0.25, 0.0, 1e-3).unwrap();
    assert_eq!(tgrf(&p, 0.0).unwrap(), -0.25);
    assert!(tgrf(&p, 0.01).unwrap().abs() < 1e-20);
    assert!(tgrf(&p, -0.05).unwrap().abs() < 1e-20);
}

#[test]
fn grid_matches_closed_form() {
    let p = TgrfParams::new(0.25, 0.0, 0.2).unwrap();
    for i in 0..=100 {
        let x = -1.0 + 0.02 * i as f64;
        assert_relative_eq!(tgrf(&p, x).unwrap(), oracle(0.25, 0.0, 0.2, x), max_relative = REL);
    }
}

#[test]
fn rejects_bad_domain() {
    assert!(TgrfParams::new(1.0, 0.0, 0.0).is_err());
    assert!(TgrfParams::new(1.0, 0.0, -1.0).is_err());
    assert!(TgrfParams::new(f64::NAN, 0.0, 1.0).is_err());
    let p = TgrfParams::new(1.0, 0.0, 1.0).unwrap();
    assert!(tgrf(&p, f64::INFINITY).is_err());
}

#[test]
fn f32_agrees_with_f64() {
    let p32 = TgrfParams::<f32>::new(0.25, 0.0, 0.2).unwrap();
    let p64 = TgrfParams::<f64>::new(0.25, 0.0, 0.2).unwrap();
    for x in [0.0, 0.1, 0.2, 0.35] {
        assert_relative_eq!(tgrf(&p32, x as f32).unwrap() as f64, tgrf(&p64, x).unwrap(), max_relative = 1e-6);
    }
}
