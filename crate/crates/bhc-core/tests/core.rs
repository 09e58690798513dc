use bhc_core::*;
use proptest::prelude::*;
use std::f64::consts::PI;

#[test]
fn dyadic_partition_of_unity() {
    let rho = BumpFamily::rho();
    let worst = (0..=12_000)
        .map(|i| 2f64.powf(-6.0 + 12.0 * i as f64 / 12_000.0))
        .map(|t| (rho.partition_sum(t, -8, 8) - 1.0).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-10, "{worst}");
}

#[test]
fn oscillatory_integral_of_pure_phase() {
    // ∫_0^1 e(γt) dt = (e(γ) - 1)/(2πiγ)
    let gamma = 37.25;
    let dom = OscDomain::new(0.0, 1.0, gamma).with_pts_per_period(64);
    let z = oscillatory_integral(|_| Complex64::new(1.0, 0.0), |t| gamma * t, &dom, &Budget::new(1 << 20)).unwrap();
    let exact = (cis2pi(gamma) - 1.0) / Complex64::new(0.0, 2.0 * PI * gamma);
    // the midpoint rule with step h multiplies this by πγh / sin(πγh)
    let h = 1.0 / dom.samples() as f64;
    let midpoint = exact * (PI * gamma * h / (PI * gamma * h).sin());
    assert!((z - midpoint).norm() < 1e-12 * exact.norm(), "{z} vs {midpoint}");
    assert!((z - exact).norm() < 1e-3 * exact.norm());
}

#[test]
fn oscillatory_integral_respects_budget() {
    let dom = OscDomain::new(0.0, 1.0, 1e6);
    let err = oscillatory_integral(|_| Complex64::new(1.0, 0.0), |t| 1e6 * t, &dom, &Budget::new(100)).unwrap_err();
    assert!(matches!(err, CoreError::BudgetExceeded { .. }), "{err}");
}

#[test]
fn sharp_projection_is_idempotent_and_keeps_band() {
    let f = GridFunction::from_fn(-4.0, 4.0, 1024, |x| cis2pi(2.0 * x) + cis2pi(9.0 * x)).unwrap();
    let p = freq_project(&f, (1.0, 3.0), Window::Sharp).unwrap();
    let pp = freq_project(&p, (1.0, 3.0), Window::Sharp).unwrap();
    let want = GridFunction::from_fn(-4.0, 4.0, 1024, |x| cis2pi(2.0 * x)).unwrap();
    assert!(p.sub(&want).unwrap().sup_norm() < 1e-12);
    assert!(pp.sub(&p).unwrap().sup_norm() < 1e-12);
}

#[test]
fn band_beyond_nyquist_rejected() {
    let f = GridFunction::zeros(-1.0, 1.0, 64).unwrap();
    assert!(freq_project(&f, (0.0, 100.0), Window::Smooth).is_err());
}

proptest! {
    #[test]
    fn spectrum_round_trip(seed in proptest::collection::vec(-1.0f64..1.0, 64)) {
        let f = GridFunction::new(-2.0, 2.0, seed.iter().map(|&v| Complex64::new(v, -v / 2.0)).collect()).unwrap();
        let back = f.spectrum().to_grid().unwrap();
        prop_assert!(back.sub(&f).unwrap().sup_norm() < 1e-12);
    }

    #[test]
    fn plancherel_on_grid(seed in proptest::collection::vec(-1.0f64..1.0, 128)) {
        let f = GridFunction::new(0.0, 3.0, seed.iter().map(|&v| Complex64::new(v, v * v)).collect()).unwrap();
        let s = f.spectrum();
        let lhs = f.norm_l2().powi(2);
        prop_assert!((s.inner(&s).re - lhs).abs() < 1e-10 * lhs.max(1e-300));
    }

    #[test]
    fn modulation_preserves_modulus(c in -10.0f64..10.0) {
        let f = GridFunction::from_real_fn(-1.0, 1.0, 256, |x| 1.0 + x * x).unwrap();
        let m = f.modulate(c);
        for (a, b) in f.samples().iter().zip(m.samples()) {
            prop_assert!((a.norm() - b.norm()).abs() < 1e-14);
        }
    }
}
