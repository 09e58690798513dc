use bhc_core::{Budget, Complex64, GridFunction};
use bhc_operators::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn band_input(rng: &mut impl Rng, n: usize, band: f64) -> GridFunction {
    let proto = GridFunction::zeros(-4.0, 4.0, n).unwrap();
    let mut spec = proto.spectrum();
    for i in 0..spec.len() {
        spec.bins_mut()[i] = if spec.freq(i).abs() <= band {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    spec.to_grid().unwrap()
}

fn max_rel_dev(a: &GridFunction, b: &GridFunction) -> f64 {
    let peak = a.sup_norm();
    a.samples().iter().zip(b.samples()).map(|(x, y)| (x.norm() - y.norm()).abs() / peak).fold(0.0, f64::max)
}

#[test]
fn bc_a_is_modulation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let params = OperatorParams::new(3.0, 1.0, 0).with_truncation(0.0, 1.0);
    let lambdas = [0.0, 0.5, 2.0, 5.0];
    for _ in 0..3 {
        let f = band_input(&mut rng, 256, 3.0);
        let g = band_input(&mut rng, 256, 3.0);
        let c = rng.random_range(-3.0..3.0);
        let base = bc_a(&f, &g, &params, &lambdas).unwrap();
        let moved = bc_a(&f.modulate(c), &g.modulate(c), &params, &lambdas).unwrap();
        assert!(max_rel_dev(&base, &moved) < 1e-9);
    }
}

#[test]
fn t_mk_below_trivial_bilinear_bound() {
    // |T_{m,k}| ≤ 2^{1-k}∫_{|t| ≤ 2^{k+1}} |f(x-t) g(x+t)| dt = 8·average at radius 2^{k+1}
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = band_input(&mut rng, 512, 3.0);
    let g = band_input(&mut rng, 512, 3.0);
    let budget = Budget::new(1 << 30);
    for k in [-1, 0, 1] {
        let radius = 2f64.powi(k + 1);
        let avg = bilinear_max(&f, &g, &[radius]).unwrap();
        let params = OperatorParams::new(1.5, 2.0, k);
        let lam = piecewise_constant_lambda(-4.0, 4.0, 512, 0.5, &[params.lambda_scale()]).unwrap();
        let t = t_mk(&f, &g, &params.with_lambda(lam), &budget).unwrap();
        for (z, m) in t.samples().iter().zip(avg.samples()) {
            assert!(z.norm() <= 8.0 * m.re * 1.02 + 1e-12, "k = {k}: {} > 8·{}", z.norm(), m.re);
        }
    }
}

#[test]
fn stationary_term_approaches_exact_multiplier() {
    let budget = Budget::new(1 << 28);
    let mut prev = f64::INFINITY;
    for m in [2.0, 3.0, 4.0] {
        let params = OperatorParams::new(3.0, m, 0);
        let lam = 1.5 * params.lambda_scale();
        let zeta = 3.0 * 1.5 * params.zeta_scale();
        let exact = multiplier_exact(&params, zeta, lam, &budget).unwrap();
        let stat = multiplier_stationary(&params, zeta, lam).unwrap();
        let err = (exact - stat).norm() * 2f64.powf(params.am() / 2.0);
        assert!(err < prev, "m = {m}: {err} ≥ {prev}");
        prev = err;
    }
    assert!(prev < 0.05, "{prev}");
}

#[test]
fn bilinear_max_of_constants() {
    let one = GridFunction::from_real_fn(-4.0, 4.0, 256, |_| 1.0).unwrap();
    let m = bilinear_max(&one, &one, &[0.5, 1.0]).unwrap();
    // away from the edges every average of 1·1 is 1
    assert!((m.samples()[128].re - 1.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn bc_a_is_homogeneous(alpha in 0.1f64..4.0, seed in 0u64..100) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = band_input(&mut rng, 128, 2.0);
        let g = band_input(&mut rng, 128, 2.0);
        let params = OperatorParams::new(2.0, 1.0, 0).with_truncation(0.0, 1.0);
        let base = bc_a(&f, &g, &params, &[1.0]).unwrap();
        let scaled = bc_a(&f.scale(Complex64::new(0.0, alpha)), &g, &params, &[1.0]).unwrap();
        for (x, y) in base.samples().iter().zip(scaled.samples()) {
            prop_assert!((alpha * x.re - y.re).abs() <= 1e-12 * (1.0 + y.re));
        }
    }
}
