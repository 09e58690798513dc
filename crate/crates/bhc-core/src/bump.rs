use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

/// The prototype bump `exp(1 - 1/(1 - x^2))` on `(-1, 1)`, zero elsewhere.
/// It peaks at `b(0) = 1` and is infinitely flat at `±1`.
#[inline]
pub fn bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - x * x)).exp()
    }
}

const STEP_PANELS: usize = 4096;

/// Smooth monotone step `S` with `S(s) = 0` for `s <= -1` and `S(s) = 1` for
/// `s >= 0`, the normalized primitive of `y -> b(2y + 1)`.
///
/// The primitive is tabulated on a uniform grid over `[-1, 0]` with
/// per-panel Gauss-Legendre quadrature and evaluated by cubic Hermite
/// interpolation against the exact derivative.
#[derive(Debug, Clone)]
pub struct SmoothStep {
    values: Vec<f64>,
    norm: f64,
}

impl SmoothStep {
    fn build() -> Self {
        let h = 1.0 / STEP_PANELS as f64;
        let rule = GaussLegendre::new(12.try_into().expect("nonzero degree"));
        let mut values = Vec::with_capacity(STEP_PANELS + 1);
        let mut acc = 0.0;
        values.push(0.0);
        for i in 0..STEP_PANELS {
            let a = -1.0 + i as f64 * h;
            acc += rule.integrate(a, a + h, |y| bump(2.0 * y + 1.0));
            values.push(acc);
        }
        let norm = acc;
        for v in &mut values {
            *v /= norm;
        }
        values[STEP_PANELS] = 1.0;
        Self { values, norm }
    }

    /// Shared, lazily built instance.
    pub fn global() -> &'static SmoothStep {
        static STEP: OnceLock<SmoothStep> = OnceLock::new();
        STEP.get_or_init(Self::build)
    }

    /// `∫_{-1}^{0} b(2y+1) dy`.
    pub fn normalizer(&self) -> f64 {
        self.norm
    }

    #[inline]
    pub fn derivative(&self, s: f64) -> f64 {
        bump(2.0 * s + 1.0) / self.norm
    }

    #[inline]
    pub fn eval(&self, s: f64) -> f64 {
        if s <= -1.0 {
            return 0.0;
        }
        if s >= 0.0 {
            return 1.0;
        }
        let h = 1.0 / STEP_PANELS as f64;
        let pos = (s + 1.0) * STEP_PANELS as f64;
        let i = (pos.floor() as usize).min(STEP_PANELS - 1);
        let t = pos - i as f64;
        let s0 = -1.0 + i as f64 * h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.derivative(s0) * h, self.derivative(s0 + h) * h);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * d0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * d1
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BumpKind {
    /// Even dyadic annulus bump on `1/2 < |t| < 2`; its dilates `ρ(2^{-k} t)`
    /// telescope to one.
    Rho,
    /// Even bump on `2^{-a} < |λ| < 2^a`; the dilates `ρ̃(2^{-aj} λ)`
    /// telescope to one.
    RhoTilde { a: f64 },
    /// Nonnegative L²-normalized bump supported in `[0, 1]`.
    Phi,
    /// Plateau bump supported in `[1/2, 4]`, equal to one on `[1, 3]`.
    Psi,
    /// The prototype bump on `[-1, 1]`.
    Chi,
}

/// A concrete member of one of the bump families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpFamily {
    pub kind: BumpKind,
}

impl BumpFamily {
    pub fn new(kind: BumpKind) -> Self {
        Self { kind }
    }

    pub fn rho() -> Self {
        Self::new(BumpKind::Rho)
    }

    pub fn rho_tilde(a: f64) -> Self {
        Self::new(BumpKind::RhoTilde { a })
    }

    pub fn phi() -> Self {
        Self::new(BumpKind::Phi)
    }

    pub fn psi() -> Self {
        Self::new(BumpKind::Psi)
    }

    pub fn chi() -> Self {
        Self::new(BumpKind::Chi)
    }

    /// Support as `(lo, hi, symmetric)`; symmetric supports are
    /// `[-hi, -lo] ∪ [lo, hi]`.
    pub fn support(&self) -> (f64, f64, bool) {
        match self.kind {
            BumpKind::Rho => (0.5, 2.0, true),
            BumpKind::RhoTilde { a } => (2f64.powf(-a), 2f64.powf(a), true),
            BumpKind::Phi => (0.0, 1.0, false),
            BumpKind::Psi => (0.5, 4.0, false),
            BumpKind::Chi => (-1.0, 1.0, false),
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self.kind {
            BumpKind::Rho => rho(x),
            BumpKind::RhoTilde { a } => rho_tilde(a, x),
            BumpKind::Phi => phi(x),
            BumpKind::Psi => psi(x),
            BumpKind::Chi => bump(x),
        }
    }

    /// `Σ_{k_min ≤ k ≤ k_max} ρ(2^{-k} t)` for the annulus family.
    pub fn partition_sum(&self, t: f64, k_min: i32, k_max: i32) -> f64 {
        (k_min..=k_max).map(|k| self.eval(t * 2f64.powi(-k))).sum()
    }

    /// Builds the dyadic partition of unity valid on
    /// `2^{k_min - 1} ≤ |t| ≤ 2^{k_max + 1}`.
    pub fn build_rho_partition(k_min: i32, k_max: i32) -> Self {
        assert!(k_min <= k_max, "empty scale range");
        Self::rho()
    }
}

#[inline]
fn rho(t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let s = t.abs().log2();
    if s <= -1.0 || s >= 1.0 {
        return 0.0;
    }
    let st = SmoothStep::global();
    st.eval(s) - st.eval(s - 1.0)
}

#[inline]
fn rho_tilde(a: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    let s = lambda.abs().log2() / a;
    if s <= -1.0 || s >= 1.0 {
        return 0.0;
    }
    let st = SmoothStep::global();
    st.eval(s) - st.eval(s - 1.0)
}

fn phi_norm() -> f64 {
    static NORM: OnceLock<f64> = OnceLock::new();
    *NORM.get_or_init(|| {
        let rule = GaussLegendre::new(64.try_into().expect("nonzero degree"));
        let panels = 64;
        let mut acc = 0.0;
        for i in 0..panels {
            let a = i as f64 / panels as f64;
            acc += rule.integrate(a, a + 1.0 / panels as f64, |x| bump(2.0 * x - 1.0).powi(2));
        }
        acc.sqrt()
    })
}

#[inline]
fn phi(eta: f64) -> f64 {
    if eta <= 0.0 || eta >= 1.0 {
        return 0.0;
    }
    bump(2.0 * eta - 1.0) / phi_norm()
}

#[inline]
fn psi(eta: f64) -> f64 {
    if eta <= 0.5 || eta >= 4.0 {
        return 0.0;
    }
    let st = SmoothStep::global();
    // rises on [1/2, 1], falls on [3, 4]
    st.eval(2.0 * eta - 2.0) * (1.0 - st.eval(eta - 4.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn step_limits_and_midpoint() {
        let st = SmoothStep::global();
        assert_eq!(st.eval(-1.0), 0.0);
        assert_eq!(st.eval(0.0), 1.0);
        // b(2y+1) is symmetric about y = -1/2
        assert!((st.eval(-0.5) - 0.5).abs() < 1e-13);
    }

    #[test]
    fn step_matches_direct_quadrature() {
        let st = SmoothStep::global();
        let rule = GaussLegendre::new(200.try_into().unwrap());
        for &s in &[-0.9, -0.73, -0.31, -0.05] {
            let direct = rule.integrate(-1.0, s, |y| bump(2.0 * y + 1.0)) / st.normalizer();
            assert!((st.eval(s) - direct).abs() < 1e-12, "s={s}");
        }
    }

    #[test]
    fn partition_at_one() {
        let rho = BumpFamily::build_rho_partition(-6, 6);
        assert!((rho.partition_sum(1.0, -6, 6) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn partition_between_scales_uses_two_terms() {
        let rho = BumpFamily::rho();
        let nonzero: Vec<i32> = (-6..=6).filter(|&k| rho.eval(3.0 * 2f64.powi(-k)) > 0.0).collect();
        assert_eq!(nonzero, vec![1, 2]);
        assert!((rho.eval(1.5) + rho.eval(0.75) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn partition_at_zero_vanishes() {
        assert_eq!(BumpFamily::rho().partition_sum(0.0, -6, 6), 0.0);
    }

    #[test]
    fn phi_is_l2_normalized() {
        let rule = GaussLegendre::new(400.try_into().unwrap());
        let n2 = rule.integrate(0.0, 1.0, |x| phi(x).powi(2));
        assert!((n2 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn psi_plateau() {
        for &x in &[1.0, 1.7, 2.5, 3.0] {
            assert_eq!(psi(x), 1.0);
        }
        assert_eq!(psi(0.5), 0.0);
        assert_eq!(psi(4.0), 0.0);
    }

    #[test]
    fn rho_tilde_partition() {
        let a = 3.0;
        let f = BumpFamily::rho_tilde(a);
        for &l in &[1.0, 5.0, 77.0, 1e4] {
            let s: f64 = (-4..=8).map(|j| f.eval(l * 2f64.powf(-a * j as f64))).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn bumps_vanish_outside_support(x in -10.0f64..10.0) {
            for fam in [BumpFamily::rho(), BumpFamily::rho_tilde(1.5), BumpFamily::phi(),
                        BumpFamily::psi(), BumpFamily::chi()] {
                let (lo, hi, sym) = fam.support();
                let inside = if sym { x.abs() > lo && x.abs() < hi } else { x > lo && x < hi };
                let v = fam.eval(x);
                if !inside { prop_assert_eq!(v, 0.0); }
                prop_assert!(v >= 0.0);
            }
        }

        #[test]
        fn rho_is_even(t in 0.01f64..5.0) {
            prop_assert_eq!(rho(t), rho(-t));
        }

        #[test]
        fn step_is_monotone(s in -1.2f64..0.2, ds in 0.0f64..0.1) {
            let st = SmoothStep::global();
            prop_assert!(st.eval(s + ds) >= st.eval(s) - 1e-15);
        }
    }
}
