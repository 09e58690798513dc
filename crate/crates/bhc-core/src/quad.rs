use num_complex::Complex64;

use crate::{cis2pi, CoreError, Result};

/// Environment variable overriding the quadrature sample budget.
pub const BUDGET_ENV: &str = "BHC_LAB_BUDGET";
pub const DEFAULT_BUDGET: u64 = 1 << 24;

/// Upper bound on the number of samples a single quadrature may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_samples: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self { max_samples: DEFAULT_BUDGET }
    }
}

impl Budget {
    pub fn new(max_samples: u64) -> Self {
        Self { max_samples }
    }

    /// Reads [`BUDGET_ENV`], falling back to [`DEFAULT_BUDGET`].
    pub fn from_env() -> Result<Self> {
        match std::env::var(BUDGET_ENV) {
            Ok(v) => v
                .trim()
                .parse::<u64>()
                .map(Self::new)
                .map_err(|e| CoreError::InvalidArgument(format!("{BUDGET_ENV}={v}: {e}"))),
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn check(&self, requested: u64) -> Result<()> {
        if requested > self.max_samples {
            Err(CoreError::BudgetExceeded { requested, budget: self.max_samples })
        } else {
            Ok(())
        }
    }
}

/// Integration domain for [`oscillatory_integral`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscDomain {
    pub lo: f64,
    pub hi: f64,
    /// Upper bound for `|phase'|` on the domain (oscillations per unit length).
    pub phase_deriv_bound: f64,
    pub min_pts_per_period: usize,
    /// Floor on the sample count, for resolving the amplitude.
    pub min_samples: usize,
}

impl OscDomain {
    pub fn new(lo: f64, hi: f64, phase_deriv_bound: f64) -> Self {
        Self { lo, hi, phase_deriv_bound, min_pts_per_period: 8, min_samples: 256 }
    }

    pub fn with_pts_per_period(mut self, p: usize) -> Self {
        self.min_pts_per_period = p;
        self
    }

    pub fn with_min_samples(mut self, n: usize) -> Self {
        self.min_samples = n;
        self
    }

    /// Sample count used by the composite rule.
    pub fn samples(&self) -> u64 {
        let periods = (self.hi - self.lo) * self.phase_deriv_bound.abs();
        let n = (periods * self.min_pts_per_period as f64).ceil();
        (n.max(self.min_samples as f64)).max(1.0) as u64
    }
}

/// `∫ amplitude(t) e(phase(t)) dt` over the domain by the composite midpoint
/// rule with at least `min_pts_per_period` nodes per oscillation.
pub fn oscillatory_integral<A, P>(amplitude: A, phase: P, dom: &OscDomain, budget: &Budget) -> Result<Complex64>
where
    A: Fn(f64) -> Complex64,
    P: Fn(f64) -> f64,
{
    if dom.min_pts_per_period < 4 {
        return Err(CoreError::InvalidArgument("min_pts_per_period must be at least 4".into()));
    }
    if !(dom.hi >= dom.lo) {
        return Err(CoreError::InvalidArgument(format!("empty domain [{}, {}]", dom.lo, dom.hi)));
    }
    let n = dom.samples();
    budget.check(n)?;
    Ok(midpoint(&amplitude, &phase, dom.lo, dom.hi, n))
}

fn midpoint<A, P>(amplitude: &A, phase: &P, lo: f64, hi: f64, n: u64) -> Complex64
where
    A: Fn(f64) -> Complex64,
    P: Fn(f64) -> f64,
{
    let h = (hi - lo) / n as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let t = lo + (i as f64 + 0.5) * h;
        let a = amplitude(t);
        if a.re != 0.0 || a.im != 0.0 {
            acc += a * cis2pi(phase(t));
        }
    }
    acc * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bump;
    use proptest::prelude::*;

    fn one(_: f64) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn constant_integrand() {
        let v = oscillatory_integral(one, |_| 0.0, &OscDomain::new(0.0, 1.0, 0.0), &Budget::default()).unwrap();
        assert!((v - 1.0).norm() < 1e-12);
    }

    #[test]
    fn full_periods_cancel() {
        let v = oscillatory_integral(one, |t| 5.0 * t, &OscDomain::new(0.0, 1.0, 5.0), &Budget::default()).unwrap();
        assert!(v.norm() < 1e-10);
    }

    #[test]
    fn gaussian_chirp_matches_closed_form() {
        // ∫ exp(-α t²) e(t²) dt = sqrt(π / (α - 2πi))
        let alpha = 0.7;
        let v = oscillatory_integral(
            |t| Complex64::new((-alpha * t * t).exp(), 0.0),
            |t| t * t,
            &OscDomain::new(-9.0, 9.0, 18.0),
            &Budget::default(),
        )
        .unwrap();
        let z = Complex64::new(alpha, -std::f64::consts::TAU);
        let exact = (Complex64::new(std::f64::consts::PI, 0.0) / z).sqrt();
        assert!((v - exact).norm() < 1e-12, "{v} vs {exact}");
    }

    #[test]
    fn budget_is_enforced() {
        let err = oscillatory_integral(one, |t| 1e6 * t, &OscDomain::new(0.0, 1.0, 1e6), &Budget::new(1000)).unwrap_err();
        assert!(err.to_string().starts_with("budget-exceeded"));
    }

    proptest! {
        #[test]
        fn halving_step_is_stable(c in 1.0f64..40.0, w in 0.0f64..30.0) {
            let amp = |t: f64| Complex64::new(bump(2.0 * t - 1.0), 0.0);
            let ph = |t: f64| c * t * t + w * t;
            let dom = OscDomain::new(0.0, 1.0, 2.0 * c + w);
            let fine = OscDomain { min_pts_per_period: 16, min_samples: 512, ..dom };
            let a = oscillatory_integral(amp, ph, &dom, &Budget::default()).unwrap();
            let b = oscillatory_integral(amp, ph, &fine, &Budget::default()).unwrap();
            prop_assert!((a - b).norm() <= 1e-6 * b.norm().max(1e-3));
        }
    }
}
