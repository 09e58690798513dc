//! Numerical foundations shared by every other crate in the workspace.
//!
//! Every complex exponential is written in the `e(A) = exp(2πiA)` convention
//! and goes through [`cis2pi`].

mod bump;
mod error;
mod grid;
mod project;
mod quad;

pub use bump::{bump, BumpFamily, BumpKind, SmoothStep};
pub use error::CoreError;
pub use grid::{GridFunction, Spectrum, TrigPoly};
pub use project::{freq_project, Window};
pub use quad::{oscillatory_integral, Budget, OscDomain, BUDGET_ENV, DEFAULT_BUDGET};

pub use num_complex::Complex64;

/// `exp(2πi a)`, with the argument reduced to `[-1/2, 1/2]` first so large
/// phases keep full relative accuracy in the fractional part.
#[inline]
pub fn cis2pi(a: f64) -> Complex64 {
    let r = a - a.round();
    let (s, c) = (std::f64::consts::TAU * r).sin_cos();
    Complex64::new(c, s)
}

pub type Result<T> = std::result::Result<T, CoreError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cis2pi_integers_are_one() {
        for k in -5..=5 {
            let z = cis2pi(k as f64 * 1e6);
            assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn cis2pi_quarter() {
        let z = cis2pi(0.25);
        assert!((z - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }
}
