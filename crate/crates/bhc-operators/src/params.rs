use bhc_core::{Complex64, GridFunction};

use crate::{OpError, Result};

/// How `t^a` is read for negative `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PowerBranch {
    /// `|t|^a`
    #[default]
    Abs,
    /// `sgn(t)|t|^a`
    Signed,
}

impl PowerBranch {
    #[inline]
    pub fn pow(self, t: f64, a: f64) -> f64 {
        let p = t.abs().powf(a);
        match self {
            PowerBranch::Abs => p,
            PowerBranch::Signed => p.copysign(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorParams {
    pub a: f64,
    pub m: f64,
    pub k: i32,
    /// Real-valued stopping time `λ(x)`; only the real parts are used.
    pub lambda: Option<GridFunction>,
    pub eps_trunc: f64,
    pub r_trunc: f64,
    pub branch: PowerBranch,
}

impl OperatorParams {
    pub fn new(a: f64, m: f64, k: i32) -> Self {
        Self { a, m, k, lambda: None, eps_trunc: 0.0, r_trunc: f64::INFINITY, branch: PowerBranch::Abs }
    }

    pub fn with_lambda(mut self, lambda: GridFunction) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn with_truncation(mut self, eps: f64, r: f64) -> Self {
        self.eps_trunc = eps;
        self.r_trunc = r;
        self
    }

    pub fn with_branch(mut self, branch: PowerBranch) -> Self {
        self.branch = branch;
        self
    }

    /// `a' = a/(a-1)`.
    pub fn a_prime(&self) -> f64 {
        self.a / (self.a - 1.0)
    }

    /// The product `a·m`.
    pub fn am(&self) -> f64 {
        self.a * self.m
    }

    /// `2^{a(m-k)}`, the center of the λ band of `T_{m,k}`.
    pub fn lambda_scale(&self) -> f64 {
        2f64.powf(self.a * (self.m - self.k as f64))
    }

    /// `2^{am-k}`, the center of the ζ band of `𝔐_{m,k}`.
    pub fn zeta_scale(&self) -> f64 {
        2f64.powf(self.am() - self.k as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0) {
            return Err(OpError::params(format!("a must be positive, got {}", self.a)));
        }
        if !(self.eps_trunc < self.r_trunc) {
            return Err(OpError::params("eps_trunc must be below r_trunc"));
        }
        Ok(())
    }

    pub(crate) fn lambda_on(&self, grid: &GridFunction) -> Result<&GridFunction> {
        let lam = self.lambda.as_ref().ok_or_else(|| OpError::params("λ(x) is required"))?;
        grid.check_same_grid(lam)?;
        Ok(lam)
    }
}

/// Stopping time that is constant on consecutive cells of length `cell`
/// starting at `left`, taking `values[c]` on cell `c` (cycled if short).
pub fn piecewise_constant_lambda(
    left: f64,
    right: f64,
    n: usize,
    cell: f64,
    values: &[f64],
) -> Result<GridFunction> {
    if values.is_empty() || !(cell > 0.0) {
        return Err(OpError::params("need a positive cell length and at least one value"));
    }
    Ok(GridFunction::from_fn(left, right, n, |x| {
        let c = ((x - left) / cell).floor().max(0.0) as usize;
        Complex64::new(values[c % values.len()], 0.0)
    })?)
}
