use std::collections::HashMap;

use bhc_core::{oscillatory_integral, BumpFamily, Budget, Complex64, GridFunction, OscDomain};
use bhc_operators::c_a;

use crate::geometry::ModelGeometry;
use crate::{Result, WpError};

/// `c̄_a = (-1/(c_a a'))^{a-1}`, which simplifies to `a`.
pub fn cbar_a(a: f64) -> f64 {
    let ap = a / (a - 1.0);
    (-1.0 / (c_a(a) * ap)).powf(a - 1.0)
}

/// Critical point of the phase `ν(ξ) = nξ + c_a 2^{ja'} ξ^{a'} λ^{-1/(a-1)}`
/// located by bisection on `ν'`, independent of the closed form.
pub fn critical_point_numeric(a: f64, j: f64, n: f64, lambda: f64) -> f64 {
    let ap = a / (a - 1.0);
    let dnu = |xi: f64| n + c_a(a) * ap * 2f64.powf(j * ap) * xi.powf(1.0 / (a - 1.0)) * lambda.powf(-1.0 / (a - 1.0));
    let (mut lo, mut hi) = (0.0, 1.0);
    while dnu(hi) > 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if dnu(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Data of the oscillatory weight `w^e_{k,n,v}(λ)` and its majorant.
#[derive(Debug, Clone, PartialEq)]
pub struct OscWeight {
    pub k: i32,
    pub n: i64,
    pub v: i64,
    pub m: f64,
    pub a: f64,
    pub lambda: GridFunction,
    pub cbar_a: f64,
}

impl OscWeight {
    pub fn new(a: f64, m: f64, k: i32, n: i64, v: i64, lambda: GridFunction) -> Result<Self> {
        if !(a > 1.0) || !(m > 0.0) {
            return Err(WpError::InvalidParams(format!("need a > 1 and m > 0, got a = {a}, m = {m}")));
        }
        Ok(Self { k, n, v, m, a, lambda, cbar_a: cbar_a(a) })
    }

    pub fn from_geometry(g: &ModelGeometry, n: i64, v: i64, lambda: GridFunction) -> Result<Self> {
        Self::new(g.a, g.m(), g.k, n, v, lambda)
    }

    pub fn am(&self) -> f64 {
        self.a * self.m
    }

    /// `j = am/2 - k`.
    pub fn j_scale(&self) -> f64 {
        self.am() / 2.0 - self.k as f64
    }

    /// `ρ_{am-ak}(λ)`.
    pub fn rho(&self, lambda: f64) -> f64 {
        BumpFamily::rho_tilde(self.a).eval(lambda / 2f64.powf(self.a * (self.m - self.k as f64)))
    }

    /// Correlation frequency `c̄_a n^{a-1} λ / 2^{a(am/2-k)}`.
    pub fn xi_c(&self, lambda: f64) -> f64 {
        self.cbar_a * (self.n as f64).powf(self.a - 1.0) * lambda / 2f64.powf(self.a * self.j_scale())
    }

    /// `ρ(λ) / (1 + |ξ_c + 2v|²)`.
    pub fn majorant_at(&self, lambda: f64) -> f64 {
        let d = self.xi_c(lambda) + 2.0 * self.v as f64;
        self.rho(lambda) / (1.0 + d * d)
    }

    /// `∫ φ(ξ+2v) e(nξ + c_a 2^{ja'} ξ^{a'} λ^{-1/(a-1)}) ψ(ξ/2^{am/2}) dξ`;
    /// zero for `λ ≤ 0`.
    pub fn we_at(&self, lambda: f64, budget: &Budget) -> Result<Complex64> {
        if !(lambda > 0.0) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let a = self.a;
        let ap = a / (a - 1.0);
        let big_n = 2f64.powf(self.am() / 2.0);
        let (lo, hi) = (-2.0 * self.v as f64, -2.0 * self.v as f64 + 1.0);
        let coef = c_a(a) * 2f64.powf(self.j_scale() * ap) * lambda.powf(-1.0 / (a - 1.0));
        let n = self.n as f64;
        let xmax = lo.abs().max(hi.abs());
        let bound = n.abs() + (coef * ap).abs() * xmax.powf(1.0 / (a - 1.0));
        let phi = BumpFamily::phi();
        let psi = BumpFamily::psi();
        let v2 = 2.0 * self.v as f64;
        let dom = OscDomain::new(lo, hi, bound).with_min_samples(512);
        Ok(oscillatory_integral(
            |xi| Complex64::new(phi.eval(xi + v2) * psi.eval(xi / big_n), 0.0),
            |xi| n * xi + coef * xi.abs().powf(ap),
            &dom,
            budget,
        )?)
    }
}

fn per_distinct_lambda<T: Copy>(lam: &GridFunction, mut f: impl FnMut(f64) -> Result<T>) -> Result<Vec<T>> {
    let mut cache: HashMap<u64, T> = HashMap::new();
    lam.samples()
        .iter()
        .map(|z| {
            let key = z.re.to_bits();
            if let Some(&v) = cache.get(&key) {
                return Ok(v);
            }
            let v = f(z.re)?;
            cache.insert(key, v);
            Ok(v)
        })
        .collect()
}

/// `w^e_{k,n,v}(λ)(x)` on the grid of `λ` (real part of the samples).
pub fn weight_we(w: &OscWeight, budget: &Budget) -> Result<GridFunction> {
    let vals = per_distinct_lambda(&w.lambda, |l| w.we_at(l, budget))?;
    Ok(w.lambda.with_samples(vals)?)
}

/// `ρ_{am-ak}(λ(x)) · w^e_{k,n,v}(λ)(x)`.
pub fn weighted_we(w: &OscWeight, budget: &Budget) -> Result<GridFunction> {
    let vals = per_distinct_lambda(&w.lambda, |l| {
        let r = w.rho(l);
        Ok(if r == 0.0 { Complex64::new(0.0, 0.0) } else { w.we_at(l, budget)? * r })
    })?;
    Ok(w.lambda.with_samples(vals)?)
}

/// The majorant `w_{k,n,v}(λ)(x)`.
pub fn weight_majorant(w: &OscWeight) -> Result<GridFunction> {
    let vals = per_distinct_lambda(&w.lambda, |l| Ok(Complex64::new(w.majorant_at(l), 0.0)))?;
    Ok(w.lambda.with_samples(vals)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn const_lambda(v: f64) -> GridFunction {
        GridFunction::from_real_fn(0.0, 1.0, 16, |_| v).unwrap()
    }

    #[test]
    fn cbar_equals_a() {
        for a in [1.5, 2.0, 3.0, 4.0, 5.5] {
            assert!((cbar_a(a) - a).abs() < 1e-12);
        }
    }

    #[test]
    fn cbar_matches_numeric_critical_point() {
        for &(a, j, n, lam) in &[(3.0, 2.0, 5.0, 70.0), (4.0, 1.0, 3.0, 20.0), (2.5, 3.0, 11.0, 400.0)] {
            let xi = critical_point_numeric(a, j, n, lam);
            let cbar = xi * 2f64.powf(a * j) / (n.powf(a - 1.0) * lam);
            assert!((cbar - cbar_a(a)).abs() < 1e-9 * a, "a={a}: {cbar}");
        }
    }

    #[test]
    fn zero_outside_rho_band() {
        let w = OscWeight::new(3.0, 2.0, 0, 8, -4, const_lambda(1e6)).unwrap();
        let p = weighted_we(&w, &Budget::new(1 << 22)).unwrap();
        assert_eq!(p.sup_norm(), 0.0);
    }

    #[test]
    fn majorant_equals_rho_at_correlation_point() {
        let (a, m, k, n) = (3.0, 2.0, 0, 6i64);
        let w0 = OscWeight::new(a, m, k, n, -4, const_lambda(1.0)).unwrap();
        // choose λ so that ξ_c = 8 = -2v
        let lam = 8.0 * 2f64.powf(a * w0.j_scale()) / (w0.cbar_a * (n as f64).powf(a - 1.0));
        let w = OscWeight::new(a, m, k, n, -4, const_lambda(lam)).unwrap();
        assert!((w.majorant_at(lam) - w.rho(lam)).abs() < 1e-12);
        assert!(w.rho(lam) > 0.0);
    }

    #[test]
    fn weight_bounded_by_phi_mass() {
        let w = OscWeight::new(3.0, 2.0, 0, 6, -4, const_lambda(60.0)).unwrap();
        let z = w.we_at(60.0, &Budget::new(1 << 22)).unwrap();
        assert!(z.norm() <= 1.0);
    }
}
