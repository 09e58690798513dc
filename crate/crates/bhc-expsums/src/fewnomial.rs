use serde::Serialize;

use crate::{ExpSumError, Result};

/// Width to which every bracketed root is refined.
pub const ROOT_TOL: f64 = 1e-12;
/// Relative threshold below which a fewnomial is treated as vanishing identically.
pub const PLATEAU_TOL: f64 = 1e-12;
/// Default number of grid points for the level-set measurement.
pub const LEVEL_SET_SAMPLES: usize = 100_000;

/// `F(x) = Σ a_k (x + α_k)^d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fewnomial {
    pub d: f64,
    pub terms: Vec<(f64, f64)>,
    pub domain: (f64, f64),
}

/// `x^d`, with the odd extension `sign(x)|x|^d` for non-integer `d`.
pub fn signed_pow(x: f64, d: f64) -> f64 {
    if d.fract() == 0.0 && d.abs() < i32::MAX as f64 {
        x.powi(d as i32)
    } else {
        x.signum() * x.abs().powf(d)
    }
}

fn is_integer(d: f64) -> bool {
    d.fract() == 0.0
}

impl Fewnomial {
    /// Builds `F`, rejecting repeated shifts and, for non-integer `d`, any
    /// domain point where some `x + α_k` is not positive.
    pub fn new(d: f64, terms: Vec<(f64, f64)>, domain: (f64, f64)) -> Result<Self> {
        if d == 0.0 || !d.is_finite() {
            return Err(ExpSumError::InvalidFewnomial(format!("exponent d = {d}")));
        }
        if terms.is_empty() {
            return Err(ExpSumError::InvalidFewnomial("no terms".into()));
        }
        for (i, &(_, ai)) in terms.iter().enumerate() {
            if terms[..i].iter().any(|&(_, aj)| aj == ai) {
                return Err(ExpSumError::InvalidFewnomial(format!("repeated shift {ai}")));
            }
        }
        if !(domain.0 < domain.1) {
            return Err(ExpSumError::Domain(format!("empty domain [{}, {}]", domain.0, domain.1)));
        }
        if !is_integer(d) {
            if let Some(&(_, a)) = terms.iter().find(|&&(_, a)| domain.0 + a <= 0.0) {
                return Err(ExpSumError::Domain(format!("x + {a} is not positive at x = {}", domain.0)));
            }
        }
        Ok(Self { d, terms, domain })
    }

    /// Like [`Fewnomial::new`] but sums the coefficients of equal shifts and
    /// drops zero coefficients. Returns `None` when nothing survives.
    pub fn merged(d: f64, terms: &[(f64, f64)], domain: (f64, f64)) -> Result<Option<Self>> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for &(c, a) in terms {
            match out.iter_mut().find(|(_, b)| *b == a) {
                Some(t) => t.0 += c,
                None => out.push((c, a)),
            }
        }
        out.retain(|&(c, _)| c != 0.0);
        if out.is_empty() {
            return Ok(None);
        }
        Self::new(d, out, domain).map(Some)
    }

    pub fn n(&self) -> usize {
        self.terms.len()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|&(c, a)| c * signed_pow(x + a, self.d)).sum()
    }

    /// `F'` as a fewnomial of exponent `d - 1`; `None` when `d = 1`.
    pub fn derivative(&self) -> Option<Self> {
        if self.d == 1.0 {
            return None;
        }
        let terms = self.terms.iter().map(|&(c, a)| (c * self.d, a)).collect();
        Some(Self { d: self.d - 1.0, terms, domain: self.domain })
    }

    /// Magnitude of the individual terms, used to decide whether `F` is a plateau.
    pub fn scale(&self, lo: f64, hi: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(c, a)| c.abs() * signed_pow(lo + a, self.d).abs().max(signed_pow(hi + a, self.d).abs()))
            .sum()
    }

    fn check_interval(&self, lo: f64, hi: f64) -> Result<()> {
        if lo < self.domain.0 || hi > self.domain.1 || !(lo < hi) {
            return Err(ExpSumError::Domain(format!(
                "[{lo}, {hi}] is not inside [{}, {}]",
                self.domain.0, self.domain.1
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroCount {
    pub zeros: usize,
    pub roots: Vec<f64>,
    /// `F` stayed below the plateau threshold on the whole grid.
    pub degenerate: bool,
}

fn bisect(f: &Fewnomial, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f.eval(lo);
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        let fm = f.eval(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Counts the sign changes of `F` on a uniform grid of `grid_n` points over
/// `interval` and refines each by bisection. Grid points where `F` is exactly
/// zero count as one root.
pub fn count_zeros(f: &Fewnomial, interval: (f64, f64), grid_n: usize) -> Result<ZeroCount> {
    let (lo, hi) = interval;
    f.check_interval(lo, hi)?;
    let n = grid_n.max(2);
    let xs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let vals: Vec<f64> = xs.iter().map(|&x| f.eval(x)).collect();
    let scale = f.scale(lo, hi);
    let degenerate = vals.iter().all(|v| v.abs() < PLATEAU_TOL * scale.max(f64::MIN_POSITIVE));
    if degenerate {
        return Ok(ZeroCount { zeros: 0, roots: Vec::new(), degenerate: true });
    }
    let mut roots = Vec::new();
    let mut last_sign = 0.0;
    for i in 0..n {
        let v = vals[i];
        if v == 0.0 {
            roots.push(xs[i]);
            last_sign = 0.0;
            continue;
        }
        let s = v.signum();
        if last_sign != 0.0 && s != last_sign {
            roots.push(bisect(f, xs[i - 1], xs[i]));
        }
        last_sign = s;
    }
    Ok(ZeroCount { zeros: roots.len(), roots, degenerate: false })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LevelSetBoundKind {
    /// Integer `d < n - 1`, bound through `‖F‖_∞`.
    Lagrange,
    /// All other exponents, bound `K(F) η^{1/(n-1)}`.
    Inductive,
    /// Fewer than two terms; no bound is claimed.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSetReport {
    pub measure: f64,
    pub bound: f64,
    pub kind: LevelSetBoundKind,
    pub sup_norm: f64,
}

impl LevelSetReport {
    pub fn ratio(&self) -> f64 {
        if self.bound == 0.0 {
            if self.measure == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            self.measure / self.bound
        }
    }
}

/// `K(F) = 3^{2|d|+2n+10} / (|a_n| Π_{j<n} |d-j+1| |α_n-α_j|)^{1/(n-1)}`.
pub fn k_constant(f: &Fewnomial) -> f64 {
    let n = f.n();
    if n < 2 {
        return f64::INFINITY;
    }
    let (an, alpha_n) = f.terms[n - 1];
    let mut prod = an.abs();
    for j in 1..n {
        prod *= (f.d - j as f64 + 1.0).abs() * (alpha_n - f.terms[j - 1].1).abs();
    }
    let num_log = (2.0 * f.d.abs() + 2.0 * n as f64 + 10.0) * 3f64.ln();
    (num_log - prod.ln() / (n - 1) as f64).exp()
}

/// Measures `|{x ∈ interval : |F(x)| < η}|` on a midpoint grid of at least
/// 10⁴ points and pairs it with the level-set bound.
pub fn level_set_measure(f: &Fewnomial, eta: f64, interval: (f64, f64), samples: usize) -> Result<LevelSetReport> {
    let (lo, hi) = interval;
    f.check_interval(lo, hi)?;
    let n = samples.max(10_000);
    let h = (hi - lo) / n as f64;
    let mut hits = 0usize;
    let mut sup: f64 = 0.0;
    for i in 0..n {
        let v = f.eval(lo + (i as f64 + 0.5) * h).abs();
        sup = sup.max(v);
        if v < eta {
            hits += 1;
        }
    }
    sup = sup.max(f.eval(lo).abs()).max(f.eval(hi).abs());
    let measure = hits as f64 * h;
    let nt = f.n();
    let (kind, bound) = if nt < 2 {
        (LevelSetBoundKind::None, f64::INFINITY)
    } else if is_integer(f.d) && f.d > 0.0 && f.d < (nt - 1) as f64 {
        let d = f.d;
        (LevelSetBoundKind::Lagrange, 100.0 * d * d * (eta / sup).powf(1.0 / d))
    } else {
        (LevelSetBoundKind::Inductive, k_constant(f) * eta.powf(1.0 / (nt - 1) as f64))
    };
    Ok(LevelSetReport { measure, bound, kind, sup_norm: sup })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signed_pow_integer_and_odd() {
        assert_eq!(signed_pow(-2.0, 3.0), -8.0);
        assert_eq!(signed_pow(-2.0, 2.0), 4.0);
        assert!((signed_pow(-4.0, 0.5) + 2.0).abs() < 1e-15);
    }

    #[test]
    fn repeated_shift_rejected() {
        assert!(Fewnomial::new(2.0, vec![(1.0, 0.1), (2.0, 0.1)], (1.0, 2.0)).is_err());
    }

    #[test]
    fn merged_cancels() {
        let f = Fewnomial::merged(2.0, &[(1.0, 0.1), (-1.0, 0.1)], (1.0, 2.0)).unwrap();
        assert!(f.is_none());
    }

    #[test]
    fn fractional_domain_checked() {
        assert!(Fewnomial::new(1.5, vec![(1.0, -1.5)], (1.0, 2.0)).is_err());
        assert!(Fewnomial::new(2.0, vec![(1.0, -1.5)], (1.0, 2.0)).is_ok());
    }

    #[test]
    fn simple_root_found() {
        let f = Fewnomial::new(1.0, vec![(1.0, -1.25)], (1.0, 2.0)).unwrap();
        let z = count_zeros(&f, (1.0, 2.0), 101).unwrap();
        assert_eq!(z.zeros, 1);
        assert!((z.roots[0] - 1.25).abs() < 1e-12);
    }

    #[test]
    fn derivative_shape() {
        let f = Fewnomial::new(3.0, vec![(2.0, 0.0)], (1.0, 2.0)).unwrap();
        let g = f.derivative().unwrap();
        assert_eq!(g.d, 2.0);
        assert_eq!(g.terms, vec![(6.0, 0.0)]);
    }
}
