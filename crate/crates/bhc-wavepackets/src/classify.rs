use std::collections::BTreeSet;

use bhc_core::{cis2pi, Complex64, GridFunction, TrigPoly};

use crate::gabor::gabor_coeffs;
use crate::geometry::ModelGeometry;
use crate::packets::empty_spectrum;
use crate::weight::OscWeight;
use crate::Result;

/// Thresholds for the light / uniform / clustered split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyParams {
    pub delta1: f64,
    pub mu: f64,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        Self { delta1: 0.125, mu: 0.25 }
    }
}

/// Triple `(p', n, v)`.
pub type Triple = (i64, i64, i64);

/// Disjoint split of all `(p', n, v)` triples in the windows.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Classification {
    pub light: BTreeSet<Triple>,
    pub uniform: BTreeSet<Triple>,
    pub clustered: BTreeSet<Triple>,
}

impl Classification {
    pub fn len(&self) -> usize {
        self.light.len() + self.uniform.len() + self.clustered.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of distinct `n` with some clustered `(p', n, ·)`.
    pub fn clustered_n_count(&self, p_prime: i64) -> usize {
        self.clustered.iter().filter(|t| t.0 == p_prime).map(|t| t.1).collect::<BTreeSet<_>>().len()
    }
}

/// `Σ_{u, p} ⟨f, φ̌^{u,p_r}⟩ φ̌^{u,p_r}` over the `p` window and the given
/// offsets `u`.
pub fn localized_part(f: &GridFunction, geom: &ModelGeometry, u_range: (i64, i64)) -> Result<GridFunction> {
    let fr = geom.input_frame();
    let w = geom.windows;
    let pr = (geom.p_r(w.p.0), geom.p_r(w.p.1));
    let table = gabor_coeffs(f, fr, u_range, pr)?;
    let mut spec = empty_spectrum(f)?;
    for u in u_range.0..=u_range.1 {
        for (idx, xi, env) in fr.support_bins(f, u) {
            let z: Complex64 = (pr.0..=pr.1)
                .map(|q| table.get_or_zero(u, q) * cis2pi(-(q as f64) * xi / fr.scale()))
                .sum();
            spec.bins_mut()[idx] += z * env;
        }
    }
    Ok(spec.to_grid()?)
}

fn interval_avg(lo: f64, hi: f64, nodes: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = (hi - lo) / nodes as f64;
    (0..nodes).map(|i| f(lo + (i as f64 + 0.5) * h)).sum::<f64>() / nodes as f64
}

/// Mean of `w_{k,n,v}(λ)` over `I̲_{k,r}^{p'}`, with `λ` read at the nearest
/// grid sample.
pub fn light_mass(geom: &ModelGeometry, lambda: &GridFunction, p_prime: i64, n: i64, v: i64) -> Result<f64> {
    let w = OscWeight::from_geometry(geom, n, v, lambda.clone())?;
    let (lo, hi) = geom.sub_interval(p_prime);
    Ok(interval_avg(lo, hi, 16, |x| w.majorant_at(lambda.nearest(x).re)))
}

/// Splits `(p', n, v)` into light (`𝔩`), uniform (`𝔲`) and clustered (`𝔠`).
///
/// Light: mean of `w_{k,n,v}(λ)` over `I̲^{p'}` below `2^{-δ₁ am}`.
/// Uniform: both `|f_{ℓ+1,r}|²` on `I_k^{⌊p'/N⌋_r - n}` and `|g_{ℓ-1,r}|²` on
/// `I_k^{⌊p'/N⌋_r + n}` average at most `2^{μ am/2 - k}` times their squared
/// norms. Clustered: everything else.
pub fn classify_indices(
    f: &GridFunction,
    g: &GridFunction,
    lambda: &GridFunction,
    geom: &ModelGeometry,
    params: ClassifyParams,
) -> Result<Classification> {
    f.check_same_grid(g)?;
    f.check_same_grid(lambda)?;
    let fr = localized_part(f, geom, geom.f_packet_range())?;
    let gr = localized_part(g, geom, geom.g_packet_range())?;
    let (fp, gp) = (TrigPoly::from_grid(&fr, 1e-14), TrigPoly::from_grid(&gr, 1e-14));
    let (f_norm2, g_norm2) = (fr.norm_l2().powi(2), gr.norm_l2().powi(2));
    let am = geom.am as f64;
    let light_cut = 2f64.powf(-params.delta1 * am);
    let unif_cut = 2f64.powf(params.mu * am / 2.0 - geom.k as f64);
    let nodes = 8 * geom.big_n() as usize + 16;
    let local = |p: &TrigPoly, q: i64| {
        let (lo, hi) = geom.interval(q);
        interval_avg(lo, hi, nodes, |x| p.eval(x).norm_sqr())
    };
    let w = geom.windows;
    let big_n = geom.big_n();
    let mut out = Classification::default();
    for pp in geom.p_prime_range().0..=geom.p_prime_range().1 {
        let pr = geom.p_r(pp.div_euclid(big_n));
        for n in w.n.0..=w.n.1 {
            let f_ok = local(&fp, pr - n) <= unif_cut * f_norm2;
            let g_ok = local(&gp, pr + n) <= unif_cut * g_norm2;
            for v in w.v.0..=w.v.1 {
                let t = (pp, n, v);
                if light_mass(geom, lambda, pp, n, v)? < light_cut {
                    out.light.insert(t);
                } else if f_ok && g_ok {
                    out.uniform.insert(t);
                } else {
                    out.clustered.insert(t);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_outside_band_is_light() {
        let geom = ModelGeometry::new(4.0, 4, 0, 1, 1).unwrap();
        let lam = GridFunction::from_real_fn(-8.0, 8.0, 2048, |_| 1e9).unwrap();
        assert_eq!(light_mass(&geom, &lam, 20, 3, -3).unwrap(), 0.0);
    }

    #[test]
    fn default_thresholds() {
        let p = ClassifyParams::default();
        assert_eq!((p.delta1, p.mu), (0.125, 0.25));
    }
}
