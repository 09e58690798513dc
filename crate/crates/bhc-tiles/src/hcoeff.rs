use std::collections::{BTreeMap, BTreeSet};

use bhc_core::{cis2pi, Budget, BumpFamily, Complex64, GridFunction};
use bhc_wavepackets::{gabor_coeffs, weighted_we, Classification, ModelGeometry, OscWeight, PacketFrame};
use rayon::prelude::*;
use serde::Serialize;

use crate::tile::{DyadicInterval, TriTile};
use crate::{Result, TileError};

/// Decay exponent of the spatial cutoff `χ̃_I`.
pub const CUTOFF_DECAY: i32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum HClass {
    #[serde(rename = "l")]
    Light,
    #[serde(rename = "u")]
    Uniform,
    #[serde(rename = "c")]
    Clustered,
}

/// Contribution of one `p'` to `h_*(P₃)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalizedHCoeff {
    #[serde(skip)]
    pub tile: TriTile,
    pub p_prime: i64,
    pub class: HClass,
    pub value: f64,
}

/// `h_*(P₃) = (Σ_{p'} value²)^{1/2}` over the entries of one class.
pub fn h_star(coeffs: &[LocalizedHCoeff], class: HClass) -> f64 {
    coeffs.iter().filter(|c| c.class == class).fold(0.0, |s, c| s + c.value * c.value).sqrt()
}

/// `Ψ_{P₃}^{p'}(x) = |I̲|^{-1/2} φ((x - lo)/|I̲|) e(c x)`: supported on the
/// fine interval `I̲_P^{p'}` and modulated to the centre `c` of `𝛚_{P₃}`.
pub fn psi_packet(geom: &ModelGeometry, tile: &TriTile, p_prime: i64, x: f64) -> Complex64 {
    let (lo, hi) = geom.sub_interval(p_prime);
    let len = hi - lo;
    let amp = BumpFamily::phi().eval((x - lo) / len) / len.sqrt();
    cis2pi(tile.omega(3).center() * x) * amp
}

fn check_match(geom: &ModelGeometry, tile: &TriTile, cls: &Classification) -> Result<()> {
    if (geom.k, geom.ell, geom.r, geom.am) != (tile.k, tile.ell, tile.r, tile.am) {
        return Err(TileError::ClassificationMismatch(format!("geometry does not describe {tile:?}")));
    }
    let w = geom.windows;
    let pp = geom.p_prime_range();
    let bad = [&cls.light, &cls.uniform, &cls.clustered].into_iter().flatten().find(|&&(p, n, v)| {
        p < pp.0 || p > pp.1 || n < w.n.0 || n > w.n.1 || v < w.v.0 || v > w.v.1
    });
    match bad {
        Some(t) => Err(TileError::ClassificationMismatch(format!("triple {t:?} outside the windows of {tile:?}"))),
        None => Ok(()),
    }
}

fn index_range(f: &GridFunction, lo: f64, hi: f64) -> Result<(usize, usize)> {
    if lo < f.left() || hi > f.right() {
        return Err(TileError::ClassificationMismatch(format!("[{lo}, {hi}] leaves the grid [{}, {}]", f.left(), f.right())));
    }
    let h = f.step();
    let a = ((lo - f.left()) / h).ceil() as usize;
    let b = (((hi - f.left()) / h).floor() as usize).min(f.len() - 1);
    Ok((a, b))
}

/// Per-`p'` pieces of `h_*(P₃)` for each class, where
/// `h_*(P₃)² = 2^{-am/2} Σ_{(n,v,p')∈*} |⟨h ρ_{|P|}(λ) w^e_{k,n,v}(λ), Ψ_{P₃}^{p'}⟩|²`.
pub fn localized_h_coeffs(
    h: &GridFunction,
    lambda: &GridFunction,
    geom: &ModelGeometry,
    tile: &TriTile,
    cls: &Classification,
    budget: &Budget,
) -> Result<Vec<LocalizedHCoeff>> {
    check_match(geom, tile, cls)?;
    h.check_same_grid(lambda)?;
    let classes = [(HClass::Light, &cls.light), (HClass::Uniform, &cls.uniform), (HClass::Clustered, &cls.clustered)];
    let mut by_nv: BTreeMap<(i64, i64), Vec<(HClass, i64)>> = BTreeMap::new();
    for (c, set) in classes {
        for &(p, n, v) in set.iter() {
            by_nv.entry((n, v)).or_default().push((c, p));
        }
    }
    let p_primes: BTreeSet<i64> = by_nv.values().flatten().map(|x| x.1).collect();
    let mut ranges = BTreeMap::new();
    for &p in &p_primes {
        let (lo, hi) = geom.sub_interval(p);
        ranges.insert(p, index_range(h, lo, hi)?);
    }
    let step = h.step();
    let jobs: Vec<_> = by_nv.into_iter().collect();
    let parts: Vec<Vec<(HClass, i64, f64)>> = jobs
        .par_iter()
        .map(|((n, v), entries)| {
            let w = OscWeight::from_geometry(geom, *n, *v, lambda.clone())?;
            let rw = weighted_we(&w, budget)?;
            Ok(entries
                .iter()
                .map(|&(c, p)| {
                    let (a, b) = ranges[&p];
                    let z: Complex64 = (a..=b)
                        .map(|i| h.samples()[i] * rw.samples()[i] * psi_packet(geom, tile, p, h.x(i)).conj())
                        .sum::<Complex64>()
                        * step;
                    (c, p, z.norm_sqr())
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let norm = 2f64.powf(-(geom.am as f64) / 2.0);
    let mut acc: BTreeMap<(HClass, i64), f64> = BTreeMap::new();
    for (c, p, s) in parts.into_iter().flatten() {
        *acc.entry((c, p)).or_default() += s * norm;
    }
    Ok(acc
        .into_iter()
        .map(|((class, p_prime), s)| LocalizedHCoeff { tile: *tile, p_prime, class, value: s.sqrt() })
        .collect())
}

/// Tile coefficient `f(P₁)` (`j = 1`) or `g(P₂)` (`j = 2`): the `ℓ²` norm of
/// the area-one packet coefficients of the function inside `I_P × 𝛚_{P_j}`.
pub fn tile_coefficient(f: &GridFunction, tile: &TriTile, j: usize) -> Result<f64> {
    let big_n = tile.big_n();
    let u = match j {
        1 => (2 * big_n, 3 * big_n - 1),
        2 => (0, big_n - 1),
        _ => return Err(TileError::DirectionMismatch(format!("tile coefficients use j ∈ {{1, 2}}, got {j}"))),
    };
    let frame = PacketFrame::new(tile.am / 2, (tile.am / 2) as i32 - tile.k, tile.ell);
    let n = (tile.r * big_n, (tile.r + 1) * big_n - 1);
    Ok(gabor_coeffs(f, frame, u, n)?.energy().sqrt())
}

/// `χ̃_I(x) = (1 + dist(x, I)/|I|)^{-10}`.
pub fn cutoff(i: &DyadicInterval, x: f64) -> f64 {
    let d = (i.lo() - x).max(x - i.hi()).max(0.0);
    (1.0 + d / i.len()).powi(-CUTOFF_DECAY)
}

/// `|I|^{-1/2} ‖f χ̃_I‖_{L²}`.
pub fn local_l2(f: &GridFunction, i: &DyadicInterval) -> f64 {
    let s: f64 = f.samples().iter().enumerate().map(|(k, z)| z.norm_sqr() * cutoff(i, f.x(k)).powi(2)).sum();
    (s * f.step() / i.len()).sqrt()
}

pub fn local_l2_sup(f: &GridFunction, intervals: &[DyadicInterval]) -> f64 {
    intervals.iter().map(|i| local_l2(f, i)).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_is_normalized_and_supported() {
        let geom = ModelGeometry::new(3.0, 4, 0, 1, 1).unwrap();
        let tile = TriTile { k: 0, ell: 1, r: 1, am: 4 };
        let p = geom.p_prime_range().0 + 3;
        let (lo, hi) = geom.sub_interval(p);
        let f = GridFunction::from_fn(lo - 0.1, hi + 0.1, 8192, |x| psi_packet(&geom, &tile, p, x)).unwrap();
        assert!((f.norm_l2() - 1.0).abs() < 1e-6);
        assert_eq!(psi_packet(&geom, &tile, p, hi + 1e-9).norm(), 0.0);
    }

    #[test]
    fn cutoff_is_one_inside() {
        let i = DyadicInterval::new(1, 0);
        assert_eq!(cutoff(&i, 1.5), 1.0);
        assert!((cutoff(&i, 3.0) - 2f64.powi(-10)).abs() < 1e-18);
    }

    #[test]
    fn local_l2_of_constant() {
        let f = GridFunction::from_real_fn(-64.0, 64.0, 1 << 16, |_| 1.0).unwrap();
        let v = local_l2(&f, &DyadicInterval::new(0, 0));
        // ∫(1+|d|)^{-20} over both sides plus the unit interval: 1 + 2/19.
        assert!((v - (1.0f64 + 2.0 / 19.0).sqrt()).abs() < 1e-3);
    }
}
