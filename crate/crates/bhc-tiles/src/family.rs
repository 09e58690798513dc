use std::collections::BTreeMap;

use rand::Rng;

use crate::size_energy::{WeightedTile, TOP_LEVELS};
use crate::tile::{DyadicInterval, TriTile};

/// Split a family into subfamilies whose distinct scales differ by at least
/// two and whose frequency indices at each scale are three apart.
pub fn split_sparse(tiles: &[TriTile]) -> Vec<Vec<TriTile>> {
    let mut groups: BTreeMap<(i32, i64), Vec<TriTile>> = BTreeMap::new();
    for t in tiles {
        groups.entry((t.k.rem_euclid(2), t.ell.rem_euclid(3))).or_default().push(*t);
    }
    groups.into_values().collect()
}

/// Whether distinct scales in the family differ by at least two.
pub fn is_scale_sparse(tiles: &[TriTile]) -> bool {
    let mut ks: Vec<i32> = tiles.iter().map(|t| t.k).collect();
    ks.sort();
    ks.dedup();
    ks.windows(2).all(|w| w[1] - w[0] >= 2)
}

/// Random scale-sparse collection of at most `max_tiles` distinct tiles with
/// scales in `{-2, 0, 2}`, nearby positions and frequencies, and coefficients
/// uniform in `[0, 1)`.
pub fn random_collection(rng: &mut impl Rng, max_tiles: usize, am: u32) -> Vec<WeightedTile> {
    let count = rng.random_range(1..=max_tiles.max(1));
    let mut seen = BTreeMap::new();
    for _ in 0..count {
        let k = 2 * rng.random_range(-1..=1);
        let span = 1i64 << (3 - k).max(0);
        let r = rng.random_range(0..span);
        let ell = rng.random_range(0..8);
        let tile = TriTile { k, ell, r, am };
        seen.entry(tile).or_insert_with(|| [rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>()]);
    }
    seen.into_iter().collect()
}

/// Spatial intervals `𝓘`: member intervals and every candidate tree top.
pub fn spatial_intervals(tiles: &[TriTile]) -> Vec<DyadicInterval> {
    let k_max = tiles.iter().map(|t| t.k).max().unwrap_or(0);
    let mut out: Vec<DyadicInterval> = tiles
        .iter()
        .flat_map(|t| (0..=(k_max - t.k) as u32 + TOP_LEVELS).map(move |l| t.interval().ancestor(l)))
        .collect();
    out.sort();
    out.dedup();
    out
}
