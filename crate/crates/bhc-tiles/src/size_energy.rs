use std::collections::BTreeSet;

use serde::Serialize;

use crate::tile::{DyadicInterval, TriTile};
use crate::tree::{admits, strongly_disjoint, DisjointnessRule, Tree, TreeKind};
use crate::{Result, TileError};

/// Tri-tile with its three coefficients `(a_{P₁}, a_{P₂}, a_{P₃})`.
pub type WeightedTile = (TriTile, [f64; 3]);

/// Dyadic levels above the coarsest member searched for tree tops.
pub const TOP_LEVELS: u32 = 4;

#[derive(Debug, Clone)]
struct Candidate {
    top: DyadicInterval,
    xi: f64,
    members: Vec<usize>,
}

/// Maximal `j`-lacunary trees for every candidate top: dyadic ancestors of
/// member intervals (up to [`TOP_LEVELS`] above the coarsest member) times
/// every breakpoint of the `𝛚_{P_j}` and `3𝛚_{P_j}` lattice. Membership is
/// constant between consecutive breakpoints, so the list is exhaustive for
/// these tops. Ordered by `|I_T|` descending, then left to right, then by
/// frequency; duplicates keep the lowest frequency.
fn candidates(tiles: &[TriTile], j: usize) -> Vec<Candidate> {
    if tiles.is_empty() {
        return Vec::new();
    }
    let k_max = tiles.iter().map(|t| t.k).max().unwrap_or(0);
    let tops: BTreeSet<DyadicInterval> = tiles
        .iter()
        .flat_map(|t| {
            let i = t.interval();
            (0..=(k_max - t.k) as u32 + TOP_LEVELS).map(move |l| i.ancestor(l))
        })
        .collect();
    let scale = if j == 3 { 0.5 } else { 1.0 };
    let mut xis: Vec<f64> = tiles
        .iter()
        .flat_map(|t| {
            let w = t.omega(j);
            let (lo3, hi3) = w.dilate(3.0);
            [lo3, w.lo(), w.hi(), hi3].map(|b| b * scale)
        })
        .collect();
    xis.sort_by(f64::total_cmp);
    xis.dedup();

    let mut out = Vec::new();
    let mut tops: Vec<DyadicInterval> = tops.into_iter().collect();
    tops.sort_by(|a, b| b.exp.cmp(&a.exp).then(a.index.cmp(&b.index)));
    for top in tops {
        let mut seen = BTreeSet::new();
        for &xi in &xis {
            let members: Vec<usize> =
                (0..tiles.len()).filter(|&i| admits(&tiles[i], &top, xi, j, TreeKind::Lacunary)).collect();
            if !members.is_empty() && seen.insert(members.clone()) {
                out.push(Candidate { top, xi, members });
            }
        }
    }
    out
}

fn mass(coll: &[WeightedTile], members: impl Iterator<Item = usize>, top: &DyadicInterval, j: usize) -> f64 {
    (members.map(|i| coll[i].1[j - 1].powi(2)).sum::<f64>() / top.len()).sqrt()
}

fn check_direction(j: usize) -> Result<()> {
    if (1..=3).contains(&j) {
        Ok(())
    } else {
        Err(TileError::DirectionMismatch(format!("direction {j} outside 1..=3")))
    }
}

/// `Size_j`: supremum over `j`-lacunary trees `T` inside the collection of
/// `(|I_T|^{-1} Σ_{P∈T} |a_{P_j}|²)^{1/2}`. Zero for an empty collection.
pub fn size_j(coll: &[WeightedTile], j: usize) -> Result<f64> {
    check_direction(j)?;
    let tiles: Vec<TriTile> = coll.iter().map(|t| t.0).collect();
    Ok(candidates(&tiles, j)
        .iter()
        .map(|c| mass(coll, c.members.iter().copied(), &c.top, j))
        .fold(0.0, f64::max))
}

/// Greedy `Energy_j` with the default `3I_T` strong disjointness.
pub fn energy_j(coll: &[WeightedTile], j: usize) -> Result<f64> {
    energy_j_with(coll, j, DisjointnessRule::default())
}

/// `Energy_j`: for each level `d` (descending), trees with mass above `2^d`
/// are selected greedily in candidate order, subject to strong disjointness
/// with the trees already chosen at that level. Selected tiles and the
/// overlapping trees on `I_T` and its two neighbours are removed; any
/// remaining tree still above `2^d` is discarded so that every later subtree
/// stays below the `2^{d+1}` cap. Returns `max_d 2^d (Σ |I_T|)^{1/2}`, a
/// witness-backed lower bound for the supremum.
pub fn energy_j_with(coll: &[WeightedTile], j: usize, rule: DisjointnessRule) -> Result<f64> {
    check_direction(j)?;
    let size = size_j(coll, j)?;
    if size == 0.0 {
        return Ok(0.0);
    }
    let tiles: Vec<TriTile> = coll.iter().map(|t| t.0).collect();
    let cands = candidates(&tiles, j);
    let max_top = cands.iter().map(|c| c.top.len()).fold(0.0, f64::max);
    let mut alive = vec![true; tiles.len()];
    let mut best = 0.0f64;
    let d_max = size.log2().ceil() as i32;
    for d in (d_max - 80..d_max).rev() {
        let thr = 2f64.powi(d);
        let live = alive.iter().zip(coll).filter(|(a, t)| **a && t.1[j - 1] != 0.0).count();
        if live == 0 || thr * (live as f64 * max_top).sqrt() <= best {
            break;
        }
        let mut chosen: Vec<Tree> = Vec::new();
        loop {
            let mut picked = None;
            for c in &cands {
                let members: Vec<usize> = c.members.iter().copied().filter(|&i| alive[i]).collect();
                if members.is_empty() || mass(coll, members.iter().copied(), &c.top, j) <= thr {
                    continue;
                }
                let tree = Tree::new(members.iter().map(|&i| tiles[i]).collect(), c.top, c.xi, j, TreeKind::Lacunary)?;
                let mut ok = true;
                for t in &chosen {
                    if !strongly_disjoint(t, &tree, rule)? {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    picked = Some((tree, members));
                    break;
                }
            }
            let Some((tree, members)) = picked else { break };
            for i in members {
                alive[i] = false;
            }
            for shift in [-1, 0, 1] {
                let top = tree.top().shifted(shift);
                for (i, t) in tiles.iter().enumerate() {
                    if admits(t, &top, tree.top_freq(), j, TreeKind::Overlapping) {
                        alive[i] = false;
                    }
                }
            }
            chosen.push(tree);
        }
        for c in &cands {
            if mass(coll, c.members.iter().copied().filter(|&i| alive[i]), &c.top, j) > thr {
                for &i in &c.members {
                    alive[i] = false;
                }
            }
        }
        let total: f64 = chosen.iter().map(|t| t.top().len()).sum();
        best = best.max(thr * total.sqrt());
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeEnergyReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub sizes: [f64; 3],
    pub energies: [f64; 3],
}

/// `lhs = |Σ_P |I_P|^{-1/2} a_{P₁} a_{P₂} a_{P₃}|` against
/// `rhs = Π_j Size_j^{θ_j} Energy_j^{1-θ_j}`.
pub fn check_size_energy(coll: &[WeightedTile], thetas: [f64; 3]) -> Result<SizeEnergyReport> {
    if thetas.iter().any(|t| !(0.0..1.0).contains(t)) || (thetas.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return Err(TileError::Theta(format!("{thetas:?} must lie in [0, 1) and sum to 1")));
    }
    let lhs = coll.iter().map(|(t, a)| a[0] * a[1] * a[2] / t.interval().len().sqrt()).sum::<f64>().abs();
    let mut sizes = [0.0; 3];
    let mut energies = [0.0; 3];
    let mut rhs = 1.0;
    for j in 1..=3 {
        sizes[j - 1] = size_j(coll, j)?;
        energies[j - 1] = energy_j(coll, j)?;
        rhs *= sizes[j - 1].powf(thetas[j - 1]) * energies[j - 1].powf(1.0 - thetas[j - 1]);
    }
    let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
    Ok(SizeEnergyReport { lhs, rhs, ratio, sizes, energies })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::make_tri_tile;

    #[test]
    fn empty_collection_is_zero() {
        for j in 1..=3 {
            assert_eq!(size_j(&[], j).unwrap(), 0.0);
            assert_eq!(energy_j(&[], j).unwrap(), 0.0);
        }
    }

    #[test]
    fn singleton_size_and_energy() {
        let p = make_tri_tile(1, 3, -2, 4).unwrap();
        let c = 0.7;
        let coll = [(p, [c, c, c])];
        for j in 1..=3 {
            let s = size_j(&coll, j).unwrap();
            assert!((s - c / 2f64.sqrt()).abs() < 1e-15);
            let e = energy_j(&coll, j).unwrap();
            assert!(e >= c / 2.0 && e <= c, "{e} vs {c}");
        }
    }

    #[test]
    fn theta_constraint() {
        let e = check_size_energy(&[], [0.5, 0.5, 0.5]).unwrap_err();
        assert!(e.to_string().starts_with("theta"));
        assert!(check_size_energy(&[], [1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn zero_coefficients_give_zero_lhs() {
        let p = make_tri_tile(0, 1, 0, 2).unwrap();
        let r = check_size_energy(&[(p, [0.0; 3])], [1.0 / 3.0; 3]).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.lhs <= r.rhs);
    }
}
