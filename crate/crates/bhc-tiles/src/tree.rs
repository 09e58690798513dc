use serde::Serialize;

use crate::tile::{interiors_meet, DyadicInterval, TileJson, TriTile};
use crate::{Result, TileError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeKind {
    Lacunary,
    Overlapping,
}

/// Spatial exclusion zone in the strong-disjointness implication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DisjointnessRule {
    /// `I_{P'} ∩ 3I_T = ∅`.
    #[default]
    Tripled,
    /// `I_{P'} ∩ I_T = ∅`.
    Standard,
}

/// `j`-th component of the top frequency triple `(ξ, ξ, 2ξ)`.
pub fn top_component(xi: f64, j: usize) -> f64 {
    if j == 3 {
        2.0 * xi
    } else {
        xi
    }
}

/// Whether `P` may belong to a tree with the given top data.
pub fn admits(tile: &TriTile, top: &DyadicInterval, xi: f64, j: usize, kind: TreeKind) -> bool {
    if !top.contains_interval(&tile.interval()) {
        return false;
    }
    let w = tile.omega(j);
    let x = top_component(xi, j);
    match kind {
        TreeKind::Overlapping => w.contains(x),
        TreeKind::Lacunary => {
            let (lo, hi) = w.dilate(3.0);
            x >= lo && x < hi && !w.contains(x)
        }
    }
}

/// Smallest odd `c` with `ξ_{T_j} ∈ c𝛚_{P_j}`.
pub fn lacunary_dilation(tile: &TriTile, xi: f64, j: usize) -> u32 {
    let w = tile.omega(j);
    let d = (top_component(xi, j) - w.center()).abs() / w.len();
    2 * (d + 0.5).floor() as u32 + 1
}

/// Tree with top data `(I_T, (ξ, ξ, 2ξ))` in direction `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    tiles: Vec<TriTile>,
    top: DyadicInterval,
    top_freq: f64,
    direction: usize,
    kind: TreeKind,
}

impl Tree {
    pub fn new(mut tiles: Vec<TriTile>, top: DyadicInterval, top_freq: f64, direction: usize, kind: TreeKind) -> Result<Self> {
        if !(1..=3).contains(&direction) {
            return Err(TileError::NotATree(format!("direction {direction} outside 1..=3")));
        }
        tiles.sort();
        tiles.dedup();
        if let Some(bad) = tiles.iter().find(|t| !admits(t, &top, top_freq, direction, kind)) {
            return Err(TileError::NotATree(format!("{bad:?} violates the {kind:?} condition for top {top:?}, ξ = {top_freq}")));
        }
        Ok(Self { tiles, top, top_freq, direction, kind })
    }

    /// All members of `collection` admitted by the top data.
    pub fn maximal(collection: &[TriTile], top: DyadicInterval, top_freq: f64, direction: usize, kind: TreeKind) -> Result<Self> {
        let tiles = collection.iter().copied().filter(|t| admits(t, &top, top_freq, direction, kind)).collect();
        Self::new(tiles, top, top_freq, direction, kind)
    }

    pub fn tiles(&self) -> &[TriTile] {
        &self.tiles
    }

    pub fn top(&self) -> DyadicInterval {
        self.top
    }

    pub fn top_freq(&self) -> f64 {
        self.top_freq
    }

    pub fn direction(&self) -> usize {
        self.direction
    }

    pub fn kind(&self) -> TreeKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    /// `(|I_T|^{-1} Σ_{P∈T} |a_{P_j}|²)^{1/2}`.
    pub fn mass(&self, coeff: impl Fn(&TriTile) -> f64) -> f64 {
        (self.tiles.iter().map(|t| coeff(t).powi(2)).sum::<f64>() / self.top.len()).sqrt()
    }

    pub fn to_json(&self) -> TreeJson {
        let (lo, hi) = self.top.endpoints();
        TreeJson {
            top_interval: (lo, hi),
            top_freq: self.top_freq,
            direction: self.direction,
            kind: self.kind,
            tiles: self.tiles.iter().map(TriTile::to_json).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeJson {
    pub top_interval: (crate::Dyadic, crate::Dyadic),
    pub top_freq: f64,
    pub direction: usize,
    pub kind: TreeKind,
    pub tiles: Vec<TileJson>,
}

fn implication_holds(t: &Tree, t2: &Tree, rule: DisjointnessRule) -> bool {
    let zone = match rule {
        DisjointnessRule::Tripled => t.top.dilate(3.0),
        DisjointnessRule::Standard => (t.top.lo(), t.top.hi()),
    };
    let j = t.direction;
    t.tiles.iter().all(|p| {
        t2.tiles.iter().all(|q| {
            let close = interiors_meet(p.omega(j).dilate(3.0), q.omega(j).dilate(3.0));
            let finer = p.omega(j).len() < q.omega(j).len();
            let i = q.interval();
            !(close && finer) || !interiors_meet((i.lo(), i.hi()), zone)
        })
    })
}

/// Strong disjointness of two `j`-lacunary trees, checked in both orders.
/// Trees sharing a tile are never strongly disjoint.
pub fn strongly_disjoint(t: &Tree, t2: &Tree, rule: DisjointnessRule) -> Result<bool> {
    if t.kind != TreeKind::Lacunary || t2.kind != TreeKind::Lacunary {
        return Err(TileError::DirectionMismatch("both trees must be lacunary".into()));
    }
    if t.direction != t2.direction {
        return Err(TileError::DirectionMismatch(format!("directions {} and {}", t.direction, t2.direction)));
    }
    if t.tiles.iter().any(|p| t2.tiles.binary_search(p).is_ok()) {
        return Ok(false);
    }
    Ok(implication_holds(t, t2, rule) && implication_holds(t2, t, rule))
}
