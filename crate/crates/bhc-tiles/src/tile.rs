use serde::Serialize;

use crate::{Result, TileError};

/// Exact dyadic rational `mantissa · 2^exponent`, normalized to an odd
/// mantissa (zero is `0 · 2^0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Dyadic {
    pub mantissa: i64,
    pub exponent: i32,
}

impl Dyadic {
    pub fn new(mut mantissa: i64, mut exponent: i32) -> Self {
        if mantissa == 0 {
            return Self { mantissa: 0, exponent: 0 };
        }
        while mantissa % 2 == 0 {
            mantissa /= 2;
            exponent += 1;
        }
        Self { mantissa, exponent }
    }

    pub fn value(self) -> f64 {
        self.mantissa as f64 * 2f64.powi(self.exponent)
    }
}

/// `[index · 2^exp, (index + 1) · 2^exp)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DyadicInterval {
    pub exp: i32,
    pub index: i64,
}

impl DyadicInterval {
    pub fn new(index: i64, exp: i32) -> Self {
        Self { exp, index }
    }

    pub fn lo(&self) -> f64 {
        self.index as f64 * 2f64.powi(self.exp)
    }

    pub fn hi(&self) -> f64 {
        (self.index + 1) as f64 * 2f64.powi(self.exp)
    }

    pub fn len(&self) -> f64 {
        2f64.powi(self.exp)
    }

    pub fn center(&self) -> f64 {
        (self.index as f64 + 0.5) * 2f64.powi(self.exp)
    }

    pub fn endpoints(&self) -> (Dyadic, Dyadic) {
        (Dyadic::new(self.index, self.exp), Dyadic::new(self.index + 1, self.exp))
    }

    /// Dyadic ancestor `levels` generations up.
    pub fn ancestor(&self, levels: u32) -> Self {
        Self { exp: self.exp + levels as i32, index: self.index.div_euclid(1 << levels) }
    }

    pub fn contains_interval(&self, other: &Self) -> bool {
        other.exp <= self.exp && other.index.div_euclid(1 << (self.exp - other.exp)) == self.index
    }

    /// Half-open membership.
    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo() && x < self.hi()
    }

    /// Concentric dilate by `c` as a half-open real interval.
    pub fn dilate(&self, c: f64) -> (f64, f64) {
        let (m, h) = (self.center(), 0.5 * c * self.len());
        (m - h, m + h)
    }

    pub fn shifted(&self, by: i64) -> Self {
        Self { exp: self.exp, index: self.index + by }
    }
}

/// Whether two real intervals share interior points.
pub fn interiors_meet(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 < b.1 && b.0 < a.1
}

/// Tri-tile `P = P(k, ℓ, r)` of area `2^{am}`: spatial support
/// `I_P = [r 2^k, (r+1) 2^k]` and frequency blocks
/// `𝛚_{P₁} = 2^{am-k}[ℓ+1, ℓ+2]`, `𝛚_{P₂} = 2^{am-k}[ℓ-1, ℓ]`,
/// `𝛚_{P₃} = 2^{am-k}[2ℓ, 2ℓ+1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TriTile {
    pub k: i32,
    pub ell: i64,
    pub r: i64,
    pub am: u32,
}

pub fn make_tri_tile(k: i32, ell: i64, r: i64, am: u32) -> Result<TriTile> {
    if am == 0 || am % 2 == 1 {
        return Err(TileError::AmParity(am));
    }
    Ok(TriTile { k, ell, r, am })
}

impl TriTile {
    pub fn interval(&self) -> DyadicInterval {
        DyadicInterval::new(self.r, self.k)
    }

    pub fn freq_exp(&self) -> i32 {
        self.am as i32 - self.k
    }

    /// `𝛚_{P_j}` for `j ∈ {1, 2, 3}`.
    pub fn omega(&self, j: usize) -> DyadicInterval {
        let index = match j {
            1 => self.ell + 1,
            2 => self.ell - 1,
            3 => 2 * self.ell,
            _ => panic!("tile component {j} outside 1..=3"),
        };
        DyadicInterval::new(index, self.freq_exp())
    }

    pub fn area(&self, j: usize) -> f64 {
        self.interval().len() * self.omega(j).len()
    }

    /// `2^{am/2}`.
    pub fn big_n(&self) -> i64 {
        1 << (self.am / 2)
    }

    /// Rebuild the tile from its first component.
    pub fn from_p1(i: DyadicInterval, w1: DyadicInterval, am: u32) -> Result<Self> {
        make_tri_tile(i.exp, w1.index - 1, i.index, am)
    }

    /// `dist(𝛚_{P₁} × 𝛚_{P₂}, {ξ = η}) / |𝛚_{P₁}|`.
    pub fn whitney_ratio(&self) -> f64 {
        let (w1, w2) = (self.omega(1), self.omega(2));
        (w1.lo() - w2.hi()) / std::f64::consts::SQRT_2 / w1.len()
    }

    pub fn to_json(&self) -> TileJson {
        TileJson {
            k: self.k,
            ell: self.ell,
            r: self.r,
            am: self.am,
            interval: self.interval().endpoints(),
            omega: [1, 2, 3].map(|j| self.omega(j).endpoints()),
        }
    }
}

/// Serializable view of a tri-tile with exact endpoints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TileJson {
    pub k: i32,
    pub ell: i64,
    pub r: i64,
    pub am: u32,
    pub interval: (Dyadic, Dyadic),
    pub omega: [(Dyadic, Dyadic); 3],
}

/// Area-one sub-tile `s = (s₁, s₂, s₃)` of a tri-tile. The indices are
/// offsets relative to the parent: `I_{s₁}`, `I_{s₂}`, `I_{s₃}` are the cells
/// `p - n`, `p + n`, `p` of `I_P` cut into `2^{am/2}` pieces, and
/// `ω_{s₁}`, `ω_{s₂}`, `ω_{s₃}` are the cells `u - v`, `u + v`, `2u` of the
/// matching frequency blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubTile {
    pub parent: TriTile,
    pub u: i64,
    pub v: i64,
    pub n: i64,
    pub p: i64,
}

impl SubTile {
    fn space_cell(&self) -> (i32, i64) {
        let half = (self.parent.am / 2) as i32;
        (self.parent.k - half, self.parent.r * self.parent.big_n())
    }

    pub fn interval(&self, j: usize) -> DyadicInterval {
        let (exp, base) = self.space_cell();
        let off = match j {
            1 => self.p - self.n,
            2 => self.p + self.n,
            3 => self.p,
            _ => panic!("tile component {j} outside 1..=3"),
        };
        DyadicInterval::new(base + off, exp)
    }

    pub fn omega(&self, j: usize) -> DyadicInterval {
        let big_n = self.parent.big_n();
        let parent = self.parent.omega(j);
        let off = match j {
            1 => self.u - self.v,
            2 => self.u + self.v,
            3 => 2 * self.u,
            _ => panic!("tile component {j} outside 1..=3"),
        };
        DyadicInterval::new(parent.index * big_n + off, parent.exp - (self.parent.am / 2) as i32)
    }

    pub fn area(&self, j: usize) -> f64 {
        self.interval(j).len() * self.omega(j).len()
    }

    /// Translate `(a, b)` of `(I_P, 𝛚_{P_j})` whose `2^{am/2}`-refinement
    /// contains `s_j`. Every sub-tile in the standard windows lands in a
    /// translate with `a, b ∈ {-1, 0, 1}`, i.e. inside `3P_j`.
    pub fn subfamily(&self, j: usize) -> (i64, i64) {
        let big_n = self.parent.big_n();
        let i = self.interval(j).index - self.parent.interval().index * big_n;
        let w = self.omega(j).index - self.parent.omega(j).index * big_n;
        (i.div_euclid(big_n), w.div_euclid(big_n))
    }

    /// `ŝ_j = P_j`: `s_j` has `2^{-am/2}` of the parent's extent in each
    /// coordinate and sits in `3P_j`.
    pub fn refines(&self, j: usize) -> bool {
        let half = (self.parent.am / 2) as i32;
        let (a, b) = self.subfamily(j);
        self.interval(j).exp == self.parent.interval().exp - half
            && self.omega(j).exp == self.parent.omega(j).exp - half
            && a.abs() <= 1
            && b.abs() <= 1
    }
}

/// All sub-tiles with `u, v, n, p ∈ [0, width)`.
pub fn enumerate_subtiles(parent: &TriTile, width: i64) -> Result<Vec<SubTile>> {
    if parent.am == 0 || parent.am % 2 == 1 {
        return Err(TileError::AmParity(parent.am));
    }
    let w = width.max(0);
    let mut out = Vec::with_capacity((w * w * w * w) as usize);
    for u in 0..w {
        for v in 0..w {
            for n in 0..w {
                for p in 0..w {
                    out.push(SubTile { parent: *parent, u, v, n, p });
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
    fn tile_intervals_by_substitution() {
        let t = make_tri_tile(0, 0, 0, 4).unwrap();
        assert_eq!((t.interval().lo(), t.interval().hi()), (0.0, 1.0));
        assert_eq!((t.omega(1).lo(), t.omega(1).hi()), (16.0, 32.0));
        assert_eq!((t.omega(2).lo(), t.omega(2).hi()), (-16.0, 0.0));
        assert_eq!((t.omega(3).lo(), t.omega(3).hi()), (0.0, 16.0));
        let t = make_tri_tile(1, 0, 0, 4).unwrap();
        assert_eq!((t.interval().lo(), t.interval().hi()), (0.0, 2.0));
        assert_eq!((t.omega(1).lo(), t.omega(1).hi()), (8.0, 16.0));
    }

    #[test]
    fn odd_am_rejected() {
        let e = make_tri_tile(0, 0, 0, 5).unwrap_err();
        assert!(e.to_string().starts_with("am-parity"));
    }

    #[test]
    fn dyadic_normalizes() {
        assert_eq!(Dyadic::new(12, -3), Dyadic { mantissa: 3, exponent: -1 });
        assert_eq!(Dyadic::new(0, 7).value(), 0.0);
        assert_eq!(Dyadic::new(-5, -2).value(), -1.25);
    }

    #[test]
    fn ancestors_and_containment() {
        let i = DyadicInterval::new(-3, 0);
        let a = i.ancestor(2);
        assert_eq!(a, DyadicInterval::new(-1, 2));
        assert!(a.contains_interval(&i));
        assert!(!DyadicInterval::new(0, 2).contains_interval(&i));
    }

    #[test]
    fn subtile_count_at_am4() {
        let t = make_tri_tile(0, 2, 1, 4).unwrap();
        let s = enumerate_subtiles(&t, 4).unwrap();
        assert_eq!(s.len(), 256);
        assert!(s.iter().all(|s| (1..=3).all(|j| s.refines(j) && s.area(j) == 1.0)));
    }
}
