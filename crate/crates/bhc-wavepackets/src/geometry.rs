use bhc_core::BumpFamily;

use crate::packets::PacketFrame;
use crate::{Result, WpError};

/// Default constant in the `∼ 2^{am/2}` windows.
pub const DEFAULT_WINDOW_C: f64 = 4.0;

/// Inclusive index windows for `u, v, p, n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Windows {
    pub u: (i64, i64),
    pub v: (i64, i64),
    pub p: (i64, i64),
    pub n: (i64, i64),
}

impl Windows {
    /// `N < u ≤ 2N`, `-3N/2 < v ≤ -N/2`, `N ≤ p < 2N`, `N/c ≤ n ≤ cN`.
    pub fn standard(big_n: i64, c: f64) -> Self {
        let nf = big_n as f64;
        Self {
            u: (big_n + 1, 2 * big_n),
            v: (-(3 * big_n) / 2 + 1, -big_n / 2),
            p: (big_n, 2 * big_n - 1),
            n: (((nf / c).ceil() as i64).max(1), (c * nf).floor() as i64),
        }
    }

    fn check(&self) -> Result<()> {
        for (name, r) in [("u", self.u), ("v", self.v), ("p", self.p), ("n", self.n)] {
            if r.0 > r.1 {
                return Err(WpError::InvalidParams(format!("empty {name} window {r:?}")));
            }
        }
        Ok(())
    }
}

/// Scale data `(a, am, k, ℓ, r)` shared by the model blocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelGeometry {
    pub a: f64,
    pub am: u32,
    pub k: i32,
    pub ell: i64,
    pub r: i64,
    pub windows: Windows,
}

impl ModelGeometry {
    pub fn new(a: f64, am: u32, k: i32, ell: i64, r: i64) -> Result<Self> {
        if am == 0 || am % 2 != 0 {
            return Err(WpError::InvalidParams(format!("am = {am} must be even and positive")));
        }
        if !(a > 1.0) || !a.is_finite() {
            return Err(WpError::InvalidParams(format!("a = {a} must exceed 1")));
        }
        let big_n = 1i64 << (am / 2);
        Ok(Self { a, am, k, ell, r, windows: Windows::standard(big_n, DEFAULT_WINDOW_C) })
    }

    pub fn with_windows(mut self, windows: Windows) -> Result<Self> {
        windows.check()?;
        self.windows = windows;
        Ok(self)
    }

    pub fn half_am(&self) -> u32 {
        self.am / 2
    }

    /// `N = 2^{am/2}`.
    pub fn big_n(&self) -> i64 {
        1i64 << self.half_am()
    }

    /// `j = am/2 - k`.
    pub fn j_scale(&self) -> i32 {
        self.half_am() as i32 - self.k
    }

    pub fn m(&self) -> f64 {
        self.am as f64 / self.a
    }

    pub fn a_prime(&self) -> f64 {
        self.a / (self.a - 1.0)
    }

    /// Frame used for both input coefficient families.
    pub fn input_frame(&self) -> PacketFrame {
        PacketFrame::new(self.half_am(), self.j_scale(), self.ell)
    }

    /// Frame of the output packets `φ̌^{2u,p_r}_{j,2ℓ-1}`.
    pub fn output_frame(&self) -> PacketFrame {
        PacketFrame::new(self.half_am(), self.j_scale(), 2 * self.ell - 1)
    }

    /// `p_r = N(r-1) + p`.
    pub fn p_r(&self, p: i64) -> i64 {
        self.big_n() * (self.r - 1) + p
    }

    /// `I_k^q = [q 2^{-j}, (q+1) 2^{-j}]`.
    pub fn interval(&self, q: i64) -> (f64, f64) {
        let w = 2f64.powi(-self.j_scale());
        (q as f64 * w, (q + 1) as f64 * w)
    }

    /// Fine interval `I̲_{k,r}^{p'}` of length `2^{-(am-k)}`.
    pub fn sub_interval(&self, p_prime: i64) -> (f64, f64) {
        let w = 2f64.powi(-(self.am as i32 - self.k));
        let base = 2f64.powi(self.k) * (self.r - 1) as f64;
        (base + p_prime as f64 * w, base + (p_prime + 1) as f64 * w)
    }

    /// Range of `p'` with `⌊p'/N⌋` in the `p` window.
    pub fn p_prime_range(&self) -> (i64, i64) {
        let n = self.big_n();
        (self.windows.p.0 * n, (self.windows.p.1 + 1) * n - 1)
    }

    /// `2^{a(m-k)}`.
    pub fn lambda_scale(&self) -> f64 {
        2f64.powf(self.am as f64 - self.a * self.k as f64)
    }

    /// `ρ_{am-ak}(λ) = ρ̃_a(λ / 2^{a(m-k)})`.
    pub fn rho_lambda(&self, lambda: f64) -> f64 {
        BumpFamily::rho_tilde(self.a).eval(lambda / self.lambda_scale())
    }

    /// Frequency block `𝛚_{P₁} = 2^{am-k}[ℓ+1, ℓ+2]`.
    pub fn f_band(&self) -> (f64, f64) {
        let s = 2f64.powi(self.am as i32 - self.k);
        (s * (self.ell + 1) as f64, s * (self.ell + 2) as f64)
    }

    /// Frequency block `𝛚_{P₂} = 2^{am-k}[ℓ-1, ℓ]`.
    pub fn g_band(&self) -> (f64, f64) {
        let s = 2f64.powi(self.am as i32 - self.k);
        (s * (self.ell - 1) as f64, s * self.ell as f64)
    }

    /// Input offsets `u` whose packets meet the `f` block.
    pub fn f_packet_range(&self) -> (i64, i64) {
        let n = self.big_n();
        (2 * n - 1, 3 * n - 1)
    }

    /// Input offsets `u` whose packets meet the `g` block.
    pub fn g_packet_range(&self) -> (i64, i64) {
        (-1, self.big_n() - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_windows_at_am4() {
        let w = Windows::standard(4, 4.0);
        assert_eq!(w.u, (5, 8));
        assert_eq!(w.v, (-5, -2));
        assert_eq!(w.p, (4, 7));
        assert_eq!(w.n, (1, 16));
    }

    #[test]
    fn intervals_nest() {
        let g = ModelGeometry::new(3.0, 6, 1, 2, 3).unwrap();
        let (lo, hi) = g.interval(g.p_r(9));
        let n = g.big_n();
        let (a, _) = g.sub_interval(9 * n);
        let (_, b) = g.sub_interval(10 * n - 1);
        assert!((a - lo).abs() < 1e-15 && (b - hi).abs() < 1e-15);
    }

    #[test]
    fn band_offsets_cover_blocks() {
        let g = ModelGeometry::new(4.0, 4, 0, 3, 1).unwrap();
        let fr = g.input_frame();
        let (lo, hi) = g.f_band();
        assert!(fr.band(g.f_packet_range().0).0 <= lo && fr.band(g.f_packet_range().1).1 >= hi);
        let (lo, hi) = g.g_band();
        assert!(fr.band(g.g_packet_range().0).0 <= lo && fr.band(g.g_packet_range().1).1 >= hi);
    }

    #[test]
    fn odd_am_rejected() {
        assert!(ModelGeometry::new(3.0, 5, 0, 1, 1).is_err());
    }
}
