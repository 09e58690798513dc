use std::sync::OnceLock;

use bhc_core::{cis2pi, BumpFamily, Complex64, CoreError, GridFunction, Spectrum};
use gauss_quad::GaussLegendre;

use crate::Result;

const PANEL_NODES: usize = 16;
const BASE_PANELS: usize = 64;

fn gl_on_unit(panels: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(PANEL_NODES.try_into().expect("nonzero degree"));
    let phi = BumpFamily::phi();
    let h = 1.0 / panels as f64;
    let mut out = Vec::with_capacity(panels * PANEL_NODES);
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for &(x, w) in rule.as_node_weight_pairs() {
            let eta = mid + 0.5 * h * x;
            out.push((eta, 0.5 * h * w * phi.eval(eta)));
        }
    }
    out
}

fn base_table() -> &'static [(f64, f64)] {
    static TABLE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    TABLE.get_or_init(|| gl_on_unit(BASE_PANELS))
}

/// `φ̌(y) = ∫ φ(η) e(yη) dη`, the inverse transform of the frequency bump
/// supported on `[0, 1]`.
pub fn phi_check(y: f64) -> Complex64 {
    let sum = |tab: &[(f64, f64)]| tab.iter().map(|&(eta, w)| cis2pi(y * eta) * w).sum();
    if y.abs() <= 4.0 * BASE_PANELS as f64 {
        sum(base_table())
    } else {
        sum(&gl_on_unit((y.abs() / 4.0).ceil() as usize))
    }
}

/// Scale/position label of a single packet `φ^{u,n}_{j,ℓ}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WavePacketIndex {
    pub j_scale: i32,
    pub ell: i64,
    pub u: i64,
    pub n: i64,
}

/// The family `φ^{u,n}_{j,ℓ}(ξ) = 2^{-j/2} φ(ξ/2^j - u - 2^{am/2}(ℓ-1)) e(-nξ/2^j)`
/// for fixed `am`, `j` and `ℓ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketFrame {
    pub half_am: u32,
    pub j_scale: i32,
    pub ell: i64,
}

impl PacketFrame {
    pub fn new(half_am: u32, j_scale: i32, ell: i64) -> Self {
        Self { half_am, j_scale, ell }
    }

    /// `2^{am/2}`.
    pub fn big_n(&self) -> i64 {
        1i64 << self.half_am
    }

    pub fn scale(&self) -> f64 {
        2f64.powi(self.j_scale)
    }

    /// Frequency offset `2^{am/2}(ℓ-1)` in units of `2^j`.
    pub fn shift(&self) -> f64 {
        (self.big_n() * (self.ell - 1)) as f64
    }

    pub fn index(&self, u: i64, n: i64) -> WavePacketIndex {
        WavePacketIndex { j_scale: self.j_scale, ell: self.ell, u, n }
    }

    /// Frequency support of every packet with offset `u`.
    pub fn band(&self, u: i64) -> (f64, f64) {
        let lo = self.scale() * (u as f64 + self.shift());
        (lo, lo + self.scale())
    }

    /// Envelope `2^{-j/2} φ(ξ/2^j - u - shift)` without the translation phase.
    pub fn envelope(&self, u: i64, xi: f64) -> f64 {
        let s = self.scale();
        BumpFamily::phi().eval(xi / s - u as f64 - self.shift()) / s.sqrt()
    }

    pub fn spectrum_at(&self, u: i64, n: i64, xi: f64) -> Complex64 {
        cis2pi(-(n as f64) * xi / self.scale()) * self.envelope(u, xi)
    }

    /// Closed form on the line: `2^{j/2} φ̌(2^j x - n) e((2^j x - n)(u + shift))`.
    pub fn time_at(&self, u: i64, n: i64, x: f64) -> Complex64 {
        let s = self.scale();
        let y = s * x - n as f64;
        phi_check(y) * cis2pi(y * (u as f64 + self.shift())) * s.sqrt()
    }

    pub(crate) fn check_band(&self, proto: &GridFunction, u_lo: i64, u_hi: i64) -> Result<()> {
        let (lo, _) = self.band(u_lo);
        let (_, hi) = self.band(u_hi);
        let nyq = proto.nyquist();
        if lo.abs() >= nyq || hi.abs() >= nyq {
            return Err(CoreError::BandUnrepresentable { lo, hi, nyquist: nyq }.into());
        }
        Ok(())
    }

    /// FFT bins on which packets with offset `u` are nonzero, with their
    /// envelope values.
    pub(crate) fn support_bins(&self, proto: &GridFunction, u: i64) -> Vec<(usize, f64, f64)> {
        let (lo, hi) = self.band(u);
        let d = proto.length();
        let n = proto.len() as i64;
        let (k_lo, k_hi) = ((lo * d).floor() as i64, (hi * d).ceil() as i64);
        (k_lo..=k_hi)
            .filter_map(|k| {
                let xi = k as f64 / d;
                let env = self.envelope(u, xi);
                (env > 0.0).then(|| (k.rem_euclid(n) as usize, xi, env))
            })
            .collect()
    }

    /// The periodized packet sampled on the grid of `proto`.
    pub fn on_grid(&self, proto: &GridFunction, u: i64, n: i64) -> Result<GridFunction> {
        self.check_band(proto, u, u)?;
        let mut spec = proto.spectrum();
        spec.bins_mut().iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        for (idx, xi, env) in self.support_bins(proto, u) {
            spec.bins_mut()[idx] = cis2pi(-(n as f64) * xi / self.scale()) * env;
        }
        Ok(spec.to_grid()?)
    }
}

pub(crate) fn empty_spectrum(proto: &GridFunction) -> Result<Spectrum> {
    Ok(Spectrum::from_fn(proto.left(), proto.right(), proto.len(), |_| Complex64::new(0.0, 0.0))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use bhc_core::{oscillatory_integral, Budget, OscDomain};

    #[test]
    fn phi_check_matches_quadrature_oracle() {
        let phi = BumpFamily::phi();
        for &y in &[0.0f64, 0.7, -3.2, 11.5, 40.0] {
            let dom = OscDomain::new(0.0, 1.0, y.abs()).with_min_samples(1 << 14);
            let want = oscillatory_integral(|e| Complex64::new(phi.eval(e), 0.0), |e| y * e, &dom, &Budget::new(1 << 20)).unwrap();
            assert!((phi_check(y) - want).norm() < 1e-10, "y={y}");
        }
    }

    #[test]
    fn packet_is_normalized_on_grid() {
        // 64 spectral bins per packet: Riemann-sum error near 4e-10
        let proto = GridFunction::zeros(-8.0, 8.0, 2048).unwrap();
        let fr = PacketFrame::new(2, 2, 1);
        assert!((fr.on_grid(&proto, 3, -5).unwrap().norm_l2() - 1.0).abs() < 1e-8);
        let proto = GridFunction::zeros(-32.0, 32.0, 8192).unwrap();
        assert!((fr.on_grid(&proto, 3, -5).unwrap().norm_l2() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn grid_packet_matches_closed_form() {
        let proto = GridFunction::zeros(-32.0, 32.0, 8192).unwrap();
        let fr = PacketFrame::new(2, 1, 2);
        let p = fr.on_grid(&proto, 1, 3).unwrap();
        for i in (3072..5120).step_by(37) {
            let x = proto.x(i);
            assert!((p.samples()[i] - fr.time_at(1, 3, x)).norm() < 1e-7);
        }
    }

    #[test]
    fn out_of_band_packet_rejected() {
        let proto = GridFunction::zeros(0.0, 1.0, 64).unwrap();
        let fr = PacketFrame::new(2, 3, 1);
        assert!(matches!(
            fr.on_grid(&proto, 5, 0),
            Err(crate::WpError::Core(CoreError::BandUnrepresentable { .. }))
        ));
    }
}
