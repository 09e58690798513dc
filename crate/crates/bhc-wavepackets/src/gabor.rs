use std::fmt::Write as _;

use bhc_core::{cis2pi, Complex64, GridFunction};
use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::packets::{empty_spectrum, PacketFrame};
use crate::{Result, WpError};

/// Relative eigenvalue floor used when inverting the Gram matrix.
pub const TIKHONOV_FLOOR: f64 = 1e-12;

/// Coefficients `⟨f, φ̌^{u,n}⟩` over a rectangular window of `(u, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    frame: PacketFrame,
    u_range: (i64, i64),
    n_range: (i64, i64),
    coeffs: Vec<Complex64>,
}

impl CoefficientTable {
    pub fn frame(&self) -> PacketFrame {
        self.frame
    }

    /// Inclusive `u` bounds.
    pub fn u_range(&self) -> (i64, i64) {
        self.u_range
    }

    /// Inclusive `n` bounds.
    pub fn n_range(&self) -> (i64, i64) {
        self.n_range
    }

    fn width(&self) -> usize {
        (self.n_range.1 - self.n_range.0 + 1) as usize
    }

    /// Coefficient at `(u, n)`, or `None` outside the window.
    pub fn get(&self, u: i64, n: i64) -> Option<Complex64> {
        let inside = (self.u_range.0..=self.u_range.1).contains(&u) && (self.n_range.0..=self.n_range.1).contains(&n);
        inside.then(|| self.coeffs[(u - self.u_range.0) as usize * self.width() + (n - self.n_range.0) as usize])
    }

    /// Coefficient at `(u, n)`, zero outside the window.
    pub fn get_or_zero(&self, u: i64, n: i64) -> Complex64 {
        self.get(u, n).unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, i64, Complex64)> + '_ {
        let w = self.width();
        self.coeffs.iter().enumerate().map(move |(i, &c)| {
            (self.u_range.0 + (i / w) as i64, self.n_range.0 + (i % w) as i64, c)
        })
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Columnar CSV `u,n,re,im`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("u,n,re,im\n");
        for (u, n, c) in self.iter() {
            let _ = writeln!(out, "{u},{n},{:.16e},{:.16e}", c.re, c.im);
        }
        out
    }
}

fn check_range(name: &str, r: (i64, i64)) -> Result<()> {
    if r.0 > r.1 {
        return Err(WpError::InvalidParams(format!("empty {name} range {r:?}")));
    }
    Ok(())
}

/// `⟨f, φ̌^{u,n}⟩` for every `(u, n)` in the window, summed directly over
/// each packet's spectral support.
pub fn gabor_coeffs(f: &GridFunction, frame: PacketFrame, u_range: (i64, i64), n_range: (i64, i64)) -> Result<CoefficientTable> {
    check_range("u", u_range)?;
    check_range("n", n_range)?;
    frame.check_band(f, u_range.0, u_range.1)?;
    let spec = f.spectrum();
    let d = f.length();
    let s = frame.scale();
    let mut coeffs = Vec::new();
    for u in u_range.0..=u_range.1 {
        let bins = frame.support_bins(f, u);
        for n in n_range.0..=n_range.1 {
            let c: Complex64 = bins
                .iter()
                .map(|&(idx, xi, env)| spec.bins()[idx] * cis2pi(n as f64 * xi / s) * env)
                .sum();
            coeffs.push(c / d);
        }
    }
    Ok(CoefficientTable { frame, u_range, n_range, coeffs })
}

/// Canonical dual of a finite packet window, `A* (A A*)^+`. Gram eigenvalues
/// below `TIKHONOV_FLOOR·λ_max` are dropped from the pseudo-inverse.
#[derive(Debug, Clone)]
pub struct DualFrame {
    frame: PacketFrame,
    u_range: (i64, i64),
    n_range: (i64, i64),
    proto: GridFunction,
    pinv: DMatrix<Complex64>,
    eigenvalues: Vec<f64>,
}

impl DualFrame {
    pub fn new(proto: &GridFunction, frame: PacketFrame, u_range: (i64, i64), n_range: (i64, i64)) -> Result<Self> {
        check_range("u", u_range)?;
        check_range("n", n_range)?;
        frame.check_band(proto, u_range.0, u_range.1)?;
        let us: Vec<i64> = (u_range.0..=u_range.1).collect();
        let ns: Vec<i64> = (n_range.0..=n_range.1).collect();
        let supports: Vec<_> = us.iter().map(|&u| frame.support_bins(proto, u)).collect();
        let k = us.len() * ns.len();
        let d = proto.length();
        let s = frame.scale();
        let mut gram = DMatrix::<Complex64>::zeros(k, k);
        // G[i, i'] = ⟨φ_{i'}, φ_i⟩ = (1/D) Σ_κ φ_{i'}(κ) conj φ_i(κ)
        for (a, sa) in supports.iter().enumerate() {
            for (b, sb) in supports.iter().enumerate() {
                let shared: Vec<(f64, f64)> = sa
                    .iter()
                    .filter_map(|&(ia, xi, ea)| sb.iter().find(|e| e.0 == ia).map(|&(_, _, eb)| (xi, ea * eb)))
                    .collect();
                if shared.is_empty() {
                    continue;
                }
                for (p, &n) in ns.iter().enumerate() {
                    for (q, &n2) in ns.iter().enumerate() {
                        let z: Complex64 =
                            shared.iter().map(|&(xi, w)| cis2pi((n - n2) as f64 * xi / s) * w).sum();
                        gram[(a * ns.len() + p, b * ns.len() + q)] = z / d;
                    }
                }
            }
        }
        let eig = SymmetricEigen::new(gram);
        let lmax = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
        let tau = TIKHONOV_FLOOR * lmax;
        let filt = DVector::from_iterator(
            k,
            eig.eigenvalues.iter().map(|&l| Complex64::new(if l > tau { 1.0 / l } else { 0.0 }, 0.0)),
        );
        let v = &eig.eigenvectors;
        let pinv = v * DMatrix::from_diagonal(&filt) * v.adjoint();
        let mut eigenvalues: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
        eigenvalues.sort_by(f64::total_cmp);
        Ok(Self { frame, u_range, n_range, proto: proto.clone(), pinv, eigenvalues })
    }

    /// Sorted Gram eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Smallest and largest Gram eigenvalue above `rel_floor·λ_max`; these
    /// are the frame bounds on the span of the window.
    pub fn frame_bounds(&self, rel_floor: f64) -> (f64, f64) {
        let lmax = self.eigenvalues.last().copied().unwrap_or(0.0);
        let lmin = self.eigenvalues.iter().copied().find(|&l| l > rel_floor * lmax).unwrap_or(0.0);
        (lmin, lmax)
    }

    /// Diagonal symbol `Σ_u φ(ξ/2^j - u - shift)²` of the frame operator when
    /// the `n` window covers a full period `D·2^j`.
    pub fn frame_symbol(&self, xi: f64) -> f64 {
        let s = self.frame.scale();
        (self.u_range.0..=self.u_range.1).map(|u| self.frame.envelope(u, xi).powi(2) * s).sum()
    }
}

/// `Σ_i (G^+ c)_i φ̌_i`: the orthogonal projection of the analysed signal
/// onto the span of the window.
pub fn gabor_reconstruct(table: &CoefficientTable, dual: &DualFrame) -> Result<GridFunction> {
    if table.frame != dual.frame || table.u_range != dual.u_range || table.n_range != dual.n_range {
        return Err(WpError::RangeMismatch);
    }
    let c = DVector::from_column_slice(&table.coeffs);
    let dvec = &dual.pinv * c;
    let mut spec = empty_spectrum(&dual.proto)?;
    let s = dual.frame.scale();
    let w = table.width();
    for (a, u) in (table.u_range.0..=table.u_range.1).enumerate() {
        for (idx, xi, env) in dual.frame.support_bins(&dual.proto, u) {
            let z: Complex64 = (0..w)
                .map(|p| dvec[a * w + p] * cis2pi(-((table.n_range.0 + p as i64) as f64) * xi / s))
                .sum();
            spec.bins_mut()[idx] += z * env;
        }
    }
    Ok(spec.to_grid()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (GridFunction, PacketFrame) {
        (GridFunction::zeros(-8.0, 8.0, 1024).unwrap(), PacketFrame::new(1, 2, 1))
    }

    #[test]
    fn self_coefficient_is_one() {
        let (proto, fr) = setup();
        let p = fr.on_grid(&proto, 2, 3).unwrap();
        let t = gabor_coeffs(&p, fr, (0, 4), (-4, 4)).unwrap();
        assert!((t.get(2, 3).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn zero_signal_zero_coefficients() {
        let (proto, fr) = setup();
        let t = gabor_coeffs(&proto, fr, (0, 4), (-4, 4)).unwrap();
        assert!(t.iter().all(|(_, _, c)| c == Complex64::new(0.0, 0.0)));
        assert_eq!(t.len(), 45);
    }

    #[test]
    fn coefficients_match_grid_inner_products() {
        let (proto, fr) = setup();
        let f = GridFunction::from_fn(-8.0, 8.0, 1024, |x| cis2pi(6.3 * x) * (-x * x).exp()).unwrap();
        let t = gabor_coeffs(&f, fr, (3, 5), (-2, 2)).unwrap();
        for (u, n, c) in t.iter() {
            let direct = f.inner(&fr.on_grid(&proto, u, n).unwrap()).unwrap();
            assert!((c - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn single_packet_reconstructs() {
        // 16 bins per band keeps every Gram eigenvalue above the floor
        let (proto, fr) = (GridFunction::zeros(-4.0, 4.0, 512).unwrap(), PacketFrame::new(1, 1, 1));
        let (ur, nr) = ((0, 3), (-8, 7));
        let dual = DualFrame::new(&proto, fr, ur, nr).unwrap();
        let p = fr.on_grid(&proto, 1, -2).unwrap();
        let rec = gabor_reconstruct(&gabor_coeffs(&p, fr, ur, nr).unwrap(), &dual).unwrap();
        assert!(rec.sub(&p).unwrap().norm_l2() < 1e-8);
        let zero = gabor_reconstruct(&gabor_coeffs(&proto, fr, ur, nr).unwrap(), &dual).unwrap();
        assert_eq!(zero.sup_norm(), 0.0);
    }

    #[test]
    fn mismatched_dual_rejected() {
        let (proto, fr) = setup();
        let dual = DualFrame::new(&proto, fr, (0, 3), (-32, 31)).unwrap();
        let t = gabor_coeffs(&proto, fr, (0, 2), (-32, 31)).unwrap();
        assert_eq!(gabor_reconstruct(&t, &dual), Err(WpError::RangeMismatch));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let (proto, fr) = setup();
        let t = gabor_coeffs(&proto, fr, (0, 1), (0, 1)).unwrap();
        let csv = t.to_csv();
        assert!(csv.starts_with("u,n,re,im\n"));
        assert_eq!(csv.lines().count(), 5);
    }
}
