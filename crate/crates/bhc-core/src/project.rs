use num_complex::Complex64;

use crate::{bump, CoreError, GridFunction, Result};

/// Frequency window applied by [`freq_project`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    /// Indicator of the closed band.
    Sharp,
    /// Prototype bump stretched over the band (vanishes at its ends).
    Smooth,
}

/// Multiplies the discrete spectrum of `f` by a window on `band = [lo, hi]`.
pub fn freq_project(f: &GridFunction, band: (f64, f64), window: Window) -> Result<GridFunction> {
    let (lo, hi) = band;
    let nyquist = f.nyquist();
    if !(lo <= hi) || lo.abs() >= nyquist || hi.abs() >= nyquist {
        return Err(CoreError::BandUnrepresentable { lo, hi, nyquist });
    }
    let mut spec = f.spectrum();
    let width = hi - lo;
    for idx in 0..spec.len() {
        let xi = spec.freq(idx);
        let w = match window {
            Window::Sharp => {
                if (lo..=hi).contains(&xi) {
                    1.0
                } else {
                    0.0
                }
            }
            Window::Smooth => {
                if width > 0.0 {
                    bump(2.0 * (xi - lo) / width - 1.0)
                } else {
                    0.0
                }
            }
        };
        spec.bins_mut()[idx] *= Complex64::new(w, 0.0);
    }
    spec.to_grid()
}
