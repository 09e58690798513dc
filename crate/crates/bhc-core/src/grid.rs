use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::{cis2pi, CoreError, Result};

/// Complex samples on the uniform grid `left + i·(right - left)/n`,
/// `i = 0..n`, with `n` a power of two.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    left: f64,
    right: f64,
    samples: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(left: f64, right: f64, samples: Vec<Complex64>) -> Result<Self> {
        if !(right > left) || !left.is_finite() || !right.is_finite() {
            return Err(CoreError::InvalidGrid(format!("need left < right, got [{left}, {right}]")));
        }
        if samples.is_empty() || !samples.len().is_power_of_two() {
            return Err(CoreError::InvalidGrid(format!(
                "sample count {} is not a power of two",
                samples.len()
            )));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(CoreError::InvalidGrid("non-finite sample".into()));
        }
        Ok(Self { left, right, samples })
    }

    pub fn zeros(left: f64, right: f64, n: usize) -> Result<Self> {
        Self::new(left, right, vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn from_fn(left: f64, right: f64, n: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let h = (right - left) / n as f64;
        Self::new(left, right, (0..n).map(|i| f(left + i as f64 * h)).collect())
    }

    pub fn from_real_fn(left: f64, right: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_fn(left, right, n, |x| Complex64::new(f(x), 0.0))
    }

    /// A function with the same grid and new samples.
    pub fn with_samples(&self, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != self.samples.len() {
            return Err(CoreError::GridMismatch);
        }
        Self::new(self.left, self.right, samples)
    }

    pub fn left(&self) -> f64 {
        self.left
    }

    pub fn right(&self) -> f64 {
        self.right
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.right - self.left
    }

    pub fn step(&self) -> f64 {
        self.length() / self.len() as f64
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.left + i as f64 * self.step()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.left == other.left && self.right == other.right && self.len() == other.len()
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(CoreError::GridMismatch)
        }
    }

    /// `(h Σ |f|²)^{1/2}`.
    pub fn norm_l2(&self) -> f64 {
        (self.step() * self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `h Σ f·conj(g)`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_same_grid(other)?;
        let s: Complex64 = self.samples.iter().zip(&other.samples).map(|(a, b)| a * b.conj()).sum();
        Ok(s * self.step())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { samples: self.samples.iter().map(|z| z * c).collect(), ..self.clone() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| a + b).collect();
        Ok(Self { samples, ..self.clone() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| a * b).collect();
        Ok(Self { samples, ..self.clone() })
    }

    /// Multiplication by `e(c x)`.
    pub fn modulate(&self, c: f64) -> Self {
        let samples = (0..self.len()).map(|i| self.samples[i] * cis2pi(c * self.x(i))).collect();
        Self { samples, ..self.clone() }
    }

    /// Four-point Lagrange interpolation; zero outside `[left, right)`.
    pub fn interp(&self, x: f64) -> Complex64 {
        let h = self.step();
        let pos = (x - self.left) / h;
        let n = self.len() as isize;
        if !(pos >= 0.0) || pos > (n - 1) as f64 {
            return Complex64::new(0.0, 0.0);
        }
        let i = pos.floor() as isize;
        let t = pos - i as f64;
        let at = |j: isize| -> Complex64 {
            if j < 0 || j >= n {
                Complex64::new(0.0, 0.0)
            } else {
                self.samples[j as usize]
            }
        };
        let w_m1 = -t * (t - 1.0) * (t - 2.0) / 6.0;
        let w_0 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
        let w_1 = -(t + 1.0) * t * (t - 2.0) / 2.0;
        let w_2 = (t + 1.0) * t * (t - 1.0) / 6.0;
        at(i - 1) * w_m1 + at(i) * w_0 + at(i + 1) * w_1 + at(i + 2) * w_2
    }

    /// Sample nearest to `x`, with `x` wrapped periodically onto the grid.
    pub fn nearest(&self, x: f64) -> Complex64 {
        let n = self.len();
        let pos = ((x - self.left) / self.step()).round() as i64;
        self.samples[pos.rem_euclid(n as i64) as usize]
    }

    /// Bin frequency `κ/D` for FFT index `κ` (signed, `D = right - left`).
    pub fn bin_freq(&self, idx: usize) -> f64 {
        let n = self.len();
        let signed = if idx < n / 2 { idx as isize } else { idx as isize - n as isize };
        signed as f64 / self.length()
    }

    pub fn nyquist(&self) -> f64 {
        self.len() as f64 / (2.0 * self.length())
    }

    /// Discrete Fourier transform `f̂(ξ_κ) = h Σ_i f(x_i) e(-x_i ξ_κ)`.
    pub fn spectrum(&self) -> Spectrum {
        let n = self.len();
        let mut buf = self.samples.clone();
        fft_plan(n, false).process(&mut buf);
        let h = self.step();
        for (idx, z) in buf.iter_mut().enumerate() {
            *z *= h * cis2pi(-self.left * self.bin_freq(idx));
        }
        Spectrum { left: self.left, right: self.right, bins: buf }
    }
}

fn fft_plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut planner = FftPlanner::new();
    if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    }
}

/// Spectrum of a [`GridFunction`] on the bins `ξ_κ = κ/D`, in FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    left: f64,
    right: f64,
    bins: Vec<Complex64>,
}

impl Spectrum {
    /// Builds a spectrum from a closure over bin frequencies.
    pub fn from_fn(left: f64, right: f64, n: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let proto = GridFunction::zeros(left, right, n)?;
        let bins = (0..n).map(|i| f(proto.bin_freq(i))).collect();
        Ok(Self { left, right, bins })
    }

    pub fn bins(&self) -> &[Complex64] {
        &self.bins
    }

    pub fn bins_mut(&mut self) -> &mut [Complex64] {
        &mut self.bins
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.right - self.left
    }

    pub fn freq(&self, idx: usize) -> f64 {
        let n = self.len();
        let signed = if idx < n / 2 { idx as isize } else { idx as isize - n as isize };
        signed as f64 / self.length()
    }

    /// `(1/D) Σ_κ F_κ conj(G_κ)`, equal to the grid inner product of the
    /// underlying functions.
    pub fn inner(&self, other: &Self) -> Complex64 {
        let s: Complex64 = self.bins.iter().zip(&other.bins).map(|(a, b)| a * b.conj()).sum();
        s / self.length()
    }

    /// Inverse transform `f(x_i) = (1/D) Σ_κ f̂(ξ_κ) e(x_i ξ_κ)`.
    pub fn to_grid(&self) -> Result<GridFunction> {
        let n = self.len();
        let mut buf: Vec<Complex64> = (0..n)
            .map(|idx| self.bins[idx] * cis2pi(self.left * self.freq(idx)))
            .collect();
        fft_plan(n, true).process(&mut buf);
        let d = self.length();
        for z in &mut buf {
            *z /= d;
        }
        GridFunction::new(self.left, self.right, buf)
    }
}

/// Exact off-grid evaluation of a grid function read as the periodic
/// trigonometric polynomial `(1/D) Σ_κ f̂(ξ_κ) e(x ξ_κ)`.
///
/// Bins with `|f̂| ≤ cutoff·max|f̂|` are dropped, so band-limited inputs
/// evaluate in time proportional to their bandwidth.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    freqs: Vec<f64>,
    coeffs: Vec<Complex64>,
}

impl TrigPoly {
    pub fn from_grid(f: &GridFunction, cutoff: f64) -> Self {
        let s = f.spectrum();
        let peak = s.bins().iter().map(|z| z.norm()).fold(0.0, f64::max);
        let d = s.length();
        let (freqs, coeffs) = (0..s.len())
            .filter(|&i| s.bins()[i].norm() > cutoff * peak && peak > 0.0)
            .map(|i| (s.freq(i), s.bins()[i] / d))
            .unzip();
        Self { freqs, coeffs }
    }

    pub fn terms(&self) -> usize {
        self.freqs.len()
    }

    /// Largest `|ξ|` among the retained bins.
    pub fn max_freq(&self) -> f64 {
        self.freqs.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.freqs.iter().zip(&self.coeffs).map(|(&xi, &c)| c * cis2pi(xi * x)).sum()
    }
}
