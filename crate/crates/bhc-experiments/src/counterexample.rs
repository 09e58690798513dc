use bhc_core::{cis2pi, BumpFamily, Budget, Complex64, GridFunction};
use bhc_wavepackets::{gabor_coeffs, ModelGeometry, OscWeight, PacketFrame};
use gauss_quad::GaussLegendre;
use rayon::prelude::*;
use serde::Serialize;

use crate::lambda_bar::big_n;
use crate::{ExperimentError, Result};

/// Progression stride used at desk scale.
pub const DEFAULT_STRIDE: i64 = 2;
/// Exponent of the weight used by the counterexample runs.
pub const DEFAULT_A: f64 = 3.0;
/// Constant in the lower bound `10^{-10}·2^{-3am/4}` of the `(I)` term.
pub const I_TERM_CONSTANT: f64 = 1e-10;
/// Fraction of `u` values on which the `(I)` bound must hold.
pub const I_TERM_FRACTION: f64 = 0.01;
const SIDE: f64 = 8.0;
const GL_NODES: usize = 16;

/// One value class of λ: `λ = value` on the union of `intervals`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaClass {
    pub value: f64,
    pub intervals: Vec<(f64, f64)>,
}

/// The absolute-value model counterexample on `P⁰ = P(0,1,1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleInstance {
    pub am: u32,
    /// Stride `L` of both progressions.
    pub stride: i64,
    pub a: f64,
    pub f: GridFunction,
    pub g: GridFunction,
    pub h: GridFunction,
    pub lambda: GridFunction,
    /// `A_j` for every `j`; `B = [1,2] \ ⋃ A_j` carries `λ = 2^{am}`.
    pub classes: Vec<LambdaClass>,
    /// `Σ_{n,v,u,p} |∫ φ̌^{2u,p} h ρ(λ) w^e_{0,n,v}(λ)| / (2^{5am/4}‖h‖_∞)`.
    pub ratio: f64,
}

impl CounterexampleInstance {
    pub fn big_n(&self) -> i64 {
        1i64 << (self.am / 2)
    }

    pub fn geometry(&self) -> Result<ModelGeometry> {
        Ok(ModelGeometry::new(self.a, self.am, 0, 1, 1)?)
    }

    /// Class of `x`: `Some(j)` inside `A_j`, `None` on `B`.
    pub fn class_of(&self, x: f64) -> Option<usize> {
        self.classes.iter().position(|c| c.intervals.iter().any(|&(lo, hi)| x >= lo && x < hi))
    }
}

/// `A_j = ⋃_q (2^{-am}[j, j+1) + q 2^{-am/2})` over `j ∈ LZ ∩ [N, 2N)` and the
/// `q ∈ LZ` keeping the piece inside `[1, 2]`, with `λ = 2^{am} + N(j - N) = Nj`.
pub fn progression_classes(am: u32, stride: i64) -> Result<Vec<LambdaClass>> {
    let n = big_n(am)?;
    if stride < 1 {
        return Err(ExperimentError::domain(format!("stride {stride} must be positive")));
    }
    let nf = n as f64;
    let classes: Vec<LambdaClass> = (n..2 * n)
        .filter(|j| j % stride == 0)
        .map(|j| {
            let intervals = (0..=2 * n)
                .filter(|q| q % stride == 0)
                .map(|q| (q * n + j, q * n + j + 1))
                .filter(|&(lo, hi)| lo >= n * n && hi <= 2 * n * n)
                .map(|(lo, hi)| (lo as f64 / (nf * nf), hi as f64 / (nf * nf)))
                .collect();
            LambdaClass { value: (n * j) as f64, intervals }
        })
        .collect();
    if classes.is_empty() || classes.iter().any(|c| c.intervals.is_empty()) {
        return Err(ExperimentError::domain(format!("stride {stride} leaves an empty progression at am = {am}")));
    }
    Ok(classes)
}

fn packet_sum(grid: &GridFunction, frame: PacketFrame, u_abs: (i64, i64), n_abs: i64) -> Result<GridFunction> {
    let nf = frame.scale();
    let amp = 1.0 / BumpFamily::phi().eval(0.5);
    let mut spec = grid.spectrum();
    for i in 0..spec.len() {
        let xi = spec.freq(i);
        let u = (xi / nf).floor() as i64;
        let env = if (u_abs.0..=u_abs.1).contains(&u.abs()) { frame.envelope(u, xi) } else { 0.0 };
        spec.bins_mut()[i] = if env == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            let s: Complex64 = (-n_abs..=n_abs).map(|p| cis2pi(-(p as f64) * xi / nf) * if p % 2 == 0 { 1.0 } else { -1.0 }).sum();
            s * env * amp
        };
    }
    Ok(spec.to_grid()?)
}

/// Builds `f`, `g`, `h = 1_{[1,2]}`, λ and evaluates the normalized ratio.
///
/// `f = Σ ± φ̌^{n₁,p}` over `2N ≤ |n₁| ≤ 3N`, `|p| ≤ 3N` and `g` likewise over
/// `1 ≤ |n₂| ≤ N`, with the sign `(-1)^p` and amplitude `1/φ(1/2)`: the
/// frequency bump vanishes at the ends of its support, so unsigned sums
/// over consecutive positions nearly cancel.
pub fn build_counterexample(am: u32, stride: i64, a: f64, budget: &Budget) -> Result<CounterexampleInstance> {
    let n = big_n(am)?;
    let nf = n as f64;
    let classes = progression_classes(am, stride)?;
    let geom = ModelGeometry::new(a, am, 0, 1, 1)?;
    let frame = geom.input_frame();
    let top = 3.0 * nf * nf + 2.0 * nf;
    let len = ((4.0 * SIDE * top).ceil() as usize).next_power_of_two();
    budget.check(len as u64)?;
    let proto = GridFunction::zeros(-SIDE, SIDE, len)?;
    let f = packet_sum(&proto, frame, (2 * n, 3 * n), 3 * n)?;
    let g = packet_sum(&proto, frame, (1, n), 3 * n)?;
    let h = GridFunction::from_real_fn(-SIDE, SIDE, len, |x| if (1.0..=2.0).contains(&x) { 1.0 } else { 0.0 })?;
    let lambda_u = nf * nf;
    let mut inst = CounterexampleInstance { am, stride, a, f, g, lambda: h.clone(), h, classes, ratio: f64::NAN };
    let lam: Vec<Complex64> = (0..len)
        .map(|i| Complex64::new(inst.class_of(proto.x(i)).map_or(lambda_u, |c| inst.classes[c].value), 0.0))
        .collect();
    inst.lambda = proto.with_samples(lam)?;
    let tables = ModelTables::new(&inst, budget)?;
    let reduced: f64 = tables.nv.par_iter().enumerate().map(|(k, _)| tables.inner_abs(k).iter().sum::<f64>()).sum();
    let hsup = inst.h.sup_norm();
    inst.ratio = if hsup == 0.0 { 0.0 } else { reduced / (2f64.powf(1.25 * am as f64) * hsup) };
    Ok(inst)
}

/// `φ`-weighted Gauss–Legendre nodes on `[0, 1]`.
fn eta_nodes(panels: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(GL_NODES.try_into().expect("nonzero degree"));
    let phi = BumpFamily::phi();
    let w = 1.0 / panels as f64;
    (0..panels)
        .flat_map(|p| {
            let mid = (p as f64 + 0.5) * w;
            rule.as_node_weight_pairs().iter().map(move |(x, wt)| (mid + 0.5 * w * x, 0.5 * w * wt)).collect::<Vec<_>>()
        })
        .map(|(eta, wt)| (eta, wt * phi.eval(eta)))
        .collect()
}

/// Exact integrals of the output packets over `[x0, x1]`:
/// `∫ φ̌^{c,p}(x) dx = N^{-1/2} ∫ φ(η) [e(Y₁(η+c)) - e(Y₀(η+c))] / (2πi(η+c)) dη`
/// with `Y = Nx - p`, valid for `c ≥ 1`.
struct PacketIntegrator {
    nf: f64,
    nodes: Vec<(f64, f64)>,
}

impl PacketIntegrator {
    fn new(am: u32) -> Self {
        let nf = (1i64 << (am / 2)) as f64;
        Self { nf, nodes: eta_nodes(16 + (nf as usize) / 2) }
    }

    fn primitive(&self, c: i64, p: i64, x: f64) -> Complex64 {
        let y = self.nf * x - p as f64;
        let c = c as f64;
        let s: Complex64 = self.nodes.iter().map(|&(eta, w)| cis2pi(y * (eta + c)) * (w / (eta + c))).sum();
        s / Complex64::new(0.0, std::f64::consts::TAU * self.nf.sqrt())
    }

    fn integral(&self, c: i64, p: i64, x0: f64, x1: f64) -> Complex64 {
        self.primitive(c, p, x1) - self.primitive(c, p, x0)
    }
}

/// Packet integrals per λ class and weights per `(n, v)` and class; class 0 is `B`.
struct ModelTables {
    up: Vec<(i64, i64)>,
    nv: Vec<(i64, i64)>,
    /// `g[k][c] = ∫_{class c} φ̌^{2u,p} h dx` for `up[k]`.
    g: Vec<Vec<Complex64>>,
    /// `w[k][c] = ρ(λ_c) w^e_{0,n,v}(λ_c)` for `nv[k]`.
    w: Vec<Vec<Complex64>>,
}

impl ModelTables {
    fn new(inst: &CounterexampleInstance, budget: &Budget) -> Result<Self> {
        let geom = inst.geometry()?;
        let win = geom.windows;
        let up: Vec<(i64, i64)> = (win.u.0..=win.u.1).flat_map(|u| (win.p.0..=win.p.1).map(move |p| (u, p))).collect();
        let nv: Vec<(i64, i64)> = (win.n.0..=win.n.1).flat_map(|n| (win.v.0..=win.v.1).map(move |v| (n, v))).collect();
        // elementary pieces of [1, 2]: the A_j intervals and the gaps between them
        let mut pieces: Vec<(f64, f64, usize)> = inst
            .classes
            .iter()
            .enumerate()
            .flat_map(|(c, cl)| cl.intervals.iter().map(move |&(lo, hi)| (lo, hi, c + 1)))
            .collect();
        pieces.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut all = Vec::with_capacity(2 * pieces.len() + 1);
        let mut cursor = 1.0;
        for &(lo, hi, c) in &pieces {
            if lo > cursor {
                all.push((cursor, lo, 0));
            }
            all.push((lo, hi, c));
            cursor = hi;
        }
        if cursor < 2.0 {
            all.push((cursor, 2.0, 0));
        }
        let hval: Vec<f64> = all.iter().map(|&(lo, hi, _)| inst.h.interp(0.5 * (lo + hi)).re).collect();
        let ends: Vec<f64> = std::iter::once(1.0).chain(all.iter().map(|p| p.1)).collect();
        let ncls = inst.classes.len() + 1;
        budget.check((up.len() * ends.len()) as u64)?;
        let integ = PacketIntegrator::new(inst.am);
        let g = up
            .par_iter()
            .map(|&(u, p)| {
                let prim: Vec<Complex64> = ends.iter().map(|&x| integ.primitive(2 * u, p, x)).collect();
                let mut row = vec![Complex64::new(0.0, 0.0); ncls];
                for (i, &(_, _, c)) in all.iter().enumerate() {
                    row[c] += (prim[i + 1] - prim[i]) * hval[i];
                }
                row
            })
            .collect();
        let values: Vec<f64> = std::iter::once(2f64.powi(inst.am as i32)).chain(inst.classes.iter().map(|c| c.value)).collect();
        let dummy = GridFunction::zeros(0.0, 1.0, 2)?;
        let w = nv
            .par_iter()
            .map(|&(n, v)| {
                let ow = OscWeight::new(inst.a, inst.am as f64 / inst.a, 0, n, v, dummy.clone())?;
                values
                    .iter()
                    .map(|&l| {
                        let r = ow.rho(l);
                        Ok(if r == 0.0 { Complex64::new(0.0, 0.0) } else { ow.we_at(l, budget)? * r })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { up, nv, g, w })
    }

    /// `|∫ φ̌^{2u,p} h ρ(λ) w^e_{0,n,v}(λ) dx|` for every `(u, p)`, at `nv[k]`.
    fn inner_abs(&self, k: usize) -> Vec<f64> {
        let wk = &self.w[k];
        self.g.iter().map(|row| row.iter().zip(wk).map(|(a, b)| a * b).sum::<Complex64>().norm()).collect()
    }
}

/// `𝓛^{abs}_{m,P⁰}(f,g,h) = Σ_{n,p,u,v} 2^{-am/4} |⟨f, φ̌^{u-v,p-n}⟩| |⟨g, φ̌^{u+v,p+n}⟩|
/// |∫ φ̌^{2u,p} h ρ_{am}(λ) w^e_{0,n,v}(λ) dx|`.
///
/// `h` is read on `[1, 2]` at the midpoints of the progression pieces, so it
/// must be constant on each of them.
pub fn abs_model_form(inst: &CounterexampleInstance, budget: &Budget) -> Result<f64> {
    let geom = inst.geometry()?;
    let win = geom.windows;
    let frame = geom.input_frame();
    let ft = gabor_coeffs(&inst.f, frame, (win.u.0 - win.v.1, win.u.1 - win.v.0), (win.p.0 - win.n.1, win.p.1 - win.n.0))?;
    let gt = gabor_coeffs(&inst.g, frame, (win.u.0 + win.v.0, win.u.1 + win.v.1), (win.p.0 + win.n.0, win.p.1 + win.n.1))?;
    let tables = ModelTables::new(inst, budget)?;
    let total: f64 = tables
        .nv
        .par_iter()
        .enumerate()
        .map(|(k, &(n, v))| {
            tables
                .inner_abs(k)
                .iter()
                .zip(&tables.up)
                .map(|(z, &(u, p))| z * ft.get_or_zero(u - v, p - n).norm() * gt.get_or_zero(u + v, p + n).norm())
                .sum::<f64>()
        })
        .sum();
    Ok(total * 2f64.powf(-(inst.am as f64) / 4.0))
}

/// `𝓛^{abs} / (‖f‖‖g‖‖h‖_∞)`, the quantity an absolute decay bound would control.
pub fn full_ratio(inst: &CounterexampleInstance, budget: &Budget) -> Result<f64> {
    let den = inst.f.norm_l2() * inst.g.norm_l2() * inst.h.sup_norm();
    if den == 0.0 {
        return Ok(0.0);
    }
    Ok(abs_model_form(inst, budget)? / den)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ITermReport {
    /// `10^{-10}·2^{-3am/4}`.
    pub bound: f64,
    /// Smallest, over the progression pieces `I_{j,q}`, fraction of `u` with
    /// `(I) ≥ bound`.
    pub min_fraction: f64,
    pub min_value: f64,
}

impl ITermReport {
    pub fn holds(&self) -> bool {
        self.min_fraction >= I_TERM_FRACTION
    }
}

/// `(I) = 2^{am/4} |∫_{I_{j,q}} φ̌(Nx - q) e((Nx - q)2u) dx|` for every
/// progression piece `I_{j,q}` and every `u` in the window.
pub fn i_term_check(inst: &CounterexampleInstance) -> Result<ITermReport> {
    let geom = inst.geometry()?;
    let win = geom.windows;
    let n = inst.big_n();
    let nf = n as f64;
    let integ = PacketIntegrator::new(inst.am);
    let bound = I_TERM_CONSTANT * 2f64.powf(-0.75 * inst.am as f64);
    let pieces: Vec<(f64, f64)> = inst.classes.iter().flat_map(|c| c.intervals.iter().copied()).collect();
    let scale = 2f64.powf(inst.am as f64 / 4.0) * nf.sqrt();
    let stats: Vec<(f64, f64)> = pieces
        .par_iter()
        .map(|&(x0, x1)| {
            // x0 = q/N + j/N² with N ≤ j < 2N
            let q = (x0 * nf).floor() as i64 - 1;
            let vals: Vec<f64> = (win.u.0..=win.u.1).map(|u| integ.integral(2 * u, q, x0, x1).norm() * scale).collect();
            let hits = vals.iter().filter(|&&v| v >= bound).count();
            (hits as f64 / vals.len() as f64, vals.iter().copied().fold(f64::INFINITY, f64::min))
        })
        .collect();
    let min_fraction = stats.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let min_value = stats.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    Ok(ITermReport { bound, min_fraction, min_value })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packet_integral_matches_dense_quadrature() {
        let am = 6;
        let frame = PacketFrame::new(3, 3, 1);
        let integ = PacketIntegrator::new(am);
        for &(c, p, x0, x1) in &[(18i64, 9i64, 1.0, 1.3), (30, 12, 1.52, 1.54), (32, 15, 1.0, 2.0)] {
            let steps = 20_000;
            let h = (x1 - x0) / steps as f64;
            let dense: Complex64 = (0..=steps)
                .map(|i| {
                    let w = if i == 0 || i == steps { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                    frame.time_at(c, p, x0 + i as f64 * h) * w
                })
                .sum::<Complex64>()
                * (h / 3.0);
            let z = integ.integral(c, p, x0, x1);
            assert!((z - dense).norm() < 1e-9, "c={c} p={p}: {z} vs {dense}");
        }
    }

    #[test]
    fn progression_pieces_are_disjoint_and_inside() {
        let classes = progression_classes(8, 2).unwrap();
        let mut all: Vec<(f64, f64)> = classes.iter().flat_map(|c| c.intervals.clone()).collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert!(all.windows(2).all(|w| w[0].1 <= w[1].0));
        assert!(all.iter().all(|&(lo, hi)| lo >= 1.0 && hi <= 2.0 && (hi - lo - 1.0 / 256.0).abs() < 1e-15));
        assert_eq!(classes.len(), 8);
        assert!(classes.iter().all(|c| c.value >= 256.0 && c.value < 512.0));
    }

    #[test]
    fn stride_too_large_is_rejected() {
        assert!(progression_classes(4, 100).is_err());
    }
}
