use bhc_core::{cis2pi, Budget, Complex64, GridFunction, TrigPoly};
use gauss_quad::GaussLegendre;
use rayon::prelude::*;

use crate::gabor::{gabor_coeffs, CoefficientTable};
use crate::geometry::ModelGeometry;
use crate::packets::phi_check;
use crate::weight::{weighted_we, OscWeight};
use crate::{Result, WpError};

const GL_NODES: usize = 16;

/// Composite Gauss-Legendre nodes and weights on `[lo, hi]`.
pub(crate) fn composite_gl(lo: f64, hi: f64, panels: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(GL_NODES.try_into().expect("nonzero degree"));
    let h = (hi - lo) / panels as f64;
    (0..panels)
        .flat_map(|p| {
            let mid = lo + (p as f64 + 0.5) * h;
            rule.as_node_weight_pairs().iter().map(move |&(x, w)| (mid + 0.5 * h * x, 0.5 * h * w))
        })
        .collect()
}

/// Input coefficient tables `⟨f, φ̌^{u-v, p_r-n}⟩` and `⟨g, φ̌^{u+v, p_r+n}⟩`
/// covering every index the configured windows can reach.
#[derive(Debug, Clone)]
pub struct ModelCoeffs {
    geom: ModelGeometry,
    f_table: CoefficientTable,
    g_table: CoefficientTable,
    proto: GridFunction,
}

impl ModelCoeffs {
    pub fn new(f: &GridFunction, g: &GridFunction, geom: &ModelGeometry) -> Result<Self> {
        f.check_same_grid(g)?;
        let w = geom.windows;
        let fr = geom.input_frame();
        let (pr_lo, pr_hi) = (geom.p_r(w.p.0), geom.p_r(w.p.1));
        let f_table = gabor_coeffs(f, fr, (w.u.0 - w.v.1, w.u.1 - w.v.0), (pr_lo - w.n.1, pr_hi - w.n.0))?;
        let g_table = gabor_coeffs(g, fr, (w.u.0 + w.v.0, w.u.1 + w.v.1), (pr_lo + w.n.0, pr_hi + w.n.1))?;
        Ok(Self { geom: *geom, f_table, g_table, proto: f.with_samples(vec![Complex64::default(); f.len()])? })
    }

    pub fn geometry(&self) -> &ModelGeometry {
        &self.geom
    }

    pub fn f_table(&self) -> &CoefficientTable {
        &self.f_table
    }

    pub fn g_table(&self) -> &CoefficientTable {
        &self.g_table
    }

    fn check(&self, n: i64, v: i64, p: i64) -> Result<()> {
        let w = &self.geom.windows;
        for (name, x, r) in [("n", n, w.n), ("v", v, w.v), ("p", p, w.p)] {
            if !(r.0..=r.1).contains(&x) {
                return Err(WpError::IndexOutOfRange(format!("{name} = {x} outside {r:?}")));
            }
        }
        Ok(())
    }

    /// `2^{-(am+2k)/4} c_f(u-v, p_r-n) c_g(u+v, p_r+n)` for each `u` in the window.
    fn products(&self, n: i64, v: i64, p: i64) -> Vec<(i64, Complex64)> {
        let g = &self.geom;
        let pr = g.p_r(p);
        let pref = 2f64.powf(-(g.am as f64 + 2.0 * g.k as f64) / 4.0);
        (g.windows.u.0..=g.windows.u.1)
            .map(|u| {
                let c = self.f_table.get_or_zero(u - v, pr - n) * self.g_table.get_or_zero(u + v, pr + n);
                (u, c * pref)
            })
            .collect()
    }

    /// `S^{n,v,p}_{k,ℓ,r}(f,g)(x)` evaluated on the line.
    pub fn model_s_at(&self, n: i64, v: i64, p: i64, x: f64) -> Result<Complex64> {
        self.check(n, v, p)?;
        let out = self.geom.output_frame();
        let pr = self.geom.p_r(p);
        Ok(self.products(n, v, p).into_iter().map(|(u, c)| c * out.time_at(2 * u, pr, x)).sum())
    }

    /// `S^{n,v,p}_{k,ℓ,r}(f,g)` on the grid of `f`.
    pub fn model_s(&self, n: i64, v: i64, p: i64) -> Result<GridFunction> {
        self.check(n, v, p)?;
        let out = self.geom.output_frame();
        let pr = self.geom.p_r(p);
        let mut acc = self.proto.clone();
        for (u, c) in self.products(n, v, p) {
            if c != Complex64::default() {
                acc = acc.add(&out.on_grid(&self.proto, 2 * u, pr)?.scale(c))?;
            }
        }
        Ok(acc)
    }

    /// Periodic factor `S̲ = 2^{-k} Σ_u c_f c_g e(2u(2^j x - p_r))` of the block,
    /// with the `φ̌` envelope and the constant carrier removed.
    pub fn model_s_periodic_at(&self, n: i64, v: i64, p: i64, x: f64) -> Result<Complex64> {
        self.check(n, v, p)?;
        let g = &self.geom;
        let big_x = 2f64.powi(g.j_scale()) * x - g.p_r(p) as f64;
        let rescale = 2f64.powf((g.am as f64 + 2.0 * g.k as f64) / 4.0 - g.k as f64);
        Ok(self.products(n, v, p).into_iter().map(|(u, c)| c * rescale * cis2pi(2.0 * u as f64 * big_x)).sum())
    }

    /// Both sides of the `S̲` orthogonality identity, summed over the windows.
    pub fn plancherel(&self) -> Result<PlancherelReport> {
        let g = &self.geom;
        let w = g.windows;
        let big_n = g.big_n();
        let nodes_per_sub = 8usize;
        let mut lhs = 0.0;
        let mut rhs = 0.0;
        for n in w.n.0..=w.n.1 {
            for v in w.v.0..=w.v.1 {
                for pp in g.p_prime_range().0..=g.p_prime_range().1 {
                    let p = pp.div_euclid(big_n);
                    let (lo, hi) = g.sub_interval(pp);
                    let h = (hi - lo) / nodes_per_sub as f64;
                    for i in 0..nodes_per_sub {
                        lhs += self.model_s_periodic_at(n, v, p, lo + (i as f64 + 0.5) * h)?.norm_sqr() * h;
                    }
                }
                for p in w.p.0..=w.p.1 {
                    let pr = g.p_r(p);
                    for u in w.u.0..=w.u.1 {
                        rhs += self.f_table.get_or_zero(u - v, pr - n).norm_sqr()
                            * self.g_table.get_or_zero(u + v, pr + n).norm_sqr();
                    }
                }
            }
        }
        let scale = 2f64.powf(-(g.am as f64) / 2.0 - g.k as f64);
        rhs *= scale;
        let factored = scale * self.f_table.energy() * self.g_table.energy();
        Ok(PlancherelReport { lhs, rhs, factored })
    }
}

/// `lhs = Σ_{n,v,p'} ∫_{I̲^{p'}} |S̲|²`, `rhs = 2^{-am/2-k} Σ |c_f|²|c_g|²`
/// over matching index pairs, and the fully factored product
/// `2^{-am/2-k} (Σ|c_f|²)(Σ|c_g|²)` for comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlancherelReport {
    pub lhs: f64,
    pub rhs: f64,
    pub factored: f64,
}

impl PlancherelReport {
    pub fn rel_error(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.rhs.abs().max(f64::MIN_POSITIVE)
    }

    pub fn factored_ratio(&self) -> f64 {
        self.lhs / self.factored
    }
}

fn tilde_panels(geom: &ModelGeometry, bandwidth: f64, v: i64) -> usize {
    let len = 2f64.powi(-geom.j_scale());
    let cycles = bandwidth * len + 2.0 * v.abs() as f64;
    cycles.ceil() as usize + 2
}

/// `S̃_k^{n,v}(F,G)(x) = 2^{-k} ∫_{I_k^n} F(x-t) G(x+t) e(-2v(2^j t - n)) dt`
/// for callable `F`, `G`, with `bandwidth` bounding `|ξ_F| + |ξ_G|`.
pub fn s_tilde_at(
    f: impl Fn(f64) -> Complex64,
    g: impl Fn(f64) -> Complex64,
    geom: &ModelGeometry,
    n: i64,
    v: i64,
    x: f64,
    bandwidth: f64,
) -> Complex64 {
    let (lo, hi) = geom.interval(n);
    let s = 2f64.powi(geom.j_scale());
    let sum: Complex64 = composite_gl(lo, hi, tilde_panels(geom, bandwidth, v))
        .into_iter()
        .map(|(t, w)| f(x - t) * g(x + t) * cis2pi(-2.0 * v as f64 * (s * t - n as f64)) * w)
        .sum();
    sum * 2f64.powi(-geom.k)
}

/// Grid version of [`s_tilde_at`]; `F` and `G` are evaluated off-grid as
/// trigonometric polynomials.
pub fn continuous_s_tilde(f: &GridFunction, g: &GridFunction, geom: &ModelGeometry, n: i64, v: i64) -> Result<GridFunction> {
    f.check_same_grid(g)?;
    let fp = TrigPoly::from_grid(f, 1e-14);
    let gp = TrigPoly::from_grid(g, 1e-14);
    let bw = fp.max_freq() + gp.max_freq();
    let vals: Vec<Complex64> =
        (0..f.len()).into_par_iter().map(|i| s_tilde_at(|y| fp.eval(y), |y| gp.eval(y), geom, n, v, f.x(i), bw)).collect();
    Ok(f.with_samples(vals)?)
}

/// The `(j₁, j₂)`-indexed sum of continuous blocks equal to `S^{n,v,p}(x)`,
/// truncated to `|j₁|, |j₂| ≤ radius`.
#[allow(clippy::too_many_arguments)]
pub fn transition_rhs(
    fp: &TrigPoly,
    gp: &TrigPoly,
    geom: &ModelGeometry,
    n: i64,
    v: i64,
    p: i64,
    x: f64,
    radius: i64,
) -> Complex64 {
    transition_rhs_radii(fp, gp, geom, (n, v, p), x, &[radius])[0]
}

/// [`transition_rhs`] for several truncation radii in one pass.
pub fn transition_rhs_radii(
    fp: &TrigPoly,
    gp: &TrigPoly,
    geom: &ModelGeometry,
    (n, v, p): (i64, i64, i64),
    x: f64,
    radii: &[i64],
) -> Vec<Complex64> {
    let s = 2f64.powi(geom.j_scale());
    let big_n = geom.big_n() as f64;
    let pr = geom.p_r(p) as f64;
    let ell = geom.ell as f64;
    let shift = big_n * (ell - 1.0);
    let big_x = s * x - pr;
    let conj_phi0 = |y: f64| (phi_check(y) * cis2pi(y * shift)).conj();
    let bw = fp.max_freq() + gp.max_freq() + 2.0 * s * big_n * (ell.abs() + 2.0);
    let (lo, hi) = geom.interval(n);
    let r_max = radii.iter().copied().max().unwrap_or(0).max(0);
    // truncated sums Σ_{|j| ≤ R} for every requested R, at one node
    let partials = |t: f64, sign: f64, shift_n: f64, h: &TrigPoly| -> Vec<Complex64> {
        let term = |j: i64| h.eval(x + sign * t + j as f64 / s) * conj_phi0(s * (x + sign * t) - pr + shift_n + j as f64);
        let mut acc = term(0);
        let mut out = vec![Complex64::default(); radii.len()];
        for r in 0..=r_max {
            if r > 0 {
                acc += term(r) + term(-r);
            }
            for (o, &rr) in out.iter_mut().zip(radii) {
                if rr == r {
                    *o = acc;
                }
            }
        }
        out
    };
    let nodes = composite_gl(lo, hi, tilde_panels(geom, bw, v));
    let sums: Vec<Complex64> = nodes
        .into_par_iter()
        .map(|(t, w)| {
            let a = partials(t, -1.0, n as f64, fp);
            let b = partials(t, 1.0, -(n as f64), gp);
            let ph = cis2pi(-2.0 * v as f64 * (s * t - n as f64)) * w;
            a.iter().zip(&b).map(|(x, y)| x * y * ph).collect::<Vec<_>>()
        })
        .reduce(
            || vec![Complex64::default(); radii.len()],
            |mut acc, v| {
                acc.iter_mut().zip(&v).for_each(|(a, b)| *a += b);
                acc
            },
        );
    let pref = phi_check(big_x) * cis2pi(big_x * big_n * (2.0 * ell - 2.0)) * 2f64.powi(-geom.k);
    sums.into_iter().map(|z| z * pref).collect()
}

/// `𝓛_{m,k,ℓ,r}(f,g,h) = Σ_{n,p,u,v} 2^{-(am+2k)/4} c_f c_g
/// ∫ φ̌^{2u,p_r}(x) h(x) ρ_{am-ak}(λ(x)) w^e_{k,n,v}(λ)(x) dx`.
pub fn trilinear_form(coeffs: &ModelCoeffs, h: &GridFunction, lambda: &GridFunction, budget: &Budget) -> Result<Complex64> {
    let g = coeffs.geometry();
    h.check_same_grid(&coeffs.proto)?;
    lambda.check_same_grid(h)?;
    let w = g.windows;
    let out = g.output_frame();
    let step = h.step();
    let mut hp = Vec::new();
    for u in w.u.0..=w.u.1 {
        for p in w.p.0..=w.p.1 {
            hp.push(((u, p), out.on_grid(h, 2 * u, g.p_r(p))?.mul(h)?));
        }
    }
    let nv: Vec<(i64, i64)> = (w.n.0..=w.n.1).flat_map(|n| (w.v.0..=w.v.1).map(move |v| (n, v))).collect();
    let terms: Vec<Result<Complex64>> = nv
        .par_iter()
        .map(|&(n, v)| {
            let weight = weighted_we(&OscWeight::from_geometry(g, n, v, lambda.clone())?, budget)?;
            if weight.sup_norm() == 0.0 {
                return Ok(Complex64::default());
            }
            let mut acc = Complex64::default();
            for ((u, p), ph) in &hp {
                let (_, c) = coeffs.products(n, v, *p).into_iter().find(|(uu, _)| uu == u).expect("u in window");
                if c == Complex64::default() {
                    continue;
                }
                let integral: Complex64 = ph.samples().iter().zip(weight.samples()).map(|(a, b)| a * b).sum();
                acc += c * integral * step;
            }
            Ok(acc)
        })
        .collect();
    terms.into_iter().sum()
}
