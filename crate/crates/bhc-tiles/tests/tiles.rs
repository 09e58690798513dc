use bhc_core::{Budget, Complex64, GridFunction};
use bhc_tiles::*;
use bhc_wavepackets::{classify_indices, ClassifyParams, ModelGeometry};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn band(rng: &mut impl Rng, proto: &GridFunction, lo: f64, hi: f64) -> GridFunction {
    let mut s = proto.spectrum();
    for i in 0..s.len() {
        let xi = s.freq(i);
        s.bins_mut()[i] = if xi > lo && xi < hi {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        } else {
            Complex64::default()
        };
    }
    s.to_grid().unwrap()
}

fn lac(tiles: Vec<TriTile>, top: DyadicInterval, xi: f64) -> Tree {
    Tree::new(tiles, top, xi, 1, TreeKind::Lacunary).unwrap()
}

#[test]
fn disjoint_tripled_bands_are_strongly_disjoint() {
    let p = make_tri_tile(0, 0, 0, 4).unwrap();
    let q = make_tri_tile(0, 20, 0, 4).unwrap();
    let t = lac(vec![p], p.interval(), 10.0);
    let t2 = lac(vec![q], q.interval(), 20.0 * 16.0 + 10.0);
    assert!(strongly_disjoint(&t, &t2, DisjointnessRule::Tripled).unwrap());
}

#[test]
fn finer_tile_inside_tripled_top_breaks_disjointness() {
    // 𝛚_{P₁} = [16, 20), 𝛚_{P'₁} = [16, 32): tripled bands meet and |𝛚_P| < |𝛚_{P'}|.
    let p = make_tri_tile(2, 3, 0, 4).unwrap();
    let t = lac(vec![p], p.interval(), 13.0);
    let inside = make_tri_tile(0, 0, 1, 4).unwrap();
    let t_in = lac(vec![inside], inside.interval(), 10.0);
    assert!(!strongly_disjoint(&t, &t_in, DisjointnessRule::Tripled).unwrap());
    assert!(!strongly_disjoint(&t, &t_in, DisjointnessRule::Standard).unwrap());
    // I_{P'} = [5, 6) misses I_T = [0, 4) but meets 3I_T = [-4, 8).
    let near = make_tri_tile(0, 0, 5, 4).unwrap();
    let t_near = lac(vec![near], near.interval(), 10.0);
    assert!(!strongly_disjoint(&t, &t_near, DisjointnessRule::Tripled).unwrap());
    assert!(strongly_disjoint(&t, &t_near, DisjointnessRule::Standard).unwrap());
    let far = make_tri_tile(0, 0, 9, 4).unwrap();
    let t_far = lac(vec![far], far.interval(), 10.0);
    assert!(strongly_disjoint(&t, &t_far, DisjointnessRule::Tripled).unwrap());
}

#[test]
fn multiscale_tree_not_disjoint_from_itself() {
    let coarse = make_tri_tile(2, 3, 0, 4).unwrap();
    let fine = make_tri_tile(0, 0, 1, 4).unwrap();
    let top = coarse.interval();
    let xi = (0..4000).map(|i| i as f64 * 0.01).find(|&x| {
        admits(&coarse, &top, x, 1, TreeKind::Lacunary) && admits(&fine, &top, x, 1, TreeKind::Lacunary)
    });
    let t = lac(vec![coarse, fine], top, xi.unwrap());
    assert!(!strongly_disjoint(&t, &t, DisjointnessRule::Tripled).unwrap());
    // Brute-force pair check: the finer-frequency member sits inside 3I_T.
    let finer_inside = t.tiles().iter().any(|q| {
        t.tiles().iter().any(|p| {
            let (a, b) = (p.omega(1).dilate(3.0), q.omega(1).dilate(3.0));
            interiors_meet(a, b) && p.omega(1).len() < q.omega(1).len() && interiors_meet((q.interval().lo(), q.interval().hi()), top.dilate(3.0))
        })
    });
    assert!(finer_inside);
}

#[test]
fn tree_json_uses_exact_dyadics() {
    let p = make_tri_tile(-1, 2, 3, 4).unwrap();
    let t = lac(vec![p], p.interval(), 90.0);
    let v = serde_json::to_value(t.to_json()).unwrap();
    assert_eq!(v["kind"], "lacunary");
    assert_eq!(v["top_interval"][0]["mantissa"], 3);
    assert_eq!(v["top_interval"][0]["exponent"], -1);
    assert_eq!(v["tiles"][0]["omega"][0][0]["mantissa"], 3);
    assert_eq!(v["tiles"][0]["omega"][0][0]["exponent"], 5);
}

#[test]
fn size_energy_random_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..100 {
        let c = random_collection(&mut rng, 20, 4);
        let r = check_size_energy(&c, [1.0 / 3.0; 3]).unwrap();
        assert!(r.ratio <= 10.0, "{r:?}");
    }
}

/// Singleton energy: best `2^d √L` over tops of length `L = 2^i`, where
/// `2^d < c/√L ≤ 2^{d+1}`.
fn singleton_energy(c: f64) -> f64 {
    (0..=TOP_LEVELS as i32)
        .map(|i| {
            let l = 2f64.powi(i);
            2f64.powi((c / l.sqrt()).log2().ceil() as i32 - 1) * l.sqrt()
        })
        .fold(0.0, f64::max)
}

#[test]
fn singleton_size_energy_ratio() {
    let p = make_tri_tile(0, 1, 0, 4).unwrap();
    let a = [0.5, 0.25, 2.0];
    let r = check_size_energy(&[(p, a)], [1.0 / 3.0; 3]).unwrap();
    let want_rhs: f64 = a.iter().map(|&c| c.powf(1.0 / 3.0) * singleton_energy(c).powf(2.0 / 3.0)).product();
    assert!((r.lhs - 0.25).abs() < 1e-15);
    assert_eq!(r.sizes, a);
    assert!((r.rhs - want_rhs).abs() < 1e-14, "{r:?}");
    assert!(r.ratio <= 10.0);
}

#[test]
fn energy_dominates_witness_tree() {
    let p = make_tri_tile(0, 1, 0, 4).unwrap();
    let q = make_tri_tile(0, 1, 1, 4).unwrap();
    let coll = [(p, [3.0, 0.0, 0.0]), (q, [3.0, 0.0, 0.0])];
    let top = DyadicInterval::new(0, 1);
    let xi = 16.0 * 2.0 - 1.0;
    let t = Tree::new(vec![p, q], top, xi, 1, TreeKind::Lacunary).unwrap();
    let m = t.mass(|_| 3.0);
    let d = m.log2().ceil() as i32 - 1;
    assert!(energy_j(&coll, 1).unwrap() >= 2f64.powi(d) * top.len().sqrt());
}

#[test]
fn size_estimate_for_tile_coefficients() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let proto = GridFunction::zeros(-16.0, 32.0, 1 << 14).unwrap();
    for _ in 0..5 {
        let mut tiles: Vec<TriTile> = (0..12)
            .map(|_| {
                let k = 2 * rng.random_range(0..=1);
                TriTile { k, ell: rng.random_range(0..4), r: rng.random_range(0..(8 >> k)), am: 4 }
            })
            .collect();
        tiles.sort();
        tiles.dedup();
        let f = band(&mut rng, &proto, -100.0, 100.0);
        let c = rng.random::<f64>() * 8.0;
        let f = f.with_samples(f.samples().iter().enumerate().map(|(i, z)| z * (-(f.x(i) - c).powi(2) / 4.0).exp()).collect()).unwrap();
        let sup = local_l2_sup(&f, &spatial_intervals(&tiles));
        for j in [1, 2] {
            let coll: Vec<WeightedTile> = tiles
                .iter()
                .map(|t| {
                    let mut a = [0.0; 3];
                    a[j - 1] = tile_coefficient(&f, t, j).unwrap();
                    (*t, a)
                })
                .collect();
            assert!(size_j(&coll, j).unwrap() <= 10.0 * sup);
        }
    }
}

struct HSetup {
    proto: GridFunction,
    h: GridFunction,
    tiles: Vec<TriTile>,
}

fn h_setup(seed: u64) -> (HSetup, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let proto = GridFunction::zeros(-4.0, 12.0, 1 << 13).unwrap();
    let h = band(&mut rng, &proto, -200.0, 200.0);
    let tiles = vec![TriTile { k: 0, ell: 1, r: 1, am: 4 }, TriTile { k: 0, ell: 1, r: 2, am: 4 }, TriTile { k: 2, ell: 2, r: 0, am: 4 }];
    (HSetup { proto, h, tiles }, rng)
}

fn h_coeffs_for(
    s: &HSetup,
    rng: &mut ChaCha8Rng,
    t: &TriTile,
    h: &GridFunction,
    lam_t: f64,
    params: ClassifyParams,
) -> Vec<LocalizedHCoeff> {
    let geom = ModelGeometry::new(4.0, t.am, t.k, t.ell, t.r).unwrap();
    let lam = GridFunction::from_real_fn(s.proto.left(), s.proto.right(), s.proto.len(), |_| lam_t * geom.lambda_scale()).unwrap();
    let (fl, fh) = geom.f_band();
    let (gl, gh) = geom.g_band();
    let f = band(rng, &s.proto, fl, fh);
    let g = band(rng, &s.proto, gl, gh);
    let cls = classify_indices(&f, &g, &lam, &geom, params).unwrap();
    localized_h_coeffs(h, &lam, &geom, t, &cls, &Budget::new(1 << 26)).unwrap()
}

#[test]
fn light_class_size_decays() {
    let (s, mut rng) = h_setup(151);
    let params = ClassifyParams::default();
    // ρ̃_4(0.105) ≈ 0.05, well under the light threshold 2^{-δ₁ am}.
    let coll: Vec<WeightedTile> = s
        .tiles
        .iter()
        .map(|t| {
            let hc = h_coeffs_for(&s, &mut rng, t, &s.h, 0.105, params);
            (*t, [0.0, 0.0, h_star(&hc, HClass::Light)])
        })
        .collect();
    let sup = local_l2_sup(&s.h, &spatial_intervals(&s.tiles));
    let bound = 10.0 * 2f64.powf(-params.delta1 * 4.0 / 2.0) * sup;
    assert!(size_j(&coll, 3).unwrap() <= bound);
}

#[test]
fn zero_h_and_out_of_band_lambda_give_zero() {
    let (s, mut rng) = h_setup(2);
    let t = s.tiles[0];
    let zero = s.proto.clone();
    let hc = h_coeffs_for(&s, &mut rng, &t, &zero, 1.0, ClassifyParams::default());
    assert!(!hc.is_empty() && hc.iter().all(|c| c.value == 0.0));
    let hc = h_coeffs_for(&s, &mut rng, &t, &s.h, 1e6, ClassifyParams::default());
    assert!(hc.iter().all(|c| c.value == 0.0));
}

#[test]
fn uniform_tree_aggregation() {
    let (s, mut rng) = h_setup(3);
    let params = ClassifyParams { delta1: 3.0, mu: 0.25 };
    let tree_tiles = [TriTile { k: 0, ell: 2, r: 0, am: 4 }, TriTile { k: 0, ell: 2, r: 1, am: 4 }];
    let top = DyadicInterval::new(0, 1);
    let total: f64 = tree_tiles
        .iter()
        .map(|t| h_star(&h_coeffs_for(&s, &mut rng, t, &s.h, 1.0, params), HClass::Uniform).powi(2))
        .sum();
    let local = local_l2(&s.h, &top).powi(2) * top.len();
    assert!(total > 0.0);
    assert!(total <= 10.0 * local, "{total} vs {local}");
}

#[test]
fn classification_mismatch_detected() {
    let (s, mut rng) = h_setup(4);
    let t = s.tiles[0];
    let geom = ModelGeometry::new(4.0, 4, 0, 1, 1).unwrap();
    let lam = GridFunction::from_real_fn(s.proto.left(), s.proto.right(), s.proto.len(), |_| 16.0).unwrap();
    let cls = classify_indices(&band(&mut rng, &s.proto, 32.0, 48.0), &band(&mut rng, &s.proto, 0.0, 16.0), &lam, &geom, ClassifyParams::default()).unwrap();
    let other = TriTile { r: 2, ..t };
    let e = localized_h_coeffs(&s.h, &lam, &geom, &other, &cls, &Budget::new(1 << 20)).unwrap_err();
    assert!(e.to_string().starts_with("classification-mismatch"));
}

fn tile_strategy() -> impl Strategy<Value = TriTile> {
    (-3i32..4, -20i64..20, -20i64..20, 1u32..4).prop_map(|(k, ell, r, h)| TriTile { k, ell, r, am: 2 * h })
}

proptest! {
    #[test]
    fn areas_rank_one_and_whitney(t in tile_strategy()) {
        for j in 1..=3 {
            prop_assert_eq!(t.area(j), 2f64.powi(t.am as i32));
        }
        prop_assert_eq!(TriTile::from_p1(t.interval(), t.omega(1), t.am).unwrap(), t);
        let w = t.whitney_ratio();
        prop_assert!((0.25..=4.0).contains(&w));
    }

    #[test]
    fn subtile_relations(t in tile_strategy(), u in 0i64..8, v in 0i64..8, n in 0i64..8, p in 0i64..8) {
        let big_n = t.big_n();
        let s = SubTile { parent: t, u: u % big_n, v: v % big_n, n: n % big_n, p: p % big_n };
        for j in 1..=3 {
            prop_assert_eq!(s.area(j), 1.0);
            prop_assert!(s.refines(j));
        }
        let (i1, i2, i3) = (s.interval(1), s.interval(2), s.interval(3));
        prop_assert_eq!(i3.lo(), 0.5 * (i1.lo() + i2.lo()));
        prop_assert_eq!(i3.hi(), 0.5 * (i1.hi() + i2.hi()));
        let (w1, w2, w3) = (s.omega(1), s.omega(2), s.omega(3));
        prop_assert_eq!(w3.lo(), w1.lo() + w2.lo());
        prop_assert!(w3.hi() <= w1.hi() + w2.hi());
    }

    #[test]
    fn overlapping_trees_lacunary_elsewhere(t in tile_strategy(), j in 1usize..=3, frac in 0.0f64..1.0) {
        let w = t.omega(j);
        let xi = (w.lo() + frac * w.len()) / if j == 3 { 2.0 } else { 1.0 };
        prop_assume!(admits(&t, &t.interval(), xi, j, TreeKind::Overlapping));
        for j2 in (1..=3).filter(|&x| x != j) {
            prop_assert!(!t.omega(j2).contains(top_component(xi, j2)));
            prop_assert!(lacunary_dilation(&t, xi, j2) <= 7);
        }
    }

    #[test]
    fn size_monotone_under_subcollections(seed in 0u64..10_000, keep in 0usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_collection(&mut rng, 20, 4);
        let sub = &c[..keep.min(c.len())];
        for j in 1..=3 {
            prop_assert!(size_j(sub, j).unwrap() <= size_j(&c, j).unwrap());
        }
    }

    #[test]
    fn singleton_energy_band(k in -2i32..3, c in 1e-3f64..1e3) {
        let p = TriTile { k, ell: 1, r: 0, am: 4 };
        let e = energy_j(&[(p, [c, c, c])], 2).unwrap();
        prop_assert!(e >= c / 2.0 && e <= c);
    }
}
