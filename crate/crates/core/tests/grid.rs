mod common;

use bilinop_core::io::{load_sampled, load_spectral, save_sampled, save_spectral};
use bilinop_core::{
    analyze, lebesgue_norm, pointwise_product, synthesize, AliasPolicy, GridSpec, SampledFunction,
    SpectralCoefficients, C64,
};
use common::*;
use proptest::prelude::*;

#[test]
fn round_trip_against_direct_transforms() {
    let grid = GridSpec::new(64, 1.7).unwrap();
    let mut r = rng(1);
    let f = SampledFunction::new(grid, (0..64).map(|_| random_c64(&mut r)).collect()).unwrap();
    let c = analyze(&f);
    let direct = direct_analysis(&f);
    for (m, v) in &direct {
        assert!((c.get(*m) - v).norm() < 1e-13);
    }
    let back = direct_synthesis(&c.entries(), grid);
    assert!(max_diff(&back, f.values()) < 1e-12);
}

#[test]
fn sparse_and_dense_synthesis_agree() {
    let grid = GridSpec::new(128, 12.0).unwrap();
    let entries = [(5, C64::new(0.3, -1.0)), (-17, C64::new(2.0, 0.5))];
    let sparse = SpectralCoefficients::sparse(grid, entries).unwrap();
    let mut slots = vec![C64::new(0.0, 0.0); 128];
    for (m, c) in entries {
        slots[grid.slot(m)] = c;
    }
    let dense = SpectralCoefficients::from_slots(grid, slots).unwrap();
    let a = synthesize(&sparse);
    let b = synthesize(&dense);
    assert!(a.max_abs_diff(&b).unwrap() < 1e-14);
}

#[test]
fn gaussian_norm_against_riemann_sum() {
    let grid = GridSpec::new(512, 2.0).unwrap();
    let centre = grid.period() / 2.0;
    let bump = |x: f64| (-(x - centre).powi(2) / 2.0).exp();
    let f = SampledFunction::from_fn(grid, |x| C64::new(bump(x), 0.0));
    let mut sum = 0.0;
    for n in 0..grid.n() {
        sum += bump(n as f64 * grid.period() / grid.n() as f64).powi(2);
    }
    let oracle = (sum * grid.period() / grid.n() as f64).sqrt();
    assert!((lebesgue_norm(&f, 2.0).unwrap() - oracle).abs() < 1e-12 * oracle);
}

#[test]
fn product_spectrum_is_the_convolution() {
    let grid = GridSpec::new(128, 3.0).unwrap();
    let mut r = rng(2);
    let f = random_band(grid, -10, 14, &mut r);
    let g = random_band(grid, -20, 5, &mut r);
    let fg = pointwise_product(&f, &g, AliasPolicy::Raise).unwrap();
    let cf = analyze(&f).entries();
    let cg = analyze(&g);
    let cp = analyze(&fg);
    for w in grid.indices() {
        let mut conv = C64::new(0.0, 0.0);
        for (a, ca) in &cf {
            conv += ca * cg.get(w - a);
        }
        assert!((cp.get(w) - conv).norm() < 1e-12, "w = {w}");
    }
    let one = SampledFunction::constant(grid, C64::new(1.0, 0.0));
    let same = pointwise_product(&f, &one, AliasPolicy::Raise).unwrap();
    assert!(same.max_abs_diff(&f).unwrap() < 1e-15);
}

#[test]
fn files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let grid = GridSpec::new(32, 12.0).unwrap();
    let mut r = rng(3);
    let f = random_band(grid, -5, 5, &mut r);
    let p = dir.path().join("f.csv");
    save_sampled(&p, &f).unwrap();
    assert_eq!(load_sampled(&p).unwrap(), f);
    let c = analyze(&f).pruned(1e-12);
    let q = dir.path().join("f.spec");
    save_spectral(&q, &c).unwrap();
    assert_eq!(load_spectral(&q).unwrap().entries(), c.entries());
}

fn arb_function(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), n)
}

fn to_fn(grid: GridSpec, v: &[(f64, f64)]) -> SampledFunction {
    SampledFunction::new(grid, v.iter().map(|&(a, b)| C64::new(a, b)).collect()).unwrap()
}

proptest! {
    #[test]
    fn round_trip_identity(v in arb_function(64), l in 0.1..50.0f64) {
        let grid = GridSpec::new(64, l).unwrap();
        let f = to_fn(grid, &v);
        let back = synthesize(&analyze(&f));
        let scale = f.max_abs().max(1e-300);
        prop_assert!(back.max_abs_diff(&f).unwrap() <= 1e-12 * scale);
    }

    #[test]
    fn parseval(v in arb_function(128), l in 0.1..50.0f64) {
        let grid = GridSpec::new(128, l).unwrap();
        let f = to_fn(grid, &v);
        let lhs = lebesgue_norm(&f, 2.0).unwrap().powi(2);
        let rhs = grid.period() * analyze(&f).entries().iter().map(|(_, c)| c.norm_sqr()).sum::<f64>();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1e-300));
    }

    #[test]
    fn analysis_is_linear(u in arb_function(32), v in arb_function(32), a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let grid = GridSpec::new(32, 2.0).unwrap();
        let (fu, fv) = (to_fn(grid, &u), to_fn(grid, &v));
        let alpha = C64::new(a, b);
        let mut comb = fu.clone();
        comb.axpy(alpha, &fv).unwrap();
        let lhs = analyze(&comb);
        let (cu, cv) = (analyze(&fu), analyze(&fv));
        for m in grid.indices() {
            prop_assert!((lhs.get(m) - cu.get(m) - alpha * cv.get(m)).norm() < 1e-12);
        }
        let back = synthesize(&lhs);
        prop_assert!(back.max_abs_diff(&comb).unwrap() < 1e-11);
    }

    #[test]
    fn norms_are_homogeneous_and_subadditive(
        u in arb_function(64), v in arb_function(64), c in -5.0..5.0f64, pi in 0usize..3
    ) {
        let p = [2.0, 4.0, f64::INFINITY][pi];
        let grid = GridSpec::new(64, 1.0).unwrap();
        let (fu, fv) = (to_fn(grid, &u), to_fn(grid, &v));
        let nu = lebesgue_norm(&fu, p).unwrap();
        let scaled = lebesgue_norm(&fu.scale(C64::new(c, 0.0)), p).unwrap();
        prop_assert!((scaled - c.abs() * nu).abs() <= 1e-12 * (1.0 + scaled));
        let sum = lebesgue_norm(&fu.add(&fv).unwrap(), p).unwrap();
        prop_assert!(sum <= nu + lebesgue_norm(&fv, p).unwrap() + 1e-12);
    }
}
