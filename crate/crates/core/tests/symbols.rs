mod common;

use bilinop_core::symbols::{
    check_class_estimate, counterexample_symbol, decompose_elementary, reduced_symbol,
    transpose_symbol, BandCutoff, DecompositionConfig, ReducedCoefficient, SamplePlan,
};
use bilinop_core::{
    BumpProfile, GridSpec, LPFrame, Orientation, Symbol, SymbolClassParams, SymbolForm, C64,
};
use common::*;
use proptest::prelude::*;
use rand::Rng;

fn grid() -> GridSpec {
    GridSpec::new(32768, 12.0).unwrap()
}

#[test]
fn counterexample_terms_by_enumeration() {
    let psi = BandCutoff::counterexample_default();
    let sigma = counterexample_symbol(4, 9, &psi, &grid()).unwrap();
    let mut r = rng(21);
    for _ in 0..200 {
        let x = r.random_range(0.0..grid().period());
        let xi = r.random_range(-600.0..600.0);
        let eta = r.random_range(-600.0..600.0);
        let mut direct = C64::new(0.0, 0.0);
        for j in 4..=9 {
            let s = 2f64.powi(j);
            direct += C64::from_polar(1.0, -s * x) * psi.eval((eta - xi) / s);
        }
        assert!((sigma.eval(x, xi, eta) - direct).norm() < 1e-13);
    }
    // one contributing term at each dyadic point of the plateau
    for j in 4..=9 {
        let u = 2f64.powi(j);
        let active = (4..=9).filter(|&k| psi.eval(u / 2f64.powi(k)) != 0.0).count();
        assert_eq!(active, 1);
        assert!((sigma.eval(0.4, 0.0, u) - C64::from_polar(1.0, -u * 0.4)).norm() < 1e-15);
    }
    assert_eq!(sigma.eval(1.0, 3.0, 3.0 + 0.7 * 11.0), C64::new(0.0, 0.0));
}

#[test]
fn counterexample_rejects_bad_cutoffs_and_nyquist() {
    let psi = BandCutoff::counterexample_default();
    assert!(counterexample_symbol(4, 12, &psi, &GridSpec::new(4096, 1.0).unwrap()).is_err());
    let wide = BandCutoff::new(0.5, 5.0 / 6.0, 4.0 / 3.0, 5.0 / 3.0, BumpProfile::default());
    if let Ok(w) = wide {
        assert!(counterexample_symbol(4, 6, &w, &grid()).is_err());
    }
}

#[test]
fn reduced_symbol_matches_direct_formula() {
    let fr = LPFrame::new(grid(), BumpProfile::default()).unwrap();
    let coeffs = (0..6)
        .map(|_| ReducedCoefficient::new(std::f64::consts::TAU, |y| C64::from_polar(1.0, -y)))
        .collect();
    let sigma = reduced_symbol(coeffs, &fr).unwrap();
    let mut r = rng(22);
    for _ in 0..100 {
        let x = r.random_range(0.0..grid().period());
        let xi = r.random_range(-80.0..80.0);
        let eta = r.random_range(-80.0..80.0);
        let direct: C64 = (0..6)
            .map(|j| {
                let s = 2f64.powi(j);
                C64::from_polar(1.0, -s * x) * fr.psi_hat((xi - eta) / s)
            })
            .sum();
        assert!((sigma.eval(x, xi, eta) - direct).norm() < 1e-13);
    }
    let one = reduced_symbol(vec![ReducedCoefficient::constant(C64::new(1.0, 0.0))], &fr).unwrap();
    assert_eq!(one.eval(0.3, 2.5, 1.0), C64::new(fr.psi_hat(1.5), 0.0));
    let zero = reduced_symbol(vec![ReducedCoefficient::constant(C64::new(0.0, 0.0)); 3], &fr).unwrap();
    assert_eq!(zero.eval(0.3, 2.5, 1.0), C64::new(0.0, 0.0));
    let bad = ReducedCoefficient::new(1.0, |y| C64::new(y.sin(), 0.0));
    assert!(reduced_symbol(vec![bad], &fr).is_err());
}

#[test]
fn transposes() {
    let one = Symbol::one();
    let t = transpose_symbol(&one, 1).unwrap();
    assert_eq!(t.eval(0.0, 3.0, -7.0), C64::new(1.0, 0.0));
    let x_dep = Symbol::general(|x, _, _| C64::new(x.cos(), 0.0));
    assert!(transpose_symbol(&x_dep, 1).is_err());
    assert!(transpose_symbol(&one, 3).is_err());
}

#[test]
fn class_checker_constant_symbol_and_scaling() {
    let params = SymbolClassParams::new(0.0, 1.0, 0.0, None).unwrap();
    let plan = SamplePlan::for_grid(&GridSpec::new(1024, 4.0).unwrap(), 6, 3);
    let rep = check_class_estimate(&Symbol::one(), &params, 2, &plan, None).unwrap();
    assert_eq!(rep.constant(0, 0, 0), Some(1.0));
    for (key, v) in &rep.constants {
        if key != "0.0.0" {
            assert!(*v < 1e-9, "{key}: {v}");
        }
    }
}

#[test]
fn decomposition_of_a_single_bump() {
    let fr = LPFrame::new(GridSpec::new(1024, 4.0).unwrap(), BumpProfile::default()).unwrap();
    let f2 = fr.clone();
    let sigma = Symbol::multiplier(move |xi, eta| {
        C64::new(f2.psi_hat(xi - eta) * f2.psi_hat(xi + eta), 0.0)
    });
    let cfg = DecompositionConfig {
        levels: (0, 2),
        translations: (-4, 4),
        step: 0.25,
        ..DecompositionConfig::default()
    };
    let d = decompose_elementary(&sigma, &fr, &cfg).unwrap();
    let energy = |j: u32| -> f64 { d.cells.iter().filter(|c| c.j == j).map(|c| c.energy()).sum() };
    assert!(energy(0) > 10.0 * (energy(1) + energy(2)));
    for c in &d.cells {
        let g00 = c.gamma_at(0, 0, 0).norm();
        if c.energy() > 1e-3 * energy(0) {
            assert!(g00 >= c.max_off_center(), "cell ({}, {})", c.j, c.l);
        }
    }
    assert!(d.covered_residual < 1e-10);
}

#[test]
fn gamma_decays_for_smooth_symbols() {
    let fr = LPFrame::new(GridSpec::new(1024, 4.0).unwrap(), BumpProfile::default()).unwrap();
    let sigma = Symbol::multiplier(|xi, eta| C64::new((-(xi * xi + eta * eta) / 50.0).exp(), 0.0));
    let cfg = DecompositionConfig {
        levels: (0, 0),
        translations: (-2, 2),
        step: 1.0 / 32.0,
        ..DecompositionConfig::default()
    };
    let d = decompose_elementary(&sigma, &fr, &cfg).unwrap();
    for c in &d.cells {
        let rm = &c.decay.radial_max;
        let env: Vec<f64> = (0..rm.len())
            .map(|r| rm[r..].iter().copied().fold(0.0, f64::max))
            .collect();
        // the transition zones of the cell weight need a few coefficients to resolve
        for r in (6..=c.side / 4).step_by(2) {
            assert!(env[r] >= 4.0 * env[2 * r], "cell ({}, {}), R = {r}", c.j, c.l);
        }
        assert!(c.decay.verified);
    }
}

#[test]
fn residual_shrinks_with_coverage() {
    let fr = LPFrame::new(GridSpec::new(1024, 4.0).unwrap(), BumpProfile::default()).unwrap();
    let sigma = Symbol::one();
    let mut last = f64::INFINITY;
    for (jmax, lmax) in [(0u32, 1i64), (1, 3), (2, 6), (3, 10)] {
        let cfg = DecompositionConfig {
            levels: (0, jmax),
            translations: (-lmax, lmax),
            ..DecompositionConfig::default()
        };
        let d = decompose_elementary(&sigma, &fr, &cfg).unwrap();
        assert!(d.residual <= last + 1e-12);
        last = d.residual;
    }
}

fn arb_coeffs() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64, 0.0..3.0f64), 1..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn modulation_invariant_general_path(x in 0.0..75.0f64, xi in -50.0..50.0f64, eta in -50.0..50.0f64, c in arb_coeffs()) {
        let c2 = c.clone();
        let tau = move |x: f64, u: f64| -> C64 {
            c2.iter().map(|&(a, b, w)| C64::new(a, b) * C64::from_polar(1.0, w * x) * (-u * u / 30.0).exp()).sum()
        };
        let t2 = tau.clone();
        let s1 = Symbol::modulation_invariant(tau, Orientation::EtaMinusXi);
        let s2 = Symbol::modulation_invariant(t2.clone(), Orientation::XiMinusEta);
        prop_assert_eq!(s1.eval(x, xi, eta), t2(x, eta - xi));
        prop_assert_eq!(s2.eval(x, xi, eta), t2(x, xi - eta));
        let is_mi = matches!(s1.form(), SymbolForm::ModulationInvariant { .. });
        prop_assert!(is_mi);
    }

    #[test]
    fn transpose_is_an_involution(xi in -100.0..100.0f64, eta in -100.0..100.0f64, which in 1u8..=2) {
        let s = Symbol::multiplier(|a, b| C64::new((a * 0.3).sin() + b * b / 7.0, a * b / 11.0));
        let tt = transpose_symbol(&transpose_symbol(&s, which).unwrap(), which).unwrap();
        let (lhs, rhs) = (tt.eval(0.0, xi, eta), s.eval(0.0, xi, eta));
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }

    #[test]
    fn class_constants_scale_exactly(e in -6i32..6, seed in 0u64..1000) {
        let c = 2f64.powi(e);
        let fr_grid = GridSpec::new(1024, 4.0).unwrap();
        let sigma = Symbol::multiplier(|xi, eta| C64::new((xi - eta).sin() / (1.0 + xi * xi + eta * eta).sqrt(), 0.0));
        let scaled = sigma.scaled(C64::new(c, 0.0));
        let params = SymbolClassParams::new(0.0, 1.0, 0.0, None).unwrap();
        let plan = SamplePlan::for_grid(&fr_grid, 5, seed);
        let a = check_class_estimate(&sigma, &params, 2, &plan, None).unwrap();
        let b = check_class_estimate(&scaled, &params, 2, &plan, None).unwrap();
        for (k, v) in &a.constants {
            let w = b.constants[k];
            prop_assert!((w - c * v).abs() <= 1e-12 * (c * v).max(1e-300), "{}: {} vs {}", k, w, c * v);
        }
    }
}
