//! Discrete Sobolev norm
//!
//! ```text
//! ‖f‖_{W^{s,p}} = ‖Φ ∗ f‖_p + ‖(Σ_{k=0}^{kMax} 2^{2ks} |Ψ_{2^{-k}} ∗ f|²)^{1/2}‖_p
//! ```
//!
//! Frequencies beyond `2^{kMax+1}` are not measured.

use super::SobolevParams;
use crate::error::Result;
use crate::grid::{analyze, lp_of_moduli, synthesize, SampledFunction};
use crate::C64;

pub fn sobolev_norm(f: &SampledFunction, params: &SobolevParams) -> Result<f64> {
    let frame = params.frame;
    let grid = *frame.grid();
    grid.ensure_same(f.grid())?;
    let h = grid.spacing();
    let c = analyze(f);

    let low = synthesize(&c.apply_multiplier(|xi| C64::new(frame.phi_hat(xi), 0.0)));
    let low_norm = lp_of_moduli(low.values().iter().map(|v| v.norm()), params.p, h);

    let mut square = vec![0.0f64; grid.n()];
    for k in 0..=frame.k_max() {
        let band = c.apply_multiplier(|xi| C64::new(frame.level_hat(k, xi), 0.0));
        if band.max_abs() == 0.0 {
            continue;
        }
        let weight = 2f64.powf(2.0 * k as f64 * params.s);
        for (acc, v) in square.iter_mut().zip(synthesize(&band).values()) {
            *acc += weight * v.norm_sqr();
        }
    }
    let high_norm = lp_of_moduli(square.iter().map(|v| v.sqrt()), params.p, h);
    Ok(low_norm + high_norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{BumpProfile, LPFrame};
    use crate::grid::GridSpec;

    #[test]
    fn single_band_harmonic() {
        let grid = GridSpec::new(1024, 2.0).unwrap();
        let frame = LPFrame::new(grid, BumpProfile::default()).unwrap();
        // ξ₀ = 8: Ψ̂(2^{-3}·8) = 1 and every other level vanishes.
        let f = SampledFunction::harmonic(grid, 16);
        for (s, p) in [(0.0, 2.0), (1.0, 2.0), (1.5, 4.0)] {
            let params = SobolevParams::new(s, p, &frame).unwrap();
            let expected = 2f64.powf(3.0 * s) * grid.period().powf(1.0 / p);
            let got = sobolev_norm(&f, &params).unwrap();
            assert!((got - expected).abs() < 1e-10 * expected, "s={s} p={p}");
        }
        let zero = SampledFunction::zeros(grid);
        let params = SobolevParams::new(1.0, 2.0, &frame).unwrap();
        assert_eq!(sobolev_norm(&zero, &params).unwrap(), 0.0);
    }
}
