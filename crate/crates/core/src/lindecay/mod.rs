//! Linearized flow around the constant state: per-frequency symbols, block
//! matrix exponentials, whole-space norms by quadrature, decay-rate fits and
//! a comparison against the nonlinear integrator.

mod duhamel;
mod fit;
mod propagate;
mod quadrature;
mod symbol;

pub use duhamel::{
    duhamel_crosscheck, propagate_fields, DuhamelOptions, DuhamelReport, DuhamelSetup,
    QUADRATIC_BAND,
};
pub use fit::{fit_decay, DecayFit, DecayLaw, DecayTarget, MIN_SAMPLES};
pub use propagate::{propagate_mode, BlockExp, ModePropagator, CONDITION_LIMIT};
pub use quadrature::{
    log_time_grid, whole_space_norm, Component, DecayEvaluator, InitialProfile, MagneticProfile,
    NormRequest, QuadratureOptions, QuadratureScheme,
};
pub use symbol::{
    longitudinal_block, reduced_longitudinal_block, symbol_matrix, transverse_block, Frame,
    ModeState, Symbol,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Eigenvalue survey of the symbol over random frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub samples: usize,
    pub max_radius: f64,
    /// largest real part over all eigenvalues of the full symbol
    pub max_real_part: f64,
    /// `min -Re(lambda) (1 + k^2) / k^2` over the Gauss-consistent blocks
    pub c_rational: f64,
    /// `min -Re(lambda) (1 + k^2)^2 / k^2`, the shape that survives large `k`
    pub c_squared: f64,
}

/// Eigenvalues of the Gauss-consistent part at `|xi| = k`: the reduced
/// longitudinal pair and the transverse block.
pub fn consistent_eigenvalues(k: f64, gamma: f64) -> Vec<num_complex::Complex64> {
    let b = (0.75 + gamma * k * k).sqrt();
    let mut out = vec![
        num_complex::Complex64::new(-0.5, b),
        num_complex::Complex64::new(-0.5, -b),
    ];
    out.extend_from_slice(&BlockExp::new(transverse_block(k)).eigenvalues());
    out
}

pub fn spectral_stability(gamma: f64, samples: usize, max_radius: f64, seed: u64) -> StabilityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_real = f64::NEG_INFINITY;
    let mut c_rational = f64::INFINITY;
    let mut c_squared = f64::INFINITY;
    for _ in 0..samples {
        let xi: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
        let r = max_radius * rng.random::<f64>().cbrt();
        let xi = xi.map(|x| x / n * r);
        for z in ModePropagator::new(xi, gamma).eigenvalues() {
            max_real = max_real.max(z.re);
        }
        let k2 = r * r;
        let worst = consistent_eigenvalues(r, gamma)
            .iter()
            .map(|z| -z.re)
            .fold(f64::INFINITY, f64::min);
        c_rational = c_rational.min(worst * (1.0 + k2) / k2);
        c_squared = c_squared.min(worst * (1.0 + k2).powi(2) / k2);
    }
    StabilityReport {
        samples,
        max_radius,
        max_real_part: max_real,
        c_rational,
        c_squared,
    }
}
