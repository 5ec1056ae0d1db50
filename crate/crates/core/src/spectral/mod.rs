//! Periodic-box spectral calculus: grids, fields, FFT-based differential
//! operators, 2/3-rule dealiasing and the discrete Sobolev norms.

mod field;
mod grid;
mod multi_index;
mod norms;
mod ops;

pub use field::{ScalarField, SpectralField, VectorField};
pub use grid::GridSpec;
pub use multi_index::{sobolev_weight, MultiIndex};
pub use norms::{inner, inner_vec, l2_norm, l2_norm_vec};
pub use ops::Spectral;


use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random real field whose coefficients vanish outside `|m_i| <= max_index`.
///
/// Coefficients are drawn uniformly in the unit disc and symmetrized, so the
/// result is real and band-limited by construction.
pub fn random_band_limited(spectral: &Spectral, max_index: u32, seed: u64) -> ScalarField {
    let g = *spectral.grid();
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); g.len()];
    for idx in 0..g.len() {
        let [i, j, k] = g.unflatten(idx);
        let inside = [i, j, k]
            .iter()
            .all(|&m| g.signed_index(m).unsigned_abs() <= max_index as u64 && m != n / 2);
        if inside {
            coeffs[idx] = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
    }
    let mirror = |i: usize| (n - i) % n;
    let mut sym = coeffs.clone();
    for idx in 0..g.len() {
        let [i, j, k] = g.unflatten(idx);
        let m = g.index(mirror(i), mirror(j), mirror(k));
        sym[idx] = 0.5 * (coeffs[idx] + coeffs[m].conj());
    }
    let scale = g.len() as f64 / (2 * max_index as usize + 1).pow(3) as f64;
    for c in &mut sym {
        *c *= scale;
    }
    spectral
        .inverse_transform(&SpectralField::from_parts(g, sym, false))
        .expect("same grid")
}
