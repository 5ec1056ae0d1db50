use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{GridSpec, ScalarField, Spectral, VectorField};
use crate::stationary::StationaryState;

use super::state::FluidState;

/// One Gaussian bump `exp(-|x - c|^2 / w^2)` carrying a perturbation of every
/// field.
///
/// * density: `-div(d G)`, so the perturbation has zero mean;
/// * velocity: `c_u G`;
/// * magnetic field: `curl(c_A G)`, divergence-free;
/// * electric field: the longitudinal part fixed by Gauss's law plus the free
///   transverse part `curl(c_E G)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: [f64; 3],
    pub width: f64,
    pub density_dir: [f64; 3],
    pub velocity: [f64; 3],
    pub potential: [f64; 3],
    pub electric: [f64; 3],
}

impl Bump {
    /// Centered bump with fixed, generic directions.
    pub fn standard(width: f64) -> Self {
        Self {
            center: [0.0; 3],
            width,
            density_dir: [0.6, -0.3, 0.2],
            velocity: [0.3, 0.5, -0.4],
            potential: [-0.2, 0.4, 0.5],
            electric: [0.4, 0.1, -0.3],
        }
    }

    pub fn profile(&self, grid: GridSpec) -> ScalarField {
        let w2 = self.width * self.width;
        let c = self.center;
        ScalarField::from_fn(grid, |x| {
            let r2 = (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2) + (x[2] - c[2]).powi(2);
            (-r2 / w2).exp()
        })
    }
}

fn directed(g: &ScalarField, d: [f64; 3]) -> VectorField {
    VectorField::new([g.scale(d[0]), g.scale(d[1]), g.scale(d[2])])
}

/// Random bumps inside `[-4, 4]^3`, widths in `[1.5, 2.5]`, direction vectors
/// with entries in `[-1, 1]`.
pub fn random_bumps(seed: u64, count: usize) -> Vec<Bump> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v3 = |rng: &mut ChaCha8Rng, r: f64| {
        [
            rng.random_range(-r..r),
            rng.random_range(-r..r),
            rng.random_range(-r..r),
        ]
    };
    (0..count)
        .map(|_| Bump {
            center: v3(&mut rng, 4.0),
            width: rng.random_range(1.5..2.5),
            density_dir: v3(&mut rng, 1.0),
            velocity: v3(&mut rng, 1.0),
            potential: v3(&mut rng, 1.0),
            electric: v3(&mut rng, 1.0),
        })
        .collect()
}

/// Perturbation `(rho, u, E_1, B_1)` with `div E_1 = -rho` and `div B_1 = 0`
/// to round-off.
pub fn perturbation_fields(
    spectral: &Spectral,
    bumps: &[Bump],
    amplitude: f64,
) -> Result<(ScalarField, VectorField, VectorField, VectorField)> {
    let g = *spectral.grid();
    let mut dir_density = VectorField::zeros(g);
    let mut u = VectorField::zeros(g);
    let mut pot_b = VectorField::zeros(g);
    let mut pot_e = VectorField::zeros(g);
    for bump in bumps {
        let prof = bump.profile(g);
        dir_density.axpy(amplitude, &directed(&prof, bump.density_dir));
        u.axpy(amplitude, &directed(&prof, bump.velocity));
        pot_b.axpy(amplitude, &directed(&prof, bump.potential));
        pot_e.axpy(amplitude, &directed(&prof, bump.electric));
    }
    let rho = spectral.div(&dir_density)?.scale(-1.0);
    let b = spectral.curl(&pot_b)?;
    let e = spectral
        .gradient_of_inverse_laplacian(&rho.scale(-1.0))?
        .add(&spectral.curl(&pot_e)?)?;
    Ok((rho, u, e, b))
}

/// `(n_st + rho, u, E_st + E_1, B_1)`.
pub fn perturbed_state(
    spectral: &Spectral,
    st: &StationaryState,
    bumps: &[Bump],
    amplitude: f64,
) -> Result<FluidState> {
    let (rho, u, e, b) = perturbation_fields(spectral, bumps, amplitude)?;
    let n = st.n.add(&rho)?;
    if !(n.min() > 0.0) {
        return Err(Error::Positivity {
            what: "perturbed density",
            value: n.min(),
        });
    }
    Ok(FluidState {
        n,
        u,
        e: st.e.add(&e)?,
        b,
        t: 0.0,
    })
}
