use crate::error::{Error, Result};
use crate::spectral::{GridSpec, ScalarField, VectorField};
use crate::stationary::StationaryState;

/// `Phi(sigma) = (((gamma-1)/2) sigma + 1)^(2/(gamma-1)) - sigma - 1`
pub fn phi_of_sigma(sigma: f64, gamma: f64) -> Result<f64> {
    Ok(density_from_sigma(sigma, gamma)? - sigma - 1.0)
}

/// `n = (((gamma-1)/2) sigma + 1)^(2/(gamma-1))`, i.e. `1 + sigma + Phi(sigma)`.
pub fn density_from_sigma(sigma: f64, gamma: f64) -> Result<f64> {
    let a = 0.5 * (gamma - 1.0) * sigma + 1.0;
    if !(a > 0.0) {
        return Err(Error::Positivity {
            what: "symmetrized sound speed",
            value: a,
        });
    }
    Ok(a.powf(2.0 / (gamma - 1.0)))
}

/// `sigma = 2/(gamma-1) (n^((gamma-1)/2) - 1)`
pub fn sigma_from_density(n: f64, gamma: f64) -> Result<f64> {
    if !(n > 0.0) {
        return Err(Error::Positivity {
            what: "density",
            value: n,
        });
    }
    Ok(2.0 / (gamma - 1.0) * (n.powf(0.5 * (gamma - 1.0)) - 1.0))
}

pub(crate) fn map_checked(f: &ScalarField, op: impl Fn(f64) -> Result<f64>) -> Result<ScalarField> {
    let data = f.data().iter().map(|&v| op(v)).collect::<Result<Vec<_>>>()?;
    Ok(ScalarField::from_vec(*f.grid(), data))
}

/// Something an explicit Runge-Kutta scheme can combine linearly.
pub trait OdeState: Clone {
    /// `self + h * d`
    fn add_scaled(&self, h: f64, d: &Self) -> Self;
}

impl OdeState for f64 {
    fn add_scaled(&self, h: f64, d: &Self) -> Self {
        self + h * d
    }
}

/// Primitive unknowns `(n, u, E, B)` at physical time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FluidState {
    pub n: ScalarField,
    pub u: VectorField,
    pub e: VectorField,
    pub b: VectorField,
    pub t: f64,
}

/// Symmetrized unknowns `(sigma, v, E~, B~)` at rescaled time `tau = sqrt(gamma) t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymState {
    pub sigma: ScalarField,
    pub v: VectorField,
    pub e: VectorField,
    pub b: VectorField,
    pub tau: f64,
}

/// Deviation of a [`SymState`] from `(sigma_st, 0, E_st / sqrt(gamma), 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationState {
    pub sigma: ScalarField,
    pub v: VectorField,
    pub e: VectorField,
    pub b: VectorField,
    pub tau: f64,
}

macro_rules! four_field_state {
    ($ty:ident, $s:ident, $v:ident, $clock:ident) => {
        impl $ty {
            pub fn grid(&self) -> &GridSpec {
                self.$s.grid()
            }

            pub fn is_finite(&self) -> bool {
                self.$s.is_finite() && self.$v.is_finite() && self.e.is_finite() && self.b.is_finite()
            }

            pub fn zeros(grid: GridSpec) -> Self {
                Self {
                    $s: ScalarField::zeros(grid),
                    $v: VectorField::zeros(grid),
                    e: VectorField::zeros(grid),
                    b: VectorField::zeros(grid),
                    $clock: 0.0,
                }
            }
        }

        impl OdeState for $ty {
            fn add_scaled(&self, h: f64, d: &Self) -> Self {
                let mut out = self.clone();
                out.$s.axpy(h, &d.$s);
                out.$v.axpy(h, &d.$v);
                out.e.axpy(h, &d.e);
                out.b.axpy(h, &d.b);
                out.$clock += h;
                out
            }
        }
    };
}

four_field_state!(FluidState, n, u, t);
four_field_state!(SymState, sigma, v, tau);
four_field_state!(PerturbationState, sigma, v, tau);

impl FluidState {
    /// `(n_st, 0, E_st, 0)`
    pub fn equilibrium(st: &StationaryState) -> Self {
        let g = *st.n.grid();
        Self {
            n: st.n.clone(),
            u: VectorField::zeros(g),
            e: st.e.clone(),
            b: VectorField::zeros(g),
            t: 0.0,
        }
    }

    pub fn constant(grid: GridSpec) -> Self {
        Self {
            n: ScalarField::constant(grid, 1.0),
            ..Self::zeros(grid)
        }
    }
}

pub fn to_symmetric(s: &FluidState, gamma: f64) -> Result<SymState> {
    let r = 1.0 / gamma.sqrt();
    Ok(SymState {
        sigma: map_checked(&s.n, |n| sigma_from_density(n, gamma))?,
        v: s.u.scale(r),
        e: s.e.scale(r),
        b: s.b.scale(r),
        tau: s.t * gamma.sqrt(),
    })
}

pub fn from_symmetric(s: &SymState, gamma: f64) -> Result<FluidState> {
    let r = gamma.sqrt();
    Ok(FluidState {
        n: map_checked(&s.sigma, |v| density_from_sigma(v, gamma))?,
        u: s.v.scale(r),
        e: s.e.scale(r),
        b: s.b.scale(r),
        t: s.tau / r,
    })
}

/// `V - (sigma_st, 0, E_st / sqrt(gamma), 0)`
pub fn perturbation(s: &SymState, st: &StationaryState) -> Result<PerturbationState> {
    Ok(PerturbationState {
        sigma: s.sigma.sub(&st.sigma)?,
        v: s.v.clone(),
        e: s.e.sub(&st.scaled_field())?,
        b: s.b.clone(),
        tau: s.tau,
    })
}

/// Inverse of [`perturbation`].
pub fn recompose(p: &PerturbationState, st: &StationaryState) -> Result<SymState> {
    Ok(SymState {
        sigma: p.sigma.add(&st.sigma)?,
        v: p.v.clone(),
        e: p.e.add(&st.scaled_field())?,
        b: p.b.clone(),
        tau: p.tau,
    })
}
