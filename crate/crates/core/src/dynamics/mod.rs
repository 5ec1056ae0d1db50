//! Fluid states, the variable change to symmetrized form, right-hand sides of
//! both formulations and explicit time integration.

mod init;
mod integrate;
mod rhs;
mod state;

pub use init::{perturbation_fields, perturbed_state, random_bumps, Bump};
pub use integrate::{run, step_rk4, IntegratorConfig, RunSummary};
pub use rhs::{nonlinear_sources, Dynamics, RhsTerms};
pub use state::{
    density_from_sigma, from_symmetric, perturbation, phi_of_sigma, recompose, sigma_from_density,
    to_symmetric, FluidState, OdeState, PerturbationState, SymState,
};
