//! Numerical laboratory for the compressible Euler–Maxwell system with a
//! nonconstant ion background.
//!
//! * [`spectral`]: periodic-box pseudo-spectral calculus and discrete norms.
//! * [`stationary`]: Yukawa-kernel fixed-point construction of the steady state.
//! * [`dynamics`]: variable transforms, right-hand sides and RK4 evolution.
//! * [`energy`]: energy / dissipation functionals and Lyapunov certification.
//! * [`lindecay`]: Fourier-mode propagation and whole-space decay rates.
//! * [`experiment`]: configuration, subcommand pipelines and output formats.

pub mod error;
mod par;
pub mod snapshot;
pub mod dynamics;
pub mod energy;
pub mod spectral;
pub mod lindecay;
pub mod experiment;
pub mod stationary;

pub use error::{Error, Result};
pub use par::set_threads;
