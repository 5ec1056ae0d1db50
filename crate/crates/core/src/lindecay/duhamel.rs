use serde::{Deserialize, Serialize};

use super::propagate::ModePropagator;
use super::symbol::ModeState;
use crate::dynamics::{perturbation_fields, run, Bump, Dynamics, FluidState, IntegratorConfig};
use crate::error::{Error, Result};
use crate::par;
use crate::spectral::{l2_norm, l2_norm_vec, GridSpec, ScalarField, Spectral, SpectralField, VectorField};
use crate::stationary::{
    picard_iterate, BackgroundDensity, BackgroundProfile, ModelParams, PicardOptions,
    StationaryState,
};

/// Halving ratios in this band are read as quadratic scaling.
pub const QUADRATIC_BAND: (f64, f64) = (0.2, 0.35);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DuhamelOptions {
    pub n: usize,
    pub box_len: f64,
    pub gamma: f64,
    pub bump_width: f64,
    pub t_end: f64,
    pub dt: f64,
    /// amplitude of the Gaussian ion background; `0` means `n_b = 1`
    pub background_eps: f64,
    pub background_width: f64,
}

impl Default for DuhamelOptions {
    fn default() -> Self {
        Self {
            n: 16,
            box_len: 12.0,
            gamma: 5.0 / 3.0,
            bump_width: 1.5,
            t_end: 1.0,
            dt: 0.01,
            background_eps: 0.0,
            background_width: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DuhamelReport {
    pub amplitude: f64,
    pub background_eps: f64,
    pub t_end: f64,
    /// `|| U(t) - exp(tL) U_0 ||` at amplitude `a`
    pub gap: f64,
    /// same at amplitude `a / 2`
    pub gap_half: f64,
    pub ratio: f64,
    /// `|| exp(tL) U_0 ||` at amplitude `a`, for scale
    pub linear_norm: f64,
    pub quadratic: bool,
}

/// Sets up the grid, background and stationary state once for several runs.
pub struct DuhamelSetup {
    spectral: Spectral,
    dynamics: Dynamics,
    stationary: StationaryState,
    bumps: Vec<Bump>,
    opts: DuhamelOptions,
}

impl DuhamelSetup {
    pub fn new(opts: DuhamelOptions) -> Result<Self> {
        if !(opts.t_end > 0.0 && opts.dt > 0.0) {
            return Err(Error::config("duhamel.t_end", "t_end and dt must be > 0"));
        }
        let params = ModelParams::new(opts.gamma)?;
        let spectral = Spectral::new(GridSpec::new(opts.n, opts.box_len)?);
        let g = *spectral.grid();
        let (nb, stationary) = if opts.background_eps == 0.0 {
            (
                ScalarField::constant(g, 1.0),
                StationaryState::trivial(&spectral, opts.gamma),
            )
        } else {
            let bg = BackgroundDensity::new(
                g,
                BackgroundProfile::gaussian(opts.background_eps, opts.background_width),
            )?;
            let st = picard_iterate(&spectral, &bg, params, PicardOptions::default())?;
            (bg.field().clone(), st)
        };
        let dynamics = Dynamics::new(spectral.clone(), nb, opts.gamma);
        let mut bump = Bump::standard(opts.bump_width);
        bump.center = [0.3, -0.2, 0.1];
        Ok(Self {
            spectral,
            dynamics,
            stationary,
            bumps: vec![bump],
            opts,
        })
    }

    /// `(gap, linear norm)` at amplitude `a`.
    pub fn gap(&self, amplitude: f64) -> Result<(f64, f64)> {
        let s = &self.spectral;
        // Band-limit the data so the dealiased flux has the same linear part
        // as the symbol; the filter commutes with div, so Gauss's law holds.
        let (rho, u, e, b) = perturbation_fields(s, &self.bumps, amplitude)?;
        let (rho, u, e, b) = (
            s.dealias_field(&rho)?,
            s.dealias_vec(&u)?,
            s.dealias_vec(&e)?,
            s.dealias_vec(&b)?,
        );
        let (rho_l, u_l, e_l, b_l) = propagate_fields(s, self.opts.gamma, &rho, &u, &e, &b, self.opts.t_end)?;

        let eq = FluidState::equilibrium(&self.stationary);
        let start = FluidState {
            n: eq.n.add(&rho)?,
            u,
            e: eq.e.add(&e)?,
            b,
            t: 0.0,
        };
        let cfg = IntegratorConfig {
            t_end: self.opts.t_end,
            cadence: self.opts.t_end,
            dt: Some(self.opts.dt),
            ..Default::default()
        };
        let (end, _) = run(&self.dynamics, start, &cfg, |_| Ok(()))?;
        let gap = l2_norm(&end.n.sub(&eq.n)?.sub(&rho_l)?)
            + l2_norm_vec(&end.u.sub(&u_l)?)
            + l2_norm_vec(&end.e.sub(&eq.e)?.sub(&e_l)?)
            + l2_norm_vec(&end.b.sub(&b_l)?);
        let lin = l2_norm(&rho_l) + l2_norm_vec(&u_l) + l2_norm_vec(&e_l) + l2_norm_vec(&b_l);
        Ok((gap, lin))
    }

    pub fn report(&self, amplitude: f64) -> Result<DuhamelReport> {
        let (gap, linear_norm) = self.gap(amplitude)?;
        let (gap_half, _) = self.gap(0.5 * amplitude)?;
        let ratio = if gap > 0.0 { gap_half / gap } else { 0.0 };
        Ok(DuhamelReport {
            amplitude,
            background_eps: self.opts.background_eps,
            t_end: self.opts.t_end,
            gap,
            gap_half,
            ratio,
            linear_norm,
            quadratic: ratio >= QUADRATIC_BAND.0 && ratio <= QUADRATIC_BAND.1,
        })
    }
}

/// Apply `exp(tL(kd))` to every grid mode of `(rho, u, E, B)`.
pub fn propagate_fields(
    spectral: &Spectral,
    gamma: f64,
    rho: &ScalarField,
    u: &VectorField,
    e: &VectorField,
    b: &VectorField,
    t: f64,
) -> Result<(ScalarField, VectorField, VectorField, VectorField)> {
    let r = spectral.transform(rho)?;
    let uh = spectral.transform_vec(u)?;
    let eh = spectral.transform_vec(e)?;
    let bh = spectral.transform_vec(b)?;
    let g = *spectral.grid();
    let modes = par::map_collect(g.len(), |idx| {
        let m = ModeState::new(
            spectral.kd(idx),
            r.coeffs()[idx],
            std::array::from_fn(|a| uh[a].coeffs()[idx]),
            std::array::from_fn(|a| eh[a].coeffs()[idx]),
            std::array::from_fn(|a| bh[a].coeffs()[idx]),
        );
        ModePropagator::new(m.xi, gamma).apply(&m, t).amp
    });
    let field = |slot: usize| {
        let mut f = SpectralField::zeros(g);
        for (c, m) in f.coeffs_mut().iter_mut().zip(&modes) {
            *c = m[slot];
        }
        f
    };
    let vec = |first: usize| -> Result<VectorField> {
        spectral.inverse_vec(&[field(first), field(first + 1), field(first + 2)])
    };
    Ok((spectral.inverse_transform(&field(0))?, vec(1)?, vec(4)?, vec(7)?))
}

/// One run of the cross-check: gap at `a` and `a / 2`.
pub fn duhamel_crosscheck(opts: DuhamelOptions, amplitude: f64) -> Result<DuhamelReport> {
    DuhamelSetup::new(opts)?.report(amplitude)
}
