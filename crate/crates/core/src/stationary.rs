//! Steady states `(n_st, E_st)` of the Euler–Maxwell system.
//!
//! With the enthalpy variable `Q = gamma/(gamma-1) (n^(gamma-1) - 1)` the
//! stationary equations collapse to the semilinear elliptic problem
//! `lap Q = ((gamma-1)/gamma Q + 1)^(1/(gamma-1)) - n_b`, which is rewritten
//! as the fixed point `Q = G * (g(Q) - (n_b - 1))` of a Yukawa convolution
//! and solved by Picard iteration from `Q = 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{l2_norm, GridSpec, ScalarField, Spectral, VectorField};

/// Pressure-law exponent. `A = nu = n_inf = 1` throughout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    gamma: f64,
}

impl ModelParams {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 1.0) {
            return Err(Error::config(
                "model.gamma",
                format!("adiabatic exponent must satisfy gamma > 1, got {gamma}"),
            ));
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        Self { gamma: 5.0 / 3.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileFamily {
    /// `1 + eps exp(-|x|^2 / w^2)`
    Gaussian,
    /// Two Gaussians of half height centered at `(+-1.5 w, 0, 0)`.
    DoubleBump,
}

impl std::str::FromStr for ProfileFamily {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "gaussian" => Ok(Self::Gaussian),
            "double-bump" => Ok(Self::DoubleBump),
            other => Err(format!("unknown profile `{other}` (gaussian | double-bump)")),
        }
    }
}

/// Analytic descriptor of the ion background.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BackgroundProfile {
    pub family: ProfileFamily,
    pub eps: f64,
    pub width: f64,
}

impl BackgroundProfile {
    pub fn gaussian(eps: f64, width: f64) -> Self {
        Self {
            family: ProfileFamily::Gaussian,
            eps,
            width,
        }
    }

    pub fn eval(&self, x: [f64; 3]) -> f64 {
        let w2 = self.width * self.width;
        let bump = |c: f64| {
            let dx = x[0] - c;
            (-(dx * dx + x[1] * x[1] + x[2] * x[2]) / w2).exp()
        };
        match self.family {
            ProfileFamily::Gaussian => 1.0 + self.eps * bump(0.0),
            ProfileFamily::DoubleBump => {
                let c = 1.5 * self.width;
                1.0 + 0.5 * self.eps * (bump(c) + bump(-c))
            }
        }
    }

    pub fn with_eps(&self, eps: f64) -> Self {
        Self { eps, ..*self }
    }
}

/// Sampled background `n_b`, positive everywhere and equal to 1 on the box
/// boundary to within `1e-10`.
#[derive(Debug, Clone)]
pub struct BackgroundDensity {
    field: ScalarField,
    profile: BackgroundProfile,
}

/// Largest admissible deviation of `n_b` from 1 on the outer grid layer.
pub const BOUNDARY_TOL: f64 = 1e-10;

impl BackgroundDensity {
    pub fn new(grid: GridSpec, profile: BackgroundProfile) -> Result<Self> {
        if !(profile.width > 0.0 && profile.eps.is_finite()) {
            return Err(Error::config(
                "background",
                format!("need width > 0 and finite eps, got {profile:?}"),
            ));
        }
        let field = ScalarField::from_fn(grid, |x| profile.eval(x));
        let min = field.min();
        if min <= 0.0 {
            return Err(Error::Positivity {
                what: "background density",
                value: min,
            });
        }
        let n = grid.n();
        let mut worst: f64 = 0.0;
        for (idx, v) in field.data().iter().enumerate() {
            let [i, j, k] = grid.unflatten(idx);
            if [i, j, k].iter().any(|&m| m == 0 || m == n - 1) {
                worst = worst.max((v - 1.0).abs());
            }
        }
        if worst > BOUNDARY_TOL {
            return Err(Error::config(
                "grid.box_l",
                format!(
                    "background deviates from 1 by {worst:.2e} on the box boundary; enlarge the box"
                ),
            ));
        }
        Ok(Self { field, profile })
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn profile(&self) -> &BackgroundProfile {
        &self.profile
    }

    /// `n_b - 1`
    pub fn deviation(&self) -> ScalarField {
        self.field.map(|v| v - 1.0)
    }
}

/// `g(x) = ((gamma-1)/gamma x + 1)^(1/(gamma-1)) - x/gamma - 1`
pub fn g_nonlinearity(x: f64, gamma: f64) -> Result<f64> {
    let base = (gamma - 1.0) / gamma * x + 1.0;
    if !(base > 0.0) {
        return Err(Error::Positivity {
            what: "g nonlinearity base",
            value: base,
        });
    }
    Ok(base.powf(1.0 / (gamma - 1.0)) - x / gamma - 1.0)
}

/// Density recovered from the enthalpy variable, `((gamma-1)/gamma Q + 1)^(1/(gamma-1))`.
pub fn density_from_enthalpy(q: f64, gamma: f64) -> Result<f64> {
    let base = (gamma - 1.0) / gamma * q + 1.0;
    if !(base > 0.0) {
        return Err(Error::Positivity {
            what: "enthalpy-to-density base",
            value: base,
        });
    }
    Ok(base.powf(1.0 / (gamma - 1.0)))
}

/// `G * f` with `G(x) = -exp(-|x|/sqrt(gamma)) / (4 pi |x|)`, i.e. the
/// inverse of `lap - 1/gamma`: multiplier `-1 / (|xi|^2 + 1/gamma)`.
pub fn yukawa_convolve(spectral: &Spectral, f: &ScalarField, gamma: f64) -> Result<ScalarField> {
    let f_hat = spectral.transform(f)?;
    let out = spectral.apply_multiplier(&f_hat, |k| {
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        Complex64::new(-1.0 / (k2 + 1.0 / gamma), 0.0)
    });
    spectral.inverse_transform(&out)
}

/// `||G||_{L^1} = int_0^inf r exp(-r/sqrt(gamma)) dr = gamma`.
pub fn kernel_l1_norm(gamma: f64) -> f64 {
    gamma
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Refuse backgrounds with `||n_b - 1||_H2` above this.
    pub smallness_limit: f64,
    /// Contraction factors above this are flagged in the log.
    pub warn_factor: f64,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 200,
            smallness_limit: 0.5,
            warn_factor: 0.5,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PicardLog {
    /// `||phi_{j+1} - phi_j||_H2` for each application of the map.
    pub increments: Vec<f64>,
    /// Ratios of consecutive nonzero increments.
    pub factors: Vec<f64>,
    /// Number of map applications performed.
    pub applications: usize,
    /// Applications that changed the iterate (the final confirming one excluded).
    pub iterations: usize,
    /// Some logged factor exceeded `warn_factor`.
    pub slow_contraction: bool,
}

impl PicardLog {
    pub fn max_factor(&self) -> f64 {
        self.factors.iter().copied().fold(0.0, f64::max)
    }
}

/// Converged steady state.
#[derive(Debug, Clone)]
pub struct StationaryState {
    pub gamma: f64,
    /// Enthalpy variable; the potential is `phi_st = -Q`.
    pub q: ScalarField,
    pub n: ScalarField,
    /// `2/(gamma-1) (n^((gamma-1)/2) - 1)`
    pub sigma: ScalarField,
    /// `-grad Q`
    pub e: VectorField,
    /// `n - 1`
    pub rho: ScalarField,
    pub log: PicardLog,
}

fn map_checked(f: &ScalarField, op: impl Fn(f64) -> Result<f64>) -> Result<ScalarField> {
    let data = f.data().iter().map(|&v| op(v)).collect::<Result<Vec<_>>>()?;
    Ok(ScalarField::from_vec(*f.grid(), data))
}

/// One application of the fixed-point map `T(phi) = G * (g(phi) - (n_b - 1))`.
pub fn fixed_point_map(
    spectral: &Spectral,
    phi: &ScalarField,
    nb_dev: &ScalarField,
    gamma: f64,
) -> Result<ScalarField> {
    let src = map_checked(phi, |v| g_nonlinearity(v, gamma))?.sub(nb_dev)?;
    yukawa_convolve(spectral, &src, gamma)
}

pub fn picard_iterate(
    spectral: &Spectral,
    background: &BackgroundDensity,
    params: ModelParams,
    opts: PicardOptions,
) -> Result<StationaryState> {
    if !(opts.tol > 0.0) {
        return Err(Error::config("stationary.tol", "tolerance must be positive"));
    }
    let gamma = params.gamma();
    let nb_dev = background.deviation();
    let size = spectral.sobolev_norm(&nb_dev, 2)?;
    if size > opts.smallness_limit {
        return Err(Error::NotSmall {
            norm: size,
            limit: opts.smallness_limit,
        });
    }

    let mut log = PicardLog::default();
    let mut phi = ScalarField::zeros(*spectral.grid());
    let mut above_one = 0;
    loop {
        if log.applications >= opts.max_iter {
            return Err(Error::Divergence {
                amplitude: background.profile().eps,
                factor: log.factors.last().copied().unwrap_or(f64::NAN),
                iterations: log.applications,
            });
        }
        let next = fixed_point_map(spectral, &phi, &nb_dev, gamma)?;
        let inc = spectral.sobolev_norm(&next.sub(&phi)?, 2)?;
        log.applications += 1;
        if let Some(&prev) = log.increments.last() {
            if prev > 0.0 && inc > 0.0 {
                let factor = inc / prev;
                log.factors.push(factor);
                if factor > opts.warn_factor {
                    log.slow_contraction = true;
                }
                above_one = if factor >= 1.0 { above_one + 1 } else { 0 };
                if above_one >= 2 {
                    return Err(Error::Divergence {
                        amplitude: background.profile().eps,
                        factor,
                        iterations: log.applications,
                    });
                }
            }
        }
        log.increments.push(inc);
        if inc > 0.0 {
            log.iterations = log.applications;
        }
        phi = next;
        if inc <= opts.tol {
            if inc > 0.0 {
                // the last update was below tolerance but not exactly zero
                log.iterations = log.applications - 1;
            }
            break;
        }
    }
    assemble(spectral, phi, gamma, log)
}

fn assemble(spectral: &Spectral, q: ScalarField, gamma: f64, log: PicardLog) -> Result<StationaryState> {
    let n = map_checked(&q, |v| density_from_enthalpy(v, gamma))?;
    let sigma = n.map(|v| 2.0 / (gamma - 1.0) * (v.powf(0.5 * (gamma - 1.0)) - 1.0));
    let e = spectral.grad(&q)?.scale(-1.0);
    let rho = n.map(|v| v - 1.0);
    Ok(StationaryState {
        gamma,
        q,
        n,
        sigma,
        e,
        rho,
        log,
    })
}

impl StationaryState {
    /// Constant equilibrium `n = 1, E = 0` for `n_b == 1`.
    pub fn trivial(spectral: &Spectral, gamma: f64) -> Self {
        assemble(spectral, ScalarField::zeros(*spectral.grid()), gamma, PicardLog::default())
            .expect("zero enthalpy is admissible")
    }

    /// `||lap Q - n(Q) + n_b||` in L2.
    pub fn elliptic_residual(&self, spectral: &Spectral, background: &BackgroundDensity) -> Result<f64> {
        let lap = spectral.laplacian(&self.q)?;
        let r = lap.sub(&self.n)?.add(background.field())?;
        Ok(l2_norm(&r))
    }

    /// `||T(Q) - Q||_H2`
    pub fn fixed_point_residual(
        &self,
        spectral: &Spectral,
        background: &BackgroundDensity,
    ) -> Result<f64> {
        let t = fixed_point_map(spectral, &self.q, &background.deviation(), self.gamma)?;
        spectral.sobolev_norm(&t.sub(&self.q)?, 2)
    }

    /// `||curl E_st||` in L2.
    pub fn curl_residual(&self, spectral: &Spectral) -> Result<f64> {
        Ok(crate::spectral::l2_norm_vec(&spectral.curl(&self.e)?))
    }

    /// `||E_st + grad Q||` in L2.
    pub fn potential_residual(&self, spectral: &Spectral) -> Result<f64> {
        let g = spectral.grad(&self.q)?;
        Ok(crate::spectral::l2_norm_vec(&self.e.add(&g)?))
    }

    /// `Q` of the transformed field, `sigma_st`, rescaled field `E_st / sqrt(gamma)`.
    pub fn scaled_field(&self) -> VectorField {
        self.e.scale(1.0 / self.gamma.sqrt())
    }
}

/// Empirical constants of the linear-response bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallnessReport {
    pub m: u32,
    pub k: u32,
    pub background_norm: f64,
    /// `||n_st - 1||_{W_k^{m,2}} / ||n_b - 1||_{W_k^{m,2}}`
    pub r1: f64,
    /// `||E_st||_{W_k^{m-1,2}} / ||n_b - 1||_{W_k^{m,2}}`
    pub r2: f64,
}

pub fn verify_smallness_bounds(
    spectral: &Spectral,
    st: &StationaryState,
    background: &BackgroundDensity,
    m: u32,
    k: u32,
) -> Result<SmallnessReport> {
    let nb = spectral.weighted_norm(&background.deviation(), m, k)?;
    if nb == 0.0 {
        return Ok(SmallnessReport {
            m,
            k,
            background_norm: 0.0,
            r1: 0.0,
            r2: 0.0,
        });
    }
    let r1 = spectral.weighted_norm(&st.rho, m, k)? / nb;
    let r2 = spectral.weighted_norm_vec(&st.e, m.saturating_sub(1), k)? / nb;
    Ok(SmallnessReport {
        m,
        k,
        background_norm: nb,
        r1,
        r2,
    })
}

/// Ratios at `eps` and `eps/2` and their relative change.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub full: SmallnessReport,
    pub half: SmallnessReport,
    pub r1_change: f64,
    pub r2_change: f64,
    /// Both ratios move by less than 10%.
    pub stable: bool,
}

pub fn smallness_stability(
    spectral: &Spectral,
    profile: BackgroundProfile,
    params: ModelParams,
    opts: PicardOptions,
    m: u32,
    k: u32,
) -> Result<StabilityReport> {
    let run = |p: BackgroundProfile| -> Result<SmallnessReport> {
        let nb = BackgroundDensity::new(*spectral.grid(), p)?;
        let st = picard_iterate(spectral, &nb, params, opts)?;
        verify_smallness_bounds(spectral, &st, &nb, m, k)
    };
    let full = run(profile)?;
    let half = run(profile.with_eps(0.5 * profile.eps))?;
    let change = |a: f64, b: f64| if a == 0.0 { 0.0 } else { (a - b).abs() / a };
    let r1_change = change(full.r1, half.r1);
    let r2_change = change(full.r2, half.r2);
    Ok(StabilityReport {
        full,
        half,
        r1_change,
        r2_change,
        stable: r1_change < 0.1 && r2_change < 0.1,
    })
}
