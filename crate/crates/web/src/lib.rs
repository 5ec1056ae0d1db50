//! Browser bindings: a steady-state slice, linear decay curves and the
//! dispersion relation. Arrays cross the boundary as `Float64Array`.

use emx::experiment::{decay_fits, decay_requests};
use emx::lindecay::{
    consistent_eigenvalues, log_time_grid, DecayEvaluator, InitialProfile, QuadratureOptions,
    QuadratureScheme,
};
use emx::spectral::{GridSpec, Spectral};
use emx::stationary::{picard_iterate, BackgroundDensity, BackgroundProfile, ModelParams, PicardOptions};
use wasm_bindgen::prelude::*;

fn js_err(e: emx::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Steady state along the `x` axis through the box center.
#[wasm_bindgen]
pub struct StationarySlice {
    x: Vec<f64>,
    density: Vec<f64>,
    background: Vec<f64>,
    field: Vec<f64>,
    iterations: usize,
    max_factor: f64,
    residual: f64,
}

#[wasm_bindgen]
impl StationarySlice {
    #[wasm_bindgen(getter)]
    pub fn x(&self) -> Vec<f64> {
        self.x.clone()
    }

    /// `n_st - 1`
    #[wasm_bindgen(getter)]
    pub fn density(&self) -> Vec<f64> {
        self.density.clone()
    }

    /// `n_b - 1`
    #[wasm_bindgen(getter)]
    pub fn background(&self) -> Vec<f64> {
        self.background.clone()
    }

    /// `x` component of the steady electric field.
    #[wasm_bindgen(getter)]
    pub fn field(&self) -> Vec<f64> {
        self.field.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    #[wasm_bindgen(getter, js_name = maxFactor)]
    pub fn max_factor(&self) -> f64 {
        self.max_factor
    }

    #[wasm_bindgen(getter)]
    pub fn residual(&self) -> f64 {
        self.residual
    }
}

#[wasm_bindgen(js_name = stationarySlice)]
pub fn stationary_slice(
    gamma: f64,
    eps: f64,
    width: f64,
    n: usize,
    box_l: f64,
) -> Result<StationarySlice, JsError> {
    let params = ModelParams::new(gamma).map_err(js_err)?;
    let s = Spectral::new(GridSpec::new(n, box_l).map_err(js_err)?);
    let g = *s.grid();
    let bg = BackgroundDensity::new(g, BackgroundProfile::gaussian(eps, width)).map_err(js_err)?;
    let st = picard_iterate(&s, &bg, params, PicardOptions::default()).map_err(js_err)?;
    let mid = n / 2;
    let row = |f: &[f64]| (0..n).map(|i| f[g.index(i, mid, mid)]).collect::<Vec<_>>();
    Ok(StationarySlice {
        x: (0..n).map(|i| g.coord(i)).collect(),
        density: row(st.rho.data()),
        background: row(bg.deviation().data()),
        field: row(st.e.comps()[0].data()),
        iterations: st.log.iterations,
        max_factor: st.log.max_factor(),
        residual: st.elliptic_residual(&s, &bg).map_err(js_err)?,
    })
}

/// Whole-space norms of the linear flow on log-spaced times.
#[wasm_bindgen]
pub struct DecayCurves {
    times: Vec<f64>,
    /// row-major, five columns: rho, u, E, B, grad B
    values: Vec<f64>,
    exponents: Vec<f64>,
}

#[wasm_bindgen]
impl DecayCurves {
    #[wasm_bindgen(getter)]
    pub fn times(&self) -> Vec<f64> {
        self.times.clone()
    }

    /// Norms of component `j` (0 = rho, 1 = u, 2 = E, 3 = B, 4 = grad B).
    pub fn component(&self, j: usize) -> Vec<f64> {
        self.values.iter().skip(j).step_by(5).copied().collect()
    }

    /// Fitted rates over the upper half of the time range: the exponential
    /// rate of rho, then the power-law exponents of the other four.
    #[wasm_bindgen(getter)]
    pub fn exponents(&self) -> Vec<f64> {
        self.exponents.clone()
    }
}

/// A coarser rule than the command-line default, sized for interactive use.
fn browser_quadrature(t_end: f64) -> QuadratureOptions {
    QuadratureOptions {
        nodes_per_panel: 8,
        polar: 8,
        azimuthal: 16,
        ..QuadratureOptions::for_horizon(t_end)
    }
}

#[wasm_bindgen(js_name = decayCurves)]
pub fn decay_curves(gamma: f64, width: f64, t_end: f64, points: usize) -> Result<DecayCurves, JsError> {
    ModelParams::new(gamma).map_err(js_err)?;
    if !(t_end > 1.0) || points < 20 {
        return Err(JsError::new("need t_end > 1 and at least 20 points"));
    }
    let profile = InitialProfile::standard(width);
    let scheme = QuadratureScheme::new(browser_quadrature(t_end)).map_err(js_err)?;
    let ev = DecayEvaluator::new(&scheme, &profile, gamma).map_err(js_err)?;
    let times = log_time_grid(1.0, t_end, points);
    let rows = ev.trajectory(&times, &decay_requests());
    let window = [t_end.sqrt(), t_end];
    let exponents = decay_fits(&times, &rows, window, &profile.magnetic)
        .map(|fits| fits.iter().map(|f| f.estimate).collect())
        .unwrap_or_default();
    Ok(DecayCurves {
        times,
        values: rows.concat(),
        exponents,
    })
}

/// Rows of `k, Re, Im` for the two longitudinal and three transverse branches
/// (11 numbers per wavenumber).
#[wasm_bindgen]
pub fn dispersion(gamma: f64, k_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    ModelParams::new(gamma).map_err(js_err)?;
    let points = points.max(2);
    let mut out = Vec::with_capacity(points * 11);
    for i in 0..points {
        let k = k_max * i as f64 / (points - 1) as f64;
        let mut ev = consistent_eigenvalues(k, gamma);
        // stable branch order for plotting
        ev[2..].sort_by(|a, b| a.im.total_cmp(&b.im));
        out.push(k);
        for z in ev {
            out.extend([z.re, z.im]);
        }
    }
    Ok(out)
}
