use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use nalgebra::{Matrix2, Matrix3, SMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::propagate::BlockExp;
use super::symbol::{dot, transverse_block, Frame, ModeState};
use crate::error::{Error, Result};
use crate::par;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Radial and angular nodes for integrals over frequency space.
///
/// Radially: composite Gauss-Legendre on equal panels of `[0, r_max]`; the
/// panels have to be narrow enough to resolve `cos(k t)` oscillations, so
/// their width shrinks with the time horizon. On the sphere: Gauss in
/// `cos(theta)` times the uniform rule in `phi`.
#[derive(Debug, Clone)]
pub struct QuadratureScheme {
    pub radial: Vec<(f64, f64)>,
    pub angular: Vec<([f64; 3], f64)>,
    pub r_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureOptions {
    pub r_max: f64,
    pub panel_width: f64,
    pub nodes_per_panel: usize,
    pub polar: usize,
    pub azimuthal: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            r_max: 24.0,
            panel_width: 0.05,
            nodes_per_panel: 16,
            polar: 16,
            azimuthal: 32,
        }
    }
}

impl QuadratureOptions {
    /// Panels fine enough for every `t <= t_max`.
    pub fn for_horizon(t_max: f64) -> Self {
        Self {
            panel_width: (2.0 / t_max.max(1.0)).min(0.05),
            ..Self::default()
        }
    }
}

fn rule(n: usize) -> Result<GaussLegendre> {
    NonZeroUsize::new(n)
        .map(GaussLegendre::new)
        .ok_or_else(|| Error::config("quadrature", "node counts must be positive"))
}

impl QuadratureScheme {
    pub fn new(opts: QuadratureOptions) -> Result<Self> {
        if !(opts.r_max > 0.0 && opts.panel_width > 0.0) {
            return Err(Error::config("quadrature.r_max", "r_max and panel_width must be > 0"));
        }
        if opts.azimuthal == 0 {
            return Err(Error::config("quadrature.azimuthal", "must be positive"));
        }
        let gl = rule(opts.nodes_per_panel)?;
        let panels = (opts.r_max / opts.panel_width).ceil() as usize;
        let h = opts.r_max / panels as f64;
        let mut radial = Vec::with_capacity(panels * opts.nodes_per_panel);
        for p in 0..panels {
            let a = p as f64 * h;
            for &(x, w) in gl.as_node_weight_pairs() {
                radial.push((a + 0.5 * h * (x + 1.0), 0.5 * h * w));
            }
        }

        let polar = rule(opts.polar)?;
        let dphi = 2.0 * PI / opts.azimuthal as f64;
        let mut angular = Vec::with_capacity(opts.polar * opts.azimuthal);
        for &(c, wc) in polar.as_node_weight_pairs() {
            let s = (1.0 - c * c).sqrt();
            for j in 0..opts.azimuthal {
                let phi = (j as f64 + 0.5) * dphi;
                angular.push(([s * phi.cos(), s * phi.sin(), c], wc * dphi));
            }
        }
        Ok(Self {
            radial,
            angular,
            r_max: opts.r_max,
        })
    }
}

/// Magnetic part of the initial data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "vector")]
pub enum MagneticProfile {
    /// `P_perp(c G)`: divergence-free with `B^(0) != 0`.
    Transverse([f64; 3]),
    /// `curl(c G)`: vanishes at `xi = 0`.
    Curl([f64; 3]),
}

/// Centered Gaussian initial data `G = exp(-|x|^2 / w^2)` with analytic
/// Fourier transform.
///
/// * `rho_0 = m G - div(d G)`
/// * `u_0 = c_u G`
/// * `E_0 = P_par(e_l G) + P_perp(c_E G)`
/// * `B_0` from [`MagneticProfile`]
///
/// Gauss's law holds exactly iff `m = 0` and `e_l = d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialProfile {
    pub width: f64,
    #[serde(default)]
    pub density_mean: f64,
    pub density_dir: [f64; 3],
    pub velocity: [f64; 3],
    pub electric_longitudinal: [f64; 3],
    pub electric_transverse: [f64; 3],
    pub magnetic: MagneticProfile,
}

impl Default for InitialProfile {
    fn default() -> Self {
        Self::standard(2.5)
    }
}

impl InitialProfile {
    pub fn standard(width: f64) -> Self {
        let d = [0.6, -0.3, 0.2];
        Self {
            width,
            density_mean: 0.0,
            density_dir: d,
            velocity: [0.3, 0.5, -0.4],
            electric_longitudinal: d,
            electric_transverse: [0.4, 0.1, -0.3],
            magnetic: MagneticProfile::Transverse([-0.2, 0.4, 0.5]),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0) {
            return Err(Error::config("profile.width", "must be > 0"));
        }
        if self.density_mean != 0.0 {
            return Err(Error::Incompatible(format!(
                "density mean {} != 0: whole-space Gauss law forces a mean-zero density",
                self.density_mean
            )));
        }
        if self.electric_longitudinal != self.density_dir {
            return Err(Error::Incompatible(format!(
                "longitudinal electric direction {:?} must equal the density direction {:?} \
                 for i xi . E + rho = 0",
                self.electric_longitudinal, self.density_dir
            )));
        }
        Ok(())
    }

    /// Fourier transform of `G`.
    pub fn gaussian_hat(&self, k: f64) -> f64 {
        let w = self.width;
        (PI * w * w).powf(1.5) * (-0.25 * k * k * w * w).exp()
    }

    /// Transformed data at one frequency.
    pub fn mode(&self, xi: [f64; 3]) -> ModeState {
        let g = Complex64::new(self.gaussian_hat(dot(xi, xi).sqrt()), 0.0);
        let f = Frame::new(xi);
        let k = f.k;
        let vec = |c: [f64; 3]| c.map(|x| g * x);
        let perp = |c: [f64; 3]| {
            let l = dot(c, f.axis);
            std::array::from_fn(|a| g * (c[a] - l * f.axis[a]))
        };
        let par = |c: [f64; 3]| {
            let l = dot(c, f.axis);
            std::array::from_fn(|a| g * (l * f.axis[a]))
        };
        let rho = g * self.density_mean - I * g * k * dot(self.density_dir, f.axis);
        let e_par: [Complex64; 3] = par(self.electric_longitudinal);
        let e_perp: [Complex64; 3] = perp(self.electric_transverse);
        let b = match self.magnetic {
            MagneticProfile::Transverse(c) => perp(c),
            MagneticProfile::Curl(c) => {
                let x = super::symbol::cross(xi, c);
                x.map(|v| I * g * v)
            }
        };
        ModeState::new(
            xi,
            rho,
            vec(self.velocity),
            std::array::from_fn(|a| e_par[a] + e_perp[a]),
            b,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Component {
    Density,
    Velocity,
    Electric,
    Magnetic,
}

impl Component {
    pub const ALL: [Component; 4] = [
        Component::Density,
        Component::Velocity,
        Component::Electric,
        Component::Magnetic,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Component::Density => "rho",
            Component::Velocity => "u",
            Component::Electric => "E",
            Component::Magnetic => "B",
        }
    }
}

/// Requested norm `|| |xi|^s component ||_{L^2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NormRequest {
    pub component: Component,
    pub order: u32,
}

impl NormRequest {
    pub fn new(component: Component, order: u32) -> Self {
        Self { component, order }
    }

    pub fn label(&self) -> String {
        match self.order {
            0 => self.component.label().to_string(),
            1 => format!("grad_{}", self.component.label()),
            s => format!("grad{s}_{}", self.component.label()),
        }
    }
}

// Angular features: the initial data at direction xi_hat is Ghat(k) times a
// combination of these, with k-dependent coefficients.
const F_UL: usize = 0; // xi_hat . c_u
const F_EL: usize = 1; // xi_hat . d
const F_U1: usize = 2; // e1 . c_u
const F_E1: usize = 3; // e1 . c_E
const F_U2: usize = 4; // e2 . c_u
const F_E2: usize = 5; // e2 . c_E
const F_B1: usize = 6; // e1 . c_B
const F_B2: usize = 7; // e2 . c_B
const NF: usize = 8;

struct RadialNode {
    k: f64,
    /// `(2 pi)^-3 w k^2 Ghat(k)^2`
    measure: f64,
    trans: BlockExp,
    /// transverse inputs: feature indices and coefficients of the third slot
    slot_a: (usize, Complex64),
    slot_b: (usize, Complex64),
}

/// Per-node accumulated squared amplitudes at one time.
#[derive(Debug, Clone, Copy, Default)]
struct NodeValues {
    /// longitudinal `(rho, u, E)` without the `exp(-t)` factor
    long: [f64; 3],
    /// transverse `(u, E, B)`
    trans: [f64; 3],
}

/// Whole-space `L^2` norms of the linear flow for one initial profile.
///
/// The longitudinal part uses the closed form on the Gauss-consistent
/// subspace, `exp(tA) = exp(-t/2)(cos(bt) + sin(bt)/b (A + 1/2))`, with the
/// `exp(-t/2)` carried separately so nothing underflows before the end.
/// Transverse blocks are factorized once per radial node.
pub struct DecayEvaluator {
    gamma: f64,
    nodes: Vec<RadialNode>,
    gram: SMatrix<f64, NF, NF>,
    tail: f64,
}

impl DecayEvaluator {
    pub fn new(scheme: &QuadratureScheme, profile: &InitialProfile, gamma: f64) -> Result<Self> {
        profile.validate()?;
        if !(gamma > 1.0) {
            return Err(Error::config("model.gamma", format!("gamma = {gamma} violates gamma > 1")));
        }
        let (cb, curl) = match profile.magnetic {
            MagneticProfile::Transverse(c) => (c, false),
            MagneticProfile::Curl(c) => (c, true),
        };

        let mut gram = SMatrix::<f64, NF, NF>::zeros();
        for &(dir, w) in &scheme.angular {
            let f = Frame::new(dir);
            let feat = [
                dot(f.axis, profile.velocity),
                dot(f.axis, profile.density_dir),
                dot(f.e1, profile.velocity),
                dot(f.e1, profile.electric_transverse),
                dot(f.e2, profile.velocity),
                dot(f.e2, profile.electric_transverse),
                dot(f.e1, cb),
                dot(f.e2, cb),
            ];
            for a in 0..NF {
                for b in 0..NF {
                    gram[(a, b)] += w * feat[a] * feat[b];
                }
            }
        }

        let norm = (2.0 * PI).powi(-3);
        let nodes = par::map_collect(scheme.radial.len(), |i| {
            let (k, w) = scheme.radial[i];
            let g = profile.gaussian_hat(k);
            // pair a carries i e2.B, pair b carries -i e1.B; for B = curl(c G)
            // these are -k e1.c G and -k e2.c G
            let (slot_a, slot_b) = if curl {
                ((F_B1, Complex64::new(-k, 0.0)), (F_B2, Complex64::new(-k, 0.0)))
            } else {
                ((F_B2, I), (F_B1, -I))
            };
            RadialNode {
                k,
                measure: norm * w * k * k * g * g,
                trans: BlockExp::new(transverse_block(k)),
                slot_a,
                slot_b,
            }
        })
        .into_iter()
        .filter(|n| n.measure > 0.0)
        .collect();

        // Gaussian tail beyond r_max, for the weight k^2 Ghat^2 k^2 up to s = 2
        let w = profile.width;
        let a = 0.5 * w * w;
        let r = scheme.r_max;
        let amp: f64 = [profile.velocity, profile.density_dir, profile.electric_transverse, cb]
            .iter()
            .map(|c| dot(*c, *c))
            .sum::<f64>()
            * (1.0 + r * r);
        let tail = norm * 4.0 * PI * amp * (PI * w * w).powi(3) * r.powi(7) * (-a * r * r).exp()
            / (2.0 * a);

        Ok(Self {
            gamma,
            nodes,
            gram,
            tail,
        })
    }

    /// Bound on the neglected `k > r_max` part of the squared norms.
    pub fn tail_estimate(&self) -> f64 {
        self.tail
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    fn quad(&self, w: &[Complex64], idx: &[usize]) -> f64 {
        let mut s = 0.0;
        for (m, &i) in idx.iter().enumerate() {
            for (n, &j) in idx.iter().enumerate() {
                s += (w[m].conj() * w[n]).re * self.gram[(i, j)];
            }
        }
        s
    }

    fn node_values(&self, node: &RadialNode, t: f64) -> NodeValues {
        let k = node.k;
        let a = Matrix2::new(-1.0, -(1.0 + self.gamma * k * k), 1.0, 0.0);
        let b = (0.75 + self.gamma * k * k).sqrt();
        let p = Matrix2::identity() * (b * t).cos()
            + (a + Matrix2::identity() * 0.5) * ((b * t).sin() / b);
        let real = |r: [f64; 2]| [Complex64::new(r[0], 0.0), Complex64::new(r[1], 0.0)];
        let ul = self.quad(&real([p[(0, 0)], p[(0, 1)]]), &[F_UL, F_EL]);
        let el = self.quad(&real([p[(1, 0)], p[(1, 1)]]), &[F_UL, F_EL]);

        let pt: Matrix3<f64> = node.trans.at(t);
        let mut trans = [0.0; 3];
        for (f_u, f_e, (f_b, c)) in [(F_U1, F_E1, node.slot_a), (F_U2, F_E2, node.slot_b)] {
            for (row, acc) in trans.iter_mut().enumerate() {
                let w = [
                    Complex64::new(pt[(row, 0)], 0.0),
                    Complex64::new(pt[(row, 1)], 0.0),
                    c * pt[(row, 2)],
                ];
                *acc += self.quad(&w, &[f_u, f_e, f_b]);
            }
        }
        NodeValues {
            long: [k * k * el, ul, el],
            trans,
        }
    }

    /// Norms for every request at time `t`.
    pub fn norms(&self, t: f64, requests: &[NormRequest]) -> Vec<f64> {
        let values = par::map_collect(self.nodes.len(), |i| self.node_values(&self.nodes[i], t));
        let mut long = vec![0.0; requests.len()];
        let mut trans = vec![0.0; requests.len()];
        for (node, v) in self.nodes.iter().zip(&values) {
            for (r, req) in requests.iter().enumerate() {
                let wk = node.measure * node.k.powi(2 * req.order as i32);
                match req.component {
                    Component::Density => long[r] += wk * v.long[0],
                    Component::Velocity => {
                        long[r] += wk * v.long[1];
                        trans[r] += wk * v.trans[0];
                    }
                    Component::Electric => {
                        long[r] += wk * v.long[2];
                        trans[r] += wk * v.trans[1];
                    }
                    Component::Magnetic => trans[r] += wk * v.trans[2],
                }
            }
        }
        long.iter()
            .zip(&trans)
            .map(|(&l, &tr)| {
                let l = l.max(0.0);
                let tr = tr.max(0.0);
                if tr > 0.0 {
                    (tr + (-t).exp() * l).sqrt()
                } else {
                    (-0.5 * t).exp() * l.sqrt()
                }
            })
            .collect()
    }

    /// Table of norms: one row per time, one column per request.
    pub fn trajectory(&self, times: &[f64], requests: &[NormRequest]) -> Vec<Vec<f64>> {
        times.iter().map(|&t| self.norms(t, requests)).collect()
    }
}

/// `|| |xi|^s component(exp(t L) U_0) ||_{L^2(R^3)}`, including the
/// `(2 pi)^-3` of Plancherel.
pub fn whole_space_norm(
    scheme: &QuadratureScheme,
    profile: &InitialProfile,
    gamma: f64,
    t: f64,
    request: NormRequest,
) -> Result<f64> {
    Ok(DecayEvaluator::new(scheme, profile, gamma)?.norms(t, &[request])[0])
}

/// `n` points log-spaced in `1 + t` over `[t0, t1]`.
pub fn log_time_grid(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![t0];
    }
    let (a, b) = ((1.0 + t0).ln(), (1.0 + t1).ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp() - 1.0)
        .collect()
}
