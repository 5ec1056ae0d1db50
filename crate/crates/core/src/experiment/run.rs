use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, InitKind, MagneticInit};
use super::output::{
    emit_report, emit_series, emit_snapshot, emit_table, read_series, sha256_hex, write_atomic,
    Check, OutputRecord, RunManifest, SeriesRow,
};
use crate::dynamics::{
    perturbation, perturbation_fields, random_bumps, run, to_symmetric, Dynamics, FluidState,
};
use crate::energy::{certify_samples, EnergyEvaluator, EnergySample, LyapunovCertificate};
use crate::error::{Error, Result};
use crate::lindecay::{
    fit_decay, Component, DecayEvaluator, DecayFit, DecayTarget, MagneticProfile, NormRequest,
    QuadratureOptions, QuadratureScheme,
};
use crate::snapshot::Snapshot;
use crate::spectral::{l2_norm, l2_norm_vec, Spectral};
use crate::stationary::{
    picard_iterate, smallness_stability, verify_smallness_bounds, BackgroundDensity,
    BackgroundProfile, PicardLog, SmallnessReport, StabilityReport, StationaryState,
};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const CONFIG_FILE: &str = "config.toml";

/// Thresholds of the in-run assertions.
pub const CONTRACTION_LIMIT: f64 = 0.1;
pub const ELLIPTIC_TOL: f64 = 1e-8;
pub const CURL_TOL: f64 = 1e-10;
pub const RATIO_CHANGE_LIMIT: f64 = 0.1;
pub const FIXEDNESS_TOL: f64 = 1e-8;
pub const GAUSS_TOL: f64 = 1e-8;
/// The decay-trend fit must find the magnetic exponent at or below this.
pub const MAGNETIC_TREND_LIMIT: f64 = -0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Stationary,
    Evolve,
    Lyapunov,
    Lindecay,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Stationary => "stationary",
            Self::Evolve => "evolve",
            Self::Lyapunov => "lyapunov",
            Self::Lindecay => "lindecay",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryReport {
    pub gamma: f64,
    pub background: BackgroundProfile,
    pub grid_n: usize,
    pub box_l: f64,
    /// `n_b == 1`: the solution is the constant state and no iteration runs.
    pub trivial: bool,
    pub log: PicardLog,
    pub max_factor: f64,
    pub elliptic_residual: f64,
    pub curl_residual: f64,
    pub potential_residual: f64,
    pub fixed_point_residual: f64,
    pub min_density: f64,
    pub smallness: SmallnessReport,
    pub stability: Option<StabilityReport>,
}

/// Finite-window comparison of the fluid and magnetic decay of a nonlinear run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendReport {
    /// `(L / 2 pi)^2`: the slowest box mode has decayed by `1/e`.
    pub saturation_time: f64,
    pub window: [f64; 2],
    /// Power-law fit of `||(n - n_st, u)||`.
    pub fluid: DecayFit,
    pub magnetic: DecayFit,
    pub fluid_faster: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolveReport {
    pub init: String,
    pub observations: usize,
    pub steps: usize,
    pub dt_min: f64,
    pub dt_max: f64,
    pub t_final: f64,
    pub max_velocity: f64,
    pub max_gauss_e: f64,
    pub max_gauss_b: f64,
    pub certificate: Option<LyapunovCertificate>,
    pub trend: Option<TrendReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovReport {
    pub series: PathBuf,
    pub observations: usize,
    pub certificate: LyapunovCertificate,
}

/// Files and checks accumulated by one pipeline.
#[derive(Debug, Default)]
struct Outcome {
    checks: Vec<Check>,
    outputs: Vec<PathBuf>,
}

fn stationary_solve(
    cfg: &ExperimentConfig,
    spectral: &Spectral,
) -> Result<(BackgroundDensity, StationaryState)> {
    let bg = BackgroundDensity::new(*spectral.grid(), cfg.background_profile())?;
    let st = picard_iterate(spectral, &bg, cfg.params(), cfg.picard_options())?;
    Ok((bg, st))
}

fn stationary_pipeline(cfg: &ExperimentConfig) -> Result<Outcome> {
    let spectral = Spectral::new(cfg.grid_spec());
    let (bg, st) = stationary_solve(cfg, &spectral)?;
    let trivial = cfg.background.eps == 0.0;
    let stability = if cfg.stationary.stability && !trivial {
        Some(smallness_stability(
            &spectral,
            cfg.background_profile(),
            cfg.params(),
            cfg.picard_options(),
            2,
            0,
        )?)
    } else {
        None
    };
    let rep = StationaryReport {
        gamma: cfg.model.gamma,
        background: cfg.background_profile(),
        grid_n: cfg.grid.n,
        box_l: cfg.grid.box_l,
        trivial,
        max_factor: st.log.max_factor(),
        elliptic_residual: st.elliptic_residual(&spectral, &bg)?,
        curl_residual: st.curl_residual(&spectral)?,
        potential_residual: st.potential_residual(&spectral)?,
        fixed_point_residual: st.fixed_point_residual(&spectral, &bg)?,
        min_density: st.n.min(),
        smallness: verify_smallness_bounds(&spectral, &st, &bg, 2, 0)?,
        stability,
        log: st.log.clone(),
    };

    let mut out = Outcome::default();
    let c = &mut out.checks;
    if trivial {
        c.push(Check::new(
            "trivial-solution",
            rep.log.iterations == 0 && st.q.max_abs() == 0.0,
            format!("{} iterations, max |Q| = {:e}", rep.log.iterations, st.q.max_abs()),
        ));
    }
    c.push(Check::new(
        "picard-contraction",
        rep.max_factor < CONTRACTION_LIMIT,
        format!("max factor {:.3e} over {} iterations", rep.max_factor, rep.log.iterations),
    ));
    c.push(Check::new(
        "elliptic-residual",
        rep.elliptic_residual <= ELLIPTIC_TOL,
        format!("{:.3e}", rep.elliptic_residual),
    ));
    c.push(Check::new(
        "curl-free-field",
        rep.curl_residual <= CURL_TOL,
        format!("{:.3e}", rep.curl_residual),
    ));
    let s = &rep.smallness;
    c.push(Check::new(
        "ratios-finite",
        s.r1.is_finite() && s.r2.is_finite(),
        format!("r1 = {:.6}, r2 = {:.6}", s.r1, s.r2),
    ));
    match &rep.stability {
        Some(stab) => c.push(Check::new(
            "ratios-stable",
            stab.r1_change < RATIO_CHANGE_LIMIT && stab.r2_change < RATIO_CHANGE_LIMIT,
            format!("changes {:.3e}, {:.3e} under eps -> eps/2", stab.r1_change, stab.r2_change),
        )),
        None => c.push(Check::skipped("ratios-stable", "disabled or trivial background")),
    }

    let report = cfg.resolve(&cfg.stationary.report);
    emit_report(&report, &rep)?;
    let snap_path = cfg.resolve(&cfg.stationary.out);
    let mut snap = Snapshot::new(*spectral.grid());
    snap.push("n", st.n.clone())?;
    snap.push("Q", st.q.clone())?;
    snap.push("sigma", st.sigma.clone())?;
    snap.push("n_b", bg.field().clone())?;
    snap.push_vector("E", &st.e)?;
    emit_snapshot(&snap_path, &snap)?;
    out.outputs.extend([report, snap_path]);
    Ok(out)
}

fn initial_state(
    cfg: &ExperimentConfig,
    spectral: &Spectral,
    st: &StationaryState,
) -> Result<FluidState> {
    match cfg.evolve.init {
        InitKind::StationaryExact => Ok(FluidState::equilibrium(st)),
        InitKind::Custom => {
            let path = cfg.evolve.snapshot.as_ref().expect("validated");
            let snap = Snapshot::load(&cfg.resolve(path))?;
            if snap.grid() != spectral.grid() {
                return Err(Error::GridMismatch {
                    left: format!("{:?}", spectral.grid()),
                    right: format!("{:?} in {}", snap.grid(), path.display()),
                });
            }
            snap.to_fluid()
        }
        InitKind::StationaryNoise => {
            let bumps = random_bumps(cfg.seed, cfg.evolve.bumps);
            let (rho, u, e, mut b) = perturbation_fields(spectral, &bumps, cfg.evolve.amp)?;
            if cfg.evolve.magnetic == MagneticInit::Transverse {
                let mut raw = crate::spectral::VectorField::zeros(*spectral.grid());
                for bump in &bumps {
                    let prof = bump.profile(*spectral.grid());
                    for (a, comp) in raw.comps_mut().iter_mut().enumerate() {
                        comp.axpy(cfg.evolve.amp * bump.potential[a], &prof);
                    }
                }
                // the box mean of B is conserved and has no whole-space analogue
                for comp in raw.comps_mut() {
                    let mean = comp.data().iter().sum::<f64>() / comp.data().len() as f64;
                    *comp = comp.map(|v| v - mean);
                }
                let div = spectral.div(&raw)?;
                b = raw.sub(&spectral.gradient_of_inverse_laplacian(&div)?)?;
            }
            // Modes outside the dealias band get no dynamics from the filtered
            // products and would stay frozen; start band-limited instead.
            let (rho, u, e, b) = if cfg.integrator.dealias {
                (
                    spectral.dealias_field(&rho)?,
                    spectral.dealias_vec(&u)?,
                    spectral.dealias_vec(&e)?,
                    spectral.dealias_vec(&b)?,
                )
            } else {
                (rho, u, e, b)
            };
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
    }
}

/// Power-law fits of `||(n - n_st, u)||` and `||B||` over `[start, (L/2pi)^2]`.
pub fn decay_trend(rows: &[SeriesRow], box_l: f64, start: f64) -> Result<TrendReport> {
    let saturation_time = (box_l / (2.0 * std::f64::consts::PI)).powi(2);
    let window = (start, saturation_time);
    let fluid: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.t, r.norms[0].hypot(r.norms[1])))
        .collect();
    let magnetic: Vec<(f64, f64)> = rows.iter().map(|r| (r.t, r.norms[3])).collect();
    let target = DecayTarget::power(MAGNETIC_TREND_LIMIT, f64::INFINITY);
    let fluid = fit_decay("fluid", &fluid, window, target)?;
    let mut magnetic = fit_decay("B", &magnetic, window, target)?;
    magnetic.pass = magnetic.estimate <= MAGNETIC_TREND_LIMIT;
    let fluid_faster = fluid.estimate < magnetic.estimate;
    Ok(TrendReport {
        saturation_time,
        window: [window.0, window.1],
        pass: fluid_faster && magnetic.pass,
        fluid_faster,
        fluid,
        magnetic,
    })
}

fn evolve_pipeline(cfg: &ExperimentConfig) -> Result<(Outcome, Vec<SeriesRow>)> {
    let spectral = Spectral::new(cfg.grid_spec());
    let (bg, st) = stationary_solve(cfg, &spectral)?;
    let gamma = cfg.model.gamma;
    let dynamics = Dynamics::new(spectral.clone(), bg.field().clone(), gamma)
        .with_dealias(cfg.integrator.dealias);
    let evaluator = if cfg.evolve.energy {
        Some(EnergyEvaluator::new(&spectral, &st.sigma, gamma, cfg.energy)?)
    } else {
        None
    };
    let start = initial_state(cfg, &spectral, &st)?;

    let mut out = Outcome::default();
    let mut rows = Vec::new();
    let snap_dir = cfg.out_dir.clone();
    let every = cfg.evolve.snapshot_every;
    let observe = |x: &FluidState| -> Result<()> {
        let index = rows.len();
        let (gauss_e, gauss_b) = dynamics.constraint_residuals(x)?;
        let norms = [
            l2_norm(&x.n.sub(&st.n)?),
            l2_norm_vec(&x.u),
            l2_norm_vec(&x.e.sub(&st.e)?),
            l2_norm_vec(&x.b),
        ];
        let mut row = SeriesRow::from_values(&[f64::NAN; 17]);
        row.t = x.t;
        row.tau = x.t * gamma.sqrt();
        row.gauss_e = gauss_e;
        row.gauss_b = gauss_b;
        row.norms = norms;
        if let Some(ev) = &evaluator {
            let r = ev.report(&perturbation(&to_symmetric(x, gamma)?, &st)?)?;
            row.tau = r.tau;
            row.e_full = r.e_full;
            row.d_full = r.d_full;
            row.e_high = r.e_high;
            row.d_high = r.d_high;
            row.interactive = r.interactive;
            row.ratio_full = r.ratio_full;
            row.ratio_high = r.ratio_high;
        }
        rows.push(row);
        if index == 0 || (every > 0 && index % every == 0) {
            let p = snap_dir.join(format!("snapshot_{index:04}.emxf"));
            emit_snapshot(&p, &Snapshot::from_fluid(x)?)?;
            out.outputs.push(p);
        }
        Ok(())
    };
    let (end, summary) = run(&dynamics, start, &cfg.integrator, observe)?;
    let final_path = cfg.out_dir.join("final.emxf");
    emit_snapshot(&final_path, &Snapshot::from_fluid(&end)?)?;
    out.outputs.push(final_path);
    let series = cfg.resolve(&cfg.evolve.series);
    emit_series(&series, &rows)?;
    out.outputs.push(series);

    let max = |f: fn(&SeriesRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    let (ge, gb, umax) = (max(|r| r.gauss_e), max(|r| r.gauss_b), max(|r| r.norms[1]));
    let (ge0, gb0) = (rows[0].gauss_e, rows[0].gauss_b);
    let c = &mut out.checks;
    if cfg.evolve.init == InitKind::StationaryExact {
        c.push(Check::new(
            "fixedness",
            umax <= FIXEDNESS_TOL && ge <= GAUSS_TOL && gb <= GAUSS_TOL,
            format!("sup ||u|| = {umax:.3e}, gauss {ge:.3e} / {gb:.3e} up to t = {}", summary.t_final),
        ));
    } else {
        c.push(Check::new(
            "constraints-transported",
            ge - ge0 <= GAUSS_TOL && gb - gb0 <= GAUSS_TOL,
            format!("gauss growth {:.3e} / {:.3e}", ge - ge0, gb - gb0),
        ));
    }

    let certificate = evaluator.as_ref().map(|_| {
        let samples: Vec<EnergySample> = rows.iter().map(energy_sample).collect();
        certify_samples(&samples)
    });
    match &certificate {
        Some(cert) => c.push(certificate_check(cert)),
        None => c.push(Check::skipped("lyapunov-certified", "energy disabled")),
    }

    let trend = if cfg.evolve.init == InitKind::StationaryNoise {
        match decay_trend(&rows, cfg.grid.box_l, cfg.evolve.trend_start) {
            Ok(t) => {
                c.push(Check::new(
                    "decay-trend",
                    t.pass,
                    format!(
                        "fluid {:.3}, B {:.3} over [{}, {:.2}]",
                        t.fluid.estimate, t.magnetic.estimate, t.window[0], t.window[1]
                    ),
                ));
                Some(t)
            }
            Err(e) => {
                c.push(Check::skipped("decay-trend", e.to_string()));
                None
            }
        }
    } else {
        c.push(Check::skipped("decay-trend", "no perturbation"));
        None
    };

    let rep = EvolveReport {
        init: cfg.evolve.init.as_str().to_string(),
        observations: summary.observations,
        steps: summary.steps,
        dt_min: summary.dt_min,
        dt_max: summary.dt_max,
        t_final: summary.t_final,
        max_velocity: umax,
        max_gauss_e: ge,
        max_gauss_b: gb,
        certificate,
        trend,
    };
    let report = cfg.out_dir.join("evolve.json");
    emit_report(&report, &rep)?;
    out.outputs.push(report);
    Ok((out, rows))
}

fn energy_sample(r: &SeriesRow) -> EnergySample {
    EnergySample {
        tau: r.tau,
        e_full: r.e_full,
        d_full: r.d_full,
        e_high: r.e_high,
        d_high: r.d_high,
        ratio_full: r.ratio_full,
        ratio_high: r.ratio_high,
    }
}

fn certificate_check(cert: &LyapunovCertificate) -> Check {
    let lam = |l: Option<f64>| l.map_or("any".to_string(), |l| format!("{l:.3e}"));
    Check::new(
        "lyapunov-certified",
        cert.certified,
        format!(
            "lambda {} / {}, violations {} / {}, ratios in [{:.4}, {:.4}]",
            lam(cert.full.lambda_best),
            lam(cert.high.lambda_best),
            cert.full.violations.len(),
            cert.high.violations.len(),
            cert.min_ratio,
            cert.max_ratio
        ),
    )
}

fn lyapunov_pipeline(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut out = Outcome::default();
    let (series, rows) = match &cfg.lyapunov.series {
        Some(p) => {
            let p = cfg.resolve(p);
            let rows = read_series(&p)?;
            (p, rows)
        }
        None => {
            let mut run_cfg = cfg.clone();
            run_cfg.evolve.energy = true;
            let (evolved, rows) = evolve_pipeline(&run_cfg)?;
            // the certificate is re-derived below from the written series
            out.checks.extend(
                evolved
                    .checks
                    .into_iter()
                    .filter(|c| c.name != "lyapunov-certified"),
            );
            out.outputs.extend(evolved.outputs);
            (cfg.resolve(&cfg.evolve.series), rows)
        }
    };
    if rows.len() < 2 {
        return Err(Error::Format {
            what: "series",
            msg: format!("{}: need at least two observations", series.display()),
        });
    }
    if let Some(r) = rows.iter().find(|r| !r.e_full.is_finite() || !r.d_full.is_finite()) {
        return Err(Error::Format {
            what: "series",
            msg: format!("{}: no energy values at t = {}", series.display(), r.t),
        });
    }
    let samples: Vec<EnergySample> = rows.iter().map(energy_sample).collect();
    let certificate = certify_samples(&samples);
    out.checks.push(certificate_check(&certificate));
    let rep = LyapunovReport {
        series,
        observations: rows.len(),
        certificate,
    };
    let report = cfg.resolve(&cfg.lyapunov.report);
    emit_report(&report, &rep)?;
    out.outputs.push(report);
    Ok(out)
}

/// Expected power-law exponents `(B, grad B)` for the configured magnetic data.
pub fn magnetic_targets(profile: &MagneticProfile) -> (f64, f64) {
    match profile {
        MagneticProfile::Transverse(_) => (-0.75, -1.25),
        MagneticProfile::Curl(_) => (-1.25, -1.75),
    }
}

pub fn decay_requests() -> [NormRequest; 5] {
    [
        NormRequest::new(Component::Density, 0),
        NormRequest::new(Component::Velocity, 0),
        NormRequest::new(Component::Electric, 0),
        NormRequest::new(Component::Magnetic, 0),
        NormRequest::new(Component::Magnetic, 1),
    ]
}

/// Fit the five decay laws to a `decay_requests` trajectory.
pub fn decay_fits(
    times: &[f64],
    values: &[Vec<f64>],
    window: [f64; 2],
    magnetic: &MagneticProfile,
) -> Result<Vec<DecayFit>> {
    let (b, grad_b) = magnetic_targets(magnetic);
    let targets = [
        DecayTarget::exponential(0.5, 0.05),
        DecayTarget::power(-1.25, 0.10),
        DecayTarget::power(-1.25, 0.10),
        DecayTarget::power(b, 0.08),
        DecayTarget::power(grad_b, 0.10),
    ];
    decay_requests()
        .iter()
        .zip(targets)
        .enumerate()
        .map(|(j, (req, target))| {
            let series: Vec<(f64, f64)> = times.iter().zip(values).map(|(&t, v)| (t, v[j])).collect();
            fit_decay(&req.label(), &series, (window[0], window[1]), target)
        })
        .collect()
}

fn lindecay_pipeline(cfg: &ExperimentConfig) -> Result<Outcome> {
    let ld = &cfg.lindecay;
    let times = ld.t_grid.times();
    let opts = ld
        .quadrature
        .unwrap_or_else(|| QuadratureOptions::for_horizon(ld.t_grid.end));
    let scheme = QuadratureScheme::new(opts)?;
    let evaluator = DecayEvaluator::new(&scheme, &ld.profile, cfg.model.gamma)?;
    let requests = decay_requests();
    let values = evaluator.trajectory(&times, &requests);
    let fits = decay_fits(&times, &values, ld.fit_window, &ld.profile.magnetic)?;

    let mut header = vec!["t".to_string()];
    header.extend(requests.iter().map(NormRequest::label));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<f64>> = times
        .iter()
        .zip(&values)
        .map(|(&t, v)| std::iter::once(t).chain(v.iter().copied()).collect())
        .collect();
    let mut out = Outcome::default();
    let csv = cfg.resolve(&ld.out);
    emit_table(&csv, &header, &rows)?;
    let json = cfg.resolve(&ld.fits);
    emit_report(&json, &fits)?;
    out.outputs.extend([csv, json]);
    for f in &fits {
        out.checks.push(Check::new(
            &format!("fit-{}", f.label),
            f.pass,
            format!(
                "{:.4} (target {} +- {}, {} samples)",
                f.estimate, f.target, f.tolerance, f.samples
            ),
        ));
    }
    Ok(out)
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64())
}

/// Run one subcommand, writing `config.toml`, the outputs and
/// `manifest.json` into `cfg.out_dir`.
pub fn run_experiment(cfg: &ExperimentConfig, command: Command) -> Result<RunManifest> {
    cfg.validate()?;
    let started_unix = unix_now();
    let clock = Instant::now();
    let dir = &cfg.out_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let config_text = cfg.to_toml();
    let config_file = dir.join(CONFIG_FILE);
    write_atomic(&config_file, config_text.as_bytes())?;

    let all = match command {
        Command::Stationary => stationary_pipeline(cfg)?,
        Command::Evolve => evolve_pipeline(cfg)?.0,
        Command::Lyapunov => lyapunov_pipeline(cfg)?,
        Command::Lindecay => lindecay_pipeline(cfg)?,
    };
    let outputs = all
        .outputs
        .iter()
        .map(|p| OutputRecord::of(p))
        .collect::<Result<Vec<_>>>()?;
    let manifest = RunManifest {
        command: command.as_str().to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_file,
        config_sha256: sha256_hex(config_text.as_bytes()),
        seed: cfg.seed,
        threads: cfg.threads,
        started_unix,
        wall_clock_s: clock.elapsed().as_secs_f64(),
        pass: !all.checks.iter().any(Check::failed),
        checks: all.checks,
        outputs,
    };
    emit_report(&dir.join(MANIFEST_FILE), &manifest)?;
    Ok(manifest)
}

/// Recompute the config hash a manifest refers to.
pub fn manifest_matches_config(manifest: &RunManifest) -> Result<bool> {
    let path: &Path = &manifest.config_file;
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(sha256_hex(&bytes) == manifest.config_sha256)
}
