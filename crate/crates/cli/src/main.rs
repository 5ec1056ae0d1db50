//! `emx`: run the stationary, evolve, lyapunov and lindecay pipelines.
//!
//! Values are resolved as defaults, then `--config`, then `--set`, then the
//! dedicated flags. `emx --print-config <command>` shows the result.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use emx::experiment::{run_experiment, Command, ExperimentConfig, Status};
use emx::stationary::ProfileFamily;
use emx::Result;

#[derive(Parser, Debug)]
#[command(name = "emx", version, about = "Euler-Maxwell numerical lab")]
struct Cli {
    /// TOML configuration; every key is optional (see `--print-config`)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory [default: runs]
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Seed of the initial perturbation [default: 0]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads, 0 for all cores [default: 0]
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Override any key, e.g. `--set energy.kappa1=0.2` (repeatable)
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// Print the effective configuration and exit
    #[arg(long, global = true)]
    print_config: bool,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Solve for the steady state and write a snapshot and a JSON report
    Stationary(StationaryArgs),
    /// Integrate the nonlinear system and write snapshots and series.csv
    Evolve(EvolveArgs),
    /// Certify the energy inequalities along a series (runs `evolve` without --series)
    Lyapunov(LyapunovArgs),
    /// Whole-space linear decay curves and exponent fits
    Lindecay(LindecayArgs),
}

#[derive(Args, Debug)]
struct StationaryArgs {
    /// Adiabatic exponent, > 1 [default: 5/3]
    #[arg(long)]
    gamma: Option<f64>,
    /// Background amplitude [default: 0.05]
    #[arg(long)]
    eps: Option<f64>,
    /// Background width [default: 1]
    #[arg(long)]
    width: Option<f64>,
    /// Background family: gaussian | double-bump [default: gaussian]
    #[arg(long)]
    profile: Option<ProfileFamily>,
    /// Grid points per axis, even [default: 48]
    #[arg(long)]
    grid_n: Option<usize>,
    /// Box side length [default: 40]
    #[arg(long)]
    box_l: Option<f64>,
    /// Picard tolerance in H2 [default: 1e-10]
    #[arg(long)]
    tol: Option<f64>,
    /// Snapshot path, relative to the output directory [default: stationary.emxf]
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON report path [default: stationary.json]
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvolveArgs {
    /// stationary+noise | stationary-exact | custom <SNAPSHOT> [default: stationary+noise]
    #[arg(long, num_args = 1..=2, value_names = ["KIND", "SNAPSHOT"])]
    init: Option<Vec<String>>,
    /// Perturbation amplitude [default: 1e-3]
    #[arg(long)]
    amp: Option<f64>,
    /// End time [default: 10]
    #[arg(long)]
    t_end: Option<f64>,
    /// CFL number in (0, 1) [default: 0.4]
    #[arg(long)]
    cfl: Option<f64>,
    /// Observation interval [default: 0.5]
    #[arg(long)]
    cadence: Option<f64>,
}

#[derive(Args, Debug)]
struct LyapunovArgs {
    /// Existing series.csv; without it an evolve run is made first
    #[arg(long)]
    series: Option<PathBuf>,
    /// JSON report path [default: lyapunov.json]
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LindecayArgs {
    /// Adiabatic exponent, > 1 [default: 5/3]
    #[arg(long)]
    gamma: Option<f64>,
    /// Log-spaced times `start:end:points` [default: 1:1000:60]
    #[arg(long, value_name = "T0:T1:N")]
    t_grid: Option<String>,
    /// Gaussian width of the initial profile [default: 2.5]
    #[arg(long)]
    width: Option<f64>,
    /// Fit window `start:end` [default: 50:500]
    #[arg(long, value_name = "T0:T1")]
    fit_window: Option<String>,
    /// CSV of norms; the fits go next to it as .json [default: lindecay.csv]
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON of fit records [default: fits.json]
    #[arg(long)]
    fits: Option<PathBuf>,
}

fn path_value(p: &std::path::Path) -> toml::Value {
    toml::Value::String(p.to_string_lossy().into_owned())
}

fn split_numbers(key: &str, text: &str, count: usize) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let values: Option<Vec<f64>> = parts.iter().map(|p| p.trim().parse().ok()).collect();
    match values {
        Some(v) if v.len() == count => Ok(v),
        _ => Err(emx::Error::config(
            key,
            format!("expected {count} colon-separated numbers, got `{text}`"),
        )),
    }
}

fn build_config(cli: &Cli) -> Result<(ExperimentConfig, Command)> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    for s in &cli.sets {
        let (k, v) = s
            .split_once('=')
            .ok_or_else(|| emx::Error::config(s, "expected KEY=VALUE"))?;
        cfg.set(k.trim(), v.trim())?;
    }
    if let Some(d) = &cli.out_dir {
        cfg.set_value("out_dir", path_value(d))?;
    }
    if let Some(s) = cli.seed {
        cfg.set_value("seed", s as i64)?;
    }
    if let Some(t) = cli.threads {
        cfg.set_value("threads", t as i64)?;
    }
    let set_f = |cfg: &mut ExperimentConfig, key: &str, v: Option<f64>| -> Result<()> {
        match v {
            Some(v) => cfg.set_value(key, v),
            None => Ok(()),
        }
    };
    let set_p = |cfg: &mut ExperimentConfig, key: &str, v: &Option<PathBuf>| -> Result<()> {
        match v {
            Some(p) => cfg.set_value(key, path_value(p)),
            None => Ok(()),
        }
    };
    let command = match &cli.command {
        Sub::Stationary(a) => {
            set_f(&mut cfg, "model.gamma", a.gamma)?;
            set_f(&mut cfg, "background.eps", a.eps)?;
            set_f(&mut cfg, "background.width", a.width)?;
            if let Some(p) = a.profile {
                let name = match p {
                    ProfileFamily::Gaussian => "gaussian",
                    ProfileFamily::DoubleBump => "double-bump",
                };
                cfg.set_value("background.profile", name)?;
            }
            if let Some(n) = a.grid_n {
                cfg.set_value("grid.n", n as i64)?;
            }
            set_f(&mut cfg, "grid.box_l", a.box_l)?;
            set_f(&mut cfg, "stationary.tol", a.tol)?;
            set_p(&mut cfg, "stationary.out", &a.out)?;
            set_p(&mut cfg, "stationary.report", &a.report)?;
            Command::Stationary
        }
        Sub::Evolve(a) => {
            if let Some(init) = &a.init {
                cfg.set_value("evolve.init", init[0].as_str())?;
                if let Some(snap) = init.get(1) {
                    cfg.set_value("evolve.snapshot", snap.as_str())?;
                }
            }
            set_f(&mut cfg, "evolve.amp", a.amp)?;
            set_f(&mut cfg, "integrator.t_end", a.t_end)?;
            set_f(&mut cfg, "integrator.cfl", a.cfl)?;
            set_f(&mut cfg, "integrator.cadence", a.cadence)?;
            Command::Evolve
        }
        Sub::Lyapunov(a) => {
            set_p(&mut cfg, "lyapunov.series", &a.series)?;
            set_p(&mut cfg, "lyapunov.report", &a.report)?;
            Command::Lyapunov
        }
        Sub::Lindecay(a) => {
            set_f(&mut cfg, "model.gamma", a.gamma)?;
            if let Some(g) = &a.t_grid {
                let v = split_numbers("lindecay.t_grid", g, 3)?;
                if v[2] < 0.0 || v[2].fract() != 0.0 {
                    return Err(emx::Error::config("lindecay.t_grid", "points must be a whole number"));
                }
                cfg.set_value("lindecay.t_grid.start", v[0])?;
                cfg.set_value("lindecay.t_grid.end", v[1])?;
                cfg.set_value("lindecay.t_grid.points", v[2] as i64)?;
            }
            set_f(&mut cfg, "lindecay.profile.width", a.width)?;
            if let Some(w) = &a.fit_window {
                let v = split_numbers("lindecay.fit_window", w, 2)?;
                cfg.set_value("lindecay.fit_window", toml::Value::Array(vec![v[0].into(), v[1].into()]))?;
            }
            set_p(&mut cfg, "lindecay.out", &a.out)?;
            match (&a.fits, &a.out) {
                (Some(f), _) => cfg.set_value("lindecay.fits", path_value(f))?,
                (None, Some(o)) => cfg.set_value("lindecay.fits", path_value(&o.with_extension("json")))?,
                _ => {}
            }
            Command::Lindecay
        }
    };
    cfg.validate()?;
    Ok((cfg, command))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cfg, command) = match build_config(&cli) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("emx: {e}");
            return ExitCode::from(2);
        }
    };
    if cli.print_config {
        print!("{}", cfg.to_toml());
        return ExitCode::SUCCESS;
    }
    emx::set_threads(cfg.threads);
    match run_experiment(&cfg, command) {
        Ok(m) => {
            for c in &m.checks {
                let tag = match c.status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                    Status::Skipped => "SKIP",
                };
                println!("{tag} {:<24} {}", c.name, c.detail);
            }
            println!(
                "{} in {:.1} s, manifest {}",
                command.as_str(),
                m.wall_clock_s,
                cfg.out_dir.join(emx::experiment::MANIFEST_FILE).display()
            );
            if m.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("emx {}: {e}", command.as_str());
            ExitCode::from(2)
        }
    }
}
