use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::IntegratorConfig;
use crate::energy::EnergyWeights;
use crate::error::{Error, Result};
use crate::lindecay::{log_time_grid, InitialProfile, QuadratureOptions, MIN_SAMPLES};
use crate::spectral::GridSpec;
use crate::stationary::{BackgroundProfile, ModelParams, PicardOptions, ProfileFamily};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub gamma: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self { gamma: 5.0 / 3.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BackgroundSection {
    pub profile: ProfileFamily,
    pub eps: f64,
    pub width: f64,
}

impl Default for BackgroundSection {
    fn default() -> Self {
        Self {
            profile: ProfileFamily::Gaussian,
            eps: 0.05,
            width: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub n: usize,
    pub box_l: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { n: 48, box_l: 40.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StationarySection {
    pub tol: f64,
    pub max_iter: usize,
    /// Also solve at `eps / 2` and report the ratio change.
    pub stability: bool,
    pub out: PathBuf,
    pub report: PathBuf,
}

impl Default for StationarySection {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 200,
            stability: true,
            out: "stationary.emxf".into(),
            report: "stationary.json".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitKind {
    #[serde(rename = "stationary+noise")]
    StationaryNoise,
    #[serde(rename = "stationary-exact")]
    StationaryExact,
    #[serde(rename = "custom")]
    Custom,
}

impl std::str::FromStr for InitKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "stationary+noise" => Ok(Self::StationaryNoise),
            "stationary-exact" => Ok(Self::StationaryExact),
            "custom" => Ok(Self::Custom),
            o => Err(format!(
                "unknown init `{o}` (stationary+noise | stationary-exact | custom)"
            )),
        }
    }
}

impl InitKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::StationaryNoise => "stationary+noise",
            Self::StationaryExact => "stationary-exact",
            Self::Custom => "custom",
        }
    }
}

/// How the magnetic part of each bump is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MagneticInit {
    /// `curl(c_A G)`: the low-frequency amplitude vanishes like `|k|`.
    Curl,
    /// Divergence-free projection of `c_A G`: nonzero amplitude at `k -> 0`.
    Transverse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolveSection {
    pub init: InitKind,
    /// Snapshot read by `init = "custom"`.
    pub snapshot: Option<PathBuf>,
    pub amp: f64,
    pub bumps: usize,
    pub magnetic: MagneticInit,
    pub series: PathBuf,
    /// Write a snapshot every this many observations (0 = first and last only).
    pub snapshot_every: usize,
    /// Evaluate the energy functionals at each observation.
    pub energy: bool,
    /// Start of the decay-trend fit; the end is the saturation time `(L / 2 pi)^2`.
    pub trend_start: f64,
}

impl Default for EvolveSection {
    fn default() -> Self {
        Self {
            init: InitKind::StationaryNoise,
            snapshot: None,
            amp: 1e-3,
            bumps: 3,
            magnetic: MagneticInit::Transverse,
            series: "series.csv".into(),
            snapshot_every: 0,
            energy: true,
            trend_start: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LyapunovSection {
    /// Existing `series.csv` to certify; when absent an `evolve` run is made.
    pub series: Option<PathBuf>,
    pub report: PathBuf,
}

impl Default for LyapunovSection {
    fn default() -> Self {
        Self {
            series: None,
            report: "lyapunov.json".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeGrid {
    pub start: f64,
    pub end: f64,
    pub points: usize,
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self {
            start: 1.0,
            end: 1000.0,
            points: 60,
        }
    }
}

impl TimeGrid {
    pub fn times(&self) -> Vec<f64> {
        log_time_grid(self.start, self.end, self.points)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LindecaySection {
    pub t_grid: TimeGrid,
    pub fit_window: [f64; 2],
    pub profile: InitialProfile,
    pub quadrature: Option<QuadratureOptions>,
    pub out: PathBuf,
    pub fits: PathBuf,
}

impl Default for LindecaySection {
    fn default() -> Self {
        Self {
            t_grid: TimeGrid::default(),
            fit_window: [50.0, 500.0],
            profile: InitialProfile::default(),
            quadrature: None,
            out: "lindecay.csv".into(),
            fits: "fits.json".into(),
        }
    }
}

/// Everything one invocation needs. Every section and key is optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Worker threads; 0 keeps the default pool.
    pub threads: usize,
    pub model: ModelSection,
    pub background: BackgroundSection,
    pub grid: GridSection,
    pub stationary: StationarySection,
    pub integrator: IntegratorConfig,
    pub energy: EnergyWeights,
    pub evolve: EvolveSection,
    pub lyapunov: LyapunovSection,
    pub lindecay: LindecaySection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            out_dir: "runs".into(),
            threads: 0,
            model: ModelSection::default(),
            background: BackgroundSection::default(),
            grid: GridSection::default(),
            stationary: StationarySection::default(),
            integrator: IntegratorConfig::default(),
            energy: EnergyWeights::default(),
            evolve: EvolveSection::default(),
            lyapunov: LyapunovSection::default(),
            lindecay: LindecaySection::default(),
        }
    }
}

fn toml_error(e: impl std::fmt::Display) -> Error {
    // toml reports `unknown field `x`, expected ...` with the location
    Error::config("<config>", e.to_string())
}

impl ExperimentConfig {
    /// Parse and validate TOML text.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(toml_error)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    /// Canonical TOML of the effective configuration.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// Set a dotted key from its textual value.
    ///
    /// The value is read as a TOML literal when possible (`1.4`, `true`,
    /// `[50, 500]`) and as a string otherwise.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let parsed = toml::from_str::<toml::Table>(&format!("v = {value}"))
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(value.to_string()));
        self.set_value(key, parsed)
    }

    /// Set a dotted key. Unknown keys and ill-typed values are refused; the
    /// invariants are left to [`validate`](Self::validate).
    pub fn set_value(&mut self, key: &str, value: impl Into<toml::Value>) -> Result<()> {
        let mut root = toml::Value::try_from(&*self).map_err(toml_error)?;
        let mut node = &mut root;
        let parts: Vec<&str> = key.split('.').collect();
        let (last, path) = parts.split_last().expect("split yields one part");
        for part in path {
            node = node
                .as_table_mut()
                .ok_or_else(|| Error::config(key, "not a table"))?
                .entry(part.to_string())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        }
        node.as_table_mut()
            .ok_or_else(|| Error::config(key, "not a table"))?
            .insert(last.to_string(), value.into());
        *self = root
            .try_into()
            .map_err(|e: toml::de::Error| Error::config(key, e.to_string()))?;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        ModelParams::new(self.model.gamma)?;
        GridSpec::new(self.grid.n, self.grid.box_l)
            .map_err(|e| Error::config("grid", e.to_string()))?;
        if !(self.background.eps >= 0.0 && self.background.eps.is_finite()) {
            return Err(Error::config("background.eps", "must be finite and >= 0"));
        }
        if !(self.background.width > 0.0) {
            return Err(Error::config("background.width", "must be > 0"));
        }
        if !(self.stationary.tol > 0.0) {
            return Err(Error::config("stationary.tol", "must be > 0"));
        }
        if self.stationary.max_iter == 0 {
            return Err(Error::config("stationary.max_iter", "must be >= 1"));
        }
        self.integrator.validate()?;
        self.energy
            .validate()
            .map_err(|e| Error::config("energy", e.to_string()))?;
        if !(self.evolve.amp >= 0.0 && self.evolve.amp.is_finite()) {
            return Err(Error::config("evolve.amp", "must be finite and >= 0"));
        }
        if !(self.evolve.trend_start >= 0.0) {
            return Err(Error::config("evolve.trend_start", "must be >= 0"));
        }
        if self.evolve.init == InitKind::Custom && self.evolve.snapshot.is_none() {
            return Err(Error::config(
                "evolve.snapshot",
                "init = \"custom\" needs a snapshot path",
            ));
        }
        let tg = &self.lindecay.t_grid;
        if !(tg.start >= 0.0 && tg.end > tg.start && tg.points >= 2) {
            return Err(Error::config(
                "lindecay.t_grid",
                "need 0 <= start < end and points >= 2",
            ));
        }
        let [w0, w1] = self.lindecay.fit_window;
        if !(w0 >= tg.start && w1 <= tg.end * (1.0 + 1e-12) && w0 < w1) {
            return Err(Error::config(
                "lindecay.fit_window",
                format!("window [{w0}, {w1}] must lie inside the time grid [{}, {}]", tg.start, tg.end),
            ));
        }
        let inside = tg.times().iter().filter(|&&t| t >= w0 && t <= w1).count();
        if inside < MIN_SAMPLES {
            return Err(Error::config(
                "lindecay.fit_window",
                format!("only {inside} grid times inside the window, need {MIN_SAMPLES}"),
            ));
        }
        self.lindecay
            .profile
            .validate()
            .map_err(|e| Error::config("lindecay.profile", e.to_string()))?;
        Ok(())
    }

    pub fn params(&self) -> ModelParams {
        ModelParams::new(self.model.gamma).expect("validated")
    }

    pub fn grid_spec(&self) -> GridSpec {
        GridSpec::new(self.grid.n, self.grid.box_l).expect("validated")
    }

    pub fn background_profile(&self) -> BackgroundProfile {
        BackgroundProfile {
            family: self.background.profile,
            eps: self.background.eps,
            width: self.background.width,
        }
    }

    pub fn picard_options(&self) -> PicardOptions {
        PicardOptions {
            tol: self.stationary.tol,
            max_iter: self.stationary.max_iter,
            ..Default::default()
        }
    }

    /// `p` relative to the output directory unless absolute.
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.out_dir.join(p)
        }
    }
}
