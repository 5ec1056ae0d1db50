use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum number of samples inside a fit window.
pub const MIN_SAMPLES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayLaw {
    /// `y ~ C (1 + t)^p`; the estimate is `p`.
    Power,
    /// `y ~ C exp(-r t)`; the estimate is `r`.
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayTarget {
    pub law: DecayLaw,
    pub value: f64,
    pub tolerance: f64,
}

impl DecayTarget {
    pub fn power(value: f64, tolerance: f64) -> Self {
        Self {
            law: DecayLaw::Power,
            value,
            tolerance,
        }
    }

    pub fn exponential(value: f64, tolerance: f64) -> Self {
        Self {
            law: DecayLaw::Exponential,
            value,
            tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub label: String,
    pub law: DecayLaw,
    pub estimate: f64,
    /// `ln C`
    pub intercept: f64,
    pub window: [f64; 2],
    pub samples: usize,
    /// largest `|ln y - fit|` inside the window
    pub residual: f64,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Least-squares line through `(x(t), ln y)` over the samples with
/// `t in window`, where `x = ln(1 + t)` for power laws and `x = t` otherwise.
pub fn fit_decay(
    label: &str,
    series: &[(f64, f64)],
    window: (f64, f64),
    target: DecayTarget,
) -> Result<DecayFit> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(t, _)| *t >= window.0 && *t <= window.1)
        .copied()
        .collect();
    if pts.len() < MIN_SAMPLES {
        return Err(Error::Fit(format!(
            "{label}: {} samples in [{}, {}], need at least {MIN_SAMPLES}",
            pts.len(),
            window.0,
            window.1
        )));
    }
    if let Some((t, y)) = pts.iter().find(|(_, y)| !(*y > 0.0) || !y.is_finite()) {
        return Err(Error::Fit(format!("{label}: non-positive value {y:e} at t = {t}")));
    }
    let x = |t: f64| match target.law {
        DecayLaw::Power => t.ln_1p(),
        DecayLaw::Exponential => t,
    };
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| x(p.0)).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(t, y) in &pts {
        let dx = x(t) - mx;
        sxx += dx * dx;
        sxy += dx * (y.ln() - my);
    }
    if !(sxx > 0.0) {
        return Err(Error::Fit(format!("{label}: degenerate window")));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = pts
        .iter()
        .map(|&(t, y)| (y.ln() - intercept - slope * x(t)).abs())
        .fold(0.0, f64::max);
    let estimate = match target.law {
        DecayLaw::Power => slope,
        DecayLaw::Exponential => -slope,
    };
    Ok(DecayFit {
        label: label.to_string(),
        law: target.law,
        estimate,
        intercept,
        window: [window.0, window.1],
        samples: pts.len(),
        residual,
        target: target.value,
        tolerance: target.tolerance,
        pass: residual.is_finite() && (estimate - target.value).abs() <= target.tolerance,
    })
}
