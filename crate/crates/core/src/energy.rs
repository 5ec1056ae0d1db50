//! Energy and dissipation functionals of the perturbation around the steady
//! state, and the numerical check of the Lyapunov inequality along a run.
//!
//! Norm convention: `||grad^j f||_m^2` is the sum of `||d^alpha f||^2` over
//! `j <= |alpha| <= m + j`, every multi-index counted once.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{density_from_sigma, PerturbationState};
use crate::error::{Error, Result};
use crate::par;
use crate::spectral::{sobolev_weight, MultiIndex, ScalarField, Spectral, SpectralField};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnergyWeights {
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
    /// Highest derivative order `N`.
    pub order: u32,
}

impl Default for EnergyWeights {
    fn default() -> Self {
        Self {
            kappa1: 0.1,
            kappa2: 0.005,
            kappa3: 0.002,
            order: 3,
        }
    }
}

impl EnergyWeights {
    /// Checks `0 < kappa3 < kappa2 < kappa1 < 1`, `kappa2^(3/2) < kappa3`, `order >= 3`.
    pub fn new(kappa1: f64, kappa2: f64, kappa3: f64, order: u32) -> Result<Self> {
        let w = Self {
            kappa1,
            kappa2,
            kappa3,
            order,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let Self {
            kappa1: k1,
            kappa2: k2,
            kappa3: k3,
            order,
        } = *self;
        if order < 3 {
            return Err(Error::InadmissibleWeights(format!(
                "energy.order must be >= 3, got {order}"
            )));
        }
        if !(k3 > 0.0 && k3 < k2 && k2 < k1 && k1 < 1.0) {
            return Err(Error::InadmissibleWeights(format!(
                "need 0 < kappa3 < kappa2 < kappa1 < 1, got kappa1={k1}, kappa2={k2}, kappa3={k3}"
            )));
        }
        if !(k2.powf(1.5) < k3) {
            return Err(Error::InadmissibleWeights(format!(
                "need kappa2^(3/2) < kappa3, got kappa2^(3/2) = {:.3e} >= kappa3 = {k3}",
                k2.powf(1.5)
            )));
        }
        Ok(())
    }

    /// Zero cross-term weights. Not admissible; for structural checks only.
    pub fn uncoupled(order: u32) -> Self {
        Self {
            kappa1: 0.0,
            kappa2: 0.0,
            kappa3: 0.0,
            order,
        }
    }
}

/// All functionals at one instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    /// Symmetrized clock.
    pub tau: f64,
    pub e_full: f64,
    pub d_full: f64,
    pub e_high: f64,
    pub d_high: f64,
    /// Unweighted cross terms of the full functional.
    pub interactive: [f64; 3],
    /// Unweighted cross terms restricted to `|alpha| >= 1`.
    pub interactive_high: [f64; 3],
    /// `||V||_N^2`
    pub norm_full_sq: f64,
    /// `||grad V||_{N-1}^2`
    pub norm_high_sq: f64,
    /// `E_N / ||V||_N^2`
    pub ratio_full: f64,
    /// `E_N^h / ||grad V||_{N-1}^2`
    pub ratio_high: f64,
    /// `||sigma_st||_{H^{N+1}}`
    pub delta: f64,
    /// `||d^alpha V||` over the four fields together, `|alpha| <= N`.
    pub alpha_norms: Vec<(MultiIndex, f64)>,
}

/// Pieces that depend only on the steady state, computed once per run.
#[derive(Debug, Clone)]
pub struct EnergyEvaluator {
    spectral: Spectral,
    weights: EnergyWeights,
    /// `1 + sigma_st + Phi(sigma_st)`
    weight_field: ScalarField,
    delta: f64,
}

struct Coeffs {
    sigma: SpectralField,
    v: [SpectralField; 3],
    e: [SpectralField; 3],
    b: [SpectralField; 3],
}

fn ratio(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        if a == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        a / b
    }
}

impl EnergyEvaluator {
    /// Admissibility of the weights is not enforced here, so that the
    /// uncoupled functional can be evaluated; [`EnergyWeights::validate`] is
    /// applied at configuration time.
    pub fn new(
        spectral: &Spectral,
        sigma_st: &ScalarField,
        gamma: f64,
        weights: EnergyWeights,
    ) -> Result<Self> {
        if weights.order < 3 {
            return Err(Error::InadmissibleWeights(format!(
                "energy.order must be >= 3, got {}",
                weights.order
            )));
        }
        let data = sigma_st
            .data()
            .iter()
            .map(|&s| density_from_sigma(s, gamma))
            .collect::<Result<Vec<_>>>()?;
        let weight_field = ScalarField::from_vec(*sigma_st.grid(), data);
        let delta = spectral.sobolev_norm(sigma_st, weights.order + 1)?;
        Ok(Self {
            spectral: spectral.clone(),
            weights,
            weight_field,
            delta,
        })
    }

    pub fn weights(&self) -> &EnergyWeights {
        &self.weights
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    fn coeffs(&self, p: &PerturbationState) -> Result<Coeffs> {
        let sp = &self.spectral;
        Ok(Coeffs {
            sigma: sp.transform(&p.sigma)?,
            v: sp.transform_vec(&p.v)?,
            e: sp.transform_vec(&p.e)?,
            b: sp.transform_vec(&p.b)?,
        })
    }

    /// `sum_{min <= |alpha| <= max} ||d^alpha f||^2` over several scalar fields.
    fn band(&self, fields: &[&SpectralField], min: u32, max: u32) -> f64 {
        let sp = &self.spectral;
        let total: f64 = (0..sp.grid().len())
            .map(|idx| {
                let power: f64 = fields.iter().map(|f| f.coeffs()[idx].norm_sqr()).sum();
                power * sobolev_weight(sp.kd(idx), min, max)
            })
            .sum();
        total * sp.parseval_factor()
    }

    /// `int w |d^alpha f|^2` for each `|alpha| <= N`, summed over `fields`.
    fn weighted_table(&self, fields: &[&SpectralField]) -> Result<Vec<(MultiIndex, f64)>> {
        let alphas = MultiIndex::range(0, self.weights.order);
        let sp = &self.spectral;
        let w = self.weight_field.data();
        let dv = sp.grid().cell_volume();
        let weighted = |d: &ScalarField| -> f64 {
            d.data().iter().zip(w).map(|(x, wi)| wi * x * x).sum::<f64>() * dv
        };
        // two multi-indices per transform
        let pairs = par::map_collect(alphas.len().div_ceil(2), |p| -> Result<[f64; 2]> {
            let (i, j) = (2 * p, (2 * p + 1).min(alphas.len() - 1));
            let mut total = [0.0; 2];
            for f in fields {
                let (a, b) = sp.inverse_pair(&sp.derivative(f, alphas[i]), &sp.derivative(f, alphas[j]))?;
                total[0] += weighted(&a);
                total[1] += weighted(&b);
            }
            Ok(total)
        });
        let mut vals = Vec::with_capacity(alphas.len());
        for p in pairs {
            vals.extend(p?);
        }
        Ok(alphas.into_iter().zip(vals).collect())
    }

    /// Unweighted cross terms over `min <= |alpha|` with the order caps of
    /// the functional: `N-1` for the first two, `N-2` for the third.
    fn cross_terms(&self, c: &Coeffs, min: u32) -> [f64; 3] {
        let n = self.weights.order;
        let sp = &self.spectral;
        let pf = sp.parseval_factor();
        let len = sp.grid().len();
        let mut acc = [0.0; 3];
        for idx in 0..len {
            let k = sp.kd(idx);
            let w1 = sobolev_weight(k, min, n - 1);
            let w3 = if n >= 2 + min { sobolev_weight(k, min, n - 2) } else { 0.0 };
            let s = c.sigma.coeffs()[idx];
            let v = [c.v[0].coeffs()[idx], c.v[1].coeffs()[idx], c.v[2].coeffs()[idx]];
            let e = [c.e[0].coeffs()[idx], c.e[1].coeffs()[idx], c.e[2].coeffs()[idx]];
            let b = [c.b[0].coeffs()[idx], c.b[1].coeffs()[idx], c.b[2].coeffs()[idx]];
            let mut t1 = 0.0;
            let mut t2 = 0.0;
            for j in 0..3 {
                t1 += (v[j].conj() * I * k[j] * s).re;
                t2 += (v[j].conj() * e[j]).re;
            }
            let curl = [
                I * (k[1] * e[2] - k[2] * e[1]),
                I * (k[2] * e[0] - k[0] * e[2]),
                I * (k[0] * e[1] - k[1] * e[0]),
            ];
            let t3: f64 = (0..3).map(|j| (curl[j].conj() * b[j]).re).sum();
            acc[0] += w1 * t1;
            acc[1] += w1 * t2;
            acc[2] -= w3 * t3;
        }
        acc.map(|a| a * pf)
    }

    /// Evaluate every functional for one perturbation.
    pub fn report(&self, p: &PerturbationState) -> Result<EnergyReport> {
        let n = self.weights.order;
        let c = self.coeffs(p)?;
        let sv: Vec<&SpectralField> = std::iter::once(&c.sigma).chain(c.v.iter()).collect();
        let v_only: Vec<&SpectralField> = c.v.iter().collect();
        let eb: Vec<&SpectralField> = c.e.iter().chain(c.b.iter()).collect();
        let e_only: Vec<&SpectralField> = c.e.iter().collect();

        let weighted_v = self.weighted_table(&v_only)?;
        let weighted_sv: Vec<(MultiIndex, f64)> = self
            .weighted_table(&[&c.sigma])?
            .into_iter()
            .zip(&weighted_v)
            .map(|((a, x), (_, y))| (a, x + y))
            .collect();
        let sum_from = |t: &[(MultiIndex, f64)], min: u32| -> f64 {
            t.iter().filter(|(a, _)| a.order() >= min).map(|(_, v)| v).sum()
        };

        let cross = self.cross_terms(&c, 0);
        let cross_high = self.cross_terms(&c, 1);
        let w = &self.weights;
        let mix = |x: [f64; 3]| w.kappa1 * x[0] + w.kappa2 * x[1] + w.kappa3 * x[2];

        let e_full = sum_from(&weighted_sv, 0) + self.band(&eb, 0, n) + mix(cross);
        let e_high = sum_from(&weighted_sv, 1) + self.band(&eb, 1, n) + mix(cross_high);

        let sigma_only = [&c.sigma];
        let d_full = sum_from(&weighted_v, 0)
            + self.band(&sigma_only, 0, n)
            + self.band(&eb, 1, n - 1)
            + self.band(&e_only, 0, 0);
        let d_high = sum_from(&weighted_v, 1)
            + self.band(&sigma_only, 1, n)
            + if n >= 3 { self.band(&eb, 2, n - 1) } else { 0.0 }
            + self.band(&e_only, 1, 1);

        let all: Vec<&SpectralField> = sv.iter().copied().chain(eb.iter().copied()).collect();
        let norm_full_sq = self.band(&all, 0, n);
        let norm_high_sq = self.band(&all, 1, n);

        let sp = &self.spectral;
        let mut power = vec![0.0; sp.grid().len()];
        for f in &all {
            for (p, c) in power.iter_mut().zip(f.coeffs()) {
                *p += c.norm_sqr();
            }
        }
        let pf = sp.parseval_factor();
        let alpha_norms = MultiIndex::range(0, n)
            .into_iter()
            .map(|a| {
                let s: f64 = power
                    .iter()
                    .enumerate()
                    .map(|(idx, p)| p * a.monomial(sp.kd(idx)).powi(2))
                    .sum();
                (a, (s * pf).sqrt())
            })
            .collect();

        Ok(EnergyReport {
            tau: p.tau,
            e_full,
            d_full,
            e_high,
            d_high,
            interactive: cross,
            interactive_high: cross_high,
            norm_full_sq,
            norm_high_sq,
            ratio_full: ratio(e_full, norm_full_sq),
            ratio_high: ratio(e_high, norm_high_sq),
            delta: self.delta,
            alpha_norms,
        })
    }
}

/// `E_N` for one perturbation.
pub fn energy_full(
    spectral: &Spectral,
    p: &PerturbationState,
    sigma_st: &ScalarField,
    gamma: f64,
    w: EnergyWeights,
) -> Result<f64> {
    Ok(EnergyEvaluator::new(spectral, sigma_st, gamma, w)?.report(p)?.e_full)
}

/// `E_N^h` for one perturbation.
pub fn energy_high(
    spectral: &Spectral,
    p: &PerturbationState,
    sigma_st: &ScalarField,
    gamma: f64,
    w: EnergyWeights,
) -> Result<f64> {
    Ok(EnergyEvaluator::new(spectral, sigma_st, gamma, w)?.report(p)?.e_high)
}

/// `D_N` for one perturbation.
pub fn dissipation_full(
    spectral: &Spectral,
    p: &PerturbationState,
    sigma_st: &ScalarField,
    gamma: f64,
    w: EnergyWeights,
) -> Result<f64> {
    Ok(EnergyEvaluator::new(spectral, sigma_st, gamma, w)?.report(p)?.d_full)
}

/// `D_N^h` for one perturbation.
pub fn dissipation_high(
    spectral: &Spectral,
    p: &PerturbationState,
    sigma_st: &ScalarField,
    gamma: f64,
    w: EnergyWeights,
) -> Result<f64> {
    Ok(EnergyEvaluator::new(spectral, sigma_st, gamma, w)?.report(p)?.d_high)
}

/// The three cross terms without their weights.
pub fn interactive_terms(spectral: &Spectral, p: &PerturbationState, order: u32) -> Result<[f64; 3]> {
    let zero = ScalarField::zeros(*spectral.grid());
    let ev = EnergyEvaluator::new(spectral, &zero, 2.0, EnergyWeights::uncoupled(order))?;
    Ok(ev.cross_terms(&ev.coeffs(p)?, 0))
}

/// One interval on which the energy rose by more than the discretization slack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub index: usize,
    pub tau_start: f64,
    pub tau_end: f64,
    pub increase: f64,
    pub allowed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCertificate {
    pub pair: String,
    /// Largest `lambda` with `E_{k+1} - E_k <= -lambda dtau D_k + tol` on every
    /// interval. `None` when every interval holds for any `lambda`.
    pub lambda_best: Option<f64>,
    /// Same with `tol = 0`.
    pub lambda_strict: Option<f64>,
    pub tol_disc: f64,
    pub intervals: usize,
    pub violations: Vec<Violation>,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovCertificate {
    pub full: PairCertificate,
    pub high: PairCertificate,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub ratios_in_range: bool,
    pub certified: bool,
}

/// Multiplier of `dtau^2 max D` in the tolerance.
pub const TOL_FACTOR: f64 = 10.0;

fn certify_pair(name: &str, tau: &[f64], e: &[f64], d: &[f64]) -> PairCertificate {
    let intervals = tau.len().saturating_sub(1);
    let dtau = tau.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let dmax = d.iter().copied().fold(0.0, f64::max);
    let tol = TOL_FACTOR * dtau * dtau * dmax;
    let best = |tol: f64| -> Option<f64> {
        let mut lam: Option<f64> = None;
        for k in 0..intervals {
            let step = tau[k + 1] - tau[k];
            let slack = e[k] - e[k + 1] + tol;
            let denom = step * d[k];
            let bound = if denom > 0.0 {
                slack / denom
            } else if slack >= 0.0 {
                continue;
            } else {
                f64::NEG_INFINITY
            };
            lam = Some(lam.map_or(bound, |l: f64| l.min(bound)));
        }
        lam
    };
    let violations: Vec<Violation> = (0..intervals)
        .filter(|&k| e[k + 1] - e[k] > tol)
        .map(|k| Violation {
            index: k,
            tau_start: tau[k],
            tau_end: tau[k + 1],
            increase: e[k + 1] - e[k],
            allowed: tol,
        })
        .collect();
    let lambda_best = best(tol);
    let certified = violations.is_empty() && lambda_best.is_none_or(|l| l > 0.0);
    PairCertificate {
        pair: name.to_string(),
        lambda_best,
        lambda_strict: best(0.0),
        tol_disc: tol,
        intervals,
        violations,
        certified,
    }
}

/// The columns of an [`EnergyReport`] the certification reads.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergySample {
    pub tau: f64,
    pub e_full: f64,
    pub d_full: f64,
    pub e_high: f64,
    pub d_high: f64,
    pub ratio_full: f64,
    pub ratio_high: f64,
}

impl From<&EnergyReport> for EnergySample {
    fn from(r: &EnergyReport) -> Self {
        Self {
            tau: r.tau,
            e_full: r.e_full,
            d_full: r.d_full,
            e_high: r.e_high,
            d_high: r.d_high,
            ratio_full: r.ratio_full,
            ratio_high: r.ratio_high,
        }
    }
}

/// Check both Lyapunov inequalities along a uniformly sampled trajectory.
pub fn lyapunov_certify(reports: &[EnergyReport]) -> LyapunovCertificate {
    let samples: Vec<EnergySample> = reports.iter().map(EnergySample::from).collect();
    certify_samples(&samples)
}

pub fn certify_samples(samples: &[EnergySample]) -> LyapunovCertificate {
    let tau: Vec<f64> = samples.iter().map(|r| r.tau).collect();
    let col = |f: fn(&EnergySample) -> f64| samples.iter().map(f).collect::<Vec<_>>();
    let full = certify_pair("full", &tau, &col(|r| r.e_full), &col(|r| r.d_full));
    let high = certify_pair("high", &tau, &col(|r| r.e_high), &col(|r| r.d_high));
    let ratios: Vec<f64> = samples
        .iter()
        .flat_map(|r| [r.ratio_full, r.ratio_high])
        .collect();
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max_ratio = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ratios_in_range = ratios.iter().all(|&r| (0.5..=2.0).contains(&r));
    let certified = full.certified && high.certified && ratios_in_range;
    LyapunovCertificate {
        full,
        high,
        min_ratio,
        max_ratio,
        ratios_in_range,
        certified,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{random_band_limited, GridSpec, VectorField};

    fn small_box() -> Spectral {
        Spectral::new(GridSpec::new(16, 8.0).unwrap())
    }

    fn random_state(s: &Spectral, seed: u64, amp: f64) -> PerturbationState {
        let r = |k| random_band_limited(s, 4, seed * 16 + k).scale(amp);
        let rv = |k| VectorField::new([r(k), r(k + 1), r(k + 2)]);
        PerturbationState {
            sigma: r(0),
            v: rv(1),
            e: rv(4),
            b: s.curl(&rv(7)).unwrap(),
            tau: 0.0,
        }
    }

    #[test]
    fn weight_ordering_enforced() {
        assert!(EnergyWeights::default().validate().is_ok());
        assert!(EnergyWeights::new(0.1, 0.1, 0.2, 3).is_err());
        assert!(EnergyWeights::new(0.1, 0.05, 0.002, 3).is_err()); // 0.05^1.5 > 0.002
        assert!(EnergyWeights::new(0.1, 0.005, 0.002, 2).is_err());
        assert!(EnergyWeights::new(1.5, 0.005, 0.002, 3).is_err());
    }

    #[test]
    fn zero_perturbation_gives_zero() {
        let s = small_box();
        let g = *s.grid();
        let ev = EnergyEvaluator::new(&s, &ScalarField::zeros(g), 1.4, EnergyWeights::default())
            .unwrap();
        let r = ev.report(&PerturbationState::zeros(g)).unwrap();
        assert_eq!(
            (r.e_full, r.d_full, r.e_high, r.d_high),
            (0.0, 0.0, 0.0, 0.0)
        );
        assert_eq!(r.interactive, [0.0; 3]);
    }

    #[test]
    fn uncoupled_energy_is_sobolev_norm() {
        let s = small_box();
        let g = *s.grid();
        let p = random_state(&s, 1, 0.1);
        let ev = EnergyEvaluator::new(&s, &ScalarField::zeros(g), 1.4, EnergyWeights::uncoupled(3))
            .unwrap();
        let r = ev.report(&p).unwrap();
        let mut expect = s.sobolev_norm(&p.sigma, 3).unwrap().powi(2);
        for v in [&p.v, &p.e, &p.b] {
            expect += s.sobolev_norm_vec(v, 3).unwrap().powi(2);
        }
        assert!((r.e_full - expect).abs() < 1e-12 * expect);
        assert!((r.norm_full_sq - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn constant_fields_have_no_high_energy() {
        let s = small_box();
        let g = *s.grid();
        let c = |v| ScalarField::constant(g, v);
        let p = PerturbationState {
            sigma: c(0.1),
            v: VectorField::new([c(0.2), c(-0.1), c(0.05)]),
            e: VectorField::new([c(0.3), c(0.0), c(0.1)]),
            b: VectorField::new([c(0.1), c(0.2), c(0.3)]),
            tau: 0.0,
        };
        let ev = EnergyEvaluator::new(&s, &ScalarField::zeros(g), 1.4, EnergyWeights::default())
            .unwrap();
        let r = ev.report(&p).unwrap();
        assert!(r.e_high.abs() < 1e-12);
        assert!(r.d_high.abs() < 1e-12);

        // constant B alone: no dissipation at all
        let only_b = PerturbationState {
            b: p.b.clone(),
            ..PerturbationState::zeros(g)
        };
        assert!(ev.report(&only_b).unwrap().d_full.abs() < 1e-12);
    }

    #[test]
    fn gradient_velocity_makes_first_cross_term_a_norm() {
        let s = small_box();
        let g = *s.grid();
        let sigma = random_band_limited(&s, 4, 3).scale(0.1);
        let p = PerturbationState {
            v: s.grad(&sigma).unwrap(),
            sigma: sigma.clone(),
            ..PerturbationState::zeros(g)
        };
        let cross = interactive_terms(&s, &p, 3).unwrap();
        // sum_{|alpha| <= 2} sum_j ||d_j d^alpha sigma||^2
        let f = s.transform(&sigma).unwrap();
        let expect = s.spectral_inner(&f, &f, |k| {
            (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) * sobolev_weight(k, 0, 2)
        });
        assert!(cross[0] > 0.0);
        assert!((cross[0] - expect).abs() < 1e-10 * expect);
    }

    #[test]
    fn dissipation_dominates_its_parts() {
        let s = small_box();
        let sigma_st = random_band_limited(&s, 2, 99).scale(0.02);
        let ev = EnergyEvaluator::new(&s, &sigma_st, 5.0 / 3.0, EnergyWeights::default()).unwrap();
        for seed in 0..5 {
            let p = random_state(&s, seed, 0.05);
            let r = ev.report(&p).unwrap();
            assert!(r.d_full >= r.d_high && r.d_high >= 0.0);
            let e_sq = crate::spectral::l2_norm_vec(&p.e).powi(2);
            assert!(r.d_full >= e_sq);
            for k in 0..3 {
                assert!(r.interactive[k].abs() <= r.norm_full_sq);
            }
        }
    }

    fn synthetic(e: &[f64], d: &[f64]) -> Vec<EnergyReport> {
        e.iter()
            .zip(d)
            .enumerate()
            .map(|(k, (&e, &d))| EnergyReport {
                tau: 0.5 * k as f64,
                e_full: e,
                d_full: d,
                e_high: e,
                d_high: d,
                interactive: [0.0; 3],
                interactive_high: [0.0; 3],
                norm_full_sq: e,
                norm_high_sq: e,
                ratio_full: 1.0,
                ratio_high: 1.0,
                delta: 0.0,
                alpha_norms: vec![],
            })
            .collect()
    }

    #[test]
    fn zero_trajectory_is_vacuous() {
        let c = lyapunov_certify(&synthetic(&[0.0; 5], &[0.0; 5]));
        assert!(c.full.lambda_best.is_none());
        assert!(c.full.violations.is_empty());
        assert!(c.certified);
    }

    #[test]
    fn exponential_decay_certifies_its_rate() {
        // E = exp(-tau), D = E: true lambda 1 for the continuous inequality
        let e: Vec<f64> = (0..40).map(|k| (-0.5 * k as f64).exp()).collect();
        let c = lyapunov_certify(&synthetic(&e, &e));
        let strict = c.full.lambda_strict.unwrap();
        assert!(strict > 0.7 && strict < 1.0, "{strict}");
        assert!(c.full.certified);
    }

    #[test]
    fn growth_is_reported() {
        let e = [1.0, 0.9, 0.8, 2.0, 1.9];
        let c = lyapunov_certify(&synthetic(&e, &[0.01; 5]));
        assert_eq!(c.full.violations.len(), 1);
        assert_eq!(c.full.violations[0].index, 2);
        assert!(!c.certified);
    }
}
