use emx::dynamics::{
    perturbation, perturbed_state, random_bumps, run, to_symmetric, Dynamics, IntegratorConfig,
    PerturbationState,
};
use emx::energy::{lyapunov_certify, EnergyEvaluator, EnergyWeights};
use emx::spectral::{random_band_limited, GridSpec, Spectral, VectorField};
use emx::stationary::{
    picard_iterate, BackgroundDensity, BackgroundProfile, ModelParams, PicardOptions,
    StationaryState,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GAMMA: f64 = 5.0 / 3.0;

fn steady(n: usize, l: f64) -> (Spectral, BackgroundDensity, StationaryState) {
    let s = Spectral::new(GridSpec::new(n, l).unwrap());
    let nb = BackgroundDensity::new(*s.grid(), BackgroundProfile::gaussian(0.05, 1.0)).unwrap();
    let st = picard_iterate(&s, &nb, ModelParams::new(GAMMA).unwrap(), PicardOptions::default())
        .unwrap();
    (s, nb, st)
}

fn random_perturbation(s: &Spectral, seed: u64) -> PerturbationState {
    let r = |k: u64| random_band_limited(s, 3, seed * 16 + k);
    let rv = |k| VectorField::new([r(k), r(k + 1), r(k + 2)]);
    PerturbationState {
        sigma: r(0),
        v: rv(1),
        e: rv(4),
        b: s.curl(&rv(7)).unwrap(),
        tau: 0.0,
    }
}

fn scaled(p: &PerturbationState, c: f64) -> PerturbationState {
    PerturbationState {
        sigma: p.sigma.scale(c),
        v: p.v.scale(c),
        e: p.e.scale(c),
        b: p.b.scale(c),
        tau: p.tau,
    }
}

#[test]
fn energies_are_equivalent_to_sobolev_norms() {
    let (s, _, st) = steady(16, 12.0);
    let ev = EnergyEvaluator::new(&s, &st.sigma, GAMMA, EnergyWeights::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for seed in 0..100 {
        let p = random_perturbation(&s, seed);
        let norm = ev.report(&p).unwrap().norm_full_sq.sqrt();
        let p = scaled(&p, rng.random_range(0.01..0.1) / norm);
        let r = ev.report(&p).unwrap();
        assert!(r.norm_full_sq.sqrt() <= 0.1 + 1e-12);
        for x in [r.ratio_full, r.ratio_high] {
            lo = lo.min(x);
            hi = hi.max(x);
        }
        assert!(r.e_full >= 0.0 && r.d_full >= 0.0 && r.e_high >= 0.0 && r.d_high >= 0.0);
        assert!(r.d_full >= r.d_high);
        for c in r.interactive {
            assert!(c.abs() <= r.norm_full_sq);
        }
    }
    assert!(lo >= 0.9 && hi <= 1.1, "ratios in [{lo}, {hi}]");
}

#[test]
fn small_run_energy_is_nonincreasing() {
    let (s, nb, st) = steady(24, 20.0);
    let dynamics = Dynamics::new(s.clone(), nb.field().clone(), GAMMA);
    let ev = EnergyEvaluator::new(&s, &st.sigma, GAMMA, EnergyWeights::default()).unwrap();
    let start = perturbed_state(&s, &st, &random_bumps(2, 2), 1e-3).unwrap();
    let cfg = IntegratorConfig {
        t_end: 2.0,
        cadence: 0.25,
        ..Default::default()
    };
    let mut reports = Vec::new();
    run(&dynamics, start, &cfg, |x| {
        let p = perturbation(&to_symmetric(x, GAMMA)?, &st)?;
        reports.push(ev.report(&p)?);
        Ok(())
    })
    .unwrap();
    assert_eq!(reports.len(), 9);
    let cert = lyapunov_certify(&reports);
    assert!(cert.certified, "{cert:#?}");
    assert!(cert.full.violations.is_empty() && cert.high.violations.is_empty());
    assert!(cert.full.lambda_best.unwrap() > 0.0);
}
