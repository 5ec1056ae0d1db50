use std::f64::consts::PI;

use emx::lindecay::*;
use nalgebra::SVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GAMMA: f64 = 5.0 / 3.0;

fn random_mode(rng: &mut ChaCha8Rng, radius: f64) -> ModeState {
    let xi = std::array::from_fn(|_| rng.random_range(-radius..radius));
    let amp = std::array::from_fn(|_| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    ModeState { xi, amp }
}

fn gap(a: &ModeState, b: &ModeState) -> f64 {
    a.amp
        .iter()
        .zip(&b.amp)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[test]
fn semigroup_property() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let m = random_mode(&mut rng, 6.0);
        let (s, t) = (rng.random_range(0.0..5.0), rng.random_range(0.0..5.0));
        let p = ModePropagator::new(m.xi, GAMMA);
        let two = p.apply(&p.apply(&m, t), s);
        let one = p.apply(&m, s + t);
        assert!(gap(&one, &two) <= 1e-9 * m.norm(), "{:e}", gap(&one, &two));
    }
}

#[test]
fn short_time_taylor_remainder_is_cubic() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let m = random_mode(&mut rng, 2.0);
    let l = symbol_matrix(m.xi, GAMMA);
    let x = SVector::<Complex64, 10>::from_column_slice(&m.amp);
    let remainder = |h: f64| {
        let hc = Complex64::new(h, 0.0);
        let taylor = x + l * x * hc + l * l * x * (hc * hc * 0.5);
        let got = SVector::<Complex64, 10>::from_column_slice(&propagate_mode(&m, GAMMA, h).amp);
        (got - taylor).norm()
    };
    let hs = [0.04, 0.02, 0.01, 0.005];
    let r: Vec<f64> = hs.iter().map(|&h| remainder(h)).collect();
    // least-squares slope of log r against log h
    let lx: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ly: Vec<f64> = r.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / 4.0;
    let my = ly.iter().sum::<f64>() / 4.0;
    let slope = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>()
        / lx.iter().map(|a| (a - mx).powi(2)).sum::<f64>();
    assert!((slope - 3.0).abs() < 0.1, "slope {slope}");
}

#[test]
fn gauss_functionals_survive_long_propagation() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..40 {
        let m = random_mode(&mut rng, 10.0);
        let (ge, gb) = (m.gauss_electric(), m.gauss_magnetic());
        let p = ModePropagator::new(m.xi, GAMMA);
        for t in [0.5, 10.0, 100.0, 1000.0] {
            let n = p.apply(&m, t);
            assert!((n.gauss_electric() - ge).norm() <= 1e-10, "t = {t}");
            assert!((n.gauss_magnetic() - gb).norm() <= 1e-10, "t = {t}");
        }
    }
}

#[test]
fn symbol_spectrum_is_stable() {
    let r = spectral_stability(GAMMA, 1000, 30.0, 7);
    assert!(r.max_real_part <= 1e-12, "{r:?}");
    assert!(r.c_rational > 0.0 && r.c_squared > 0.0, "{r:?}");
    // the full 10x10 Schur spectrum agrees with the block eigenvalues
    let xi = [0.4, -1.1, 0.8];
    let schur = symbol_matrix(xi, GAMMA).schur().eigenvalues().unwrap();
    let blocks = ModePropagator::new(xi, GAMMA).eigenvalues();
    for z in schur.iter() {
        assert!(blocks.iter().any(|b| (b - z).norm() < 1e-9), "{z}");
    }
}

#[test]
fn initial_norms_match_gaussian_integrals() {
    let w = 2.0;
    let p = InitialProfile::standard(w);
    let scheme = QuadratureScheme::new(QuadratureOptions::default()).unwrap();
    let ev = DecayEvaluator::new(&scheme, &p, GAMMA).unwrap();
    let reqs: Vec<_> = Component::ALL
        .iter()
        .map(|&c| NormRequest::new(c, 0))
        .chain([NormRequest::new(Component::Magnetic, 1)])
        .collect();
    let got = ev.norms(0.0, &reqs);

    let i0 = (PI * w * w / 2.0).powf(1.5);
    let d = p.density_dir;
    let MagneticProfile::Transverse(cb) = p.magnetic else {
        unreachable!()
    };
    let want = [
        dot(d, d) / (w * w) * i0,
        dot(p.velocity, p.velocity) * i0,
        (dot(d, d) + 2.0 * dot(p.electric_transverse, p.electric_transverse)) / 3.0 * i0,
        2.0 / 3.0 * dot(cb, cb) * i0,
        2.0 * dot(cb, cb) / (w * w) * i0,
    ];
    for (g, w2) in got.iter().zip(want) {
        assert!((g - w2.sqrt()).abs() <= 1e-8 * w2.sqrt(), "{g} vs {}", w2.sqrt());
    }
}

#[test]
fn density_decays_with_the_damping_envelope() {
    let scheme = QuadratureScheme::new(QuadratureOptions::for_horizon(20.0)).unwrap();
    let p = InitialProfile::standard(2.0);
    let rho = NormRequest::new(Component::Density, 0);
    let n0 = whole_space_norm(&scheme, &p, GAMMA, 0.0, rho).unwrap();
    let n20 = whole_space_norm(&scheme, &p, GAMMA, 20.0, rho).unwrap();
    assert!(n20 <= (-10f64).exp() * n0 * 1.1, "{n20:e} vs {n0:e}");
}

#[test]
fn low_frequency_magnetic_data_decays_monotonically() {
    let p = InitialProfile {
        width: 6.0,
        density_mean: 0.0,
        density_dir: [0.0; 3],
        velocity: [0.0; 3],
        electric_longitudinal: [0.0; 3],
        electric_transverse: [0.0; 3],
        magnetic: MagneticProfile::Transverse([0.3, -0.2, 0.6]),
    };
    let scheme = QuadratureScheme::new(QuadratureOptions::for_horizon(200.0)).unwrap();
    let ev = DecayEvaluator::new(&scheme, &p, GAMMA).unwrap();
    let b = [NormRequest::new(Component::Magnetic, 0)];
    let series: Vec<f64> = (0..=200).map(|i| ev.norms(i as f64, &b)[0]).collect();
    assert!(series.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn radial_refinement_changes_nothing() {
    let p = InitialProfile::default();
    let reqs: Vec<_> = Component::ALL.iter().map(|&c| NormRequest::new(c, 0)).collect();
    let mut o = QuadratureOptions::for_horizon(1000.0);
    let coarse = DecayEvaluator::new(&QuadratureScheme::new(o).unwrap(), &p, GAMMA).unwrap();
    o.panel_width *= 0.5;
    let fine = DecayEvaluator::new(&QuadratureScheme::new(o).unwrap(), &p, GAMMA).unwrap();
    for t in [0.0, 10.0, 300.0, 1000.0] {
        for (a, b) in coarse.norms(t, &reqs).iter().zip(fine.norms(t, &reqs)) {
            assert!(((a - b) / b).abs() < 1e-6, "t = {t}: {a:e} vs {b:e}");
        }
    }
    assert!(coarse.tail_estimate() < 1e-30);
}

#[test]
fn linear_decay_exponents() {
    let times = log_time_grid(50.0, 500.0, 24);
    let scheme = QuadratureScheme::new(QuadratureOptions::for_horizon(500.0)).unwrap();
    let ev = DecayEvaluator::new(&scheme, &InitialProfile::default(), GAMMA).unwrap();
    let table = [
        (NormRequest::new(Component::Density, 0), DecayTarget::exponential(0.5, 0.05)),
        (NormRequest::new(Component::Velocity, 0), DecayTarget::power(-1.25, 0.10)),
        (NormRequest::new(Component::Electric, 0), DecayTarget::power(-1.25, 0.10)),
        (NormRequest::new(Component::Magnetic, 0), DecayTarget::power(-0.75, 0.08)),
        (NormRequest::new(Component::Magnetic, 1), DecayTarget::power(-1.25, 0.10)),
    ];
    let reqs: Vec<_> = table.iter().map(|r| r.0).collect();
    let rows = ev.trajectory(&times, &reqs);
    for (j, (req, target)) in table.iter().enumerate() {
        let series: Vec<_> = times.iter().zip(&rows).map(|(&t, r)| (t, r[j])).collect();
        let fit = fit_decay(&req.label(), &series, (50.0, 500.0), *target).unwrap();
        assert!(fit.pass, "{fit:?}");
    }
}

#[test]
fn noisy_power_law_fits_within_two_hundredths() {
    let times = log_time_grid(50.0, 500.0, 24);
    let mut worst: f64 = 0.0;
    for seed in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let series: Vec<_> = times
            .iter()
            .map(|&t| (t, 3.0 * (1.0 + t).powf(-0.75) * (1.0 + 0.01 * rng.random_range(-1.0..1.0))))
            .collect();
        let f = fit_decay("B", &series, (50.0, 500.0), DecayTarget::power(-0.75, 0.08)).unwrap();
        worst = worst.max((f.estimate + 0.75).abs());
    }
    assert!(worst <= 0.02, "worst deviation {worst}");
}

#[test]
fn duhamel_gap_scales_quadratically_with_constant_background() {
    let setup = DuhamelSetup::new(DuhamelOptions::default()).unwrap();
    assert_eq!(setup.gap(0.0).unwrap().0, 0.0);
    let r = setup.report(1e-4).unwrap();
    assert!(r.quadratic, "{r:?}");
}

#[test]
fn duhamel_scaling_degrades_with_nonconstant_background() {
    let r = duhamel_crosscheck(
        DuhamelOptions {
            background_eps: 0.05,
            ..Default::default()
        },
        1e-4,
    )
    .unwrap();
    assert!(!r.quadratic && r.ratio > 0.4, "{r:?}");
}
