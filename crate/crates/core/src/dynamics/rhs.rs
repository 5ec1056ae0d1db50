use crate::error::Result;
use crate::spectral::{l2_norm, ScalarField, Spectral, VectorField};

use super::state::{density_from_sigma, map_checked, FluidState, SymState};

/// Switches for the individual groups of terms. Everything is on by default;
/// the others exist for structural tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RhsTerms {
    /// Velocity relaxation `-u`.
    pub damping: bool,
    /// The `E <-> u` exchange terms.
    pub coupling: bool,
    /// Everything beyond the linearization about `(1, 0, 0, 0)` with `n_b = 1`.
    pub nonlinear: bool,
}

impl Default for RhsTerms {
    fn default() -> Self {
        Self {
            damping: true,
            coupling: true,
            nonlinear: true,
        }
    }
}

/// Right-hand sides of the primitive and symmetrized systems.
///
/// Pressure forces are written as gradients, `-grad h(n)` with
/// `h(n) = gamma/(gamma-1) (n^(gamma-1) - 1)` in primitive variables and
/// `-grad(a^2)/(gamma-1)` with `a = (gamma-1)/2 sigma + 1` in symmetrized
/// ones. These agree with `(1/n) grad p` and `a grad sigma` but keep the
/// discrete steady state an exact fixed point, since `h(n_st) = Q_st`.
#[derive(Debug, Clone)]
pub struct Dynamics {
    spectral: Spectral,
    nb: ScalarField,
    gamma: f64,
    dealias: bool,
    terms: RhsTerms,
}

impl Dynamics {
    pub fn new(spectral: Spectral, nb: ScalarField, gamma: f64) -> Self {
        Self {
            spectral,
            nb,
            gamma,
            dealias: true,
            terms: RhsTerms::default(),
        }
    }

    pub fn with_dealias(mut self, on: bool) -> Self {
        self.dealias = on;
        self
    }

    pub fn with_terms(mut self, terms: RhsTerms) -> Self {
        self.terms = terms;
        self
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    pub fn background(&self) -> &ScalarField {
        &self.nb
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn dealias(&self) -> bool {
        self.dealias
    }

    fn filter(&self, f: ScalarField) -> Result<ScalarField> {
        if self.dealias {
            self.spectral.dealias_field(&f)
        } else {
            Ok(f)
        }
    }

    fn filter_vec(&self, v: VectorField) -> Result<VectorField> {
        if self.dealias {
            self.spectral.dealias_vec(&v)
        } else {
            Ok(v)
        }
    }

    /// `(w . grad) w`
    fn advection(&self, w: &VectorField, of: &VectorField) -> Result<VectorField> {
        let mut comps = Vec::with_capacity(3);
        for c in of.comps() {
            comps.push(w.dot(&self.spectral.grad(c)?)?);
        }
        let [a, b, c]: [ScalarField; 3] = comps.try_into().expect("three components");
        Ok(VectorField::new([a, b, c]))
    }

    /// Time derivative of `(n, u, E, B)` for the primitive system.
    pub fn rhs_primitive(&self, s: &FluidState) -> Result<FluidState> {
        let sp = &self.spectral;
        let gamma = self.gamma;
        let min = s.n.min();
        if !(min > 0.0) {
            return Err(crate::Error::Positivity {
                what: "density",
                value: min,
            });
        }

        // flux n u; its linear part is u
        let flux = if self.terms.nonlinear {
            self.filter_vec(s.u.mul_scalar(&s.n)?)?
        } else {
            s.u.clone()
        };
        let dn = sp.div(&flux)?.scale(-1.0);

        let enthalpy = if self.terms.nonlinear {
            s.n.map(|n| gamma / (gamma - 1.0) * (n.powf(gamma - 1.0) - 1.0))
        } else {
            s.n.map(|n| gamma * (n - 1.0))
        };
        let mut du = sp.grad(&enthalpy)?.scale(-1.0);
        if self.terms.nonlinear {
            let adv = self.filter_vec(self.advection(&s.u, &s.u)?)?;
            let lorentz = self.filter_vec(s.u.cross(&s.b)?)?;
            du = du.sub(&adv)?.sub(&lorentz)?;
        }
        if self.terms.coupling {
            du = du.sub(&s.e)?;
        }
        if self.terms.damping {
            du = du.sub(&s.u)?;
        }

        let mut de = sp.curl(&s.b)?;
        if self.terms.coupling {
            de = de.add(&flux)?;
        }
        let db = sp.curl(&s.e)?.scale(-1.0);

        Ok(FluidState {
            n: dn,
            u: du,
            e: de,
            b: db,
            t: 1.0,
        })
    }

    /// Time derivative (in `tau`) of `(sigma, v, E~, B~)` for the symmetrized system.
    pub fn rhs_symmetric(&self, s: &SymState) -> Result<SymState> {
        let sp = &self.spectral;
        let gamma = self.gamma;
        let r = 1.0 / gamma.sqrt();
        let a = s.sigma.map(|v| 0.5 * (gamma - 1.0) * v + 1.0);
        if !(a.min() > 0.0) {
            return Err(crate::Error::Positivity {
                what: "symmetrized sound speed",
                value: a.min(),
            });
        }
        let div_v = sp.div(&s.v)?;

        let mut dsigma = div_v.scale(-1.0);
        if self.terms.nonlinear {
            let extra = a.map(|x| x - 1.0).mul(&div_v)?;
            let adv = s.v.dot(&sp.grad(&s.sigma)?)?;
            dsigma = dsigma.sub(&self.filter(extra.add(&adv)?)?)?;
        }

        let potential = if self.terms.nonlinear {
            a.map(|x| (x * x - 1.0) / (gamma - 1.0))
        } else {
            s.sigma.clone()
        };
        let mut dv = sp.grad(&potential)?.scale(-1.0);
        if self.terms.nonlinear {
            let adv = self.filter_vec(self.advection(&s.v, &s.v)?)?;
            let lorentz = self.filter_vec(s.v.cross(&s.b)?)?;
            dv = dv.sub(&adv)?.sub(&lorentz)?;
        }
        if self.terms.coupling {
            dv.axpy(-r, &s.e);
        }
        if self.terms.damping {
            dv.axpy(-r, &s.v);
        }

        let mut de = sp.curl(&s.b)?.scale(r);
        if self.terms.coupling {
            // (1 + sigma + Phi(sigma)) v = n v
            let current = if self.terms.nonlinear {
                let n = map_checked(&s.sigma, |v| density_from_sigma(v, gamma))?;
                self.filter_vec(s.v.mul_scalar(&n)?)?
            } else {
                s.v.clone()
            };
            de.axpy(r, &current);
        }
        let db = sp.curl(&s.e)?.scale(-r);
        Ok(SymState {
            sigma: dsigma,
            v: dv,
            e: de,
            b: db,
            tau: 1.0,
        })
    }

    /// `(||div E - (n_b - n)||, ||div B||)` in L2.
    pub fn constraint_residuals(&self, s: &FluidState) -> Result<(f64, f64)> {
        let sp = &self.spectral;
        let gauss = sp.div(&s.e)?.sub(&self.nb.sub(&s.n)?)?;
        Ok((l2_norm(&gauss), l2_norm(&sp.div(&s.b)?)))
    }

    /// Symmetrized analogue: `||div E~ + (Phi(sigma) + sigma - (n_b - 1)) / sqrt(gamma)||`
    /// and `||div B~||`.
    pub fn constraint_residuals_symmetric(&self, s: &SymState) -> Result<(f64, f64)> {
        let sp = &self.spectral;
        let gamma = self.gamma;
        let r = 1.0 / gamma.sqrt();
        let n = map_checked(&s.sigma, |v| density_from_sigma(v, gamma))?;
        // Phi + sigma - (n_b - 1) = n - n_b
        let src = n.sub(&self.nb)?.scale(r);
        let gauss = sp.div(&s.e)?.add(&src)?;
        Ok((l2_norm(&gauss), l2_norm(&sp.div(&s.b)?)))
    }

    /// Helmholtz re-projection: make `div E = n_b - n` and `div B = 0` hold
    /// by correcting the longitudinal parts only.
    pub fn project_constraints(&self, s: &mut FluidState) -> Result<()> {
        let sp = &self.spectral;
        let defect = self.nb.sub(&s.n)?.sub(&sp.div(&s.e)?)?;
        s.e = s.e.add(&sp.gradient_of_inverse_laplacian(&defect)?)?;
        let div_b = sp.div(&s.b)?;
        s.b = s.b.sub(&sp.gradient_of_inverse_laplacian(&div_b)?)?;
        Ok(())
    }

    /// Largest signal speed of the primitive system: light speed 1 plus
    /// `max|u| + max sqrt(gamma n^(gamma-1))`.
    pub fn max_speed(&self, s: &FluidState) -> f64 {
        let gamma = self.gamma;
        let sound = s
            .n
            .data()
            .iter()
            .fold(0.0f64, |m, &n| m.max((gamma * n.max(0.0).powf(gamma - 1.0)).sqrt()));
        1.0 + s.u.max_magnitude() + sound
    }

    /// Symmetrized counterpart `1 + max|v| + max a`.
    pub fn max_speed_symmetric(&self, s: &SymState) -> f64 {
        let a = s.sigma.max() * 0.5 * (self.gamma - 1.0) + 1.0;
        1.0 + s.v.max_magnitude() + a
    }
}

/// Sources `(g1, g2, g3)` of the perturbation system around `(n_st, 0, E_st, 0)`.
///
/// Inputs are the density perturbation, velocity and magnetic field; products
/// are formed pointwise without dealiasing.
pub fn nonlinear_sources(
    spectral: &Spectral,
    rho: &ScalarField,
    u: &VectorField,
    b: &VectorField,
    rho_st: &ScalarField,
    gamma: f64,
) -> Result<(ScalarField, VectorField, VectorField)> {
    let total = rho.add(rho_st)?;
    let n = total.map(|v| v + 1.0);
    if !(n.min() > 0.0) {
        return Err(crate::Error::Positivity {
            what: "density",
            value: n.min(),
        });
    }
    let g3 = u.mul_scalar(&total)?;
    let g1 = spectral.div(&g3)?.scale(-1.0);

    let grad_rho = spectral.grad(rho)?;
    let grad_st = spectral.grad(rho_st)?;
    let mut adv = Vec::with_capacity(3);
    for c in u.comps() {
        adv.push(u.dot(&spectral.grad(c)?)?);
    }
    let [a0, a1, a2]: [ScalarField; 3] = adv.try_into().expect("three components");
    let adv = VectorField::new([a0, a1, a2]);

    let pw = |x: f64| x.powf(gamma - 2.0);
    let c1 = n.map(|x| -gamma * (pw(x) - 1.0));
    let n_st = rho_st.map(|v| v + 1.0);
    let c2 = n.zip_map(&n_st, |x, y| -gamma * (pw(x) - pw(y)))?;
    let g2 = grad_rho
        .mul_scalar(&c1)?
        .add(&grad_st.mul_scalar(&c2)?)?
        .sub(&adv)?
        .sub(&u.cross(b)?)?;
    Ok((g1, g2, g3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{l2_norm_vec, random_band_limited, GridSpec};

    fn small_box() -> Spectral {
        Spectral::new(GridSpec::new(16, 8.0).unwrap())
    }

    fn rnd_vec(s: &Spectral, seed: u64, amp: f64) -> VectorField {
        VectorField::new([
            random_band_limited(s, 4, seed).scale(amp),
            random_band_limited(s, 4, seed + 1).scale(amp),
            random_band_limited(s, 4, seed + 2).scale(amp),
        ])
    }

    #[test]
    fn constant_state_is_fixed() {
        let s = small_box();
        let g = *s.grid();
        let dyn_ = Dynamics::new(s.clone(), ScalarField::constant(g, 1.0), 5.0 / 3.0);
        let d = dyn_.rhs_primitive(&FluidState::constant(g)).unwrap();
        assert_eq!(d.n.max_abs(), 0.0);
        assert_eq!(d.u.max_magnitude(), 0.0);
        assert_eq!(d.e.max_magnitude(), 0.0);
        assert_eq!(d.b.max_magnitude(), 0.0);
        let ds = dyn_.rhs_symmetric(&SymState::zeros(g)).unwrap();
        assert_eq!(ds.sigma.max_abs() + ds.v.max_magnitude() + ds.e.max_magnitude(), 0.0);
    }

    #[test]
    fn faraday_law_is_minus_curl() {
        let s = small_box();
        let g = *s.grid();
        let dyn_ = Dynamics::new(s.clone(), ScalarField::constant(g, 1.0), 1.4);
        let mut st = FluidState::constant(g);
        st.e = rnd_vec(&s, 10, 0.1);
        let d = dyn_.rhs_primitive(&st).unwrap();
        let expect = s.curl(&st.e).unwrap().scale(-1.0);
        assert_eq!(d.b, expect);
    }

    #[test]
    fn sources_vanish_without_perturbation() {
        let s = small_box();
        let g = *s.grid();
        let rho_st = random_band_limited(&s, 3, 2).scale(0.01);
        let zero = VectorField::zeros(g);
        let (g1, g2, g3) =
            nonlinear_sources(&s, &ScalarField::zeros(g), &zero, &zero, &rho_st, 1.4).unwrap();
        assert_eq!(g1.max_abs(), 0.0);
        assert_eq!(g2.max_magnitude(), 0.0);
        assert_eq!(g3.max_magnitude(), 0.0);
    }

    #[test]
    fn sources_are_quadratic_without_background() {
        let s = small_box();
        let g = *s.grid();
        let gamma = 5.0 / 3.0;
        let zero = ScalarField::zeros(g);
        let eval = |amp: f64| {
            let rho = random_band_limited(&s, 4, 30).scale(amp);
            let u = rnd_vec(&s, 31, amp);
            let b = rnd_vec(&s, 34, amp);
            let (g1, g2, g3) = nonlinear_sources(&s, &rho, &u, &b, &zero, gamma).unwrap();
            [l2_norm(&g1), l2_norm_vec(&g2), l2_norm_vec(&g3)]
        };
        let full = eval(1e-2);
        let half = eval(5e-3);
        for i in 0..3 {
            assert!(half[i] <= 0.3 * full[i], "source {i}: {} vs {}", half[i], full[i]);
        }
    }

    #[test]
    fn corrupted_field_shows_in_gauss_residual() {
        let s = small_box();
        let g = *s.grid();
        let dyn_ = Dynamics::new(s.clone(), ScalarField::constant(g, 1.0), 1.4);
        let mut st = FluidState::constant(g);
        assert_eq!(dyn_.constraint_residuals(&st).unwrap(), (0.0, 0.0));
        let pot = random_band_limited(&s, 4, 40);
        let bad = s.grad(&pot).unwrap();
        st.e = bad.clone();
        let (ge, gb) = dyn_.constraint_residuals(&st).unwrap();
        let expect = l2_norm(&s.div(&bad).unwrap());
        assert!((ge - expect).abs() < 1e-12 * expect);
        assert_eq!(gb, 0.0);

        dyn_.project_constraints(&mut st).unwrap();
        let (ge, _) = dyn_.constraint_residuals(&st).unwrap();
        assert!(ge < 1e-12 * expect);
    }
}
