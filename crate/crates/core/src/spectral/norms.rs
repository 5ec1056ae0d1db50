use super::field::{ScalarField, SpectralField, VectorField};
use super::grid::ensure_same;
use super::multi_index::{sobolev_weight, MultiIndex};
use super::ops::Spectral;
use crate::error::Result;

/// Discrete `<f, g> = sum f g dx^3`.
pub fn inner(f: &ScalarField, g: &ScalarField) -> Result<f64> {
    ensure_same(f.grid(), g.grid())?;
    let s: f64 = f.data().iter().zip(g.data()).map(|(a, b)| a * b).sum();
    Ok(s * f.grid().cell_volume())
}

pub fn inner_vec(f: &VectorField, g: &VectorField) -> Result<f64> {
    let mut s = 0.0;
    for c in 0..3 {
        s += inner(&f.comps()[c], &g.comps()[c])?;
    }
    Ok(s)
}

pub fn l2_norm(f: &ScalarField) -> f64 {
    let s: f64 = f.data().iter().map(|v| v * v).sum();
    (s * f.grid().cell_volume()).sqrt()
}

pub fn l2_norm_vec(v: &VectorField) -> f64 {
    v.comps()
        .iter()
        .map(|c| l2_norm(c).powi(2))
        .sum::<f64>()
        .sqrt()
}

impl Spectral {
    /// Parseval factor: `sum |f|^2 dx^3 = factor * sum |F|^2`.
    pub fn parseval_factor(&self) -> f64 {
        let g = self.grid();
        g.cell_volume() / g.len() as f64
    }

    /// `sum_xi Re(conj(F) G) w(kd)` scaled so that `w = 1` gives `<f, g>`.
    pub fn spectral_inner(
        &self,
        f: &SpectralField,
        g: &SpectralField,
        w: impl Fn([f64; 3]) -> f64,
    ) -> f64 {
        let s: f64 = f
            .coeffs()
            .iter()
            .zip(g.coeffs())
            .enumerate()
            .map(|(idx, (a, b))| (a.conj() * b).re * w(self.kd(idx)))
            .sum();
        s * self.parseval_factor()
    }

    /// `sum_{min <= |alpha| <= max} ||d^alpha f||^2` from coefficients.
    pub fn sobolev_sum_spec(&self, f: &SpectralField, min: u32, max: u32) -> f64 {
        self.spectral_inner(f, f, |k| sobolev_weight(k, min, max))
    }

    /// Discrete `||f||_{H^m}`.
    pub fn sobolev_norm(&self, f: &ScalarField, m: u32) -> Result<f64> {
        Ok(self.sobolev_sum_spec(&self.transform(f)?, 0, m).sqrt())
    }

    pub fn sobolev_norm_vec(&self, v: &VectorField, m: u32) -> Result<f64> {
        let mut s = 0.0;
        for c in v.comps() {
            s += self.sobolev_sum_spec(&self.transform(c)?, 0, m);
        }
        Ok(s.sqrt())
    }

    /// `||d^alpha f||` for every `|alpha| <= m`.
    pub fn sobolev_table(&self, f: &ScalarField, m: u32) -> Result<Vec<(MultiIndex, f64)>> {
        let f_hat = self.transform(f)?;
        Ok(MultiIndex::range(0, m)
            .into_iter()
            .map(|a| {
                let v = self.spectral_inner(&f_hat, &f_hat, |k| a.monomial(k).powi(2));
                (a, v.sqrt())
            })
            .collect())
    }

    /// Discrete `W_k^{m,2}` norm with weight `(1 + |x|)^k`, `|x|` measured
    /// from the box center.
    pub fn weighted_norm(&self, f: &ScalarField, m: u32, k: u32) -> Result<f64> {
        if k == 0 {
            return self.sobolev_norm(f, m);
        }
        let g = *self.grid();
        let weight: Vec<f64> = (0..g.len())
            .map(|idx| {
                let x = g.position(idx);
                (1.0 + (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()).powi(k as i32)
            })
            .collect();
        let f_hat = self.transform(f)?;
        let mut total = 0.0;
        for a in MultiIndex::range(0, m) {
            let d = self.inverse_transform(&self.derivative(&f_hat, a))?;
            total += d
                .data()
                .iter()
                .zip(&weight)
                .map(|(v, w)| w * v * v)
                .sum::<f64>();
        }
        Ok((total * g.cell_volume()).sqrt())
    }

    pub fn weighted_norm_vec(&self, v: &VectorField, m: u32, k: u32) -> Result<f64> {
        let mut s = 0.0;
        for c in v.comps() {
            s += self.weighted_norm(c, m, k)?.powi(2);
        }
        Ok(s.sqrt())
    }
}
