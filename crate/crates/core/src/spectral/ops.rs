use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::field::{ScalarField, SpectralField, VectorField};
use super::grid::{ensure_same, GridSpec};
use super::multi_index::MultiIndex;
use crate::error::Result;
use crate::par;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// FFT plans and wavenumber tables for one grid.
///
/// All differential operators act by multiplication with `i * xi` in
/// frequency space, with the Nyquist entry of every derivative multiplier set
/// to zero so that odd derivatives stay real and skew-adjoint.
#[derive(Clone)]
pub struct Spectral {
    grid: GridSpec,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// derivative wavenumbers per flat index, shared between clones
    kd: Arc<[[f64; 3]]>,
    /// flat index of `-xi`
    mirror: Arc<[usize]>,
    /// inside the 2/3 band on every axis
    band: Arc<[bool]>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).finish()
    }
}

impl Spectral {
    pub fn new(grid: GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        let n = grid.n();
        Self {
            grid,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
            kd: (0..grid.len())
                .map(|idx| grid.unflatten(idx).map(|i| grid.derivative_wavenumber(i)))
                .collect(),
            mirror: (0..grid.len())
                .map(|idx| {
                    let [i, j, k] = grid.unflatten(idx).map(|i| (n - i) % n);
                    grid.index(i, j, k)
                })
                .collect(),
            band: (0..grid.len())
                .map(|idx| grid.unflatten(idx).iter().all(|&i| grid.in_dealias_band(i)))
                .collect(),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Derivative wavenumbers `(kx, ky, kz)` of flat coefficient index `idx`.
    pub fn kd(&self, idx: usize) -> [f64; 3] {
        self.kd[idx]
    }

    fn fft3(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.grid.n();
        let plane = n * n;
        let fft = if inverse { &self.inv } else { &self.fwd };
        let scratch = || vec![Complex64::default(); fft.get_inplace_scratch_len()];

        // last axis: contiguous lines
        par::chunks_mut_init(data, plane, scratch, |s, _, p| {
            fft.process_with_scratch(p, s);
        });

        // middle axis: transpose each plane
        let plane_buf = || (vec![Complex64::default(); plane], scratch());
        par::chunks_mut_init(data, plane, plane_buf, |(buf, s), _, p| {
            for j in 0..n {
                for k in 0..n {
                    buf[k * n + j] = p[j * n + k];
                }
            }
            fft.process_with_scratch(buf, s);
            for j in 0..n {
                for k in 0..n {
                    p[j * n + k] = buf[k * n + j];
                }
            }
        });

        // first axis: gather into [j][k][i], transform, scatter back
        let mut tmp = vec![Complex64::default(); data.len()];
        {
            let src: &[Complex64] = data;
            par::chunks_mut_init(&mut tmp, plane, scratch, |s, j, slab| {
                for k in 0..n {
                    for i in 0..n {
                        slab[k * n + i] = src[(i * n + j) * n + k];
                    }
                }
                fft.process_with_scratch(slab, s);
            });
        }
        let norm = if inverse { 1.0 / self.grid.len() as f64 } else { 1.0 };
        par::chunks_mut(data, plane, |i, p| {
            for j in 0..n {
                for k in 0..n {
                    p[j * n + k] = tmp[(j * n + k) * n + i] * norm;
                }
            }
        });
    }

    pub fn transform(&self, f: &ScalarField) -> Result<SpectralField> {
        ensure_same(&self.grid, f.grid())?;
        let mut coeffs: Vec<Complex64> =
            f.data().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft3(&mut coeffs, false);
        Ok(SpectralField::from_parts(self.grid, coeffs, false))
    }

    pub fn inverse_transform(&self, f: &SpectralField) -> Result<ScalarField> {
        ensure_same(&self.grid, f.grid())?;
        let mut coeffs = f.coeffs().to_vec();
        self.fft3(&mut coeffs, true);
        Ok(ScalarField::from_vec(
            self.grid,
            coeffs.into_iter().map(|c| c.re).collect(),
        ))
    }

    /// Two real fields through one complex transform of `a + i b`, split
    /// again with `A(k) = (Z(k) + conj Z(-k)) / 2`.
    pub fn transform_pair(
        &self,
        a: &ScalarField,
        b: &ScalarField,
    ) -> Result<(SpectralField, SpectralField)> {
        ensure_same(&self.grid, a.grid())?;
        ensure_same(&self.grid, b.grid())?;
        let mut z: Vec<Complex64> = a
            .data()
            .iter()
            .zip(b.data())
            .map(|(&x, &y)| Complex64::new(x, y))
            .collect();
        self.fft3(&mut z, false);
        let half_i = Complex64::new(0.0, -0.5);
        let (fa, fb) = z
            .iter()
            .zip(self.mirror.iter())
            .map(|(&p, &m)| {
                let q = z[m].conj();
                ((p + q) * 0.5, (p - q) * half_i)
            })
            .unzip();
        Ok((
            SpectralField::from_parts(self.grid, fa, false),
            SpectralField::from_parts(self.grid, fb, false),
        ))
    }

    /// Inverse of two Hermitian coefficient sets through one transform of
    /// `A + i B`. Non-Hermitian input would mix the two results.
    pub fn inverse_pair(
        &self,
        a: &SpectralField,
        b: &SpectralField,
    ) -> Result<(ScalarField, ScalarField)> {
        ensure_same(&self.grid, a.grid())?;
        ensure_same(&self.grid, b.grid())?;
        let mut z: Vec<Complex64> = a
            .coeffs()
            .iter()
            .zip(b.coeffs())
            .map(|(&x, &y)| x + I * y)
            .collect();
        self.fft3(&mut z, true);
        let (ra, rb) = z.into_iter().map(|c| (c.re, c.im)).unzip();
        Ok((
            ScalarField::from_vec(self.grid, ra),
            ScalarField::from_vec(self.grid, rb),
        ))
    }

    pub fn transform_vec(&self, v: &VectorField) -> Result<[SpectralField; 3]> {
        let [a, b, c] = v.comps();
        let (fa, fb) = self.transform_pair(a, b)?;
        Ok([fa, fb, self.transform(c)?])
    }

    pub fn inverse_vec(&self, v: &[SpectralField; 3]) -> Result<VectorField> {
        let (a, b) = self.inverse_pair(&v[0], &v[1])?;
        Ok(VectorField::new([a, b, self.inverse_transform(&v[2])?]))
    }

    /// Multiply every coefficient by `m(kd)`.
    pub fn apply_multiplier(
        &self,
        f: &SpectralField,
        m: impl Fn([f64; 3]) -> Complex64,
    ) -> SpectralField {
        let coeffs = f
            .coeffs()
            .iter()
            .enumerate()
            .map(|(idx, &c)| c * m(self.kd(idx)))
            .collect();
        SpectralField::from_parts(self.grid, coeffs, f.is_dealiased())
    }

    /// Spectral derivative along one axis.
    pub fn partial(&self, f: &SpectralField, axis: usize) -> SpectralField {
        self.apply_multiplier(f, |k| I * k[axis])
    }

    /// `d^alpha f` in coefficient space.
    pub fn derivative(&self, f: &SpectralField, alpha: MultiIndex) -> SpectralField {
        let phase = I.powu(alpha.order());
        self.apply_multiplier(f, |k| phase * alpha.monomial(k))
    }

    pub fn grad_spec(&self, f: &SpectralField) -> Result<VectorField> {
        self.inverse_vec(&[self.partial(f, 0), self.partial(f, 1), self.partial(f, 2)])
    }

    pub fn grad(&self, f: &ScalarField) -> Result<VectorField> {
        self.grad_spec(&self.transform(f)?)
    }

    /// Divergence in coefficient space.
    pub fn div_coeffs(&self, v: &[SpectralField; 3]) -> SpectralField {
        let coeffs = (0..self.grid.len())
            .map(|idx| {
                let k = self.kd(idx);
                I * (k[0] * v[0].coeffs()[idx]
                    + k[1] * v[1].coeffs()[idx]
                    + k[2] * v[2].coeffs()[idx])
            })
            .collect();
        SpectralField::from_parts(self.grid, coeffs, false)
    }

    pub fn div_spec(&self, v: &[SpectralField; 3]) -> Result<ScalarField> {
        self.inverse_transform(&self.div_coeffs(v))
    }

    pub fn div(&self, v: &VectorField) -> Result<ScalarField> {
        self.div_spec(&self.transform_vec(v)?)
    }

    /// Curl in coefficient space.
    pub fn curl_coeffs(&self, v: &[SpectralField; 3]) -> [SpectralField; 3] {
        let n = self.grid.len();
        let mut out = [
            Vec::with_capacity(n),
            Vec::with_capacity(n),
            Vec::with_capacity(n),
        ];
        for idx in 0..n {
            let k = self.kd(idx);
            let (a, b, c) = (v[0].coeffs()[idx], v[1].coeffs()[idx], v[2].coeffs()[idx]);
            out[0].push(I * (k[1] * c - k[2] * b));
            out[1].push(I * (k[2] * a - k[0] * c));
            out[2].push(I * (k[0] * b - k[1] * a));
        }
        out.map(|c| SpectralField::from_parts(self.grid, c, false))
    }

    pub fn curl_spec(&self, v: &[SpectralField; 3]) -> Result<VectorField> {
        self.inverse_vec(&self.curl_coeffs(v))
    }

    pub fn curl(&self, v: &VectorField) -> Result<VectorField> {
        self.curl_spec(&self.transform_vec(v)?)
    }

    /// Laplacian with the same Nyquist-free wavenumbers as `grad`, so that
    /// `div(grad f) == laplacian(f)` exactly in coefficient space.
    pub fn laplacian_spec(&self, f: &SpectralField) -> SpectralField {
        self.apply_multiplier(f, |k| {
            Complex64::new(-(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]), 0.0)
        })
    }

    pub fn laplacian(&self, f: &ScalarField) -> Result<ScalarField> {
        self.inverse_transform(&self.laplacian_spec(&self.transform(f)?))
    }

    /// Zero every coefficient with some signed index `|m| >= n/3`.
    pub fn dealias(&self, f: &SpectralField) -> SpectralField {
        let coeffs = f
            .coeffs()
            .iter()
            .zip(self.band.iter())
            .map(|(&c, &keep)| if keep { c } else { Complex64::new(0.0, 0.0) })
            .collect();
        SpectralField::from_parts(self.grid, coeffs, true)
    }

    /// Physical-space convenience wrapper around `dealias`.
    pub fn dealias_field(&self, f: &ScalarField) -> Result<ScalarField> {
        self.inverse_transform(&self.dealias(&self.transform(f)?))
    }

    pub fn dealias_vec(&self, v: &VectorField) -> Result<VectorField> {
        let [a, b, c] = self.transform_vec(v)?;
        self.inverse_vec(&[self.dealias(&a), self.dealias(&b), self.dealias(&c)])
    }

    /// `grad(lap^{-1} s)`: the curl-free field whose divergence is `s`.
    ///
    /// The mean of `s` is ignored; it has no periodic preimage.
    pub fn gradient_of_inverse_laplacian(&self, s: &ScalarField) -> Result<VectorField> {
        let s_hat = self.transform(s)?;
        let phi = self.apply_multiplier(&s_hat, |k| {
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            if k2 == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(-1.0 / k2, 0.0)
            }
        });
        self.grad_spec(&phi)
    }
}
