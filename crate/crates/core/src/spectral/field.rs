use num_complex::Complex64;

use super::grid::{ensure_same, GridSpec};
use crate::error::Result;

/// Real samples of a scalar function on the periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    data: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: GridSpec, value: f64) -> Self {
        Self {
            grid,
            data: vec![value; grid.len()],
        }
    }

    /// Panics if `data` does not have `grid.len()` samples.
    pub fn from_vec(grid: GridSpec, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), grid.len(), "sample count does not match grid");
        Self { grid, data }
    }

    /// Sample `f(x, y, z)` at every grid point.
    pub fn from_fn(grid: GridSpec, mut f: impl FnMut([f64; 3]) -> f64) -> Self {
        let data = (0..grid.len()).map(|idx| f(grid.position(idx))).collect();
        Self { grid, data }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        ensure_same(&self.grid, &other.grid)?;
        Ok(Self {
            grid: self.grid,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, |a, b| a * b)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| s * v)
    }

    /// `self += a * x`
    pub fn axpy(&mut self, a: f64, x: &Self) {
        debug_assert_eq!(self.grid, x.grid);
        for (y, &v) in self.data.iter_mut().zip(&x.data) {
            *y += a * v;
        }
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Grid quadrature of the field, `sum f dx^3`.
    pub fn integral(&self) -> f64 {
        self.data.iter().sum::<f64>() * self.grid.cell_volume()
    }
}

/// Three scalar components on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    comps: [ScalarField; 3],
}

impl VectorField {
    pub fn zeros(grid: GridSpec) -> Self {
        let z = ScalarField::zeros(grid);
        Self {
            comps: [z.clone(), z.clone(), z],
        }
    }

    /// Panics if the components live on different grids.
    pub fn new(comps: [ScalarField; 3]) -> Self {
        assert!(
            comps[0].grid() == comps[1].grid() && comps[1].grid() == comps[2].grid(),
            "vector components must share a grid"
        );
        Self { comps }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let mut out = Self::zeros(grid);
        for idx in 0..grid.len() {
            let v = f(grid.position(idx));
            for c in 0..3 {
                out.comps[c].data_mut()[idx] = v[c];
            }
        }
        out
    }

    pub fn grid(&self) -> &GridSpec {
        self.comps[0].grid()
    }

    pub fn comps(&self) -> &[ScalarField; 3] {
        &self.comps
    }

    pub fn comps_mut(&mut self) -> &mut [ScalarField; 3] {
        &mut self.comps
    }

    pub fn into_comps(self) -> [ScalarField; 3] {
        self.comps
    }

    pub fn map(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self::new([f(&self.comps[0]), f(&self.comps[1]), f(&self.comps[2])])
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self::new([
            self.comps[0].add(&other.comps[0])?,
            self.comps[1].add(&other.comps[1])?,
            self.comps[2].add(&other.comps[2])?,
        ]))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Self::new([
            self.comps[0].sub(&other.comps[0])?,
            self.comps[1].sub(&other.comps[1])?,
            self.comps[2].sub(&other.comps[2])?,
        ]))
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|c| c.scale(s))
    }

    /// Multiply every component by a scalar field.
    pub fn mul_scalar(&self, s: &ScalarField) -> Result<Self> {
        Ok(Self::new([
            self.comps[0].mul(s)?,
            self.comps[1].mul(s)?,
            self.comps[2].mul(s)?,
        ]))
    }

    pub fn axpy(&mut self, a: f64, x: &Self) {
        for c in 0..3 {
            self.comps[c].axpy(a, &x.comps[c]);
        }
    }

    /// Pointwise Euclidean length.
    pub fn magnitude(&self) -> ScalarField {
        let [x, y, z] = &self.comps;
        let data = x
            .data()
            .iter()
            .zip(y.data())
            .zip(z.data())
            .map(|((a, b), c)| (a * a + b * b + c * c).sqrt())
            .collect();
        ScalarField::from_vec(*self.grid(), data)
    }

    /// Pointwise cross product `self x other`.
    pub fn cross(&self, other: &Self) -> Result<Self> {
        ensure_same(self.grid(), other.grid())?;
        let [a0, a1, a2] = &self.comps;
        let [b0, b1, b2] = &other.comps;
        let n = self.grid().len();
        let mut out = Self::zeros(*self.grid());
        for i in 0..n {
            let (ax, ay, az) = (a0.data()[i], a1.data()[i], a2.data()[i]);
            let (bx, by, bz) = (b0.data()[i], b1.data()[i], b2.data()[i]);
            out.comps[0].data_mut()[i] = ay * bz - az * by;
            out.comps[1].data_mut()[i] = az * bx - ax * bz;
            out.comps[2].data_mut()[i] = ax * by - ay * bx;
        }
        Ok(out)
    }

    /// Pointwise dot product.
    pub fn dot(&self, other: &Self) -> Result<ScalarField> {
        let mut out = self.comps[0].mul(&other.comps[0])?;
        for c in 1..3 {
            let p = self.comps[c].mul(&other.comps[c])?;
            out.axpy(1.0, &p);
        }
        Ok(out)
    }

    pub fn max_magnitude(&self) -> f64 {
        self.magnitude().max()
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().all(ScalarField::is_finite)
    }
}

/// Fourier coefficients of a real field.
///
/// Unnormalized forward convention: `F(xi) = sum_x f(x) exp(-i xi . x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
    dealiased: bool,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
            dealiased: false,
        }
    }

    pub(crate) fn from_parts(grid: GridSpec, coeffs: Vec<Complex64>, dealiased: bool) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        Self {
            grid,
            coeffs,
            dealiased,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Direct edits may leave the band, so the dealiased flag is cleared.
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        self.dealiased = false;
        &mut self.coeffs
    }

    pub fn is_dealiased(&self) -> bool {
        self.dealiased
    }

    /// Coefficient at FFT indices `(i, j, k)`.
    pub fn at(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.coeffs[self.grid.index(i, j, k)]
    }

    /// Largest violation of `F(-xi) = conj(F(xi))`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.n();
        let mirror = |i: usize| (n - i) % n;
        let mut worst: f64 = 0.0;
        for idx in 0..self.grid.len() {
            let [i, j, k] = self.grid.unflatten(idx);
            let m = self.grid.index(mirror(i), mirror(j), mirror(k));
            worst = worst.max((self.coeffs[idx] - self.coeffs[m].conj()).norm());
        }
        worst
    }
}
