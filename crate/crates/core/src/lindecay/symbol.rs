use nalgebra::{Matrix3, SMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `(rho, u, E, B)` amplitudes of one Fourier mode, stored in that order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeState {
    pub xi: [f64; 3],
    pub amp: [Complex64; 10],
}

pub type Symbol = SMatrix<Complex64, 10, 10>;

impl ModeState {
    pub fn new(
        xi: [f64; 3],
        rho: Complex64,
        u: [Complex64; 3],
        e: [Complex64; 3],
        b: [Complex64; 3],
    ) -> Self {
        let mut amp = [Complex64::default(); 10];
        amp[0] = rho;
        amp[1..4].copy_from_slice(&u);
        amp[4..7].copy_from_slice(&e);
        amp[7..10].copy_from_slice(&b);
        Self { xi, amp }
    }

    pub fn rho(&self) -> Complex64 {
        self.amp[0]
    }

    pub fn u(&self) -> [Complex64; 3] {
        [self.amp[1], self.amp[2], self.amp[3]]
    }

    pub fn e(&self) -> [Complex64; 3] {
        [self.amp[4], self.amp[5], self.amp[6]]
    }

    pub fn b(&self) -> [Complex64; 3] {
        [self.amp[7], self.amp[8], self.amp[9]]
    }

    /// `i xi . E + rho`
    pub fn gauss_electric(&self) -> Complex64 {
        I * dot_c(self.xi, self.e()) + self.rho()
    }

    /// `i xi . B`
    pub fn gauss_magnetic(&self) -> Complex64 {
        I * dot_c(self.xi, self.b())
    }

    pub fn norm(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }
}

pub(crate) fn dot_c(a: [f64; 3], b: [Complex64; 3]) -> Complex64 {
    b[0] * a[0] + b[1] * a[1] + b[2] * a[2]
}

/// Generator of the linearized flow around the constant state at frequency
/// `xi`:
///
/// ```text
/// rho' = -i xi . u
/// u'   = -u - E - gamma i xi rho
/// E'   = i xi x B + u
/// B'   = -i xi x E
/// ```
pub fn symbol_matrix(xi: [f64; 3], gamma: f64) -> Symbol {
    let mut m = Symbol::zeros();
    for j in 0..3 {
        m[(0, 1 + j)] = -I * xi[j];
        m[(1 + j, 1 + j)] = Complex64::new(-1.0, 0.0);
        m[(1 + j, 4 + j)] = Complex64::new(-1.0, 0.0);
        m[(1 + j, 0)] = -I * gamma * xi[j];
        m[(4 + j, 1 + j)] = Complex64::new(1.0, 0.0);
    }
    // (xi x V)_a = eps_abc xi_b V_c
    for a in 0..3 {
        let b = (a + 1) % 3;
        let c = (a + 2) % 3;
        m[(4 + a, 7 + c)] += I * xi[b];
        m[(4 + a, 7 + b)] -= I * xi[c];
        m[(7 + a, 4 + c)] -= I * xi[b];
        m[(7 + a, 4 + b)] += I * xi[c];
    }
    m
}

/// Right-handed orthonormal frame `(e1, e2, xi_hat)` adapted to `xi`.
///
/// At `xi = 0` the longitudinal direction is taken along `z`; the blocks are
/// isotropic there so the choice does not matter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub k: f64,
    pub axis: [f64; 3],
    pub e1: [f64; 3],
    pub e2: [f64; 3],
}

impl Frame {
    pub fn new(xi: [f64; 3]) -> Self {
        let k = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
        let axis = if k > 0.0 {
            [xi[0] / k, xi[1] / k, xi[2] / k]
        } else {
            [0.0, 0.0, 1.0]
        };
        // reference direction least aligned with the axis
        let mut r = [0.0; 3];
        let small = (0..3)
            .min_by(|&a, &b| axis[a].abs().total_cmp(&axis[b].abs()))
            .unwrap_or(0);
        r[small] = 1.0;
        let e1 = normalize(cross(axis, r));
        let e2 = cross(axis, e1);
        Self { k, axis, e1, e2 }
    }
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn normalize(a: [f64; 3]) -> [f64; 3] {
    let n = dot(a, a).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

/// Longitudinal block acting on `(i rho, xi_hat . u, xi_hat . E)`.
pub fn longitudinal_block(k: f64, gamma: f64) -> Matrix3<f64> {
    Matrix3::new(
        0.0, k, 0.0, //
        -gamma * k, -1.0, -1.0, //
        0.0, 1.0, 0.0,
    )
}

/// Transverse block acting on `(e1 . u, e1 . E, i e2 . B)` and, identically,
/// on `(e2 . u, e2 . E, -i e1 . B)`.
pub fn transverse_block(k: f64) -> Matrix3<f64> {
    Matrix3::new(
        -1.0, -1.0, 0.0, //
        1.0, 0.0, -k, //
        0.0, k, 0.0,
    )
}

/// Longitudinal block restricted to Gauss-consistent data, acting on
/// `(xi_hat . u, xi_hat . E)`; there `rho = -i k xi_hat . E`.
pub fn reduced_longitudinal_block(k: f64, gamma: f64) -> nalgebra::Matrix2<f64> {
    nalgebra::Matrix2::new(-1.0, -(1.0 + gamma * k * k), 1.0, 0.0)
}
