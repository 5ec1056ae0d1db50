use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use super::symbol::{longitudinal_block, transverse_block, Frame, ModeState};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Condition number of the eigenbasis above which the exponential falls back
/// to scaling and squaring.
pub const CONDITION_LIMIT: f64 = 1e8;

/// `exp(t M)` for a fixed real 3x3 generator.
///
/// The eigendecomposition is computed once; [`BlockExp::at`] then only
/// exponentiates the eigenvalues.
#[derive(Debug, Clone)]
pub struct BlockExp {
    m: Matrix3<f64>,
    eigen: Option<Eigen3>,
}

#[derive(Debug, Clone)]
struct Eigen3 {
    values: [Complex64; 3],
    vectors: Matrix3<Complex64>,
    inverse: Matrix3<Complex64>,
}

impl BlockExp {
    pub fn new(m: Matrix3<f64>) -> Self {
        Self::with_limit(m, CONDITION_LIMIT)
    }

    pub fn with_limit(m: Matrix3<f64>, limit: f64) -> Self {
        Self {
            m,
            eigen: Eigen3::new(&m, limit),
        }
    }

    pub fn uses_eigenbasis(&self) -> bool {
        self.eigen.is_some()
    }

    pub fn eigenvalues(&self) -> [Complex64; 3] {
        match &self.eigen {
            Some(e) => e.values,
            None => {
                let v = self.m.complex_eigenvalues();
                [v[0], v[1], v[2]]
            }
        }
    }

    pub fn at(&self, t: f64) -> Matrix3<f64> {
        match &self.eigen {
            Some(e) => {
                let d = Matrix3::from_diagonal(&Vector3::from_iterator(
                    e.values.iter().map(|l| (l * t).exp()),
                ));
                (e.vectors * d * e.inverse).map(|z| z.re)
            }
            None => (self.m * t).exp(),
        }
    }
}

impl Eigen3 {
    fn new(m: &Matrix3<f64>, limit: f64) -> Option<Self> {
        let vals = m.complex_eigenvalues();
        let values = [vals[0], vals[1], vals[2]];
        let mc = m.map(|x| Complex64::new(x, 0.0));
        let scale = m.norm().max(1.0);
        let mut vectors = Matrix3::<Complex64>::zeros();
        for (col, &lambda) in values.iter().enumerate() {
            let a = mc - Matrix3::from_diagonal_element(lambda);
            let rows = [a.row(0).transpose(), a.row(1).transpose(), a.row(2).transpose()];
            // the null vector is orthogonal to every row; take the best cross product
            let v = [(0, 1), (0, 2), (1, 2)]
                .iter()
                .map(|&(i, j)| ccross(&rows[i], &rows[j]))
                .max_by(|x, y| x.norm().total_cmp(&y.norm()))?;
            let n = v.norm();
            if !(n > 1e-12 * scale * scale) {
                return None;
            }
            vectors.set_column(col, &(v / Complex64::new(n, 0.0)));
        }
        let inverse = vectors.try_inverse()?;
        let cond = vectors.norm() * inverse.norm();
        if !(cond <= limit) {
            return None;
        }
        Some(Self {
            values,
            vectors,
            inverse,
        })
    }
}

/// Null vector of a rank-two matrix from two of its rows. The rows act as
/// bilinear forms `r . v`, so no conjugation enters.
fn ccross(a: &Vector3<Complex64>, b: &Vector3<Complex64>) -> Vector3<Complex64> {
    Vector3::new(
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )
}

/// Cached `exp(t L(xi))` for one frequency, applied blockwise in the frame
/// adapted to `xi`.
#[derive(Debug, Clone)]
pub struct ModePropagator {
    frame: Frame,
    long: BlockExp,
    trans: BlockExp,
}

impl ModePropagator {
    pub fn new(xi: [f64; 3], gamma: f64) -> Self {
        let frame = Frame::new(xi);
        Self {
            long: BlockExp::new(longitudinal_block(frame.k, gamma)),
            trans: BlockExp::new(transverse_block(frame.k)),
            frame,
        }
    }

    /// Eigenvalues of the full 10x10 generator: the longitudinal block, the
    /// conserved longitudinal magnetic component and the doubled transverse
    /// block.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        let mut out = self.long.eigenvalues().to_vec();
        out.push(Complex64::default());
        let t = self.trans.eigenvalues();
        out.extend_from_slice(&t);
        out.extend_from_slice(&t);
        out
    }

    pub fn apply(&self, m: &ModeState, t: f64) -> ModeState {
        assert!(t >= 0.0, "propagation backwards in time");
        let f = &self.frame;
        let proj = |v: [Complex64; 3], d: [f64; 3]| v[0] * d[0] + v[1] * d[1] + v[2] * d[2];
        let (u, e, b) = (m.u(), m.e(), m.b());

        let pl = self.long.at(t);
        let pt = self.trans.at(t);
        let lon = apply3(&pl, [I * m.rho(), proj(u, f.axis), proj(e, f.axis)]);
        let ta = apply3(&pt, [proj(u, f.e1), proj(e, f.e1), I * proj(b, f.e2)]);
        let tb = apply3(&pt, [proj(u, f.e2), proj(e, f.e2), -I * proj(b, f.e1)]);

        let rho = -I * lon[0];
        let compose = |l: Complex64, c1: Complex64, c2: Complex64| {
            let mut out = [Complex64::default(); 3];
            for a in 0..3 {
                out[a] = l * f.axis[a] + c1 * f.e1[a] + c2 * f.e2[a];
            }
            out
        };
        let b_long = proj(b, f.axis);
        ModeState::new(
            m.xi,
            rho,
            compose(lon[1], ta[0], tb[0]),
            compose(lon[2], ta[1], tb[1]),
            // i e2.B = ta[2]  and  -i e1.B = tb[2]
            compose(b_long, I * tb[2], -I * ta[2]),
        )
    }
}

fn apply3(p: &Matrix3<f64>, x: [Complex64; 3]) -> [Complex64; 3] {
    let mut out = [Complex64::default(); 3];
    for (i, o) in out.iter_mut().enumerate() {
        *o = x[0] * p[(i, 0)] + x[1] * p[(i, 1)] + x[2] * p[(i, 2)];
    }
    out
}

/// `exp(t L(xi)) m`
pub fn propagate_mode(m: &ModeState, gamma: f64, t: f64) -> ModeState {
    ModePropagator::new(m.xi, gamma).apply(m, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindecay::symbol::symbol_matrix;
    use nalgebra::SVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_mode(rng: &mut ChaCha8Rng, scale: f64) -> ModeState {
        let xi = [
            rng.random_range(-scale..scale),
            rng.random_range(-scale..scale),
            rng.random_range(-scale..scale),
        ];
        let mut amp = [Complex64::default(); 10];
        for a in amp.iter_mut() {
            *a = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
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

    #[test]
    fn zero_time_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let m = random_mode(&mut rng, 5.0);
            assert!(gap(&propagate_mode(&m, 1.4, 0.0), &m) < 1e-13);
        }
    }

    #[test]
    fn agrees_with_the_dense_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let m = random_mode(&mut rng, 4.0);
            let t = 0.7;
            let dense = (symbol_matrix(m.xi, 5.0 / 3.0) * Complex64::new(t, 0.0)).exp();
            let v = dense * SVector::<Complex64, 10>::from_column_slice(&m.amp);
            let got = propagate_mode(&m, 5.0 / 3.0, t);
            let want = ModeState {
                xi: m.xi,
                amp: std::array::from_fn(|i| v[i]),
            };
            assert!(gap(&got, &want) < 1e-11 * m.norm(), "{:e}", gap(&got, &want));
        }
    }

    #[test]
    fn fallback_path_matches_eigenbasis() {
        let m = transverse_block(0.8);
        let eig = BlockExp::new(m);
        let pade = BlockExp::with_limit(m, 0.0);
        assert!(eig.uses_eigenbasis() && !pade.uses_eigenbasis());
        for t in [0.1, 1.0, 13.0] {
            assert!((eig.at(t) - pade.at(t)).norm() < 1e-12);
        }
    }

    #[test]
    fn origin_blocks_have_the_damped_pair() {
        let p = ModePropagator::new([0.0; 3], 5.0 / 3.0);
        let want = Complex64::new(-0.5, 0.75f64.sqrt());
        let ev = p.eigenvalues();
        for target in [want, want.conj()] {
            let hits = ev.iter().filter(|z| (*z - target).norm() < 1e-12).count();
            assert_eq!(hits, 3, "{ev:?}");
        }
        assert_eq!(ev.iter().filter(|z| z.norm() < 1e-12).count(), 4);
    }
}
