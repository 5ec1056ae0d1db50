use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Periodic cube `[-L/2, L/2)^3` sampled with `n` points per axis.
///
/// Sample `(i, j, k)` sits at `x = -L/2 + (i, j, k) * dx` and is stored at
/// flat offset `(i * n + j) * n + k`, so the box center is a grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    n: usize,
    l: f64,
}

impl GridSpec {
    pub fn new(n: usize, l: f64) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be even and >= 8, got {n}"
            )));
        }
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box length must be positive, got {l}"
            )));
        }
        Ok(Self { n, l })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_len(&self) -> f64 {
        self.l
    }

    pub fn dx(&self) -> f64 {
        self.l / self.n as f64
    }

    /// Volume element of the grid quadrature.
    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(3)
    }

    /// Total number of samples.
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    pub fn unflatten(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    /// Coordinate of sample `i` along one axis.
    pub fn coord(&self, i: usize) -> f64 {
        -0.5 * self.l + i as f64 * self.dx()
    }

    pub fn position(&self, idx: usize) -> [f64; 3] {
        let [i, j, k] = self.unflatten(idx);
        [self.coord(i), self.coord(j), self.coord(k)]
    }

    /// Signed integer frequency of FFT index `i`: `0, 1, .., n/2-1, -n/2, .., -1`.
    pub fn signed_index(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Angular wavenumber of FFT index `i`.
    pub fn wavenumber(&self, i: usize) -> f64 {
        2.0 * PI / self.l * self.signed_index(i) as f64
    }

    /// Wavenumber used by derivative multipliers: the Nyquist entry is zero.
    pub fn derivative_wavenumber(&self, i: usize) -> f64 {
        if i == self.n / 2 {
            0.0
        } else {
            self.wavenumber(i)
        }
    }

    /// Whether a signed index survives the 2/3 truncation (`3|k| < n`).
    pub fn in_dealias_band(&self, i: usize) -> bool {
        3 * self.signed_index(i).unsigned_abs() < self.n as u64
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N={} L={}", self.n, self.l)
    }
}

pub(crate) fn ensure_same(a: &GridSpec, b: &GridSpec) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::GridMismatch {
            left: a.to_string(),
            right: b.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_and_tiny_grids() {
        assert!(GridSpec::new(7, 1.0).is_err());
        assert!(GridSpec::new(9, 1.0).is_err());
        assert!(GridSpec::new(6, 1.0).is_err());
        assert!(GridSpec::new(8, 0.0).is_err());
        assert!(GridSpec::new(8, f64::NAN).is_err());
    }

    #[test]
    fn frequency_layout() {
        let g = GridSpec::new(8, 2.0 * PI).unwrap();
        let idx: Vec<i64> = (0..8).map(|i| g.signed_index(i)).collect();
        assert_eq!(idx, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        assert_eq!(g.wavenumber(0), 0.0);
        assert_eq!(g.derivative_wavenumber(4), 0.0);
        assert_eq!(g.wavenumber(4), -4.0);
        assert_eq!(g.coord(4), 0.0);
    }

    #[test]
    fn dealias_band_is_strict_two_thirds() {
        let g = GridSpec::new(48, 1.0).unwrap();
        let kept = (0..48).filter(|&i| g.in_dealias_band(i)).count();
        assert_eq!(kept, 31);
    }
}
