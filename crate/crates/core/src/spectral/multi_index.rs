use std::fmt;

use serde::{Deserialize, Serialize};

/// Derivative multi-index `alpha = (a1, a2, a3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(pub [u32; 3]);

impl MultiIndex {
    pub const ZERO: MultiIndex = MultiIndex([0, 0, 0]);

    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `k1^a1 k2^a2 k3^a3`
    pub fn monomial(&self, k: [f64; 3]) -> f64 {
        let pow = |x: f64, e: u32| (0..e).fold(1.0, |acc, _| acc * x);
        pow(k[0], self.0[0]) * pow(k[1], self.0[1]) * pow(k[2], self.0[2])
    }

    /// All multi-indices with `min <= |alpha| <= max`, by order then
    /// lexicographically descending.
    pub fn range(min: u32, max: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for order in min..=max {
            for a in (0..=order).rev() {
                for b in (0..=order - a).rev() {
                    out.push(MultiIndex([a, b, order - a - b]));
                }
            }
        }
        out
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

/// `sum_{min <= |alpha| <= max} k^(2 alpha)`, the Parseval weight of a
/// homogeneous Sobolev sum.
#[inline]
pub fn sobolev_weight(k: [f64; 3], min: u32, max: u32) -> f64 {
    // h[m] holds the complete homogeneous polynomial of degree m in the
    // squared wavenumbers, built one variable at a time.
    const STACK: usize = 16;
    let len = max as usize + 1;
    let mut stack = [0.0f64; STACK];
    let mut heap = Vec::new();
    let h: &mut [f64] = if len <= STACK {
        &mut stack[..len]
    } else {
        heap.resize(len, 0.0);
        &mut heap
    };
    h[0] = 1.0;
    for x in k {
        let x = x * x;
        for m in 1..len {
            h[m] += x * h[m - 1];
        }
    }
    h[min as usize..].iter().sum()
}
