//! Banded Gaussian elimination with partial pivoting.
//!
//! Every exact oracle in this crate reduces to a banded system: the star
//! chain on states ordered `(i, j) -> 2i + j`, the reduced height chain
//! after differencing out its geometric down-jumps, and the birth-death
//! walk of the star-count argument.

use crate::error::{Error, Result};

/// Square band matrix. Row `i` stores columns `i - kl ..= i + kl + ku`; the
/// extra `kl` super-diagonals hold fill-in created by row exchanges.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self { n, kl, ku, width, data: vec![0.0; n * width] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if j + self.kl < i || j > i + self.kl + self.ku || j >= self.n {
            None
        } else {
            Some(i * self.width + (j + self.kl - i))
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    /// Adds `v` to entry `(i, j)`. Panics outside the declared band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(
            j + self.kl >= i && j <= i + self.ku,
            "entry ({i}, {j}) outside band kl={} ku={}",
            self.kl,
            self.ku
        );
        let s = self.slot(i, j).expect("in band");
        self.data[s] += v;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.kl + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// Solves `A x = b`, consuming the matrix.
    pub fn solve(mut self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut rhs = b.to_vec();
        let upper = self.kl + self.ku;
        for c in 0..n {
            let last_row = (c + self.kl).min(n - 1);
            let mut piv = c;
            let mut best = self.get(c, c).abs();
            for r in c + 1..=last_row {
                let v = self.get(r, c).abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::Singular);
            }
            let last_col = (c + upper).min(n - 1);
            if piv != c {
                for j in c..=last_col {
                    let a = self.slot(c, j).expect("pivot row span");
                    let p = self.slot(piv, j).expect("pivot row span");
                    self.data.swap(a, p);
                }
                rhs.swap(c, piv);
            }
            let d = self.get(c, c);
            for r in c + 1..=last_row {
                let f = self.get(r, c) / d;
                if f == 0.0 {
                    continue;
                }
                let s = self.slot(r, c).expect("band");
                self.data[s] = 0.0;
                for j in c + 1..=last_col {
                    let u = self.get(c, j);
                    if u != 0.0 {
                        let s = self.slot(r, j).expect("fill stays in band");
                        self.data[s] -= f * u;
                    }
                }
                rhs[r] -= f * rhs[c];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let last_col = (i + upper).min(n - 1);
            let mut acc = rhs[i];
            for (j, xj) in x.iter().enumerate().take(last_col + 1).skip(i + 1) {
                acc -= self.get(i, j) * xj;
            }
            x[i] = acc / self.get(i, i);
        }
        Ok(x)
    }
}
