//! Eigenvalues of a real symmetric band matrix: Givens reduction to
//! tridiagonal form with bulge chasing, then implicit QL.

use crate::error::{CasimirError, Result};

/// Lower band storage with one extra diagonal for the bulge created while
/// chasing: `A(i + d, i)` for `d ≤ bandwidth + 1`.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    bandwidth: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        BandMatrix {
            n,
            bandwidth,
            data: vec![0.0; n * (bandwidth + 2)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        let d = i - j;
        (d <= self.bandwidth + 1 && i < self.n).then(|| d * self.n + j)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    /// Set `A(i, j) = A(j, i)`; `|i - j|` must lie within the bandwidth.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert!(i.abs_diff(j) <= self.bandwidth, "entry ({i}, {j}) outside the band");
        self.put(i, j, value);
    }

    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        let v = self.get(i, j);
        self.set(i, j, v + value);
    }

    fn put(&mut self, i: usize, j: usize, value: f64) {
        match self.slot(i, j) {
            Some(s) => self.data[s] = value,
            None => debug_assert!(value == 0.0, "fill-in outside the stored band"),
        }
    }

    /// `A ← R A Rᵀ` for the rotation acting on coordinates `p` and `p + 1`
    /// as `(x_p, x_q) ↦ (c x_p + s x_q, -s x_p + c x_q)`.
    fn rotate(&mut self, p: usize, c: f64, s: f64) {
        let q = p + 1;
        let reach = self.bandwidth + 1;
        let lo = p.saturating_sub(reach);
        let hi = (q + reach).min(self.n - 1);
        for j in lo..=hi {
            if j == p || j == q {
                continue;
            }
            let (ap, aq) = (self.get(p, j), self.get(q, j));
            if ap == 0.0 && aq == 0.0 {
                continue;
            }
            self.put(p, j, c * ap + s * aq);
            self.put(q, j, -s * ap + c * aq);
        }
        let (app, aqq, apq) = (self.get(p, p), self.get(q, q), self.get(p, q));
        self.put(p, p, c * c * app + 2.0 * c * s * apq + s * s * aqq);
        self.put(q, q, s * s * app - 2.0 * c * s * apq + c * c * aqq);
        self.put(p, q, c * s * (aqq - app) + (c * c - s * s) * apq);
    }

    /// Zero `A(row, col)` with a rotation in the plane `(row - 1, row)`.
    fn annihilate(&mut self, row: usize, col: usize) {
        let target = self.get(row, col);
        if target == 0.0 {
            return;
        }
        let pivot = self.get(row - 1, col);
        let r = pivot.hypot(target);
        self.rotate(row - 1, pivot / r, target / r);
        self.put(row, col, 0.0);
    }

    /// Orthogonal reduction to tridiagonal form; returns `(diagonal, off_diagonal)`.
    pub fn tridiagonalize(mut self) -> (Vec<f64>, Vec<f64>) {
        let (n, b) = (self.n, self.bandwidth);
        if b > 1 {
            for k in 0..n.saturating_sub(2) {
                for d in (2..=b).rev() {
                    if k + d >= n {
                        continue;
                    }
                    self.annihilate(k + d, k);
                    // chase the bulge at (row + b, row - 1) off the matrix
                    let mut row = k + d + b;
                    let mut col = k + d - 1;
                    while row < n {
                        self.annihilate(row, col);
                        col = row - 1;
                        row += b;
                    }
                }
            }
        }
        let diagonal = (0..n).map(|i| self.get(i, i)).collect();
        let off = (0..n.saturating_sub(1)).map(|i| self.get(i + 1, i)).collect();
        (diagonal, off)
    }
}

/// Eigenvalues (unsorted) of the symmetric tridiagonal matrix with diagonal
/// `d` and off-diagonal `e`, by the implicit QL method with Wilkinson shifts.
pub fn tridiagonal_eigenvalues(mut d: Vec<f64>, off: &[f64]) -> Result<Vec<f64>> {
    let n = d.len();
    let mut e = off.to_vec();
    e.push(0.0);
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() + dd == dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 60 {
                return Err(CasimirError::EigenNonConvergence);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(d)
}

pub fn band_eigenvalues(matrix: BandMatrix) -> Result<Vec<f64>> {
    let (d, e) = matrix.tridiagonalize();
    tridiagonal_eigenvalues(d, &e)
}
