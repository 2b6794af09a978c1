//! Sample grids in the separation variable.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Log,
    Linear,
}

/// `n` points from `lo` to `hi` inclusive. Endpoints are reproduced exactly.
pub fn grid(lo: f64, hi: f64, n: usize, spacing: Spacing) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi) {
        return invalid(format!("grid bounds must satisfy 0 < lo < hi, got {lo}..{hi}"));
    }
    if n < 2 {
        return invalid(format!("grid needs at least two points, got {n}"));
    }
    let last = (n - 1) as f64;
    let mut points: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 / last;
            match spacing {
                Spacing::Linear => lo + (hi - lo) * t,
                Spacing::Log => (lo.ln() + (hi.ln() - lo.ln()) * t).exp(),
            }
        })
        .collect();
    points[0] = lo;
    points[n - 1] = hi;
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_grid_is_geometric() {
        let g = grid(0.01, 100.0, 5, Spacing::Log).unwrap();
        assert_eq!(g[0], 0.01);
        assert_eq!(g[4], 100.0);
        for (i, want) in [0.01, 0.1, 1.0, 10.0, 100.0].iter().enumerate() {
            assert!((g[i] - want).abs() <= 1e-14 * want);
        }
    }

    #[test]
    fn linear_grid() {
        assert_eq!(grid(1.0, 2.0, 3, Spacing::Linear).unwrap(), vec![1.0, 1.5, 2.0]);
    }

    #[test]
    fn rejects_bad_bounds() {
        assert!(grid(0.0, 1.0, 4, Spacing::Log).is_err());
        assert!(grid(2.0, 1.0, 4, Spacing::Linear).is_err());
        assert!(grid(1.0, 2.0, 1, Spacing::Linear).is_err());
    }
}
