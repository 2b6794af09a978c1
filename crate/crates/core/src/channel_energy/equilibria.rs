//! Force zeros: bracketing on a log-spaced probe grid, bisection, and
//! classification of each zero as a minimum or maximum of the energy.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, CasimirError, Result};
use crate::grid::{grid, Spacing};
use crate::parallel::Execution;
use crate::Estimate;

const REL_WIDTH: f64 = 1e-8;
const MAX_BISECTIONS: usize = 200;
const CLASSIFY_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scan {
    pub lo: f64,
    pub hi: f64,
    pub probes: usize,
}

impl Scan {
    pub fn new(lo: f64, hi: f64, probes: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi) {
            return invalid(format!("scan range must satisfy 0 < lo < hi, got {lo}..{hi}"));
        }
        if probes < 8 {
            return invalid(format!("scan needs at least 8 probes, got {probes}"));
        }
        Ok(Scan { lo, hi, probes })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumKind {
    StableMinimum,
    UnstableMaximum,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Equilibrium {
    pub x: f64,
    pub kind: EquilibriumKind,
    /// Final bisection bracket.
    pub bracket: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumReport {
    pub zeros: Vec<Equilibrium>,
    pub scan_range: (f64, f64),
    /// Brackets whose refinement failed, with the reason.
    pub failures: Vec<String>,
}

impl EquilibriumReport {
    pub fn minima(&self) -> impl Iterator<Item = &Equilibrium> {
        self.zeros.iter().filter(|z| z.kind == EquilibriumKind::StableMinimum)
    }
}

/// Locate the zeros of `force` inside `scan`. `energy` is only used to
/// classify each zero.
pub fn find_equilibria_with<F, E>(force: F, energy: E, scan: Scan, exec: Execution) -> Result<EquilibriumReport>
where
    F: Fn(f64) -> Result<f64> + Sync + Send,
    E: Fn(f64) -> Result<Estimate> + Sync + Send,
{
    let Scan { lo, hi, probes } = Scan::new(scan.lo, scan.hi, scan.probes)?;
    let xs = grid(lo, hi, probes, Spacing::Log)?;
    let fs = exec.map(&xs, |&x| force(x)).into_iter().collect::<Result<Vec<f64>>>()?;

    let brackets: Vec<(f64, f64, f64, f64)> = (0..probes - 1)
        .filter(|&i| fs[i] * fs[i + 1] < 0.0)
        .map(|i| (xs[i], xs[i + 1], fs[i], fs[i + 1]))
        .collect();

    let refined = exec.map(&brackets, |&(a, b, fa, fb)| -> Result<Equilibrium> {
        let (l, r) = bisect(&force, a, b, fa)?;
        let x = 0.5 * (l + r);
        let kind = classify(&energy, x, fa, fb)?;
        Ok(Equilibrium {
            x,
            kind,
            bracket: (l, r),
        })
    });

    let mut zeros = Vec::new();
    let mut failures = Vec::new();
    for (r, (a, b, ..)) in refined.into_iter().zip(&brackets) {
        match r {
            Ok(z) => zeros.push(z),
            Err(e) => failures.push(format!("bracket [{a:e}, {b:e}]: {e}")),
        }
    }
    Ok(EquilibriumReport {
        zeros,
        scan_range: (lo, hi),
        failures,
    })
}

fn bisect<F>(force: &F, mut lo: f64, mut hi: f64, mut f_lo: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= REL_WIDTH * mid {
            return Ok((lo, hi));
        }
        let f_mid = force(mid)?;
        if f_mid == 0.0 {
            return Ok((mid, mid));
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Err(CasimirError::BisectionNonConvergence { lo, hi })
}

/// A minimum of `E` iff `E(x-δ) > E(x) < E(x+δ)`, a maximum for the mirrored
/// pattern. When the energy differences drown in quadrature error the sign
/// pattern of `F = -dE/dx` decides: `F` going from + to - is a minimum.
fn classify<E>(energy: &E, x: f64, f_before: f64, f_after: f64) -> Result<EquilibriumKind>
where
    E: Fn(f64) -> Result<Estimate>,
{
    let delta = CLASSIFY_STEP * x;
    let below = energy(x - delta)?;
    let centre = energy(x)?;
    let above = energy(x + delta)?;
    let noise = below.error + centre.error + above.error;
    let d_below = below.value - centre.value;
    let d_above = above.value - centre.value;
    if d_below.abs() > noise && d_above.abs() > noise {
        if d_below > 0.0 && d_above > 0.0 {
            return Ok(EquilibriumKind::StableMinimum);
        }
        if d_below < 0.0 && d_above < 0.0 {
            return Ok(EquilibriumKind::UnstableMaximum);
        }
    }
    Ok(if f_before > 0.0 && f_after < 0.0 {
        EquilibriumKind::StableMinimum
    } else {
        EquilibriumKind::UnstableMaximum
    })
}
