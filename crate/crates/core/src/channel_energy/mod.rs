//! Frequency-integrated energies and forces for the multi-channel mirror model.
//!
//! `E(x) = (1/2π) ∫₀^∞ ln det(ω, x) dω` and `F(x) = -dE/dx`, with the force
//! integrand taken from the analytic derivative of the determinant.

mod asymptote;
mod equilibria;

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::dispersion::{ChannelSet, FrequencyPoint};
use crate::error::{invalid, CasimirError, Result};
use crate::parallel::Execution;
use crate::quadrature::{integrate_scaled, QuadratureSpec};
use crate::scattering::{pair_determinant, pair_determinant_dx, Mirror};
use crate::Estimate;

pub use asymptote::{dilog, short_distance_coefficient};
pub use equilibria::{find_equilibria_with, Equilibrium, EquilibriumKind, EquilibriumReport, Scan};

/// Integrate `f(ω)/2π` with nodes centred on `1/x`.
pub(crate) fn frequency_integral<F>(f: F, x: f64, spec: &QuadratureSpec) -> Result<Estimate>
where
    F: Fn(f64) -> Result<f64>,
{
    scaled_integral(f, spec, 1.0 / x, 1.0 / (2.0 * PI))
}

/// `factor · ∫₀^∞ f`, with the factor also applied to the estimate carried by
/// a non-convergence error.
pub(crate) fn scaled_integral<F>(f: F, spec: &QuadratureSpec, scale: f64, factor: f64) -> Result<Estimate>
where
    F: Fn(f64) -> Result<f64>,
{
    match integrate_scaled(f, spec, scale) {
        Ok(r) => Ok(Estimate {
            value: factor * r.value,
            error: factor.abs() * r.error_estimate,
        }),
        Err(CasimirError::NonConvergence {
            estimate,
            error,
            evaluations,
        }) => Err(CasimirError::NonConvergence {
            estimate: factor * estimate,
            error: factor.abs() * error,
            evaluations,
        }),
        Err(e) => Err(e),
    }
}

fn check_separation(x: f64) -> Result<()> {
    if !(x.is_finite() && x > 0.0) {
        return invalid(format!("separation must be positive, got {x}"));
    }
    Ok(())
}

pub fn energy(a: &Mirror, b: &Mirror, cs: &ChannelSet, x: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    check_separation(x)?;
    frequency_integral(
        |w| Ok(pair_determinant(a, b, cs, FrequencyPoint::new(w)?, x)?.log_value),
        x,
        spec,
    )
}

/// `F = -dE/dx`; negative values are attractive.
pub fn force(a: &Mirror, b: &Mirror, cs: &ChannelSet, x: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    check_separation(x)?;
    scaled_integral(
        |w| pair_determinant_dx(a, b, cs, FrequencyPoint::new(w)?, x),
        spec,
        1.0 / x,
        -1.0 / (2.0 * PI),
    )
}

/// Why a curve sample is not a clean converged value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum SampleFlag {
    /// The energy quadrature stopped at its refinement limit; the stored value
    /// is the last estimate.
    EnergyNonConvergence,
    ForceNonConvergence,
    EnergyFailed(String),
    ForceFailed(String),
}

impl fmt::Display for SampleFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SampleFlag::EnergyNonConvergence => f.write_str("energy_nonconvergence"),
            SampleFlag::ForceNonConvergence => f.write_str("force_nonconvergence"),
            SampleFlag::EnergyFailed(m) => write!(f, "energy_failed({m})"),
            SampleFlag::ForceFailed(m) => write!(f, "force_failed({m})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSample {
    pub x: f64,
    pub energy: f64,
    pub force: f64,
    pub energy_err: f64,
    pub force_err: f64,
    pub flags: Vec<SampleFlag>,
}

impl CurveSample {
    pub fn is_clean(&self) -> bool {
        self.flags.is_empty()
    }

    pub fn has_nonconvergence(&self) -> bool {
        self.flags
            .iter()
            .any(|f| matches!(f, SampleFlag::EnergyNonConvergence | SampleFlag::ForceNonConvergence))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyCurve {
    pub samples: Vec<CurveSample>,
}

impl EnergyCurve {
    /// Evaluate `evaluate(x) -> (energy, force)` on every grid point. A failing
    /// sample is flagged and kept; only a curve with no usable sample fails.
    pub fn sample<F>(grid: &[f64], exec: Execution, evaluate: F) -> Result<EnergyCurve>
    where
        F: Fn(f64) -> (Result<Estimate>, Result<Estimate>) + Sync + Send,
    {
        if grid.is_empty() {
            return invalid("grid is empty");
        }
        if grid.iter().any(|&x| !(x.is_finite() && x > 0.0)) {
            return invalid("grid points must be positive");
        }
        if grid.windows(2).any(|p| p[1] <= p[0]) {
            return invalid("grid must be strictly increasing");
        }
        let samples = exec.map(grid, |&x| {
            let (e, f) = evaluate(x);
            let mut flags = Vec::new();
            let (energy, energy_err) = unpack(e, &mut flags, SampleFlag::EnergyNonConvergence, SampleFlag::EnergyFailed);
            let (force, force_err) = unpack(f, &mut flags, SampleFlag::ForceNonConvergence, SampleFlag::ForceFailed);
            CurveSample {
                x,
                energy,
                force,
                energy_err,
                force_err,
                flags,
            }
        });
        let all_failed = samples.iter().all(|s| {
            s.flags
                .iter()
                .any(|f| matches!(f, SampleFlag::EnergyFailed(_) | SampleFlag::ForceFailed(_)))
        });
        if all_failed {
            let message = samples[0]
                .flags
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("; ");
            return invalid(format!("every curve sample failed; first at x = {:e}: {message}", grid[0]));
        }
        Ok(EnergyCurve { samples })
    }

    pub fn xs(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.x).collect()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.energy).collect()
    }

    pub fn forces(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.force).collect()
    }

    pub fn is_clean(&self) -> bool {
        self.samples.iter().all(CurveSample::is_clean)
    }
}

fn unpack(
    r: Result<Estimate>,
    flags: &mut Vec<SampleFlag>,
    nonconvergence: SampleFlag,
    failed: fn(String) -> SampleFlag,
) -> (f64, f64) {
    match r {
        Ok(e) => (e.value, e.error),
        Err(CasimirError::NonConvergence { estimate, error, .. }) => {
            flags.push(nonconvergence);
            (estimate, error)
        }
        Err(e) => {
            flags.push(failed(e.to_string()));
            (f64::NAN, f64::NAN)
        }
    }
}

pub fn energy_curve(a: &Mirror, b: &Mirror, cs: &ChannelSet, grid: &[f64], spec: &QuadratureSpec) -> Result<EnergyCurve> {
    energy_curve_with(a, b, cs, grid, spec, Execution::default())
}

pub fn energy_curve_with(
    a: &Mirror,
    b: &Mirror,
    cs: &ChannelSet,
    grid: &[f64],
    spec: &QuadratureSpec,
    exec: Execution,
) -> Result<EnergyCurve> {
    spec.validate()?;
    EnergyCurve::sample(grid, exec, |x| (energy(a, b, cs, x, spec), force(a, b, cs, x, spec)))
}

/// Zeros of the force on `scan`, classified as minima or maxima of `E`.
pub fn find_equilibria(a: &Mirror, b: &Mirror, cs: &ChannelSet, scan: Scan, spec: &QuadratureSpec) -> Result<EquilibriumReport> {
    find_equilibria_with(
        |x| force(a, b, cs, x, spec).map(|e| e.value),
        |x| energy(a, b, cs, x, spec),
        scan,
        Execution::default(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::Strength;

    fn dirichlet() -> (ChannelSet, Mirror) {
        (
            ChannelSet::from_masses(&[0.0]).unwrap(),
            Mirror::new(0.0, vec![1.0], Strength::Infinite).unwrap(),
        )
    }

    #[test]
    fn dirichlet_energy_and_force() {
        let (cs, m) = dirichlet();
        let spec = QuadratureSpec::default();
        for &x in &[0.5, 1.0, 2.0, 1e-3] {
            let e = energy(&m, &m, &cs, x, &spec).unwrap();
            let f = force(&m, &m, &cs, x, &spec).unwrap();
            assert!((e.value * x + PI / 24.0).abs() < 1e-9, "x={x} {e:?}");
            assert!((f.value * x * x + PI / 24.0).abs() < 1e-9, "x={x} {f:?}");
        }
    }

    #[test]
    fn orthogonal_couplings_do_not_interact() {
        let cs = ChannelSet::from_masses(&[1.0, 5.0]).unwrap();
        let a = Mirror::new(0.0, vec![1.0, 0.0], Strength::Infinite).unwrap();
        let b = Mirror::new(0.0, vec![0.0, 1.0], Strength::Finite(3.0)).unwrap();
        let spec = QuadratureSpec::default();
        assert_eq!(energy(&a, &b, &cs, 0.7, &spec).unwrap().value, 0.0);
        assert_eq!(force(&a, &b, &cs, 0.7, &spec).unwrap().value, 0.0);
    }

    #[test]
    fn curve_validates_grid() {
        let (cs, m) = dirichlet();
        let spec = QuadratureSpec::default();
        assert!(energy_curve(&m, &m, &cs, &[1.0, 0.5], &spec).is_err());
        assert!(energy_curve(&m, &m, &cs, &[], &spec).is_err());
        assert!(energy_curve(&m, &m, &cs, &[-1.0, 1.0], &spec).is_err());
    }

    #[test]
    fn nonconvergence_is_flagged_not_fatal() {
        let (cs, m) = dirichlet();
        let tight = QuadratureSpec {
            rel_tol: 1e-300,
            abs_tol: 1e-300,
            max_refinement_level: 3,
        };
        let curve = energy_curve(&m, &m, &cs, &[0.5, 1.0], &tight).unwrap();
        assert!(curve.samples.iter().all(CurveSample::has_nonconvergence));
        assert!((curve.samples[1].energy + PI / 24.0).abs() < 1e-3);
    }

    #[test]
    fn degenerate_coupling_fails_every_sample() {
        let cs = ChannelSet::from_masses(&[0.0]).unwrap();
        let zero = Mirror::frequency_dependent(0.0, |_| vec![0.0], Strength::Infinite);
        let r = energy_curve(&zero, &zero, &cs, &[1.0, 2.0], &QuadratureSpec::default());
        assert!(r.is_err());
    }
}
