//! Pinned reference values for the named scenarios.
//!
//! Each check recomputes one number and compares it with the value recorded
//! when the scenario was first validated. Drift beyond the stated tolerance
//! fails the check.

use std::f64::consts::PI;

use serde::Serialize;

use crate::channel_energy::{energy, find_equilibria, EquilibriumKind, EquilibriumReport, Scan};
use crate::channel_energy::find_equilibria_with;
use crate::error::{CasimirError, Result};
use crate::grid::{grid, Spacing};
use crate::parallel::Execution;
use crate::quadrature::QuadratureSpec;
use crate::scattering::Strength;
use crate::scenarios::{self, ChannelScenario, SeparableScenario};
use crate::separable::{second_order_energy, second_order_force, separable_energy, separable_force};
use crate::waveguide::{bessel_zero, ZeroKind};

pub const FIG2_MAXIMUM: f64 = 0.643_492_122_521_365_5;
pub const FIG2_MINIMUM: f64 = 0.827_676_153_052_301_8;
pub const FIG2_SHORT_DISTANCE_XE: f64 = -0.093_437_187_200_813_63;
pub const FIG2_CURVE_CHECKSUM: f64 = -2.163_785_045_706_248e1;
pub const TUNED_MINIMUM: f64 = 1.988_950_531_435_672_4;
/// Ends of the repulsive interval of the [`scenarios::fig3_weak`] at smear 0.01.
pub const FIG3_WEAK_INTERVAL: (f64, f64) = (0.036_852_802_272_243_61, 0.047_209_240_213_874_355);
/// Ends of the repulsive interval of the second-order energy of [`scenarios::fig3`].
pub const FIG3_SECOND_ORDER_INTERVAL: (f64, f64) = (0.036_407_940_036_901_947, 0.047_416_893_920_123_8);
pub const EQUILIBRIUM_TOLERANCE: f64 = 1e-4;
pub const VALUE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Tolerance {
    Relative(f64),
    Absolute(f64),
}

impl Tolerance {
    fn accepts(self, expected: f64, actual: f64) -> bool {
        let diff = (actual - expected).abs();
        match self {
            Tolerance::Relative(t) => diff <= t * expected.abs(),
            Tolerance::Absolute(t) => diff <= t,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionCheck {
    pub name: String,
    pub expected: f64,
    pub actual: f64,
    pub tolerance: Tolerance,
    pub passed: bool,
    pub error: Option<String>,
}

type Compute = Box<dyn Fn() -> Result<f64> + Send + Sync>;

struct Pinned {
    name: String,
    expected: f64,
    tolerance: Tolerance,
    compute: Compute,
}

fn pinned(name: impl Into<String>, expected: f64, tolerance: Tolerance, compute: Compute) -> Pinned {
    Pinned {
        name: name.into(),
        expected,
        tolerance,
        compute,
    }
}

/// The `index`-th zero of `report` with the given kind.
fn zero_of(report: &EquilibriumReport, kind: EquilibriumKind, index: usize) -> Result<f64> {
    report
        .zeros
        .iter()
        .filter(|z| z.kind == kind)
        .nth(index)
        .map(|z| z.x)
        .ok_or_else(|| CasimirError::InvalidInput(format!("expected a {kind:?} among {:?}", report.zeros)))
}

fn fig2_equilibria() -> Result<EquilibriumReport> {
    let s = scenarios::fig2(Strength::Infinite);
    find_equilibria(&s.a, &s.b, &s.channels, Scan::new(0.02, 5.0, 64)?, &QuadratureSpec::default())
}

fn channel_energy_at(s: &ChannelScenario, x: f64) -> Result<f64> {
    Ok(energy(&s.a, &s.b, &s.channels, x, &QuadratureSpec::default())?.value)
}

fn weak_interval(smear: f64) -> Result<EquilibriumReport> {
    let s = scenarios::fig3_weak(smear)?;
    separable_equilibria(&s, false)
}

fn second_order_interval(smear: f64) -> Result<EquilibriumReport> {
    let s = scenarios::fig3(smear)?;
    separable_equilibria(&s, true)
}

/// Force zeros of a separable scenario on `a ∈ [0.0105, 1]`.
pub fn separable_equilibria(s: &SeparableScenario, second_order: bool) -> Result<EquilibriumReport> {
    let q = QuadratureSpec::default();
    let scan = Scan::new(0.0105, 1.0, 96)?;
    if second_order {
        find_equilibria_with(
            |a| Ok(second_order_force(&s.a, &s.b, &s.kernel, a, &q)?.value),
            |a| second_order_energy(&s.a, &s.b, &s.kernel, a, &q),
            scan,
            Execution::Sequential,
        )
    } else {
        find_equilibria_with(
            |a| Ok(separable_force(&s.a, &s.b, &s.kernel, a, &q)?.value),
            |a| separable_energy(&s.a, &s.b, &s.kernel, a, &q),
            scan,
            Execution::Sequential,
        )
    }
}

/// `Σ E(x_i)` on 40 log-spaced points of `[0.02, 5]` for [`scenarios::fig2`].
pub fn fig2_curve_checksum() -> Result<f64> {
    let s = scenarios::fig2(Strength::Infinite);
    grid(0.02, 5.0, 40, Spacing::Log)?
        .into_iter()
        .map(|x| channel_energy_at(&s, x))
        .sum()
}

fn checks() -> Vec<Pinned> {
    let rel = Tolerance::Relative;
    let mut list = vec![
        pinned(
            "fig2.equilibrium.maximum",
            FIG2_MAXIMUM,
            rel(EQUILIBRIUM_TOLERANCE),
            Box::new(|| zero_of(&fig2_equilibria()?, EquilibriumKind::UnstableMaximum, 0)),
        ),
        pinned(
            "fig2.equilibrium.minimum",
            FIG2_MINIMUM,
            rel(EQUILIBRIUM_TOLERANCE),
            Box::new(|| zero_of(&fig2_equilibria()?, EquilibriumKind::StableMinimum, 0)),
        ),
        pinned(
            "fig2.short_distance.x_energy",
            FIG2_SHORT_DISTANCE_XE,
            rel(VALUE_TOLERANCE),
            Box::new(|| Ok(1e-3 * channel_energy_at(&scenarios::fig2(Strength::Infinite), 1e-3)?)),
        ),
        pinned(
            "fig2.curve.checksum",
            FIG2_CURVE_CHECKSUM,
            rel(VALUE_TOLERANCE),
            Box::new(fig2_curve_checksum),
        ),
        pinned(
            "tuned.equilibrium.minimum",
            TUNED_MINIMUM,
            rel(EQUILIBRIUM_TOLERANCE),
            Box::new(|| {
                let s = scenarios::tuned(1.0, Strength::Infinite)?;
                let report = find_equilibria(&s.a, &s.b, &s.channels, Scan::new(0.01, 10.0, 64)?, &QuadratureSpec::default())?;
                zero_of(&report, EquilibriumKind::StableMinimum, 0)
            }),
        ),
        pinned(
            "tuned.energy.x1",
            -5.042_307_573_869_657e-3,
            rel(VALUE_TOLERANCE),
            Box::new(|| channel_energy_at(&scenarios::tuned(1.0, Strength::Infinite)?, 1.0)),
        ),
        pinned(
            "fig3_weak.interval.start",
            FIG3_WEAK_INTERVAL.0,
            rel(EQUILIBRIUM_TOLERANCE),
            Box::new(|| zero_of(&weak_interval(0.01)?, EquilibriumKind::UnstableMaximum, 0)),
        ),
        pinned(
            "fig3_weak.interval.end",
            FIG3_WEAK_INTERVAL.1,
            rel(EQUILIBRIUM_TOLERANCE),
            Box::new(|| zero_of(&weak_interval(0.01)?, EquilibriumKind::StableMinimum, 0)),
        ),
        pinned(
            "fig3.second_order.interval.start",
            FIG3_SECOND_ORDER_INTERVAL.0,
            rel(EQUILIBRIUM_TOLERANCE),
            Box::new(|| zero_of(&second_order_interval(0.01)?, EquilibriumKind::UnstableMaximum, 0)),
        ),
        pinned(
            "fig3.second_order.interval.end",
            FIG3_SECOND_ORDER_INTERVAL.1,
            rel(EQUILIBRIUM_TOLERANCE),
            Box::new(|| zero_of(&second_order_interval(0.01)?, EquilibriumKind::StableMinimum, 0)),
        ),
        pinned(
            "waveguide.zero.j0_1",
            2.404_825_557_695_773,
            Tolerance::Absolute(1e-12),
            Box::new(|| bessel_zero(0, 1, ZeroKind::J)),
        ),
        pinned(
            "waveguide.zero.j1_1",
            3.831_705_970_207_512,
            Tolerance::Absolute(1e-12),
            Box::new(|| bessel_zero(1, 1, ZeroKind::J)),
        ),
    ];
    for x in [0.5, 1.0, 2.0] {
        list.push(pinned(
            format!("dirichlet.x_energy.x{x}"),
            -PI / 24.0,
            rel(VALUE_TOLERANCE),
            Box::new(move || Ok(x * channel_energy_at(&scenarios::dirichlet(Strength::Infinite), x)?)),
        ));
    }
    for (x, e) in [
        (0.05, -1.182_325_900_973_927),
        (0.5, -7.883_109_551_891_965e-4),
        (1.0, -3.450_420_013_436_525e-4),
        (2.0, -4.627_383_707_370_346e-5),
    ] {
        list.push(pinned(
            format!("fig2.energy.x{x}"),
            e,
            rel(VALUE_TOLERANCE),
            Box::new(move || channel_energy_at(&scenarios::fig2(Strength::Infinite), x)),
        ));
    }
    for (a, e) in [
        (0.05, -7.000_402_759_926_755e-5),
        (0.1, -3.509_144_712_222_671_5e-5),
        (0.5, -6.077_730_509_067_21e-7),
    ] {
        list.push(pinned(
            format!("fig3.energy.a{a}"),
            e,
            rel(VALUE_TOLERANCE),
            Box::new(move || {
                let s = scenarios::fig3(0.01)?;
                Ok(separable_energy(&s.a, &s.b, &s.kernel, a, &QuadratureSpec::default())?.value)
            }),
        ));
    }
    list
}

/// Recompute every pinned value.
pub fn run_regression(exec: Execution) -> Vec<RegressionCheck> {
    exec.map(&checks(), |c| {
        let (actual, error) = match (c.compute)() {
            Ok(v) => (v, None),
            Err(e) => (f64::NAN, Some(e.to_string())),
        };
        RegressionCheck {
            name: c.name.clone(),
            expected: c.expected,
            actual,
            tolerance: c.tolerance,
            passed: error.is_none() && c.tolerance.accepts(c.expected, actual),
            error,
        }
    })
}
