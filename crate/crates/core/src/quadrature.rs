//! Double-exponential (exp-sinh) quadrature on `(0, ∞)`.
//!
//! The substitution `ω = s·exp((π/2) sinh t)` maps `(0, ∞)` onto the real
//! line and makes both an integrable `ln ω` singularity at the origin and an
//! exponential tail decay double-exponentially in `t`. The transformed
//! integrand is summed with the trapezoidal rule, halving the step at each
//! level and reusing every previous node.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, CasimirError, Result};

/// Truncation of the transformed axis; beyond it the weight underflows
/// relative to any integrand of interest.
const T_MAX: f64 = 4.5;
const H0: f64 = 0.5;
const MIN_LEVEL: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_refinement_level: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_refinement_level: 12,
        }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        QuadratureSpec {
            rel_tol,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol.is_finite() && self.rel_tol > 0.0) {
            return invalid(format!("rel_tol must be positive, got {}", self.rel_tol));
        }
        if !(self.abs_tol.is_finite() && self.abs_tol > 0.0) {
            return invalid(format!("abs_tol must be positive, got {}", self.abs_tol));
        }
        if self.max_refinement_level < MIN_LEVEL {
            return invalid(format!(
                "max_refinement_level must be at least {MIN_LEVEL}, got {}",
                self.max_refinement_level
            ));
        }
        Ok(())
    }

    fn tolerance(&self, value: f64) -> f64 {
        (self.rel_tol * value.abs()).max(self.abs_tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// `∫₀^∞ f(ω) dω`.
pub fn integrate_semi_infinite<F>(f: F, spec: &QuadratureSpec) -> Result<IntegralResult>
where
    F: Fn(f64) -> f64,
{
    integrate_scaled(|w| Ok(f(w)), spec, 1.0)
}

/// `∫₀^∞ f(ω) dω` for a fallible integrand; the first error aborts.
pub fn try_integrate_semi_infinite<F>(f: F, spec: &QuadratureSpec) -> Result<IntegralResult>
where
    F: Fn(f64) -> Result<f64>,
{
    integrate_scaled(f, spec, 1.0)
}

/// Like [`try_integrate_semi_infinite`], with the node set centred on the
/// frequency `scale` (typically the inverse of the problem's length scale).
pub fn integrate_scaled<F>(f: F, spec: &QuadratureSpec, scale: f64) -> Result<IntegralResult>
where
    F: Fn(f64) -> Result<f64>,
{
    spec.validate()?;
    let mut ladder = Ladder::new(&f, scale)?;
    let mut previous = ladder.next_level()?;
    let mut error = f64::INFINITY;
    for level in 1..=spec.max_refinement_level {
        let current = ladder.next_level()?;
        error = (current - previous).abs();
        previous = current;
        if level >= MIN_LEVEL && error <= spec.tolerance(current) {
            return Ok(IntegralResult {
                value: current,
                error_estimate: error,
                evaluations: ladder.evaluations,
            });
        }
    }
    Err(CasimirError::NonConvergence {
        estimate: previous,
        error,
        evaluations: ladder.evaluations,
    })
}

/// Trapezoidal estimates at levels `0..=levels`, without any convergence test.
pub fn refinement_estimates<F>(f: F, levels: u32, scale: f64) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut ladder = Ladder::new(&f, scale)?;
    (0..=levels).map(|_| ladder.next_level()).collect()
}

struct Ladder<'a, F> {
    f: &'a F,
    scale: f64,
    level: u32,
    sum: f64,
    evaluations: usize,
}

impl<'a, F> Ladder<'a, F>
where
    F: Fn(f64) -> Result<f64>,
{
    fn new(f: &'a F, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return invalid(format!("quadrature scale must be positive, got {scale}"));
        }
        Ok(Ladder {
            f,
            scale,
            level: 0,
            sum: 0.0,
            evaluations: 0,
        })
    }

    fn node(&mut self, t: f64) -> Result<f64> {
        let u = FRAC_PI_2 * t.sinh();
        let omega = self.scale * u.exp();
        if omega == 0.0 || !omega.is_finite() {
            return Ok(0.0);
        }
        let value = (self.f)(omega)?;
        self.evaluations += 1;
        if !value.is_finite() {
            return Err(CasimirError::NonFinite { omega, value });
        }
        if value == 0.0 {
            return Ok(0.0);
        }
        Ok(value * FRAC_PI_2 * t.cosh() * omega)
    }

    /// Trapezoidal estimate at the next level, evaluating only new nodes.
    fn next_level(&mut self) -> Result<f64> {
        let h = H0 / f64::from(1u32 << self.level);
        let n = (T_MAX / h).round() as i64;
        let mut partial = 0.0;
        if self.level == 0 {
            for j in -n..=n {
                partial += self.node(j as f64 * h)?;
            }
        } else {
            for j in (-n + 1..n).step_by(2) {
                partial += self.node(j as f64 * h)?;
            }
        }
        self.sum += partial;
        self.level += 1;
        Ok(self.sum * h)
    }
}
