//! Rank-1 separable potentials `V = |f⟩⟨f|`.
//!
//! A form factor is a weighted set of point sources times a frequency
//! dependent prefactor `g(ω)`. For such potentials `T = t |f⟩⟨f|` with
//! `t = 1/(1 + ⟨f|G₀|f⟩)`, and the two-body determinant collapses to
//! `1 - t_A t_B ⟨f_A|G₀|f_B⟩²`.
//!
//! Body A is anchored at `-a` and body B at `+a`: a point with position `p`
//! sits at `p - a` in A and at `p + a` in B.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::channel_energy::{scaled_integral, EnergyCurve};
use crate::dispersion::{FrequencyFn, FrequencyPoint};
use crate::error::{invalid, CasimirError, Result};
use crate::parallel::Execution;
use crate::quadrature::QuadratureSpec;
use crate::Estimate;

/// Free Green function `⟨x|(-∇² + ω²)⁻¹|x'⟩` as a function of distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GreenKernel {
    /// `e^{-ω r} / (2ω)` on a line.
    LineMassless,
    /// `e^{-ω r̂} / (4π r̂)` in three dimensions with `r̂ = max(r, smear)`.
    Point3d { smear: f64 },
}

impl GreenKernel {
    pub fn point3d(smear: f64) -> Result<Self> {
        if !(smear.is_finite() && smear > 0.0) {
            return invalid(format!("smear must be positive, got {smear}"));
        }
        Ok(GreenKernel::Point3d { smear })
    }

    pub fn eval(&self, r: f64, omega: f64) -> f64 {
        match *self {
            GreenKernel::LineMassless => (-omega * r).exp() / (2.0 * omega),
            GreenKernel::Point3d { smear } => {
                let r = r.max(smear);
                (-omega * r).exp() / (4.0 * PI * r)
            }
        }
    }

    /// `∂G/∂r`; zero inside the smearing radius.
    pub fn radial_derivative(&self, r: f64, omega: f64) -> f64 {
        match *self {
            GreenKernel::LineMassless => -0.5 * (-omega * r).exp(),
            GreenKernel::Point3d { smear } => {
                if r < smear {
                    0.0
                } else {
                    -(-omega * r).exp() * (omega * r + 1.0) / (4.0 * PI * r * r)
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if let GreenKernel::Point3d { smear } = *self {
            GreenKernel::point3d(smear)?;
        }
        Ok(())
    }
}

/// Frequency dependent prefactor `g(ω)` of a form factor.
#[derive(Clone, Default)]
pub enum Prefactor {
    /// `g ≡ 1`.
    Unit,
    /// `g(ω) = 1 + 1/(ω² + 1)`.
    #[default]
    Resonant,
    Custom(FrequencyFn),
}

impl Prefactor {
    pub fn eval(&self, omega: f64) -> f64 {
        match self {
            Prefactor::Unit => 1.0,
            Prefactor::Resonant => 1.0 + 1.0 / (omega * omega + 1.0),
            Prefactor::Custom(g) => g(omega),
        }
    }
}

impl fmt::Debug for Prefactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prefactor::Unit => f.write_str("Unit"),
            Prefactor::Resonant => f.write_str("Resonant"),
            Prefactor::Custom(_) => f.write_str("Custom"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourcePoint {
    pub weight: f64,
    pub position: f64,
}

#[derive(Debug, Clone)]
pub struct FormFactor {
    pub points: Vec<SourcePoint>,
    pub prefactor: Prefactor,
}

impl FormFactor {
    /// Weights may all vanish, which describes an absent body.
    pub fn new(points: Vec<SourcePoint>, prefactor: Prefactor) -> Result<Self> {
        if points.is_empty() {
            return invalid("form factor needs at least one point");
        }
        if points.iter().any(|p| !(p.weight.is_finite() && p.position.is_finite())) {
            return invalid("form factor weights and positions must be finite");
        }
        Ok(FormFactor { points, prefactor })
    }

    pub fn from_pairs(pairs: &[(f64, f64)], prefactor: Prefactor) -> Result<Self> {
        FormFactor::new(
            pairs
                .iter()
                .map(|&(weight, position)| SourcePoint { weight, position })
                .collect(),
            prefactor,
        )
    }

    /// The same form factor with every position moved by `shift`.
    pub fn shifted(&self, shift: f64) -> FormFactor {
        FormFactor {
            points: self
                .points
                .iter()
                .map(|p| SourcePoint {
                    weight: p.weight,
                    position: p.position + shift,
                })
                .collect(),
            prefactor: self.prefactor.clone(),
        }
    }

    pub fn total_weight(&self) -> f64 {
        self.points.iter().map(|p| p.weight).sum()
    }

    /// Same points with every weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> FormFactor {
        FormFactor {
            points: self
                .points
                .iter()
                .map(|p| SourcePoint {
                    weight: p.weight * factor,
                    position: p.position,
                })
                .collect(),
            prefactor: self.prefactor.clone(),
        }
    }
}

/// `g_A g_B Σ_ij w_i w_j G₀(|x_i - x_j|)` with positions taken as given.
pub fn gram(fa: &FormFactor, fb: &FormFactor, kernel: &GreenKernel, omega: FrequencyPoint) -> f64 {
    let w = omega.value();
    let mut sum = 0.0;
    for p in &fa.points {
        for q in &fb.points {
            sum += p.weight * q.weight * kernel.eval((p.position - q.position).abs(), w);
        }
    }
    fa.prefactor.eval(w) * fb.prefactor.eval(w) * sum
}

/// `1 / (1 + ⟨f|G₀|f⟩)`.
pub fn t_norm(f: &FormFactor, kernel: &GreenKernel, omega: FrequencyPoint) -> f64 {
    1.0 / (1.0 + gram(f, f, kernel, omega))
}

/// The two bodies placed at half-separation `a`.
struct Placed {
    a: FormFactor,
    b: FormFactor,
}

fn place(fa: &FormFactor, fb: &FormFactor, kernel: &GreenKernel, a_shift: f64) -> Result<Placed> {
    kernel.validate()?;
    if !(a_shift.is_finite() && a_shift > 0.0) {
        return invalid(format!("separation parameter a must be positive, got {a_shift}"));
    }
    let placed = Placed {
        a: fa.shifted(-a_shift),
        b: fb.shifted(a_shift),
    };
    if let GreenKernel::Point3d { smear } = *kernel {
        let distance = closest_cross_distance(&placed);
        if distance <= smear {
            return Err(CasimirError::Overlap {
                distance,
                minimum: smear,
            });
        }
    }
    Ok(placed)
}

fn closest_cross_distance(p: &Placed) -> f64 {
    p.a.points
        .iter()
        .flat_map(|x| p.b.points.iter().map(move |y| (x.position - y.position).abs()))
        .fold(f64::INFINITY, f64::min)
}

/// `1 - t_A t_B g_AB²` as `(ln value, t_A t_B, g_AB)`, computed without
/// cancellation when the value is small.
fn log_determinant(p: &Placed, kernel: &GreenKernel, omega: FrequencyPoint) -> (f64, f64, f64) {
    let gaa = gram(&p.a, &p.a, kernel, omega);
    let gbb = gram(&p.b, &p.b, kernel, omega);
    let gab = gram(&p.a, &p.b, kernel, omega);
    let norms = 1.0 / ((1.0 + gaa) * (1.0 + gbb));
    let q = norms * gab * gab;
    let log = if q < 0.5 {
        (-q).ln_1p()
    } else {
        let numerator = 1.0 + gaa + gbb + gram_gap(p, kernel, omega.value(), gaa, gbb, gab);
        numerator.max(f64::MIN_POSITIVE).ln() - gaa.ln_1p() - gbb.ln_1p()
    };
    (log, norms, gab)
}

/// `g_AA g_BB - g_AB²`, which is nonnegative by Cauchy–Schwarz. On the line
/// every Gram element carries the same `W_X W_Y / (2ω)` pole, which cancels
/// exactly here; writing `e^{-ωr} = 1 + expm1(-ωr)` removes it analytically.
fn gram_gap(p: &Placed, kernel: &GreenKernel, omega: f64, gaa: f64, gbb: f64, gab: f64) -> f64 {
    if !matches!(kernel, GreenKernel::LineMassless) {
        return gaa * gbb - gab * gab;
    }
    let rest = |x: &FormFactor, y: &FormFactor| -> f64 {
        x.points
            .iter()
            .flat_map(|s| y.points.iter().map(move |t| s.weight * t.weight * (-omega * (s.position - t.position).abs()).exp_m1()))
            .sum()
    };
    let (wa, wb) = (p.a.total_weight(), p.b.total_weight());
    let (raa, rbb, rab) = (rest(&p.a, &p.a), rest(&p.b, &p.b), rest(&p.a, &p.b));
    let bracket = wa * wa * rbb + wb * wb * raa - 2.0 * wa * wb * rab + (raa * rbb - rab * rab);
    let scale = p.a.prefactor.eval(omega) * p.b.prefactor.eval(omega) / (2.0 * omega);
    scale * scale * bracket
}

/// `∂g_AB/∂a`; every cross distance `|x_B - x_A|` grows at rate 2.
fn gram_da(p: &Placed, kernel: &GreenKernel, omega: f64) -> f64 {
    let mut sum = 0.0;
    for x in &p.a.points {
        for y in &p.b.points {
            let d = y.position - x.position;
            sum += x.weight * y.weight * kernel.radial_derivative(d.abs(), omega) * 2.0 * d.signum();
        }
    }
    p.a.prefactor.eval(omega) * p.b.prefactor.eval(omega) * sum
}

fn quadrature_scale(a_shift: f64) -> f64 {
    1.0 / (2.0 * a_shift)
}

/// `E(a) = (1/2π) ∫₀^∞ ln(1 - t_A t_B g_AB²) dω`.
pub fn separable_energy(
    fa: &FormFactor,
    fb: &FormFactor,
    kernel: &GreenKernel,
    a_shift: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let placed = place(fa, fb, kernel, a_shift)?;
    scaled_integral(
        |w| Ok(log_determinant(&placed, kernel, FrequencyPoint::new(w)?).0),
        spec,
        quadrature_scale(a_shift),
        1.0 / (2.0 * PI),
    )
}

/// `-dE/da`, from the analytic derivative of the cross Gram element.
pub fn separable_force(
    fa: &FormFactor,
    fb: &FormFactor,
    kernel: &GreenKernel,
    a_shift: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let placed = place(fa, fb, kernel, a_shift)?;
    scaled_integral(
        |w| {
            let omega = FrequencyPoint::new(w)?;
            let (log, norms, gab) = log_determinant(&placed, kernel, omega);
            if gab == 0.0 {
                return Ok(0.0);
            }
            // d/da ln(1 - q) = -2 t_A t_B g g' / (1 - q)
            Ok(-2.0 * norms * gab * gram_da(&placed, kernel, w) / log.exp())
        },
        spec,
        quadrature_scale(a_shift),
        -1.0 / (2.0 * PI),
    )
}

/// Second-order energy `-(1/2π) ∫₀^∞ g_AB² dω` (the trace over the full
/// frequency axis folded onto `(0, ∞)`).
pub fn second_order_energy(
    fa: &FormFactor,
    fb: &FormFactor,
    kernel: &GreenKernel,
    a_shift: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    second_order_energy_guard(fa, fb, kernel)?;
    let placed = place(fa, fb, kernel, a_shift)?;
    scaled_integral(
        |w| {
            let g = gram(&placed.a, &placed.b, kernel, FrequencyPoint::new(w)?);
            Ok(g * g)
        },
        spec,
        quadrature_scale(a_shift),
        -1.0 / (2.0 * PI),
    )
}

/// `-dE₂/da = (1/π) ∫₀^∞ g_AB ∂g_AB/∂a dω`.
pub fn second_order_force(
    fa: &FormFactor,
    fb: &FormFactor,
    kernel: &GreenKernel,
    a_shift: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    second_order_energy_guard(fa, fb, kernel)?;
    let placed = place(fa, fb, kernel, a_shift)?;
    scaled_integral(
        |w| {
            let g = gram(&placed.a, &placed.b, kernel, FrequencyPoint::new(w)?);
            Ok(g * gram_da(&placed, kernel, w))
        },
        spec,
        quadrature_scale(a_shift),
        1.0 / PI,
    )
}

fn second_order_energy_guard(fa: &FormFactor, fb: &FormFactor, kernel: &GreenKernel) -> Result<()> {
    if *kernel == GreenKernel::LineMassless {
        let (wa, wb) = (fa.total_weight(), fb.total_weight());
        if wa * wb != 0.0 {
            return Err(CasimirError::InfraredDivergence(format!(
                "line kernel with net source weights {wa} and {wb}: the cross Gram element grows like 1/ω at small ω"
            )));
        }
    }
    Ok(())
}

/// `ln det(1 - T_A G₀ T_B G₀)` from the closed rank-1 form and from a dense
/// computation in the basis of all point sources of both bodies.
///
/// The dense side runs in double-double arithmetic on the same `f64` kernel
/// entries, so it is exact to far below `f64` rounding and any difference is
/// the closed form's own error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatrixCheck {
    pub closed_form: f64,
    pub matrix_form: f64,
}

impl MatrixCheck {
    pub fn relative_difference(&self) -> f64 {
        let scale = self.closed_form.abs().max(self.matrix_form.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.closed_form - self.matrix_form).abs() / scale
        }
    }
}

type Dense = Vec<Vec<TwoFloat>>;

fn dd(v: f64) -> TwoFloat {
    TwoFloat::from(v)
}

fn identity(n: usize) -> Dense {
    (0..n)
        .map(|i| (0..n).map(|j| dd(if i == j { 1.0 } else { 0.0 })).collect())
        .collect()
}

fn product(x: &Dense, y: &Dense) -> Dense {
    let n = x.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(dd(0.0), |acc, k| acc + x[i][k] * y[k][j]))
                .collect()
        })
        .collect()
}

/// Gaussian elimination with partial pivoting on `lhs`, applied to `rhs`.
/// Returns the determinant of `lhs`; `rhs` becomes `lhs⁻¹ rhs` when given.
fn eliminate(mut lhs: Dense, mut rhs: Option<&mut Dense>) -> TwoFloat {
    let n = lhs.len();
    let mut det = dd(1.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| lhs[i][col].hi().abs().total_cmp(&lhs[j][col].hi().abs()))
            .expect("nonempty range");
        if lhs[pivot][col].hi() == 0.0 {
            return dd(0.0);
        }
        if pivot != col {
            lhs.swap(pivot, col);
            if let Some(r) = rhs.as_deref_mut() {
                r.swap(pivot, col);
            }
            det = -det;
        }
        let p = lhs[col][col];
        det *= p;
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = lhs[row][col] / p;
            let pivot_row = lhs[col].clone();
            for (x, &v) in lhs[row].iter_mut().zip(&pivot_row).skip(col) {
                *x -= factor * v;
            }
            if let Some(r) = rhs.as_deref_mut() {
                let pivot_row = r[col].clone();
                for (x, &v) in r[row].iter_mut().zip(&pivot_row) {
                    *x -= factor * v;
                }
            }
        }
    }
    if let Some(r) = rhs {
        for (row, line) in r.iter_mut().enumerate() {
            for v in line.iter_mut() {
                *v /= lhs[row][row];
            }
        }
    }
    det
}

pub fn explicit_matrix_check(
    fa: &FormFactor,
    fb: &FormFactor,
    kernel: &GreenKernel,
    a_shift: f64,
    omega: FrequencyPoint,
) -> Result<MatrixCheck> {
    let placed = place(fa, fb, kernel, a_shift)?;
    let closed_form = log_determinant(&placed, kernel, omega).0;

    let w = omega.value();
    let sources: Vec<(f64, f64, bool)> = placed
        .a
        .points
        .iter()
        .map(|s| (s.position, placed.a.prefactor.eval(w) * s.weight, true))
        .chain(placed.b.points.iter().map(|s| (s.position, placed.b.prefactor.eval(w) * s.weight, false)))
        .collect();
    let n = sources.len();
    let g: Dense = sources
        .iter()
        .map(|x| sources.iter().map(|y| dd(kernel.eval((x.0 - y.0).abs(), w))).collect())
        .collect();
    // T = (1 + V G₀)⁻¹ V with V = u uᵀ restricted to one body.
    let t_matrix = |body_a: bool| -> Result<Dense> {
        let u: Vec<TwoFloat> = sources
            .iter()
            .map(|s| if s.2 == body_a { dd(s.1) } else { dd(0.0) })
            .collect();
        let mut v: Dense = u.iter().map(|&ui| u.iter().map(|&uj| ui * uj).collect()).collect();
        let vg = product(&v, &g);
        let mut lhs = identity(n);
        for (row, line) in lhs.iter_mut().enumerate() {
            for (col, x) in line.iter_mut().enumerate() {
                *x += vg[row][col];
            }
        }
        if eliminate(lhs, Some(&mut v)).hi() == 0.0 {
            return invalid("1 + V G₀ is singular");
        }
        Ok(v)
    };
    let m = product(&product(&t_matrix(true)?, &g), &product(&t_matrix(false)?, &g));
    let mut one_minus_m = identity(n);
    for (row, line) in one_minus_m.iter_mut().enumerate() {
        for (col, x) in line.iter_mut().enumerate() {
            *x -= m[row][col];
        }
    }
    let det = eliminate(one_minus_m, None);
    if !(det.hi() > 0.0) {
        return Err(CasimirError::NonFinite { omega: w, value: det.hi() });
    }
    // ln(1 + (det - 1)) keeps full accuracy when det is close to one.
    let matrix_form = if det.hi() < 0.5 {
        det.hi().ln() + (det.lo() / det.hi()).ln_1p()
    } else {
        f64::from(det - dd(1.0)).ln_1p()
    };
    Ok(MatrixCheck {
        closed_form,
        matrix_form,
    })
}

pub fn separable_curve(
    fa: &FormFactor,
    fb: &FormFactor,
    kernel: &GreenKernel,
    grid: &[f64],
    spec: &QuadratureSpec,
    exec: Execution,
) -> Result<EnergyCurve> {
    spec.validate()?;
    EnergyCurve::sample(grid, exec, |a| {
        (
            separable_energy(fa, fb, kernel, a, spec),
            separable_force(fa, fb, kernel, a, spec),
        )
    })
}
