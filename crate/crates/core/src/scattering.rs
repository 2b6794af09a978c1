//! Pointwise-in-frequency scattering algebra for rank-1 point mirrors.
//!
//! A mirror `λ α αᵀ δ(x - x₀)` reflects with the rank-1 matrix
//! `r = -α̃ α̃ᵀ / (|α̃|² + 2ω/λ)` where `α̃_i = √(dk_i/dω) α_i`. The two-body
//! determinant `det(1 - r_A P r_B P)` with `P = exp(-K x)` then reduces to
//! `1 - s² / (D_A D_B)` with `s = ⟨α̃|P|β̃⟩`.

use std::borrow::Cow;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::dispersion::{ChannelSet, FrequencyPoint};
use crate::error::{invalid, CasimirError, Result};

/// Coupling strength `λ` of a mirror.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Strength {
    Finite(f64),
    /// Dirichlet-type limit `λ → ∞`; the `2ω/λ` term is dropped exactly.
    Infinite,
}

impl Strength {
    pub fn finite(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return invalid(format!("mirror strength must be positive, got {lambda}"));
        }
        Ok(Strength::Finite(lambda))
    }

    /// `2ω/λ`, zero in the infinite limit.
    pub fn damping(self, omega: f64) -> f64 {
        match self {
            Strength::Finite(lambda) => 2.0 * omega / lambda,
            Strength::Infinite => 0.0,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Strength::Infinite)
    }
}

pub type CouplingFn = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;

/// Coupling vector `α` of a mirror, optionally frequency dependent.
#[derive(Clone)]
pub enum Coupling {
    Constant(Vec<f64>),
    FrequencyDependent(CouplingFn),
}

impl Coupling {
    pub fn at(&self, omega: f64) -> Cow<'_, [f64]> {
        match self {
            Coupling::Constant(v) => Cow::Borrowed(v),
            Coupling::FrequencyDependent(f) => Cow::Owned(f(omega)),
        }
    }

    pub fn as_constant(&self) -> Option<&[f64]> {
        match self {
            Coupling::Constant(v) => Some(v),
            Coupling::FrequencyDependent(_) => None,
        }
    }
}

impl fmt::Debug for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coupling::Constant(v) => f.debug_tuple("Constant").field(v).finish(),
            Coupling::FrequencyDependent(_) => f.write_str("FrequencyDependent"),
        }
    }
}

/// One body: a rank-1 point potential `λ α αᵀ δ(x - position)`.
#[derive(Debug, Clone)]
pub struct Mirror {
    pub position: f64,
    pub coupling: Coupling,
    pub strength: Strength,
}

impl Mirror {
    pub fn new(position: f64, coupling: Vec<f64>, strength: Strength) -> Result<Self> {
        if coupling.is_empty() || coupling.iter().any(|c| !c.is_finite()) {
            return invalid("coupling vector must be non-empty and finite");
        }
        if coupling.iter().all(|&c| c == 0.0) {
            return invalid("coupling vector must not vanish identically");
        }
        if !position.is_finite() {
            return invalid("mirror position must be finite");
        }
        if let Strength::Finite(l) = strength {
            Strength::finite(l)?;
        }
        Ok(Mirror {
            position,
            coupling: Coupling::Constant(coupling),
            strength,
        })
    }

    pub fn frequency_dependent<F>(position: f64, coupling: F, strength: Strength) -> Self
    where
        F: Fn(f64) -> Vec<f64> + Send + Sync + 'static,
    {
        Mirror {
            position,
            coupling: Coupling::FrequencyDependent(Arc::new(coupling)),
            strength,
        }
    }

    /// A mirror whose *scaled* coupling `α̃` is held fixed at every frequency,
    /// i.e. `α_i(ω) = α̃_i / √(dk_i/dω)`.
    pub fn with_scaled_coupling(
        position: f64,
        scaled: Vec<f64>,
        channels: &ChannelSet,
        strength: Strength,
    ) -> Result<Self> {
        if scaled.len() != channels.len() {
            return invalid(format!(
                "scaled coupling has {} components for {} channels",
                scaled.len(),
                channels.len()
            ));
        }
        if scaled.iter().all(|&c| c == 0.0) {
            return invalid("scaled coupling must not vanish identically");
        }
        let channels = channels.clone();
        Ok(Mirror::frequency_dependent(
            position,
            move |omega| {
                channels
                    .channels()
                    .iter()
                    .zip(&scaled)
                    .map(|(d, &a)| a / d.group_factor(omega).sqrt())
                    .collect()
            },
            strength,
        ))
    }
}

/// `α̃ = √(dK/dω) α` and its squared norm.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledCoupling {
    pub components: Vec<f64>,
    pub norm_sq: f64,
}

/// Value of the two-body determinant and its logarithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeterminantValue {
    pub value: f64,
    pub log_value: f64,
}

pub fn scale_coupling(mirror: &Mirror, cs: &ChannelSet, omega: FrequencyPoint) -> Result<ScaledCoupling> {
    let w = omega.value();
    let alpha = mirror.coupling.at(w);
    if alpha.len() != cs.len() {
        return invalid(format!(
            "coupling has {} components for {} channels",
            alpha.len(),
            cs.len()
        ));
    }
    let components: Vec<f64> = cs
        .channels()
        .iter()
        .zip(alpha.iter())
        .map(|(d, &a)| d.group_factor(w).sqrt() * a)
        .collect();
    let norm_sq = components.iter().map(|c| c * c).sum();
    Ok(ScaledCoupling { components, norm_sq })
}

/// Denominator `|α̃|² + 2ω/λ`; zero only for a vanishing `α̃` at `λ = ∞`.
fn reflection_denominator(mirror: &Mirror, scaled: &ScaledCoupling, omega: f64) -> Result<f64> {
    let d = scaled.norm_sq + mirror.strength.damping(omega);
    if d <= 0.0 {
        return Err(CasimirError::DegenerateCoupling(format!(
            "scaled coupling vanishes at omega = {omega:e} with infinite strength"
        )));
    }
    Ok(d)
}

/// `r(iω) = -α̃ α̃ᵀ / (|α̃|² + 2ω/λ)`.
pub fn reflection_matrix(mirror: &Mirror, cs: &ChannelSet, omega: FrequencyPoint) -> Result<DMatrix<f64>> {
    let a = scale_coupling(mirror, cs, omega)?;
    let d = reflection_denominator(mirror, &a, omega.value())?;
    let v = DVector::from_vec(a.components);
    Ok(-(&v * v.transpose()) / d)
}

/// Everything needed for the determinant and its derivative at one `(ω, x)`.
struct PairTerms {
    /// `s = Σ α̃_i e^{-k_i x} β̃_i`
    overlap: f64,
    /// `Σ k_i α̃_i e^{-k_i x} β̃_i`
    weighted_overlap: f64,
    /// `D_A D_B`
    denominators: f64,
    /// `D_A D_B - s²`, assembled without cancellation.
    gap: f64,
}

fn pair_terms(a: &Mirror, b: &Mirror, cs: &ChannelSet, omega: FrequencyPoint, x: f64) -> Result<PairTerms> {
    if !(x.is_finite() && x > 0.0) {
        return invalid(format!("separation must be positive, got {x}"));
    }
    let w = omega.value();
    let sa = scale_coupling(a, cs, omega)?;
    let sb = scale_coupling(b, cs, omega)?;
    let da = reflection_denominator(a, &sa, w)?;
    let db = reflection_denominator(b, &sb, w)?;
    let (u, v) = (&sa.components, &sb.components);

    let mut overlap = 0.0;
    let mut weighted_overlap = 0.0;
    let mut dot = 0.0;
    let mut dot_minus_overlap = 0.0;
    for (i, k) in cs.wavenumbers(omega).into_iter().enumerate() {
        let uv = u[i] * v[i];
        let e = (-k * x).exp();
        overlap += uv * e;
        weighted_overlap += k * uv * e;
        dot += uv;
        dot_minus_overlap -= uv * (-k * x).exp_m1();
    }
    // Lagrange identity: |u|²|v|² - (u·v)² = Σ_{i<j} (u_i v_j - u_j v_i)²
    let mut lagrange = 0.0;
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            let c = u[i] * v[j] - u[j] * v[i];
            lagrange += c * c;
        }
    }
    let (ca, cb) = (a.strength.damping(w), b.strength.damping(w));
    let mut gap = lagrange
        + dot_minus_overlap * (dot + overlap)
        + sa.norm_sq * cb
        + ca * sb.norm_sq
        + ca * cb;
    let denominators = da * db;
    if gap <= 0.0 {
        gap = (denominators - overlap * overlap).max(f64::MIN_POSITIVE * denominators);
    }
    Ok(PairTerms {
        overlap,
        weighted_overlap,
        denominators,
        gap,
    })
}

/// `det(1 - r_A e^{-Kx} r_B e^{-Kx}) = 1 - s²/(D_A D_B)`.
pub fn pair_determinant(
    a: &Mirror,
    b: &Mirror,
    cs: &ChannelSet,
    omega: FrequencyPoint,
    x: f64,
) -> Result<DeterminantValue> {
    let t = pair_terms(a, b, cs, omega, x)?;
    let q = t.overlap * t.overlap / t.denominators;
    let (value, log_value) = if q < 0.5 {
        (1.0 - q, (-q).ln_1p())
    } else {
        (t.gap / t.denominators, t.gap.ln() - t.denominators.ln())
    };
    Ok(DeterminantValue { value, log_value })
}

/// `d/dx ln det`, using `ds/dx = -Σ k_i α̃_i e^{-k_i x} β̃_i`.
pub fn pair_determinant_dx(a: &Mirror, b: &Mirror, cs: &ChannelSet, omega: FrequencyPoint, x: f64) -> Result<f64> {
    let t = pair_terms(a, b, cs, omega, x)?;
    Ok(2.0 * t.overlap * t.weighted_overlap / t.gap)
}

/// Spectrum of `r_A r_B` with propagation removed, via the symmetric form
/// `√(-r_A) (-r_B) √(-r_A)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductEigenvalues {
    /// Ascending, clamped to `[0, 1]`.
    pub values: Vec<f64>,
    /// How many values sat within `1e-12` outside the interval and were clamped.
    pub clamped: usize,
}

const CLAMP_WINDOW: f64 = 1e-12;

pub fn product_eigenvalues(a: &Mirror, b: &Mirror, cs: &ChannelSet, omega: FrequencyPoint) -> Result<ProductEigenvalues> {
    let w = omega.value();
    let sa = scale_coupling(a, cs, omega)?;
    let sb = scale_coupling(b, cs, omega)?;
    let da = reflection_denominator(a, &sa, w)?;
    let db = reflection_denominator(b, &sb, w)?;

    let n = cs.len();
    let u = DVector::from_column_slice(&sa.components);
    let v = DVector::from_column_slice(&sb.components);
    // -r_A = u uᵀ / D_A is rank one, so its square root is u uᵀ / (|u| √D_A).
    let root = if sa.norm_sq > 0.0 {
        (&u * u.transpose()) / (sa.norm_sq.sqrt() * da.sqrt())
    } else {
        DMatrix::zeros(n, n)
    };
    let neg_rb = (&v * v.transpose()) / db;
    let m = &root * neg_rb * &root;
    let m = (&m + m.transpose()) * 0.5;

    let mut clamped = 0;
    let mut values: Vec<f64> = SymmetricEigen::new(m)
        .eigenvalues
        .iter()
        .map(|&l| {
            if l < 0.0 {
                if l < -CLAMP_WINDOW {
                    return l;
                }
                if l != 0.0 {
                    clamped += 1;
                }
                0.0
            } else if l > 1.0 && l <= 1.0 + CLAMP_WINDOW {
                clamped += 1;
                1.0
            } else {
                l
            }
        })
        .collect();
    values.sort_by(f64::total_cmp);
    Ok(ProductEigenvalues { values, clamped })
}
