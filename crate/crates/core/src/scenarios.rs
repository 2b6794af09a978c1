//! Named configurations used by the CLI presets, the regression suite and the
//! acceptance tests.

use crate::dispersion::ChannelSet;
use crate::error::Result;
use crate::scattering::{Mirror, Strength};
use crate::separable::{FormFactor, GreenKernel, Prefactor};

/// Two mirrors coupled to a channel set.
#[derive(Debug, Clone)]
pub struct ChannelScenario {
    pub channels: ChannelSet,
    pub a: Mirror,
    pub b: Mirror,
}

/// Two separable bodies and the kernel they interact through.
#[derive(Debug, Clone)]
pub struct SeparableScenario {
    pub a: FormFactor,
    pub b: FormFactor,
    pub kernel: GreenKernel,
}

/// One massless channel between two identical mirrors.
pub fn dirichlet(strength: Strength) -> ChannelScenario {
    ChannelScenario {
        channels: ChannelSet::from_masses(&[0.0]).expect("valid mass"),
        a: Mirror::new(0.0, vec![1.0], strength).expect("valid mirror"),
        b: Mirror::new(0.0, vec![1.0], strength).expect("valid mirror"),
    }
}

/// Masses `(1, 5)` with couplings `α = (1, 5)`, `β = (1, -5)`.
pub fn fig2(strength: Strength) -> ChannelScenario {
    ChannelScenario {
        channels: ChannelSet::from_masses(&[1.0, 5.0]).expect("valid masses"),
        a: Mirror::new(0.0, vec![1.0, 5.0], strength).expect("valid mirror"),
        b: Mirror::new(0.0, vec![1.0, -5.0], strength).expect("valid mirror"),
    }
}

/// A massless and a massive channel with frequency independent scaled
/// couplings `α̃ = (1, 1)` and `β̃ = (1, -1)`.
pub fn tuned(heavy_mass: f64, strength: Strength) -> Result<ChannelScenario> {
    let channels = ChannelSet::from_masses(&[0.0, heavy_mass])?;
    let a = Mirror::with_scaled_coupling(0.0, vec![1.0, 1.0], &channels, strength)?;
    let b = Mirror::with_scaled_coupling(0.0, vec![1.0, -1.0], &channels, strength)?;
    Ok(ChannelScenario { channels, a, b })
}

/// Weights `(1, -4)` at `(-a, -a - 0.1)` and `(1, -1)` at `(a, a + 1)` with the
/// resonant prefactor, on the smeared 3D kernel.
pub fn fig3(smear: f64) -> Result<SeparableScenario> {
    Ok(SeparableScenario {
        a: FormFactor::from_pairs(&[(1.0, 0.0), (-4.0, -0.1)], Prefactor::Resonant)?,
        b: FormFactor::from_pairs(&[(1.0, 0.0), (-1.0, 1.0)], Prefactor::Resonant)?,
        kernel: GreenKernel::point3d(smear)?,
    })
}

/// Weight scale of the weak-coupling variant of [`fig3`].
pub const FIG3_WEAK_SCALE: f64 = 1e-2;

/// [`fig3`] with every weight multiplied by [`FIG3_WEAK_SCALE`], where the
/// full determinant is dominated by its second-order term.
pub fn fig3_weak(smear: f64) -> Result<SeparableScenario> {
    let s = fig3(smear)?;
    Ok(SeparableScenario {
        a: s.a.scaled(FIG3_WEAK_SCALE),
        b: s.b.scaled(FIG3_WEAK_SCALE),
        kernel: s.kernel,
    })
}
