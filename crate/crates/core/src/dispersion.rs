//! Channels, dispersion relations and the diagonal propagation kernel.

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};

/// A scalar function of the imaginary frequency.
pub type FrequencyFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Dispersion relation `k(ω)` of one channel on the imaginary frequency axis.
#[derive(Clone)]
pub enum Dispersion {
    /// `k(ω) = √(ω² + m²)`.
    Massive { mass: f64 },
    /// User supplied `k(ω)` together with its exact derivative `dk/dω`.
    Custom {
        wavenumber: FrequencyFn,
        group_factor: FrequencyFn,
    },
}

impl Dispersion {
    pub fn massive(mass: f64) -> Result<Self> {
        if !(mass.is_finite() && mass >= 0.0) {
            return invalid(format!("channel mass must be finite and non-negative, got {mass}"));
        }
        Ok(Dispersion::Massive { mass })
    }

    pub fn massless() -> Self {
        Dispersion::Massive { mass: 0.0 }
    }

    /// Custom dispersion. `dk_domega` must be the exact derivative of `k`;
    /// it is never approximated numerically.
    pub fn custom<K, D>(k: K, dk_domega: D) -> Self
    where
        K: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Dispersion::Custom {
            wavenumber: Arc::new(k),
            group_factor: Arc::new(dk_domega),
        }
    }

    pub fn wavenumber(&self, omega: f64) -> f64 {
        match self {
            Dispersion::Massive { mass } => omega.hypot(*mass),
            Dispersion::Custom { wavenumber, .. } => wavenumber(omega),
        }
    }

    /// `dk/dω`, which equals `ω/k` for a massive channel.
    pub fn group_factor(&self, omega: f64) -> f64 {
        match self {
            Dispersion::Massive { mass } => {
                if *mass == 0.0 {
                    1.0
                } else {
                    omega / omega.hypot(*mass)
                }
            }
            Dispersion::Custom { group_factor, .. } => group_factor(omega),
        }
    }

    pub fn mass(&self) -> Option<f64> {
        match self {
            Dispersion::Massive { mass } => Some(*mass),
            Dispersion::Custom { .. } => None,
        }
    }
}

impl fmt::Debug for Dispersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dispersion::Massive { mass } => f.debug_struct("Massive").field("mass", mass).finish(),
            Dispersion::Custom { .. } => f.write_str("Custom"),
        }
    }
}

/// An ordered, non-empty list of channels.
#[derive(Debug, Clone)]
pub struct ChannelSet {
    channels: Vec<Dispersion>,
}

impl ChannelSet {
    pub fn new(channels: Vec<Dispersion>) -> Result<Self> {
        if channels.is_empty() {
            return invalid("a channel set needs at least one channel");
        }
        Ok(ChannelSet { channels })
    }

    pub fn from_masses(masses: &[f64]) -> Result<Self> {
        let channels = masses
            .iter()
            .map(|&m| Dispersion::massive(m))
            .collect::<Result<Vec<_>>>()?;
        ChannelSet::new(channels)
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn channels(&self) -> &[Dispersion] {
        &self.channels
    }

    /// All channel masses, or `None` when a custom dispersion is present.
    pub fn masses(&self) -> Option<Vec<f64>> {
        self.channels.iter().map(Dispersion::mass).collect()
    }

    /// `k_i(ω)` for every channel.
    pub fn wavenumbers(&self, omega: FrequencyPoint) -> Vec<f64> {
        self.channels
            .iter()
            .map(|d| d.wavenumber(omega.value()))
            .collect()
    }

    /// Diagonal of `exp(-K x)`. Each entry lies in `(0, 1]` (it may
    /// underflow to zero for very large `k x`) and equals one at `x = 0`.
    pub fn propagation_kernel(&self, omega: FrequencyPoint, x: f64) -> Result<Vec<f64>> {
        if !(x.is_finite() && x >= 0.0) {
            return invalid(format!("separation must be finite and non-negative, got {x}"));
        }
        Ok(self
            .wavenumbers(omega)
            .into_iter()
            .map(|k| (-k * x).exp())
            .collect())
    }
}

/// A strictly positive imaginary frequency.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FrequencyPoint(f64);

impl FrequencyPoint {
    pub fn new(omega: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return invalid(format!("frequency must be finite and positive, got {omega}"));
        }
        Ok(FrequencyPoint(omega))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}
