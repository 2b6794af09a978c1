//! JSON run configuration shared by presets and user files.

use std::path::Path;

use casimir_core::grid::{grid, Spacing};
use casimir_core::quadrature::QuadratureSpec;
use casimir_core::scattering::{Mirror, Strength};
use casimir_core::dispersion::ChannelSet;
use casimir_core::lattice::LatticeSpec;
use casimir_core::separable::{FormFactor, GreenKernel, Prefactor, SourcePoint};
use casimir_core::waveguide::{channelize, Polarization, WaveguideSpec};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    #[serde(default = "default_spacing")]
    pub spacing: Spacing,
}

fn default_spacing() -> Spacing {
    Spacing::Log
}

impl GridConfig {
    pub fn points(&self) -> Result<Vec<f64>, CliError> {
        grid(self.lo, self.hi, self.count, self.spacing).map_err(|e| CliError::input("grid", e))
    }
}

impl std::str::FromStr for GridConfig {
    type Err = CliError;

    /// `LO:HI:N` or `LO:HI:N:log|linear`.
    fn from_str(s: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(CliError::input("grid", format!("expected LO:HI:N[:log|linear], got {s:?}")));
        }
        let num = |i: usize, name: &str| -> Result<f64, CliError> {
            parts[i]
                .parse()
                .map_err(|_| CliError::input("grid", format!("{name} is not a number: {:?}", parts[i])))
        };
        let count = parts[2]
            .parse()
            .map_err(|_| CliError::input("grid", format!("N is not a count: {:?}", parts[2])))?;
        let spacing = match parts.get(3).copied() {
            None | Some("log") => Spacing::Log,
            Some("linear") => Spacing::Linear,
            Some(other) => return Err(CliError::input("grid", format!("unknown spacing {other:?}"))),
        };
        Ok(GridConfig {
            lo: num(0, "LO")?,
            hi: num(1, "HI")?,
            count,
            spacing,
        })
    }
}

/// A number, or the string `"inf"` for the perfectly reflecting limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StrengthConfig {
    Finite(f64),
    Named(String),
}

impl StrengthConfig {
    fn resolve(&self, field: &str) -> Result<Strength, CliError> {
        match self {
            StrengthConfig::Finite(v) => Strength::finite(*v).map_err(|e| CliError::input(field, e)),
            StrengthConfig::Named(s) if s == "inf" => Ok(Strength::Infinite),
            StrengthConfig::Named(s) => Err(CliError::input(field, format!("expected a number or \"inf\", got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingConfig {
    /// Frequency-independent scaled couplings `α̃_i`.
    Scaled(Vec<f64>),
    /// The same bare coupling on every channel.
    Uniform(f64),
    /// Bare couplings `α_i`, one per channel.
    #[serde(untagged)]
    Bare(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MirrorConfig {
    pub coupling: CouplingConfig,
    pub strength: StrengthConfig,
}

impl MirrorConfig {
    fn build(&self, cs: &ChannelSet, field: &str) -> Result<Mirror, CliError> {
        let strength = self.strength.resolve(&format!("{field}.strength"))?;
        let coupling_field = format!("{field}.coupling");
        let mirror = match &self.coupling {
            CouplingConfig::Bare(v) => Mirror::new(0.0, v.clone(), strength),
            CouplingConfig::Uniform(v) => Mirror::new(0.0, vec![*v; cs.len()], strength),
            CouplingConfig::Scaled(v) => Mirror::with_scaled_coupling(0.0, v.clone(), cs, strength),
        }
        .map_err(|e| CliError::input(&coupling_field, e))?;
        if let Some(c) = mirror.coupling.as_constant() {
            if c.len() != cs.len() {
                return Err(CliError::input(
                    &coupling_field,
                    format!("has {} entries for {} channels", c.len(), cs.len()),
                ));
            }
        }
        Ok(mirror)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointConfig {
    pub weight: f64,
    /// Position relative to the body's reference point.
    #[serde(alias = "position")]
    pub offset: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrefactorConfig {
    Unit,
    Resonant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormFactorConfig {
    pub points: Vec<PointConfig>,
    #[serde(default = "default_prefactor")]
    pub prefactor: PrefactorConfig,
}

fn default_prefactor() -> PrefactorConfig {
    PrefactorConfig::Resonant
}

impl FormFactorConfig {
    fn build(&self, field: &str) -> Result<FormFactor, CliError> {
        let points = self
            .points
            .iter()
            .map(|p| SourcePoint {
                weight: p.weight,
                position: p.offset,
            })
            .collect();
        let prefactor = match self.prefactor {
            PrefactorConfig::Unit => Prefactor::Unit,
            PrefactorConfig::Resonant => Prefactor::Resonant,
        };
        FormFactor::new(points, prefactor).map_err(|e| CliError::input(&format!("{field}.points"), e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveguideConfig {
    pub radius: f64,
    pub max_mass: f64,
    #[serde(default = "default_polarization")]
    pub polarization: Polarization,
    #[serde(default = "default_orders")]
    pub angular_orders: u32,
}

fn default_polarization() -> Polarization {
    Polarization::Both
}

fn default_orders() -> u32 {
    8
}

impl WaveguideConfig {
    pub fn spec(&self) -> WaveguideSpec {
        WaveguideSpec {
            radius: self.radius,
            max_mass: self.max_mass,
            polarization: self.polarization,
            angular_orders: self.angular_orders,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    pub box_length: f64,
    pub spacing: f64,
    pub separations: Vec<f64>,
    pub x_ref: f64,
    /// Also run at half the spacing and report the change.
    #[serde(default)]
    pub refine: bool,
}

impl OracleConfig {
    pub fn lattice(&self, spacing: f64) -> Result<LatticeSpec, CliError> {
        LatticeSpec::with_box(self.box_length, spacing).map_err(|e| CliError::input("oracle", e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum RunConfig {
    Channels {
        /// Channel masses.
        channels: Vec<f64>,
        a: MirrorConfig,
        b: MirrorConfig,
        grid: GridConfig,
        #[serde(default)]
        quadrature: QuadratureSpec,
        #[serde(default)]
        oracle: Option<OracleConfig>,
    },
    Separable {
        kernel: GreenKernel,
        a: FormFactorConfig,
        b: FormFactorConfig,
        grid: GridConfig,
        #[serde(default)]
        quadrature: QuadratureSpec,
    },
    Waveguide {
        waveguide: WaveguideConfig,
        #[serde(default)]
        a: Option<MirrorConfig>,
        #[serde(default)]
        b: Option<MirrorConfig>,
        #[serde(default)]
        grid: Option<GridConfig>,
        #[serde(default)]
        quadrature: QuadratureSpec,
    },
}

impl RunConfig {
    pub fn model(&self) -> &'static str {
        match self {
            RunConfig::Channels { .. } => "channels",
            RunConfig::Separable { .. } => "separable",
            RunConfig::Waveguide { .. } => "waveguide",
        }
    }

    pub fn from_json(text: &str, source: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::input("config", format!("{source}: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input("config", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn grid_mut(&mut self) -> Option<&mut GridConfig> {
        match self {
            RunConfig::Channels { grid, .. } | RunConfig::Separable { grid, .. } => Some(grid),
            RunConfig::Waveguide { grid, .. } => grid.as_mut(),
        }
    }

    pub fn set_grid(&mut self, new: GridConfig) {
        match self {
            RunConfig::Channels { grid, .. } | RunConfig::Separable { grid, .. } => *grid = new,
            RunConfig::Waveguide { grid, .. } => *grid = Some(new),
        }
    }

    pub fn quadrature_mut(&mut self) -> &mut QuadratureSpec {
        match self {
            RunConfig::Channels { quadrature, .. }
            | RunConfig::Separable { quadrature, .. }
            | RunConfig::Waveguide { quadrature, .. } => quadrature,
        }
    }
}

/// Two mirrors on a channel set, resolved from a channels or waveguide config.
pub struct ChannelSetup {
    pub channels: ChannelSet,
    pub a: Mirror,
    pub b: Mirror,
}

pub fn channel_setup(channels: &ChannelSet, a: &MirrorConfig, b: &MirrorConfig) -> Result<ChannelSetup, CliError> {
    Ok(ChannelSetup {
        channels: channels.clone(),
        a: a.build(channels, "a")?,
        b: b.build(channels, "b")?,
    })
}

pub fn channels_from_masses(masses: &[f64]) -> Result<ChannelSet, CliError> {
    ChannelSet::from_masses(masses).map_err(|e| CliError::input("channels", e))
}

pub fn channels_from_waveguide(w: &WaveguideConfig) -> Result<ChannelSet, CliError> {
    channelize(&w.spec()).map_err(|e| CliError::input("waveguide", e))
}

pub fn separable_bodies(a: &FormFactorConfig, b: &FormFactorConfig) -> Result<(FormFactor, FormFactor), CliError> {
    Ok((a.build("a")?, b.build("b")?))
}

pub const PRESETS: &[(&str, &str)] = &[
    ("dirichlet", include_str!("../presets/dirichlet.json")),
    ("dirichlet-lambda50", include_str!("../presets/dirichlet-lambda50.json")),
    ("fig2", include_str!("../presets/fig2.json")),
    ("fig2-lambda50", include_str!("../presets/fig2-lambda50.json")),
    ("tuned", include_str!("../presets/tuned.json")),
    ("fig3", include_str!("../presets/fig3.json")),
    ("fig3-weak", include_str!("../presets/fig3-weak.json")),
    ("waveguide", include_str!("../presets/waveguide.json")),
];

pub fn preset(name: &str) -> Result<RunConfig, CliError> {
    let (_, text) = PRESETS.iter().find(|(n, _)| *n == name).ok_or_else(|| {
        let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
        CliError::input("preset", format!("unknown preset {name:?}; available: {}", names.join(", ")))
    })?;
    RunConfig::from_json(text, &format!("preset {name}"))
}
