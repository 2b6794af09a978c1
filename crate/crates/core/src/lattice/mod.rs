//! Brute-force zero-point energies of a discretised multi-channel field.
//!
//! The field lives on sites `x_j = j h`, `j = 1..=N`, between fixed walls at
//! `0` and `(N + 1) h`. The Hamiltonian is the three-point Laplacian plus
//! `m_c²` on each channel, plus `(λ/h) α αᵀ` on the site nearest to each
//! mirror. Index `j·n + c` makes it a band matrix of half-bandwidth `n`, so
//! the spectrum comes from a band eigensolver rather than a dense one.
//!
//! Interaction energies are differences of `½ Σ √μ` between two placements
//! of the same pair of mirrors, which cancels every cutoff-dependent
//! self-energy.

mod eigen;

use serde::Serialize;

use crate::channel_energy::energy;
use crate::dispersion::ChannelSet;
use crate::error::{invalid, CasimirError, Result};
use crate::parallel::Execution;
use crate::quadrature::QuadratureSpec;
use crate::scattering::{Mirror, Strength};

pub use eigen::{band_eigenvalues, tridiagonal_eigenvalues, BandMatrix};

pub const MIN_SITES: usize = 100;
/// Largest allowed matrix dimension `n·N`.
pub const MAX_DIMENSION: usize = 20_000;
pub const WALL_MARGIN: usize = 20;
/// Oracle rows differing from the determinant result by more than this are flagged.
pub const ORACLE_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatticeSpec {
    pub sites: usize,
    pub spacing: f64,
}

impl LatticeSpec {
    pub fn new(sites: usize, spacing: f64) -> Result<Self> {
        if sites < MIN_SITES {
            return precondition(format!("sites: need at least {MIN_SITES}, got {sites}"));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return precondition(format!("spacing: must be positive, got {spacing}"));
        }
        Ok(LatticeSpec { sites, spacing })
    }

    /// Spec with `N` chosen so the box `(N + 1) h` is `length` rounded to a site.
    pub fn with_box(length: f64, spacing: f64) -> Result<Self> {
        let sites = (length / spacing).round() as usize;
        LatticeSpec::new(sites.saturating_sub(1), spacing)
    }

    pub fn box_length(&self) -> f64 {
        (self.sites + 1) as f64 * self.spacing
    }
}

fn precondition<T>(msg: String) -> Result<T> {
    Err(CasimirError::LatticePrecondition(msg))
}

/// A mirror reduced to what the lattice needs.
struct SiteMirror {
    site: usize,
    coupling: Vec<f64>,
    lambda: f64,
}

fn lattice_masses(cs: &ChannelSet) -> Result<Vec<f64>> {
    cs.masses()
        .ok_or_else(|| CasimirError::LatticePrecondition("channels: custom dispersions are not supported".into()))
}

fn site_mirror(m: &Mirror, site: usize, n: usize) -> Result<SiteMirror> {
    let lambda = match m.strength {
        Strength::Finite(l) => l,
        Strength::Infinite => return precondition("strength: the lattice needs finite λ".into()),
    };
    let Some(coupling) = m.coupling.as_constant() else {
        return precondition("coupling: the lattice needs frequency-independent couplings".into());
    };
    if coupling.len() != n {
        return invalid(format!("coupling has {} components for {n} channels", coupling.len()));
    }
    Ok(SiteMirror {
        site,
        coupling: coupling.to_vec(),
        lambda,
    })
}

fn check_site(spec: &LatticeSpec, site: usize) -> Result<()> {
    if site < WALL_MARGIN || site + WALL_MARGIN > spec.sites + 1 {
        return precondition(format!(
            "mirror position: site {site} is closer than {WALL_MARGIN} sites to a wall of a {}-site box",
            spec.sites
        ));
    }
    Ok(())
}

fn hamiltonian(spec: &LatticeSpec, masses: &[f64], mirrors: &[SiteMirror]) -> BandMatrix {
    let n = masses.len();
    let h = spec.spacing;
    let mut band = BandMatrix::zeros(spec.sites * n, n);
    for j in 0..spec.sites {
        for (c, m) in masses.iter().enumerate() {
            let i = j * n + c;
            band.set(i, i, 2.0 / (h * h) + m * m);
            if j > 0 {
                band.set(i, i - n, -1.0 / (h * h));
            }
        }
    }
    for mirror in mirrors {
        let base = (mirror.site - 1) * n;
        for c in 0..n {
            for d in 0..=c {
                let v = mirror.lambda / h * mirror.coupling[c] * mirror.coupling[d];
                band.add(base + c, base + d, v);
            }
        }
    }
    band
}

fn zero_point_from_sites(spec: &LatticeSpec, masses: &[f64], mirrors: &[SiteMirror]) -> Result<f64> {
    let dim = spec.sites * masses.len();
    if dim > MAX_DIMENSION {
        return precondition(format!(
            "size: n·N = {dim} exceeds the limit of {MAX_DIMENSION}"
        ));
    }
    let eigenvalues = band_eigenvalues(hamiltonian(spec, masses, mirrors))?;
    let largest = eigenvalues.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let smallest = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if smallest < -1e-12 * largest {
        return Err(CasimirError::IndefiniteMatrix(smallest));
    }
    let mut sorted: Vec<f64> = eigenvalues.into_iter().map(|v| v.max(0.0).sqrt()).collect();
    sorted.sort_by(f64::total_cmp);
    Ok(0.5 * neumaier_sum(&sorted))
}

fn neumaier_sum(values: &[f64]) -> f64 {
    let (mut sum, mut compensation) = (0.0f64, 0.0f64);
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            compensation += (sum - t) + v;
        } else {
            compensation += (v - t) + sum;
        }
        sum = t;
    }
    sum + compensation
}

/// `½ Σ √μ` over the spectrum of the lattice Hamiltonian. Each mirror sits on
/// the site nearest to its `position`.
pub fn zero_point_energy(spec: &LatticeSpec, cs: &ChannelSet, mirrors: &[Mirror]) -> Result<f64> {
    let masses = lattice_masses(cs)?;
    let sites = mirrors
        .iter()
        .map(|m| {
            let site = (m.position / spec.spacing).round();
            if !(site >= 1.0 && site <= spec.sites as f64) {
                return precondition(format!("mirror position: {} lies outside the box", m.position));
            }
            check_site(spec, site as usize)?;
            site_mirror(m, site as usize, masses.len())
        })
        .collect::<Result<Vec<_>>>()?;
    zero_point_from_sites(spec, &masses, &sites)
}

/// Separation expressed in sites; it must be a whole number of spacings.
fn separation_in_sites(spec: &LatticeSpec, x: f64, name: &str) -> Result<usize> {
    let steps = x / spec.spacing;
    let rounded = steps.round();
    if !(x > 0.0) || rounded < 1.0 || (steps - rounded).abs() > 1e-6 {
        return precondition(format!(
            "{name}: {x} is not a positive multiple of the spacing {}",
            spec.spacing
        ));
    }
    Ok(rounded as usize)
}

/// A pair placed `steps` sites apart, centred in the box.
fn centred_pair(spec: &LatticeSpec, a: &Mirror, b: &Mirror, steps: usize, n: usize) -> Result<[SiteMirror; 2]> {
    let first = (spec.sites + 1).saturating_sub(steps) / 2;
    let second = first + steps;
    check_site(spec, first)?;
    check_site(spec, second)?;
    Ok([site_mirror(a, first, n)?, site_mirror(b, second, n)?])
}

fn check_pair_preconditions(spec: &LatticeSpec, masses: &[f64], x: f64, x_ref: f64) -> Result<()> {
    let box_length = spec.box_length();
    if box_length < 10.0 * x {
        return precondition(format!(
            "box: length {box_length} is less than 10x the separation {x}"
        ));
    }
    let heaviest = masses.iter().copied().fold(0.0f64, f64::max);
    let mut shortest = x;
    if heaviest > 0.0 {
        shortest = shortest.min(1.0 / heaviest);
    }
    if spec.spacing > 0.02 * shortest * (1.0 + 1e-9) {
        return precondition(format!(
            "spacing: h = {} exceeds 0.02x the shortest length scale {shortest}",
            spec.spacing
        ));
    }
    let lightest = masses.iter().copied().fold(f64::INFINITY, f64::min);
    if lightest > 0.0 {
        if x_ref < 5.0 / lightest {
            return precondition(format!(
                "x_ref: {x_ref} is below 5x the longest decay length {}",
                1.0 / lightest
            ));
        }
    } else if x_ref < x {
        return precondition(format!("x_ref: {x_ref} is below the separation {x}"));
    }
    Ok(())
}

/// `E₀(x) - E₀(x_ref)` for the pair centred in the box at the two separations.
pub fn interaction_energy(
    spec: &LatticeSpec,
    cs: &ChannelSet,
    a: &Mirror,
    b: &Mirror,
    x: f64,
    x_ref: f64,
) -> Result<f64> {
    let masses = lattice_masses(cs)?;
    check_pair_preconditions(spec, &masses, x, x_ref)?;
    let steps = separation_in_sites(spec, x, "separation")?;
    let ref_steps = separation_in_sites(spec, x_ref, "x_ref")?;
    let near = centred_pair(spec, a, b, steps, masses.len())?;
    let far = centred_pair(spec, a, b, ref_steps, masses.len())?;
    if steps == ref_steps {
        return Ok(0.0);
    }
    Ok(zero_point_from_sites(spec, &masses, &near)? - zero_point_from_sites(spec, &masses, &far)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleRow {
    pub x: f64,
    /// `E(x) - E(x_ref)` from the determinant formula.
    pub determinant: f64,
    pub lattice: f64,
    pub relative_difference: f64,
    /// Set when the difference exceeds [`ORACLE_TOLERANCE`].
    pub flagged: bool,
}

/// Lattice interaction energies at each separation against the determinant
/// result `E(x) - E(x_ref)` at the same finite strengths.
#[allow(clippy::too_many_arguments)]
pub fn compare_with_continuum(
    spec: &LatticeSpec,
    cs: &ChannelSet,
    a: &Mirror,
    b: &Mirror,
    separations: &[f64],
    x_ref: f64,
    quadrature: &QuadratureSpec,
    exec: Execution,
) -> Result<Vec<OracleRow>> {
    let masses = lattice_masses(cs)?;
    let ref_steps = separation_in_sites(spec, x_ref, "x_ref")?;
    let mut placements = Vec::with_capacity(separations.len());
    for &x in separations {
        check_pair_preconditions(spec, &masses, x, x_ref)?;
        placements.push(separation_in_sites(spec, x, "separation")?);
    }
    let continuum_ref = energy(a, b, cs, x_ref, quadrature)?.value;
    let reference = {
        let far = centred_pair(spec, a, b, ref_steps, masses.len())?;
        zero_point_from_sites(spec, &masses, &far)?
    };
    let rows = exec.map(&placements.iter().zip(separations).collect::<Vec<_>>(), |&(&steps, &x)| {
        let near = centred_pair(spec, a, b, steps, masses.len())?;
        let lattice = zero_point_from_sites(spec, &masses, &near)? - reference;
        let determinant = energy(a, b, cs, x, quadrature)?.value - continuum_ref;
        let relative_difference = (lattice - determinant).abs() / determinant.abs();
        Ok(OracleRow {
            x,
            determinant,
            lattice,
            relative_difference,
            flagged: !(relative_difference <= ORACLE_TOLERANCE),
        })
    });
    rows.into_iter().collect()
}
