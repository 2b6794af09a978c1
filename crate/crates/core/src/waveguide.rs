//! Transverse modes of a circular waveguide as 1D channels.
//!
//! A cylinder of radius `R` carries channels of mass `ζ/R`, where `ζ` runs
//! over the zeros of `J_m` (TM) or the nontrivial zeros of `J_m'` (TE).
//! Modes with `m ≥ 1` are doubly degenerate and appear twice.

use serde::{Deserialize, Serialize};

use crate::dispersion::ChannelSet;
use crate::error::{invalid, CasimirError, Result};

/// Bessel function of the first kind, `J_m(x)` for `x ≥ 0`.
pub fn bessel_j(m: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    if x <= 1.0 {
        return series(m, x);
    }
    miller(m, x)
}

/// Ascending series `Σ (-1)^k (x/2)^{2k+m} / (k! (k+m)!)`.
fn series(m: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for j in 1..=m {
        term *= half / f64::from(j);
    }
    let mut sum = term;
    let q = -half * half;
    for k in 1..60 {
        term *= q / (f64::from(k) * f64::from(k + m));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Backward recurrence `J_{k-1} = (2k/x) J_k - J_{k+1}` from far above both
/// `m` and `x`, normalised with `J_0 + 2 Σ J_{2k} = 1`.
fn miller(m: u32, x: f64) -> f64 {
    let top = f64::from(m).max(x);
    let mut start = (top + 30.0 + (50.0 * top).sqrt()) as u32;
    start += start % 2;
    let (mut next, mut current) = (0.0, 1e-300);
    let mut wanted = 0.0;
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let previous = 2.0 * f64::from(k) / x * current - next;
        next = current;
        current = previous;
        if k - 1 == m {
            wanted = current;
        }
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm += 2.0 * current;
        }
        if current.abs() > 1e250 {
            current *= 1e-250;
            next *= 1e-250;
            wanted *= 1e-250;
            norm *= 1e-250;
        }
    }
    norm += current;
    wanted / norm
}

/// `J_m'(x)`.
pub fn bessel_j_prime(m: u32, x: f64) -> f64 {
    if m == 0 {
        -bessel_j(1, x)
    } else {
        0.5 * (bessel_j(m - 1, x) - bessel_j(m + 1, x))
    }
}

/// `J_m''(x)` from Bessel's equation.
fn bessel_j_second(m: u32, x: f64) -> f64 {
    let mf = f64::from(m);
    -bessel_j_prime(m, x) / x - (1.0 - mf * mf / (x * x)) * bessel_j(m, x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroKind {
    J,
    JPrime,
}

/// The `k`-th positive zero of `J_m` or `J_m'` (the root of `J_0'` at the
/// origin is not counted).
pub fn bessel_zero(m: u32, k: u32, kind: ZeroKind) -> Result<f64> {
    if k == 0 {
        return invalid("zero index k starts at 1");
    }
    let f = |x: f64| match kind {
        ZeroKind::J => bessel_j(m, x),
        ZeroKind::JPrime => bessel_j_prime(m, x),
    };
    let df = |x: f64| match kind {
        ZeroKind::J => bessel_j_prime(m, x),
        ZeroKind::JPrime => bessel_j_second(m, x),
    };
    // All zeros of J_m and J_m' (other than x = 0) lie above m; consecutive
    // zeros are about π apart, so a 0.1 step never skips a pair.
    const STEP: f64 = 0.1;
    let mut lo = f64::from(m).max(STEP);
    let mut f_lo = f(lo);
    let mut found = 0;
    loop {
        let hi = lo + STEP;
        let f_hi = f(hi);
        if f_lo == 0.0 {
            found += 1;
            if found == k {
                return Ok(lo);
            }
        } else if f_lo * f_hi < 0.0 {
            found += 1;
            if found == k {
                return refine(&f, &df, lo, hi, f_lo);
            }
        }
        lo = hi;
        f_lo = f_hi;
        if lo > 1e4 + f64::from(m) + 4.0 * f64::from(k) {
            return Err(CasimirError::BisectionNonConvergence { lo, hi });
        }
    }
}

fn refine<F, D>(f: &F, df: &D, mut lo: f64, mut hi: f64, mut f_lo: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-9 {
            break;
        }
        let f_mid = f(mid);
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    // Newton polish, kept inside the bracket.
    let mut x = 0.5 * (lo + hi);
    for _ in 0..8 {
        let step = f(x) / df(x);
        let next = x - step;
        if !(next.is_finite() && next >= lo - 1e-9 && next <= hi + 1e-9) {
            break;
        }
        x = next;
        if step.abs() <= 1e-16 * x {
            break;
        }
    }
    Ok(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarization {
    Tm,
    Te,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveguideSpec {
    pub radius: f64,
    pub max_mass: f64,
    pub polarization: Polarization,
    pub angular_orders: u32,
}

/// One transverse mode; `degeneracy` is 2 for `m ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveguideMode {
    pub m: u32,
    pub k: u32,
    pub kind: ZeroKind,
    pub zero: f64,
    pub mass: f64,
    pub degeneracy: u32,
}

/// All modes with mass at most `max_mass`, sorted by mass.
pub fn modes(spec: &WaveguideSpec) -> Result<Vec<WaveguideMode>> {
    if !(spec.radius.is_finite() && spec.radius > 0.0) {
        return invalid(format!("radius must be positive, got {}", spec.radius));
    }
    if !(spec.max_mass.is_finite() && spec.max_mass > 0.0) {
        return invalid(format!("max_mass must be positive, got {}", spec.max_mass));
    }
    let kinds: &[ZeroKind] = match spec.polarization {
        Polarization::Tm => &[ZeroKind::J],
        Polarization::Te => &[ZeroKind::JPrime],
        Polarization::Both => &[ZeroKind::J, ZeroKind::JPrime],
    };
    let mut out = Vec::new();
    for m in 0..=spec.angular_orders {
        for &kind in kinds {
            for k in 1.. {
                let zero = bessel_zero(m, k, kind)?;
                let mass = zero / spec.radius;
                if mass > spec.max_mass {
                    break;
                }
                out.push(WaveguideMode {
                    m,
                    k,
                    kind,
                    zero,
                    mass,
                    degeneracy: if m == 0 { 1 } else { 2 },
                });
            }
        }
    }
    out.sort_by(|a, b| a.mass.total_cmp(&b.mass));
    Ok(out)
}

/// Channel masses `ζ/R` below the cutoff, degenerate modes repeated.
pub fn channelize(spec: &WaveguideSpec) -> Result<ChannelSet> {
    let masses: Vec<f64> = modes(spec)?
        .iter()
        .flat_map(|mode| std::iter::repeat_n(mode.mass, mode.degeneracy as usize))
        .collect();
    if masses.is_empty() {
        return Err(CasimirError::EmptyChannelSet(spec.max_mass));
    }
    ChannelSet::from_masses(&masses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// `J_m(x) = (1/π) ∫₀^π cos(mτ - x sin τ) dτ`; the integrand is smooth and
    /// periodic, so the trapezoidal rule converges geometrically.
    fn integral_j(m: u32, x: f64) -> f64 {
        let n = 400;
        let h = PI / n as f64;
        let mut sum = 0.5 * (1.0 + (f64::from(m) * PI).cos());
        for i in 1..n {
            let t = i as f64 * h;
            sum += (f64::from(m) * t - x * t.sin()).cos();
        }
        sum * h / PI
    }

    #[test]
    fn values_match_integral_representation() {
        for m in 0..6 {
            for &x in &[0.01, 0.5, 1.0, 1.5, 3.0, 7.3, 12.0, 25.0, 40.0] {
                let a = bessel_j(m, x);
                let b = integral_j(m, x);
                assert!((a - b).abs() < 1e-14, "m={m} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn known_zeros() {
        let z01 = bessel_zero(0, 1, ZeroKind::J).unwrap();
        let z11 = bessel_zero(1, 1, ZeroKind::J).unwrap();
        let z02 = bessel_zero(0, 2, ZeroKind::J).unwrap();
        assert!((z01 - 2.404_825_557_695_773).abs() < 1e-12);
        assert!((z11 - 3.831_705_970_207_512).abs() < 1e-12);
        assert!(z01 < z11 && z11 < z02);
        // the first nontrivial zero of J_0' is the first zero of J_1
        assert!((bessel_zero(0, 1, ZeroKind::JPrime).unwrap() - z11).abs() < 1e-12);
        assert!((bessel_zero(1, 1, ZeroKind::JPrime).unwrap() - 1.841_183_781_340_659).abs() < 1e-12);
        assert!(bessel_zero(0, 0, ZeroKind::J).is_err());
    }

    #[test]
    fn residuals() {
        for m in 0..8 {
            for k in 1..6 {
                let z = bessel_zero(m, k, ZeroKind::J).unwrap();
                assert!(bessel_j(m, z).abs() <= 1e-11);
                let z = bessel_zero(m, k, ZeroKind::JPrime).unwrap();
                assert!(bessel_j_prime(m, z).abs() <= 1e-11);
            }
        }
    }

    #[test]
    fn channelize_examples() {
        let spec = WaveguideSpec {
            radius: 1.0,
            max_mass: 3.0,
            polarization: Polarization::Tm,
            angular_orders: 0,
        };
        let cs = channelize(&spec).unwrap();
        assert_eq!(cs.len(), 1);
        assert!((cs.masses().unwrap()[0] - 2.404826).abs() < 1e-6);

        let doubled = channelize(&WaveguideSpec { radius: 2.0, ..spec }).unwrap();
        assert_eq!(doubled.masses().unwrap()[0], cs.masses().unwrap()[0] / 2.0);

        let empty = channelize(&WaveguideSpec { max_mass: 2.0, ..spec });
        assert!(matches!(empty, Err(CasimirError::EmptyChannelSet(_))));
    }

    #[test]
    fn degeneracy_and_order() {
        let spec = WaveguideSpec {
            radius: 1.0,
            max_mass: 4.0,
            polarization: Polarization::Both,
            angular_orders: 3,
        };
        let masses = channelize(&spec).unwrap().masses().unwrap();
        // TE11 (x2), TM01, TE21 (x2), TE01 and TM11 (x2) at 3.8317
        assert_eq!(masses.len(), 8);
        assert!(masses.windows(2).all(|p| p[0] <= p[1]));
        assert_eq!(masses[0], masses[1]);
    }

    #[test]
    fn count_is_monotone() {
        let mut last = 0;
        for cutoff in [2.5, 4.0, 6.0, 9.0, 14.0] {
            let spec = WaveguideSpec {
                radius: 1.0,
                max_mass: cutoff,
                polarization: Polarization::Both,
                angular_orders: 6,
            };
            let n = channelize(&spec).unwrap().len();
            assert!(n >= last);
            last = n;
        }
    }
}
