//! The dilogarithm and the short-distance limit of `x·E(x)`.

use std::f64::consts::PI;

use crate::error::{invalid, CasimirError, Result};
use crate::scattering::Mirror;

/// `B_n / (n+1)!` for `n = 2, 4, ..., 30`.
const BERNOULLI: [f64; 15] = [
    2.777_777_777_777_778e-2,
    -2.777_777_777_777_778e-4,
    4.724_111_866_969_01e-6,
    -9.185_773_074_661_964e-8,
    1.897_886_998_897_1e-9,
    -4.064_761_645_144_225_5e-11,
    8.921_691_020_456_452e-13,
    -1.993_929_586_072_107_6e-14,
    4.518_980_029_619_918e-16,
    -1.035_651_761_218_124_7e-17,
    2.395_218_621_026_186_7e-19,
    -5.581_785_874_325_009e-21,
    1.309_150_755_418_321_3e-22,
    -3.087_419_802_426_740_3e-24,
    7.315_975_652_702_203e-26,
];

/// `Li₂(z) = Σ_{k≥1} z^k / k²` for real `z ∈ [-1, 1]`.
pub fn dilog(z: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&z) {
        return Err(CasimirError::Domain(z));
    }
    if z == 1.0 {
        return Ok(PI * PI / 6.0);
    }
    if z > 0.5 {
        let y = 1.0 - z;
        return Ok(PI * PI / 6.0 - z.ln() * y.ln() - bernoulli_series(y));
    }
    Ok(bernoulli_series(z))
}

/// Series in `u = -ln(1 - z)`, accurate for `z ∈ [-1, 1/2]` where `|u| ≤ ln 2`.
fn bernoulli_series(z: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    let u = -(-z).ln_1p();
    let u2 = u * u;
    let mut power = u * u2;
    let mut tail = 0.0;
    for c in BERNOULLI {
        tail += c * power;
        power *= u2;
    }
    u - 0.25 * u2 + tail
}

/// Predicted `lim_{x→0} x·E(x) = -Li₂(cos²θ)/(4π)` with `cos θ` the angle
/// between the two (frequency independent) coupling vectors.
pub fn short_distance_coefficient(a: &Mirror, b: &Mirror) -> Result<f64> {
    let (Some(alpha), Some(beta)) = (a.coupling.as_constant(), b.coupling.as_constant()) else {
        return invalid("short-distance coefficient needs frequency-independent couplings");
    };
    if alpha.len() != beta.len() {
        return invalid("coupling vectors have different lengths");
    }
    let norm_a: f64 = alpha.iter().map(|v| v * v).sum();
    let norm_b: f64 = beta.iter().map(|v| v * v).sum();
    if norm_a == 0.0 || norm_b == 0.0 {
        return Err(CasimirError::DegenerateCoupling("coupling vector is zero".into()));
    }
    let dot: f64 = alpha.iter().zip(beta).map(|(x, y)| x * y).sum();
    let cos2 = (dot * dot / (norm_a * norm_b)).min(1.0);
    Ok(-dilog(cos2)? / (4.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::Strength;
    use proptest::prelude::*;

    /// Direct power series, usable where it converges quickly.
    fn series(z: f64) -> f64 {
        let mut sum = 0.0;
        let mut power = 1.0;
        for k in 1..4000 {
            power *= z;
            sum += power / (k * k) as f64;
        }
        sum
    }

    #[test]
    fn special_values() {
        assert_eq!(dilog(0.0).unwrap(), 0.0);
        assert!((dilog(1.0).unwrap() - 1.644_934_066_848_226_4).abs() < 1e-15);
        let half = PI * PI / 12.0 - 0.5 * 2f64.ln().powi(2);
        assert!((dilog(0.5).unwrap() - half).abs() < 1e-15);
        assert!((dilog(0.5).unwrap() - 0.582_241).abs() < 1e-6);
        assert!((dilog(-1.0).unwrap() + PI * PI / 12.0).abs() < 1e-15);
        assert!(matches!(dilog(1.5), Err(CasimirError::Domain(_))));
        assert!(dilog(-1.0001).is_err());
    }

    #[test]
    fn matches_power_series() {
        for &z in &[-0.99, -0.7, -0.3, -1e-3, 1e-8, 0.2, 0.49, 0.51, 0.8, 0.9] {
            let want = series(z);
            assert!((dilog(z).unwrap() - want).abs() < 1e-14, "z={z}");
        }
    }

    #[test]
    fn near_one() {
        let z = 1.0 - 1e-12;
        let want = PI * PI / 6.0 - 1e-12 * (1.0 - (1e-12f64).ln());
        assert!((dilog(z).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn coefficient_examples() {
        let m = |c: &[f64]| Mirror::new(0.0, c.to_vec(), Strength::Infinite).unwrap();
        let c = short_distance_coefficient(&m(&[1.0, 2.0]), &m(&[2.0, 4.0])).unwrap();
        assert!((c + PI / 24.0).abs() < 1e-15);
        assert!((c + 0.130_899_7).abs() < 1e-7);
        assert_eq!(short_distance_coefficient(&m(&[1.0, 0.0]), &m(&[0.0, 3.0])).unwrap(), -0.0);
        let c = short_distance_coefficient(&m(&[1.0, 5.0]), &m(&[1.0, -5.0])).unwrap();
        assert!((c + series(576.0 / 676.0) / (4.0 * PI)).abs() < 1e-14);
    }

    #[test]
    fn frequency_dependent_coupling_is_rejected() {
        let a = Mirror::frequency_dependent(0.0, |_| vec![1.0], Strength::Infinite);
        assert!(short_distance_coefficient(&a, &a).is_err());
    }

    proptest! {
        #[test]
        fn duplication_formula(z in -1.0f64..=1.0) {
            let lhs = dilog(z).unwrap() + dilog(-z).unwrap();
            let rhs = 0.5 * dilog(z * z).unwrap();
            prop_assert!((lhs - rhs).abs() < 2e-15);
        }

        #[test]
        fn reflection_formula(z in 1e-6f64..1.0 - 1e-6) {
            let lhs = dilog(z).unwrap() + dilog(1.0 - z).unwrap();
            let rhs = PI * PI / 6.0 - z.ln() * (1.0 - z).ln();
            prop_assert!((lhs - rhs).abs() < 2e-15);
        }
    }
}
