//! The brute-force lattice against the determinant formula on random
//! two-mirror configurations with finite strengths.

use casimir_core::dispersion::ChannelSet;
use casimir_core::lattice::{compare_with_continuum, LatticeSpec, ORACLE_TOLERANCE};
use casimir_core::quadrature::QuadratureSpec;
use casimir_core::scattering::{Mirror, Strength};
use casimir_core::Execution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn coupling(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let v: f64 = rng.gen_range(0.3..1.5);
            if rng.gen_bool(0.5) {
                v
            } else {
                -v
            }
        })
        .collect()
}

#[test]
fn random_pairs_agree_with_determinant() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    // masses in [1, 2] keep x_ref = 5 beyond five decay lengths and h = x/50
    let spec = LatticeSpec::with_box(20.0, 0.01).unwrap();
    let q = QuadratureSpec::default();
    for case in 0..5 {
        let n = 1 + case % 2;
        let masses: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..2.0)).collect();
        let cs = ChannelSet::from_masses(&masses).unwrap();
        let a = Mirror::new(0.0, coupling(&mut rng, n), Strength::Finite(rng.gen_range(10.0..100.0))).unwrap();
        let b = Mirror::new(0.0, coupling(&mut rng, n), Strength::Finite(rng.gen_range(10.0..100.0))).unwrap();
        let rows = compare_with_continuum(&spec, &cs, &a, &b, &[0.5], 5.0, &q, Execution::Sequential).unwrap();
        let row = rows[0];
        assert!(
            row.relative_difference <= ORACLE_TOLERANCE,
            "case {case}: masses {masses:?}, {a:?}, {b:?}: {row:?}"
        );
        assert!(row.lattice < 0.0, "case {case}: {row:?}");
    }
}
