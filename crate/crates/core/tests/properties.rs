use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sphere_spd::battery::{random_support, BatteryShape};
use sphere_spd::certify::{certify_circle, certify_circle_sphere, certify_sphere, Certificate, Verdict};
use sphere_spd::geometry::sample_config;
use sphere_spd::gram::{gram_matrix, gram_matrix_with, per_degree_forms, witness_parity_sphere, witness_product, SearchOptions};
use sphere_spd::kernels::{CoefficientScheme, KernelSpec, KernelSupport, SpaceDescriptor, Truncation};
use sphere_spd::par::Execution;
use sphere_spd::supportsets::{prog, SupportSet1D, SupportSet2D};

fn small_spec(support: SupportSet2D, m: usize) -> KernelSpec {
    KernelSpec::new(
        SpaceDescriptor::CircleSphere { m },
        KernelSupport::Product(support),
        CoefficientScheme::default(),
        Truncation { kmax: 20, lmax: 20 },
    )
    .unwrap()
}

fn seeded_support(seed: u64) -> SupportSet2D {
    random_support(&mut ChaCha8Rng::seed_from_u64(seed), &BatteryShape::default())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn layers_decompose_the_quadratic_form(seed in 0u64..10_000, n in 2usize..12, m in 2usize..5) {
        let spec = small_spec(seeded_support(seed), m);
        let points = sample_config(m, n, n, seed).unwrap().zipped();
        let c: Vec<f64> = (0..n).map(|i| ((seed as f64 + 1.3) * (i as f64 + 0.7)).sin()).collect();
        let forms = per_degree_forms(&spec, &points, &c).unwrap();
        let direct = gram_matrix(&spec, &points).unwrap().quadratic_form(&c);
        let scale = forms.scale.max(1.0);
        prop_assert!((forms.total - direct).abs() <= 1e-11 * scale);
        for layer in &forms.layers {
            prop_assert!(*layer >= -1e-12 * scale);
        }
    }

    #[test]
    fn marginals_reconstruct_the_kernel(seed in 0u64..10_000, ti in 0usize..21, si in 0usize..21) {
        let spec = small_spec(seeded_support(seed), 3);
        let (t, s) = (-1.0 + ti as f64 / 10.0, -1.0 + si as f64 / 10.0);
        let fam = spec.space().sphere_family().unwrap();
        let ps = fam.eval_all(20, s).unwrap();
        let recon: f64 = spec.marginals(t).unwrap().iter().zip(&ps).map(|(a, b)| a * b).sum();
        prop_assert!((recon - spec.eval(t, s).unwrap()).abs() <= 1e-12 * spec.value_at_one().max(1.0));
    }

    #[test]
    fn gram_is_independent_of_execution_mode(seed in 0u64..10_000) {
        let spec = small_spec(seeded_support(seed), 2);
        let points = sample_config(2, 15, 15, seed).unwrap().zipped();
        let a = gram_matrix_with(&spec, &points, Execution::Sequential).unwrap();
        let b = gram_matrix_with(&spec, &points, Execution::Parallel).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn gamma_zero_failures_have_vanishing_witnesses(seed in 0u64..10_000) {
        let support = seeded_support(seed);
        let cert = certify_circle_sphere(&support, 2).unwrap();
        if let Some((0, _, _)) = cert.failing_tail() {
            let spec = small_spec(support, 2);
            let w = witness_product(&spec, &cert, &SearchOptions::default()).unwrap();
            prop_assert!(w.vanishes_within(1e-10));
            prop_assert!(w.coefficient_norm() >= 1.0);
        }
    }

    #[test]
    fn certificates_round_trip_through_json(seed in 0u64..10_000) {
        let cert = certify_circle_sphere(&seeded_support(seed), 3).unwrap();
        let json = serde_json::to_string(&cert).unwrap();
        let back: Certificate = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, cert);
    }
}

#[test]
fn section_spd_in_every_row_transfers_to_the_product() {
    // every section full: positivity transfers regardless of the sphere dimension
    for m in 2..6 {
        let cert = certify_circle_sphere(&SupportSet2D::product(prog(0, 1), prog(0, 1)), m).unwrap();
        assert_eq!(cert.verdict, Verdict::Spd);
    }
}

#[test]
fn single_factor_certifiers_match_their_witnesses() {
    let evens = SupportSet1D::new(vec![prog(0, 2)]);
    assert!(!certify_circle(&evens).is_spd());
    let cert = certify_sphere(&evens, 2).unwrap();
    assert!(!cert.is_spd());
    let spec = KernelSpec::new(
        SpaceDescriptor::Sphere { m: 2 },
        KernelSupport::Single(evens),
        CoefficientScheme::default(),
        Truncation::default(),
    )
    .unwrap();
    let w = witness_parity_sphere(&spec).unwrap();
    assert!(w.vanishes_within(1e-12));
}
