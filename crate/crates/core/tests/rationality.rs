//! Verdicts for norm one tori, stable across seeds, and JSON round trips.

mod common;

use common::*;
use glattice::groups::named::*;
use glattice::groups::GSet;
use glattice::io::{parse_json, LatticeJson, SequenceJson, SpecJson};
use glattice::lattices::augmentation_sequence;
use glattice::rationality::{classify_norm_one, verify_tensor_rationality, ClassifyOptions, EtaleSpec, Verdict};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn opts(seed: u64) -> ClassifyOptions {
    ClassifyOptions { seed, ..ClassifyOptions::default() }
}

#[test]
fn cubic_times_quadratic_product_is_stably_rational_for_every_seed() {
    let s3 = symmetric(3);
    let cubic = EtaleSpec::transitive(&s3.subgroup_generated(&[s3.generator_indices()[0]]));
    let quadratic = EtaleSpec::transitive(&cyclic(2).trivial_subgroup());
    for seed in 0..6 {
        let rep = verify_tensor_rationality(&cubic, &quadratic, &opts(seed)).unwrap();
        assert!(rep.all_checks_pass(), "seed {seed}");
        assert!(rep.coprime && rep.product_stable_deduced);
        assert_eq!(rep.product.stably_rational, Verdict::Yes, "seed {seed}");
    }
}

#[test]
fn galois_tori_follow_the_sylow_criterion() {
    for g in [cyclic(4), cyclic(6), klein_four(), symmetric(3), quaternion()] {
        let rep = classify_norm_one(&EtaleSpec::transitive(&g.trivial_subgroup()), &opts(0)).unwrap();
        assert!(rep.all_checks_pass(), "{}", g.id());
        assert_eq!(rep.retract_rational, sylow_cyclic_oracle(&g), "{}", g.id());
    }
}

#[test]
fn degree_three_with_a_fixed_point_is_rational() {
    let g = cyclic(3);
    let spec = EtaleSpec::over(&g, &[(g.whole(), 1), (g.trivial_subgroup(), 1)]).unwrap();
    let rep = classify_norm_one(&spec, &opts(0)).unwrap();
    assert_eq!(rep.stably_rational, Verdict::Yes);
    assert!(rep.pord.is_one());
}

#[test]
fn json_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for g in small_groups() {
        let m = random_lattice(&g, &mut rng, 5);
        let text = serde_json::to_string(&LatticeJson::from_lattice(&m)).unwrap();
        let back = parse_json::<LatticeJson>(&text, "lattice").unwrap().build().unwrap();
        assert!(back.same_action(&m));

        let x = GSet::cosets(&random_subgroup(&g, &mut rng));
        let e = augmentation_sequence(&x).unwrap();
        let text = serde_json::to_string(&SequenceJson::from_sequence(&e)).unwrap();
        let back = parse_json::<SequenceJson>(&text, "sequence").unwrap().build().unwrap();
        assert!(back.verify_exactness().exact);
        assert_eq!(back.terms.len(), e.terms.len());
    }
}

#[test]
fn malformed_spec_reports_position() {
    let err = parse_json::<SpecJson>("{\"factors\": [\n  {\"group\": }\n]}", "spec").unwrap_err();
    assert!(err.to_string().contains("line 2"), "{err}");
}
