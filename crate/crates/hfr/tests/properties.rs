//! Randomized law checks across the public API, plus frozen regressions.

use hfr::algebra::{torus_diagram, AlgebraRef, Idempotent};
use hfr::astruct::{box_ad, box_da_d, identity_da};
use hfr::az::{cfdr_az, mult2_reduction};
use hfr::dstruct::{mor_to_d, Arrow, TypeDStructure};
use hfr::io::{load_str, to_canonical_string, Document};
use hfr::pmc::{antipodal_pmc, quotient_orientable, realify, split_pmc};
use hfr::reproduce::random_bounded_type_d;
use hfr::satellites::{
    direct_sum, oracle_hf_cable, oracle_hf_surgery_half, oracle_hf_surgery_one,
    oracle_hf_whitehead, staircase_type_a, torus_algebra, valid_knot_range,
    whitehead_cfdr_framed, AlternatingKnotData,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn seeded(seed: u64, max_gens: usize) -> TypeDStructure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_bounded_type_d(&mut rng, max_gens)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn simplify_preserves_provincial_homology(seed in any::<u64>()) {
        let d = seeded(seed, 40);
        let before = d.provincial_complex().homology_dim();
        let s = d.simplify().unwrap();
        prop_assert_eq!(s.provincial_complex().homology_dim(), before);
    }

    #[test]
    fn simplify_output_is_reduced_and_lawful(seed in any::<u64>()) {
        let s = seeded(seed, 40).simplify().unwrap();
        s.check_structure_relation().unwrap();
        prop_assert!(
            !s.arrows.iter().any(|a| a.coeff.is_idempotent()),
            "idempotent-coefficient arrow survived"
        );
    }

    #[test]
    fn transvections_preserve_the_structure_relation(
        seed in any::<u64>(),
        moves in proptest::collection::vec((0usize..30, 0usize..30, 0usize..8), 1..5),
    ) {
        let names = ["i0", "i1", "r1", "r2", "r3", "r12", "r23", "r123"];
        let mut d = seeded(seed, 30);
        for (x, y, c) in moves {
            let (x, y) = (x % d.len(), y % d.len());
            let a = torus_diagram(names[c]).unwrap();
            if let Ok(next) = d.transvect(x, y, &a) {
                next.check_structure_relation().unwrap();
                d = next;
            }
        }
    }

    #[test]
    fn interchange_round_trip_is_the_identity(seed in any::<u64>()) {
        let d = seeded(seed, 25);
        for doc in [
            Document::Complex(d.provincial_complex()),
            Document::TypeD(d),
        ] {
            let text = to_canonical_string(&doc).unwrap();
            let back = load_str(&text).unwrap();
            prop_assert_eq!(&back, &doc);
            prop_assert_eq!(to_canonical_string(&back).unwrap(), text);
        }
    }

    #[test]
    fn direct_sum_pairing_is_additive(
        taus in proptest::collection::vec(-2i64..=2, 1..5),
    ) {
        let parts: Vec<_> = taus.iter().map(|&t| staircase_type_a(t)).collect();
        let pattern = whitehead_cfdr_framed();
        let expected: usize = parts
            .iter()
            .map(|m| box_ad(m, &pattern).unwrap().homology_dim())
            .sum();
        let total = direct_sum(&parts).unwrap();
        prop_assert_eq!(box_ad(&total, &pattern).unwrap().homology_dim(), expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tensoring_with_a_simplified_structure_preserves_homology(
        seed in any::<u64>(),
        tau in -2i64..=2,
    ) {
        let m = staircase_type_a(tau);
        let d = seeded(seed, 30);
        let before = box_ad(&m, &d).unwrap().homology_dim();
        let after = box_ad(&m, &d.simplify().unwrap()).unwrap().homology_dim();
        prop_assert_eq!(after, before);
    }

    #[test]
    fn identity_bimodule_pairing_is_a_homotopy_equivalence(seed in any::<u64>()) {
        let d = seeded(seed, 30);
        let paired = box_da_d(&identity_da(&torus_algebra()), &d).unwrap();
        paired.check_structure_relation().unwrap();
        prop_assert_eq!(paired.len(), d.len());
        prop_assert_eq!(
            paired.provincial_complex().homology_dim(),
            d.provincial_complex().homology_dim()
        );
    }
}

#[test]
fn reduced_oracles_match_double_cover_surgeries() {
    for knot in valid_knot_range(21, 5) {
        let cover =
            AlternatingKnotData::new(knot.det() * knot.det(), 2 * knot.tau()).unwrap();
        assert_eq!(
            oracle_hf_whitehead(&knot),
            oracle_hf_surgery_half(&cover),
            "half-surgery identity at det={} tau={}",
            knot.det(),
            knot.tau()
        );
        assert_eq!(
            oracle_hf_cable(&knot),
            oracle_hf_surgery_one(&cover),
            "one-surgery identity at det={} tau={}",
            knot.det(),
            knot.tau()
        );
    }
}

#[test]
fn circle_families_behave_under_reversal_and_refinement() {
    for k in 1..=6 {
        for z in [split_pmc(k), antipodal_pmc(k)] {
            assert_eq!(z.reverse().reverse(), z, "reversal is an involution");
            let rp = realify(&z).unwrap();
            let rev = realify(&z.reverse()).unwrap();
            assert_eq!(rev.circle(), &z.reverse(), "refinement commutes with reversal");
            let orientable = quotient_orientable(&rp);
            let expected = match z == split_pmc(k) {
                true => k % 2 == 0,
                false => false,
            };
            assert_eq!(orientable, expected, "orientability at genus {k}");
        }
    }
}

/// Frozen regression: the morphism complex from the genus-1 multiplicity
/// quotient (which equals the full model there) to a ρ12-loop companion over
/// the same algebra. The expected numbers agree with a hand count: 8 basis
/// morphisms, differential of rank 3, homology dimension 2.
#[test]
fn mor_complex_regression_at_genus_one() {
    let rp = realify(&split_pmc(1)).unwrap();
    let full = cfdr_az(&rp).unwrap();
    let red = mult2_reduction(&full).unwrap();
    assert_eq!(red.quotient.len(), full.len(), "no multiplicity ≥ 2 generators at genus 1");
    let companion = TypeDStructure::new(
        AlgebraRef::full(split_pmc(1)),
        vec!["x".into(), "y".into()],
        vec![Idempotent(vec![(2, 4)]), Idempotent(vec![(1, 3)])],
        vec![Arrow {
            source: 1,
            coeff: torus_diagram("r12").unwrap(),
            target: 1,
            tags: Vec::new(),
        }],
    )
    .unwrap();
    let c = mor_to_d(&red.quotient, &companion).unwrap();
    c.verify_d_squared().unwrap();
    assert_eq!(c.len(), 8);
    assert_eq!(c.homology_dim(), 2);
}
