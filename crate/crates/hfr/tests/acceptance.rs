//! Release acceptance suite: one test per criterion, each delegating to the
//! shared check registry behind `hfr reproduce` and printing its own
//! pass/fail line (visible with `--nocapture`).

use hfr::reproduce::run_check;

fn assert_check(name: &str) {
    let outcome = run_check(name).expect("check is registered");
    let verdict = if outcome.passed { "PASS" } else { "FAIL" };
    println!("{verdict}  {}  {}", outcome.name, outcome.detail);
    assert!(outcome.passed, "{}: {}", outcome.name, outcome.detail);
}

#[test]
fn criterion_01_genus_one_tilde_module_matches_worked_example() {
    assert_check("az-genus1");
}

#[test]
fn criterion_02_genus_one_star_module_matches_worked_example() {
    assert_check("azbar-genus1");
}

#[test]
fn criterion_03_structure_relation_holds_through_genus_three() {
    assert_check("structure-relations");
}

#[test]
fn criterion_04_worked_genus_two_differential_with_rule_tags() {
    assert_check("worked-differential-genus2");
}

#[test]
fn criterion_05_reduced_model_and_contractible_substructures() {
    assert_check("small-model-contractibility");
}

#[test]
fn criterion_06_action_module_pairs_to_the_reduced_model() {
    assert_check("cfar-identity-pairing");
}

#[test]
fn criterion_07_summand_contribution_ledger() {
    assert_check("satellite-ledger");
}

#[test]
fn criterion_08_closed_form_agreement_and_strictness() {
    assert_check("satellite-closed-forms");
}

#[test]
fn criterion_09_thick_torus_idempotent_splitting() {
    assert_check("thick-torus-splitting");
}

#[test]
fn criterion_10_randomized_box_and_roundtrip_property_suites() {
    assert_check("property-suites");
}
