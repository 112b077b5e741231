//! Release acceptance checks, each a named function returning pass/fail with
//! a deterministic one-line detail. The CLI `reproduce` subcommand and the
//! acceptance test target both execute exactly this logic.

use crate::algebra::{torus_diagram, Idempotent, StrandsDiagram};
use crate::astruct::{box_a_dd, box_ad, box_da_d, identity_da};
use crate::az::{cfar_az, cfdd_identity, cfdr_az, cfdr_azbar, mult2_reduction, small_model};
use crate::dstruct::TypeDStructure;
use crate::error::HfrError;
use crate::io::{load_str, to_canonical_string, Document};
use crate::pmc::{antipodal_pmc, realify, split_pmc, PointedMatchedCircle,
    RealPointedMatchedCircle};
use crate::satellites::{
    box_type_a, cable21_cfdr_framed, fixture, fixture_names, hfr_satellite_dim,
    oracle_hf_whitehead, oracle_hfr_cable, oracle_hfr_whitehead, staircase_type_a,
    thick_torus_cfdr, torus_algebra, valid_knot_range, whitehead_cfdr_framed, Fixture, Pattern,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

/// Outcome of one acceptance check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type CheckResult = std::result::Result<String, String>;

struct Check {
    name: &'static str,
    run: fn() -> CheckResult,
}

const CHECKS: &[Check] = &[
    Check { name: "az-genus1", run: check_az_genus1 },
    Check { name: "azbar-genus1", run: check_azbar_genus1 },
    Check { name: "structure-relations", run: check_structure_relations },
    Check { name: "worked-differential-genus2", run: check_worked_differential },
    Check { name: "small-model-contractibility", run: check_small_model },
    Check { name: "cfar-identity-pairing", run: check_cfar_pairing },
    Check { name: "satellite-ledger", run: check_satellite_ledger },
    Check { name: "satellite-closed-forms", run: check_satellite_closed_forms },
    Check { name: "thick-torus-splitting", run: check_thick_torus },
    Check { name: "property-suites", run: check_property_suites },
];

/// Names of all checks, in execution order.
pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.name).collect()
}

/// Runs one check by name.
pub fn run_check(name: &str) -> Option<CheckOutcome> {
    CHECKS.iter().find(|c| c.name == name).map(|c| {
        let result = (c.run)();
        match result {
            Ok(detail) => CheckOutcome { name: c.name, passed: true, detail },
            Err(detail) => CheckOutcome { name: c.name, passed: false, detail },
        }
    })
}

/// Runs every check in order.
pub fn run_all() -> Vec<CheckOutcome> {
    CHECKS.iter().map(|c| run_check(c.name).expect("registered check")).collect()
}

// ---------------------------------------------------------------------------
// Helpers.

fn ensure(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn lib<T>(r: crate::error::Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn real(pmc: PointedMatchedCircle) -> std::result::Result<RealPointedMatchedCircle, String> {
    lib(realify(&pmc))
}

fn within(start: Instant, budget: Duration, what: &str) -> std::result::Result<(), String> {
    let elapsed = start.elapsed();
    ensure(elapsed <= budget, format!("{what} took {elapsed:?}, budget {budget:?}"))
}

// ---------------------------------------------------------------------------
// Individual checks.

/// Genus-1 module, tilde side: two generators, one arrow ρ̃2 —ρ1→ ρ̃123,
/// idempotents as displayed; built in under a second.
fn check_az_genus1() -> CheckResult {
    let start = Instant::now();
    let d = lib(cfdr_az(&real(split_pmc(1))?))?;
    ensure(d.len() == 2, format!("expected 2 generators, got {}", d.len()))?;
    ensure(
        d.labels == vec!["{[1,4]}~".to_string(), "{[2,3]}~".to_string()],
        format!("unexpected labels {:?}", d.labels),
    )?;
    ensure(
        d.idempotents[0] == Idempotent(vec![(2, 4)])
            && d.idempotents[1] == Idempotent(vec![(1, 3)]),
        "idempotents differ from the displayed ones",
    )?;
    ensure(d.arrows.len() == 1, format!("expected 1 arrow, got {}", d.arrows.len()))?;
    let a = &d.arrows[0];
    ensure(
        d.labels[a.source] == "{[2,3]}~"
            && d.labels[a.target] == "{[1,4]}~"
            && a.coeff == torus_diagram("r1").unwrap(),
        "arrow differs from ρ̃2 —ρ1→ ρ̃123",
    )?;
    lib(d.check_structure_relation())?;
    within(start, Duration::from_secs(1), "genus-1 tilde build")?;
    Ok("2 generators, 1 arrow: ρ̃2 —ρ1→ ρ̃123; idempotents ι1/ι0; under 1s".into())
}

/// Genus-1 module, star side: generators ρ2*, ρ123* with
/// δ¹(ρ123*) = ρ3 ⊗ ρ2*; built in under a second.
fn check_azbar_genus1() -> CheckResult {
    let start = Instant::now();
    let d = lib(cfdr_azbar(&real(split_pmc(1))?))?;
    ensure(d.len() == 2, format!("expected 2 generators, got {}", d.len()))?;
    ensure(
        d.labels == vec!["{[1,4]}*".to_string(), "{[2,3]}*".to_string()],
        format!("unexpected labels {:?}", d.labels),
    )?;
    ensure(
        d.idempotents[0] == Idempotent(vec![(1, 3)])
            && d.idempotents[1] == Idempotent(vec![(2, 4)]),
        "idempotents differ from the displayed ones",
    )?;
    ensure(d.arrows.len() == 1, format!("expected 1 arrow, got {}", d.arrows.len()))?;
    let a = &d.arrows[0];
    ensure(
        d.labels[a.source] == "{[1,4]}*"
            && d.labels[a.target] == "{[2,3]}*"
            && a.coeff == torus_diagram("r3").unwrap(),
        "arrow differs from δ¹(ρ123*) = ρ3 ⊗ ρ2*",
    )?;
    lib(d.check_structure_relation())?;
    within(start, Duration::from_secs(1), "genus-1 star build")?;
    Ok("2 generators, 1 arrow: δ¹(ρ123*) = ρ3 ⊗ ρ2*; under 1s".into())
}

/// Squared-zero structure relation for both construction variants on the
/// split and antipodal circles up to genus 3.
fn check_structure_relations() -> CheckResult {
    let circles = [
        split_pmc(1),
        split_pmc(2),
        antipodal_pmc(2),
        split_pmc(3),
        antipodal_pmc(3),
    ];
    let mut verified = 0usize;
    for z in circles {
        let rp = real(z.clone())?;
        for build in [cfdr_az, cfdr_azbar] {
            let d = lib(build(&rp))?;
            lib(d.check_structure_relation())
                .map_err(|e| format!("at {}: {e}", rp.circle()))?;
            verified += 1;
        }
    }
    Ok(format!("{verified} structures up to genus 3 satisfy the relation"))
}

/// The worked genus-2 differential: eight terms with rule tags
/// (vi)×2, (vii)×3, (ix)×3 out of one generator, and the single
/// idempotent-coefficient swap term out of another.
fn check_worked_differential() -> CheckResult {
    let d = lib(cfdr_az(&real(split_pmc(2))?))?;
    let src = d
        .labels
        .iter()
        .position(|l| l == "{[2,2],[4,4],[5,5],[7,7]}~")
        .ok_or("worked generator not found")?;
    let mut got: Vec<(String, String, Vec<String>)> = d
        .arrows
        .iter()
        .filter(|a| a.source == src)
        .map(|a| (format!("{}", a.coeff), d.labels[a.target].clone(), a.tags.clone()))
        .collect();
    got.sort();
    let want_raw = [
        ("{[1,1],[3,3],[6,7]}", "{[2,3],[6,7]}~", "(vi)"),
        ("{[3,7],[6,6],[8,8]}", "{[2,6],[3,7]}~", "(vi)"),
        ("{[1,2],[6,6],[8,8]}", "{[1,2],[7,8]}~", "(vii)"),
        ("{[1,4],[6,6],[8,8]}", "{[1,4],[5,8]}~", "(vii)"),
        ("{[3,4],[6,6],[8,8]}", "{[3,4],[5,6]}~", "(vii)"),
        ("{[1,7],[6,6],[8,8]}", "{[1,8],[2,7]}~", "(ix)"),
        ("{[3,5],[6,6],[8,8]}", "{[3,6],[4,5]}~", "(ix)"),
        ("{[1,5],[6,6],[8,8]}", "{[1,8],[4,5]}~", "(ix)"),
    ];
    let mut want: Vec<(String, String, Vec<String>)> = want_raw
        .iter()
        .map(|(c, t, g)| (c.to_string(), t.to_string(), vec![g.to_string()]))
        .collect();
    want.sort();
    ensure(got == want, format!("eight-term differential mismatch: got {got:?}"))?;
    let swap_src = d
        .labels
        .iter()
        .position(|l| l == "{[3,6],[4,5]}~")
        .ok_or("swap generator not found")?;
    let terms: Vec<_> = d.arrows.iter().filter(|a| a.source == swap_src).collect();
    ensure(terms.len() == 1, format!("expected 1 swap term, got {}", terms.len()))?;
    let a = terms[0];
    ensure(
        d.labels[a.target] == "{[3,5],[4,6]}~" && a.coeff.is_idempotent(),
        "swap term is not 1 ⊗ {[3,5],[4,6]}~",
    )?;
    Ok("8 terms with tags (vi)×2 (vii)×3 (ix)×3; swap term 1⊗{[3,5],[4,6]}~".into())
}

/// Eight-generator reduced model at split:2; the multiplicity-two
/// substructure is provincially contractible (also at antipodal:2) and the
/// simplified quotient is the reduced model arrow-for-arrow.
fn check_small_model() -> CheckResult {
    let rp = real(split_pmc(2))?;
    let small = lib(small_model(&rp))?;
    ensure(small.len() == 8, format!("expected 8 generators, got {}", small.len()))?;
    lib(small.check_structure_relation())?;
    let red = lib(mult2_reduction(&lib(cfdr_az(&rp))?))?;
    ensure(
        red.substructure_homology == 0,
        format!("split:2 substructure homology {}", red.substructure_homology),
    )?;
    let reduced = lib(red.quotient.simplify())?;
    ensure(
        reduced.labeled_equal(&small),
        "simplified quotient differs from the reduced model",
    )?;
    let red_a = lib(mult2_reduction(&lib(cfdr_az(&real(antipodal_pmc(2))?))?))?;
    ensure(
        red_a.substructure_homology == 0,
        format!("antipodal:2 substructure homology {}", red_a.substructure_homology),
    )?;
    Ok("8-generator model; contractible substructures at split:2 and antipodal:2".into())
}

/// Pairing the action module with the identity bimodule reproduces the
/// reduced model arrow-for-arrow (a ↔ a⊗ι) on orientable split circles;
/// split:3 is rejected because its quotient surface is nonorientable, so the
/// second positive case runs at split:4 instead.
fn check_cfar_pairing() -> CheckResult {
    for z in [split_pmc(2), split_pmc(4)] {
        let rp = real(z)?;
        let name = format!("{}", rp.circle());
        let m = lib(cfar_az(&rp))?;
        let dd = lib(cfdd_identity(rp.circle()))?;
        let boxed = lib(box_a_dd(&m, &dd))?;
        let small = lib(small_model(&rp))?;
        ensure(
            boxed.len() == small.len(),
            format!("{name}: {} paired vs {} reduced generators", boxed.len(), small.len()),
        )?;
        for i in 0..boxed.len() {
            ensure(
                boxed.idempotents[i] == small.idempotents[i],
                format!("{name}: idempotent mismatch at generator {i}"),
            )?;
            ensure(
                boxed.labels[i].starts_with(&format!("{}⊗", m.labels[i])),
                format!("{name}: label {} is not {} ⊗ ι", boxed.labels[i], m.labels[i]),
            )?;
        }
        let strip = |d: &TypeDStructure| {
            let mut v: Vec<(usize, StrandsDiagram, usize)> =
                d.arrows.iter().map(|a| (a.source, a.coeff.clone(), a.target)).collect();
            v.sort();
            v
        };
        ensure(strip(&boxed) == strip(&small), format!("{name}: arrow sets differ"))?;
    }
    let at_three = cfar_az(&real(split_pmc(3))?);
    ensure(
        matches!(at_three, Err(HfrError::NonorientableQuotient)),
        "split:3 should be rejected as nonorientable",
    )?;
    Ok("arrow-for-arrow match at split:2 and split:4; split:3 rejected \
        (NonorientableQuotient), as its quotient surface is nonorientable"
        .into())
}

/// Per-summand pairing dimensions: staircases and the box against both
/// framed pattern modules.
fn check_satellite_ledger() -> CheckResult {
    let wh = whitehead_cfdr_framed();
    let cb = cable21_cfdr_framed();
    let cases: [(&str, crate::astruct::TypeAModule, &TypeDStructure, usize); 8] = [
        ("whitehead/stair(+1)", staircase_type_a(1), &wh, 7),
        ("whitehead/stair(-1)", staircase_type_a(-1), &wh, 9),
        ("whitehead/stair(0)", staircase_type_a(0), &wh, 1),
        ("whitehead/box", box_type_a(), &wh, 8),
        ("cable21/stair(+1)", staircase_type_a(1), &cb, 5),
        ("cable21/stair(-1)", staircase_type_a(-1), &cb, 3),
        ("cable21/stair(0)", staircase_type_a(0), &cb, 1),
        ("cable21/box", box_type_a(), &cb, 4),
    ];
    for (name, module, pattern, want) in &cases {
        let got = lib(box_ad(module, pattern))?.homology_dim();
        ensure(got == *want, format!("{name}: dimension {got}, expected {want}"))?;
    }
    Ok("7/9/1/8 against Whitehead, 5/3/1/4 against the cable".into())
}

/// Pipeline dimensions equal the closed forms over the whole valid grid
/// det ≤ 13, |τ| ≤ 3, and the reduced Whitehead count is strictly below the
/// unreduced one except at (1, 0); all inside a minute.
fn check_satellite_closed_forms() -> CheckResult {
    let start = Instant::now();
    let knots = valid_knot_range(13, 3);
    for knot in &knots {
        let dim_wh = lib(hfr_satellite_dim(Pattern::Whitehead, knot))?;
        ensure(
            dim_wh == oracle_hfr_whitehead(knot),
            format!(
                "whitehead det={} tau={}: pipeline {dim_wh}, oracle {}",
                knot.det(),
                knot.tau(),
                oracle_hfr_whitehead(knot)
            ),
        )?;
        let dim_cb = lib(hfr_satellite_dim(Pattern::Cable21, knot))?;
        ensure(
            dim_cb == oracle_hfr_cable(knot),
            format!(
                "cable det={} tau={}: pipeline {dim_cb}, oracle {}",
                knot.det(),
                knot.tau(),
                oracle_hfr_cable(knot)
            ),
        )?;
        let reduced = oracle_hfr_whitehead(knot);
        let unreduced = oracle_hf_whitehead(knot);
        if knot.det() == 1 && knot.tau() == 0 {
            ensure(
                reduced == unreduced,
                format!("expected equality at (1,0): {reduced} vs {unreduced}"),
            )?;
        } else {
            ensure(
                reduced < unreduced,
                format!(
                    "strictness fails at det={} tau={}: {reduced} vs {unreduced}",
                    knot.det(),
                    knot.tau()
                ),
            )?;
        }
    }
    within(start, Duration::from_secs(60), "closed-form sweep")?;
    Ok(format!(
        "{} knots × 2 patterns agree with closed forms; strictness holds except (1,0); \
         under 1min",
        knots.len()
    ))
}

/// The thickened-torus module splits into its two idempotent components:
/// x carries no differential, y a ρ12 self-loop.
fn check_thick_torus() -> CheckResult {
    let d = thick_torus_cfdr();
    lib(d.validate())?;
    lib(d.check_structure_relation())?;
    let comps = d.components();
    ensure(comps.len() == 2, format!("expected 2 components, got {}", comps.len()))?;
    ensure(d.delta(0).is_empty(), "δ¹(x) should vanish")?;
    let dy = d.delta(1);
    let loop_ok = dy.len() == 1
        && dy
            .get(&1)
            .map(|e| e.len() == 1 && e.contains(&torus_diagram("r12").unwrap()))
            .unwrap_or(false);
    ensure(loop_ok, "δ¹(y) should be exactly ρ12 ⊗ y")?;
    ensure(
        d.idempotents[0] == Idempotent(vec![(2, 4)])
            && d.idempotents[1] == Idempotent(vec![(1, 3)]),
        "idempotents differ from ι1 / ι0",
    )?;
    Ok("two idempotent components; δ¹(x)=0; δ¹(y)=ρ12⊗y".into())
}

/// Randomized and exhaustive law checks: simplification preserves provincial
/// homology and the structure relation on 1,000 seeded bounded structures;
/// box pairings on the built-in fixtures satisfy their squared-zero laws;
/// serialization round-trips are byte-identical.
fn check_property_suites() -> CheckResult {
    // Seeded randomized simplification suite.
    let mut rng = ChaCha8Rng::seed_from_u64(0x4846_5221);
    let cases = 1000usize;
    for case in 0..cases {
        let d = random_bounded_type_d(&mut rng, 100);
        lib(d.validate()).map_err(|e| format!("case {case}: {e}"))?;
        lib(d.check_structure_relation()).map_err(|e| format!("case {case}: {e}"))?;
        let before = d.provincial_complex().homology_dim();
        let s = lib(d.simplify()).map_err(|e| format!("case {case}: {e}"))?;
        lib(s.check_structure_relation())
            .map_err(|e| format!("case {case} after simplify: {e}"))?;
        let after = s.provincial_complex().homology_dim();
        ensure(
            before == after,
            format!("case {case}: provincial homology {before} → {after}"),
        )?;
    }
    // Box pairing laws on the built-in fixtures.
    let mut box_checks = 0usize;
    let identity = identity_da(&torus_algebra());
    for name in fixture_names() {
        let concrete = name.replace("<tau>", "-2");
        match fixture(&concrete).ok_or(format!("fixture {concrete} missing"))? {
            Fixture::TypeD(d) => {
                let paired = lib(box_da_d(&identity, &d))
                    .map_err(|e| format!("{concrete}: {e}"))?;
                lib(paired.check_structure_relation())
                    .map_err(|e| format!("{concrete}: {e}"))?;
                box_checks += 1;
            }
            Fixture::TypeA(m) => {
                for pattern in Pattern::ALL {
                    let c = lib(box_ad(&m, &pattern.framed_module()))
                        .map_err(|e| format!("{concrete}: {e}"))?;
                    lib(c.verify_d_squared()).map_err(|e| format!("{concrete}: {e}"))?;
                    box_checks += 1;
                }
            }
        }
    }
    {
        let rp = real(split_pmc(2))?;
        let paired = lib(box_a_dd(&lib(cfar_az(&rp))?, &lib(cfdd_identity(rp.circle()))?))?;
        lib(paired.check_structure_relation())?;
        box_checks += 1;
    }
    // Byte-identical serialization round-trips.
    let mut docs: Vec<Document> = vec![
        Document::Pmc(split_pmc(2)),
        Document::TypeD(lib(cfdr_az(&real(split_pmc(2))?))?),
        Document::TypeD(lib(cfdr_azbar(&real(split_pmc(1))?))?),
        Document::BimoduleDA(identity),
        Document::Complex(lib(box_ad(&staircase_type_a(2), &cable21_cfdr_framed()))?),
    ];
    for name in fixture_names() {
        let concrete = name.replace("<tau>", "3");
        match fixture(&concrete).ok_or(format!("fixture {concrete} missing"))? {
            Fixture::TypeD(d) => docs.push(Document::TypeD(d)),
            Fixture::TypeA(m) => docs.push(Document::TypeA(m)),
        }
    }
    let round_trips = docs.len();
    for doc in docs {
        let text = lib(to_canonical_string(&doc))?;
        let back = lib(load_str(&text))?;
        ensure(back == doc, format!("round trip altered a {} document", doc.kind()))?;
        let again = lib(to_canonical_string(&back))?;
        ensure(
            text == again,
            format!("round trip bytes differ for a {} document", doc.kind()),
        )?;
    }
    Ok(format!(
        "{cases} random structures simplified safely; {box_checks} box pairings verified; \
         {round_trips} round-trips byte-identical"
    ))
}

// ---------------------------------------------------------------------------
// Randomized structure generation.

/// Torus-algebra basis elements whose idempotents match the given endpoints.
fn compatible_coefficients(from: &Idempotent, to: &Idempotent) -> Vec<StrandsDiagram> {
    let pmc = split_pmc(1);
    ["i0", "i1", "r1", "r2", "r3", "r12", "r23", "r123"]
        .iter()
        .filter_map(|n| torus_diagram(n))
        .filter(|d| &d.left_idem(&pmc) == from && &d.right_idem(&pmc) == to)
        .collect()
}

/// Deterministic (given the RNG state) bounded type D structure over the
/// torus algebra: a random two-layer structure — whose relation holds for
/// free because no two arrows compose and the algebra has no differentials —
/// scrambled by random basis changes, keeping only those that stay bounded.
pub fn random_bounded_type_d<R: Rng>(rng: &mut R, max_gens: usize) -> TypeDStructure {
    let algebra = torus_algebra();
    let pmc = split_pmc(1);
    let i0 = torus_diagram("i0").unwrap().left_idem(&pmc);
    let i1 = torus_diagram("i1").unwrap().left_idem(&pmc);
    let n = rng.gen_range(2..=max_gens.max(2));
    let idempotents: Vec<Idempotent> =
        (0..n).map(|_| if rng.gen_bool(0.5) { i0.clone() } else { i1.clone() }).collect();
    let labels: Vec<String> = (0..n).map(|i| format!("g{i}")).collect();
    let cut = rng.gen_range(1..n);
    let mut arrows = Vec::new();
    for _ in 0..rng.gen_range(0..=2 * n) {
        let x = rng.gen_range(0..cut);
        let y = rng.gen_range(cut..n);
        let choices = compatible_coefficients(&idempotents[x], &idempotents[y]);
        let coeff = choices[rng.gen_range(0..choices.len())].clone();
        arrows.push(crate::dstruct::Arrow { source: x, coeff, target: y, tags: Vec::new() });
    }
    let mut d = TypeDStructure::new(algebra, labels, idempotents, arrows)
        .expect("two-layer structure is valid");
    for _ in 0..rng.gen_range(0..=n.min(20)) {
        let x = rng.gen_range(0..n);
        let y = rng.gen_range(0..n);
        if x == y {
            continue;
        }
        let choices = compatible_coefficients(&d.idempotents[y], &d.idempotents[x]);
        let a = choices[rng.gen_range(0..choices.len())].clone();
        if let Ok(next) = d.transvect(x, y, &a) {
            if next.is_bounded(n + 1) == Ok(true) {
                d = next;
            }
        }
    }
    d
}
