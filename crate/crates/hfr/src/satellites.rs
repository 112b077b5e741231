//! Genus-one satellite machinery: hard-coded complement models for thickened
//! torus, Whitehead, and (2,1)-cable patterns; staircase and box summand
//! models for branched double covers of alternating knots; the pairing
//! pipeline that combines them; and the closed-form dimension counts the
//! pipeline is cross-checked against.

use crate::algebra::{torus_diagram, AlgebraRef, Idempotent, StrandsDiagram};
use crate::astruct::{box_ad, AOp, TypeAModule};
use crate::dstruct::{Arrow, TypeDStructure};
use crate::error::{HfrError, Result};
use crate::pmc::split_pmc;

/// Coefficient algebra shared by every structure in this module: the
/// multiplicity-one strands algebra of the four-point circle.
pub fn torus_algebra() -> AlgebraRef {
    AlgebraRef::mult_one(split_pmc(1))
}

fn gen_diagram(name: &str) -> StrandsDiagram {
    torus_diagram(name).expect("genus-one diagram name")
}

fn idem(name: &str) -> Idempotent {
    gen_diagram(name).left_idem(&split_pmc(1))
}

fn plain_arrow(source: usize, coeff: &str, target: usize) -> Arrow {
    Arrow { source, coeff: gen_diagram(coeff), target, tags: Vec::new() }
}

// ---------------------------------------------------------------------------
// Pattern complements.

/// Two-generator model of a thickened-torus pattern complement: δ¹(x) = 0 and
/// δ¹(y) = ρ12 ⊗ y.
pub fn thick_torus_cfdr() -> TypeDStructure {
    TypeDStructure::new(
        torus_algebra(),
        vec!["x".into(), "y".into()],
        vec![idem("i1"), idem("i0")],
        vec![plain_arrow(1, "r12", 1)],
    )
    .expect("thick torus model is valid")
}

/// Zero-framed Whitehead pattern complement: three generators with the single
/// arrow s —ρ1→ t.
pub fn whitehead_cfdr_framed() -> TypeDStructure {
    TypeDStructure::new(
        torus_algebra(),
        vec!["r".into(), "s".into(), "t".into()],
        vec![idem("i1"), idem("i0"), idem("i1")],
        vec![plain_arrow(1, "r1", 2)],
    )
    .expect("framed Whitehead model is valid")
}

/// Whitehead pattern complement before the framing change: five generators,
/// three arrows.
pub fn whitehead_cfdr_unframed() -> TypeDStructure {
    TypeDStructure::new(
        torus_algebra(),
        vec!["p1y".into(), "p1x1".into(), "p2x1".into(), "p2x2".into(), "p1x2".into()],
        vec![idem("i0"), idem("i1"), idem("i1"), idem("i1"), idem("i1")],
        vec![plain_arrow(0, "r3", 1), plain_arrow(1, "r23", 2), plain_arrow(0, "r1", 3)],
    )
    .expect("unframed Whitehead model is valid")
}

/// Zero-framed (2,1)-cable pattern complement: x —ρ2→ y.
pub fn cable21_cfdr_framed() -> TypeDStructure {
    TypeDStructure::new(
        torus_algebra(),
        vec!["x".into(), "y".into()],
        vec![idem("i1"), idem("i0")],
        vec![plain_arrow(0, "r2", 1)],
    )
    .expect("framed cable model is valid")
}

/// (2,1)-cable pattern complement before the framing change:
/// p —ρ2→ b —ρ12→ a.
pub fn cable21_cfdr_unframed() -> TypeDStructure {
    TypeDStructure::new(
        torus_algebra(),
        vec!["p".into(), "b".into(), "a".into()],
        vec![idem("i1"), idem("i0"), idem("i0")],
        vec![plain_arrow(0, "r2", 1), plain_arrow(1, "r12", 2)],
    )
    .expect("unframed cable model is valid")
}

// ---------------------------------------------------------------------------
// Staircase and box summands.

/// Shared description of a structure over the torus algebra: generators with
/// idempotent names and arrows with coefficient names. A blueprint
/// materializes either as a type D structure (coefficients as written) or as
/// the dual type A module (each coefficient traded for its input sequence;
/// see `dual_inputs`).
struct Blueprint {
    gens: Vec<(String, &'static str)>,
    arrows: Vec<(usize, &'static str, usize)>,
}

impl Blueprint {
    fn type_d(&self) -> TypeDStructure {
        TypeDStructure::new(
            torus_algebra(),
            self.gens.iter().map(|(l, _)| l.clone()).collect(),
            self.gens.iter().map(|(_, i)| idem(i)).collect(),
            self.arrows.iter().map(|&(s, c, t)| plain_arrow(s, c, t)).collect(),
        )
        .expect("blueprint type D structure is valid")
    }

    fn type_a(&self) -> TypeAModule {
        TypeAModule::new(
            torus_algebra(),
            self.gens.iter().map(|(l, _)| l.clone()).collect(),
            self.gens.iter().map(|(_, i)| idem(i)).collect(),
            self.arrows
                .iter()
                .map(|&(s, c, t)| AOp { source: s, inputs: dual_inputs(c), target: t })
                .collect(),
        )
        .expect("blueprint type A module is valid")
    }
}

/// Input sequence of the module action dual to a type D arrow with the given
/// coefficient: reflect each unit segment across the circle's midpoint
/// (1↔3, 2↔2) and feed the reflected segments in reverse order.
fn dual_inputs(name: &str) -> Vec<StrandsDiagram> {
    let names: &[&str] = match name {
        "r1" => &["r3"],
        "r2" => &["r2"],
        "r3" => &["r1"],
        "r12" => &["r3", "r2"],
        "r23" => &["r2", "r1"],
        "r123" => &["r3", "r2", "r1"],
        other => panic!("no dual input sequence for {other}"),
    };
    names.iter().map(|n| gen_diagram(n)).collect()
}

/// Zig-zag family with 2|τ|+1 generators at ι0 ("solid", labels s·)
/// interleaved with 4|τ| generators at ι1 ("hollow"), plus an unstable chain
/// whose direction depends on the sign of τ. τ = 0 degenerates to a single
/// ι0 generator with a ρ12 self-loop.
fn staircase_blueprint(tau: i64) -> Blueprint {
    let t = tau.unsigned_abs() as usize;
    if t == 0 {
        return Blueprint { gens: vec![("s0".into(), "i0")], arrows: vec![(0, "r12", 0)] };
    }
    let mut gens: Vec<(String, &'static str)> = Vec::new();
    for i in 0..=2 * t {
        gens.push((format!("s{i}"), "i0"));
    }
    let s = |i: usize| i;
    let mut arrows: Vec<(usize, &'static str, usize)> = Vec::new();
    if tau > 0 {
        for i in 1..=2 * t {
            gens.push((format!("u{i}"), "i1"));
        }
        for i in 1..=2 * t {
            gens.push((format!("l{i}"), "i1"));
        }
        let u = |i: usize| 2 * t + i;
        let l = |i: usize| 4 * t + i;
        for j in 1..=t {
            arrows.push((s(2 * j - 1), "r1", u(2 * j)));
            arrows.push((s(2 * j), "r123", u(2 * j)));
            arrows.push((s(2 * j - 1), "r3", u(2 * j - 1)));
            arrows.push((u(2 * j - 1), "r2", s(2 * j - 2)));
        }
        arrows.push((s(0), "r1", l(1)));
        for i in 1..2 * t {
            arrows.push((l(i + 1), "r23", l(i)));
        }
        arrows.push((s(2 * t), "r3", l(2 * t)));
    } else {
        for i in 1..=2 * t {
            gens.push((format!("v{i}"), "i1"));
        }
        for i in 1..=2 * t {
            gens.push((format!("u{i}"), "i1"));
        }
        let v = |i: usize| 2 * t + i;
        let u = |i: usize| 4 * t + i;
        for j in 1..=t {
            arrows.push((s(2 * j - 2), "r1", v(2 * j - 1)));
            arrows.push((s(2 * j - 1), "r123", v(2 * j - 1)));
            arrows.push((s(2 * j), "r3", v(2 * j)));
            arrows.push((v(2 * j), "r2", s(2 * j - 1)));
        }
        arrows.push((s(2 * t), "r123", u(2 * t)));
        for i in 1..2 * t {
            arrows.push((u(i + 1), "r23", u(i)));
        }
        arrows.push((u(1), "r2", s(0)));
    }
    Blueprint { gens, arrows }
}

/// Eight-generator square summand: four ι0 corners b·· and four ι1 edge
/// midpoints c··, with the eight displayed arrows.
fn box_blueprint() -> Blueprint {
    let gens: Vec<(String, &'static str)> = [
        ("b00", "i0"),
        ("b20", "i0"),
        ("b02", "i0"),
        ("b22", "i0"),
        ("c10", "i1"),
        ("c01", "i1"),
        ("c21", "i1"),
        ("c12", "i1"),
    ]
    .iter()
    .map(|&(l, i)| (l.to_string(), i))
    .collect();
    let arrows = vec![
        (3, "r3", 7),
        (1, "r3", 4),
        (3, "r1", 6),
        (2, "r1", 5),
        (7, "r2", 2),
        (4, "r2", 0),
        (0, "r123", 5),
        (1, "r123", 6),
    ];
    Blueprint { gens, arrows }
}

/// Staircase summand as a type D structure.
pub fn staircase_type_d(tau: i64) -> TypeDStructure {
    staircase_blueprint(tau).type_d()
}

/// Staircase summand as the dual type A module. Stored operations generate
/// the full action table under composition closure.
pub fn staircase_type_a(tau: i64) -> TypeAModule {
    staircase_blueprint(tau).type_a()
}

/// Box summand as a type D structure.
pub fn box_type_d() -> TypeDStructure {
    box_blueprint().type_d()
}

/// Box summand as the dual type A module.
pub fn box_type_a() -> TypeAModule {
    box_blueprint().type_a()
}

// ---------------------------------------------------------------------------
// Alternating knot data and the satellite pipeline.

/// Determinant and concordance parameter of an alternating knot, validated so
/// that the branched double cover's module decomposes as one staircase plus a
/// whole number of boxes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlternatingKnotData {
    det: u64,
    tau: i64,
}

impl AlternatingKnotData {
    /// Requires `det` positive and odd, `det ≥ 2|tau|+1`, and
    /// `det ≡ 2|tau|+1 (mod 4)`.
    pub fn new(det: u64, tau: i64) -> Result<Self> {
        let width = 2 * tau.unsigned_abs() + 1;
        if det == 0 || det % 2 == 0 {
            return Err(HfrError::InvariantViolation(format!(
                "det must be a positive odd integer, got {det}"
            )));
        }
        if det < width {
            return Err(HfrError::InvariantViolation(format!(
                "det = {det} is smaller than 2|tau|+1 = {width}"
            )));
        }
        if (det - width) % 4 != 0 {
            return Err(HfrError::InvariantViolation(format!(
                "det − (2|tau|+1) = {} is not divisible by 4",
                det - width
            )));
        }
        Ok(AlternatingKnotData { det, tau })
    }

    pub fn det(&self) -> u64 {
        self.det
    }

    pub fn tau(&self) -> i64 {
        self.tau
    }

    /// Number of box summands: (det − (2|tau|+1)) / 4.
    pub fn box_count(&self) -> u64 {
        (self.det - (2 * self.tau.unsigned_abs() + 1)) / 4
    }
}

/// All parameter pairs with `det ≤ max_det` and `|tau| ≤ max_tau_abs` that
/// satisfy the validity constraints, ordered by (det, tau).
pub fn valid_knot_range(max_det: u64, max_tau_abs: i64) -> Vec<AlternatingKnotData> {
    let mut out = Vec::new();
    for det in (1..=max_det).step_by(2) {
        for tau in -max_tau_abs..=max_tau_abs {
            if let Ok(k) = AlternatingKnotData::new(det, tau) {
                out.push(k);
            }
        }
    }
    out
}

/// The two supported even-winding patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pattern {
    Whitehead,
    Cable21,
}

impl Pattern {
    pub const ALL: [Pattern; 2] = [Pattern::Whitehead, Pattern::Cable21];

    /// Zero-framed complement model paired against companion modules.
    pub fn framed_module(self) -> TypeDStructure {
        match self {
            Pattern::Whitehead => whitehead_cfdr_framed(),
            Pattern::Cable21 => cable21_cfdr_framed(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Pattern::Whitehead => "whitehead",
            Pattern::Cable21 => "cable21",
        }
    }
}

impl std::str::FromStr for Pattern {
    type Err = HfrError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "whitehead" => Ok(Pattern::Whitehead),
            "cable21" => Ok(Pattern::Cable21),
            other => Err(HfrError::UsageError(format!(
                "unknown pattern '{other}' (expected 'whitehead' or 'cable21')"
            ))),
        }
    }
}

/// Disjoint union of modules over a common algebra. Labels are suffixed with
/// the summand index so they stay unique.
pub fn direct_sum(parts: &[TypeAModule]) -> Result<TypeAModule> {
    let first = parts
        .first()
        .ok_or_else(|| HfrError::UsageError("direct_sum needs at least one summand".into()))?;
    let algebra = first.algebra.clone();
    let mut labels = Vec::new();
    let mut idempotents = Vec::new();
    let mut ops = Vec::new();
    let mut offset = 0;
    for (k, part) in parts.iter().enumerate() {
        if part.algebra != algebra {
            return Err(HfrError::AlgebraMismatch(format!("{} vs {}", algebra, part.algebra)));
        }
        for l in &part.labels {
            labels.push(format!("{l}@{k}"));
        }
        idempotents.extend(part.idempotents.iter().cloned());
        for op in &part.ops {
            ops.push(AOp {
                source: op.source + offset,
                inputs: op.inputs.clone(),
                target: op.target + offset,
            });
        }
        offset += part.len();
    }
    TypeAModule::new(algebra, labels, idempotents, ops)
}

/// Companion module of the knot: one staircase for its τ plus `box_count`
/// box summands.
pub fn companion_module(knot: &AlternatingKnotData) -> Result<TypeAModule> {
    let mut parts = vec![staircase_type_a(knot.tau())];
    for _ in 0..knot.box_count() {
        parts.push(box_type_a());
    }
    direct_sum(&parts)
}

/// Homology dimension of the pairing of the companion module with the framed
/// pattern complement.
pub fn hfr_satellite_dim(pattern: Pattern, knot: &AlternatingKnotData) -> Result<usize> {
    let module = companion_module(knot)?;
    let complex = box_ad(&module, &pattern.framed_module())?;
    Ok(complex.homology_dim())
}

// ---------------------------------------------------------------------------
// Closed-form counts.

fn sign_case(tau: i64, pos: i64, zero: i64, neg: i64) -> i64 {
    match tau.signum() {
        1 => pos,
        0 => zero,
        _ => neg,
    }
}

/// Closed form for the Whitehead pairing dimension: 2·det + 4τ − 3 for
/// τ > 0, otherwise 2·det + 4|τ| − 1.
pub fn oracle_hfr_whitehead(knot: &AlternatingKnotData) -> usize {
    let det = knot.det() as i64;
    let abs = knot.tau().abs();
    let v = if knot.tau() > 0 { 2 * det + 4 * abs - 3 } else { 2 * det + 4 * abs - 1 };
    v as usize
}

/// Unreduced comparison count for the Whitehead satellite:
/// det² + 12|τ| + {−6, 0, −4} by the sign of τ.
pub fn oracle_hf_whitehead(knot: &AlternatingKnotData) -> usize {
    let det = knot.det() as i64;
    let v = det * det + 12 * knot.tau().abs() + sign_case(knot.tau(), -6, 0, -4);
    v as usize
}

/// Closed form for the (2,1)-cable pairing dimension: det + 2τ for τ ≥ 0,
/// otherwise det + 2|τ| − 2.
pub fn oracle_hfr_cable(knot: &AlternatingKnotData) -> usize {
    let det = knot.det() as i64;
    let abs = knot.tau().abs();
    let v = if knot.tau() >= 0 { det + 2 * abs } else { det + 2 * abs - 2 };
    v as usize
}

/// Unreduced comparison count for the (2,1)-cable satellite:
/// ½(det² + 12|τ| + {−7, 1, −3}) by the sign of τ.
pub fn oracle_hf_cable(knot: &AlternatingKnotData) -> usize {
    let det = knot.det() as i64;
    let v = det * det + 12 * knot.tau().abs() + sign_case(knot.tau(), -7, 1, -3);
    (v / 2) as usize
}

/// Count for +1-surgery on the knot: ½(det + 6|τ| + {−7, 1, −3}).
pub fn oracle_hf_surgery_one(knot: &AlternatingKnotData) -> usize {
    let det = knot.det() as i64;
    let v = det + 6 * knot.tau().abs() + sign_case(knot.tau(), -7, 1, -3);
    (v / 2) as usize
}

/// Count for +1/2-surgery on the knot: det + 6|τ| + {−6, 0, −4}.
pub fn oracle_hf_surgery_half(knot: &AlternatingKnotData) -> usize {
    let det = knot.det() as i64;
    let v = det + 6 * knot.tau().abs() + sign_case(knot.tau(), -6, 0, -4);
    v as usize
}

// ---------------------------------------------------------------------------
// Named fixtures.

/// A built-in structure addressable by name.
pub enum Fixture {
    TypeD(TypeDStructure),
    TypeA(TypeAModule),
}

/// Names accepted by `fixture`; `<tau>` stands for an integer parameter.
pub fn fixture_names() -> Vec<String> {
    let mut names: Vec<String> = [
        "thick_torus",
        "whitehead_framed",
        "whitehead_unframed",
        "cable21_framed",
        "cable21_unframed",
        "box_d",
        "box_a",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    names.push("staircase_d:<tau>".into());
    names.push("staircase_a:<tau>".into());
    names
}

/// Looks up a built-in structure by name. Staircases take their parameter
/// after a colon, e.g. `staircase_d:-2`.
pub fn fixture(name: &str) -> Option<Fixture> {
    if let Some(rest) = name.strip_prefix("staircase_d:") {
        return rest.parse().ok().map(|t| Fixture::TypeD(staircase_type_d(t)));
    }
    if let Some(rest) = name.strip_prefix("staircase_a:") {
        return rest.parse().ok().map(|t| Fixture::TypeA(staircase_type_a(t)));
    }
    match name {
        "thick_torus" => Some(Fixture::TypeD(thick_torus_cfdr())),
        "whitehead_framed" => Some(Fixture::TypeD(whitehead_cfdr_framed())),
        "whitehead_unframed" => Some(Fixture::TypeD(whitehead_cfdr_unframed())),
        "cable21_framed" => Some(Fixture::TypeD(cable21_cfdr_framed())),
        "cable21_unframed" => Some(Fixture::TypeD(cable21_cfdr_unframed())),
        "box_d" => Some(Fixture::TypeD(box_type_d())),
        "box_a" => Some(Fixture::TypeA(box_type_a())),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::astruct::check_ainfty;

    #[test]
    fn staircase_type_d_counts_and_relation() {
        for tau in -3i64..=3 {
            let d = staircase_type_d(tau);
            let t = tau.unsigned_abs() as usize;
            let expected = if t == 0 { 1 } else { 6 * t + 1 };
            assert_eq!(d.len(), expected, "generators at tau = {tau}");
            assert_eq!(d.arrows.len(), expected, "arrows at tau = {tau}");
            d.validate().unwrap();
            d.check_structure_relation().unwrap();
        }
    }

    #[test]
    fn staircase_type_a_satisfies_ainfty() {
        for tau in -3i64..=3 {
            check_ainfty(&staircase_type_a(tau), 6).unwrap();
        }
    }

    #[test]
    fn box_models_are_consistent() {
        let d = box_type_d();
        assert_eq!(d.len(), 8);
        assert_eq!(d.arrows.len(), 8);
        d.check_structure_relation().unwrap();
        let a = box_type_a();
        assert_eq!(a.len(), 8);
        check_ainfty(&a, 6).unwrap();
    }

    #[test]
    fn pattern_fixtures_pass_structure_relation() {
        let cases = [
            (thick_torus_cfdr(), 2, 1),
            (whitehead_cfdr_framed(), 3, 1),
            (whitehead_cfdr_unframed(), 5, 3),
            (cable21_cfdr_framed(), 2, 1),
            (cable21_cfdr_unframed(), 3, 2),
        ];
        for (d, gens, arrows) in cases {
            assert_eq!(d.len(), gens);
            assert_eq!(d.arrows.len(), arrows);
            d.check_structure_relation().unwrap();
        }
    }

    #[test]
    fn thick_torus_splits_and_is_unbounded() {
        let d = thick_torus_cfdr();
        let comps = d.components();
        assert_eq!(comps.len(), 2);
        assert!(d.delta(0).is_empty());
        assert!(!d.is_bounded(16).unwrap());
    }

    #[test]
    fn summand_pairing_contributions_match_ledger() {
        let wh = whitehead_cfdr_framed();
        let cb = cable21_cfdr_framed();
        for t in 1i64..=3 {
            let up = staircase_type_a(t);
            let dn = staircase_type_a(-t);
            assert_eq!(
                box_ad(&up, &wh).unwrap().homology_dim(),
                (8 * t - 1) as usize,
                "whitehead staircase tau = {t}"
            );
            assert_eq!(
                box_ad(&dn, &wh).unwrap().homology_dim(),
                (8 * t + 1) as usize,
                "whitehead staircase tau = -{t}"
            );
            assert_eq!(
                box_ad(&up, &cb).unwrap().homology_dim(),
                (4 * t + 1) as usize,
                "cable staircase tau = {t}"
            );
            assert_eq!(
                box_ad(&dn, &cb).unwrap().homology_dim(),
                (4 * t - 1) as usize,
                "cable staircase tau = -{t}"
            );
        }
        let flat = staircase_type_a(0);
        assert_eq!(box_ad(&flat, &wh).unwrap().homology_dim(), 1);
        assert_eq!(box_ad(&flat, &cb).unwrap().homology_dim(), 1);
        let bx = box_type_a();
        assert_eq!(box_ad(&bx, &wh).unwrap().homology_dim(), 8);
        assert_eq!(box_ad(&bx, &cb).unwrap().homology_dim(), 4);
    }

    #[test]
    fn pipeline_matches_closed_forms_on_small_grid() {
        for knot in valid_knot_range(9, 2) {
            assert_eq!(
                hfr_satellite_dim(Pattern::Whitehead, &knot).unwrap(),
                oracle_hfr_whitehead(&knot),
                "whitehead at det = {}, tau = {}",
                knot.det(),
                knot.tau()
            );
            assert_eq!(
                hfr_satellite_dim(Pattern::Cable21, &knot).unwrap(),
                oracle_hfr_cable(&knot),
                "cable at det = {}, tau = {}",
                knot.det(),
                knot.tau()
            );
        }
    }

    #[test]
    fn oracle_arithmetic_spot_values() {
        let unknot = AlternatingKnotData::new(1, 0).unwrap();
        let trefoil = AlternatingKnotData::new(3, 1).unwrap();
        let mirror = AlternatingKnotData::new(3, -1).unwrap();
        let fig8ish = AlternatingKnotData::new(5, 0).unwrap();
        assert_eq!(oracle_hfr_whitehead(&unknot), 1);
        assert_eq!(oracle_hf_whitehead(&unknot), 1);
        assert_eq!(oracle_hfr_whitehead(&trefoil), 7);
        assert_eq!(oracle_hf_whitehead(&trefoil), 15);
        assert_eq!(oracle_hfr_whitehead(&mirror), 9);
        assert_eq!(oracle_hfr_cable(&trefoil), 5);
        assert_eq!(oracle_hfr_cable(&fig8ish), 5);
        assert_eq!(oracle_hf_surgery_one(&unknot), 1);
        assert_eq!(oracle_hf_surgery_one(&trefoil), 1);
        assert_eq!(oracle_hf_surgery_half(&fig8ish), 5);
    }

    #[test]
    fn unreduced_oracles_agree_with_surgery_formulas_on_cover_data() {
        for knot in valid_knot_range(13, 3) {
            let cover =
                AlternatingKnotData::new(knot.det() * knot.det(), 2 * knot.tau()).unwrap();
            assert_eq!(oracle_hf_whitehead(&knot), oracle_hf_surgery_half(&cover));
            assert_eq!(oracle_hf_cable(&knot), oracle_hf_surgery_one(&cover));
        }
    }

    #[test]
    fn direct_sum_homology_is_additive() {
        let parts = [staircase_type_a(1), box_type_a(), staircase_type_a(-2)];
        let total = direct_sum(&parts).unwrap();
        for pattern in Pattern::ALL {
            let d = pattern.framed_module();
            let whole = box_ad(&total, &d).unwrap().homology_dim();
            let by_part: usize =
                parts.iter().map(|p| box_ad(p, &d).unwrap().homology_dim()).sum();
            assert_eq!(whole, by_part, "pattern {}", pattern.name());
        }
    }

    #[test]
    fn knot_data_validation_rejects_bad_input() {
        for (det, tau) in [(4, 0), (0, 0), (1, 1), (3, 0), (5, 1)] {
            assert!(
                matches!(AlternatingKnotData::new(det, tau), Err(HfrError::InvariantViolation(_))),
                "expected rejection of det = {det}, tau = {tau}"
            );
        }
        let k = AlternatingKnotData::new(11, -1).unwrap();
        assert_eq!(k.box_count(), 2);
    }

    #[test]
    fn fixture_lookup_covers_all_names() {
        for name in fixture_names() {
            let concrete = name.replace("<tau>", "-2");
            assert!(fixture(&concrete).is_some(), "fixture {concrete} missing");
        }
        assert!(fixture("nope").is_none());
        match fixture("staircase_d:2") {
            Some(Fixture::TypeD(d)) => assert_eq!(d.len(), 13),
            _ => panic!("expected a type D staircase"),
        }
    }
}
