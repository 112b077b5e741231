//! Type D structures generated by reflection-symmetric strands diagrams,
//! their chord-rule differentials, the multiplicity-two reduction, the
//! reduced lower-half model, the lower-half pairing module, and the identity
//! DD bimodule.
//!
//! The extension-rule differential is assembled rule by rule; every arrow
//! remembers which rule produced it through its tag ("(i)" … "(ix)"), so
//! differentials can be audited term by term. The companion structure is its
//! reflected transpose: reversing the half-circle orientation reverses every
//! extension arrow and reflects its coefficient, and since reflection is an
//! anti-automorphism commuting with the algebra differential, the structure
//! relation carries over verbatim.

use crate::algebra::{
    complement_idempotent, enumerate_generators, enumerate_mult_one, is_symmetric, AlgebraElement,
    AlgebraRef, Idempotent, StrandsDiagram,
};
use crate::astruct::{enumerate_idempotents, AOp, DDArrow, TypeAModule, TypeDDBimodule};
use crate::dstruct::{Arrow, TypeDStructure};
use crate::error::{HfrError, Result};
use crate::pmc::{
    make_pmc, quotient_orientable, realify, PointedMatchedCircle, RealPointedMatchedCircle,
};
use std::collections::{BTreeMap, BTreeSet};

/// All central basis diagrams fixed by the reflection, in canonical order.
pub fn symmetric_generators(rpmc: &RealPointedMatchedCircle) -> Vec<StrandsDiagram> {
    enumerate_generators(rpmc.circle())
        .into_iter()
        .filter(|a| is_symmetric(rpmc, a))
        .collect()
}

fn pair_of(pmc: &PointedMatchedCircle, p: usize) -> (usize, usize) {
    let q = pmc.matched(p);
    (p.min(q), p.max(q))
}

/// A single upward chord, padded with horizontal pairs so that its left
/// idempotent is exactly `idem`. `None` when the chord's own pair is not in
/// `idem` or some pad point collides with a chord endpoint.
pub fn pad_chord_left(
    pmc: &PointedMatchedCircle,
    idem: &Idempotent,
    chord: (usize, usize),
) -> Option<StrandsDiagram> {
    let (u, v) = chord;
    if !idem.contains_pair(pair_of(pmc, u)) {
        return None;
    }
    let mut horiz = Vec::new();
    for &(x, y) in idem.pairs() {
        if (x, y) == pair_of(pmc, u) {
            continue;
        }
        horiz.push(x);
        horiz.push(y);
    }
    if horiz.contains(&u) || horiz.contains(&v) {
        return None;
    }
    let d = StrandsDiagram::new(vec![(u, v)], horiz);
    d.validate(pmc).ok()?;
    Some(d)
}

/// As `pad_chord_left`, but prescribing the right idempotent.
pub fn pad_chord_right(
    pmc: &PointedMatchedCircle,
    idem: &Idempotent,
    chord: (usize, usize),
) -> Option<StrandsDiagram> {
    let (u, v) = chord;
    if !idem.contains_pair(pair_of(pmc, v)) {
        return None;
    }
    let mut horiz = Vec::new();
    for &(x, y) in idem.pairs() {
        if (x, y) == pair_of(pmc, v) {
            continue;
        }
        horiz.push(x);
        horiz.push(y);
    }
    if horiz.contains(&u) || horiz.contains(&v) {
        return None;
    }
    let d = StrandsDiagram::new(vec![(u, v)], horiz);
    d.validate(pmc).ok()?;
    Some(d)
}

/// Replaces the `consumed` strands of `a` by the `produced` chords, both in
/// normalized (lo, hi) form with lo == hi denoting a horizontal point. A
/// consumed horizontal point takes its matched partner with it; a produced
/// one brings its partner in. `None` when the result is not a valid central
/// diagram.
fn rewrite(
    pmc: &PointedMatchedCircle,
    a: &StrandsDiagram,
    consumed: &[(usize, usize)],
    produced: &[(usize, usize)],
) -> Option<StrandsDiagram> {
    let mut moving: Vec<(usize, usize)> = a.moving().to_vec();
    let mut horiz: BTreeSet<usize> = a.horiz().iter().copied().collect();
    for &(x, y) in consumed {
        if x == y {
            if !horiz.remove(&x) || !horiz.remove(&pmc.matched(x)) {
                return None;
            }
        } else {
            let pos = moving.iter().position(|&s| s == (x, y))?;
            moving.remove(pos);
        }
    }
    for &(x, y) in produced {
        if x == y {
            if !horiz.insert(x) || !horiz.insert(pmc.matched(x)) {
                return None;
            }
        } else {
            moving.push((x, y));
        }
    }
    let b = StrandsDiagram::new(moving, horiz.into_iter().collect());
    b.validate(pmc).ok()?;
    Some(b)
}

fn norm(x: usize, y: usize) -> (usize, usize) {
    (x.min(y), x.max(y))
}

/// Which of the two structures to build. `Tilde` runs the extension rules
/// directly, padding coefficients against the complement of the left
/// idempotent of each generator; `Star` is the reflected transpose of
/// `Tilde`, with idempotents taken against the complement of the right
/// idempotent instead.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Variant {
    Tilde,
    Star,
}

struct RuleEngine<'a> {
    pmc: &'a PointedMatchedCircle,
    n: usize,
    index: &'a BTreeMap<StrandsDiagram, usize>,
    idems: &'a [Idempotent],
}

impl RuleEngine<'_> {
    fn arrows_from(&self, src: usize, a: &StrandsDiagram) -> Vec<Arrow> {
        let n = self.n;
        let t = |i: usize| n + 1 - i;
        let mv: Vec<(usize, usize)> = a.moving().to_vec();
        let mut fixed: Vec<(usize, usize)> = Vec::new();
        let mut nonfixed: Vec<(usize, usize)> = Vec::new();
        for &s in &mv {
            if s.1 == t(s.0) {
                fixed.push(s);
            } else {
                nonfixed.push(s);
            }
        }
        // Width-zero strands standing in for horizontal points; several
        // rules quantify over these alongside the honest moving strands.
        let nonfixed_ext: Vec<(usize, usize)> = nonfixed
            .iter()
            .copied()
            .chain(a.horiz().iter().map(|&p| (p, p)))
            .collect();
        // True when some honest strand [p, q] has p strictly inside the
        // first range and q strictly inside the second.
        let blocked = |ilo: usize, ihi: usize, jlo: usize, jhi: usize| {
            mv.iter().any(|&(p, q)| ilo < p && p < ihi && jlo < q && q < jhi)
        };

        let mut out: Vec<Arrow> = Vec::new();
        let mut seen: BTreeSet<(&'static str, Vec<(usize, usize)>, StrandsDiagram)> =
            BTreeSet::new();
        let mut emit = |tag: &'static str,
                        consumed: Vec<(usize, usize)>,
                        produced: Vec<(usize, usize)>,
                        chord: Option<(usize, usize)>| {
            let Some(b) = rewrite(self.pmc, a, &consumed, &produced) else {
                return;
            };
            let Some(&target) = self.index.get(&b) else {
                return;
            };
            let coeff = match chord {
                None => self.idems[src].to_diagram(),
                Some(c) => match pad_chord_left(self.pmc, &self.idems[src], c) {
                    Some(d) => d,
                    None => return,
                },
            };
            // A term only survives when the idempotents permit it: the
            // coefficient must end on exactly the pairs the target occupies.
            if coeff.right_idem(self.pmc) != self.idems[target] {
                return;
            }
            let mut key_consumed = consumed;
            key_consumed.sort_unstable();
            if !seen.insert((tag, key_consumed, b)) {
                return;
            }
            out.push(Arrow { source: src, coeff, target, tags: vec![tag.to_string()] });
        };

        // (i): two nested reflection-fixed strands swap lower ends.
        for &f1 in &fixed {
            for &f2 in &fixed {
                let (i, ti) = f1;
                let (jj, tjj) = f2;
                if !(i < jj) {
                    continue;
                }
                if blocked(i, jj, tjj, ti) {
                    continue;
                }
                emit("(i)", vec![f1, f2], vec![(i, tjj), (jj, ti)], None);
            }
        }
        // (ii): a strand over a nested strand (possibly width-zero);
        // both swap with their mirrors.
        for &(i, j) in &nonfixed {
            for &inner in &nonfixed_ext {
                let (l, m) = inner;
                if !(i < l && m < j && j < t(l)) {
                    continue;
                }
                if blocked(i, l, m, j) {
                    continue;
                }
                emit(
                    "(ii)",
                    vec![(i, j), (t(j), t(i)), inner, (t(m), t(l))],
                    vec![(i, m), (l, j), (t(j), t(l)), (t(m), t(i))],
                    None,
                );
            }
        }
        // (iii): a midpoint-spanning strand around a reflection-fixed
        // strand nested in its middle.
        for &(i, j) in &nonfixed {
            for &(m, tm) in &fixed {
                if !(i < t(j) && t(j) < m && tm < j) {
                    continue;
                }
                if blocked(i, m, tm, j) {
                    continue;
                }
                emit(
                    "(iii)",
                    vec![(i, j), (t(j), t(i)), (m, tm)],
                    vec![(i, tm), (t(j), j), (m, t(i))],
                    None,
                );
            }
        }
        // (iv): a strand (possibly width-zero) nested inside a
        // reflection-fixed strand. Only the lower representative of the
        // mirror pair names the instance; the fixed strand encloses both.
        for &s in &nonfixed_ext {
            for &(m, tm) in &fixed {
                let (i, j) = s;
                if !(j < t(i)) {
                    continue;
                }
                if !(m < i && j < tm) {
                    continue;
                }
                if blocked(m, i, j, tm) {
                    continue;
                }
                emit(
                    "(iv)",
                    vec![s, (t(j), t(i)), (m, tm)],
                    vec![(m, j), (t(j), tm), norm(i, t(i))],
                    None,
                );
            }
        }
        // (v): a midpoint-spanning strand together with a separate
        // strand (possibly width-zero) in its middle region.
        for &(i, j) in &nonfixed {
            for &inner in &nonfixed_ext {
                let (l, m) = inner;
                if !(i < t(j) && t(j) < l && l < t(m) && m < j) {
                    continue;
                }
                if blocked(i, l, m, j) {
                    continue;
                }
                emit(
                    "(v)",
                    vec![(i, j), (t(j), t(i)), inner, (t(m), t(l))],
                    vec![(i, m), (t(j), j), (l, t(l)), (t(m), t(i))],
                    None,
                );
            }
        }
        // (vi): extend a strand's end upward to l; coefficient is the
        // mirrored extension.
        for &(i, j) in &nonfixed_ext {
            if !(j < t(i)) {
                continue;
            }
            for l in (j + 1)..t(i) {
                if blocked(0, i, j, l) {
                    continue;
                }
                emit(
                    "(vi)",
                    vec![norm(i, j), (t(j), t(i))],
                    vec![(i, l), (t(l), t(i))],
                    Some((t(l), t(j))),
                );
            }
        }
        // (vii): extend a strand's start downward to l.
        for &(i, j) in &nonfixed_ext {
            if !(j < t(i)) {
                continue;
            }
            for l in 1..i {
                if blocked(l, i, j, n + 1) {
                    continue;
                }
                emit(
                    "(vii)",
                    vec![norm(i, j), (t(j), t(i))],
                    vec![(l, j), (t(j), t(l))],
                    Some((l, i)),
                );
            }
        }
        // (viii): extend a reflection-fixed strand past the far end.
        for &(i, ti) in &fixed {
            for l in (ti + 1)..=n {
                if blocked(0, i, ti, l) {
                    continue;
                }
                emit("(viii)", vec![(i, ti)], vec![(t(l), l)], Some((t(l), i)));
            }
        }
        // (ix): close a strand and its mirror into the two
        // reflection-fixed chords through i and l.
        for &(i, j) in &nonfixed_ext {
            if !(j < t(i)) {
                continue;
            }
            for l in (t(i) + 1)..=n {
                if blocked(0, i, j, l) {
                    continue;
                }
                emit(
                    "(ix)",
                    vec![norm(i, j), (t(j), t(i))],
                    vec![(i, t(i)), (t(l), l)],
                    Some((t(l), t(j))),
                );
            }
        }
        out
    }
}

fn build_cfdr(rpmc: &RealPointedMatchedCircle, variant: Variant) -> Result<TypeDStructure> {
    let z = rpmc.circle();
    let n = z.points();
    let gens = symmetric_generators(rpmc);
    let index: BTreeMap<StrandsDiagram, usize> =
        gens.iter().enumerate().map(|(i, g)| (g.clone(), i)).collect();
    let tilde_idems: Vec<Idempotent> =
        gens.iter().map(|a| complement_idempotent(z, &a.left_idem(z))).collect();
    let engine = RuleEngine { pmc: z, n, index: &index, idems: &tilde_idems };
    let mut arrows = Vec::new();
    for (src, a) in gens.iter().enumerate() {
        arrows.extend(engine.arrows_from(src, a));
    }
    match variant {
        Variant::Tilde => {
            let labels = gens.iter().map(|a| format!("{a}~")).collect();
            TypeDStructure::new(AlgebraRef::full(z.clone()), labels, tilde_idems, arrows)
        }
        Variant::Star => {
            // Reversing the half-circle orientation reverses every arrow and
            // reflects its coefficient; reflection being an anti-automorphism
            // that commutes with the algebra differential, the structure
            // relation for the transpose follows from the one just built.
            let labels = gens.iter().map(|a| format!("{a}*")).collect();
            let star_idems: Vec<Idempotent> =
                gens.iter().map(|a| complement_idempotent(z, &a.right_idem(z))).collect();
            let star_arrows = arrows
                .into_iter()
                .map(|ar| Arrow {
                    source: ar.target,
                    coeff: ar.coeff.reflect(n),
                    target: ar.source,
                    tags: ar.tags,
                })
                .collect();
            TypeDStructure::new(AlgebraRef::full(z.clone()), labels, star_idems, star_arrows)
        }
    }
}

/// Type D structure on the symmetric diagrams whose coefficients pad against
/// the complement of each generator's left idempotent.
pub fn cfdr_az(rpmc: &RealPointedMatchedCircle) -> Result<TypeDStructure> {
    build_cfdr(rpmc, Variant::Tilde)
}

/// The reflected transpose of [`cfdr_az`]: the same generators starred, every
/// arrow reversed with its coefficient reflected, and idempotents taken
/// against the complement of the right idempotent.
pub fn cfdr_azbar(rpmc: &RealPointedMatchedCircle) -> Result<TypeDStructure> {
    build_cfdr(rpmc, Variant::Star)
}

/// Splitting of a symmetric-diagram structure along local multiplicity:
/// generators with some multiplicity ≥ 2 span a closed substructure whose
/// provincial homology vanishes; the quotient keeps the rest.
pub struct Mult2Reduction {
    pub substructure: TypeDStructure,
    pub quotient: TypeDStructure,
    /// Provincial homology dimension of the substructure.
    pub substructure_homology: usize,
}

impl Mult2Reduction {
    pub fn contractible(&self) -> bool {
        self.substructure_homology == 0
    }
}

/// Splits a symmetric-diagram structure (as produced by `cfdr_az` or
/// `cfdr_azbar`) along the multiplicity-two line.
pub fn mult2_reduction(d: &TypeDStructure) -> Result<Mult2Reduction> {
    let rp = realify(&d.algebra.pmc)?;
    let n = d.algebra.pmc.points();
    let by_display: BTreeMap<String, StrandsDiagram> = symmetric_generators(&rp)
        .into_iter()
        .map(|g| (format!("{g}"), g))
        .collect();
    let mut heavy: BTreeSet<usize> = BTreeSet::new();
    for (i, label) in d.labels.iter().enumerate() {
        let stripped = label.strip_suffix('~').or_else(|| label.strip_suffix('*'));
        let diagram = stripped.and_then(|s| by_display.get(s)).ok_or_else(|| {
            HfrError::ValidationError(format!(
                "generator {label} does not name a symmetric diagram"
            ))
        })?;
        if diagram.max_multiplicity(n) >= 2 {
            heavy.insert(i);
        }
    }
    let substructure = d.substructure(&heavy)?;
    let quotient = d.quotient(&heavy)?;
    let substructure_homology = substructure.provincial_complex().homology_dim();
    Ok(Mult2Reduction { substructure, quotient, substructure_homology })
}

/// The circle on the lower half of the points, defined when the matching
/// never crosses the midpoint.
pub fn lower_half_pmc(rpmc: &RealPointedMatchedCircle) -> Result<PointedMatchedCircle> {
    if !quotient_orientable(rpmc) {
        return Err(HfrError::NonorientableQuotient);
    }
    let n2 = rpmc.points() / 2;
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for i in 1..=n2 {
        pairs.insert(pair_of(rpmc.circle(), i));
    }
    let pairs: Vec<(usize, usize)> = pairs.into_iter().collect();
    make_pmc(n2, &pairs)
}

/// The symmetric diagram on the full circle built from a lower-half diagram
/// and its reflection.
pub fn double_diagram(n: usize, a: &StrandsDiagram) -> StrandsDiagram {
    let mut moving: Vec<(usize, usize)> = a.moving().to_vec();
    let mut horiz: Vec<usize> = a.horiz().to_vec();
    for &(i, j) in a.moving() {
        moving.push((n + 1 - j, n + 1 - i));
    }
    for &p in a.horiz() {
        horiz.push(n + 1 - p);
    }
    StrandsDiagram::new(moving, horiz)
}

/// The reduced model over the multiplicity-one algebra: generators are the
/// multiplicity-one diagrams of the lower-half circle, and the differential
/// combines the internal differential with single-chord extensions on either
/// side (the coefficient of a right extension is the reflected chord).
pub fn small_model(rpmc: &RealPointedMatchedCircle) -> Result<TypeDStructure> {
    let zl = lower_half_pmc(rpmc)?;
    let z = rpmc.circle();
    let n = z.points();
    let n2 = n / 2;
    let t = |i: usize| n + 1 - i;
    let alg_low = AlgebraRef::mult_one(zl.clone());
    let gens = enumerate_mult_one(&zl);
    let index: BTreeMap<StrandsDiagram, usize> =
        gens.iter().enumerate().map(|(i, g)| (g.clone(), i)).collect();
    let mut labels = Vec::new();
    let mut idems = Vec::new();
    for a in &gens {
        labels.push(format!("{}~", double_diagram(n, a)));
        let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
        for &(x, y) in a.left_idem(&zl).pairs() {
            pairs.insert((x, y));
        }
        for &(x, y) in a.right_idem(&zl).pairs() {
            pairs.insert(norm(t(x), t(y)));
        }
        let occupied = Idempotent(pairs.into_iter().collect());
        idems.push(complement_idempotent(z, &occupied));
    }
    let mut arrows = Vec::new();
    for (ia, a) in gens.iter().enumerate() {
        for b in alg_low.diff(a) {
            arrows.push(Arrow {
                source: ia,
                coeff: idems[ia].to_diagram(),
                target: index[&b],
                tags: vec!["int".to_string()],
            });
        }
        for u in 1..n2 {
            for v in (u + 1)..=n2 {
                // Right extension by the chord [u, v]; the structure
                // coefficient is its reflection in the upper half.
                if let Some(rho) = pad_chord_left(&zl, &a.right_idem(&zl), (u, v)) {
                    if let Some(coeff) = pad_chord_left(z, &idems[ia], (t(v), t(u))) {
                        for b in alg_low.mul(a, &rho) {
                            arrows.push(Arrow {
                                source: ia,
                                coeff: coeff.clone(),
                                target: index[&b],
                                tags: vec!["right".to_string()],
                            });
                        }
                    }
                }
                // Left extension by the same chord, kept in the lower half.
                if let Some(rho) = pad_chord_right(&zl, &a.left_idem(&zl), (u, v)) {
                    if let Some(coeff) = pad_chord_left(z, &idems[ia], (u, v)) {
                        for b in alg_low.mul(&rho, a) {
                            arrows.push(Arrow {
                                source: ia,
                                coeff: coeff.clone(),
                                target: index[&b],
                                tags: vec!["left".to_string()],
                            });
                        }
                    }
                }
            }
        }
    }
    TypeDStructure::new(AlgebraRef::mult_one(z.clone()), labels, idems, arrows)
}

fn singleton(d: StrandsDiagram) -> AlgebraElement {
    let mut s = AlgebraElement::new();
    s.insert(d);
    s
}

/// Right module on the multiplicity-one diagrams of the lower-half circle,
/// over the multiplicity-one algebra of the reversed full circle. Stored
/// operations are the one-input differential and the single-chord actions;
/// the action of a product of chords is recovered by composing these.
pub fn cfar_az(rpmc: &RealPointedMatchedCircle) -> Result<TypeAModule> {
    let zl = lower_half_pmc(rpmc)?;
    let z = rpmc.circle();
    let zr = z.reverse();
    let n = z.points();
    let n2 = n / 2;
    let t = |i: usize| n + 1 - i;
    let alg_low = AlgebraRef::mult_one(zl.clone());
    let gens = enumerate_mult_one(&zl);
    let index: BTreeMap<StrandsDiagram, usize> =
        gens.iter().enumerate().map(|(i, g)| (g.clone(), i)).collect();
    let mut labels = Vec::new();
    let mut idems = Vec::new();
    for a in &gens {
        labels.push(format!("{a}"));
        let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
        for &(x, y) in a.right_idem(&zl).pairs() {
            pairs.insert((x, y));
        }
        for &(x, y) in a.left_idem(&zl).pairs() {
            pairs.insert(norm(t(x), t(y)));
        }
        idems.push(Idempotent(pairs.into_iter().collect()));
    }
    let mut ops = Vec::new();
    for (ia, a) in gens.iter().enumerate() {
        for b in alg_low.diff(a) {
            ops.push(AOp { source: ia, inputs: vec![], target: index[&b] });
        }
        for u in 1..=n {
            for v in (u + 1)..=n {
                let Some(c) = pad_chord_left(&zr, &idems[ia], (u, v)) else {
                    continue;
                };
                if u <= n2 && v > n2 {
                    continue; // a strand across the midpoint acts by zero
                }
                let Some((lo, up)) = c.split_halves(n2) else {
                    continue;
                };
                let upr = up.reflect(n);
                if lo.validate(&zl).is_err() || upr.validate(&zl).is_err() {
                    continue;
                }
                let acc = alg_low.element_mul(&alg_low.mul(&upr, a), &singleton(lo));
                for b in acc {
                    ops.push(AOp { source: ia, inputs: vec![c.clone()], target: index[&b] });
                }
            }
        }
    }
    TypeAModule::new(AlgebraRef::mult_one(zr), labels, idems, ops)
}

/// Identity DD bimodule of the multiplicity-one algebra: one generator per
/// idempotent, one arrow per chord whose two paddings both exist; the right
/// coefficient is the reflected chord over the reversed circle.
pub fn cfdd_identity(pmc: &PointedMatchedCircle) -> Result<TypeDDBimodule> {
    let n = pmc.points();
    let rev = pmc.reverse();
    let idems = enumerate_idempotents(pmc);
    let index: BTreeMap<Idempotent, usize> =
        idems.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
    let mut labels = Vec::new();
    let mut rights = Vec::new();
    for a in &idems {
        labels.push(format!("{a}"));
        let comp = complement_idempotent(pmc, a);
        let pairs: Vec<(usize, usize)> =
            comp.pairs().iter().map(|&(x, y)| norm(n + 1 - x, n + 1 - y)).collect();
        let mut pairs = pairs;
        pairs.sort_unstable();
        rights.push(Idempotent(pairs));
    }
    let mut arrows = Vec::new();
    for (g, a) in idems.iter().enumerate() {
        for u in 1..=n {
            for v in (u + 1)..=n {
                let Some(left) = pad_chord_left(pmc, a, (u, v)) else {
                    continue;
                };
                let Some(right) = pad_chord_left(&rev, &rights[g], (n + 1 - v, n + 1 - u)) else {
                    continue;
                };
                let target = index[&left.right_idem(pmc)];
                arrows.push(DDArrow { source: g, left, right, target, tags: vec![] });
            }
        }
    }
    TypeDDBimodule::new(
        AlgebraRef::mult_one(pmc.clone()),
        AlgebraRef::mult_one(rev),
        labels,
        idems,
        rights,
        arrows,
    )
}
