//! Left differential comodule-style structures ("type D"): generators with
//! idempotents, a differential with algebra coefficients, the squared-zero
//! structure relation, boundedness, cancellation-based simplification,
//! substructures and quotients, and morphism complexes.

use crate::algebra::{
    xor_insert, AlgebraElement, AlgebraRef, Idempotent, StrandsDiagram,
};
use crate::complex::ChainComplex;
use crate::error::{HfrError, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// One term of the differential: source -> coeff ⊗ target. `tags` records
/// which construction rules produced the term (diagnostics only; ignored by
/// equality of structures).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Arrow {
    pub source: usize,
    pub coeff: StrandsDiagram,
    pub target: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tags: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TypeDStructure {
    pub algebra: AlgebraRef,
    pub labels: Vec<String>,
    pub idempotents: Vec<Idempotent>,
    pub arrows: Vec<Arrow>,
}

impl PartialEq for TypeDStructure {
    fn eq(&self, other: &Self) -> bool {
        self.algebra == other.algebra
            && self.labels == other.labels
            && self.idempotents == other.idempotents
            && strip_tags(&self.arrows) == strip_tags(&other.arrows)
    }
}
impl Eq for TypeDStructure {}

fn strip_tags(arrows: &[Arrow]) -> Vec<(usize, StrandsDiagram, usize)> {
    let mut v: Vec<_> = arrows
        .iter()
        .map(|a| (a.source, a.coeff.clone(), a.target))
        .collect();
    v.sort();
    v
}

impl TypeDStructure {
    /// Builds and validates. Arrows are parity-reduced: a term listed twice
    /// cancels; tags of merged copies are combined.
    pub fn new(
        algebra: AlgebraRef,
        labels: Vec<String>,
        idempotents: Vec<Idempotent>,
        arrows: Vec<Arrow>,
    ) -> Result<Self> {
        let mut merged: BTreeMap<(usize, StrandsDiagram, usize), (bool, Vec<String>)> =
            BTreeMap::new();
        for a in arrows {
            let e = merged
                .entry((a.source, a.coeff, a.target))
                .or_insert((false, Vec::new()));
            e.0 = !e.0;
            for t in a.tags {
                if !e.1.contains(&t) {
                    e.1.push(t);
                }
            }
        }
        let arrows: Vec<Arrow> = merged
            .into_iter()
            .filter(|(_, (odd, _))| *odd)
            .map(|((source, coeff, target), (_, tags))| Arrow { source, coeff, target, tags })
            .collect();
        let d = TypeDStructure { algebra, labels, idempotents, arrows };
        d.validate()?;
        Ok(d)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.idempotents.len() != self.labels.len() {
            return Err(HfrError::ValidationError(format!(
                "{} generators but {} idempotents",
                self.labels.len(),
                self.idempotents.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for l in &self.labels {
            if !seen.insert(l.clone()) {
                return Err(HfrError::ValidationError(format!("duplicate label {l}")));
            }
        }
        let pmc = &self.algebra.pmc;
        for a in &self.arrows {
            if a.source >= self.len() || a.target >= self.len() {
                return Err(HfrError::ValidationError(format!(
                    "arrow {}→{} out of range",
                    a.source, a.target
                )));
            }
            a.coeff.validate(pmc)?;
            if self.algebra.mult_one && a.coeff.max_multiplicity(pmc.points()) > 1 {
                return Err(HfrError::ValidationError(format!(
                    "coefficient {} has multiplicity ≥ 2 in a multiplicity-one algebra",
                    a.coeff
                )));
            }
            if a.coeff.left_idem(pmc) != self.idempotents[a.source] {
                return Err(HfrError::IdempotentMismatch(format!(
                    "arrow {}→{}: left idempotent of {} is {}, source carries {}",
                    self.labels[a.source],
                    self.labels[a.target],
                    a.coeff,
                    a.coeff.left_idem(pmc),
                    self.idempotents[a.source]
                )));
            }
            if a.coeff.right_idem(pmc) != self.idempotents[a.target] {
                return Err(HfrError::IdempotentMismatch(format!(
                    "arrow {}→{}: right idempotent of {} is {}, target carries {}",
                    self.labels[a.source],
                    self.labels[a.target],
                    a.coeff,
                    a.coeff.right_idem(pmc),
                    self.idempotents[a.target]
                )));
            }
        }
        Ok(())
    }

    /// Differential of one generator as target -> algebra element.
    pub fn delta(&self, x: usize) -> BTreeMap<usize, AlgebraElement> {
        let mut out: BTreeMap<usize, AlgebraElement> = BTreeMap::new();
        for a in &self.arrows {
            if a.source == x {
                xor_insert(out.entry(a.target).or_default(), a.coeff.clone());
            }
        }
        out.retain(|_, e| !e.is_empty());
        out
    }

    /// The squared-zero relation: algebra differential of each coefficient
    /// plus all two-step compositions must cancel.
    pub fn check_structure_relation(&self) -> Result<()> {
        let mut acc: BTreeMap<(usize, usize), AlgebraElement> = BTreeMap::new();
        for a in &self.arrows {
            for t in self.algebra.diff(&a.coeff) {
                xor_insert(acc.entry((a.source, a.target)).or_default(), t);
            }
        }
        let mut by_source: BTreeMap<usize, Vec<&Arrow>> = BTreeMap::new();
        for a in &self.arrows {
            by_source.entry(a.source).or_default().push(a);
        }
        for a in &self.arrows {
            if let Some(next) = by_source.get(&a.target) {
                for b in next {
                    for t in self.algebra.mul(&a.coeff, &b.coeff) {
                        xor_insert(acc.entry((a.source, b.target)).or_default(), t);
                    }
                }
            }
        }
        for ((x, z), e) in acc {
            if !e.is_empty() {
                let terms: Vec<String> = e.iter().map(|t| t.to_string()).collect();
                return Err(HfrError::RelationFailure(format!(
                    "δ² at {}→{}: {}",
                    self.labels[x],
                    self.labels[z],
                    terms.join(" + ")
                )));
            }
        }
        Ok(())
    }

    /// Ok(false) if the arrow graph has a cycle (unbounded); Ok(true) if
    /// acyclic with longest path within `cap`; the cap exceeded otherwise.
    pub fn is_bounded(&self, cap: usize) -> Result<bool> {
        let n = self.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut indeg = vec![0usize; n];
        for a in &self.arrows {
            adj[a.source].push(a.target);
            indeg[a.target] += 1;
        }
        let mut queue: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop() {
            order.push(v);
            for &w in &adj[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push(w);
                }
            }
        }
        if order.len() < n {
            return Ok(false);
        }
        let mut longest = vec![0usize; n];
        for &v in order.iter().rev() {
            for &w in &adj[v] {
                longest[v] = longest[v].max(1 + longest[w]);
            }
        }
        let max = longest.into_iter().max().unwrap_or(0);
        if max > cap {
            Err(HfrError::CapExceeded(max))
        } else {
            Ok(true)
        }
    }

    /// Subcomplex of arrows whose coefficient is an idempotent.
    pub fn provincial_complex(&self) -> ChainComplex {
        let mut diff = vec![BTreeSet::new(); self.len()];
        for a in &self.arrows {
            if a.coeff.is_idempotent() {
                // Parity-reduced arrow lists contain each term once.
                diff[a.source].insert(a.target);
            }
        }
        ChainComplex { labels: self.labels.clone(), differential: diff }
    }

    /// Cancels idempotent-coefficient arrows between distinct generators
    /// until none remain, in canonical (source, target) order.
    pub fn simplify(&self) -> Result<TypeDStructure> {
        let n = self.len();
        let mut alive = vec![true; n];
        // Entries as algebra elements indexed by (source, target).
        let mut entry: BTreeMap<(usize, usize), AlgebraElement> = BTreeMap::new();
        for a in &self.arrows {
            xor_insert(entry.entry((a.source, a.target)).or_default(), a.coeff.clone());
        }
        entry.retain(|_, e| !e.is_empty());
        loop {
            let pick = entry.iter().find_map(|(&(x, y), e)| {
                if x != y
                    && alive[x]
                    && alive[y]
                    && e.iter().any(|c| c.is_idempotent())
                {
                    Some((x, y))
                } else {
                    None
                }
            });
            let Some((x, y)) = pick else { break };
            let idem_diag = self.idempotents[x].to_diagram();
            let mut residual = entry.get(&(x, y)).cloned().unwrap_or_default();
            assert!(residual.remove(&idem_diag), "picked entry lost its idempotent term");
            // Geometric series over the residual; non-idempotent elements
            // are nilpotent, so this terminates.
            let mut series = AlgebraElement::new();
            series.insert(idem_diag);
            let mut power = AlgebraElement::new();
            power.insert(self.idempotents[x].to_diagram());
            loop {
                power = self.algebra.element_mul(&power, &residual);
                if power.is_empty() {
                    break;
                }
                for t in &power {
                    xor_insert(&mut series, t.clone());
                }
            }
            let col_y: Vec<(usize, AlgebraElement)> = entry
                .iter()
                .filter(|(&(w, t), _)| t == y && alive[w] && w != x && w != y)
                .map(|(&(w, _), e)| (w, e.clone()))
                .collect();
            let row_x: Vec<(usize, AlgebraElement)> = entry
                .iter()
                .filter(|(&(s, z), _)| s == x && alive[z] && z != x && z != y)
                .map(|(&(_, z), e)| (z, e.clone()))
                .collect();
            alive[x] = false;
            alive[y] = false;
            for (w, ew) in &col_y {
                let left = self.algebra.element_mul(ew, &series);
                for (z, ez) in &row_x {
                    let prod = self.algebra.element_mul(&left, ez);
                    let slot = entry.entry((*w, *z)).or_default();
                    for t in prod {
                        xor_insert(slot, t);
                    }
                }
            }
            entry.retain(|&(s, t), e| alive[s] && alive[t] && !e.is_empty());
        }
        let keep: Vec<usize> = (0..n).filter(|&i| alive[i]).collect();
        let reindex: BTreeMap<usize, usize> =
            keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let mut arrows = Vec::new();
        for ((s, t), e) in entry {
            for c in e {
                arrows.push(Arrow {
                    source: reindex[&s],
                    coeff: c,
                    target: reindex[&t],
                    tags: Vec::new(),
                });
            }
        }
        TypeDStructure::new(
            self.algebra.clone(),
            keep.iter().map(|&i| self.labels[i].clone()).collect(),
            keep.iter().map(|&i| self.idempotents[i].clone()).collect(),
            arrows,
        )
    }

    /// Substructure spanned by `keep`; fails unless `keep` is closed under
    /// arrow targets.
    pub fn substructure(&self, keep: &BTreeSet<usize>) -> Result<TypeDStructure> {
        for a in &self.arrows {
            if keep.contains(&a.source) && !keep.contains(&a.target) {
                return Err(HfrError::NotClosed(
                    a.source,
                    format!(
                        "arrow {} → {} leaves the span",
                        self.labels[a.source], self.labels[a.target]
                    ),
                ));
            }
        }
        let order: Vec<usize> = keep.iter().copied().collect();
        self.restrict(&order)
    }

    /// Quotient by the span of `drop`; fails unless `drop` is closed under
    /// arrow targets (so the projection is a chain map).
    pub fn quotient(&self, drop: &BTreeSet<usize>) -> Result<TypeDStructure> {
        for a in &self.arrows {
            if drop.contains(&a.source) && !drop.contains(&a.target) {
                return Err(HfrError::NotClosed(
                    a.source,
                    format!(
                        "arrow {} → {} leaves the dropped span",
                        self.labels[a.source], self.labels[a.target]
                    ),
                ));
            }
        }
        let order: Vec<usize> = (0..self.len()).filter(|i| !drop.contains(i)).collect();
        self.restrict(&order)
    }

    fn restrict(&self, order: &[usize]) -> Result<TypeDStructure> {
        let reindex: BTreeMap<usize, usize> =
            order.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let arrows = self
            .arrows
            .iter()
            .filter(|a| reindex.contains_key(&a.source) && reindex.contains_key(&a.target))
            .map(|a| Arrow {
                source: reindex[&a.source],
                coeff: a.coeff.clone(),
                target: reindex[&a.target],
                tags: a.tags.clone(),
            })
            .collect();
        TypeDStructure::new(
            self.algebra.clone(),
            order.iter().map(|&i| self.labels[i].clone()).collect(),
            order.iter().map(|&i| self.idempotents[i].clone()).collect(),
            arrows,
        )
    }

    /// Structural equality through generator labels: same label set, same
    /// idempotent per label, same arrow set per label pair. Ignores generator
    /// order, arrow tags, and the multiplicity cap of the declared algebra
    /// (only the underlying circles must agree).
    pub fn labeled_equal(&self, other: &TypeDStructure) -> bool {
        if self.algebra.pmc != other.algebra.pmc || self.len() != other.len() {
            return false;
        }
        let pos: BTreeMap<&String, usize> =
            other.labels.iter().enumerate().map(|(i, l)| (l, i)).collect();
        for (i, l) in self.labels.iter().enumerate() {
            match pos.get(l) {
                Some(&j) if other.idempotents[j] == self.idempotents[i] => {}
                _ => return false,
            }
        }
        let key = |d: &TypeDStructure| -> BTreeSet<(String, StrandsDiagram, String)> {
            d.arrows
                .iter()
                .map(|a| (d.labels[a.source].clone(), a.coeff.clone(), d.labels[a.target].clone()))
                .collect()
        };
        key(self) == key(other)
    }

    /// Connected components of the (undirected) arrow graph, each sorted.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for a in &self.arrows {
            let (ra, rb) = (find(&mut parent, a.source), find(&mut parent, a.target));
            if ra != rb {
                parent[ra] = rb;
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..n {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(i);
        }
        groups.into_values().collect()
    }

    /// Basis change y ↦ y + a ⊗ x (an involution); returns the conjugated
    /// structure. Requires compatible idempotents for the mixing term.
    pub fn transvect(&self, x: usize, y: usize, a: &StrandsDiagram) -> Result<TypeDStructure> {
        if x == y {
            return Err(HfrError::UsageError("transvection needs distinct generators".into()));
        }
        let pmc = &self.algebra.pmc;
        if a.left_idem(pmc) != self.idempotents[y] || a.right_idem(pmc) != self.idempotents[x] {
            return Err(HfrError::IdempotentMismatch(format!(
                "transvection coefficient {} does not map generator {} into {}",
                a, self.labels[y], self.labels[x]
            )));
        }
        let mut arrows: Vec<Arrow> = Vec::new();
        let push = |s: usize, c: StrandsDiagram, t: usize, arrows: &mut Vec<Arrow>| {
            arrows.push(Arrow { source: s, coeff: c, target: t, tags: Vec::new() });
        };
        for ar in &self.arrows {
            push(ar.source, ar.coeff.clone(), ar.target, &mut arrows);
            if ar.target == y {
                for t in self.algebra.mul(&ar.coeff, a) {
                    push(ar.source, t, x, &mut arrows);
                }
            }
        }
        for t in self.algebra.diff(a) {
            push(y, t, x, &mut arrows);
        }
        for ar in &self.arrows {
            if ar.source == x {
                for t in self.algebra.mul(a, &ar.coeff) {
                    push(y, t, ar.target, &mut arrows);
                }
                if ar.target == y {
                    for m in self.algebra.mul(a, &ar.coeff) {
                        for t in self.algebra.mul(&m, a) {
                            push(y, t, x, &mut arrows);
                        }
                    }
                }
            }
        }
        TypeDStructure::new(
            self.algebra.clone(),
            self.labels.clone(),
            self.idempotents.clone(),
            arrows,
        )
    }
}

impl fmt::Display for TypeDStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "type D structure over {} with {} generators",
            self.algebra,
            self.len()
        )?;
        for (i, l) in self.labels.iter().enumerate() {
            writeln!(f, "  {l}  ι = {}", self.idempotents[i])?;
        }
        for a in &self.arrows {
            let tags = if a.tags.is_empty() {
                String::new()
            } else {
                format!("   [{}]", a.tags.join(","))
            };
            writeln!(
                f,
                "  δ: {} → {} ⊗ {}{}",
                self.labels[a.source], a.coeff, self.labels[a.target], tags
            )?;
        }
        Ok(())
    }
}

/// Chain complex of module maps D₁ → D₂ over a shared algebra. Basis
/// elements are triples (x₁, a, x₂) with the idempotents of `a` matching the
/// generators on each side.
pub fn mor_to_d(d1: &TypeDStructure, d2: &TypeDStructure) -> Result<ChainComplex> {
    if d1.algebra != d2.algebra {
        return Err(HfrError::AlgebraMismatch(format!(
            "{} vs {}",
            d1.algebra, d2.algebra
        )));
    }
    let alg = &d1.algebra;
    let pmc = &alg.pmc;
    let mut basis_list: Vec<(usize, StrandsDiagram, usize)> = Vec::new();
    let all = if alg.mult_one {
        crate::algebra::enumerate_mult_one(pmc)
    } else {
        crate::algebra::enumerate_generators(pmc)
    };
    for (x1, i1) in d1.idempotents.iter().enumerate() {
        for a in &all {
            if a.left_idem(pmc) != *i1 {
                continue;
            }
            let ra = a.right_idem(pmc);
            for (x2, i2) in d2.idempotents.iter().enumerate() {
                if *i2 == ra {
                    basis_list.push((x1, a.clone(), x2));
                }
            }
        }
    }
    let index: BTreeMap<(usize, StrandsDiagram, usize), usize> = basis_list
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, b)| (b, i))
        .collect();
    let mut diff: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); basis_list.len()];
    let toggle = |from: usize, to: usize, diff: &mut Vec<BTreeSet<usize>>| {
        if !diff[from].remove(&to) {
            diff[from].insert(to);
        }
    };
    for (i, (x1, a, x2)) in basis_list.iter().enumerate() {
        for t in alg.diff(a) {
            toggle(i, index[&(*x1, t, *x2)], &mut diff);
        }
        for ar in &d2.arrows {
            if ar.source == *x2 {
                for t in alg.mul(a, &ar.coeff) {
                    toggle(i, index[&(*x1, t, ar.target)], &mut diff);
                }
            }
        }
        for ar in &d1.arrows {
            if ar.target == *x1 {
                for t in alg.mul(&ar.coeff, a) {
                    toggle(i, index[&(ar.source, t, *x2)], &mut diff);
                }
            }
        }
    }
    let labels = basis_list
        .iter()
        .map(|(x1, a, x2)| format!("({}, {}, {})", d1.labels[*x1], a, d2.labels[*x2]))
        .collect();
    ChainComplex::new(labels, diff)
}
