//! Interchange serialization: canonical, versioned UTF-8 JSON documents for
//! every structure the pipeline consumes or produces, with full invariant
//! revalidation on load so externally authored inputs are as trustworthy as
//! internally built ones.
//!
//! Documents carry a `format` stamp and a `kind` discriminator. Objects are
//! emitted with sorted keys, so identical structures serialize to identical
//! bytes across runs.

use crate::algebra::{AlgebraElement, AlgebraRef, Idempotent, StrandsDiagram};
use crate::astruct::{
    AOp, DAEntry, DDArrow, TypeAModule, TypeDABimodule, TypeDDBimodule,
};
use crate::complex::ChainComplex;
use crate::dstruct::{Arrow, TypeDStructure};
use crate::error::{HfrError, Result};
use crate::pmc::{make_pmc, PointedMatchedCircle};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::io::{Read, Write};
use std::path::Path;

/// Version stamp carried by every document.
pub const FORMAT: &str = "hfr-interchange/1";

/// Preferred file extension for interchange documents.
pub const EXTENSION: &str = ".hfr.json";

/// Any structure the interchange format can carry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Document {
    Pmc(PointedMatchedCircle),
    AlgebraElement { algebra: AlgebraRef, element: AlgebraElement },
    TypeD(TypeDStructure),
    TypeA(TypeAModule),
    BimoduleDA(TypeDABimodule),
    BimoduleDD(TypeDDBimodule),
    Complex(ChainComplex),
}

impl Document {
    /// The `kind` discriminator this document serializes under.
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Pmc(_) => "pmc",
            Document::AlgebraElement { .. } => "algebra_element",
            Document::TypeD(_) => "type_d",
            Document::TypeA(_) => "type_a",
            Document::BimoduleDA(_) => "da_bimodule",
            Document::BimoduleDD(_) => "dd_bimodule",
            Document::Complex(_) => "chain_complex",
        }
    }

    pub fn into_type_d(self) -> Result<TypeDStructure> {
        match self {
            Document::TypeD(d) => Ok(d),
            other => Err(wrong_kind("type_d", other.kind())),
        }
    }

    pub fn into_type_a(self) -> Result<TypeAModule> {
        match self {
            Document::TypeA(m) => Ok(m),
            other => Err(wrong_kind("type_a", other.kind())),
        }
    }

    pub fn into_da_bimodule(self) -> Result<TypeDABimodule> {
        match self {
            Document::BimoduleDA(b) => Ok(b),
            other => Err(wrong_kind("da_bimodule", other.kind())),
        }
    }

    pub fn into_dd_bimodule(self) -> Result<TypeDDBimodule> {
        match self {
            Document::BimoduleDD(b) => Ok(b),
            other => Err(wrong_kind("dd_bimodule", other.kind())),
        }
    }
}

fn wrong_kind(wanted: &str, got: &str) -> HfrError {
    HfrError::UsageError(format!("expected a '{wanted}' document, got '{got}'"))
}

// ---------------------------------------------------------------------------
// Document schema.

#[derive(Serialize, Deserialize)]
struct Envelope {
    format: String,
    #[serde(flatten)]
    body: Body,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Body {
    Pmc(PmcDoc),
    AlgebraElement(AlgebraElementDoc),
    TypeD(TypeDDoc),
    TypeA(TypeADoc),
    DaBimodule(DaDoc),
    DdBimodule(DdDoc),
    ChainComplex(ComplexDoc),
}

#[derive(Serialize, Deserialize)]
struct PmcDoc {
    points: usize,
    pairs: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct AlgebraDoc {
    pmc: PmcDoc,
    mult_one: bool,
}

#[derive(Serialize, Deserialize)]
struct DiagramDoc {
    moving: Vec<(usize, usize)>,
    horiz: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct GeneratorDoc {
    label: String,
    idempotent: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct AlgebraElementDoc {
    algebra: AlgebraDoc,
    terms: Vec<DiagramDoc>,
}

#[derive(Serialize, Deserialize)]
struct ArrowDoc {
    source: usize,
    coeff: DiagramDoc,
    target: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    tags: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct TypeDDoc {
    algebra: AlgebraDoc,
    generators: Vec<GeneratorDoc>,
    arrows: Vec<ArrowDoc>,
}

#[derive(Serialize, Deserialize)]
struct OpDoc {
    source: usize,
    inputs: Vec<DiagramDoc>,
    target: usize,
}

#[derive(Serialize, Deserialize)]
struct TypeADoc {
    algebra: AlgebraDoc,
    generators: Vec<GeneratorDoc>,
    ops: Vec<OpDoc>,
}

#[derive(Serialize, Deserialize)]
struct TwoSidedGeneratorDoc {
    label: String,
    left_idempotent: Vec<(usize, usize)>,
    right_idempotent: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct DaEntryDoc {
    source: usize,
    inputs: Vec<DiagramDoc>,
    output: DiagramDoc,
    target: usize,
}

#[derive(Serialize, Deserialize)]
struct DaDoc {
    out_algebra: AlgebraDoc,
    in_algebra: AlgebraDoc,
    generators: Vec<TwoSidedGeneratorDoc>,
    entries: Vec<DaEntryDoc>,
}

#[derive(Serialize, Deserialize)]
struct DdArrowDoc {
    source: usize,
    left: DiagramDoc,
    right: DiagramDoc,
    target: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    tags: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct DdDoc {
    left_algebra: AlgebraDoc,
    right_algebra: AlgebraDoc,
    generators: Vec<TwoSidedGeneratorDoc>,
    arrows: Vec<DdArrowDoc>,
}

#[derive(Serialize, Deserialize)]
struct ComplexDoc {
    labels: Vec<String>,
    differential: Vec<Vec<usize>>,
}

// ---------------------------------------------------------------------------
// Encoding.

fn encode_pmc(pmc: &PointedMatchedCircle) -> PmcDoc {
    PmcDoc { points: pmc.points(), pairs: pmc.pairs() }
}

fn encode_algebra(a: &AlgebraRef) -> AlgebraDoc {
    AlgebraDoc { pmc: encode_pmc(&a.pmc), mult_one: a.mult_one }
}

fn encode_diagram(d: &StrandsDiagram) -> DiagramDoc {
    DiagramDoc { moving: d.moving().to_vec(), horiz: d.horiz().to_vec() }
}

fn encode_generators(labels: &[String], idems: &[Idempotent]) -> Vec<GeneratorDoc> {
    labels
        .iter()
        .zip(idems)
        .map(|(l, i)| GeneratorDoc { label: l.clone(), idempotent: i.0.clone() })
        .collect()
}

fn encode_two_sided(
    labels: &[String],
    left: &[Idempotent],
    right: &[Idempotent],
) -> Vec<TwoSidedGeneratorDoc> {
    labels
        .iter()
        .zip(left.iter().zip(right))
        .map(|(l, (li, ri))| TwoSidedGeneratorDoc {
            label: l.clone(),
            left_idempotent: li.0.clone(),
            right_idempotent: ri.0.clone(),
        })
        .collect()
}

fn encode(doc: &Document) -> Body {
    match doc {
        Document::Pmc(p) => Body::Pmc(encode_pmc(p)),
        Document::AlgebraElement { algebra, element } => {
            Body::AlgebraElement(AlgebraElementDoc {
                algebra: encode_algebra(algebra),
                terms: element.iter().map(encode_diagram).collect(),
            })
        }
        Document::TypeD(d) => Body::TypeD(TypeDDoc {
            algebra: encode_algebra(&d.algebra),
            generators: encode_generators(&d.labels, &d.idempotents),
            arrows: d
                .arrows
                .iter()
                .map(|a| ArrowDoc {
                    source: a.source,
                    coeff: encode_diagram(&a.coeff),
                    target: a.target,
                    tags: a.tags.clone(),
                })
                .collect(),
        }),
        Document::TypeA(m) => Body::TypeA(TypeADoc {
            algebra: encode_algebra(&m.algebra),
            generators: encode_generators(&m.labels, &m.idempotents),
            ops: m
                .ops
                .iter()
                .map(|o| OpDoc {
                    source: o.source,
                    inputs: o.inputs.iter().map(encode_diagram).collect(),
                    target: o.target,
                })
                .collect(),
        }),
        Document::BimoduleDA(b) => Body::DaBimodule(DaDoc {
            out_algebra: encode_algebra(&b.out_algebra),
            in_algebra: encode_algebra(&b.in_algebra),
            generators: encode_two_sided(&b.labels, &b.out_idempotents, &b.in_idempotents),
            entries: b
                .entries
                .iter()
                .map(|e| DaEntryDoc {
                    source: e.source,
                    inputs: e.inputs.iter().map(encode_diagram).collect(),
                    output: encode_diagram(&e.output),
                    target: e.target,
                })
                .collect(),
        }),
        Document::BimoduleDD(b) => Body::DdBimodule(DdDoc {
            left_algebra: encode_algebra(&b.left_algebra),
            right_algebra: encode_algebra(&b.right_algebra),
            generators: encode_two_sided(&b.labels, &b.left_idempotents, &b.right_idempotents),
            arrows: b
                .arrows
                .iter()
                .map(|a| DdArrowDoc {
                    source: a.source,
                    left: encode_diagram(&a.left),
                    right: encode_diagram(&a.right),
                    target: a.target,
                    tags: a.tags.clone(),
                })
                .collect(),
        }),
        Document::Complex(c) => Body::ChainComplex(ComplexDoc {
            labels: c.labels.clone(),
            differential: c
                .differential
                .iter()
                .map(|row| row.iter().copied().collect())
                .collect(),
        }),
    }
}

// ---------------------------------------------------------------------------
// Decoding with revalidation.

/// Keeps an already-specific validation error, wraps anything else so the
/// loader's failures are uniformly reported with the violated invariant named.
fn as_validation(e: HfrError) -> HfrError {
    match e {
        HfrError::ValidationError(_) => e,
        other => HfrError::ValidationError(other.to_string()),
    }
}

fn decode_pmc(doc: &PmcDoc) -> Result<PointedMatchedCircle> {
    make_pmc(doc.points, &doc.pairs).map_err(as_validation)
}

fn decode_algebra(doc: &AlgebraDoc) -> Result<AlgebraRef> {
    let pmc = decode_pmc(&doc.pmc)?;
    Ok(AlgebraRef { pmc, mult_one: doc.mult_one })
}

fn decode_diagram(doc: &DiagramDoc, pmc: &PointedMatchedCircle) -> Result<StrandsDiagram> {
    let d = StrandsDiagram::new(doc.moving.clone(), doc.horiz.clone());
    d.validate(pmc).map_err(as_validation)?;
    Ok(d)
}

/// A stored idempotent must be a sorted list of distinct matched pairs of the
/// circle (written smaller point first).
fn decode_idempotent(
    pairs: &[(usize, usize)],
    pmc: &PointedMatchedCircle,
) -> Result<Idempotent> {
    let legal = pmc.pairs();
    for w in pairs.windows(2) {
        if w[0] >= w[1] {
            return Err(HfrError::ValidationError(format!(
                "idempotent pairs not strictly sorted: {:?}",
                pairs
            )));
        }
    }
    for p in pairs {
        if !legal.contains(p) {
            return Err(HfrError::ValidationError(format!(
                "idempotent entry {:?} is not a matched pair of the circle",
                p
            )));
        }
    }
    Ok(Idempotent(pairs.to_vec()))
}

fn decode_generators(
    gens: &[GeneratorDoc],
    pmc: &PointedMatchedCircle,
) -> Result<(Vec<String>, Vec<Idempotent>)> {
    let labels = gens.iter().map(|g| g.label.clone()).collect();
    let idems = gens
        .iter()
        .map(|g| decode_idempotent(&g.idempotent, pmc))
        .collect::<Result<Vec<_>>>()?;
    Ok((labels, idems))
}

fn decode_two_sided(
    gens: &[TwoSidedGeneratorDoc],
    left_pmc: &PointedMatchedCircle,
    right_pmc: &PointedMatchedCircle,
) -> Result<(Vec<String>, Vec<Idempotent>, Vec<Idempotent>)> {
    let labels = gens.iter().map(|g| g.label.clone()).collect();
    let left = gens
        .iter()
        .map(|g| decode_idempotent(&g.left_idempotent, left_pmc))
        .collect::<Result<Vec<_>>>()?;
    let right = gens
        .iter()
        .map(|g| decode_idempotent(&g.right_idempotent, right_pmc))
        .collect::<Result<Vec<_>>>()?;
    Ok((labels, left, right))
}

fn decode(body: Body) -> Result<Document> {
    match body {
        Body::Pmc(doc) => Ok(Document::Pmc(decode_pmc(&doc)?)),
        Body::AlgebraElement(doc) => {
            let algebra = decode_algebra(&doc.algebra)?;
            let mut element = AlgebraElement::new();
            for t in &doc.terms {
                let d = decode_diagram(t, &algebra.pmc)?;
                if algebra.mult_one && d.max_multiplicity(algebra.pmc.points()) > 1 {
                    return Err(HfrError::ValidationError(format!(
                        "term {d} has multiplicity ≥ 2 in a multiplicity-one algebra"
                    )));
                }
                element.insert(d);
            }
            Ok(Document::AlgebraElement { algebra, element })
        }
        Body::TypeD(doc) => {
            let algebra = decode_algebra(&doc.algebra)?;
            let (labels, idempotents) = decode_generators(&doc.generators, &algebra.pmc)?;
            let arrows = doc
                .arrows
                .iter()
                .map(|a| {
                    Ok(Arrow {
                        source: a.source,
                        coeff: decode_diagram(&a.coeff, &algebra.pmc)?,
                        target: a.target,
                        tags: a.tags.clone(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let d = TypeDStructure::new(algebra, labels, idempotents, arrows)
                .map_err(as_validation)?;
            Ok(Document::TypeD(d))
        }
        Body::TypeA(doc) => {
            let algebra = decode_algebra(&doc.algebra)?;
            let (labels, idempotents) = decode_generators(&doc.generators, &algebra.pmc)?;
            let ops = doc
                .ops
                .iter()
                .map(|o| {
                    Ok(AOp {
                        source: o.source,
                        inputs: o
                            .inputs
                            .iter()
                            .map(|i| decode_diagram(i, &algebra.pmc))
                            .collect::<Result<Vec<_>>>()?,
                        target: o.target,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let m = TypeAModule::new(algebra, labels, idempotents, ops)
                .map_err(as_validation)?;
            Ok(Document::TypeA(m))
        }
        Body::DaBimodule(doc) => {
            let out_algebra = decode_algebra(&doc.out_algebra)?;
            let in_algebra = decode_algebra(&doc.in_algebra)?;
            let (labels, out_idems, in_idems) =
                decode_two_sided(&doc.generators, &out_algebra.pmc, &in_algebra.pmc)?;
            let entries = doc
                .entries
                .iter()
                .map(|e| {
                    Ok(DAEntry {
                        source: e.source,
                        inputs: e
                            .inputs
                            .iter()
                            .map(|i| decode_diagram(i, &in_algebra.pmc))
                            .collect::<Result<Vec<_>>>()?,
                        output: decode_diagram(&e.output, &out_algebra.pmc)?,
                        target: e.target,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let b = TypeDABimodule::new(
                out_algebra,
                in_algebra,
                labels,
                out_idems,
                in_idems,
                entries,
            )
            .map_err(as_validation)?;
            Ok(Document::BimoduleDA(b))
        }
        Body::DdBimodule(doc) => {
            let left_algebra = decode_algebra(&doc.left_algebra)?;
            let right_algebra = decode_algebra(&doc.right_algebra)?;
            let (labels, left_idems, right_idems) =
                decode_two_sided(&doc.generators, &left_algebra.pmc, &right_algebra.pmc)?;
            let arrows = doc
                .arrows
                .iter()
                .map(|a| {
                    Ok(DDArrow {
                        source: a.source,
                        left: decode_diagram(&a.left, &left_algebra.pmc)?,
                        right: decode_diagram(&a.right, &right_algebra.pmc)?,
                        target: a.target,
                        tags: a.tags.clone(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let b = TypeDDBimodule::new(
                left_algebra,
                right_algebra,
                labels,
                left_idems,
                right_idems,
                arrows,
            )
            .map_err(as_validation)?;
            Ok(Document::BimoduleDD(b))
        }
        Body::ChainComplex(doc) => {
            let differential: Vec<BTreeSet<usize>> = doc
                .differential
                .iter()
                .map(|row| row.iter().copied().collect())
                .collect();
            let c = ChainComplex::new(doc.labels, differential).map_err(as_validation)?;
            Ok(Document::Complex(c))
        }
    }
}

// ---------------------------------------------------------------------------
// Entry points.

/// Canonical serialized form: pretty-printed JSON with sorted object keys
/// and a trailing newline. A pure function of the document.
pub fn to_canonical_string(doc: &Document) -> Result<String> {
    let env = Envelope { format: FORMAT.to_string(), body: encode(doc) };
    let value =
        serde_json::to_value(&env).map_err(|e| HfrError::SinkFailure(e.to_string()))?;
    let mut text = serde_json::to_string_pretty(&value)
        .map_err(|e| HfrError::SinkFailure(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// Writes the canonical form into the sink; returns bytes written.
pub fn save<W: Write>(doc: &Document, mut sink: W) -> Result<usize> {
    let text = to_canonical_string(doc)?;
    sink.write_all(text.as_bytes())
        .map_err(|e| HfrError::SinkFailure(e.to_string()))?;
    Ok(text.len())
}

/// Writes the canonical form to a file; returns bytes written.
pub fn save_path<P: AsRef<Path>>(doc: &Document, path: P) -> Result<usize> {
    let file = std::fs::File::create(path.as_ref())
        .map_err(|e| HfrError::SinkFailure(format!("{}: {e}", path.as_ref().display())))?;
    save(doc, file)
}

/// Parses and revalidates one document from text.
pub fn load_str(text: &str) -> Result<Document> {
    let env: Envelope =
        serde_json::from_str(text).map_err(|e| HfrError::ParseError(e.to_string()))?;
    if env.format != FORMAT {
        return Err(HfrError::ParseError(format!(
            "unsupported format '{}' (expected '{FORMAT}')",
            env.format
        )));
    }
    decode(env.body)
}

/// Parses and revalidates one document from a reader.
pub fn load<R: Read>(mut source: R) -> Result<Document> {
    let mut text = String::new();
    source
        .read_to_string(&mut text)
        .map_err(|e| HfrError::ParseError(e.to_string()))?;
    load_str(&text)
}

/// Parses and revalidates one document from a file.
pub fn load_path<P: AsRef<Path>>(path: P) -> Result<Document> {
    let file = std::fs::File::open(path.as_ref())
        .map_err(|e| HfrError::ParseError(format!("{}: {e}", path.as_ref().display())))?;
    load(file)
}
