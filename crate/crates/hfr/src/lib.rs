//! Strands algebras over pointed matched circles carrying an involutive
//! symmetry, together with the associated type D / type A structures, box
//! tensor products, morphism complexes, and satellite dimension formulas.
//!
//! The crate is organized bottom-up:
//!
//! * [`pmc`] — pointed matched circles and their symmetric refinements;
//! * [`algebra`] — strands diagrams, products, differentials, multiplicity
//!   truncation;
//! * [`complex`] — sparse F₂ chain complexes and homology;
//! * [`dstruct`] — type D structures (arrows with algebra coefficients),
//!   structure relation checking, cancellation, substructures;
//! * [`astruct`] — type A modules, DA/DD bimodules, box tensor products,
//!   morphism complexes;
//! * [`az`] — the diagonal-diagram type D/A structures and their small
//!   models;
//! * [`satellites`] — staircase/box fixtures, pattern modules, dimension
//!   formulas;
//! * [`io`] — canonical JSON interchange;
//! * [`reproduce`] — the acceptance checks behind `hfr reproduce`.

pub mod algebra;
pub mod astruct;
pub mod az;
pub mod cli;
pub mod complex;
pub mod dstruct;
pub mod error;
pub mod io;
pub mod pmc;
pub mod reproduce;
pub mod satellites;

pub use error::HfrError;

/// Default cap on iterated-coefficient depth used by boundedness checks and
/// box tensor products. Override with the `HFR_MAX_BOUND_CAP` environment
/// variable.
pub const DEFAULT_BOUND_CAP: usize = 64;

/// Reads the boundedness cap from the environment, falling back to
/// [`DEFAULT_BOUND_CAP`].
pub fn bound_cap() -> usize {
    std::env::var("HFR_MAX_BOUND_CAP")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_BOUND_CAP)
}
