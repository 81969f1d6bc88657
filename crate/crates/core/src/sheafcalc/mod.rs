//! Constructible sheaves of finite sets as functors on the fundamental
//! category, and the calculus used to glue, push forward, and classify them.
//!
//! A sheaf assigns a finite carrier set to every orbit in its domain, ambient
//! lattice-generator permutations acting on each carrier (descending to the
//! orbit's hom group), and structure maps along covering relations. Empty
//! carriers are first-class throughout: extension by empty and the vanishing
//! half of the descent dichotomy depend on them.

mod enumerate;
mod families;
mod functors;
mod homs;
pub mod random;
mod recollement;
mod sheaf;

pub use enumerate::{enumerate_sheaves, enumerate_sheaves_on, representable_sheaf, yoneda_check, YonedaVerdict};
pub use families::{kan_families, sections, Family};
pub use functors::{
    extend_by_empty, projection_pullback, projection_pushforward, pushforward_closed,
    pushforward_open, restrict_closed, restrict_open,
};
pub use homs::{
    are_isomorphic, compose_sheaf_morphisms, coproduct, coproduct_local, hom_local, hom_set,
    is_local_iso, limit, terminal_sheaf, SheafDiagram,
};
pub use recollement::{decompose, glue, Decomposition};
pub use sheaf::{
    constant_sheaf, evaluate, evaluate_finite, local_system_sheaf, stalk_local_system,
    validate_local_system, validate_sheaf, ConstructibleSheaf, SheafReport, SheafViolation, Site,
    StratumLocalSystem,
};

use crate::fan::ConeId;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SheafError {
    #[error("sheaves live on different sites")]
    SiteMismatch,
    #[error("sheaves live on different domains")]
    DomainMismatch,
    #[error("finite-level data does not match: {0}")]
    LevelMismatch(String),
    #[error("object {0} is not in the sheaf domain")]
    UnknownObject(ConeId),
    #[error("subset is not upward closed")]
    NotUpwardClosed,
    #[error("subset is not downward closed")]
    NotDownwardClosed,
    #[error("domain is not convex in the orbit poset")]
    NotConvex,
    #[error("stratum {0} is not minimal in the domain")]
    NotMinimal(ConeId),
    #[error("morphism data is malformed: {0}")]
    Malformed(String),
    #[error("comparison map is not equivariant at element {element} of the closed stalk")]
    NonEquivariantGlue { element: usize },
    #[error("search budget of {budget} candidates exceeded")]
    BudgetExceeded { budget: usize },
}

/// A sheaf morphism: one function per object, natural in all generators and
/// structure maps.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SheafMorphism {
    pub components: std::collections::BTreeMap<ConeId, Vec<usize>>,
}
