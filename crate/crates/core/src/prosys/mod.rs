//! Inverse systems over towers and finite directed posets, their morphisms, and the
//! reindexing constructions used by the deciders.

mod index;
mod limits;
mod morphism;
mod reindex;
mod subtower;
mod system;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::categories::CategoryError;

pub use index::{Index, PosetIndex, TowerIndex};
pub use limits::{inverse_limit_finset_tower, pro_hom_to_object, HomClasses};
pub use morphism::{levelize, LevelMorphism, Levelized, ProMorphism, ProTail, Representative, Tail};
pub use reindex::{cofinite_reindex, Reindexed};
pub use subtower::{
    equalize_on_subtower, factor_through_subtower, projection_morphism, section_morphism, sub2, subtower, Sub2,
    SubtowerSelector,
};
pub use system::InverseSystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    Shape,
    NotPartialOrder,
    NotDirected,
    Functoriality,
    NotLevel,
    Compatibility,
}

/// Why a system or morphism fails its invariants. `triple` names `α <= β <= γ` when a
/// composite disagrees with a bond.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub message: String,
    pub triple: Option<[usize; 3]>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)?;
        if let Some([a, b, c]) = self.triple {
            write!(f, " (triple ({}, {}, {}))", a, b, c)?;
        }
        Ok(())
    }
}

impl std::error::Error for Violation {}

#[derive(Debug, thiserror::Error)]
pub enum ProError {
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Violation(Violation),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("unresolved within horizon {horizon}: {message}")]
    Unresolved { horizon: usize, message: String },
}

impl From<Violation> for ProError {
    fn from(v: Violation) -> Self {
        ProError::Violation(v)
    }
}

impl From<crate::zlinalg::ShapeError> for ProError {
    fn from(e: crate::zlinalg::ShapeError) -> Self {
        ProError::Category(e.into())
    }
}

/// Check the invariants of a system; the report names the offending triple when there is one.
pub fn validate_system(x: &InverseSystem) -> Result<(), Violation> {
    x.validate()
}
