//! Pro-categories over finite sets and finitely generated abelian groups: inverse systems,
//! their morphisms, and decision procedures with replayable certificates.

pub mod categories;
pub mod cli;
pub mod deciders;
pub mod gallery;
pub mod prosys;
pub mod zlinalg;
