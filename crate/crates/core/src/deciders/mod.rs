//! Decision procedures on pro-morphisms and pro-objects.
//!
//! Every check returns a three-valued [`Verdict`]. `Holds` carries a [`Certificate`] whose
//! entries can be replayed without search; `Fails` carries the offending index and the
//! reason the failure extends to every `β`; `Unknown` reports the horizon that ran out.

mod certificate;
mod chains;
mod level;
mod movability;
mod square;
mod stability;
mod subtower;
mod tor;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use certificate::{Certificate, Coverage, Entry, Lift, Premise, Subject, VerifyError, CERT_FORMAT};
pub use level::{check_bimorphism, check_epi, check_iso, check_mono, check_strong_epi, check_strong_mono};
pub use movability::{check_movability, default_selectors, MovabilityFlavor};
pub use square::{fill_square, FillMode};
pub use stability::check_stability;
pub use subtower::extract_bimorphic_subtower;
pub use tor::{rank, tor_morphism, tor_system};

pub(crate) use chains::HomGroup;

use crate::prosys::{LevelMorphism, ProError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    Mono,
    Epi,
    StrongMono,
    StrongEpi,
    Iso,
    Bimorphism,
    Movable,
    UniformlyMovable,
    SequentiallyMovable,
    Stable,
}

impl Property {
    pub const ALL: [Property; 10] = [
        Property::Mono,
        Property::Epi,
        Property::StrongMono,
        Property::StrongEpi,
        Property::Iso,
        Property::Bimorphism,
        Property::Movable,
        Property::UniformlyMovable,
        Property::SequentiallyMovable,
        Property::Stable,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Property::Mono => "mono",
            Property::Epi => "epi",
            Property::StrongMono => "strong-mono",
            Property::StrongEpi => "strong-epi",
            Property::Iso => "iso",
            Property::Bimorphism => "bimorphism",
            Property::Movable => "movable",
            Property::UniformlyMovable => "uniformly-movable",
            Property::SequentiallyMovable => "sequentially-movable",
            Property::Stable => "stable",
        }
    }

    /// Properties of morphisms; the rest apply to systems.
    pub fn is_morphism_property(&self) -> bool {
        matches!(
            self,
            Property::Mono
                | Property::Epi
                | Property::StrongMono
                | Property::StrongEpi
                | Property::Iso
                | Property::Bimorphism
        )
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown property {given:?}; expected one of: {}", Property::ALL.iter().map(|p| p.name()).collect::<Vec<_>>().join(", "))]
pub struct UnknownProperty {
    pub given: String,
}

impl FromStr for Property {
    type Err = UnknownProperty;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Property::ALL.iter().copied().find(|p| p.name() == s).ok_or_else(|| UnknownProperty { given: s.to_string() })
    }
}

/// Why a failure at one index persists for every deeper `β`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailReason {
    /// The data driving the condition returned to an earlier state, so the failures seen
    /// so far repeat forever.
    CycleDetected { first: usize, repeat: usize },
    /// A chain of subgroups (or hom-subgroups) determining the condition became periodic
    /// without the condition ever holding.
    ChainStabilized { base: usize, period: usize, steps: usize },
    /// Images of an iterated bond descend strictly forever.
    StrictDescent { slot: usize, from: usize },
    /// A weaker property already fails at this index.
    Implied { by: Property },
    /// Every `β` was checked (finite index).
    Exhaustive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterWitness {
    pub property: Property,
    pub alpha: Option<usize>,
    pub reason: FailReason,
    pub evidence: String,
}

impl fmt::Display for CounterWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.evidence)?;
        match &self.reason {
            FailReason::CycleDetected { first, repeat } => {
                write!(f, " (state at β={} recurs at β={}, so no deeper β works)", first, repeat)
            }
            FailReason::ChainStabilized { base, period, steps } => write!(
                f,
                " (descending chain from β={} in steps of {} became periodic after {} steps)",
                base, period, steps
            ),
            FailReason::StrictDescent { slot, from } => {
                write!(f, " (images of the period bond at level {} descend strictly from power {} on)", slot, from)
            }
            FailReason::Implied { by } => write!(f, " (implied: {} fails here)", by),
            FailReason::Exhaustive => write!(f, " (all β checked)"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Unresolved {
    pub horizon: usize,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "outcome")]
pub enum Verdict {
    Holds(Certificate),
    Fails(CounterWitness),
    Unknown(Unresolved),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds(_))
    }

    pub fn fails(&self) -> bool {
        matches!(self, Verdict::Fails(_))
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown(_))
    }

    pub fn is_definite(&self) -> bool {
        !self.is_unknown()
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Verdict::Holds(c) => Some(c),
            _ => None,
        }
    }

    pub fn counter_witness(&self) -> Option<&CounterWitness> {
        match self {
            Verdict::Fails(c) => Some(c),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Holds(_) => "Holds",
            Verdict::Fails(_) => "Fails",
            Verdict::Unknown(_) => "Unknown",
        }
    }

    /// CLI exit code: 0 holds, 1 fails, 2 unknown.
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Holds(_) => 0,
            Verdict::Fails(_) => 1,
            Verdict::Unknown(_) => 2,
        }
    }
}

/// Run a morphism property.
pub fn check_morphism(property: Property, f: &LevelMorphism, horizon: usize) -> Result<Verdict, ProError> {
    match property {
        Property::Mono => check_mono(f, horizon),
        Property::Epi => check_epi(f, horizon),
        Property::StrongMono => check_strong_mono(f, horizon),
        Property::StrongEpi => check_strong_epi(f, horizon),
        Property::Iso => check_iso(f, horizon),
        Property::Bimorphism => check_bimorphism(f, horizon),
        other => Err(ProError::Invalid(format!("{} is a property of systems, not morphisms", other))),
    }
}

/// Run a system property.
pub fn check_system(property: Property, x: &crate::prosys::InverseSystem, horizon: usize) -> Result<Verdict, ProError> {
    match property {
        Property::Movable => check_movability(x, MovabilityFlavor::Classical, horizon),
        Property::UniformlyMovable => check_movability(x, MovabilityFlavor::Uniform, horizon),
        Property::SequentiallyMovable => check_movability(x, MovabilityFlavor::Sequential(Vec::new()), horizon),
        Property::Stable => check_stability(x, horizon),
        other => Err(ProError::Invalid(format!("{} is a property of morphisms, not systems", other))),
    }
}
