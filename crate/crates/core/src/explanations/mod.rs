//! Judges, sections of the explanation presheaves, and the equivalences
//! between sections.

mod behavior;
mod cogerm;
mod judge;
mod realise;
mod section;

use thiserror::Error;

use crate::systems::{MorphismError, SiteError, ValidationError};

pub(crate) use behavior::Joint;
pub use behavior::{
    behavioral_equiv, minimize, BehaviorPartition, Distinction, Minimized, Separator,
};
pub use cogerm::{cogerm_equiv, cogerm_search, CogermFailure, CogermWitness, CogermWitnessDoc};
pub use judge::{Judge, JudgeDoc};
pub use realise::{
    canonical_realisation, extend_to_full, is_j_full, minimal_realisation, minimize_section,
    restrict_interface, restricted_interface, Interface, NotJFull,
};
pub use section::{Section, SectionDoc, SectionViolation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExplanationError {
    #[error(transparent)]
    Site(#[from] SiteError),
    #[error(transparent)]
    Morphism(#[from] MorphismError),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error("judge sends `{element}` to `{image}`, outside its codomain")]
    JudgeCodomain { element: String, image: String },
    #[error("judge has an empty interpretable interface")]
    EmptyInterface,
    #[error("ψ does not start at the patch source")]
    PsiSource,
    #[error("`{0}` is not an element of the explanatory system")]
    OutsideExplanatory(String),
    #[error("no image given for `{0}`")]
    MissingImage(String),
    #[error("sections live over different patches")]
    DifferentPatches,
    #[error("expected a homogeneous system (S_b = S_a)")]
    HeterogeneousInput,
    #[error("letter `{0}` is not an input of every machine compared")]
    AlphabetOutsideInterface(String),
    #[error("explanatory systems have different interfaces")]
    InterfaceMismatch,
    #[error(
        "inputs {} and {} at {state} share an interpretation but yield outputs {} and {}",
        .inputs.0, .inputs.1, .outputs.0, .outputs.1
    )]
    FiberConflict {
        state: String,
        inputs: (String, String),
        outputs: (String, String),
    },
}

#[cfg(test)]
mod tests;
