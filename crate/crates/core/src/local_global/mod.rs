//! Separation checks, gluing of local explanations, obstruction reports and
//! stateless sheaf checks.

mod behavioral;
mod family;
mod report;
mod separation;
mod stateless;
mod synthesis;

use thiserror::Error;

use crate::explanations::ExplanationError;
use crate::systems::{MorphismError, PushoutError, SiteError, ValidationError};

pub use behavioral::{glue_behavioral, replay_obstruction, verify_behavioral_gluing, GlueOutcome};
pub use family::{
    glue_cogerm, literal_glue, restrict_to_covering, verify_cogerm_gluing, CompatibleFamily,
    OverlapPair,
};
pub use report::{ForcedBehavior, ObstructionKind, ObstructionReport};
pub use separation::{
    check_separation, literal_separation, Difference, EquivalenceKind, PatchVerdict,
    SeparationReport,
};
pub use stateless::{
    discrete_stateless_sheaf_check, stateless_ri_section, FiberConflict, StatelessGluingFailure,
    StatelessSection, StatelessSheafReport, STATELESS_ALL_COVERINGS_MAX, STATELESS_MAX_INPUTS,
};
pub use synthesis::{bounded_synthesis, SynthesisOutcome, SYNTHESIS_MACHINE_BOUND};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalGlobalError {
    #[error(transparent)]
    Explanation(#[from] ExplanationError),
    #[error(transparent)]
    Site(#[from] SiteError),
    #[error(transparent)]
    Morphism(#[from] MorphismError),
    #[error(transparent)]
    Pushout(#[from] PushoutError),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error("family is incompatible on patches {} and {}: {reason}", .pair.0, .pair.1)]
    IncompatibleFamily {
        pair: (usize, usize),
        reason: String,
    },
    #[error("expected {expected} local sections, found {found}")]
    WrongLocalCount { expected: usize, found: usize },
    #[error("local section {0} does not live over the matching patch")]
    ForeignLocal(usize),
    #[error("sections must live over the whole system")]
    NotGlobal,
    #[error("system is not stateless (needs one before- and one after-state)")]
    NotStateless,
    #[error("{what}: size {size} exceeds the bound {bound}")]
    ScaleExceeded {
        what: &'static str,
        size: usize,
        bound: usize,
    },
    #[error("internal invariant broken: {0}")]
    Internal(String),
}

#[cfg(test)]
mod tests;
