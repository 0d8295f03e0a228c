//! Finite Mealy machines and the site of open immersions.

mod finite;
mod morphism;
mod pushout;
mod site;
mod system;

pub(crate) use finite::unique_names;
pub use finite::FiniteSet;
pub use morphism::{Component, MorphismDoc, MorphismError, SquareViolation, SystemMorphism};
pub use pushout::{
    pullback_ho, pushout_along_mono, verify_vk_square, HoPullback, Pushout, PushoutError,
    VK_MAX_STATES,
};
pub use site::{
    check_covering, overlap, Covering, OpenImmersion, Overlap, SiteError, Subsystem, Uncovered,
};
pub use system::{MealySystem, SystemDoc, Transition, ValidationError, Violation};
