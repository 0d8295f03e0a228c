//! Local-to-global checks for explanations of finite Mealy machines.
//!
//! The crate is organised around the objects an explanation lives on:
//!
//! * [`systems`]: finite heterogeneous Mealy machines, morphisms, open
//!   immersions, coverings and pushouts along monomorphisms.
//! * [`explanations`]: judges, sections, restriction, cogerm and behavioral
//!   equivalence, minimal realisations.
//! * [`local_global`]: separation checks, constructive gluing and obstruction
//!   reports, stateless sheaf checks.
//! * [`tame`]: exact rectangle-union sets and robust disconnection of fibers.
//! * [`epsilon`]: approximate stateless sections, enclosing balls and Helly
//!   obstruction depth.
//! * [`fixtures`]: the built-in fixture corpus and its canonical JSON form.
//! * [`landscape`]: the separation / gluing table backed by fixture checks.
//! * [`properties`]: seeded randomized property suites.
//!
//! Inner loops that fan out over independent trials or candidates go through
//! [`exec::Execution`], which runs on rayon when the `parallel` feature is
//! enabled and falls back to a plain loop otherwise.

pub mod epsilon;
pub mod exec;
pub mod explanations;
pub mod fixtures;
pub mod landscape;
pub mod local_global;
pub mod properties;
pub mod systems;
pub mod tame;

mod verdict;

pub use verdict::Verdict;

/// Seed used by every randomized suite unless overridden.
pub const DEFAULT_SEED: u64 = 0x5EAF_3A1E;

/// Environment variable that overrides [`DEFAULT_SEED`].
pub const SEED_ENV: &str = "SHEAFMEALY_SEED";

/// Resolves the seed for randomized suites: explicit value, then
/// `SHEAFMEALY_SEED`, then [`DEFAULT_SEED`].
pub fn resolve_seed(explicit: Option<u64>) -> u64 {
    explicit
        .or_else(|| std::env::var(SEED_ENV).ok()?.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}
