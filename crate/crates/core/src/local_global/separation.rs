use serde::{Deserialize, Serialize};

use super::report::{ForcedBehavior, ObstructionKind, ObstructionReport};
use super::LocalGlobalError;
use crate::exec::Execution;
use crate::explanations::{
    behavioral_equiv, cogerm_search, restricted_interface, CogermFailure, Distinction, Judge,
    Section,
};
use crate::systems::{Covering, FiniteSet, OpenImmersion};
use crate::Verdict;

/// Which equivalence separation is checked for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EquivalenceKind {
    /// Behavioral equivalence over all of `I'`.
    Beh,
    /// Restricted-behavioral equivalence over `I'_U` of each patch.
    Ri,
    /// Cogerm equivalence.
    Cogerm,
}

/// Why two sections are not equivalent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "by", rename_all = "lowercase")]
pub enum Difference {
    Behavior(Distinction),
    Cogerm(CogermFailure),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PatchVerdict {
    pub patch: usize,
    /// Alphabet tested; empty for cogerm comparisons.
    pub alphabet: Vec<String>,
    pub verdict: Verdict<Difference>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparationReport {
    pub kind: EquivalenceKind,
    pub locally: Vec<PatchVerdict>,
    pub globally: Verdict<Difference>,
}

impl SeparationReport {
    pub fn locally_equal(&self) -> bool {
        self.locally.iter().all(|p| p.verdict.holds())
    }

    pub fn globally_equal(&self) -> bool {
        self.globally.holds()
    }

    /// Locally equal on every patch yet globally different.
    pub fn violates_separation(&self) -> bool {
        self.locally_equal() && !self.globally_equal()
    }

    /// The global difference as an obstruction, when separation is violated
    /// and the difference is behavioral.
    pub fn obstruction(&self) -> Option<ObstructionReport> {
        if !self.violates_separation() {
            return None;
        }
        let Some(Difference::Behavior(d)) = self.globally.witness() else {
            return None;
        };
        let side = |source: &str, outputs: &[String]| ForcedBehavior {
            via: None,
            source: source.into(),
            patch: None,
            state: d.state.clone(),
            outputs: outputs.to_vec(),
        };
        Some(ObstructionReport::new(
            ObstructionKind::Separation,
            d.state.clone(),
            [
                side("first section", &d.first_outputs),
                side("second section", &d.second_outputs),
            ],
            d.word.clone(),
        ))
    }
}

fn compare(
    kind: EquivalenceKind,
    s: &Section,
    t: &Section,
    alphabet: &FiniteSet,
) -> Result<Verdict<Difference>, LocalGlobalError> {
    Ok(match kind {
        EquivalenceKind::Beh | EquivalenceKind::Ri => {
            behavioral_equiv(s, t, alphabet)?.map(Difference::Behavior)
        }
        EquivalenceKind::Cogerm => match cogerm_search(s, t)? {
            Ok(_) => Verdict::Holds,
            Err(f) => Verdict::Fails(Difference::Cogerm(f)),
        },
    })
}

fn alphabet_for(kind: EquivalenceKind, judge: &Judge, m: &OpenImmersion) -> FiniteSet {
    match kind {
        EquivalenceKind::Beh => judge.interpretable_inputs().clone(),
        EquivalenceKind::Ri => restricted_interface(judge, m),
        EquivalenceKind::Cogerm => FiniteSet::empty(),
    }
}

/// Compares two global sections patch by patch and globally.
///
/// For `Ri` each patch is tested over its own `I'_{U_α}` and the global
/// comparison over `I'_U` of the whole system.
pub fn check_separation(
    kind: EquivalenceKind,
    c: &Covering,
    s: &Section,
    t: &Section,
    judge: &Judge,
    exec: Execution,
) -> Result<SeparationReport, LocalGlobalError> {
    let whole = OpenImmersion::identity(c.target());
    if s.patch() != &whole || t.patch() != &whole {
        return Err(LocalGlobalError::NotGlobal);
    }
    let locally = exec
        .map(
            c.patches(),
            |m| -> Result<(Vec<String>, Verdict<Difference>), LocalGlobalError> {
                let alphabet = alphabet_for(kind, judge, m);
                let verdict = compare(kind, &s.restrict(m)?, &t.restrict(m)?, &alphabet)?;
                Ok((alphabet.as_slice().to_vec(), verdict))
            },
        )
        .into_iter()
        .enumerate()
        .map(|(patch, r)| {
            r.map(|(alphabet, verdict)| PatchVerdict {
                patch,
                alphabet,
                verdict,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let globally = compare(kind, s, t, &alphabet_for(kind, judge, &whole))?;
    Ok(SeparationReport {
        kind,
        locally,
        globally,
    })
}

/// Literal separation for unquotiented sections: equal restrictions on every
/// patch force equal global sections.
pub fn literal_separation(
    c: &Covering,
    s: &Section,
    t: &Section,
) -> Result<bool, LocalGlobalError> {
    let mut locally_equal = true;
    for m in c.patches() {
        if s.restrict(m)? != t.restrict(m)? {
            locally_equal = false;
        }
    }
    Ok(!locally_equal || s == t)
}
