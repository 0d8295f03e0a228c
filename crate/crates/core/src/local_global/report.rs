use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObstructionKind {
    BehavioralGluing,
    Separation,
    Stateless,
}

impl fmt::Display for ObstructionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ObstructionKind::BehavioralGluing => "behavioral-gluing",
            ObstructionKind::Separation => "separation",
            ObstructionKind::Stateless => "stateless",
        })
    }
}

/// One side of a conflict: the constraint that forces a behavior, where the
/// behavior lives, and what it emits on the report's word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ForcedBehavior {
    /// The `(state, input)` transition imposing the behavior, when there is one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub via: Option<(String, String)>,
    /// Where the behavior is read off, e.g. `patch 0`.
    pub source: String,
    /// Index of the local section carrying the behavior, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub patch: Option<usize>,
    /// The explanatory state carrying the behavior.
    pub state: String,
    pub outputs: Vec<String>,
}

/// A located reason why local data do not assemble.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObstructionReport {
    pub kind: ObstructionKind,
    /// The offending state (or fiber) of the explained system.
    pub site: String,
    pub forced: [ForcedBehavior; 2],
    /// Input word on which the two behaviors differ.
    pub word: Vec<String>,
    pub narrative: String,
}

impl ObstructionReport {
    pub(crate) fn new(
        kind: ObstructionKind,
        site: String,
        forced: [ForcedBehavior; 2],
        word: Vec<String>,
    ) -> Self {
        let narrative = narrate(kind, &site, &forced, &word);
        ObstructionReport {
            kind,
            site,
            forced,
            word,
            narrative,
        }
    }

    /// The two recorded output sequences differ.
    pub fn is_conflict(&self) -> bool {
        self.forced[0].outputs != self.forced[1].outputs
    }
}

fn describe(f: &ForcedBehavior) -> String {
    let via = match &f.via {
        Some((s, i)) => format!("via ({s}, {i}) "),
        None => String::new(),
    };
    format!(
        "{via}as {} of {} emitting [{}]",
        f.state,
        f.source,
        f.outputs.join(", ")
    )
}

fn narrate(
    kind: ObstructionKind,
    site: &str,
    forced: &[ForcedBehavior; 2],
    word: &[String],
) -> String {
    let what = match kind {
        ObstructionKind::BehavioralGluing => format!("after-state {site} must continue"),
        ObstructionKind::Separation => format!("state {site} is explained"),
        ObstructionKind::Stateless => format!("fiber {site} is answered"),
    };
    format!(
        "{what} {} but also {}; the two differ on input word [{}], so no single behavior fits.",
        describe(&forced[0]),
        describe(&forced[1]),
        word.join(", ")
    )
}

impl fmt::Display for ObstructionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} obstruction at {}: {}",
            self.kind, self.site, self.narrative
        )
    }
}
