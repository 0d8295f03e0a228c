//! The built-in fixture corpus and its canonical JSON form.
//!
//! Every fixture is an envelope `{name, kind, source, payload}`; `source` is a
//! one-line description of what the payload encodes. Canonical JSON has
//! sorted keys, two-space indentation and a trailing newline, and the files
//! under `fixtures/` are stored in that form.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::epsilon::{EpsilonDoc, EpsilonProblem};
use crate::explanations::{Judge, JudgeDoc, Section, SectionDoc};
use crate::local_global::EquivalenceKind;
use crate::systems::{Covering, MealySystem, Subsystem, SystemDoc};
use crate::tame::{RectUnion, RectUnionDoc};
use crate::Verdict;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FixtureKind {
    System,
    Covering,
    Judge,
    Sections,
    RectUnion,
    Epsilon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixture {
    pub name: String,
    pub kind: FixtureKind,
    pub source: String,
    pub payload: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixtureError {
    /// Not JSON, or JSON of the wrong shape.
    #[error("malformed fixture: {0}")]
    Malformed(String),
    /// Well-formed but rejected by a validator.
    #[error("invalid fixture: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("no built-in fixture named `{0}`")]
    Unknown(String),
}

/// What a `sections` fixture is meant to exercise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SectionsRole {
    /// Two global sections compared patch by patch.
    Separation,
    /// One local section per patch, to be glued.
    Gluing,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoveringPayload {
    pub system: SystemDoc,
    pub covering: Vec<Subsystem>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JudgePayload {
    pub system: SystemDoc,
    pub judge: JudgeDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionsPayload {
    pub role: SectionsRole,
    pub relation: EquivalenceKind,
    pub system: SystemDoc,
    pub judge: JudgeDoc,
    pub covering: Vec<Subsystem>,
    pub sections: Vec<SectionDoc>,
}

/// A validated `sections` fixture.
#[derive(Debug, Clone)]
pub struct SectionsFixture {
    pub role: SectionsRole,
    pub relation: EquivalenceKind,
    pub system: MealySystem,
    pub judge: Judge,
    pub covering: Covering,
    pub sections: Vec<Section>,
}

/// A validated payload.
#[derive(Debug, Clone)]
pub enum Loaded {
    System(MealySystem),
    Covering(Covering),
    Judge { system: MealySystem, judge: Judge },
    Sections(Box<SectionsFixture>),
    RectUnion(RectUnion),
    Epsilon(EpsilonProblem),
}

macro_rules! corpus {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../fixtures/", $name, ".json")))),*]
    };
}

/// Built-in fixtures as `(name, canonical JSON)`, sorted by name.
pub const BUILTIN: &[(&str, &str)] = corpus![
    "beh-jfull-redirected",
    "cex-beh-gluing",
    "cex-beh-gluing-redirected",
    "cex-ri-separation",
    "cogerm-extra-states",
    "cogerm-gluing",
    "equilateral-triangle",
    "input-splitting-covering",
    "punctured-square",
    "regular-tetrahedron",
    "ri-jfull-routing",
    "routing-system",
    "stateless-two-fibers",
    "two-bands",
    "unit-square",
];

pub fn builtin_names() -> Vec<&'static str> {
    BUILTIN.iter().map(|(n, _)| *n).collect()
}

pub fn builtin_text(name: &str) -> Result<&'static str, FixtureError> {
    BUILTIN
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| FixtureError::Unknown(name.to_string()))
}

pub fn builtin(name: &str) -> Result<Fixture, FixtureError> {
    parse(builtin_text(name)?)
}

/// Loads and validates a built-in fixture; panics on a broken corpus entry.
pub fn load_builtin(name: &str) -> Loaded {
    builtin(name)
        .and_then(|f| f.load())
        .unwrap_or_else(|e| panic!("built-in fixture {name}: {e}"))
}

/// Convenience for `sections` fixtures; panics on any other kind.
pub fn sections_builtin(name: &str) -> SectionsFixture {
    match load_builtin(name) {
        Loaded::Sections(s) => *s,
        _ => panic!("built-in fixture {name} is not a sections fixture"),
    }
}

pub fn parse(text: &str) -> Result<Fixture, FixtureError> {
    serde_json::from_str(text).map_err(|e| FixtureError::Malformed(e.to_string()))
}

/// Sorted keys, two-space indentation, trailing newline.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("fixture values serialize");
    let mut s = serde_json::to_string_pretty(&v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn payload<T: serde::de::DeserializeOwned>(v: &serde_json::Value) -> Result<T, FixtureError> {
    T::deserialize(v).map_err(|e| FixtureError::Malformed(format!("payload: {e}")))
}

fn invalid(e: impl ToString) -> FixtureError {
    FixtureError::Invalid(vec![e.to_string()])
}

fn system(doc: &SystemDoc) -> Result<MealySystem, FixtureError> {
    MealySystem::validate(doc)
        .map_err(|e| FixtureError::Invalid(e.violations.iter().map(ToString::to_string).collect()))
}

fn covering(sys: &MealySystem, subs: &[Subsystem]) -> Result<Covering, FixtureError> {
    let c = Covering::from_subsystems(sys, subs).map_err(invalid)?;
    match c.check() {
        Verdict::Holds => Ok(c),
        Verdict::Fails(u) => Err(invalid(format!("not a covering: {u:?}"))),
    }
}

impl Fixture {
    pub fn to_canonical_json(&self) -> String {
        canonical_json(self)
    }

    /// Parses the payload for its kind and runs that kind's validators.
    pub fn load(&self) -> Result<Loaded, FixtureError> {
        match self.kind {
            FixtureKind::System => Ok(Loaded::System(system(&payload(&self.payload)?)?)),
            FixtureKind::Covering => {
                let p: CoveringPayload = payload(&self.payload)?;
                let sys = system(&p.system)?;
                Ok(Loaded::Covering(covering(&sys, &p.covering)?))
            }
            FixtureKind::Judge => {
                let p: JudgePayload = payload(&self.payload)?;
                let sys = system(&p.system)?;
                let judge = Judge::from_doc(&p.judge).map_err(invalid)?;
                if !judge.applies_to(&sys) {
                    return Err(invalid("judge does not match the system's interface"));
                }
                Ok(Loaded::Judge { system: sys, judge })
            }
            FixtureKind::Sections => {
                load_sections(&payload(&self.payload)?).map(|s| Loaded::Sections(Box::new(s)))
            }
            FixtureKind::RectUnion => {
                let p: RectUnionDoc = payload(&self.payload)?;
                RectUnion::from_doc(&p)
                    .map(Loaded::RectUnion)
                    .map_err(invalid)
            }
            FixtureKind::Epsilon => {
                let p: EpsilonDoc = payload(&self.payload)?;
                EpsilonProblem::from_doc(&p)
                    .map(Loaded::Epsilon)
                    .map_err(invalid)
            }
        }
    }
}

fn load_sections(p: &SectionsPayload) -> Result<SectionsFixture, FixtureError> {
    let sys = system(&p.system)?;
    let judge = Judge::from_doc(&p.judge).map_err(invalid)?;
    if !judge.applies_to(&sys) {
        return Err(invalid("judge does not match the system's interface"));
    }
    let cover = covering(&sys, &p.covering)?;
    let mut problems = Vec::new();
    let mut sections = Vec::new();
    for (k, doc) in p.sections.iter().enumerate() {
        match Section::from_doc(&sys, &judge, doc) {
            Ok(s) => {
                if let Verdict::Fails(v) = s.validate(&judge) {
                    problems.push(format!("section {k}: {v:?}"));
                }
                sections.push(s);
            }
            Err(e) => problems.push(format!("section {k}: {e}")),
        }
    }
    if !problems.is_empty() {
        return Err(FixtureError::Invalid(problems));
    }
    match p.role {
        SectionsRole::Separation => {
            if sections.len() != 2 || sections.iter().any(|s| s.patch().source() != &sys) {
                return Err(invalid(
                    "a separation fixture holds exactly two global sections",
                ));
            }
        }
        SectionsRole::Gluing => {
            if sections.len() != cover.patches().len()
                || sections
                    .iter()
                    .zip(cover.patches())
                    .any(|(s, m)| s.patch() != m)
            {
                return Err(invalid(
                    "a gluing fixture holds one local section per patch, in order",
                ));
            }
        }
    }
    Ok(SectionsFixture {
        role: p.role,
        relation: p.relation,
        system: sys,
        judge,
        covering: cover,
        sections,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_builtin_loads() {
        for name in builtin_names() {
            let f = builtin(name).unwrap();
            assert_eq!(f.name, name);
            f.load().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn corpus_is_sorted() {
        let names = builtin_names();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
    }

    #[test]
    fn canonical_round_trip_is_byte_identical() {
        for (name, text) in BUILTIN {
            let once = parse(text).unwrap().to_canonical_json();
            assert_eq!(&once, text, "{name}");
            assert_eq!(parse(&once).unwrap().to_canonical_json(), once);
        }
    }

    #[test]
    fn malformed_and_invalid_are_distinguished() {
        let text = builtin_text("routing-system").unwrap();
        assert!(matches!(
            parse(&text[..text.len() / 2]),
            Err(FixtureError::Malformed(_))
        ));
        let mut f = builtin("routing-system").unwrap();
        f.payload["inputs"] = serde_json::json!([]);
        f.payload["dynamics"] = serde_json::json!([]);
        match f.load() {
            Err(FixtureError::Invalid(v)) => {
                assert!(v.iter().any(|s| s.starts_with("EmptyInterface")))
            }
            other => panic!("expected invalid, got {other:?}"),
        }
        f.payload = serde_json::json!({"inputs": 3});
        assert!(matches!(f.load(), Err(FixtureError::Malformed(_))));
        assert!(matches!(builtin("nope"), Err(FixtureError::Unknown(_))));
    }
}
