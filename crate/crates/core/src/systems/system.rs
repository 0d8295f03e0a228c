use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::finite::FiniteSet;

/// One row of a dynamics table: `α(s, i) = (s2, o)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub s: String,
    pub i: String,
    pub s2: String,
    pub o: String,
}

/// Raw, unvalidated system description (the on-disk JSON form).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemDoc {
    pub before_states: Vec<String>,
    pub after_states: Vec<String>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub dynamics: Vec<Transition>,
}

/// A single reason a system description is not a valid Mealy machine.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    #[error("EmptyInterface: the {carrier} set is empty")]
    EmptyInterface { carrier: String },
    #[error("PartialDynamics: no transition defined at ({state}, {input})")]
    PartialDynamics { state: String, input: String },
    #[error("ForeignElement: `{element}` used as {role} is not in the declared carrier")]
    ForeignElement { role: String, element: String },
    #[error("ConflictingDynamics: ({state}, {input}) has more than one distinct image")]
    ConflictingDynamics { state: String, input: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid system: {}", .violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
pub struct ValidationError {
    pub violations: Vec<Violation>,
}

/// A finite heterogeneous Mealy machine `(S_b, S_a, I, O, α)`.
///
/// Carriers are normalized (sorted, deduplicated); `α` is stored densely,
/// indexed by `s * |I| + i`. Homogeneous systems have `S_b == S_a`, so state
/// positions agree in both carriers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MealySystem {
    before: FiniteSet,
    after: FiniteSet,
    inputs: FiniteSet,
    outputs: FiniteSet,
    dynamics: Vec<(usize, usize)>,
}

impl MealySystem {
    /// Builds a system from already-indexed parts.
    ///
    /// `step(s, i)` must be defined for all positions and land inside the
    /// carriers; I and O must be non-empty.
    pub fn from_fn(
        before: FiniteSet,
        after: FiniteSet,
        inputs: FiniteSet,
        outputs: FiniteSet,
        mut step: impl FnMut(usize, usize) -> (usize, usize),
    ) -> Result<Self, ValidationError> {
        let mut violations = Vec::new();
        if inputs.is_empty() {
            violations.push(Violation::EmptyInterface {
                carrier: "inputs".into(),
            });
        }
        if outputs.is_empty() {
            violations.push(Violation::EmptyInterface {
                carrier: "outputs".into(),
            });
        }
        if !violations.is_empty() {
            return Err(ValidationError { violations });
        }
        let mut dynamics = Vec::with_capacity(before.len() * inputs.len());
        for s in 0..before.len() {
            for i in 0..inputs.len() {
                let (s2, o) = step(s, i);
                if s2 >= after.len() || o >= outputs.len() {
                    violations.push(Violation::ForeignElement {
                        role: "dynamics image".into(),
                        element: format!("({}, {})", before.name(s), inputs.name(i)),
                    });
                }
                dynamics.push((s2, o));
            }
        }
        if violations.is_empty() {
            Ok(MealySystem {
                before,
                after,
                inputs,
                outputs,
                dynamics,
            })
        } else {
            Err(ValidationError { violations })
        }
    }

    /// Validates and normalizes a raw description, collecting every violation.
    pub fn validate(doc: &SystemDoc) -> Result<Self, ValidationError> {
        let before = FiniteSet::new(doc.before_states.iter().cloned());
        let after = FiniteSet::new(doc.after_states.iter().cloned());
        let inputs = FiniteSet::new(doc.inputs.iter().cloned());
        let outputs = FiniteSet::new(doc.outputs.iter().cloned());
        let mut violations = Vec::new();
        if inputs.is_empty() {
            violations.push(Violation::EmptyInterface {
                carrier: "inputs".into(),
            });
        }
        if outputs.is_empty() {
            violations.push(Violation::EmptyInterface {
                carrier: "outputs".into(),
            });
        }

        let mut table: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
        for t in &doc.dynamics {
            let lookup = |set: &FiniteSet, name: &str, role: &str, out: &mut Vec<Violation>| {
                let idx = set.index_of(name);
                if idx.is_none() {
                    out.push(Violation::ForeignElement {
                        role: role.into(),
                        element: name.into(),
                    });
                }
                idx
            };
            let s = lookup(&before, &t.s, "before-state", &mut violations);
            let i = lookup(&inputs, &t.i, "input", &mut violations);
            let s2 = lookup(&after, &t.s2, "after-state", &mut violations);
            let o = lookup(&outputs, &t.o, "output", &mut violations);
            if let (Some(s), Some(i), Some(s2), Some(o)) = (s, i, s2, o) {
                match table.insert((s, i), (s2, o)) {
                    Some(prev) if prev != (s2, o) => {
                        violations.push(Violation::ConflictingDynamics {
                            state: t.s.clone(),
                            input: t.i.clone(),
                        });
                    }
                    _ => {}
                }
            }
        }
        for s in 0..before.len() {
            for i in 0..inputs.len() {
                if !table.contains_key(&(s, i)) {
                    violations.push(Violation::PartialDynamics {
                        state: before.name(s).into(),
                        input: inputs.name(i).into(),
                    });
                }
            }
        }
        if !violations.is_empty() {
            return Err(ValidationError { violations });
        }
        let dynamics = table.into_values().collect();
        Ok(MealySystem {
            before,
            after,
            inputs,
            outputs,
            dynamics,
        })
    }

    /// Homogeneous machine from a `(s, i, s2, o)` table; the state set is
    /// whatever the table mentions.
    pub fn homogeneous_from_table(
        inputs: &[&str],
        outputs: &[&str],
        table: &[(&str, &str, &str, &str)],
    ) -> Result<Self, ValidationError> {
        let mut states: Vec<String> = Vec::new();
        for (s, _, s2, _) in table {
            states.push((*s).into());
            states.push((*s2).into());
        }
        let doc = SystemDoc {
            before_states: states.clone(),
            after_states: states,
            inputs: inputs.iter().map(|s| (*s).into()).collect(),
            outputs: outputs.iter().map(|s| (*s).into()).collect(),
            dynamics: table
                .iter()
                .map(|(s, i, s2, o)| Transition {
                    s: (*s).into(),
                    i: (*i).into(),
                    s2: (*s2).into(),
                    o: (*o).into(),
                })
                .collect(),
        };
        MealySystem::validate(&doc)
    }

    pub fn before(&self) -> &FiniteSet {
        &self.before
    }

    pub fn after(&self) -> &FiniteSet {
        &self.after
    }

    pub fn inputs(&self) -> &FiniteSet {
        &self.inputs
    }

    pub fn outputs(&self) -> &FiniteSet {
        &self.outputs
    }

    /// `α(s, i)` as positions `(s2, o)`.
    pub fn step(&self, s: usize, i: usize) -> (usize, usize) {
        self.dynamics[s * self.inputs.len() + i]
    }

    pub fn is_homogeneous(&self) -> bool {
        self.before == self.after
    }

    /// Number of states of a homogeneous system (`|S_b|`).
    pub fn state_count(&self) -> usize {
        self.before.len()
    }

    /// Output word produced from state `s` on an input word (homogeneous only).
    pub fn run(&self, mut s: usize, word: &[usize]) -> Vec<usize> {
        debug_assert!(self.is_homogeneous());
        word.iter()
            .map(|&i| {
                let (next, o) = self.step(s, i);
                s = next;
                o
            })
            .collect()
    }

    pub fn to_doc(&self) -> SystemDoc {
        let mut dynamics = Vec::with_capacity(self.dynamics.len());
        for s in 0..self.before.len() {
            for i in 0..self.inputs.len() {
                let (s2, o) = self.step(s, i);
                dynamics.push(Transition {
                    s: self.before.name(s).into(),
                    i: self.inputs.name(i).into(),
                    s2: self.after.name(s2).into(),
                    o: self.outputs.name(o).into(),
                });
            }
        }
        SystemDoc {
            before_states: self.before.as_slice().to_vec(),
            after_states: self.after.as_slice().to_vec(),
            inputs: self.inputs.as_slice().to_vec(),
            outputs: self.outputs.as_slice().to_vec(),
            dynamics,
        }
    }
}

impl Serialize for MealySystem {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_doc().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MealySystem {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let doc = SystemDoc::deserialize(deserializer)?;
        MealySystem::validate(&doc).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(dynamics: &[(&str, &str, &str, &str)]) -> SystemDoc {
        SystemDoc {
            before_states: vec!["s0".into(), "s1".into(), "s2".into(), "s3".into()],
            after_states: vec!["s0".into(), "s1".into(), "s2".into(), "s3".into()],
            inputs: vec!["a".into(), "b".into()],
            outputs: vec!["0".into(), "1".into()],
            dynamics: dynamics
                .iter()
                .map(|(s, i, s2, o)| Transition {
                    s: (*s).into(),
                    i: (*i).into(),
                    s2: (*s2).into(),
                    o: (*o).into(),
                })
                .collect(),
        }
    }

    const GLUING_TABLE: [(&str, &str, &str, &str); 8] = [
        ("s0", "a", "s0", "0"),
        ("s0", "b", "s2", "0"),
        ("s1", "a", "s1", "1"),
        ("s1", "b", "s1", "1"),
        ("s2", "a", "s1", "1"),
        ("s2", "b", "s1", "1"),
        ("s3", "a", "s3", "1"),
        ("s3", "b", "s2", "1"),
    ];

    #[test]
    fn smallest_legal_system() {
        let sys =
            MealySystem::homogeneous_from_table(&["i"], &["o"], &[("s", "i", "s", "o")]).unwrap();
        assert_eq!(sys.state_count(), 1);
        assert!(sys.is_homogeneous());
        assert_eq!(sys.step(0, 0), (0, 0));
    }

    #[test]
    fn four_state_gluing_system_is_valid() {
        let sys = MealySystem::validate(&doc(&GLUING_TABLE)).unwrap();
        assert_eq!(sys.before().len(), 4);
        let s3 = sys.before().index_of("s3").unwrap();
        let b = sys.inputs().index_of("b").unwrap();
        let (s2, o) = sys.step(s3, b);
        assert_eq!(sys.after().name(s2), "s2");
        assert_eq!(sys.outputs().name(o), "1");
    }

    #[test]
    fn missing_entry_is_partial_dynamics() {
        let table: Vec<_> = GLUING_TABLE
            .iter()
            .copied()
            .filter(|(s, i, _, _)| !(*s == "s3" && *i == "b"))
            .collect();
        let err = MealySystem::validate(&doc(&table)).unwrap_err();
        assert_eq!(
            err.violations,
            vec![Violation::PartialDynamics {
                state: "s3".into(),
                input: "b".into()
            }]
        );
    }

    #[test]
    fn empty_inputs_and_foreign_elements_are_reported() {
        let mut d = doc(&[("s0", "a", "s9", "0")]);
        d.inputs.clear();
        let err = MealySystem::validate(&d).unwrap_err();
        assert!(err
            .violations
            .iter()
            .any(|v| matches!(v, Violation::EmptyInterface { carrier } if carrier == "inputs")));
        assert!(err
            .violations
            .iter()
            .any(|v| matches!(v, Violation::ForeignElement { element, .. } if element == "s9")));
    }

    #[test]
    fn conflicting_rows_are_rejected_but_duplicates_are_not() {
        let mut rows = GLUING_TABLE.to_vec();
        rows.push(("s0", "a", "s0", "0"));
        assert!(MealySystem::validate(&doc(&rows)).is_ok());
        rows.push(("s0", "a", "s1", "0"));
        let err = MealySystem::validate(&doc(&rows)).unwrap_err();
        assert!(matches!(
            err.violations[0],
            Violation::ConflictingDynamics { .. }
        ));
    }

    #[test]
    fn doc_round_trip_is_normalized() {
        let sys = MealySystem::validate(&doc(&GLUING_TABLE)).unwrap();
        let again = MealySystem::validate(&sys.to_doc()).unwrap();
        assert_eq!(sys, again);
    }
}
