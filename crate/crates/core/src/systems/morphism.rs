use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::finite::FiniteSet;
use super::system::MealySystem;
use crate::Verdict;

/// Which of the four carriers a component map acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    Before,
    After,
    Inputs,
    Outputs,
}

impl std::fmt::Display for Component {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Component::Before => "before-state",
            Component::After => "after-state",
            Component::Inputs => "input",
            Component::Outputs => "output",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorphismError {
    #[error("{component} map has no image for `{element}`")]
    MissingImage {
        component: Component,
        element: String,
    },
    #[error("{component} map sends `{element}` to `{image}`, which is not in the target")]
    ForeignImage {
        component: Component,
        element: String,
        image: String,
    },
    #[error("{component} map has {found} entries but the source carrier has {expected}")]
    WrongArity {
        component: Component,
        expected: usize,
        found: usize,
    },
    #[error("cannot compose: the inner morphism's target is not the outer morphism's source")]
    NotComposable,
    #[error("not a homogeneous morphism: {0}")]
    NotHomogeneous(String),
}

/// Name-level description of the four component maps.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismDoc {
    pub before: BTreeMap<String, String>,
    pub after: BTreeMap<String, String>,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
}

/// The dynamics square fails at this `(s, i)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SquareViolation {
    pub state: String,
    pub input: String,
    /// `α'(f_b s, f_I i)` rendered as `(state, output)`.
    pub expected: (String, String),
    /// `(f_a s2, f_O o)` where `α(s, i) = (s2, o)`.
    pub found: (String, String),
}

/// A morphism of systems: four total component maps between carriers.
///
/// Construction only checks totality and codomain membership; whether the
/// dynamics square commutes is a separate question, answered by
/// [`SystemMorphism::check`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SystemMorphism {
    source: MealySystem,
    target: MealySystem,
    before: Vec<usize>,
    after: Vec<usize>,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
}

fn check_arity(
    component: Component,
    map: &[usize],
    dom: &FiniteSet,
    cod: &FiniteSet,
) -> Result<(), MorphismError> {
    if map.len() != dom.len() {
        return Err(MorphismError::WrongArity {
            component,
            expected: dom.len(),
            found: map.len(),
        });
    }
    if let Some((k, &v)) = map.iter().enumerate().find(|(_, &v)| v >= cod.len()) {
        return Err(MorphismError::ForeignImage {
            component,
            element: dom.name(k).into(),
            image: format!("#{v}"),
        });
    }
    Ok(())
}

fn resolve(
    component: Component,
    names: &BTreeMap<String, String>,
    dom: &FiniteSet,
    cod: &FiniteSet,
) -> Result<Vec<usize>, MorphismError> {
    dom.iter()
        .map(|x| {
            let image = names.get(x).ok_or_else(|| MorphismError::MissingImage {
                component,
                element: x.into(),
            })?;
            cod.index_of(image)
                .ok_or_else(|| MorphismError::ForeignImage {
                    component,
                    element: x.into(),
                    image: image.clone(),
                })
        })
        .collect()
}

impl SystemMorphism {
    pub fn new(
        source: MealySystem,
        target: MealySystem,
        before: Vec<usize>,
        after: Vec<usize>,
        inputs: Vec<usize>,
        outputs: Vec<usize>,
    ) -> Result<Self, MorphismError> {
        check_arity(Component::Before, &before, source.before(), target.before())?;
        check_arity(Component::After, &after, source.after(), target.after())?;
        check_arity(Component::Inputs, &inputs, source.inputs(), target.inputs())?;
        check_arity(
            Component::Outputs,
            &outputs,
            source.outputs(),
            target.outputs(),
        )?;
        Ok(SystemMorphism {
            source,
            target,
            before,
            after,
            inputs,
            outputs,
        })
    }

    pub fn from_doc(
        source: MealySystem,
        target: MealySystem,
        doc: &MorphismDoc,
    ) -> Result<Self, MorphismError> {
        let before = resolve(
            Component::Before,
            &doc.before,
            source.before(),
            target.before(),
        )?;
        let after = resolve(Component::After, &doc.after, source.after(), target.after())?;
        let inputs = resolve(
            Component::Inputs,
            &doc.inputs,
            source.inputs(),
            target.inputs(),
        )?;
        let outputs = resolve(
            Component::Outputs,
            &doc.outputs,
            source.outputs(),
            target.outputs(),
        )?;
        SystemMorphism::new(source, target, before, after, inputs, outputs)
    }

    pub fn identity(sys: &MealySystem) -> Self {
        let id = |n: usize| (0..n).collect::<Vec<_>>();
        SystemMorphism {
            source: sys.clone(),
            target: sys.clone(),
            before: id(sys.before().len()),
            after: id(sys.after().len()),
            inputs: id(sys.inputs().len()),
            outputs: id(sys.outputs().len()),
        }
    }

    /// Morphism of `Sys_ho(I, O)`: a single state map, identity on the
    /// interface. Source and target must be homogeneous with equal `(I, O)`.
    pub fn homogeneous(
        source: MealySystem,
        target: MealySystem,
        states: Vec<usize>,
    ) -> Result<Self, MorphismError> {
        if !source.is_homogeneous() || !target.is_homogeneous() {
            return Err(MorphismError::NotHomogeneous(
                "source and target must have S_b = S_a".into(),
            ));
        }
        if source.inputs() != target.inputs() || source.outputs() != target.outputs() {
            return Err(MorphismError::NotHomogeneous(
                "source and target must share the interface (I, O)".into(),
            ));
        }
        let inputs = (0..source.inputs().len()).collect();
        let outputs = (0..source.outputs().len()).collect();
        SystemMorphism::new(source, target, states.clone(), states, inputs, outputs)
    }

    pub fn source(&self) -> &MealySystem {
        &self.source
    }

    pub fn target(&self) -> &MealySystem {
        &self.target
    }

    pub fn before_map(&self) -> &[usize] {
        &self.before
    }

    pub fn after_map(&self) -> &[usize] {
        &self.after
    }

    pub fn input_map(&self) -> &[usize] {
        &self.inputs
    }

    pub fn output_map(&self) -> &[usize] {
        &self.outputs
    }

    pub fn component(&self, c: Component) -> &[usize] {
        match c {
            Component::Before => &self.before,
            Component::After => &self.after,
            Component::Inputs => &self.inputs,
            Component::Outputs => &self.outputs,
        }
    }

    /// Checks that the dynamics square commutes; on failure reports the first
    /// `(s, i)` in canonical order where it does not.
    pub fn check(&self) -> Verdict<SquareViolation> {
        let (src, tgt) = (&self.source, &self.target);
        for s in 0..src.before().len() {
            for i in 0..src.inputs().len() {
                let (s2, o) = src.step(s, i);
                let found = (self.after[s2], self.outputs[o]);
                let expected = tgt.step(self.before[s], self.inputs[i]);
                if found != expected {
                    return Verdict::Fails(SquareViolation {
                        state: src.before().name(s).into(),
                        input: src.inputs().name(i).into(),
                        expected: (
                            tgt.after().name(expected.0).into(),
                            tgt.outputs().name(expected.1).into(),
                        ),
                        found: (
                            tgt.after().name(found.0).into(),
                            tgt.outputs().name(found.1).into(),
                        ),
                    });
                }
            }
        }
        Verdict::Holds
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &SystemMorphism) -> Result<SystemMorphism, MorphismError> {
        if inner.target != self.source {
            return Err(MorphismError::NotComposable);
        }
        let comp = |outer: &[usize], first: &[usize]| first.iter().map(|&x| outer[x]).collect();
        Ok(SystemMorphism {
            source: inner.source.clone(),
            target: self.target.clone(),
            before: comp(&self.before, &inner.before),
            after: comp(&self.after, &inner.after),
            inputs: comp(&self.inputs, &inner.inputs),
            outputs: comp(&self.outputs, &inner.outputs),
        })
    }

    pub fn is_injective(&self) -> bool {
        fn injective(map: &[usize]) -> bool {
            let mut seen = std::collections::HashSet::with_capacity(map.len());
            map.iter().all(|x| seen.insert(*x))
        }
        injective(&self.before)
            && injective(&self.after)
            && injective(&self.inputs)
            && injective(&self.outputs)
    }

    /// True for morphisms of `Sys_ho(I, O)`: homogeneous ends, `f_b = f_a`,
    /// identity interface (by name).
    pub fn is_homogeneous_morphism(&self) -> bool {
        self.source.is_homogeneous()
            && self.target.is_homogeneous()
            && self.before == self.after
            && self.source.inputs() == self.target.inputs()
            && self.source.outputs() == self.target.outputs()
            && self.inputs.iter().enumerate().all(|(k, &v)| k == v)
            && self.outputs.iter().enumerate().all(|(k, &v)| k == v)
    }

    pub fn to_doc(&self) -> MorphismDoc {
        let named = |dom: &FiniteSet, cod: &FiniteSet, map: &[usize]| {
            dom.iter()
                .zip(map)
                .map(|(x, &y)| (x.to_string(), cod.name(y).to_string()))
                .collect()
        };
        MorphismDoc {
            before: named(self.source.before(), self.target.before(), &self.before),
            after: named(self.source.after(), self.target.after(), &self.after),
            inputs: named(self.source.inputs(), self.target.inputs(), &self.inputs),
            outputs: named(self.source.outputs(), self.target.outputs(), &self.outputs),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize, prefix: &str) -> MealySystem {
        let names: Vec<String> = (0..n).map(|k| format!("{prefix}{k}")).collect();
        let table: Vec<(String, String)> = (0..n)
            .map(|k| (names[k].clone(), names[(k + 1) % n].clone()))
            .collect();
        let rows: Vec<(&str, &str, &str, &str)> = table
            .iter()
            .map(|(s, t)| (s.as_str(), "x", t.as_str(), "0"))
            .collect();
        MealySystem::homogeneous_from_table(&["x"], &["0"], &rows).unwrap()
    }

    #[test]
    fn identity_commutes() {
        let c = cycle(3, "c");
        assert!(SystemMorphism::identity(&c).check().holds());
    }

    #[test]
    fn six_cycle_folds_onto_three_cycle() {
        let six = cycle(6, "s");
        let three = cycle(3, "t");
        let fold = SystemMorphism::homogeneous(six.clone(), three.clone(), vec![0, 1, 2, 0, 1, 2])
            .unwrap();
        assert!(fold.check().holds());
        assert!(fold.is_homogeneous_morphism());
        assert!(!fold.is_injective());
        let skew = SystemMorphism::homogeneous(six, three, vec![0, 1, 2, 0, 2, 1]).unwrap();
        let w = skew.check().into_witness().unwrap();
        assert_eq!(w.state, "s3");
    }

    #[test]
    fn doc_round_trip_and_missing_images() {
        let three = cycle(3, "t");
        let id = SystemMorphism::identity(&three);
        let back = SystemMorphism::from_doc(three.clone(), three.clone(), &id.to_doc()).unwrap();
        assert_eq!(id, back);
        let mut doc = id.to_doc();
        doc.before.remove("t1");
        assert!(matches!(
            SystemMorphism::from_doc(three.clone(), three, &doc),
            Err(MorphismError::MissingImage { .. })
        ));
    }
}
