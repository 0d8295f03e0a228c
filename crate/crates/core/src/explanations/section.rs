use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ExplanationError, Judge};
use crate::systems::{
    MealySystem, OpenImmersion, SquareViolation, Subsystem, SystemDoc, SystemMorphism,
};
use crate::Verdict;

/// First condition a candidate section breaks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SectionViolation {
    /// The patch target does not carry the judge's raw interface.
    JudgeMismatch,
    /// The explanatory system has `S_b ≠ S_a`.
    NotHomogeneous,
    /// The explanatory system's interface is not `(I', O')`.
    ExplanatoryInterface,
    InputComponent {
        input: String,
        expected: String,
        found: String,
    },
    OutputComponent {
        output: String,
        expected: String,
        found: String,
    },
    Square(SquareViolation),
}

/// A section `(S', ψ)` over a patch `m : S_U → S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    patch: OpenImmersion,
    psi: SystemMorphism,
}

/// JSON form of a section: the patch as a subsystem of the ambient system
/// (absent = whole system) and the two state maps of `ψ`. The interface maps
/// are determined by the judge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub patch: Option<Subsystem>,
    pub explanatory: SystemDoc,
    pub before: BTreeMap<String, String>,
    pub after: BTreeMap<String, String>,
}

impl Section {
    /// Pairs a patch with `ψ`; only checks that `ψ` starts at the patch source.
    pub fn new(patch: OpenImmersion, psi: SystemMorphism) -> Result<Self, ExplanationError> {
        if psi.source() != patch.source() {
            return Err(ExplanationError::PsiSource);
        }
        Ok(Section { patch, psi })
    }

    /// Builds `ψ` from its state maps, deriving `ψ_I = j_I ∘ m_I` and
    /// `ψ_O = j_O ∘ m_O` by name.
    pub fn from_state_maps(
        judge: &Judge,
        patch: OpenImmersion,
        explanatory: MealySystem,
        before: Vec<usize>,
        after: Vec<usize>,
    ) -> Result<Self, ExplanationError> {
        let m = patch.morphism();
        let inputs = m
            .input_map()
            .iter()
            .map(|&i| {
                let name = judge.input_name(i);
                explanatory
                    .inputs()
                    .index_of(name)
                    .ok_or_else(|| ExplanationError::OutsideExplanatory(name.into()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let outputs = m
            .output_map()
            .iter()
            .map(|&o| {
                let name = judge.output_name(o);
                explanatory
                    .outputs()
                    .index_of(name)
                    .ok_or_else(|| ExplanationError::OutsideExplanatory(name.into()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let psi = SystemMorphism::new(
            patch.source().clone(),
            explanatory,
            before,
            after,
            inputs,
            outputs,
        )?;
        Section::new(patch, psi)
    }

    pub fn from_doc(
        ambient: &MealySystem,
        judge: &Judge,
        doc: &SectionDoc,
    ) -> Result<Self, ExplanationError> {
        let patch = match &doc.patch {
            Some(sub) => OpenImmersion::inclusion(ambient, sub)?,
            None => OpenImmersion::identity(ambient),
        };
        let explanatory = MealySystem::validate(&doc.explanatory)?;
        let lookup = |names: &BTreeMap<String, String>, dom: &crate::systems::FiniteSet| {
            dom.iter()
                .map(|x| {
                    let y = names
                        .get(x)
                        .ok_or_else(|| ExplanationError::MissingImage(x.into()))?;
                    explanatory
                        .before()
                        .index_of(y)
                        .ok_or_else(|| ExplanationError::OutsideExplanatory(y.clone()))
                })
                .collect::<Result<Vec<_>, _>>()
        };
        let before = lookup(&doc.before, patch.source().before())?;
        let after = lookup(&doc.after, patch.source().after())?;
        Section::from_state_maps(judge, patch, explanatory, before, after)
    }

    pub fn to_doc(&self) -> SectionDoc {
        let full = self.patch.source() == self.patch.target()
            && self.patch.morphism() == &SystemMorphism::identity(self.patch.target());
        let d = self.psi.to_doc();
        SectionDoc {
            patch: (!full).then(|| self.patch.to_subsystem()),
            explanatory: self.explanatory().to_doc(),
            before: d.before,
            after: d.after,
        }
    }

    pub fn patch(&self) -> &OpenImmersion {
        &self.patch
    }

    pub fn psi(&self) -> &SystemMorphism {
        &self.psi
    }

    pub fn explanatory(&self) -> &MealySystem {
        self.psi.target()
    }

    /// Explanatory state of before-state `x` of the patch source.
    pub fn before_image(&self, x: usize) -> usize {
        self.psi.before_map()[x]
    }

    pub fn after_image(&self, y: usize) -> usize {
        self.psi.after_map()[y]
    }

    /// Restriction along `n : V → U` (into the patch source): precompose.
    pub fn restrict(&self, n: &OpenImmersion) -> Result<Section, ExplanationError> {
        let patch = self.patch.compose(n)?;
        let psi = self.psi.compose(n.morphism())?;
        Ok(Section { patch, psi })
    }

    /// Same patch, `ψ` post-composed with a homogeneous morphism `q : S' → T`.
    pub fn push_forward(&self, q: &SystemMorphism) -> Result<Section, ExplanationError> {
        Ok(Section {
            patch: self.patch.clone(),
            psi: q.compose(&self.psi)?,
        })
    }

    /// Checks the section conditions against `judge`, reporting the first
    /// failure in the order: judge fit, homogeneity, interface, square.
    pub fn validate(&self, judge: &Judge) -> Verdict<SectionViolation> {
        if !judge.applies_to(self.patch.target()) {
            return Verdict::Fails(SectionViolation::JudgeMismatch);
        }
        let ex = self.explanatory();
        if !ex.is_homogeneous() {
            return Verdict::Fails(SectionViolation::NotHomogeneous);
        }
        if !ex.inputs().is_subset(judge.interpretable_inputs())
            || ex.outputs() != judge.interpretable_outputs()
        {
            return Verdict::Fails(SectionViolation::ExplanatoryInterface);
        }
        let m = self.patch.morphism();
        let src = self.patch.source();
        for (i, &found) in self.psi.input_map().iter().enumerate() {
            let expected = judge.input_name(m.input_map()[i]);
            if ex.inputs().name(found) != expected {
                return Verdict::Fails(SectionViolation::InputComponent {
                    input: src.inputs().name(i).into(),
                    expected: expected.into(),
                    found: ex.inputs().name(found).into(),
                });
            }
        }
        for (o, &found) in self.psi.output_map().iter().enumerate() {
            let expected = judge.output_name(m.output_map()[o]);
            if ex.outputs().name(found) != expected {
                return Verdict::Fails(SectionViolation::OutputComponent {
                    output: src.outputs().name(o).into(),
                    expected: expected.into(),
                    found: ex.outputs().name(found).into(),
                });
            }
        }
        self.psi.check().map(SectionViolation::Square)
    }
}
