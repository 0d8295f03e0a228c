use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ExplanationError;
use crate::systems::{FiniteSet, MealySystem};

/// JSON form of a judge: two name maps plus optional explicit codomains.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JudgeDoc {
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interpretable_inputs: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interpretable_outputs: Option<Vec<String>>,
}

/// A judge `j = (j_I, j_O)` from a raw interface `(I, O)` to an interpretable
/// interface `(I', O')`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Judge {
    raw_inputs: FiniteSet,
    raw_outputs: FiniteSet,
    inputs: FiniteSet,
    outputs: FiniteSet,
    input_map: Vec<usize>,
    output_map: Vec<usize>,
}

impl Judge {
    pub fn from_doc(doc: &JudgeDoc) -> Result<Self, ExplanationError> {
        let raw_inputs = FiniteSet::new(doc.inputs.keys().cloned());
        let raw_outputs = FiniteSet::new(doc.outputs.keys().cloned());
        let inputs = match &doc.interpretable_inputs {
            Some(v) => FiniteSet::new(v.iter().cloned()),
            None => FiniteSet::new(doc.inputs.values().cloned()),
        };
        let outputs = match &doc.interpretable_outputs {
            Some(v) => FiniteSet::new(v.iter().cloned()),
            None => FiniteSet::new(doc.outputs.values().cloned()),
        };
        let resolve = |map: &BTreeMap<String, String>, cod: &FiniteSet| {
            map.iter()
                .map(|(k, v)| {
                    cod.index_of(v)
                        .ok_or_else(|| ExplanationError::JudgeCodomain {
                            element: k.clone(),
                            image: v.clone(),
                        })
                })
                .collect::<Result<Vec<_>, _>>()
        };
        Ok(Judge {
            input_map: resolve(&doc.inputs, &inputs)?,
            output_map: resolve(&doc.outputs, &outputs)?,
            raw_inputs,
            raw_outputs,
            inputs,
            outputs,
        })
    }

    /// `j = id` on the system's interface.
    pub fn identity(sys: &MealySystem) -> Self {
        Judge {
            raw_inputs: sys.inputs().clone(),
            raw_outputs: sys.outputs().clone(),
            inputs: sys.inputs().clone(),
            outputs: sys.outputs().clone(),
            input_map: (0..sys.inputs().len()).collect(),
            output_map: (0..sys.outputs().len()).collect(),
        }
    }

    /// All inputs collapse to `symbol`; outputs pass through unchanged.
    pub fn collapse_inputs(sys: &MealySystem, symbol: &str) -> Self {
        Judge {
            raw_inputs: sys.inputs().clone(),
            raw_outputs: sys.outputs().clone(),
            inputs: FiniteSet::new([symbol]),
            outputs: sys.outputs().clone(),
            input_map: vec![0; sys.inputs().len()],
            output_map: (0..sys.outputs().len()).collect(),
        }
    }

    pub fn raw_inputs(&self) -> &FiniteSet {
        &self.raw_inputs
    }

    pub fn raw_outputs(&self) -> &FiniteSet {
        &self.raw_outputs
    }

    /// `I'`.
    pub fn interpretable_inputs(&self) -> &FiniteSet {
        &self.inputs
    }

    /// `O'`.
    pub fn interpretable_outputs(&self) -> &FiniteSet {
        &self.outputs
    }

    /// `j_I` on positions of the raw input carrier.
    pub fn input(&self, raw: usize) -> usize {
        self.input_map[raw]
    }

    pub fn output(&self, raw: usize) -> usize {
        self.output_map[raw]
    }

    pub fn input_name(&self, raw: usize) -> &str {
        self.inputs.name(self.input_map[raw])
    }

    pub fn output_name(&self, raw: usize) -> &str {
        self.outputs.name(self.output_map[raw])
    }

    /// True when `sys` has exactly this judge's raw interface.
    pub fn applies_to(&self, sys: &MealySystem) -> bool {
        sys.inputs() == &self.raw_inputs && sys.outputs() == &self.raw_outputs
    }

    pub fn to_doc(&self) -> JudgeDoc {
        let named = |dom: &FiniteSet, cod: &FiniteSet, map: &[usize]| {
            dom.iter()
                .zip(map)
                .map(|(x, &y)| (x.to_string(), cod.name(y).to_string()))
                .collect()
        };
        let image_in = |map: &[usize], cod: &FiniteSet| {
            let img: std::collections::BTreeSet<usize> = map.iter().copied().collect();
            img.len() == cod.len()
        };
        JudgeDoc {
            inputs: named(&self.raw_inputs, &self.inputs, &self.input_map),
            outputs: named(&self.raw_outputs, &self.outputs, &self.output_map),
            interpretable_inputs: (!image_in(&self.input_map, &self.inputs))
                .then(|| self.inputs.as_slice().to_vec()),
            interpretable_outputs: (!image_in(&self.output_map, &self.outputs))
                .then(|| self.outputs.as_slice().to_vec()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doc_round_trip_keeps_non_surjective_codomain() {
        let doc = JudgeDoc {
            inputs: [("a".to_string(), "x".to_string())].into(),
            outputs: [("0".to_string(), "0".to_string())].into(),
            interpretable_inputs: Some(vec!["x".into(), "y".into()]),
            interpretable_outputs: None,
        };
        let j = Judge::from_doc(&doc).unwrap();
        assert_eq!(j.interpretable_inputs().len(), 2);
        assert_eq!(j.to_doc(), doc);
    }

    #[test]
    fn image_outside_codomain_is_rejected() {
        let doc = JudgeDoc {
            inputs: [("a".to_string(), "z".to_string())].into(),
            outputs: [("0".to_string(), "0".to_string())].into(),
            interpretable_inputs: Some(vec!["x".into()]),
            interpretable_outputs: None,
        };
        assert!(matches!(
            Judge::from_doc(&doc),
            Err(ExplanationError::JudgeCodomain { .. })
        ));
    }
}
