use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use super::{ExplanationError, Section};
use crate::systems::{FiniteSet, MealySystem, MorphismDoc, SystemDoc, SystemMorphism};

/// A common subsystem through which two sections factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CogermWitness {
    /// `S''`.
    pub core: MealySystem,
    /// `i_1 : S'' → S_1'`.
    pub first: SystemMorphism,
    /// `i_2 : S'' → S_2'`.
    pub second: SystemMorphism,
    /// `φ : S_U → S''`.
    pub phi: SystemMorphism,
}

#[derive(Debug, Clone, Serialize)]
pub struct CogermWitnessDoc {
    pub core: SystemDoc,
    pub first: BTreeMap<String, String>,
    pub second: BTreeMap<String, String>,
    pub phi: MorphismDoc,
}

impl CogermWitness {
    /// Checks every witness condition against the two sections.
    pub fn check(&self, s1: &Section, s2: &Section) -> bool {
        let factors = |i: &SystemMorphism, s: &Section| {
            i.target() == s.explanatory()
                && i.is_homogeneous_morphism()
                && i.is_injective()
                && i.check().holds()
                && i.compose(&self.phi).is_ok_and(|c| &c == s.psi())
        };
        self.core.is_homogeneous()
            && self.phi.target() == &self.core
            && self.phi.check().holds()
            && factors(&self.first, s1)
            && factors(&self.second, s2)
    }

    pub fn to_doc(&self) -> CogermWitnessDoc {
        CogermWitnessDoc {
            core: self.core.to_doc(),
            first: self.first.to_doc().before,
            second: self.second.to_doc().before,
            phi: self.phi.to_doc(),
        }
    }
}

/// Why the pair closure does not yield a witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CogermFailure {
    /// Paired states answer `input` differently.
    OutputMismatch {
        pair: (String, String),
        input: String,
    },
    /// The closure pairs `state` with more than one partner.
    NotSingleValued {
        state: String,
        partners: Vec<String>,
    },
}

/// Searches for a cogerm witness by pair closure.
///
/// The relation is seeded with the images of every before- and after-state of
/// the patch and closed under the dynamics on all inputs; a witness exists
/// iff the closure is a partial bijection whose pairs agree on outputs.
pub fn cogerm_search(
    s1: &Section,
    s2: &Section,
) -> Result<Result<CogermWitness, CogermFailure>, ExplanationError> {
    if s1.patch() != s2.patch() {
        return Err(ExplanationError::DifferentPatches);
    }
    let (m1, m2) = (s1.explanatory(), s2.explanatory());
    if !m1.is_homogeneous() || !m2.is_homogeneous() {
        return Err(ExplanationError::HeterogeneousInput);
    }
    if m1.inputs() != m2.inputs() || m1.outputs() != m2.outputs() {
        return Err(ExplanationError::InterfaceMismatch);
    }
    let src = s1.patch().source();
    let mut rel: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut queue = VecDeque::new();
    let seeds = (0..src.before().len())
        .map(|x| (s1.before_image(x), s2.before_image(x)))
        .chain((0..src.after().len()).map(|y| (s1.after_image(y), s2.after_image(y))));
    for pair in seeds {
        if rel.insert(pair) {
            queue.push_back(pair);
        }
    }
    while let Some((p, q)) = queue.pop_front() {
        for a in 0..m1.inputs().len() {
            let (p2, o1) = m1.step(p, a);
            let (q2, o2) = m2.step(q, a);
            if o1 != o2 {
                return Ok(Err(CogermFailure::OutputMismatch {
                    pair: (m1.before().name(p).into(), m2.before().name(q).into()),
                    input: m1.inputs().name(a).into(),
                }));
            }
            if rel.insert((p2, q2)) {
                queue.push_back((p2, q2));
            }
        }
    }
    let mut forward: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut backward: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(p, q) in &rel {
        forward.entry(p).or_default().push(q);
        backward.entry(q).or_default().push(p);
    }
    if let Some((&p, qs)) = forward.iter().find(|(_, v)| v.len() > 1) {
        return Ok(Err(CogermFailure::NotSingleValued {
            state: m1.before().name(p).into(),
            partners: qs
                .iter()
                .map(|&q| m2.before().name(q).to_string())
                .collect(),
        }));
    }
    if let Some((&q, ps)) = backward.iter().find(|(_, v)| v.len() > 1) {
        return Ok(Err(CogermFailure::NotSingleValued {
            state: m2.before().name(q).into(),
            partners: ps
                .iter()
                .map(|&p| m1.before().name(p).to_string())
                .collect(),
        }));
    }

    // Core states are named after their first component; `rel` is sorted by
    // it, so core positions follow `rel` order.
    let pairs: Vec<(usize, usize)> = rel.into_iter().collect();
    let pos: BTreeMap<usize, usize> = pairs
        .iter()
        .enumerate()
        .map(|(k, &(p, _))| (p, k))
        .collect();
    let states = FiniteSet::new(pairs.iter().map(|&(p, _)| m1.before().name(p).to_string()));
    let core = MealySystem::from_fn(
        states.clone(),
        states,
        m1.inputs().clone(),
        m1.outputs().clone(),
        |k, a| {
            let (p2, o) = m1.step(pairs[k].0, a);
            (pos[&p2], o)
        },
    )?;
    let first = SystemMorphism::homogeneous(
        core.clone(),
        m1.clone(),
        pairs.iter().map(|x| x.0).collect(),
    )?;
    let second = SystemMorphism::homogeneous(
        core.clone(),
        m2.clone(),
        pairs.iter().map(|x| x.1).collect(),
    )?;
    let psi = s1.psi();
    let phi = SystemMorphism::new(
        src.clone(),
        core.clone(),
        psi.before_map().iter().map(|p| pos[p]).collect(),
        psi.after_map().iter().map(|p| pos[p]).collect(),
        psi.input_map().to_vec(),
        psi.output_map().to_vec(),
    )?;
    Ok(Ok(CogermWitness {
        core,
        first,
        second,
        phi,
    }))
}

/// `Some(witness)` iff the sections are cogerm-equivalent.
pub fn cogerm_equiv(s1: &Section, s2: &Section) -> Result<Option<CogermWitness>, ExplanationError> {
    Ok(cogerm_search(s1, s2)?.ok())
}
