use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::finite::FiniteSet;
use super::morphism::{MorphismError, SquareViolation, SystemMorphism};
use super::system::{MealySystem, ValidationError};
use crate::Verdict;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SiteError {
    #[error(transparent)]
    Morphism(#[from] MorphismError),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error("not an open immersion: a component map is not injective")]
    NotInjective,
    #[error("not an open immersion: dynamics square fails at ({}, {})", .0.state, .0.input)]
    SquareFails(Box<SquareViolation>),
    #[error("`{element}` is not a {carrier} of the ambient system")]
    UnknownElement { carrier: String, element: String },
    #[error("subsystem is not closed: α({state}, {input}) leaves the chosen after-states/outputs")]
    NotClosed { state: String, input: String },
    #[error("patch {0} does not map into the covered system")]
    ForeignPatch(usize),
    #[error("a covering needs at least one patch")]
    NoPatches,
    #[error("family is not jointly surjective: {0}")]
    NotCovering(Box<Uncovered>),
}

/// A patch of an ambient system chosen by four subsets of its carriers.
///
/// Validation requires `α(S_b' × I') ⊆ S_a' × O'`; after-states are chosen
/// independently of before-states.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subsystem {
    pub before_states: Vec<String>,
    pub after_states: Vec<String>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

impl Subsystem {
    pub fn full(sys: &MealySystem) -> Self {
        Subsystem {
            before_states: sys.before().as_slice().to_vec(),
            after_states: sys.after().as_slice().to_vec(),
            inputs: sys.inputs().as_slice().to_vec(),
            outputs: sys.outputs().as_slice().to_vec(),
        }
    }

    /// `S|_X`: the given states as both before- and after-states, full
    /// interface.
    pub fn states(sys: &MealySystem, states: &[&str]) -> Self {
        let states: Vec<String> = states.iter().map(|s| (*s).to_string()).collect();
        Subsystem {
            before_states: states.clone(),
            after_states: states,
            inputs: sys.inputs().as_slice().to_vec(),
            outputs: sys.outputs().as_slice().to_vec(),
        }
    }

    /// `S|_J`: all states, only the given inputs, all outputs.
    pub fn inputs(sys: &MealySystem, inputs: &[&str]) -> Self {
        Subsystem {
            before_states: sys.before().as_slice().to_vec(),
            after_states: sys.after().as_slice().to_vec(),
            inputs: inputs.iter().map(|s| (*s).to_string()).collect(),
            outputs: sys.outputs().as_slice().to_vec(),
        }
    }
}

/// An injective morphism of systems whose dynamics square commutes.
///
/// In the discrete instantiation every injection counts as open.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OpenImmersion {
    morphism: SystemMorphism,
}

fn subset_positions(
    carrier: &str,
    names: &[String],
    set: &FiniteSet,
) -> Result<Vec<usize>, SiteError> {
    let mut out: Vec<usize> = names
        .iter()
        .map(|n| {
            set.index_of(n).ok_or_else(|| SiteError::UnknownElement {
                carrier: carrier.into(),
                element: n.clone(),
            })
        })
        .collect::<Result<_, _>>()?;
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

impl OpenImmersion {
    pub fn new(morphism: SystemMorphism) -> Result<Self, SiteError> {
        if !morphism.is_injective() {
            return Err(SiteError::NotInjective);
        }
        if let Verdict::Fails(w) = morphism.check() {
            return Err(SiteError::SquareFails(Box::new(w)));
        }
        Ok(OpenImmersion { morphism })
    }

    pub fn identity(sys: &MealySystem) -> Self {
        OpenImmersion {
            morphism: SystemMorphism::identity(sys),
        }
    }

    /// Inclusion of a subsystem of `ambient`, keeping the ambient names.
    pub fn inclusion(ambient: &MealySystem, sub: &Subsystem) -> Result<Self, SiteError> {
        let before = subset_positions("before-state", &sub.before_states, ambient.before())?;
        let after = subset_positions("after-state", &sub.after_states, ambient.after())?;
        let inputs = subset_positions("input", &sub.inputs, ambient.inputs())?;
        let outputs = subset_positions("output", &sub.outputs, ambient.outputs())?;
        Self::inclusion_of_positions(ambient, &before, &after, &inputs, &outputs)
    }

    /// Inclusion given sorted position lists into the ambient carriers.
    pub(crate) fn inclusion_of_positions(
        ambient: &MealySystem,
        before: &[usize],
        after: &[usize],
        inputs: &[usize],
        outputs: &[usize],
    ) -> Result<Self, SiteError> {
        let pos = |list: &[usize], x: usize| list.binary_search(&x).ok();
        for &s in before {
            for &i in inputs {
                let (s2, o) = ambient.step(s, i);
                if pos(after, s2).is_none() || pos(outputs, o).is_none() {
                    return Err(SiteError::NotClosed {
                        state: ambient.before().name(s).into(),
                        input: ambient.inputs().name(i).into(),
                    });
                }
            }
        }
        let source = MealySystem::from_fn(
            ambient.before().select(before.iter().copied()),
            ambient.after().select(after.iter().copied()),
            ambient.inputs().select(inputs.iter().copied()),
            ambient.outputs().select(outputs.iter().copied()),
            |s, i| {
                let (s2, o) = ambient.step(before[s], inputs[i]);
                (pos(after, s2).unwrap(), pos(outputs, o).unwrap())
            },
        )?;
        let morphism = SystemMorphism::new(
            source,
            ambient.clone(),
            before.to_vec(),
            after.to_vec(),
            inputs.to_vec(),
            outputs.to_vec(),
        )?;
        Ok(OpenImmersion { morphism })
    }

    pub fn morphism(&self) -> &SystemMorphism {
        &self.morphism
    }

    pub fn source(&self) -> &MealySystem {
        self.morphism.source()
    }

    pub fn target(&self) -> &MealySystem {
        self.morphism.target()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &OpenImmersion) -> Result<OpenImmersion, SiteError> {
        Ok(OpenImmersion {
            morphism: self.morphism.compose(&inner.morphism)?,
        })
    }

    fn image(map: &[usize]) -> BTreeSet<usize> {
        map.iter().copied().collect()
    }

    /// Image of the patch as positions in the target, componentwise.
    pub fn image_sets(&self) -> [BTreeSet<usize>; 4] {
        let m = &self.morphism;
        [
            Self::image(m.before_map()),
            Self::image(m.after_map()),
            Self::image(m.input_map()),
            Self::image(m.output_map()),
        ]
    }

    /// The image of the patch as a subsystem of the target, by name.
    pub fn to_subsystem(&self) -> Subsystem {
        let [b, a, i, o] = self.image_sets();
        let t = self.target();
        let names = |set: &BTreeSet<usize>, carrier: &FiniteSet| {
            set.iter().map(|&x| carrier.name(x).to_string()).collect()
        };
        Subsystem {
            before_states: names(&b, t.before()),
            after_states: names(&a, t.after()),
            inputs: names(&i, t.inputs()),
            outputs: names(&o, t.outputs()),
        }
    }

    /// True when the input component is a bijection (the patch keeps every
    /// input).
    pub fn is_data_local(&self) -> bool {
        self.morphism.input_map().len() == self.target().inputs().len()
    }

    pub fn is_empty(&self) -> bool {
        let src = self.source();
        (src.before().is_empty() || src.inputs().is_empty())
            && (src.after().is_empty() || src.outputs().is_empty())
    }

    /// Pulls this patch back along `n` (both into the same system): the
    /// subsystem of `n.source` sent into this patch's image, as an inclusion.
    ///
    /// `None` when the pullback is empty on both product carriers, or has no
    /// inputs or no outputs (and so is not a system).
    pub fn pullback_along(&self, n: &OpenImmersion) -> Result<Option<OpenImmersion>, SiteError> {
        if self.target() != n.target() {
            return Err(SiteError::ForeignPatch(0));
        }
        let [b, a, i, o] = self.image_sets();
        let pre = |map: &[usize], img: &BTreeSet<usize>| -> Vec<usize> {
            map.iter()
                .enumerate()
                .filter(|(_, y)| img.contains(y))
                .map(|(x, _)| x)
                .collect()
        };
        let nm = n.morphism();
        let (before, after) = (pre(nm.before_map(), &b), pre(nm.after_map(), &a));
        let (inputs, outputs) = (pre(nm.input_map(), &i), pre(nm.output_map(), &o));
        if inputs.is_empty() || outputs.is_empty() || (before.is_empty() && after.is_empty()) {
            return Ok(None);
        }
        OpenImmersion::inclusion_of_positions(n.source(), &before, &after, &inputs, &outputs)
            .map(Some)
    }
}

/// The pullback of two patches of the same system: a common source together
/// with its immersions into each patch.
#[derive(Debug, Clone)]
pub struct Overlap {
    /// Into the first patch's source.
    pub into_first: OpenImmersion,
    /// Into the second patch's source.
    pub into_second: OpenImmersion,
}

impl Overlap {
    pub fn source(&self) -> &MealySystem {
        self.into_first.source()
    }

    pub fn is_empty(&self) -> bool {
        self.into_first.is_empty()
    }
}

/// Computes `first ×_S second`; `None` when the intersection is not a system
/// (see [`OpenImmersion::pullback_along`]).
pub fn overlap(
    first: &OpenImmersion,
    second: &OpenImmersion,
) -> Result<Option<Overlap>, SiteError> {
    let Some(into_first) = second.pullback_along(first)? else {
        return Ok(None);
    };
    // Route the same subsystem into `second.source` through the ambient system.
    let via = first.compose(&into_first)?;
    let sm = second.morphism();
    let vm = via.morphism();
    let invert = |outer: &[usize], through: &[usize]| -> Vec<usize> {
        through
            .iter()
            .map(|y| {
                outer
                    .iter()
                    .position(|z| z == y)
                    .expect("image inside patch")
            })
            .collect()
    };
    let morphism = SystemMorphism::new(
        into_first.source().clone(),
        second.source().clone(),
        invert(sm.before_map(), vm.before_map()),
        invert(sm.after_map(), vm.after_map()),
        invert(sm.input_map(), vm.input_map()),
        invert(sm.output_map(), vm.output_map()),
    )?;
    Ok(Some(Overlap {
        into_second: OpenImmersion::new(morphism)?,
        into_first,
    }))
}

/// A pair of the product carriers that no patch reaches.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "side", rename_all = "snake_case")]
pub enum Uncovered {
    /// `(s, i) ∈ S_b × I`.
    Before { state: String, input: String },
    /// `(s2, o) ∈ S_a × O`.
    After { state: String, output: String },
}

impl std::fmt::Display for Uncovered {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Uncovered::Before { state, input } => write!(f, "({state}, {input}) ∈ S_b × I"),
            Uncovered::After { state, output } => write!(f, "({state}, {output}) ∈ S_a × O"),
        }
    }
}

/// Joint surjectivity on `S_b × I` and `S_a × O`.
pub fn check_covering(target: &MealySystem, patches: &[OpenImmersion]) -> Verdict<Uncovered> {
    let images: Vec<_> = patches.iter().map(OpenImmersion::image_sets).collect();
    for s in 0..target.before().len() {
        for i in 0..target.inputs().len() {
            if !images
                .iter()
                .any(|[b, _, ii, _]| b.contains(&s) && ii.contains(&i))
            {
                return Verdict::Fails(Uncovered::Before {
                    state: target.before().name(s).into(),
                    input: target.inputs().name(i).into(),
                });
            }
        }
    }
    for s in 0..target.after().len() {
        for o in 0..target.outputs().len() {
            if !images
                .iter()
                .any(|[_, a, _, oo]| a.contains(&s) && oo.contains(&o))
            {
                return Verdict::Fails(Uncovered::After {
                    state: target.after().name(s).into(),
                    output: target.outputs().name(o).into(),
                });
            }
        }
    }
    Verdict::Holds
}

/// A finite, jointly surjective family of open immersions into `target`.
///
/// Duplicate patches are dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Covering {
    target: MealySystem,
    patches: Vec<OpenImmersion>,
}

impl Covering {
    pub fn new(target: MealySystem, patches: Vec<OpenImmersion>) -> Result<Self, SiteError> {
        if patches.is_empty() {
            return Err(SiteError::NoPatches);
        }
        if let Some(k) = patches.iter().position(|p| p.target() != &target) {
            return Err(SiteError::ForeignPatch(k));
        }
        let mut unique: Vec<OpenImmersion> = Vec::with_capacity(patches.len());
        for p in patches {
            if !unique.contains(&p) {
                unique.push(p);
            }
        }
        if let Verdict::Fails(u) = check_covering(&target, &unique) {
            return Err(SiteError::NotCovering(Box::new(u)));
        }
        Ok(Covering {
            target,
            patches: unique,
        })
    }

    pub fn identity(target: &MealySystem) -> Self {
        Covering {
            target: target.clone(),
            patches: vec![OpenImmersion::identity(target)],
        }
    }

    /// Covering by inclusions of subsystems.
    pub fn from_subsystems(target: &MealySystem, subs: &[Subsystem]) -> Result<Self, SiteError> {
        let patches = subs
            .iter()
            .map(|s| OpenImmersion::inclusion(target, s))
            .collect::<Result<Vec<_>, _>>()?;
        Covering::new(target.clone(), patches)
    }

    pub fn target(&self) -> &MealySystem {
        &self.target
    }

    pub fn patches(&self) -> &[OpenImmersion] {
        &self.patches
    }

    pub fn check(&self) -> Verdict<Uncovered> {
        check_covering(&self.target, &self.patches)
    }

    /// Every patch keeps the full input carrier.
    pub fn is_data_local(&self) -> bool {
        self.patches.iter().all(OpenImmersion::is_data_local)
    }

    /// Pulls the covering back along `n`; empty patches are dropped.
    pub fn pullback(&self, n: &OpenImmersion) -> Result<Covering, SiteError> {
        let mut patches = Vec::new();
        for p in &self.patches {
            if let Some(q) = p.pullback_along(n)? {
                patches.push(q);
            }
        }
        Covering::new(n.source().clone(), patches)
    }

    /// Composes a covering of each patch with the patch itself.
    pub fn refine(&self, per_patch: &[Covering]) -> Result<Covering, SiteError> {
        let mut patches = Vec::new();
        for (outer, inner) in self.patches.iter().zip(per_patch) {
            for p in inner.patches() {
                patches.push(outer.compose(p)?);
            }
        }
        Covering::new(self.target.clone(), patches)
    }

    /// Patches expressed as subsets of the target (names), for serialization.
    pub fn to_subsystems(&self) -> Vec<Subsystem> {
        self.patches
            .iter()
            .map(OpenImmersion::to_subsystem)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::system::{SystemDoc, Transition};

    fn gluing_system() -> MealySystem {
        let rows = [
            ("s0", "a", "s0", "0"),
            ("s0", "b", "s2", "0"),
            ("s1", "a", "s1", "1"),
            ("s1", "b", "s1", "1"),
            ("s2", "a", "s1", "1"),
            ("s2", "b", "s1", "1"),
            ("s3", "a", "s3", "1"),
            ("s3", "b", "s2", "1"),
        ];
        MealySystem::homogeneous_from_table(&["a", "b"], &["0", "1"], &rows).unwrap()
    }

    #[test]
    fn identity_patch_covers() {
        let sys = gluing_system();
        assert!(Covering::identity(&sys).check().holds());
    }

    #[test]
    fn data_local_state_covering_of_gluing_system() {
        let sys = gluing_system();
        let c = Covering::from_subsystems(
            &sys,
            &[
                Subsystem::states(&sys, &["s0", "s1", "s2"]),
                Subsystem::states(&sys, &["s1", "s2", "s3"]),
            ],
        )
        .unwrap();
        assert!(c.check().holds());
        assert!(c.is_data_local());
    }

    #[test]
    fn product_condition_is_stronger_than_factorwise() {
        // Both patches see all before-states between them and all inputs
        // between them, yet (s0, b) lies in neither product.
        let sys = gluing_system();
        let p1 = Subsystem {
            before_states: vec!["s0".into(), "s1".into(), "s2".into(), "s3".into()],
            after_states: sys.after().as_slice().to_vec(),
            inputs: vec!["a".into()],
            outputs: sys.outputs().as_slice().to_vec(),
        };
        let p2 = Subsystem {
            before_states: vec!["s1".into(), "s2".into(), "s3".into()],
            after_states: sys.after().as_slice().to_vec(),
            inputs: vec!["a".into(), "b".into()],
            outputs: sys.outputs().as_slice().to_vec(),
        };
        let patches = vec![
            OpenImmersion::inclusion(&sys, &p1).unwrap(),
            OpenImmersion::inclusion(&sys, &p2).unwrap(),
        ];
        assert_eq!(
            check_covering(&sys, &patches),
            Verdict::Fails(Uncovered::Before {
                state: "s0".into(),
                input: "b".into()
            })
        );
    }

    #[test]
    fn pullback_along_second_patch() {
        let sys = gluing_system();
        let c = Covering::from_subsystems(
            &sys,
            &[
                Subsystem::states(&sys, &["s0", "s1", "s2"]),
                Subsystem::states(&sys, &["s1", "s2", "s3"]),
            ],
        )
        .unwrap();
        let n = c.patches()[1].clone();
        let pulled = c.pullback(&n).unwrap();
        let befores: Vec<Vec<String>> = pulled
            .patches()
            .iter()
            .map(|p| p.source().before().as_slice().to_vec())
            .collect();
        assert_eq!(
            befores,
            vec![
                vec!["s1".to_string(), "s2".into()],
                vec!["s1".to_string(), "s2".into(), "s3".into()]
            ]
        );
        assert!(pulled.check().holds());
    }

    #[test]
    fn pullback_drops_disjoint_patch() {
        // Two disconnected loops; pulling back along the second loop's patch
        // leaves only one patch.
        let sys = MealySystem::homogeneous_from_table(
            &["x"],
            &["0"],
            &[("u", "x", "u", "0"), ("v", "x", "v", "0")],
        )
        .unwrap();
        let c = Covering::from_subsystems(
            &sys,
            &[
                Subsystem::states(&sys, &["u"]),
                Subsystem::states(&sys, &["v"]),
            ],
        )
        .unwrap();
        let pulled = c.pullback(&c.patches()[1]).unwrap();
        assert_eq!(pulled.patches().len(), 1);
    }

    #[test]
    fn unclosed_subsystem_is_rejected() {
        let sys = gluing_system();
        let err = OpenImmersion::inclusion(&sys, &Subsystem::states(&sys, &["s0", "s1"]));
        assert!(matches!(err, Err(SiteError::NotClosed { .. })));
    }

    #[test]
    fn overlap_maps_into_both_patches() {
        let sys = gluing_system();
        let p1 =
            OpenImmersion::inclusion(&sys, &Subsystem::states(&sys, &["s0", "s1", "s2"])).unwrap();
        let p2 =
            OpenImmersion::inclusion(&sys, &Subsystem::states(&sys, &["s1", "s2", "s3"])).unwrap();
        let ov = overlap(&p1, &p2).unwrap().unwrap();
        assert_eq!(ov.source().before().as_slice(), &["s1", "s2"]);
        let via1 = p1.compose(&ov.into_first).unwrap();
        let via2 = p2.compose(&ov.into_second).unwrap();
        assert_eq!(via1, via2);
    }

    #[test]
    fn duplicate_patches_are_normalized_away() {
        let sys = gluing_system();
        let doc = SystemDoc {
            before_states: vec![],
            after_states: vec![],
            inputs: vec!["a".into()],
            outputs: vec!["0".into()],
            dynamics: Vec::<Transition>::new(),
        };
        assert!(MealySystem::validate(&doc).is_ok());
        let id = OpenImmersion::identity(&sys);
        let c = Covering::new(sys.clone(), vec![id.clone(), id]).unwrap();
        assert_eq!(c.patches().len(), 1);
    }
}
