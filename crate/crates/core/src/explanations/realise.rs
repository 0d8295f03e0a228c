use std::collections::BTreeSet;

use serde::Serialize;

use super::behavior::minimize;
use super::{ExplanationError, Judge, Section};
use crate::systems::{unique_names, Covering, FiniteSet, MealySystem, OpenImmersion};
use crate::Verdict;

/// `I'_U = im(j_I ∘ m_I)`.
pub fn restricted_interface(judge: &Judge, m: &OpenImmersion) -> FiniteSet {
    let cod = judge.interpretable_inputs();
    let image: BTreeSet<usize> = m
        .morphism()
        .input_map()
        .iter()
        .map(|&i| judge.input(i))
        .collect();
    cod.select(image)
}

/// A patch whose restricted interface differs from the covered system's.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NotJFull {
    pub patch: usize,
    pub interface: Vec<String>,
    pub expected: Vec<String>,
}

/// Every patch's restricted interface equals the target's.
pub fn is_j_full(c: &Covering, judge: &Judge) -> Verdict<NotJFull> {
    let expected = restricted_interface(judge, &OpenImmersion::identity(c.target()));
    c.patches()
        .iter()
        .enumerate()
        .find_map(|(k, m)| {
            let got = restricted_interface(judge, m);
            (got != expected).then(|| NotJFull {
                patch: k,
                interface: got.as_slice().to_vec(),
                expected: expected.as_slice().to_vec(),
            })
        })
        .into()
}

/// Which input carrier a realisation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interface {
    /// `I'_U`, for restricted-interface sections.
    Restricted,
    /// All of `I'`, for behavioral sections.
    Full,
}

fn least_output(judge: &Judge) -> Result<usize, ExplanationError> {
    if judge.interpretable_outputs().is_empty() {
        return Err(ExplanationError::EmptyInterface);
    }
    Ok(0)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let n = self.0[y];
            self.0[y] = r;
            y = n;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

/// The canonical explanation of a patch read through the judge.
///
/// Explanatory states are the patch's before-states. After-states reached
/// from one state by inputs with the same interpretation are identified; each
/// such group is sent to the before-state of its least member that is also a
/// before-state, or to a fresh self-looping state otherwise. Letters without
/// constraint self-loop with the least interpretable output.
///
/// Fails with `FiberConflict` when two inputs with the same interpretation
/// produce differently interpreted outputs from one state: no section exists.
pub fn canonical_realisation(
    judge: &Judge,
    patch: &OpenImmersion,
    interface: Interface,
) -> Result<Section, ExplanationError> {
    let src = patch.source();
    let m = patch.morphism();
    let letters = match interface {
        Interface::Restricted => restricted_interface(judge, patch),
        Interface::Full => judge.interpretable_inputs().clone(),
    };
    let idle = least_output(judge)?;
    let nb = src.before().len();
    let na = src.after().len();

    // Per (state, letter): the interpreted output and a representative
    // after-state; after-states sharing a slot are merged.
    let mut slot: Vec<Option<(usize, usize, usize)>> = vec![None; nb * letters.len()];
    let mut uf = UnionFind((0..na).collect());
    for s in 0..nb {
        for i in 0..src.inputs().len() {
            let (s2, o) = src.step(s, i);
            let raw_i = m.input_map()[i];
            let Some(l) = letters.index_of(judge.input_name(raw_i)) else {
                continue;
            };
            let out = judge.output(m.output_map()[o]);
            match slot[s * letters.len() + l] {
                None => slot[s * letters.len() + l] = Some((i, s2, out)),
                Some((i0, t, out0)) => {
                    if out0 != out {
                        return Err(ExplanationError::FiberConflict {
                            state: src.before().name(s).into(),
                            inputs: (src.inputs().name(i0).into(), src.inputs().name(i).into()),
                            outputs: (
                                judge.interpretable_outputs().name(out0).into(),
                                judge.interpretable_outputs().name(out).into(),
                            ),
                        });
                    }
                    uf.union(t, s2);
                }
            }
        }
    }

    // Resolve after-classes: least member that names a before-state.
    let mut target_of_root: Vec<Option<usize>> = vec![None; na];
    for y in 0..na {
        let r = uf.find(y);
        if target_of_root[r].is_none() {
            if let Some(b) = src.before().index_of(src.after().name(y)) {
                target_of_root[r] = Some(b);
            }
        }
    }
    let mut fresh_roots: Vec<usize> = Vec::new();
    for y in 0..na {
        let r = uf.find(y);
        if r == y && target_of_root[r].is_none() {
            fresh_roots.push(r);
        }
    }
    let mut names: Vec<String> = src.before().as_slice().to_vec();
    names.extend(fresh_roots.iter().map(|&r| src.after().name(r).to_string()));
    let names = unique_names(names);
    let states = FiniteSet::new(names.iter().cloned());
    let position: Vec<usize> = names.iter().map(|n| states.index_of(n).unwrap()).collect();
    let pos = |k: usize| position[k];
    let after_node = |uf: &mut UnionFind, y: usize| -> usize {
        let r = uf.find(y);
        match target_of_root[r] {
            Some(b) => pos(b),
            None => pos(nb + fresh_roots.iter().position(|&f| f == r).unwrap()),
        }
    };
    let mut table = vec![(usize::MAX, idle); states.len() * letters.len()];
    for (k, row) in table.chunks_mut(letters.len()).enumerate() {
        for cell in row.iter_mut() {
            cell.0 = k;
        }
    }
    for s in 0..nb {
        for l in 0..letters.len() {
            if let Some((_, s2, out)) = slot[s * letters.len() + l] {
                let node = after_node(&mut uf, s2);
                table[pos(s) * letters.len() + l] = (node, out);
            }
        }
    }
    let explanatory = MealySystem::from_fn(
        states.clone(),
        states,
        letters.clone(),
        judge.interpretable_outputs().clone(),
        |s, l| table[s * letters.len() + l],
    )?;
    let before: Vec<usize> = (0..nb).map(pos).collect();
    let after: Vec<usize> = (0..na).map(|y| after_node(&mut uf, y)).collect();
    Section::from_state_maps(judge, patch.clone(), explanatory, before, after)
}

/// The canonical realisation quotiented by behavior.
pub fn minimal_realisation(
    judge: &Judge,
    patch: &OpenImmersion,
    interface: Interface,
) -> Result<Section, ExplanationError> {
    minimize_section(&canonical_realisation(judge, patch, interface)?)
}

/// Replaces the explanatory system by its minimization.
pub fn minimize_section(s: &Section) -> Result<Section, ExplanationError> {
    let min = minimize(s.explanatory())?;
    s.push_forward(&min.quotient(s.explanatory()))
}

/// Extends a restricted-interface section to the full interface `I'`:
/// letters outside the section's alphabet self-loop with the least output.
pub fn extend_to_full(judge: &Judge, s: &Section) -> Result<Section, ExplanationError> {
    let ex = s.explanatory();
    let full = judge.interpretable_inputs();
    let idle = least_output(judge)?;
    let extended = MealySystem::from_fn(
        ex.before().clone(),
        ex.after().clone(),
        full.clone(),
        ex.outputs().clone(),
        |st, l| match ex.inputs().index_of(full.name(l)) {
            Some(i) => ex.step(st, i),
            None => (st, idle),
        },
    )?;
    Section::from_state_maps(
        judge,
        s.patch().clone(),
        extended,
        s.psi().before_map().to_vec(),
        s.psi().after_map().to_vec(),
    )
}

/// Drops the letters outside `I'_U` from a section's explanatory system.
pub fn restrict_interface(judge: &Judge, s: &Section) -> Result<Section, ExplanationError> {
    let ex = s.explanatory();
    let letters = restricted_interface(judge, s.patch());
    if let Some(l) = letters.iter().find(|l| !ex.inputs().contains(l)) {
        return Err(ExplanationError::AlphabetOutsideInterface(l.into()));
    }
    let reduced = MealySystem::from_fn(
        ex.before().clone(),
        ex.after().clone(),
        letters.clone(),
        ex.outputs().clone(),
        |st, l| ex.step(st, ex.inputs().index_of(letters.name(l)).unwrap()),
    )?;
    Section::from_state_maps(
        judge,
        s.patch().clone(),
        reduced,
        s.psi().before_map().to_vec(),
        s.psi().after_map().to_vec(),
    )
}
