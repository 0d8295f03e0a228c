use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::Serialize;

use super::{ExplanationError, Section};
use crate::systems::{FiniteSet, MealySystem, SystemMorphism};
use crate::Verdict;

/// A finite automaton view of one or more homogeneous machines over a common
/// alphabet, with outputs interned by name.
#[derive(Debug, Clone)]
pub(crate) struct Joint {
    offsets: Vec<usize>,
    letters: usize,
    next: Vec<usize>,
    out: Vec<usize>,
    out_names: Vec<String>,
    class_of: Vec<usize>,
    class_count: usize,
}

impl Joint {
    /// Disjoint union of `machines`, each read over `alphabet` (by name).
    pub(crate) fn new(
        machines: &[&MealySystem],
        alphabet: &FiniteSet,
    ) -> Result<Self, ExplanationError> {
        let mut offsets = Vec::with_capacity(machines.len() + 1);
        let mut next = Vec::new();
        let mut out = Vec::new();
        let mut interned: BTreeMap<String, usize> = BTreeMap::new();
        let mut out_names = Vec::new();
        let mut base = 0;
        for m in machines {
            if !m.is_homogeneous() {
                return Err(ExplanationError::HeterogeneousInput);
            }
            let letters = alphabet
                .iter()
                .map(|a| {
                    m.inputs()
                        .index_of(a)
                        .ok_or_else(|| ExplanationError::AlphabetOutsideInterface(a.into()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            offsets.push(base);
            for s in 0..m.state_count() {
                for &i in &letters {
                    let (s2, o) = m.step(s, i);
                    next.push(base + s2);
                    let name = m.outputs().name(o);
                    let id = *interned.entry(name.to_string()).or_insert_with(|| {
                        out_names.push(name.to_string());
                        out_names.len() - 1
                    });
                    out.push(id);
                }
            }
            base += m.state_count();
        }
        offsets.push(base);
        let mut joint = Joint {
            offsets,
            letters: alphabet.len(),
            next,
            out,
            out_names,
            class_of: Vec::new(),
            class_count: 0,
        };
        joint.refine();
        Ok(joint)
    }

    pub(crate) fn size(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Moore-style refinement: split by one-step outputs, then by successor
    /// classes, until stable. Classes are numbered by first member.
    fn refine(&mut self) {
        let n = self.size();
        let k = self.letters;
        let number = |keys: Vec<Vec<usize>>| {
            let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
            let mut class = Vec::with_capacity(keys.len());
            for key in keys {
                let fresh = ids.len();
                class.push(*ids.entry(key).or_insert(fresh));
            }
            (class, ids.len())
        };
        let (mut class, mut count) = number(
            (0..n)
                .map(|s| self.out[s * k..(s + 1) * k].to_vec())
                .collect(),
        );
        loop {
            let keys = (0..n)
                .map(|s| {
                    let mut key = vec![class[s]];
                    key.extend((0..k).map(|a| class[self.next[s * k + a]]));
                    key
                })
                .collect();
            let (refined, c) = number(keys);
            if c == count {
                break;
            }
            class = refined;
            count = c;
        }
        self.class_of = class;
        self.class_count = count;
    }

    pub(crate) fn global(&self, machine: usize, state: usize) -> usize {
        self.offsets[machine] + state
    }

    pub(crate) fn class(&self, machine: usize, state: usize) -> usize {
        self.class_of[self.global(machine, state)]
    }

    pub(crate) fn class_of_global(&self, g: usize) -> usize {
        self.class_of[g]
    }

    pub(crate) fn class_count(&self) -> usize {
        self.class_count
    }

    pub(crate) fn step(&self, g: usize, letter: usize) -> (usize, usize) {
        let idx = g * self.letters + letter;
        (self.next[idx], self.out[idx])
    }

    pub(crate) fn output_name(&self, id: usize) -> &str {
        &self.out_names[id]
    }

    /// Output word from global state `g`, as names.
    pub(crate) fn run(&self, mut g: usize, word: &[usize]) -> Vec<String> {
        word.iter()
            .map(|&a| {
                let (n, o) = self.step(g, a);
                g = n;
                self.out_names[o].clone()
            })
            .collect()
    }

    /// Shortest, then lexicographically least, word separating `p` and `q`.
    ///
    /// Breadth-first search over pairs, expanding letters in order: each level
    /// of the queue stays sorted by the path that reached it, so the first
    /// pair with a separating letter yields the least word.
    pub(crate) fn separating_word(&self, p: usize, q: usize) -> Option<Vec<usize>> {
        if self.class_of[p] == self.class_of[q] {
            return None;
        }
        type Step = ((usize, usize), usize);
        let mut parent: HashMap<(usize, usize), Option<Step>> = HashMap::new();
        let mut queue = VecDeque::new();
        parent.insert((p, q), None);
        queue.push_back((p, q));
        while let Some((x, y)) = queue.pop_front() {
            for a in 0..self.letters {
                let (_, ox) = self.step(x, a);
                let (_, oy) = self.step(y, a);
                if ox != oy {
                    let mut word = vec![a];
                    let mut cur = (x, y);
                    while let Some(Some((prev, letter))) = parent.get(&cur) {
                        word.push(*letter);
                        cur = *prev;
                    }
                    word.reverse();
                    return Some(word);
                }
            }
            for a in 0..self.letters {
                let (x2, _) = self.step(x, a);
                let (y2, _) = self.step(y, a);
                if let std::collections::hash_map::Entry::Vacant(e) = parent.entry((x2, y2)) {
                    e.insert(Some(((x, y), a)));
                    queue.push_back((x2, y2));
                }
            }
        }
        None
    }
}

/// A pair of classes and the word that separates them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Separator {
    pub classes: (usize, usize),
    pub word: Vec<String>,
}

/// The states of one homogeneous machine grouped into behavior classes over
/// an alphabet, with a separating word for every pair of distinct classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BehaviorPartition {
    pub alphabet: Vec<String>,
    pub classes: Vec<Vec<String>>,
    pub separators: Vec<Separator>,
}

impl BehaviorPartition {
    pub fn of(sys: &MealySystem, alphabet: &FiniteSet) -> Result<Self, ExplanationError> {
        let joint = Joint::new(&[sys], alphabet)?;
        let mut classes = vec![Vec::new(); joint.class_count()];
        let mut reps = vec![usize::MAX; joint.class_count()];
        for s in 0..sys.state_count() {
            let c = joint.class(0, s);
            if reps[c] == usize::MAX {
                reps[c] = s;
            }
            classes[c].push(sys.before().name(s).to_string());
        }
        let mut separators = Vec::new();
        for c1 in 0..reps.len() {
            for c2 in c1 + 1..reps.len() {
                let word = joint
                    .separating_word(reps[c1], reps[c2])
                    .expect("distinct classes are separated");
                separators.push(Separator {
                    classes: (c1, c2),
                    word: word.iter().map(|&a| alphabet.name(a).to_string()).collect(),
                });
            }
        }
        Ok(BehaviorPartition {
            alphabet: alphabet.as_slice().to_vec(),
            classes,
            separators,
        })
    }

    /// Re-runs every separator on the machine and confirms the outputs differ.
    pub fn verify(&self, sys: &MealySystem) -> bool {
        self.separators.iter().all(|sep| {
            let first = sys.before().index_of(&self.classes[sep.classes.0][0]);
            let second = sys.before().index_of(&self.classes[sep.classes.1][0]);
            let word: Option<Vec<usize>> =
                sep.word.iter().map(|a| sys.inputs().index_of(a)).collect();
            match (first, second, word) {
                (Some(p), Some(q), Some(w)) => sys.run(p, &w) != sys.run(q, &w),
                _ => false,
            }
        })
    }
}

/// Two sections disagree from `state` on `word`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Distinction {
    pub state: String,
    pub word: Vec<String>,
    pub first_outputs: Vec<String>,
    pub second_outputs: Vec<String>,
}

/// Behavioral equivalence of two sections over the same patch, testing input
/// words over `alphabet`.
///
/// On failure reports the before-state with the shortest separating word
/// (ties broken by state order); the word is replayed on both machines.
pub fn behavioral_equiv(
    first: &Section,
    second: &Section,
    alphabet: &FiniteSet,
) -> Result<Verdict<Distinction>, ExplanationError> {
    if first.patch() != second.patch() {
        return Err(ExplanationError::DifferentPatches);
    }
    let (m1, m2) = (first.explanatory(), second.explanatory());
    let joint = Joint::new(&[m1, m2], alphabet)?;
    let src = first.patch().source();
    let mut best: Option<(usize, Vec<usize>)> = None;
    for x in 0..src.before().len() {
        let p = joint.global(0, first.before_image(x));
        let q = joint.global(1, second.before_image(x));
        if let Some(word) = joint.separating_word(p, q) {
            if best.as_ref().is_none_or(|(_, w)| word.len() < w.len()) {
                best = Some((x, word));
            }
        }
    }
    Ok(match best {
        None => Verdict::Holds,
        Some((x, word)) => {
            let p = first.before_image(x);
            let q = second.before_image(x);
            let letters = |m: &MealySystem| -> Vec<usize> {
                word.iter()
                    .map(|&a| m.inputs().index_of(alphabet.name(a)).unwrap())
                    .collect()
            };
            let names = |m: &MealySystem, outs: Vec<usize>| -> Vec<String> {
                outs.into_iter()
                    .map(|o| m.outputs().name(o).to_string())
                    .collect()
            };
            let first_outputs = names(m1, m1.run(p, &letters(m1)));
            let second_outputs = names(m2, m2.run(q, &letters(m2)));
            debug_assert_ne!(first_outputs, second_outputs);
            Verdict::Fails(Distinction {
                state: src.before().name(x).into(),
                word: word.iter().map(|&a| alphabet.name(a).to_string()).collect(),
                first_outputs,
                second_outputs,
            })
        }
    })
}

/// A machine quotiented by behavior, with the quotient state map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Minimized {
    pub system: MealySystem,
    pub state_map: Vec<usize>,
}

impl Minimized {
    /// The quotient map as a morphism of `Sys_ho(I, O)`.
    pub fn quotient(&self, original: &MealySystem) -> SystemMorphism {
        SystemMorphism::homogeneous(
            original.clone(),
            self.system.clone(),
            self.state_map.clone(),
        )
        .expect("quotient map is a homogeneous morphism")
    }
}

/// Quotient of a homogeneous machine by behavioral equivalence over its full
/// input alphabet. Each class is named after its least member.
pub fn minimize(sys: &MealySystem) -> Result<Minimized, ExplanationError> {
    if !sys.is_homogeneous() {
        return Err(ExplanationError::HeterogeneousInput);
    }
    let joint = Joint::new(&[sys], sys.inputs())?;
    let mut reps: Vec<usize> = Vec::new();
    let mut class_pos = vec![usize::MAX; joint.class_count()];
    for s in 0..sys.state_count() {
        let c = joint.class(0, s);
        if class_pos[c] == usize::MAX {
            class_pos[c] = reps.len();
            reps.push(s);
        }
    }
    // Representatives are increasing in state order, so their names are sorted
    // and class positions coincide with positions in the new state set.
    let states = FiniteSet::new(reps.iter().map(|&s| sys.before().name(s).to_string()));
    let state_map: Vec<usize> = (0..sys.state_count())
        .map(|s| class_pos[joint.class(0, s)])
        .collect();
    let system = MealySystem::from_fn(
        states.clone(),
        states,
        sys.inputs().clone(),
        sys.outputs().clone(),
        |c, i| {
            let (s2, o) = sys.step(reps[c], i);
            (state_map[s2], o)
        },
    )?;
    Ok(Minimized { system, state_map })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> MealySystem {
        let names: Vec<String> = (0..n).map(|k| format!("c{k}")).collect();
        let rows: Vec<(&str, &str, &str, &str)> = (0..n)
            .map(|k| (names[k].as_str(), "x", names[(k + 1) % n].as_str(), "0"))
            .collect();
        MealySystem::homogeneous_from_table(&["x"], &["0"], &rows).unwrap()
    }

    #[test]
    fn six_cycle_with_constant_output_collapses() {
        let m = minimize(&cycle(6)).unwrap();
        assert_eq!(m.system.state_count(), 1);
        assert!(m.state_map.iter().all(|&c| c == 0));
    }

    #[test]
    fn minimal_machine_is_kept() {
        let sys = MealySystem::homogeneous_from_table(
            &["a"],
            &["0", "1"],
            &[("p", "a", "q", "0"), ("q", "a", "p", "1")],
        )
        .unwrap();
        let m = minimize(&sys).unwrap();
        assert_eq!(m.system, sys);
    }

    #[test]
    fn separating_word_is_shortest_then_least() {
        // p and q agree on one letter, differ after `b a`.
        let sys = MealySystem::homogeneous_from_table(
            &["a", "b"],
            &["0", "1"],
            &[
                ("p", "a", "p", "0"),
                ("p", "b", "r", "0"),
                ("q", "a", "q", "0"),
                ("q", "b", "t", "0"),
                ("r", "a", "r", "0"),
                ("r", "b", "r", "0"),
                ("t", "a", "t", "1"),
                ("t", "b", "t", "1"),
            ],
        )
        .unwrap();
        let part = BehaviorPartition::of(&sys, sys.inputs()).unwrap();
        assert!(part.verify(&sys));
        let joint = Joint::new(&[&sys], sys.inputs()).unwrap();
        let w = joint.separating_word(0, 1).unwrap();
        assert_eq!(w, vec![1, 0]);
    }
}
