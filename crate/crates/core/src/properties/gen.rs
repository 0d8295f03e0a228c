//! Random generators shared by the property suites and the benches.

use std::collections::BTreeMap;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::explanations::{Judge, JudgeDoc, Section};
use crate::systems::{Covering, FiniteSet, MealySystem, OpenImmersion, Subsystem, SystemMorphism};

fn names(prefix: &str, n: usize) -> FiniteSet {
    FiniteSet::new((0..n).map(|k| format!("{prefix}{k}")))
}

/// A judge with 1 to `max_inputs` raw inputs `i*` onto letters `a, b, c`,
/// and raw outputs `o0 ↦ 0`, `o1, o2 ↦ 1`.
pub fn judge<R: Rng>(rng: &mut R, max_inputs: usize) -> Judge {
    let k = rng.random_range(1..=max_inputs);
    let m = rng.random_range(1..=k);
    let letters = ["a", "b", "c"];
    let inputs = (0..k)
        .map(|i| {
            let l = if i < m { i } else { rng.random_range(0..m) };
            (format!("i{i}"), letters[l].to_string())
        })
        .collect();
    let outputs = [("o0", "0"), ("o1", "1"), ("o2", "1")]
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    Judge::from_doc(&JudgeDoc {
        inputs,
        outputs,
        interpretable_inputs: None,
        interpretable_outputs: None,
    })
    .expect("generated judge is well formed")
}

/// A homogeneous machine with states `{prefix}0..` and uniform dynamics.
pub fn machine<R: Rng>(
    rng: &mut R,
    n: usize,
    inputs: &FiniteSet,
    outputs: &FiniteSet,
    prefix: &str,
) -> MealySystem {
    let table: Vec<(usize, usize)> = (0..n * inputs.len())
        .map(|_| (rng.random_range(0..n), rng.random_range(0..outputs.len())))
        .collect();
    let states = names(prefix, n);
    MealySystem::from_fn(
        states.clone(),
        states,
        inputs.clone(),
        outputs.clone(),
        |s, i| table[s * inputs.len() + i],
    )
    .expect("generated machine is well formed")
}

/// Copies `base` under new names and appends `extra` states, each a copy of
/// a random row with, half the time, one cell changed.
pub fn variant<R: Rng>(rng: &mut R, base: &MealySystem, extra: usize, prefix: &str) -> MealySystem {
    let (n, k) = (base.state_count(), base.inputs().len());
    let mut table: Vec<(usize, usize)> = (0..n * k).map(|x| base.step(x / k, x % k)).collect();
    for _ in 0..extra {
        let src = rng.random_range(0..n);
        let mut row: Vec<(usize, usize)> = (0..k).map(|i| base.step(src, i)).collect();
        if rng.random_bool(0.5) {
            let i = rng.random_range(0..k);
            if rng.random_bool(0.5) {
                row[i].0 = rng.random_range(0..n + extra);
            } else {
                row[i].1 = rng.random_range(0..base.outputs().len());
            }
        }
        table.extend(row);
    }
    let states = names(prefix, n + extra);
    MealySystem::from_fn(
        states.clone(),
        states,
        base.inputs().clone(),
        base.outputs().clone(),
        |s, i| table[s * k + i],
    )
    .expect("generated variant is well formed")
}

/// Tuples of states, one per machine, that answer every letter alike.
pub fn compatible_tuples(machines: &[MealySystem]) -> Vec<Vec<usize>> {
    let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
    for m in machines {
        tuples = tuples
            .into_iter()
            .flat_map(|t| (0..m.state_count()).map(move |s| [t.clone(), vec![s]].concat()))
            .collect();
    }
    let letters = machines[0].inputs().len();
    tuples.retain(|t| {
        (0..letters).all(|a| {
            let o = machines[0].step(t[0], a).1;
            t.iter().zip(machines).all(|(&s, m)| m.step(s, a).1 == o)
        })
    });
    tuples
}

/// A homogeneous system on the judge's raw interface with `n` states, and
/// for each explanatory machine the state maps of a section over it.
///
/// Before-images are drawn from `tuples`; after-images are assigned lazily so
/// the dynamics commute. `None` when the states run out.
#[allow(clippy::type_complexity)]
pub fn system_over<R: Rng>(
    rng: &mut R,
    judge: &Judge,
    machines: &[MealySystem],
    tuples: &[Vec<usize>],
    n: usize,
) -> Option<(MealySystem, Vec<(Vec<usize>, Vec<usize>)>)> {
    let before: Vec<Vec<usize>> = (0..n)
        .map(|_| tuples.choose(rng).unwrap().clone())
        .collect();
    let mut after: Vec<Option<Vec<usize>>> = vec![None; n];
    let (ri, ro) = (judge.raw_inputs().len(), judge.raw_outputs().len());
    let mut table = Vec::with_capacity(n * ri);
    for tb in &before {
        for i in 0..ri {
            let letter = judge.input(i);
            let steps: Vec<(usize, usize)> = machines
                .iter()
                .zip(tb)
                .map(|(m, &s)| m.step(s, letter))
                .collect();
            let need: Vec<usize> = steps.iter().map(|x| x.0).collect();
            let found: Vec<usize> = (0..n)
                .filter(|&y| after[y].as_ref() == Some(&need))
                .collect();
            let free: Vec<usize> = (0..n).filter(|&y| after[y].is_none()).collect();
            let y = if !found.is_empty() && (free.is_empty() || rng.random_bool(0.7)) {
                *found.choose(rng).unwrap()
            } else {
                let y = *free.choose(rng)?;
                after[y] = Some(need);
                y
            };
            let raw: Vec<usize> = (0..ro).filter(|&o| judge.output(o) == steps[0].1).collect();
            table.push((y, *raw.choose(rng)?));
        }
    }
    let after: Vec<Vec<usize>> = after
        .into_iter()
        .map(|a| {
            a.unwrap_or_else(|| {
                machines
                    .iter()
                    .map(|m| rng.random_range(0..m.state_count()))
                    .collect()
            })
        })
        .collect();
    let states = names("x", n);
    let sys = MealySystem::from_fn(
        states.clone(),
        states,
        judge.raw_inputs().clone(),
        judge.raw_outputs().clone(),
        |s, i| table[s * ri + i],
    )
    .ok()?;
    let maps = (0..machines.len())
        .map(|k| {
            (
                before.iter().map(|t| t[k]).collect(),
                after.iter().map(|t| t[k]).collect(),
            )
        })
        .collect();
    Some((sys, maps))
}

/// Sections over the whole system from the maps of [`system_over`].
pub fn global_sections(
    judge: &Judge,
    sys: &MealySystem,
    machines: &[MealySystem],
    maps: Vec<(Vec<usize>, Vec<usize>)>,
) -> Vec<Section> {
    machines
        .iter()
        .zip(maps)
        .map(|(m, (b, a))| {
            Section::from_state_maps(judge, OpenImmersion::identity(sys), m.clone(), b, a)
                .expect("generated section is a morphism")
        })
        .collect()
}

/// A covering by up to `max_patches` patches carrying the full interface.
///
/// Every before-state lands in at least one patch; after-states are the
/// dynamics image plus random extras, topped up until all are covered.
pub fn data_local_covering<R: Rng>(rng: &mut R, sys: &MealySystem, max_patches: usize) -> Covering {
    let p = rng.random_range(1..=max_patches);
    let mut before: Vec<Vec<bool>> = vec![vec![false; sys.before().len()]; p];
    for s in 0..sys.before().len() {
        before[rng.random_range(0..p)][s] = true;
        for patch in before.iter_mut() {
            if rng.random_bool(0.25) {
                patch[s] = true;
            }
        }
    }
    for patch in before.iter_mut() {
        if !patch.contains(&true) {
            patch[rng.random_range(0..sys.before().len())] = true;
        }
    }
    let mut after: Vec<Vec<bool>> = before
        .iter()
        .map(|patch| {
            let mut a: Vec<bool> = (0..sys.after().len())
                .map(|_| rng.random_bool(0.2))
                .collect();
            for s in (0..patch.len()).filter(|&s| patch[s]) {
                for i in 0..sys.inputs().len() {
                    a[sys.step(s, i).0] = true;
                }
            }
            a
        })
        .collect();
    for y in 0..sys.after().len() {
        if !after.iter().any(|a| a[y]) {
            after[rng.random_range(0..p)][y] = true;
        }
    }
    let pick = |set: &FiniteSet, mask: &[bool]| -> Vec<String> {
        (0..set.len())
            .filter(|&k| mask[k])
            .map(|k| set.name(k).to_string())
            .collect()
    };
    let subs: Vec<Subsystem> = before
        .iter()
        .zip(&after)
        .map(|(b, a)| Subsystem {
            before_states: pick(sys.before(), b),
            after_states: pick(sys.after(), a),
            inputs: sys.inputs().as_slice().to_vec(),
            outputs: sys.outputs().as_slice().to_vec(),
        })
        .collect();
    Covering::from_subsystems(sys, &subs).expect("generated patches are subsystems")
}

/// Embeds `m` into a copy with shuffled state names and `junk` extra states
/// whose dynamics may point anywhere.
pub fn embed_with_junk<R: Rng>(rng: &mut R, m: &MealySystem, junk: usize) -> SystemMorphism {
    let n = m.state_count();
    let total = n + junk;
    let mut labels: Vec<String> = (0..total).map(|k| format!("u{k}")).collect();
    labels.shuffle(rng);
    let states = FiniteSet::new(labels.iter().cloned());
    // New position of old state k (junk states follow the originals).
    let pos: Vec<usize> = labels.iter().map(|l| states.index_of(l).unwrap()).collect();
    let mut rows: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for k in 0..total {
        let row = (0..m.inputs().len())
            .map(|i| {
                if k < n {
                    let (s2, o) = m.step(k, i);
                    (pos[s2], o)
                } else {
                    (
                        rng.random_range(0..total),
                        rng.random_range(0..m.outputs().len()),
                    )
                }
            })
            .collect();
        rows.insert(pos[k], row);
    }
    let target = MealySystem::from_fn(
        states.clone(),
        states,
        m.inputs().clone(),
        m.outputs().clone(),
        |s, i| rows[&s][i],
    )
    .expect("embedding target is well formed");
    SystemMorphism::homogeneous(m.clone(), target, pos[..n].to_vec())
        .expect("embedding is a morphism")
}

/// A homogeneous system with at most `max_states` states and a morphism into
/// `target`, built by labelling states lazily; `None` when states run out.
pub fn system_above<R: Rng>(
    rng: &mut R,
    target: &MealySystem,
    max_states: usize,
    prefix: &str,
) -> Option<(MealySystem, Vec<usize>)> {
    let n = rng.random_range(1..=max_states);
    let k = target.inputs().len();
    let mut label: Vec<Option<usize>> = vec![None; n];
    let mut table = Vec::with_capacity(n * k);
    for s in 0..n {
        let l = *label[s].get_or_insert_with(|| rng.random_range(0..target.state_count()));
        for i in 0..k {
            let (need, o) = target.step(l, i);
            let found: Vec<usize> = (0..n).filter(|&y| label[y] == Some(need)).collect();
            let free: Vec<usize> = (0..n).filter(|&y| label[y].is_none()).collect();
            let y = if !found.is_empty() && (free.is_empty() || rng.random_bool(0.7)) {
                *found.choose(rng).unwrap()
            } else {
                let y = *free.choose(rng)?;
                label[y] = Some(need);
                y
            };
            table.push((y, o));
        }
    }
    let states = names(prefix, n);
    let sys = MealySystem::from_fn(
        states.clone(),
        states,
        target.inputs().clone(),
        target.outputs().clone(),
        |s, i| table[s * k + i],
    )
    .ok()?;
    Some((sys, label.into_iter().map(Option::unwrap).collect()))
}

/// `base` with `extra` fresh states appended (names `{prefix}*`), keeping
/// the rows of `base`; returns the extension and the inclusion positions.
pub fn extend<R: Rng>(
    rng: &mut R,
    base: &MealySystem,
    extra: usize,
    prefix: &str,
) -> (MealySystem, Vec<usize>) {
    let (n, k) = (base.state_count(), base.inputs().len());
    let total = n + extra;
    let mut table: Vec<(usize, usize)> = (0..n * k).map(|x| base.step(x / k, x % k)).collect();
    for _ in 0..extra * k {
        table.push((
            rng.random_range(0..total),
            rng.random_range(0..base.outputs().len()),
        ));
    }
    let states = names(prefix, total);
    let sys = MealySystem::from_fn(
        states.clone(),
        states,
        base.inputs().clone(),
        base.outputs().clone(),
        |s, i| table[s * k + i],
    )
    .expect("extension is well formed");
    (sys, (0..n).collect())
}
