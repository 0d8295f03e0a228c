use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::family::CompatibleFamily;
use super::report::{ForcedBehavior, ObstructionKind, ObstructionReport};
use super::LocalGlobalError;
use crate::exec::Execution;
use crate::explanations::{behavioral_equiv, Joint, Judge, Section};
use crate::systems::{unique_names, Covering, FiniteSet, MealySystem, OpenImmersion};
use crate::Verdict;

/// Result of behavioral gluing.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "outcome", content = "value", rename_all = "kebab-case")]
pub enum GlueOutcome {
    #[serde(serialize_with = "serialize_section")]
    Glued(Section),
    Obstructed(ObstructionReport),
}

fn serialize_section<S: serde::Serializer>(s: &Section, ser: S) -> Result<S::Ok, S::Error> {
    s.to_doc().serialize(ser)
}

impl GlueOutcome {
    pub fn section(&self) -> Option<&Section> {
        match self {
            GlueOutcome::Glued(s) => Some(s),
            GlueOutcome::Obstructed(_) => None,
        }
    }

    pub fn obstruction(&self) -> Option<&ObstructionReport> {
        match self {
            GlueOutcome::Glued(_) => None,
            GlueOutcome::Obstructed(r) => Some(r),
        }
    }
}

/// A behavior pinned to a local explanatory state: `(patch, state)` and its
/// position in the joint automaton.
#[derive(Debug, Clone, Copy)]
struct Pin {
    patch: usize,
    state: usize,
    global: usize,
}

/// Glues behaviorally compatible local sections, or locates why no global
/// behavior assignment exists.
///
/// Every before-state gets the behavior of its image in any patch containing
/// it. Each transition `α(s, i) = (s2, o)` then forces the behavior of the
/// after-state `s2` to be the continuation of `s`'s behavior on `j_I(i)`; two
/// different forced continuations for one after-state are an obstruction.
/// Otherwise the behavior classes reachable from the assignment form the
/// global explanatory system.
pub fn glue_behavioral(
    c: &Covering,
    locals: &[Section],
    judge: &Judge,
    exec: Execution,
) -> Result<GlueOutcome, LocalGlobalError> {
    let family = CompatibleFamily::new(c.clone(), locals.to_vec())?;
    let alphabet = judge.interpretable_inputs();
    family.check_behavioral(alphabet, exec)?;
    let machines: Vec<&MealySystem> = locals.iter().map(Section::explanatory).collect();
    let joint = Joint::new(&machines, alphabet)?;
    let target = c.target();
    let pin = |patch: usize, state: usize| Pin {
        patch,
        state,
        global: joint.global(patch, state),
    };

    let mut beh_b: Vec<Option<Pin>> = vec![None; target.before().len()];
    let mut local_a: Vec<Option<Pin>> = vec![None; target.after().len()];
    for (a, (m, local)) in c.patches().iter().zip(locals).enumerate() {
        for (x, &gx) in m.morphism().before_map().iter().enumerate() {
            let p = pin(a, local.before_image(x));
            match beh_b[gx] {
                None => beh_b[gx] = Some(p),
                Some(q) if joint.class_of_global(q.global) != joint.class_of_global(p.global) => {
                    return Err(LocalGlobalError::IncompatibleFamily {
                        pair: (q.patch, a),
                        reason: format!("behaviors of {} differ", target.before().name(gx)),
                    })
                }
                Some(_) => {}
            }
        }
        for (y, &gy) in m.morphism().after_map().iter().enumerate() {
            local_a[gy].get_or_insert(pin(a, local.after_image(y)));
        }
    }
    let beh_b: Vec<Pin> = beh_b
        .into_iter()
        .map(|p| p.ok_or_else(|| LocalGlobalError::Internal("uncovered before-state".into())))
        .collect::<Result<_, _>>()?;

    let name_of = |p: Pin| {
        locals[p.patch]
            .explanatory()
            .before()
            .name(p.state)
            .to_string()
    };
    let forced_side = |via: (usize, usize), p: Pin, word: &[usize]| ForcedBehavior {
        via: Some((
            target.before().name(via.0).into(),
            target.inputs().name(via.1).into(),
        )),
        source: format!("patch {}", p.patch),
        patch: Some(p.patch),
        state: name_of(p),
        outputs: joint.run(p.global, word),
    };

    // Forced continuation of every after-state, with the transition forcing it.
    let mut forced: Vec<Option<((usize, usize), Pin)>> = vec![None; target.after().len()];
    for (s, &from) in beh_b.iter().enumerate() {
        for i in 0..target.inputs().len() {
            let (s2, o) = target.step(s, i);
            let letter = alphabet
                .index_of(judge.input_name(i))
                .expect("judge maps into I'");
            let (next, out) = joint.step(from.global, letter);
            if joint.output_name(out) != judge.output_name(o) {
                return Err(LocalGlobalError::IncompatibleFamily {
                    pair: (from.patch, from.patch),
                    reason: format!(
                        "local behavior of {} does not emit {} on {}",
                        target.before().name(s),
                        judge.output_name(o),
                        judge.input_name(i)
                    ),
                });
            }
            let local = joint_to_local(&joint, locals.len(), next);
            let p = pin(local.0, local.1);
            match forced[s2] {
                None => forced[s2] = Some(((s, i), p)),
                Some((via, q))
                    if joint.class_of_global(q.global) != joint.class_of_global(p.global) =>
                {
                    let word = joint
                        .separating_word(q.global, p.global)
                        .expect("distinct classes are separated");
                    let report = ObstructionReport::new(
                        ObstructionKind::BehavioralGluing,
                        target.after().name(s2).into(),
                        [forced_side(via, q, &word), forced_side((s, i), p, &word)],
                        word.iter().map(|&a| alphabet.name(a).to_string()).collect(),
                    );
                    debug_assert!(report.is_conflict());
                    return Ok(GlueOutcome::Obstructed(report));
                }
                Some(_) => {}
            }
        }
    }
    let beh_a: Vec<Pin> = forced
        .into_iter()
        .zip(local_a)
        .map(|(f, l)| {
            f.map(|x| x.1)
                .or(l)
                .ok_or_else(|| LocalGlobalError::Internal("uncovered after-state".into()))
        })
        .collect::<Result<_, _>>()?;

    // Behavior classes reachable from the assignment, each represented by its
    // least joint position.
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    let mut stack: Vec<usize> = beh_b.iter().chain(&beh_a).map(|p| p.global).collect();
    while let Some(g) = stack.pop() {
        if seen.insert(joint.class_of_global(g)) {
            stack.extend((0..alphabet.len()).map(|l| joint.step(g, l).0));
        }
    }
    let mut reps: BTreeMap<usize, usize> = BTreeMap::new();
    for g in 0..joint.size() {
        let class = joint.class_of_global(g);
        if seen.contains(&class) {
            reps.entry(class).or_insert(g);
        }
    }
    let classes: Vec<usize> = reps.keys().copied().collect();
    let names = unique_names(
        classes
            .iter()
            .map(|c| {
                let (patch, state) = joint_to_local(&joint, locals.len(), reps[c]);
                locals[patch].explanatory().before().name(state).to_string()
            })
            .collect(),
    );
    let states = FiniteSet::new(names.iter().cloned());
    let pos: BTreeMap<usize, usize> = classes
        .iter()
        .zip(&names)
        .map(|(&c, n)| (c, states.index_of(n).unwrap()))
        .collect();
    let by_pos: BTreeMap<usize, usize> = pos.iter().map(|(&c, &p)| (p, c)).collect();
    let outputs = judge.interpretable_outputs();
    let explanatory = MealySystem::from_fn(
        states.clone(),
        states,
        alphabet.clone(),
        outputs.clone(),
        |p, l| {
            let (n, o) = joint.step(reps[&by_pos[&p]], l);
            (
                pos[&joint.class_of_global(n)],
                outputs.index_of(joint.output_name(o)).unwrap(),
            )
        },
    )?;
    let class_pos = |p: &Pin| pos[&joint.class_of_global(p.global)];
    let section = Section::from_state_maps(
        judge,
        OpenImmersion::identity(target),
        explanatory,
        beh_b.iter().map(class_pos).collect(),
        beh_a.iter().map(class_pos).collect(),
    )?;
    if let Verdict::Fails(v) = section.validate(judge) {
        return Err(LocalGlobalError::Internal(format!(
            "assembled section fails validation: {v:?}"
        )));
    }
    Ok(GlueOutcome::Glued(section))
}

/// Splits a joint position back into `(machine, state)`.
fn joint_to_local(joint: &Joint, machines: usize, g: usize) -> (usize, usize) {
    let m = (0..machines)
        .rev()
        .find(|&m| joint.global(m, 0) <= g)
        .expect("position inside the joint automaton");
    (m, g - joint.global(m, 0))
}

/// Re-simulates both sides of a behavioral-gluing obstruction on the local
/// machines and checks that the recorded outputs are reproduced and differ.
pub fn replay_obstruction(report: &ObstructionReport, locals: &[Section]) -> bool {
    report.forced.iter().all(|f| {
        let Some(local) = f.patch.and_then(|p| locals.get(p)) else {
            return false;
        };
        let ex = local.explanatory();
        let (Some(s), Some(word)) = (
            ex.before().index_of(&f.state),
            report
                .word
                .iter()
                .map(|a| ex.inputs().index_of(a))
                .collect::<Option<Vec<_>>>(),
        ) else {
            return false;
        };
        let outs: Vec<String> = ex
            .run(s, &word)
            .into_iter()
            .map(|o| ex.outputs().name(o).to_string())
            .collect();
        outs == f.outputs
    }) && report.is_conflict()
}

/// Checks a glued section against the locals: valid, and each restriction
/// behaviorally equivalent to its local over `I'`.
pub fn verify_behavioral_gluing(
    c: &Covering,
    locals: &[Section],
    glued: &Section,
    judge: &Judge,
) -> Result<bool, LocalGlobalError> {
    if !glued.validate(judge).holds() {
        return Ok(false);
    }
    for (m, local) in c.patches().iter().zip(locals) {
        if !behavioral_equiv(&glued.restrict(m)?, local, judge.interpretable_inputs())?.holds() {
            return Ok(false);
        }
    }
    Ok(true)
}
