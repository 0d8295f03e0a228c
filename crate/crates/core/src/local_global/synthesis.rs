use serde::Serialize;

use super::LocalGlobalError;
use crate::exec::Execution;
use crate::explanations::{Joint, Judge, Section};
use crate::systems::{Covering, FiniteSet, MealySystem, OpenImmersion};

/// Largest number of candidate machines enumerated for one state count.
pub const SYNTHESIS_MACHINE_BOUND: u64 = 20_000_000;

/// Result of an exhaustive search for a global section.
#[derive(Debug, Clone, Serialize)]
pub struct SynthesisOutcome {
    pub max_states: usize,
    /// Candidate machines examined, summed over state counts.
    pub machines_searched: u64,
    #[serde(skip)]
    pub found: Option<Section>,
    /// Number of states of the section found, if any.
    pub found_states: Option<usize>,
}

/// Decodes machine number `code` with `n` states over `k` letters and `r`
/// outputs: cell `(s, l)` holds a digit in base `n·r`.
fn decode(code: u64, n: usize, k: usize, r: usize) -> Vec<(usize, usize)> {
    let base = (n * r) as u64;
    let mut rest = code;
    (0..n * k)
        .map(|_| {
            let d = (rest % base) as usize;
            rest /= base;
            (d / r, d % r)
        })
        .collect()
}

/// Searches all homogeneous machines over `(I', O')` with at most
/// `max_states` states, in a fixed order, for a global section whose
/// restriction to every patch is behaviorally equivalent (over `I'`) to the
/// local section there.
///
/// For a fixed machine, before-state images range over machine states with the
/// required behavior; after-state images are then forced by the dynamics, and
/// the search backtracks on conflicts.
pub fn bounded_synthesis(
    c: &Covering,
    locals: &[Section],
    judge: &Judge,
    max_states: usize,
    exec: Execution,
) -> Result<SynthesisOutcome, LocalGlobalError> {
    let inputs = judge.interpretable_inputs();
    let outputs = judge.interpretable_outputs();
    let (k, r) = (inputs.len(), outputs.len());
    let target = c.target();

    // One representative local image per before-state.
    let mut required: Vec<Option<(usize, usize)>> = vec![None; target.before().len()];
    for (a, (m, local)) in c.patches().iter().zip(locals).enumerate() {
        for (x, &gx) in m.morphism().before_map().iter().enumerate() {
            required[gx].get_or_insert((a, local.before_image(x)));
        }
    }
    let required: Vec<(usize, usize)> = required
        .into_iter()
        .map(|x| x.ok_or_else(|| LocalGlobalError::Internal("uncovered before-state".into())))
        .collect::<Result<_, _>>()?;
    let letters: Vec<usize> = (0..target.inputs().len())
        .map(|i| inputs.index_of(judge.input_name(i)).unwrap())
        .collect();
    let outs: Vec<usize> = (0..target.outputs().len())
        .map(|o| outputs.index_of(judge.output_name(o)).unwrap())
        .collect();

    let mut searched = 0u64;
    for n in 1..=max_states {
        let count = ((n * r) as u64)
            .checked_pow((n * k) as u32)
            .filter(|&c| c <= SYNTHESIS_MACHINE_BOUND)
            .ok_or(LocalGlobalError::ScaleExceeded {
                what: "synthesis candidates",
                size: n,
                bound: max_states,
            })?;
        searched += count;
        let names: Vec<String> = (0..n).map(|s| format!("m{s}")).collect();
        let states = FiniteSet::new(names);
        let hit = exec.find_map_first_range(count as usize, |code| {
            let table = decode(code as u64, n, k, r);
            let machine = MealySystem::from_fn(
                states.clone(),
                states.clone(),
                inputs.clone(),
                outputs.clone(),
                |s, l| table[s * k + l],
            )
            .ok()?;
            let mut all: Vec<&MealySystem> = vec![&machine];
            all.extend(locals.iter().map(Section::explanatory));
            let joint = Joint::new(&all, inputs).ok()?;
            let candidates: Vec<Vec<usize>> = required
                .iter()
                .map(|&(a, st)| {
                    let want = joint.class(a + 1, st);
                    (0..n).filter(|&q| joint.class(0, q) == want).collect()
                })
                .collect();
            if candidates.iter().any(Vec::is_empty) {
                return None;
            }
            let mut before = vec![0usize; target.before().len()];
            let mut after: Vec<Option<usize>> = vec![None; target.after().len()];
            if assign(
                0,
                &candidates,
                &machine,
                target,
                &letters,
                &outs,
                &mut before,
                &mut after,
            ) {
                let after: Vec<usize> = after.into_iter().map(|y| y.unwrap_or(0)).collect();
                Some((machine, before, after))
            } else {
                None
            }
        });
        if let Some((machine, before, after)) = hit {
            let section = Section::from_state_maps(
                judge,
                OpenImmersion::identity(target),
                machine,
                before,
                after,
            )?;
            return Ok(SynthesisOutcome {
                max_states,
                machines_searched: searched,
                found_states: Some(n),
                found: Some(section),
            });
        }
    }
    Ok(SynthesisOutcome {
        max_states,
        machines_searched: searched,
        found: None,
        found_states: None,
    })
}

#[allow(clippy::too_many_arguments)]
fn assign(
    x: usize,
    candidates: &[Vec<usize>],
    machine: &MealySystem,
    target: &MealySystem,
    letters: &[usize],
    outs: &[usize],
    before: &mut [usize],
    after: &mut [Option<usize>],
) -> bool {
    if x == candidates.len() {
        return true;
    }
    for &q in &candidates[x] {
        let saved: Vec<Option<usize>> = after.to_vec();
        let mut ok = true;
        for (i, &letter) in letters.iter().enumerate() {
            let (s2, o) = target.step(x, i);
            let (q2, o2) = machine.step(q, letter);
            if o2 != outs[o] {
                ok = false;
                break;
            }
            match after[s2] {
                Some(p) if p != q2 => {
                    ok = false;
                    break;
                }
                _ => after[s2] = Some(q2),
            }
        }
        if ok {
            before[x] = q;
            if assign(
                x + 1,
                candidates,
                machine,
                target,
                letters,
                outs,
                before,
                after,
            ) {
                return true;
            }
        }
        after.copy_from_slice(&saved);
    }
    false
}
