use std::collections::BTreeMap;

use serde::Serialize;

use super::LocalGlobalError;
use crate::exec::Execution;
use crate::explanations::{restricted_interface, Judge};
use crate::systems::{Covering, MealySystem, OpenImmersion, Subsystem};

/// Largest raw input carrier the exhaustive stateless check accepts.
pub const STATELESS_MAX_INPUTS: usize = 12;

/// Up to this many inputs every two-patch covering is enumerated; above it
/// only the level-set covering of each output assignment is tried.
pub const STATELESS_ALL_COVERINGS_MAX: usize = 6;

/// Two inputs in one fiber of `j_I` whose interpreted outputs differ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberConflict {
    /// The interpretable input labelling the fiber.
    pub fiber: String,
    pub inputs: (String, String),
    pub outputs: (String, String),
}

/// A stateless restricted-interface section over a patch, or why none exists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", content = "value", rename_all = "kebab-case")]
pub enum StatelessSection {
    /// The induced map `g : I'_U → O'`.
    Exists(BTreeMap<String, String>),
    Blocked(FiberConflict),
}

impl StatelessSection {
    pub fn exists(&self) -> bool {
        matches!(self, StatelessSection::Exists(_))
    }
}

fn is_stateless(sys: &MealySystem) -> bool {
    sys.before().len() == 1 && sys.after().len() == 1
}

/// The map `g` with `h = g ∘ j_I` on the patch inputs, where `h = j_O ∘ f`,
/// if `h` is constant on every fiber of `j_I` within the patch.
pub fn stateless_ri_section(
    sys: &MealySystem,
    judge: &Judge,
    m: &OpenImmersion,
) -> Result<StatelessSection, LocalGlobalError> {
    if !is_stateless(sys) {
        return Err(LocalGlobalError::NotStateless);
    }
    if m.target() != sys {
        return Err(LocalGlobalError::Site(
            crate::systems::SiteError::ForeignPatch(0),
        ));
    }
    let src = m.source();
    let mm = m.morphism();
    let letters = restricted_interface(judge, m);
    let mut g: BTreeMap<String, (String, String)> = BTreeMap::new();
    if src.before().is_empty() {
        let least = judge.interpretable_outputs().name(0).to_string();
        return Ok(StatelessSection::Exists(
            letters
                .iter()
                .map(|l| (l.to_string(), least.clone()))
                .collect(),
        ));
    }
    for i in 0..src.inputs().len() {
        let raw = mm.input_map()[i];
        let (_, o) = src.step(0, i);
        let fiber = judge.input_name(raw).to_string();
        let out = judge.output_name(mm.output_map()[o]).to_string();
        let input = src.inputs().name(i).to_string();
        match g.get(&fiber) {
            Some((prev_in, prev_out)) if *prev_out != out => {
                return Ok(StatelessSection::Blocked(FiberConflict {
                    fiber,
                    inputs: (prev_in.clone(), input),
                    outputs: (prev_out.clone(), out),
                }))
            }
            Some(_) => {}
            None => {
                g.insert(fiber, (input, out));
            }
        }
    }
    Ok(StatelessSection::Exists(
        g.into_iter().map(|(k, (_, o))| (k, o)).collect(),
    ))
}

/// A stateless system and covering on which a compatible family fails to glue.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StatelessGluingFailure {
    /// The raw output `f(i)` of the counterexample system, per input.
    pub outputs: BTreeMap<String, String>,
    /// Input sets of the covering patches.
    pub covering: Vec<Vec<String>>,
    pub conflict: FiberConflict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StatelessSheafReport {
    pub sheaf: bool,
    pub failure: Option<StatelessGluingFailure>,
    /// Every fiber of `j_I` is a singleton, or `j_O` has at most one value.
    pub criterion: bool,
    pub assignments_checked: u64,
}

impl StatelessSheafReport {
    /// The exhaustive verdict agrees with the fiber criterion.
    pub fn agrees_with_criterion(&self) -> bool {
        self.sheaf == self.criterion
    }
}

/// One stateless system per output assignment over the raw inputs.
fn stateless_system(sys: &MealySystem, raw_out: &[usize]) -> MealySystem {
    MealySystem::from_fn(
        sys.before().clone(),
        sys.after().clone(),
        sys.inputs().clone(),
        sys.outputs().clone(),
        |_, i| (0, raw_out[i]),
    )
    .expect("carriers come from a valid system")
}

/// Exhaustive sheaf check for stateless sections in the discrete setting.
///
/// Ranges over every stateless system on `sys`'s carriers whose interpreted
/// outputs take at most two values of `im j_O`, and over input coverings of
/// it: all two-patch coverings up to [`STATELESS_ALL_COVERINGS_MAX`] inputs,
/// the level-set covering beyond. Local sections are unique when they exist,
/// so compatibility is automatic and gluing fails exactly when every patch
/// has a section and the whole system does not. A failure found by the fast
/// search is re-verified on real coverings and sections.
pub fn discrete_stateless_sheaf_check(
    sys: &MealySystem,
    judge: &Judge,
    exec: Execution,
) -> Result<StatelessSheafReport, LocalGlobalError> {
    if !is_stateless(sys) {
        return Err(LocalGlobalError::NotStateless);
    }
    let n = sys.inputs().len();
    if n > STATELESS_MAX_INPUTS {
        return Err(LocalGlobalError::ScaleExceeded {
            what: "stateless inputs",
            size: n,
            bound: STATELESS_MAX_INPUTS,
        });
    }
    // Two raw outputs with different interpretations, if there are any.
    let mut reps: BTreeMap<usize, usize> = BTreeMap::new();
    for o in 0..sys.outputs().len() {
        reps.entry(judge.output(o)).or_insert(o);
    }
    let values: Vec<usize> = reps.values().copied().take(2).collect();
    let fiber: Vec<usize> = (0..n).map(|i| judge.input(i)).collect();
    let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
    for &f in &fiber {
        *sizes.entry(f).or_default() += 1;
    }
    let criterion = sizes.values().all(|&s| s == 1) || values.len() <= 1;

    let v = values.len();
    let assignments = (v as u64).pow(n as u32);
    // Bit masks over inputs: fiber-constancy of the assignment on a subset.
    let constant_on = |h: &[usize], mask: u32| -> bool {
        let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
        (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .all(|i| *seen.entry(fiber[i]).or_insert(h[i]) == h[i])
    };
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let found = exec.find_map_first_range(assignments as usize, |code| {
        let mut rest = code;
        let h: Vec<usize> = (0..n)
            .map(|_| {
                let d = rest % v;
                rest /= v;
                d
            })
            .collect();
        if constant_on(&h, full) {
            return None;
        }
        let level: u32 = (0..n).filter(|&i| h[i] == 0).fold(0, |m, i| m | 1 << i);
        let coverings: Vec<(u32, u32)> = if n <= STATELESS_ALL_COVERINGS_MAX {
            // Each input goes to patch 1 only, patch 2 only, or both.
            let mut out = Vec::new();
            for code in 0..3u32.pow(n as u32) {
                let (mut a, mut b, mut rest) = (0u32, 0u32, code);
                for i in 0..n {
                    match rest % 3 {
                        0 => a |= 1 << i,
                        1 => b |= 1 << i,
                        _ => {
                            a |= 1 << i;
                            b |= 1 << i;
                        }
                    }
                    rest /= 3;
                }
                out.push((a, b));
            }
            out
        } else {
            vec![(level, full & !level)]
        };
        coverings
            .into_iter()
            .find(|&(a, b)| a != 0 && b != 0 && constant_on(&h, a) && constant_on(&h, b))
            .map(|cov| (h, cov))
    });
    let failure = match found {
        None => None,
        Some((h, (a, b))) => Some(verify_failure(sys, judge, &values, &h, a, b)?),
    };
    Ok(StatelessSheafReport {
        sheaf: failure.is_none(),
        failure,
        criterion,
        assignments_checked: assignments,
    })
}

fn verify_failure(
    sys: &MealySystem,
    judge: &Judge,
    values: &[usize],
    h: &[usize],
    a: u32,
    b: u32,
) -> Result<StatelessGluingFailure, LocalGlobalError> {
    let raw_out: Vec<usize> = h.iter().map(|&d| values[d]).collect();
    let s = stateless_system(sys, &raw_out);
    let names = |mask: u32| -> Vec<String> {
        (0..s.inputs().len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| s.inputs().name(i).to_string())
            .collect()
    };
    let patches: Vec<Vec<String>> = vec![names(a), names(b)];
    let subs: Vec<Subsystem> = patches
        .iter()
        .map(|p| {
            let refs: Vec<&str> = p.iter().map(String::as_str).collect();
            Subsystem::inputs(&s, &refs)
        })
        .collect();
    let cover = Covering::from_subsystems(&s, &subs)?;
    for m in cover.patches() {
        if !stateless_ri_section(&s, judge, m)?.exists() {
            return Err(LocalGlobalError::Internal(
                "local stateless section missing".into(),
            ));
        }
    }
    let StatelessSection::Blocked(conflict) =
        stateless_ri_section(&s, judge, &OpenImmersion::identity(&s))?
    else {
        return Err(LocalGlobalError::Internal(
            "global stateless section exists".into(),
        ));
    };
    Ok(StatelessGluingFailure {
        outputs: (0..s.inputs().len())
            .map(|i| {
                (
                    s.inputs().name(i).to_string(),
                    s.outputs().name(raw_out[i]).to_string(),
                )
            })
            .collect(),
        covering: patches,
        conflict,
    })
}
