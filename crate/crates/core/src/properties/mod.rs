//! Seeded randomized property suites.
//!
//! Trial `k` of a suite draws from its own ChaCha8 stream, keyed by the seed,
//! the suite name and `k`, so any trial can be replayed alone and a report
//! does not depend on the execution strategy.

pub mod gen;

use std::collections::{BTreeSet, VecDeque};

use nalgebra::DVector;
use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::epsilon::{
    combinations, feasibility, obstruction_depth, target_set, union_radius, EpsilonInstance, Input,
    Metric, OutputDomain,
};
use crate::exec::Execution;
use crate::explanations::{minimize, Section};
use crate::local_global::{
    check_separation, glue_cogerm, verify_cogerm_gluing, CompatibleFamily, EquivalenceKind,
};
use crate::systems::{
    pushout_along_mono, verify_vk_square, FiniteSet, MealySystem, OpenImmersion, Subsystem,
    SystemMorphism,
};
use crate::tame::{certificate_covering, Axis, Rect, RectUnion};
use crate::Verdict;

pub const SEPARATION_TRIALS: usize = 500;
pub const COGERM_TRIALS: usize = 200;
pub const HELLY_TRIALS: usize = 1000;
pub const DISCRETE_TRIALS: usize = 500;
pub const VK_TRIALS: usize = 200;
pub const MISC_TRIALS: usize = 200;

/// Radii this close to `ε` are skipped by the Helly suite.
pub const HELLY_MARGIN: f64 = 1e-7;

/// How many violation messages a report keeps.
const KEPT_VIOLATIONS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Outcome {
    /// The hypothesis did not hold; nothing to check.
    Vacuous,
    Exercised,
    /// Too close to a numerical boundary, or the generator gave up.
    Skipped,
    Violation(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub seed: u64,
    pub trials: usize,
    /// Trials in which the property's hypothesis held.
    pub exercised: usize,
    pub skipped: usize,
    pub violations: usize,
    /// The first few violations, as `trial k: message`.
    pub examples: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {} trials, {} exercised, {} skipped, {} violations",
            self.name, self.trials, self.exercised, self.skipped, self.violations
        )
    }
}

fn fnv(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x100_0000_01b3)
    })
}

/// The generator for trial `k` of suite `name`.
pub fn trial_rng(seed: u64, name: &str, k: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv(name));
    rng.set_stream(k as u64);
    rng
}

fn run<F>(name: &str, seed: u64, trials: usize, exec: Execution, trial: F) -> SuiteReport
where
    F: Fn(&mut ChaCha8Rng) -> Outcome + Sync + Send,
{
    let outcomes = exec.map_range(trials, |k| trial(&mut trial_rng(seed, name, k)));
    let mut report = SuiteReport {
        name: name.to_string(),
        seed,
        trials,
        exercised: 0,
        skipped: 0,
        violations: 0,
        examples: Vec::new(),
    };
    for (k, o) in outcomes.into_iter().enumerate() {
        match o {
            Outcome::Vacuous => {}
            Outcome::Exercised => report.exercised += 1,
            Outcome::Skipped => report.skipped += 1,
            Outcome::Violation(msg) => {
                report.violations += 1;
                if report.examples.len() < KEPT_VIOLATIONS {
                    report.examples.push(format!("trial {k}: {msg}"));
                }
            }
        }
    }
    report
}

fn fail(e: impl std::fmt::Display) -> Outcome {
    Outcome::Violation(format!("error: {e}"))
}

macro_rules! attempt {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return fail(e),
        }
    };
}

/// Product-automaton oracle: do states `p` of `m1` and `q` of `m2` produce
/// the same outputs on every word over `letters` (positions in both)?
pub fn agree_on_words(
    m1: &MealySystem,
    p: usize,
    m2: &MealySystem,
    q: usize,
    letters: &[usize],
) -> bool {
    let mut seen = BTreeSet::from([(p, q)]);
    let mut queue = VecDeque::from([(p, q)]);
    while let Some((p, q)) = queue.pop_front() {
        for &a in letters {
            let ((p2, o1), (q2, o2)) = (m1.step(p, a), m2.step(q, a));
            if m1.outputs().name(o1) != m2.outputs().name(o2) {
                return false;
            }
            if seen.insert((p2, q2)) {
                queue.push_back((p2, q2));
            }
        }
    }
    true
}

/// Oracle for behavioral equality of two sections on the patch's
/// before-states, over all interpretable letters.
fn sections_agree(s: &Section, t: &Section) -> bool {
    let letters: Vec<usize> = (0..s.explanatory().inputs().len()).collect();
    (0..s.patch().source().before().len()).all(|x| {
        agree_on_words(
            s.explanatory(),
            s.before_image(x),
            t.explanatory(),
            t.before_image(x),
            &letters,
        )
    })
}

/// Separation for behavioral equivalence over data-local coverings: equal
/// restrictions on every patch force global equality.
pub fn separation_suite(seed: u64, trials: usize, exec: Execution) -> SuiteReport {
    run("beh-separation", seed, trials, exec, |rng| {
        let judge = gen::judge(rng, 3);
        let letters = judge.interpretable_inputs().clone();
        let outs = judge.interpretable_outputs().clone();
        let n1 = rng.random_range(1..=3);
        let first = gen::machine(rng, n1, &letters, &outs, "p");
        let mut built = None;
        for _ in 0..20 {
            let size = rng.random_range(1..=3);
            let second = if rng.random_bool(0.5) {
                gen::variant(rng, &first, size - 1, "q")
            } else {
                gen::machine(rng, size, &letters, &outs, "q")
            };
            let machines = vec![first.clone(), second];
            let tuples = gen::compatible_tuples(&machines);
            if tuples.is_empty() {
                continue;
            }
            let n = rng.random_range(1..=6);
            if let Some((sys, maps)) = gen::system_over(rng, &judge, &machines, &tuples, n) {
                let sections = gen::global_sections(&judge, &sys, &machines, maps);
                built = Some((sys, sections));
                break;
            }
        }
        let Some((sys, sections)) = built else {
            return Outcome::Skipped;
        };
        let cover = gen::data_local_covering(rng, &sys, 3);
        let (s, t) = (&sections[0], &sections[1]);
        let report = attempt!(check_separation(
            EquivalenceKind::Beh,
            &cover,
            s,
            t,
            &judge,
            Execution::Sequential
        ));
        for (m, pv) in cover.patches().iter().zip(&report.locally) {
            let oracle = sections_agree(&attempt!(s.restrict(m)), &attempt!(t.restrict(m)));
            if oracle != pv.verdict.holds() {
                return Outcome::Violation(format!(
                    "patch {} verdict disagrees with the word oracle",
                    pv.patch
                ));
            }
        }
        if sections_agree(s, t) != report.globally.holds() {
            return Outcome::Violation("global verdict disagrees with the word oracle".into());
        }
        if !report.locally_equal() {
            Outcome::Vacuous
        } else if report.globally_equal() {
            Outcome::Exercised
        } else {
            Outcome::Violation("locally equal but globally different".into())
        }
    })
}

/// Gluing for cogerm equivalence: restrictions of one global section,
/// renamed and padded with unreachable states, always glue, and the glued
/// section restricts to something cogerm-equivalent to each local.
pub fn cogerm_gluing_suite(seed: u64, trials: usize, exec: Execution) -> SuiteReport {
    run("cogerm-gluing", seed, trials, exec, |rng| {
        let judge = gen::judge(rng, 3);
        let letters = judge.interpretable_inputs().clone();
        let outs = judge.interpretable_outputs().clone();
        let mut built = None;
        for _ in 0..20 {
            let size = rng.random_range(1..=3);
            let machines = vec![gen::machine(rng, size, &letters, &outs, "t")];
            let tuples = gen::compatible_tuples(&machines);
            let n = rng.random_range(1..=5);
            if let Some((sys, maps)) = gen::system_over(rng, &judge, &machines, &tuples, n) {
                let g = gen::global_sections(&judge, &sys, &machines, maps).remove(0);
                built = Some((sys, g));
                break;
            }
        }
        let Some((sys, global)) = built else {
            return Outcome::Skipped;
        };
        let cover = gen::data_local_covering(rng, &sys, 3);
        let mut locals = Vec::new();
        for m in cover.patches() {
            let r = attempt!(global.restrict(m));
            let junk = rng.random_range(0..=2);
            let emb = gen::embed_with_junk(rng, r.explanatory(), junk);
            locals.push(attempt!(r.push_forward(&emb)));
        }
        let family = attempt!(CompatibleFamily::new(cover.clone(), locals.clone()));
        let family = attempt!(family.with_witnesses(Execution::Sequential));
        let glued = attempt!(glue_cogerm(&family, &judge));
        if !glued.validate(&judge).holds() {
            return Outcome::Violation("glued section fails validation".into());
        }
        if let Verdict::Fails(a) = attempt!(verify_cogerm_gluing(&family, &glued)) {
            return Outcome::Violation(format!(
                "restriction to patch {a} is not cogerm-equivalent"
            ));
        }
        for (k, (m, local)) in cover.patches().iter().zip(&locals).enumerate() {
            if !sections_agree(&attempt!(glued.restrict(m)), local) {
                return Outcome::Violation(format!("restriction to patch {k} behaves differently"));
            }
        }
        Outcome::Exercised
    })
}

fn point<R: Rng>(rng: &mut R, d: usize) -> DVector<f64> {
    DVector::from_fn(d, |_, _| rng.random::<f64>())
}

/// Helly in `ℝ^d`: if every `d + 1` patches are jointly feasible then all
/// are. Trials within [`HELLY_MARGIN`] of the threshold are skipped.
pub fn helly_suite(seed: u64, trials: usize, d: usize, exec: Execution) -> SuiteReport {
    run(&format!("helly-d{d}"), seed, trials, exec, move |rng| {
        let n = rng.random_range(2..=5);
        let inputs: Vec<Input> = (0..n)
            .map(|k| Input {
                name: format!("p{k}"),
                fiber: "⋆".into(),
                value: point(rng, d),
            })
            .collect();
        let inst = attempt!(EpsilonInstance::new(
            d,
            Metric::Euclidean,
            OutputDomain::Full,
            inputs
        ));
        let count = rng.random_range(2..=10);
        let patches: Vec<Vec<usize>> = (0..count)
            .map(|_| {
                let mut p: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.4)).collect();
                if p.is_empty() {
                    p.push(rng.random_range(0..n));
                }
                p
            })
            .collect();
        let all: Vec<&[usize]> = patches.iter().map(Vec::as_slice).collect();
        let full = attempt!(union_radius(&inst, &all, "⋆"));
        let mut local: f64 = 0.0;
        for c in combinations(count, (d + 1).min(count)) {
            let fam: Vec<&[usize]> = c.iter().map(|&a| patches[a].as_slice()).collect();
            local = local.max(attempt!(union_radius(&inst, &fam, "⋆")));
        }
        // Half the trials sit exactly at the (d+1)-wise threshold.
        let eps = if rng.random_bool(0.5) {
            local + 2.0 * HELLY_MARGIN
        } else {
            rng.random::<f64>() * 1.1 * full
        };
        if (local - eps).abs() < HELLY_MARGIN || (full - eps).abs() < HELLY_MARGIN {
            return Outcome::Skipped;
        }
        let depth = attempt!(obstruction_depth(
            &inst,
            &patches,
            eps,
            "⋆",
            Execution::Sequential
        ));
        if depth.is_some() != (full > eps) {
            return Outcome::Violation(format!(
                "depth {depth:?} disagrees with full radius {full} at ε = {eps}"
            ));
        }
        if let Some(dep) = &depth {
            if dep.k > d + 1 {
                return Outcome::Violation(format!("obstruction depth {} exceeds d + 1", dep.k));
            }
        }
        if local > eps {
            Outcome::Vacuous
        } else if full <= eps {
            Outcome::Exercised
        } else {
            Outcome::Violation(format!(
                "(d+1)-wise radius {local} ≤ ε = {eps} < full radius {full}"
            ))
        }
    })
}

/// Under the discrete metric pairwise feasibility at `ε < 1` implies full
/// feasibility, fiber by fiber.
pub fn discrete_helly_suite(seed: u64, trials: usize, exec: Execution) -> SuiteReport {
    run("discrete-helly", seed, trials, exec, |rng| {
        let n = rng.random_range(2..=6);
        let inputs: Vec<Input> = (0..n)
            .map(|k| Input {
                name: format!("p{k}"),
                fiber: ["x", "y"][rng.random_range(0..2)].into(),
                value: DVector::from_element(1, f64::from(rng.random_range(0..3u8))),
            })
            .collect();
        let inst = attempt!(EpsilonInstance::new(
            1,
            Metric::Discrete,
            OutputDomain::Full,
            inputs
        ));
        let count = rng.random_range(2..=6);
        let patches: Vec<Vec<usize>> = (0..count)
            .map(|_| (0..n).filter(|_| rng.random_bool(0.5)).collect())
            .collect();
        let eps = rng.random::<f64>() * 0.999;
        let mut exercised = false;
        for fiber in inst.fibers() {
            let radius = |ps: &[usize]| -> Result<f64, crate::epsilon::EpsilonError> {
                let t = target_set(&inst, ps, &fiber);
                // Oracle: 0 when all targets coincide, 1 otherwise.
                let oracle = if t.points.windows(2).all(|w| w[0] == w[1]) {
                    0.0
                } else {
                    1.0
                };
                let r = feasibility(&inst, &t, eps)?.radius;
                if r != oracle {
                    return Err(crate::epsilon::EpsilonError::Infeasible {
                        fiber: format!("{fiber}: radius {r} vs {oracle}"),
                    });
                }
                Ok(r)
            };
            let mut pairwise = true;
            for c in combinations(count, 2) {
                let union: Vec<usize> =
                    c.iter().flat_map(|&a| patches[a].iter().copied()).collect();
                pairwise &= attempt!(radius(&union)) <= eps;
            }
            let all: Vec<usize> = patches.iter().flatten().copied().collect();
            let full = attempt!(radius(&all)) <= eps;
            if pairwise {
                if !full {
                    return Outcome::Violation(format!(
                        "fiber {fiber}: pairwise feasible, jointly infeasible"
                    ));
                }
                exercised = true;
            }
        }
        if exercised {
            Outcome::Exercised
        } else {
            Outcome::Vacuous
        }
    })
}

fn vk_interface() -> (FiniteSet, FiniteSet) {
    (FiniteSet::new(["a", "b"]), FiniteSet::new(["0", "1"]))
}

/// Van Kampen cubes: random pushouts along monos of systems with at most
/// four states (the pushout included), pulled back along random maps into
/// the pushout.
pub fn vk_cube_suite(seed: u64, trials: usize, exec: Execution) -> SuiteReport {
    run("vk-cube", seed, trials, exec, |rng| {
        let (inputs, outputs) = vk_interface();
        let nb = rng.random_range(1..=3);
        let b = gen::machine(rng, nb, &inputs, &outputs, "b");
        let Some((c, f_map)) = (0..50).find_map(|_| gen::system_above(rng, &b, 3, "c")) else {
            return Outcome::Skipped;
        };
        let extra = rng.random_range(0..=(4 - nb).min(4 - c.state_count()).min(2));
        let (a, m_map) = gen::extend(rng, &c, extra, "a");
        let m = attempt!(SystemMorphism::homogeneous(c.clone(), a.clone(), m_map));
        let f = attempt!(SystemMorphism::homogeneous(c.clone(), b.clone(), f_map));
        let po = attempt!(pushout_along_mono(&m, &f));
        if !po.can_b.is_injective() {
            return Outcome::Violation("B → P is not injective".into());
        }
        if f.is_injective() && !po.can_a.is_injective() {
            return Outcome::Violation("A → P is not injective although C → B is".into());
        }
        if po.system.state_count() != a.state_count() + b.state_count() - c.state_count() {
            return Outcome::Violation("pushout has the wrong number of states".into());
        }
        if attempt!(po.can_a.compose(&m)) != attempt!(po.can_b.compose(&f)) {
            return Outcome::Violation("pushout square does not commute".into());
        }
        let Some((w, g_map)) = (0..50).find_map(|_| gen::system_above(rng, &po.system, 4, "w"))
        else {
            return Outcome::Skipped;
        };
        let g = attempt!(SystemMorphism::homogeneous(w, po.system.clone(), g_map));
        match attempt!(verify_vk_square(&po, &g)) {
            Verdict::Holds => Outcome::Exercised,
            Verdict::Fails(why) => Outcome::Violation(why),
        }
    })
}

/// Minimization is idempotent and merges exactly the states the word
/// oracle cannot tell apart.
pub fn minimize_suite(seed: u64, trials: usize, exec: Execution) -> SuiteReport {
    run("minimize", seed, trials, exec, |rng| {
        let (inputs, outputs) = vk_interface();
        let size = rng.random_range(1..=6);
        let sys = gen::machine(rng, size, &inputs, &outputs, "s");
        let min = attempt!(minimize(&sys));
        if !min.quotient(&sys).check().holds() {
            return Outcome::Violation("quotient map is not a morphism".into());
        }
        let again = attempt!(minimize(&min.system));
        if again.system != min.system {
            return Outcome::Violation("minimize is not idempotent".into());
        }
        let letters: Vec<usize> = (0..inputs.len()).collect();
        for p in 0..sys.state_count() {
            for q in 0..sys.state_count() {
                let same = min.state_map[p] == min.state_map[q];
                if same != agree_on_words(&sys, p, &sys, q, &letters) {
                    return Outcome::Violation(format!("states {p} and {q} classified wrongly"));
                }
            }
        }
        Outcome::Exercised
    })
}

/// Restriction is functorial: restricting along a patch of a patch equals
/// restricting along the composite.
pub fn restriction_suite(seed: u64, trials: usize, exec: Execution) -> SuiteReport {
    run("restriction", seed, trials, exec, |rng| {
        let judge = gen::judge(rng, 3);
        let letters = judge.interpretable_inputs().clone();
        let outs = judge.interpretable_outputs().clone();
        let size = rng.random_range(1..=3);
        let machines = vec![gen::machine(rng, size, &letters, &outs, "t")];
        let tuples = gen::compatible_tuples(&machines);
        let n = rng.random_range(1..=5);
        let Some((sys, maps)) = gen::system_over(rng, &judge, &machines, &tuples, n) else {
            return Outcome::Skipped;
        };
        let s = gen::global_sections(&judge, &sys, &machines, maps).remove(0);
        let outer = gen::data_local_covering(rng, &sys, 3);
        let m1 = &outer.patches()[rng.random_range(0..outer.patches().len())];
        let inner = gen::data_local_covering(rng, m1.source(), 2);
        let sub: Subsystem = inner.patches()[0].to_subsystem();
        let m2 = attempt!(OpenImmersion::inclusion(m1.source(), &sub));
        let step = attempt!(attempt!(s.restrict(m1)).restrict(&m2));
        let direct = attempt!(s.restrict(&attempt!(m1.compose(&m2))));
        let id = attempt!(s.restrict(&OpenImmersion::identity(&sys)));
        if step != direct {
            Outcome::Violation("restriction along a composite differs".into())
        } else if id != s {
            Outcome::Violation("restriction along the identity changes the section".into())
        } else {
            Outcome::Exercised
        }
    })
}

fn int(k: i64) -> BigRational {
    BigRational::from_integer(k.into())
}

/// Robust disconnection on random rectangle unions: a certificate implies a
/// disconnected fiber, its sampled two-patch covering is compatible but not
/// glueable, and the verdict is "sheaf" exactly when no candidate has one.
pub fn tame_chain_suite(seed: u64, trials: usize, exec: Execution) -> SuiteReport {
    run("tame-chain", seed, trials, exec, |rng| {
        let count = rng.random_range(1..=4);
        let rects: Vec<Rect> = (0..count)
            .map(|_| {
                let lo = |rng: &mut ChaCha8Rng| rng.random_range(0..4i64);
                let (x0, y0) = (lo(rng), lo(rng));
                let (x1, y1) = (rng.random_range(x0 + 1..=4), rng.random_range(y0 + 1..=4));
                let open = [(); 4].map(|_| rng.random_bool(0.3));
                Rect::new((int(x0), int(x1)), (int(y0), int(y1)), open)
                    .expect("non-degenerate rectangle")
            })
            .collect();
        let axis = if rng.random_bool(0.5) {
            Axis::X
        } else {
            Axis::Y
        };
        let u = attempt!(RectUnion::new(rects, axis));
        let verdict = u.sheaf_verdict();
        let mut robust = Vec::new();
        for t in u.candidate_values() {
            let Some(cert) = u.robustly_disconnected(&t) else {
                continue;
            };
            if u.fiber(&t).components() < 2 || cert.components.len() < 2 {
                return Outcome::Violation(format!(
                    "certificate at {t} without a disconnected fiber"
                ));
            }
            let check = attempt!(certificate_covering(&u, &cert));
            if !check.compatible_but_unglueable() {
                return Outcome::Violation(format!("certificate covering at {t} glues"));
            }
            robust.push(t);
        }
        if verdict.sheaf != robust.is_empty() || verdict.robust != robust {
            return Outcome::Violation("sheaf verdict disagrees with the candidate scan".into());
        }
        if robust
            .iter()
            .any(|t| !verdict.disconnected_fibers.contains(t))
        {
            return Outcome::Violation("robust value missing from the disconnected fibers".into());
        }
        if verdict.disconnected_fibers.is_empty() {
            Outcome::Vacuous
        } else {
            Outcome::Exercised
        }
    })
}

/// Every suite at its acceptance trial count.
pub fn standard_suites(seed: u64, exec: Execution) -> Vec<SuiteReport> {
    let mut out = vec![
        separation_suite(seed, SEPARATION_TRIALS, exec),
        cogerm_gluing_suite(seed, COGERM_TRIALS, exec),
    ];
    out.extend((1..=3).map(|d| helly_suite(seed, HELLY_TRIALS, d, exec)));
    out.push(discrete_helly_suite(seed, DISCRETE_TRIALS, exec));
    out.push(vk_cube_suite(seed, VK_TRIALS, exec));
    out.push(minimize_suite(seed, MISC_TRIALS, exec));
    out.push(restriction_suite(seed, MISC_TRIALS, exec));
    out.push(tame_chain_suite(seed, MISC_TRIALS, exec));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_do_not_depend_on_execution() {
        let a = separation_suite(7, 40, Execution::Sequential);
        let b = separation_suite(7, 40, Execution::Parallel);
        assert_eq!(a, b);
        assert!(a.passed(), "{a:?}");
    }

    #[test]
    fn trial_streams_differ() {
        let x: u64 = trial_rng(1, "s", 0).random();
        let y: u64 = trial_rng(1, "s", 1).random();
        let z: u64 = trial_rng(1, "t", 0).random();
        assert!(x != y && x != z);
    }

    #[test]
    fn word_oracle() {
        let sys = MealySystem::homogeneous_from_table(
            &["a", "b"],
            &["0", "1"],
            &[
                ("s0", "a", "s1", "0"),
                ("s0", "b", "s0", "0"),
                ("s1", "a", "s1", "1"),
                ("s1", "b", "s0", "0"),
                ("s2", "a", "s1", "0"),
                ("s2", "b", "s2", "0"),
            ],
        )
        .unwrap();
        assert!(agree_on_words(&sys, 0, &sys, 2, &[0, 1]));
        assert!(!agree_on_words(&sys, 0, &sys, 1, &[0, 1]));
        assert!(agree_on_words(&sys, 0, &sys, 1, &[1]));
    }

    #[test]
    fn small_runs_pass() {
        for r in [
            cogerm_gluing_suite(3, 30, Execution::Sequential),
            helly_suite(3, 50, 2, Execution::Sequential),
            discrete_helly_suite(3, 50, Execution::Sequential),
            vk_cube_suite(3, 30, Execution::Sequential),
            minimize_suite(3, 30, Execution::Sequential),
            restriction_suite(3, 30, Execution::Sequential),
            tame_chain_suite(3, 30, Execution::Sequential),
        ] {
            assert!(r.passed(), "{r:?}");
            assert!(r.exercised > 0, "{}", r.summary());
        }
    }
}
