use std::collections::BTreeMap;

use super::*;
use crate::exec::Execution;
use crate::explanations::{is_j_full, Judge, JudgeDoc};
use crate::fixtures::sections_builtin;
use crate::systems::{FiniteSet, MealySystem, OpenImmersion};

const EXECS: [Execution; 2] = [Execution::Sequential, Execution::Parallel];

#[test]
fn ri_separation_fails_on_input_splitting_covering() {
    let f = sections_builtin("cex-ri-separation");
    for exec in EXECS {
        let r = check_separation(
            EquivalenceKind::Ri,
            &f.covering,
            &f.sections[0],
            &f.sections[1],
            &f.judge,
            exec,
        )
        .unwrap();
        assert!(r.locally_equal());
        assert_eq!(r.locally[0].alphabet, vec!["a"]);
        assert_eq!(r.locally[1].alphabet, vec!["b"]);
        assert!(!r.globally_equal());
        let Some(Difference::Behavior(d)) = r.globally.witness() else {
            panic!("expected a behavioral difference");
        };
        assert_eq!(d.word, vec!["a", "b"]);
        assert_eq!(d.state, "s1");
        let obstruction = r.obstruction().unwrap();
        assert_eq!(obstruction.kind, ObstructionKind::Separation);
        assert!(obstruction.is_conflict());
    }
}

#[test]
fn ri_separation_holds_on_j_full_coverings() {
    for name in ["ri-jfull-routing", "beh-jfull-redirected"] {
        let f = sections_builtin(name);
        assert!(is_j_full(&f.covering, &f.judge).holds(), "{name}");
        let r = check_separation(
            EquivalenceKind::Ri,
            &f.covering,
            &f.sections[0],
            &f.sections[1],
            &f.judge,
            Execution::Sequential,
        )
        .unwrap();
        assert!(!r.violates_separation(), "{name}");
    }
    let f = sections_builtin("cex-ri-separation");
    assert!(!is_j_full(&f.covering, &f.judge).holds());
}

#[test]
fn ri_separation_on_the_routing_pair_is_detected_locally() {
    let f = sections_builtin("ri-jfull-routing");
    let r = check_separation(
        EquivalenceKind::Ri,
        &f.covering,
        &f.sections[0],
        &f.sections[1],
        &f.judge,
        Execution::Sequential,
    )
    .unwrap();
    assert!(!r.locally_equal());
    assert!(!r.globally_equal());
}

#[test]
fn behavioral_gluing_obstruction_at_s2() {
    let f = sections_builtin("cex-beh-gluing");
    for exec in EXECS {
        let out = glue_behavioral(&f.covering, &f.sections, &f.judge, exec).unwrap();
        let report = out.obstruction().expect("obstruction").clone();
        assert_eq!(report.kind, ObstructionKind::BehavioralGluing);
        assert_eq!(report.site, "s2");
        assert_eq!(report.word, vec!["•"]);
        assert_eq!(report.forced[0].via, Some(("s0".into(), "b".into())));
        assert_eq!(report.forced[0].outputs, vec!["0"]);
        assert_eq!(report.forced[1].via, Some(("s3".into(), "b".into())));
        assert_eq!(report.forced[1].outputs, vec!["1"]);
        assert!(report.narrative.contains("s2"));
        assert!(replay_obstruction(&report, &f.sections));
    }
}

#[test]
fn tampered_obstruction_does_not_replay() {
    let f = sections_builtin("cex-beh-gluing");
    let out = glue_behavioral(&f.covering, &f.sections, &f.judge, Execution::Sequential).unwrap();
    let mut report = out.obstruction().unwrap().clone();
    report.forced[1].outputs = vec!["0".into()];
    assert!(!replay_obstruction(&report, &f.sections));
}

#[test]
fn no_small_global_section_for_the_obstructed_family() {
    let f = sections_builtin("cex-beh-gluing");
    for exec in EXECS {
        let out = bounded_synthesis(&f.covering, &f.sections, &f.judge, 4, exec).unwrap();
        assert!(out.found.is_none());
        assert_eq!(out.machines_searched, 2 + 16 + 216 + 4096);
    }
}

#[test]
fn redirected_family_glues_to_two_states() {
    let f = sections_builtin("cex-beh-gluing-redirected");
    let out = glue_behavioral(&f.covering, &f.sections, &f.judge, Execution::Parallel).unwrap();
    let glued = out.section().expect("glued section");
    assert_eq!(glued.explanatory().state_count(), 2);
    assert!(verify_behavioral_gluing(&f.covering, &f.sections, glued, &f.judge).unwrap());
    let synth =
        bounded_synthesis(&f.covering, &f.sections, &f.judge, 4, Execution::Sequential).unwrap();
    assert_eq!(synth.found_states, Some(2));
    let found = synth.found.unwrap();
    assert!(verify_behavioral_gluing(&f.covering, &f.sections, &found, &f.judge).unwrap());
}

#[test]
fn incompatible_family_is_rejected_before_gluing() {
    let f = sections_builtin("cex-beh-gluing");
    let mut locals = f.sections.clone();
    locals.swap(0, 1);
    assert!(glue_behavioral(&f.covering, &locals, &f.judge, Execution::Sequential).is_err());
    let short = &f.sections[..1];
    assert!(matches!(
        glue_behavioral(&f.covering, short, &f.judge, Execution::Sequential),
        Err(LocalGlobalError::WrongLocalCount {
            expected: 2,
            found: 1
        })
    ));
}

#[test]
fn cogerm_gluing_pushes_out_along_the_core() {
    let f = sections_builtin("cogerm-gluing");
    let family = CompatibleFamily::new(f.covering.clone(), f.sections.clone())
        .unwrap()
        .with_witnesses(Execution::Parallel)
        .unwrap();
    assert_eq!(family.witnesses().len(), 1);
    assert_eq!(family.witnesses()[&(0, 1)].core.state_count(), 1);
    let glued = glue_cogerm(&family, &f.judge).unwrap();
    assert_eq!(glued.explanatory().state_count(), 3);
    assert!(glued.validate(&f.judge).holds());
    assert!(verify_cogerm_gluing(&family, &glued).unwrap().holds());
}

#[test]
fn cogerm_separation_fails_with_an_extra_state() {
    let f = sections_builtin("cogerm-extra-states");
    let r = check_separation(
        EquivalenceKind::Cogerm,
        &f.covering,
        &f.sections[0],
        &f.sections[1],
        &f.judge,
        Execution::Sequential,
    )
    .unwrap();
    assert!(r.violates_separation());
    assert!(matches!(r.globally.witness(), Some(Difference::Cogerm(_))));
    let beh = check_separation(
        EquivalenceKind::Beh,
        &f.covering,
        &f.sections[0],
        &f.sections[1],
        &f.judge,
        Execution::Sequential,
    )
    .unwrap();
    assert!(beh.locally_equal() && beh.globally_equal());
}

#[test]
fn separation_needs_global_sections() {
    let f = sections_builtin("cex-beh-gluing");
    assert!(matches!(
        check_separation(
            EquivalenceKind::Beh,
            &f.covering,
            &f.sections[0],
            &f.sections[1],
            &f.judge,
            Execution::Sequential
        ),
        Err(LocalGlobalError::NotGlobal)
    ));
}

#[test]
fn literal_sections_separate_and_glue() {
    let f = sections_builtin("beh-jfull-redirected");
    for s in &f.sections {
        let locals = restrict_to_covering(&f.covering, s).unwrap();
        let family = CompatibleFamily::new(f.covering.clone(), locals).unwrap();
        assert_eq!(&literal_glue(&family, &f.judge).unwrap(), s);
    }
    assert!(literal_separation(&f.covering, &f.sections[0], &f.sections[1]).unwrap());
    assert!(literal_separation(&f.covering, &f.sections[0], &f.sections[0]).unwrap());
}

fn stateless(outputs: &[(&str, &str)], out_names: &[&str]) -> MealySystem {
    let inputs = FiniteSet::new(outputs.iter().map(|p| p.0.to_string()));
    let outs = FiniteSet::new(out_names.iter().map(|s| s.to_string()));
    let map: BTreeMap<&str, &str> = outputs.iter().copied().collect();
    let one = FiniteSet::new(["•".to_string()]);
    MealySystem::from_fn(one.clone(), one, inputs.clone(), outs.clone(), |_, i| {
        (0, outs.index_of(map[inputs.name(i)]).unwrap())
    })
    .unwrap()
}

fn make_judge(inputs: &[(&str, &str)], outputs: &[(&str, &str)]) -> Judge {
    let m = |xs: &[(&str, &str)]| {
        xs.iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    };
    Judge::from_doc(&JudgeDoc {
        inputs: m(inputs),
        outputs: m(outputs),
        interpretable_inputs: None,
        interpretable_outputs: None,
    })
    .unwrap()
}

#[test]
fn stateless_sections_follow_fibers() {
    let f = crate::fixtures::load_builtin("stateless-two-fibers");
    let crate::fixtures::Loaded::Judge { system, judge } = f else {
        panic!("judge fixture");
    };
    let s = stateless_ri_section(&system, &judge, &OpenImmersion::identity(&system)).unwrap();
    let expected: BTreeMap<String, String> = [("x", "1"), ("y", "0")]
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .into();
    assert_eq!(s, StatelessSection::Exists(expected));

    let sys = stateless(&[("a", "0"), ("b", "1"), ("c", "0")], &["0", "1"]);
    let j = make_judge(
        &[("a", "x"), ("b", "x"), ("c", "y")],
        &[("0", "0"), ("1", "1")],
    );
    match stateless_ri_section(&sys, &j, &OpenImmersion::identity(&sys)).unwrap() {
        StatelessSection::Blocked(c) => {
            assert_eq!(c.fiber, "x");
            assert_eq!(c.inputs, ("a".into(), "b".into()));
        }
        other => panic!("expected a fiber conflict, got {other:?}"),
    }
}

#[test]
fn discrete_stateless_check_matches_the_fiber_criterion() {
    let sys = stateless(&[("a", "0"), ("b", "0"), ("c", "0")], &["0", "1"]);
    let cases = [
        (
            make_judge(
                &[("a", "x"), ("b", "x"), ("c", "y")],
                &[("0", "0"), ("1", "1")],
            ),
            false,
        ),
        (
            make_judge(
                &[("a", "a"), ("b", "b"), ("c", "c")],
                &[("0", "0"), ("1", "1")],
            ),
            true,
        ),
        (
            make_judge(
                &[("a", "x"), ("b", "x"), ("c", "x")],
                &[("0", "z"), ("1", "z")],
            ),
            true,
        ),
    ];
    for (j, sheaf) in cases {
        for exec in EXECS {
            let r = discrete_stateless_sheaf_check(&sys, &j, exec).unwrap();
            assert_eq!(r.sheaf, sheaf);
            assert!(r.agrees_with_criterion());
            if let Some(fail) = &r.failure {
                assert_eq!(fail.covering.len(), 2);
                assert_ne!(fail.conflict.outputs.0, fail.conflict.outputs.1);
            }
        }
    }
    let names: Vec<String> = (0..13).map(|k| format!("i{k:02}")).collect();
    let pairs: Vec<(&str, &str)> = names.iter().map(|n| (n.as_str(), "0")).collect();
    let big = stateless(&pairs, &["0"]);
    let j = Judge::identity(&big);
    assert!(matches!(
        discrete_stateless_sheaf_check(&big, &j, Execution::Sequential),
        Err(LocalGlobalError::ScaleExceeded { .. })
    ));
}

#[test]
fn stateful_systems_are_rejected_by_stateless_checks() {
    let f = sections_builtin("cex-ri-separation");
    assert!(matches!(
        discrete_stateless_sheaf_check(&f.system, &f.judge, Execution::Sequential),
        Err(LocalGlobalError::NotStateless)
    ));
}

#[test]
fn reports_serialize() {
    let f = sections_builtin("cex-beh-gluing");
    let out = glue_behavioral(&f.covering, &f.sections, &f.judge, Execution::Sequential).unwrap();
    let v = serde_json::to_value(&out).unwrap();
    assert_eq!(v["outcome"], "obstructed");
    assert_eq!(v["value"]["site"], "s2");
    let g = sections_builtin("cex-beh-gluing-redirected");
    let out = glue_behavioral(&g.covering, &g.sections, &g.judge, Execution::Sequential).unwrap();
    let v = serde_json::to_value(&out).unwrap();
    assert_eq!(v["outcome"], "glued");
    assert!(v["value"]["explanatory"].is_object());
}
