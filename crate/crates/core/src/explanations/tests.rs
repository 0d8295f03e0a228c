use super::*;
use crate::systems::{Covering, FiniteSet, MealySystem, OpenImmersion, Subsystem};
use crate::Verdict;

fn routing() -> MealySystem {
    MealySystem::homogeneous_from_table(
        &["a", "b"],
        &["0", "1"],
        &[
            ("s1", "a", "s1", "0"),
            ("s1", "b", "s2", "0"),
            ("s2", "a", "s1", "1"),
            ("s2", "b", "s2", "1"),
        ],
    )
    .unwrap()
}

fn rerouted(sys: &MealySystem, judge: &Judge) -> Section {
    let alt = MealySystem::homogeneous_from_table(
        &["a", "b"],
        &["0", "1"],
        &[
            ("u1", "a", "u3", "0"),
            ("u1", "b", "u2", "0"),
            ("u2", "a", "u3", "1"),
            ("u2", "b", "u2", "1"),
            ("u3", "a", "u3", "0"),
            ("u3", "b", "u2", "1"),
        ],
    )
    .unwrap();
    Section::from_state_maps(
        judge,
        OpenImmersion::identity(sys),
        alt,
        vec![0, 1],
        vec![2, 1],
    )
    .unwrap()
}

fn identity_section(sys: &MealySystem, judge: &Judge) -> Section {
    let n = sys.state_count();
    Section::from_state_maps(
        judge,
        OpenImmersion::identity(sys),
        sys.clone(),
        (0..n).collect(),
        (0..n).collect(),
    )
    .unwrap()
}

fn gluing_system() -> MealySystem {
    MealySystem::homogeneous_from_table(
        &["a", "b"],
        &["0", "1"],
        &[
            ("s0", "a", "s0", "0"),
            ("s0", "b", "s2", "0"),
            ("s1", "a", "s1", "1"),
            ("s1", "b", "s1", "1"),
            ("s2", "a", "s1", "1"),
            ("s2", "b", "s1", "1"),
            ("s3", "a", "s3", "1"),
            ("s3", "b", "s2", "1"),
        ],
    )
    .unwrap()
}

fn cycle(prefix: &str, n: usize) -> MealySystem {
    let names: Vec<String> = (0..n).map(|k| format!("{prefix}{k}")).collect();
    let rows: Vec<(&str, &str, &str, &str)> = (0..n)
        .map(|k| (names[k].as_str(), "x", names[(k + 1) % n].as_str(), "0"))
        .collect();
    MealySystem::homogeneous_from_table(&["x"], &["0"], &rows).unwrap()
}

#[test]
fn identity_judge_image_on_one_state_is_valid() {
    let sys = MealySystem::homogeneous_from_table(&["i"], &["o"], &[("s", "i", "s", "o")]).unwrap();
    let j = Judge::identity(&sys);
    assert!(identity_section(&sys, &j).validate(&j).holds());
}

#[test]
fn realisation_of_first_gluing_patch_is_two_states() {
    let sys = gluing_system();
    let j = Judge::collapse_inputs(&sys, "•");
    let patch =
        OpenImmersion::inclusion(&sys, &Subsystem::states(&sys, &["s0", "s1", "s2"])).unwrap();
    let m1 = minimal_realisation(&j, &patch, Interface::Restricted).unwrap();
    assert!(m1.validate(&j).holds());
    let ex = m1.explanatory();
    assert_eq!(ex.state_count(), 2);
    let (p0, p1) = (m1.before_image(0), m1.before_image(1));
    assert_ne!(p0, p1);
    assert_eq!(m1.before_image(2), p1);
    assert_eq!(ex.outputs().name(ex.step(p0, 0).1), "0");
    assert_eq!(ex.outputs().name(ex.step(p1, 0).1), "1");
    // After-states: s0 and s2 continue as p0, s1 as p1.
    assert_eq!(m1.psi().after_map(), &[p0, p1, p0]);
}

#[test]
fn constant_zero_machine_fails_on_second_patch_at_first_state() {
    let sys = gluing_system();
    let j = Judge::collapse_inputs(&sys, "•");
    let patch =
        OpenImmersion::inclusion(&sys, &Subsystem::states(&sys, &["s1", "s2", "s3"])).unwrap();
    let q =
        MealySystem::homogeneous_from_table(&["•"], &["0", "1"], &[("q", "•", "q", "0")]).unwrap();
    let s = Section::from_state_maps(&j, patch, q, vec![0; 3], vec![0; 3]).unwrap();
    match s.validate(&j) {
        Verdict::Fails(SectionViolation::Square(v)) => {
            assert_eq!((v.state.as_str(), v.input.as_str()), ("s1", "a"));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn restriction_to_overlap_lands_in_one_state() {
    let sys = gluing_system();
    let j = Judge::collapse_inputs(&sys, "•");
    let patch =
        OpenImmersion::inclusion(&sys, &Subsystem::states(&sys, &["s0", "s1", "s2"])).unwrap();
    let m1 = minimal_realisation(&j, &patch, Interface::Restricted).unwrap();
    let src = patch.source();
    let n = OpenImmersion::inclusion(src, &Subsystem::states(src, &["s1", "s2"])).unwrap();
    let r = m1.restrict(&n).unwrap();
    assert!(r.validate(&j).holds());
    let image: std::collections::BTreeSet<usize> = r.psi().before_map().iter().copied().collect();
    assert_eq!(image.len(), 1);
    assert!(image.contains(&m1.before_image(1)));
    // The after-state s2 still continues as p0: it is reached from s0.
    let s2 = src.after().index_of("s2").unwrap();
    assert_eq!(
        r.psi().after_map()[n
            .morphism()
            .after_map()
            .iter()
            .position(|&y| y == s2)
            .unwrap()],
        m1.before_image(0)
    );
}

#[test]
fn restriction_along_identity_and_to_empty_patch() {
    let sys = routing();
    let j = Judge::identity(&sys);
    let s = rerouted(&sys, &j);
    let id = OpenImmersion::identity(&sys);
    assert_eq!(s.restrict(&id).unwrap(), s);
    let empty = Subsystem {
        before_states: vec![],
        after_states: vec![],
        inputs: vec!["a".into(), "b".into()],
        outputs: vec!["0".into(), "1".into()],
    };
    let e = OpenImmersion::inclusion(&sys, &empty).unwrap();
    let r = s.restrict(&e).unwrap();
    assert!(r.psi().before_map().is_empty());
    assert!(r.validate(&j).holds());
}

#[test]
fn rerouted_explanation_is_a_section() {
    let sys = routing();
    let j = Judge::identity(&sys);
    assert!(rerouted(&sys, &j).validate(&j).holds());
}

#[test]
fn behavioral_equivalence_examples() {
    let sys = routing();
    let j = Judge::identity(&sys);
    let id = identity_section(&sys, &j);
    let alt = rerouted(&sys, &j);
    assert!(behavioral_equiv(&id, &id, sys.inputs()).unwrap().holds());
    let d = behavioral_equiv(&id, &alt, sys.inputs())
        .unwrap()
        .into_witness()
        .unwrap();
    assert_eq!(d.state, "s1");
    assert_eq!(d.word, vec!["a", "b"]);
    assert_ne!(d.first_outputs, d.second_outputs);
    // Pure-letter alphabets do not see the difference.
    for l in ["a", "b"] {
        let alphabet = FiniteSet::new([l]);
        assert!(behavioral_equiv(&id, &alt, &alphabet).unwrap().holds());
    }
}

fn cycle_sections() -> (Section, Section, Judge) {
    let point =
        MealySystem::homogeneous_from_table(&["x"], &["0"], &[("x", "x", "x", "0")]).unwrap();
    let j = Judge::identity(&point);
    let patch = OpenImmersion::identity(&point);
    let three =
        Section::from_state_maps(&j, patch.clone(), cycle("c", 3), vec![0], vec![1]).unwrap();
    let six = Section::from_state_maps(&j, patch, cycle("d", 6), vec![0], vec![1]).unwrap();
    (three, six, j)
}

#[test]
fn cycles_are_behaviorally_but_not_cogerm_equivalent() {
    let (three, six, j) = cycle_sections();
    assert!(three.validate(&j).holds() && six.validate(&j).holds());
    let alphabet = j.interpretable_inputs().clone();
    assert!(behavioral_equiv(&three, &six, &alphabet).unwrap().holds());
    match cogerm_search(&three, &six).unwrap() {
        Err(CogermFailure::NotSingleValued { partners, .. }) => assert!(partners.len() >= 2),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn cogerm_of_a_section_with_itself_is_its_image() {
    let sys = routing();
    let j = Judge::identity(&sys);
    let alt = rerouted(&sys, &j);
    let w = cogerm_equiv(&alt, &alt).unwrap().unwrap();
    assert!(w.check(&alt, &alt));
    assert_eq!(w.first, w.second);
    assert_eq!(w.core.state_count(), 3);
}

#[test]
fn isomorphic_explanations_are_cogerm_equivalent() {
    let sys = routing();
    let j = Judge::identity(&sys);
    let alt = rerouted(&sys, &j);
    // Same machine with states renamed v1 <-> u3, v2 <-> u2, v3 <-> u1.
    let iso = MealySystem::homogeneous_from_table(
        &["a", "b"],
        &["0", "1"],
        &[
            ("v3", "a", "v1", "0"),
            ("v3", "b", "v2", "0"),
            ("v2", "a", "v1", "1"),
            ("v2", "b", "v2", "1"),
            ("v1", "a", "v1", "0"),
            ("v1", "b", "v2", "1"),
        ],
    )
    .unwrap();
    let other = Section::from_state_maps(
        &j,
        OpenImmersion::identity(&sys),
        iso,
        vec![2, 1],
        vec![0, 1],
    )
    .unwrap();
    assert!(other.validate(&j).holds());
    let w = cogerm_equiv(&alt, &other).unwrap().unwrap();
    assert!(w.check(&alt, &other));
    let graph: Vec<(usize, usize)> = w
        .first
        .before_map()
        .iter()
        .zip(w.second.before_map())
        .map(|(&p, &q)| (p, q))
        .collect();
    assert_eq!(graph, vec![(0, 2), (1, 1), (2, 0)]);
}

#[test]
fn restricted_interfaces_and_j_fullness() {
    let sys = routing();
    let j = Judge::identity(&sys);
    let split = Covering::from_subsystems(
        &sys,
        &[
            Subsystem::inputs(&sys, &["a"]),
            Subsystem::inputs(&sys, &["b"]),
        ],
    )
    .unwrap();
    let first = restricted_interface(&j, &split.patches()[0]);
    assert_eq!(first.as_slice(), &["a"]);
    assert!(!is_j_full(&split, &j).holds());
    assert!(is_j_full(&Covering::identity(&sys), &j).holds());
    assert_eq!(
        restricted_interface(&j, &OpenImmersion::identity(&sys)),
        *sys.inputs()
    );

    let g = gluing_system();
    let jg = Judge::collapse_inputs(&g, "•");
    assert_eq!(
        restricted_interface(&jg, &OpenImmersion::identity(&g)).len(),
        1
    );
    let local = Covering::from_subsystems(
        &g,
        &[
            Subsystem::states(&g, &["s0", "s1", "s2"]),
            Subsystem::states(&g, &["s1", "s2", "s3"]),
        ],
    )
    .unwrap();
    assert!(is_j_full(&local, &jg).holds());
}

#[test]
fn fiber_conflict_blocks_realisation() {
    let sys = MealySystem::homogeneous_from_table(
        &["a", "b"],
        &["0", "1"],
        &[("s", "a", "s", "0"), ("s", "b", "s", "1")],
    )
    .unwrap();
    let j = Judge::collapse_inputs(&sys, "•");
    let err =
        canonical_realisation(&j, &OpenImmersion::identity(&sys), Interface::Full).unwrap_err();
    assert!(matches!(err, ExplanationError::FiberConflict { .. }));
}

#[test]
fn completion_round_trips_through_the_restricted_class() {
    let sys = routing();
    let j = Judge::identity(&sys);
    let split = Covering::from_subsystems(&sys, &[Subsystem::inputs(&sys, &["a"])]);
    assert!(split.is_err(), "a single-input patch does not cover");
    let patch = OpenImmersion::inclusion(&sys, &Subsystem::inputs(&sys, &["a"])).unwrap();
    let ri = canonical_realisation(&j, &patch, Interface::Restricted).unwrap();
    assert_eq!(ri.explanatory().inputs().as_slice(), &["a"]);
    let full = extend_to_full(&j, &ri).unwrap();
    assert!(full.validate(&j).holds());
    let back = restrict_interface(&j, &full).unwrap();
    let alphabet = restricted_interface(&j, &patch);
    assert!(behavioral_equiv(&back, &ri, &alphabet).unwrap().holds());
}

#[test]
fn section_doc_round_trip() {
    let sys = gluing_system();
    let j = Judge::collapse_inputs(&sys, "•");
    let patch =
        OpenImmersion::inclusion(&sys, &Subsystem::states(&sys, &["s0", "s1", "s2"])).unwrap();
    let m1 = minimal_realisation(&j, &patch, Interface::Restricted).unwrap();
    let doc = m1.to_doc();
    assert_eq!(Section::from_doc(&sys, &j, &doc).unwrap(), m1);
}
