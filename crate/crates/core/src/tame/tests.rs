use super::*;

fn q(s: &str) -> Q {
    parse_rational(s).unwrap()
}

fn rect(x: (&str, &str), y: (&str, &str), open: [bool; 4]) -> Rect {
    Rect::new((q(x.0), q(x.1)), (q(y.0), q(y.1)), open).unwrap()
}

fn unit_square() -> RectUnion {
    RectUnion::new(vec![rect(("0", "1"), ("0", "1"), [false; 4])], Axis::X).unwrap()
}

fn punctured_square() -> RectUnion {
    let o = [true; 4];
    RectUnion::new(
        vec![
            rect(("0", "1"), ("0", "1/2"), o),
            rect(("0", "1"), ("1/2", "1"), o),
            rect(("0", "1/2"), ("0", "1"), o),
            rect(("1/2", "1"), ("0", "1"), o),
        ],
        Axis::X,
    )
    .unwrap()
}

fn two_bands() -> RectUnion {
    RectUnion::new(
        vec![
            rect(("0", "1"), ("0", "2/5"), [false; 4]),
            rect(("0", "1"), ("3/5", "1"), [false; 4]),
        ],
        Axis::X,
    )
    .unwrap()
}

#[test]
fn parses_fractions_and_decimals() {
    assert_eq!(q("1/2"), q("0.5"));
    assert_eq!(q("-3"), Q::from_integer((-3).into()));
    assert_eq!(format_rational(&q("0.40")), "2/5");
    assert!(parse_rational("1/0").is_err());
    assert!(parse_rational("x").is_err());
    assert!(parse_rational("1.").is_err());
}

#[test]
fn degenerate_rectangles_need_closed_ends() {
    assert!(Rect::new((q("1"), q("1")), (q("0"), q("1")), [false; 4]).is_ok());
    assert!(Rect::new(
        (q("1"), q("1")),
        (q("0"), q("1")),
        [true, false, false, false]
    )
    .is_err());
    assert!(Rect::new((q("2"), q("1")), (q("0"), q("1")), [false; 4]).is_err());
}

#[test]
fn fibers_of_the_squares() {
    assert_eq!(unit_square().fiber(&q("0.3")).to_string(), "[0,1]");
    let p = punctured_square();
    let at_half = p.fiber(&q("1/2"));
    assert_eq!(at_half.to_string(), "(0,1/2)∪(1/2,1)");
    assert_eq!(at_half.components(), 2);
    assert_eq!(p.fiber(&q("0.4")).to_string(), "(0,1)");
    assert!(p.fiber(&q("0")).is_empty());
}

#[test]
fn touching_intervals_merge_only_through_a_closed_end() {
    let a = Interval::new(q("0"), q("1/2"), false, true).unwrap();
    let b = Interval::new(q("1/2"), q("1"), false, false).unwrap();
    assert_eq!(
        IntervalUnion::new(vec![b.clone(), a.clone()]).components(),
        1
    );
    let c = Interval::new(q("1/2"), q("1"), true, false).unwrap();
    assert_eq!(IntervalUnion::new(vec![a, c]).components(), 2);
}

#[test]
fn punctured_square_heals_near_the_puncture() {
    let p = punctured_square();
    let near = p.preimage_components_near(&q("1/2"));
    assert_eq!(near.components.len(), 1);
    assert!(p.robustly_disconnected(&q("1/2")).is_none());
}

#[test]
fn component_count_is_stable_under_shrinking() {
    for u in [unit_square(), punctured_square(), two_bands()] {
        for t in u.candidate_values() {
            let d = u.safe_delta(&t);
            let a = u.preimage_components_with(&t, &d);
            let b = u.preimage_components_with(&t, &(&d / Q::from_integer(2.into())));
            assert_eq!(a.components.len(), b.components.len(), "t0 = {t}");
            assert_eq!(a.meeting_fiber().len(), b.meeting_fiber().len(), "t0 = {t}");
        }
    }
}

#[test]
fn two_bands_are_robustly_disconnected() {
    let u = two_bands();
    let near = u.preimage_components_near(&q("1/2"));
    assert_eq!(near.components.len(), 2);
    let cert = u.robustly_disconnected(&q("1/2")).expect("certificate");
    assert_eq!(cert.components.len(), 2);
    for c in &cert.components {
        assert_eq!(c.marked.0, q("1/2"));
        assert!(c
            .pieces
            .iter()
            .any(|r| r.x.contains(&c.marked.0) && r.y.contains(&c.marked.1)));
    }
    assert!(cert.neighborhood.0 < q("1/2") && q("1/2") < cert.neighborhood.1);
}

#[test]
fn verdicts() {
    let p = punctured_square().sheaf_verdict();
    assert!(p.sheaf);
    assert_eq!(p.disconnected_fibers, vec![q("1/2")]);
    assert!(p.robust.is_empty());
    assert!(p.compactness_unchecked);
    assert_eq!(
        p.summary(),
        "sheaf: yes; disconnected fiber at 1/2: yes; robust: no"
    );

    let b = two_bands().sheaf_verdict();
    assert!(!b.sheaf);
    assert_eq!(b.robust, two_bands().candidate_values());
    assert!(!b.compactness_unchecked);

    let s = unit_square().sheaf_verdict();
    assert!(s.sheaf);
    assert_eq!(s.summary(), "sheaf: yes; disconnected fibers: none");
}

#[test]
fn certificate_gives_compatible_unglueable_family() {
    let u = two_bands();
    let cert = u.robustly_disconnected(&q("1/2")).unwrap();
    let check = certificate_covering(&u, &cert).unwrap();
    assert!(check.locals_exist);
    assert!(check.compatible);
    assert!(!check.glues);
    assert!(check.compatible_but_unglueable());
    assert!(check.points.iter().any(|p| p.name.starts_with('c')));
}

#[test]
fn projection_onto_y() {
    let mut doc = two_bands().to_doc();
    doc.axis = Axis::Y;
    let u = RectUnion::from_doc(&doc).unwrap();
    assert!(u.sheaf_verdict().sheaf);
    assert_eq!(u.fiber(&q("1/5")).to_string(), "[0,1]");
    assert!(u.fiber(&q("1/2")).is_empty());
}

#[test]
fn doc_round_trip() {
    let u = punctured_square();
    assert_eq!(RectUnion::from_doc(&u.to_doc()).unwrap(), u);
}
