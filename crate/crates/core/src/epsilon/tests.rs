use super::*;

fn v(xs: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(xs)
}

fn triangle() -> EpsilonProblem {
    let pts = [
        ("a", [0.0, 0.0]),
        ("b", [2.0, 0.0]),
        ("c", [1.0, 3f64.sqrt()]),
    ];
    let inputs = pts
        .iter()
        .map(|(n, p)| Input {
            name: n.to_string(),
            fiber: "⋆".into(),
            value: v(p),
        })
        .collect();
    EpsilonProblem {
        instance: EpsilonInstance::new(2, Metric::Euclidean, OutputDomain::Full, inputs).unwrap(),
        patches: vec![vec![0], vec![1], vec![2]],
        epsilon: 1.08,
    }
}

/// Smallest ball over all support subsets of size at most `d + 1`.
fn oracle_ball(points: &[DVector<f64>]) -> f64 {
    let d = points[0].len();
    let mut best = f64::INFINITY;
    for k in 1..=(d + 1).min(points.len()) {
        for c in combinations(points.len(), k) {
            let support: Vec<DVector<f64>> = c.iter().map(|&i| points[i].clone()).collect();
            let ball = circumball(&support).unwrap();
            if points
                .iter()
                .all(|p| (p - &ball.center).norm() <= ball.radius + 1e-12)
            {
                best = best.min(ball.radius);
            }
        }
    }
    best
}

#[test]
fn enclosing_balls_of_the_triangle() {
    let p = triangle();
    let pts: Vec<DVector<f64>> = p
        .instance
        .inputs()
        .iter()
        .map(|i| i.value.clone())
        .collect();
    let one = min_enclosing_ball(&pts[..1]).unwrap();
    assert_eq!(one.radius, 0.0);
    assert_eq!(one.center, pts[0]);
    let two = min_enclosing_ball(&pts[..2]).unwrap();
    assert!((two.radius - 1.0).abs() < 1e-12);
    assert!((&two.center - v(&[1.0, 0.0])).norm() < 1e-12);
    for pair in combinations(3, 2) {
        let r = min_enclosing_ball(&[pts[pair[0]].clone(), pts[pair[1]].clone()])
            .unwrap()
            .radius;
        assert!((r - 1.0).abs() < 1e-9);
    }
    let all = min_enclosing_ball(&pts).unwrap();
    assert!((all.radius - 2.0 / 3f64.sqrt()).abs() < 1e-9);
    assert!(matches!(
        min_enclosing_ball(&[]),
        Err(EpsilonError::EmptyInput)
    ));
}

#[test]
fn enclosing_ball_matches_support_enumeration() {
    let sets: Vec<Vec<DVector<f64>>> = vec![
        vec![v(&[0.0]), v(&[3.0]), v(&[1.0])],
        vec![
            v(&[0.0, 0.0]),
            v(&[4.0, 0.0]),
            v(&[1.0, 1.0]),
            v(&[2.0, 3.0]),
        ],
        vec![v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.5, 0.1])],
        vec![
            v(&[0.0, 0.0, 0.0]),
            v(&[1.0, 0.0, 0.0]),
            v(&[0.0, 1.0, 0.0]),
            v(&[0.0, 0.0, 1.0]),
            v(&[0.3, 0.3, 0.3]),
        ],
        vec![v(&[1.0, 1.0]), v(&[1.0, 1.0]), v(&[2.0, 2.0])],
    ];
    for pts in sets {
        let r = min_enclosing_ball(&pts).unwrap().radius;
        assert!((r - oracle_ball(&pts)).abs() < 1e-12, "{pts:?}");
    }
}

#[test]
fn target_sets_compose_by_union() {
    let p = triangle();
    let t = target_set(&p.instance, &[0], "⋆");
    assert_eq!(t.points, vec![v(&[0.0, 0.0])]);
    assert_eq!(target_set(&p.instance, &[0, 1, 2], "⋆").points.len(), 3);
    let missing = target_set(&p.instance, &[0], "other");
    assert!(!missing.in_image && missing.points.is_empty());
}

#[test]
fn triangle_feasibility_and_depth() {
    let p = triangle();
    let inst = &p.instance;
    for pair in combinations(3, 2) {
        let patch: Vec<usize> = pair.clone();
        let r = feasibility(inst, &target_set(inst, &patch, "⋆"), 1.08).unwrap();
        assert!(r.feasible && !r.marginal);
    }
    let full = feasibility(inst, &target_set(inst, &[0, 1, 2], "⋆"), 1.08).unwrap();
    assert!(!full.feasible && !full.marginal);
    let depth = obstruction_depth(inst, &p.patches, 1.08, "⋆", Execution::Sequential)
        .unwrap()
        .unwrap();
    assert_eq!(
        depth,
        Depth {
            k: 3,
            subfamily: vec![0, 1, 2]
        }
    );
    let report = depth_report(inst, &p.patches, 1.08, "⋆", Execution::Parallel).unwrap();
    assert!((report.radius_pairwise - 1.0).abs() < 1e-9);
    assert!((report.radius_full - 2.0 / 3f64.sqrt()).abs() < 1e-9);
    assert_eq!(report.depth, Some(3));
    assert!(
        obstruction_depth(inst, &p.patches, 1.2, "⋆", Execution::Sequential)
            .unwrap()
            .is_none()
    );
    assert!(matches!(
        feasibility(inst, &target_set(inst, &[0], "⋆"), -1.0),
        Err(EpsilonError::NegativeEpsilon(_))
    ));
}

#[test]
fn equal_targets_are_feasible_at_zero() {
    let inputs = (0..3)
        .map(|k| Input {
            name: format!("i{k}"),
            fiber: "x".into(),
            value: v(&[0.5, 0.5]),
        })
        .collect();
    let inst = EpsilonInstance::new(2, Metric::Euclidean, OutputDomain::Full, inputs).unwrap();
    let r = feasibility(&inst, &target_set(&inst, &inst.whole(), "x"), 0.0).unwrap();
    assert!(r.feasible);
    assert_eq!(r.center, vec![0.5, 0.5]);
    assert!(obstruction_depth(
        &inst,
        &[vec![0], vec![1], vec![2]],
        0.0,
        "x",
        Execution::Sequential
    )
    .unwrap()
    .is_none());
}

#[test]
fn regular_simplices_give_full_depth() {
    for d in 1..=3 {
        let p = simplex_problem(d).unwrap();
        let depth = obstruction_depth(
            &p.instance,
            &p.patches,
            p.epsilon,
            "⋆",
            Execution::Sequential,
        )
        .unwrap()
        .unwrap();
        assert_eq!(depth.k, d + 1, "d = {d}");
        let verts = regular_simplex(d);
        for i in 0..verts.len() {
            for j in i + 1..verts.len() {
                assert!(((&verts[i] - &verts[j]).norm() - 2f64.sqrt()).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn simplex_projection() {
    let y = project_to_simplex(&v(&[2.0, 0.0, 0.0]));
    assert!((&y - v(&[1.0, 0.0, 0.0])).norm() < 1e-15);
    let y = project_to_simplex(&v(&[0.5, 0.5, 0.5]));
    assert!((&y - v(&[1.0 / 3.0; 3])).norm() < 1e-15);
    let y = project_to_simplex(&v(&[0.2, 0.3, 0.5]));
    assert!((&y - v(&[0.2, 0.3, 0.5])).norm() < 1e-15);
}

#[test]
fn constrained_domains() {
    // Two vertices of the 2-simplex: the unconstrained center is already on it.
    let inputs = vec![
        Input {
            name: "a".into(),
            fiber: "x".into(),
            value: v(&[1.0, 0.0, 0.0]),
        },
        Input {
            name: "b".into(),
            fiber: "x".into(),
            value: v(&[0.0, 1.0, 0.0]),
        },
    ];
    let inst = EpsilonInstance::new(3, Metric::Euclidean, OutputDomain::Simplex, inputs).unwrap();
    let r = feasibility(&inst, &target_set(&inst, &[0, 1], "x"), 0.8).unwrap();
    assert!(r.feasible);
    assert!((r.radius - 0.5f64.sqrt()).abs() < 1e-9);

    // The unconstrained center (1, 0) lies outside the box; the optimum is (1/2, 0).
    let inputs = vec![
        Input {
            name: "a".into(),
            fiber: "x".into(),
            value: v(&[0.0, 0.0]),
        },
        Input {
            name: "b".into(),
            fiber: "x".into(),
            value: v(&[2.0, 0.0]),
        },
    ];
    let domain = OutputDomain::Box {
        lo: vec![0.0, 0.0],
        hi: vec![0.5, 1.0],
    };
    let inst = EpsilonInstance::new(2, Metric::Euclidean, domain, inputs).unwrap();
    let r = feasibility(&inst, &target_set(&inst, &[0, 1], "x"), 2.0).unwrap();
    assert!((r.radius - 1.5).abs() < 1e-6, "radius {}", r.radius);
    assert!(r.feasible);
    assert!((r.lower_bound - 1.0).abs() < 1e-12);
    let tight = feasibility(&inst, &target_set(&inst, &[0, 1], "x"), 1.2).unwrap();
    assert!(!tight.feasible && tight.marginal);

    let off = vec![Input {
        name: "a".into(),
        fiber: "x".into(),
        value: v(&[0.5, 0.2]),
    }];
    assert!(matches!(
        EpsilonInstance::new(2, Metric::Euclidean, OutputDomain::Simplex, off),
        Err(EpsilonError::OffSimplex(_))
    ));
}

#[test]
fn discrete_metric_radius() {
    let inputs = vec![
        Input {
            name: "a".into(),
            fiber: "x".into(),
            value: v(&[1.0]),
        },
        Input {
            name: "b".into(),
            fiber: "x".into(),
            value: v(&[1.0]),
        },
        Input {
            name: "c".into(),
            fiber: "x".into(),
            value: v(&[2.0]),
        },
    ];
    let inst = EpsilonInstance::new(1, Metric::Discrete, OutputDomain::Full, inputs).unwrap();
    assert!(
        feasibility(&inst, &target_set(&inst, &[0, 1], "x"), 0.5)
            .unwrap()
            .feasible
    );
    assert!(
        !feasibility(&inst, &target_set(&inst, &[0, 2], "x"), 0.5)
            .unwrap()
            .feasible
    );
    assert!(
        feasibility(&inst, &target_set(&inst, &[0, 2], "x"), 1.0)
            .unwrap()
            .feasible
    );
}

#[test]
fn gluing_epsilon_sections() {
    let p = triangle();
    let inst = &p.instance;
    let single = vec![BTreeMap::from([("⋆".to_string(), vec![0.1, 0.0])])];
    let glued = eps_glue(inst, &[vec![0]], &single, 1.08).unwrap();
    assert_eq!(glued["⋆"].value, vec![0.0, 0.0]);

    let pairs = vec![
        BTreeMap::from([("⋆".to_string(), vec![0.5, 0.0])]),
        BTreeMap::from([("⋆".to_string(), vec![1.5, 0.0])]),
    ];
    let glued = eps_glue(inst, &[vec![0], vec![1]], &pairs, 1.08).unwrap();
    assert!((DVector::from_vec(glued["⋆"].value.clone()) - v(&[1.0, 0.0])).norm() < 1e-12);

    let three: Vec<BTreeMap<String, Vec<f64>>> = inst
        .inputs()
        .iter()
        .map(|i| BTreeMap::from([("⋆".to_string(), i.value.iter().copied().collect())]))
        .collect();
    assert_eq!(
        eps_glue(inst, &p.patches, &three, 1.08),
        Err(EpsilonError::Infeasible {
            fiber: "⋆".into()
        })
    );
    let bad = vec![BTreeMap::from([("⋆".to_string(), vec![5.0, 0.0])])];
    assert!(matches!(
        eps_glue(inst, &[vec![0]], &bad, 1.08),
        Err(EpsilonError::InvalidSection { .. })
    ));
}

#[test]
fn doc_round_trip() {
    let p = triangle();
    let doc = p.to_doc();
    assert_eq!(EpsilonProblem::from_doc(&doc).unwrap(), p);
}

#[test]
fn combinations_are_lexicographic() {
    assert_eq!(
        combinations(4, 2),
        vec![
            vec![0, 1],
            vec![0, 2],
            vec![0, 3],
            vec![1, 2],
            vec![1, 3],
            vec![2, 3]
        ]
    );
    assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
    assert!(combinations(2, 3).is_empty());
}
