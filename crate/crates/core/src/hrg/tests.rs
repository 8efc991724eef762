use super::*;
use crate::geometry::PolarPoint;
use proptest::prelude::*;

/// Params with an exactly representable radius: `n = 1` makes `R = C`.
fn exact_radius_params(radius: f64) -> HrgParams {
    HrgParams::new(1, 0.75, radius, 0).unwrap()
}

#[test]
fn empty_graph_is_fine() {
    let params = exact_radius_params(10.0);
    let g = HrgGraph::from_parts(params, vec![], vec![]).unwrap();
    assert_eq!(g.num_vertices(), 0);
    assert_eq!(g.num_edges(), 0);
    assert_eq!(g.max_degree(), 0);
    assert!(g.core().is_empty());
    let layering = build_layering(&g);
    assert_eq!(layering.max_level, 0);
}

#[test]
fn generated_edges_match_brute_force() {
    for seed in [1u64, 2, 3] {
        for alpha in [0.6, 0.75, 0.9] {
            let params = HrgParams::new(500, alpha, 0.0, seed).unwrap();
            let g = generate(&params).unwrap();
            let mut naive = brute_force_edges(g.coords(), params.radius());
            naive.sort_unstable();
            assert_eq!(g.edge_list(), naive, "alpha={alpha} seed={seed}");
        }
    }
}

#[test]
fn generation_is_deterministic() {
    let params = HrgParams::new(1000, 0.7, 0.0, 99).unwrap();
    let a = generate(&params).unwrap();
    let b = generate(&params).unwrap();
    assert_eq!(a, b);
}

#[test]
fn realized_count_concentrates_around_n() {
    // Poisson concentration of the vertex-count draw itself.
    let n = 1u64 << 16;
    let mut ok = 0;
    for seed in 0..100u64 {
        let count = Stream::derive(seed, &[TAG_COUNT]).poisson(n as f64) as f64;
        let dev = (count - n as f64).abs();
        if dev <= 6.0 * (n as f64).sqrt() {
            ok += 1;
        }
    }
    assert!(ok >= 99, "only {ok}/100 within 6 sigma");
}

#[test]
fn edge_budget_refuses_oversized_instances() {
    let params = HrgParams::new(4096, 0.6, 0.0, 5).unwrap();
    match generate_with_budget(&params, 50) {
        Err(HrgError::EdgeBudgetExceeded { budget: 50, .. }) => {}
        other => panic!("expected budget error, got {other:?}"),
    }
}

#[test]
fn layer_assignment_follows_the_band_rule() {
    let params = exact_radius_params(10.0);
    let coords = vec![
        PolarPoint::new(9.5, 0.0),  // R - r = 0.5  -> level 0
        PolarPoint::new(6.8, 1.0),  // R - r = 3.2  -> level 3
        PolarPoint::new(7.0, 2.0),  // boundary R - r = 3 -> inner side, level 3
        PolarPoint::new(10.0, 3.0), // on the rim -> level 0
        PolarPoint::new(0.0, 0.0),  // centre -> level 10
    ];
    let g = HrgGraph::from_parts(params, coords, vec![]).unwrap();
    let layering = build_layering(&g);
    assert_eq!(layering.level_of, vec![0, 3, 3, 0, 10]);
    assert_eq!(layering.max_level, 10);
    assert_eq!(layering.members_at(3), &[1, 2]);
    assert!(layering.members_at(7).is_empty());
}

#[test]
fn layer_counts_track_exact_expectations() {
    let params = HrgParams::new(1 << 14, 0.75, 0.0, 7).unwrap();
    let g = generate(&params).unwrap();
    let layering = build_layering(&g);
    let spec = params.disk_spec();
    let radius = params.radius();
    for level in 0..6u32 {
        let hi = ball_measure_origin(radius - level as f64, &spec).unwrap();
        let lo = ball_measure_origin((radius - level as f64 - 1.0).max(0.0), &spec).unwrap();
        let mean = params.n as f64 * (hi - lo);
        let observed = layering.members_at(level).len() as f64;
        assert!(
            (observed - mean).abs() <= 6.0 * mean.sqrt(),
            "level {level}: observed {observed}, mean {mean}"
        );
    }
}

#[test]
fn leaves_of_star_and_triangle() {
    let star = HrgGraph::from_edge_list(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]).unwrap();
    assert_eq!(star.leaves_of(0).unwrap(), vec![1, 2, 3, 4, 5]);
    assert_eq!(star.leaves_of(1).unwrap(), Vec::<VertexId>::new());

    let triangle = HrgGraph::from_edge_list(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
    for v in 0..3 {
        assert!(triangle.leaves_of(v).unwrap().is_empty());
    }
    assert!(matches!(
        triangle.leaves_of(3),
        Err(HrgError::VertexOutOfRange { .. })
    ));
}

#[test]
fn leaves_and_larger_degree_match_brute_filters() {
    let params = HrgParams::new(500, 0.65, 0.0, 11).unwrap();
    let g = generate(&params).unwrap();
    for u in 0..g.num_vertices() as VertexId {
        let brute_leaves: Vec<VertexId> = g
            .neighbours(u)
            .iter()
            .copied()
            .filter(|&v| g.degree(v).unwrap() == 1)
            .collect();
        assert_eq!(g.leaves_of(u).unwrap(), brute_leaves);

        let du = g.degree(u).unwrap();
        let brute_plus: Vec<VertexId> = g
            .neighbours(u)
            .iter()
            .copied()
            .filter(|&v| g.degree(v).unwrap() >= du)
            .collect();
        assert_eq!(g.larger_degree_neighbourhood(u).unwrap(), brute_plus);
    }
}

#[test]
fn larger_degree_neighbourhood_edge_cases() {
    // Star centre strictly dominates all neighbours.
    let star = HrgGraph::from_edge_list(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
    assert!(star.larger_degree_neighbourhood(0).unwrap().is_empty());
    assert_eq!(star.larger_degree_neighbourhood(1).unwrap(), vec![0]);

    // In a regular graph every neighbour ties and is included.
    let cycle = HrgGraph::from_edge_list(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
    assert_eq!(cycle.larger_degree_neighbourhood(0).unwrap(), vec![1, 3]);
}

#[test]
fn core_is_a_clique_and_roughly_the_right_size() {
    let params = HrgParams::new(1 << 16, 0.7, 0.0, 42).unwrap();
    let g = generate(&params).unwrap();
    let core = g.core();
    for (i, &u) in core.iter().enumerate() {
        for &v in &core[i + 1..] {
            assert!(
                g.neighbours(u).binary_search(&v).is_ok(),
                "core pair ({u}, {v}) not adjacent"
            );
        }
    }
    let expected = params.n as f64 * (-params.alpha * params.radius() / 2.0).exp();
    let size = core.len() as f64;
    assert!(
        size <= 4.0 * expected && size >= expected / 4.0,
        "core size {size} vs expectation {expected}"
    );
}

#[test]
fn core_is_empty_when_all_radii_are_large() {
    let g = HrgGraph::from_edge_list(5, &[(0, 1)]).unwrap();
    assert!(g.core().is_empty());
}

#[test]
fn instance_round_trip_is_lossless() {
    let params = HrgParams::new(200, 0.8, -0.5, 13).unwrap();
    let g = generate(&params).unwrap();
    let mut buf = Vec::new();
    g.to_writer(&mut buf).unwrap();
    let back = HrgGraph::from_reader(&buf[..]).unwrap();
    assert_eq!(g, back);

    let empty = HrgGraph::from_parts(exact_radius_params(9.0), vec![], vec![]).unwrap();
    let mut buf = Vec::new();
    empty.to_writer(&mut buf).unwrap();
    assert_eq!(empty, HrgGraph::from_reader(&buf[..]).unwrap());
}

#[test]
fn hand_written_instance_with_false_edge_fails_validation() {
    // Vertices 0 and 2 sit on opposite sides of the rim, far beyond distance R.
    let text = "hrg-instance v1\n\
                1 0.75 10 0 10 3\n\
                0 9.5 0\n\
                1 2.0 0.1\n\
                2 9.5 3.141592653589793\n\
                edges 2\n\
                0 1\n\
                0 2\n";
    let g = HrgGraph::from_reader(text.as_bytes()).unwrap();
    match g.validate_adjacency() {
        Err(HrgError::InvariantViolation(msg)) => {
            assert!(msg.contains("(0, 2)"), "unexpected message: {msg}")
        }
        other => panic!("expected invariant violation, got {other:?}"),
    }
}

#[test]
fn parse_errors_carry_line_numbers() {
    let bad_header = "nope\n";
    match HrgGraph::from_reader(bad_header.as_bytes()) {
        Err(HrgError::Parse { line: 1, .. }) => {}
        other => panic!("{other:?}"),
    }
    let bad_edge = "hrg-instance v1\n1 0.75 10 0 10 2\n0 1 0\n1 2 0\nedges 1\n1 0\n";
    match HrgGraph::from_reader(bad_edge.as_bytes()) {
        Err(HrgError::Parse { line: 6, msg }) => assert!(msg.contains("u < v")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn validate_adjacency_accepts_generated_graphs() {
    let params = HrgParams::new(800, 0.7, 0.0, 3).unwrap();
    let g = generate(&params).unwrap();
    g.validate_adjacency().unwrap();
}

#[test]
fn expected_degree_sits_inside_the_closed_form_band() {
    let params = HrgParams::new(1 << 16, 0.7, 0.0, 0).unwrap();
    let radius = params.radius();
    let mut prev = f64::INFINITY;
    for &r in &[radius * 0.4, radius * 0.6, radius * 0.8, radius - 1.0] {
        let exact = expected_degree(r, &params);
        let (lo, hi) = expected_degree_bounds(r, &params);
        assert!(exact <= 1.3 * hi, "r={r}: exact {exact} vs upper {hi}");
        assert!(exact >= 0.7 * lo, "r={r}: exact {exact} vs lower {lo}");
        assert!(exact <= prev, "expected degree must decrease in r");
        prev = exact;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn round_trip_random_instances(n in 20u64..120, alpha_pm in 0.55f64..0.95, seed in 0u64..500) {
        let params = HrgParams::new(n, alpha_pm, 0.0, seed).unwrap();
        let g = generate(&params).unwrap();
        let mut buf = Vec::new();
        g.to_writer(&mut buf).unwrap();
        let back = HrgGraph::from_reader(&buf[..]).unwrap();
        prop_assert_eq!(g, back);
    }
}
