use super::*;
use crate::hrg::HrgGraph;
use proptest::prelude::*;

fn k2() -> HrgGraph {
    HrgGraph::from_edge_list(2, &[(0, 1)]).unwrap()
}

fn k3() -> HrgGraph {
    HrgGraph::from_edge_list(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
}

fn p3() -> HrgGraph {
    HrgGraph::from_edge_list(3, &[(0, 1), (1, 2)]).unwrap()
}

fn by_index(g: &HrgGraph) -> IdAssignment {
    assign_ids(g, IdStrategy::ByIndex).unwrap()
}

// ---------------------------------------------------------------------
// Independent oracle: exhaustive enumeration of every candidate branch.
// Reimplements the round semantics directly on colour vectors and walks
// the full probability tree, so expected completion laws come from first
// principles rather than from the engine under test.
// ---------------------------------------------------------------------

fn oracle_palette(g: &HrgGraph, assigned: &[Option<u32>], k: u32, u: VertexId) -> Vec<u32> {
    let used: Vec<u32> = g
        .neighbours(u)
        .iter()
        .filter_map(|&v| assigned[v as usize])
        .collect();
    (0..k).filter(|c| !used.contains(c)).collect()
}

fn oracle_round(
    g: &HrgGraph,
    rule: PriorityRule,
    ids: &[u32],
    assigned: &[Option<u32>],
    candidates: &[(VertexId, u32)],
) -> Vec<Option<u32>> {
    let cand_of = |v: VertexId| candidates.iter().find(|&&(w, _)| w == v).map(|&(_, c)| c);
    let mut next = assigned.to_vec();
    for &(u, cu) in candidates {
        let mut blocked = false;
        for &v in g.neighbours(u) {
            if cand_of(v) != Some(cu) {
                continue;
            }
            let wins = match rule {
                PriorityRule::Symmetric => true,
                PriorityRule::SmallerIdWins => ids[v as usize] < ids[u as usize],
                PriorityRule::LargerDegreeWins => {
                    let (dv, du) = (g.neighbours(v).len(), g.neighbours(u).len());
                    dv > du || (dv == du && ids[v as usize] < ids[u as usize])
                }
            };
            if wins {
                blocked = true;
                break;
            }
        }
        if !blocked {
            next[u as usize] = Some(cu);
        }
    }
    next
}

/// Exact probability that the trial finishes within `depth` rounds.
fn oracle_completion_probability(
    g: &HrgGraph,
    k: u32,
    rule: PriorityRule,
    ids: &[u32],
    assigned: &[Option<u32>],
    depth: u32,
) -> f64 {
    let uncoloured: Vec<VertexId> = (0..g.num_vertices() as VertexId)
        .filter(|&u| assigned[u as usize].is_none())
        .collect();
    if uncoloured.is_empty() {
        return 1.0;
    }
    if depth == 0 {
        return 0.0;
    }
    let palettes: Vec<Vec<u32>> = uncoloured
        .iter()
        .map(|&u| oracle_palette(g, assigned, k, u))
        .collect();
    if palettes.iter().any(Vec::is_empty) {
        return 0.0;
    }
    let weight = 1.0 / palettes.iter().map(|p| p.len() as f64).product::<f64>();
    let mut total = 0.0;
    let mut pick = vec![0usize; uncoloured.len()];
    loop {
        let candidates: Vec<(VertexId, u32)> = uncoloured
            .iter()
            .enumerate()
            .map(|(idx, &u)| (u, palettes[idx][pick[idx]]))
            .collect();
        let next = oracle_round(g, rule, ids, assigned, &candidates);
        total += weight * oracle_completion_probability(g, k, rule, ids, &next, depth - 1);

        // odometer over the candidate product space
        let mut pos = 0;
        loop {
            if pos == pick.len() {
                return total;
            }
            pick[pos] += 1;
            if pick[pos] < palettes[pos].len() {
                break;
            }
            pick[pos] = 0;
            pos += 1;
        }
    }
}

#[test]
fn oracle_triangle_round_one_law_is_6_of_27() {
    let g = k3();
    let ids = by_index(&g);
    let p = oracle_completion_probability(&g, 3, PriorityRule::Symmetric, ids.ids(), &[None; 3], 1);
    assert!((p - 6.0 / 27.0).abs() < 1e-12, "oracle gave {p}");
}

#[test]
fn triangle_monte_carlo_matches_enumeration() {
    let g = k3();
    let ids = by_index(&g);
    let palette = PaletteSpec::new(3).unwrap();
    let trials = 100_000;
    let mut one_round = 0;
    for seed in 0..trials {
        let res = run(&g, palette, PriorityRule::Symmetric, &ids, seed, 64).unwrap();
        if matches!(res.outcome, RunOutcome::Completed { rounds: 1 }) {
            one_round += 1;
        }
    }
    let freq = one_round as f64 / trials as f64;
    assert!(
        (freq - 6.0 / 27.0).abs() < 0.01,
        "frequency {freq} vs exact {}",
        6.0 / 27.0
    );
}

#[test]
fn path_with_degree_priority_always_finishes_in_two_rounds() {
    let g = p3();
    let ids = by_index(&g);
    let p = oracle_completion_probability(
        &g,
        2,
        PriorityRule::LargerDegreeWins,
        ids.ids(),
        &[None; 3],
        2,
    );
    assert!((p - 1.0).abs() < 1e-12, "oracle gave {p}");
    let palette = PaletteSpec::new(2).unwrap();
    for seed in 0..500 {
        let res = run(&g, palette, PriorityRule::LargerDegreeWins, &ids, seed, 64).unwrap();
        match res.outcome {
            RunOutcome::Completed { rounds } => assert!(rounds <= 2, "took {rounds}"),
            other => panic!("unexpected outcome {other:?}"),
        }
    }
}

#[test]
fn pair_with_id_priority_always_finishes_in_two_rounds() {
    let g = k2();
    let ids = by_index(&g);
    let p = oracle_completion_probability(
        &g,
        2,
        PriorityRule::SmallerIdWins,
        ids.ids(),
        &[None; 2],
        2,
    );
    assert!((p - 1.0).abs() < 1e-12);
    let palette = PaletteSpec::new(2).unwrap();
    for seed in 0..200 {
        let res = run(&g, palette, PriorityRule::SmallerIdWins, &ids, seed, 64).unwrap();
        assert!(matches!(res.outcome, RunOutcome::Completed { rounds } if rounds <= 2));
    }
}

// ---------------------------------------------------------------------
// Candidate drawing
// ---------------------------------------------------------------------

#[test]
fn rank_select_skips_forbidden_colours() {
    assert_eq!(rank_select(&[], 4), 4);
    assert_eq!(rank_select(&[0, 2], 0), 1);
    assert_eq!(rank_select(&[0, 1, 2], 0), 3);
    assert_eq!(rank_select(&[1, 3], 2), 4);
}

#[test]
fn singleton_palette_is_forced() {
    let g = k2();
    let mut state = SimState::new(&g, PaletteSpec::new(3).unwrap(), &by_index(&g), 7);
    state.forbidden[0] = vec![0, 2];
    assert_eq!(state.palette_size(0), 1);
    for round in 0..50 {
        state.round = round;
        assert_eq!(state.candidate_colour(0).unwrap(), 1);
    }
}

#[test]
fn empty_palette_is_an_error_not_a_crash() {
    let g = k2();
    let mut state = SimState::new(&g, PaletteSpec::new(2).unwrap(), &by_index(&g), 7);
    state.forbidden[1] = vec![0, 1];
    assert_eq!(
        state.candidate_colour(1),
        Err(SimError::EmptyPalette { vertex: 1 })
    );
}

#[test]
fn candidate_draws_are_uniform() {
    let g = HrgGraph::from_edge_list(1, &[]).unwrap();
    let mut state = SimState::new(&g, PaletteSpec::new(3).unwrap(), &by_index(&g), 1234);
    let trials = 100_000u32;
    let mut counts = [0u32; 3];
    for t in 0..trials {
        state.round = t;
        counts[state.candidate_colour(0).unwrap() as usize] += 1;
    }
    for &c in &counts {
        let freq = c as f64 / trials as f64;
        assert!((freq - 1.0 / 3.0).abs() < 0.01, "counts {counts:?}");
    }
}

#[test]
fn draws_are_pure_in_seed_vertex_round() {
    let g = k3();
    let ids = by_index(&g);
    let s1 = SimState::new(&g, PaletteSpec::new(5).unwrap(), &ids, 42);
    let s2 = SimState::new(&g, PaletteSpec::new(5).unwrap(), &ids, 42);
    for u in 0..3 {
        assert_eq!(s1.candidate_colour(u), s2.candidate_colour(u));
    }
}

// ---------------------------------------------------------------------
// Stepping and certificates
// ---------------------------------------------------------------------

#[test]
fn forced_collision_leaves_state_unchanged_except_round() {
    let g = k2();
    let ids = by_index(&g);
    let state = SimState::new(&g, PaletteSpec::new(1).unwrap(), &ids, 3);
    let next = step(&g, &state, PriorityRule::Symmetric).unwrap();
    assert_eq!(next.round, 1);
    assert_eq!(next.assigned, state.assigned);
    assert_eq!(next.uncoloured, state.uncoloured);
}

#[test]
fn forced_collision_is_reported_as_locked_pair() {
    let g = k2();
    let ids = by_index(&g);
    let res = run(&g, PaletteSpec::new(1).unwrap(), PriorityRule::Symmetric, &ids, 3, 64).unwrap();
    match res.outcome {
        RunOutcome::NeverTerminates {
            certificate: Certificate::LockedPair { u, v, colour },
            ..
        } => {
            assert_eq!((u, v, colour), (0, 1, 0));
        }
        other => panic!("expected locked pair, got {other:?}"),
    }
}

#[test]
fn id_priority_forces_empty_palette_on_the_loser() {
    let g = k2();
    let ids = by_index(&g);
    let res = run(
        &g,
        PaletteSpec::new(1).unwrap(),
        PriorityRule::SmallerIdWins,
        &ids,
        3,
        64,
    )
    .unwrap();
    match res.outcome {
        RunOutcome::NeverTerminates {
            rounds_executed,
            certificate: Certificate::EmptyPalette { vertex },
        } => {
            assert_eq!(rounds_executed, 1);
            assert_eq!(vertex, 1);
            assert_eq!(res.final_state.assigned()[0], Some(0));
        }
        other => panic!("expected empty palette, got {other:?}"),
    }
}

#[test]
fn single_vertex_completes_in_one_round() {
    let g = HrgGraph::from_edge_list(1, &[]).unwrap();
    let ids = by_index(&g);
    let res = run(&g, PaletteSpec::new(1).unwrap(), PriorityRule::Symmetric, &ids, 0, 64).unwrap();
    assert_eq!(res.outcome, RunOutcome::Completed { rounds: 1 });
}

#[test]
fn empty_graph_completes_immediately() {
    let g = HrgGraph::from_edge_list(0, &[]).unwrap();
    let ids = by_index(&g);
    let res = run(&g, PaletteSpec::new(1).unwrap(), PriorityRule::Symmetric, &ids, 0, 8).unwrap();
    assert_eq!(res.outcome, RunOutcome::Completed { rounds: 0 });
}

#[test]
fn round_limit_is_distinct_from_never_terminates() {
    // On K3 with three colours no certificate can exist after one round, so
    // every run that does not finish at the limit must report RoundLimit.
    let g = k3();
    let ids = by_index(&g);
    let mut saw_limit = false;
    let mut saw_completed = false;
    for seed in 0..50 {
        let res = run(&g, PaletteSpec::new(3).unwrap(), PriorityRule::Symmetric, &ids, seed, 1)
            .unwrap();
        match res.outcome {
            RunOutcome::RoundLimit {
                rounds: 1,
                uncoloured,
            } => {
                assert!(uncoloured > 0);
                saw_limit = true;
            }
            RunOutcome::Completed { rounds: 1 } => saw_completed = true,
            other => panic!("unexpected outcome {other:?}"),
        }
    }
    assert!(saw_limit && saw_completed);
}

#[test]
fn coloured_set_grows_and_palettes_shrink() {
    let params = crate::hrg::HrgParams::new(120, 0.7, 0.0, 5).unwrap();
    let g = crate::hrg::generate(&params).unwrap();
    let k = (4 * g.max_degree().max(1)) as u32;
    let ids = by_index(&g);
    let mut state = SimState::new(&g, PaletteSpec::new(k).unwrap(), &ids, 17);
    for _ in 0..8 {
        if state.uncoloured.is_empty() {
            break;
        }
        let next = step(&g, &state, PriorityRule::Symmetric).unwrap();
        for u in 0..g.num_vertices() as VertexId {
            if state.assigned[u as usize].is_some() {
                assert_eq!(state.assigned[u as usize], next.assigned[u as usize]);
            }
            if next.assigned[u as usize].is_none() {
                assert!(next.palette_size(u) <= state.palette_size(u));
                // the deterministic slack law: X(u) >= k - deg(u)
                let deg = g.neighbours(u).len() as u32;
                assert!(next.palette_size(u) >= k - deg);
            }
        }
        state = next;
    }
}

#[test]
fn runs_are_deterministic() {
    let params = crate::hrg::HrgParams::new(200, 0.65, 0.0, 9).unwrap();
    let g = crate::hrg::generate(&params).unwrap();
    let k = PaletteSpec::new(g.max_degree() as u32 + 1).unwrap();
    let ids = assign_ids(&g, IdStrategy::RandomPermutation { seed: 4 }).unwrap();
    let a = run(&g, k, PriorityRule::LargerDegreeWins, &ids, 77, 64).unwrap();
    let b = run(&g, k, PriorityRule::LargerDegreeWins, &ids, 77, 64).unwrap();
    assert_eq!(a.outcome, b.outcome);
    assert_eq!(a.trace, b.trace);
    assert_eq!(a.final_state.assigned(), b.final_state.assigned());
}

// ---------------------------------------------------------------------
// Id assignment and colouring validation
// ---------------------------------------------------------------------

#[test]
fn by_index_is_identity() {
    let g = p3();
    assert_eq!(by_index(&g).ids(), &[0, 1, 2]);
}

#[test]
fn adversarial_star_gives_centre_the_largest_id() {
    let g = HrgGraph::from_edge_list(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]).unwrap();
    let ids = assign_ids(&g, IdStrategy::AdversarialLeafPriority { level: 0 }).unwrap();
    assert_eq!(ids.ids()[0], 5);
    assert_eq!(&ids.ids()[1..], &[0, 1, 2, 3, 4]);
}

#[test]
fn adversarial_fails_without_leafy_vertices() {
    let g = k3();
    assert_eq!(
        assign_ids(&g, IdStrategy::AdversarialLeafPriority { level: 0 }).unwrap_err(),
        SimError::NoEligibleTarget { level: 0 }
    );
}

#[test]
fn validate_colouring_finds_the_first_violation() {
    let g = p3();
    let proper = vec![Some(0), Some(1), Some(0)];
    let check = validate_colouring(&g, &proper);
    assert!(check.proper && check.total);

    let partial = vec![Some(0), None, Some(0)];
    let check = validate_colouring(&g, &partial);
    assert!(check.proper && !check.total);

    let bad = vec![Some(1), Some(1), Some(0)];
    let check = validate_colouring(&g, &bad);
    assert!(!check.proper);
    assert_eq!(check.first_violation, Some((0, 1)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn random_id_assignments_are_permutations(n in 1usize..200, seed in 0u64..1000) {
        let g = HrgGraph::from_edge_list(n, &[]).unwrap();
        let ids = assign_ids(&g, IdStrategy::RandomPermutation { seed }).unwrap();
        let mut sorted = ids.ids().to_vec();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (0..n as u32).collect::<Vec<_>>());
    }

    #[test]
    fn completed_runs_are_proper_total_colourings(seed in 0u64..300) {
        let params = crate::hrg::HrgParams::new(60, 0.7, 0.0, seed).unwrap();
        let g = crate::hrg::generate(&params).unwrap();
        let k = PaletteSpec::new(g.max_degree() as u32 + 1).unwrap();
        let ids = assign_ids(&g, IdStrategy::ByIndex).unwrap();
        let res = run(&g, k, PriorityRule::Symmetric, &ids, seed, 64).unwrap();
        if let RunOutcome::Completed { .. } = res.outcome {
            let check = validate_colouring(&g, res.final_state.assigned());
            prop_assert!(check.proper && check.total);
        }
    }
}
