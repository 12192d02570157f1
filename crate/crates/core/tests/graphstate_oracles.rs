use ballistic_cluster::graphstate::{
    FusionBasis, FusionMode, FusionOutcome, GraphState, LocalClifford, Pauli,
};
use ballistic_cluster::oracle::CheckedState;
use proptest::prelude::*;

fn random_graph(n: u32, edge_bits: u64, tags: &[u8]) -> GraphState {
    let mut g = GraphState::new();
    for v in 0..n {
        g.add_vertex(v).unwrap();
    }
    let mut k = 0;
    for a in 0..n {
        for b in a + 1..n {
            if edge_bits >> (k % 64) & 1 == 1 {
                g.add_edge(a, b).unwrap();
            }
            k += 1;
        }
    }
    for v in 0..n {
        let c = LocalClifford::from_index(tags[v as usize] % 24).unwrap();
        g.set_vcop(v, c).unwrap();
    }
    g
}

fn axis(i: u8) -> Pauli {
    [Pauli::X, Pauli::Y, Pauli::Z][i as usize % 3]
}

proptest! {
    #[test]
    fn measurement_rules_match_tableau(
        n in 2u32..=10,
        edges in any::<u64>(),
        tags in proptest::collection::vec(any::<u8>(), 10),
        ops in proptest::collection::vec((any::<u8>(), any::<u8>()), 1..4),
    ) {
        let mut s = CheckedState::new(random_graph(n, edges, &tags)).unwrap();
        for (vi, ai) in ops {
            let vs: Vec<u32> = s.graph.vertices().collect();
            if vs.is_empty() { break; }
            let v = vs[vi as usize % vs.len()];
            s.measure_pauli(v, axis(ai)).unwrap();
            s.check().unwrap();
        }
    }

    #[test]
    fn local_complement_preserves_state(
        n in 2u32..=10,
        edges in any::<u64>(),
        tags in proptest::collection::vec(any::<u8>(), 10),
        v in any::<u32>(),
    ) {
        let mut s = CheckedState::new(random_graph(n, edges, &tags)).unwrap();
        let before = s.graph.edges();
        s.local_complement(v % n).unwrap();
        s.check().unwrap();
        s.local_complement(v % n).unwrap();
        prop_assert_eq!(s.graph.edges(), before);
    }

    #[test]
    fn fusion_rules_match_tableau(
        n in 4u32..=12,
        edges in any::<u64>(),
        tags in proptest::collection::vec(any::<u8>(), 12),
        pick in any::<(u32, u32)>(),
        success in any::<bool>(),
        rotated in any::<bool>(),
        fa in any::<(u8, u8)>(),
    ) {
        let g = random_graph(n, edges, &tags);
        let v1 = pick.0 % n;
        let v2 = pick.1 % n;
        prop_assume!(v1 != v2 && !g.has_edge(v1, v2));
        let mode = if rotated { FusionMode::Rotated } else { FusionMode::Standard };
        let basis = FusionBasis { mode, failure: (axis(fa.0), axis(fa.1)) };
        let outcome = if success { FusionOutcome::Success } else { FusionOutcome::Failure };
        let mut s = CheckedState::new(g).unwrap();
        s.fuse(v1, v2, outcome, basis).unwrap();
        s.check().unwrap();
    }

    #[test]
    fn z_cut_matches_tableau(
        n in 2u32..=10,
        edges in any::<u64>(),
        tags in proptest::collection::vec(any::<u8>(), 10),
        v in any::<u32>(),
    ) {
        let mut s = CheckedState::new(random_graph(n, edges, &tags)).unwrap();
        s.z_cut(v % n).unwrap();
        s.check().unwrap();
    }
}

mod support;
use support::dense::Dense;

fn path3() -> GraphState {
    let mut g = GraphState::new();
    for v in 0..3 {
        g.add_vertex(v).unwrap();
    }
    g.add_edge(0, 1).unwrap();
    g.add_edge(1, 2).unwrap();
    g
}

#[test]
fn ghz3_tableau_stabilizes_dense_ghz() {
    let g = GraphState::new_ghz(3).unwrap();
    let d = Dense::from_graph(&g);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    assert!((d.amp[0].re - s).abs() < 1e-12 && (d.amp[7].re - s).abs() < 1e-12);
    assert!(d.amp[1..7].iter().all(|a| a.norm() < 1e-12));
    let t = g.to_tableau().unwrap();
    for row in t.generators() {
        let ops: Vec<(u32, Pauli)> =
            t.qubits().iter().enumerate().map(|(i, &q)| (q, row.get(i))).collect();
        let sign = if row.neg { -1.0 } else { 1.0 };
        assert!((d.expectation(&ops) * sign - 1.0).abs() < 1e-12);
    }
}

#[test]
fn dense_agrees_with_tableau_on_random_tagged_graphs() {
    // Signs included: each generator must have expectation exactly +1.
    for seed in 0..40u64 {
        let n = 2 + (seed % 6) as u32;
        let tags: Vec<u8> = (0..10).map(|i| ((seed * 7 + i * 13) % 24) as u8).collect();
        let g = random_graph(n, seed.wrapping_mul(0x9e37_79b9_7f4a_7c15), &tags);
        let d = Dense::from_graph(&g);
        let t = g.to_tableau().unwrap();
        for row in t.generators() {
            let ops: Vec<(u32, Pauli)> =
                t.qubits().iter().enumerate().map(|(i, &q)| (q, row.get(i))).collect();
            let sign = if row.neg { -1.0 } else { 1.0 };
            assert!((d.expectation(&ops) * sign - 1.0).abs() < 1e-9, "seed {seed}");
        }
    }
}

#[test]
fn path_middle_x_and_y_leave_bell_pair() {
    for axis in [Pauli::X, Pauli::Y] {
        let mut d = Dense::from_graph(&path3());
        d.measure_and_remove(1, axis);
        assert!((d.purity(&[0]) - 0.5).abs() < 1e-9, "maximally entangled");

        let mut g = path3();
        g.measure_pauli(1, axis).unwrap();
        assert_eq!(g.edges(), vec![(0, 2)]);
        assert!(Dense::from_graph(&g).equal_up_to_local_pauli(&d));
    }
    let mut d = Dense::from_graph(&path3());
    d.measure_and_remove(1, Pauli::Z);
    assert!((d.purity(&[0]) - 1.0).abs() < 1e-9);
}

#[test]
fn rotated_failure_leaves_detached_pair() {
    // c = 0 with leaves 1, 2; side centre 10 with leaves 11, 12.
    let mut g = GraphState::ghz(&[0, 1, 2]).unwrap();
    g.absorb(GraphState::ghz(&[10, 11, 12]).unwrap()).unwrap();
    let mut d = Dense::from_graph(&g);
    d.measure_and_remove(1, Pauli::X);
    d.measure_and_remove(10, Pauli::X);
    assert!((d.purity(&[0, 2]) - 1.0).abs() < 1e-9);
    assert!((d.purity(&[11, 12]) - 1.0).abs() < 1e-9);
    assert!((d.purity(&[0]) - 0.5).abs() < 1e-9);
    assert!((d.purity(&[11]) - 0.5).abs() < 1e-9);

    g.fuse(1, 10, FusionOutcome::Failure, FusionBasis::rotated()).unwrap();
    assert_eq!(g.edges(), vec![(0, 2), (11, 12)]);
    assert!(Dense::from_graph(&g).equal_up_to_local_pauli(&d));
    assert_eq!(g.connected_component(0).unwrap().into_iter().collect::<Vec<_>>(), vec![0, 2]);
}

#[test]
fn star_building_success() {
    let mut g = GraphState::ghz(&[0, 1, 2]).unwrap();
    g.absorb(GraphState::ghz(&[10, 11, 12]).unwrap()).unwrap();
    let mut s = CheckedState::new(g).unwrap();
    s.fuse(1, 10, FusionOutcome::Success, FusionBasis::rotated()).unwrap();
    s.check().unwrap();
    assert_eq!(s.graph.edges(), vec![(0, 2), (0, 11), (0, 12)]);
}

#[test]
fn leaf_fusion_adds_exactly_one_edge() {
    for seed in 0..30u64 {
        let tags = [0u8; 12];
        let mut g = random_graph(5, seed.wrapping_mul(0x2545_f491_4f6c_dd1d), &tags);
        let other = random_graph(5, seed.wrapping_mul(0x9e37_79b9_7f4a_7c15), &tags);
        for v in other.vertices() {
            g.add_vertex(v + 50).unwrap();
        }
        for (a, b) in other.edges() {
            g.add_edge(a + 50, b + 50).unwrap();
        }
        g.add_vertex(100).unwrap();
        g.add_vertex(101).unwrap();
        g.add_edge(100, (seed % 5) as u32).unwrap();
        g.add_edge(101, 50 + (seed / 5 % 5) as u32).unwrap();
        let (n0, e0) = (g.vertex_count(), g.edges().len());
        let mut s = CheckedState::new(g).unwrap();
        s.fuse(100, 101, FusionOutcome::Success, FusionBasis::standard()).unwrap();
        s.check().unwrap();
        assert_eq!(s.graph.vertex_count(), n0 - 2);
        assert_eq!(s.graph.edges().len(), e0 - 1);
    }
}
