use std::collections::VecDeque;

use ballistic_cluster::fusion::GateParams;
use ballistic_cluster::lattice::{build_instance, geometric_bonds, BondKind, Dims, LossSpec, PercolationGraph};
use ballistic_cluster::microcluster::{default_assignment, ArmAssignment};
use ballistic_cluster::percolation::spans;
use ballistic_cluster::rng::run_rng;
use proptest::prelude::*;

fn instance(d: Dims, p: f64, loss: LossSpec, a: &ArmAssignment, seed: u64, run: u64) -> PercolationGraph {
    build_instance(d, &GateParams::with_p(p), &loss, a, &mut run_rng(seed, run))
}

/// Plain BFS from the x = 0 face over live sites.
fn bfs_spans(g: &PercolationGraph) -> bool {
    let d = g.dims;
    if d.lx <= 1 {
        return true;
    }
    let n = d.sites();
    let mut adj = vec![Vec::new(); n];
    for b in &g.bonds {
        adj[b.a as usize].push(b.b as usize);
        adj[b.b as usize].push(b.a as usize);
    }
    let mut seen = vec![false; n];
    let mut q = VecDeque::new();
    for s in 0..n {
        if d.coord(s).x == 0 && g.is_live(s) {
            seen[s] = true;
            q.push_back(s);
        }
    }
    while let Some(s) = q.pop_front() {
        if d.coord(s).x == d.lx - 1 {
            return true;
        }
        for &t in &adj[s] {
            if !seen[t] {
                seen[t] = true;
                q.push_back(t);
            }
        }
    }
    false
}

#[test]
fn union_find_matches_bfs() {
    let a = default_assignment();
    let mut agree = [0usize; 2];
    for run in 0..1000u64 {
        let p = 0.55 + 0.2 * (run % 5) as f64 / 4.0;
        let loss = if run % 3 == 0 { LossSpec::unheralded(0.02) } else { LossSpec::none() };
        let g = instance(Dims::new(8, 6, 5), p, loss, &a, 11, run);
        let s = spans(&g);
        assert_eq!(s, bfs_spans(&g), "run {run}");
        agree[s as usize] += 1;
    }
    // both answers should actually occur
    assert!(agree[0] > 50 && agree[1] > 50, "{agree:?}");
}

#[test]
fn full_success_has_no_diagonals() {
    for a in ArmAssignment::all_pairings() {
        let d = Dims::new(5, 4, 3);
        let g = instance(d, 1.0, LossSpec::none(), &a, 1, 0);
        assert_eq!(g.count(BondKind::Diagonal), 0);
        assert_eq!(g.bonds.len(), geometric_bonds(d).len());
    }
}

#[test]
fn heralded_deletion_is_binomial() {
    // 10 x 10 x 10 sites, no gate failures, so only deletion removes sites
    let n = 1000.0;
    let mut total = 0.0;
    let reps = 20;
    for run in 0..reps {
        let g = instance(Dims::cube(10), 1.0, LossSpec::heralded(0.1), &default_assignment(), 5, run);
        let removed = (0..g.sites.len()).filter(|&s| !g.is_live(s)).count() as f64;
        assert!((removed - 100.0).abs() <= 4.0 * (n * 0.1 * 0.9f64).sqrt(), "removed {removed}");
        total += removed;
    }
    let mean = total / reps as f64;
    assert!((mean - 100.0).abs() <= 4.0 * (n * 0.09 / reps as f64).sqrt());
}

#[test]
fn heralded_extremes() {
    let d = Dims::cube(4);
    let a = default_assignment();
    let base = instance(d, 0.75, LossSpec::none(), &a, 2, 9);
    let same = instance(d, 0.75, LossSpec::heralded(0.0), &a, 2, 9);
    assert_eq!(base, same);
    let gone = instance(d, 0.75, LossSpec::heralded(1.0), &a, 2, 9);
    assert!(gone.bonds.is_empty());
    assert!((0..gone.sites.len()).all(|s| !gone.is_live(s)));
}

#[test]
fn coupled_bond_counts_track_p() {
    // Edges produced through relays can cancel in pairs, so single instances
    // may gain a bond as p drops. The coupled mean must still fall.
    let d = Dims::cube(6);
    let a = default_assignment();
    let grid = [0.5, 0.6, 0.7, 0.8, 0.9];
    let mut sums = [0usize; 5];
    let mut lattice_ok = true;
    for run in 0..200 {
        let counts: Vec<(usize, usize)> = grid
            .iter()
            .map(|&p| {
                let g = instance(d, p, LossSpec::none(), &a, 3, run);
                (g.bonds.len(), g.count(BondKind::Lattice))
            })
            .collect();
        for (i, c) in counts.iter().enumerate() {
            sums[i] += c.0;
        }
        lattice_ok &= counts.windows(2).all(|w| w[0].1 <= w[1].1);
    }
    assert!(sums.windows(2).all(|w| w[0] < w[1]), "{sums:?}");
    assert!(lattice_ok, "lattice bonds are not monotone under coupling");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn instances_are_reproducible_and_valid(
        lx in 1usize..6, ly in 1usize..5, lz in 1usize..5,
        p in 0.0f64..=1.0, p_loss in 0.0f64..0.2,
        heralded in any::<bool>(), pairing in 0usize..3,
        seed in any::<u64>(), run in 0u64..1000,
    ) {
        let d = Dims::new(lx, ly, lz);
        let loss = if heralded { LossSpec::heralded(p_loss) } else { LossSpec::unheralded(p_loss) };
        let a = ArmAssignment::all_pairings()[pairing];
        let g = instance(d, p, loss, &a, seed, run);
        prop_assert_eq!(&g, &instance(d, p, loss, &a, seed, run));
        prop_assert!(g.validate().is_ok(), "{:?}", g.validate());
        for b in &g.bonds {
            prop_assert!(g.is_live(b.a as usize) && g.is_live(b.b as usize));
        }
        prop_assert_eq!(spans(&g), bfs_spans(&g));
    }
}
