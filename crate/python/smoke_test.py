"""Smoke test for the ballistic_cluster extension module.

Build the extension first (see README), then run:  python python/smoke_test.py
"""

import ballistic_cluster as bc


def graph_ops():
    g = bc.GraphState.ghz([0, 1, 2])
    assert len(g.vertices()) == 3
    # GHZ as a star; local complement on the centre makes a triangle
    g.local_complement(0)
    assert len(g.edges()) == 3
    g = bc.GraphState.ghz([0, 1, 2])
    h = bc.GraphState.ghz([10, 11, 12])
    text = g.to_text()
    assert bc.GraphState.from_text(text).edges() == g.edges()
    joined = bc.GraphState.from_text(text + "\n" + h.to_text())
    joined.fuse(2, 10, True)
    assert len(joined.components()) == 1, joined.components()
    print("graph:", joined, joined.edges())


def lattice():
    inst = bc.build_lattice((3, 3, 3), 1.0, seed=7)
    assert inst["spans"] and len(inst["live"]) == 27
    empty = bc.build_lattice((3, 3, 3), 0.0, seed=7)
    assert not empty["spans"]


def estimates():
    s = bc.estimate_pi((6, 6, 6), 1.0, 50, seed=1)
    assert s["n_spanning"] == 50, s
    s = bc.estimate_pi((6, 6, 6), 0.0, 50, seed=1)
    assert s["n_spanning"] == 0, s
    lo = bc.loss_sweep(6, 0.75, [0.0, 0.1, 0.3], 100, seed=2, mode="heralded")
    pis = [pt["stats"]["pi_hat"] for pt in lo["points"]]
    assert pis[0] >= pis[-1], pis
    print("heralded pi:", pis)


def resources():
    r = bc.lattice_resources(10, 4, 6)
    print("resources:", r)
    assert bc.bell_pairs_per_ghz(3) == 42
    assert bc.bell_pairs_per_ghz(4) == 153
    reports = bc.oracle_check(50, 3)
    assert all(not r["failures"] for r in reports), reports


if __name__ == "__main__":
    graph_ops()
    lattice()
    estimates()
    resources()
    print("smoke test ok")
