from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from meshplace.geocluster import Partition, kmeans, project
from meshplace.placement import (
    Placement,
    basp,
    find_cluster_heads,
    objective,
    per_cluster_means,
    recompute_clusters,
)
from meshplace.baselines import brute_force_optimal
from conftest import make_graph, random_graph
from oracles import all_pairs_oracle, best_assignment_oracle, placement_objective_oracle

FLOAT_SLACK = 1e-6  # absorbs summation-order noise only; dominance is exact in reals


def trivial_partition(g, labels, k):
    pts = project(g.latlon())
    centroids = [pts[[i for i, c in enumerate(labels) if c == ci]].mean(axis=0) for ci in range(k)]
    return Partition(
        k=k,
        labels=tuple(labels),
        centroids=tuple(tuple(c) for c in centroids),
        wcss=0.0,
        n_iter=1,
    )


def test_objective_every_node_its_own_head():
    g = random_graph(0, n=5)
    p = Placement(heads=tuple(range(5)), assignment=tuple(range(5)))
    assert objective(g, p) == 0.0


def test_objective_two_node(two_node):
    p = Placement(heads=(0,), assignment=(0, 0))
    assert objective(two_node, p) == 10.0


def test_objective_matches_oracle_matrix():
    for seed in range(6):
        g = random_graph(seed, n=6)
        oracle = all_pairs_oracle(g)
        rng = np.random.default_rng(seed)
        heads = sorted(int(h) for h in rng.choice(6, size=2, replace=False))
        assignment = [int(rng.integers(0, 2)) for _ in range(6)]
        for idx, h in enumerate(heads):
            assignment[h] = idx
        p = Placement(heads=tuple(heads), assignment=tuple(assignment))
        expected = placement_objective_oracle(oracle, heads, assignment)
        assert objective(g, p) == pytest.approx(expected, abs=1e-9)


def test_objective_rejects_head_outside_own_cluster(two_node):
    p = Placement(heads=(0, 1), assignment=(1, 1))
    with pytest.raises(ValueError, match="own cluster"):
        objective(two_node, p)


def test_objective_rejects_duplicate_heads(two_node):
    p = Placement(heads=(0, 0), assignment=(0, 0))
    with pytest.raises(ValueError, match="distinct"):
        objective(two_node, p)


def test_find_heads_singleton_cluster():
    g = random_graph(3, n=4)
    part = trivial_partition(g, [0, 1, 1, 1], 2)
    heads = find_cluster_heads(g, part)
    assert heads[0] == 0


def test_find_heads_star_hub_wins(star):
    # hand enumeration: hub reaches all three spokes at 10 (sum 30);
    # spokes reach hub at 10 and the other spokes at bottleneck 10 via the
    # hub (sum 30)... so force asymmetry by weakening one spoke uplink
    g = star
    part = trivial_partition(g, [0, 0, 0, 0], 1)
    # symmetric star: all candidates sum to 30, tie -> lowest id, the hub
    assert find_cluster_heads(g, part) == [0]


def test_find_heads_star_weak_uplink():
    # spoke 1's uplink is weak: candidates 1..3 lose on the hand enumeration
    edges = [(0, 1, 10.0), (1, 0, 2.0), (0, 2, 10.0), (2, 0, 10.0), (0, 3, 10.0), (3, 0, 10.0)]
    g = make_graph(4, edges)
    part = trivial_partition(g, [0, 0, 0, 0], 1)
    # by oracle sums: head 0 -> 30; head 1 -> 2+2+2=6; head 2 -> 10+10+10 = 30 tie with 0
    heads = find_cluster_heads(g, part)
    assert heads == [0]


def test_find_heads_zero_outgoing_never_selected():
    # node 1 has no outgoing links; node 0 reaches 1
    g = make_graph(2, [(0, 1, 4.0)])
    part = trivial_partition(g, [0, 0], 1)
    assert find_cluster_heads(g, part) == [0]


def test_find_heads_tie_breaks_lowest_id(triangle):
    part = trivial_partition(triangle, [0, 0, 0], 1)
    assert find_cluster_heads(triangle, part) == [0]


def test_find_heads_rejects_empty_cluster():
    g = random_graph(1, n=4)
    part = trivial_partition(g, [0, 0, 0, 0], 1)
    bad = Partition(k=2, labels=part.labels, centroids=(part.centroids[0], (0.0, 0.0)), wcss=0.0, n_iter=1)
    with pytest.raises(ValueError, match="empty"):
        find_cluster_heads(g, bad)


def test_recompute_single_head_collects_all():
    g = random_graph(2, n=6)
    p = recompute_clusters(g, [3])
    assert p.heads == (3,)
    assert set(p.assignment) == {0}


def test_recompute_unreachable_goes_to_first_head():
    g = make_graph(4, [(1, 0, 5.0), (2, 0, 5.0)])  # node 3 isolated
    p = recompute_clusters(g, [1, 2])
    assert p.assignment[3] == 0
    # node 0 ties at 5.0 between both heads and lands on head index 0
    assert p.assignment[0] == 0
    assert objective(g, p) == 5.0


def test_recompute_rejects_duplicates(two_node):
    with pytest.raises(ValueError, match="duplicate"):
        recompute_clusters(two_node, [0, 0])
    with pytest.raises(ValueError, match="non-empty"):
        recompute_clusters(two_node, [])


def test_recompute_beats_every_assignment_exhaustively():
    for seed in range(5):
        g = random_graph(seed + 10, n=6)
        oracle = all_pairs_oracle(g)
        heads = [0, 3]
        p = recompute_clusters(g, heads)
        best = best_assignment_oracle(oracle, heads, g.n)
        assert objective(g, p) == pytest.approx(best, abs=1e-9)


def test_phase2_dominates_any_head_choice():
    # with the partition fixed, swapping any cluster's head never helps
    for seed in range(4):
        g = random_graph(seed + 20, n=9)
        part = kmeans(project(g.latlon()), 3, seed=seed)
        heads = find_cluster_heads(g, part)
        base = objective(g, Placement(heads=tuple(heads), assignment=part.labels))
        clusters = [part.members(c) for c in range(3)]
        for ci, members in enumerate(clusters):
            for alt in members:
                trial = list(heads)
                trial[ci] = alt
                obj = objective(g, Placement(heads=tuple(trial), assignment=part.labels))
                assert obj <= base + FLOAT_SLACK


def test_phase3_never_decreases_objective():
    for seed in range(6):
        g = random_graph(seed + 30, n=10)
        part = kmeans(project(g.latlon()), 3, seed=seed)
        heads = find_cluster_heads(g, part)
        before = objective(g, Placement(heads=tuple(heads), assignment=part.labels))
        after = objective(g, recompute_clusters(g, heads))
        assert after >= before - FLOAT_SLACK


def test_basp_k1_is_seed_invariant():
    g = random_graph(40, n=8)
    a = basp(g, 1, seed=1, repetitions=3)
    b = basp(g, 1, seed=999, repetitions=5)
    assert a.placement == b.placement
    # the single head maximizes total bandwidth to all others
    m = g.bandwidth_matrix.copy()
    np.fill_diagonal(m, 0.0)
    assert a.placement.heads[0] == int(np.argmax(m.sum(axis=1)))


def test_basp_bounded_by_brute_force():
    for seed in range(4):
        g = random_graph(seed + 50, n=10)
        for k in (1, 2, 3):
            heuristic = basp(g, k, seed=seed, repetitions=5)
            exact = brute_force_optimal(g, k)
            assert heuristic.objective <= exact.objective + FLOAT_SLACK


def test_basp_report_integrity():
    g = random_graph(60, n=12)
    report = basp(g, 3, seed=5, repetitions=6)
    assert report.objective == objective(g, report.placement)
    assert report.mean_bw_to_head == pytest.approx(report.objective / (g.n - 3))
    # per-cluster means recombine to the overall mean, weighted by non-head counts
    sizes = [len(c) - 1 for c in report.placement.clusters()]
    recombined = sum(m * s for m, s in zip(report.per_cluster_mean, sizes)) / sum(sizes)
    assert recombined == pytest.approx(report.mean_bw_to_head, abs=1e-9)
    assert report.extras["rep_objectives"][report.extras["best_repetition"]] == max(
        report.extras["rep_objectives"]
    )


def test_basp_deterministic_per_seed():
    g = random_graph(70, n=14)
    a = basp(g, 4, seed=123, repetitions=8)
    b = basp(g, 4, seed=123, repetitions=8)
    assert a.placement == b.placement
    assert a.objective == b.objective
    assert a.extras["rep_objectives"] == b.extras["rep_objectives"]


def test_basp_argument_errors():
    g = random_graph(80, n=5)
    with pytest.raises(ValueError):
        basp(g, 0, seed=1)
    with pytest.raises(ValueError):
        basp(g, 6, seed=1)
    with pytest.raises(ValueError):
        basp(g, 2, seed=1, repetitions=0)


def test_mean_bw_zero_when_all_heads():
    g = random_graph(90, n=4)
    report = basp(g, 4, seed=0, repetitions=2)
    assert report.objective == 0.0
    assert report.mean_bw_to_head == 0.0
    assert all(m == 0.0 for m in report.per_cluster_mean)
    assert per_cluster_means(g, report.placement) == report.per_cluster_mean
