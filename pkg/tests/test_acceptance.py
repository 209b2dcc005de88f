"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with ``pytest tests/test_acceptance.py -s``).

Tolerances are pinned here and nowhere else. Criteria that are theorems
of the construction get a 1e-6 absolute slack that covers float summation
order only.
"""

from __future__ import annotations

import json
import math
import os
import time

import numpy as np
import pytest
from scipy import stats as scipy_stats

from meshplace.baselines import (
    OracleBudget,
    brute_force_optimal,
    naive_placement_from_partition,
    random_placement,
    stirling2,
)
from meshplace.cli import main
from meshplace.geocluster import kmeans, project
from meshplace.harness import ExperimentSpec, run_experiment
from meshplace.netgraph import all_pairs_bandwidth, load_graph_json
from meshplace.netstats import link_asymmetry
from meshplace.placement import basp, find_cluster_heads, objective, recompute_clusters
from meshplace.synthgen import TopologyProfile, generate
from conftest import random_graph
from oracles import all_pairs_oracle, best_full_partition_oracle, count_partitions

FLOAT_SLACK = 1e-6  # summation-order noise only; the inequalities are exact in reals

SNAPSHOT_ENV = "MESHPLACE_SNAPSHOT"


def _report(criterion: str, detail: str) -> None:
    print(f"ACCEPTANCE {criterion}: PASS ({detail})")


class _Gate:
    """Prints the criterion's pass/fail line even when an assert trips."""

    def __init__(self, criterion: str, detail: str = ""):
        self.criterion = criterion
        self.detail = detail

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is None:
            _report(self.criterion, self.detail)
        else:
            print(f"ACCEPTANCE {self.criterion}: FAIL ({exc})")
        return False


def test_criterion_1_widest_path_oracle_equivalence():
    gate = _Gate("1 widest-path oracle equivalence")
    with gate:
        t0 = time.perf_counter()
        rng = np.random.default_rng(20_260_811)
        checked = 0
        for _ in range(200):
            n = int(rng.integers(2, 9))
            g = random_graph(int(rng.integers(0, 2**31)), n=n, p=0.35)
            assert np.array_equal(all_pairs_bandwidth(g), all_pairs_oracle(g))
            checked += 1
        elapsed = time.perf_counter() - t0
        assert elapsed < 60.0, f"oracle sweep took {elapsed:.1f}s"
        gate.detail = f"{checked} graphs exact in {elapsed:.1f}s"


def test_criterion_2_phase_dominance():
    gate = _Gate("2 phase dominance")
    with gate:
        rng = np.random.default_rng(2)
        holds = 0
        for case in range(100):
            n = int(rng.integers(10, 55))
            k = int(rng.integers(1, 8))
            g = generate(TopologyProfile(n=n, seed=case, target_mean_degree=4.0))
            part = kmeans(project(g.latlon()), k, seed=case)
            naive_obj = objective(g, naive_placement_from_partition(g, part))
            heads = find_cluster_heads(g, part)
            aware_obj = objective(g, recompute_clusters(g, heads))
            assert aware_obj >= naive_obj - FLOAT_SLACK, (case, n, k, aware_obj, naive_obj)
            holds += 1
        gate.detail = f"{holds}/100 shared-partition cases"


def test_criterion_3_oracle_bound_and_partition_equality():
    gate = _Gate("3 oracle bound + partition-oracle equality")
    with gate:
        rng = np.random.default_rng(3)
        for case in range(50):
            n = int(rng.integers(5, 13))
            k = int(rng.integers(1, 4))
            g = generate(TopologyProfile(n=n, seed=1000 + case, target_mean_degree=3.0))
            exact = brute_force_optimal(g, k).objective
            heuristic = basp(g, k, seed=case, repetitions=5).objective
            worst_random = min(
                random_placement(g, k, seed=s).objective for s in range(10)
            )
            assert exact >= heuristic - FLOAT_SLACK, (case, n, k)
            assert heuristic >= worst_random - FLOAT_SLACK, (case, n, k)
        for case in range(20):
            n = int(rng.integers(4, 9))
            k = min(int(rng.integers(1, 3)), n)
            g = generate(TopologyProfile(n=n, seed=2000 + case, target_mean_degree=3.0))
            head_set = brute_force_optimal(g, k).objective
            full = best_full_partition_oracle(all_pairs_oracle(g), g.n, k)
            assert head_set == pytest.approx(full, abs=1e-9), (case, n, k)
        gate.detail = "50 bound cases, 20 exact partition-oracle matches"


def test_criterion_4_stirling_correctness():
    gate = _Gate("4 Stirling correctness")
    with gate:
        for n in range(0, 11):
            for k in range(0, n + 1):
                assert stirling2(n, k) == count_partitions(n, k), (n, k)
        assert math.comb(54, 3) == 24_804
        assert 24_804 <= OracleBudget().max_combinations
        gate.detail = "all S(n,k) for n<=10 exact; C(54,3)=24,804 within default budget"


def test_criterion_5_generator_calibration():
    gate = _Gate("5 generator calibration")
    with gate:
        bw_all: list[float] = []
        uni = bidi = 0
        ks_passes = 0
        for seed in range(100):
            g = generate(TopologyProfile(n=54, seed=seed))
            bws = [link.bandwidth for link in g.links]
            bw_all.extend(bws)
            pair_stats = link_asymmetry(g, 0.3)
            uni += pair_stats.unidirectional_pairs
            bidi += pair_stats.bidirectional_pairs
            p_value = scipy_stats.kstest(bws, "expon", args=(0, 21.8)).pvalue
            ks_passes += p_value > 0.01
        mean_bw = float(np.mean(bw_all))
        share = uni / (uni + bidi)
        assert abs(mean_bw - 21.8) / 21.8 < 0.05, mean_bw
        assert abs(share - 0.56) <= 0.03, share
        assert ks_passes >= 95, ks_passes
        gate.detail = (
            f"mean {mean_bw:.2f} Mbps, unidirectional share {share:.3f}, KS {ks_passes}/100"
        )


def test_criterion_6_statistical_gain_and_trend():
    gate = _Gate("6 statistical gain + trend")
    with gate:
        ks = (2, 3, 5)
        gains: list[float] = []
        gap_by_k: dict[int, list[float]] = {k: [] for k in ks}
        for inst in range(30):
            spec = ExperimentSpec(
                ks=ks,
                strategies=("basp", "naive", "random"),
                runs=2,
                repetitions=15,
                base_seed=1000 + inst,
                profile=TopologyProfile(n=54, seed=inst),
            )
            table = run_experiment(spec)
            for k in ks:
                aware = table.cell("basp", k).bw_mean
                rand = table.cell("random", k).bw_mean
                naive = table.cell("naive", k).bw_mean
                gains.append(100.0 * (aware - rand) / rand)
                gap_by_k[k].append(aware - naive)
        rng = np.random.default_rng(0)
        sample = np.asarray(gains)
        boots = np.array(
            [rng.choice(sample, size=sample.size, replace=True).mean() for _ in range(10_000)]
        )
        lo, hi = np.percentile(boots, [2.5, 97.5])
        assert lo > 0.0, f"95% bootstrap CI [{lo:.1f}, {hi:.1f}] does not exclude 0"
        mean_gap = [float(np.mean(gap_by_k[k])) for k in ks]
        assert all(
            a <= b + FLOAT_SLACK for a, b in zip(mean_gap, mean_gap[1:])
        ), f"gap-vs-naive curve not non-decreasing: {dict(zip(ks, mean_gap))}"
        gate.detail = (
            f"mean gain over random {sample.mean():.1f}% CI [{lo:.1f}, {hi:.1f}] "
            f"(reference point: 35%); gap curve {[round(v, 2) for v in mean_gap]} Mbps"
        )


def test_criterion_7_runtime_envelope():
    gate = _Gate("7 runtime envelope")
    with gate:
        g = generate(TopologyProfile(n=54, seed=77))
        report = basp(g, 3, seed=0, repetitions=15)
        assert report.runtime < 5.0, f"basp took {report.runtime:.2f}s"
        exact = brute_force_optimal(g, 3, OracleBudget(max_seconds=600.0))
        assert exact.runtime < 600.0, f"brute force took {exact.runtime:.1f}s"
        assert report.objective <= exact.objective + FLOAT_SLACK
        gate.detail = (
            f"basp 15 reps {report.runtime * 1e3:.0f} ms, "
            f"brute force C(54,3) {exact.runtime:.2f} s"
        )


def test_criterion_8_cli_determinism(tmp_path):
    gate = _Gate("8 CLI determinism")
    with gate:
        graph = tmp_path / "g.json"
        assert main(["gen", "--n", "30", "--seed", "5", "-o", str(graph)]) == 0

        def run_twice(name: str, argv: list[str]) -> None:
            a, b = tmp_path / f"{name}_a.out", tmp_path / f"{name}_b.out"
            assert main(argv + ["-o", str(a)]) == 0
            assert main(argv + ["-o", str(b)]) == 0
            assert a.read_bytes() == b.read_bytes(), f"{name} outputs differ"

        run_twice("gen", ["gen", "--n", "30", "--seed", "5"])
        run_twice("place", ["place", str(graph), "--algo", "basp", "--k", "3",
                            "--seed", "2", "--reps", "5"])
        run_twice("compare", ["compare", str(graph), "--k", "1,2,3",
                              "--strategies", "basp,naive,random", "--runs", "2",
                              "--reps", "3", "--seed", "9", "--format", "json"])
        run_twice("stats", ["stats", str(graph), "--metric", "ecdf", "--field", "bw"])
        # validate writes no file; its stdout must still be stable
        import contextlib
        import io

        outs = []
        for _ in range(2):
            buf = io.StringIO()
            with contextlib.redirect_stdout(buf):
                assert main(["validate", str(graph)]) == 0
            outs.append(buf.getvalue())
        assert outs[0] == outs[1]
        gate.detail = "gen/place/compare/stats byte-identical; validate output stable"


@pytest.mark.skipif(
    not os.environ.get(SNAPSHOT_ENV),
    reason=f"set {SNAPSHOT_ENV} to a canonical graph JSON of a measured mesh snapshot",
)
def test_criterion_9_measured_snapshot_reproduction():
    # Table-1 reference: mean bandwidth to heads for k = 1/2/3/5, +-15%
    reference = {1: 16.9, 2: 27.7, 3: 32.9, 5: 38.5}
    gate = _Gate("9 measured-snapshot reproduction")
    with gate:
        g = load_graph_json(os.environ[SNAPSHOT_ENV])
        spec = ExperimentSpec(
            ks=tuple(reference),
            strategies=("basp",),
            runs=5,
            repetitions=15,
            base_seed=0,
            graph=g,
        )
        table = run_experiment(spec)
        observed = {}
        for k, expected in reference.items():
            got = table.cell("basp", k).bw_mean
            observed[k] = got
            assert got == pytest.approx(expected, rel=0.15), (k, got, expected)
        gate.detail = f"bw means {observed}"
