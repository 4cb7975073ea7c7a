"""End-to-end acceptance suite.

One test per numbered criterion, each enforcing its stated tolerance and
printing a PASS line (visible with ``pytest -v -s``).  Shipped fixtures run
once in a shared module fixture; re-runs and seed variations feed the
determinism checks.
"""

import random
import time
from fractions import Fraction

import pytest

from anchornet.allocator import Demand, DemandMatrix, water_fill
from anchornet.metrics import canonical_json, compare
from anchornet.pathfinder import k_disjoint_paths
from anchornet.scenario import MODE_BASELINE, load_scenario
from anchornet.simnet import run_scenario
from anchornet.topology import converge
from oracles import (
    bisect_water_fill,
    db_from_edges,
    flood_fixpoint,
    max_min_property_holds,
    random_connected_adjacency,
    random_fill_instance,
    reference_k_disjoint,
)
from scenario_builders import build, three_path_lossy


def _timed(config, **kw):
    start = time.perf_counter()
    report = run_scenario(config, **kw)
    return report, time.perf_counter() - start


@pytest.fixture(scope="module")
def runs(fixture_paths):
    configs = {name: load_scenario(str(path)) for name, path in fixture_paths.items()}
    lossy = build(three_path_lossy())
    data = {
        "dual-baseline": _timed(configs["dual-path"], mode=MODE_BASELINE),
        "dual-baseline-rerun": _timed(configs["dual-path"], mode=MODE_BASELINE),
        "dual-l5": _timed(configs["dual-path"]),
        "dual-l5-rerun": _timed(configs["dual-path"]),
        "dual-l5-seed": _timed(configs["dual-path"], seed=999),
        "pubsub-l5": _timed(configs["transatlantic-pubsub"]),
        "pubsub-l5-rerun": _timed(configs["transatlantic-pubsub"]),
        "pubsub-l5-seed": _timed(configs["transatlantic-pubsub"], seed=77),
        "pubsub-baseline": _timed(configs["transatlantic-pubsub"], mode=MODE_BASELINE),
        "weighted": _timed(configs["two-domains-weighted"]),
        "weighted-rerun": _timed(configs["two-domains-weighted"]),
        "weighted-seed": _timed(configs["two-domains-weighted"], seed=123),
        "flooding": _timed(configs["flooding-20"]),
        "flooding-rerun": _timed(configs["flooding-20"]),
        "flooding-seed": _timed(configs["flooding-20"], seed=21),
        "lossy": _timed(lossy),
        "lossy-rerun": _timed(lossy),
        "lossy-seed": _timed(build(three_path_lossy(seed=4))),
    }
    return data


def _ok(number, text):
    print(f"ACCEPTANCE {number}: PASS - {text}")


def test_criterion_1_quarter_throughput(runs):
    baseline, t_base = runs["dual-baseline"]
    l5, t_l5 = runs["dual-l5"]
    frac_base = baseline["summary"]["headline_fraction"]
    assert abs(frac_base - 0.25) <= 0.02, frac_base
    assert baseline["summary"]["potential_mbps"] == pytest.approx(200.0)
    frac_l5 = l5["summary"]["fraction_of_residual"]
    assert frac_l5 >= 0.95, frac_l5
    ratio = compare(baseline, l5)["throughput_ratio"]
    assert ratio >= 3.5, ratio
    assert t_base + t_l5 < 10.0
    _ok(1, f"baseline {frac_base:.4f} of 200 Mbps potential, "
           f"multipath {frac_l5:.4f} of residual, ratio {ratio:.2f}")


def test_criterion_2_water_filling_oracle():
    start = time.perf_counter()
    rng = random.Random(2026)
    for trial in range(500):
        caps, demands = random_fill_instance(rng)
        alloc = water_fill(
            {l: Fraction(c) for l, c in caps.items()},
            DemandMatrix(tuple(
                Demand(d["id"], d["weight"], d["links"], demand_cap_mbps=d["cap"])
                for d in demands
            )),
        )
        oracle = bisect_water_fill({l: float(c) for l, c in caps.items()}, demands)
        for d in demands:
            assert abs(alloc.rates_mbps[d["id"]] - oracle[d["id"]]) <= 1e-9, (trial, d["id"])
        assert max_min_property_holds(
            alloc.rates_mbps, {l: float(c) for l, c in caps.items()}, demands
        ), trial
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0
    _ok(2, f"500 instances match the bisection oracle within 1e-9 ({elapsed:.1f}s)")


def test_criterion_3_topology_convergence():
    start = time.perf_counter()
    rng = random.Random(3033)
    for trial in range(100):
        configs = random_connected_adjacency(rng, max_nodes=20)
        edges = sum(len(v) for v in configs.values()) // 2
        result = converge(configs)
        digests = {db.digest() for db in result.databases.values()}
        assert len(digests) == 1, trial
        expected = flood_fixpoint(configs)
        assert all(result.databases[n] == expected[n] for n in configs), trial
        for (origin, seq), count in result.transmissions.items():
            assert count <= 2 * edges, (trial, origin, seq, count)
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0
    _ok(3, f"100 random graphs converge byte-identically within 2x|edges| ({elapsed:.1f}s)")


def test_criterion_4_pathfinder_oracle():
    start = time.perf_counter()
    rng = random.Random(4044)
    for trial in range(200):
        n = rng.randint(2, 8)
        names = [f"n{i}" for i in range(n)]
        edges = {}
        for i in range(1, n):
            j = rng.randrange(i)
            edges[(names[j], names[i])] = (rng.randint(10, 100), rng.randint(1, 50))
        for _ in range(rng.randint(0, n)):
            u, v = rng.sample(names, 2)
            edges.setdefault((min(u, v), max(u, v)), (rng.randint(10, 100), rng.randint(1, 50)))
        db = db_from_edges(edges)
        graph = {name: [] for name in names}
        for (u, v), (cap, lat) in edges.items():
            graph[u].append((v, lat))
            graph[v].append((u, lat))
        src, dst = rng.sample(names, 2)
        k = rng.randint(1, 4)
        got = [(p.metric_us, p.hops) for p in k_disjoint_paths(db, src, dst, k)]
        assert got == reference_k_disjoint(graph, set(names), src, dst, k), trial
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0
    _ok(4, f"200 random graphs match the exhaustive enumeration oracle ({elapsed:.1f}s)")


def test_criterion_5_reliable_delivery(runs):
    report, elapsed = runs["lossy"]
    session = report["sessions"]["bulk"]
    assert session["status"] == "complete"
    assert session["bytes_total"] == 1048576
    assert session["delivered_sha256"] == session["source_sha256"]
    retransmits = 0
    for pid, row in session["per_path"].items():
        assert row["measured_mbps"] <= row["rate_mbps"] * 1.01, (pid, row)
        retransmits += row["retransmitted_segments"]
    assert retransmits > 0, "10% loss must force at least one retransmission"
    assert elapsed < 10.0
    _ok(5, f"1 MiB over 3 lossy paths delivered byte-exact, "
           f"{retransmits} retransmissions, rate compliant ({elapsed:.1f}s)")


def test_criterion_6_pubsub_crossing_savings(runs):
    l5, t_l5 = runs["pubsub-l5"]
    baseline, t_base = runs["pubsub-baseline"]
    tree = l5["pubsub"]["pub1"]
    segments = tree["segments_total"]
    assert segments == 32
    assert l5["links"]["atlantic-cable"]["data_original"] == segments
    assert baseline["links"]["atlantic-cable"]["data_original"] == 3 * segments
    for name, sub in tree["subscribers"].items():
        assert sub["delivered_sha256"] == tree["source_sha256"], name
    assert len(tree["subscribers"]) == 3
    assert t_l5 + t_base < 10.0
    _ok(6, f"costly link crossed {segments}x for {segments} segments (3x{segments} unicast), "
           f"all subscriber streams hash-equal")


def test_criterion_7_weighted_domain_shares(runs):
    report, elapsed = runs["weighted"]
    shares = report["allocation"]["domain_shares_mbps"]
    ratio = shares["cms"] / shares["atlas"]
    assert abs(ratio - 2.0) <= 0.01, shares
    assert elapsed < 10.0
    _ok(7, f"domain shares atlas={shares['atlas']:.2f} cms={shares['cms']:.2f}, ratio {ratio:.3f}")


def test_criterion_8_l3_compatibility_and_causality(runs):
    checked = 0
    for name, (report, _) in runs.items():
        assert report["faults"]["l3_dest_violations"] == 0, name
        assert report["faults"]["causality_violations"] == 0, name
        checked += 1
    _ok(8, f"zero next-hop addressing violations and zero causality faults across {checked} runs")


def test_criterion_9_determinism(runs):
    pairs = [
        ("dual-baseline", "dual-baseline-rerun"),
        ("dual-l5", "dual-l5-rerun"),
        ("pubsub-l5", "pubsub-l5-rerun"),
        ("weighted", "weighted-rerun"),
        ("flooding", "flooding-rerun"),
        ("lossy", "lossy-rerun"),
    ]
    for a, b in pairs:
        assert canonical_json(runs[a][0]) == canonical_json(runs[b][0]), (a, b)

    seed_variants = [
        ("dual-l5", "dual-l5-seed"),
        ("pubsub-l5", "pubsub-l5-seed"),
        ("weighted", "weighted-seed"),
        ("flooding", "flooding-seed"),
        ("lossy", "lossy-seed"),
    ]
    for a, b in seed_variants:
        ra, rb = runs[a][0], runs[b][0]
        assert ra["allocation"]["final_rates_mbps"] == rb["allocation"]["final_rates_mbps"], a
        for sid in ra["sessions"]:
            assert ra["sessions"][sid]["paths"] == rb["sessions"][sid]["paths"], (a, sid)
        for pid in ra["pubsub"]:
            assert ra["pubsub"][pid]["tree_edges"] == rb["pubsub"][pid]["tree_edges"], (a, pid)

    drops = lambda r: sum(row["dropped"] for row in r["links"].values())
    assert drops(runs["lossy"][0]) != drops(runs["lossy-seed"][0])
    _ok(9, "same seed reproduces byte-identical reports; seed changes touch only "
           "stochastic quantities")
