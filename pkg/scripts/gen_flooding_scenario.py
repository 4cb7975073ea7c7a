#!/usr/bin/env python3
"""Generate the flooding-20 fixture: 20 anchors on a random connected graph.

Each anchor adjacency gets its own two-attachment transit domain, so the
fixture exercises pure control-plane behavior (origination, flooding,
convergence) with no hosts and no data sessions.  Regenerate with:

    python3 scripts/gen_flooding_scenario.py > scenarios/flooding-20.json
"""

import json
import random

N_ANCHORS = 20
EXTRA_EDGES = 12
SEED = 2024


def main() -> None:
    rng = random.Random(SEED)
    names = [f"anchor-{i:02d}" for i in range(N_ANCHORS)]

    edges: set[tuple[str, str]] = set()
    # random spanning tree first, then extra chords
    shuffled = names[:]
    rng.shuffle(shuffled)
    for i in range(1, len(shuffled)):
        other = shuffled[rng.randrange(i)]
        edges.add(tuple(sorted((shuffled[i], other))))
    while len(edges) < N_ANCHORS - 1 + EXTRA_EDGES:
        a, b = rng.sample(names, 2)
        edges.add(tuple(sorted((a, b))))

    domains, links, ports, peers = [], [], {n: [] for n in names}, {n: [] for n in names}
    for idx, (a, b) in enumerate(sorted(edges)):
        dom = f"net-{idx:02d}"
        att_a, att_b = f"{dom}-x", f"{dom}-y"
        domains.append({"id": dom, "attachments": [att_a, att_b]})
        links.append(
            {
                "id": f"trunk-{idx:02d}",
                "domain": dom,
                "endpoints": [att_a, att_b],
                "capacity_mbps": rng.choice([40, 100, 400]),
                "latency_us": rng.randrange(100, 1000),
                "loss_prob": 0,
                "background_utilization": 0,
            }
        )
        ports[a].append({"domain": dom, "attachment": att_a})
        ports[b].append({"domain": dom, "attachment": att_b})
        peers[a].append({"anchor": b, "domain": dom})

    scenario = {
        "name": "flooding-20",
        "seed": 20,
        "mode": "l5-multipath",
        "horizon_us": 1000000,
        "domains": domains,
        "links": links,
        "anchors": [
            {"name": n, "ports": ports[n], "peers": peers[n]} for n in names
        ],
        "hosts": [],
        "policy": [{"tag": "ops", "weight": 1}],
        "events": [],
    }
    print(json.dumps(scenario, indent=2))


if __name__ == "__main__":
    main()
