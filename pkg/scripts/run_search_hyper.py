"""Search small weakly partition-connected hypergraphs for one with no
k-distinguishable tree-assignment subgraph.

    python3 scripts/run_search_hyper.py --t 3 4 --k 1 2 --max-edges 6
"""

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from rsnwt.lab import ExperimentConfig, RecordWriter, run_search


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--t", type=int, nargs="+", default=[3, 4])
    ap.add_argument("--k", type=int, nargs="+", default=[1, 2])
    ap.add_argument("--C", type=float, default=1.0)
    ap.add_argument("--max-edges", type=int, default=6)
    ap.add_argument("--max-edge-size", type=int, default=4)
    ap.add_argument("--slack", type=int, default=0)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--checkpoint", default=None)
    ap.add_argument("--output", default="results/hyper.jsonl")
    a = ap.parse_args()

    cfg = ExperimentConfig(kind="hyper", t_values=a.t, k_values=a.k, C=a.C, max_edges=a.max_edges,
                           max_edge_size=a.max_edge_size, slack=a.slack, seed=a.seed, output=a.output)
    Path(a.output).parent.mkdir(parents=True, exist_ok=True)
    with RecordWriter(a.output, asdict(cfg), append=bool(a.checkpoint)) as w:
        recs, stats = run_search(cfg, w, a.checkpoint, a.threads)
    routes = {}
    for r in recs:
        key = r.certificates.get("route", r.verdict)
        routes[key] = routes.get(key, 0) + 1
    print(json.dumps({**asdict(stats), "routes": routes}))
    return 2 if stats.candidates else 0


if __name__ == "__main__":
    sys.exit(main())
