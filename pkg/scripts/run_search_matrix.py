"""Exhaustive nonsingularity search over small set systems.

    python3 scripts/run_search_matrix.py --t 3 4 --k 1 2 --output results/matrix.jsonl
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
    ap.add_argument("--n-max", type=int, default=8)
    ap.add_argument("--C", type=float, default=1.0)
    ap.add_argument("--slack", type=int, default=0)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--checkpoint", default=None)
    ap.add_argument("--output", default="results/matrix.jsonl")
    a = ap.parse_args()

    cfg = ExperimentConfig(kind="matrix", t_values=a.t, k_values=a.k, n_max=a.n_max, C=a.C,
                           slack=a.slack, seed=a.seed, output=a.output)
    Path(a.output).parent.mkdir(parents=True, exist_ok=True)
    with RecordWriter(a.output, asdict(cfg), append=bool(a.checkpoint)) as w:
        recs, stats = run_search(cfg, w, a.checkpoint, a.threads)
    print(json.dumps(asdict(stats)))
    return 2 if stats.candidates else 0


if __name__ == "__main__":
    sys.exit(main())
