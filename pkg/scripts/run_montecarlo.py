"""Random-connectivity rates, the sampling ratio |A_J|/|A| and the sieve constant calibration."""

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from rsnwt.lab import MonteCarloConfig, RecordWriter, montecarlo_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=400)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--output", default="results/montecarlo.jsonl")
    a = ap.parse_args()

    cfg = MonteCarloConfig(trials=a.trials, seed=a.seed)
    rec = montecarlo_suite(cfg)
    Path(a.output).parent.mkdir(parents=True, exist_ok=True)
    with RecordWriter(a.output, asdict(cfg)) as w:
        w.write(rec)
    c = rec.certificates
    for cell in c["connectivity"]:
        print(f"t={cell['t']} K={cell['K']}: rate {cell['rate']:.3f} "
              f"(natural-log threshold {cell['rate_natural_log']:.3f}), floor {cell['floor']:.3f}")
    print(f"calc grid violations: {c['calc_violations']}")
    print(f"|A_J|/|A|: mean {c['ratio']['mean']:.3f}, 3-sigma lower bound {c['ratio']['lower_3sigma']:.3f}")
    print("calibration:", json.dumps(c["calibration"]["table"]), "threshold c =", c["calibration"]["threshold_c"])
    print("verdict:", rec.verdict)
    return 0 if rec.verdict == "PASS" else 1


if __name__ == "__main__":
    sys.exit(main())
