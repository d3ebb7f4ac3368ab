"""Command-line entry point.

Exit codes: 0 success, 2 counterexample candidate found, 3 budget exhausted,
4 input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

from .. import codes, graphs, hypergraphs, intmat, sieve
from ..errors import BudgetExhausted, InputError, RsnwtError, TooLarge, VersionMismatch
from ..fields import FieldSpec
from . import montecarlo, search
from .records import CANDIDATE, RecordWriter

EXIT_OK, EXIT_CANDIDATE, EXIT_BUDGET, EXIT_INPUT = 0, 2, 3, 4


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.replace(" ", "").split(",") if x]


def _load(path: str):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _default(o):
    if isinstance(o, (set, frozenset, tuple)):
        return sorted(o) if isinstance(o, (set, frozenset)) else list(o)
    if hasattr(o, "to_json"):
        return o.to_json()
    return str(o)


# ------------------------------------------------------------ handlers
# Each returns (payload, exit_code).

def cmd_treepack(a):
    g = graphs.MultiGraph.from_json(_load(a.graph))
    tp = graphs.tree_packing(g, a.k)
    return {"k": a.k, "packing": None if tp is None else [sorted(t) for t in tp.trees]}, EXIT_OK


def cmd_partconn(a):
    g = graphs.MultiGraph.from_json(_load(a.graph))
    return {"k": a.k, "partition_connected": graphs.is_partition_connected(g, a.k)}, EXIT_OK


def cmd_hyper(a):
    if a.action == "disting":
        g = graphs.MultiGraph.from_json(_load(a.file))
        ok, d = hypergraphs.is_k_distinguishable(g, a.k, a.budget)
        out = {"distinguishable": ok}
        if d is not None:
            out["trees"] = [sorted(t) for t in d.trees]
            out["signature"] = {str(k): v for k, v in hypergraphs.signature_of(g, d).items()}
        return out, EXIT_OK
    h = hypergraphs.Hypergraph.from_json(_load(a.file))
    if a.action == "conn":
        return {"weak_partition_connectivity": hypergraphs.weak_partition_connectivity(h),
                "ratio": str(hypergraphs.partition_ratio(h))}, EXIT_OK
    trees_only = not a.all_edges
    out = [g.to_json() for g in hypergraphs.tree_assignments(h, trees_only, a.budget)]
    return {"count": len(out), "assignments": out}, EXIT_OK


def cmd_intmat(a):
    s = intmat.SetSystem.from_json(_load(a.system))
    J = _ints(a.J) if a.J else None
    if a.action == "build":
        m = intmat.build(s, J, a.k)
        return {"shape": list(m.shape), "rows": m.symbolic(a.layout)}, EXIT_OK
    if a.action == "check":
        m = intmat.build(s, J, a.k)
        v = intmat.nonsingular_randomized(m, FieldSpec(a.p), a.trials, a.seed)
        if v:
            return {"verdict": "Nonsingular", "p": v.p, "alpha": list(v.alpha)}, EXIT_OK
        return {"verdict": "ProbablySingular", "confidence": v.confidence, "degree": v.degree}, EXIT_OK
    cert = intmat.certify_nonsingular_treepack(s, J, a.k)
    if cert is None:
        return {"certificate": None}, EXIT_OK
    return {"monomial": cert.monomial_str(), "trees": [sorted(t) for t in cert.packing.trees],
            "graph": cert.graph.to_json(), "block_dets": list(cert.block_dets)}, EXIT_OK


def cmd_sieve(a):
    if a.action == "replay":
        trace = sieve.SieveTrace.from_json(_load(a.file))
        again = sieve.replay_trace(trace)
        same = again.final_sets == trace.final_sets and again.final_J == trace.final_J
        return {"identical": same}, EXIT_OK if same else EXIT_INPUT
    s = intmat.SetSystem.from_json(_load(a.file))
    cfg = sieve.SieveConfig(eps=a.eps, delta=a.delta, l=a.l, k=a.k, c=a.c, seed=a.seed,
                            max_retries=a.retries)
    tr = sieve.sieve_run(s, cfg)
    checks = sieve.verify_conditions(s, tr.final_J, tr.final_sets, a.k)
    return {"trace": tr.to_json(), "conditions": checks}, EXIT_OK


def cmd_rs(a):
    if a.action == "johnson":
        radius, bound = codes.johnson_radius(a.n, a.k, a.q)
        return {"radius": radius, "list_bound": bound}, EXIT_OK
    spec = FieldSpec(a.p)
    alpha = _ints(a.alpha)
    c = codes.CodeSpec(spec, len(alpha), a.k, tuple(alpha))
    if a.action == "encode":
        return {"codeword": codes.encode_ints(c, _ints(a.message))}, EXIT_OK
    if a.action == "listdec":
        found = codes.brute_force_list_decode(c, _ints(a.word), a.rho, a.budget)
        return {"count": len(found), "codewords": found}, EXIT_OK
    lists = [frozenset(x) for x in json.loads(a.lists)]
    found = codes.brute_force_list_recover(c, codes.DecodeInstance(tuple(lists), a.rho), a.budget)
    return {"count": len(found), "codewords": found}, EXIT_OK


def cmd_phf(a):
    spec = FieldSpec(a.p)
    if a.action == "build":
        res = codes.build_phf(a.n, a.k, a.t, spec, a.attempts, a.seed, a.budget)
        out = {"threshold": res.threshold, "attempts": res.attempts,
               "matrix": res.matrix.to_json() if res.matrix else None}
        return out, EXIT_OK if res.success else EXIT_BUDGET
    c = codes.CodeSpec(spec, len(_ints(a.alpha)), a.k, tuple(_ints(a.alpha)))
    m, worst = codes.min_separation(c, a.t, None, a.budget)
    thr = codes.linear_phf_bound(c.n, c.k, a.t)
    return {"min_separation": m, "threshold": thr, "strong": m >= thr,
            "minimiser": list(worst) if worst else None}, EXIT_OK


def _search_cfg(a, kind):
    return search.ExperimentConfig(
        kind=kind, t_values=tuple(_ints(a.t)), k_values=tuple(_ints(a.k)), n_max=a.n_max,
        C=a.C, seed=a.seed or 0, max_instances=a.max_instances, trials=a.trials,
        prune=not a.no_prune, max_edge_size=a.max_edge_size, max_edges=a.max_edges,
        slack=a.slack, budget=a.budget, output=a.output,
    )


def cmd_lab(a):
    if a.action == "replay":
        verdicts = search.replay(a.file)
        verdicts = verdicts if isinstance(verdicts, list) else [verdicts]
        code = EXIT_CANDIDATE if CANDIDATE in verdicts else EXIT_OK
        if "mismatch" in verdicts:
            code = EXIT_INPUT
        return {"verdicts": verdicts}, code
    if a.action == "montecarlo":
        rec = montecarlo.montecarlo_suite(montecarlo.MonteCarloConfig(trials=a.trials, seed=a.seed or 0))
        if a.output:
            with RecordWriter(a.output, rec.instance["config"]) as w:
                w.write(rec)
        return rec.to_json(), EXIT_OK
    cfg = _search_cfg(a, "matrix" if a.action == "search-matrix" else "hyper")
    writer = RecordWriter(a.output, asdict(cfg), append=bool(a.checkpoint)) if a.output else None
    try:
        recs, stats = search.run_search(cfg, writer, a.checkpoint, a.threads)
    finally:
        if writer:
            writer.close()
    out = {"stats": asdict(stats), "candidates": [r.to_json() for r in recs if r.verdict == CANDIDATE]}
    if stats.candidates:
        return out, EXIT_CANDIDATE
    return out, EXIT_BUDGET if stats.exhausted else EXIT_OK


# ------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--json-out", metavar="PATH")
    common.add_argument("--budget", type=int, default=10**7)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="rsnwt", parents=[common], description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, **kw):
        sp = sub.add_parser(name, parents=[common], **kw)
        sp.set_defaults(func=func)
        return sp

    sp = add("treepack", cmd_treepack, help="k edge-disjoint spanning trees")
    sp.add_argument("graph")
    sp.add_argument("--k", type=int, default=1)
    sp = add("partconn", cmd_partconn, help="exhaustive partition-connectivity check")
    sp.add_argument("graph")
    sp.add_argument("--k", type=int, default=1)

    sp = add("hyper", cmd_hyper, help="hypergraph connectivity, assignments, distinguishability")
    sp.add_argument("action", choices=["conn", "assign", "disting"])
    sp.add_argument("file")
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--all-edges", action="store_true", help="assignments need not be trees")

    sp = add("intmat", cmd_intmat, help="intersection matrices")
    sp.add_argument("action", choices=["build", "check", "certify"])
    sp.add_argument("system")
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--J", default=None, help="comma-separated index subset")
    sp.add_argument("--layout", choices=["M", "M'"], default="M")
    sp.add_argument("--p", type=int, default=2**31 - 1)
    sp.add_argument("--trials", type=int, default=3)

    sp = add("sieve", cmd_sieve, help="weight sieve")
    sp.add_argument("action", choices=["run", "replay"])
    sp.add_argument("file")
    sp.add_argument("--eps", type=float, default=0.5)
    sp.add_argument("--delta", type=float, default=1.0)
    sp.add_argument("--l", type=int, default=1)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--c", type=float, default=8.0)
    sp.add_argument("--retries", type=int, default=64)

    sp = add("rs", cmd_rs, help="Reed-Solomon utilities")
    sp.add_argument("action", choices=["encode", "listdec", "listrec", "johnson"])
    sp.add_argument("--p", type=int, default=11)
    sp.add_argument("--alpha", default="")
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--n", type=int, default=6)
    sp.add_argument("--q", type=int, default=11)
    sp.add_argument("--message", default="")
    sp.add_argument("--word", default="")
    sp.add_argument("--lists", default="[]", help="JSON list of per-coordinate symbol lists")
    sp.add_argument("--rho", type=float, default=0.5)

    sp = add("phf", cmd_phf, help="strongly perfect hash matrices")
    sp.add_argument("action", choices=["build", "verify"])
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--n", type=int, default=4)
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--t", type=int, default=3)
    sp.add_argument("--alpha", default="")
    sp.add_argument("--attempts", type=int, default=8)

    sp = add("lab", cmd_lab, help="searches, Monte Carlo, replay")
    sp.add_argument("action", choices=["search-matrix", "search-hyper", "montecarlo", "replay"])
    sp.add_argument("file", nargs="?", help="record or trace file for replay")
    sp.add_argument("--t", default="3")
    sp.add_argument("--k", default="1")
    sp.add_argument("--n-max", type=int, default=8)
    sp.add_argument("--C", type=float, default=1.0)
    sp.add_argument("--max-instances", type=int, default=None)
    sp.add_argument("--trials", type=int, default=None)
    sp.add_argument("--no-prune", action="store_true")
    sp.add_argument("--max-edge-size", type=int, default=4)
    sp.add_argument("--max-edges", type=int, default=8)
    sp.add_argument("--slack", type=int, default=0)
    sp.add_argument("--checkpoint", default=None)
    sp.add_argument("--output", default=None, help="JSONL record file")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if a.command == "lab":
        if a.action == "replay" and not a.file:
            parser.error("replay needs a file")
        if a.trials is None:
            a.trials = 400 if a.action == "montecarlo" else 2
    try:
        payload, code = a.func(a)
    except (BudgetExhausted, TooLarge) as exc:
        payload, code = {"error": type(exc).__name__, "detail": str(exc)}, EXIT_BUDGET
    except (InputError, VersionMismatch) as exc:
        payload, code = {"error": type(exc).__name__, "detail": str(exc)}, EXIT_INPUT
    except RsnwtError as exc:
        payload, code = {"error": type(exc).__name__, "detail": str(exc)}, EXIT_INPUT
    text = json.dumps(payload, default=_default, indent=None)
    if a.json_out:
        Path(a.json_out).write_text(text + "\n")
    print(text if len(text) < 4000 else text[:4000] + " ...")
    return code


if __name__ == "__main__":
    sys.exit(main())
