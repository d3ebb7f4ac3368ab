"""Counterexample searches over small set systems and hypergraphs.

Set systems are enumerated by *element types*: each ground element is
described by the set of indices containing it. Elements in fewer than two
sets change neither the weights nor the intersection matrix, so only types of
size >= 2 are enumerated, as multisets in a fixed order. The position of an
instance in that order is its cursor; checkpoints store the cursor.
"""

from __future__ import annotations

import itertools
import logging
import math
import random
import time
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterator, Optional, Sequence

from ..errors import InputError, SearchBudgetExceeded, VersionMismatch
from ..fields import P31, P40, P61, FieldSpec, rank_mod_p
from ..graphs import MultiGraph, tree_packing
from ..hypergraphs import (
    Hypergraph,
    disjoint_connected_subhypergraphs,
    distinguishable_subgraph_from_groups,
    has_unique_signature,
    is_k_distinguishable,
    is_weakly_partition_connected,
    label_disjoint_decomposition_check,
    tree_assignments,
    TreeDecomposition,
)
from ..intmat import (
    SetSystem,
    build,
    certify_nonsingular_treepack,
    conjecture_conditions,
    nonsingular_randomized,
    triple_intersections_empty,
    weight,
    weight_bound_holds,
)
from .records import CANDIDATE, RecordWriter, ResultRecord, load_checkpoint, save_checkpoint

log = logging.getLogger(__name__)

ESCALATION_PRIMES = (P31, P40, P61)


@dataclass
class ExperimentConfig:
    kind: str
    t_values: tuple[int, ...] = (3,)
    k_values: tuple[int, ...] = (1,)
    n_max: int = 8
    C: float = 1.0
    seed: int = 0
    max_instances: Optional[int] = None
    trials: int = 2
    prune: bool = True
    max_edge_size: int = 4
    max_edges: int = 8
    slack: int = 0
    budget: int = 10**6
    output: Optional[str] = None

    def __post_init__(self):
        self.t_values = tuple(self.t_values)
        self.k_values = tuple(self.k_values)
        if not self.t_values or not self.k_values:
            raise InputError("parameter ranges must be nonempty")
        if self.budget <= 0 or (self.max_instances is not None and self.max_instances <= 0):
            raise InputError("budgets must be positive")
        if self.C < 1:
            raise InputError("C must be at least 1")


@dataclass
class SearchStats:
    visited: int = 0
    in_scope: int = 0
    skipped: int = 0
    pruned: int = 0
    candidates: int = 0
    exhausted: bool = False


def instance_seed(seed: int, cursor: int) -> int:
    return random.Random(f"{seed}:{cursor}").getrandbits(63)


# ------------------------------------------------------------ enumeration

def element_types(t: int, max_size: Optional[int] = None) -> list[frozenset]:
    top = t if max_size is None else min(t, max_size)
    return [frozenset(c) for r in range(2, top + 1) for c in itertools.combinations(range(1, t + 1), r)]


def multisets_with_rank(types: Sequence[frozenset], lo: int, hi: int, max_len: int) -> Iterator[tuple[int, ...]]:
    """Non-decreasing index tuples with sum(|type|-1) in [lo, hi] and length <= max_len."""
    costs = [len(x) - 1 for x in types]

    def rec(start: int, prefix: list[int], total: int):
        if lo <= total <= hi:
            yield tuple(prefix)
        if len(prefix) == max_len:
            return
        for i in range(start, len(types)):
            if total + costs[i] > hi:
                continue
            prefix.append(i)
            yield from rec(i, prefix, total + costs[i])
            prefix.pop()

    yield from rec(0, [], 0)


def system_from_types(t: int, types: Sequence[frozenset]) -> SetSystem:
    sets = [set() for _ in range(t)]
    for j, ty in enumerate(types, start=1):
        for i in ty:
            sets[i - 1].add(j)
    return SetSystem.from_sets(max(len(types), 1), sets)


def _invariant(t: int, types: Sequence[frozenset]) -> tuple:
    degrees = sorted(sum(1 for ty in types if v in ty) for v in range(1, t + 1))
    return (t, tuple(degrees), tuple(sorted(len(ty) for ty in types)))


def canonical_form(t: int, types: Sequence[frozenset]) -> tuple:
    """Lexicographically least relabelling (exact, factorial in t)."""
    best = None
    for perm in itertools.permutations(range(1, t + 1)):
        relabel = sorted(tuple(sorted(perm[v - 1] for v in ty)) for ty in types)
        key = tuple(relabel)
        if best is None or key < best:
            best = key
    return best


class IsoPruner:
    """Bucket by a cheap invariant, then compare exact canonical forms inside the bucket.

    The invariant only routes instances; a drop happens only on an exact match,
    so one representative per isomorphism class always survives.
    """

    def __init__(self):
        self.buckets: dict[tuple, set] = {}

    def seen(self, t: int, types: Sequence[frozenset]) -> bool:
        bucket = self.buckets.setdefault(_invariant(t, types), set())
        form = canonical_form(t, types)
        if form in bucket:
            return True
        bucket.add(form)
        return False


def matrix_instances(cfg: ExperimentConfig) -> Iterator[tuple[int, int, int, tuple[frozenset, ...]]]:
    """(cursor, t, k, types) over every configured (t, k) in a fixed order."""
    cursor = 0
    for t in cfg.t_values:
        types = element_types(t)
        for k in cfg.k_values:
            target = math.ceil(cfg.C * k * (t - 1) - 1e-9)
            for combo in multisets_with_rank(types, target, target + cfg.slack, cfg.n_max):
                yield cursor, t, k, tuple(types[i] for i in combo)
                cursor += 1


# ------------------------------------------------------------ matrix search

def matrix_in_scope(s: SetSystem, k: int, C: float) -> bool:
    if C == 1:
        return conjecture_conditions(s, k, 1.0)
    return weight_bound_holds(s, C * k, proper_only=True) and weight(s) >= C * k * (s.t - 1)


def evaluate_matrix_instance(s: SetSystem, k: int, seed: int, trials: int = 2) -> tuple[str, dict]:
    """Randomized test at two primes, escalating singular-looking results to a third."""
    m = build(s, None, k)
    rng = random.Random(seed)
    witnesses = []
    singular_at = []
    for p in ESCALATION_PRIMES[:2]:
        v = nonsingular_randomized(m, FieldSpec(p), trials, rng)
        if v:
            witnesses.append({"p": p, "alpha": list(v.alpha)})
        else:
            singular_at.append(p)
    if singular_at:
        v = nonsingular_randomized(m, FieldSpec(P61), max(8, trials), rng)
        if v:
            witnesses.append({"p": P61, "alpha": list(v.alpha)})
        else:
            singular_at.append(P61)
    certs: dict = {"witnesses": witnesses, "singular_at": singular_at}
    if triple_intersections_empty(s) and weight(s) == k * (s.t - 1) and weight_bound_holds(s, k):
        cert = certify_nonsingular_treepack(s, None, k)
        certs["treepack_monomial"] = cert.monomial_str() if cert else None
    # One full-rank evaluation proves nonsingularity outright.
    verdict = "nonsingular" if witnesses else CANDIDATE
    return verdict, certs


def search_matrix_conjecture(cfg: ExperimentConfig, start_cursor: int = 0,
                             stats: Optional[SearchStats] = None,
                             cursor_range: Optional[tuple[int, int]] = None) -> Iterator[ResultRecord]:
    stats = stats if stats is not None else SearchStats()
    pruner = IsoPruner() if cfg.prune else None
    processed = 0
    for cursor, t, k, types in matrix_instances(cfg):
        # Pruning state must see every earlier instance to stay deterministic.
        dup = pruner.seen(t, types) if pruner else False
        if cursor < start_cursor or (cursor_range and not cursor_range[0] <= cursor < cursor_range[1]):
            continue
        if cfg.max_instances is not None and processed >= cfg.max_instances:
            stats.exhausted = True
            return
        processed += 1
        stats.visited += 1
        if dup:
            stats.pruned += 1
            continue
        s = system_from_types(t, types)
        if not matrix_in_scope(s, k, cfg.C):
            stats.skipped += 1
            log.debug("cursor %d out of scope", cursor)
            continue
        stats.in_scope += 1
        seed = instance_seed(cfg.seed, cursor)
        t0 = time.perf_counter()
        verdict, certs = evaluate_matrix_instance(s, k, seed, cfg.trials)
        if verdict == CANDIDATE:
            stats.candidates += 1
        yield ResultRecord(
            experiment="matrix-conjecture",
            instance={"system": s.to_json(), "k": k, "C": cfg.C, "trials": cfg.trials},
            verdict=verdict, certificates=certs, timing=time.perf_counter() - t0,
            seed=seed, cursor=cursor,
        )


# ------------------------------------------------------------ hypergraph search

def hypergraph_instances(cfg: ExperimentConfig) -> Iterator[tuple[int, int, int, tuple[frozenset, ...]]]:
    cursor = 0
    for t in cfg.t_values:
        types = element_types(t, cfg.max_edge_size)
        for k in cfg.k_values:
            target = math.ceil(cfg.C * k * (t - 1) - 1e-9)
            for combo in multisets_with_rank(types, target, target + cfg.slack, cfg.max_edges):
                yield cursor, t, k, tuple(types[i] for i in combo)
                cursor += 1


def find_distinguishable_witness(h: Hypergraph, k: int, C: float = 1.0, budget: int = 10**6, seed: int = 0):
    """Search tree-assignments for a k-distinguishable subgraph with k(t-1) edges.

    Returns (route, graph, decomposition) or None. When C >= 6*ceil(log t) the
    disjoint-groups construction is tried first.
    """
    need = k * (h.t - 1)
    if h.t >= 2 and C >= 6 * math.ceil(math.log2(h.t)):
        groups = disjoint_connected_subhypergraphs(h, k, 64, seed, check_connectivity=False)
        if groups is not None:
            g, d = distinguishable_subgraph_from_groups(h, groups)
            if label_disjoint_decomposition_check(g, d) and has_unique_signature(g, d, budget):
                return "disjoint-groups", g, d
    for trees_only in (True, False):
        try:
            assignments = tree_assignments(h, trees_only, budget)
            for g in assignments:
                subsets = [range(g.m)] if g.m == need else itertools.combinations(range(g.m), need)
                for idx in subsets:
                    sub = g.subgraph(idx)
                    if tree_packing(sub, k) is None:
                        continue
                    ok, d = is_k_distinguishable(sub, k, budget)
                    if ok:
                        return ("trees" if trees_only else "any-edges"), sub, d
        except SearchBudgetExceeded:
            log.info("assignment budget exceeded (trees_only=%s)", trees_only)
    return None


def search_hypergraph_conjecture(cfg: ExperimentConfig, start_cursor: int = 0,
                                 stats: Optional[SearchStats] = None,
                                 cursor_range: Optional[tuple[int, int]] = None) -> Iterator[ResultRecord]:
    stats = stats if stats is not None else SearchStats()
    pruner = IsoPruner() if cfg.prune else None
    processed = 0
    for cursor, t, k, types in hypergraph_instances(cfg):
        dup = pruner.seen(t, types) if pruner else False
        if cursor < start_cursor or (cursor_range and not cursor_range[0] <= cursor < cursor_range[1]):
            continue
        if cfg.max_instances is not None and processed >= cfg.max_instances:
            stats.exhausted = True
            return
        processed += 1
        stats.visited += 1
        if dup:
            stats.pruned += 1
            continue
        h = Hypergraph(t, types)
        if not is_weakly_partition_connected(h, cfg.C * k):
            stats.skipped += 1
            continue
        stats.in_scope += 1
        seed = instance_seed(cfg.seed, cursor)
        t0 = time.perf_counter()
        found = find_distinguishable_witness(h, k, cfg.C, cfg.budget, seed)
        if found is None:
            verdict, certs = CANDIDATE, {}
            stats.candidates += 1
        else:
            route, g, d = found
            verdict = "witness"
            certs = {"route": route, "graph": g.to_json(), "trees": [sorted(x) for x in d.trees]}
        yield ResultRecord(
            experiment="hyper-conjecture",
            instance={"hypergraph": h.to_json(), "k": k, "C": cfg.C},
            verdict=verdict, certificates=certs, timing=time.perf_counter() - t0,
            seed=seed, cursor=cursor,
        )


SEARCHES = {"matrix": (search_matrix_conjecture, matrix_instances),
            "hyper": (search_hypergraph_conjecture, hypergraph_instances)}


def instance_count(cfg: ExperimentConfig) -> int:
    return sum(1 for _ in SEARCHES[cfg.kind][1](cfg))


def _worker(args):
    cfg, lo, hi, rid = args
    stats = SearchStats()
    local = ExperimentConfig(**{**asdict(cfg), "max_instances": None})
    recs = list(SEARCHES[cfg.kind][0](local, 0, stats, (lo, hi)))
    for r in recs:
        r.range_id = rid
    return recs, stats


def run_search(cfg: ExperimentConfig, writer: Optional[RecordWriter] = None,
               checkpoint: Optional[str] = None, threads: int = 1,
               checkpoint_every: int = 50) -> tuple[list[ResultRecord], SearchStats]:
    """Drive a search, writing records and a cursor checkpoint.

    With a checkpoint file present the search resumes after its cursor. With
    threads > 1 the remaining cursor space is cut into contiguous ranges, one
    per worker, and records are merged back in cursor order.
    """
    search = SEARCHES[cfg.kind][0]
    start = 0
    if checkpoint:
        state = load_checkpoint(checkpoint)
        if state is not None:
            start = state["cursor"]
    stats = SearchStats()
    out: list[ResultRecord] = []

    if threads > 1:
        total = instance_count(cfg)
        end = total if cfg.max_instances is None else min(total, start + cfg.max_instances)
        step = max(1, -(-(end - start) // threads))
        jobs = [(cfg, lo, min(lo + step, end), i) for i, lo in enumerate(range(start, end, step))]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for recs, st in pool.map(_worker, jobs):
                out.extend(recs)
                for f in ("visited", "in_scope", "skipped", "pruned", "candidates"):
                    setattr(stats, f, getattr(stats, f) + getattr(st, f))
        out.sort(key=lambda r: r.cursor)
        stats.exhausted = end < total
        if writer:
            for r in out:
                writer.write(r)
        if checkpoint:
            save_checkpoint(checkpoint, end, {"done": end >= total})
        return out, stats

    last = start
    for i, rec in enumerate(search(cfg, start, stats)):
        out.append(rec)
        if writer:
            writer.write(rec)
        last = rec.cursor + 1
        if checkpoint and i % checkpoint_every == checkpoint_every - 1:
            save_checkpoint(checkpoint, last)
    if checkpoint:
        # Out-of-scope instances after the last record are visited too.
        save_checkpoint(checkpoint, start + stats.visited, {"done": not stats.exhausted})
    return out, stats


# ------------------------------------------------------------ replay

def _replay_record(rec: ResultRecord) -> str:
    inst = rec.instance
    if rec.experiment == "matrix-conjecture":
        s = SetSystem.from_json(inst["system"])
        k = inst["k"]
        if rec.verdict == "nonsingular":
            m = build(s, None, k)
            for w in rec.certificates.get("witnesses", []):
                if rank_mod_p(m.evaluate(w["alpha"], w["p"]), w["p"]) == m.shape[1]:
                    return "nonsingular"
            return "mismatch"
        return evaluate_matrix_instance(s, k, rec.seed, inst.get("trials", 2))[0]
    if rec.experiment == "hyper-conjecture":
        h = Hypergraph.from_json(inst["hypergraph"])
        k = inst["k"]
        if rec.verdict == "witness":
            g = MultiGraph.from_json(rec.certificates["graph"])
            d = TreeDecomposition(tuple(frozenset(x) for x in rec.certificates["trees"]))
            return "witness" if has_unique_signature(g, d) else "mismatch"
        found = find_distinguishable_witness(h, k, inst["C"], seed=rec.seed)
        return CANDIDATE if found is None else "witness"
    if rec.experiment == "sieve":
        from ..sieve import SieveTrace, replay_trace
        trace = SieveTrace.from_json(rec.certificates["trace"])
        again = replay_trace(trace)
        return rec.verdict if again.final_sets == trace.final_sets else "mismatch"
    if rec.experiment == "montecarlo":
        from .montecarlo import MonteCarloConfig, montecarlo_suite
        return montecarlo_suite(MonteCarloConfig(**inst["config"])).verdict
    raise VersionMismatch(f"unknown experiment {rec.experiment!r}")


def replay(target) -> str | list[str]:
    """Re-execute a record (or every record of a JSONL file, or a sieve trace file).

    Checksums and schema versions are checked first; a tampered or foreign
    record raises VersionMismatch.
    """
    from .records import read_records
    if isinstance(target, ResultRecord):
        return _replay_record(target)
    if isinstance(target, dict):
        if "final_sets" in target:
            from ..sieve import SieveTrace, replay_trace
            trace = SieveTrace.from_json(target)
            return "identical" if replay_trace(trace).final_sets == trace.final_sets else "mismatch"
        return _replay_record(ResultRecord.from_json(target))
    path = Path(target)
    text = path.read_text()
    first = text.lstrip()[:1]
    if path.suffix == ".json" or (first == "{" and "\n" not in text.strip()):
        return replay(json.loads(text))
    _, records = read_records(path)
    return [_replay_record(r) for r in records]
