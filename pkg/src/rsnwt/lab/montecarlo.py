"""Monte Carlo checks: random connectivity, the sieve's sampling ratio, constant calibration."""

from __future__ import annotations

import math
import random
import time
from dataclasses import asdict, dataclass

from ..errors import BudgetExhausted, InputError
from ..fields import as_rng
from ..hypergraphs import Hypergraph, is_weakly_partition_connected, random_connected_subhypergraph
from ..intmat import SetSystem, generalized_weight
from ..sieve import (
    SieveConfig,
    bucket_select,
    calc_inequality_violations,
    generate_admissible_system,
    sample_J,
    sieve_run,
    verify_conditions,
)
from .records import ResultRecord


def three_sigma_floor(p0: float, n: int) -> float:
    return p0 - 3 * math.sqrt(p0 * (1 - p0) / n)


@dataclass
class MonteCarloConfig:
    trials: int = 400
    seed: int = 0
    connectivity_cells: tuple = ((6, 4), (6, 2), (5, 2), (4, 1))
    max_edge_size: int = 4
    ratio_systems: int = 20
    ratio_samples: int = 50
    ratio_params: tuple = (10, 36, 1, 1, 0.5, 1.0)  # t, n, l, k, eps, delta
    calib_systems: int = 200
    calib_t: int = 12
    calib_n: int = 40
    calib_delta: float = 1.0
    c_values: tuple = (2, 4, 8, 16)

    def __post_init__(self):
        self.connectivity_cells = tuple(tuple(c) for c in self.connectivity_cells)
        self.ratio_params = tuple(self.ratio_params)
        self.c_values = tuple(self.c_values)
        if self.trials < 1 or self.ratio_systems < 1 or self.ratio_samples < 1:
            raise InputError("trial counts must be positive")


# ---------------------------------------------------------------- connectivity

def random_wpc_hypergraph(t: int, K: int, rng: random.Random, max_edge_size: int = 4) -> Hypergraph:
    """Add uniformly random edges until the hypergraph is K-weakly-partition-connected."""
    edges: list[frozenset] = []
    top = min(max_edge_size, t)
    while True:
        size = rng.randint(2, top)
        edges.append(frozenset(rng.sample(range(1, t + 1), size)))
        rank = sum(len(e) - 1 for e in edges)
        if rank >= K * (t - 1):
            h = Hypergraph(t, edges)
            if is_weakly_partition_connected(h, K):
                return h


def sample_threshold(t: int, K: int, n_edges: int, log=math.log2) -> int:
    return math.ceil(2 * log(t) * n_edges / K)


def connectivity_cell(t: int, K: int, trials: int, seed, max_edge_size: int = 4) -> dict:
    """Fresh K-connected hypergraph per trial; sample m edges at the threshold, with replacement."""
    rng = as_rng(seed)
    hits = hits_ln = 0
    sizes = []
    for _ in range(trials):
        h = random_wpc_hypergraph(t, K, rng, max_edge_size)
        _, ok = random_connected_subhypergraph(h, sample_threshold(t, K, h.m), rng, replace=True)
        hits += ok
        # Same test at the smaller natural-log threshold, reported only.
        _, ok = random_connected_subhypergraph(h, sample_threshold(t, K, h.m, math.log), rng, replace=True)
        hits_ln += ok
        sizes.append(h.m)
    rate = hits / trials
    floor = three_sigma_floor(0.5, trials)
    return {"t": t, "K": K, "trials": trials, "rate": rate, "rate_natural_log": hits_ln / trials,
            "floor": floor, "mean_edges": sum(sizes) / trials, "pass": rate >= floor}


# ---------------------------------------------------------------- sieve ratio

def ajs_ratio(cfg: MonteCarloConfig) -> dict:
    """Mean |A_J|/|A| over many sampled J on generated admissible systems."""
    t, n, l, k, eps, delta = cfg.ratio_params
    scfg = SieveConfig(eps=eps, delta=delta, l=l, k=k)
    rng = as_rng(cfg.seed)
    ratios, per_system = [], []
    for _ in range(cfg.ratio_systems):
        s = generate_admissible_system(t, n, scfg, rng)
        if s is None:
            continue
        choice = bucket_select(s.normalized(), scfg)
        vals = []
        for _ in range(cfg.ratio_samples):
            _, A_J = sample_J(s, choice.K, choice.A, scfg, rng)
            vals.append(len(A_J) / len(choice.A))
        ratios.extend(vals)
        per_system.append(sum(vals) / len(vals))
    if not ratios:
        return {"samples": 0, "pass": False}
    mean = sum(ratios) / len(ratios)
    var = sum((r - mean) ** 2 for r in ratios) / max(len(ratios) - 1, 1)
    lower = mean - 3 * math.sqrt(var / len(ratios))
    return {"samples": len(ratios), "mean": mean, "lower_3sigma": lower,
            "min_system_mean": min(per_system), "pass": lower > 0}


# ---------------------------------------------------------------- calibration

def effective_c(s: SetSystem, delta: float, l: int = 1, k: int = 1) -> tuple[float, float]:
    """Largest c (and the eps used) for which s meets the sieve hypotheses."""
    eps = min(len(x) for x in s.sets) / s.n
    if eps <= 0 or s.t < (1 + delta) * l / eps:
        return 0.0, eps
    lf = SieveConfig(eps=eps, delta=delta, l=l, k=k).log_factor
    return generalized_weight(s, None, l) / (math.sqrt(l) * lf * s.t * k), eps


def _random_layered(t: int, n: int, rng: random.Random) -> SetSystem:
    lo = rng.randint(n // 6, n)
    sets = [rng.sample(range(1, n + 1), rng.randint(lo, n)) for _ in range(t)]
    return SetSystem.from_sets(n, sets)


def sieve_calibration(cfg: MonteCarloConfig) -> dict:
    """Success rate of the full pipeline on systems meeting the hypotheses at each c."""
    rng = as_rng(cfg.seed + 1)
    pool = []
    for _ in range(cfg.calib_systems):
        s = _random_layered(cfg.calib_t, cfg.calib_n, rng)
        c_eff, eps = effective_c(s, cfg.calib_delta)
        if c_eff < min(cfg.c_values):
            continue
        scfg = SieveConfig(eps=eps, delta=cfg.calib_delta, c=c_eff * (1 - 1e-9), seed=rng.getrandbits(32))
        try:
            tr = sieve_run(s, scfg)
            ok = all(verify_conditions(s, tr.final_J, tr.final_sets, 1).values())
        except BudgetExhausted:
            ok = False
        pool.append((c_eff, ok))
    table = []
    for c in cfg.c_values:
        sel = [ok for ce, ok in pool if ce >= c]
        table.append({"c": c, "systems": len(sel), "rate": (sum(sel) / len(sel)) if sel else None})
    rates = [(row["rate"], row["systems"]) for row in table if row["rate"] is not None]
    monotone = all(
        b[0] >= a[0] - 3 * math.sqrt(0.25 / b[1]) for a, b in zip(rates, rates[1:])
    )
    good = [row["c"] for row in table if row["rate"] is not None and row["rate"] >= 0.9]
    return {"table": table, "monotone": monotone, "threshold_c": min(good) if good else None,
            "pass": monotone and bool(rates)}


# ---------------------------------------------------------------- suite

def montecarlo_suite(cfg: MonteCarloConfig) -> ResultRecord:
    if cfg.trials < 400:
        raise InputError("at least 400 trials per cell")
    t0 = time.perf_counter()
    cells = [connectivity_cell(t, K, cfg.trials, f"{cfg.seed}:{t}:{K}", cfg.max_edge_size) for t, K in cfg.connectivity_cells]
    calc = calc_inequality_violations()
    ratio = ajs_ratio(cfg)
    calib = sieve_calibration(cfg)
    ok = all(c["pass"] for c in cells) and calc == 0 and ratio["pass"] and calib["pass"]
    return ResultRecord(
        experiment="montecarlo",
        instance={"config": asdict(cfg)},
        verdict="PASS" if ok else "FAIL",
        certificates={"connectivity": cells, "calc_violations": calc, "ratio": ratio, "calibration": calib},
        timing=time.perf_counter() - t0,
        seed=cfg.seed,
    )
