"""Randomized subset sieve: bucket selection of K, random J, reduction to
pairwise intersections, and trimming to tight weight.

The result of a successful run is a family (I'_i)_{i in J} with no element in
three sets, wt(I'_{J'}) <= (|J'|-1)k on every subfamily, equality on J, and
each shared element coming from a single layer.
"""

from __future__ import annotations

import itertools
import json
import logging
import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

from .errors import BudgetExhausted, DegenerateSystem, HypothesesUnmet, InputError, WeightDeficit
from .fields import SeedLike, as_rng
from .intmat import (
    SUBSET_SCAN_LIMIT,
    SetSystem,
    generalized_weight,
    sets_weight,
    trim_to_weight,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SieveConfig:
    eps: float
    delta: float
    l: int = 1
    k: int = 1
    c: float = 8.0
    c0: float = 4.0
    c1: float = 4.0
    c2: float = 0.1
    seed: Optional[int] = None
    max_retries: int = 64

    def __post_init__(self):
        if not 0 < self.eps <= 1:
            raise InputError("eps must lie in (0, 1]")
        if self.delta <= 0 or min(self.c, self.c0, self.c1, self.c2) <= 0:
            raise InputError("delta and all constants must be positive")
        if self.l < 1 or self.k < 1 or self.max_retries < 1:
            raise InputError("l, k and max_retries must be positive")

    @property
    def log_factor(self) -> float:
        """log(1/eps) + log((1+delta)/delta) + 1, logs base 2."""
        return math.log2(1 / self.eps) + math.log2((1 + self.delta) / self.delta) + 1


def check_hypotheses(s: SetSystem, cfg: SieveConfig) -> list[str]:
    failures = []
    if s.t < (1 + cfg.delta) * cfg.l / cfg.eps:
        failures.append(f"t = {s.t} < (1+delta)l/eps = {(1 + cfg.delta) * cfg.l / cfg.eps:.3f}")
    small = [i for i, x in enumerate(s.sets, start=1) if len(x) < cfg.eps * s.n]
    if small:
        failures.append(f"|I_i| < eps*n for i in {small}")
    need = cfg.c * math.sqrt(cfg.l) * cfg.log_factor * s.t * cfg.k
    have = generalized_weight(s, None, cfg.l)
    if have < need:
        failures.append(f"wt_l = {have} < {need:.3f}")
    return failures


def _set_sizes(s: SetSystem) -> list[int]:
    counts = Counter(j for x in s.sets for j in x)
    return [counts.get(j, 0) for j in range(1, s.n + 1)]


@dataclass(frozen=True)
class BucketChoice:
    K: int
    i0: int
    A: tuple[int, ...]
    d: int
    Delta: int
    masses: dict
    realized_c0: float


def bucket_select(s: SetSystem, cfg: SieveConfig, exclude: Sequence[int] = ()) -> BucketChoice:
    """Pick the heaviest dyadic bucket of |S_j| - l at or above max(d, 0)."""
    sizes = _set_sizes(s)
    masses: dict[int, int] = {}
    for x in sizes:
        excess = x - cfg.l
        if excess >= 1:
            i = excess.bit_length() - 1
            masses[i] = masses.get(i, 0) + excess
    if not masses:
        raise DegenerateSystem("every bucket is empty (wt_l = 0)")
    arg = cfg.delta / (1 + cfg.delta) * s.t * cfg.eps / 2
    d = math.floor(math.log2(arg))
    lo = max(d, 0)
    Delta = max(math.ceil(math.log2(s.t)) - lo, 1)
    allowed = {i: m for i, m in masses.items() if i not in exclude}
    cands = {i: m for i, m in allowed.items() if i >= lo} or allowed
    if not cands:
        raise DegenerateSystem("no bucket left to choose")
    i0 = min(cands, key=lambda i: (-cands[i], i))
    K = 2**i0
    A = tuple(j for j, x in enumerate(sizes, start=1) if x >= K + cfg.l)
    wt = sum(masses.values())
    realized = wt / (len(A) * K * cfg.log_factor) if A else math.inf
    return BucketChoice(K, i0, A, d, Delta, dict(sorted(masses.items())), realized)


def sampling_probability(K: int, l: int) -> float:
    return min(math.sqrt(l) / (2 * K), 0.5)


def sample_J(s: SetSystem, K: int, A: Sequence[int], cfg: SieveConfig, seed: SeedLike = None):
    """Keep each index with probability p; A_J = elements of A with two sampled indices in one layer."""
    if not A:
        raise InputError("A is empty")
    rng = as_rng(seed)
    p = sampling_probability(K, cfg.l)
    J = tuple(i for i in range(1, s.t + 1) if rng.random() < p)
    Jset = set(J)
    A_J = tuple(j for j in A if any(len(s.S_layer(j, r) & Jset) >= 2 for r in range(1, s.l + 1)))
    return J, A_J


@dataclass(frozen=True)
class Reduced:
    J: tuple[int, ...]
    T: dict  # j -> (a, b)
    r: dict  # j -> layer
    sets: dict  # i -> frozenset I'_i


def reduce_to_pairs(s: SetSystem, J: Sequence[int], A_J: Sequence[int], seed: SeedLike = None) -> Reduced:
    """Pick a layer r_j and a pair T_j of sampled indices sharing j in that layer."""
    rng = as_rng(seed)
    Jset = set(J)
    T, R = {}, {}
    for j in A_J:
        layers = [r for r in range(1, s.l + 1) if len(s.S_layer(j, r) & Jset) >= 2]
        if not layers:
            raise InputError(f"element {j} is not in A_J")
        r = layers[0] if len(layers) == 1 else rng.choice(layers)
        T[j] = tuple(sorted(rng.sample(sorted(s.S_layer(j, r) & Jset), 2)))
        R[j] = r
    sets = {i: frozenset(j for j, pair in T.items() if i in pair) for i in J}
    return Reduced(tuple(J), T, R, sets)


def _tight(J: Sequence[int], sets: dict, k: int) -> bool:
    if len(J) < 2 or sets_weight([sets[i] for i in J]) != (len(J) - 1) * k:
        return False
    for r in range(2, len(J)):
        for sub in itertools.combinations(J, r):
            if sets_weight([sets[i] for i in sub]) > (r - 1) * k:
                return False
    return True


def trim_to_tight(red: Reduced, k: int) -> tuple[tuple[int, ...], dict]:
    """Smallest heavy subfamily, then shared-element removal to exact weight."""
    J = red.J
    w = sets_weight([red.sets[i] for i in J])
    if len(J) < 2 or w < (len(J) - 1) * k:
        raise WeightDeficit(f"wt = {w} below (|J|-1)k = {(len(J) - 1) * k}")
    if len(J) > SUBSET_SCAN_LIMIT:
        raise InputError(f"|J| = {len(J)} exceeds subset-scan limit")
    if _tight(J, red.sets, k):
        return J, dict(red.sets)
    for r in range(2, len(J) + 1):
        for sub in itertools.combinations(J, r):
            if sets_weight([red.sets[i] for i in sub]) >= (r - 1) * k:
                trimmed = trim_to_weight([red.sets[i] for i in sub], (r - 1) * k)
                return sub, dict(zip(sub, trimmed))
    raise AssertionError("J itself is heavy, so some subfamily must be found")


def verify_conditions(s: SetSystem, J: Sequence[int], sets: dict, k: int) -> dict[str, bool]:
    """The four output conditions plus containment I'_i in I_i."""
    counts = Counter(j for i in J for j in sets[i])
    cond4 = True
    for j, c in counts.items():
        members = {i for i in J if j in sets[i]}
        if not any(members <= s.S_layer(j, r) for r in range(1, s.l + 1)):
            cond4 = False
    return {
        "size": len(J) >= 2,
        "subset": all(sets[i] <= s.I(i) for i in J),
        "1": all(c <= 2 for c in counts.values()),
        "2": all(
            sets_weight([sets[i] for i in sub]) <= (len(sub) - 1) * k
            for r in range(1, len(J) + 1) for sub in itertools.combinations(J, r)
        ),
        "3": sets_weight([sets[i] for i in J]) == (len(J) - 1) * k,
        "4": cond4,
    }


@dataclass
class SieveTrace:
    system: dict
    config: dict
    K: int
    i0: int
    A: list
    p: float
    J: list
    A_J: list
    T: dict
    r: dict
    final_J: list
    final_sets: dict
    attempts: int
    rebucketed: bool
    concentration_event: bool
    realized_c0: float
    schema: int = 1

    def to_json(self) -> dict:
        d = asdict(self)
        d["T"] = {str(j): list(v) for j, v in self.T.items()}
        d["r"] = {str(j): v for j, v in self.r.items()}
        d["final_sets"] = {str(i): sorted(v) for i, v in self.final_sets.items()}
        return d

    @classmethod
    def from_json(cls, data) -> "SieveTrace":
        if isinstance(data, str):
            data = json.loads(data)
        d = dict(data)
        d["T"] = {int(j): tuple(v) for j, v in d["T"].items()}
        d["r"] = {int(j): int(v) for j, v in d["r"].items()}
        d["final_sets"] = {int(i): frozenset(v) for i, v in d["final_sets"].items()}
        return cls(**d)

    def final_system(self, n: int) -> SetSystem:
        return SetSystem.from_sets(n, [self.final_sets[i] for i in self.final_J])


def sieve_run(s: SetSystem, cfg: SieveConfig, check: bool = True) -> SieveTrace:
    """Full pipeline with retries; resample J first, re-bucket after half the budget."""
    if check:
        failures = check_hypotheses(s, cfg)
        if failures:
            raise HypothesesUnmet(failures)
    rng = as_rng(cfg.seed)
    norm = s.normalized()
    assert norm.sets == s.sets
    choice = bucket_select(norm, cfg)
    rebucketed = False
    for attempt in range(cfg.max_retries):
        if attempt == cfg.max_retries // 2 and attempt > 0:
            try:
                choice = bucket_select(norm, cfg, exclude=(choice.i0,))
                rebucketed = True
            except DegenerateSystem:
                pass
        if not choice.A:
            continue
        J, A_J = sample_J(norm, choice.K, choice.A, cfg, rng)
        if len(J) < 2 or len(A_J) < (len(J) - 1) * cfg.k or len(J) > SUBSET_SCAN_LIMIT:
            continue
        red = reduce_to_pairs(norm, J, A_J, rng)
        final_J, final_sets = trim_to_tight(red, cfg.k)
        event = len(J) <= cfg.c1 * math.sqrt(cfg.l) * s.t / choice.K and len(A_J) >= cfg.c2 * len(choice.A)
        return SieveTrace(
            system=s.to_json(), config=asdict(cfg), K=choice.K, i0=choice.i0, A=list(choice.A),
            p=sampling_probability(choice.K, cfg.l), J=list(J), A_J=list(A_J), T=red.T, r=red.r,
            final_J=list(final_J), final_sets=final_sets, attempts=attempt + 1,
            rebucketed=rebucketed, concentration_event=event, realized_c0=choice.realized_c0,
        )
    raise BudgetExhausted(f"no usable J after {cfg.max_retries} samples")


def replay_trace(trace: SieveTrace) -> SieveTrace:
    s = SetSystem.from_json(trace.system)
    return sieve_run(s, SieveConfig(**trace.config), check=False)


# ------------------------------------------------------------- generators

def generate_admissible_system(
    t: int, n: int, cfg: SieveConfig, seed: SeedLike = None, max_tries: int = 200
) -> Optional[SetSystem]:
    """Random layered system meeting the sieve hypotheses, or None."""
    rng = as_rng(seed)
    lo = math.ceil(cfg.eps * n)
    for _ in range(max_tries):
        layers = []
        for _ in range(t):
            size = rng.randint(lo, n)
            members = rng.sample(range(1, n + 1), size)
            per = [set() for _ in range(cfg.l)]
            for j in members:
                per[rng.randrange(cfg.l)].add(j)
            layers.append(tuple(frozenset(x) for x in per))
        s = SetSystem(n, t, tuple(layers))
        if not check_hypotheses(s, cfg):
            return s
    return None


def calc_inequality_violations(steps: int = 50, points: int = 100) -> int:
    """Grid check of (1-p)^x (1+px) <= 1 - p^2 x^2 / 8 for x <= 1/p, <= 2/e beyond."""
    bad = 0
    for a in range(1, steps + 1):
        p = a / 100
        for b in range(points):
            x = b / (points - 1) / p
            if (1 - p) ** x * (1 + p * x) > 1 - p * p * x * x / 8 + 1e-12:
                bad += 1
            y = (1 + 9 * (b + 1) / points) / p
            if (1 - p) ** y * (1 + p * y) > 2 / math.e + 1e-12:
                bad += 1
    return bad
