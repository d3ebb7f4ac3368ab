"""Reed-Solomon codes over prime fields: encoding, brute-force list decoding
and list recovery, the Johnson reference, and strongly perfect hash matrices.

Polynomials of degree < k are indexed 0..p^k-1 by their coefficient tuple
(m_0, ..., m_{k-1}) read as base-p digits, m_0 most significant, so index
order equals lexicographic coefficient order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DuplicateColumn, FieldTooSmall, InputError, TooLarge
from .fields import FieldElement, FieldSpec, SeedLike, as_rng, sample_distinct_vector
from .intmat import SetSystem, sets_weight, smallest_heavy_subset, trim_to_weight

DEFAULT_ENUM_BUDGET = 10**7
DEFAULT_PHF_BUDGET = 10**9


@dataclass(frozen=True)
class CodeSpec:
    spec: FieldSpec
    n: int
    k: int
    alpha: tuple[int, ...]

    def __post_init__(self):
        alpha = tuple(int(a) % self.spec.p for a in self.alpha)
        object.__setattr__(self, "alpha", alpha)
        if not 1 <= self.k < self.n <= self.spec.p:
            raise InputError("need 1 <= k < n <= p")
        if len(alpha) != self.n or len(set(alpha)) != self.n:
            raise InputError("alpha must have n pairwise-distinct coordinates")

    @classmethod
    def random(cls, spec: FieldSpec, n: int, k: int, seed: SeedLike = None) -> "CodeSpec":
        return cls(spec, n, k, tuple(int(a) for a in sample_distinct_vector(spec, n, seed)))

    @property
    def p(self) -> int:
        return self.spec.p

    @property
    def rate(self) -> float:
        return self.k / self.n


def encode_ints(c: CodeSpec, message: Sequence[int]) -> list[int]:
    if len(message) != c.k:
        raise InputError(f"message needs {c.k} coefficients")
    p = c.p
    out = []
    for a in c.alpha:
        acc = 0
        for m in reversed(message):
            acc = (acc * a + int(m)) % p
        out.append(acc)
    return out


def encode(c: CodeSpec, message: Sequence[int]) -> list[FieldElement]:
    return [FieldElement(v, c.spec) for v in encode_ints(c, message)]


def message_of(index: int, p: int, k: int) -> tuple[int, ...]:
    digits = []
    for _ in range(k):
        index, d = divmod(index, p)
        digits.append(d)
    return tuple(reversed(digits))


def index_of(message: Sequence[int], p: int) -> int:
    idx = 0
    for m in message:
        idx = idx * p + int(m)
    return idx


def all_codewords(c: CodeSpec, budget: int = DEFAULT_ENUM_BUDGET) -> np.ndarray:
    """Array of shape (p^k, n), row index = polynomial index."""
    total = c.p**c.k
    if total > budget:
        raise TooLarge(f"p^k = {total} exceeds enumeration budget {budget}")
    if c.p >= 2**31:
        raise TooLarge("vectorised enumeration needs p < 2^31")
    p = c.p
    msgs = np.array(list(itertools.product(range(p), repeat=c.k)), dtype=np.int64).reshape(total, c.k)
    alpha = np.array(c.alpha, dtype=np.int64)
    out = np.zeros((total, c.n), dtype=np.int64)
    # Horner from the top coefficient keeps intermediates below p^2.
    for j in range(c.k - 1, -1, -1):
        out = (out * alpha[None, :] + msgs[:, j:j + 1]) % p
    return out


# ------------------------------------------------------------ list decoding

@dataclass(frozen=True)
class DecodeInstance:
    lists: tuple[frozenset, ...]
    rho: float
    L: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "lists", tuple(frozenset(int(x) for x in s) for s in self.lists))
        if not 0 <= self.rho <= 1:
            raise InputError("rho must lie in [0, 1]")
        if any(not s for s in self.lists):
            raise InputError("every input list needs at least one symbol")

    @classmethod
    def from_word(cls, y: Sequence[int], rho: float) -> "DecodeInstance":
        return cls(tuple(frozenset([int(v)]) for v in y), rho)


def list_distance(codeword: Sequence[int], lists: Sequence[frozenset]) -> float:
    return sum(1 for x, s in zip(codeword, lists) if int(x) not in s) / len(lists)


def brute_force_list_recover(c: CodeSpec, inst: DecodeInstance, budget: int = DEFAULT_ENUM_BUDGET) -> list[tuple[int, ...]]:
    """Every codeword within relative distance rho of S_1 x ... x S_n."""
    if len(inst.lists) != c.n:
        raise InputError("need one input list per coordinate")
    cw = all_codewords(c, budget)
    member = np.zeros((c.n, c.p), dtype=bool)
    for i, s in enumerate(inst.lists):
        for v in s:
            member[i, v % c.p] = True
    misses = (~member[np.arange(c.n)[None, :], cw]).sum(axis=1)
    # Integer comparison avoids rounding at the boundary.
    limit = math.floor(inst.rho * c.n + 1e-9)
    hits = np.nonzero(misses <= limit)[0]
    return [tuple(int(v) for v in cw[i]) for i in hits]


def brute_force_list_decode(c: CodeSpec, y: Sequence[int], rho: float, budget: int = DEFAULT_ENUM_BUDGET):
    return brute_force_list_recover(c, DecodeInstance.from_word(y, rho), budget)


def johnson_radius(n: int, k: int, q: int) -> tuple[float, float]:
    """(1 - sqrt(1 - delta), q n^2 delta) with delta = (n-k+1)/n."""
    delta = (n - k + 1) / n
    return 1 - math.sqrt(max(0.0, 1 - delta)), q * n * n * delta


# ------------------------------------------------------------ hash matrices

def linear_phf_bound(n: int, k: int, t: int) -> int:
    if k * (t - 1) > n + 1:
        raise InputError("bound stated for k(t-1) <= n+1")
    return n - k * (t - 1) + 1


@dataclass(frozen=True)
class HashMatrix:
    spec: FieldSpec
    n: int
    k: int
    alpha: tuple[int, ...]
    t: int
    r: int  # certified minimum number of separating rows

    @property
    def code(self) -> CodeSpec:
        return CodeSpec(self.spec, self.n, self.k, self.alpha)

    def column(self, index: int) -> list[int]:
        return encode_ints(self.code, message_of(index, self.spec.p, self.k))

    def to_json(self) -> dict:
        return {"p": self.spec.p, "n": self.n, "k": self.k, "t": self.t,
                "alpha": list(self.alpha), "r": self.r}


def verify_separation(m: HashMatrix, columns: Sequence[int]) -> int:
    """Rows on which the chosen columns take pairwise-distinct values."""
    if len(set(columns)) != len(columns):
        raise DuplicateColumn("repeated column index")
    cols = [m.column(i) for i in columns]
    return sum(1 for row in zip(*cols) if len(set(row)) == len(row))


def _equality_masks(cw: np.ndarray) -> np.ndarray:
    """eq[a, b] = bitmask of rows where codewords a and b agree."""
    N, n = cw.shape
    if n > 63:
        raise TooLarge("row masks limited to n <= 63")
    eq = np.zeros((N, N), dtype=np.uint64)
    for i in range(n):
        col = cw[:, i]
        eq |= (col[:, None] == col[None, :]).astype(np.uint64) << np.uint64(i)
    return eq


def min_separation(c: CodeSpec, t: int, stop_below: Optional[int] = None,
                   budget: int = DEFAULT_PHF_BUDGET) -> tuple[int, Optional[tuple[int, ...]]]:
    """Minimum over t-subsets of columns of the separating-row count, and a minimiser.

    With ``stop_below`` the scan stops at the first subset under that value,
    so the returned minimum is then only an upper bound.
    """
    N = c.p**c.k
    if t < 1:
        raise InputError("t must be positive")
    if t > N:
        raise InputError("t exceeds the number of columns")
    if math.comb(N, t) * c.n > budget:
        raise TooLarge(f"C({N},{t})*n exceeds verification budget {budget}")
    if t == 1:
        return c.n, (0,)
    cw = all_codewords(c)
    eq = _equality_masks(cw)
    n = c.n
    best = [n + 1, None]

    def rec(prefix: list[int], acc: np.uint64) -> bool:
        start = prefix[-1] + 1
        if len(prefix) == t - 1:
            if start >= N:
                return False
            masks = np.full(N - start, acc, dtype=np.uint64)
            for a in prefix:
                masks |= eq[a, start:]
            seps = n - np.bitwise_count(masks).astype(np.int64)
            j = int(np.argmin(seps))
            if seps[j] < best[0]:
                best[0] = int(seps[j])
                best[1] = tuple(prefix) + (start + j,)
                if stop_below is not None and best[0] < stop_below:
                    return True
            return False
        for b in range(start, N - (t - 1 - len(prefix)) + 1):
            new = acc
            for a in prefix:
                new |= eq[a, b]
            prefix.append(b)
            done = rec(prefix, new)
            prefix.pop()
            if done:
                return True
        return False

    for a in range(N - t + 1):
        if rec([a], np.uint64(0)):
            break
    return best[0], best[1]


@dataclass
class PHFResult:
    matrix: Optional[HashMatrix]
    threshold: int
    minima: list = field(default_factory=list)  # per attempt: (alpha, observed minimum)
    attempts: int = 0

    @property
    def success(self) -> bool:
        return self.matrix is not None


def build_phf(n: int, k: int, t: int, spec: FieldSpec, attempts: int = 8, seed: SeedLike = None,
              budget: int = DEFAULT_PHF_BUDGET, exact_minimum: bool = False) -> PHFResult:
    """Random evaluation vectors until one separates every t columns by n-k(t-1)+1 rows.

    Failed attempts stop at the first bad subset unless ``exact_minimum``.
    """
    if n > spec.p:
        raise FieldTooSmall(f"cannot pick {n} distinct points in F_{spec.p}")
    rng = as_rng(seed)
    thr = n - k * (t - 1) + 1
    result = PHFResult(None, thr)
    for attempt in range(attempts):
        code = CodeSpec.random(spec, n, k, rng)
        m, _ = min_separation(code, t, None if exact_minimum else thr, budget)
        result.minima.append((code.alpha, m))
        result.attempts = attempt + 1
        if m >= thr:
            result.matrix = HashMatrix(spec, n, k, code.alpha, t, m)
            break
    return result


@dataclass(frozen=True)
class BadWitness:
    polys: tuple[tuple[int, ...], ...]
    y: tuple[int, ...]
    sets: tuple[frozenset, ...]
    separating: int

    def system(self, n: int) -> SetSystem:
        return SetSystem.from_sets(n, list(self.sets))


def bad_vector_witness(c: CodeSpec, t: int, radius: Optional[int] = None,
                       budget: int = DEFAULT_ENUM_BUDGET) -> Optional[BadWitness]:
    """t codewords separated by fewer than ``radius`` rows (default n-k(t-1)+1).

    Plain itertools scan in index order. Each non-separating row is placed in
    the first pair (lexicographic) of agreeing polynomials, and y takes their
    common value there.
    """
    thr = linear_phf_bound(c.n, c.k, t) if radius is None else radius
    N = c.p**c.k
    if math.comb(N, t) > budget:
        raise TooLarge(f"C({N},{t}) subsets exceed budget {budget}")
    words = [encode_ints(c, message_of(i, c.p, c.k)) for i in range(N)]
    for combo in itertools.combinations(range(N), t):
        cols = [words[i] for i in combo]
        sep = sum(1 for row in zip(*cols) if len(set(row)) == t)
        if sep >= thr:
            continue
        sets = [set() for _ in range(t)]
        y = []
        for i in range(c.n):
            vals = [w[i] for w in cols]
            pair = next(((a, b) for a, b in itertools.combinations(range(t), 2) if vals[a] == vals[b]), None)
            if pair is None:
                y.append(vals[0])
            else:
                sets[pair[0]].add(i + 1)
                sets[pair[1]].add(i + 1)
                y.append(vals[pair[0]])
        polys = tuple(message_of(i, c.p, c.k) for i in combo)
        return BadWitness(polys, tuple(y), tuple(frozenset(s) for s in sets), sep)
    return None


def witness_properties(w: BadWitness, k: int) -> dict[str, bool]:
    """Properties (a)-(c) of the row-assignment construction."""
    t = len(w.sets)
    return {
        "a": all(not (w.sets[a] & w.sets[b] & w.sets[c]) for a, b, c in itertools.combinations(range(t), 3)),
        "b": all(len(w.sets[a] & w.sets[b]) <= k - 1 for a, b in itertools.combinations(range(t), 2)),
        "c": sets_weight(list(w.sets)) >= k * (t - 1),
    }


def extract_tight_subfamily(w: BadWitness, k: int) -> tuple[tuple[int, ...], list[frozenset]]:
    """Smallest S with wt(I_S) >= k(|S|-1), trimmed to equality (0-based positions)."""
    S = smallest_heavy_subset(list(w.sets), k)
    if S is None:
        raise InputError("no heavy subfamily")
    trimmed = trim_to_weight([w.sets[i] for i in S], k * (len(S) - 1))
    return S, trimmed
