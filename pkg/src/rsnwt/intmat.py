"""Cycle basis B_t, weights, t-wise intersection matrices and their
nonsingularity tests.

Pairs {a, b} of [t] are ordered by max first, then min:
12 < 13 < 23 < 14 < 24 < 34 < ...  Every row and column index below comes
from ``pair_index`` so the layouts cannot drift apart.

Set indices and ground elements are 1-based throughout the public API.
"""

from __future__ import annotations

import itertools
import json
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from .errors import (
    AgreementMismatch,
    EmptyIndexSet,
    InputError,
    NotATransversal,
    PreconditionFailed,
    TooLarge,
    TooSmall,
)
from .fields import FieldElement, FieldSpec, SeedLike, as_rng, integer_det, integer_rank, rank_mod_p
from .graphs import Edge, MultiGraph, TreePacking, is_spanning_tree, tree_packing
from .hypergraphs import Hypergraph

log = logging.getLogger(__name__)

SUBSET_SCAN_LIMIT = 20


# ------------------------------------------------------------- pair order

def pair_index(a: int, b: int) -> int:
    """Position of {a, b} in the max-then-min order (independent of t)."""
    a, b = min(a, b), max(a, b)
    if a < 1 or a == b:
        raise InputError(f"invalid pair {{{a}, {b}}}")
    return (b - 1) * (b - 2) // 2 + (a - 1)


def pair_order(t: int) -> list[tuple[int, int]]:
    return [(a, b) for b in range(2, t + 1) for a in range(1, b)]


# ------------------------------------------------------------ cycle basis

@dataclass(frozen=True)
class CycleBasis:
    t: int
    rows: tuple[tuple[int, ...], ...]

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), math.comb(self.t, 2))


def cycle_basis(t: int) -> CycleBasis:
    """Oriented triangles D_{ijt}: +1 on {i,j} and {j,t}, -1 on {i,t}."""
    if t < 3:
        raise TooSmall(f"B_t needs t >= 3 (got {t}); for t = 2 it is empty")
    ncols = math.comb(t, 2)
    rows = []
    for i, j in pair_order(t - 1):
        row = [0] * ncols
        row[pair_index(i, j)] = 1
        row[pair_index(j, t)] = 1
        row[pair_index(i, t)] = -1
        rows.append(tuple(row))
    return CycleBasis(t, tuple(rows))


def _basis_rows(t: int) -> list[list[int]]:
    return [] if t < 3 else [list(r) for r in cycle_basis(t).rows]


def incidence_matrix(t: int) -> list[list[int]]:
    """D with D[{i,j}, j] = 1 and D[{i,j}, i] = -1 (i < j)."""
    d = []
    for i, j in pair_order(t):
        row = [0] * t
        row[j - 1] = 1
        row[i - 1] = -1
        d.append(row)
    return d


def column_removal_rank_test(b: CycleBasis, removed: Iterable[tuple[int, int]]) -> bool:
    """Row rank survives deleting the columns labelled by ``removed``."""
    drop = {pair_index(*e) for e in removed}
    keep = [c for c in range(b.shape[1]) if c not in drop]
    sub = [[r[c] for c in keep] for r in b.rows]
    return integer_rank(sub) == len(b.rows)


# ---------------------------------------------------------------- set systems

@dataclass(frozen=True)
class SetSystem:
    """Layered subsets I_i^(r) of [n] for i in [t], r in [l]."""

    n: int
    t: int
    layers: tuple[tuple[frozenset, ...], ...]

    def __post_init__(self):
        layers = tuple(tuple(frozenset(x) for x in per) for per in self.layers)
        object.__setattr__(self, "layers", layers)
        if len(layers) != self.t:
            raise InputError(f"expected {self.t} sets, got {len(layers)}")
        if layers and len({len(per) for per in layers}) != 1:
            raise InputError("every set needs the same number of layers")
        if layers and len(layers[0]) < 1:
            raise InputError("at least one layer required")
        for per in layers:
            for x in per:
                if not all(1 <= j <= self.n for j in x):
                    raise InputError(f"element outside [1, {self.n}]")

    @classmethod
    def from_sets(cls, n: int, sets: Sequence[Iterable[int]]) -> "SetSystem":
        return cls(n, len(sets), tuple((frozenset(s),) for s in sets))

    @property
    def l(self) -> int:
        return len(self.layers[0]) if self.layers else 1

    @property
    def sets(self) -> tuple[frozenset, ...]:
        return tuple(frozenset().union(*per) for per in self.layers)

    def I(self, i: int) -> frozenset:
        return frozenset().union(*self.layers[i - 1])

    def S(self, j: int) -> frozenset:
        return frozenset(i for i, s in enumerate(self.sets, start=1) if j in s)

    def S_layer(self, j: int, r: int) -> frozenset:
        return frozenset(i for i, per in enumerate(self.layers, start=1) if j in per[r - 1])

    def restrict(self, J: Sequence[int]) -> "SetSystem":
        """Sub-system on the indices J (kept in the given order, renumbered 1..|J|)."""
        return SetSystem(self.n, len(J), tuple(self.layers[i - 1] for i in J))

    def normalized(self) -> "SetSystem":
        """Layers made pairwise disjoint per set; each element stays in its first layer."""
        out = []
        for per in self.layers:
            seen: set[int] = set()
            new = []
            for x in per:
                new.append(frozenset(x - seen))
                seen |= x
            out.append(tuple(new))
        return SetSystem(self.n, self.t, tuple(out))

    def to_json(self) -> dict:
        return {"n": self.n, "t": self.t, "l": self.l,
                "layers": [[sorted(x) for x in per] for per in self.layers]}

    @classmethod
    def from_json(cls, data) -> "SetSystem":
        if isinstance(data, str):
            data = json.loads(data)
        s = cls(int(data["n"]), int(data["t"]), tuple(tuple(frozenset(x) for x in per) for per in data["layers"]))
        if "l" in data and int(data["l"]) != s.l:
            raise InputError("declared layer count disagrees with layers")
        return s


def _index_set(s: SetSystem, J: Optional[Iterable[int]]) -> tuple[int, ...]:
    J = tuple(range(1, s.t + 1)) if J is None else tuple(sorted(set(J)))
    if not all(1 <= i <= s.t for i in J):
        raise InputError(f"index set {J} leaves [1, {s.t}]")
    return J


def weight(s: SetSystem, J: Optional[Iterable[int]] = None) -> int:
    """sum |I_i| - |union I_i| over i in J."""
    J = _index_set(s, J)
    if not J:
        raise EmptyIndexSet("weight of an empty index set")
    sets = [s.I(i) for i in J]
    return sum(map(len, sets)) - len(frozenset().union(*sets))


def generalized_weight(s: SetSystem, J: Optional[Iterable[int]] = None, l: int = 1) -> int:
    """sum over ground elements of max(|S_j & J| - l, 0)."""
    J = set(_index_set(s, J))
    counts = Counter(j for i in J for j in s.I(i))
    return sum(max(c - l, 0) for c in counts.values())


def sets_weight(sets: Sequence[frozenset]) -> int:
    return sum(map(len, sets)) - len(frozenset().union(*sets)) if sets else 0


def derived_hypergraph(s: SetSystem) -> Hypergraph:
    """Edge e_j = {i : j in I_i} for each ground element j lying in some set."""
    edges, labels = [], []
    for j in range(1, s.n + 1):
        e = s.S(j)
        if e:
            edges.append(e)
            labels.append(j)
    return Hypergraph(s.t, tuple(edges), tuple(labels))


def hypergraph_weight(h: Hypergraph, J: Iterable[int]) -> int:
    J = set(J)
    return sum(max(0, len(e & J) - 1) for e in h.edges)


def triple_intersections_empty(s: SetSystem, J: Optional[Iterable[int]] = None) -> bool:
    J = set(_index_set(s, J))
    counts = Counter(j for i in J for j in s.I(i))
    return all(c <= 2 for c in counts.values())


def _subsets(J: Sequence[int], min_size: int = 1):
    for r in range(min_size, len(J) + 1):
        yield from itertools.combinations(J, r)


def weight_bound_holds(s: SetSystem, k: float, J: Optional[Iterable[int]] = None, proper_only: bool = False) -> bool:
    """wt(I_J') <= (|J'|-1)k for every nonempty J' (proper subsets only if asked)."""
    J = _index_set(s, J)
    if len(J) > SUBSET_SCAN_LIMIT:
        raise TooLarge(f"|J| = {len(J)} exceeds subset-scan limit {SUBSET_SCAN_LIMIT}")
    for sub in _subsets(J, 2):
        if proper_only and len(sub) == len(J):
            continue
        if weight(s, sub) > (len(sub) - 1) * k:
            return False
    return True


def tight_system_conditions(s: SetSystem, k: int, J: Optional[Iterable[int]] = None) -> dict[str, bool]:
    J = _index_set(s, J)
    return {
        "i": triple_intersections_empty(s, J),
        "ii": weight_bound_holds(s, k, J),
        "iii": len(J) >= 2 and weight(s, J) == (len(J) - 1) * k,
    }


def conjecture_conditions(s: SetSystem, k: int, C: float = 1.0) -> bool:
    """wt(I_J) <= Ck(|J|-1) for proper J and wt(I_[t]) >= Ck(t-1).

    With C = 1 this is the exact-weight matrix conjecture once the upper bound
    is also imposed at [t]."""
    if not weight_bound_holds(s, C * k, proper_only=True):
        return False
    w = weight(s)
    return w >= C * k * (s.t - 1) if C != 1 else w == k * (s.t - 1)


def smallest_heavy_subset(sets: Sequence[frozenset], k: int) -> Optional[tuple[int, ...]]:
    """Smallest S (0-based positions, |S| >= 2) with wt(I_S) >= k(|S|-1); ties by lex order."""
    idx = list(range(len(sets)))
    if len(idx) > SUBSET_SCAN_LIMIT:
        raise TooLarge(f"{len(idx)} sets exceed subset-scan limit {SUBSET_SCAN_LIMIT}")
    for sub in _subsets(idx, 2):
        if sets_weight([sets[i] for i in sub]) >= k * (len(sub) - 1):
            return sub
    return None


def trim_to_weight(sets: Sequence[frozenset], target: int) -> list[frozenset]:
    """Drop shared elements until the weight equals ``target``.

    Each step takes the largest set (lowest position on ties) that still holds
    an element shared with another set, and removes its smallest such element.
    Without triple intersections every step lowers the weight by exactly one.
    """
    cur = [set(x) for x in sets]
    w = sets_weight([frozenset(x) for x in cur])
    if w < target:
        raise InputError(f"weight {w} already below target {target}")
    while w > target:
        counts = Counter(j for x in cur for j in x)
        order = sorted(range(len(cur)), key=lambda i: (-len(cur[i]), i))
        for i in order:
            shared = sorted(j for j in cur[i] if counts[j] >= 2)
            if shared:
                cur[i].discard(shared[0])
                break
        else:
            raise InputError("no shared element left to remove")
        w = sets_weight([frozenset(x) for x in cur])
    return [frozenset(x) for x in cur]


def count_condition1_systems(t: int, n: int) -> int:
    """Exhaustive count of (J, (I'_i)_{i in J}) with no element in three sets."""
    if t * n > 12:
        raise TooLarge("exhaustive count limited to t*n <= 12")
    total = 0
    for J in _subsets(list(range(t)), 0):
        m = len(J)
        for masks in itertools.product(range(1 << n), repeat=m):
            ok = all(sum((mask >> j) & 1 for mask in masks) <= 2 for j in range(n))
            total += ok
    return total


# -------------------------------------------------------- intersection matrix

Layout = str  # "M" or "M'"


@dataclass(frozen=True)
class IntersectionMatrix:
    """Symbolic M_{k,(I_i : i in J)}.

    Bottom row for pair {a, b} and element s in I_a & I_b holds x_s^e in the
    pair's column e (0 <= e < k). Entries are never expanded into polynomials.
    """

    k: int
    system: SetSystem  # already restricted to J and renumbered 1..|J|
    J: tuple[int, ...]
    bottom: tuple[tuple[int, int], ...] = field(init=False)  # (pair position, s)

    def __post_init__(self):
        sets = self.system.sets
        rows = []
        for pos, (a, b) in enumerate(pair_order(self.system.t)):
            rows.extend((pos, s) for s in sorted(sets[a - 1] & sets[b - 1]))
        object.__setattr__(self, "bottom", tuple(rows))

    @property
    def m(self) -> int:
        return self.system.t

    @property
    def n_pairs(self) -> int:
        return math.comb(self.m, 2)

    @property
    def n_top(self) -> int:
        return math.comb(self.m - 1, 2) * self.k

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_top + len(self.bottom), self.n_pairs * self.k)

    @property
    def is_square(self) -> bool:
        return self.shape[0] == self.shape[1]

    @property
    def degree(self) -> int:
        """Total degree bound (|J|-1)k(k-1) of a maximal minor."""
        return (self.m - 1) * self.k * (self.k - 1)

    def col(self, pair_pos: int, power: int, layout: Layout = "M") -> int:
        if layout == "M":
            return pair_pos * self.k + power
        return power * self.n_pairs + pair_pos

    def _top_row(self, r: int, e: int, layout: Layout) -> int:
        if layout == "M":
            return r * self.k + e
        return e * math.comb(self.m - 1, 2) + r

    def entries(self, layout: Layout = "M"):
        """Nonzero entries as (row, col, sign, var or None, exponent)."""
        if layout not in ("M", "M'"):
            raise InputError(f"unknown layout {layout!r}")
        for r, brow in enumerate(_basis_rows(self.m)):
            for c, v in enumerate(brow):
                if v:
                    for e in range(self.k):
                        yield (self._top_row(r, e, layout), self.col(c, e, layout), v, None, 0)
        for b, (pos, s) in enumerate(self.bottom):
            for e in range(self.k):
                yield (self.n_top + b, self.col(pos, e, layout), 1, s, e)

    def symbolic(self, layout: Layout = "M") -> list[list[str]]:
        """Dense string view: '0', '1', '-1', 'x3', 'x3^2'."""
        rows, cols = self.shape
        out = [["0"] * cols for _ in range(rows)]
        for r, c, sign, var, e in self.entries(layout):
            if var is None or e == 0:
                out[r][c] = str(sign)
            else:
                out[r][c] = f"x{var}" + (f"^{e}" if e > 1 else "")
        return out

    def evaluate(self, alpha: Sequence[Union[int, FieldElement]], p: Optional[int] = None,
                 layout: Layout = "M", rows: Optional[Sequence[int]] = None) -> list[list[int]]:
        """Concrete matrix at alpha (mod p, or over the integers when p is None)."""
        if len(alpha) != self.system.n:
            raise InputError(f"alpha has {len(alpha)} coordinates, need {self.system.n}")
        vals = [int(a) for a in alpha]
        nrows, ncols = self.shape
        mat = [[0] * ncols for _ in range(nrows)]
        for r, c, sign, var, e in self.entries(layout):
            v = sign if var is None else (pow(vals[var - 1], e, p) if p else vals[var - 1] ** e)
            mat[r][c] = v % p if p else v
        if rows is not None:
            mat = [mat[r] for r in rows]
        return mat

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "J": list(self.J),
            "shape": list(self.shape),
            "top": {"basis": f"B_{self.m} (x) I_{self.k}", "rows": self.n_top},
            "entries": [list(e) for e in self.entries("M") if e[3] is not None],
        }


def build(s: SetSystem, J: Optional[Iterable[int]] = None, k: int = 1) -> IntersectionMatrix:
    J = _index_set(s, J)
    if len(J) < 2:
        raise InputError("an intersection matrix needs |J| >= 2")
    if k < 1:
        raise InputError("k must be positive")
    return IntersectionMatrix(k, s.restrict(J), J)


# ------------------------------------------------------------ nonsingularity

@dataclass(frozen=True)
class Nonsingular:
    alpha: tuple[int, ...]
    p: int
    trial: int

    def __bool__(self):
        return True


@dataclass(frozen=True)
class ProbablySingular:
    confidence: float
    trials: int
    p: int
    degree: int

    def __bool__(self):
        return False


def nonsingular_randomized(m: IntersectionMatrix, spec: FieldSpec, trials: int = 3,
                           seed: SeedLike = None):
    """Full column rank at a uniformly random alpha, up to ``trials`` times."""
    rng = as_rng(seed)
    p = spec.p
    d = m.degree
    if d and d / p > 1e-3:
        log.warning("degree %d is not small against p = %d; verdicts are weak", d, p)
    ncols = m.shape[1]
    for trial in range(trials):
        alpha = tuple(rng.randrange(p) for _ in range(m.system.n))
        if rank_mod_p(m.evaluate(alpha, p), p) == ncols:
            return Nonsingular(alpha, p, trial)
    if m.shape[0] < ncols or d == 0:
        confidence = 1.0  # too few rows, or a constant matrix: singular outright
    else:
        confidence = 1.0 - (d / p) ** trials
    return ProbablySingular(confidence, trials, p, d)


@dataclass(frozen=True)
class Certificate:
    J: tuple[int, ...]
    k: int
    graph: MultiGraph
    packing: TreePacking
    monomial: dict  # variable s -> exponent
    transversal: tuple[tuple[int, tuple[int, int], int], ...]  # (s, pair, power)
    block_dets: tuple[int, ...]

    def monomial_str(self) -> str:
        parts = [f"x{s}" + (f"^{e}" if e > 1 else "") for s, e in sorted(self.monomial.items()) if e]
        return "*".join(parts) or "1"


def intersection_multigraph(s: SetSystem, J: Sequence[int]) -> MultiGraph:
    """|I_a & I_b| parallel edges between a and b, labelled by the shared element."""
    sub = s.restrict(J)
    sets = sub.sets
    edges = [Edge(a, b, x) for a, b in pair_order(sub.t) for x in sorted(sets[a - 1] & sets[b - 1])]
    return MultiGraph(sub.t, tuple(edges))


def _reduced_basis_det(t: int, removed_pairs: Iterable[tuple[int, int]]) -> int:
    if t < 3:
        return 1
    drop = {pair_index(*e) for e in removed_pairs}
    rows = _basis_rows(t)
    return integer_det([[v for c, v in enumerate(r) if c not in drop] for r in rows])


def certify_nonsingular_treepack(s: SetSystem, J: Optional[Iterable[int]] = None, k: int = 1) -> Optional[Certificate]:
    """Monomial certificate of nonsingularity from a k-tree packing.

    Raises PreconditionFailed naming the first violated condition (i, ii, iii).
    Returns None only if no packing is found, which the conditions rule out.
    """
    J = _index_set(s, J)
    if len(J) < 2:
        raise PreconditionFailed("iii", "need |J| >= 2")
    if not triple_intersections_empty(s, J):
        raise PreconditionFailed("i", "some element lies in three sets")
    if not weight_bound_holds(s, k, J):
        raise PreconditionFailed("ii", "a subfamily is too heavy")
    w = weight(s, J)
    if w != (len(J) - 1) * k:
        raise PreconditionFailed("iii", f"wt = {w}, need {(len(J) - 1) * k}")
    g = intersection_multigraph(s, J)
    packing = tree_packing(g, k)
    if packing is None:
        return None
    monomial: dict = {}
    transversal = []
    dets = []
    basis = cycle_basis(len(J)) if len(J) >= 3 else None
    for i, tree in enumerate(packing.trees):
        pairs = [g.edges[x].pair for x in sorted(tree)]
        if basis is not None and not column_removal_rank_test(basis, pairs):
            raise AssertionError("tree columns dropped the rank of B_t")
        dets.append(_reduced_basis_det(len(J), pairs))
        for x in sorted(tree):
            e = g.edges[x]
            monomial[e.label] = monomial.get(e.label, 0) + i
            transversal.append((e.label, e.pair, i))
    return Certificate(J, k, g, packing, monomial, tuple(transversal), tuple(dets))


def transversal_criterion_check(m: IntersectionMatrix, Q: Sequence[tuple[int, tuple[int, int], int]]) -> bool:
    """det(M_Q) != 0 for a partial transversal Q of (s, pair, power) entries.

    Q picks (|J|-1)k distinct bottom rows and one column per entry in the M'
    labelling; M_Q is what remains of the top block I_k (x) B_t after the
    chosen columns are deleted.
    """
    need = (m.m - 1) * m.k
    if len(Q) != need:
        raise NotATransversal(f"{len(Q)} entries, need {need}")
    rows = set()
    cols = set()
    sets = m.system.sets
    for s, pair, e in Q:
        a, b = min(pair), max(pair)
        if not (1 <= a < b <= m.m) or s not in (sets[a - 1] & sets[b - 1]) or not 0 <= e < m.k:
            raise NotATransversal(f"({s}, {pair}, {e}) is not a nonzero bottom entry")
        row, col = (pair_index(a, b), s), (pair_index(a, b), e)
        if row in rows or col in cols:
            raise NotATransversal("entries share a row or a column")
        rows.add(row)
        cols.add(col)
    if m.m < 3:
        return True
    top = _basis_rows(m.m)
    blocks = []
    for e in range(m.k):
        dropped = {pos for pos, ee in cols if ee == e}
        blocks.append([[v for c, v in enumerate(r) if c not in dropped] for r in top])
    # Block-diagonal: nonzero determinant iff every block is square with full rank.
    return all(len(b[0]) == len(b) and integer_rank(b) == len(b) for b in blocks)


def transversal_graphs(Q: Sequence[tuple[int, tuple[int, int], int]], k: int, t: int) -> list[MultiGraph]:
    out = []
    for e in range(k):
        out.append(MultiGraph(t, tuple(Edge(*pair, s) for s, pair, ee in Q if ee == e)))
    return out


def transversal_is_packing(Q, k: int, t: int) -> bool:
    """Label graphs Q_0..Q_{k-1} are edge-disjoint spanning trees of [t]."""
    graphs = transversal_graphs(Q, k, t)
    used = set()
    for g in graphs:
        if not is_spanning_tree(g, range(g.m)):
            return False
        keys = {(e.pair, e.label) for e in g.edges}
        if used & keys:
            return False
        used |= keys
    return True


# ------------------------------------------------------------ kernel vector

@dataclass(frozen=True)
class KernelCheck:
    product_zero: bool
    nonzero: bool
    u: tuple[int, ...]
    product: tuple[int, ...]

    def __bool__(self):
        return self.product_zero and self.nonzero


def poly_eval(coeffs: Sequence[int], x: int, p: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % p
    return acc


def kernel_vector_check(
    polys: Sequence[Sequence[int]],
    s: SetSystem,
    J: Optional[Iterable[int]],
    alpha: Sequence[Union[int, FieldElement]],
    p: int,
    received: Optional[Sequence[Sequence[int]]] = None,
    k: Optional[int] = None,
) -> KernelCheck:
    """Form u = (f_a - f_b : pairs of J) and test M(alpha) u = 0.

    ``polys[i-1]`` is f_i as k coefficients (constant first). When received
    words y^(1..l) are given, every layer I_i^(r) must lie inside the
    agreement set of f_i with y^(r).
    """
    J = _index_set(s, J)
    k = len(polys[0]) if k is None else k
    if any(len(f) != k for f in polys):
        raise InputError("all polynomials need k coefficients")
    alpha = [int(a) % p for a in alpha]
    if received is not None:
        if len(received) != s.l:
            raise AgreementMismatch(f"{len(received)} received words for {s.l} layers")
        for i in J:
            for r, layer in enumerate(s.layers[i - 1]):
                for j in layer:
                    if poly_eval(polys[i - 1], alpha[j - 1], p) != int(received[r][j - 1]) % p:
                        raise AgreementMismatch(f"f_{i} disagrees with y^({r + 1}) at coordinate {j}")
    m = build(s, J, k)
    u = []
    for a, b in pair_order(len(J)):
        fa, fb = polys[J[a - 1] - 1], polys[J[b - 1] - 1]
        u.extend((x - y) % p for x, y in zip(fa, fb))
    mat = m.evaluate(alpha, p)
    prod = tuple(sum(x * y for x, y in zip(row, u)) % p for row in mat)
    return KernelCheck(all(v == 0 for v in prod), any(u), tuple(u), prod)
