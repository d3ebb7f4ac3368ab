"""Hypergraphs on [t]: weak partition connectivity, tree-assignments,
signatures of tree-decompositions, distinguishability, and the randomized
connected-subhypergraph procedures.
"""

from __future__ import annotations

import itertools
import json
import logging
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterator, Optional, Sequence

from .errors import (
    EdgeCountMismatch,
    InputError,
    NotADecomposition,
    SearchBudgetExceeded,
    TooLarge,
)
from .fields import SeedLike, as_rng
from .graphs import (
    DEFAULT_PARTITION_BOUND,
    Edge,
    MultiGraph,
    UnionFind,
    is_spanning_tree,
    restricted_growth_strings,
    spanning_trees,
)

log = logging.getLogger(__name__)

DEFAULT_ASSIGNMENT_BUDGET = 10**6
DEFAULT_DECOMPOSITION_BUDGET = 10**6


@dataclass(frozen=True)
class Hypergraph:
    """Multiset of vertex subsets of [t]; repeated edges are kept by position.

    ``labels`` name the edges (defaults to their positions) and become the
    edge labels of every tree-assignment.
    """

    t: int
    edges: tuple[frozenset, ...] = ()
    labels: Optional[tuple[Hashable, ...]] = None

    def __post_init__(self):
        edges = tuple(frozenset(e) for e in self.edges)
        object.__setattr__(self, "edges", edges)
        for e in edges:
            if not e or not all(1 <= v <= self.t for v in e):
                raise InputError(f"edge {sorted(e)} is empty or leaves [1, {self.t}]")
        if self.labels is None:
            object.__setattr__(self, "labels", tuple(range(len(edges))))
        elif len(self.labels) != len(edges):
            raise InputError("one label per edge required")
        else:
            object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def m(self) -> int:
        return len(self.edges)

    def sub(self, indices: Sequence[int]) -> "Hypergraph":
        idx = list(indices)
        return Hypergraph(self.t, tuple(self.edges[i] for i in idx), tuple(self.labels[i] for i in idx))

    def to_json(self) -> dict:
        out = {"t": self.t, "edges": [sorted(e) for e in self.edges]}
        if self.labels != tuple(range(self.m)):
            out["labels"] = list(self.labels)
        return out

    @classmethod
    def from_json(cls, data) -> "Hypergraph":
        if isinstance(data, str):
            data = json.loads(data)
        labels = data.get("labels")
        return cls(int(data["t"]), tuple(frozenset(e) for e in data["edges"]),
                   None if labels is None else tuple(labels))


@dataclass(frozen=True)
class TreeDecomposition:
    """Ordered k-tuple of edge-index sets; position i carries weight i."""

    trees: tuple[frozenset, ...]

    @property
    def k(self) -> int:
        return len(self.trees)

    def swapped(self, i: int, j: int) -> "TreeDecomposition":
        trees = list(self.trees)
        trees[i], trees[j] = trees[j], trees[i]
        return TreeDecomposition(tuple(trees))


# ------------------------------------------------------------ connectivity

def _partition_sum(edges: Sequence[frozenset], rgs: Sequence[int]) -> int:
    return sum(len({rgs[v - 1] for v in e}) - 1 for e in edges)


def partition_ratio(h: Hypergraph, bound: int = DEFAULT_PARTITION_BOUND) -> Fraction:
    """Exact min over partitions |P| >= 2 of sum_e (P(e)-1) / (|P|-1)."""
    if h.t > bound:
        raise TooLarge(f"t={h.t} exceeds partition enumeration bound {bound}")
    if h.t < 2:
        raise InputError("weak partition connectivity needs t >= 2")
    best: Optional[Fraction] = None
    for rgs in restricted_growth_strings(h.t):
        nb = max(rgs) + 1
        if nb == 1:
            continue
        r = Fraction(_partition_sum(h.edges, rgs), nb - 1)
        if best is None or r < best:
            best = r
            if best == 0:
                break
    return best


def weak_partition_connectivity(h: Hypergraph, bound: int = DEFAULT_PARTITION_BOUND) -> int:
    """Largest integer k with sum_e (P(e)-1) >= k(|P|-1) for every partition P."""
    return math.floor(partition_ratio(h, bound))


def is_weakly_partition_connected(h: Hypergraph, k: float, bound: int = DEFAULT_PARTITION_BOUND) -> bool:
    """Real-valued threshold version (k may be C*k with fractional C)."""
    return partition_ratio(h, bound) >= Fraction(k).limit_denominator(10**9)


def connected_components(h: Hypergraph) -> int:
    uf = UnionFind(range(1, h.t + 1))
    for e in h.edges:
        first, *rest = sorted(e)
        for v in rest:
            uf.union(first, v)
    return len({uf.find(v) for v in range(1, h.t + 1)})


def is_connected(h: Hypergraph) -> bool:
    return connected_components(h) == 1


def sufficient_weak_connectivity(h: Hypergraph, k: float, max_t: int = 20) -> bool:
    """Subset-scan sufficient condition for k-weak partition connectivity.

    True iff sum_e max(0, |e & J| - 1) <= k(|J|-1) for every nonempty proper
    J of [t], and sum_e (|e|-1) >= k(t-1).
    """
    if h.t > max_t:
        raise TooLarge(f"t={h.t} exceeds subset-scan bound {max_t}")
    if sum(len(e) - 1 for e in h.edges) < k * (h.t - 1):
        return False
    masks = [sum(1 << (v - 1) for v in e) for e in h.edges]
    full = (1 << h.t) - 1
    for J in range(1, full):
        size = bin(J).count("1")
        load = sum(max(0, bin(m & J).count("1") - 1) for m in masks)
        if load > k * (size - 1):
            return False
    return True


# --------------------------------------------------------- tree assignments

def _edge_options(e: frozenset, trees_only: bool) -> list[tuple[tuple[int, int], ...]]:
    verts = sorted(e)
    if len(verts) == 1:
        return [()]
    pairs = list(itertools.combinations(verts, 2))
    local = MultiGraph.from_pairs(len(verts), [(verts.index(a) + 1, verts.index(b) + 1) for a, b in pairs])
    out = []
    for combo in itertools.combinations(range(len(pairs)), len(verts) - 1):
        if trees_only and not is_spanning_tree(local, combo):
            continue
        out.append(tuple(pairs[i] for i in combo))
    return out


def assignment_count(h: Hypergraph, trees_only: bool = True) -> int:
    total = 1
    for e in h.edges:
        s = len(e)
        total *= s ** (s - 2) if trees_only and s >= 2 else math.comb(math.comb(s, 2), s - 1)
    return total


def tree_assignments(
    h: Hypergraph, trees_only: bool = True, budget: int = DEFAULT_ASSIGNMENT_BUDGET
) -> Iterator[MultiGraph]:
    """Every way to replace each edge e by |e|-1 labelled graph edges inside e."""
    if assignment_count(h, trees_only) > budget:
        raise SearchBudgetExceeded(
            f"{assignment_count(h, trees_only)} tree-assignments exceed budget {budget}"
        )
    options = [_edge_options(e, trees_only) for e in h.edges]
    for choice in itertools.product(*options):
        edges = []
        for label, pairs in zip(h.labels, choice):
            edges.extend(Edge(u, v, label) for u, v in pairs)
        yield MultiGraph(h.t, tuple(edges))


def star_assignment(h: Hypergraph) -> MultiGraph:
    """Tree-assignment replacing each edge by a star centred at its smallest vertex."""
    edges = []
    for e, label in zip(h.edges, h.labels):
        c, *rest = sorted(e)
        edges.extend(Edge(c, v, label) for v in rest)
    return MultiGraph(h.t, tuple(edges))


# ------------------------------------------------------ decompositions

def label_order(g: MultiGraph) -> list:
    seen: dict = {}
    for e in g.edges:
        seen.setdefault(e.label, None)
    return list(seen)


def _check_decomposition(g: MultiGraph, d: TreeDecomposition) -> None:
    covered: set[int] = set()
    for tree in d.trees:
        if covered & tree:
            raise NotADecomposition("trees share an edge")
        covered |= tree
        if not is_spanning_tree(g, tree):
            raise NotADecomposition(f"{sorted(tree)} is not a spanning tree")
    if covered != set(range(g.m)):
        raise NotADecomposition("trees do not cover every edge")


def signature_of(g: MultiGraph, d: TreeDecomposition) -> dict:
    """sum_i i * (label counts of tree i), over every label of ``g``."""
    _check_decomposition(g, d)
    sig = {lab: 0 for lab in label_order(g)}
    for i, tree in enumerate(d.trees):
        for idx in tree:
            sig[g.edges[idx].label] += i
    return sig


def _raw_signature(g: MultiGraph, trees: Sequence[frozenset], order: list) -> tuple:
    pos = {lab: j for j, lab in enumerate(order)}
    sig = [0] * len(order)
    for i, tree in enumerate(trees):
        if i:
            for idx in tree:
                sig[pos[g.edges[idx].label]] += i
    return tuple(sig)


def tree_decompositions(
    g: MultiGraph, k: int, budget: int = DEFAULT_DECOMPOSITION_BUDGET
) -> Iterator[TreeDecomposition]:
    """All ordered k-tree-decompositions of ``g`` (edges must number k(t-1))."""
    if g.m != k * (g.t - 1):
        raise EdgeCountMismatch(f"{g.m} edges, expected k(t-1) = {k * (g.t - 1)}")
    produced = 0

    def rec(remaining: frozenset, prefix: list):
        nonlocal produced
        if len(prefix) == k - 1:
            if is_spanning_tree(g, remaining):
                produced += 1
                if produced > budget:
                    raise SearchBudgetExceeded(f"more than {budget} decompositions")
                yield TreeDecomposition(tuple(prefix) + (remaining,))
            return
        for tree in spanning_trees(g, remaining):
            prefix.append(tree)
            yield from rec(remaining - tree, prefix)
            prefix.pop()

    yield from rec(frozenset(range(g.m)), [])


def signature_counts(g: MultiGraph, k: int, budget: int = DEFAULT_DECOMPOSITION_BUDGET):
    """(Counter over signature tuples, decompositions in enumeration order, label order)."""
    order = label_order(g)
    decomps = list(tree_decompositions(g, k, budget))
    counts = Counter(_raw_signature(g, d.trees, order) for d in decomps)
    return counts, decomps, order


def is_k_distinguishable(
    g: MultiGraph, k: int, budget: int = DEFAULT_DECOMPOSITION_BUDGET
) -> tuple[bool, Optional[TreeDecomposition]]:
    """Some k-tree-decomposition has a signature no other decomposition shares."""
    counts, decomps, order = signature_counts(g, k, budget)
    for d in decomps:
        if counts[_raw_signature(g, d.trees, order)] == 1:
            return True, d
    return False, None


def has_unique_signature(g: MultiGraph, d: TreeDecomposition, budget: int = DEFAULT_DECOMPOSITION_BUDGET) -> bool:
    _check_decomposition(g, d)
    counts, _, order = signature_counts(g, d.k, budget)
    return counts[_raw_signature(g, d.trees, order)] == 1


def label_disjoint_decomposition_check(g: MultiGraph, d: TreeDecomposition) -> bool:
    """Every label's edges sit inside a single tree (sufficient for distinguishability)."""
    home: dict = {}
    for i, tree in enumerate(d.trees):
        for idx in tree:
            lab = g.edges[idx].label
            if home.setdefault(lab, i) != i:
                return False
    return True


# ------------------------------------------------------ random subhypergraphs

def random_connected_subhypergraph(
    h: Hypergraph, m: int, seed: SeedLike = None, replace: bool = False
) -> tuple[Hypergraph, bool]:
    """Sample m edges (uniformly, with or without replacement); report connectivity."""
    rng = as_rng(seed)
    if replace:
        idx = [rng.randrange(h.m) for _ in range(m)] if h.m else []
    else:
        if m > h.m:
            raise InputError(f"cannot draw {m} of {h.m} edges without replacement")
        idx = rng.sample(range(h.m), m)
    sub = h.sub(idx)
    return sub, is_connected(sub)


def _greedy_connected_groups(h: Hypergraph, order: Sequence[int]) -> list[list[int]]:
    groups, current = [], []
    uf = UnionFind(range(1, h.t + 1))
    comps = h.t
    for i in order:
        current.append(i)
        first, *rest = sorted(h.edges[i])
        for v in rest:
            if uf.union(first, v):
                comps -= 1
        if comps == 1:
            groups.append(current)
            current = []
            uf = UnionFind(range(1, h.t + 1))
            comps = h.t
    return groups


def disjoint_connected_subhypergraphs(
    h: Hypergraph,
    k: int,
    max_retries: int = 64,
    seed: SeedLike = None,
    check_connectivity: bool = True,
) -> Optional[list[list[int]]]:
    """k edge-disjoint connected sub-hypergraphs (as edge-index lists), or None.

    Each round shuffles the edges into 2k groups of floor(|E|/2k) edges plus a
    leftover and keeps the connected groups. When a round yields fewer than k,
    the same shuffle is also cut greedily into consecutive connected runs.
    """
    rng = as_rng(seed)
    if check_connectivity and h.t >= 2 and h.t <= DEFAULT_PARTITION_BOUND:
        need = 6 * math.log2(h.t) * k
        if partition_ratio(h) < need:
            log.warning("weak partition connectivity below 6 log t * k = %.2f; success not guaranteed", need)
    if k < 1:
        raise InputError("k must be positive")
    if h.t == 1:
        return [[] for _ in range(k)]
    m = h.m // (2 * k)
    for attempt in range(max_retries):
        order = list(range(h.m))
        rng.shuffle(order)
        found = []
        if m > 0:
            for g in range(2 * k):
                group = sorted(order[g * m:(g + 1) * m])
                if is_connected(h.sub(group)):
                    found.append(group)
        if len(found) < k:
            greedy = [sorted(g) for g in _greedy_connected_groups(h, order)]
            if len(greedy) > len(found):
                found = greedy
        if len(found) >= k:
            return found[:k]
    log.info("no %d disjoint connected groups after %d rounds", k, max_retries)
    return None


def spanning_tree_of(g: MultiGraph, indices: Optional[Sequence[int]] = None) -> Optional[frozenset]:
    uf = UnionFind(g.vertices)
    chosen = [i for i in (range(g.m) if indices is None else indices) if uf.union(*g.edges[i].pair)]
    return frozenset(chosen) if len(chosen) == g.t - 1 else None


def distinguishable_subgraph_from_groups(
    h: Hypergraph, groups: Sequence[Sequence[int]]
) -> tuple[MultiGraph, TreeDecomposition]:
    """Star-assign each connected group, take a spanning tree of each, and stack them.

    Labels of different groups are disjoint, so the returned decomposition
    passes ``label_disjoint_decomposition_check``.
    """
    edges: list[Edge] = []
    trees = []
    for group in groups:
        g_i = star_assignment(h.sub(group))
        tree = spanning_tree_of(g_i)
        if tree is None:
            raise InputError("group is not connected")
        start = len(edges)
        edges.extend(g_i.edges[j] for j in sorted(tree))
        trees.append(frozenset(range(start, len(edges))))
    return MultiGraph(h.t, tuple(edges)), TreeDecomposition(tuple(trees))
