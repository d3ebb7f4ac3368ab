"""Multigraphs on [t], partitions, and spanning-tree packing.

Vertices are 1-based. Parallel edges are distinct by list position, so every
packing is expressed as sets of edge *indices*.

Packing uses the matroid-partition augmenting-path method (k copies of the
graphic matroid); ``brute_force_packing`` enumerates spanning trees and is kept
as an independent oracle for small inputs.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterator, Optional, Sequence

from .errors import EmptyGraph, InputError, TooLarge

DEFAULT_PARTITION_BOUND = 12


class UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    label: Optional[Hashable] = None

    def __post_init__(self):
        if self.u == self.v:
            raise InputError(f"self-loop at vertex {self.u}")
        if self.u > self.v:
            u, v = self.v, self.u
            object.__setattr__(self, "u", u)
            object.__setattr__(self, "v", v)

    @property
    def pair(self) -> tuple[int, int]:
        return (self.u, self.v)


@dataclass(frozen=True)
class MultiGraph:
    t: int
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        edges = tuple(e if isinstance(e, Edge) else Edge(*e) for e in self.edges)
        object.__setattr__(self, "edges", edges)
        for e in edges:
            if not (1 <= e.u <= self.t and 1 <= e.v <= self.t):
                raise InputError(f"edge {e.pair} has an endpoint outside [1, {self.t}]")

    @classmethod
    def from_pairs(cls, t: int, pairs, labels=None) -> "MultiGraph":
        if labels is None:
            return cls(t, tuple(Edge(u, v) for u, v in pairs))
        return cls(t, tuple(Edge(u, v, lab) for (u, v), lab in zip(pairs, labels)))

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def vertices(self) -> range:
        return range(1, self.t + 1)

    def subgraph(self, indices) -> "MultiGraph":
        return MultiGraph(self.t, tuple(self.edges[i] for i in sorted(indices)))

    def to_json(self) -> dict:
        out = []
        for e in self.edges:
            out.append([e.u, e.v] if e.label is None else [e.u, e.v, e.label])
        return {"t": self.t, "edges": out}

    @classmethod
    def from_json(cls, data) -> "MultiGraph":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(int(data["t"]), tuple(Edge(*e) for e in data["edges"]))


@dataclass(frozen=True)
class TreePacking:
    trees: tuple[frozenset, ...] = field(default_factory=tuple)

    @property
    def k(self) -> int:
        return len(self.trees)


def is_spanning_tree(g: MultiGraph, indices) -> bool:
    indices = list(indices)
    if len(indices) != g.t - 1:
        return False
    uf = UnionFind(g.vertices)
    return all(uf.union(*g.edges[i].pair) for i in indices)


def is_forest(g: MultiGraph, indices) -> bool:
    uf = UnionFind(g.vertices)
    return all(uf.union(*g.edges[i].pair) for i in indices)


def verify_packing(g: MultiGraph, packing: TreePacking) -> bool:
    """Independent check: disjoint index sets, each a spanning tree of [t]."""
    seen: set[int] = set()
    for tree in packing.trees:
        if seen & tree or not all(0 <= i < g.m for i in tree):
            return False
        seen |= tree
        if not is_spanning_tree(g, tree):
            return False
    return True


# ---------------------------------------------------------------- partitions

def restricted_growth_strings(t: int) -> Iterator[tuple[int, ...]]:
    """All set partitions of [t] as restricted-growth strings (a_1 = 0)."""
    if t == 0:
        yield ()
        return
    a = [0] * t

    def rec(i: int, top: int):
        if i == t:
            yield tuple(a)
            return
        for v in range(top + 2):
            a[i] = v
            yield from rec(i + 1, max(top, v))

    yield from rec(1, 0)


@dataclass(frozen=True)
class Partition:
    blocks: tuple[frozenset, ...]

    @classmethod
    def from_rgs(cls, rgs: Sequence[int]) -> "Partition":
        nb = max(rgs) + 1 if rgs else 0
        blocks = [set() for _ in range(nb)]
        for v, b in enumerate(rgs, start=1):
            blocks[b].add(v)
        return cls(tuple(frozenset(b) for b in blocks))

    def __len__(self):
        return len(self.blocks)

    def block_of(self) -> dict[int, int]:
        return {v: i for i, b in enumerate(self.blocks) for v in b}


def partitions(t: int, bound: int = DEFAULT_PARTITION_BOUND) -> Iterator[Partition]:
    if t > bound:
        raise TooLarge(f"t={t} exceeds partition enumeration bound {bound}")
    for rgs in restricted_growth_strings(t):
        yield Partition.from_rgs(rgs)


def cross_edges(g: MultiGraph, p: Partition) -> int:
    where = p.block_of()
    if set(where) != set(g.vertices):
        raise InputError("partition does not cover the vertex set")
    return sum(1 for e in g.edges if where[e.u] != where[e.v])


def is_partition_connected(g: MultiGraph, k: int, bound: int = DEFAULT_PARTITION_BOUND) -> bool:
    """Every partition has at least k(|P|-1) cross-edges."""
    if g.t > bound:
        raise TooLarge(f"t={g.t} exceeds partition enumeration bound {bound}")
    pairs = [e.pair for e in g.edges]
    for rgs in restricted_growth_strings(g.t):
        nb = max(rgs) + 1
        if nb == 1:
            continue
        cross = sum(1 for u, v in pairs if rgs[u - 1] != rgs[v - 1])
        if cross < k * (nb - 1):
            return False
    return True


# ------------------------------------------------------------------ packing

def _forest_path(t: int, forest_edges: dict[int, tuple[int, int]], a: int, b: int) -> Optional[list[int]]:
    """Edge indices on the a-b path in a forest, or None if disconnected."""
    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in range(1, t + 1)}
    for idx, (u, v) in forest_edges.items():
        adj[u].append((v, idx))
        adj[v].append((u, idx))
    prev: dict[int, tuple[int, int]] = {a: (a, -1)}
    queue = deque([a])
    while queue:
        x = queue.popleft()
        if x == b:
            break
        for y, idx in adj[x]:
            if y not in prev:
                prev[y] = (x, idx)
                queue.append(y)
    if b not in prev:
        return None
    path = []
    x = b
    while x != a:
        x, idx = prev[x]
        path.append(idx)
    return path


def max_forest_packing(g: MultiGraph, k: int) -> list[set[int]]:
    """k edge-disjoint forests of maximum total size (matroid partition)."""
    if k < 1:
        raise InputError("k must be positive")
    forests: list[dict[int, tuple[int, int]]] = [dict() for _ in range(k)]
    owner: dict[int, int] = {}
    for e0 in range(g.m):
        # BFS in the exchange graph: node = edge index waiting for a home.
        parent: dict[int, tuple[int, int]] = {e0: (-1, -1)}
        queue = deque([e0])
        found = None
        while queue and found is None:
            x = queue.popleft()
            u, v = g.edges[x].pair
            for i in range(k):
                if owner.get(x) == i:
                    continue
                path = _forest_path(g.t, forests[i], u, v)
                if path is None:
                    found = (x, i)
                    break
                for y in path:
                    if y not in parent:
                        parent[y] = (x, i)
                        queue.append(y)
        if found is None:
            continue
        # Replay the shortest augmenting path backwards.
        x, i = found
        while x != -1:
            old = owner.get(x)
            if old is not None:
                del forests[old][x]
            forests[i][x] = g.edges[x].pair
            owner[x] = i
            # parent[x] = (y, j): y enters forest j, taking the slot x vacated.
            x, i = parent[x]
    return [set(f) for f in forests]


def tree_packing(g: MultiGraph, k: int) -> Optional[TreePacking]:
    """k edge-disjoint spanning trees, or None when none exist."""
    if g.t == 0:
        raise EmptyGraph("graph has no vertices")
    if k < 1:
        raise InputError("k must be positive")
    if g.m < k * (g.t - 1):
        return None
    forests = max_forest_packing(g, k)
    if any(len(f) != g.t - 1 for f in forests):
        return None
    packing = TreePacking(tuple(frozenset(f) for f in forests))
    assert verify_packing(g, packing)
    return packing


def spanning_trees(g: MultiGraph, available=None) -> Iterator[frozenset]:
    """All spanning trees (as edge-index sets) using only ``available`` edges."""
    idx = sorted(range(g.m) if available is None else available)
    need = g.t - 1
    if need == 0:
        yield frozenset()
        return
    # Backtracking over edges in index order with union-find snapshots.
    chosen: list[int] = []

    def rec(pos: int, parent: dict[int, int]):
        if len(chosen) == need:
            yield frozenset(chosen)
            return
        if len(idx) - pos < need - len(chosen):
            return
        for p in range(pos, len(idx)):
            if len(idx) - p < need - len(chosen):
                return
            e = idx[p]
            u, v = g.edges[e].pair
            ru, rv = _find(parent, u), _find(parent, v)
            if ru == rv:
                continue
            child = dict(parent)
            child[ru] = rv
            chosen.append(e)
            yield from rec(p + 1, child)
            chosen.pop()

    yield from rec(0, {v: v for v in g.vertices})


def _find(parent: dict[int, int], x: int) -> int:
    while parent[x] != x:
        x = parent[x]
    return x


def brute_force_packing(g: MultiGraph, k: int, max_edges: int = 16) -> Optional[TreePacking]:
    """Exhaustive oracle: backtrack over spanning trees of the remaining edges."""
    if g.t == 0:
        raise EmptyGraph("graph has no vertices")
    if g.m > max_edges:
        raise TooLarge(f"{g.m} edges exceeds brute-force bound {max_edges}")

    def rec(remaining: frozenset, depth: int):
        if depth == k:
            return []
        for tree in spanning_trees(g, remaining):
            rest = rec(remaining - tree, depth + 1)
            if rest is not None:
                return [tree] + rest
        return None

    trees = rec(frozenset(range(g.m)), 0)
    return None if trees is None else TreePacking(tuple(trees))


def complete_graph(t: int) -> MultiGraph:
    return MultiGraph.from_pairs(t, itertools.combinations(range(1, t + 1), 2))
