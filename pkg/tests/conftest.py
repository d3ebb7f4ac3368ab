import itertools

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from rsnwt.graphs import MultiGraph
from rsnwt.hypergraphs import Hypergraph
from rsnwt.intmat import SetSystem

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# Filled by tests/test_acceptance.py, printed at the end of the run.
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])


# ------------------------------------------------------------ strategies

@st.composite
def multigraphs(draw, max_t=5, max_edges=8, min_t=2):
    t = draw(st.integers(min_t, max_t))
    pairs = st.tuples(st.integers(1, t), st.integers(1, t)).filter(lambda p: p[0] != p[1])
    edges = draw(st.lists(pairs, max_size=max_edges))
    return MultiGraph.from_pairs(t, edges)


@st.composite
def set_systems(draw, max_t=5, max_n=6, min_t=2, layers=1):
    t = draw(st.integers(min_t, max_t))
    n = draw(st.integers(1, max_n))
    sub = st.frozensets(st.integers(1, n))
    lay = draw(st.lists(st.tuples(*[sub] * layers), min_size=t, max_size=t))
    return SetSystem(n, t, tuple(lay))


@st.composite
def hypergraphs(draw, max_t=5, max_edges=6, max_size=4, min_t=2):
    t = draw(st.integers(min_t, max_t))
    edge = st.frozensets(st.integers(1, t), min_size=2, max_size=min(max_size, t))
    return Hypergraph(t, tuple(draw(st.lists(edge, max_size=max_edges))))


def brute_weight(sets):
    """Independent weight: sum of sizes minus size of the union."""
    union = set()
    for x in sets:
        union |= set(x)
    return sum(len(x) for x in sets) - len(union)


def brute_partition_ratio(t, edges):
    """min over partitions with >= 2 blocks of sum(P(e)-1)/(|P|-1), by direct enumeration."""
    from fractions import Fraction

    best = None
    for labels in itertools.product(range(t), repeat=t):
        # canonical labellings only
        seen = {}
        canon = tuple(seen.setdefault(x, len(seen)) for x in labels)
        if canon != labels:
            continue
        nb = len(set(labels))
        if nb < 2:
            continue
        cross = sum(len({labels[v - 1] for v in e}) - 1 for e in edges)
        r = Fraction(cross, nb - 1)
        best = r if best is None or r < best else best
    return best


# ------------------------------------------------------------ fixtures

@pytest.fixture
def three_triangles():
    """Three triangles on 4 vertices, coloured green, orange, magenta."""
    h = Hypergraph(4, (frozenset({1, 2, 3}), frozenset({1, 3, 4}), frozenset({1, 2, 4})),
                   ("green", "orange", "magenta"))
    g = MultiGraph.from_pairs(
        4,
        [(1, 2), (1, 3), (1, 3), (1, 4), (1, 2), (1, 4)],
        ["green", "green", "orange", "orange", "magenta", "magenta"],
    )
    return h, g


@pytest.fixture
def pairwise_singletons():
    """Four sets whose six pairwise intersections are the singletons 1..6."""
    return SetSystem.from_sets(6, [{1, 2, 4}, {1, 3, 5}, {2, 3, 6}, {4, 5, 6}])
