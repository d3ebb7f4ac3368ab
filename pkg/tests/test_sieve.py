import itertools
import math
import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rsnwt.errors import DegenerateSystem, HypothesesUnmet, InputError, WeightDeficit
from rsnwt.intmat import SetSystem, certify_nonsingular_treepack, generalized_weight
from rsnwt.sieve import (
    Reduced,
    SieveConfig,
    SieveTrace,
    bucket_select,
    calc_inequality_violations,
    check_hypotheses,
    generate_admissible_system,
    reduce_to_pairs,
    replay_trace,
    sample_J,
    sampling_probability,
    sieve_run,
    trim_to_tight,
    verify_conditions,
)

from conftest import brute_weight, set_systems

# (l, k, eps, delta) triples for which random systems at t in [10, 12] often meet the hypotheses with c = 8.
FEASIBLE = [(1, 1, 0.5, 1.0), (1, 2, 0.9, 4.0), (2, 1, 0.8, 2.0), (3, 1, 0.9, 2.0)]


def admissible(seed, params):
    l, k, eps, delta = params
    rng = random.Random(seed)
    t, n = rng.randint(10, 12), rng.randint(32, 40)
    cfg = SieveConfig(eps=eps, delta=delta, l=l, k=k, c=8, seed=seed)
    return generate_admissible_system(t, n, cfg, seed=rng), cfg


def test_config_validation():
    with pytest.raises(InputError):
        SieveConfig(eps=0, delta=1)
    with pytest.raises(InputError):
        SieveConfig(eps=0.5, delta=0)
    with pytest.raises(InputError):
        SieveConfig(eps=0.5, delta=1, c2=-1)
    cfg = SieveConfig(eps=0.5, delta=1.0)
    assert cfg.log_factor == pytest.approx(1 + 1 + 1)


def test_zero_weight_system_fails_hypotheses():
    s = SetSystem.from_sets(10, [set(range(1, 11))] + [set()] * 9)
    cfg = SieveConfig(eps=0.5, delta=1.0)
    failures = check_hypotheses(s, cfg)
    assert any("wt_l" in f for f in failures) and any("eps*n" in f for f in failures)
    with pytest.raises(HypothesesUnmet):
        sieve_run(s, cfg)
    with pytest.raises(DegenerateSystem):
        bucket_select(s, cfg)


# ------------------------------------------------------------ buckets

def test_bucket_all_sizes_l_plus_one():
    # Each element in exactly two sets, l = 1.
    s = SetSystem.from_sets(4, [{1, 2}, {1, 3}, {2, 4}, {3, 4}])
    ch = bucket_select(s, SieveConfig(eps=0.5, delta=1.0))
    assert ch.K == 1 and ch.i0 == 0 and ch.A == (1, 2, 3, 4)


def test_bucket_sizes_three_and_four():
    sets = [{1, 2}, {1, 2}, {1, 2}, {2}]
    s = SetSystem.from_sets(2, sets)
    ch = bucket_select(s, SieveConfig(eps=0.5, delta=1.0))
    assert ch.K == 2 and ch.masses == {1: 5} and ch.A == (1, 2)


@settings(max_examples=100)
@given(set_systems(max_t=8, max_n=10, min_t=3), st.sampled_from([0.25, 0.5, 1.0]), st.sampled_from([0.5, 1.0, 2.0]))
def test_selected_bucket_carries_its_share(s, eps, delta):
    cfg = SieveConfig(eps=eps, delta=delta)
    wt = generalized_weight(s, None, 1)
    if wt == 0:
        return
    ch = bucket_select(s, cfg)
    sizes = Counter(j for x in s.sets for j in x)
    mass = sum(sizes[j] - 1 for j in range(1, s.n + 1) if 2**ch.i0 <= sizes[j] - 1 < 2 ** (ch.i0 + 1))
    assert mass == ch.masses[ch.i0]
    assert sum(ch.masses.values()) == wt
    if any(i >= max(ch.d, 0) for i in ch.masses):
        assert ch.i0 >= max(ch.d, 0)
        assert mass >= wt / (2 * ch.Delta) or max(ch.masses) >= max(ch.d, 0) + ch.Delta
    assert set(ch.A) == {j for j in range(1, s.n + 1) if sizes[j] >= ch.K + 1}


# ------------------------------------------------------------ sampling

def test_sampling_probability():
    assert sampling_probability(1, 1) == 0.5
    assert sampling_probability(4, 4) == 0.25
    assert sampling_probability(8, 1) == pytest.approx(1 / 16)


def test_sample_J_quarter_rate():
    # Disjoint pairs: each element survives iff both its sets are sampled.
    t = 40
    s = SetSystem.from_sets(t // 2, [{i // 2 + 1} for i in range(t)])
    cfg = SieveConfig(eps=0.5, delta=1.0)
    A = tuple(range(1, t // 2 + 1))
    rng = random.Random(5)
    total = sum(len(sample_J(s, 1, A, cfg, rng)[1]) for _ in range(2000))
    mean = total / 2000 / len(A)
    assert abs(mean - 0.25) < 3 * math.sqrt(0.25 * 0.75 / (2000 * len(A))) + 1e-9
    with pytest.raises(InputError):
        sample_J(s, 1, (), cfg)


@settings(max_examples=60)
@given(set_systems(max_t=6, max_n=8, min_t=3, layers=2), st.integers(0, 10**6))
def test_reduction_properties(s, seed):
    rng = random.Random(seed)
    J = tuple(i for i in range(1, s.t + 1) if rng.random() < 0.6)
    Jset = set(J)
    A_J = [j for j in range(1, s.n + 1) if any(len(s.S_layer(j, r) & Jset) >= 2 for r in (1, 2))]
    red = reduce_to_pairs(s, J, A_J, seed)
    for j, pair in red.T.items():
        assert len(pair) == 2 and set(pair) <= s.S_layer(j, red.r[j]) & Jset
    for a, b, c in itertools.combinations(J, 3):
        assert not red.sets[a] & red.sets[b] & red.sets[c]
    assert brute_weight([red.sets[i] for i in J]) == len(A_J)
    assert all(red.sets[i] <= s.I(i) for i in J)


def test_single_layer_picks_layer_one():
    s = SetSystem.from_sets(3, [{1, 2}, {1, 3}, {2, 3}])
    red = reduce_to_pairs(s, (1, 2, 3), (1, 2, 3), seed=0)
    assert set(red.r.values()) == {1}
    with pytest.raises(InputError):
        reduce_to_pairs(s, (1, 2), (3,))


# ------------------------------------------------------------ trimming

def test_trim_tight_input_unchanged():
    sets = {1: frozenset({1}), 2: frozenset({1, 2}), 3: frozenset({2})}
    red = Reduced((1, 2, 3), {}, {}, sets)
    J, out = trim_to_tight(red, 1)
    assert J == (1, 2, 3) and out == sets


def test_trim_removes_exact_excess():
    # Four sets pairwise sharing one element: weight 6, target 3 at k=1.
    sets = {1: frozenset({1, 2, 4}), 2: frozenset({1, 3, 5}), 3: frozenset({2, 3, 6}), 4: frozenset({4, 5, 6})}
    red = Reduced((1, 2, 3, 4), {}, {}, sets)
    J, out = trim_to_tight(red, 1)
    w = brute_weight([out[i] for i in J])
    assert w == len(J) - 1
    assert sum(len(sets[i]) - len(out[i]) for i in J) >= 0
    with pytest.raises(WeightDeficit):
        trim_to_tight(Reduced((1, 2), {}, {}, {1: frozenset(), 2: frozenset()}), 1)


@settings(max_examples=80)
@given(st.integers(3, 7), st.integers(1, 2), st.integers(0, 10**6))
def test_trim_output_meets_conditions(t, k, seed):
    rng = random.Random(seed)
    n = 3 * t
    pairs = list(itertools.combinations(range(1, t + 1), 2))
    T = {j: rng.choice(pairs) for j in range(1, n + 1)}
    sets = {i: frozenset(j for j, p in T.items() if i in p) for i in range(1, t + 1)}
    if brute_weight(list(sets.values())) < (t - 1) * k:
        return
    J, out = trim_to_tight(Reduced(tuple(range(1, t + 1)), T, {j: 1 for j in T}, sets), k)
    s = SetSystem.from_sets(n, [sets[i] for i in range(1, t + 1)])
    assert all(verify_conditions(s, J, out, k).values())
    assert certify_nonsingular_treepack(SetSystem.from_sets(n, [out[i] for i in J]), None, k) is not None


# ------------------------------------------------------------ pipeline

@pytest.mark.parametrize("params", FEASIBLE)
def test_pipeline_certifies(params):
    k = params[1]
    done = 0
    for seed in range(6):
        s, cfg = admissible(seed, params)
        if s is None:
            continue
        tr = sieve_run(s, cfg)
        assert all(verify_conditions(s, tr.final_J, tr.final_sets, k).values())
        assert tr.K == 2**tr.i0 and tr.p == sampling_probability(tr.K, cfg.l)
        assert set(tr.A_J) <= set(tr.A) and set(tr.final_J) <= set(tr.J)
        assert certify_nonsingular_treepack(tr.final_system(s.n), None, k) is not None
        done += 1
    assert done >= 3


def test_trace_roundtrip_and_replay():
    s, cfg = admissible(1, FEASIBLE[0])
    tr = sieve_run(s, cfg)
    back = SieveTrace.from_json(tr.to_json())
    assert back == tr
    again = replay_trace(back)
    assert again.to_json() == tr.to_json()


def test_generator_meets_hypotheses():
    for params in FEASIBLE:
        found = [x for x in (admissible(seed, params) for seed in range(5)) if x[0] is not None]
        assert found
        for s, cfg in found:
            assert not check_hypotheses(s, cfg)
            assert s.normalized().sets == s.sets


def test_calc_inequality_grid():
    assert calc_inequality_violations() == 0
