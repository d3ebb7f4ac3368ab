import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rsnwt.errors import DuplicateColumn, FieldTooSmall, InputError, TooLarge
from rsnwt.fields import FieldSpec
from rsnwt.codes import (
    CodeSpec,
    DecodeInstance,
    HashMatrix,
    all_codewords,
    bad_vector_witness,
    brute_force_list_decode,
    brute_force_list_recover,
    build_phf,
    encode,
    encode_ints,
    extract_tight_subfamily,
    index_of,
    johnson_radius,
    linear_phf_bound,
    message_of,
    min_separation,
    verify_separation,
    witness_properties,
)
from rsnwt.intmat import SetSystem, kernel_vector_check

from conftest import brute_weight


def naive_eval(msg, a, p):
    return sum(m * pow(a, j, p) for j, m in enumerate(msg)) % p


def naive_min_separation(c: CodeSpec, t: int) -> int:
    words = [[naive_eval(m, a, c.p) for a in c.alpha] for m in itertools.product(range(c.p), repeat=c.k)]
    return min(
        sum(1 for i in range(c.n) if len({w[i] for w in combo}) == t)
        for combo in itertools.combinations(words, t)
    )


codes = st.sampled_from([5, 7, 11]).flatmap(
    lambda p: st.integers(2, p).flatmap(
        lambda n: st.integers(1, n - 1).flatmap(
            lambda k: st.integers(0, 10**6).map(lambda s: CodeSpec.random(FieldSpec(p), n, k, s))
        )
    )
)


def test_codespec_validation():
    F = FieldSpec(7)
    with pytest.raises(InputError):
        CodeSpec(F, 3, 3, (0, 1, 2))
    with pytest.raises(InputError):
        CodeSpec(F, 8, 2, tuple(range(8)))
    with pytest.raises(InputError):
        CodeSpec(F, 3, 1, (0, 1, 8))
    assert CodeSpec(F, 4, 2, (0, 1, 2, 3)).rate == 0.5


@given(codes, st.data())
def test_encode_matches_direct_evaluation(c, data):
    msg = data.draw(st.lists(st.integers(0, c.p - 1), min_size=c.k, max_size=c.k))
    assert encode_ints(c, msg) == [naive_eval(msg, a, c.p) for a in c.alpha]
    assert [int(x) for x in encode(c, msg)] == encode_ints(c, msg)
    assert encode_ints(c, [0] * c.k) == [0] * c.n
    assert encode_ints(c, [msg[0]] + [0] * (c.k - 1)) == [msg[0]] * c.n
    with pytest.raises(InputError):
        encode_ints(c, msg + [0])


@given(st.integers(0, 11**3 - 1))
def test_message_index_roundtrip(i):
    assert index_of(message_of(i, 11, 3), 11) == i


def test_codeword_table_and_distance():
    c = CodeSpec.random(FieldSpec(11), 6, 2, seed=4)
    cw = all_codewords(c)
    for i in (0, 5, 77, 120):
        assert list(cw[i]) == encode_ints(c, message_of(i, 11, 2))
    dist = min(int((cw[a] != cw[b]).sum()) for a, b in itertools.combinations(range(len(cw)), 2))
    assert dist == c.n - c.k + 1
    with pytest.raises(TooLarge):
        all_codewords(c, budget=100)


# ------------------------------------------------------------ list decoding

@settings(max_examples=60)
@given(codes.filter(lambda c: c.p**c.k <= 2000), st.data())
def test_list_recovery_matches_naive_scan(c, data):
    ell = data.draw(st.integers(1, 2))
    lists = [frozenset(data.draw(st.sets(st.integers(0, c.p - 1), min_size=1, max_size=ell))) for _ in range(c.n)]
    rho = data.draw(st.sampled_from([0, 0.25, 0.5, 1]))
    got = brute_force_list_recover(c, DecodeInstance(tuple(lists), rho))
    expect = []
    for msg in itertools.product(range(c.p), repeat=c.k):
        w = tuple(naive_eval(msg, a, c.p) for a in c.alpha)
        if sum(1 for x, s in zip(w, lists) if x not in s) <= rho * c.n + 1e-9:
            expect.append(w)
    assert sorted(got) == sorted(expect)


def test_list_decode_extremes():
    c = CodeSpec.random(FieldSpec(7), 5, 2, seed=1)
    w = encode_ints(c, [3, 4])
    assert brute_force_list_decode(c, w, 0) == [tuple(w)]
    assert len(brute_force_list_decode(c, w, 1)) == 49
    with pytest.raises(InputError):
        DecodeInstance((frozenset(),), 0.5)
    with pytest.raises(InputError):
        DecodeInstance.from_word([1], 1.5)


def test_lists_nested_in_radius():
    rng = random.Random(2)
    c = CodeSpec.random(FieldSpec(11), 6, 2, seed=2)
    for _ in range(20):
        y = [rng.randrange(11) for _ in range(6)]
        prev = set()
        for e in range(7):
            cur = set(brute_force_list_decode(c, y, e / 6))
            assert prev <= cur
            prev = cur


def test_johnson_radius():
    r, L = johnson_radius(6, 2, 11)
    assert r == pytest.approx(1 - math.sqrt(1 / 6)) and L == pytest.approx(11 * 36 * 5 / 6)
    assert johnson_radius(5, 1, 7)[0] == pytest.approx(1 - math.sqrt(1 - 1))  # delta = 1
    assert johnson_radius(5, 1, 7)[0] == 1.0


# ------------------------------------------------------------ hash matrices

def test_linear_bound():
    assert linear_phf_bound(4, 2, 3) == 1
    assert linear_phf_bound(6, 3, 3) == 1
    assert linear_phf_bound(7, 3, 2) == 5
    with pytest.raises(InputError):
        linear_phf_bound(3, 2, 4)


@pytest.mark.parametrize("p", [5, 7, 11])
def test_phf_small_case_matches_naive_oracle(p):
    res = build_phf(4, 2, 3, FieldSpec(p), attempts=3, seed=p)
    assert res.success and res.threshold == 1
    m = res.matrix
    assert naive_min_separation(m.code, 3) >= 1
    assert min_separation(m.code, 3)[0] == naive_min_separation(m.code, 3)


@pytest.mark.parametrize("p,n,k,t", [(5, 5, 2, 3), (7, 6, 2, 3), (5, 4, 1, 4), (7, 4, 2, 2)])
def test_min_separation_matches_naive(p, n, k, t):
    c = CodeSpec.random(FieldSpec(p), n, k, seed=n + t)
    got, combo = min_separation(c, t)
    assert got == naive_min_separation(c, t)
    m = HashMatrix(c.spec, n, k, c.alpha, t, got)
    assert verify_separation(m, combo) == got


def test_t2_is_singleton_distance():
    c = CodeSpec.random(FieldSpec(7), 5, 2, seed=0)
    assert min_separation(c, 2)[0] == 4


def test_verify_separation_trivia():
    c = CodeSpec.random(FieldSpec(7), 5, 2, seed=0)
    m = HashMatrix(c.spec, 5, 2, c.alpha, 2, 0)
    assert verify_separation(m, [3]) == 5
    assert verify_separation(m, [index_of((1, 0), 7), index_of((4, 0), 7)]) == 5
    with pytest.raises(DuplicateColumn):
        verify_separation(m, [2, 2])


def test_certified_matrix_reverifies():
    res = build_phf(6, 2, 3, FieldSpec(11), attempts=8, seed=3)
    assert res.success
    m = res.matrix
    rng = random.Random(0)
    for _ in range(1000):
        cols = rng.sample(range(121), 3)
        assert verify_separation(m, cols) >= res.threshold


def test_phf_errors():
    with pytest.raises(FieldTooSmall):
        build_phf(8, 2, 3, FieldSpec(7))
    with pytest.raises(TooLarge):
        build_phf(6, 2, 4, FieldSpec(11), budget=1000)


@pytest.mark.parametrize("p,n,k,t,seed", [(5, 5, 2, 3, s) for s in range(4)] + [(7, 6, 2, 3, s) for s in range(3)])
def test_phf_and_witness_agree(p, n, k, t, seed):
    c = CodeSpec.random(FieldSpec(p), n, k, seed=seed)
    thr = linear_phf_bound(n, k, t)
    certified = min_separation(c, t)[0] >= thr
    w = bad_vector_witness(c, t)
    assert certified == (w is None)


# ------------------------------------------------------------ witnesses

@pytest.mark.parametrize("p", [7, 11])
def test_witness_properties_and_singular_matrix(p):
    c = CodeSpec.random(FieldSpec(p), 6, 2, seed=0)
    w = bad_vector_witness(c, 4)
    assert w is not None and w.separating < linear_phf_bound(6, 2, 4)
    props = witness_properties(w, 2)
    assert all(props.values())
    # (a)-(c) recomputed directly
    for a, b, x in itertools.combinations(w.sets, 3):
        assert not a & b & x
    assert brute_weight(w.sets) >= 2 * 3
    for i, S in enumerate(w.sets):
        for j in S:
            assert encode_ints(c, w.polys[i])[j - 1] == w.y[j - 1]
    S, trimmed = extract_tight_subfamily(w, 2)
    sub = SetSystem.from_sets(6, trimmed)
    res = kernel_vector_check([w.polys[i] for i in S], sub, None, c.alpha, p, received=[w.y], k=2)
    assert res.product_zero and res.nonzero


def test_certified_alpha_has_no_witness():
    res = build_phf(4, 2, 3, FieldSpec(7), seed=0)
    assert bad_vector_witness(res.matrix.code, 3) is None
