from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from reference import posterior_law, trace_law, tv
from tracerecon.channel import (
    CollisionInfo,
    Trace,
    batch_delete_direct,
    batch_delete_geometric,
    batch_posterior_sample,
    collision_info,
    coupled_geometric_binomial,
    decode_key,
    delete_direct,
    delete_geometric_process,
    merge_traces,
    multi_trace_with_collisions,
    posterior_sample,
    trace_distribution,
)
from tracerecon.strings import BitString

B = BitString


def empirical(keys: np.ndarray) -> dict[str, float]:
    c = Counter(keys.tolist())
    total = keys.size
    return {str(decode_key(k)): v / total for k, v in c.items()}


def test_delete_extremes():
    rng = np.random.default_rng(0)
    x = B("0110101")
    t = delete_direct(x, 0.0, rng)
    assert t.y == x and t.retained.tolist() == list(range(1, 8))
    assert len(delete_direct(x, 1.0, rng).y) == 0
    with pytest.raises(ValueError):
        delete_direct(x, 1.5, rng)


def test_delete_rate_concentrates():
    rng = np.random.default_rng(1)
    y = delete_direct(B.zeros(10**6), 0.5, rng).y
    assert abs(len(y) / 10**6 - 0.5) <= 0.01


@given(st.text(alphabet="01", max_size=40), st.floats(0, 1), st.integers(0, 2**32))
def test_retained_set_consistent(s, delta, seed):
    x = B(s)
    t = delete_direct(x, delta, np.random.default_rng(seed))
    assert t.consistent_with(x)


@given(st.text(alphabet="01", max_size=60), st.floats(0.01, 0.99), st.integers(0, 2**32))
def test_geometric_process_structure(s, delta, seed):
    x = B(s)
    t, lengths = delete_geometric_process(x, delta, np.random.default_rng(seed))
    assert t.consistent_with(x)
    assert len(lengths) == len(t.y)
    assert len(t.y) <= sum(lengths) <= len(x)
    assert np.array_equal(np.cumsum(lengths), t.retained)


def test_geometric_process_tiny_delta_keeps_everything():
    x = B("01" * 50)
    t, _ = delete_geometric_process(x, 1e-9, np.random.default_rng(2))
    assert t.y == x


def test_trace_distribution_matches_reference():
    for s in ("", "0", "01", "0110", "11010"):
        for d in (Fraction(0), Fraction(1, 3), Fraction(1)):
            got = {str(k): v for k, v in trace_distribution(B(s), d).items()}
            assert got == {k: v for k, v in trace_law(s, d).items() if v}
            assert sum(got.values()) == 1


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
@pytest.mark.parametrize("delta", [0.2, 0.5])
def test_samplers_match_exact_law(n, delta):
    rng = np.random.default_rng([n, int(delta * 10)])
    x = B.random(n, rng)
    exact = trace_distribution(x, Fraction(delta).limit_denominator(100))
    exact = {str(k): v for k, v in exact.items()}
    direct = empirical(batch_delete_direct(x, delta, 10**6, rng))
    geometric = empirical(batch_delete_geometric(x, delta, 10**6, rng))
    assert tv(direct, exact) <= 0.02
    assert tv(geometric, exact) <= 0.02


def test_batch_geometric_agrees_with_single_sampler():
    x = B("010101")
    rng = np.random.default_rng(5)
    single = Counter(str(delete_geometric_process(x, 0.3, rng)[0].y) for _ in range(20000))
    single = {k: v / 20000 for k, v in single.items()}
    exact = {str(k): v for k, v in trace_distribution(x, Fraction(3, 10)).items()}
    assert tv(single, exact) <= 0.03


def test_posterior_examples():
    rng = np.random.default_rng(3)
    draws = Counter(str(posterior_sample(B("1"), 2, rng)) for _ in range(40000))
    freq = {k: v / 40000 for k, v in draws.items()}
    assert tv(freq, posterior_law("1", 2)) <= 0.015
    assert "00" not in freq
    y = B("0110")
    assert all(posterior_sample(y, 4, rng) == y for _ in range(20))
    with pytest.raises(ValueError):
        posterior_sample(B("011"), 2, rng)


def test_posterior_of_empty_trace_is_uniform():
    rng = np.random.default_rng(4)
    codes = batch_posterior_sample(np.ones(10**5, np.int64), 3, rng)
    freq = np.bincount(codes, minlength=8) / 10**5
    assert np.all(np.abs(freq - 1 / 8) < 0.01)


def test_posterior_reference_example():
    assert posterior_law("1", 2) == {"11": Fraction(1, 2), "10": Fraction(1, 4), "01": Fraction(1, 4)}


@pytest.mark.parametrize("n", [2, 3, 4])
def test_channel_then_posterior_is_bayes_consistent(n):
    rng = np.random.default_rng(10 + n)
    size = 10**6
    xs = rng.integers(0, 1 << n, size)
    keys = np.empty(size, np.int64)
    for code in range(1 << n):
        sel = xs == code
        keys[sel] = batch_delete_direct(B.from_int(code, n), 0.5, int(sel.sum()), rng)
    forward = Counter(zip(xs.tolist(), keys.tolist()))
    # resample y from its marginal, then x from the posterior sampler
    ys = rng.permutation(keys)
    backward = Counter(zip(batch_posterior_sample(ys, n, rng).tolist(), ys.tolist()))
    f = {k: v / size for k, v in forward.items()}
    b = {k: v / size for k, v in backward.items()}
    assert tv(f, b) <= 0.02


def test_collision_worked_example():
    x = B("11010011")
    retained = [[1, 2, 5, 6], [2, 4, 5], [2, 5, 6, 7]]
    traces = [x.restrict(r) for r in retained]
    assert [str(t) for t in traces] == ["1100", "110", "1001"]
    info, union = collision_info(retained)
    assert union.tolist() == [1, 2, 4, 5, 6, 7]
    assert info.sets == (
        frozenset({1}), frozenset({1, 2, 3}), frozenset({2}),
        frozenset({1, 2, 3}), frozenset({1, 3}), frozenset({3}),
    )
    assert merge_traces(traces, info) == "111001"


@given(st.text(alphabet="01", min_size=1, max_size=30), st.integers(1, 5), st.floats(0, 1), st.integers(0, 2**32))
def test_multi_trace_merge_is_union_subsequence(s, t, delta, seed):
    x = B(s)
    traces, info, merged = multi_trace_with_collisions(x, delta, t, np.random.default_rng(seed))
    union = sorted(set().union(*(set(tr.retained.tolist()) for tr in traces)))
    assert merged == x.restrict(union)
    assert len(info) == len(union) <= len(x)


def test_multi_trace_trivial_cases():
    rng = np.random.default_rng(8)
    x = B("0110100111")
    traces, info, merged = multi_trace_with_collisions(x, 0.4, 1, rng)
    assert all(c == {1} for c in info.sets) and merged == traces[0].y
    traces, info, merged = multi_trace_with_collisions(x, 0.0, 3, rng)
    assert merged == x and all(c == {1, 2, 3} for c in info.sets)
    with pytest.raises(ValueError):
        multi_trace_with_collisions(x, 0.4, 0, rng)


def test_collision_info_rejects_empty_sets():
    with pytest.raises(ValueError):
        CollisionInfo((frozenset(),))


def test_trace_validates_retained():
    with pytest.raises(ValueError):
        Trace(B("01"), np.array([2, 1]))
    with pytest.raises(ValueError):
        Trace(B("01"), np.array([1]))


@given(st.integers(1, 40), st.integers(0, 120), st.floats(0.05, 1.0), st.integers(0, 2**32))
def test_geometric_binomial_coupling(m, n, rho, seed):
    geoms, binom = coupled_geometric_binomial(m, n, rho, np.random.default_rng(seed))
    assert len(geoms) == m and np.all(geoms >= 1)
    assert (geoms.sum() > n) == (binom < m)
