"""Deletion channel samplers, posterior samplers and multi-trace collisions.

Samplers take ``delta`` as a float and an explicit ``numpy`` generator.
Exact enumerations (:func:`trace_distribution`) take ``delta`` as a
:class:`fractions.Fraction` and return exact probabilities.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np

from .strings import BitString

__all__ = [
    "Trace",
    "CollisionInfo",
    "delete_direct",
    "delete_geometric_process",
    "posterior_sample",
    "multi_trace_with_collisions",
    "collision_info",
    "merge_traces",
    "coupled_geometric_binomial",
    "trace_distribution",
    "batch_delete_direct",
    "batch_delete_geometric",
    "batch_posterior_sample",
    "decode_key",
]


def _check_prob(delta: float) -> None:
    if not 0 <= delta <= 1:
        raise ValueError(f"deletion probability {delta} outside [0, 1]")


@dataclass(frozen=True, eq=False)
class Trace:
    """Received string ``y`` plus, optionally, the 1-based retained positions."""

    y: BitString
    retained: np.ndarray | None = None

    def __post_init__(self):
        if self.retained is not None:
            r = np.asarray(self.retained, dtype=np.int64)
            if r.size != len(self.y):
                raise ValueError("retained set size differs from trace length")
            if r.size and (r[0] < 1 or np.any(np.diff(r) <= 0)):
                raise ValueError("retained positions must be increasing and >= 1")
            r = r.copy()
            r.flags.writeable = False
            object.__setattr__(self, "retained", r)

    def __len__(self) -> int:
        return len(self.y)

    def consistent_with(self, x: BitString) -> bool:
        if self.retained is None:
            return True
        if self.retained.size and self.retained[-1] > len(x):
            return False
        return x.restrict(self.retained) == self.y


@dataclass(frozen=True)
class CollisionInfo:
    """``C_j`` = the traces (1-based) retaining the j-th index of the union."""

    sets: tuple[frozenset[int], ...]

    def __post_init__(self):
        sets = tuple(frozenset(int(s) for s in c) for c in self.sets)
        if any(not c for c in sets):
            raise ValueError("every collision set must be non-empty")
        object.__setattr__(self, "sets", sets)

    def __len__(self) -> int:
        return len(self.sets)

    def __getitem__(self, j: int) -> frozenset[int]:
        return self.sets[j]


def delete_direct(x: BitString, delta: float, rng: np.random.Generator) -> Trace:
    """Delete each bit independently with probability ``delta``."""
    _check_prob(delta)
    keep = rng.random(len(x)) >= delta
    retained = np.flatnonzero(keep) + 1
    return Trace(BitString(x.bits[keep]), retained)


def delete_geometric_process(
    x: BitString, delta: float, rng: np.random.Generator
) -> tuple[Trace, list[int]]:
    """Equivalent trace sampler built from Geometric(1 - delta) prefix lengths.

    Each round strips a prefix of geometric length from the (star-padded)
    source and emits its last symbol; the trace ends just before the first
    padding symbol would be emitted. Returns the trace and the prefix
    lengths of the emitted rounds.
    """
    if not 0 < delta < 1:
        raise ValueError(f"geometric process needs 0 < delta < 1, got {delta}")
    n = len(x)
    rho = 1.0 - delta
    chunks = []
    pos = 0
    while pos <= n:
        size = max(16, int(rho * (n - pos) * 1.1) + 16)
        steps = rng.geometric(rho, size)
        ends = pos + np.cumsum(steps)
        chunks.append(steps)
        pos = int(ends[-1])
    lengths = np.concatenate(chunks)
    ends = np.cumsum(lengths)
    emitted = int(np.searchsorted(ends, n, side="right"))
    retained = ends[:emitted]
    y = BitString(x.bits[retained - 1])
    return Trace(y, retained), lengths[:emitted].tolist()


def posterior_sample(y: BitString, n: int, rng: np.random.Generator) -> BitString:
    """Draw uniform x conditioned on the trace ``y`` (uniform prior, any delta).

    ``y`` goes into a uniform random |y|-subset of positions, in order; the
    remaining positions are fair coins.
    """
    m = len(y)
    if m > n:
        raise ValueError(f"trace length {m} exceeds target length {n}")
    bits = rng.integers(0, 2, n, dtype=np.uint8)
    if m:
        slots = np.sort(rng.choice(n, size=m, replace=False))
        bits[slots] = y.bits
    return BitString(bits)


def collision_info(retained_sets: Sequence[Sequence[int]]) -> tuple[CollisionInfo, np.ndarray]:
    """Collision information and the sorted union of the retained sets."""
    owners: dict[int, set[int]] = defaultdict(set)
    for s, r in enumerate(retained_sets, 1):
        for i in np.asarray(r, dtype=np.int64).tolist():
            owners[i].add(s)
    union = np.array(sorted(owners), dtype=np.int64)
    return CollisionInfo(tuple(frozenset(owners[i]) for i in union.tolist())), union


def merge_traces(traces: Sequence[BitString], info: CollisionInfo) -> BitString:
    """Rebuild the union subsequence from traces and collision information only.

    For the j-th union index any trace ``s`` in ``C_j`` holds the bit, at
    position (number of j' <= j with s in C_j') of that trace.
    """
    cursor = [0] * (len(traces) + 1)
    out = np.empty(len(info), np.uint8)
    for j, c in enumerate(info.sets):
        for s in c:
            cursor[s] += 1
        s = min(c)
        out[j] = traces[s - 1].at(cursor[s])
    return BitString(out)


def multi_trace_with_collisions(
    x: BitString, delta: float, t: int, rng: np.random.Generator
) -> tuple[list[Trace], CollisionInfo, BitString]:
    """``t`` independent traces, their collision information and merged string."""
    if t < 1:
        raise ValueError("need at least one trace")
    traces = [delete_direct(x, delta, rng) for _ in range(t)]
    info, union = collision_info([tr.retained for tr in traces])
    merged = merge_traces([tr.y for tr in traces], info)
    return traces, info, merged


def coupled_geometric_binomial(
    m: int, n: int, rho: float, rng: np.random.Generator
) -> tuple[np.ndarray, int]:
    """Geometric(rho) draws G_1..G_m and Bin(n, rho), from one coin sequence.

    G_i are the gaps between successive successes of a Bernoulli(rho)
    sequence, and the binomial counts successes among its first ``n``
    coins. Under this coupling ``sum(G) > n`` exactly when ``Bin < m``.
    """
    if not 0 < rho <= 1:
        raise ValueError("rho must lie in (0, 1]")
    coins = np.zeros(0, bool)
    while coins.size < n or np.count_nonzero(coins) < m:
        need = max(n - coins.size, int((m + 8) / rho), 16)
        coins = np.concatenate([coins, rng.random(need) < rho])
    hits = np.flatnonzero(coins)[:m] + 1
    geoms = np.diff(np.concatenate([[0], hits]))
    return geoms, int(np.count_nonzero(coins[:n]))


def trace_distribution(x: BitString, delta: Fraction) -> dict[BitString, Fraction]:
    """Exact law of the trace, enumerating all 2^n retained subsets."""
    delta = Fraction(delta)
    if not 0 <= delta <= 1:
        raise ValueError("deletion probability outside [0, 1]")
    n = len(x)
    if n > 20:
        raise ValueError("exact enumeration limited to n <= 20")
    rho = 1 - delta
    dist: dict[BitString, Fraction] = defaultdict(Fraction)
    for m in range(n + 1):
        weight = rho**m * delta ** (n - m)
        if weight == 0:
            continue
        for keep in combinations(range(1, n + 1), m):
            dist[x.restrict(keep)] += weight
    return dict(dist)


# Batch samplers for short strings. A trace y is encoded as the key
# (1 << |y|) | int(y), which is unique across lengths.

def decode_key(key: int) -> BitString:
    key = int(key)
    m = key.bit_length() - 1
    return BitString.from_int(key ^ (1 << m), m)


def _keys_from_mask(bits: np.ndarray, keep: np.ndarray) -> np.ndarray:
    key = np.ones(keep.shape[0], np.int64)
    for i in range(keep.shape[1]):
        k = keep[:, i]
        key = np.where(k, (key << 1) | int(bits[i]), key)
    return key


def batch_delete_direct(x: BitString, delta: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Trace keys of ``size`` independent direct-deletion draws."""
    _check_prob(delta)
    keep = rng.random((size, len(x))) >= delta
    return _keys_from_mask(x.bits, keep)


def batch_delete_geometric(x: BitString, delta: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Trace keys of ``size`` independent geometric-process draws."""
    if not 0 < delta < 1:
        raise ValueError("geometric process needs 0 < delta < 1")
    n = len(x)
    # n rounds always suffice: every prefix has length >= 1
    ends = np.cumsum(rng.geometric(1.0 - delta, (size, n)), axis=1)
    keep = np.zeros((size, n), bool)
    rows, cols = np.nonzero(ends <= n)
    keep[rows, ends[rows, cols] - 1] = True
    return _keys_from_mask(x.bits, keep)


def batch_posterior_sample(keys: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    """Integer codes of posterior samples, one per trace key."""
    keys = np.asarray(keys, dtype=np.int64)
    size = keys.size
    lens = np.floor(np.log2(keys)).astype(np.int64)
    if np.any(lens > n):
        raise ValueError("trace longer than target length")
    codes = keys ^ (np.int64(1) << lens)
    ranks = np.argsort(np.argsort(rng.random((size, n)), axis=1), axis=1)
    chosen = ranks < lens[:, None]
    order = np.cumsum(chosen, axis=1) - 1
    shift = np.clip(lens[:, None] - 1 - order, 0, None)
    ybit = (codes[:, None] >> shift) & 1
    coin = rng.integers(0, 2, (size, n))
    bits = np.where(chosen, ybit, coin)
    out = np.zeros(size, np.int64)
    for i in range(n):
        out = (out << 1) | bits[:, i]
    return out
