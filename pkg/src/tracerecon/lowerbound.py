"""Objects from the average-case upper-bound argument, as checkable code.

Source strings drawn from a trace ``y`` of length ``m`` are modelled as
``x = (y on S, r elsewhere)`` and ``x' = (y on S', r' elsewhere)`` with
``S, S'`` increasing m-subsets of ``[n]`` and ``y, r, r'`` uniform bits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .lcs import Matching, lcs_length
from .strings import BitString

__all__ = [
    "ScoreContext",
    "score",
    "validity_probability_exact",
    "validity_probability_mc",
    "spacing_beta",
    "WellSpacedResult",
    "is_well_spaced",
    "ghs_covered_count",
    "avg_lcs_vs_code",
]


@dataclass(frozen=True)
class ScoreContext:
    """Candidate matching ``M`` plus the two embedding sets ``S`` and ``S'``."""

    matching: Matching
    s: tuple[int, ...]
    s_prime: tuple[int, ...]
    n: int

    def __post_init__(self):
        s = tuple(int(v) for v in self.s)
        sp = tuple(int(v) for v in self.s_prime)
        if len(s) != len(sp):
            raise ValueError("S and S' must have the same size")
        for name, seq in (("S", s), ("S'", sp)):
            if any(a >= b for a, b in zip(seq, seq[1:])) or (seq and (seq[0] < 1 or seq[-1] > self.n)):
                raise ValueError(f"{name} must be increasing inside [1, {self.n}]")
        if not self.matching.is_candidate():
            raise ValueError("matching must be strictly increasing in both coordinates")
        if self.matching.pairs and (
            max(self.matching.left) > self.n or max(self.matching.right) > self.n
        ):
            raise ValueError("matching indices exceed n")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "s_prime", sp)

    @property
    def m(self) -> int:
        return len(self.s)

    @property
    def t(self) -> int:
        return len(self.matching)


def _synchs(ctx: ScoreContext) -> list[bool]:
    rank = {v: j for j, v in enumerate(ctx.s)}
    rank_p = {v: j for j, v in enumerate(ctx.s_prime)}
    return [u in rank and rank[u] == rank_p.get(v, -1) for u, v in ctx.matching]


def score(ctx: ScoreContext) -> int:
    """Number of edges pairing the j-th element of ``S`` with the j-th of ``S'``."""
    return sum(_synchs(ctx))


def _variable(pos: int, rank: dict[int, int], n_y: int, offset: int, filler: list[int]) -> int:
    # bits live in one pool: y first, then r, then r'
    if pos in rank:
        return rank[pos]
    return n_y + offset + filler[pos - 1]


def _edge_variables(ctx: ScoreContext) -> list[tuple[int, int]]:
    n, m = ctx.n, ctx.m
    rank = {v: j for j, v in enumerate(ctx.s)}
    rank_p = {v: j for j, v in enumerate(ctx.s_prime)}
    # filler index of each non-S position, in increasing order
    fill = [0] * n
    fill_p = [0] * n
    c = cp = 0
    for pos in range(1, n + 1):
        if pos not in rank:
            fill[pos - 1] = c
            c += 1
        if pos not in rank_p:
            fill_p[pos - 1] = cp
            cp += 1
    return [
        (_variable(u, rank, m, 0, fill), _variable(v, rank_p, m, n - m, fill_p))
        for u, v in ctx.matching
    ]


def validity_probability_exact(ctx: ScoreContext, limit: int = 24) -> Fraction:
    """Pr over ``(y, r, r')`` that ``M`` is valid for ``(x, x')``, by enumeration.

    Only bits touched by non-synching edges are enumerated (synching edges
    compare a bit of ``y`` with itself); ``limit`` caps that count.
    """
    edges = [e for e, sync in zip(_edge_variables(ctx), _synchs(ctx)) if not sync]
    if not edges:
        return Fraction(1)
    used = sorted({v for e in edges for v in e})
    if len(used) > limit:
        raise ValueError(f"{len(used)} free bits exceed enumeration limit {limit}")
    slot = {v: i for i, v in enumerate(used)}
    k = len(used)
    good = 0
    chunk = 1 << min(k, 20)
    for start in range(0, 1 << k, chunk):
        codes = np.arange(start, min(start + chunk, 1 << k), dtype=np.int64)
        ok = np.ones(codes.size, bool)
        for a, b in edges:
            ok &= ((codes >> slot[a]) & 1) == ((codes >> slot[b]) & 1)
        good += int(np.count_nonzero(ok))
    return Fraction(good, 1 << k)


def validity_probability_mc(
    ctx: ScoreContext, samples: int, rng: np.random.Generator, batch: int = 200_000
) -> tuple[float, float]:
    """Monte Carlo estimate and standard error of the validity probability."""
    edges = np.array(_edge_variables(ctx), dtype=np.int64).reshape(-1, 2)
    pool = ctx.m + 2 * (ctx.n - ctx.m)
    hits = 0
    done = 0
    while done < samples:
        size = min(batch, samples - done)
        bits = rng.integers(0, 2, (size, pool), dtype=np.uint8)
        ok = np.all(bits[:, edges[:, 0]] == bits[:, edges[:, 1]], axis=1)
        hits += int(np.count_nonzero(ok))
        done += size
    p = hits / samples
    return p, math.sqrt(max(p * (1 - p), 1e-300) / samples)


def spacing_beta(delta_prime: float) -> int:
    """Half-width ``floor(delta'^(-3/4))``, at least 1."""
    if not 0 < delta_prime < 1:
        raise ValueError("delta' must lie in (0, 1)")
    return max(1, math.floor(delta_prime ** -0.75 + 1e-12))


@dataclass(frozen=True)
class WellSpacedResult:
    ok: bool
    beta: int
    needed: int
    intervals: tuple[tuple[int, int], ...]

    def __bool__(self) -> bool:
        return self.ok


def is_well_spaced(s: BitString, matching: Matching, delta_prime: float) -> WellSpacedResult:
    """Greedy search for disjoint windows ``1^b 0 1^b`` carried by runs of ``M``.

    A window of ``2b + 1`` consecutive edges qualifies when both its left
    and right endpoints form intervals and ``s`` reads ``1^b 0 1^b`` on the
    left interval. Leftmost-first selection maximizes the number of
    disjoint windows. ``s`` is the indicator string of the embedding set.
    """
    n = len(s)
    beta = spacing_beta(delta_prime)
    needed = math.ceil(delta_prime * n / 2)
    width = 2 * beta + 1
    t = len(matching)
    if t < width:
        return WellSpacedResult(needed == 0, beta, needed, ())
    left = np.asarray(matching.left, np.int64)
    right = np.asarray(matching.right, np.int64)
    span = width - 1
    contiguous = (left[span:] - left[:-span] == span) & (right[span:] - right[:-span] == span)
    zeros = np.concatenate([[0], np.cumsum(1 - s.bits.astype(np.int64))])
    start = left[: t - span]
    lone_zero = (zeros[start + span] - zeros[start - 1] == 1) & (s.bits[start + beta - 1] == 0)
    good = np.flatnonzero(contiguous & lone_zero)
    chosen = []
    next_free = 0
    for i in good.tolist():
        if i >= next_free:
            chosen.append((int(left[i]), int(left[i] + span)))
            next_free = i + width
    return WellSpacedResult(len(chosen) >= needed, beta, needed, tuple(chosen))


def ghs_covered_count(x: BitString, code: Sequence[BitString], eps: float) -> int:
    """Codewords ``A`` with ``|LCS(x, A)| >= (2/3 + eps/6) n``."""
    n = len(x)
    threshold = (2 / 3 + eps / 6) * n
    return sum(1 for a in code if lcs_length(x, a) >= threshold - 1e-9)


def avg_lcs_vs_code(x: BitString, code: Sequence[BitString]) -> Fraction:
    """Mean ``|LCS(x, A)|`` over the codewords."""
    if not code:
        raise ValueError("empty code")
    return Fraction(sum(lcs_length(x, a) for a in code), len(code))
