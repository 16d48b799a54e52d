"""Ground-truth values: exact enumerations, the CS(j, k) table and entropy bounds."""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numba as nb
import numpy as np
from scipy.optimize import bisect

from .lcs import lcs_against_all, lcs_length
from .stats import RunningStats
from .strings import BitString

__all__ = [
    "cs_value",
    "cs_table",
    "series_bound",
    "worst_case_polynomial",
    "l0_avg_exact",
    "optimal_one_trace_exact",
    "embedding_counts",
    "entropy",
    "c2_upper_bound",
    "gamma2_estimate",
    "weak_upper_bound_coefficient",
    "CS_LIMIT",
]

CS_LIMIT = 26


@lru_cache(maxsize=None)
def cs_value(j: int, k: int) -> Fraction:
    """Expected |LCS| of independent uniform strings of lengths ``j`` and ``k``."""
    if j < 1 or k < 1:
        raise ValueError("lengths must be positive")
    if j + k > CS_LIMIT:
        raise ValueError(f"j + k = {j + k} exceeds enumeration limit {CS_LIMIT}")
    if j > k:
        return cs_value(k, j)
    total = 0
    for code in range(1 << j):
        total += int(lcs_against_all(BitString.from_int(code, j), k).sum(dtype=np.int64))
    return Fraction(total, 1 << (j + k))


def cs_table(max_sum: int) -> dict[tuple[int, int], Fraction]:
    """All ``CS(j, k)`` with ``j, k >= 1`` and ``j + k <= max_sum``."""
    return {(j, s - j): cs_value(j, s - j) for s in range(2, max_sum + 1) for j in range(1, s)}


def series_bound(delta: float | Fraction, max_sum: int) -> float | Fraction:
    """Truncated ``(1 - d)(1 + (1 - d)^2 sum CS(j, k) d^(j+k))``.

    All omitted terms are positive, so truncation gives a lower bound.
    Exact when ``delta`` is a Fraction.
    """
    if not 0 <= delta < 1:
        raise ValueError(f"delta = {delta} outside [0, 1)")
    exact = isinstance(delta, Fraction)
    acc = Fraction(0) if exact else 0.0
    for (j, k), cs in cs_table(max_sum).items():
        acc += (cs if exact else float(cs)) * delta ** (j + k)
    rho = 1 - delta
    return rho * (1 + rho**2 * acc)


def worst_case_polynomial(delta: float | Fraction) -> float | Fraction:
    """``1 - d + d^2/2 - d^3/2 + d^4/2 - d^5/2``, the small-deletion worst-case rate."""
    half = Fraction(1, 2) if isinstance(delta, Fraction) else 0.5
    return 1 - delta + half * (delta**2 - delta**3 + delta**4 - delta**5)


def _all_pair_matrix(n: int) -> np.ndarray:
    return np.stack([lcs_against_all(BitString.from_int(z, n), n) for z in range(1 << n)]).astype(np.int64)


def l0_avg_exact(n: int) -> tuple[Fraction, list[BitString]]:
    """``max_z E_x |LCS(x, z)|`` over uniform ``x`` with all maximizers.

    Complementing ``z`` preserves the objective, so only ``z`` with a
    leading 0 are scored and the complements are added back.
    """
    if n < 1 or n > 14:
        raise ValueError("exact L0 limited to 1 <= n <= 14")
    half = 1 << (n - 1)
    totals = np.array(
        [int(lcs_against_all(BitString.from_int(z, n), n).sum(dtype=np.int64)) for z in range(half)]
    )
    best = int(totals.max())
    mask = (1 << n) - 1
    winners = sorted({c for z in np.flatnonzero(totals == best).tolist() for c in (z, z ^ mask)})
    return Fraction(best, 1 << n), [BitString.from_int(c, n) for c in winners]


@nb.njit(cache=True)
def _embedding_counts(n):
    # out[x, (1 << m) | y] = number of m-subsets of x's positions reading y
    size = 1 << n
    out = np.zeros((size, 2 * size), np.int64)
    for x in range(size):
        for mask in range(size):
            y = 0
            m = 0
            for i in range(n - 1, -1, -1):
                if (mask >> i) & 1:
                    y = (y << 1) | ((x >> i) & 1)
                    m += 1
            out[x, (1 << m) | y] += 1
    return out


def embedding_counts(n: int) -> np.ndarray:
    """Matrix ``N[x, key]`` of embedding counts; trace key is ``(1 << |y|) | y``."""
    if n > 12:
        raise ValueError("embedding enumeration limited to n <= 12")
    return _embedding_counts(n)


def optimal_one_trace_exact(n: int, delta: Fraction | int) -> Fraction:
    """Exact ``L_{1,avg}(delta, n)``: Bayes-optimal hypothesis for every trace.

    ``P(x, y) = 2^-n rho^m delta^(n-m) N(y, x)``, so the optimum is
    ``2^-n sum_m rho^m delta^(n-m) sum_{|y|=m} max_z sum_x N(y, x) LCS(z, x)``.
    """
    delta = Fraction(delta)
    if not 0 <= delta <= 1:
        raise ValueError("delta outside [0, 1]")
    if n < 1 or n > 10:
        raise ValueError("exact L1 limited to 1 <= n <= 10")
    counts = embedding_counts(n).astype(np.float64)
    lcs = _all_pair_matrix(n).astype(np.float64)
    # entries stay far below 2^53, so the float product is exact
    scores = counts.T @ lcs.T
    best = np.rint(scores.max(axis=1)).astype(np.int64)
    rho = 1 - delta
    total = Fraction(0)
    for m in range(n + 1):
        weight = rho**m * delta ** (n - m)
        if weight:
            total += weight * int(best[1 << m: 2 << m].sum())
    return total / (1 << n)


def entropy(x: float) -> float:
    """Binary entropy in bits."""
    if not 0 <= x <= 1:
        raise ValueError(f"entropy argument {x} outside [0, 1]")
    if x in (0, 1):
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def _entropy_inverse(target: float) -> float:
    return bisect(lambda t: entropy(t) - target, 1e-300, 0.5, xtol=1e-12)


def c2_upper_bound() -> float:
    """``1 - tau`` where ``H(tau) = 1/2`` on ``[0, 1/2]``."""
    return 1.0 - _entropy_inverse(0.5)


def gamma2_estimate(
    n: int, trials: int = 100, rng: np.random.Generator | None = None, mode: str = "mc"
) -> tuple[float | Fraction, tuple[float | Fraction, float | Fraction]]:
    """Normalized mean LCS of two independent uniform ``n``-bit strings.

    ``mc`` returns the sample mean and 95% interval; ``exact`` returns
    ``CS(n, n) / n`` with a degenerate interval.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if mode == "exact":
        value = cs_value(n, n) / n
        return value, (value, value)
    if mode != "mc":
        raise ValueError(f"unknown mode {mode!r}")
    if trials < 1:
        raise ValueError("need at least one trial")
    if rng is None:
        raise ValueError("Monte Carlo mode needs a seeded generator")
    acc = RunningStats()
    for _ in range(trials):
        a = BitString.random(n, rng)
        b = BitString.random(n, rng)
        acc.push(lcs_length(a, b) / n)
    return acc.mean, acc.ci95()


def weak_upper_bound_coefficient(delta: float) -> float:
    """Exponent-balance point ``tau`` of the union bound ``2^((2H(tau) - d'/2) n)``.

    Uses ``d' = delta / 2`` for the number of informative deletions, so
    ``tau`` solves ``2 H(tau) = delta / 4``. It scales as
    ``delta / log(1/delta)``.
    """
    if not 0 < delta < 0.5:
        raise ValueError(f"delta = {delta} outside (0, 1/2)")
    return _entropy_inverse(delta / 8)
