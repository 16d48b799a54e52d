"""Longest common subsequence: lengths, certificates, covers and AvgLCS.

Length-only LCS is the bit-parallel recurrence over 64-bit words
(``V <- (V + (V & M)) | (V & ~M)``, zeros of ``V`` count the LCS), so a
10^5 x 10^5 comparison costs about 1.6e8 word steps. Certificates use
the full quadratic table and are meant for short strings.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple, Sequence

import numba as nb
import numpy as np

from .strings import BitString

__all__ = [
    "Matching",
    "SearchResult",
    "lcs_length",
    "lcs_with_matching",
    "greedy_embed",
    "lcs_vs_set",
    "cover_quality",
    "avg_lcs",
    "edit_distance_equal_length",
    "lcs_against_all",
    "EXACT_COVER_LIMIT",
    "EXACT_AVG_LIMIT",
]

EXACT_COVER_LIMIT = 22
EXACT_AVG_LIMIT = 20
_TABLE_CELL_LIMIT = 200_000_000

_ALL = np.uint64(0xFFFFFFFFFFFFFFFF)


@nb.njit(cache=True, nogil=True)
def _popcount(v):
    v = v - ((v >> np.uint64(1)) & np.uint64(0x5555555555555555))
    v = (v & np.uint64(0x3333333333333333)) + ((v >> np.uint64(2)) & np.uint64(0x3333333333333333))
    v = (v + (v >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return int((v * np.uint64(0x0101010101010101)) >> np.uint64(56))


@nb.njit(cache=True, nogil=True)
def _match_masks(b):
    m = b.size
    words = (m + 63) >> 6
    masks = np.zeros((2, words), np.uint64)
    for j in range(m):
        masks[b[j], j >> 6] |= np.uint64(1) << np.uint64(j & 63)
    return masks


@nb.njit(cache=True, nogil=True)
def _bp_run(a, masks, m):
    words = masks.shape[1]
    v = np.full(words, _ALL)
    for i in range(a.size):
        mrow = masks[a[i]]
        carry = np.uint64(0)
        for w in range(words):
            vw = v[w]
            mw = mrow[w]
            s = vw + (vw & mw)
            c1 = np.uint64(1) if s < vw else np.uint64(0)
            s2 = s + carry
            c2 = np.uint64(1) if s2 < s else np.uint64(0)
            carry = c1 | c2
            v[w] = s2 | (vw & ~mw)
    ones = 0
    full = m >> 6
    for w in range(full):
        ones += _popcount(v[w])
    rem = m & 63
    if rem:
        ones += _popcount(v[full] & ((np.uint64(1) << np.uint64(rem)) - np.uint64(1)))
    return m - ones


@nb.njit(cache=True, nogil=True)
def _constant_lcs(const, other):
    # -1 unless ``const`` is a single repeated bit
    bit = const[0]
    for i in range(1, const.size):
        if const[i] != bit:
            return -1
    hits = 0
    for i in range(other.size):
        hits += other[i] == bit
    return min(const.size, hits)


@nb.njit(cache=True, nogil=True)
def _lcs_bp(a, b):
    if a.size == 0 or b.size == 0:
        return 0
    # constant strings (common adversarial sources) reduce to a bit count
    r = _constant_lcs(a, b)
    if r < 0:
        r = _constant_lcs(b, a)
    if r >= 0:
        return r
    return _bp_run(a, _match_masks(b), b.size)


@nb.njit(cache=True, nogil=True)
def _lcs_against_all(s, n):
    # LCS(s, x) for every x in {0,1}^n, x encoded MSB-first as an integer
    total = 1 << n
    out = np.zeros(total, np.int16)
    m = s.size
    if m == 0 or n == 0:
        return out
    masks = _match_masks(s)
    words = masks.shape[1]
    v = np.empty(words, np.uint64)
    full = m >> 6
    rem = m & 63
    tail = (np.uint64(1) << np.uint64(rem)) - np.uint64(1)
    for code in range(total):
        for w in range(words):
            v[w] = _ALL
        for i in range(n - 1, -1, -1):
            mrow = masks[(code >> i) & 1]
            carry = np.uint64(0)
            for w in range(words):
                vw = v[w]
                mw = mrow[w]
                t = vw + (vw & mw)
                c1 = np.uint64(1) if t < vw else np.uint64(0)
                t2 = t + carry
                c2 = np.uint64(1) if t2 < t else np.uint64(0)
                carry = c1 | c2
                v[w] = t2 | (vw & ~mw)
        ones = 0
        for w in range(full):
            ones += _popcount(v[w])
        if rem:
            ones += _popcount(v[full] & tail)
        out[code] = m - ones
    return out


@nb.njit(cache=True, nogil=True)
def _lcs_table(a, b):
    n, m = a.size, b.size
    d = np.zeros((n + 1, m + 1), np.int32)
    for i in range(1, n + 1):
        ai = a[i - 1]
        for j in range(1, m + 1):
            if ai == b[j - 1]:
                d[i, j] = d[i - 1, j - 1] + 1
            elif d[i - 1, j] >= d[i, j - 1]:
                d[i, j] = d[i - 1, j]
            else:
                d[i, j] = d[i, j - 1]
    return d


@dataclass(frozen=True)
class Matching:
    """Pairs ``(v, v')`` of 1-based positions, strictly increasing in both."""

    pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple((int(u), int(v)) for u, v in self.pairs))

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    @property
    def left(self) -> tuple[int, ...]:
        return tuple(p[0] for p in self.pairs)

    @property
    def right(self) -> tuple[int, ...]:
        return tuple(p[1] for p in self.pairs)

    def is_candidate(self) -> bool:
        """Strictly increasing in both coordinates, all positions >= 1."""
        ps = self.pairs
        if any(u < 1 or v < 1 for u, v in ps):
            return False
        return all(p[0] < q[0] and p[1] < q[1] for p, q in zip(ps, ps[1:]))

    def is_valid(self, z: BitString, z2: BitString) -> bool:
        """Candidate matching whose paired bits agree between ``z`` and ``z2``."""
        if not self.is_candidate():
            return False
        if self.pairs and (self.pairs[-1][0] > len(z) or self.pairs[-1][1] > len(z2)):
            return False
        return all(z.at(u) == z2.at(v) for u, v in self.pairs)


def lcs_length(a: BitString, b: BitString) -> int:
    """|LCS(a, b)| in O(|a| |b| / 64) time and O(min-side) memory."""
    if len(a) < len(b):
        a, b = b, a
    return int(_lcs_bp(a.bits, b.bits))


def lcs_with_matching(a: BitString, b: BitString) -> tuple[int, Matching]:
    """LCS length together with an optimal matching certificate."""
    n, m = len(a), len(b)
    if (n + 1) * (m + 1) > _TABLE_CELL_LIMIT:
        raise ValueError(f"certificate table {n}x{m} too large")
    d = _lcs_table(a.bits, b.bits)
    pairs = []
    i, j = n, m
    abits, bbits = a.bits, b.bits
    while i > 0 and j > 0:
        if abits[i - 1] == bbits[j - 1] and d[i, j] == d[i - 1, j - 1] + 1:
            pairs.append((i, j))
            i -= 1
            j -= 1
        elif d[i - 1, j] >= d[i, j - 1]:
            i -= 1
        else:
            j -= 1
    pairs.reverse()
    matching = Matching(tuple(pairs))
    length = int(d[n, m])
    assert len(matching) == length
    return length, matching


def greedy_embed(y: BitString, x: BitString) -> tuple[bool, tuple[int, ...]]:
    """Two-pointer scan of ``x`` matching ``y`` left to right.

    Returns ``(success, positions)``; positions are 1-based indices into
    ``x`` of the bits matched so far (all of ``y`` on success).
    """
    ybits = y.bits.tolist()
    positions = []
    p = 0
    if not ybits:
        return True, ()
    for idx, bit in enumerate(x.bits.tolist(), 1):
        if bit == ybits[p]:
            positions.append(idx)
            p += 1
            if p == len(ybits):
                return True, tuple(positions)
    return False, tuple(positions)


def lcs_vs_set(strings: Sequence[BitString], x: BitString) -> int:
    """max over s in S of |LCS(s, x)|."""
    if not strings:
        raise ValueError("LCS against an empty set is undefined")
    return max(lcs_length(s, x) for s in strings)


def edit_distance_equal_length(z: BitString, z2: BitString) -> int:
    """Insertion/deletion distance ``n - |LCS(z, z2)|`` for equal lengths."""
    if len(z) != len(z2):
        raise ValueError(f"lengths differ: {len(z)} != {len(z2)}")
    return len(z) - lcs_length(z, z2)


def lcs_against_all(s: BitString, n: int) -> np.ndarray:
    """Array of |LCS(s, x)| for all ``x`` in {0,1}^n indexed by ``x.to_int()``."""
    if n > 26:
        raise ValueError("enumeration beyond 2^26 strings is not supported")
    return _lcs_against_all(s.bits, n)


class SearchResult(NamedTuple):
    value: int | Fraction
    witness: BitString
    mode: str


def cover_quality(
    strings: Sequence[BitString],
    n: int,
    mode: str = "exact",
    *,
    restarts: int = 32,
    seed: int = 0,
    max_evals: int | None = None,
    limit: int = EXACT_COVER_LIMIT,
) -> SearchResult:
    """Largest ``h`` for which ``S`` is an h-LCS cover of {0,1}^n.

    ``exact`` enumerates all 2^n strings and returns min_x |LCS(S, x)|
    with a minimizing witness. ``search`` hill-climbs single-bit flips to
    find bad strings, so its value is only an upper bound on ``h``.
    """
    if not strings:
        raise ValueError("cover must contain at least one string")
    if mode == "exact":
        if n > limit:
            raise ValueError(f"exact cover evaluation limited to n <= {limit}")
        best = lcs_against_all(strings[0], n)
        for s in strings[1:]:
            np.maximum(best, lcs_against_all(s, n), out=best)
        code = int(np.argmin(best))
        return SearchResult(int(best[code]), BitString.from_int(code, n), "exact")
    if mode == "search":
        value, witness = _hill_climb(
            lambda x: lcs_vs_set(strings, x), n, restarts, seed, maximize=False, max_evals=max_evals
        )
        return SearchResult(int(value), witness, "search")
    raise ValueError(f"unknown mode {mode!r}")


def avg_lcs(
    strings: Sequence[BitString],
    n: int,
    mode: str = "exact",
    *,
    restarts: int = 32,
    seed: int = 0,
    max_evals: int | None = None,
    limit: int = EXACT_AVG_LIMIT,
) -> SearchResult:
    """AvgLCS(S) = max over x' in {0,1}^n of the mean |LCS(x', s)|.

    ``search`` reports the best average found, a certified lower bound.
    """
    if not strings:
        raise ValueError("AvgLCS of an empty set is undefined")
    k = len(strings)
    if mode == "exact":
        if n > limit:
            raise ValueError(f"exact AvgLCS limited to n <= {limit}")
        total = np.zeros(1 << n, np.int64)
        for s in strings:
            total += lcs_against_all(s, n)
        code = int(np.argmax(total))
        return SearchResult(Fraction(int(total[code]), k), BitString.from_int(code, n), "exact")
    if mode == "search":
        value, witness = _hill_climb(
            lambda x: sum(lcs_length(x, s) for s in strings), n, restarts, seed,
            maximize=True, max_evals=max_evals,
        )
        return SearchResult(Fraction(int(value), k), witness, "search")
    raise ValueError(f"unknown mode {mode!r}")


def _hill_climb(
    objective: Callable[[BitString], int],
    n: int,
    restarts: int,
    seed: int,
    *,
    maximize: bool,
    max_evals: int | None,
) -> tuple[int, BitString]:
    # first-improvement over single-bit flips, random sweep order, until a
    # full sweep finds nothing or the per-restart budget runs out
    rng = np.random.default_rng(seed)
    budget = max_evals if max_evals is not None else 20 * max(n, 1)
    sign = 1 if maximize else -1
    best_val, best_x = None, None
    for _ in range(max(restarts, 1)):
        bits = rng.integers(0, 2, n, dtype=np.uint8)
        cur = sign * objective(BitString(bits))
        evals = 1
        improved = n > 0
        while improved and evals < budget:
            improved = False
            for i in rng.permutation(n):
                bits[i] ^= 1
                val = sign * objective(BitString(bits))
                evals += 1
                if val > cur:
                    cur = val
                    improved = True
                else:
                    bits[i] ^= 1
                if evals >= budget:
                    break
        if best_val is None or cur > best_val:
            best_val, best_x = cur, BitString(bits)
    return sign * best_val, best_x
