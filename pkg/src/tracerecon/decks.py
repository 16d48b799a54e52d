"""Exact k-decks of strings and mixtures of periodic strings.

Everything here is integer or :class:`~fractions.Fraction` arithmetic.
Words of length ``k`` are indexed by their MSB-first integer code.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .strings import BitString, make_periodic

__all__ = [
    "Deck",
    "MixtureSpec",
    "Verdict",
    "DECK_K_LIMIT",
    "deck",
    "deck_levels",
    "mixture_deck",
    "mixture_deck_levels",
    "vandermonde",
    "vandermonde_inverse",
    "elementary_symmetric",
    "solve_mixture",
    "valid_periods",
    "loglog_schedule",
    "verify_poly_structure",
    "verify_deck_equality",
    "deck_to_json",
    "deck_from_json",
]

DECK_K_LIMIT = 12


def _word(code: int, k: int) -> str:
    return format(code, f"0{k}b") if k else ""


@dataclass(frozen=True)
class Deck:
    """Subsequence counts of every length-``k`` word, for strings of length ``n``."""

    k: int
    n: int
    counts: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.counts) != 1 << self.k:
            raise ValueError("deck must have 2^k entries")
        object.__setattr__(self, "counts", tuple(Fraction(c) for c in self.counts))

    def __getitem__(self, word: str | BitString) -> Fraction:
        w = str(word)
        if len(w) != self.k:
            raise KeyError(word)
        return self.counts[int(w, 2) if w else 0]

    def items(self):
        return ((_word(c, self.k), v) for c, v in enumerate(self.counts))

    def as_dict(self) -> dict[str, Fraction]:
        return dict(self.items())

    def total(self) -> Fraction:
        return sum(self.counts, Fraction(0))

    def first_difference(self, other: Deck) -> tuple[str, Fraction, Fraction] | None:
        if (self.k, self.n) != (other.k, other.n):
            return ("<shape>", Fraction(self.k), Fraction(other.k))
        for code, (a, b) in enumerate(zip(self.counts, other.counts)):
            if a != b:
                return _word(code, self.k), a, b
        return None


def _runs(z: BitString) -> list[tuple[int, int]]:
    out: list[tuple[int, int]] = []
    for b in z:
        if out and out[-1][0] == b:
            out[-1] = (b, out[-1][1] + 1)
        else:
            out.append((b, 1))
    return out


def _trailing(code: int, length: int, bit: int) -> int:
    t = 0
    while t < length and ((code >> t) & 1) == bit:
        t += 1
    return t


def deck_levels(z: BitString, k: int) -> list[list[int]]:
    """Integer decks of ``z`` for every order ``0..k``.

    A run of ``L`` copies of ``c`` extends a word ``w`` whose last ``j``
    symbols are ``c`` in ``C(L, j)`` ways; levels are updated longest
    first so shorter words still hold the pre-run counts.
    """
    if k < 0 or k > DECK_K_LIMIT:
        raise ValueError(f"deck order must lie in [0, {DECK_K_LIMIT}]")
    if k > len(z):
        raise ValueError(f"deck order {k} exceeds string length {len(z)}")
    levels = [[0] * (1 << lv) for lv in range(k + 1)]
    levels[0][0] = 1
    for bit, length in _runs(z):
        binom = [math.comb(length, j) for j in range(k + 1)]
        for lv in range(k, 0, -1):
            row = levels[lv]
            for code in range(1 << lv):
                t = _trailing(code, lv, bit)
                if t == 0:
                    continue
                acc = row[code]
                for j in range(1, min(t, length) + 1):
                    acc += binom[j] * levels[lv - j][code >> j]
                row[code] = acc
    return levels


def deck(z: BitString, k: int) -> Deck:
    return Deck(k, len(z), tuple(deck_levels(z, k)[k]))


@dataclass(frozen=True)
class MixtureSpec:
    """Mixture of ``(0^r 1^r)^(ell/2r)`` over ``periods`` with weights ``p``.

    ``b`` is the moment vector, ``b_i = sum_j p_j r_j^i``.
    """

    ell: int
    k: int
    periods: tuple[int, ...]
    b: tuple[Fraction, ...]
    p: tuple[Fraction, ...] = field(default=())

    @property
    def is_distribution(self) -> bool:
        return all(pj >= 0 for pj in self.p)

    @property
    def p0(self) -> Fraction:
        return self.p[0]


def valid_periods(ell: int) -> list[int]:
    """Half-periods ``r`` with ``2r | ell``."""
    return [r for r in range(1, ell // 2 + 1) if ell % (2 * r) == 0]


def _check_periods(ell: int, periods: Sequence[int]) -> tuple[int, ...]:
    periods = tuple(int(r) for r in periods)
    if any(r < 1 or ell % (2 * r) for r in periods):
        raise ValueError(f"every period r needs 2r | ell = {ell}: {periods}")
    if any(a >= b for a, b in zip(periods, periods[1:])):
        raise ValueError(f"periods must be strictly increasing: {periods}")
    return periods


def vandermonde(periods: Sequence[int | Fraction]) -> list[list[Fraction]]:
    """``V[i][j] = r_j ** i``."""
    k = len(periods)
    return [[Fraction(r) ** i for r in periods] for i in range(k)]


def elementary_symmetric(values: Sequence[int | Fraction]) -> list[Fraction]:
    """``[e_0, e_1, ..., e_m]`` of the given values."""
    e = [Fraction(1)]
    for v in values:
        e = [a + Fraction(v) * b for a, b in zip(e + [Fraction(0)], [Fraction(0)] + e)]
    return e


def vandermonde_inverse(periods: Sequence[int | Fraction]) -> list[list[Fraction]]:
    """Closed-form inverse of :func:`vandermonde`.

    ``Vinv[i][j] = (-1)^j e^(i)_{k-1-j} / prod_{s != i} (r_s - r_i)``, where
    ``e^(i)`` are elementary symmetric polynomials of the periods other
    than ``r_i``. The product ``V @ Vinv`` is checked against the identity.
    """
    rs = [Fraction(r) for r in periods]
    k = len(rs)
    if len(set(rs)) != k:
        raise ValueError(f"periods must be distinct: {list(periods)}")
    inv = []
    for i in range(k):
        others = rs[:i] + rs[i + 1:]
        e = elementary_symmetric(others)
        denom = math.prod((s - rs[i] for s in others), start=Fraction(1))
        inv.append([(-1) ** j * e[k - 1 - j] / denom for j in range(k)])
    v = vandermonde(rs)
    for i in range(k):
        for j in range(k):
            dot = sum((v[i][s] * inv[s][j] for s in range(k)), Fraction(0))
            if dot != (1 if i == j else 0):
                raise ArithmeticError("Vandermonde inverse failed the identity check")
    return inv


def solve_mixture(ell: int, k: int, periods: Sequence[int], b: Sequence[Fraction | int]) -> MixtureSpec:
    """Weights ``p = V^{-1} b`` for the given periods and moments."""
    periods = _check_periods(ell, periods)
    b = tuple(Fraction(v) for v in b)
    if len(periods) != k or len(b) != k:
        raise ValueError(f"need exactly k = {k} periods and moments")
    if b[0] != 1:
        raise ValueError(f"b_0 must equal 1, got {b[0]}")
    inv = vandermonde_inverse(periods)
    p = tuple(sum((inv[i][j] * b[j] for j in range(k)), Fraction(0)) for i in range(k))
    v = vandermonde(periods)
    assert all(sum((v[i][j] * p[j] for j in range(k)), Fraction(0)) == b[i] for i in range(k))
    return MixtureSpec(ell, k, periods, b, p)


def loglog_schedule(ell: int, k: int, r0: int) -> tuple[tuple[int, ...], tuple[Fraction, ...], Fraction]:
    """Periods and moments following ``r_j ~ ell^(2/3) (log ell)^j``.

    The raw schedule overshoots ``ell / 2`` at desk-scale ``ell``, so it is
    rescaled to end at the largest valid period while keeping consecutive
    ratios ``log ell``; each target is rounded (in log scale) to a valid
    period and forced strictly above its predecessor. Moments are
    ``b_j = (log log ell)^(-j) * r_1 ... r_j``. Returns
    ``(periods, b, loglog)`` with ``loglog`` the rational value used.
    """
    valid = valid_periods(ell)
    if r0 not in valid:
        raise ValueError(f"r0 = {r0} is not a valid period for ell = {ell}")
    log_ell = math.log2(ell)
    loglog = Fraction.from_float(math.log2(log_ell))
    top = valid[-1]
    periods = [r0]
    for j in range(1, k):
        target = top / log_ell ** (k - 1 - j)
        above = [r for r in valid if r > periods[-1]]
        if not above:
            raise ValueError(f"cannot fit {k} increasing periods below ell/2 = {top}")
        periods.append(min(above, key=lambda r: (abs(math.log2(r / target)), r)))
    b = [Fraction(1)]
    prod = Fraction(1)
    for j in range(1, k):
        prod *= periods[j]
        b.append(prod / loglog**j)
    return tuple(periods), tuple(b), loglog


def mixture_deck_levels(spec: MixtureSpec) -> list[list[Fraction]]:
    levels = [[Fraction(0)] * (1 << lv) for lv in range(spec.k + 1)]
    for r, pj in zip(spec.periods, spec.p):
        comp = deck_levels(make_periodic(r, spec.ell), spec.k)
        for lv in range(spec.k + 1):
            row = levels[lv]
            for code, c in enumerate(comp[lv]):
                row[code] += pj * c
    return levels


def mixture_deck(spec: MixtureSpec) -> Deck:
    """``sum_j p_j D_k(x^(r_j))`` exactly."""
    return Deck(spec.k, spec.ell, tuple(mixture_deck_levels(spec)[spec.k]))


@dataclass(frozen=True)
class Verdict:
    ok: bool
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _lagrange(xs: Sequence[Fraction], ys: Sequence[Fraction], at: Fraction) -> Fraction:
    total = Fraction(0)
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        term = Fraction(yi)
        for j, xj in enumerate(xs):
            if j != i:
                term *= Fraction(at - xj, xi - xj)
        total += term
    return total


def verify_poly_structure(
    ell: int,
    k: int,
    y: str | BitString,
    periods: Sequence[int],
    counts: dict[int, int | Fraction] | None = None,
) -> Verdict:
    """Check that ``t -> D_k((0^t 1^t)^(ell/2t))_y`` has degree below ``k``.

    The first ``k`` periods fix the interpolating polynomial, which must
    reproduce the count at every remaining period. ``counts`` overrides
    computed counts per period (used to feed corrupted data).
    """
    y = str(y)
    if len(y) != k:
        raise ValueError(f"word {y!r} does not have length k = {k}")
    periods = sorted(set(_check_periods(ell, sorted(periods))))
    if len(periods) < k + 1:
        raise ValueError(f"need at least k + 1 = {k + 1} periods, got {len(periods)}")
    values = {}
    for t in periods:
        if counts is not None and t in counts:
            values[t] = Fraction(counts[t])
        else:
            values[t] = deck(make_periodic(t, ell), k)[y]
    base = periods[:k]
    xs = [Fraction(t) for t in base]
    ys = [values[t] for t in base]
    for t in periods[k:]:
        predicted = _lagrange(xs, ys, Fraction(t))
        if predicted != values[t]:
            return Verdict(False, f"period {t}: predicted {predicted}, counted {values[t]}")
    return Verdict(True, f"degree < {k} in t on periods {periods}")


def verify_deck_equality(specs: Sequence[MixtureSpec]) -> Verdict:
    """Exact equality of mixture decks of every order ``1..k``.

    The verdict detail names the first differing order and word.
    """
    if not specs:
        return Verdict(True, "no specs")
    first = specs[0]
    for s in specs[1:]:
        if (s.ell, s.k) != (first.ell, first.k):
            return Verdict(False, f"shape mismatch: {(s.ell, s.k)} vs {(first.ell, first.k)}")
    ref = mixture_deck_levels(first)
    for idx, s in enumerate(specs[1:], 1):
        other = mixture_deck_levels(s)
        for lv in range(1, first.k + 1):
            for code, (a, b) in enumerate(zip(ref[lv], other[lv])):
                if a != b:
                    return Verdict(
                        False, f"spec {idx}, order {lv}, word {_word(code, lv)}: {a} != {b}"
                    )
    return Verdict(True, f"{len(specs)} mixtures agree on all decks up to order {first.k}")


def deck_to_json(d: Deck) -> str:
    entries = {w: f"{c.numerator}/{c.denominator}" for w, c in d.items()}
    return json.dumps({"k": d.k, "n": d.n, "entries": entries})


def deck_from_json(text: str) -> Deck:
    obj = json.loads(text)
    k = int(obj["k"])
    counts = [Fraction(0)] * (1 << k)
    for w, v in obj["entries"].items():
        counts[int(w, 2) if w else 0] = Fraction(v)
    return Deck(k, int(obj["n"]), tuple(counts))
