"""Reconstruction algorithms mapping a trace (or nothing) to an n-bit hypothesis.

Real-valued lengths are rounded half-up, majority ties break to 0, and
every output is right-padded with zeros or truncated to exactly ``n`` bits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .channel import Trace
from .strings import BitString

__all__ = [
    "Hypothesis",
    "AlgAParams",
    "AlgADerived",
    "DEFAULT_PARAMS",
    "SCALED_PARAMS",
    "round_half_up",
    "majority",
    "zero_trace_alternating",
    "zero_trace_bukh_cox",
    "one_trace_cover",
    "algorithm_a",
    "small_rate_reconstruct",
    "RECONSTRUCTORS",
    "get_reconstructor",
    "BUKH_COX_PERIOD",
]

BUKH_COX_PERIOD = "0110111010010110010001011010"


def round_half_up(value: float | Fraction) -> int:
    return math.floor(value + Fraction(1, 2)) if isinstance(value, Fraction) else math.floor(value + 0.5)


def majority(bits: np.ndarray) -> int:
    """Majority bit of ``bits``; empty input and ties give 0."""
    ones = int(np.count_nonzero(bits))
    return 1 if 2 * ones > bits.size else 0


def _fit(parts: list[np.ndarray], n: int) -> BitString:
    arr = np.concatenate(parts) if parts else np.zeros(0, np.uint8)
    if arr.size >= n:
        return BitString(arr[:n])
    return BitString(np.concatenate([arr, np.zeros(n - arr.size, np.uint8)]))


def _alt(pairs: int) -> np.ndarray:
    return np.tile(np.array([0, 1], np.uint8), max(pairs, 0))


def _run(bit: int, length: int) -> np.ndarray:
    return np.full(max(length, 0), bit, np.uint8)


def _bits(y: Trace | BitString | np.ndarray) -> np.ndarray:
    if isinstance(y, np.ndarray):
        return y
    return (y.y if isinstance(y, Trace) else y).bits


@dataclass(frozen=True)
class Hypothesis:
    x: BitString
    algorithm: str
    case: int | str | None = None

    def __len__(self) -> int:
        return len(self.x)


def zero_trace_alternating(n: int) -> Hypothesis:
    """``(01)^(n/2)``; odd ``n`` gets a trailing 0."""
    return Hypothesis(_fit([_alt(n // 2)], n), "zero-alt")


def zero_trace_bukh_cox(n: int) -> Hypothesis:
    """The period-28 string repeated, cut to ``n`` bits when 28 does not divide ``n``."""
    period = BitString(BUKH_COX_PERIOD).bits
    reps = -(-n // len(period))
    return Hypothesis(BitString(np.tile(period, reps)[:n]), "zero-bukhcox")


def one_trace_cover(y: Trace | BitString, n: int, rho: float) -> Hypothesis:
    """``(01)^(n/3) z^(n/3)`` with ``z`` the majority of the trace's tail.

    The tail is the last ``round(2 rho n / 3)`` bits of the trace (or all of
    it when shorter).
    """
    bits = _bits(y)
    window = min(bits.size, round_half_up(2 * rho * n / 3))
    z = majority(bits[bits.size - window:])
    third = round_half_up(n / 3)
    return Hypothesis(_fit([_alt(third), _run(z, third)], n), "cover", z)


@dataclass(frozen=True)
class AlgAParams:
    """Constants of Algorithm A.

    ``gamma = gamma_ratio * rho`` is the Case 0 slack; ``block_width`` is
    the length of each trace block inspected for purity.
    """

    block_width: int = 2000
    gamma_ratio: Fraction = Fraction(1, 720000)
    pure_fraction: Fraction = Fraction(4, 5)

    def __post_init__(self):
        if self.block_width < 2:
            raise ValueError("block width must be at least 2")
        if not 0 <= self.gamma_ratio < 1:
            raise ValueError("gamma ratio must lie in [0, 1)")

    def derive(self, n: int, rho: float) -> AlgADerived:
        prefix = round_half_up(rho * n / 3)
        blocks = prefix // self.block_width
        # block-count forms of c = n/3 - rho n/60000, a = rho n/45000,
        # b = n/3 - rho n/90000 (they coincide when blocks = rho n/6000)
        c = round_half_up(Fraction(n, 3) - Fraction(blocks, 10))
        a = round_half_up(Fraction(2 * blocks, 15))
        b = round_half_up(Fraction(n, 3) - Fraction(blocks, 15))
        return AlgADerived(
            prefix=prefix,
            blocks=blocks,
            a=a,
            b=b,
            c=c,
            gamma=float(self.gamma_ratio) * rho,
            stretch=round_half_up(self.block_width / rho),
            tail1=round_half_up(2 * rho * b),
            tail2=round_half_up(2 * rho * n / 9),
            part2=round_half_up(2 * n / 9),
        )


@dataclass(frozen=True)
class AlgADerived:
    prefix: int
    blocks: int
    a: int
    b: int
    c: int
    gamma: float
    stretch: int
    tail1: int
    tail2: int
    part2: int

    def case1_length(self) -> int:
        return 2 * (self.c + self.a) + self.b


DEFAULT_PARAMS = AlgAParams()
SCALED_PARAMS = AlgAParams(block_width=20, gamma_ratio=Fraction(1, 100))


def algorithm_a(
    y: Trace | BitString, n: int, rho: float, params: AlgAParams = DEFAULT_PARAMS
) -> Hypothesis:
    """Three-case one-trace reconstruction for small retention ``rho``.

    Case 0 (short trace) gives ``0^n``. Otherwise the first ``rho n / 3``
    trace bits are cut into blocks of ``block_width``. With few pure
    blocks the output is ``(01)^(c+a) z^b``; with many it stretches each
    block's bit by ``1/rho`` and appends ``(01)^(2n/9) z^(2n/9)``.
    """
    if not 0 < rho < 1:
        raise ValueError(f"retention {rho} outside (0, 1)")
    bits = _bits(y)
    d = params.derive(n, rho)
    if bits.size < (rho - d.gamma) * n:
        return Hypothesis(_fit([_run(0, n)], n), "alg-a", 0)
    if d.blocks == 0:
        h = one_trace_cover(bits, n, rho)
        return Hypothesis(h.x, "alg-a", "fallback")
    w = params.block_width
    head = bits[: d.blocks * w].reshape(d.blocks, w)
    ones = head.sum(axis=1)
    pure = (ones == 0) | (ones == w)
    if np.count_nonzero(pure) < params.pure_fraction * d.blocks:
        z = majority(bits[bits.size - min(d.tail1, bits.size):])
        return Hypothesis(_fit([_alt(d.c + d.a), _run(z, d.b)], n), "alg-a", 1)
    z = majority(bits[bits.size - min(d.tail2, bits.size):])
    block_bits = np.where(pure, head[:, 0], 0).astype(np.uint8)
    first = np.repeat(block_bits, d.stretch)
    return Hypothesis(_fit([first, _alt(d.part2), _run(z, d.part2)], n), "alg-a", 2)


def small_rate_reconstruct(
    y: Trace | BitString, n: int, delta: float, rng: np.random.Generator
) -> Hypothesis:
    """Place each trace bit after a Geometric(1 - delta) - 1 burst of fair bits."""
    if not 0 <= delta < 1:
        raise ValueError(f"deletion probability {delta} outside [0, 1)")
    bits = _bits(y)
    m = bits.size
    if m == 0:
        return Hypothesis(_fit([], n), "small-rate")
    bursts = rng.geometric(1.0 - delta, m) - 1
    total = m + int(bursts.sum())
    out = rng.integers(0, 2, total, dtype=np.uint8)
    slots = np.cumsum(bursts + 1) - 1
    out[slots] = bits
    return Hypothesis(_fit([out], n), "small-rate")


# Uniform call signature for the harness: (trace, n, delta, rng, params).
Reconstructor = Callable[[Trace, int, float, np.random.Generator, AlgAParams], Hypothesis]

RECONSTRUCTORS: dict[str, Reconstructor] = {
    "zero-alt": lambda y, n, delta, rng, params: zero_trace_alternating(n),
    "zero-bukhcox": lambda y, n, delta, rng, params: zero_trace_bukh_cox(n),
    "cover": lambda y, n, delta, rng, params: one_trace_cover(y, n, 1.0 - delta),
    "alg-a": lambda y, n, delta, rng, params: algorithm_a(y, n, 1.0 - delta, params),
    "small-rate": lambda y, n, delta, rng, params: small_rate_reconstruct(y, n, delta, rng),
}

ZERO_TRACE = frozenset({"zero-alt", "zero-bukhcox"})


def get_reconstructor(name: str) -> Reconstructor:
    try:
        return RECONSTRUCTORS[name]
    except KeyError:
        raise ValueError(f"unknown algorithm {name!r}; choose from {sorted(RECONSTRUCTORS)}") from None
