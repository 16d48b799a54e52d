"""Bit strings and the structured strings used throughout the package.

Positions are 1-based in every public API that reports indices
(matchings, retained sets, greedy embeddings), so ``x_i`` is ``x.at(i)``
and equals ``x[i - 1]`` in ordinary Python indexing.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "BitString",
    "PeriodicSpec",
    "make_periodic",
    "bukh_ma_code",
    "bukh_ma_periods",
    "count_disjoint_01",
    "runs",
    "read_strings",
    "write_strings",
    "parse_line",
]


class BitString:
    """Immutable binary string of explicit length.

    Bits live in a read-only ``uint8`` array of zeros and ones; kernels
    consume :attr:`bits` directly. Python indexing (``x[i]``, slices) is
    0-based; :meth:`at` is the 1-based accessor matching ``x = (x_1..x_n)``.
    """

    __slots__ = ("_bits", "_hash")

    def __init__(self, bits: Iterable[int] | np.ndarray | str | BitString = ()):
        if isinstance(bits, BitString):
            arr = bits._bits
        elif isinstance(bits, str):
            arr = _parse_chars(bits)
        else:
            arr = np.asarray(bits if isinstance(bits, np.ndarray) else list(bits))
            if arr.size and not np.isin(arr, (0, 1)).all():
                raise ValueError("bits must be 0 or 1")
            arr = arr.astype(np.uint8, copy=True).reshape(-1)
        if arr.flags.writeable:
            arr = arr.copy()
            arr.flags.writeable = False
        self._bits = arr
        self._hash = None

    # constructors
    @classmethod
    def zeros(cls, n: int) -> BitString:
        return cls(np.zeros(n, np.uint8))

    @classmethod
    def ones(cls, n: int) -> BitString:
        return cls(np.ones(n, np.uint8))

    @classmethod
    def from_int(cls, value: int, n: int) -> BitString:
        """String whose first bit is the most significant bit of ``value``."""
        if value < 0 or value >> n:
            raise ValueError(f"{value} does not fit in {n} bits")
        return cls([(value >> (n - 1 - i)) & 1 for i in range(n)])

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> BitString:
        return cls(rng.integers(0, 2, n, dtype=np.uint8))

    # accessors
    @property
    def bits(self) -> np.ndarray:
        return self._bits

    def at(self, i: int) -> int:
        """The bit x_i, 1 <= i <= n."""
        if not 1 <= i <= len(self):
            raise IndexError(f"position {i} outside [1, {len(self)}]")
        return int(self._bits[i - 1])

    def to_int(self) -> int:
        value = 0
        for b in self._bits.tolist():
            value = (value << 1) | b
        return value

    def count(self, bit: int) -> int:
        ones = int(self._bits.sum())
        return ones if bit else len(self) - ones

    def restrict(self, positions: Sequence[int]) -> BitString:
        """Subsequence at the given 1-based positions."""
        idx = np.asarray(positions, dtype=np.int64) - 1
        return BitString(self._bits[idx])

    # sequence protocol
    def __len__(self) -> int:
        return int(self._bits.size)

    def __iter__(self) -> Iterator[int]:
        return iter(self._bits.tolist())

    def __getitem__(self, key):
        if isinstance(key, slice):
            return BitString(self._bits[key])
        return int(self._bits[key])

    def __add__(self, other: BitString) -> BitString:
        if not isinstance(other, BitString):
            return NotImplemented
        return BitString(np.concatenate([self._bits, other._bits]))

    def __mul__(self, times: int) -> BitString:
        return BitString(np.tile(self._bits, max(times, 0)))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, str):
            return str(self) == other
        if not isinstance(other, BitString):
            return NotImplemented
        return len(self) == len(other) and bool(np.array_equal(self._bits, other._bits))

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((len(self), self._bits.tobytes()))
        return self._hash

    def __str__(self) -> str:
        return (self._bits + ord("0")).tobytes().decode("ascii")

    def __repr__(self) -> str:
        s = str(self)
        if len(s) > 40:
            s = s[:37] + "..."
        return f"BitString('{s}', n={len(self)})"


def _parse_chars(text: str) -> np.ndarray:
    raw = np.frombuffer(text.encode("ascii", errors="replace"), dtype=np.uint8)
    arr = raw - ord("0")
    if arr.size and (arr > 1).any():
        bad = text[int(np.argmax(arr > 1))]
        raise ValueError(f"invalid character {bad!r} in bit string")
    return arr.astype(np.uint8)


@dataclass(frozen=True)
class PeriodicSpec:
    """Half-period ``r`` and total length ``n`` of ``(0^r 1^r)^(n/2r)``."""

    r: int
    n: int

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("half-period r must be positive")
        if self.n < 0 or self.n % (2 * self.r):
            raise ValueError(f"2r = {2 * self.r} does not divide n = {self.n}")


def make_periodic(spec: PeriodicSpec | int, n: int | None = None) -> BitString:
    """``(0^r 1^r)^(n/2r)``; accepts a :class:`PeriodicSpec` or ``(r, n)``."""
    if not isinstance(spec, PeriodicSpec):
        spec = PeriodicSpec(spec, n)
    block = np.repeat(np.array([0, 1], np.uint8), spec.r)
    return BitString(np.tile(block, spec.n // (2 * spec.r)))


def bukh_ma_periods(inv_eps4: int, ell: int) -> list[int]:
    """Half-periods ``r = (1/eps^4)^u`` for ``u = 1 .. floor(log_{1/eps^4}(ell) / 2)``."""
    if isinstance(inv_eps4, bool) or not isinstance(inv_eps4, (int, np.integer)):
        raise ValueError("1/eps^4 must be an integer")
    if inv_eps4 < 2:
        raise ValueError("1/eps^4 must be at least 2")
    periods = []
    r = int(inv_eps4)
    # u is admissible while q^(2u) <= ell, i.e. r*r <= ell
    while r * r <= ell:
        periods.append(r)
        r *= inv_eps4
    return periods


def bukh_ma_code(n: int, inv_eps4: int, ell: int) -> list[BitString]:
    """Codewords ``A_u = (0^r 1^r)^(n/2r)`` in increasing ``u``.

    ``eps`` enters only through the integer ``inv_eps4 = 1/eps^4`` so that
    every period is integral. Each period ``2r`` must divide the segment
    length ``ell``, and ``ell`` must divide ``n``.
    """
    if ell < 1 or n % ell:
        raise ValueError(f"segment length {ell} does not divide n = {n}")
    periods = bukh_ma_periods(inv_eps4, ell)
    for r in periods:
        if ell % (2 * r):
            raise ValueError(f"period 2r = {2 * r} does not divide segment length {ell}")
    return [make_periodic(r, n) for r in periods]


def count_disjoint_01(x: BitString) -> int:
    """Maximum number of disjoint ``01`` subsequence pairs (greedy pairing)."""
    open_zeros = 0
    pairs = 0
    for b in x:
        if b == 0:
            open_zeros += 1
        elif open_zeros:
            open_zeros -= 1
            pairs += 1
    return pairs


def runs(x: BitString) -> list[tuple[int, int]]:
    """Maximal runs as ``(bit, length)`` pairs."""
    bits = x.bits
    if bits.size == 0:
        return []
    starts = np.flatnonzero(np.diff(bits.astype(np.int8))) + 1
    edges = np.concatenate([[0], starts, [bits.size]])
    return [(int(bits[s]), int(e - s)) for s, e in zip(edges[:-1], edges[1:])]


def parse_line(line: str) -> BitString:
    return BitString(line.rstrip("\r\n"))


def read_strings(source: str | os.PathLike | Iterable[str]) -> list[BitString]:
    """Read one ``0``/``1`` string per line; any other character is an error."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="ascii") as fh:
            lines = fh.read().splitlines()
    else:
        lines = [ln.rstrip("\r\n") for ln in source]
    out = []
    for lineno, line in enumerate(lines, 1):
        try:
            out.append(BitString(line))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return out


def write_strings(strings: Iterable[BitString], dest: str | os.PathLike | None = None) -> str:
    text = "".join(f"{s}\n" for s in strings)
    if dest is not None:
        with open(dest, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    return text
