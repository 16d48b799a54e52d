"""Streaming mean/variance (Welford) and normal-approximation intervals."""
from __future__ import annotations

import math
from dataclasses import dataclass

Z95 = 1.959963984540054


@dataclass
class RunningStats:
    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def push(self, value: float) -> None:
        self.count += 1
        d = value - self.mean
        self.mean += d / self.count
        self.m2 += d * (value - self.mean)

    def extend(self, values) -> RunningStats:
        for v in values:
            self.push(float(v))
        return self

    @property
    def variance(self) -> float:
        return self.m2 / (self.count - 1) if self.count > 1 else 0.0

    @property
    def stderr(self) -> float:
        return math.sqrt(self.variance / self.count) if self.count else 0.0

    def ci95(self) -> tuple[float, float]:
        half = Z95 * self.stderr
        return self.mean - half, self.mean + half
