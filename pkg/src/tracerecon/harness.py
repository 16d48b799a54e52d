"""Seeded Monte Carlo experiments over the reconstruction algorithms.

Trial ``i`` draws everything from ``default_rng([seed, i])`` (suite
members use ``[seed, member, i]``), and results are folded in trial
order, so output does not depend on the number of worker threads.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .channel import delete_direct
from .lcs import lcs_length
from .reconstruct import (
    DEFAULT_PARAMS,
    AlgAParams,
    get_reconstructor,
    zero_trace_alternating,
    zero_trace_bukh_cox,
)
from .stats import RunningStats
from .strings import BitString, bukh_ma_code, read_strings

__all__ = [
    "ExperimentConfig",
    "ExperimentResult",
    "MemberStats",
    "run_experiment",
    "worst_case_suite",
    "suite_code_segment",
    "emit",
    "CSV_COLUMNS",
]

CSV_COLUMNS = ("algo", "n", "delta", "trials", "seed", "mean_lcs", "stderr", "ci95_lo", "ci95_hi")
SOURCES = ("average", "suite", "file")
SUITE_RANDOM = 8


@dataclass(frozen=True)
class ExperimentConfig:
    algorithm: str
    n: int
    delta: float
    trials: int = 200
    seed: int = 0
    source: str = "average"
    strings_path: str | None = None
    params: AlgAParams = DEFAULT_PARAMS
    keep_values: bool = False

    def __post_init__(self):
        get_reconstructor(self.algorithm)
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if not 0 <= self.delta <= 1:
            raise ValueError(f"delta = {self.delta} outside [0, 1]")
        if self.source not in SOURCES:
            raise ValueError(f"source must be one of {SOURCES}")
        if (self.source == "file") != (self.strings_path is not None):
            raise ValueError("an explicit strings file goes with source 'file' and only with it")
        if self.source == "suite" and self.n < 28:
            raise ValueError("the worst-case suite needs n >= 28")

    @classmethod
    def with_rho(cls, algorithm: str, n: int, rho: float, **kw) -> ExperimentConfig:
        return cls(algorithm, n, 1.0 - rho, **kw)

    @property
    def rho(self) -> float:
        return 1.0 - self.delta

    @classmethod
    def from_dict(cls, d: dict) -> ExperimentConfig:
        d = dict(d)
        if "rho" in d:
            if "delta" in d:
                raise ValueError("give delta or rho, not both")
            d["delta"] = 1.0 - float(d.pop("rho"))
        p = d.pop("params", None)
        if p is not None:
            p = AlgAParams(
                block_width=int(p.get("block_width", DEFAULT_PARAMS.block_width)),
                gamma_ratio=Fraction(str(p.get("gamma_ratio", DEFAULT_PARAMS.gamma_ratio))),
            )
            d["params"] = p
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


@dataclass(frozen=True)
class MemberStats:
    label: str
    mean_lcs: float
    stderr: float
    ci95: tuple[float, float]


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    mean_lcs: float
    stderr: float
    ci95: tuple[float, float]
    trials: int
    values: list[int] | None = None
    members: list[MemberStats] = field(default_factory=list)
    worst_member: str | None = None
    wall_clock: float = 0.0

    @property
    def mean_fraction(self) -> float:
        return self.mean_lcs / self.config.n if self.config.n else 1.0

    def row(self) -> dict[str, object]:
        c = self.config
        return {
            "algo": c.algorithm,
            "n": c.n,
            "delta": c.delta,
            "trials": self.trials,
            "seed": c.seed,
            "mean_lcs": self.mean_lcs,
            "stderr": self.stderr,
            "ci95_lo": self.ci95[0],
            "ci95_hi": self.ci95[1],
        }

    def member_rows(self) -> list[dict[str, object]]:
        out = []
        for m in self.members:
            r = self.row()
            r.update(algo=f"{self.config.algorithm}:{m.label}", mean_lcs=m.mean_lcs, stderr=m.stderr,
                     ci95_lo=m.ci95[0], ci95_hi=m.ci95[1])
            out.append(r)
        return out


def suite_code_segment(n: int, inv_eps4: int = 4) -> int | None:
    """Segment length giving the largest valid code (largest segment on ties)."""
    best = None
    for ell in range(1, n + 1):
        if n % ell:
            continue
        try:
            size = len(bukh_ma_code(n, inv_eps4, ell))
        except ValueError:
            continue
        if size and (best is None or size >= best[0]):
            best = (size, ell)
    return None if best is None else best[1]


def worst_case_suite(n: int, seed: int = 0, labels: bool = False):
    """Adversarial sources standing in for the minimum over all ``x``.

    Zeros, ones, alternating, the period-28 string, the 1/eps^4 = 4 code
    and eight random strings. Pass ``labels=True`` to get (label, string) pairs.
    """
    if n < 28:
        raise ValueError("suite needs n >= 28")
    members = [
        ("zeros", BitString.zeros(n)),
        ("ones", BitString.ones(n)),
        ("alternating", zero_trace_alternating(n).x),
        ("bukh-cox", zero_trace_bukh_cox(n).x),
    ]
    ell = suite_code_segment(n)
    if ell is not None:
        for u, a in enumerate(bukh_ma_code(n, 4, ell), 1):
            members.append((f"code-{u}", a))
    rng = np.random.default_rng([seed, 0x5717E])
    for i in range(SUITE_RANDOM):
        members.append((f"random-{i + 1}", BitString.random(n, rng)))
    return members if labels else [m for _, m in members]


def _trial(cfg: ExperimentConfig, x: BitString | None, stream: list[int]) -> int:
    rng = np.random.default_rng(stream)
    if x is None:
        x = BitString.random(cfg.n, rng)
    trace = delete_direct(x, cfg.delta, rng)
    algo = get_reconstructor(cfg.algorithm)
    hyp = algo(trace, cfg.n, cfg.delta, rng, cfg.params)
    return lcs_length(hyp.x, x)


def _run_trials(cfg, x, prefix, threads) -> list[int]:
    streams = [prefix + [i] for i in range(cfg.trials)]
    if threads <= 1:
        return [_trial(cfg, x, s) for s in streams]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda s: _trial(cfg, x, s), streams))


def _fold(values: Sequence[int]) -> RunningStats:
    return RunningStats().extend(values)


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    """Run all trials and aggregate; suite/file modes report the worst member."""
    start = time.perf_counter()
    if cfg.source == "average":
        values = _run_trials(cfg, None, [cfg.seed], threads)
        st = _fold(values)
        res = ExperimentResult(cfg, st.mean, st.stderr, st.ci95(), cfg.trials,
                               values if cfg.keep_values else None)
    else:
        if cfg.source == "suite":
            members = worst_case_suite(cfg.n, cfg.seed, labels=True)
        else:
            strings = read_strings(cfg.strings_path)
            if not strings:
                raise ValueError(f"{cfg.strings_path}: no strings")
            bad = [i for i, s in enumerate(strings, 1) if len(s) != cfg.n]
            if bad:
                raise ValueError(f"{cfg.strings_path}: line {bad[0]} does not have length {cfg.n}")
            members = [(f"line-{i}", s) for i, s in enumerate(strings, 1)]
        stats = []
        all_values = []
        for idx, (label, x) in enumerate(members):
            values = _run_trials(cfg, x, [cfg.seed, idx], threads)
            st = _fold(values)
            stats.append(MemberStats(label, st.mean, st.stderr, st.ci95()))
            all_values.append(values)
        worst = min(range(len(stats)), key=lambda i: (stats[i].mean_lcs, i))
        w = stats[worst]
        res = ExperimentResult(cfg, w.mean_lcs, w.stderr, w.ci95, cfg.trials,
                               all_values[worst] if cfg.keep_values else None,
                               stats, w.label)
    res.wall_clock = time.perf_counter() - start
    assert 0 <= res.mean_lcs <= cfg.n and res.ci95[0] <= res.ci95[1]
    return res


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    return str(v)


def emit(results: Sequence[ExperimentResult], fmt: str = "csv", path: str | os.PathLike | None = None,
         per_member: bool = False) -> str:
    """Serialize results as CSV (fixed columns) or JSON; write to ``path`` if given.

    Wall-clock time is never written, so files are byte-stable.
    """
    rows = []
    for r in results:
        rows.extend(r.member_rows() if per_member and r.members else [r.row()])
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for row in rows:
            w.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
        text = buf.getvalue()
    elif fmt == "json":
        text = json.dumps(rows, indent=2) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    return text
