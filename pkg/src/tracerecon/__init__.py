"""Approximate trace reconstruction over the binary deletion channel.

Samplers, LCS machinery, reconstruction algorithms, exact k-deck and
mixture tools, brute-force oracles and a seeded experiment harness.
"""
from .channel import Trace, delete_direct, delete_geometric_process, posterior_sample
from .harness import ExperimentConfig, ExperimentResult, run_experiment, worst_case_suite
from .lcs import Matching, lcs_length, lcs_with_matching
from .reconstruct import AlgAParams, Hypothesis
from .strings import BitString, bukh_ma_code, make_periodic

__version__ = "0.1.0"

__all__ = [
    "AlgAParams",
    "BitString",
    "ExperimentConfig",
    "ExperimentResult",
    "Hypothesis",
    "Matching",
    "Trace",
    "bukh_ma_code",
    "delete_direct",
    "delete_geometric_process",
    "lcs_length",
    "lcs_with_matching",
    "make_periodic",
    "posterior_sample",
    "run_experiment",
    "worst_case_suite",
]
