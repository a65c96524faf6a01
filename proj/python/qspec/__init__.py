"""Rank-based copula spectral analysis (C++ core)."""

from ._qspec import (
    DataError,
    UsageError,
    analyze,
    cr_periodogram,
    measure_periodogram,
    rank_transform,
    simulate,
    spearman_periodogram,
    white_noise_spectrum,
)

__all__ = [
    "DataError",
    "UsageError",
    "analyze",
    "cr_periodogram",
    "measure_periodogram",
    "rank_transform",
    "simulate",
    "spearman_periodogram",
    "white_noise_spectrum",
]
