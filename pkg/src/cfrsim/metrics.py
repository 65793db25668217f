"""Aggregation of per-realization rate reports into resilience metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .uplink import RateReport


@dataclass(frozen=True)
class AggregateResult:
    """Failure-averaged metrics over a batch of rate reports.

    per_ue_mean_se[k] averages UE k's SE across all reports; min_se and
    mean_se are the minimum and mean of that vector (worst-case and
    average user throughput); outage_prob is the fraction of
    (UE, realization) pairs left without any active serving AP.
    cdf_points holds the empirical CDF of per_ue_mean_se for diagnostics.
    """

    min_se: float
    mean_se: float
    outage_prob: float
    per_ue_mean_se: np.ndarray
    cdf_points: np.ndarray


def empirical_cdf(values) -> np.ndarray:
    """Empirical CDF as an (n_unique, 2) array of (value, cumulative fraction).

    Both columns are nondecreasing and the last fraction is exactly 1.
    """
    values = np.asarray(values, dtype=float).ravel()
    if values.size == 0:
        raise ValueError("empirical_cdf needs at least one value")
    uniq, counts = np.unique(values, return_counts=True)
    frac = np.cumsum(counts) / values.size
    return np.column_stack([uniq, frac])


def aggregate(reports: list[RateReport]) -> AggregateResult:
    """Combine rate reports (same K) into failure-averaged metrics."""
    if not reports:
        raise ValueError("aggregate needs at least one report")
    k = reports[0].se.shape[0]
    for r in reports:
        if r.se.shape[0] != k:
            raise ValueError("all reports must cover the same number of UEs")
    se = np.stack([r.se for r in reports])
    outage = np.stack([r.outage for r in reports])
    per_ue = se.mean(axis=0)
    return AggregateResult(
        min_se=float(per_ue.min()),
        mean_se=float(per_ue.mean()),
        outage_prob=float(outage.mean()),
        per_ue_mean_se=per_ue,
        cdf_points=empirical_cdf(per_ue),
    )
