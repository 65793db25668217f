"""Serving-cluster selection and the Bernoulli AP failure model.

Three schemes are supported:

* ``faas`` (failure-aware): APs are ranked by the reliability-weighted
  gain w_m = beta_mk * (1 - p_m^f) and the smallest prefix whose share of
  the total weight reaches a threshold epsilon is kept, then enlarged to a
  minimum cluster size.
* ``agnostic``: identical rule with the reliability factor removed
  (w_m = beta_mk), i.e. failure probabilities are ignored.
* ``all_aps``: every AP serves every UE.

Failure intensity is a scalar alpha in [0, 1] that scales each AP's
baseline failure probability; failures are then independent Bernoulli
draws per AP.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .geometry import NetworkSnapshot


class Scheme(str, Enum):
    FAAS = "faas"
    AGNOSTIC = "agnostic"
    ALL_APS = "all_aps"


@dataclass(frozen=True)
class ClusterAssignment:
    """Per-UE serving clusters plus the scheme that produced them.

    clusters[k] lists AP indices in descending order of the scheme's
    ranking weight; master_ap[k] is the top-ranked AP (-1 if the cluster
    is empty, which marks the UE as structurally unservable).
    """

    clusters: tuple[np.ndarray, ...]
    master_ap: np.ndarray
    scheme: Scheme
    epsilon: float
    min_cluster: int


@dataclass(frozen=True)
class FailureRealization:
    """One Bernoulli draw of which APs are alive.

    alive[m] is False with probability effective_probs[m].
    """

    alive: np.ndarray
    effective_probs: np.ndarray


@dataclass(frozen=True)
class BlockSelector:
    """Block-diagonal selector D_k, stored as an AP index set plus N.

    Never materialized as a dense MN x MN matrix; `apply` zeroes the
    antenna blocks of non-member APs in a stacked length-MN vector.
    """

    ap_indices: tuple[int, ...]
    num_aps: int
    antennas_per_ap: int

    def antenna_indices(self) -> np.ndarray:
        """Stacked antenna coordinates covered by the member APs."""
        if not self.ap_indices:
            return np.empty(0, dtype=np.int64)
        aps = np.asarray(self.ap_indices, dtype=np.int64)
        return (
            aps[:, None] * self.antennas_per_ap + np.arange(self.antennas_per_ap)
        ).ravel()

    def apply(self, stacked: np.ndarray) -> np.ndarray:
        """Return a copy of `stacked` with non-member antenna blocks zeroed."""
        out = np.zeros_like(stacked)
        idx = self.antenna_indices()
        out[idx] = stacked[idx]
        return out


def scale_failure_probs(alpha: float, baseline: np.ndarray) -> np.ndarray:
    """Elementwise alpha * baseline; alpha = 0 means a failure-free network."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    baseline = np.asarray(baseline, dtype=float)
    if np.any(baseline < 0) or np.any(baseline > 1):
        raise ValueError("baseline failure probabilities must lie in [0, 1]")
    return alpha * baseline


def select_master(beta_column: np.ndarray) -> int:
    """AP with the strongest large-scale gain; ties go to the lowest index."""
    beta_column = np.asarray(beta_column)
    if beta_column.size == 0:
        raise ValueError("need at least one AP")
    return int(np.argmax(beta_column))


def select_cluster(
    beta_column: np.ndarray,
    failure_probs: np.ndarray,
    epsilon: float,
    min_cluster: int,
) -> np.ndarray:
    """Reliability-weighted serving cluster for one UE.

    APs are sorted by w_m = beta_m * (1 - p_m^f) descending (ties: lower
    index first); the smallest prefix whose cumulative weight reaches
    `epsilon` of the total is kept, then extended down the sorted order to
    `min_cluster` entries (capped at M). Passing all-zero failure_probs
    gives the failure-agnostic rule.

    Returns AP indices in sorted-weight order; an empty array means every
    AP is certain to fail and the UE is structurally unservable.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    if min_cluster < 1:
        raise ValueError(f"min_cluster must be >= 1, got {min_cluster}")
    beta_column = np.asarray(beta_column, dtype=float)
    failure_probs = np.asarray(failure_probs, dtype=float)
    if beta_column.shape != failure_probs.shape:
        raise ValueError("beta_column and failure_probs must have equal length")

    weights = beta_column * (1.0 - failure_probs)
    if not np.any(weights > 0):
        return np.empty(0, dtype=np.int64)
    order = np.argsort(-weights, kind="stable")
    cum = np.cumsum(weights[order])
    total = cum[-1]
    n_threshold = int(np.argmax(cum / total >= epsilon)) + 1
    size = min(max(n_threshold, min_cluster), beta_column.size)
    return order[:size].astype(np.int64)


def build_selector(cluster: np.ndarray, num_aps: int, antennas_per_ap: int) -> BlockSelector:
    """Selector description equivalent to D_k for the given cluster."""
    cluster = np.asarray(cluster, dtype=np.int64)
    if cluster.size and (cluster.min() < 0 or cluster.max() >= num_aps):
        raise ValueError("cluster contains AP indices outside 0..M-1")
    return BlockSelector(
        ap_indices=tuple(int(m) for m in cluster),
        num_aps=num_aps,
        antennas_per_ap=antennas_per_ap,
    )


def failure_mask_from_uniforms(uniforms: np.ndarray, effective_probs: np.ndarray) -> np.ndarray:
    """Alive mask from uniform draws: AP m dies iff uniforms[m] < p_m^f.

    Reusing one uniform vector across several alpha values couples the
    draws monotonically (higher stress can only kill more APs), which is
    the common-random-numbers device used by the experiment harness.
    """
    return np.asarray(uniforms) >= np.asarray(effective_probs)


def sample_failures(
    effective_probs: np.ndarray, rng: np.random.Generator
) -> FailureRealization:
    """Independent Bernoulli failure draw; alive with probability 1 - p_m^f."""
    effective_probs = np.asarray(effective_probs, dtype=float)
    if np.any(effective_probs < 0) or np.any(effective_probs > 1):
        raise ValueError("effective failure probabilities must lie in [0, 1]")
    alive = failure_mask_from_uniforms(rng.random(effective_probs.size), effective_probs)
    return FailureRealization(alive=alive, effective_probs=effective_probs)


def surviving_cluster(cluster: np.ndarray, failures: FailureRealization) -> np.ndarray:
    """Members of `cluster` still alive, preserving order; empty means outage."""
    cluster = np.asarray(cluster, dtype=np.int64)
    if cluster.size == 0:
        return cluster
    return cluster[failures.alive[cluster]]


def assign_clusters(
    snapshot: NetworkSnapshot,
    scheme: Scheme,
    epsilon: float,
    min_cluster: int,
    effective_probs: np.ndarray | None = None,
) -> ClusterAssignment:
    """Build the per-UE clusters of one scheme for a whole snapshot.

    `effective_probs` (the alpha-scaled failure probabilities) is required
    for the failure-aware scheme and ignored otherwise.
    """
    m_total = snapshot.num_aps
    if scheme is Scheme.FAAS:
        if effective_probs is None:
            raise ValueError("failure-aware selection needs effective_probs")
        probs = np.asarray(effective_probs, dtype=float)
    else:
        probs = np.zeros(m_total)

    clusters = []
    masters = np.empty(snapshot.num_ues, dtype=np.int64)
    for k in range(snapshot.num_ues):
        beta_k = snapshot.beta[:, k]
        if scheme is Scheme.ALL_APS:
            cluster = np.argsort(-beta_k, kind="stable").astype(np.int64)
        else:
            cluster = select_cluster(beta_k, probs, epsilon, min_cluster)
        clusters.append(cluster)
        masters[k] = cluster[0] if cluster.size else -1
    return ClusterAssignment(
        clusters=tuple(clusters),
        master_ap=masters,
        scheme=scheme,
        epsilon=epsilon,
        min_cluster=min_cluster,
    )
