"""Partial-MMSE combining and per-UE SINR / spectral-efficiency evaluation.

All combining runs on the surviving cluster of each UE: the antenna
coordinates of the serving APs that are still alive in the current failure
realization. The selector projection is realized by slicing those
coordinates out of the stacked MN-dimensional vectors, never by dense
MN x MN algebra.

For UE k with surviving coordinates S and partial set P_k (UEs sharing at
least one surviving serving AP with k):

    w_k = p * g_hat_k[S]^H @ pinv( sum_{k' in P_k} p g_hat_k'[S] g_hat_k'[S]^H
                                   + sum_{k' in P_k} p C_k'[S,S] + sigma^2 I )

and the evaluated SINR uses k's combiner against every interferer,

    SINR_k = p |w g_hat_k[S]|^2
             / ( sum_{k' != k} p |w g_hat_k'[S]|^2 + w Z w^H ),
    Z = sum_{k'=1..K} p C_k'[S,S] + sigma^2 I.

Spectral efficiency is prelog * log2(1 + SINR); a UE whose surviving
cluster is empty is in outage and scores zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .estimation import EstimationResult, SystemParams
from .geometry import NetworkSnapshot
from .selection import ClusterAssignment, FailureRealization, surviving_cluster

PINV_RCOND = 1e-12


@dataclass(frozen=True)
class CombinerSet:
    """Combining weights and partial interferer sets for one realization.

    weights[k] is a complex row vector over the surviving-cluster antenna
    coordinates of UE k (None when the UE is in outage); partial_sets[k]
    lists the UEs sharing at least one surviving serving AP with k.
    """

    weights: tuple[np.ndarray | None, ...]
    partial_sets: tuple[np.ndarray, ...]


@dataclass(frozen=True)
class RateReport:
    """Per-UE SINR, spectral efficiency (bits/s/Hz), and outage flags."""

    sinr: np.ndarray
    se: np.ndarray
    outage: np.ndarray


def partial_set(clusters: list[np.ndarray], k: int) -> np.ndarray:
    """UEs whose (surviving) cluster intersects UE k's, including k itself."""
    own = set(int(m) for m in clusters[k])
    if not own:
        return np.empty(0, dtype=np.int64)
    return np.array(
        [i for i, c in enumerate(clusters) if own.intersection(int(m) for m in c)],
        dtype=np.int64,
    )


class _EvalContext:
    """Shared per-realization quantities reused by every UE."""

    def __init__(
        self,
        estimates: EstimationResult,
        clusters: ClusterAssignment,
        failures: FailureRealization,
        params: SystemParams,
    ):
        m, k_total, n = estimates.g_hat.shape
        self.num_antennas = n
        self.num_ues = k_total
        self.power = params.uplink_power_w
        self.noise = params.noise_power_w
        # stacked estimates: row m*N+i is antenna i of AP m
        self.g_stack = estimates.g_hat.transpose(0, 2, 1).reshape(m * n, k_total)
        self.err_cov = estimates.err_cov
        # sum over all UEs of p * C_mk, per AP block (for the evaluated SINR)
        self.err_sum_all = self.power * estimates.err_cov.sum(axis=1)
        self.survivors = [surviving_cluster(c, failures) for c in clusters.clusters]
        mask = np.zeros((k_total, m), dtype=np.uint8)
        for k, surv in enumerate(self.survivors):
            mask[k, surv] = 1
        self.share = (mask @ mask.T) > 0
        self._gram_cache: dict[tuple[bytes, bytes], tuple[np.ndarray, np.ndarray]] = {}
        self._slice_cache: dict[int, np.ndarray] = {}

    def coords(self, k: int) -> np.ndarray:
        surv = self.survivors[k]
        n = self.num_antennas
        return (surv[:, None] * n + np.arange(n)).ravel()

    def estimate_slice(self, k: int) -> np.ndarray:
        """Stacked estimates restricted to UE k's surviving coordinates."""
        hit = self._slice_cache.get(k)
        if hit is None:
            hit = self.g_stack[self.coords(k)]
            self._slice_cache[k] = hit
        return hit

    def partial(self, k: int) -> np.ndarray:
        return np.nonzero(self.share[k])[0]

    def inverse_for(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        """(G_slice, pinv(A)) for UE k, cached on (cluster, partial set).

        UEs with identical surviving clusters and partial sets (always the
        case under the all-APs scheme) share one pseudo-inverse.
        """
        surv = self.survivors[k]
        pk = self.partial(k)
        key = (surv.tobytes(), pk.tobytes())
        hit = self._gram_cache.get(key)
        if hit is not None:
            return hit
        g_slice = self.estimate_slice(k)
        gp = g_slice[:, pk]
        a = self.power * (gp @ np.conj(gp.T))
        n = self.num_antennas
        if n == 1:
            a[np.diag_indices_from(a)] += self.power * self.err_cov[
                surv[:, None], pk[None, :], 0, 0
            ].sum(axis=1)
        else:
            err_blocks = self.err_cov[surv[:, None], pk[None, :]].sum(axis=1)
            for row in range(surv.size):
                block = slice(row * n, (row + 1) * n)
                a[block, block] += self.power * err_blocks[row]
        a[np.diag_indices_from(a)] += self.noise
        result = (g_slice, np.linalg.pinv(a, rcond=PINV_RCOND, hermitian=True))
        self._gram_cache[key] = result
        return result

    def weight_for(self, k: int) -> np.ndarray | None:
        if self.survivors[k].size == 0:
            return None
        g_slice, a_pinv = self.inverse_for(k)
        return self.power * (np.conj(g_slice[:, k]) @ a_pinv)

    def sinr_for(self, k: int, weight: np.ndarray) -> float:
        surv = self.survivors[k]
        g_slice = self.estimate_slice(k)
        projections = weight @ g_slice
        powers = self.power * np.abs(projections) ** 2
        signal = powers[k]
        if signal == 0.0:
            return 0.0
        interference = powers.sum() - signal
        n = self.num_antennas
        noise_term = self.noise * float(np.real(weight @ np.conj(weight)))
        if n == 1:
            noise_term += float(
                np.abs(weight) ** 2 @ self.err_sum_all[surv, 0, 0].real
            )
        else:
            for row, m in enumerate(surv):
                block = weight[row * n : (row + 1) * n]
                noise_term += float(
                    np.real(block @ self.err_sum_all[m] @ np.conj(block))
                )
        return float(signal / (interference + noise_term))


def pmmse_weights(
    estimates: EstimationResult,
    clusters: ClusterAssignment,
    failures: FailureRealization,
    params: SystemParams,
    k: int,
) -> np.ndarray:
    """Partial-MMSE combining row vector for UE k on its surviving cluster.

    Raises ValueError when the surviving cluster is empty (outage: no
    combiner exists).
    """
    ctx = _EvalContext(estimates, clusters, failures, params)
    weight = ctx.weight_for(k)
    if weight is None:
        raise ValueError(f"UE {k} has no surviving serving AP")
    return weight


def compute_combiners(
    estimates: EstimationResult,
    clusters: ClusterAssignment,
    failures: FailureRealization,
    params: SystemParams,
) -> CombinerSet:
    """Partial-MMSE weights and partial sets for every UE at once."""
    ctx = _EvalContext(estimates, clusters, failures, params)
    weights = tuple(ctx.weight_for(k) for k in range(ctx.num_ues))
    partial_sets = tuple(ctx.partial(k) for k in range(ctx.num_ues))
    return CombinerSet(weights=weights, partial_sets=partial_sets)


def sinr(
    weights: CombinerSet,
    estimates: EstimationResult,
    clusters: ClusterAssignment,
    failures: FailureRealization,
    params: SystemParams,
    k: int,
) -> float:
    """Evaluated SINR of UE k under the given combiner set.

    Accepts any combiner (not only partial MMSE), which makes the
    evaluation usable for maximum-ratio baselines; the value is invariant
    to nonzero complex rescaling of weights[k].
    """
    weight = weights.weights[k]
    if weight is None:
        return 0.0
    ctx = _EvalContext(estimates, clusters, failures, params)
    return ctx.sinr_for(k, weight)


def evaluate_rates(
    snapshot: NetworkSnapshot,
    estimates: EstimationResult,
    clusters: ClusterAssignment,
    failures: FailureRealization,
    params: SystemParams,
) -> RateReport:
    """Per-UE SINR and spectral efficiency for one failure realization.

    UEs whose surviving cluster is empty are flagged as outage with zero
    SINR and SE; all other UEs get partial-MMSE combining.
    """
    if estimates.g_hat.shape[:2] != (snapshot.num_aps, snapshot.num_ues):
        raise ValueError("estimates inconsistent with snapshot dimensions")
    ctx = _EvalContext(estimates, clusters, failures, params)
    k_total = ctx.num_ues
    sinr_out = np.zeros(k_total)
    outage = np.zeros(k_total, dtype=bool)
    for k in range(k_total):
        weight = ctx.weight_for(k)
        if weight is None:
            outage[k] = True
            continue
        sinr_out[k] = ctx.sinr_for(k, weight)
    se = params.prelog * np.log2(1.0 + sinr_out)
    se[outage] = 0.0
    return RateReport(sinr=sinr_out, se=se, outage=outage)
