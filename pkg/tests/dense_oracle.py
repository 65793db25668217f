"""Straight-line dense reference implementation for small instances.

Everything here works on full MN-dimensional stacked vectors and dense
MN x MN matrices (selectors, error covariances), with per-index loops and
explicit inverses. It is intentionally naive: the production code is
checked against these routines on instances with M <= 4-ish, N <= 2,
K <= 3, where the dense algebra is tractable.
"""

from __future__ import annotations

import numpy as np

from cfrsim.estimation import PilotAssignment, SystemParams, pilot_sequences
from cfrsim.geometry import NetworkSnapshot


def block_diag(blocks: list[np.ndarray]) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=complex)
    pos = 0
    for b in blocks:
        size = b.shape[0]
        out[pos : pos + size, pos : pos + size] = b
        pos += size
    return out


def dense_selector(cluster, num_aps: int, n_antennas: int) -> np.ndarray:
    """Dense MN x MN block-diagonal selector for a cluster."""
    blocks = []
    members = set(int(m) for m in cluster)
    for m in range(num_aps):
        if m in members:
            blocks.append(np.eye(n_antennas, dtype=complex))
        else:
            blocks.append(np.zeros((n_antennas, n_antennas), dtype=complex))
    return block_diag(blocks)


def stack_vectors(per_ap: np.ndarray, k: int) -> np.ndarray:
    """Stacked MN vector for UE k from a (M, K, N) per-AP array."""
    m, _, n = per_ap.shape
    out = np.zeros(m * n, dtype=complex)
    for ap in range(m):
        out[ap * n : (ap + 1) * n] = per_ap[ap, k]
    return out


def dense_estimate(
    snapshot: NetworkSnapshot,
    assignment: PilotAssignment,
    params: SystemParams,
    received: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-index MMSE estimation with explicit inverses.

    Returns (g_hat, err_cov, psi) with the same shapes as the production
    estimator: (M, K, N), (M, K, N, N), (M, tau_p, N, N).
    """
    m_total, k_total, n = snapshot.num_aps, snapshot.num_ues, snapshot.num_antennas
    tau_p, p = params.tau_p, params.uplink_power_w
    phi = pilot_sequences(tau_p)

    psi = np.zeros((m_total, tau_p, n, n), dtype=complex)
    for m in range(m_total):
        for t in range(tau_p):
            acc = params.noise_power_w * np.eye(n, dtype=complex)
            for k in range(k_total):
                if assignment.pilot_of[k] == t:
                    acc = acc + tau_p * p * snapshot.beta[m, k] * snapshot.corr[m, k]
            psi[m, t] = acc

    g_hat = np.zeros((m_total, k_total, n), dtype=complex)
    err_cov = np.zeros((m_total, k_total, n, n), dtype=complex)
    for m in range(m_total):
        for k in range(k_total):
            t = assignment.pilot_of[k]
            coarse = received[m] @ np.conj(phi[t]) / np.sqrt(tau_p)
            beta, corr = snapshot.beta[m, k], snapshot.corr[m, k]
            psi_inv = np.linalg.inv(psi[m, t])
            g_hat[m, k] = np.sqrt(p * tau_p) * beta * corr @ psi_inv @ coarse
            cmk = beta * corr - p * tau_p * beta**2 * corr @ psi_inv @ corr
            err_cov[m, k] = (cmk + np.conj(cmk.T)) / 2.0
    return g_hat, err_cov, psi


def dense_rates(
    g_hat: np.ndarray,
    err_cov: np.ndarray,
    clusters: list[np.ndarray],
    alive: np.ndarray,
    params: SystemParams,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Dense partial-MMSE combining and SINR evaluation with failure masking.

    Returns (sinr, se, outage) arrays of length K.
    """
    m_total, k_total, n = g_hat.shape
    dim = m_total * n
    p = params.uplink_power_w
    sigma2 = params.noise_power_w

    surv = [np.array([m for m in c if alive[m]], dtype=int) for c in clusters]
    selectors = [dense_selector(s, m_total, n) for s in surv]
    stacked = [stack_vectors(g_hat, k) for k in range(k_total)]
    cov_dense = [
        block_diag([err_cov[m, k] for m in range(m_total)]) for k in range(k_total)
    ]
    cov_total = sum(p * cov_dense[k] for k in range(k_total))

    sinr = np.zeros(k_total)
    outage = np.zeros(k_total, dtype=bool)
    for k in range(k_total):
        if surv[k].size == 0:
            outage[k] = True
            continue
        d_k = selectors[k]
        partial = [
            i for i in range(k_total) if np.any(np.abs(d_k @ selectors[i]) > 0)
        ]
        gram = np.zeros((dim, dim), dtype=complex)
        for i in partial:
            v = d_k @ stacked[i]
            gram += p * np.outer(v, np.conj(v))
        reg = d_k @ (
            sum(p * cov_dense[i] for i in partial) + sigma2 * np.eye(dim)
        ) @ d_k
        weight = p * np.conj(d_k @ stacked[k]) @ np.linalg.pinv(gram + reg)

        signal = p * np.abs(weight @ (d_k @ stacked[k])) ** 2
        interference = sum(
            p * np.abs(weight @ (d_k @ stacked[i])) ** 2
            for i in range(k_total)
            if i != k
        )
        zeta = d_k @ (cov_total + sigma2 * np.eye(dim)) @ d_k
        noise_term = np.real(weight @ zeta @ np.conj(weight))
        sinr[k] = signal / (interference + noise_term)

    se = params.prelog * np.log2(1.0 + sinr)
    se[outage] = 0.0
    return sinr, se, outage


def dense_full_mmse_sinr(
    g_hat: np.ndarray, err_cov: np.ndarray, params: SystemParams, k: int
) -> float:
    """Classic full (non-partial) MMSE over all antennas, all interferers."""
    m_total, k_total, n = g_hat.shape
    clusters = [np.arange(m_total) for _ in range(k_total)]
    alive = np.ones(m_total, dtype=bool)
    sinr, _, _ = dense_rates(g_hat, err_cov, clusters, alive, params)
    return float(sinr[k])


def dense_partial_model_sinr(
    g_hat: np.ndarray,
    err_cov: np.ndarray,
    clusters: list[np.ndarray],
    alive: np.ndarray,
    params: SystemParams,
    k: int,
    weight_sliced: np.ndarray,
) -> float:
    """SINR of an arbitrary combiner under the partial interference model.

    Interference and error covariances are restricted to UE k's partial
    set, the exact objective the partial-MMSE combiner maximizes, so the
    partial-MMSE weights are optimal for this quantity on every instance.
    `weight_sliced` lives on the surviving-cluster antenna coordinates of
    UE k in cluster order (the production layout).
    """
    m_total, k_total, n = g_hat.shape
    dim = m_total * n
    p = params.uplink_power_w
    surv = [np.array([m for m in c if alive[m]], dtype=int) for c in clusters]
    coords = (surv[k][:, None] * n + np.arange(n)).ravel()
    weight = np.zeros(dim, dtype=complex)
    weight[coords] = weight_sliced

    selectors = [dense_selector(s, m_total, n) for s in surv]
    d_k = selectors[k]
    partial = [i for i in range(k_total) if np.any(np.abs(d_k @ selectors[i]) > 0)]
    stacked = [d_k @ stack_vectors(g_hat, i) for i in range(k_total)]
    cov_dense = [
        block_diag([err_cov[m, i] for m in range(m_total)]) for i in range(k_total)
    ]

    signal = p * np.abs(weight @ stacked[k]) ** 2
    if signal == 0.0:
        return 0.0
    interference = sum(
        p * np.abs(weight @ stacked[i]) ** 2 for i in partial if i != k
    )
    reg = d_k @ (
        sum(p * cov_dense[i] for i in partial) + params.noise_power_w * np.eye(dim)
    ) @ d_k
    noise_term = float(np.real(weight @ reg @ np.conj(weight)))
    return float(signal / (interference + noise_term))
