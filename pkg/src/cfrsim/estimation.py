"""Pilot bookkeeping, received-pilot synthesis, and per-AP MMSE estimation.

Pilots are the tau_p mutually orthogonal length-tau_p sequences obtained by
scaling DFT columns so that ||phi||^2 = tau_p. AP m receives

    Y_m = sum_k sqrt(p_k) g_mk phi_{t_k}^T + Z_m,    Z_m ~ CN(0, sigma^2 I)

and despreads with (1/sqrt(tau_p)) Y_m phi^*. The MMSE estimate is

    g_hat_mk = sqrt(p tau_p) beta_mk R_mk Psi_mt^{-1} coarse_mk

with Psi_mt = sum_{k' on pilot t} tau_p p beta_mk' R_mk' + sigma^2 I, and
error covariance C_mk = beta R - p tau_p beta^2 R Psi^{-1} R.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .geometry import NetworkSnapshot


def thermal_noise_power(bandwidth_hz: float, noise_figure_db: float = 7.0) -> float:
    """Receiver noise power in watts for a -174 dBm/Hz thermal floor."""
    noise_dbm = -174.0 + 10.0 * np.log10(bandwidth_hz) + noise_figure_db
    return float(10.0 ** (noise_dbm / 10.0) * 1e-3)


@dataclass(frozen=True)
class SystemParams:
    """Frame split and power levels shared by all APs and UEs.

    noise_power_w defaults to the thermal value for the configured
    bandwidth and noise figure; it may be set to 0 for noiseless
    diagnostics.
    """

    tau_c: int = 200
    tau_p: int = 10
    tau_u: int = 190
    uplink_power_w: float = 0.1
    bandwidth_hz: float = 20e6
    noise_figure_db: float = 7.0
    noise_power_w: float | None = None

    def __post_init__(self) -> None:
        if self.noise_power_w is None:
            object.__setattr__(
                self,
                "noise_power_w",
                thermal_noise_power(self.bandwidth_hz, self.noise_figure_db),
            )
        if self.tau_p < 1:
            raise ValueError(f"tau_p must be >= 1, got {self.tau_p}")
        if self.tau_u < 1:
            raise ValueError(f"tau_u must be >= 1, got {self.tau_u}")
        if self.tau_u + self.tau_p > self.tau_c:
            raise ValueError(
                f"tau_u + tau_p = {self.tau_u + self.tau_p} exceeds tau_c = {self.tau_c}"
            )
        if self.uplink_power_w <= 0:
            raise ValueError(f"uplink_power_w must be > 0, got {self.uplink_power_w}")
        if self.noise_power_w < 0:
            raise ValueError(f"noise_power_w must be >= 0, got {self.noise_power_w}")

    @property
    def prelog(self) -> float:
        """Fraction of the block carrying uplink data, tau_u / (tau_u + tau_p)."""
        return self.tau_u / (self.tau_u + self.tau_p)


@dataclass(frozen=True)
class PilotAssignment:
    """Pilot index per UE plus the co-pilot set of each pilot.

    copilot_sets[t] holds the sorted indices of all UEs transmitting
    pilot t; the sets partition {0..K-1}.
    """

    pilot_of: np.ndarray
    copilot_sets: tuple[np.ndarray, ...]


@dataclass(frozen=True)
class EstimationResult:
    """MMSE estimates and their error statistics for one block.

    g_hat : (M, K, N) complex estimates
    err_cov : (M, K, N, N) estimation-error covariances C_mk
    psi : (M, tau_p, N, N) despread-pilot covariances Psi
    """

    g_hat: np.ndarray
    err_cov: np.ndarray
    psi: np.ndarray


def pilot_sequences(tau_p: int) -> np.ndarray:
    """The tau_p orthogonal pilots as rows of a (tau_p, tau_p) matrix.

    Row t is the t-th DFT column scaled so its squared norm is tau_p;
    rows satisfy phi_t^T phi_t'^* = tau_p * delta_tt'.
    """
    s = np.arange(tau_p)
    return np.exp(-2j * np.pi * np.outer(s, s) / tau_p)


def assign_pilots(
    snapshot: NetworkSnapshot, master_ap: np.ndarray, tau_p: int
) -> PilotAssignment:
    """Greedy pilot assignment in UE index order.

    UE k takes the pilot with the least contamination already accumulated
    at its master AP, i.e. argmin_t of sum(beta[master_k, k'] for assigned
    co-pilot UEs k' on t), ties to the lowest pilot index.
    """
    if tau_p < 1:
        raise ValueError(f"tau_p must be >= 1, got {tau_p}")
    k_total = snapshot.num_ues
    pilot_of = np.empty(k_total, dtype=np.int64)
    members: list[list[int]] = [[] for _ in range(tau_p)]
    for k in range(k_total):
        m = int(master_ap[k])
        load = np.array(
            [snapshot.beta[m, members[t]].sum() if members[t] else 0.0 for t in range(tau_p)]
        )
        t_star = int(np.argmin(load))
        pilot_of[k] = t_star
        members[t_star].append(k)
    copilot_sets = tuple(np.array(sorted(ms), dtype=np.int64) for ms in members)
    return PilotAssignment(pilot_of=pilot_of, copilot_sets=copilot_sets)


def received_pilot(
    realization: ChannelRealization,
    assignment: PilotAssignment,
    params: SystemParams,
    m: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """N x tau_p received pilot block at AP m (signal sum plus noise)."""
    _, k_total, n = realization.g.shape
    phi = pilot_sequences(params.tau_p)
    y = np.zeros((n, params.tau_p), dtype=complex)
    for k in range(k_total):
        y += np.sqrt(params.uplink_power_w) * np.outer(
            realization.g[m, k], phi[assignment.pilot_of[k]]
        )
    scale = np.sqrt(params.noise_power_w / 2.0)
    y += scale * (
        rng.standard_normal((n, params.tau_p))
        + 1j * rng.standard_normal((n, params.tau_p))
    )
    return y


def coarse_estimate(y_pilot: np.ndarray, pilot: np.ndarray) -> np.ndarray:
    """Despread one pilot: (1/sqrt(tau_p)) * y_pilot @ conj(pilot)."""
    pilot = np.asarray(pilot)
    return y_pilot @ np.conj(pilot) / np.sqrt(pilot.shape[0])


def compute_psi(
    snapshot: NetworkSnapshot,
    assignment: PilotAssignment,
    params: SystemParams,
    m: int,
    t: int,
) -> np.ndarray:
    """Covariance of the despread pilot t at AP m.

    Psi = sum over co-pilot UEs of tau_p * p * beta * R, plus sigma^2 I.
    """
    n = snapshot.num_antennas
    psi = params.noise_power_w * np.eye(n, dtype=complex)
    for k in assignment.copilot_sets[t]:
        psi = psi + params.tau_p * params.uplink_power_w * snapshot.beta[m, k] * snapshot.corr[m, k]
    return psi


def mmse_estimate(
    coarse: np.ndarray,
    snapshot: NetworkSnapshot,
    params: SystemParams,
    m: int,
    k: int,
    psi: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """MMSE estimate of g_mk from its coarse despread, with error covariance."""
    beta = snapshot.beta[m, k]
    corr = snapshot.corr[m, k]
    p, tau_p = params.uplink_power_w, params.tau_p
    try:
        psi_inv_coarse = np.linalg.solve(psi, coarse)
        psi_inv_corr = np.linalg.solve(psi, corr)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"singular pilot covariance at AP {m}, UE {k}") from exc
    g_hat = np.sqrt(p * tau_p) * beta * (corr @ psi_inv_coarse)
    err = beta * corr - p * tau_p * beta**2 * (corr @ psi_inv_corr)
    err = (err + np.conj(err.T)) / 2.0
    return g_hat, err


def synthesize_received(
    snapshot: NetworkSnapshot,
    realization: ChannelRealization,
    assignment: PilotAssignment,
    params: SystemParams,
    rng: np.random.Generator,
) -> np.ndarray:
    """Received pilot blocks for all APs at once, shape (M, N, tau_p)."""
    m, _, n = realization.g.shape
    phi = pilot_sequences(params.tau_p)
    amp = np.sqrt(params.uplink_power_w) * realization.g
    y = np.einsum("mkn,kt->mnt", amp, phi[assignment.pilot_of])
    scale = np.sqrt(params.noise_power_w / 2.0)
    y += scale * (
        rng.standard_normal((m, n, params.tau_p))
        + 1j * rng.standard_normal((m, n, params.tau_p))
    )
    return y


def estimate_from_received(
    snapshot: NetworkSnapshot,
    assignment: PilotAssignment,
    params: SystemParams,
    received: np.ndarray,
) -> EstimationResult:
    """Vectorized MMSE estimation for every (AP, UE) pair from pilot blocks."""
    m, k_total, n = snapshot.num_aps, snapshot.num_ues, snapshot.num_antennas
    tau_p = params.tau_p
    p = params.uplink_power_w
    phi = pilot_sequences(tau_p)

    coarse = np.einsum("mnt,kt->mkn", received, np.conj(phi[assignment.pilot_of]))
    coarse /= np.sqrt(tau_p)

    psi = np.tile(
        params.noise_power_w * np.eye(n, dtype=complex), (m, tau_p, 1, 1)
    )
    for t, members in enumerate(assignment.copilot_sets):
        if members.size:
            psi[:, t] += tau_p * p * np.einsum(
                "mk,mkab->mab", snapshot.beta[:, members], snapshot.corr[:, members]
            )

    psi_inv = np.linalg.inv(psi)
    pin = psi_inv[np.arange(m)[:, None], assignment.pilot_of[None, :]]
    corr_pin = np.einsum("mkab,mkbc->mkac", snapshot.corr, pin)
    g_hat = (
        np.sqrt(p * tau_p)
        * snapshot.beta[:, :, None]
        * np.einsum("mkab,mkb->mka", corr_pin, coarse)
    )
    err = snapshot.beta[:, :, None, None] * snapshot.corr - (
        p * tau_p
    ) * (snapshot.beta**2)[:, :, None, None] * np.einsum(
        "mkab,mkbc->mkac", corr_pin, snapshot.corr
    )
    err = (err + np.conj(np.swapaxes(err, -1, -2))) / 2.0
    return EstimationResult(g_hat=g_hat, err_cov=err, psi=psi)


def estimate_block(
    snapshot: NetworkSnapshot,
    realization: ChannelRealization,
    assignment: PilotAssignment,
    params: SystemParams,
    rng: np.random.Generator,
) -> EstimationResult:
    """Synthesize received pilots for one block and run MMSE estimation."""
    received = synthesize_received(snapshot, realization, assignment, params, rng)
    return estimate_from_received(snapshot, assignment, params, received)
