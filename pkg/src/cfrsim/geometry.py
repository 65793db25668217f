"""Random network drops: placement, wrap-around distances, large-scale fading.

Coordinates are planar (x, y) positions in meters inside a square of side
``area_side``. The square is treated as a torus (wrap-around), so the
network has no edges: the distance between two points is the minimum over
the nine translates of one of them. Access points sit ``ap_height`` meters
above the user plane, which also acts as a minimum-distance floor for the
path loss.

Large-scale gains follow a log-distance model with log-normal shadowing,

    beta_dB = intercept - coeff * log10(d / 1 m) + F,   F ~ N(0, shadow_std^2),

and each (AP, UE) pair gets a spatial correlation matrix from the Gaussian
local-scattering model for a half-wavelength uniform linear array, built
from the nominal AP-to-UE angle of the minimizing translate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# The nine torus translates of a point, in units of the area side.
_TRANSLATE_UNITS = np.array(
    [(dx, dy) for dx in (-1.0, 0.0, 1.0) for dy in (-1.0, 0.0, 1.0)]
)


@dataclass(frozen=True)
class NetworkConfig:
    """Static description of one deployment scenario.

    Parameters
    ----------
    area_side : float
        Side of the square deployment area in meters.
    num_aps, antennas_per_ap, num_ues : int
        Number of access points M, antennas per AP N, and users K.
    ap_height : float
        Height of every AP above the UE plane, meters.
    pathloss_intercept_db : float
        Gain at 1 m reference distance, dB.
    pathloss_exponent_coeff : float
        Path-loss slope in dB per decade of distance.
    shadow_std_db : float
        Standard deviation of independent log-normal shadowing, dB.
    asd_deg : float
        Angular standard deviation of the local-scattering model, degrees.
    """

    area_side: float
    num_aps: int
    antennas_per_ap: int
    num_ues: int
    ap_height: float = 10.0
    pathloss_intercept_db: float = -30.5
    pathloss_exponent_coeff: float = 36.7
    shadow_std_db: float = 4.0
    asd_deg: float = 15.0

    def __post_init__(self) -> None:
        if self.area_side <= 0:
            raise ValueError(f"area_side must be > 0, got {self.area_side}")
        if self.num_aps < 1:
            raise ValueError(f"num_aps must be >= 1, got {self.num_aps}")
        if self.antennas_per_ap < 1:
            raise ValueError(
                f"antennas_per_ap must be >= 1, got {self.antennas_per_ap}"
            )
        if self.num_ues < 1:
            raise ValueError(f"num_ues must be >= 1, got {self.num_ues}")
        if self.ap_height < 0:
            raise ValueError(f"ap_height must be >= 0, got {self.ap_height}")
        if self.shadow_std_db < 0:
            raise ValueError(
                f"shadow_std_db must be >= 0, got {self.shadow_std_db}"
            )
        if not 0.0 < self.asd_deg <= 90.0:
            raise ValueError(f"asd_deg must be in (0, 90], got {self.asd_deg}")


@dataclass(frozen=True)
class NetworkSnapshot:
    """One random network drop with its large-scale channel statistics.

    Attributes
    ----------
    ap_positions : (M, 2) float array
    ue_positions : (K, 2) float array
    beta : (M, K) float array
        Large-scale gains as linear power ratios (path loss + shadowing).
    corr : (M, K, N, N) complex array
        Per-link spatial correlation matrices, Hermitian PSD with trace N.
    baseline_failure_probs : (M,) float array
        Per-AP baseline failure probabilities, each in [0, 1].
    """

    ap_positions: np.ndarray
    ue_positions: np.ndarray
    beta: np.ndarray
    corr: np.ndarray
    baseline_failure_probs: np.ndarray

    def __post_init__(self) -> None:
        m, k = self.beta.shape
        if self.ap_positions.shape != (m, 2):
            raise ValueError("ap_positions inconsistent with beta")
        if self.ue_positions.shape != (k, 2):
            raise ValueError("ue_positions inconsistent with beta")
        if self.corr.shape[:2] != (m, k) or self.corr.shape[2] != self.corr.shape[3]:
            raise ValueError("corr must have shape (M, K, N, N)")
        if self.baseline_failure_probs.shape != (m,):
            raise ValueError("baseline_failure_probs must have shape (M,)")
        if not np.all(self.beta > 0):
            raise ValueError("all large-scale gains must be strictly positive")
        probs = self.baseline_failure_probs
        if np.any(probs < 0) or np.any(probs > 1):
            raise ValueError("baseline failure probabilities must lie in [0, 1]")

    @property
    def num_aps(self) -> int:
        return self.beta.shape[0]

    @property
    def num_ues(self) -> int:
        return self.beta.shape[1]

    @property
    def num_antennas(self) -> int:
        return self.corr.shape[2]


def place_uniform(count: int, area_side: float, rng: np.random.Generator) -> np.ndarray:
    """Draw `count` i.i.d. points with both coordinates uniform in [0, area_side).

    Returns a (count, 2) array; count 0 gives an empty (0, 2) array.
    """
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    if area_side <= 0:
        raise ValueError(f"area_side must be > 0, got {area_side}")
    return rng.random((count, 2)) * area_side


def wraparound_distance(
    a: np.ndarray, b: np.ndarray, area_side: float, ap_height: float
) -> float:
    """3D distance between `a` and the nearest torus translate of `b`.

    The planar distance is minimized over the nine translates of `b` with
    offsets in {-L, 0, +L}^2, then combined with the fixed height offset.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    candidates = b[None, :] + _TRANSLATE_UNITS * area_side - a[None, :]
    planar_sq = np.min(np.sum(candidates**2, axis=1))
    return float(np.sqrt(planar_sq + ap_height**2))


def wraparound_offset(a: np.ndarray, b: np.ndarray, area_side: float) -> np.ndarray:
    """Planar offset from `a` to the torus translate of `b` that is closest."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    candidates = b[None, :] + _TRANSLATE_UNITS * area_side - a[None, :]
    best = int(np.argmin(np.sum(candidates**2, axis=1)))
    return candidates[best]


def large_scale_gain(distance: float, shadow_db: float, config: NetworkConfig) -> float:
    """Linear large-scale gain at `distance` meters with a given shadowing draw."""
    if distance <= 0:
        raise ValueError(f"distance must be > 0, got {distance}")
    beta_db = (
        config.pathloss_intercept_db
        - config.pathloss_exponent_coeff * np.log10(distance)
        + shadow_db
    )
    return float(10.0 ** (beta_db / 10.0))


def _scattering_matrix(
    n_antennas: int, nominal_angle: np.ndarray, asd: float
) -> np.ndarray:
    """Gaussian local-scattering correlation for a half-wavelength ULA.

    `nominal_angle` may carry any leading batch shape; the result appends
    two antenna axes. Entry (a, b) is
    exp(j*pi*(a-b)*sin(theta)) * exp(-asd^2/2 * (pi*(a-b)*cos(theta))^2),
    renormalized so the trace equals the antenna count.
    """
    angle = np.asarray(nominal_angle, dtype=float)
    delta = np.arange(n_antennas)[:, None] - np.arange(n_antennas)[None, :]
    sin_t = np.sin(angle)[..., None, None]
    cos_t = np.cos(angle)[..., None, None]
    mat = np.exp(1j * np.pi * delta * sin_t) * np.exp(
        -0.5 * asd**2 * (np.pi * delta * cos_t) ** 2
    )
    trace = np.trace(mat, axis1=-2, axis2=-1).real
    return mat * (n_antennas / trace)[..., None, None]


def local_scattering_correlation(
    n_antennas: int, nominal_angle: float, asd: float
) -> np.ndarray:
    """N x N Hermitian PSD correlation matrix with trace N.

    Parameters
    ----------
    n_antennas : int
    nominal_angle : float
        Nominal azimuth angle of arrival, radians.
    asd : float
        Angular standard deviation, radians.
    """
    if n_antennas < 1:
        raise ValueError(f"n_antennas must be >= 1, got {n_antennas}")
    return _scattering_matrix(n_antennas, np.float64(nominal_angle), asd)


def build_snapshot(
    config: NetworkConfig,
    failure_prob_range: tuple[float, float],
    rng: np.random.Generator,
) -> NetworkSnapshot:
    """Generate one network drop.

    Draw order (fixed for reproducibility): AP positions, UE positions,
    shadow fading (M x K), baseline failure probabilities (M,). Failure
    probabilities are i.i.d. uniform on `failure_prob_range`.
    """
    low, high = failure_prob_range
    if not 0.0 <= low <= high <= 1.0:
        raise ValueError(
            f"failure_prob_range must satisfy 0 <= low <= high <= 1, got {failure_prob_range}"
        )
    aps = place_uniform(config.num_aps, config.area_side, rng)
    ues = place_uniform(config.num_ues, config.area_side, rng)

    offsets = _TRANSLATE_UNITS * config.area_side
    # (M, K, 9, 2) offsets from each AP to each translate of each UE
    diff = ues[None, :, None, :] + offsets[None, None, :, :] - aps[:, None, None, :]
    planar_sq = np.sum(diff**2, axis=-1)
    best = np.argmin(planar_sq, axis=2)
    min_sq = np.take_along_axis(planar_sq, best[:, :, None], axis=2)[:, :, 0]
    distance = np.sqrt(min_sq + config.ap_height**2)
    if np.any(distance <= 0):
        raise ValueError("degenerate drop: AP and UE coincide with zero height")

    shadow = rng.normal(0.0, config.shadow_std_db, size=distance.shape)
    beta_db = (
        config.pathloss_intercept_db
        - config.pathloss_exponent_coeff * np.log10(distance)
        + shadow
    )
    beta = 10.0 ** (beta_db / 10.0)

    vec = np.take_along_axis(diff, best[:, :, None, None], axis=2)[:, :, 0, :]
    angles = np.arctan2(vec[..., 1], vec[..., 0])
    corr = _scattering_matrix(
        config.antennas_per_ap, angles, np.deg2rad(config.asd_deg)
    )

    probs = rng.uniform(low, high, size=config.num_aps)
    return NetworkSnapshot(
        ap_positions=aps,
        ue_positions=ues,
        beta=beta,
        corr=corr,
        baseline_failure_probs=probs,
    )
