"""Correlated Rayleigh small-scale fading per coherence block.

The channel from AP m to UE k is g_mk = sqrt(beta_mk) * h_mk with
h_mk ~ CN(0, R_mk). Draws use a Hermitian square root of R that tolerates
rank deficiency (eigenvalues below a small clip are treated as zero).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import NetworkSnapshot

EIGENVALUE_CLIP = 1e-12


@dataclass(frozen=True)
class ChannelRealization:
    """True channels for one coherence block.

    g has shape (M, K, N): the length-N channel vector for every
    (AP, UE) pair.
    """

    g: np.ndarray
    block_index: int = 0


def hermitian_sqrt(mats: np.ndarray, clip: float = EIGENVALUE_CLIP) -> np.ndarray:
    """Batched Hermitian square root L with L @ L^H = mats.

    Eigenvalues below `clip` are zeroed, so nearly singular PSD inputs
    (e.g. strongly correlated arrays) factor cleanly.
    """
    vals, vecs = np.linalg.eigh(mats)
    vals = np.where(vals < clip, 0.0, vals)
    return (vecs * np.sqrt(vals)[..., None, :]) @ np.conj(
        np.swapaxes(vecs, -1, -2)
    )


def correlation_factors(snapshot: NetworkSnapshot) -> np.ndarray:
    """Square-root factors of every R_mk, shape (M, K, N, N).

    Computing these once per snapshot and passing them to
    :func:`realize_block` avoids refactorizing on every block.
    """
    return hermitian_sqrt(snapshot.corr)


def sample_channel(
    beta: float, corr: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """One channel vector sqrt(beta) * L @ u with u ~ CN(0, I_N).

    The result has covariance beta * corr. Raises if `corr` is not
    Hermitian PSD (factorization would be invalid).
    """
    corr = np.asarray(corr)
    if np.any(np.linalg.eigvalsh(corr) < -1e-9):
        raise ValueError("correlation matrix is not positive semidefinite")
    n = corr.shape[0]
    factor = hermitian_sqrt(corr)
    u = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)
    return np.sqrt(beta) * (factor @ u)


def realize_block(
    snapshot: NetworkSnapshot,
    rng: np.random.Generator,
    block_index: int = 0,
    factors: np.ndarray | None = None,
) -> ChannelRealization:
    """Draw all M x K channel vectors for one coherence block.

    Vectorized equivalent of independent :func:`sample_channel` draws for
    every (AP, UE) pair. Deterministic for a given rng state.
    """
    m, k, n = snapshot.num_aps, snapshot.num_ues, snapshot.num_antennas
    if factors is None:
        factors = correlation_factors(snapshot)
    real = rng.standard_normal((m, k, n))
    imag = rng.standard_normal((m, k, n))
    u = (real + 1j * imag) / np.sqrt(2.0)
    g = np.sqrt(snapshot.beta)[:, :, None] * np.einsum("mkab,mkb->mka", factors, u)
    return ChannelRealization(g=g, block_index=block_index)
