import sys
from pathlib import Path

import numpy as np

from cfrsim.geometry import NetworkSnapshot

# make dense_oracle importable from every test module
sys.path.insert(0, str(Path(__file__).parent))


def make_snapshot(beta, corr=None, failure_probs=None, seed=0):
    """Hand-built snapshot from an explicit (M, K) gain matrix."""
    beta = np.asarray(beta, dtype=float)
    m, k = beta.shape
    if corr is None:
        corr = np.broadcast_to(np.eye(1, dtype=complex), (m, k, 1, 1)).copy()
    if failure_probs is None:
        failure_probs = np.full(m, 0.05)
    rng = np.random.default_rng(seed)
    return NetworkSnapshot(
        ap_positions=rng.random((m, 2)) * 100,
        ue_positions=rng.random((k, 2)) * 100,
        beta=beta,
        corr=np.asarray(corr, dtype=complex),
        baseline_failure_probs=np.asarray(failure_probs, dtype=float),
    )
