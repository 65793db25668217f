"""How the serving clusters react to failure probabilities.

Places one network, assigns clusters with the failure-aware rule and the
failure-agnostic baseline at full stress, and highlights where they
disagree: the failure-aware rule discounts each AP's gain by its survival
probability, so it swaps marginal cluster members for more reliable ones
and occasionally changes the cluster size. Saves a map of one UE's
clusters to demos/output/.
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import cfrsim as cf

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)


def analytic_outage(assignment, probs):
    """Chance that every cluster member fails, per UE."""
    return np.array([np.prod(probs[c]) for c in assignment.clusters])


def main():
    config = cf.NetworkConfig(area_side=1000.0, num_aps=100, antennas_per_ap=1, num_ues=20)
    snapshot = cf.build_snapshot(config, (0.01, 0.1), np.random.default_rng(3))
    probs = snapshot.baseline_failure_probs

    aware = cf.assign_clusters(snapshot, cf.Scheme.FAAS, 0.9, 2, effective_probs=probs)
    agnostic = cf.assign_clusters(snapshot, cf.Scheme.AGNOSTIC, 0.9, 2)

    same = sum(
        set(a.tolist()) == set(b.tolist())
        for a, b in zip(aware.clusters, agnostic.clusters)
    )
    print(f"cluster sizes (failure-aware): {sorted(c.size for c in aware.clusters)}")
    print(f"cluster sizes (agnostic):      {sorted(c.size for c in agnostic.clusters)}")
    print(f"identical clusters: {same}/20 UEs")
    print(f"mean analytic outage, failure-aware: {analytic_outage(aware, probs).mean():.3e}")
    print(f"mean analytic outage, agnostic:      {analytic_outage(agnostic, probs).mean():.3e}")

    # draw the first UE whose clusters differ
    diff_ues = [
        k
        for k in range(20)
        if set(aware.clusters[k].tolist()) != set(agnostic.clusters[k].tolist())
    ]
    ue = diff_ues[0] if diff_ues else 0
    fig, ax = plt.subplots(figsize=(6.5, 6))
    scatter = ax.scatter(
        snapshot.ap_positions[:, 0],
        snapshot.ap_positions[:, 1],
        c=probs,
        cmap="RdYlGn_r",
        marker="^",
        s=35,
    )
    fig.colorbar(scatter, ax=ax, label="baseline failure probability")
    ax.scatter(*snapshot.ue_positions[ue], marker="*", s=250, color="blue", label=f"UE {ue}")
    for m in agnostic.clusters[ue]:
        ax.add_patch(
            plt.Circle(snapshot.ap_positions[m], 26, fill=False, color="gray", lw=1.5)
        )
    for m in aware.clusters[ue]:
        ax.add_patch(
            plt.Circle(snapshot.ap_positions[m], 18, fill=False, color="blue", lw=1.5)
        )
    ax.set_title(f"UE {ue}: agnostic cluster (gray) vs failure-aware (blue)")
    ax.set_xlim(0, 1000)
    ax.set_ylim(0, 1000)
    ax.legend(loc="upper right")
    target = OUT / "cluster_selection.png"
    fig.savefig(target, dpi=120)
    print(f"figure saved to {target}")


if __name__ == "__main__":
    main()
