"""Mean spectral efficiency and user outage versus failure intensity.

Sweeps the stress parameter alpha from a failure-free network to full
baseline failure probabilities, comparing the three AP selection schemes
under common random numbers. Mirrors the mean-SE / outage-vs-alpha view
of the experiment harness at a reduced scale so it finishes in about a
minute. Saves a two-panel figure to demos/output/.
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import cfrsim as cf
from cfrsim.config import ExperimentConfig

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

ALPHAS = (0.0, 0.25, 0.5, 0.75, 1.0)


def main():
    config = ExperimentConfig(
        network=cf.NetworkConfig(area_side=800.0, num_aps=64, antennas_per_ap=1, num_ues=12),
        params=cf.SystemParams(),
        epsilon=0.9,
        min_cluster=2,
        failure_range=(0.01, 0.1),
        alpha_values=ALPHAS,
        schemes=(cf.Scheme.ALL_APS, cf.Scheme.FAAS, cf.Scheme.AGNOSTIC),
        num_snapshots=10,
        blocks_per_snapshot=1,
        failure_draws_per_block=100,
        master_seed=11,
        output_path="demos/output/sweep",
    )
    table = cf.run_experiment(config)

    fig, axes = plt.subplots(1, 2, figsize=(11, 4))
    for scheme in config.schemes:
        mean_se = [table.rows[(scheme, a)].mean_se for a in ALPHAS]
        outage = [table.rows[(scheme, a)].outage_prob for a in ALPHAS]
        axes[0].plot(ALPHAS, mean_se, marker="o", label=scheme.value)
        if scheme is not cf.Scheme.ALL_APS:  # all-APs outage is exactly zero
            axes[1].semilogy(
                ALPHAS, np.maximum(outage, 1e-7), marker="o", label=scheme.value
            )
        print(f"{scheme.value:9s} mean SE: " + "  ".join(f"{v:.3f}" for v in mean_se))
        print(f"{scheme.value:9s} outage:  " + "  ".join(f"{v:.1e}" for v in outage))

    axes[0].set_xlabel("failure intensity alpha")
    axes[0].set_ylabel("mean SE [bit/s/Hz]")
    axes[0].legend()
    axes[1].set_xlabel("failure intensity alpha")
    axes[1].set_ylabel("user outage probability")
    axes[1].legend()
    fig.tight_layout()
    target = OUT / "failure_intensity_sweep.png"
    fig.savefig(target, dpi=120)
    print(f"figure saved to {target}")


if __name__ == "__main__":
    main()
