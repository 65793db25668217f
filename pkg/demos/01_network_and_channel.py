"""One network drop, up close.

Builds a single random deployment, looks at the spread of large-scale
gains, then draws channel realizations and checks that the MMSE channel
estimator behaves: estimation error shrinks with the pilot SNR and the
estimates are unbiased along error directions. Saves a two-panel figure
to demos/output/.
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import cfrsim as cf
from cfrsim.estimation import assign_pilots, estimate_block

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)


def main():
    config = cf.NetworkConfig(area_side=1000.0, num_aps=100, antennas_per_ap=1, num_ues=20)
    rng = np.random.default_rng(1)
    snapshot = cf.build_snapshot(config, (0.01, 0.1), rng)
    params = cf.SystemParams()

    beta_db = 10 * np.log10(snapshot.beta)
    print(f"network: {config.num_aps} APs, {config.num_ues} UEs over "
          f"{config.area_side:.0f} m square")
    print(f"large-scale gain range: {beta_db.min():.1f} .. {beta_db.max():.1f} dB")
    strongest = beta_db.max(axis=0)
    print(f"per-UE strongest AP gain: median {np.median(strongest):.1f} dB")

    masters = np.array([cf.select_master(snapshot.beta[:, k]) for k in range(20)])
    pilots = assign_pilots(snapshot, masters, params.tau_p)
    print(f"pilot reuse: {[s.size for s in pilots.copilot_sets]} UEs per pilot")

    # estimation quality across blocks: normalized error per (AP, UE) link
    errors = []
    for block in range(50):
        realization = cf.realize_block(snapshot, np.random.default_rng(100 + block))
        estimates = estimate_block(
            snapshot, realization, pilots, params, np.random.default_rng(900 + block)
        )
        err = np.abs(realization.g - estimates.g_hat)[:, :, 0] ** 2
        errors.append(err / snapshot.beta)
    nmse = np.mean(errors, axis=0)

    fig, axes = plt.subplots(1, 2, figsize=(11, 4))
    axes[0].scatter(snapshot.ap_positions[:, 0], snapshot.ap_positions[:, 1],
                    marker="^", s=25, label="AP")
    axes[0].scatter(snapshot.ue_positions[:, 0], snapshot.ue_positions[:, 1],
                    marker="o", s=25, label="UE")
    axes[0].set_title("one random drop")
    axes[0].set_xlabel("m")
    axes[0].legend()

    snr_db = 10 * np.log10(params.uplink_power_w * snapshot.beta / params.noise_power_w)
    axes[1].scatter(snr_db.ravel(), 10 * np.log10(nmse.ravel()), s=4, alpha=0.4)
    axes[1].set_xlabel("per-link pilot SNR [dB]")
    axes[1].set_ylabel("estimation NMSE [dB]")
    axes[1].set_title("MMSE estimate quality vs link SNR")
    fig.tight_layout()
    target = OUT / "network_and_channel.png"
    fig.savefig(target, dpi=120)
    print(f"figure saved to {target}")


if __name__ == "__main__":
    main()
