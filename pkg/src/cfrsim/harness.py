"""Monte-Carlo experiment orchestration and result serialization.

One experiment sweeps (scheme, alpha) cells over a common set of random
network snapshots. Per snapshot: masters and pilots are assigned once,
channel blocks are realized and estimated once (estimates do not depend on
the failure epoch), and every failure draw is shared by all schemes and
coupled across alpha values through one uniform vector per draw (common
random numbers). Each (scheme, alpha, snapshot) cell is reduced with
:func:`cfrsim.metrics.aggregate`; across snapshots the summary scalars are
means of the per-snapshot values and the CDF samples are the per-snapshot
minimum user SEs.

Randomness derives from a single master seed through
``numpy.random.SeedSequence(master_seed, spawn_key=(tag, indices...))``
with fixed purpose tags, so results are independent of execution order and
worker count.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .channel import correlation_factors, realize_block
from .config import ConfigError, ExperimentConfig, dump_config, validate_config
from .estimation import estimate_block
from .geometry import build_snapshot
from .metrics import AggregateResult, aggregate, empirical_cdf
from .selection import (
    ClusterAssignment,
    FailureRealization,
    Scheme,
    assign_clusters,
    failure_mask_from_uniforms,
    scale_failure_probs,
    select_master,
)
from .estimation import assign_pilots
from .uplink import evaluate_rates

# Purpose tags for hierarchical seed derivation.
TAG_SNAPSHOT = 1
TAG_CHANNEL = 2
TAG_PILOT_NOISE = 3
TAG_FAILURE = 4


def derive_rng(master_seed: int, *key: int) -> np.random.Generator:
    """Independent generator for one (purpose, index...) path of the run."""
    return np.random.default_rng(
        np.random.SeedSequence(master_seed, spawn_key=tuple(int(k) for k in key))
    )


@dataclass(frozen=True)
class ResultRow:
    """Aggregated outcome of one (scheme, alpha) cell.

    min_se and mean_se average the per-snapshot values (mean_se is also
    the grand mean since every snapshot carries equal weight);
    cdf_points is the empirical CDF of the per-snapshot minimum user SE.
    """

    scheme: Scheme
    alpha: float
    min_se: float
    mean_se: float
    outage_prob: float
    cdf_samples: np.ndarray
    cdf_points: np.ndarray
    per_snapshot: tuple[AggregateResult, ...]
    num_snapshots: int
    num_draws: int


@dataclass(frozen=True)
class ResultTable:
    """All rows of one experiment plus run metadata."""

    rows: dict[tuple[Scheme, float], ResultRow]
    config: ExperimentConfig
    metadata: dict


def _cluster_table(
    snapshot, config: ExperimentConfig
) -> dict[tuple[Scheme, float], ClusterAssignment]:
    """Clusters per (scheme, alpha); only the failure-aware ones vary with alpha."""
    table: dict[tuple[Scheme, float], ClusterAssignment] = {}
    static: dict[Scheme, ClusterAssignment] = {}
    for scheme in config.schemes:
        if scheme is not Scheme.FAAS:
            static[scheme] = assign_clusters(
                snapshot, scheme, config.epsilon, config.min_cluster
            )
    for alpha in config.alpha_values:
        for scheme in config.schemes:
            if scheme is Scheme.FAAS:
                probs = scale_failure_probs(alpha, snapshot.baseline_failure_probs)
                table[(scheme, alpha)] = assign_clusters(
                    snapshot,
                    scheme,
                    config.epsilon,
                    config.min_cluster,
                    effective_probs=probs,
                )
            else:
                table[(scheme, alpha)] = static[scheme]
    return table


def run_snapshot(
    config: ExperimentConfig, snapshot_index: int
) -> dict[tuple[Scheme, float], AggregateResult]:
    """Full Monte-Carlo evaluation of one snapshot, all (scheme, alpha) cells."""
    seed = config.master_seed
    rng_snapshot = derive_rng(seed, TAG_SNAPSHOT, snapshot_index)
    snapshot = build_snapshot(config.network, config.failure_range, rng_snapshot)

    masters = np.array(
        [select_master(snapshot.beta[:, k]) for k in range(snapshot.num_ues)]
    )
    pilots = assign_pilots(snapshot, masters, config.params.tau_p)
    clusters = _cluster_table(snapshot, config)
    factors = correlation_factors(snapshot)

    reports: dict[tuple[Scheme, float], list] = {cell: [] for cell in clusters}
    for b in range(config.blocks_per_snapshot):
        realization = realize_block(
            snapshot,
            derive_rng(seed, TAG_CHANNEL, snapshot_index, b),
            block_index=b,
            factors=factors,
        )
        estimates = estimate_block(
            snapshot,
            realization,
            pilots,
            config.params,
            derive_rng(seed, TAG_PILOT_NOISE, snapshot_index, b),
        )
        for d in range(config.failure_draws_per_block):
            uniforms = derive_rng(seed, TAG_FAILURE, snapshot_index, b, d).random(
                snapshot.num_aps
            )
            for alpha in config.alpha_values:
                probs = scale_failure_probs(alpha, snapshot.baseline_failure_probs)
                failures = FailureRealization(
                    alive=failure_mask_from_uniforms(uniforms, probs),
                    effective_probs=probs,
                )
                for scheme in config.schemes:
                    reports[(scheme, alpha)].append(
                        evaluate_rates(
                            snapshot,
                            estimates,
                            clusters[(scheme, alpha)],
                            failures,
                            config.params,
                        )
                    )
    return {cell: aggregate(cell_reports) for cell, cell_reports in reports.items()}


def _snapshot_worker(args: tuple[ExperimentConfig, int]):
    config, index = args
    return run_snapshot(config, index)


def resolve_threads(threads: int | None) -> int:
    """Explicit argument wins, then CFR_THREADS, then 1."""
    if threads is None:
        threads = int(os.environ.get("CFR_THREADS", "1"))
    if threads < 1:
        raise ConfigError(f"threads = {threads} must be >= 1")
    return threads


def run_experiment(config: ExperimentConfig, threads: int | None = None) -> ResultTable:
    """Run the full Monte-Carlo sweep described by `config`.

    `threads` > 1 distributes snapshots over a process pool; the result is
    bit-identical for any worker count because every snapshot derives its
    own random streams from the master seed.
    """
    validate_config(config)
    threads = resolve_threads(threads)
    start = time.monotonic()

    tasks = [(config, i) for i in range(config.num_snapshots)]
    if threads > 1 and config.num_snapshots > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            per_snapshot = list(pool.map(_snapshot_worker, tasks))
    else:
        per_snapshot = [_snapshot_worker(t) for t in tasks]

    rows: dict[tuple[Scheme, float], ResultRow] = {}
    num_draws = config.blocks_per_snapshot * config.failure_draws_per_block
    for scheme in config.schemes:
        for alpha in config.alpha_values:
            cell = (scheme, alpha)
            aggs = tuple(result[cell] for result in per_snapshot)
            mins = np.array([a.min_se for a in aggs])
            rows[cell] = ResultRow(
                scheme=scheme,
                alpha=alpha,
                min_se=float(mins.mean()),
                mean_se=float(np.mean([a.mean_se for a in aggs])),
                outage_prob=float(np.mean([a.outage_prob for a in aggs])),
                cdf_samples=mins,
                cdf_points=empirical_cdf(mins),
                per_snapshot=aggs,
                num_snapshots=config.num_snapshots,
                num_draws=num_draws,
            )

    metadata = {
        "master_seed": config.master_seed,
        "code_version": __version__,
        "threads": threads,
        "wall_time_s": time.monotonic() - start,
    }
    return ResultTable(rows=rows, config=config, metadata=metadata)


def _alpha_token(alpha: float) -> str:
    return format(alpha, "g")


def write_results(table: ResultTable, path: str) -> None:
    """Write summary.csv, per-row CDF files, and metadata.txt under `path`.

    CSV numbers use %.6e formatting and LF line endings, so repeated runs
    with the same config and seed are byte-identical. metadata.txt echoes
    the configuration and records the seed, code version, and wall time.
    """
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)

    lines = ["scheme,alpha,min_se,mean_se,outage_prob,num_snapshots,num_draws"]
    for row in table.rows.values():
        lines.append(
            f"{row.scheme.value},{row.alpha:.6e},{row.min_se:.6e},"
            f"{row.mean_se:.6e},{row.outage_prob:.6e},"
            f"{row.num_snapshots:d},{row.num_draws:d}"
        )
    _write_text(out / "summary.csv", "\n".join(lines) + "\n")

    for row in table.rows.values():
        name = f"cdf_{row.scheme.value}_{_alpha_token(row.alpha)}.csv"
        cdf_lines = ["min_rate_bits_per_hz,cum_fraction"]
        for value, frac in row.cdf_points:
            cdf_lines.append(f"{value:.6e},{frac:.6e}")
        _write_text(out / name, "\n".join(cdf_lines) + "\n")

    meta = [
        "# experiment configuration echo",
        dump_config(table.config).rstrip("\n"),
        "",
        "[run]",
        f"master_seed = {table.metadata['master_seed']}",
        f"code_version = {table.metadata['code_version']}",
        f"threads = {table.metadata['threads']}",
        f"wall_time_s = {table.metadata['wall_time_s']:.3f}",
    ]
    _write_text(out / "metadata.txt", "\n".join(meta) + "\n")


def _write_text(path: Path, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"failed writing results to {path}: {exc}") from exc
