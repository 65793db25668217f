"""Command-line front end: run, preset, validate."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .config import ConfigError, dump_config, load_config, preset
from .harness import run_experiment, write_results


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfrsim",
        description="Uplink cell-free massive MIMO resilience simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute an experiment from a config file")
    run.add_argument("config", help="path to an experiment config file")
    _common_overrides(run)

    pre = sub.add_parser("preset", help="emit a ready-made config")
    pre.add_argument(
        "name", choices=["paper-fig2-a", "paper-fig2-b", "desk"], help="preset name"
    )
    pre.add_argument("--out", help="write the config here instead of stdout")

    val = sub.add_parser("validate", help="parse and check a config file")
    val.add_argument("config", help="path to an experiment config file")
    return parser


def _common_overrides(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--seed", type=int, help="override master_seed")
    sub.add_argument(
        "--threads", type=int, help="worker processes (default: CFR_THREADS or 1)"
    )
    sub.add_argument("--out", help="override output_path")
    sub.add_argument("--alpha", help="override alpha_values, comma separated")


def _apply_overrides(config, args):
    if args.seed is not None:
        config = replace(config, master_seed=args.seed)
    if args.out is not None:
        config = replace(config, output_path=args.out)
    if args.alpha is not None:
        try:
            alphas = tuple(float(s) for s in args.alpha.split(",") if s.strip())
        except ValueError:
            raise ConfigError(f"--alpha {args.alpha!r} is not a float list") from None
        if not alphas:
            raise ConfigError("--alpha must list at least one value")
        config = replace(config, alpha_values=alphas)
    return config


def _cmd_run(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    table = run_experiment(config, threads=args.threads)
    write_results(table, config.output_path)
    print(f"wrote results to {config.output_path}")
    for (scheme, alpha), row in table.rows.items():
        print(
            f"  {scheme.value:9s} alpha={alpha:<5g} min_se={row.min_se:.4f} "
            f"mean_se={row.mean_se:.4f} outage={row.outage_prob:.3e}"
        )
    return 0


def _cmd_preset(args) -> int:
    text = dump_config(preset(args.name))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        print(f"wrote preset {args.name} to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_validate(args) -> int:
    load_config(args.config)
    print(f"{args.config}: OK")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handlers = {"run": _cmd_run, "preset": _cmd_preset, "validate": _cmd_validate}
    try:
        return handlers[args.command](args)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
