"""Command-line entry point: run sweeps, regenerate presets, validate configs."""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigError, IntegrandDefinitionError, NumericFailure
from .scenarios import (
    FIGURE_IDS,
    config_hash,
    default_config_path,
    load_config,
    reproduce_figure,
    resolve_output_dir,
    run_sweep,
    write_csv,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hgpol",
        description=(
            "Degree of polarization and intensity of partially coherent "
            "Hermite-Gaussian beams on free-space and turbulent paths."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run the sweep described by a config file")
    run_p.add_argument(
        "--config", default=None,
        help="scenario JSON (defaults to the shipped reference scenario)",
    )
    run_p.add_argument("--out", default=None, help="output directory")
    run_p.add_argument(
        "--format", choices=("csv", "csv+svg"), default="csv",
        help="csv only, or csv plus an SVG line plot",
    )
    run_p.add_argument("--threads", type=int, default=1)

    fig_p = sub.add_parser("figure", help="regenerate a bundled preset dataset")
    fig_p.add_argument("id", choices=FIGURE_IDS)
    fig_p.add_argument("--out", default=None)
    fig_p.add_argument("--format", choices=("csv", "csv+svg"), default="csv")
    fig_p.add_argument("--threads", type=int, default=1)

    val_p = sub.add_parser("validate", help="parse and validate a config file")
    val_p.add_argument("--config", required=True)
    return parser


def _cmd_run(args) -> int:
    import json

    from .scenarios import PACKAGE_VERSION, config_to_dict

    cfg = load_config(args.config if args.config else default_config_path())
    svg = args.format == "csv+svg"
    out = resolve_output_dir(args.out if args.out else cfg.output.directory)
    rows = run_sweep(cfg, threads=max(1, args.threads))
    csv_path = out / "sweep.csv"
    write_csv(rows, csv_path)
    manifest_path = out / "sweep_manifest.json"
    manifest_path.write_text(
        json.dumps(
            {
                "version": PACKAGE_VERSION,
                "config_hash": config_hash(cfg),
                "resolved": config_to_dict(cfg),
            },
            indent=2,
            sort_keys=True,
        )
        + "\n"
    )
    written = [csv_path, manifest_path]
    if svg or cfg.output.svg:
        from .scenarios import _plot_figure  # lazy: pulls matplotlib

        axis = {
            "distance": ("z_m", "propagation distance (m)"),
            "order": ("m", "mode order m=n"),
            "sigma0": ("sigma0xx_m", "correlation length (m)"),
            "zenith": ("zenith_rad", "zenith angle (rad)"),
            "radial_profile": ("rho_x_m", "diagonal offset (m)"),
        }[cfg.sweep.variable]
        svg_path = out / "sweep.svg"
        _plot_figure(rows, "_run", svg_path, axis=axis)
        written.append(svg_path)
    failures = sum(1 for r in rows if r["status"] != "ok")
    for path in written:
        print(path)
    print(f"rows={len(rows)} failures={failures} config_hash={config_hash(cfg)}")
    return EXIT_NUMERIC if failures else EXIT_OK


def _cmd_figure(args) -> int:
    paths = reproduce_figure(
        args.id,
        out_dir=args.out,
        svg=args.format == "csv+svg",
        threads=max(1, args.threads),
    )
    for path in paths:
        print(path)
    return EXIT_OK


def _cmd_validate(args) -> int:
    cfg = load_config(args.config)
    print(f"ok: {args.config} config_hash={config_hash(cfg)}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "figure":
            return _cmd_figure(args)
        return _cmd_validate(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericFailure, IntegrandDefinitionError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
