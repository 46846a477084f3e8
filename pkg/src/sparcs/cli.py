"""Command-line interface.

    sparcs verify     [--config F] [--seed N]            closed-form cross-checks
    sparcs gradcheck  [--config F] [--seed N]            analytic vs numeric gradients
    sparcs family      --config F  [--out D] [...]       interpolation-family sweep
    sparcs teacher     --config F  [--out D] [...]       teacher-student + pruning
    sparcs paramcount [--config F] [--out D]             parameter-count table
    sparcs export     (--config F | --checkpoint F) ...  materialize a checkpoint

Exit codes: 0 success, 1 failed checks or runtime error, 2 bad configuration
or arguments.
"""

from __future__ import annotations

import argparse
import sys

from ._version import VERSION
from .config import default_config, export_config, load_config
from .errors import ConfigError, ParseError, SparcsError

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparcs",
        description="Spectral parametrization and architecture search for feedforward networks.",
    )
    parser.add_argument("--version", action="version", version=f"sparcs {VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, out_help: str) -> None:
        p.add_argument("--config", help="experiment config file (INI)")
        p.add_argument("--out", help=out_help)
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--parallel", type=int, help="worker processes (default: all cores)")

    common(sub.add_parser("verify", help="cross-check the closed forms against dense oracles"),
           "unused")
    common(sub.add_parser("gradcheck", help="compare analytic and finite-difference gradients"),
           "unused")
    common(sub.add_parser("family", help="run the linear-to-nonlinear interpolation sweep"),
           "output directory for curves, histories, and figures")
    common(sub.add_parser("teacher", help="run the teacher-student compression benchmark"),
           "output directory for history, histograms, pruning artifacts")
    common(sub.add_parser("paramcount", help="tabulate spectral vs direct parameter counts"),
           "optional output directory for the CSV and figures")
    exp = sub.add_parser("export", help="materialize a checkpoint into explicit bundles")
    common(exp, "output directory for direct_model.json")
    exp.add_argument("--checkpoint", help="checkpoint file (alternative to --config)")
    exp.add_argument("--threshold", type=float, default=None,
                     help="eigenvalue magnitude below which hidden neurons are dropped")
    return parser


def _config_for(args) -> "ExperimentConfig":
    kind = args.command
    if args.config:
        return load_config(
            args.config,
            expected_kind=kind,
            seed_override=args.seed,
            parallel_override=args.parallel,
            out_override=args.out,
        )
    if kind == "export":
        if not args.checkpoint:
            raise ConfigError("export needs --config or --checkpoint")
        return export_config(
            args.checkpoint,
            threshold=args.threshold if args.threshold is not None else 0.0,
            seed=args.seed if args.seed is not None else 42,
            parallel=args.parallel if args.parallel is not None else 0,
            out=args.out or "",
        )
    return default_config(
        kind,
        seed=args.seed if args.seed is not None else 42,
        parallel=args.parallel if args.parallel is not None else 0,
        out=args.out or "",
    )


def _dispatch(args) -> int:
    from . import experiments

    cfg = _config_for(args)
    if args.command == "verify":
        report = experiments.run_verify(
            seed=cfg.seed,
            max_b=cfg.get("verify", "max_b"),
            trials=cfg.get("verify", "trials"),
            max_size=cfg.get("verify", "max_size"),
            binomial_max_b=cfg.get("verify", "binomial_max_b"),
        )
        for line in report.lines():
            print(line)
        return 0 if report.ok else 1

    if args.command == "gradcheck":
        report = experiments.run_gradcheck(
            seed=cfg.seed,
            configs=cfg.get("gradcheck", "configs"),
            eps=cfg.get("gradcheck", "eps"),
            max_b=cfg.get("gradcheck", "max_b"),
            max_size=cfg.get("gradcheck", "max_size"),
        )
        print(
            f"gradcheck: {report.configs} configs, {report.params_checked} parameters, "
            f"{report.kink_excluded} kink-excluded, worst relative error {report.worst_rel:.3e}"
        )
        if report.ok():
            print("[PASS] analytic gradients match finite differences")
            return 0
        print("[FAIL] analytic gradients disagree with finite differences")
        return 1

    if args.command == "paramcount":
        lines = experiments.run_paramcount(cfg, cfg.out or None)
        for line in lines:
            print(line)
        return 0

    if args.command in ("family", "teacher"):
        if not cfg.out:
            raise ConfigError(f"{args.command} needs an output directory (--out or experiment.out)")
        runner = (
            experiments.run_family_sweep if args.command == "family"
            else experiments.run_teacher_student
        )
        summary = runner(cfg, cfg.out)
        print(f"{args.command} run complete; artifacts in {cfg.out}")
        for key, val in sorted(summary.items()):
            print(f"  {key}: {val}")
        return 0

    if args.command == "export":
        if not cfg.out:
            raise ConfigError("export needs an output directory (--out or experiment.out)")
        obj = experiments.run_export(cfg, cfg.out)
        kept = "x".join(str(s) for s in obj["active_sizes"])
        print(f"exported {len(obj['bundles'])} bundles, active sizes {kept}; "
              f"artifacts in {cfg.out}")
        return 0

    raise ConfigError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except (ConfigError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SparcsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
