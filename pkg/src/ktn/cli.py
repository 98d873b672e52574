"""Batch CLI: spectrum / predict / converge / check.

Exit codes: 0 success, 1 validation failure (bad config or arguments),
2 numerical failure. KTN_THREADS caps the harness's own parallelism.
"""

from __future__ import annotations

import argparse
import json
import sys

from .harness import ExperimentConfig, run_check, run_convergence, run_prediction, run_spectrum


def _load(path: str) -> ExperimentConfig:
    try:
        return ExperimentConfig.from_json(path)
    except (OSError, json.JSONDecodeError, TypeError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        raise SystemExit(1)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="ktn", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_spec = sub.add_parser("spectrum", help="eigendecomposition datasets")
    p_spec.add_argument("--config", required=True)
    p_spec.add_argument("--out", default=None)

    p_pred = sub.add_parser("predict", help="prediction fields for all models")
    p_pred.add_argument("--config", required=True)
    p_pred.add_argument("--t", default=None, help="comma-separated time override")

    p_conv = sub.add_parser("converge", help="circle-rotation convergence table")
    p_conv.add_argument("--config", required=True)

    p_check = sub.add_parser("check", help="kernel and generator sanity report")
    p_check.add_argument("--config", required=True)

    args = parser.parse_args(argv)
    cfg = _load(args.config)

    try:
        if args.command == "spectrum":
            run_spectrum(cfg, out_dir=args.out)
        elif args.command == "predict":
            if args.t is not None:
                try:
                    cfg.times = [float(v) for v in args.t.split(",")]
                except ValueError as exc:
                    print(f"bad time list: {exc}", file=sys.stderr)
                    return 1
            run_prediction(cfg)
        elif args.command == "converge":
            rows = run_convergence(cfg)
            for eps, n, tau, err in rows:
                print(f"eps={eps:g} n={n} tau={tau:g} max_error={err:.6e}")
        elif args.command == "check":
            report = run_check(cfg)
            print(json.dumps(report, indent=2, sort_keys=True))
            if not report["ok"]:
                return 2
    except ValueError as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return 1
    except (RuntimeError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
