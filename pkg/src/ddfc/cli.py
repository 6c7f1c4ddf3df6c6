"""Command-line harness.

    ddfc run --config cfg.json [--seed N] [--repeats M] [--workers W] [--out DIR]
    ddfc compare --a cfg_a.json --b cfg_b.json --out DIR
    ddfc validate --config cfg.json

Exit codes: 0 success, 1 validation failure, 2 runtime divergence.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import BackwardDivergence, ContractViolation, \
    SimulationDivergence
from .experiment import ExperimentAborted, compare_methods, load_config, \
    run_experiment, validate_config


def _add_common(parser):
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--repeats", type=int, default=None)
    parser.add_argument("--workers", type=int, default=None)
    parser.add_argument("--out", default=None)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ddfc",
        description="Data-driven feedback control experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a seeded repeat campaign")
    p_run.add_argument("--config", required=True)
    _add_common(p_run)

    p_cmp = sub.add_parser("compare", help="run and compare two campaigns")
    p_cmp.add_argument("--a", required=True)
    p_cmp.add_argument("--b", required=True)
    p_cmp.add_argument("--out", required=True)
    p_cmp.add_argument("--seed", type=int, default=None)
    p_cmp.add_argument("--repeats", type=int, default=None)
    p_cmp.add_argument("--workers", type=int, default=None)

    p_val = sub.add_parser("validate",
                           help="check config and problem partials only")
    p_val.add_argument("--config", required=True)
    p_val.add_argument("--seed", type=int, default=None)
    return parser


def _overrides(args):
    out = {"seed": args.seed, "repeats": args.repeats,
           "workers": args.workers}
    if getattr(args, "out", None) is not None:
        out["output_dir"] = args.out
    return out


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            config = load_config(args.config, **_overrides(args))
            metrics = run_experiment(config)
            print(json.dumps({k: v for k, v in metrics.items()
                              if k != "config_echo"}, indent=2,
                             sort_keys=True))
            print(f"wrote {config.output_dir}/metrics.json")
        elif args.command == "compare":
            common = {"seed": args.seed, "repeats": args.repeats,
                      "workers": args.workers}
            config_a = load_config(args.a, **common)
            config_b = load_config(args.b, **common)
            comparison = compare_methods(config_a, config_b, args.out)
            print(json.dumps({k: v for k, v in comparison.items()
                              if not k.startswith("config_echo")},
                             indent=2, sort_keys=True))
            print(f"wrote {args.out}/comparison.json")
        elif args.command == "validate":
            config = load_config(args.config,
                                 **({"seed": args.seed}
                                    if args.seed is not None else {}))
            ok, report = validate_config(config)
            print(report)
            if not ok:
                return 1
            print("config ok")
    except (ContractViolation, FileNotFoundError, json.JSONDecodeError,
            KeyError, TypeError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 1
    except (ExperimentAborted, SimulationDivergence,
            BackwardDivergence) as exc:
        print(f"runtime divergence: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
