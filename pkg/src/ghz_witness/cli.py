"""Command line front end: ``ghz-witness {run,sample,analyze,sweep}``."""
from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .experiment import (
    ConfigError,
    analyze,
    load_config,
    load_sweep_config,
    run,
    sample,
    sweep,
)
from .protocol import IncompleteDataError


def _experiment_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="YAML experiment config; flags override its values")
    p.add_argument("--n", type=int)
    p.add_argument("--theta", help="radians, or a multiple of pi such as pi/4")
    p.add_argument("--phi", help="radians, or a multiple of pi such as -pi/2")
    p.add_argument("--p", type=float, help="white-noise weight")
    p.add_argument("--protocol", choices=("full", "efficient", "baseline"))
    p.add_argument("--witness", choices=("phi", "phi-theta"))
    p.add_argument("--mode", choices=("exact", "sampled"))
    p.add_argument("--shots", type=int, help="shots per setting")
    p.add_argument("--seed", type=int)
    p.add_argument("--significance", type=float, help="standard errors required below zero")


def _overrides(args) -> dict:
    keys = ("n", "theta", "phi", "p", "protocol", "witness", "mode", "shots", "seed", "significance")
    out = {k: getattr(args, k) for k in keys}
    out["report"] = getattr(args, "report", None)
    out["shots_out"] = getattr(args, "shots_out", None)
    return out


def _summary(doc: dict) -> str:
    parts = [f"family={doc['family']}", f"W={doc['witness_value']:.6g}+-{doc['witness_error']:.2g}"]
    if doc.get("phi_opt") is not None:
        parts.append(f"phi_opt={doc['phi_opt']:.6g}")
    if doc.get("theta_opt") is not None:
        parts.append(f"theta_opt={doc['theta_opt']:.6g}")
    parts.append(doc["verdict"])
    return " ".join(parts)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ghz-witness", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="evaluate a witness on exact or sampled data")
    _experiment_flags(p_run)
    p_run.add_argument("--report", help="write the JSON report here")
    p_run.add_argument("--shots-out", dest="shots_out", help="also write sampled shots (JSONL)")

    p_sample = sub.add_parser("sample", help="emit shots only")
    _experiment_flags(p_sample)
    p_sample.add_argument("--out", dest="shots_out", required=True, help="JSONL output path")

    p_an = sub.add_parser("analyze", help="evaluate a JSONL shot file")
    p_an.add_argument("shots_file")
    p_an.add_argument("--witness", choices=("phi", "phi-theta", "baseline"), default="phi")
    p_an.add_argument("--significance", type=float, default=3.0)
    p_an.add_argument("--report", help="write the JSON report here")

    p_sw = sub.add_parser("sweep", help="tolerance curves as CSV")
    p_sw.add_argument("--config", help="YAML sweep config")
    p_sw.add_argument("--preset", choices=("fig3", "fig4-5", "tolerance-map", "custom"))
    p_sw.add_argument("--n", type=int, help="qubit count for finite-N columns")
    p_sw.add_argument("--family", help="witness family for the custom preset")
    p_sw.add_argument("--bisect", action="store_true", default=None, help="add bisection-measured thresholds")
    p_sw.add_argument("--workers", type=int)
    p_sw.add_argument("--out", dest="output", help="CSV output path")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            doc = run(load_config(args.config, _overrides(args)))
            print(_summary(doc))
        elif args.command == "sample":
            cfg = load_config(args.config, _overrides(args))
            if cfg.mode != "sampled":
                cfg = load_config(args.config, {**_overrides(args), "mode": "sampled"})
            records = sample(cfg)
            print(f"wrote {len(records)} records to {cfg.shots_out}")
        elif args.command == "analyze":
            doc = analyze(args.shots_file, args.witness, args.significance, args.report)
            print(_summary(doc))
            if not args.report:
                print(json.dumps(doc, indent=2, sort_keys=True))
        else:
            overrides = {k: getattr(args, k) for k in ("preset", "n", "family", "bisect", "workers", "output")}
            path = sweep(load_sweep_config(args.config, overrides))
            print(f"wrote {path}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (IncompleteDataError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
