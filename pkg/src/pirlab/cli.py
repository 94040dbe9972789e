"""Command-line front end.

Subcommands: ``capacity``, ``simulate``, ``audit``, ``reproduce``. All output
is a single JSON document on stdout (diagnostics go to stderr); identical
seeds and flags produce byte-identical documents. Exit status is 0 exactly
when every requested verdict passed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import reproduce as reproduce_mod
from .audit import (
    build_audit_report,
    concrete_multiround_download,
    exhaustive_correctness,
    expected_symbol_download,
    fraction_str,
    measure_rate,
    real_str,
    sw_failure_rate,
    _jsonify,
)
from .capacity import PirParameters, mtpir_capacity
from .coding import CodecConfig
from .linear import linear_descriptor, replicated_descriptor
from .multiround import multiround_descriptor
from .seeds import derive_seed

DEFAULT_SEED_ENV = "PIRLAB_SEED"


def _default_seed() -> int:
    return int(os.environ.get(DEFAULT_SEED_ENV, "0"))


def _scheme_from_args(args) -> object:
    if args.scheme == "multiround":
        return multiround_descriptor(bias=Fraction(args.bias), storage=args.storage)
    if args.scheme == "linear":
        return linear_descriptor()
    if args.scheme == "replicated":
        return replicated_descriptor()
    raise ValueError(f"unknown scheme {args.scheme!r}")


def _emit(document: dict) -> None:
    json.dump(document, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def cmd_capacity(args) -> int:
    params = PirParameters(
        num_messages=args.K, num_databases=args.N, collusion=args.T
    )
    value = mtpir_capacity(params)
    _emit(
        {
            "num_messages": args.K,
            "num_databases": args.N,
            "collusion": args.T,
            "capacity": fraction_str(value),
            "capacity_real": real_str(float(value)),
        }
    )
    return 0


def cmd_simulate(args) -> int:
    scheme = _scheme_from_args(args)
    codec = CodecConfig(
        block_length=args.block_length, rate_margin=args.delta, seed=args.seed
    )
    document = {
        "scheme": scheme.name,
        "mode": args.mode,
        "L": args.message_length,
        "trials": args.trials,
        "seed": args.seed,
    }
    rate = measure_rate(
        scheme,
        mode=args.mode,
        L=args.message_length if args.mode == "concrete" else None,
        trials=args.trials,
        seed=args.seed,
    )
    document["rate"] = rate
    errors = 0
    if args.mode == "concrete" and scheme.name.startswith("multiround") and "replicated" not in scheme.name:
        sessions = []
        for trial in range(args.trials):
            run = concrete_multiround_download(
                scheme, theta=1, L=args.message_length,
                seed=derive_seed(args.seed, "simulate", trial),
            )
            errors += run["decode_errors"]
            sessions.append(run)
        document["sessions"] = sessions
        document["sw"] = sw_failure_rate(codec, blocks=args.sw_blocks, seed=args.seed)
    else:
        correctness = exhaustive_correctness(scheme)
        errors = correctness["errors"]
        document["correctness"] = correctness
        document["expected_symbol_download"] = expected_symbol_download(scheme)
    document["decode_errors"] = errors
    document["pass"] = errors == 0
    _emit(_jsonify(document))
    return 0 if errors == 0 else 1


def cmd_audit(args) -> int:
    scheme = _scheme_from_args(args)
    codec = CodecConfig(
        block_length=args.block_length, rate_margin=args.delta, seed=args.seed
    )
    report = build_audit_report(
        scheme,
        mode=args.mode,
        L=args.message_length,
        trials=args.trials,
        seed=args.seed,
        codec=codec,
        sw_blocks=args.sw_blocks,
    )
    _emit(report.to_json_dict())
    return 0 if report.passed else 1


def cmd_reproduce(args) -> int:
    codec = CodecConfig(
        block_length=args.block_length, rate_margin=args.delta, seed=args.seed
    )
    document = reproduce_mod.reproduce_all(
        mode=args.mode, seed=args.seed, codec=codec
    )
    _emit(_jsonify(document))
    return 0 if document["pass"] else 1


def _add_run_flags(parser, default_L: int) -> None:
    parser.add_argument(
        "--scheme", choices=("multiround", "linear", "replicated"), default="multiround"
    )
    parser.add_argument("--mode", choices=("ideal", "concrete"), default="ideal")
    parser.add_argument("-L", "--message-length", type=int, default=default_L)
    parser.add_argument("--trials", type=int, default=5)
    parser.add_argument("--seed", type=int, default=_default_seed())
    parser.add_argument(
        "--bias", default="1/2", help="per-bit probability of 1 in each message, e.g. 3/4"
    )
    parser.add_argument(
        "--storage", choices=("split", "replicated"), default="split",
        help="multiround storage layout; 'replicated' is the privacy-breaking variant",
    )
    parser.add_argument("--block-length", type=int, default=16, help="binning block length")
    parser.add_argument("--delta", type=float, default=0.15, help="binning rate margin, bits/symbol")
    parser.add_argument("--sw-blocks", type=int, default=1000, help="blocks for the bin failure estimate")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pirlab",
        description="Two-database private information retrieval laboratory",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_cap = sub.add_parser("capacity", help="evaluate the retrieval capacity formula")
    p_cap.add_argument("-K", type=int, required=True, help="number of messages")
    p_cap.add_argument("-N", type=int, required=True, help="number of databases")
    p_cap.add_argument("-T", type=int, default=1, help="collusion threshold")
    p_cap.set_defaults(func=cmd_capacity)

    p_sim = sub.add_parser("simulate", help="run sessions and report download/rate")
    _add_run_flags(p_sim, default_L=1000)
    p_sim.set_defaults(func=cmd_simulate)

    p_audit = sub.add_parser("audit", help="full privacy/rate/overhead audit of a scheme")
    _add_run_flags(p_audit, default_L=2000)
    p_audit.set_defaults(func=cmd_audit)

    p_rep = sub.add_parser("reproduce", help="run every acceptance measurement")
    p_rep.add_argument("--mode", choices=("ideal", "full"), default="full")
    p_rep.add_argument("--seed", type=int, default=_default_seed())
    p_rep.add_argument("--block-length", type=int, default=16)
    p_rep.add_argument("--delta", type=float, default=0.15)
    p_rep.set_defaults(func=cmd_reproduce)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
