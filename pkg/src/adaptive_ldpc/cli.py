"""Command-line entry point: ``python -m adaptive_ldpc <command> ...``."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from . import analytics
from .formats import read_alist, read_shift_table, write_alist, write_shift_table
from .harness import load_campaign, run_campaign, summarize
from .optimizer import CgaParams, construct
from .protograph import CodeSpec, as_fraction
from .tanner import girth_of_matrix, qc_girth


def _floats(tokens):
    return [float(x) for tok in tokens for x in tok.split(",") if x]


def _ints(tokens):
    return [int(x) for tok in tokens for x in tok.split(",") if x]


def _cmd_construct(args) -> int:
    spec = CodeSpec(args.n, as_fraction(args.rate), args.seed, args.girth_target)
    params = CgaParams(
        virtual_population=args.population,
        max_evaluations=args.max_evaluations,
        restarts=args.restarts,
        girth_cap=args.girth_cap,
        init_perturbation=args.init_perturbation,
    )
    code = construct(spec, params)
    prefix = Path(args.out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    write_shift_table(prefix.with_name(prefix.name + ".shifts"), code)
    write_alist(prefix.with_name(prefix.name + ".alist"), code.H)
    with prefix.with_name(prefix.name + "_log.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["eval_index", "girth", "multiplicity", "best_so_far"])
        for idx, g, m, best in code.meta["log"]:
            w.writerow([idx, g, m, f"{best.girth}:{-best.neg_multiplicity}"])
    fit = code.meta["fitness"]
    print(
        f"v={code.v} N_tx={code.N_tx} K={code.K} rate={code.rate} "
        f"girth={fit.girth} shortest_cycles={-fit.neg_multiplicity}"
    )
    return 0


def _cmd_girth(args) -> int:
    if args.shifts:
        code = read_shift_table(args.shifts)
        report = girth_of_matrix(code.H) if code.truncated else qc_girth(code, args.max_len)
    else:
        report = girth_of_matrix(read_alist(args.alist))
    print("girth,multiplicity,elapsed")
    print(f"{report},{report.multiplicity},{report.elapsed:.6f}")
    return 0


def _cmd_simulate(args) -> int:
    campaign = load_campaign(args.config)
    records = run_campaign(campaign)
    print(summarize(records))
    return 0


def _cmd_analytic(args) -> int:
    print("M,ebn0_db,ber")
    for M in _ints(args.m_list):
        for e in _floats(args.ebn0_list):
            print(f"{M},{e},{float(analytics.uncoded_dtb_ber(M, e)):.6e}")
    return 0


def _cmd_min_nodes(args) -> int:
    print(analytics.min_nodes(args.ebn0, args.target_ber, strict=args.strict))
    return 0


def _cmd_siso(args) -> int:
    print("ebn0_db,ber")
    for e in _floats(args.ebn0_list):
        print(f"{e},{float(analytics.siso_rayleigh_ber(e)):.6e}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adaptive-ldpc", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a keyed QC protograph code")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rate", required=True, help="e.g. 1/2 or 0.55")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--girth-target", type=int)
    p.add_argument("--out-prefix", default="code")
    defaults = CgaParams()
    p.add_argument("--population", type=int, default=defaults.virtual_population)
    p.add_argument("--max-evaluations", type=int, default=defaults.max_evaluations)
    p.add_argument("--restarts", type=int, default=defaults.restarts)
    p.add_argument("--girth-cap", type=int, default=defaults.girth_cap)
    p.add_argument("--init-perturbation", type=float, default=0.0)
    p.set_defaults(func=_cmd_construct)

    p = sub.add_parser("girth", help="girth of a stored parity-check matrix")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--alist")
    src.add_argument("--shifts")
    p.add_argument("--max-len", type=int, default=12)
    p.set_defaults(func=_cmd_girth)

    p = sub.add_parser("simulate", help="run a BER campaign file")
    p.add_argument("--config", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("analytic", help="asymptotic uncoded DTB BER table")
    p.add_argument("--m-list", nargs="+", required=True)
    p.add_argument("--ebn0-list", nargs="+", required=True)
    p.set_defaults(func=_cmd_analytic)

    p = sub.add_parser("min-nodes", help="nodes needed for a target BER")
    p.add_argument("--ebn0", type=float, required=True)
    p.add_argument("--target-ber", type=float, required=True)
    p.add_argument("--strict", action="store_true", help="smallest M meeting the target")
    p.set_defaults(func=_cmd_min_nodes)

    p = sub.add_parser("siso", help="closed-form SISO Rayleigh BER table")
    p.add_argument("--ebn0-list", nargs="+", required=True)
    p.set_defaults(func=_cmd_siso)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except Exception as exc:  # runtime failures map to exit code 1
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
