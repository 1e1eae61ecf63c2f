"""Command-line interface.

Subcommands: build, mutate, transform, energy, bench.  Exit codes follow
one contract everywhere: 0 success, 1 domain failure (parse error, clash,
optimization failure), 2 usage error.  Every run either writes its
machine-readable report or prints a located error to stderr, and no
output files are produced on usage errors.
"""

from __future__ import annotations

import argparse
import json
import secrets
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .benchmarks import SUITES, default_bench_config, run_benchmark
from .builder import FibrilSpec, build_fibril_model, apply_sequence, validate_sequence
from .energy import HBParams, LJParams, structure_energy_report, ContactPair
from .errors import StericZipError
from .geometry import RigidTransform, transform_chain
from .pdbio import AtomSelector, parse_pdb, select_atom, write_pdb
from .template import DEFAULT_ANCHOR_SELECTORS, DEFAULT_FREE_SELECTORS, TEMPLATE_CONTACT_SIGMA

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _fail(message: str) -> int:
    print(f"stericzip: error: {message}", file=sys.stderr)
    return EXIT_FAILURE


def _usage(message: str) -> int:
    print(f"stericzip: usage error: {message}", file=sys.stderr)
    return EXIT_USAGE


def _resolve_seed(seed: int | None) -> int:
    return secrets.randbits(32) if seed is None else seed


def _read_structure(path: str):
    return parse_pdb(Path(path).read_text())


def _cmd_build(args) -> int:
    try:
        sequence = validate_sequence(args.sequence)
    except StericZipError as exc:
        return _usage(str(exc))
    if args.sigma is not None and args.sigma <= 0:
        return _usage("--sigma must be positive")
    if args.epsilon is not None and args.epsilon <= 0:
        return _usage("--epsilon must be positive")

    seed = _resolve_seed(args.seed)
    try:
        template = _read_structure(args.template)
        if args.spec:
            spec = FibrilSpec.from_json(Path(args.spec).read_text(), sequence=sequence)
        else:
            spec = FibrilSpec(sequence=sequence)
        lj = LJParams(
            args.epsilon if args.epsilon is not None else spec.lj.epsilon,
            args.sigma if args.sigma is not None else spec.lj.sigma,
        )
        spec = replace(
            spec,
            model_name=args.model_name,
            lj=lj,
            full_sum=args.full_sum or spec.full_sum,
            optimizer=replace(spec.optimizer, seed=seed),
        )
        model, report = build_fibril_model(template, spec)
    except (StericZipError, OSError) as exc:
        return _fail(str(exc))

    out = Path(args.out)
    report_path = Path(f"{args.out}.report.json")
    payload = report.to_dict()
    payload["seed"] = seed
    out.write_text(write_pdb(model))
    report_path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out} and {report_path}")
    if not report.success:
        print("stericzip: build completed with clashes; see report", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


def _cmd_mutate(args) -> int:
    try:
        sequence = validate_sequence(args.sequence)
    except StericZipError as exc:
        return _usage(str(exc))
    try:
        structure = _read_structure(args.infile)
        mutated = apply_sequence(structure, args.chain, sequence)
    except (StericZipError, OSError) as exc:
        return _fail(str(exc))
    Path(args.out).write_text(write_pdb(mutated))
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_transform(args) -> int:
    try:
        transform = RigidTransform(
            np.asarray(args.matrix, dtype=float).reshape(3, 3),
            np.asarray(args.translate, dtype=float),
        )
    except StericZipError as exc:
        return _usage(str(exc))
    try:
        structure = _read_structure(args.infile)
        result = transform_chain(structure, args.chain, transform, args.new_chain)
    except (StericZipError, OSError) as exc:
        return _fail(str(exc))
    Path(args.out).write_text(write_pdb(result))
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_energy(args) -> int:
    try:
        structure = _read_structure(args.infile)
        lj = LJParams(args.epsilon, args.sigma)
        hb = HBParams(args.hb_c, args.hb_d)
        contacts = []
        for first, second in zip(DEFAULT_ANCHOR_SELECTORS, DEFAULT_FREE_SELECTORS):
            try:
                pair = ContactPair(AtomSelector.parse(first), AtomSelector.parse(second), lj)
                select_atom(structure, pair.first)
                select_atom(structure, pair.second)
                contacts.append(pair)
            except StericZipError:
                continue  # contact atoms absent in this structure
        report = structure_energy_report(structure, lj=lj, hb=hb, contacts=contacts)
    except (StericZipError, OSError) as exc:
        return _fail(str(exc))
    Path(args.report).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    print(f"wrote {args.report}")
    return EXIT_OK


def _cmd_bench(args) -> int:
    if args.suite not in SUITES:
        return _usage(f"unknown suite {args.suite!r}; available: {sorted(SUITES)}")
    if args.runs < 1:
        return _usage("--runs must be >= 1")
    try:
        dims = tuple(int(d) for d in args.dims.split(","))
        if any(d < 1 for d in dims):
            raise ValueError
    except ValueError:
        return _usage(f"bad --dims {args.dims!r}; expected comma-separated positive integers")

    seed = _resolve_seed(args.seed)
    config = default_bench_config(args.budget)
    report = run_benchmark(args.suite, dims=dims, runs=args.runs, config=config, seed=seed)
    Path(args.report).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    for cell in report["cells"]:
        status = "pass" if cell["passed"] else "FAIL"
        print(
            f"{status}  {cell['problem']:>14} n={cell['dim']:<3} "
            f"rate={cell['success_rate']:.2f} (need {cell['success_threshold']:.2f}) "
            f"best={cell['best']:.3e} median_evals={cell['median_evals']:.0f}"
        )
    print(f"wrote {args.report}")
    return EXIT_OK if report["all_passed"] else EXIT_FAILURE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stericzip",
        description="Build and analyze steric-zipper fibril models from a two-chain template.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="run the full mutation/placement/replication pipeline")
    p.add_argument("--template", required=True, help="template PDB path (chains A and B)")
    p.add_argument("--sequence", required=True, help="six-letter Ala/Gly sequence, e.g. GAAAAG")
    p.add_argument("--out", required=True, help="output model PDB path")
    p.add_argument("--seed", type=int, default=None, help="optimizer seed (generated when absent)")
    p.add_argument("--sigma", type=float, default=None, help=f"contact sigma in A (default {TEMPLATE_CONTACT_SIGMA})")
    p.add_argument("--epsilon", type=float, default=None, help="contact well depth (default 1.0)")
    p.add_argument("--full-sum", action="store_true", help="include anchor-anchor and free-free terms")
    p.add_argument("--spec", default=None, help="JSON file with FibrilSpec overrides")
    p.add_argument("--model-name", default="model", help="name recorded in the report")
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("mutate", help="mutate one six-residue chain and renumber it 1-6")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--chain", required=True)
    p.add_argument("--sequence", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_mutate)

    p = sub.add_parser("transform", help="add a rigid-transformed copy of a chain")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--chain", required=True)
    p.add_argument("--new-chain", required=True)
    p.add_argument("--matrix", type=float, nargs=9, required=True, help="row-major 3x3 rotation")
    p.add_argument("--translate", type=float, nargs=3, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_transform)

    p = sub.add_parser("energy", help="hydrogen-bond, clash, and contact-energy report")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--sigma", type=float, default=4.0)
    p.add_argument("--epsilon", type=float, default=1.0)
    p.add_argument("--hb-c", type=float, default=1769127.6, help="10-12 repulsion coefficient")
    p.add_argument("--hb-d", type=float, default=252432.0, help="10-12 attraction coefficient")
    p.add_argument("--report", required=True)
    p.set_defaults(func=_cmd_energy)

    p = sub.add_parser("bench", help="seeded optimizer benchmark table")
    p.add_argument("--suite", default="classic")
    p.add_argument("--dims", default="2,5,10")
    p.add_argument("--runs", type=int, default=30)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--budget", type=int, default=200_000, help="max evaluations per run")
    p.add_argument("--report", required=True)
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
