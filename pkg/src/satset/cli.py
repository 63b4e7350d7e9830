"""Command line: ``satset construct | verify | bounds | lift``.

Exit codes: 0 success, 2 bad input or failed precondition, 3 verification
mismatch, 4 infeasible instance.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from satset import __version__, bounds, lift, matrixfile
from satset.construction import ConstructionConfig, MaxStepsExceeded, run
from satset.field import NotPrimePowerError
from satset.geometry import SpaceTooLargeError
from satset.verify import ParityCheckMatrix, certify, default_threads

EXIT_OK, EXIT_INPUT, EXIT_MISMATCH, EXIT_INFEASIBLE = 0, 2, 3, 4
SCHEMA = 1


def _threads(args) -> int:
    return max(1, args.threads) if args.threads is not None else default_threads()


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _err(msg: str) -> None:
    print(f"satset: error: {msg}", file=sys.stderr)


def cmd_construct(args) -> int:
    try:
        cfg = ConstructionConfig(
            R=args.R,
            q=args.q,
            leading_strategy=args.leading,
            tail_strategy=args.tail,
            hyperplane_strategy=args.hyperplane,
            seed=args.seed,
            max_steps=args.max_steps,
            check_invariants=args.check_invariants,
        )
    except (ValueError, NotPrimePowerError) as exc:
        _err(str(exc))
        return EXIT_INPUT
    t0 = time.perf_counter()
    try:
        res = run(cfg)
    except (SpaceTooLargeError, MaxStepsExceeded) as exc:
        _err(f"infeasible instance: {exc}")
        return EXIT_INFEASIBLE
    H = ParityCheckMatrix.from_points(res.space, res.points)
    cert = certify(H, threads=_threads(args), distance=not args.no_distance)
    wall = time.perf_counter() - t0

    prefix = Path(args.out or f"satset_R{cfg.R}_q{cfg.q}")
    pchk, record = prefix.with_suffix(".pchk"), prefix.with_suffix(".json")
    matrixfile.write(pchk, H, [f"satset {__version__} construct R={cfg.R} q={cfg.q}", f"n={res.n}"])
    bound_t1 = float(bounds.length_bound(cfg.q, cfg.R, 1))
    rec = {
        "schema": SCHEMA,
        "tool": "satset",
        "version": __version__,
        "config": {k: v for k, v in vars(cfg).items()},
        "result": {k: v for k, v in res.to_dict().items() if k != "trace"},
        "certificate": cert.to_dict(),
        "trace": [vars(t) for t in res.trace],
        "monitoring": {"n": res.n, "length_bound_t1": bound_t1, "n_within_bound": res.n <= bound_t1},
        "wall_time_s": round(wall, 3),
    }
    record.write_text(_dump(rec) + "\n")
    print(
        f"n={res.n} phase={res.phase_completed} level={cert.is_saturating_at} "
        f"radius={cert.covering_radius} d={cert.min_distance} amds={cert.is_AMDS} -> {pchk}"
    )
    if res.violations:
        _err(f"{len(res.violations)} invariant violations; first: {res.violations[0]}")
        return EXIT_MISMATCH
    if cert.is_saturating_at != cfg.R - 1 or cert.covering_radius != cfg.R:
        _err(
            f"set is {cert.is_saturating_at}-saturating (covering radius {cert.covering_radius}), "
            f"expected {cfg.R - 1} and {cfg.R}"
        )
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        H = matrixfile.read(args.matrix)
    except (OSError, ValueError) as exc:
        _err(f"{args.matrix}: {exc}")
        return EXIT_INPUT
    need_d = args.distance is not None or args.amds
    try:
        cert = certify(H, threads=_threads(args), distance=need_d or not args.no_distance)
    except ValueError as exc:
        _err(str(exc))
        return EXIT_INPUT
    print(_dump(cert.to_dict()))
    w = cert.witnesses
    failed = []
    if args.saturation_level is not None and cert.is_saturating_at != args.saturation_level:
        failed.append(
            f"saturation level {cert.is_saturating_at} != {args.saturation_level}"
            + (f"; point not covered one level lower: {w['uncovered_below_level']}" if "uncovered_below_level" in w else "")
        )
    if args.covering_radius is not None and cert.covering_radius != args.covering_radius:
        far = w["farthest_syndrome"]
        if cert.covering_radius > args.covering_radius:
            why = f"syndrome {far} needs {cert.covering_radius} columns"
        else:
            why = f"every syndrome is a sum of <= {cert.covering_radius} columns (farthest: {far})"
        failed.append(f"covering radius {cert.covering_radius} != {args.covering_radius}; {why}")
    if args.distance is not None and cert.min_distance != args.distance:
        failed.append(f"min distance {cert.min_distance} != {args.distance}; dependent columns {w['dependent_columns']}")
    if args.amds and not cert.is_AMDS:
        failed.append(f"not AMDS: d={cert.min_distance}, r={cert.r}; dependent columns {w['dependent_columns']}")
    for f in failed:
        _err(f"mismatch: {f}")
    return EXIT_MISMATCH if failed else EXIT_OK


def cmd_bounds(args) -> int:
    if args.table1:
        text = bounds.emit_table1()
    elif args.table2:
        text = bounds.emit_table2()
    else:
        if args.R is None:
            _err("--report needs --R")
            return EXIT_INPUT
        try:
            rep = bounds.report(args.R, args.q, args.t)
        except ValueError as exc:
            _err(str(exc))
            return EXIT_INPUT
        text = _dump({"schema": SCHEMA, **rep.to_dict()}) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_lift(args) -> int:
    if args.base:
        try:
            H = matrixfile.read(args.base)
        except (OSError, ValueError) as exc:
            _err(f"{args.base}: {exc}")
            return EXIT_INPUT
        n0, r0, q = H.n, H.r, H.q
        R = args.R if args.R is not None else r0 - 1
        radius = certify(H, threads=_threads(args), distance=False).covering_radius
        if radius != R:
            _err(f"base code has covering radius {radius}, not R={R}")
            return EXIT_MISMATCH
    else:
        if None in (args.n0, args.r0, args.q, args.R):
            _err("give --base FILE, or all of --n0 --r0 --q --R")
            return EXIT_INPUT
        n0, r0, q, R = args.n0, args.r0, args.q, args.R
    try:
        if args.m is not None:
            out = {"schema": SCHEMA, "entries": [lift.lift_params(n0, r0, q, R, args.m).to_dict()], "diagnostic": None}
        else:
            fam = lift.family(n0, r0, q, R, args.t_max)
            if fam.diagnostic:
                _err(fam.diagnostic)
                print(_dump({"schema": SCHEMA, **fam.to_dict()}))
                return EXIT_INPUT
            out = {"schema": SCHEMA, **fam.to_dict()}
    except ValueError as exc:
        _err(str(exc))
        return EXIT_INPUT
    print(_dump(out))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="satset", description="Small saturating sets in PG(R,q) and their covering codes.")
    p.add_argument("--version", action="version", version=f"satset {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: $SATSET_THREADS or 1)")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build an (R-1)-saturating set and its parity-check matrix")
    c.add_argument("--R", type=int, required=True)
    c.add_argument("--q", type=int, required=True)
    c.add_argument("--leading", choices=("argmax", "first_above_average"), default="argmax")
    c.add_argument("--tail", choices=("first_valid", "greedy"), default="first_valid")
    c.add_argument("--hyperplane", choices=("lexicographic", "seeded_random"), default="lexicographic")
    c.add_argument("--seed", type=int, default=None)
    c.add_argument("--max-steps", type=int, default=10_000)
    c.add_argument("--check-invariants", action="store_true")
    c.add_argument("--no-distance", action="store_true", help="skip the minimum-distance search")
    c.add_argument("--out", help="output prefix for .pchk and .json (default satset_R<R>_q<q>)")
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", help="certify a .pchk matrix by brute force")
    v.add_argument("matrix")
    v.add_argument("--saturation-level", type=int)
    v.add_argument("--covering-radius", type=int)
    v.add_argument("--distance", type=int)
    v.add_argument("--amds", action="store_true")
    v.add_argument("--no-distance", action="store_true")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bounds", help="constants, tables and length bounds")
    g = b.add_mutually_exclusive_group(required=True)
    g.add_argument("--table1", action="store_true")
    g.add_argument("--table2", action="store_true")
    g.add_argument("--report", action="store_true")
    b.add_argument("--R", type=int)
    b.add_argument("--q", type=int)
    b.add_argument("--t", type=int)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bounds)

    lf = sub.add_parser("lift", help="parameters of the q^m-concatenating lift")
    lf.add_argument("--base", help="base .pchk file (n0, r0 and q are read from it)")
    lf.add_argument("--n0", type=int)
    lf.add_argument("--r0", type=int)
    lf.add_argument("--q", type=int)
    lf.add_argument("--R", type=int)
    mg = lf.add_mutually_exclusive_group(required=True)
    mg.add_argument("--m", type=int)
    mg.add_argument("--t-max", type=int)
    lf.set_defaults(func=cmd_lift)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
