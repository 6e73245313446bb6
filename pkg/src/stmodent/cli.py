"""Command line: algebra, ext, entropy, verify and accept subcommands.

Exit codes: 0 success, 1 certification or acceptance failure, 2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .algebra import (
    AlgebraError, builtin, check_invariants, from_spec, gorenstein_orientation, is_cocommutative,
    is_graded_commutative, poincare_series, to_spec,
)

OK, FAILED, INVALID = 0, 1, 2


class InputError(Exception):
    pass


def load_algebra(source: str):
    """builtin:NAME, a bare built-in name, or a path to an algebra spec JSON."""
    path = Path(source)
    if not source.startswith("builtin:") and path.suffix == ".json":
        try:
            doc = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise InputError(f"cannot read {source}: {e}") from None
        return from_spec(doc, name=doc.get("name") or path.stem)
    return builtin(source)


def _window(text: str | None):
    if not text:
        return None
    try:
        lo, hi = (int(x) for x in text.split(":"))
    except ValueError:
        raise InputError(f"window must be lo:hi, got {text!r}") from None
    if lo < 0 or hi <= lo:
        raise InputError(f"empty window {text!r}")
    return lo, hi


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ------------------------------------------------------------ commands

def cmd_algebra(args) -> int:
    a = load_algebra(args.source)
    bad = check_invariants(a)
    if bad:
        print("\n".join(bad), file=sys.stderr)
        return INVALID
    try:
        d, _ = gorenstein_orientation(a)
        frob = "yes"
    except AlgebraError as e:
        d, frob = None, f"no ({e})"
    has_co = a.comult is not None
    lines = [
        f"algebra {a.name or '?'} over F_{a.p}",
        f"dimension {a.dim}",
        f"poincare {' '.join(map(str, poincare_series(a)))}",
        f"gorenstein d={d}" if d is not None else "gorenstein d=none",
        f"frobenius {frob}",
        f"coproduct {'yes' if has_co else 'no'}",
        f"cocommutative {'yes' if has_co and is_cocommutative(a) else 'no'}",
        f"graded-commutative {'yes' if is_graded_commutative(a) else 'no'}",
    ]
    print("\n".join(lines))
    if args.export:
        Path(args.export).write_text(json.dumps(to_spec(a), indent=1, sort_keys=True) + "\n")
    return OK


def cmd_ext(args) -> int:
    from .homology import WindowError, ext_table
    a = load_algebra(args.source)
    try:
        tab = ext_table(a, args.smax, args.tmax, keep_columns=False)
    except WindowError as e:
        raise InputError(str(e)) from None
    if args.format == "json":
        text = json.dumps({"algebra": a.name, "s_max": args.smax, "t_max": args.tmax,
                           "entries": [list(r) for r in tab.rows()]}, indent=1) + "\n"
    else:
        text = tab.to_csv()
    _emit(text, args.out)
    if args.oracle:
        from .cobar import cobar_cohomology, compare_tables
        other = cobar_cohomology(a, args.smax, args.tmax)
        bad = compare_tables(tab, other, args.smax, args.tmax)
        for s, t, x, y in bad:
            print(f"disagreement at ({s},{t}): resolution {x}, cobar {y}", file=sys.stderr)
        print(f"oracle: {'agreement' if not bad else f'{len(bad)} disagreements'}", file=sys.stderr)
        if bad:
            return FAILED
    return OK


def _pyramid_from_file(path: str, a):
    from .certificates import pyramid_from_staircase, staircase_from_json
    from .entropy import build_tower, tower_to_pyramid
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read {path}: {e}") from None
    if "storeys" in doc:
        return tower_to_pyramid(build_tower(a, doc["storeys"]))
    return pyramid_from_staircase(staircase_from_json(doc), Path(path).stem)


def cmd_entropy(args) -> int:
    from .entropy import CertificationError
    from .report import EntropyConfig, estimate_entropy
    a = load_algebra(args.source)
    cfg = EntropyConfig(n_max=args.nmax, n_ext=args.next, window=_window(args.window))
    if args.pyramid:
        try:
            cfg.pyramids = [_pyramid_from_file(args.pyramid, a)]
        except CertificationError as e:
            print(f"pyramid fails certification: {e}", file=sys.stderr)
            return FAILED
    rep = estimate_entropy(a, cfg)
    print(rep.summary(), file=sys.stderr if not args.out else sys.stdout)
    _emit(rep.to_json() + "\n", args.out)
    for fl in rep.flags:
        if fl.startswith("upper bound unavailable") or fl.startswith("lower bound unavailable"):
            print(f"warning: partial report ({fl})", file=sys.stderr)
    return FAILED if any(fl.startswith("discrepancy") for fl in rep.flags) else OK


def cmd_verify(args) -> int:
    from .certificates import data_text, staircase_from_json
    from .entropy import CertificationError, verify_staircase
    from .modules import ModuleError, check_exact, map_from_spec, module_from_spec
    src = args.file
    try:
        if src.startswith("builtin:"):
            doc = json.loads(data_text(src[len("builtin:"):]))
        else:
            doc = json.loads(Path(src).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read {src}: {e}") from None
    try:
        if "segments" in doc:
            st = staircase_from_json(doc, certify=False)
            rep = verify_staircase(st, args.seed)
            print(f"{st.name or src}: {'PASS' if rep.ok else 'FAIL'}: {rep.summary()}")
            if rep.ok:
                print(f"r = {st.r}, t = {st.t}, height {st.height}")
            return OK if rep.ok else FAILED
        a = load_algebra(doc["algebra"]) if isinstance(doc.get("algebra"), str) else from_spec(doc["algebra"])
        mods = {k: module_from_spec(v, a) for k, v in doc["modules"].items()}
        maps = [map_from_spec(m, mods[m["source"]], mods[m["target"]]) for m in doc["sequence"]]
    except (KeyError, TypeError, ModuleError, CertificationError) as e:
        if isinstance(e, CertificationError):
            print(f"FAIL: {e}")
            return FAILED
        raise InputError(f"malformed file: {e}") from None
    for k, fm in enumerate(maps):
        bad = fm.problems()
        if bad:
            print(f"FAIL: map {k}: {bad[0]}")
            return FAILED
    rep = check_exact(maps, ends=not args.no_ends)
    print(f"{'PASS' if rep.exact else 'FAIL'}: {rep.summary()}")
    return OK if rep.exact else FAILED


def cmd_accept(args) -> int:
    from .acceptance import AcceptConfig, parse_only, results_json, run
    try:
        ids = parse_only(args.only)
    except ValueError as e:
        raise InputError(str(e)) from None
    cfg = AcceptConfig(n_ext=args.nmax or 120, seed=args.seed)
    results = run(ids, cfg, log=sys.stderr)
    for r in results:
        print(r.line())
    if args.out:
        Path(args.out).write_text(results_json(results, cfg))
    return OK if all(r.passed for r in results) else FAILED


# ------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the artifact here")
    common.add_argument("--jobs", type=int, default=1, help="accepted for compatibility; runs are sequential")
    common.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(prog="stmodent", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("algebra", parents=[common], help="validate and summarize an algebra")
    q.add_argument("source", nargs="?")
    q.add_argument("--algebra", dest="algebra_opt")
    q.add_argument("--export", help="write the canonical spec JSON")
    q.set_defaults(func=cmd_algebra)

    q = sub.add_parser("ext", parents=[common], help="Ext chart of k over the algebra")
    q.add_argument("source", nargs="?")
    q.add_argument("--algebra", dest="algebra_opt")
    q.add_argument("--smax", type=int, default=8)
    q.add_argument("--tmax", type=int, default=24)
    q.add_argument("--format", choices=["csv", "json"], default="csv")
    q.add_argument("--oracle", action="store_true", help="cross-check against the cobar complex")
    q.set_defaults(func=cmd_ext)

    q = sub.add_parser("entropy", parents=[common], help="entropy report for the twist functor")
    q.add_argument("source", nargs="?")
    q.add_argument("--algebra", dest="algebra_opt")
    q.add_argument("--nmax", type=int, default=500, help="range of the complexity bound")
    q.add_argument("--next", type=int, default=None, help="Ext window for the lower bound")
    q.add_argument("--window", help="growth-fit window lo:hi")
    q.add_argument("--pyramid", help="staircase or tower JSON to use instead of the shipped ones")
    q.add_argument("--format", choices=["json"], default="json")
    q.set_defaults(func=cmd_entropy)

    q = sub.add_parser("verify", parents=[common], help="certify a staircase or exact sequence file")
    q.add_argument("file", help="path, or builtin:a1_staircase / builtin:m_ladder")
    q.add_argument("--no-ends", action="store_true", help="do not require injective/surjective ends")
    q.set_defaults(func=cmd_verify)

    q = sub.add_parser("accept", parents=[common], help="run the acceptance suite")
    q.add_argument("--only", help="criteria ids, ranges or names (e.g. 1-3,growth)")
    q.add_argument("--nmax", type=int, default=None, help="reduced Ext window (widens tolerances)")
    q.set_defaults(func=cmd_accept)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return INVALID if e.code else OK
    if hasattr(args, "source"):
        args.source = args.algebra_opt or args.source
        if not args.source:
            print("error: no algebra given", file=sys.stderr)
            return INVALID
    try:
        return args.func(args)
    except (InputError, AlgebraError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return INVALID


if __name__ == "__main__":
    sys.exit(main())
