"""Command-line entry point.

Exit codes: 0 success or property holds, 1 property fails (or a game search
ran out of budget), 2 usage error, 3 malformed input file.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .algebra import FiniteAlgebra, MalformedInput, eval_discriminator_term
from .axioms import (AxiomProfile, check_diagonal, check_frame_conditions_2,
                     check_frame_conditions_3, check_profile, check_top_simple)
from .frame import RelevanceFrame, algebra_to_frame, frame_to_algebra

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INPUT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(args, text, data):
    if args.format == "json":
        print(json.dumps(data, ensure_ascii=False, indent=1))
    else:
        print(text)


def _load(path):
    from .io import load_structure

    if not os.path.exists(path):
        raise MalformedInput(f"{path}: no such file")
    return load_structure(path)


def _as_frame(obj):
    return obj if isinstance(obj, RelevanceFrame) else algebra_to_frame(obj)


def _as_algebra(obj):
    return obj if isinstance(obj, FiniteAlgebra) else frame_to_algebra(obj)


# ------------------------------------------------------------- commands


def cmd_check(args):
    obj = _load(args.file)
    if isinstance(obj, RelevanceFrame):
        prof = AxiomProfile.parse(args.profile)
        rep = check_frame_conditions_3(obj) if prof.phi3 else check_frame_conditions_2(obj)
    else:
        rep = check_profile(obj, AxiomProfile.parse(args.profile))
        if args.frame_conditions:
            F = algebra_to_frame(obj)
            rep.extend(check_frame_conditions_3(F))
    _emit(args, rep.format(), rep.to_dict())
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_to_frame(args):
    from .io import dump_frame, frame_to_json

    A = _load(args.file)
    if not isinstance(A, FiniteAlgebra):
        raise UsageError("to-frame expects an algebra file")
    F = algebra_to_frame(A)
    if args.output:
        dump_frame(F, args.output)
    doc = frame_to_json(F)
    _emit(args, f"{F.k} points, {len(doc['R'])} triples" + (f" -> {args.output}" if args.output else ""), doc)
    return EXIT_OK


def cmd_to_algebra(args):
    from .io import algebra_to_json, dump_algebra

    F = _load(args.file)
    if not isinstance(F, RelevanceFrame):
        raise UsageError("to-algebra expects a frame file")
    A = frame_to_algebra(F)
    if args.output:
        dump_algebra(A, args.output)
    _emit(args, f"{A.m} elements: {', '.join(A.names)}" + (f" -> {args.output}" if args.output else ""),
          algebra_to_json(A))
    return EXIT_OK


def cmd_game(args):
    from .games import EXISTS, INCONCLUSIVE, decide_gamma, literal_frame_game, solve_pebble_game

    if args.rounds is None and args.pebbles is None:
        raise UsageError("game needs --pebbles with --solve, or --rounds")
    obj = _load(args.file)
    if args.rounds is not None:
        if isinstance(obj, FiniteAlgebra):
            v = decide_gamma(obj, args.rounds, limit=args.limit)
            what = f"{args.rounds}-round algebra game"
        else:
            v = literal_frame_game(obj, args.rounds, limit=args.limit)
            what = f"{args.rounds}-round frame game"
    else:
        v = solve_pebble_game(_as_frame(obj), args.pebbles)
        what = f"{args.pebbles}-pebble game"
    if args.transcript:
        with open(args.transcript, "w", encoding="utf-8") as fh:
            json.dump(v.certificate, fh, ensure_ascii=False, indent=1)
    text = f"{what}: {v}"
    _emit(args, text, {"game": what, "winner": v.winner, "detail": v.detail, "stats": v.stats})
    if v.winner == INCONCLUSIVE:
        return EXIT_FAIL
    return EXIT_OK if v.winner == EXISTS else EXIT_FAIL


def cmd_enumerate(args):
    from .finder import EnumerationTask, count_algebras, enumerate_algebras, size_counts

    prof = AxiomProfile.parse(args.profile)
    task = EnumerationTask(args.size, prof, args.emit)
    threads = args.threads
    if args.emit:
        found = enumerate_algebras(task, threads=threads)
        counts = size_counts(found)
    else:
        counts = count_algebras(task, threads=threads)
    diag = None
    if not prof.diagonal:
        dprof = AxiomProfile(phi2=prof.phi2, phi3=prof.phi3, assoc=prof.assoc, diagonal=True)
        diag = sum(count_algebras(EnumerationTask(args.size, dprof), threads=threads).values())
    total = sum(counts.values())
    lines = [f"size {m}: {c}" for m, c in counts.items()]
    if diag is not None:
        lines.append(f"diagonal: {diag}")
    lines.append(f"total: {total}")
    _emit(args, "\n".join(lines), {"profile": str(prof), "max_size": args.size,
                                   "counts": counts, "diagonal": diag, "total": total})
    return EXIT_OK


def cmd_wk(args):
    from .io import algebra_to_json, dump_algebra, load_poset
    from .models import build_wk

    P = load_poset(args.poset)
    A = build_wk(P, name=args.name or f"wk({os.path.basename(args.poset)})")
    if args.emit:
        dump_algebra(A, args.emit)
    rep = check_profile(A, AxiomProfile(phi3=True, assoc=True))
    text = f"{A.m} elements: {', '.join(A.names)}\n{rep.format()}"
    _emit(args, text, {"algebra": algebra_to_json(A), "report": rep.to_dict()})
    return EXIT_OK


def cmd_verify_rep(args):
    from .io import load_representation
    from .models import verify_representation

    A, P, h = load_representation(args.map)
    rep = verify_representation(A, P, h)
    _emit(args, rep.format(), rep.to_dict())
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_catalog(args):
    from .catalog import catalog, write_catalog

    algs = catalog()
    rows = []
    for A in algs:
        rows.append({"name": A.name, "size": A.m, "diagonal": check_diagonal(A),
                     "top_simple": check_top_simple(A)})
    if args.emit:
        from .io import dump_algebra

        os.makedirs(args.emit, exist_ok=True)
        for A in algs:
            from .catalog import _file_name

            dump_algebra(A, os.path.join(args.emit, _file_name(A.name)))
    text = "\n".join(f"{r['name']:7s} {r['size']} elements"
                     f"{'  diagonal' if r['diagonal'] else ''}{'  top-simple' if r['top_simple'] else ''}"
                     for r in rows)
    _emit(args, text + f"\ntotal: {len(rows)}", {"entries": rows, "total": len(rows)})
    return EXIT_OK


def cmd_sigma(args):
    from .games import SigmaTooLarge, sigma
    from .terms import formula_size, holds, show

    try:
        f = sigma(args.n, limit=args.limit)
    except SigmaTooLarge as exc:
        raise UsageError(str(exc)) from exc
    text = show(f)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    data = {"n": args.n, "size": formula_size(f)}
    lines = [] if args.output else [text]
    code = EXIT_OK
    if args.eval:
        A = _as_algebra(_load(args.eval))
        truth = holds(A, f)
        data["holds"] = truth
        lines.append(f"sigma_{args.n} on {A.name or args.eval}: {'true' if truth else 'false'}")
        code = EXIT_OK if truth else EXIT_FAIL
    data["formula"] = None if args.output else text
    _emit(args, "\n".join(lines) or f"{formula_size(f)} symbols -> {args.output}", data)
    return code


def cmd_discriminator(args):
    A = _as_algebra(_load(args.file))
    bad = []
    for a in range(A.m):
        for b in range(A.m):
            for c in range(A.m):
                want = c if a == b else a
                got = eval_discriminator_term(A, a, b, c)
                if got != want:
                    bad.append({"a": A.names[a], "b": A.names[b], "c": A.names[c],
                                "got": A.names[got], "expected": A.names[want]})
    diag, simple = check_diagonal(A), check_top_simple(A)
    text = (f"diagonal: {diag}, top-simple: {simple}\n"
            f"discriminator: {'holds' if not bad else f'fails on {len(bad)} triples'}")
    if bad:
        w = bad[0]
        text += f"\n  first: d({w['a']},{w['b']},{w['c']}) = {w['got']}, expected {w['expected']}"
    _emit(args, text, {"diagonal": diag, "top_simple": simple, "holds": not bad, "failures": bad})
    return EXIT_OK if not bad else EXIT_FAIL


# --------------------------------------------------------------- parser


def build_parser():
    p = _Parser(prog="wkra", description="Finite weakening relation algebras and their frames.")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--threads", type=int, default=None)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("check", help="axioms of an algebra, frame conditions of a frame")
    s.add_argument("file")
    s.add_argument("--profile", default="wkra3")
    s.add_argument("--frame-conditions", action="store_true")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("to-frame")
    s.add_argument("file")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_to_frame)

    s = sub.add_parser("to-algebra")
    s.add_argument("file")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_to_algebra)

    s = sub.add_parser("game")
    s.add_argument("file")
    s.add_argument("--pebbles", type=int)
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--solve", action="store_true")
    mode.add_argument("--rounds", type=int)
    s.add_argument("--transcript")
    s.add_argument("--limit", type=int, default=200_000)
    s.set_defaults(func=cmd_game)

    s = sub.add_parser("enumerate")
    s.add_argument("--size", type=int, required=True)
    s.add_argument("--profile", default="base")
    s.add_argument("--emit")
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("wk")
    s.add_argument("--poset", required=True)
    s.add_argument("--emit")
    s.add_argument("--name")
    s.set_defaults(func=cmd_wk)

    s = sub.add_parser("verify-rep")
    s.add_argument("--map", required=True)
    s.set_defaults(func=cmd_verify_rep)

    s = sub.add_parser("catalog")
    s.add_argument("--emit")
    s.set_defaults(func=cmd_catalog)

    s = sub.add_parser("sigma")
    s.add_argument("n", type=int)
    s.add_argument("--limit", type=int, default=200_000)
    s.add_argument("--eval")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_sigma)

    s = sub.add_parser("discriminator")
    s.add_argument("file")
    s.set_defaults(func=cmd_discriminator)
    return p


def run(argv=None) -> int:
    from .finder import EnumerationBoundExceeded
    from .models import TooManyElements

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            raise UsageError("a subcommand is required")
        for name in ("pebbles", "rounds", "size", "n", "threads"):
            v = getattr(args, name, None)
            if v is not None and v < 0:
                raise UsageError(f"--{name} must be non-negative")
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (EnumerationBoundExceeded, TooManyElements, ValueError) as exc:
        if isinstance(exc, MalformedInput):
            print(f"malformed input: {exc}", file=sys.stderr)
            return EXIT_INPUT
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MalformedInput, OSError, KeyError, IndexError, TypeError) as exc:
        print(f"malformed input: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
