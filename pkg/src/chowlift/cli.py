"""Command-line front end.

Exit codes: 0 success, 1 other failure, 2 parse/usage error, 3 shape
mismatch (including mismatched catalog totals), 4 not rational, 5 invalid
instance, 6 not split, 7 not unimodular.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Sequence

from . import errors
from .document import Workspace, load_document
from .intmat import Matrix, factor_elementary, lift_sl, transvection_product
from .lifting import LiftReport, lift_integral, lift_padic_tower
from .motive import TateShape
from .render import render_parts, render_shape, twist_ruler
from .sampling import random_split_instance
from .severi_brauer import SBInstance, classify, verify_inequalities
from .shapes import enumerate_admissible

EXIT_CODES = {
    errors.DocumentError: 2,
    errors.ShapeMismatch: 3,
    errors.TotalMismatch: 3,
    errors.NotRational: 4,
    errors.InvalidInstance: 5,
    errors.RangeError: 5,
    errors.NotSplit: 6,
    errors.NotUnimodular: 7,
}


def exit_code_for(exc: BaseException) -> int:
    for cls in type(exc).__mro__:
        if cls in EXIT_CODES:
            return EXIT_CODES[cls]
    return 1


class Output:
    def __init__(self, path: str | None):
        self.path = path

    def print(self, text: str = "") -> None:
        print(text)

    def save(self, payload: object) -> None:
        if self.path:
            with open(self.path, "w", encoding="utf-8") as fh:
                if isinstance(payload, str):
                    fh.write(payload)
                else:
                    json.dump(payload, fh, indent=2, sort_keys=True)
                    fh.write("\n")


def _need_input(args) -> Workspace:
    if not args.input:
        raise errors.DocumentError("this command needs --input FILE")
    return load_document(args.input)


# ---------------------------------------------------------------------------
# lift


def _report_lines(name: str, report: LiftReport) -> list[str]:
    lines = [f"[{name}] outcome: {report.outcome}"]
    for entry in report.transcript:
        if "error" in entry:
            lines.append(f"  error: {entry['error']}: {entry['message']}")
        elif entry.get("step") == 3:
            lines.append(f"  step 3, twist {entry['twist']}: rank {entry['rank']}, det A = {entry['det']}, "
                         f"{len(entry['transvections'])} transvections")
        else:
            lines.append(f"  step {entry['step']}: {entry['action']}"
                         + (f" (modulo {entry['modulus']})" if "modulus" in entry else ""))
    if report.spec is not None:
        for i, s in enumerate(report.spec.shapes):
            lines.append(f"  part {i}: {s}")
        lines.append(render_parts(report.spec.shapes))
    return lines


def cmd_lift(args, out: Output) -> int:
    if args.selfcheck:
        rng = random.Random(args.seed)
        failures = 0
        for _ in range(args.selfcheck):
            inst = random_split_instance(rng, rng.choice([6, 12]))
            rep = lift_integral(inst.per_prime(), inst.space, inst.structure)
            if not rep.lifted or rep.spec.shapes != inst.decomposition.shapes:
                failures += 1
        out.print(f"round trip: {args.selfcheck - failures}/{args.selfcheck} lifted with matching shapes")
        return 0 if failures == 0 else 1

    ws = _need_input(args)
    space = ws.motive_space()
    structure = ws.rational_structure()
    names = [args.grouping] if args.grouping else sorted(ws.decompositions)
    if not names:
        raise errors.DocumentError("document has no decompositions to lift")
    payload = {}
    status = 0
    for name in names:
        ambient, per_prime = ws.decomposition(name)
        report = lift_integral(per_prime, space, structure, ambient)
        for line in _report_lines(name, report):
            out.print(line)
        entry = report.to_json()
        if args.precision and report.lifted:
            towers = {}
            for p, dec in sorted(per_prime.items()):
                tower = lift_padic_tower(dec, args.precision, ambient, structure)
                coherent = all(tower[i + 1].reduce(p ** (i + 1)).parts == tower[i].parts
                               for i in range(len(tower) - 1))
                out.print(f"  tower modulo {p}^{args.precision}: {'coherent' if coherent else 'INCOHERENT'}")
                towers[str(p)] = [lvl.to_json() for lvl in tower]
            entry["towers"] = towers
        payload[name] = entry
        if report.error is not None and status == 0:
            status = exit_code_for(report.error)
    out.save(payload)
    return status


# ---------------------------------------------------------------------------
# enumerate / render


def cmd_enumerate(args, out: Output) -> int:
    ws = _need_input(args)
    catalogs = ws.prime_catalogs()
    classes = enumerate_admissible(catalogs)
    total = catalogs[0].total
    out.print(f"primes: {', '.join(str(c.prime) for c in catalogs)}; total {total} ({len(total)} cells)")
    for i, P in enumerate(classes, 1):
        out.print(f"class {i}: {P}")
        out.print(render_parts(P.parts))
        out.print(twist_ruler(total))
    verdict = "holds" if len(classes) == 1 else "fails"
    out.print(f"{len(classes)} complete class{'es' if len(classes) != 1 else ''}")
    out.print(f"relative Krull-Schmidt: {verdict}")
    out.save({"classes": [[list(s.cells) for s in P.parts] for P in classes], "relative_ks": verdict})
    return 0


def cmd_render(args, out: Output) -> int:
    if args.shape is not None:
        cells = [int(x) for x in args.shape.replace(",", " ").split()] if args.shape.strip() else []
        text = render_shape(TateShape.of(cells))
        if text:
            out.print(text)
        out.save(text + "\n" if text else "")
        return 0
    ws = _need_input(args)
    blocks = []
    if args.partition:
        P = ws.partition(args.partition)
        blocks.append((f"partition {args.partition}: {P}", render_parts(P.parts), P.total))
    elif args.catalog is not None:
        cat = next((c for c in ws.prime_catalogs() if c.prime == args.catalog), None)
        if cat is None:
            raise errors.DocumentError(f"no catalog modulo {args.catalog}")
        shapes = [pl.shape for pl in cat.placements]
        blocks.append((f"catalog mod {cat.prime}: " + " + ".join(str(pl) for pl in cat.placements),
                       render_parts(shapes), cat.total))
    else:
        for name in sorted(ws.partitions):
            P = ws.partition(name)
            blocks.append((f"partition {name}: {P}", render_parts(P.parts), P.total))
        for cat in (ws.prime_catalogs() if ws.catalogs else []):
            blocks.append((f"catalog mod {cat.prime} total", render_shape(cat.total), cat.total))
    text = []
    for title, boxes, total in blocks:
        text += [title, boxes, twist_ruler(total)]
    for line in text:
        out.print(line)
    out.save("\n".join(text) + "\n")
    return 0


# ---------------------------------------------------------------------------
# classify-sb / factor


def cmd_classify_sb(args, out: Output) -> int:
    if args.sweep is not None:
        report = verify_inequalities(args.sweep)
        out.print(f"{len(report.violations)} violations ({report.points} points, m <= {report.bound})")
        for k, l, m in report.violations[:20]:
            out.print(f"  violated at k={k}, l={l}, m={m}")
        out.save({"bound": report.bound, "points": report.points, "violations": report.violations})
        return 0 if report.ok else 1
    if args.degree is not None or args.index is not None or args.k is not None:
        if None in (args.degree, args.index, args.k):
            raise errors.InvalidInstance("--degree, --index and --k go together")
        instances = [SBInstance.of(args.degree, args.index, args.k)]
    else:
        instances = _need_input(args).sb_instances()
        if not instances:
            raise errors.InvalidInstance("no instances given")
    results = []
    for inst in instances:
        c = classify(inst)
        a = inst.algebra
        out.print(f"SB({inst.k}, A) with deg A = {a.degree}, ind A = {a.index}: {c}")
        results.append({"degree": a.degree, "index": a.index, "k": inst.k,
                        "verdict": c.verdict.value, "reason": c.reason})
    out.save(results)
    return 0


def cmd_factor(args, out: Output) -> int:
    if args.rows:
        try:
            rows = json.loads(args.rows)
        except json.JSONDecodeError as exc:
            raise errors.DocumentError(f"--rows: {exc.msg}", exc.lineno, exc.colno) from None
        M = Matrix(rows, args.modulus)
    else:
        if not args.matrix:
            raise errors.DocumentError("give --rows or --matrix NAME with --input")
        M = _need_input(args).matrix(args.matrix)
        if args.modulus:
            M = M.lift().reduce(args.modulus)
    if not M.modulus:
        raise errors.InvalidInstance("factorization works over Z/m; give --modulus")
    ts = factor_elementary(M)
    lifted = lift_sl(M)
    assert transvection_product(ts, M.nrows, M.modulus) == M
    out.print(f"{len(ts)} transvections over Z/{M.modulus}:")
    for t in ts:
        out.print(f"  Id + {t.c} E[{t.i},{t.j}]")
    out.print(f"lift to SL_{M.nrows}(Z): {lifted.tolist()}")
    out.save({"modulus": M.modulus, "transvections": [[t.i, t.j, t.c] for t in ts], "lift": lifted.tolist()})
    return 0


# ---------------------------------------------------------------------------


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    # subcommands accept the same flags; SUPPRESS keeps them from resetting
    # values given before the subcommand name
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--input", "-i", metavar="FILE", default=d(None), help="workspace document (JSON)")
    parser.add_argument("--output", "-o", metavar="FILE", default=d(None), help="write a JSON report here")
    parser.add_argument("--precision", type=int, default=d(0), metavar="N",
                        help="also build p-adic towers up to p^N (lift)")
    parser.add_argument("--seed", type=int, default=d(0), help="seed for randomized self-checks")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)

    parser = argparse.ArgumentParser(prog="chowlift", description="Lift and classify motivic decompositions.")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lift", parents=[common], help="lift per-prime decompositions to Z")
    p.add_argument("--grouping", "-g", help="decomposition name (default: all)")
    p.add_argument("--selfcheck", type=int, default=0, metavar="N",
                   help="instead, run N random round trips")
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("enumerate", parents=[common], help="complete decompositions up to relative equivalence")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("render", parents=[common], help="draw shapes as boxes")
    p.add_argument("--partition", help="partition name from the document")
    p.add_argument("--catalog", type=int, metavar="P", help="catalog for prime P")
    p.add_argument("--shape", help="comma-separated twists, e.g. 0,1,1")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("classify-sb", parents=[common], help="decomposability of SB(k, A)")
    p.add_argument("--degree", type=int)
    p.add_argument("--index", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--sweep", type=int, metavar="M", help="check the dimension inequalities up to m <= M")
    p.set_defaults(func=cmd_classify_sb)

    p = sub.add_parser("factor", parents=[common], help="elementary factorization and SL lift")
    p.add_argument("--rows", help="matrix as JSON rows")
    p.add_argument("--matrix", help="projector/matrix name from the document")
    p.add_argument("--modulus", type=int, default=0)
    p.set_defaults(func=cmd_factor)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = Output(args.output)
    try:
        return args.func(args, out)
    except errors.ChowLiftError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
