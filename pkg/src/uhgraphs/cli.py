"""Command-line front end.

Exit codes: 0 success or verdict true, 1 verdict false, 2 error,
3 classification alarm.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .autiso import AUT_BUDGET, UH_BUDGET, automorphism_group, is_ultrahomogeneous
from .ccd import Ccd, induced_subgraph
from .classifier import (
    ClassificationCertificate,
    NotUh,
    OutOfScope,
    classify,
    verify_bichromatic,
    verify_extension_equivalence,
    verify_lachlan,
)
from .equivalence import equivalent_up_to_colors
from .errors import BudgetExceeded, ClassificationViolation
from .families import SpecError, gen, parse_spec
from .perm import PermGroup, all_block_systems, fmt_perm, induced_action, recognize
from .theory import CONDITION_NAMES, check_general_extension

EXIT_OK, EXIT_FALSE, EXIT_ERROR, EXIT_ALARM = 0, 1, 2, 3


class CliError(Exception):
    pass


def read_graph(path: str) -> Ccd:
    """Load a graph from JSON or DOT; ``-`` reads standard input."""
    try:
        text = sys.stdin.read() if path == "-" else open(path).read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from exc
    if path.endswith(".dot") or text.lstrip().startswith("digraph"):
        try:
            return Ccd.from_dot(text)
        except ValueError as exc:
            raise CliError(f"{path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    try:
        return Ccd.from_json(data)
    except ValueError as exc:
        raise CliError(f"{path}: {exc}") from exc


def emit(obj: dict, fmt: str, summary: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")
    else:
        out.write(summary.rstrip("\n") + "\n")


def _budget(args, default):
    if args.budget is None:
        return default
    return args.budget if args.budget > 0 else None


# ---------------------------------------------------------------------------
# subcommands


def cmd_check(args, out) -> int:
    g = read_graph(args.graph)
    v = is_ultrahomogeneous(g, budget=_budget(args, UH_BUDGET))
    if v.is_uh:
        summary = f"ultrahomogeneous (|Aut| = {v.aut.order()})"
    else:
        w = v.witness
        pairs = ", ".join(f"{x}->{y}" for x, y in zip(w.domain, w.images))
        summary = f"not ultrahomogeneous: partial isomorphism {{{pairs}}} does not extend (vertex {v.stuck_vertex} has no image)"
    emit(v.to_json(), args.format, summary, out)
    return EXIT_OK if v.is_uh else EXIT_FALSE


def cmd_aut(args, out) -> int:
    g = read_graph(args.graph)
    A = automorphism_group(g, budget=_budget(args, AUT_BUDGET))
    classes = []
    lines = [f"|Aut| = {A.order()}", "generators: " + (", ".join(fmt_perm(p) for p in A.generators) or "none")]
    for col, R in enumerate(g.color_classes()):
        pos = {v: i for i, v in enumerate(R)}
        restricted = [tuple(pos[p[v]] for v in R) for p in A.generators]
        G = PermGroup(len(R), restricted)
        entry = {"color": col, "class": list(R), "transitive": G.is_transitive(), "block_systems": []}
        if G.is_transitive() and len(R) > 1:
            for bs in all_block_systems(G):
                if bs.is_trivial():
                    continue
                top, _ = induced_action(G, bs)
                entry["block_systems"].append(
                    {
                        "blocks": [[R[x] for x in b] for b in bs.blocks],
                        "induced_order": top.order(),
                        "induced_group": recognize(top),
                    }
                )
        classes.append(entry)
        lines.append(f"class {col} ({len(R)} vertices): {'transitive' if entry['transitive'] else 'intransitive'}")
        for e in entry["block_systems"]:
            lines.append(f"  blocks {e['blocks']}: induced action of order {e['induced_order']} ({e['induced_group']})")
    obj = {"aut": A.to_json(), "classes": classes}
    emit(obj, args.format, "\n".join(lines), out)
    return EXIT_OK


def cmd_extend(args, out) -> int:
    g = read_graph(args.graph)
    classes = g.color_classes()
    for c in (args.red, args.blue):
        if not 0 <= c < len(classes):
            raise CliError(f"no vertex color {c}; colors are 0..{len(classes) - 1}")
    if args.red == args.blue:
        raise CliError("--red and --blue must name different colors")
    sub, verts = induced_subgraph(g, classes[args.red] + classes[args.blue])
    nred = len(classes[args.red])
    rep = check_general_extension(sub, range(nred), range(nred, sub.n))
    obj = rep.to_json()
    obj["vertices"] = list(verts)
    lines = [f"{'holds' if rep.holds else 'fails'} (local vertex i is input vertex vertices[i])"]
    for name, val in zip(CONDITION_NAMES, rep.conditions):
        lines.append(f"  [{'x' if val else ' '}] {name}")
    emit(obj, args.format, "\n".join(lines), out)
    return EXIT_OK if rep.holds else EXIT_FALSE


def cmd_gen(args, out) -> int:
    try:
        g = gen(parse_spec(args.spec))
    except SpecError as exc:
        raise CliError(str(exc)) from exc
    if args.format == "dot":
        out.write(g.to_dot())
    elif args.format == "summary":
        out.write(f"{args.spec}: {g.n} vertices, {g.num_vertex_colors} vertex colors\n")
    else:
        out.write(g.dumps() + "\n")
    return EXIT_OK


def cmd_classify(args, out) -> int:
    g = read_graph(args.graph)
    try:
        res = classify(g, budget=_budget(args, UH_BUDGET))
    except ClassificationViolation as exc:
        emit({"outcome": "classification-violation", "message": str(exc), "graph": exc.canonical}, args.format,
             f"ALARM: {exc}", out)
        return EXIT_ALARM
    if isinstance(res, ClassificationCertificate):
        lines = [f"classified as {res.spec}"]
        for cols, s in res.components:
            lines.append(f"  colors {list(cols)}: {s}")
        lines.append(f"  witness replays exactly: {res.verify(g)}")
        emit(res.to_json(), args.format, "\n".join(lines), out)
        return EXIT_OK
    if isinstance(res, NotUh):
        emit(res.to_json(), args.format, f"not ultrahomogeneous: {res.witness.to_json()} does not extend", out)
        return EXIT_FALSE
    assert isinstance(res, OutOfScope)
    emit(res.to_json(), args.format, f"out of scope: {res.reason}", out)
    return EXIT_ERROR


def cmd_verify(args, out) -> int:
    if args.what == "lachlan":
        rep = verify_lachlan(args.max_n, jobs=args.jobs, checkpoint=args.resume)
    elif args.what == "bichromatic":
        rep = verify_bichromatic(args.max_total, jobs=args.jobs)
    else:
        rep = verify_extension_equivalence(seed=args.seed, random_count=args.count, jobs=args.jobs)
    emit(rep.to_json(timing=args.timing), args.format, rep.summary(), out)
    return EXIT_OK if rep.ok else EXIT_ALARM


def cmd_equiv(args, out) -> int:
    a, b = read_graph(args.a), read_graph(args.b)
    w = equivalent_up_to_colors(a, b)
    if w is None:
        emit({"equivalent": False}, args.format, "not equivalent", out)
        return EXIT_FALSE
    emit({"equivalent": True, "witness": w.to_json()}, args.format, f"equivalent via {list(w.iso)}", out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "dot", "summary"), default="json")
    common.add_argument("--budget", type=int, default=None, help="vertex cap for exact searches (0 = no cap)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for enumerations")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized corpora")

    p = argparse.ArgumentParser(prog="uhgraphs", description="Ultrahomogeneous vertex-colored oriented graphs.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check", parents=[common], help="decide ultrahomogeneity")
    s.add_argument("graph")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("aut", parents=[common], help="automorphism group and block systems")
    s.add_argument("graph")
    s.set_defaults(func=cmd_aut)

    s = sub.add_parser("extend", parents=[common], help="extension conditions for two classes")
    s.add_argument("graph")
    s.add_argument("--red", type=int, required=True)
    s.add_argument("--blue", type=int, required=True)
    s.set_defaults(func=cmd_extend)

    s = sub.add_parser("gen", parents=[common], help="realize a family spec")
    s.add_argument("spec")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("classify", parents=[common], help="classification certificate")
    s.add_argument("graph")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("verify", help="exhaustive verification runs")
    vsub = s.add_subparsers(dest="what", required=True)
    v = vsub.add_parser("lachlan", parents=[common])
    v.add_argument("--max-n", type=int, required=True)
    v.add_argument("--resume", metavar="FILE", help="checkpoint file to resume from and update")
    v = vsub.add_parser("bichromatic", parents=[common])
    v.add_argument("--max-total", type=int, required=True)
    v = vsub.add_parser("extension", parents=[common])
    v.add_argument("--count", type=int, default=500, help="number of random corpus members")
    for v in vsub.choices.values():
        v.add_argument("--timing", action="store_true", help="include wall time in JSON output")
        v.set_defaults(func=cmd_verify)

    s = sub.add_parser("equiv", parents=[common], help="equivalence up to color changes")
    s.add_argument("a")
    s.add_argument("b")
    s.set_defaults(func=cmd_equiv)
    return p


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    try:
        return args.func(args, out)
    except (CliError, BudgetExceeded, ValueError) as exc:
        err.write(f"error: {exc}\n")
    return EXIT_ERROR


def main() -> None:
    sys.exit(run())
