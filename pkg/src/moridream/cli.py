"""Command line interface: ``moridream <command> FILE ...``.

Exit codes: 0 success, 1 domain error, 2 input or parse error, 3 timeout.
"""

from __future__ import annotations

import argparse
import json
import signal
import sys
import warnings
from fractions import Fraction

from . import abgroup as ag
from . import coxdb
from .convexgeom import ConeError
from .gitfan import a_faces, chambers_within, git_fan
from .mds import DomainError, format_faces, graph_to_dot, graph_to_tikz
from .polyring import FormatError, HomogeneityError, PolynomialSyntaxError, ring_from_AP

EXIT_DOMAIN = 1
EXIT_INPUT = 2
EXIT_TIMEOUT = 3


class InputError(ValueError):
    pass


def _read_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc


def _load(args):
    data = _read_json(args.file)
    if not isinstance(data, dict):
        raise InputError(f"{args.file}: expected a JSON object")
    from .mds import ring_from_spacefile, create_mds

    try:
        R = ring_from_spacefile(data, check=not args.nocheck)
    except KeyError as exc:
        raise InputError(f"{args.file}: missing field {exc}") from exc
    a_faces(R, threads=args.threads)
    with warnings.catch_warnings():
        if args.strict:
            warnings.simplefilter("error")
        return create_mds(R, data.get("ample"), strict=args.strict)


def _num(x) -> str:
    if isinstance(x, Fraction) and x.denominator == 1:
        return str(x.numerator)
    return str(x)


def _jnum(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else str(x)
    return x


def _parse_face(text: str) -> tuple:
    t = text.strip().strip("{}[]()")
    try:
        return tuple(sorted(int(x) for x in t.replace(",", " ").split()))
    except ValueError as exc:
        raise InputError(f"bad face {text!r}: expected indices like 1,5,6") from exc


def _parse_class(text: str) -> tuple:
    t = text.strip().strip("[]()")
    try:
        return tuple(int(x) for x in t.replace(",", " ").split())
    except ValueError as exc:
        raise InputError(f"bad class {text!r}: expected integers like 1,0,2") from exc


def _bool(b: bool) -> str:
    return "true" if b else "false"


# commands ---------------------------------------------------------------
# each returns (display text, JSON-able object)


def cmd_show(X, args):
    return str(X), {"display": str(X), "dim": X.dim, "class_group": X.K.to_json(), "space": X.to_json()}


def cmd_pic(X, args):
    P = X.pic()
    fac = ag.factor_group(X.K, P)
    gens = [list(c) for c in P.canonical_form]
    text = f"{P.structure()}\ngenerators: {json.dumps(gens)}\nCl/Pic: {fac}"
    return text, {"structure": P.structure().to_json(), "generators": gens, "factor_group": fac.to_json()}


def cmd_localcl(X, args):
    G = X.local_class_group(_parse_face(args.face))
    return str(G), G.to_json()


def cmd_cones(X, args):
    C = {"eff": X.eff, "mov": X.mov, "sample": X.sample}[args.kind]()
    rays = "\n".join(json.dumps(list(v)) for v in C.rays)
    return str(C) + ("\n" + rays if rays else ""), C.to_json()


def cmd_chambers(X, args):
    G = git_fan(X.ring, threads=args.threads)
    if args.mov:
        from .convexgeom import Fan, fan_assemble

        inside = chambers_within(G, X.mov())
        F = fan_assemble(inside) if inside else Fan(X.K.rank, (), ())
    else:
        F = G.fan
    return str(F), F.to_json()


def cmd_gitfan(X, args):
    G = git_fan(X.ring, threads=args.threads)
    lines = [str(G)] + [json.dumps([list(v) for v in c.rays]) for c in G.chambers]
    return "\n".join(lines), G.to_json()


def cmd_sing(X, args):
    L = X.sing()
    text = str(L)
    out = {"strata": [list(F) for F in L.strata]}
    if args.generators:
        gens = [str(g) for g in L.ideal_generators()]
        text += "\n" + "\n".join(gens)
        out["generators"] = gens
    return text, out


def _flag(fn):
    def run(X, args):
        b = fn(X)
        return _bool(b), b

    return run


def cmd_gorenstein(X, args):
    i = X.gorenstein_index()
    return str(i), i


def cmd_anticanonical(X, args):
    K = X.anticanonical()
    return str(K), list(K.coords)


def cmd_intersect(X, args):
    classes = [_parse_class(c) for c in args.classes]
    v = X.intersection_number(classes)
    return _num(v), _jnum(v)


def cmd_selfint(X, args):
    v = X.self_intersections()
    return "[" + ", ".join(map(_num, v)) + "]", [_jnum(x) for x in v]


def cmd_graph(X, args):
    edges = X.intersection_graph()
    weights = [_num(x) for x in X.self_intersections()] if args.format != "edges" else None
    if args.format == "dot":
        text = graph_to_dot(edges, X.r, weights)
    elif args.format == "tikz":
        text = graph_to_tikz(edges, X.r, weights)
    else:
        text = format_faces(edges)
    return text, {"vertices": X.r, "edges": [list(e) for e in edges]}


def cmd_ambientfan(X, args):
    F = X.canonical_ambient_fan()
    return str(F), F.to_json()


def cmd_afaces(X, args):
    faces = a_faces(X.ring)
    return format_faces(faces), [list(F) for F in faces]


MDS_COMMANDS = {
    "show": cmd_show,
    "pic": cmd_pic,
    "localcl": cmd_localcl,
    "cones": cmd_cones,
    "chambers": cmd_chambers,
    "gitfan": cmd_gitfan,
    "sing": cmd_sing,
    "smooth": _flag(lambda X: X.is_smooth()),
    "quasismooth": _flag(lambda X: X.is_quasismooth()),
    "factorial": _flag(lambda X: X.is_factorial()),
    "qfactorial": _flag(lambda X: X.is_qfactorial()),
    "fano": _flag(lambda X: X.is_fano()),
    "gorenstein": cmd_gorenstein,
    "anticanonical": cmd_anticanonical,
    "intersect": cmd_intersect,
    "selfint": cmd_selfint,
    "graph": cmd_graph,
    "ambientfan": cmd_ambientfan,
    "afaces": cmd_afaces,
}


def cmd_ringfromap(args):
    data = _read_json(args.file)
    try:
        R = ring_from_AP(data["P"], data["A"])
    except (KeyError, TypeError) as exc:
        raise InputError(f"{args.file}: expected an object with matrices 'P' and 'A'") from exc
    K = R.K
    space = {
        "vars": R.r,
        "relations": [str(g) for g in R.relations],
        "grading": {"free_rank": K.rank, "torsion": list(K.torsion), "matrix": [list(row) for row in R.grading.matrix]},
        "ample": None,
    }
    lines = [str(R)] + space["relations"] + [json.dumps(row) for row in space["grading"]["matrix"]]
    return "\n".join(lines), space


def _record_text(rec) -> str:
    return f"{rec.id}\t{rec.name}\t[{', '.join(rec.tags)}]"


def cmd_db(args):
    db = coxdb.open_db(args.db)
    if args.db_command == "search":
        recs = db.search(" ".join(args.query))
        return "\n".join(_record_text(r) for r in recs), [r.to_json() for r in recs]
    if args.db_command == "get":
        rec = db.get(args.id)
        return json.dumps(rec.to_json(), indent=1, sort_keys=True), rec.to_json()
    if args.db_command == "export":
        text = coxdb.export(db.get(args.id), args.format)
        return text, json.loads(text) if args.format == "spacefile" else {"latex": text}
    if args.db_command == "add":
        rec = _read_json(args.record)
        try:
            new = db.ingest(rec, check=not args.nocheck)
        except coxdb.DatabaseError as exc:
            if "duplicate" in str(exc):
                raise DomainError(str(exc)) from exc
            raise InputError(str(exc)) from exc
        return f"added {new.id}", new.to_json()
    raise InputError(f"unknown db command {args.db_command}")


# parser -----------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", action="store_true", help="print canonical JSON instead of the display form")
    p.add_argument("--nocheck", action="store_true", help="skip the homogeneity check")
    p.add_argument("--threads", type=int, default=1, metavar="N", help="worker processes for a-face tests")
    p.add_argument("--timeout", type=float, default=None, metavar="SECONDS", help="abort after this many seconds")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="moridream", description="Invariants of Mori dream spaces from graded-ring data.")
    sub = parser.add_subparsers(dest="command", required=True)

    def space_cmd(name: str, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help)
        p.add_argument("file", help="SpaceFile (JSON), '-' for stdin")
        p.add_argument("--strict", action="store_true", help="treat an ample class outside Mov as an error")
        _common(p)
        return p

    space_cmd("show", "print the MDS descriptor")
    space_cmd("pic", "Picard group and Cl/Pic")
    space_cmd("localcl", "local class group of a relevant face").add_argument("face", help="e.g. 1,5,6")
    space_cmd("cones", "effective, moving or semiample cone").add_argument("kind", choices=["eff", "mov", "sample"])
    space_cmd("chambers", "GIT chamber fan over Eff").add_argument("--mov", action="store_true", help="only chambers inside Mov")
    space_cmd("gitfan", "GIT fan with all chamber rays")
    space_cmd("sing", "singular strata").add_argument("--generators", action="store_true", help="also print the raw ideal generators")
    for name in ("smooth", "quasismooth", "factorial", "qfactorial", "fano"):
        space_cmd(name, f"test: {name}")
    space_cmd("gorenstein", "Gorenstein index")
    space_cmd("anticanonical", "anticanonical class")
    space_cmd("intersect", "intersection number of dim X classes").add_argument("classes", nargs="+", help="classes like 1,0,2")
    space_cmd("selfint", "self-intersections of the generator degrees (surfaces)")
    space_cmd("graph", "intersection graph (surfaces)").add_argument(
        "--format", choices=["edges", "dot", "tikz"], default="edges"
    )
    space_cmd("ambientfan", "canonical toric ambient fan")
    space_cmd("afaces", "list all a-faces")

    p = sub.add_parser("ringfromap", help="complexity-one ring from a JSON file with matrices P and A")
    p.add_argument("file")
    _common(p)

    p = sub.add_parser("db", help="Cox ring database")
    dbsub = p.add_subparsers(dest="db_command", required=True)
    for name in ("search", "get", "export", "add"):
        q = dbsub.add_parser(name)
        q.add_argument("--db", default=None, help="database file (default: bundled seed database)")
        _common(q)
        if name == "search":
            q.add_argument("query", nargs="*", help="terms joined by AND")
        elif name == "add":
            q.add_argument("record", help="JSON record file")
        else:
            q.add_argument("id", type=int)
            if name == "export":
                q.add_argument("--format", choices=["spacefile", "latex"], default="spacefile")
    return parser


def _on_alarm(signum, frame):
    raise TimeoutError


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.timeout:
        signal.signal(signal.SIGALRM, _on_alarm)
        signal.setitimer(signal.ITIMER_REAL, args.timeout)
    try:
        if args.command == "db":
            text, obj = cmd_db(args)
        elif args.command == "ringfromap":
            text, obj = cmd_ringfromap(args)
        else:
            X = _load(args)
            text, obj = MDS_COMMANDS[args.command](X, args)
    except TimeoutError:
        print(f"error: timed out after {args.timeout} s", file=sys.stderr)
        return EXIT_TIMEOUT
    except (DomainError, ConeError, coxdb.RecordNotFound, Warning) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (InputError, PolynomialSyntaxError, HomogeneityError, FormatError, ag.GroupError, coxdb.DatabaseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    finally:
        if args.timeout:
            signal.setitimer(signal.ITIMER_REAL, 0)
    if args.json:
        print(json.dumps(obj, sort_keys=True))
    else:
        print(text)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
