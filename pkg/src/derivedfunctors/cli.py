"""Command-line front end: ``resolve``, ``tor``, ``map`` and ``verify``.

Presentation files are line oriented::

    # Z/4 + Z/6
    module A
    generators 2
    relations
    [4, 0]
    [0, 6]

A file may hold several ``module`` blocks and ``map`` blocks::

    map f
    source A
    target B
    matrix
    [2]

Exit codes: 0 success, 1 verification failure, 2 input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import re
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from derivedfunctors.derived import TensorFunctor, cocycle_violations, derived_map, derived_object, theta
from derivedfunctors.errors import NotWellDefined, ShapeError
from derivedfunctors.exact_linalg import IntMatrix
from derivedfunctors.fp_modules import (
    FpModule,
    ModuleMap,
    canonical_form,
    compose,
    is_isomorphism,
    make_map,
    maps_equal,
    transport,
)
from derivedfunctors.resolutions import is_resolution, resolution_family
from derivedfunctors.verification import module_json, run_all

DEFAULT_SEED = 1729
DEFAULT_FAMILY_SIZE = 3

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class RowLengthMismatch(ParseError):
    pass


@dataclass
class MapSpec:
    name: str
    source: str
    target: str
    rows: list
    line: int


@dataclass
class ParsedFile:
    modules: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)


_ROW = re.compile(r"\[([^\[\]]*)\]")
_KEYWORDS = ("module", "generators", "relations", "map", "source", "target", "matrix")


def _parse_rows(text: str, lineno: int, offset: int) -> list[list[int]]:
    rows = []
    pos = 0
    stripped = text.strip()
    if not stripped:
        return rows
    for m in _ROW.finditer(text):
        gap = text[pos:m.start()].strip().strip(",").strip()
        if gap:
            raise ParseError(f"unexpected text {gap!r}", lineno, offset + pos + 1)
        body = m.group(1).strip()
        try:
            rows.append([int(tok) for tok in body.split(",")] if body else [])
        except ValueError:
            raise ParseError(f"bad integer row [{body}]", lineno, offset + m.start() + 1) from None
        pos = m.end()
    tail = text[pos:].strip().strip(",").strip()
    if tail:
        raise ParseError(f"unexpected text {tail!r}", lineno, offset + pos + 1)
    return rows


def parse_file(text: str, default_name: str = "M") -> ParsedFile:
    out = ParsedFile()
    block = None       # "module" or "map"
    name = default_name
    gens: Optional[int] = None
    rows: list = []
    rows_line: dict = {}
    spec: Optional[MapSpec] = None
    collecting = None  # "relations" or "matrix"
    start_line = 1

    def finish(lineno):
        nonlocal block, gens, rows, spec, collecting
        if block == "module":
            if gens is None:
                raise ParseError("module block without 'generators'", start_line)
            for i, r in enumerate(rows):
                if len(r) != gens:
                    raise RowLengthMismatch(
                        f"relation row of length {len(r)} for {gens} generators", rows_line[i])
            if name in out.modules:
                raise ParseError(f"duplicate module {name!r}", start_line)
            out.modules[name] = FpModule(gens, IntMatrix.from_rows(rows, gens))
        elif block == "map":
            if spec is None or not spec.source or not spec.target:
                raise ParseError("map block needs 'source' and 'target'", start_line)
            spec.rows = rows
            out.maps[spec.name] = spec
        block, gens, rows, spec, collecting = None, None, [], None, None
        rows_line.clear()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        word, _, rest = line.strip().partition(" ")
        if word in _KEYWORDS:
            rest_offset = indent + len(word) + 1
            if word == "module":
                finish(lineno)
                block, name, start_line = "module", rest.strip() or default_name, lineno
            elif word == "map":
                finish(lineno)
                block, start_line = "map", lineno
                spec = MapSpec(rest.strip() or "f", "", "", [], lineno)
            elif word == "generators":
                if block is None:
                    block, name, start_line = "module", default_name, lineno
                if block != "module":
                    raise ParseError("'generators' outside a module block", lineno, indent + 1)
                try:
                    gens = int(rest.strip())
                except ValueError:
                    raise ParseError(f"bad generator count {rest.strip()!r}", lineno, rest_offset + 1) from None
                if gens < 0:
                    raise ParseError("generator count must be nonnegative", lineno, rest_offset + 1)
                collecting = None
            elif word in ("source", "target"):
                if block != "map":
                    raise ParseError(f"'{word}' outside a map block", lineno, indent + 1)
                setattr(spec, word, rest.strip())
                collecting = None
            else:  # relations / matrix
                expected = "module" if word == "relations" else "map"
                if block is None and word == "relations":
                    block, name, start_line = "module", default_name, lineno
                if block != expected:
                    raise ParseError(f"'{word}' outside a {expected} block", lineno, indent + 1)
                collecting = word
                for r in _parse_rows(rest, lineno, rest_offset):
                    rows_line[len(rows)] = lineno
                    rows.append(r)
            continue
        if collecting is None:
            raise ParseError(f"unknown keyword {word!r}", lineno, indent + 1)
        for r in _parse_rows(line, lineno, 0):
            rows_line[len(rows)] = lineno
            rows.append(r)
    finish(len(text.splitlines()) + 1)
    return out


def parse_presentation(text: str, name: Optional[str] = None) -> FpModule:
    """The module in ``text`` (the named one, or the only/first one)."""
    parsed = parse_file(text)
    if not parsed.modules:
        raise ParseError("no module found", 1)
    if name is not None:
        return parsed.modules[name]
    return next(iter(parsed.modules.values()))


def format_presentation(M: FpModule, name: str = "M") -> str:
    lines = [f"module {name}", f"generators {M.generators}", "relations"]
    lines += ["[" + ", ".join(str(x) for x in row) + "]" for row in M.relations.to_rows()]
    return "\n".join(lines) + "\n"


def build_map(parsed: ParsedFile, name: Optional[str] = None) -> ModuleMap:
    if not parsed.maps:
        raise ParseError("no map block found", 1)
    spec = parsed.maps[name] if name else next(iter(parsed.maps.values()))
    for end in (spec.source, spec.target):
        if end not in parsed.modules:
            raise ParseError(f"unknown module {end!r}", spec.line)
    M, N = parsed.modules[spec.source], parsed.modules[spec.target]
    for r in spec.rows:
        if len(r) != M.generators:
            raise RowLengthMismatch(f"matrix row of length {len(r)} for {M.generators} source generators",
                                    spec.line)
    if len(spec.rows) != N.generators:
        raise ParseError(f"matrix has {len(spec.rows)} rows, target has {N.generators} generators", spec.line)
    return make_map(M, N, IntMatrix.from_rows(spec.rows, M.generators))


# reports ----------------------------------------------------------------

def _digest(*texts: str) -> str:
    h = hashlib.sha256()
    for t in texts:
        h.update(t.encode())
        h.update(b"\0")
    return h.hexdigest()


def _form_json(M: FpModule) -> dict:
    cf = canonical_form(M)
    return {"torsion": list(cf.torsion), "free_rank": cf.free_rank, "display": str(cf)}


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}", 0) from None


def cmd_resolve(args) -> dict:
    text = _read(args.file)
    M = parse_presentation(text)
    fam = resolution_family(M, args.family_size, args.seed)
    members = []
    checks = []
    for i, P in enumerate(fam.members):
        ok = is_resolution(P, M)
        checks.append({"check": f"is_resolution[{i}]", "passed": ok})
        members.append({
            "ranks": [Q.generators for Q in P.complex.objects],
            "differentials": [d.matrix.to_rows() for d in P.complex.differentials],
            "augmentation": P.augmentation.matrix.to_rows(),
        })
    return {
        "command": ["resolve", Path(args.file).name, f"--family-size={args.family_size}", f"--seed={args.seed}"],
        "inputs": {"digest": _digest(text), "module": module_json(M)},
        "seed": args.seed,
        "outputs": {"canonical_form": _form_json(M), "rank_measure": list(fam.rank),
                    "family_size": len(fam), "members": members},
        "checks": checks,
    }


def cmd_tor(args) -> dict:
    ta, tb = _read(args.a), _read(args.b)
    A, B = parse_presentation(ta), parse_presentation(tb)
    F = TensorFunctor(B)
    D = derived_object(F, A, args.degree, args.family_size, args.seed)
    out = {"degree": args.degree, "canonical_form": _form_json(D.group), "family_size": len(D.family)}
    if args.verbose:
        out["family"] = [{"differentials": [d.matrix.to_rows() for d in P.complex.differentials],
                          "augmentation": P.augmentation.matrix.to_rows()} for P in D.family.members]
        out["homologies"] = [module_json(H) for H in D.system.homologies]
        out["phi"] = {f"{i},{j}": m.matrix.to_rows() for (i, j), m in sorted(D.system.phi.items())}
        out["limit"] = {"presentation": module_json(D.group),
                        "inclusion": D.limit.inclusion.matrix.to_rows()}
    return {
        "command": ["tor", Path(args.a).name, Path(args.b).name, f"--degree={args.degree}",
                    f"--family-size={args.family_size}", f"--seed={args.seed}"],
        "inputs": {"digest": _digest(ta, tb), "a": module_json(A), "b": module_json(B)},
        "seed": args.seed,
        "outputs": out,
        "checks": [{"check": "cocycle", "passed": not cocycle_violations(D.system)},
                   {"check": "limit_projections_iso", "passed": all(map(is_isomorphism, D.limit.projections))}],
    }


def cmd_map(args) -> dict:
    tm, tb = _read(args.map_file), _read(args.b)
    f = build_map(parse_file(tm))
    B = parse_presentation(tb)
    F = TensorFunctor(B)
    Dm = derived_map(F, f, args.degree, args.family_size, args.seed)
    canon = transport(Dm.map)
    out = {
        "degree": args.degree,
        "source": _form_json(Dm.source.group),
        "target": _form_json(Dm.target.group),
        "matrix": canon.matrix.to_rows(),
    }
    if args.verbose:
        out["limit_matrix"] = Dm.map.matrix.to_rows()
        out["source_limit"] = module_json(Dm.source.group)
        out["target_limit"] = module_json(Dm.target.group)
    return {
        "command": ["map", Path(args.map_file).name, Path(args.b).name, f"--degree={args.degree}",
                    f"--family-size={args.family_size}", f"--seed={args.seed}"],
        "inputs": {"digest": _digest(tm, tb), "map": f.matrix.to_rows(), "b": module_json(B)},
        "seed": args.seed,
        "outputs": out,
        "checks": [{"check": "projection_squares", "passed": _squares_commute(F, Dm)}],
    }


def _squares_commute(F, Dm) -> bool:
    n = Dm.source.degree
    return all(
        maps_equal(compose(Dm.target.projection(j), Dm.map), compose(theta(F, Dm.f, P, Q, n), Dm.source.projection(i)))
        for i, P in enumerate(Dm.source.family.members) for j, Q in enumerate(Dm.target.family.members))


def cmd_verify(args) -> dict:
    results = run_all(args.seed, args.cases, args.bound, fault=args.inject_fault)
    return {
        "command": ["verify", f"--cases={args.cases}", f"--bound={args.bound}", f"--seed={args.seed}"]
        + (["--inject-fault"] if args.inject_fault else []),
        "inputs": {"digest": _digest(str(args.seed), str(args.cases), str(args.bound))},
        "seed": args.seed,
        "outputs": {"suites": [r.to_json() for r in results]},
        "checks": [{"check": r.name, "passed": r.passed} for r in results],
    }


def _print_human(report: dict, out) -> None:
    cmd = report["command"][0]
    o = report["outputs"]
    if cmd == "resolve":
        print(f"module: {o['canonical_form']['display']}", file=out)
        print(f"family: {o['family_size']} resolutions, rank measure {tuple(o['rank_measure'])}", file=out)
        for i, m in enumerate(o["members"]):
            ok = report["checks"][i]["passed"]
            print(f"  [{i}] ranks {m['ranks']}  d={m['differentials']}  eps={m['augmentation']}  "
                  f"{'exact' if ok else 'NOT EXACT'}", file=out)
    elif cmd == "tor":
        print(f"L_{o['degree']}: {o['canonical_form']['display']}", file=out)
        for key in ("family", "homologies", "phi", "limit"):
            if key in o:
                print(f"{key}: {json.dumps(o[key])}", file=out)
    elif cmd == "map":
        print(f"L_{o['degree']}(f): {o['source']['display']} -> {o['target']['display']}", file=out)
        print(f"matrix: {o['matrix']}", file=out)
        if "limit_matrix" in o:
            print(f"limit matrix: {o['limit_matrix']}", file=out)
    elif cmd == "verify":
        for s in o["suites"]:
            print(f"{s['suite']:<24} {s['cases']:>4} cases  {'PASS' if s['passed'] else 'FAIL'}", file=out)
            if not s["passed"]:
                print(json.dumps(s["counterexample"], indent=2, sort_keys=True), file=out)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="derivedfunctors",
                                description="Canonical left derived functors of - (x) B over f.p. abelian groups")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family-size", type=int, default=DEFAULT_FAMILY_SIZE)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--json", action="store_true", help="emit the machine-readable report")
    common.add_argument("--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("resolve", parents=[common], help="list the resolution family of a module")
    r.add_argument("file")
    r.set_defaults(run=cmd_resolve)

    t = sub.add_parser("tor", parents=[common], help="L_n(- (x) B)(A), i.e. Tor_n(A, B)")
    t.add_argument("a")
    t.add_argument("b")
    t.add_argument("--degree", type=int, default=1)
    t.set_defaults(run=cmd_tor)

    m = sub.add_parser("map", parents=[common], help="L_n(- (x) B)(f) for a map file")
    m.add_argument("map_file")
    m.add_argument("b")
    m.add_argument("--degree", type=int, default=1)
    m.set_defaults(run=cmd_map)

    v = sub.add_parser("verify", parents=[common], help="run the invariant suites on a seeded corpus")
    v.add_argument("--cases", type=int, default=12)
    v.add_argument("--bound", type=int, default=12, help="bound on relation entries")
    v.add_argument("--inject-fault", action="store_true", help="test only: corrupt one comparison isomorphism")
    v.set_defaults(run=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "degree", 0) < 0 or args.family_size < 1:
        print("error: degree must be >= 0 and family size >= 1", file=sys.stderr)
        return EXIT_INPUT
    started = time.perf_counter()
    try:
        report = args.run(args)
    except (ParseError, NotWellDefined, ShapeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        _print_human(report, sys.stdout)
        if args.command == "verify":
            print(f"runtime {time.perf_counter() - started:.2f}s", file=sys.stderr)
    return EXIT_OK if all(c["passed"] for c in report["checks"]) else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
