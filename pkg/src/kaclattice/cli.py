"""Command line interface.

    kaclattice <command> <document> [flags]

Commands: validate, fixed-points, index, tower, invariant, graph.  The
document is a JSON workspace file (or ``builtin:<name>`` for a bundled one).
Reports are JSON by default, deterministic for fixed flags, and carry the
tool version plus all effective flags; ``--format text`` prints a summary,
``--format dot`` (graph command) prints the principal graphs in DOT.

Exit codes: 0 success, 1 an object failed validation, 2 parse, reference or
computation errors.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__, config
from .coaction import CoactionMap, averaging, fixed_point_tensor
from .corep import Corepresentation
from .document import (InvalidDependency, WorkspaceDocument, jsonable,
                       load_document, validate_object)
from .errors import DocumentError, KacLatticeError, NotAlgebraicData
from .invariant import principal_graph, r_lattice, standard_invariant
from .tower import (InclusionData, extend_anticoaction, integrality_check,
                    jones_tower, markov_index)


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="kaclattice",
        description="coactions, towers and standard invariants at the "
                    "level of structure constants")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt=("json", "text")):
        sp.add_argument("document",
                        help="workspace JSON file or builtin:<name>")
        sp.add_argument("--eps", type=float, default=1e-9,
                        help="numeric tolerance (default 1e-9)")
        sp.add_argument("--depth", type=int, default=3,
                        help="lattice/tower depth (default 3)")
        sp.add_argument("--seed", type=int, default=0,
                        help="seed for randomized decompositions (default 0)")
        sp.add_argument("--format", choices=fmt, default="json")
        sp.add_argument("--out", help="write the report here instead of stdout")

    common(sub.add_parser("validate", help="run every object validator"))

    fp = sub.add_parser("fixed-points",
                        help="fixed-point algebra of a coaction, or of a "
                             "twisted tensor product with --with")
    common(fp)
    fp.add_argument("--coaction", help="name of the (anti)coaction")
    fp.add_argument("--with", dest="with_", metavar="NAME",
                    help="second coaction; computes the twisted tensor "
                         "fixed points of (--coaction, --with)")

    ix = sub.add_parser("index", help="Markov index and integrality check")
    common(ix)
    ix.add_argument("--inclusion",
                    help="name of the inclusion or inclusion matrix")

    tw = sub.add_parser("tower", help="Jones tower, optionally with an "
                                      "extended anticoaction")
    common(tw)
    tw.add_argument("--inclusion", help="name of the inclusion")
    tw.add_argument("--beta", help="anticoaction on the big algebra")

    inv = sub.add_parser("invariant",
                         help="standard-invariant lattice (tower path with "
                              "--beta, word path with --corep)")
    common(inv)
    inv.add_argument("--inclusion", help="name of the inclusion")
    inv.add_argument("--beta", help="anticoaction on the big algebra")
    inv.add_argument("--corep", help="unitary corepresentation (word path)")

    gr = sub.add_parser("graph", help="principal graphs of the lattice rows")
    common(gr, fmt=("json", "dot", "text"))
    gr.add_argument("--inclusion", help="name of the inclusion")
    gr.add_argument("--beta", help="anticoaction on the big algebra")
    gr.add_argument("--corep", help="unitary corepresentation (word path)")
    return p


def _select(objects: dict, cls, explicit, flag: str, label: str,
            predicate=None):
    if explicit is not None:
        if explicit not in objects:
            raise DocumentError(f"no valid object named {explicit!r}")
        obj = objects[explicit]
        if not isinstance(obj, cls) or (predicate and not predicate(obj)):
            raise DocumentError(f"object {explicit!r} is not a {label}")
        return obj
    cands = [(n, o) for n, o in objects.items()
             if isinstance(o, cls) and (predicate is None or predicate(o))]
    if len(cands) == 1:
        return cands[0][1]
    if not cands:
        raise DocumentError(f"the document declares no {label}")
    names = sorted(n for n, _ in cands)
    raise DocumentError(f"several candidates for {label}: {names}; "
                        f"disambiguate with {flag}")


# ---------------------------------------------------------------------------
# command bodies: take (args, document, objects), return (results, status)


def _cmd_validate(args, doc: WorkspaceDocument, objects, failures):
    results = {}
    ok = True
    for name in doc.names():
        if name in failures:
            results[name] = {"passed": False, "error": failures[name]}
            ok = False
        else:
            rep = validate_object(objects[name], args.eps)
            results[name] = rep
            ok = ok and bool(rep["passed"])
    return {"objects": results}, ("ok" if ok else "fail")


def _cmd_fixed_points(args, doc, objects, failures):
    beta = _select(objects, CoactionMap, args.coaction, "--coaction",
                   "coaction")
    if args.with_ is not None:
        pi = _select(objects, CoactionMap, args.with_, "--with", "coaction")
        fp, res = fixed_point_tensor(beta, pi, args.eps)
        extra = {"cross_check_residual": res}
    else:
        fp = averaging(beta, args.eps)
        extra = {}
    results = {
        "ambient_dim": fp.ambient.dim,
        "fixed_dim": fp.dim,
        "block_sizes": list(fp.algebra.block_structure().block_sizes),
        "report": jsonable(fp.report),
        **extra,
    }
    return results, "ok"


def _cmd_index(args, doc, objects, failures):
    data = _select(objects, (InclusionData, np.ndarray), args.inclusion,
                   "--inclusion", "inclusion or inclusion matrix")
    results = {"markov_index": float(markov_index(data))}
    if isinstance(data, InclusionData):
        results["matrix"] = data.matrix.tolist()
    else:
        results["matrix"] = data.tolist()
    try:
        cert = integrality_check(data, args.eps)
    except NotAlgebraicData as e:
        results["integer"] = False
        results["solvable"] = False
        results["reason"] = str(e)
        if e.index is not None:
            results["markov_index"] = float(e.index)
    else:
        results["integer"] = True
        results["solvable"] = True
        results["index"] = cert["index"]
        results["certificate"] = jsonable(cert["certificate"])
    return results, "ok"


def _tower_chain(args, objects):
    data = _select(objects, InclusionData, args.inclusion, "--inclusion",
                   "inclusion")
    if args.depth < 1:
        raise DocumentError("--depth must be at least 1")
    return data, jones_tower(data, max(0, args.depth - 1), args.eps)


def _cmd_tower(args, doc, objects, failures):
    data, chain = _tower_chain(args, objects)
    results = {
        "index": float(chain.index),
        "level_dims": [b.dim for b in chain.levels],
        "level_blocks": [list(b.block_structure().block_sizes)
                         for b in chain.levels],
        "matrices": [d.matrix.tolist() for d in chain.data],
        "jones_traces": [
            float(chain.levels[i + 2].trace_of(e).real)
            for i, e in enumerate(chain.jones_projections)],
    }
    if args.beta is not None:
        beta = _select(objects, CoactionMap, args.beta, "--beta",
                       "anticoaction",
                       predicate=lambda c: c.kind == "anticoaction")
        betas = extend_anticoaction(beta, chain, args.eps)
        results["extension"] = [
            {"level": i, "kind": b.kind, "target_dim": b.target.dim,
             "passed": bool(b.validate(args.eps)["passed"])}
            for i, b in enumerate(betas)]
    return results, "ok"


def _lattice(args, objects):
    if args.corep is not None:
        v = _select(objects, Corepresentation, args.corep, "--corep",
                    "corepresentation")
        return r_lattice(v, args.depth, eps=args.eps)
    data = _select(objects, InclusionData, args.inclusion, "--inclusion",
                   "inclusion")
    beta = _select(objects, CoactionMap, args.beta, "--beta", "anticoaction",
                   predicate=lambda c: c.kind == "anticoaction")
    return standard_invariant(data, beta, args.depth, args.eps)


def _cmd_invariant(args, doc, objects, failures):
    lat = _lattice(args, objects)
    rows = {str(r): list(lat.cell_dims(r)) for r in range(lat.depth + 1)}
    cells = {f"{i},{j}": lat.cells[(i, j)].small.dim
             for (i, j) in sorted(lat.cells)}
    return {"depth": lat.depth, "rows": rows, "cells": cells,
            "meta": jsonable(lat.meta)}, "ok"


def _cmd_graph(args, doc, objects, failures):
    lat = _lattice(args, objects)
    pg = principal_graph(lat, rows=(0, 1), eps=args.eps)
    results = {"rows": {}}
    for r in pg.rows:
        results["rows"][str(r)] = {
            "block_sizes": [list(c) for c in pg.block_sizes[r]],
            "matrices": [m.tolist() for m in pg.matrices[r]],
            "depth_profile": list(pg.depth_profile[r]),
            "edges": [[list(u), list(v), k] for u, v, k in pg.edge_list(r)],
        }
    results["dot"] = _dot(pg)
    return results, "ok"


def _dot(pg) -> str:
    lines = ["graph principal {", "  rankdir=LR;",
             "  node [shape=circle, fontsize=10];"]
    for row in pg.rows:
        lines.append(f"  subgraph cluster_row{row} {{")
        lines.append(f'    label="row {row}";')
        for col, sizes in enumerate(pg.block_sizes[row]):
            for b, s in enumerate(sizes):
                lines.append(f'    r{row}c{col}b{b} [label="{s}"];')
        for (c1, a), (c2, b), k in pg.edge_list(row):
            label = f' [label="{k}"]' if k > 1 else ""
            lines.append(f"    r{row}c{c1}b{a} -- r{row}c{c2}b{b}{label};")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


_COMMANDS = {
    "validate": _cmd_validate,
    "fixed-points": _cmd_fixed_points,
    "index": _cmd_index,
    "tower": _cmd_tower,
    "invariant": _cmd_invariant,
    "graph": _cmd_graph,
}


def _flags_of(args) -> dict:
    skip = {"command", "document", "out"}
    return {k.rstrip("_"): v for k, v in sorted(vars(args).items())
            if k not in skip}


def _render_text(report: dict) -> str:
    lines = [f"kaclattice {report['command']} on {report['document']}: "
             f"{report['status']}"]

    def walk(prefix, value):
        if isinstance(value, dict):
            for k, v in value.items():
                walk(f"{prefix}{k}.", v)
        elif (isinstance(value, list)
              and any(isinstance(v, (dict, list)) for v in value)):
            for i, v in enumerate(value):
                walk(f"{prefix}{i}.", v)
        else:
            lines.append(f"  {prefix.rstrip('.')}: {value}")

    walk("", report["results"])
    return "\n".join(lines) + "\n"


def _write(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        doc = load_document(args.document)
    except DocumentError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    with config.override(eps=args.eps, seed=args.seed):
        try:
            objects, failures = doc.build_all()
            if failures and args.command != "validate":
                report = _report(args, doc, "fail",
                                 {"invalid_objects": failures})
                _emit(report, args)
                return 1
            results, status = _COMMANDS[args.command](
                args, doc, objects, failures)
        except DocumentError as e:
            print(f"error: {e}", file=sys.stderr)
            return 2
        except InvalidDependency as e:
            print(f"error: {e}", file=sys.stderr)
            return 1
        except KacLatticeError as e:
            print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
            return 2

    report = _report(args, doc, status, results)
    _emit(report, args)
    return 0 if status == "ok" else 1


def _report(args, doc, status, results) -> dict:
    return {
        "schema": 1,
        "tool": "kaclattice",
        "version": __version__,
        "command": args.command,
        "document": args.document,
        "flags": jsonable(_flags_of(args)),
        "status": status,
        "results": jsonable(results),
    }


def _emit(report: dict, args) -> None:
    if args.format == "dot":
        _write(report["results"]["dot"], args.out)
        return
    if args.format == "text":
        _write(_render_text(report), args.out)
        return
    _write(json.dumps(report, sort_keys=True, indent=2) + "\n", args.out)


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
