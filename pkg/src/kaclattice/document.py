"""Workspace documents: named object declarations read from JSON.

A document is a JSON file

    {"schema": 1,
     "objects": {
        "G":  {"type": "group", "kind": "cyclic", "n": 2},
        "K":  {"type": "kac", "kind": "group_algebra", "group": "G"},
        "v":  {"type": "corep", "kind": "diagonal", "kac": "K",
               "elements": [0, 1]},
        "b":  {"type": "coaction", "kind": "t_iota", "corep": "v"},
        "inc": {"type": "inclusion", "kind": "scalar", "big": "M2"},
        "M2": {"type": "algebra", "kind": "multimatrix", "sizes": [2]}
     }}

Declarations refer to each other by name; order does not matter, cycles are
rejected.  Inside arrays of declared shape every scalar entry is either a
plain number or a two-element array [re, im]; structure-constant tensors may
be given sparsely as five-element rows [i, j, k, re, im].

Structural problems (unparseable file, unknown names, wrong field shapes)
raise :class:`DocumentError`.  An object whose own validator fails is
recorded as a build failure instead, so the ``validate`` command can report
every object.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import FiniteStarAlgebra, multimatrix_algebra
from .coaction import (CoactionMap, coaction_of_action, inner_coaction,
                       kappa_delta, regular_coaction, t_iota_v,
                       trivial_coaction)
from .corep import (Corepresentation, diagonal_corepresentation,
                    trivial_corepresentation)
from .errors import DocumentError, KacLatticeError
from .kac import (FiniteGroupTable, GroupAction, KacAlgebra, crossed_product,
                  cyclic_group, dihedral_group, direct_product,
                  function_algebra, group_algebra, group_from_permutations,
                  klein_four_group, permutation_action, quaternion_group,
                  symmetric_group, translation_action, trivial_action,
                  validate_kac)
from .tower import InclusionData, diagonal_inclusion, scalar_inclusion

SCHEMA = 1

COACTION_KINDS = ("regular", "kappa_delta", "t_iota", "iota", "trivial",
                  "action", "dual")


# ---------------------------------------------------------------------------
# scalar / array / tensor parsing


def _complex_scalar(x, where: str) -> complex:
    if isinstance(x, bool):
        raise DocumentError("expected a number, got a boolean", where)
    if isinstance(x, (int, float)):
        return complex(x)
    if (isinstance(x, list) and len(x) == 2
            and all(isinstance(t, (int, float)) and not isinstance(t, bool)
                    for t in x)):
        return complex(x[0], x[1])
    raise DocumentError(f"expected a number or [re, im] pair, got {x!r}",
                        where)


def _dense(data, rank: int, where: str) -> np.ndarray:
    def build(x, depth):
        if depth == rank:
            return _complex_scalar(x, where)
        if not isinstance(x, list) or not x:
            raise DocumentError(
                f"expected a nested list of depth {rank}", where)
        return [build(t, depth + 1) for t in x]

    arr = np.array(build(data, 0), dtype=np.complex128)
    if arr.ndim != rank:
        raise DocumentError(f"ragged array, expected rank {rank}", where)
    return arr


def _sparse_tensor(rows, dim: int, where: str) -> np.ndarray:
    out = np.zeros((dim, dim, dim), dtype=np.complex128)
    if not isinstance(rows, list):
        raise DocumentError("sparse tensor must be a list of "
                            "[i, j, k, re, im] rows", where)
    for r in rows:
        if (not isinstance(r, list) or len(r) != 5
                or not all(isinstance(t, (int, float)) for t in r)):
            raise DocumentError(f"bad sparse row {r!r}", where)
        i, j, k = (int(t) for t in r[:3])
        if not (0 <= i < dim and 0 <= j < dim and 0 <= k < dim):
            raise DocumentError(f"sparse index out of range in {r!r}", where)
        out[i, j, k] = complex(r[3], r[4])
    return out


def _field(decl: dict, key: str, where: str):
    if key not in decl:
        raise DocumentError(f"missing field {key!r}", where)
    return decl[key]


def _int_field(decl: dict, key: str, where: str, minimum: int = 1) -> int:
    v = _field(decl, key, where)
    if not isinstance(v, int) or isinstance(v, bool):
        raise DocumentError(f"field {key!r} must be an integer", where)
    if v < minimum:
        raise DocumentError(f"field {key!r} must be at least {minimum}", where)
    return v


def _name_field(decl: dict, key: str, where: str) -> str:
    v = _field(decl, key, where)
    if not isinstance(v, str):
        raise DocumentError(f"field {key!r} must be an object name", where)
    return v


# ---------------------------------------------------------------------------
# builders


def _build_group(decl, res, where) -> FiniteGroupTable:
    kind = _field(decl, "kind", where)
    if kind == "cyclic":
        return cyclic_group(_int_field(decl, "n", where))
    if kind == "symmetric":
        return symmetric_group(_int_field(decl, "n", where))
    if kind == "dihedral":
        return dihedral_group(_int_field(decl, "n", where))
    if kind == "klein":
        return klein_four_group()
    if kind == "quaternion":
        return quaternion_group()
    if kind == "product":
        names = _field(decl, "of", where)
        if not isinstance(names, list) or len(names) != 2:
            raise DocumentError("field 'of' must list two group names", where)
        return direct_product(res.resolve(names[0], FiniteGroupTable),
                              res.resolve(names[1], FiniteGroupTable))
    if kind == "cayley":
        table = np.asarray(_field(decl, "table", where), dtype=np.int64)
        return FiniteGroupTable(table)
    if kind == "permutations":
        return group_from_permutations(_field(decl, "generators", where))
    raise DocumentError(f"unknown group kind {kind!r}", where)


def _build_kac(decl, res, where) -> KacAlgebra:
    kind = _field(decl, "kind", where)
    if kind == "function_algebra":
        return function_algebra(
            res.resolve(_name_field(decl, "group", where), FiniteGroupTable))
    if kind == "group_algebra":
        return group_algebra(
            res.resolve(_name_field(decl, "group", where), FiniteGroupTable))
    if kind == "raw":
        alg = _raw_algebra(decl, where)
        n = alg.dim
        comult = _sparse_or_dense(decl, "comult", (n * n, n), where)
        counit = _dense(_field(decl, "counit", where), 1, where)
        antipode = _dense(_field(decl, "antipode", where), 2, where)
        return KacAlgebra(alg, comult, counit, antipode)
    raise DocumentError(f"unknown kac kind {kind!r}", where)


def _sparse_or_dense(decl, key, shape, where) -> np.ndarray:
    data = _field(decl, key, where)
    arr = _dense(data, len(shape), where)
    if arr.shape != shape:
        raise DocumentError(f"field {key!r} must have shape {shape}", where)
    return arr


def _raw_algebra(decl, where) -> FiniteStarAlgebra:
    n = _int_field(decl, "dim", where)
    mult = _field(decl, "mult", where)
    if mult and isinstance(mult[0], list) and len(mult[0]) == 5:
        tensor = _sparse_tensor(mult, n, where)
    else:
        tensor = _dense(mult, 3, where)
        if tensor.shape != (n, n, n):
            raise DocumentError(f"mult must have shape ({n}, {n}, {n})", where)
    unit = _dense(_field(decl, "unit", where), 1, where)
    star = _dense(_field(decl, "star", where), 2, where)
    trace = _dense(_field(decl, "trace", where), 1, where)
    return FiniteStarAlgebra(tensor, unit, star, trace)


def _build_algebra(decl, res, where) -> FiniteStarAlgebra:
    kind = _field(decl, "kind", where)
    if kind == "multimatrix":
        sizes = _field(decl, "sizes", where)
        weights = decl.get("weights")
        return multimatrix_algebra(sizes, weights)
    if kind == "crossed_product":
        action = res.resolve(_name_field(decl, "action", where), GroupAction)
        return crossed_product(action)[0]
    if kind == "raw":
        return _raw_algebra(decl, where)
    raise DocumentError(f"unknown algebra kind {kind!r}", where)


def _build_corep(decl, res, where) -> Corepresentation:
    kind = _field(decl, "kind", where)
    if kind == "diagonal":
        k = res.resolve(_name_field(decl, "kac", where), KacAlgebra)
        return diagonal_corepresentation(k, _field(decl, "elements", where))
    if kind == "trivial":
        k = res.resolve(_name_field(decl, "kac", where), KacAlgebra)
        return trivial_corepresentation(k, int(decl.get("dim", 1)))
    if kind == "raw":
        k = res.resolve(_name_field(decl, "kac", where), KacAlgebra)
        entries = _dense(_field(decl, "entries", where), 3, where)
        return Corepresentation(k, entries)
    raise DocumentError(f"unknown corep kind {kind!r}", where)


def _build_action(decl, res, where) -> GroupAction:
    kind = _field(decl, "kind", where)
    group = res.resolve(_name_field(decl, "group", where), FiniteGroupTable)
    if kind == "translation":
        return translation_action(group)
    if kind == "permutation":
        return permutation_action(group, _field(decl, "perms", where))
    if kind == "trivial":
        target = res.resolve(_name_field(decl, "algebra", where),
                             FiniteStarAlgebra)
        return trivial_action(group, target)
    raise DocumentError(f"unknown action kind {kind!r}", where)


def _build_coaction(decl, res, where) -> CoactionMap:
    kind = _field(decl, "kind", where)
    if kind not in COACTION_KINDS:
        raise DocumentError(f"unknown coaction kind {kind!r}", where)
    as_kind = decl.get("as")
    if kind == "regular":
        out = regular_coaction(
            res.resolve(_name_field(decl, "kac", where), KacAlgebra))
    elif kind == "kappa_delta":
        out = kappa_delta(
            res.resolve(_name_field(decl, "kac", where), KacAlgebra))
    elif kind == "t_iota":
        out = t_iota_v(
            res.resolve(_name_field(decl, "corep", where), Corepresentation))
    elif kind == "iota":
        out = inner_coaction(
            res.resolve(_name_field(decl, "corep", where), Corepresentation))
    elif kind == "trivial":
        out = trivial_coaction(
            res.resolve(_name_field(decl, "kac", where), KacAlgebra),
            res.resolve(_name_field(decl, "target", where), FiniteStarAlgebra),
            kind=as_kind or "coaction")
        as_kind = None
    elif kind == "action":
        out = coaction_of_action(
            res.resolve(_name_field(decl, "action", where), GroupAction),
            kind=as_kind or "coaction")
        as_kind = None
    else:  # dual
        action = res.resolve(_name_field(decl, "action", where), GroupAction)
        out = crossed_product(action)[1]
    if as_kind is not None:
        if as_kind not in ("coaction", "anticoaction"):
            raise DocumentError(f"bad 'as' kind {as_kind!r}", where)
        out = out.with_kind(as_kind)
    return out


def _build_inclusion(decl, res, where) -> InclusionData:
    kind = _field(decl, "kind", where)
    if kind == "scalar":
        return scalar_inclusion(
            res.resolve(_name_field(decl, "big", where), FiniteStarAlgebra))
    if kind == "diagonal":
        return diagonal_inclusion(_field(decl, "sizes", where))
    raise DocumentError(f"unknown inclusion kind {kind!r}", where)


def _build_matrix(decl, res, where) -> np.ndarray:
    entries = _field(decl, "entries", where)
    m = np.asarray(entries)
    if m.ndim != 2 or m.size == 0:
        raise DocumentError("inclusion matrix must be a 2d list", where)
    if not np.issubdtype(m.dtype, np.integer):
        raise DocumentError("inclusion matrix entries must be integers", where)
    if (m < 0).any():
        raise DocumentError("inclusion matrix entries must be >= 0", where)
    return m.astype(np.int64)


_BUILDERS = {
    "group": _build_group,
    "kac": _build_kac,
    "algebra": _build_algebra,
    "corep": _build_corep,
    "action": _build_action,
    "coaction": _build_coaction,
    "inclusion": _build_inclusion,
    "inclusion_matrix": _build_matrix,
}

TYPE_LABELS = {
    FiniteGroupTable: "group",
    KacAlgebra: "kac",
    FiniteStarAlgebra: "algebra",
    Corepresentation: "corep",
    GroupAction: "action",
    CoactionMap: "coaction",
    InclusionData: "inclusion",
    np.ndarray: "inclusion_matrix",
}


class _Resolver:
    def __init__(self, declarations: dict):
        self.declarations = declarations
        self.memo: dict = {}
        self.stack: list = []

    def resolve(self, name: str, expect=None):
        if name not in self.declarations:
            raise DocumentError(f"unknown object {name!r}")
        if name in self.stack:
            chain = " -> ".join(self.stack + [name])
            raise DocumentError(f"circular reference: {chain}")
        if name not in self.memo:
            decl = self.declarations[name]
            where = f"object {name!r}"
            if not isinstance(decl, dict):
                raise DocumentError("declaration must be an object", where)
            t = _field(decl, "type", where)
            if t not in _BUILDERS:
                raise DocumentError(f"unknown type {t!r}", where)
            self.stack.append(name)
            try:
                self.memo[name] = ("ok", _BUILDERS[t](decl, self, where))
            except DocumentError:
                self.stack.pop()
                raise
            except KacLatticeError as e:
                self.memo[name] = ("fail", f"{type(e).__name__}: {e}")
                self.stack.pop()
            else:
                self.stack.pop()
        status, payload = self.memo[name]
        if status == "fail":
            raise InvalidDependency(f"object {name!r} is invalid ({payload})")
        if expect is not None and not isinstance(payload, expect):
            raise DocumentError(
                f"object {name!r} is a "
                f"{TYPE_LABELS.get(type(payload), type(payload).__name__)}, "
                f"expected {TYPE_LABELS.get(expect, expect.__name__)}")
        return payload


class InvalidDependency(KacLatticeError):
    """A referenced object failed its own validation."""


@dataclass
class WorkspaceDocument:
    schema: int
    declarations: dict
    path: str | None = None

    def names(self) -> tuple:
        return tuple(self.declarations)

    def build_all(self) -> tuple[dict, dict]:
        """Build every declaration.

        Returns (objects, failures); structural problems raise
        :class:`DocumentError`, validator failures land in ``failures``.
        """
        res = _Resolver(self.declarations)
        objects, failures = {}, {}
        for name in self.declarations:
            try:
                objects[name] = res.resolve(name)
            except InvalidDependency as e:
                failures[name] = str(e)
        for name, (status, payload) in res.memo.items():
            if status == "fail":
                failures[name] = payload
                objects.pop(name, None)
        return objects, failures


def _reject_duplicates(pairs):
    seen = {}
    for k, v in pairs:
        if k in seen:
            raise DocumentError(f"duplicate name {k!r}")
        seen[k] = v
    return seen


def loads_document(text: str, path: str | None = None) -> WorkspaceDocument:
    try:
        raw = json.loads(text, object_pairs_hook=_reject_duplicates)
    except json.JSONDecodeError as e:
        raise DocumentError(f"invalid JSON: {e.msg}",
                            f"line {e.lineno} column {e.colno}") from e
    if not isinstance(raw, dict):
        raise DocumentError("document must be a JSON object")
    schema = raw.get("schema")
    if schema != SCHEMA:
        raise DocumentError(f"unsupported schema {schema!r}, expected {SCHEMA}")
    objects = raw.get("objects")
    if not isinstance(objects, dict):
        raise DocumentError("document must carry an 'objects' table")
    for name, decl in objects.items():
        if not isinstance(decl, dict):
            raise DocumentError("declaration must be an object",
                                f"object {name!r}")
    return WorkspaceDocument(schema=schema, declarations=objects, path=path)


def load_document(path: str) -> WorkspaceDocument:
    """Read a document from a file; ``builtin:name`` loads a bundled one."""
    if path.startswith("builtin:"):
        from importlib import resources

        name = path[len("builtin:"):]
        if not name.endswith(".json"):
            name += ".json"
        ref = resources.files("kaclattice").joinpath("data", name)
        try:
            text = ref.read_text()
        except FileNotFoundError:
            bundled = sorted(
                p.name for p in resources.files("kaclattice")
                .joinpath("data").iterdir() if p.name.endswith(".json"))
            raise DocumentError(
                f"no bundled document {name!r}; available: {bundled}")
        return loads_document(text, path)
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise DocumentError(f"cannot read {path!r}: {e.strerror}") from e
    return loads_document(text, path)


# ---------------------------------------------------------------------------
# validation dispatch and report serialization


def validate_object(obj, eps: float | None = None) -> dict:
    """Validator report for any object a document can declare."""
    if isinstance(obj, FiniteGroupTable):
        return {"passed": True, "order": obj.order}
    if isinstance(obj, KacAlgebra):
        return validate_kac(obj, eps)
    if isinstance(obj, FiniteStarAlgebra):
        return obj.validate(eps)
    if isinstance(obj, (Corepresentation, CoactionMap, GroupAction)):
        return obj.validate(eps)
    if isinstance(obj, InclusionData):
        rep = obj.emb.validate(eps)
        rep["matrix"] = obj.matrix.tolist()
        return rep
    if isinstance(obj, np.ndarray):
        ok = bool((obj.sum(axis=0) > 0).all() and (obj.sum(axis=1) > 0).all())
        return {"passed": ok, "matrix": obj.tolist()}
    raise DocumentError(f"no validator for {type(obj).__name__}")


def jsonable(x):
    """Recursively convert report values to JSON-compatible types."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, np.ndarray):
        if np.issubdtype(x.dtype, np.integer):
            return x.tolist()
        return jsonable(x.tolist())
    if x is None or isinstance(x, str):
        return x
    return str(x)
