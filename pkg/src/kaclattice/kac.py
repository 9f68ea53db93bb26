"""Finite groups, finite-dimensional Kac algebras, actions, crossed products.

A Kac algebra here is a finite-dimensional C*-Hopf algebra with involutive
antipode and a tracial Haar state.  The two basic families are function
algebras C(G) (commutative) and group algebras C[G] (cocommutative); crossed
products by group actions provide non-trivial examples carrying a dual
coaction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .algebra import FiniteStarAlgebra, commutative_algebra
from .config import get_config, resolve_eps
from .errors import (
    DimensionMismatch,
    InvalidGroup,
    InvalidKacAlgebra,
    InvalidEmbedding,
)
from .linalg import flip_matrix


# ---------------------------------------------------------------------------
# finite groups


@dataclass(frozen=True, eq=False)
class FiniteGroupTable:
    """Multiplication table of a finite group: cayley[i, j] = index of g_i g_j."""

    cayley: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        c = np.asarray(self.cayley, dtype=np.int64)
        object.__setattr__(self, "cayley", c)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise InvalidGroup("cayley table must be square")
        if len(self.labels) != c.shape[0]:
            object.__setattr__(
                self, "labels", tuple(f"g{i}" for i in range(c.shape[0])))
        rep = self.validate()
        if not rep["passed"]:
            raise InvalidGroup(f"not a group table: {rep}")

    @property
    def order(self) -> int:
        return self.cayley.shape[0]

    @cached_property
    def identity(self) -> int:
        n = self.order
        for e in range(n):
            if np.array_equal(self.cayley[e], np.arange(n)) and \
               np.array_equal(self.cayley[:, e], np.arange(n)):
                return e
        raise InvalidGroup("no identity element")

    @cached_property
    def inverse(self) -> np.ndarray:
        n, e = self.order, self.identity
        inv = np.full(n, -1, dtype=np.int64)
        for g in range(n):
            hits = np.where(self.cayley[g] == e)[0]
            if hits.size != 1:
                raise InvalidGroup(f"element {g} has no unique inverse")
            inv[g] = hits[0]
        return inv

    def validate(self) -> dict:
        c = self.cayley
        n = c.shape[0]
        rep: dict = {"latin": True, "associative": True, "identity": True}
        if c.min() < 0 or c.max() >= n:
            return {"latin": False, "associative": False, "identity": False,
                    "passed": False}
        full = np.arange(n)
        for g in range(n):
            if not (np.array_equal(np.sort(c[g]), full)
                    and np.array_equal(np.sort(c[:, g]), full)):
                rep["latin"] = False
        # exhaustive associativity
        lhs = c[c, :]              # lhs[i, j, k] = (ij)k
        rhs = c[:, c]              # rhs[i, j, k] = i(jk)
        rep["associative"] = bool(np.array_equal(lhs, rhs))
        try:
            _ = self.identity
            _ = self.inverse
        except InvalidGroup:
            rep["identity"] = False
        rep["passed"] = rep["latin"] and rep["associative"] and rep["identity"]
        return rep


def cyclic_group(n: int) -> FiniteGroupTable:
    i = np.arange(n)
    return FiniteGroupTable((i[:, None] + i[None, :]) % n,
                            tuple(str(k) for k in range(n)))


def symmetric_group(n: int) -> FiniteGroupTable:
    perms = sorted(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    m = len(perms)
    c = np.empty((m, m), dtype=np.int64)
    for i, p in enumerate(perms):
        for j, q in enumerate(perms):
            c[i, j] = index[tuple(p[q[x]] for x in range(n))]
    return FiniteGroupTable(c, tuple("".join(map(str, p)) for p in perms))


def dihedral_group(n: int) -> FiniteGroupTable:
    """Symmetries of the n-gon, order 2n; element (r, s) = rotation^r flip^s."""
    elems = [(r, s) for s in (0, 1) for r in range(n)]
    index = {e: i for i, e in enumerate(elems)}
    m = 2 * n
    c = np.empty((m, m), dtype=np.int64)
    for i, (r1, s1) in enumerate(elems):
        for j, (r2, s2) in enumerate(elems):
            r = (r1 + (r2 if s1 == 0 else -r2)) % n
            c[i, j] = index[(r, (s1 + s2) % 2)]
    labels = tuple(f"r{r}" if s == 0 else f"fr{r}" for (r, s) in elems)
    return FiniteGroupTable(c, labels)


def direct_product(g: FiniteGroupTable, h: FiniteGroupTable) -> FiniteGroupTable:
    ng, nh = g.order, h.order
    c = np.empty((ng * nh, ng * nh), dtype=np.int64)
    for a in range(ng):
        for b in range(nh):
            for x in range(ng):
                for y in range(nh):
                    c[a * nh + b, x * nh + y] = \
                        g.cayley[a, x] * nh + h.cayley[b, y]
    labels = tuple(f"{p},{q}" for p in g.labels for q in h.labels)
    return FiniteGroupTable(c, labels)


def klein_four_group() -> FiniteGroupTable:
    return direct_product(cyclic_group(2), cyclic_group(2))


def quaternion_group() -> FiniteGroupTable:
    """Q8 = {+-1, +-i, +-j, +-k}; index 2m+s encodes (-1)^s * basis[m]."""
    # products of the units i, j, k: table of (result letter, sign)
    letters = {"1": 0, "i": 1, "j": 2, "k": 3}
    prod = {
        ("1", "1"): ("1", 1), ("1", "i"): ("i", 1), ("1", "j"): ("j", 1),
        ("1", "k"): ("k", 1), ("i", "1"): ("i", 1), ("j", "1"): ("j", 1),
        ("k", "1"): ("k", 1),
        ("i", "i"): ("1", -1), ("j", "j"): ("1", -1), ("k", "k"): ("1", -1),
        ("i", "j"): ("k", 1), ("j", "k"): ("i", 1), ("k", "i"): ("j", 1),
        ("j", "i"): ("k", -1), ("k", "j"): ("i", -1), ("i", "k"): ("j", -1),
    }
    names = ["1", "i", "j", "k"]
    c = np.empty((8, 8), dtype=np.int64)
    for a in range(8):
        for b in range(8):
            la, sa = names[a // 2], (-1) ** (a % 2)
            lb, sb = names[b // 2], (-1) ** (b % 2)
            lc, sc = prod[(la, lb)]
            s = sa * sb * sc
            c[a, b] = 2 * letters[lc] + (0 if s == 1 else 1)
    labels = tuple(f"{'-' if a % 2 else ''}{names[a // 2]}" for a in range(8))
    return FiniteGroupTable(c, labels)


def group_from_permutations(generators) -> FiniteGroupTable:
    """Closure of permutation generators, identity first, BFS order."""
    gens = [tuple(int(x) for x in g) for g in generators]
    if not gens:
        raise InvalidGroup("need at least one generator")
    deg = len(gens[0])
    if any(len(g) != deg or sorted(g) != list(range(deg)) for g in gens):
        raise InvalidGroup("generators must be permutations of the same degree")
    ident = tuple(range(deg))
    elems = [ident]
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = tuple(g[p[x]] for x in range(deg))
                if q not in seen:
                    seen.add(q)
                    elems.append(q)
                    nxt.append(q)
        frontier = nxt
        if len(elems) > 10_000:
            raise InvalidGroup("generated group is too large")
    index = {p: i for i, p in enumerate(elems)}
    m = len(elems)
    c = np.empty((m, m), dtype=np.int64)
    for i, p in enumerate(elems):
        for j, q in enumerate(elems):
            c[i, j] = index[tuple(p[q[x]] for x in range(deg))]
    return FiniteGroupTable(c, tuple("".join(map(str, p)) for p in elems))


# ---------------------------------------------------------------------------
# Kac algebras


@dataclass(frozen=True, eq=False)
class KacAlgebra:
    """(A, delta, epsilon, kappa, h) with involutive antipode and tracial Haar
    state; the Haar state is the trace carried by ``alg``."""

    alg: FiniteStarAlgebra
    comult: np.ndarray   # (n^2, n), row-major legs
    counit: np.ndarray   # (n,)
    antipode: np.ndarray  # (n, n)
    check: "bool" = True

    def __post_init__(self):
        n = self.alg.dim
        cap = get_config().dim_cap
        if n > cap:
            raise InvalidKacAlgebra(
                f"dimension {n} exceeds dim_cap={cap}; use "
                "config.override(dim_cap=...) to allow it")
        object.__setattr__(self, "comult",
                           np.asarray(self.comult, dtype=np.complex128))
        object.__setattr__(self, "counit",
                           np.asarray(self.counit, dtype=np.complex128))
        object.__setattr__(self, "antipode",
                           np.asarray(self.antipode, dtype=np.complex128))
        if self.comult.shape != (n * n, n):
            raise DimensionMismatch(f"comult must be ({n * n}, {n})")
        if self.counit.shape != (n,) or self.antipode.shape != (n, n):
            raise DimensionMismatch("counit/antipode shapes")
        if self.check:
            rep = validate_kac(self)
            if not rep["passed"]:
                bad = {k: v for k, v in rep.items()
                       if isinstance(v, float) and v > np.sqrt(get_config().eps)}
                raise InvalidKacAlgebra(f"Kac axioms fail: {bad}")

    @property
    def dim(self) -> int:
        return self.alg.dim

    @property
    def haar(self) -> np.ndarray:
        return self.alg.trace

    def op(self) -> "KacAlgebra":
        """Same algebra with the opposite comultiplication (antipode kept)."""
        n = self.dim
        return KacAlgebra(self.alg, flip_matrix(n, n) @ self.comult,
                          self.counit, self.antipode, check=False)

    def is_commutative(self, eps: float | None = None) -> bool:
        m = self.alg.mult
        return float(np.abs(m - m.transpose(1, 0, 2)).max()) <= resolve_eps(eps)

    def is_cocommutative(self, eps: float | None = None) -> bool:
        n = self.dim
        r = np.abs(self.comult - flip_matrix(n, n) @ self.comult).max()
        return float(r) <= resolve_eps(eps)


def validate_kac(k: KacAlgebra, eps: float | None = None) -> dict:
    """Residuals for every Kac algebra axiom plus a ``passed`` flag."""
    eps = resolve_eps(eps)
    a = k.alg
    n = a.dim
    m, s = a.mult, a.star
    d, ct, kp, h = k.comult, k.counit, k.antipode, a.trace
    dr = d.reshape(n, n, n)
    rep: dict = {}
    rep["algebra"] = a.validate(eps)
    eye = np.eye(n)

    lhs = d @ m.reshape(n * n, n).T
    rhs = np.einsum("rsi,tuj,rtp,suq->pqij", dr, dr, m, m,
                    optimize=True).reshape(n * n, n * n)
    rep["comult_multiplicative"] = float(np.abs(lhs - rhs).max())
    rep["comult_star"] = float(np.abs(d @ s - np.kron(s, s) @ d.conj()).max())
    rep["comult_unital"] = float(
        np.abs(d @ a.unit - np.kron(a.unit, a.unit)).max())
    rep["coassociativity"] = float(np.abs(
        np.kron(d, eye) @ d - np.kron(eye, d) @ d).max())
    rep["counit_left"] = float(np.abs(
        np.einsum("pqi,p->qi", dr, ct, optimize=True) - eye).max())
    rep["counit_right"] = float(np.abs(
        np.einsum("pqi,q->pi", dr, ct, optimize=True) - eye).max())
    rep["counit_multiplicative"] = float(np.abs(
        np.einsum("ijk,k->ij", m, ct, optimize=True)
        - np.outer(ct, ct)).max())
    rep["counit_unital"] = float(abs(ct @ a.unit - 1.0))
    lk = np.einsum("rp,rqk->pqk", kp, m, optimize=True)
    rep["antipode_left"] = float(np.abs(
        np.einsum("pqk,pqi->ki", lk, dr, optimize=True)
        - np.outer(a.unit, ct)).max())
    rk = np.einsum("sq,psk->pqk", kp, m, optimize=True)
    rep["antipode_right"] = float(np.abs(
        np.einsum("pqk,pqi->ki", rk, dr, optimize=True)
        - np.outer(a.unit, ct)).max())
    rep["antipode_involutive"] = float(np.abs(kp @ kp - eye).max())
    lhs = np.einsum("kl,ijl->ijk", kp, m, optimize=True)
    rhs = np.einsum("pj,qi,pqk->ijk", kp, kp, m, optimize=True)
    rep["antipode_antimultiplicative"] = float(np.abs(lhs - rhs).max())
    rep["antipode_star"] = float(np.abs(kp @ s - s @ kp.conj()).max())
    rep["antipode_counit"] = float(np.abs(ct @ kp - ct).max())
    rep["antipode_haar"] = float(np.abs(h @ kp - h).max())
    rep["haar_left_invariant"] = float(np.abs(
        np.einsum("pqi,p->qi", dr, h, optimize=True) - np.outer(h, a.unit).T).max())
    rep["haar_right_invariant"] = float(np.abs(
        np.einsum("pqi,q->pi", dr, h, optimize=True) - np.outer(a.unit, h)).max())
    rep["commutative"] = bool(k.is_commutative(eps))
    rep["cocommutative"] = bool(k.is_cocommutative(eps))
    rep["passed"] = bool(
        rep["algebra"]["passed"]
        and all(v <= np.sqrt(eps) for key, v in rep.items()
                if isinstance(v, float)))
    return rep


def function_algebra(g: FiniteGroupTable) -> KacAlgebra:
    """C(G) with pointwise product, delta(f)(a, b) = f(ab), uniform Haar."""
    n = g.order
    alg = commutative_algebra(n, labels=tuple(f"d[{x}]" for x in g.labels))
    d = np.zeros((n * n, n), dtype=np.complex128)
    for a in range(n):
        for b in range(n):
            d[a * n + b, g.cayley[a, b]] = 1.0
    ct = np.zeros(n, dtype=np.complex128)
    ct[g.identity] = 1.0
    kp = np.zeros((n, n), dtype=np.complex128)
    for x in range(n):
        kp[g.inverse[x], x] = 1.0
    return KacAlgebra(alg, d, ct, kp, check=False)


def group_algebra(g: FiniteGroupTable) -> KacAlgebra:
    """C[G] with convolution product, group-like comultiplication, Haar = the
    coefficient of the identity."""
    n = g.order
    mult = np.zeros((n, n, n), dtype=np.complex128)
    for a in range(n):
        for b in range(n):
            mult[a, b, g.cayley[a, b]] = 1.0
    unit = np.zeros(n, dtype=np.complex128)
    unit[g.identity] = 1.0
    star = np.zeros((n, n), dtype=np.complex128)
    for x in range(n):
        star[g.inverse[x], x] = 1.0
    trace = np.zeros(n, dtype=np.complex128)
    trace[g.identity] = 1.0
    alg = FiniteStarAlgebra(mult, unit, star, trace,
                            labels=tuple(f"u[{x}]" for x in g.labels),
                            check=False)
    d = np.zeros((n * n, n), dtype=np.complex128)
    for x in range(n):
        d[x * n + x, x] = 1.0
    ct = np.ones(n, dtype=np.complex128)
    return KacAlgebra(alg, d, ct, star.real.astype(np.complex128), check=False)


# ---------------------------------------------------------------------------
# group actions and crossed products


@dataclass(frozen=True, eq=False)
class GroupAction:
    """Action of a finite group by trace-preserving *-automorphisms."""

    group: FiniteGroupTable
    target: FiniteStarAlgebra
    automorphisms: np.ndarray  # (|G|, n, n)

    def __post_init__(self):
        auto = np.asarray(self.automorphisms, dtype=np.complex128)
        object.__setattr__(self, "automorphisms", auto)
        ng, n = self.group.order, self.target.dim
        if auto.shape != (ng, n, n):
            raise DimensionMismatch(f"need {ng} automorphism matrices of size {n}")
        rep = self.validate()
        if not rep["passed"]:
            raise InvalidEmbedding(f"not a trace-preserving action: {rep}")

    def validate(self, eps: float | None = None) -> dict:
        eps = resolve_eps(eps)
        g, q, auto = self.group, self.target, self.automorphisms
        rep: dict = {}
        worst_mult = worst_star = worst_trace = 0.0
        for u in auto:
            lhs = np.einsum("ak,ijk->aij", u, q.mult, optimize=True)
            rhs = np.einsum("pi,qj,pqa->aij", u, u, q.mult, optimize=True)
            worst_mult = max(worst_mult, float(np.abs(lhs - rhs).max()))
            worst_star = max(worst_star,
                             float(np.abs(u @ q.star - q.star @ u.conj()).max()))
            worst_trace = max(worst_trace, float(np.abs(q.trace @ u - q.trace).max()))
        rep["multiplicative"] = worst_mult
        rep["star"] = worst_star
        rep["trace"] = worst_trace
        rep["identity"] = float(np.abs(auto[g.identity] - np.eye(q.dim)).max())
        worst = 0.0
        for a in range(g.order):
            for b in range(g.order):
                worst = max(worst, float(np.abs(
                    auto[a] @ auto[b] - auto[g.cayley[a, b]]).max()))
        rep["homomorphism"] = worst
        rep["unital"] = float(max(np.abs(u @ q.unit - q.unit).max() for u in auto))
        rep["passed"] = all(v <= np.sqrt(eps) for v in rep.values()
                            if isinstance(v, float))
        return rep


def trivial_action(group: FiniteGroupTable, q: FiniteStarAlgebra) -> GroupAction:
    auto = np.broadcast_to(np.eye(q.dim, dtype=np.complex128),
                           (group.order, q.dim, q.dim)).copy()
    return GroupAction(group, q, auto)


def permutation_action(group: FiniteGroupTable, perms) -> GroupAction:
    """Action on l^infty(points) by alpha_g(delta_j) = delta_{perms[g][j]}."""
    perms = np.asarray(perms, dtype=np.int64)
    npts = perms.shape[1]
    q = commutative_algebra(npts)
    auto = np.zeros((group.order, npts, npts), dtype=np.complex128)
    for g in range(group.order):
        for j in range(npts):
            auto[g, perms[g, j], j] = 1.0
    return GroupAction(group, q, auto)


def translation_action(group: FiniteGroupTable) -> GroupAction:
    """Left translation of G on l^infty(G)."""
    return permutation_action(group, group.cayley)


def crossed_product(action: GroupAction):
    """Crossed product Q x| G with its dual coaction of the group algebra.

    Basis (q_i u_g) ordered i * |G| + g.  Returns (P, pi) where pi is the
    dual coaction P -> P (x) C[Gamma], q u_g -> (q u_g) (x) u_g.
    """
    from .coaction import CoactionMap  # deferred, avoids an import cycle

    g, q, auto = action.group, action.target, action.automorphisms
    ng, nq = g.order, q.dim
    n = nq * ng
    mult = np.zeros((n, n, n), dtype=np.complex128)
    for a in range(ng):
        for b in range(ng):
            c = g.cayley[a, b]
            # (q_i u_a)(q_j u_b) = q_i alpha_a(q_j) u_{ab}
            prods = np.einsum("pj,ipk->ijk", auto[a], q.mult, optimize=True)
            for i in range(nq):
                for j in range(nq):
                    mult[i * ng + a, j * ng + b, c::ng] += prods[i, j]
    unit = np.zeros(n, dtype=np.complex128)
    star = np.zeros((n, n), dtype=np.complex128)
    trace = np.zeros(n, dtype=np.complex128)
    for i in range(nq):
        unit[i * ng + g.identity] = q.unit[i]
        trace[i * ng + g.identity] = q.trace[i]
    for a in range(ng):
        ainv = g.inverse[a]
        # (q_i u_a)^* = alpha_{a^-1}(q_i^*) u_{a^-1}
        block = auto[ainv] @ q.star
        for i in range(nq):
            star[np.arange(nq) * ng + ainv, i * ng + a] = block[:, i]
    labels = tuple(f"{x}.u[{y}]" for x in q.labels for y in g.labels)
    p = FiniteStarAlgebra(mult, unit, star, trace, labels)
    kdual = group_algebra(g)
    f = np.zeros((n * ng, n), dtype=np.complex128)
    for i in range(nq):
        for a in range(ng):
            col = i * ng + a
            f[col * ng + a, col] = 1.0
    pi = CoactionMap(kac=kdual, target=p, map=f, kind="coaction")
    return p, pi
