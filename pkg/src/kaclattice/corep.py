"""Finite-dimensional corepresentations of a Kac algebra.

A corepresentation on C^H is stored entrywise: ``entries[i, j]`` is the
coefficient vector of u_ij in A.  The defining identity is
(id (x) delta)(u) = u_12 u_13, and unitarity is checked in all four forms
(u u^* = u^* u = 1 and the same for the transpose/conjugate pair).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import algebra_from_matrices, matrix_algebra, tensor_algebra
from .config import resolve_eps
from .errors import DimensionMismatch, KindMismatch, MixedAlgebras, NotUnitary
from .kac import KacAlgebra
from .linalg import column_space, nullspace


def same_kac(k1: KacAlgebra, k2: KacAlgebra, eps: float | None = None) -> bool:
    if k1 is k2:
        return True
    if k1.dim != k2.dim:
        return False
    eps = max(resolve_eps(eps), 1e-12)
    return (
        float(np.abs(k1.alg.mult - k2.alg.mult).max()) <= eps
        and float(np.abs(k1.comult - k2.comult).max()) <= eps
        and float(np.abs(k1.alg.star - k2.alg.star).max()) <= eps
        and float(np.abs(k1.alg.trace - k2.alg.trace).max()) <= eps
        and float(np.abs(k1.antipode - k2.antipode).max()) <= eps
    )


def _ensure_same(k1: KacAlgebra, k2: KacAlgebra):
    if not same_kac(k1, k2):
        raise MixedAlgebras("corepresentations live over different Kac algebras")


@dataclass(frozen=True, eq=False)
class Corepresentation:
    kac: KacAlgebra
    entries: np.ndarray  # (H, H, dim A)

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=np.complex128)
        if e.ndim != 3 or e.shape[0] != e.shape[1] or e.shape[2] != self.kac.dim:
            raise DimensionMismatch(
                f"entries must be (H, H, {self.kac.dim}), got {e.shape}")
        object.__setattr__(self, "entries", e)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def entry(self, i: int, j: int) -> np.ndarray:
        return self.entries[i, j]

    def star_entries(self) -> np.ndarray:
        s = self.kac.alg.star
        return np.einsum("pq,ijq->ijp", s, self.entries.conj(), optimize=True)

    def character(self) -> np.ndarray:
        return np.einsum("iia->a", self.entries)

    def validate(self, eps: float | None = None) -> dict:
        eps = resolve_eps(eps)
        a = self.kac.alg
        n = self.kac.dim
        u = self.entries
        us = self.star_entries()
        dr = self.kac.comult.reshape(n, n, n)
        lhs = np.einsum("pqc,ijc->ijpq", dr, u, optimize=True)
        rhs = np.einsum("ikp,kjq->ijpq", u, u, optimize=True)
        rep = {"corepresentation": float(np.abs(lhs - rhs).max())}
        h = self.dim
        delta = np.einsum("ij,a->ija", np.eye(h), a.unit)
        m = a.mult
        rep["uu_star"] = float(np.abs(np.einsum(
            "ikp,jkq,pqr->ijr", u, us, m, optimize=True) - delta).max())
        rep["star_uu"] = float(np.abs(np.einsum(
            "kip,kjq,pqr->ijr", us, u, m, optimize=True) - delta).max())
        rep["ut_ubar"] = float(np.abs(np.einsum(
            "kip,kjq,pqr->ijr", u, us, m, optimize=True) - delta).max())
        rep["ubar_ut"] = float(np.abs(np.einsum(
            "ikp,jkq,pqr->ijr", us, u, m, optimize=True) - delta).max())
        rep["passed"] = all(v <= np.sqrt(eps) for v in rep.values()
                            if isinstance(v, float))
        return rep

    def require_unitary(self, eps: float | None = None) -> None:
        rep = self.validate(eps)
        if not rep["passed"]:
            raise NotUnitary(f"not a unitary corepresentation: {rep}")


def trivial_corepresentation(k: KacAlgebra, dim: int = 1) -> Corepresentation:
    e = np.einsum("ij,a->ija", np.eye(dim), k.alg.unit)
    return Corepresentation(k, e)


def diagonal_corepresentation(k: KacAlgebra, elements) -> Corepresentation:
    """diag(g_1, ..., g_n) for group-like unitaries g_i.

    Elements are basis indices or coefficient vectors; each must satisfy
    delta(g) = g (x) g, eps(g) = 1 and g^* g = 1.
    """
    vecs = []
    for el in elements:
        if isinstance(el, (int, np.integer)):
            v = np.zeros(k.dim, dtype=np.complex128)
            v[int(el)] = 1.0
        else:
            v = np.asarray(el, dtype=np.complex128)
        res = float(np.abs(k.comult @ v - np.kron(v, v)).max())
        res = max(res, float(abs(k.counit @ v - 1.0)))
        res = max(res, float(np.abs(
            k.alg.product(k.alg.star_of(v), v) - k.alg.unit).max()))
        if res > 1e-9:
            raise NotUnitary(f"element is not group-like (residual {res:.2e})")
        vecs.append(v)
    h = len(vecs)
    e = np.zeros((h, h, k.dim), dtype=np.complex128)
    for i, v in enumerate(vecs):
        e[i, i] = v
    return Corepresentation(k, e)


def tensor_product(v: Corepresentation, w: Corepresentation) -> Corepresentation:
    _ensure_same(v.kac, w.kac)
    m = v.kac.alg.mult
    e = np.einsum("ijc,pqd,cde->ipjqe", v.entries, w.entries, m, optimize=True)
    hv, hw = v.dim, w.dim
    return Corepresentation(v.kac, e.reshape(hv * hw, hv * hw, v.kac.dim))


def conjugate(v: Corepresentation) -> Corepresentation:
    """Entrywise star, no transpose."""
    return Corepresentation(v.kac, v.star_entries())


def direct_sum(v: Corepresentation, w: Corepresentation) -> Corepresentation:
    _ensure_same(v.kac, w.kac)
    h = v.dim + w.dim
    e = np.zeros((h, h, v.kac.dim), dtype=np.complex128)
    e[:v.dim, :v.dim] = v.entries
    e[v.dim:, v.dim:] = w.entries
    return Corepresentation(v.kac, e)


def intertwiners(v: Corepresentation, w: Corepresentation,
                 eps: float | None = None) -> np.ndarray:
    """Stack of a basis of Hom(v, w) = {T : (T (x) 1) v = w (T (x) 1)}.

    Returns shape (d, dim w, dim v); the rank decision uses one SVD at the
    sqrt(eps) relative threshold.
    """
    _ensure_same(v.kac, w.kac)
    hv, hw, a = v.dim, w.dim, v.kac.dim
    lhs = np.einsum("ix,kjc->ijcxk", np.eye(hw), v.entries, optimize=True)
    rhs = np.einsum("ixc,kj->ijcxk", w.entries, np.eye(hv), optimize=True)
    system = (lhs - rhs).reshape(hw * hv * a, hw * hv)
    basis = nullspace(system, eps)
    return np.ascontiguousarray(basis.T).reshape(-1, hw, hv)


def endomorphism_algebra(v: Corepresentation, eps: float | None = None):
    """End(v) as an abstract algebra plus its realizing matrices."""
    mats = intertwiners(v, v, eps)
    return algebra_from_matrices(mats, eps)


def unitary_conjugate(v: Corepresentation, t: np.ndarray) -> Corepresentation:
    """(T (x) 1) v (T^{-1} (x) 1) for an invertible T."""
    tinv = np.linalg.inv(t)
    e = np.einsum("ip,pqc,qj->ijc", t, v.entries, tinv, optimize=True)
    return Corepresentation(v.kac, e)


def fixed_vectors(v: Corepresentation, eps: float | None = None) -> np.ndarray:
    """Orthonormal basis of {xi : v(xi (x) 1) = xi (x) 1}, columns."""
    h, a = v.dim, v.kac.dim
    sys = v.entries.transpose(0, 2, 1).reshape(h * a, h) \
        - np.kron(np.eye(h), v.kac.alg.unit[:, None])
    return nullspace(sys, eps)


def corep_of_coaction(beta) -> Corepresentation:
    """The unitary u_beta with beta(o_j) = sum_i o_i (x) (u_beta)_{ij} in an
    orthonormal basis of the target algebra."""
    if beta.kind not in ("coaction", "anticoaction"):
        raise KindMismatch(f"no corepresentation for kind {beta.kind!r}")
    b = beta.target
    a = beta.kac.dim
    g = (beta.map @ b.onb).reshape(b.dim, a, b.dim)
    entries = np.einsum("ik,kaj->ija", b.onb_inv, g, optimize=True)
    return Corepresentation(beta.kac, entries)


def pi_u(u: Corepresentation, pi):
    """Coaction on L(H) (x) P implemented by u twisted against pi.

    e_ij (x) p  ->  sum_ab e_ab (x) ((1 (x) u_ai) pi(p) (1 (x) u_bj^*)).
    """
    from .coaction import CoactionMap

    _ensure_same(u.kac, pi.kac)
    h = u.dim
    a = u.kac.dim
    ma = u.kac.alg.mult
    p = pi.target
    np_ = p.dim
    piarr = pi.map.reshape(np_, a, np_)
    us = u.star_entries()
    x = np.einsum("ais,sct->aict", u.entries, ma, optimize=True)
    y = np.einsum("aict,bjd,tdr->aibjcr", x, us, ma, optimize=True)
    f = np.einsum("aibjcr,pcq->abprijq", y, piarr, optimize=True)
    f = np.ascontiguousarray(f).reshape(h * h * np_ * a, h * h * np_)
    target = tensor_algebra(matrix_algebra(h), p)
    return CoactionMap(kac=u.kac, target=target, map=f, kind=pi.kind)


def pi_u_expectation(u: Corepresentation, pi) -> np.ndarray:
    """Averaging operator of ``pi_u(u, pi)`` on L(H) (x) P.

    Same einsum pipeline as :func:`pi_u` contracted against the haar state,
    so the carrier algebra is never built; use this when dim L(H) * dim P
    exceeds ``max_algebra_dim``.
    """
    _ensure_same(u.kac, pi.kac)
    h = u.dim
    a = u.kac.dim
    ma = u.kac.alg.mult
    np_ = pi.target.dim
    piarr = pi.map.reshape(np_, a, np_)
    us = u.star_entries()
    x = np.einsum("ais,sct->aict", u.entries, ma, optimize=True)
    y = np.einsum("aict,bjd,tdr->aibjcr", x, us, ma, optimize=True)
    e = np.einsum("aibjcr,pcq,r->abpijq", y, piarr, u.kac.haar, optimize=True)
    d = h * h * np_
    return np.ascontiguousarray(e).reshape(d, d)


def isotypic_components(u: Corepresentation, eps: float | None = None):
    """Split u into irreducible pieces via End(u).

    Returns a list of (irreducible corep, multiplicity).
    """
    end, mats = endomorphism_algebra(u, eps)
    bs = end.block_structure()
    out = []
    for g in range(bs.num_blocks):
        f = bs.minimal_idempotent(g)
        fmat = np.einsum("a,aij->ij", f, mats, optimize=True)
        w = column_space(fmat, eps)
        e = np.einsum("pi,pqc,qj->ijc", w.conj(), u.entries, w, optimize=True)
        out.append((Corepresentation(u.kac, e), bs.block_sizes[g]))
    return out


def decompose_regular(k: KacAlgebra, eps: float | None = None):
    """Irreducible corepresentations of the regular coaction, with
    multiplicities."""
    from .coaction import regular_coaction

    u = corep_of_coaction(regular_coaction(k))
    return isotypic_components(u, eps)
