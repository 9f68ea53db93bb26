"""(Anti)coactions of Kac algebras on finite-dimensional *-algebras.

A map beta: B -> B (x) A is stored as a matrix on coefficients of shape
(dim B * dim A, dim B), tensor legs row-major.  ``kind`` distinguishes
coactions (multiplicative), anticoactions (antimultiplicative with the
A-legs of products reversed), and "none" for maps like the twisted tensor
product that satisfy only the comodule and averaging axioms.

The three twists o/t/kappa realize the equivalent views of an anticoaction:
the same coefficients over the opposite algebra, the transposition twist,
and the antipode twist over the co-opposite Kac algebra.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from .algebra import (
    FiniteStarAlgebra,
    SubalgebraEmbedding,
    function_of,
    left_regular,
    matrix_algebra,
    opposite_algebra,
    spectrum_bounds,
    subalgebra_from_basis,
    tensor_algebra,
)
from .config import get_config, resolve_eps
from .corep import Corepresentation, corep_of_coaction, pi_u_expectation, same_kac
from .errors import (
    CrossCheckFailed,
    DimensionMismatch,
    IncompleteSystemWarning,
    KindMismatch,
    MixedAlgebras,
    NoTransposition,
    NotACoaction,
)
from .kac import GroupAction, KacAlgebra, function_algebra
from .linalg import flip_matrix, gram_schmidt, matrix_rank, nullspace

KINDS = ("coaction", "anticoaction", "none")


@dataclass(frozen=True, eq=False)
class CoactionMap:
    kac: KacAlgebra
    target: FiniteStarAlgebra
    map: np.ndarray  # (dim target * dim A, dim target)
    kind: str = "coaction"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise KindMismatch(f"kind must be one of {KINDS}, got {self.kind!r}")
        f = np.asarray(self.map, dtype=np.complex128)
        n, a = self.target.dim, self.kac.dim
        if f.shape != (n * a, n):
            raise DimensionMismatch(
                f"map must be ({n * a}, {n}), got {f.shape}")
        object.__setattr__(self, "map", f)

    @property
    def dims(self) -> tuple[int, int]:
        return self.target.dim, self.kac.dim

    @cached_property
    def reshaped(self) -> np.ndarray:
        n, a = self.dims
        return self.map.reshape(n, a, n)

    def apply(self, x) -> np.ndarray:
        return self.map @ np.asarray(x, complex)

    def validate(self, eps: float | None = None) -> dict:
        """Residuals of the comodule, equivariance and morphism axioms.

        ``passed`` requires every residual checked for this ``kind`` to be
        below eps and the map to be injective.
        """
        eps = resolve_eps(eps)
        n, a = self.dims
        f, fr = self.map, self.reshaped
        b, k = self.target, self.kac
        rep: dict = {}
        eye_a = np.eye(a)
        rep["coassociativity"] = float(np.abs(
            np.kron(f, eye_a) @ f - np.kron(np.eye(n), k.comult) @ f).max())
        rep["counitality"] = float(np.abs(
            np.einsum("kai,a->ki", fr, k.counit, optimize=True) - np.eye(n)).max())
        rep["trace_equivariance"] = float(np.abs(
            np.einsum("kai,k->ai", fr, b.trace, optimize=True)
            - np.outer(k.alg.unit, b.trace)).max())
        rep["unital"] = float(np.abs(
            f @ b.unit - np.kron(b.unit, k.alg.unit)).max())
        if self.kind in ("coaction", "anticoaction"):
            rep["star"] = float(np.abs(
                f @ b.star - np.kron(b.star, k.alg.star) @ f.conj()).max())
        lhs = f @ b.mult.reshape(n * n, n).T
        if self.kind == "coaction":
            rhs = np.einsum("lpi,mqj,lmk,pqr->krij", fr, fr, b.mult,
                            k.alg.mult, optimize=True)
            rep["multiplicative"] = float(np.abs(
                lhs - rhs.reshape(n * a, n * n)).max())
        elif self.kind == "anticoaction":
            rhs = np.einsum("lpi,mqj,lmk,qpr->krij", fr, fr, b.mult,
                            k.alg.mult, optimize=True)
            rep["antimultiplicative"] = float(np.abs(
                lhs - rhs.reshape(n * a, n * n)).max())
        rep["injective"] = bool(matrix_rank(f, eps) == n)
        rep["passed"] = bool(
            all(v <= eps for v in rep.values() if isinstance(v, float))
            and rep["injective"])
        return rep

    def require_valid(self, eps: float | None = None) -> None:
        rep = self.validate(eps)
        if not rep["passed"]:
            raise NotACoaction(
                f"map fails the {self.kind} axioms: "
                f"{ {k: v for k, v in rep.items() if v is not True} }")

    def with_kind(self, kind: str) -> "CoactionMap":
        return replace(self, kind=kind)


def _ensure_same_kac(x, y):
    if not same_kac(x.kac, y.kac):
        raise MixedAlgebras("maps are over different Kac algebras")


# ---------------------------------------------------------------------------
# basic constructors


def regular_coaction(k: KacAlgebra) -> CoactionMap:
    """The comultiplication as a coaction of A on itself."""
    return CoactionMap(kac=k, target=k.alg, map=k.comult, kind="coaction")


def trivial_coaction(k: KacAlgebra, b: FiniteStarAlgebra,
                     kind: str = "coaction") -> CoactionMap:
    f = np.kron(np.eye(b.dim), k.alg.unit[:, None])
    return CoactionMap(kac=k, target=b, map=f, kind=kind)


def kappa_delta(k: KacAlgebra) -> CoactionMap:
    """The canonical anticoaction (id (x) kappa) sigma delta = x_(2) (x)
    kappa(x_(1)) on A itself."""
    n = k.dim
    f = np.kron(np.eye(n), k.antipode) @ flip_matrix(n, n) @ k.comult
    return CoactionMap(kac=k, target=k.alg, map=f, kind="anticoaction")


def coaction_of_action(action: GroupAction, kind: str = "coaction") -> CoactionMap:
    """x -> sum_g alpha_g(x) (x) delta_g over the function algebra of the
    group.  For a commutative Kac algebra this is an anticoaction as well;
    pass kind="anticoaction" to label it so."""
    k = function_algebra(action.group)
    ng, n = action.group.order, action.target.dim
    f = np.zeros((n * ng, n), dtype=np.complex128)
    for g in range(ng):
        f[np.arange(n) * ng + g, :] = action.automorphisms[g]
    return CoactionMap(kac=k, target=action.target, map=f, kind=kind)


def inner_coaction(v: Corepresentation) -> CoactionMap:
    """iota_v(x) = v (x (x) 1) v^* on the matrix algebra of the carrier
    space, for a unitary corepresentation v."""
    h, a = v.dim, v.kac.dim
    vs = v.star_entries()
    ma = v.kac.alg.mult
    ent = np.einsum("aic,bjd,cde->abeij", v.entries, vs, ma, optimize=True)
    f = ent.reshape(h * h * a, h * h)
    return CoactionMap(kac=v.kac, target=matrix_algebra(h), map=f,
                       kind="coaction")


def t_iota_v(v: Corepresentation) -> CoactionMap:
    """The transposed inner anticoaction e_ij -> sum e_ab (x) v_bj v_ai^*."""
    h, a = v.dim, v.kac.dim
    vs = v.star_entries()
    ma = v.kac.alg.mult
    ent = np.einsum("bjc,aid,cde->abeij", v.entries, vs, ma, optimize=True)
    f = ent.reshape(h * h * a, h * h)
    return CoactionMap(kac=v.kac, target=matrix_algebra(h), map=f,
                       kind="anticoaction")


# ---------------------------------------------------------------------------
# the three twists and the equivalence report


def transposition(b: FiniteStarAlgebra, eps: float | None = None) -> np.ndarray:
    """The transposition antiautomorphism t = conjugation composed with star.

    Exists whenever the star matrix in an orthonormal basis is a symmetric
    unitary (true for all constructions bundled here); raises
    :class:`NoTransposition` otherwise.
    """
    eps = resolve_eps(eps)
    t = b.onb @ b.star_onb.conj() @ b.onb_inv
    rep = {}
    rep["involution"] = float(np.abs(t @ t - np.eye(b.dim)).max())
    lhs = np.einsum("kl,ijl->ijk", t, b.mult, optimize=True)
    rhs = np.einsum("pj,qi,pqk->ijk", t, t, b.mult, optimize=True)
    rep["antimultiplicative"] = float(np.abs(lhs - rhs).max())
    rep["unital"] = float(np.abs(t @ b.unit - b.unit).max())
    rep["trace"] = float(np.abs(b.trace @ t - b.trace).max())
    rep["star_commutes"] = float(np.abs(t @ b.star - b.star @ t.conj()).max())
    bad = {k: v for k, v in rep.items() if v > np.sqrt(eps)}
    if bad:
        raise NoTransposition(
            f"algebra admits no transposition in this basis: {bad}")
    return t


def o_twist(c: CoactionMap) -> CoactionMap:
    """Same coefficients viewed over the opposite algebra."""
    flipped = {"coaction": "anticoaction", "anticoaction": "coaction"}
    return CoactionMap(kac=c.kac, target=opposite_algebra(c.target), map=c.map,
                       kind=flipped.get(c.kind, c.kind))


def t_twist(c: CoactionMap, eps: float | None = None) -> CoactionMap:
    """(t (x) id) beta t, with t the transposition of the target."""
    t = transposition(c.target, eps)
    f = np.kron(t, np.eye(c.kac.dim)) @ c.map @ t
    flipped = {"coaction": "anticoaction", "anticoaction": "coaction"}
    return CoactionMap(kac=c.kac, target=c.target, map=f,
                       kind=flipped.get(c.kind, c.kind))


def kappa_twist(c: CoactionMap) -> CoactionMap:
    """(id (x) kappa) beta, a map over the co-opposite Kac algebra."""
    n = c.target.dim
    f = np.kron(np.eye(n), c.kac.antipode) @ c.map
    flipped = {"coaction": "anticoaction", "anticoaction": "coaction"}
    return CoactionMap(kac=c.kac.op(), target=c.target, map=f,
                       kind=flipped.get(c.kind, c.kind))


def def31_views(beta: CoactionMap, eps: float | None = None) -> dict:
    """Validate a candidate anticoaction through all equivalent views.

    Returns the four reports plus ``equivalence_ok``: the anticoaction
    verdict of beta must agree with the coaction verdicts of the o-, t- and
    kappa-twisted views.
    """
    eps = resolve_eps(eps)
    base = beta.with_kind("anticoaction").validate(eps)
    views: dict = {"anticoaction": base}
    verdicts = [base["passed"]]
    o = o_twist(beta.with_kind("anticoaction"))
    views["o_view"] = o.validate(eps)
    verdicts.append(views["o_view"]["passed"])
    try:
        t = t_twist(beta.with_kind("anticoaction"), eps)
        views["t_view"] = t.validate(eps)
        verdicts.append(views["t_view"]["passed"])
    except NoTransposition as exc:
        views["t_view"] = {"passed": None, "error": str(exc)}
    kv = kappa_twist(beta.with_kind("anticoaction"))
    views["kappa_view"] = kv.validate(eps)
    verdicts.append(views["kappa_view"]["passed"])
    views["equivalence_ok"] = bool(all(v == verdicts[0] for v in verdicts))
    return views


# ---------------------------------------------------------------------------
# averaging and fixed points


@dataclass(frozen=True, eq=False)
class FixedPointAlgebra:
    """Image of the averaging projection E = (id (x) h) beta.

    ``embedding.small`` is the abstract fixed-point algebra, realized inside
    the ambient algebra by the columns of ``embedding.embed``.
    """

    ambient: FiniteStarAlgebra
    expectation: np.ndarray
    embedding: SubalgebraEmbedding
    report: dict

    @property
    def algebra(self) -> FiniteStarAlgebra:
        return self.embedding.small

    @property
    def basis(self) -> np.ndarray:
        return self.embedding.embed

    @property
    def dim(self) -> int:
        return self.embedding.small.dim


def averaging_matrix(c: CoactionMap) -> np.ndarray:
    return np.einsum("kai,a->ki", c.reshaped, c.kac.haar, optimize=True)


def averaging(c: CoactionMap, eps: float | None = None) -> FixedPointAlgebra:
    """Fixed-point data of an (anti)coaction or twisted tensor product.

    The report certifies that E is an idempotent, trace-preserving,
    self-adjoint (for the trace form) map whose image is a unital
    *-subalgebra; closure failures raise through the subalgebra builder.
    """
    eps = resolve_eps(eps)
    b = c.target
    e = averaging_matrix(c)
    rep: dict = {}
    rep["idempotent"] = float(np.abs(e @ e - e).max())
    rep["trace_preserving"] = float(np.abs(b.trace @ e - b.trace).max())
    rep["unital"] = float(np.abs(e @ b.unit - b.unit).max())
    g = b.gram
    rep["self_adjoint"] = float(np.abs(e.conj().T @ g - g @ e).max())
    basis = gram_schmidt(e @ b.onb, g, eps)
    emb = subalgebra_from_basis(b, basis, eps)
    rep["fixed_dim"] = int(emb.small.dim)
    rep["passed"] = all(v <= np.sqrt(eps) for v in rep.values()
                        if isinstance(v, float))
    return FixedPointAlgebra(ambient=b, expectation=e, embedding=emb,
                             report=rep)


def invariant_vectors(c: CoactionMap, eps: float | None = None) -> np.ndarray:
    """Orthonormal basis of {x : beta(x) = x (x) 1}, columns."""
    n, a = c.dims
    k = np.kron(np.eye(n), c.kac.alg.unit[:, None])
    return nullspace(c.map - k, eps)


# ---------------------------------------------------------------------------
# twisted tensor products


def beta_tensor_pi(beta: CoactionMap, pi: CoactionMap) -> CoactionMap:
    """Twisted tensor product map on B (x) P.

    b (x) p -> sum b_(1) (x) p_(1) (x) p_(2) b_(2); the third tensor leg
    multiplies the pi-leg before the beta-leg.  The result is generally
    neither a coaction nor an anticoaction, so its kind is "none".
    """
    _ensure_same_kac(beta, pi)
    if beta.kind != "anticoaction":
        raise KindMismatch("beta must be an anticoaction")
    if pi.kind != "coaction":
        raise KindMismatch("pi must be a coaction")
    br = beta.reshaped
    pr = pi.reshaped
    ma = beta.kac.alg.mult
    f = np.einsum("kci,rdq,dcs->krsiq", br, pr, ma, optimize=True)
    nb, a = beta.dims
    npp = pi.target.dim
    target = tensor_algebra(beta.target, pi.target)
    fmat = np.ascontiguousarray(f).reshape(nb * npp * a, nb * npp)
    return CoactionMap(kac=beta.kac, target=target, map=fmat, kind="none")


def fixed_point_tensor(beta: CoactionMap, pi: CoactionMap,
                       eps: float | None = None
                       ) -> tuple[FixedPointAlgebra, float]:
    """Fixed points of the twisted tensor product, cross-checked.

    The independent consistency identity compares the averaging projection
    of the corepresentation-implemented coaction on L(B) (x) P against the
    averaging projection of beta (x) pi transported through lambda (x) id.
    Raises :class:`CrossCheckFailed` when the two disagree.
    """
    eps = resolve_eps(eps)
    gamma = beta_tensor_pi(beta, pi)
    fp = averaging(gamma, eps)
    u = corep_of_coaction(beta)
    e_big = pi_u_expectation(u, pi)
    lam = np.kron(left_regular(beta.target), np.eye(pi.target.dim))
    res = float(np.abs(e_big @ lam - lam @ averaging_matrix(gamma)).max())
    if res > np.sqrt(eps):
        raise CrossCheckFailed(
            f"averaging projections disagree through the regular "
            f"representation (residual {res:.2e})")
    rep = dict(fp.report)
    rep["cross_check"] = res
    return FixedPointAlgebra(fp.ambient, fp.expectation, fp.embedding, rep), res


# ---------------------------------------------------------------------------
# spectral decomposition and eigenmatrices


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    coreps: list
    expectations: list
    dimensions: list
    orthogonality: float
    completeness: float
    complete: bool


def spectral(pi: CoactionMap, coreps=None, eps: float | None = None
             ) -> SpectralDecomposition:
    """Isotypic projections E_u(p) = dim(u) (id (x) h)(pi(p)(1 (x) chi(u)^*)).

    ``coreps`` defaults to the irreducible components of the regular
    corepresentation.  Emits :class:`IncompleteSystemWarning` when the
    projections do not sum to the identity.
    """
    eps = resolve_eps(eps)
    if pi.kind != "coaction":
        raise KindMismatch("spectral decomposition needs a coaction")
    if coreps is None:
        from .corep import decompose_regular

        coreps = [u for u, _ in decompose_regular(pi.kac, eps)]
    a = pi.kac.alg
    pr = pi.reshaped
    n = pi.target.dim
    mats = []
    for u in coreps:
        chi_star = a.star_of(u.character())
        w = np.einsum("cdr,d,r->c", a.mult, chi_star, a.trace, optimize=True)
        e = u.dim * np.einsum("kcq,c->kq", pr, w, optimize=True)
        mats.append(e)
    ortho = 0.0
    for i, ei in enumerate(mats):
        for j, ej in enumerate(mats):
            prod = ei @ ej
            ortho = max(ortho, float(np.abs(
                prod - (ei if i == j else 0)).max()))
    total = sum(mats)
    comp = float(np.abs(total - np.eye(n)).max())
    complete = comp <= np.sqrt(eps)
    if not complete:
        warnings.warn(
            f"spectral projections sum to identity only up to {comp:.2e}",
            IncompleteSystemWarning)
    dims = [matrix_rank(e, eps) for e in mats]
    return SpectralDecomposition(list(coreps), mats, dims, ortho, comp,
                                 complete)


@dataclass(frozen=True, eq=False)
class EigenmatrixResult:
    status: str                    # "unitary" | "nonunitary" | "none"
    matrix: np.ndarray | None      # (H, H, dim P) when found
    residual: float
    unitarity: float


def _eigen_system(pi: CoactionMap, u: Corepresentation) -> np.ndarray:
    h = u.dim
    n = pi.target.dim
    a = pi.kac.dim
    pr = pi.reshaped
    eye_h = np.eye(h)
    lhs = np.einsum("ix,ly,rap->ilraxyp", eye_h, eye_h, pr, optimize=True)
    rhs = np.einsum("ix,yla,rp->ilraxyp", eye_h, u.entries, np.eye(n),
                    optimize=True)
    return (lhs - rhs).reshape(h * h * n * a, h * h * n)


def _check_candidate(system, m, t_alg):
    mvec = m.reshape(-1)
    scale = max(float(np.abs(mvec).max()), 1e-30)
    res = float(np.abs(system @ mvec).max()) / scale
    mm = t_alg.product(t_alg.star_of(mvec), mvec)
    unit_res = t_alg.norm(mm - t_alg.unit)
    return res, unit_res


def eigenmatrix(pi: CoactionMap, u: Corepresentation, prefer=None,
                seed: int | None = None, eps: float | None = None
                ) -> EigenmatrixResult:
    """Solve (id (x) pi) M = M_12 u_13 for M in M_H (x) P, preferring a
    unitary solution.

    A caller-supplied candidate ``prefer`` (shape (H, H, dim P)) is returned
    when it satisfies the equation and is unitary.  Otherwise the solution
    space is computed by one nullspace; solutions are polar-corrected inside
    M_H (x) P via spectral calculus.  Status is "none" when only 0 solves the
    equation, "nonunitary" when no unitary representative is found.
    """
    eps = resolve_eps(eps)
    _ensure_same_kac(pi, u)
    if pi.kind != "coaction":
        raise KindMismatch("eigenmatrix needs a coaction")
    h, n = u.dim, pi.target.dim
    system = _eigen_system(pi, u)
    t_alg = tensor_algebra(matrix_algebra(h), pi.target)
    if prefer is not None:
        cand = np.asarray(prefer, dtype=np.complex128).reshape(h, h, n)
        res, unit_res = _check_candidate(system, cand, t_alg)
        if res <= np.sqrt(eps) and unit_res <= np.sqrt(eps):
            return EigenmatrixResult("unitary", cand, res, unit_res)
    sol = nullspace(system, eps)
    if sol.shape[1] == 0:
        return EigenmatrixResult("none", None, 0.0, np.inf)
    rng = np.random.default_rng(get_config().seed if seed is None else seed)
    best = None
    candidates = [sol.sum(axis=1)]
    for _ in range(6):
        candidates.append(sol @ (rng.standard_normal(sol.shape[1])
                                 + 1j * rng.standard_normal(sol.shape[1])))
    for cvec in candidates:
        nrm = t_alg.norm(cvec)
        if nrm < np.sqrt(eps):
            continue
        cvec = cvec / nrm
        mm = t_alg.product(t_alg.star_of(cvec), cvec)
        lo, hi = spectrum_bounds(t_alg, mm)
        if best is None:
            best = cvec
        if lo <= np.sqrt(eps) * max(hi, 1.0):
            continue  # singular, polar correction impossible
        inv_sqrt = function_of(t_alg, mm, lambda v: np.clip(v, lo, None) ** -0.5)
        w = t_alg.product(cvec, inv_sqrt)
        res, unit_res = _check_candidate(system, w.reshape(h, h, n), t_alg)
        if res <= np.sqrt(eps) and unit_res <= np.sqrt(eps):
            return EigenmatrixResult("unitary", w.reshape(h, h, n), res,
                                     unit_res)
    mvec = best / max(t_alg.norm(best), 1e-30)
    res, unit_res = _check_candidate(system, mvec.reshape(h, h, n), t_alg)
    return EigenmatrixResult("nonunitary", mvec.reshape(h, h, n), res, unit_res)


# ---------------------------------------------------------------------------
# relative ergodicity


def center_basis(b: FiniteStarAlgebra, eps: float | None = None) -> np.ndarray:
    from .algebra import _center_basis

    return _center_basis(b, resolve_eps(eps))


def invariant_center(c: CoactionMap, eps: float | None = None) -> np.ndarray:
    """Basis of Z(B) ^ B^beta, columns."""
    eps = resolve_eps(eps)
    z = center_basis(c.target, eps)
    fx = invariant_vectors(c, eps)
    g = c.target.gram
    pz = z @ np.linalg.solve(z.conj().T @ g @ z, z.conj().T @ g)
    pf = fx @ np.linalg.solve(fx.conj().T @ g @ fx, fx.conj().T @ g)
    n = c.target.dim
    stacked = np.vstack([np.eye(n) - pz, np.eye(n) - pf])
    return nullspace(stacked, eps)


def is_relatively_ergodic(c: CoactionMap, eps: float | None = None) -> bool:
    """Z(B) ^ B^beta = C 1."""
    w = invariant_center(c, eps)
    return w.shape[1] == 1
