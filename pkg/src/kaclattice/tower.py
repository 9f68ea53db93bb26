"""Markov inclusions, basic constructions, Jones towers, commuting squares,
and extension of (anti)coactions up the tower.

Conventions.  The inclusion matrix M of B0 inside B1 is indexed
(blocks of B0) x (blocks of B1), with m_ij the multiplicity of B0-block i
inside B1-block j.  Block sizes are n (for B0) and p (for B1), so

    M^t n = p          (dimension count)
    M p   = gamma n    (canonical traces; gamma = dim B1 / dim B0)

and the index of the inclusion is the Perron-Frobenius eigenvalue of MM^t.
The basic construction is realized concretely: B2 is the commutant of the
right action of B0 on the trace Hilbert space of B1, and e1 is the
orthogonal projection onto the image of B0.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _backend
from .algebra import (
    BlockStructure,
    FiniteStarAlgebra,
    SubalgebraEmbedding,
    algebra_from_matrices,
    conditional_expectation,
    matrix_algebra,
    multimatrix_algebra,
    scalars,
    xi_element,
)
from .coaction import CoactionMap, averaging
from .config import get_config, resolve_eps
from .errors import (
    CertificateFailed,
    DimensionMismatch,
    ExtensionInconsistent,
    InvalidEmbedding,
    KindMismatch,
    MixedAlgebras,
    NotAlgebraicData,
    NotInvariant,
    NotIrreducibleWarning,
    NotMarkov,
    TraceIncompatible,
)
from .linalg import gram_schmidt, matrix_rank, nullspace


def same_algebra(x: FiniteStarAlgebra, y: FiniteStarAlgebra) -> bool:
    if x is y:
        return True
    if x.dim != y.dim:
        return False
    tol = 1e-12
    return (np.abs(x.mult - y.mult).max() <= tol
            and np.abs(x.star - y.star).max() <= tol
            and np.abs(x.trace - y.trace).max() <= tol)


# ---------------------------------------------------------------------------
# inclusion data


@dataclass(frozen=True, eq=False)
class InclusionData:
    emb: SubalgebraEmbedding
    matrix: np.ndarray            # (blocks of B0, blocks of B1), integers
    dims_small: tuple[int, ...]   # n_i
    dims_big: tuple[int, ...]     # p_j
    weights_small: tuple[float, ...]
    weights_big: tuple[float, ...]

    @property
    def small(self) -> FiniteStarAlgebra:
        return self.emb.small

    @property
    def big(self) -> FiniteStarAlgebra:
        return self.emb.big


def inclusion_data(emb: SubalgebraEmbedding, eps: float | None = None
                   ) -> InclusionData:
    """Inclusion matrix and trace data of a multimatrix inclusion.

    m_ij is read off as the rank of q_j emb(f_i) inside block j, where f_i
    is a minimal projection of B0-block i and q_j the j-th central
    projection of B1.  Verifies M^t n = p exactly and the weight relation
    rho_i = sum_j n_i p_j^-1 m_ij lambda_j.
    """
    eps = resolve_eps(eps)
    b0, b1 = emb.small, emb.big
    bs0, bs1 = b0.block_structure(), b1.block_structure()
    n = bs0.block_sizes
    p = bs1.block_sizes
    s0, s1 = len(n), len(p)
    m = np.zeros((s0, s1), dtype=np.int64)
    for i in range(s0):
        y = emb.apply(bs0.minimal_idempotent(i))
        for j in range(s1):
            # tr(q_j y) = (lambda_j / p_j) * rank, lambda_j = block weight
            qy = b1.product(bs1.central_projections[j], y)
            lam = bs1.weights[j] / p[j]
            raw = b1.trace_of(qy).real / lam
            mij = int(round(raw))
            if abs(raw - mij) > 1e-6 or mij < 0:
                raise InvalidEmbedding(
                    f"non-integer multiplicity {raw!r} at block pair "
                    f"({i}, {j})")
            m[i, j] = mij
    nv = np.array(n, dtype=np.int64)
    pv = np.array(p, dtype=np.int64)
    if not np.array_equal(m.T @ nv, pv):
        raise InvalidEmbedding(
            f"dimension count M^t n = p fails: M^t n = {(m.T @ nv).tolist()}, "
            f"p = {pv.tolist()}")
    if (m.sum(axis=1) == 0).any() or (m.sum(axis=0) == 0).any():
        raise InvalidEmbedding("inclusion matrix has a zero row or column")
    rho = np.array(bs0.weights, dtype=float)
    lam = np.array(bs1.weights, dtype=float)
    for i in range(s0):
        rhs = sum(n[i] / p[j] * m[i, j] * lam[j] for j in range(s1))
        if abs(rho[i] - rhs) > np.sqrt(eps):
            raise TraceIncompatible(
                f"weight relation fails at block {i}: "
                f"rho = {rho[i]:.12g}, sum = {rhs:.12g}")
    m.setflags(write=False)
    return InclusionData(emb=emb, matrix=m, dims_small=tuple(n),
                         dims_big=tuple(p),
                         weights_small=tuple(float(w) for w in bs0.weights),
                         weights_big=tuple(float(w) for w in bs1.weights))


def scalar_inclusion(big: FiniteStarAlgebra) -> InclusionData:
    emb = SubalgebraEmbedding(small=scalars(), big=big,
                              embed=big.unit[:, None])
    return inclusion_data(emb)


def diagonal_inclusion(sizes) -> InclusionData:
    """(+) M_{n_i} embedded block-diagonally into M_N, N = sum n_i.

    The small trace is the restriction of the normalized matrix trace, so
    the inclusion is Markov exactly when all n_i agree.
    """
    sizes = tuple(int(s) for s in sizes)
    nn = sum(sizes)
    big = matrix_algebra(nn)
    weights = tuple(s / nn for s in sizes)
    small = multimatrix_algebra(sizes, weights=weights)
    bs = small.block_structure()
    embed = np.zeros((nn * nn, small.dim), dtype=np.complex128)
    for g, mg in enumerate(sizes):
        row0 = sum(sizes[:g])
        for k in range(mg):
            for l in range(mg):
                col = bs.block_offset(g) + k * mg + l
                embed[(row0 + k) * nn + (row0 + l), col] = 1.0
    emb = SubalgebraEmbedding(small=small, big=big, embed=embed)
    return inclusion_data(emb)


# ---------------------------------------------------------------------------
# Perron-Frobenius index and the integrality certificate


def _as_int_matrix(m) -> np.ndarray:
    a = np.asarray(m)
    ints = np.rint(np.real(a)).astype(np.int64)
    if np.abs(a - ints).max() > 1e-9 or (ints < 0).any():
        raise DimensionMismatch("inclusion matrix must be nonnegative integers")
    return ints


def markov_index(data, eps: float | None = None) -> float:
    """Perron-Frobenius eigenvalue of MM^t by power iteration.

    ``data`` is an InclusionData or a raw nonnegative integer matrix.
    Warns NotIrreducibleWarning when MM^t is reducible (the spectral radius
    is still returned).
    """
    m = data.matrix if isinstance(data, InclusionData) else _as_int_matrix(data)
    if m.ndim == 1:
        m = m[None, :]
    mm = (m @ m.T).astype(float)
    s = mm.shape[0]
    if s > 1 and (np.linalg.matrix_power(np.eye(s) + mm, s - 1) == 0).any():
        warnings.warn("MM^t is reducible; returning the spectral radius",
                      NotIrreducibleWarning)
    v = np.ones(s)
    lam = 0.0
    for _ in range(100_000):
        w = mm @ v
        nrm = np.linalg.norm(w)
        if nrm == 0:
            return 0.0
        w = w / nrm
        new = float(w @ mm @ w)
        if abs(new - lam) <= 1e-12 * max(1.0, abs(new)):
            return new
        lam, v = new, w
    return lam


def _charpoly_exact(mm: np.ndarray) -> list[Fraction]:
    """Coefficients of det(xI - MM^t), leading first, by Faddeev-LeVerrier."""
    s = mm.shape[0]
    a = [[Fraction(int(mm[i, j])) for j in range(s)] for i in range(s)]
    coeffs = [Fraction(1)]
    mk = None
    for k in range(1, s + 1):
        if mk is None:
            mk = [row[:] for row in a]
        else:
            # M_k = A (M_{k-1} + c_{k-1} I)
            for i in range(s):
                mk[i][i] += coeffs[-1]
            mk = [[sum(a[i][t] * mk[t][j] for t in range(s))
                   for j in range(s)] for i in range(s)]
        c = -sum(mk[i][i] for i in range(s)) / k
        coeffs.append(c)
    return coeffs


def _eval_poly(coeffs: list[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in coeffs:
        acc = acc * x + c
    return acc


def _rational_nullvector(mm: np.ndarray, g: int) -> list[Fraction] | None:
    """A nonzero rational solution of (MM^t - g I) v = 0, by exact
    Gauss elimination; None when g is not an eigenvalue."""
    s = mm.shape[0]
    rows = [[Fraction(int(mm[i, j])) - (g if i == j else 0) for j in range(s)]
            for i in range(s)]
    piv_cols = []
    r = 0
    for c in range(s):
        piv = next((i for i in range(r, s) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][c]
        rows[r] = [x / inv for x in rows[r]]
        for i in range(s):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
    if r == s:
        return None
    free = next(c for c in range(s) if c not in piv_cols)
    v = [Fraction(0)] * s
    v[free] = Fraction(1)
    for i, c in enumerate(piv_cols):
        v[c] = -rows[i][free]
    return v


def integrality_check(data, eps: float | None = None) -> dict:
    """Exact-arithmetic certificate that the index of a canonical-trace
    Markov inclusion is the integer gamma = dim(B1)/dim(B0).

    Accepts an InclusionData whose two traces are canonical (checked through
    the multiplication element mu mu^*(1); NotAlgebraicData otherwise), or a
    raw integer inclusion matrix, for which a canonical-trace realization is
    solved for exactly; NotAlgebraicData when none exists (irrational
    Perron-Frobenius index).  CertificateFailed signals input whose exact
    arithmetic contradicts the eigen-relations.
    """
    eps = resolve_eps(eps)
    cert: dict = {}
    if isinstance(data, InclusionData):
        for name, alg in (("small", data.small), ("big", data.big)):
            xi, scalar = xi_element(alg, eps)
            if not scalar:
                raise NotAlgebraicData(
                    f"the {name} algebra's trace is not canonical "
                    f"(mu mu^*(1) is not scalar); the integrality argument "
                    f"applies only to canonical traces")
        m = data.matrix.astype(np.int64)
        nv = [int(x) for x in data.dims_small]
        pv = [int(x) for x in data.dims_big]
        cert["source"] = "inclusion"
    else:
        m = _as_int_matrix(data)
        if m.ndim == 1:
            m = m[None, :]
        mm = m @ m.T
        pf = markov_index(m)
        coeffs = _charpoly_exact(mm)
        g = int(round(pf))
        if g < 1 or _eval_poly(coeffs, Fraction(g)) != 0 or abs(pf - g) > 1e-6:
            raise NotAlgebraicData(
                f"the canonical-trace compatibility equations are "
                f"unsolvable: the Perron-Frobenius index {pf:.10f} of MM^t "
                f"is not an integer, so no block sizes realize canonical "
                f"traces on both sides", index=pf)
        nf = _rational_nullvector(mm, g)
        if nf is None:
            raise CertificateFailed(
                f"{g} passed the characteristic polynomial test but "
                f"(MM^t - {g})v = 0 has no rational solution")
        den = 1
        for x in nf:
            den = den * x.denominator // math.gcd(den, x.denominator)
        ni = [int(x * den) for x in nf]
        if all(x <= 0 for x in ni):
            ni = [-x for x in ni]
        if any(x <= 0 for x in ni):
            raise NotAlgebraicData(
                f"integer eigenvalue {g} has no positive eigenvector; "
                f"it is not the Perron-Frobenius eigenvalue", index=pf)
        div = 0
        for x in ni:
            div = math.gcd(div, x)
        nv = [x // div for x in ni]
        pv = [int(x) for x in (m.T @ np.array(nv, dtype=np.int64))]
        cert["source"] = "matrix"
        cert["solved_dims"] = {"n": nv, "p": pv}
    nvec = np.array(nv, dtype=object)
    pvec = np.array(pv, dtype=object)
    dim0 = int(sum(x * x for x in nv))
    dim1 = int(sum(x * x for x in pv))
    gamma = Fraction(dim1, dim0)
    cert["gamma"] = gamma
    cert["dims"] = {"dim_small": dim0, "dim_big": dim1}
    if [int(x) for x in (m.T @ nvec)] != pv:
        raise CertificateFailed(
            f"M^t n = p fails exactly: {[int(x) for x in m.T @ nvec]} "
            f"vs {pv}")
    mp = [Fraction(int(x)) for x in (m @ pvec)]
    if mp != [gamma * x for x in nv]:
        raise CertificateFailed(
            f"M p = gamma n fails exactly: M p = {mp}, "
            f"gamma n = {[gamma * x for x in nv]}")
    mmtn = (m @ m.T) @ nvec
    if [Fraction(int(x)) for x in mmtn] != [gamma * x for x in nv]:
        raise CertificateFailed("(MM^t) n = gamma n fails exactly")
    alpha, beta = gamma.numerator, gamma.denominator
    cert["alpha"], cert["beta"] = alpha, beta
    steps = []
    if beta > 1:
        # beta^k would have to divide every p_j for all k; exhibit the
        # contradiction by dividing out as long as exactness holds
        q = list(pv)
        k = 0
        while all(x % beta == 0 for x in q):
            q = [x // beta for x in q]
            k += 1
            steps.append({"power": k, "p_over_beta_k": list(q)})
            if max(q) < beta:
                break
        cert["cascade"] = steps
        raise CertificateFailed(
            f"gamma = {alpha}/{beta} is not an integer, yet the "
            f"eigen-relations hold; the divisibility cascade stops at "
            f"beta^{k + 1}, so the input data is inconsistent")
    cert["cascade"] = steps
    cert["integer"] = True
    pf_float = markov_index(m)
    cert["pf_float"] = pf_float
    if abs(pf_float - int(gamma)) > 1e-9:
        raise CertificateFailed(
            f"floating-point index {pf_float!r} disagrees with exact "
            f"gamma = {int(gamma)}")
    return {"index": int(gamma), "integer": True, "certificate": cert}


# ---------------------------------------------------------------------------
# basic construction


def _require_canonical(data: InclusionData, eps: float) -> None:
    for name, alg in (("small", data.small), ("big", data.big)):
        _, scalar = xi_element(alg, eps)
        if not scalar:
            raise NotMarkov(
                f"the {name} algebra's trace is not canonical; "
                f"the inclusion is not Markov")


def _matrices_of(alg: FiniteStarAlgebra, coeffs: np.ndarray,
                 side: str = "left") -> np.ndarray:
    """Stack of ON-coordinate matrices of left/right multiplication by the
    columns of ``coeffs``."""
    n = alg.dim
    cols = np.asarray(coeffs, dtype=np.complex128)
    if cols.ndim == 1:
        cols = cols[:, None]
    out = np.empty((cols.shape[1], n, n), dtype=np.complex128)
    for t in range(cols.shape[1]):
        m = (alg.left_matrix(cols[:, t]) if side == "left"
             else alg.right_matrix(cols[:, t]))
        out[t] = alg.onb_inv @ m @ alg.onb
    return out


def _align_blocks(b2: FiniteStarAlgebra, ref_projs: np.ndarray,
                  eps: float) -> None:
    """Reorder the block structure of b2 so block k matches the k-th
    reference central projection (coefficient vectors, rows)."""
    bs = b2.block_structure()
    s = bs.num_blocks
    if s != ref_projs.shape[0]:
        raise CertificateFailed(
            f"basic construction has {s} blocks, expected {ref_projs.shape[0]}")
    perm = []
    for k in range(s):
        dists = [b2.norm(ref_projs[k] - bs.central_projections[g])
                 for g in range(s)]
        g = int(np.argmin(dists))
        if dists[g] > np.sqrt(eps) or g in perm:
            raise CertificateFailed(
                "central projections of the basic construction do not match "
                "the right action of the small algebra's center")
        perm.append(g)
    if perm == list(range(s)):
        return
    sizes = tuple(bs.block_sizes[g] for g in perm)
    weights = tuple(bs.weights[g] for g in perm)
    cps = bs.central_projections[perm]
    coord = np.zeros(b2.dim, dtype=np.int64)
    pos = 0
    for g in perm:
        off, mg = bs.block_offset(g), bs.block_sizes[g]
        coord[pos:pos + mg * mg] = np.arange(off, off + mg * mg)
        pos += mg * mg
    iso = bs.block_isomorphism[:, coord]
    b2._set_block_structure(BlockStructure(
        block_sizes=sizes, weights=weights, central_projections=cps,
        block_isomorphism=iso))


def basic_construction(data: InclusionData, eps: float | None = None
                       ) -> tuple[FiniteStarAlgebra, np.ndarray, InclusionData]:
    """<B1, e1> realized as the commutant of the right B0-action on the
    trace Hilbert space of B1.

    Returns (B2, e1, data for B1 in B2).  e1 is the coefficient vector in B2
    of the orthogonal projection onto the image of B0; the new inclusion
    matrix is M^t, and the trace of B2 is again canonical.
    """
    eps = resolve_eps(eps)
    _require_canonical(data, eps)
    emb = data.emb
    b0, b1 = emb.small, emb.big
    n1 = b1.dim
    if n1 * n1 > get_config().max_algebra_dim:
        raise DimensionMismatch(
            f"basic construction would act on a {n1}-dimensional Hilbert "
            f"space; the commutant could reach dimension {n1 * n1}, above "
            f"the configured cap {get_config().max_algebra_dim}")
    rmats = _matrices_of(b1, emb.embed, side="right")
    eye = np.eye(n1)
    rows = np.concatenate([
        np.kron(eye, r.T) - np.kron(r, eye) for r in rmats], axis=0)
    comm = nullspace(rows, eps)
    mats = np.ascontiguousarray(comm.T).reshape(-1, n1, n1)
    b2, stack = algebra_from_matrices(mats, eps)
    flat = stack.reshape(b2.dim, n1 * n1)

    def to_b2(matrix: np.ndarray) -> np.ndarray:
        coeffs = flat.conj() @ matrix.reshape(-1) / n1
        res = float(np.abs(coeffs @ flat - matrix.reshape(-1)).max())
        if res > np.sqrt(eps):
            raise CertificateFailed(
                f"matrix is not in the commutant (residual {res:.2e})")
        return coeffs

    # canonical block order: block k of B2 <-> right action of B0's k-th
    # central projection
    bs0 = b0.block_structure()
    zmats = _matrices_of(b1, emb.embed @ bs0.central_projections.T,
                         side="right")
    refs = np.stack([to_b2(z) for z in zmats])
    _align_blocks(b2, refs, eps)

    w = b1.onb_inv @ emb.embed @ b0.onb
    e1m = w @ w.conj().T
    e1 = to_b2(e1m)

    lmats = _matrices_of(b1, np.eye(n1), side="left")
    embed12 = np.stack([to_b2(l) for l in lmats], axis=1)
    emb12 = SubalgebraEmbedding(small=b1, big=b2, embed=embed12)
    newdata = inclusion_data(emb12, eps)
    if not np.array_equal(newdata.matrix, data.matrix.T):
        raise CertificateFailed(
            f"basic construction inclusion matrix "
            f"{newdata.matrix.tolist()} is not the transpose of "
            f"{data.matrix.tolist()}")

    # Markov property tr(e1 w) = index^-1 tr(w) on a basis of B1
    idx = markov_index(data)
    lhs = np.array([b2.trace_of(b2.product(e1, embed12[:, i]))
                    for i in range(n1)])
    res = float(np.abs(lhs - b1.trace / idx).max())
    if res > np.sqrt(eps):
        raise NotMarkov(
            f"tr(e1 w) = index^-1 tr(w) fails (residual {res:.2e})")
    return b2, e1, newdata


@dataclass(frozen=True, eq=False)
class TowerLevelChain:
    levels: list                       # B_0, B_1, ..., B_{k+1}
    embeddings: list                   # consecutive SubalgebraEmbeddings
    jones_projections: list            # e_i as coefficients in levels[i+1]
    index: float
    data: list = field(default_factory=list)  # InclusionData per step

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def embed_up(self, i: int, j: int, x) -> np.ndarray:
        """Coefficients in B_j of an element given in B_i."""
        y = np.asarray(x, complex)
        for k in range(i, j):
            y = self.embeddings[k].apply(y)
        return y


def jones_tower(data: InclusionData, k: int, eps: float | None = None
                ) -> TowerLevelChain:
    """k basic constructions over a Markov inclusion.

    levels = [B_0, ..., B_{k+1}]; jones_projections[i] is e_{i+1} in
    B_{i+2} coordinates.
    """
    if k < 0:
        raise DimensionMismatch("depth must be nonnegative")
    eps = resolve_eps(eps)
    levels = [data.small, data.big]
    embeddings = [data.emb]
    datas = [data]
    jones = []
    cur = data
    for _ in range(k):
        b2, e1, cur = basic_construction(cur, eps)
        levels.append(b2)
        embeddings.append(cur.emb)
        datas.append(cur)
        jones.append(e1)
    return TowerLevelChain(levels=levels, embeddings=embeddings,
                           jones_projections=jones,
                           index=markov_index(data), data=datas)


# ---------------------------------------------------------------------------
# extension of (anti)coactions up the tower


def restrict_coaction(beta: CoactionMap, emb: SubalgebraEmbedding,
                      eps: float | None = None) -> CoactionMap:
    """Restriction of beta along emb: the unique beta0 on the small algebra
    with beta(emb(x)) = (emb (x) id)(beta0(x)); NotInvariant when the image
    is not invariant."""
    eps = resolve_eps(eps)
    if not same_algebra(beta.target, emb.big):
        raise MixedAlgebras("beta does not act on the embedding's codomain")
    a = beta.kac.dim
    big = np.kron(emb.embed, np.eye(a))
    rhs = beta.map @ emb.embed
    sol, *_ = np.linalg.lstsq(big, rhs, rcond=None)
    res = float(np.abs(big @ sol - rhs).max())
    if res > np.sqrt(eps):
        raise NotInvariant(
            f"the embedded subalgebra is not invariant (residual {res:.2e})")
    return CoactionMap(kac=beta.kac, target=emb.small, map=sol, kind=beta.kind)


def _extension_step(beta: CoactionMap, emb: SubalgebraEmbedding,
                    e_next: np.ndarray, eps: float,
                    order: str = "forward") -> CoactionMap:
    """The unique (anti)coaction on emb.big extending beta and fixing e_next."""
    bnext = emb.big
    kac = beta.kac
    n, a = bnext.dim, kac.dim
    anti = beta.kind == "anticoaction"
    seeds = []
    for i in range(beta.target.dim):
        vec = emb.embed[:, i]
        img = (np.kron(emb.embed, np.eye(a)) @ beta.map[:, i]).reshape(n, a)
        seeds.append((vec, img))
    seeds.append((np.asarray(e_next, complex),
                  np.outer(np.asarray(e_next, complex), kac.alg.unit)))
    if order == "reversed":
        seeds = seeds[::-1]
    elif order != "forward":
        raise ValueError("order must be 'forward' or 'reversed'")

    g = bnext.gram
    accepted = []          # (vec, img)
    onb_cols = np.zeros((n, 0), dtype=np.complex128)

    def try_add(vec, img):
        nonlocal onb_cols
        cand = gram_schmidt(np.concatenate([onb_cols, vec[:, None]], axis=1),
                            g, eps)
        if cand.shape[1] > onb_cols.shape[1]:
            onb_cols = cand
            accepted.append((vec, img))
            return True
        return False

    for vec, img in seeds:
        try_add(vec, img)
    frontier = list(accepted)
    rounds = 0
    while onb_cols.shape[1] < n and frontier and rounds < n + 2:
        new = []
        for vec, img in frontier:
            for svec, simg in seeds:
                pvec = _backend.product(bnext.mult, vec, svec)
                before = onb_cols.shape[1]
                # compute the twisted image only if the product enlarges
                # the span
                cand = gram_schmidt(
                    np.concatenate([onb_cols, pvec[:, None]], axis=1), g, eps)
                if cand.shape[1] == before:
                    continue
                pimg = _backend.twisted_image(bnext.mult, kac.alg.mult,
                                              img, simg, anti)
                onb_cols = cand
                accepted.append((pvec, pimg))
                new.append((pvec, pimg))
        frontier = new
        rounds += 1
    if onb_cols.shape[1] < n:
        raise ExtensionInconsistent(
            f"the subalgebra and its Jones projection generate only a "
            f"{onb_cols.shape[1]}-dimensional subspace of the "
            f"{n}-dimensional level")
    t = np.stack([v for v, _ in accepted], axis=1)
    imgs = np.stack([im.reshape(-1) for _, im in accepted], axis=1)
    f = imgs @ np.linalg.pinv(t)
    solve_res = float(np.abs(f @ t - imgs).max())
    if solve_res > np.sqrt(eps) * max(1.0, float(np.abs(imgs).max())):
        raise ExtensionInconsistent(
            f"the extension system is inconsistent (residual {solve_res:.2e})")
    # re-impose the prescribed restriction exactly
    pinv = np.linalg.pinv(emb.embed)
    want = np.kron(emb.embed, np.eye(a)) @ beta.map
    f = f + (want - f @ emb.embed) @ pinv
    out = CoactionMap(kac=kac, target=bnext, map=f, kind=beta.kind)
    rep = out.validate(eps)
    if not rep["passed"]:
        raise ExtensionInconsistent(
            f"extension does not satisfy the {beta.kind} axioms: "
            f"{ {k: v for k, v in rep.items() if v is not True} }")
    fix = float(np.abs(out.apply(e_next)
                       - np.kron(np.asarray(e_next, complex),
                                 kac.alg.unit)).max())
    if fix > np.sqrt(eps):
        raise ExtensionInconsistent(
            f"extension moves the Jones projection (residual {fix:.2e})")
    return out


def extend_anticoaction(beta1: CoactionMap, chain: TowerLevelChain,
                        eps: float | None = None, order: str = "forward"
                        ) -> list[CoactionMap]:
    """The unique sequence of (anti)coactions up the tower.

    beta1 acts on chain.levels[1] and must leave levels[0] invariant.
    Returns [beta_0, beta_1, ..., beta_depth]; beta_{i+1} extends beta_i and
    fixes the Jones projection e_i.  ``order`` controls the spanning-set
    enumeration only; the result is unique.
    """
    eps = resolve_eps(eps)
    if beta1.kind not in ("coaction", "anticoaction"):
        raise KindMismatch("the map to extend must be a coaction or "
                           "anticoaction")
    if not same_algebra(beta1.target, chain.levels[1]):
        raise MixedAlgebras("beta1 does not act on tower level 1")
    beta1.require_valid(eps)
    beta0 = restrict_coaction(beta1, chain.embeddings[0], eps)
    beta0.require_valid(eps)
    betas = [beta0, beta1]
    for i, e in enumerate(chain.jones_projections):
        nxt = _extension_step(betas[-1], chain.embeddings[i + 1], e, eps,
                              order=order)
        betas.append(nxt)
    return betas


# ---------------------------------------------------------------------------
# commuting squares


@dataclass(frozen=True, eq=False)
class CommutingSquareData:
    """Four embeddings forming a square inside ``top_right``:

        top_left    ->  top_right
           ^                ^
         left             right
           |                |
        bottom_left ->  bottom_right

    ``top`` embeds top_left into top_right, ``right`` embeds bottom_right
    into top_right, ``left`` embeds bottom_left into top_left and ``bottom``
    embeds bottom_left into bottom_right.
    """

    top: SubalgebraEmbedding
    right: SubalgebraEmbedding
    left: SubalgebraEmbedding
    bottom: SubalgebraEmbedding

    def __post_init__(self):
        if not same_algebra(self.top.big, self.right.big):
            raise MixedAlgebras("top and right embeddings target different "
                                "algebras")
        if not same_algebra(self.left.big, self.top.small):
            raise MixedAlgebras("left embedding does not target the top-left "
                                "algebra")
        if not same_algebra(self.bottom.big, self.right.small):
            raise MixedAlgebras("bottom embedding does not target the "
                                "bottom-right algebra")
        if not same_algebra(self.left.small, self.bottom.small):
            raise MixedAlgebras("the two corner embeddings start from "
                                "different algebras")
        res = float(np.abs(self.top.embed @ self.left.embed
                           - self.right.embed @ self.bottom.embed).max())
        if res > np.sqrt(get_config().eps):
            raise InvalidEmbedding(
                f"the square does not commute as embeddings "
                f"(residual {res:.2e})")

    @property
    def ambient(self) -> FiniteStarAlgebra:
        return self.top.big

    def corner(self) -> SubalgebraEmbedding:
        """The corner algebra embedded into the ambient algebra."""
        return SubalgebraEmbedding(
            small=self.left.small, big=self.ambient,
            embed=self.top.embed @ self.left.embed)


def square_check(sq: CommutingSquareData, eps: float | None = None) -> dict:
    """Commutation and non-degeneracy of a square of inclusions.

    commuting: both compositions of the conditional expectations onto the
    two middle algebras agree with the expectation onto the corner.
    nondegenerate: products of the two middle algebras span the ambient one.
    """
    eps = resolve_eps(eps)
    e_top = conditional_expectation(sq.top)
    e_right = conditional_expectation(sq.right)
    e_corner = conditional_expectation(sq.corner())
    r1 = float(np.abs(e_top @ e_right - e_corner).max())
    r2 = float(np.abs(e_right @ e_top - e_corner).max())
    amb = sq.ambient
    prods = np.einsum("iu,jv,ijk->kuv", sq.right.embed, sq.top.embed,
                      amb.mult, optimize=True)
    prods = prods.reshape(amb.dim, -1)
    rank = matrix_rank(amb.onb_inv @ prods, eps)
    return {
        "commuting": bool(max(r1, r2) <= np.sqrt(eps)),
        "nondegenerate": bool(rank == amb.dim),
        "commuting_residual": max(r1, r2),
        "product_span_dim": int(rank),
    }


def lemma_square_coaction(beta: CoactionMap) -> CommutingSquareData:
    """The square (C in B) inside (A in B (x) A) built from a coaction,
    with the middle column embedded by beta itself."""
    if beta.kind != "coaction":
        raise KindMismatch("this square needs a genuine coaction")
    beta.require_valid()
    from .algebra import tensor_algebra

    b, k = beta.target, beta.kac
    amb = tensor_algebra(b, k.alg)
    a = k.dim
    top = SubalgebraEmbedding(
        small=k.alg, big=amb, embed=np.kron(b.unit[:, None], np.eye(a)))
    right = SubalgebraEmbedding(small=b, big=amb, embed=beta.map)
    corner = scalars()
    left = SubalgebraEmbedding(small=corner, big=k.alg,
                               embed=k.alg.unit[:, None])
    bottom = SubalgebraEmbedding(small=corner, big=b, embed=b.unit[:, None])
    return CommutingSquareData(top=top, right=right, left=left, bottom=bottom)


def fixed_point_square(beta: CoactionMap, pi: CoactionMap,
                       eps: float | None = None) -> CommutingSquareData:
    """The square (P^pi in P) inside ((B (x) P)^{beta (x) pi} in B (x) P)."""
    eps = resolve_eps(eps)
    from .coaction import fixed_point_tensor

    fp, _ = fixed_point_tensor(beta, pi, eps)
    p = pi.target
    amb = fp.ambient
    b = beta.target
    top = SubalgebraEmbedding(
        small=p, big=amb, embed=np.kron(b.unit[:, None], np.eye(p.dim)))
    right = fp.embedding
    ppi = averaging(pi, eps).embedding
    left = ppi
    cols = top.embed @ ppi.embed
    bottom_cols = np.stack([right.restrict(cols[:, t], eps)
                            for t in range(cols.shape[1])], axis=1)
    bottom = SubalgebraEmbedding(small=ppi.small, big=right.small,
                                 embed=bottom_cols)
    return CommutingSquareData(top=top, right=right, left=left, bottom=bottom)
