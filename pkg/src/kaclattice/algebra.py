"""Finite-dimensional *-algebras given by structure constants.

An algebra of dimension n is stored as a dense structure tensor
``mult[i, j, k]`` (coefficient of basis vector k in the product b_i b_j),
a unit vector, a conjugate-linear star map ``x* = star @ conj(x)`` and a
faithful tracial state given as a covector.  The trace inner product is
``<x, y> = tr(y* x) = conj(y) @ gram @ x``.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import _backend as bk
from .config import get_config, resolve_eps
from .errors import (
    DimensionMismatch,
    IncompatibleTrace,
    InvalidAlgebra,
    InvalidEmbedding,
    NonSemisimple,
)
from .linalg import gram_schmidt, nullspace

_CLUSTER_GAP = 1e-6


def _as_complex(a, shape, name):
    out = np.asarray(a, dtype=np.complex128)
    if out.shape != shape:
        raise DimensionMismatch(f"{name}: expected shape {shape}, got {out.shape}")
    return out


@dataclass(frozen=True, eq=False)
class FiniteStarAlgebra:
    """Structure-constant model of a finite-dimensional C*-algebra.

    Constructing with ``check=True`` (the default) verifies all axioms and
    raises :class:`InvalidAlgebra` on failure.  Internal constructors whose
    output satisfies the axioms by construction pass ``check=False``; the
    positive definiteness of the Gram matrix (trace faithfulness) is always
    verified since every downstream computation relies on it.
    """

    mult: np.ndarray
    unit: np.ndarray
    star: np.ndarray
    trace: np.ndarray
    labels: tuple[str, ...] = ()
    check: InitVar[bool] = True

    def __post_init__(self, check):
        n = np.asarray(self.mult).shape[0]
        cap = get_config().max_algebra_dim
        if n > cap:
            raise InvalidAlgebra(
                f"dimension {n} exceeds max_algebra_dim={cap}; raise the limit "
                "with config.override(max_algebra_dim=...) if intended")
        object.__setattr__(self, "mult", _as_complex(self.mult, (n, n, n), "mult"))
        object.__setattr__(self, "unit", _as_complex(self.unit, (n,), "unit"))
        object.__setattr__(self, "star", _as_complex(self.star, (n, n), "star"))
        object.__setattr__(self, "trace", _as_complex(self.trace, (n,), "trace"))
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"b{i}" for i in range(n)))
        elif len(self.labels) != n:
            raise DimensionMismatch("labels length != dim")
        for a in (self.mult, self.unit, self.star, self.trace):
            a.setflags(write=False)
        eps = get_config().eps
        g = self.gram
        herm = float(np.abs(g - g.conj().T).max()) if n else 0.0
        if herm > np.sqrt(eps):
            raise InvalidAlgebra(f"trace form is not hermitian (residual {herm:.2e})")
        w = np.linalg.eigvalsh((g + g.conj().T) / 2)
        if w.min() <= eps:
            raise InvalidAlgebra(
                f"trace is not faithful: smallest Gram eigenvalue {w.min():.2e}")
        if check:
            rep = self.validate(eps)
            if not rep["passed"]:
                bad = {k: v for k, v in rep.items()
                       if isinstance(v, float) and v > eps}
                raise InvalidAlgebra(f"*-algebra axioms fail: {bad}")

    # -- basic data -------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.mult.shape[0]

    @cached_property
    def gram(self) -> np.ndarray:
        # G[i, j] = tr(b_i^* b_j)
        return np.einsum("pi,pjk,k->ij", self.star, self.mult, self.trace,
                         optimize=True)

    @cached_property
    def onb(self) -> np.ndarray:
        """Orthonormal basis, columns in original coordinates."""
        o = gram_schmidt(np.eye(self.dim), self.gram)
        if o.shape[1] != self.dim:
            raise InvalidAlgebra("basis is numerically degenerate")
        return o

    @cached_property
    def onb_inv(self) -> np.ndarray:
        return np.linalg.inv(self.onb)

    @cached_property
    def star_onb(self) -> np.ndarray:
        """Matrix of the star map in the orthonormal basis."""
        return self.onb_inv @ self.star @ self.onb.conj()

    # -- arithmetic -------------------------------------------------------

    def product(self, x, y) -> np.ndarray:
        return bk.product(self.mult, np.asarray(x, complex), np.asarray(y, complex))

    def star_of(self, x) -> np.ndarray:
        return self.star @ np.conj(np.asarray(x, complex))

    def trace_of(self, x) -> complex:
        return complex(self.trace @ np.asarray(x, complex))

    def inner(self, x, y) -> complex:
        """<x, y> = tr(y^* x)."""
        return complex(np.conj(np.asarray(y, complex)) @ self.gram
                       @ np.asarray(x, complex))

    def norm(self, x) -> float:
        return float(np.sqrt(max(np.real(self.inner(x, x)), 0.0)))

    def left_matrix(self, x) -> np.ndarray:
        return bk.left_matrix(self.mult, np.asarray(x, complex))

    def right_matrix(self, y) -> np.ndarray:
        return bk.right_matrix(self.mult, np.asarray(y, complex))

    def to_onb(self, x) -> np.ndarray:
        return self.onb_inv @ np.asarray(x, complex)

    def from_onb(self, c) -> np.ndarray:
        return self.onb @ np.asarray(c, complex)

    def is_scalar(self, x, eps: float | None = None) -> bool:
        eps = resolve_eps(eps)
        x = np.asarray(x, complex)
        r = x - self.trace_of(x) * self.unit
        return self.norm(r) <= np.sqrt(eps) * max(self.norm(x), 1.0)

    # -- validation -------------------------------------------------------

    def validate(self, eps: float | None = None) -> dict:
        """Residuals of all *-algebra axioms, plus a ``passed`` flag."""
        eps = resolve_eps(eps)
        n, m, s, t, u = self.dim, self.mult, self.star, self.trace, self.unit
        rep: dict = {}
        rep["associativity"] = bk.assoc_residual(m)
        rep["unit_left"] = float(np.abs(self.left_matrix(u) - np.eye(n)).max())
        rep["unit_right"] = float(np.abs(self.right_matrix(u) - np.eye(n)).max())
        rep["star_involution"] = float(np.abs(s @ s.conj() - np.eye(n)).max())
        lhs = np.einsum("kl,ijl->ijk", s, m.conj(), optimize=True)
        rhs = np.einsum("pj,qi,pqk->ijk", s, s, m, optimize=True)
        rep["star_antimultiplicative"] = float(np.abs(lhs - rhs).max())
        rep["star_trace"] = float(np.abs(t @ s - t.conj()).max())
        tm = np.einsum("ijk,k->ij", m, t, optimize=True)
        rep["trace_tracial"] = float(np.abs(tm - tm.T).max())
        rep["trace_unital"] = float(abs(self.trace_of(u) - 1.0))
        w = np.linalg.eigvalsh((self.gram + self.gram.conj().T) / 2)
        rep["gram_min_eigenvalue"] = float(w.min())
        rep["passed"] = bool(
            all(v <= eps for k, v in rep.items()
                if isinstance(v, float) and k != "gram_min_eigenvalue")
            and w.min() > eps)
        return rep

    # -- block decomposition ----------------------------------------------

    def block_structure(self, seed: int | None = None) -> "BlockStructure":
        bs = self.__dict__.get("_blocks")
        if bs is None:
            bs = wedderburn(self, seed=seed)
            self.__dict__["_blocks"] = bs
        return bs

    def _set_block_structure(self, bs: "BlockStructure") -> None:
        self.__dict__["_blocks"] = bs


@dataclass(frozen=True, eq=False)
class BlockStructure:
    """Wedderburn data: B = (+)_g M_{m_g}, trace weights, and an explicit
    system of matrix units realizing the isomorphism.

    ``block_isomorphism`` has one column per basis element of B: column
    ``offset(g) + k * m_g + l`` holds the coefficients of the matrix unit
    E^g_{kl}.
    """

    block_sizes: tuple[int, ...]
    weights: tuple[float, ...]
    central_projections: np.ndarray  # (num_blocks, n)
    block_isomorphism: np.ndarray    # (n, n)

    @property
    def num_blocks(self) -> int:
        return len(self.block_sizes)

    def block_offset(self, g: int) -> int:
        return int(sum(m * m for m in self.block_sizes[:g]))

    def matrix_unit(self, g: int, k: int, l: int) -> np.ndarray:
        m = self.block_sizes[g]
        return self.block_isomorphism[:, self.block_offset(g) + k * m + l]

    def minimal_idempotent(self, g: int) -> np.ndarray:
        return self.matrix_unit(g, 0, 0)


# ---------------------------------------------------------------------------
# constructors


def _matrix_units_mult(sizes: tuple[int, ...]) -> np.ndarray:
    n = sum(m * m for m in sizes)
    mult = np.zeros((n, n, n), dtype=np.complex128)
    off = 0
    for m in sizes:
        for k in range(m):
            for l in range(m):
                for p in range(m):
                    for q in range(m):
                        if l == p:
                            mult[off + k * m + l, off + p * m + q,
                                 off + k * m + q] = 1.0
        off += m * m
    return mult


def multimatrix_algebra(sizes, weights=None, labels=None) -> FiniteStarAlgebra:
    """Direct sum of matrix blocks M_{m_1} (+) ... with given trace weights.

    ``weights`` default to the canonical trace m_g^2 / n.  The basis consists
    of matrix units ordered block by block, row-major inside each block.
    """
    sizes = tuple(int(m) for m in sizes)
    if not sizes or any(m < 1 for m in sizes):
        raise InvalidAlgebra(f"bad block sizes {sizes}")
    n = sum(m * m for m in sizes)
    if weights is None:
        w = np.array([m * m / n for m in sizes], dtype=float)
    else:
        w = np.asarray(weights, dtype=float)
        if w.shape != (len(sizes),) or np.any(w <= 0):
            raise IncompatibleTrace(f"need {len(sizes)} positive weights")
        if abs(w.sum() - 1.0) > 1e-12:
            raise IncompatibleTrace("weights must sum to 1")
    mult = _matrix_units_mult(sizes)
    unit = np.zeros(n, dtype=np.complex128)
    star = np.zeros((n, n), dtype=np.complex128)
    trace = np.zeros(n, dtype=np.complex128)
    lab = []
    off = 0
    for g, m in enumerate(sizes):
        for k in range(m):
            unit[off + k * m + k] = 1.0
            trace[off + k * m + k] = w[g] / m
            for l in range(m):
                star[off + l * m + k, off + k * m + l] = 1.0
                lab.append(f"e{g}[{k}{l}]" if len(sizes) > 1 else f"e[{k}{l}]")
        off += m * m
    if labels is not None:
        lab = list(labels)
    alg = FiniteStarAlgebra(mult, unit, star, trace, tuple(lab), check=False)
    alg._set_block_structure(BlockStructure(
        block_sizes=sizes,
        weights=tuple(float(x) for x in w),
        central_projections=_multimatrix_central_projections(sizes),
        block_isomorphism=np.eye(n, dtype=np.complex128),
    ))
    return alg


def _multimatrix_central_projections(sizes) -> np.ndarray:
    n = sum(m * m for m in sizes)
    out = np.zeros((len(sizes), n), dtype=np.complex128)
    off = 0
    for g, m in enumerate(sizes):
        for k in range(m):
            out[g, off + k * m + k] = 1.0
        off += m * m
    return out


def matrix_algebra(m: int) -> FiniteStarAlgebra:
    return multimatrix_algebra((m,))


def commutative_algebra(k: int, weights=None, labels=None) -> FiniteStarAlgebra:
    if labels is None:
        labels = tuple(f"d{i}" for i in range(k))
    return multimatrix_algebra((1,) * k, weights, labels=tuple(labels))


def scalars() -> FiniteStarAlgebra:
    return multimatrix_algebra((1,), labels=("1",))


def tensor_algebra(a: FiniteStarAlgebra, b: FiniteStarAlgebra) -> FiniteStarAlgebra:
    """Tensor product with basis (i, p) -> i * dim(b) + p (row-major)."""
    n = a.dim * b.dim
    cap = get_config().max_algebra_dim
    if n > cap:
        raise InvalidAlgebra(
            f"tensor product dimension {n} exceeds max_algebra_dim={cap}")
    labels = tuple(f"{x}(x){y}" for x in a.labels for y in b.labels)
    return FiniteStarAlgebra(
        mult=bk.tensor_mult(a.mult, b.mult),
        unit=np.kron(a.unit, b.unit),
        star=np.kron(a.star, b.star),
        trace=np.kron(a.trace, b.trace),
        labels=labels,
        check=False,
    )


def opposite_algebra(a: FiniteStarAlgebra) -> FiniteStarAlgebra:
    return FiniteStarAlgebra(
        mult=np.ascontiguousarray(a.mult.transpose(1, 0, 2)),
        unit=a.unit, star=a.star, trace=a.trace,
        labels=tuple(f"{x}^op" for x in a.labels),
        check=False,
    )


def algebra_from_matrices(mats: np.ndarray, eps: float | None = None,
                          labels=None) -> tuple[FiniteStarAlgebra, np.ndarray]:
    """Abstract algebra spanned by concrete matrices.

    ``mats`` is a stack (d, N, N) spanning a unital *-closed subalgebra of
    M_N; the trace is the normalized matrix trace.  Returns the abstract
    algebra together with the orthonormalized realizing stack (its row ``i``
    is the matrix of basis element i).
    """
    eps = resolve_eps(eps)
    mats = np.asarray(mats, dtype=np.complex128)
    d, nn, _ = mats.shape
    vecs = mats.reshape(d, nn * nn).T
    onb = gram_schmidt(vecs, np.eye(nn * nn) / nn, eps)
    t = np.ascontiguousarray(onb.T).reshape(-1, nn, nn)
    k = t.shape[0]
    prods = np.einsum("aij,bjk->abik", t, t, optimize=True)
    mult = np.einsum("abik,gik->abg", prods, t.conj(), optimize=True) / nn
    res = float(np.abs(prods - np.einsum("abg,gik->abik", mult, t,
                                         optimize=True)).max())
    if res > np.sqrt(eps):
        raise InvalidAlgebra(f"matrix span is not closed under products "
                             f"(residual {res:.2e})")
    star = np.einsum("gik,aki->ga", t.conj(), t.conj(), optimize=True) / nn
    unit = np.einsum("gik,ik->g", t.conj(), np.eye(nn) + 0j, optimize=True) / nn
    ures = float(np.abs(np.einsum("g,gik->ik", unit, t) - np.eye(nn)).max())
    if ures > np.sqrt(eps):
        raise InvalidAlgebra(f"matrix span does not contain the identity "
                             f"(residual {ures:.2e})")
    trace = np.einsum("gii->g", t) / nn
    alg = FiniteStarAlgebra(mult, unit, star, trace,
                            labels=tuple(labels) if labels else (), check=False)
    return alg, t


# ---------------------------------------------------------------------------
# embeddings and conditional expectations


@dataclass(frozen=True, eq=False)
class SubalgebraEmbedding:
    """Unital trace-preserving *-monomorphism, as a matrix on coefficients."""

    small: FiniteStarAlgebra
    big: FiniteStarAlgebra
    embed: np.ndarray

    def __post_init__(self):
        e = _as_complex(self.embed, (self.big.dim, self.small.dim), "embed")
        e = np.array(e)
        e.setflags(write=False)
        object.__setattr__(self, "embed", e)
        eps = get_config().eps
        rep = self.validate(eps)
        if not rep["passed"]:
            if rep["trace"] > np.sqrt(eps):
                raise IncompatibleTrace(
                    f"embedding does not preserve the trace "
                    f"(residual {rep['trace']:.2e})")
            bad = {k: v for k, v in rep.items() if isinstance(v, float)}
            raise InvalidEmbedding(f"not a unital *-embedding: {bad}")

    def validate(self, eps: float | None = None) -> dict:
        eps = resolve_eps(eps)
        s, b, e = self.small, self.big, self.embed
        rep: dict = {}
        lhs = np.einsum("ak,ijk->aij", e, s.mult, optimize=True)
        rhs = np.einsum("pi,qj,pqa->aij", e, e, b.mult, optimize=True)
        rep["multiplicative"] = float(np.abs(lhs - rhs).max())
        rep["unital"] = float(np.abs(e @ s.unit - b.unit).max())
        rep["star"] = float(np.abs(e @ s.star - b.star @ e.conj()).max())
        rep["trace"] = float(np.abs(b.trace @ e - s.trace).max())
        sv = np.linalg.svd(e, compute_uv=False)
        rep["injective"] = bool(sv.min() > np.sqrt(eps) * sv.max())
        rep["passed"] = bool(
            all(v <= np.sqrt(eps) for v in
                (rep["multiplicative"], rep["unital"], rep["star"], rep["trace"]))
            and rep["injective"])
        return rep

    def apply(self, x) -> np.ndarray:
        return self.embed @ np.asarray(x, complex)

    @cached_property
    def _solver(self) -> tuple[np.ndarray, np.ndarray]:
        g = self.big.gram
        m = self.embed.conj().T @ g @ self.embed
        return m, self.embed.conj().T @ g

    def restrict(self, y, eps: float | None = None) -> np.ndarray:
        """Coefficients of y in the small algebra; y must lie in the image."""
        eps = resolve_eps(eps)
        m, vg = self._solver
        x = np.linalg.solve(m, vg @ np.asarray(y, complex))
        res = self.big.norm(self.embed @ x - y)
        if res > np.sqrt(eps) * max(1.0, self.big.norm(y)):
            raise InvalidEmbedding(
                f"element is not in the embedded subalgebra (residual {res:.2e})")
        return x


def conditional_expectation(emb: SubalgebraEmbedding,
                            compressed: bool = False) -> np.ndarray:
    """Trace-preserving conditional expectation onto the embedded image.

    Returns the matrix of E: big -> big, or with ``compressed=True`` the
    (dim small x dim big) matrix expressing E(y) in small coordinates.
    """
    m, vg = emb._solver
    small_coords = np.linalg.solve(m, vg)
    if compressed:
        return small_coords
    return emb.embed @ small_coords


def subalgebra_from_basis(ambient: FiniteStarAlgebra, basis: np.ndarray,
                          eps: float | None = None, labels=None
                          ) -> SubalgebraEmbedding:
    """Abstract *-subalgebra spanned by coefficient columns inside ``ambient``.

    The span must be unital and closed under products and star within
    tolerance; the trace is the restriction of the ambient trace.  Returns the
    validated embedding (its ``small`` field is the abstract algebra).
    """
    eps = resolve_eps(eps)
    v = gram_schmidt(np.asarray(basis, dtype=np.complex128), ambient.gram, eps)
    d = v.shape[1]
    if d == 0:
        raise InvalidAlgebra("empty basis")
    g = ambient.gram
    prods = np.einsum("ia,jb,ijk->abk", v, v, ambient.mult, optimize=True)
    gp = np.einsum("abk,lk->abl", prods, g, optimize=True)
    mult = np.einsum("abl,lg->abg", gp, v.conj(), optimize=True)
    res = float(np.abs(prods - np.einsum("abg,gk->abk", mult, v.T,
                                         optimize=True)).max())
    if res > np.sqrt(eps):
        raise InvalidAlgebra(
            f"span is not closed under products (residual {res:.2e})")
    stars = ambient.star @ v.conj()
    star = np.einsum("lg,la->ga", v.conj(), g @ stars, optimize=True)
    sres = float(np.abs(stars - v @ star).max())
    if sres > np.sqrt(eps):
        raise InvalidAlgebra(f"span is not star-closed (residual {sres:.2e})")
    unit = np.einsum("lg,l->g", v.conj(), g @ ambient.unit, optimize=True)
    ures = ambient.norm(v @ unit - ambient.unit)
    if ures > np.sqrt(eps):
        raise InvalidAlgebra(
            f"span does not contain the unit (residual {ures:.2e})")
    trace = ambient.trace @ v
    alg = FiniteStarAlgebra(mult, unit, star, trace,
                            labels=tuple(labels) if labels else (), check=False)
    return SubalgebraEmbedding(small=alg, big=ambient, embed=v)


def function_of(algebra: FiniteStarAlgebra, x, fn) -> np.ndarray:
    """fn applied to a self-adjoint element by spectral calculus in the left
    regular representation."""
    lx = algebra.onb_inv @ algebra.left_matrix(x) @ algebra.onb
    lx = (lx + lx.conj().T) / 2
    vals, vecs = np.linalg.eigh(lx)
    out = (vecs * fn(vals)) @ (vecs.conj().T @ algebra.to_onb(algebra.unit))
    return algebra.from_onb(out)


def spectrum_bounds(algebra: FiniteStarAlgebra, x) -> tuple[float, float]:
    lx = algebra.onb_inv @ algebra.left_matrix(x) @ algebra.onb
    vals = np.linalg.eigvalsh((lx + lx.conj().T) / 2)
    return float(vals.min()), float(vals.max())


def left_regular(algebra: FiniteStarAlgebra) -> np.ndarray:
    """Left regular representation as a (n^2, n) matrix.

    Column i is the row-major flattening of the matrix of y -> b_i y in the
    orthonormal basis.  ``(left_regular(B) @ x).reshape(n, n)`` is a faithful
    *-representation matrix of x.
    """
    n = algebra.dim
    stack = algebra.mult.transpose(0, 2, 1)  # stack[i] = L_{b_i}
    on = np.einsum("kl,ilj,jm->ikm", algebra.onb_inv, stack, algebra.onb,
                   optimize=True)
    return on.reshape(n, n * n).T


# ---------------------------------------------------------------------------
# canonical trace and the scalar element mu mu^*(1)


def canonical_trace(sizes) -> np.ndarray:
    """Weights of the canonical trace on (+) M_{m_g}: m_g^2 / n."""
    sizes = tuple(int(m) for m in sizes)
    n = sum(m * m for m in sizes)
    return np.array([m * m / n for m in sizes], dtype=float)


def canonical_weights_exact(sizes) -> list[Fraction]:
    n = sum(int(m) * int(m) for m in sizes)
    return [Fraction(int(m) * int(m), n) for m in sizes]


def xi_element(algebra: FiniteStarAlgebra,
               eps: float | None = None) -> tuple[np.ndarray, bool]:
    """The element mu mu^*(1) and whether it is scalar.

    mu: B (x) B -> B is multiplication, mu^* its adjoint for the trace inner
    products.  The trace is canonical exactly when the returned element is
    scalar (then it equals dim(B) * 1).
    """
    eps = resolve_eps(eps)
    o = algebra.onb
    n = algebra.dim
    prods = np.einsum("ia,jb,ijk->abk", o, o, algebra.mult, optimize=True)
    mu_on = np.einsum("abk,kl->lab", prods, algebra.onb_inv.T,
                      optimize=True).reshape(n, n * n)
    unit_on = algebra.to_onb(algebra.unit)
    xi_on = mu_on @ (mu_on.conj().T @ unit_on)
    xi = algebra.from_onb(xi_on)
    return xi, algebra.is_scalar(xi, eps)


# ---------------------------------------------------------------------------
# Wedderburn decomposition


def random_self_adjoint(algebra: FiniteStarAlgebra, rng) -> np.ndarray:
    x = rng.standard_normal(algebra.dim) + 1j * rng.standard_normal(algebra.dim)
    return (x + algebra.star_of(x)) / 2


def _cluster(vals: np.ndarray, gap: float = _CLUSTER_GAP) -> list[list[int]]:
    order = np.argsort(vals)
    groups: list[list[int]] = [[int(order[0])]]
    for idx in order[1:]:
        if vals[idx] - vals[groups[-1][-1]] < gap:
            groups[-1].append(int(idx))
        else:
            groups.append([int(idx)])
    return groups


def _center_basis(algebra: FiniteStarAlgebra, eps: float) -> np.ndarray:
    n = algebra.dim
    stack = algebra.mult.transpose(0, 2, 1)          # L_{b_j}
    rstack = algebra.mult.transpose(1, 2, 0)         # R_{b_j}
    rows = (stack - rstack).reshape(n * n, n)
    z = nullspace(rows, eps)
    return gram_schmidt(z, algebra.gram, eps)


def _idempotent_polish(algebra: FiniteStarAlgebra, p: np.ndarray,
                       rounds: int = 3) -> np.ndarray:
    for _ in range(rounds):
        p2 = algebra.product(p, p)
        p = 3 * p2 - 2 * algebra.product(p2, p)
        p = (p + algebra.star_of(p)) / 2
    return p


def _central_projections(algebra: FiniteStarAlgebra, rng,
                         eps: float) -> np.ndarray:
    z = _center_basis(algebra, eps)
    s = z.shape[1]
    if s == 0:
        raise NonSemisimple("center is numerically trivial")
    # real span of self-adjoint central elements
    sa = []
    for i in range(s):
        v = z[:, i]
        sa.append((v + algebra.star_of(v)) / 2)
        sa.append((v - algebra.star_of(v)) / 2j)
    sa = np.column_stack(sa)
    for _ in range(8):
        c = sa @ rng.standard_normal(sa.shape[1])
        m = np.empty((s, s), dtype=np.complex128)
        for l in range(s):
            cl = algebra.product(c, z[:, l])
            for k in range(s):
                m[k, l] = algebra.inner(cl, z[:, k])
        vals, vecs = np.linalg.eigh((m + m.conj().T) / 2)
        groups = _cluster(vals)
        if len(groups) == s:
            break
    else:
        raise NonSemisimple("could not separate the center with a random "
                            "self-adjoint element")
    projs = []
    for grp in groups:
        w = z @ vecs[:, grp[0]]
        w2 = algebra.product(w, w)
        denom = algebra.inner(w, w)
        alpha = algebra.inner(w2, w) / denom
        if abs(alpha) < np.sqrt(eps):
            raise NonSemisimple("central element with nilpotent part found")
        p = _idempotent_polish(algebra, w / alpha)
        if algebra.norm(algebra.product(p, p) - p) > np.sqrt(eps):
            raise NonSemisimple("central idempotent did not converge")
        projs.append(p)
    res = np.abs(sum(projs) - algebra.unit).max()
    if res > np.sqrt(eps):
        raise NonSemisimple(f"central idempotents do not sum to 1 "
                            f"(residual {res:.2e})")
    return np.array(projs)


def _corner_basis(algebra: FiniteStarAlgebra, p: np.ndarray,
                  eps: float) -> np.ndarray:
    lp = algebra.left_matrix(p)
    rp = algebra.right_matrix(p)
    images = lp @ rp @ algebra.onb
    return gram_schmidt(images, algebra.gram, eps)


def _block_matrix_units(algebra: FiniteStarAlgebra, p: np.ndarray, rng,
                        eps: float) -> list[np.ndarray]:
    """Matrix units E_{kl} (row-major list) of the corner pBp."""
    corner = _corner_basis(algebra, p, eps)
    d = corner.shape[1]
    m = int(round(np.sqrt(d)))
    if abs(m * m - d) > 0.5:
        raise NonSemisimple(f"corner dimension {d} is not a perfect square")
    if m == 1:
        return [p]
    lam = float(np.real(algebra.trace_of(p)))
    lp = algebra.left_matrix(p)
    rp = algebra.right_matrix(p)
    for _ in range(8):
        h = lp @ rp @ random_self_adjoint(algebra, rng)
        h = (h + algebra.star_of(h)) / 2
        h = h / max(algebra.norm(h), 1e-30)
        mh = np.empty((d, d), dtype=np.complex128)
        for l in range(d):
            hl = algebra.product(h, corner[:, l])
            for k in range(d):
                mh[k, l] = algebra.inner(hl, corner[:, k])
        vals, _ = np.linalg.eigh((mh + mh.conj().T) / 2)
        groups = _cluster(vals)
        if len(groups) == m and all(len(g) == m for g in groups):
            mus = [float(np.mean(vals[g])) for g in groups]
            break
    else:
        raise NonSemisimple("could not split a matrix block into minimal "
                            "projections")
    fs = []
    for k in range(m):
        f = p
        for j in range(m):
            if j == k:
                continue
            f = algebra.product(f, (h - mus[j] * p)) / (mus[k] - mus[j])
        f = _idempotent_polish(algebra, f)
        if algebra.norm(algebra.product(f, f) - f) > np.sqrt(eps):
            raise NonSemisimple("minimal projection did not converge")
        fs.append(f)
    sres = algebra.norm(sum(fs) - p)
    if sres > np.sqrt(eps):
        raise NonSemisimple(f"minimal projections do not sum to the block unit "
                            f"(residual {sres:.2e})")
    ws = [fs[0]]
    tgt = lam / m
    for k in range(1, m):
        lf = algebra.left_matrix(fs[k])
        rf = algebra.right_matrix(fs[0])
        for _ in range(16):
            r = rng.standard_normal(algebra.dim) \
                + 1j * rng.standard_normal(algebra.dim)
            v = lf @ rf @ r
            c = np.real(algebra.trace_of(algebra.product(algebra.star_of(v), v)))
            if c > 1e-6 * tgt:
                break
        else:
            raise NonSemisimple("could not connect minimal projections")
        w = v / np.sqrt(c / tgt)
        res = algebra.norm(algebra.product(algebra.star_of(w), w) - fs[0])
        if res > np.sqrt(eps):
            raise NonSemisimple(f"partial isometry residual {res:.2e}")
        ws.append(w)
    units = []
    for k in range(m):
        for l in range(m):
            units.append(algebra.product(ws[k], algebra.star_of(ws[l])))
    return units


def wedderburn(algebra: FiniteStarAlgebra, seed: int | None = None,
               eps: float | None = None) -> BlockStructure:
    """Decompose into matrix blocks with explicit matrix units.

    Uses a seeded rng (config.seed by default); eigenvalue clusters closer
    than 1e-6 are merged and trigger a retry with a fresh separator.  Raises
    :class:`NonSemisimple` when no consistent split is found.
    """
    eps = resolve_eps(eps)
    rng = np.random.default_rng(get_config().seed if seed is None else seed)
    projs = _central_projections(algebra, rng, eps)
    return _split_blocks(algebra, projs, rng, eps)


def _split_blocks(algebra: FiniteStarAlgebra, projs: np.ndarray, rng,
                  eps: float | None = None) -> BlockStructure:
    eps = resolve_eps(eps)
    units_per_block = []
    sizes = []
    weights = []
    for p in projs:
        units = _block_matrix_units(algebra, p, rng, eps)
        units_per_block.append(units)
        sizes.append(int(round(np.sqrt(len(units)))))
        weights.append(float(np.real(algebra.trace_of(p))))
    # deterministic order: size, weight, then support of the projection
    def key(i):
        p = projs[i]
        sig = int(np.argmax(np.abs(p) > 0.5 * np.abs(p).max()))
        return (sizes[i], round(weights[i], 9), sig)
    order = sorted(range(len(sizes)), key=key)
    sizes = [sizes[i] for i in order]
    weights = [weights[i] for i in order]
    projs = projs[order]
    units_per_block = [units_per_block[i] for i in order]
    cols = [u for units in units_per_block for u in units]
    iso = np.column_stack(cols)
    if iso.shape != (algebra.dim, algebra.dim):
        raise NonSemisimple(
            f"block dimensions {sizes} do not fill the algebra "
            f"(dim {algebra.dim})")
    # verify the transported structure constants are exact matrix units
    target = _matrix_units_mult(tuple(sizes))
    pr = np.einsum("ia,jb,ijk->abk", iso, iso, algebra.mult, optimize=True)
    got = np.einsum("abk,kc->abc", pr, np.linalg.inv(iso).T, optimize=True)
    res = float(np.abs(got - target).max())
    if res > np.sqrt(eps):
        raise NonSemisimple(f"matrix-unit relations fail (residual {res:.2e})")
    bs = BlockStructure(tuple(sizes), tuple(weights), projs, iso)
    algebra._set_block_structure(bs)
    return bs
