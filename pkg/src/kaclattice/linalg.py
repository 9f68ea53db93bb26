"""Shared numerical linear algebra helpers.

Rank decisions everywhere use a relative threshold of sqrt(eps) against the
largest singular value, so results are stable under the Gram perturbations
the validators tolerate.
"""

from __future__ import annotations

import numpy as np

from .config import resolve_eps
from .errors import DimensionMismatch


def rank_tol(s: np.ndarray, eps: float | None = None) -> float:
    eps = resolve_eps(eps)
    if s.size == 0:
        return 0.0
    return float(np.sqrt(eps) * max(s[0], 1.0))


def nullspace(a: np.ndarray, eps: float | None = None) -> np.ndarray:
    """Orthonormal basis of ker(a), columns of the result."""
    a = np.atleast_2d(np.asarray(a, dtype=np.complex128))
    if a.shape[0] == 0 or not np.any(a):
        return np.eye(a.shape[1], dtype=np.complex128)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    tol = rank_tol(s, eps)
    r = int(np.sum(s > tol))
    return vh[r:].conj().T


def column_space(a: np.ndarray, eps: float | None = None) -> np.ndarray:
    """Orthonormal basis of the column span."""
    a = np.atleast_2d(np.asarray(a, dtype=np.complex128))
    if not np.any(a):
        return np.zeros((a.shape[0], 0), dtype=np.complex128)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    tol = rank_tol(s, eps)
    r = int(np.sum(s > tol))
    return u[:, :r]


def matrix_rank(a: np.ndarray, eps: float | None = None) -> int:
    a = np.atleast_2d(np.asarray(a, dtype=np.complex128))
    if not np.any(a):
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    return int(np.sum(s > rank_tol(s, eps)))


def gram_schmidt(vectors: np.ndarray, gram: np.ndarray,
                 eps: float | None = None) -> np.ndarray:
    """Modified Gram-Schmidt in the inner product <x, y> = y^H G x.

    ``vectors`` holds coefficient columns; near-dependent columns are dropped.
    Deterministic for a fixed input order.
    """
    eps = resolve_eps(eps)
    v = np.array(vectors, dtype=np.complex128, copy=True)
    n, m = v.shape
    out = []
    scale = 0.0
    for i in range(m):
        w = v[:, i]
        for u in out:
            w = w - u * (u.conj() @ gram @ w)
        nrm2 = float(np.real(w.conj() @ gram @ w))
        if not out:
            scale = max(nrm2, 1.0)
        if nrm2 <= eps * scale:
            continue
        w = w / np.sqrt(nrm2)
        # second pass for numerical orthogonality
        for u in out:
            w = w - u * (u.conj() @ gram @ w)
        w = w / np.sqrt(float(np.real(w.conj() @ gram @ w)))
        out.append(w)
    if not out:
        return np.zeros((n, 0), dtype=np.complex128)
    return np.column_stack(out)


def project_onto_columns(v: np.ndarray, gram: np.ndarray | None = None) -> np.ndarray:
    """Orthogonal projection onto col(v) w.r.t. the Gram inner product."""
    v = np.asarray(v, dtype=np.complex128)
    if v.shape[1] == 0:
        return np.zeros((v.shape[0], v.shape[0]), dtype=np.complex128)
    g = np.eye(v.shape[0]) if gram is None else gram
    m = v.conj().T @ g @ v
    return v @ np.linalg.solve(m, v.conj().T @ g)


def subspace_contains(u: np.ndarray, w: np.ndarray, gram: np.ndarray | None = None,
                      eps: float | None = None) -> float:
    """Max relative residual of the columns of w against span(columns of u)."""
    p = project_onto_columns(u, gram)
    res = w - p @ w
    g = np.eye(w.shape[0]) if gram is None else gram
    worst = 0.0
    for i in range(w.shape[1]):
        num = float(np.real(res[:, i].conj() @ g @ res[:, i]))
        den = float(np.real(w[:, i].conj() @ g @ w[:, i]))
        if den <= 0:
            continue
        worst = max(worst, np.sqrt(max(num, 0.0) / den))
    return worst


def subspace_equal(u: np.ndarray, w: np.ndarray, gram: np.ndarray | None = None,
                   eps: float | None = None) -> bool:
    eps = resolve_eps(eps)
    tol = np.sqrt(eps)
    if matrix_rank(u, eps) != matrix_rank(w, eps):
        return False
    return (subspace_contains(u, w, gram, eps) < tol
            and subspace_contains(w, u, gram, eps) < tol)


def lift_map(m: np.ndarray, left: int = 1, right: int = 1) -> np.ndarray:
    """kron(I_left, m, I_right) for maps acting on one tensor leg."""
    out = m
    if left > 1:
        out = np.kron(np.eye(left), out)
    if right > 1:
        out = np.kron(out, np.eye(right))
    return out


def permute_legs(vec: np.ndarray, dims: tuple[int, ...],
                 perm: tuple[int, ...]) -> np.ndarray:
    """Permute tensor legs of a row-major flattened vector.

    ``perm[i]`` names the old leg placed at position i.
    """
    if int(np.prod(dims)) != vec.shape[0]:
        raise DimensionMismatch(f"vector of length {vec.shape[0]} vs legs {dims}")
    t = vec.reshape(dims).transpose(perm)
    return np.ascontiguousarray(t).reshape(-1)


def flip_matrix(da: int, db: int) -> np.ndarray:
    """Matrix of the tensor flip A (x) B -> B (x) A on coefficients."""
    n = da * db
    s = np.zeros((n, n))
    for i in range(da):
        for p in range(db):
            s[p * da + i, i * db + p] = 1.0
    return s


def polar_unitary(m: np.ndarray) -> np.ndarray:
    """Unitary polar factor of an invertible matrix."""
    u, _, vh = np.linalg.svd(m)
    return u @ vh
