"""Pure-numpy reference implementations of the hot kernels.

All kernels work on complex128 arrays.  ``mult`` is a structure tensor with
``mult[i, j, k]`` the coefficient of basis vector k in the product b_i b_j.
"""

from __future__ import annotations

import numpy as np


def product(mult: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Coefficients of the product x*y."""
    return np.einsum("i,j,ijk->k", x, y, mult, optimize=True)


def batch_product(mult: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Row-wise products: out[m] = xs[m] * ys[m]."""
    return np.einsum("mi,mj,ijk->mk", xs, ys, mult, optimize=True)


def left_matrix(mult: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Matrix L with L @ y = coefficients of x*y."""
    # L[k, j] = sum_i x_i mult[i, j, k]
    return np.einsum("i,ijk->kj", x, mult, optimize=True)


def right_matrix(mult: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Matrix R with R @ x = coefficients of x*y."""
    return np.einsum("j,ijk->ki", y, mult, optimize=True)


def tensor_mult(ma: np.ndarray, mb: np.ndarray) -> np.ndarray:
    """Structure tensor of the tensor product algebra A (x) B.

    Basis ordering is row-major: index (i, p) -> i * dim(B) + p.
    """
    a = ma.shape[0]
    b = mb.shape[0]
    out = np.einsum("ijk,pqr->ipjqkr", ma, mb, optimize=True)
    return np.ascontiguousarray(out.reshape(a * b, a * b, a * b))


def assoc_residual(mult: np.ndarray) -> float:
    """Max-norm residual of associativity, streamed to keep memory O(n^3)."""
    n = mult.shape[0]
    flat = mult.reshape(n, n * n)  # (k, (l, m))
    jl_k = mult.reshape(n * n, n)  # rows (j, l), cols k
    worst = 0.0
    for i in range(n):
        lhs = mult[i] @ flat  # (j, (l, m)) = sum_k mult[i,j,k] mult[k,l,m]
        rhs = (jl_k @ mult[i]).reshape(n, n * n)  # sum_k mult[j,l,k] mult[i,k,m]
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    return worst


def twisted_image(mb: np.ndarray, ma: np.ndarray, wx: np.ndarray,
                  wy: np.ndarray, anti: bool) -> np.ndarray:
    """Image of a product under a multiplicative or antimultiplicative map.

    ``wx, wy`` are images of x and y reshaped to (dim B, dim A).  Returns the
    required image of x*y: first legs multiply in order, second legs multiply
    in order for a coaction and reversed for an anticoaction.
    """
    if anti:
        return np.einsum("ip,jq,ijk,qpr->kr", wx, wy, mb, ma, optimize=True)
    return np.einsum("ip,jq,ijk,pqr->kr", wx, wy, mb, ma, optimize=True)
