"""Numba-compiled implementations of the hot kernels.

Same contracts as ``_kernels_numpy``; see that module for documentation.
Importing this module requires numba.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def product(mult, x, y):
    n = mult.shape[0]
    out = np.zeros(n, dtype=np.complex128)
    for i in range(n):
        xi = x[i]
        if xi == 0:
            continue
        for j in range(n):
            c = xi * y[j]
            if c == 0:
                continue
            for k in range(n):
                out[k] += c * mult[i, j, k]
    return out


@njit(cache=True)
def batch_product(mult, xs, ys):
    m = xs.shape[0]
    n = mult.shape[0]
    out = np.zeros((m, n), dtype=np.complex128)
    for b in range(m):
        for i in range(n):
            xi = xs[b, i]
            if xi == 0:
                continue
            for j in range(n):
                c = xi * ys[b, j]
                if c == 0:
                    continue
                for k in range(n):
                    out[b, k] += c * mult[i, j, k]
    return out


@njit(cache=True)
def left_matrix(mult, x):
    n = mult.shape[0]
    out = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        xi = x[i]
        if xi == 0:
            continue
        for j in range(n):
            for k in range(n):
                out[k, j] += xi * mult[i, j, k]
    return out


@njit(cache=True)
def right_matrix(mult, y):
    n = mult.shape[0]
    out = np.zeros((n, n), dtype=np.complex128)
    for j in range(n):
        yj = y[j]
        if yj == 0:
            continue
        for i in range(n):
            for k in range(n):
                out[k, i] += yj * mult[i, j, k]
    return out


@njit(cache=True)
def tensor_mult(ma, mb):
    a = ma.shape[0]
    b = mb.shape[0]
    n = a * b
    out = np.empty((n, n, n), dtype=np.complex128)
    for i in range(a):
        for p in range(b):
            for j in range(a):
                for q in range(b):
                    for k in range(a):
                        for r in range(b):
                            out[i * b + p, j * b + q, k * b + r] = (
                                ma[i, j, k] * mb[p, q, r]
                            )
    return out


@njit(cache=True)
def assoc_residual(mult):
    n = mult.shape[0]
    worst = 0.0
    lhs = np.zeros((n, n), dtype=np.complex128)
    rhs = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            for l in range(n):
                for m in range(n):
                    lhs[l, m] = 0.0
                    rhs[l, m] = 0.0
            for k in range(n):
                c = mult[i, j, k]
                if c != 0:
                    for l in range(n):
                        for m in range(n):
                            lhs[l, m] += c * mult[k, l, m]
            for l in range(n):
                for k in range(n):
                    c = mult[j, l, k]
                    if c != 0:
                        for m in range(n):
                            rhs[l, m] += c * mult[i, k, m]
            for l in range(n):
                for m in range(n):
                    d = abs(lhs[l, m] - rhs[l, m])
                    if d > worst:
                        worst = d
    return worst


@njit(cache=True)
def twisted_image(mb, ma, wx, wy, anti):
    nb = mb.shape[0]
    na = ma.shape[0]
    # t1[p, j, k] = sum_i wx[i, p] mb[i, j, k]
    t1 = np.zeros((na, nb, nb), dtype=np.complex128)
    for i in range(nb):
        for p in range(na):
            c = wx[i, p]
            if c == 0:
                continue
            for j in range(nb):
                for k in range(nb):
                    t1[p, j, k] += c * mb[i, j, k]
    # t2[k, p, q] = sum_j wy[j, q] t1[p, j, k]
    t2 = np.zeros((nb, na, na), dtype=np.complex128)
    for j in range(nb):
        for q in range(na):
            c = wy[j, q]
            if c == 0:
                continue
            for p in range(na):
                for k in range(nb):
                    t2[k, p, q] += c * t1[p, j, k]
    out = np.zeros((nb, na), dtype=np.complex128)
    for k in range(nb):
        for p in range(na):
            for q in range(na):
                c = t2[k, p, q]
                if c == 0:
                    continue
                if anti:
                    for r in range(na):
                        out[k, r] += c * ma[q, p, r]
                else:
                    for r in range(na):
                        out[k, r] += c * ma[p, q, r]
    return out
