import os
import subprocess
import sys

import numpy as np
import pytest

from kaclattice import _kernels_numpy
from kaclattice.algebra import matrix_algebra, multimatrix_algebra

numba_kernels = pytest.importorskip(
    "kaclattice._kernels_numba", reason="numba backend not importable")

RNG = np.random.default_rng(17)


def cvec(n):
    return RNG.standard_normal(n) + 1j * RNG.standard_normal(n)


def cmat(m, n):
    return RNG.standard_normal((m, n)) + 1j * RNG.standard_normal((m, n))


@pytest.fixture(scope="module")
def mult():
    return np.ascontiguousarray(multimatrix_algebra((2, 1)).mult)


def test_product_agrees(mult):
    n = mult.shape[0]
    for _ in range(5):
        x, y = cvec(n), cvec(n)
        a = _kernels_numpy.product(mult, x, y)
        b = numba_kernels.product(mult, x, y)
        assert np.abs(a - b).max() < 1e-12


def test_batch_product_agrees(mult):
    n = mult.shape[0]
    xs, ys = cmat(7, n), cmat(7, n)
    a = _kernels_numpy.batch_product(mult, xs, ys)
    b = numba_kernels.batch_product(mult, xs, ys)
    assert np.abs(a - b).max() < 1e-12


def test_left_right_matrices_agree(mult):
    n = mult.shape[0]
    x = cvec(n)
    assert np.abs(_kernels_numpy.left_matrix(mult, x)
                  - numba_kernels.left_matrix(mult, x)).max() < 1e-12
    assert np.abs(_kernels_numpy.right_matrix(mult, x)
                  - numba_kernels.right_matrix(mult, x)).max() < 1e-12


def test_left_right_matrices_multiply(mult):
    n = mult.shape[0]
    x, y = cvec(n), cvec(n)
    p = _kernels_numpy.product(mult, x, y)
    assert np.abs(_kernels_numpy.left_matrix(mult, x) @ y - p).max() < 1e-12
    assert np.abs(_kernels_numpy.right_matrix(mult, y) @ x - p).max() < 1e-12


def test_tensor_mult_agrees():
    ma = np.ascontiguousarray(matrix_algebra(2).mult)
    mb = np.ascontiguousarray(multimatrix_algebra((1, 1)).mult)
    a = _kernels_numpy.tensor_mult(ma, mb)
    b = numba_kernels.tensor_mult(ma, mb)
    assert np.abs(a - b).max() < 1e-12


def test_assoc_residual_agrees(mult):
    a = _kernels_numpy.assoc_residual(mult)
    b = numba_kernels.assoc_residual(mult)
    assert a == pytest.approx(b, abs=1e-12)
    assert a < 1e-12
    bad = np.array(mult)
    bad[0, 1, 0] += 0.3
    assert numba_kernels.assoc_residual(bad) > 0.1


def test_twisted_image_agrees(mult):
    ma = np.ascontiguousarray(matrix_algebra(2).mult)
    n, na = mult.shape[0], ma.shape[0]
    wx, wy = cmat(n, na), cmat(n, na)
    for anti in (False, True):
        a = _kernels_numpy.twisted_image(mult, ma, wx, wy, anti)
        b = numba_kernels.twisted_image(mult, ma, wx, wy, anti)
        assert np.abs(a - b).max() < 1e-12
    # the two leg orders genuinely differ over a noncommutative algebra
    a0 = _kernels_numpy.twisted_image(mult, ma, wx, wy, False)
    a1 = _kernels_numpy.twisted_image(mult, ma, wx, wy, True)
    assert np.abs(a0 - a1).max() > 1e-6


def test_env_flag_selects_numpy_backend():
    env = dict(os.environ, KACLATTICE_DISABLE_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c",
         "from kaclattice import backend_name; print(backend_name())"],
        capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "numpy"


def test_default_backend_is_numba_when_importable():
    env = {k: v for k, v in os.environ.items()
           if k != "KACLATTICE_DISABLE_NUMBA"}
    out = subprocess.run(
        [sys.executable, "-c",
         "from kaclattice import backend_name; print(backend_name())"],
        capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "numba"
