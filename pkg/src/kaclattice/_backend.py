"""Kernel backend selection.

The numba kernels are used when numba imports cleanly and the environment
variable ``KACLATTICE_DISABLE_NUMBA`` is not set to a truthy value.  The
pure-numpy implementations are always available as a fallback and are the
reference semantics; the test suite checks both backends agree.
"""

from __future__ import annotations

import os

from . import _kernels_numpy

_DISABLE = os.environ.get("KACLATTICE_DISABLE_NUMBA", "").lower() in (
    "1", "true", "yes", "on",
)

_impl = _kernels_numpy
_name = "numpy"

if not _DISABLE:
    try:
        from . import _kernels_numba

        _impl = _kernels_numba
        _name = "numba"
    except ImportError:
        pass


def backend_name() -> str:
    return _name


def warm_up() -> None:
    """Trigger jit compilation of every kernel on tiny inputs."""
    import numpy as np

    m = np.zeros((2, 2, 2), dtype=np.complex128)
    m[0, 0, 0] = m[0, 1, 1] = m[1, 0, 1] = 1.0
    x = np.array([1.0, 0.5j])
    product(m, x, x)
    batch_product(m, x[None, :], x[None, :])
    left_matrix(m, x)
    right_matrix(m, x)
    tensor_mult(m, m)
    assoc_residual(m)
    twisted_image(m, m, x[:, None] @ x[None, :], x[:, None] @ x[None, :], True)
    twisted_image(m, m, x[:, None] @ x[None, :], x[:, None] @ x[None, :], False)


def product(mult, x, y):
    return _impl.product(mult, x, y)


def batch_product(mult, xs, ys):
    return _impl.batch_product(mult, xs, ys)


def left_matrix(mult, x):
    return _impl.left_matrix(mult, x)


def right_matrix(mult, y):
    return _impl.right_matrix(mult, y)


def tensor_mult(ma, mb):
    return _impl.tensor_mult(ma, mb)


def assoc_residual(mult):
    return _impl.assoc_residual(mult)


def twisted_image(mb, ma, wx, wy, anti):
    return _impl.twisted_image(mb, ma, wx, wy, bool(anti))
