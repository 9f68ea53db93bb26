import pytest

from kaclattice import _backend


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # jit compilation happens once here, not inside a timed test
    _backend.warm_up()
