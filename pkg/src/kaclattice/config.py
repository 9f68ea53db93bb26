"""Package-wide numeric configuration.

Every tolerance-sensitive routine accepts an explicit ``eps`` argument and
falls back to the value stored here.  Rank decisions use sqrt(eps) relative
to the largest singular value.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass


@dataclass
class Config:
    eps: float = 1e-9
    # cap on Kac algebra dimension (dense comultiplication tensors)
    dim_cap: int = 64
    # hard memory guard: refuse to allocate structure tensors beyond this dim
    max_algebra_dim: int = 256
    seed: int = 7


_CONFIG = Config()


def get_config() -> Config:
    return _CONFIG


def resolve_eps(eps: float | None) -> float:
    return _CONFIG.eps if eps is None else float(eps)


@contextlib.contextmanager
def override(**kwargs):
    """Temporarily override configuration fields.

    >>> with override(dim_cap=128):
    ...     ...
    """
    old = {k: getattr(_CONFIG, k) for k in kwargs}
    for k, v in kwargs.items():
        if not hasattr(_CONFIG, k):
            raise AttributeError(f"unknown config field {k!r}")
        setattr(_CONFIG, k, v)
    try:
        yield _CONFIG
    finally:
        for k, v in old.items():
            setattr(_CONFIG, k, v)
