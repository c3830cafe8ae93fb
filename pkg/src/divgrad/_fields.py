"""Field validation and reproducible summation."""

from contextlib import contextmanager
from contextvars import ContextVar

import numpy as np

from .errors import DomainError, ShapeError

_canonical = ContextVar("divgrad_canonical_sum", default=False)


@contextmanager
def canonical_summation(enabled=True):
    """Accumulate every sum strictly left to right while the context is active."""
    token = _canonical.set(bool(enabled))
    try:
        yield
    finally:
        _canonical.reset(token)


def canonical_enabled():
    return _canonical.get()


def total(values):
    """Sum of a 1-D array; sequential order in canonical mode."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return 0.0
    if _canonical.get():
        return float(np.cumsum(values)[-1])
    return float(np.sum(values))


def as_field(values, name="field"):
    """Return ``values`` as a 1-D float array of strictly positive finite entries."""
    arr = np.array(values, dtype=float, ndmin=1)
    if arr.ndim != 1 or arr.size == 0:
        raise ShapeError(f"{name} must be a non-empty 1-D vector, got shape {arr.shape}")
    bad = np.flatnonzero(~np.isfinite(arr) | (arr <= 0))
    if bad.size:
        j = int(bad[0])
        raise DomainError(f"{name}[{j}] = {float(arr[j])!r} is not strictly positive and finite")
    return arr


def as_pair(p, q):
    p = as_field(p, "p")
    q = as_field(q, "q")
    if p.shape != q.shape:
        raise ShapeError(f"p and q differ in length: {p.size} != {q.size}")
    return p, q


def matvec(H, x):
    """``H @ x``; row sums accumulated left to right in canonical mode."""
    if _canonical.get():
        return np.cumsum(H * x[None, :], axis=1)[:, -1]
    return H @ x


def rmatvec(H, g):
    """``H.T @ g`` with the same ordering rule as :func:`matvec`."""
    if _canonical.get():
        return np.cumsum(H * g[:, None], axis=0)[-1, :]
    return H.T @ g
