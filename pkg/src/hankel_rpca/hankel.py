"""Temporal Hankel embedding of an ``N x T`` matrix and its averaging inverse."""
from __future__ import annotations

from functools import lru_cache

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

__all__ = ["count_matrix", "dehankelize", "dehankelize_sum", "hankel_shape", "hankelize"]


def _check_tau(t: int, tau: int) -> None:
    if not 1 <= tau <= t:
        raise ValueError(f"delay embedding length tau={tau} must lie in [1, {t}]")


def _as_matrix(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2 or 0 in x.shape:
        raise ValueError(f"expected a non-empty N x T matrix, got shape {x.shape}")
    return x


def hankel_shape(n: int, t: int, tau: int) -> tuple[int, int, int]:
    _check_tau(t, tau)
    return n, t - tau + 1, tau


def hankelize(x, tau: int) -> np.ndarray:
    """Map ``x`` (N x T) to the ``(N, T - tau + 1, tau)`` Hankel tensor.

    Frontal slice ``k`` holds columns ``k .. k + T - tau`` of ``x``
    (0-based), so consecutive slices shift the window by one timestamp.
    """
    x = _as_matrix(x)
    n, t = x.shape
    _, width, _ = hankel_shape(n, t, tau)
    # windows[i, j, k] = x[i, j + k]
    windows = sliding_window_view(x, tau, axis=1)
    return np.ascontiguousarray(windows[:, :width, :])


@lru_cache(maxsize=64)
def _counts(t: int, tau: int) -> np.ndarray:
    j = np.arange(1, t + 1)
    c = np.minimum.reduce([j, np.full(t, tau), t - j + 1, np.full(t, t - tau + 1)])
    c.flags.writeable = False
    return c


def count_matrix(n: int, t: int, tau: int) -> np.ndarray:
    """How many times each entry of an ``n x t`` matrix appears in its Hankel tensor."""
    _check_tau(t, tau)
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return np.broadcast_to(_counts(t, tau), (n, t)).astype(float)


def _shape_from_tensor(a) -> tuple[np.ndarray, int, int, int]:
    a = np.asarray(a, dtype=float)
    if a.ndim != 3 or 0 in a.shape:
        raise ValueError(f"expected a non-empty third-order tensor, got shape {a.shape}")
    n, width, tau = a.shape
    return a, n, width + tau - 1, tau


def dehankelize_sum(a) -> np.ndarray:
    """Adjoint of :func:`hankelize`: sum every tensor entry onto its matrix cell."""
    a, n, t, tau = _shape_from_tensor(a)
    width = t - tau + 1
    out = np.zeros((n, t))
    for k in range(tau):
        out[:, k:k + width] += a[:, :, k]
    return out


def dehankelize(a) -> np.ndarray:
    """Average the Hankel tensor back onto an ``N x T`` matrix.

    ``tau`` and ``T`` are read off the shape. The mean is accumulated as
    deviations from the first contributing entry, so a tensor that really is
    a Hankel embedding maps back without rounding.
    """
    a, n, t, tau = _shape_from_tensor(a)
    width = t - tau + 1
    ref = np.empty((n, t))
    ref[:, :width] = a[:, :, 0]
    ref[:, width:] = a[:, width - 1, 1:]
    dev = np.zeros((n, t))
    for k in range(tau):
        dev[:, k:k + width] += a[:, :, k] - ref[:, k:k + width]
    return ref + dev / _counts(t, tau)
