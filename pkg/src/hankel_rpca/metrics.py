"""Error metrics, the mean +/- xi*std anomaly flag rule and spectral diagnostics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["EvalReport", "FlagParams", "cumulative_eigenvalue_percentage", "flag_anomalies", "masked_errors"]


@dataclass(frozen=True)
class EvalReport:
    mae: float
    rmse: float
    observed_count: int


@dataclass(frozen=True)
class FlagParams:
    """``period`` timestamps per day over ``days`` days; ``xi`` scales the std band."""

    period: int
    days: int
    xi: float = 2.0

    def __post_init__(self):
        if self.period < 1 or self.days < 1:
            raise ValueError(f"period and days must be positive, got {self.period}, {self.days}")
        if self.xi < 0:
            raise ValueError(f"xi must be nonnegative, got {self.xi}")


def masked_errors(s_true, s_hat, mask=None) -> EvalReport:
    """MAE and RMSE of ``s_hat`` against ``s_true`` over the observed cells."""
    s_true = np.asarray(s_true, dtype=float)
    s_hat = np.asarray(s_hat, dtype=float)
    if s_true.shape != s_hat.shape:
        raise ValueError(f"shape mismatch: {s_true.shape} vs {s_hat.shape}")
    if mask is None:
        mask = np.ones(s_true.shape, dtype=bool)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != s_true.shape:
        raise ValueError(f"mask shape {mask.shape} does not match {s_true.shape}")
    count = int(mask.sum())
    if count == 0:
        raise ValueError("mask selects no entries")
    diff = (s_true - s_hat)[mask]
    return EvalReport(
        mae=float(np.abs(diff).sum() / count),
        rmse=float(np.sqrt(np.square(diff).sum() / count)),
        observed_count=count,
    )


def flag_anomalies(m, params: FlagParams) -> np.ndarray:
    """Flag cells outside ``mean +/- xi * std`` of the same time-of-day across days.

    Each row is cut into ``days`` consecutive blocks of ``period`` values.
    The std is the population one (divide by ``days``) and both bounds are
    strict, so a zero-variance time slot never flags its own value.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {m.shape}")
    n, t = m.shape
    if params.period * params.days != t:
        raise ValueError(
            f"period*days = {params.period}*{params.days} does not match T={t}"
        )
    daily = m.reshape(n, params.days, params.period)
    # centre on day 1 so a constant slot gets its mean and zero std exactly
    ref = daily[:, :1, :]
    dev = daily - ref
    shift = dev.mean(axis=1, keepdims=True)
    mean = ref + shift
    band = params.xi * np.sqrt(np.square(dev - shift).mean(axis=1, keepdims=True))
    flags = (daily > mean + band) | (daily < mean - band)
    return flags.reshape(n, t)


def cumulative_eigenvalue_percentage(m) -> np.ndarray:
    """Running share of the singular value total, largest first."""
    sv = np.linalg.svd(np.asarray(m, dtype=float), compute_uv=False)
    total = sv.sum()
    if total == 0:
        raise ValueError("cumulative percentage undefined for an all-zero matrix")
    cep = np.cumsum(sv) / total
    cep[-1] = 1.0
    return np.minimum(cep, 1.0)
