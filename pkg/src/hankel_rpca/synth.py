"""Synthetic periodic low-rank series with sparse Gaussian anomalies."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["SynthConfig", "SynthDataset", "PAPER_SYNTH", "gen_mask", "gen_synthetic", "periodic_factors"]


@dataclass(frozen=True)
class SynthConfig:
    n: int = 100
    t: int = 1200
    r: int = 4
    sigma_u: float = 20.0
    sigma_s: float = 40.0
    sigma_noise: float = 0.1
    anomaly_ratio: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.t < 1:
            raise ValueError(f"n and t must be positive, got n={self.n}, t={self.t}")
        if not 1 <= self.r <= min(self.n, self.t):
            raise ValueError(f"rank r={self.r} must lie in [1, min(n, t)={min(self.n, self.t)}]")
        if not (self.sigma_u > 0 and self.sigma_s > 0 and self.sigma_noise >= 0):
            raise ValueError("sigma_u and sigma_s must be positive, sigma_noise nonnegative")
        if not 0 <= self.anomaly_ratio <= 1:
            raise ValueError(f"anomaly_ratio must lie in [0, 1], got {self.anomaly_ratio}")


PAPER_SYNTH = SynthConfig()


@dataclass
class SynthDataset:
    corrupted: np.ndarray
    low_rank: np.ndarray
    sparse: np.ndarray
    anomaly_index: np.ndarray  # (k, 2) array of (row, col), row-major order
    noise: np.ndarray

    @property
    def anomaly_mask(self) -> np.ndarray:
        out = np.zeros(self.corrupted.shape, dtype=bool)
        out[self.anomaly_index[:, 0], self.anomaly_index[:, 1]] = True
        return out


def periodic_factors(r: int, t: int) -> np.ndarray:
    """``r x t`` matrix with row ``q`` equal to ``sin(pi/4 * q * s + pi/4 * q)``, ``s = 0.1, 0.2, ...``."""
    grid = np.arange(1, t + 1) / 10.0
    q = np.arange(1, r + 1)[:, None]
    return np.sin(np.pi / 4 * q * grid + np.pi / 4 * q)


def gen_synthetic(cfg: SynthConfig = PAPER_SYNTH) -> SynthDataset:
    """Draw ``corrupted = U V + S + noise``.

    Independent sub-streams of ``cfg.seed`` feed, in order, the loadings
    ``U``, the anomaly positions, the anomaly magnitudes and the noise.
    """
    rng_u, rng_idx, rng_s, rng_noise = (
        np.random.default_rng(s) for s in np.random.SeedSequence(cfg.seed).spawn(4)
    )
    n, t = cfg.n, cfg.t
    u = rng_u.normal(0.0, cfg.sigma_u, size=(n, cfg.r))
    low = u @ periodic_factors(cfg.r, t)

    k = int(round(cfg.anomaly_ratio * n * t))
    flat = np.sort(rng_idx.choice(n * t, size=k, replace=False))
    sparse = np.zeros(n * t)
    sparse[flat] = rng_s.normal(0.0, cfg.sigma_s, size=k)
    sparse = sparse.reshape(n, t)

    noise = rng_noise.normal(0.0, cfg.sigma_noise, size=(n, t)) if cfg.sigma_noise > 0 else np.zeros((n, t))
    index = np.column_stack(np.unravel_index(flat, (n, t)))
    return SynthDataset(low + sparse + noise, low, sparse, index, noise)


def gen_mask(n: int, t: int, missing_ratio: float, seed: int) -> np.ndarray:
    """Boolean observation mask with exactly ``round(missing_ratio*n*t)`` missing cells."""
    if not 0 <= missing_ratio < 1:
        raise ValueError(f"missing_ratio must lie in [0, 1), got {missing_ratio}")
    rng = np.random.default_rng(seed)
    k = int(round(missing_ratio * n * t))
    observed = np.ones(n * t, dtype=bool)
    observed[rng.choice(n * t, size=k, replace=False)] = False
    return observed.reshape(n, t)
