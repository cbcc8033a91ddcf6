"""ADMM solvers: Hankel-tensor RPCA, its masked completion variant, and plain RPCA."""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .hankel import dehankelize, hankelize
from .tensor_core import _shrink_slice, _t_svt

__all__ = [
    "DecompositionResult",
    "SolverConfig",
    "default_gamma",
    "ht_rmc",
    "ht_rpca",
    "matrix_svt",
    "relative_residual",
    "rpca",
    "soft_shrink",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    """ADMM hyperparameters.

    ``gamma=None`` resolves to :func:`default_gamma` of the data shape at
    solve time. ``n_jobs`` only threads the per-slice SVDs; results do not
    depend on it.
    """

    tau: int = 1
    gamma: float | None = None
    rho0: float = 5e-5
    rho_max: float = 1e6
    beta: float = 1.1
    tol: float = 1e-5
    max_iter: int = 500
    n_jobs: int | None = None

    def __post_init__(self):
        if int(self.tau) != self.tau or self.tau < 1:
            raise ValueError(f"tau must be a positive integer, got {self.tau}")
        if self.gamma is not None and not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not 0 < self.rho0 <= self.rho_max:
            raise ValueError(f"need 0 < rho0 <= rho_max, got rho0={self.rho0}, rho_max={self.rho_max}")
        if not self.beta >= 1.0:
            raise ValueError(f"beta must be >= 1, got {self.beta}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValueError(f"max_iter must be a positive integer, got {self.max_iter}")

    def resolved(self, n: int, t: int) -> "SolverConfig":
        if self.gamma is not None:
            return self
        return replace(self, gamma=default_gamma(n, t))

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class DecompositionResult:
    low_rank: np.ndarray
    sparse: np.ndarray
    completed: np.ndarray
    iterations: int
    residual_history: list[float] = field(default_factory=list)
    converged: bool = False
    # nuclear norm (TNN for the Hankel solvers) of the final low-rank iterate
    tnn: float = 0.0
    config: SolverConfig | None = None

    @property
    def final_residual(self) -> float:
        return self.residual_history[-1] if self.residual_history else float("nan")


def default_gamma(n: int, t: int) -> float:
    if n < 1 or t < 1:
        raise ValueError(f"matrix dimensions must be positive, got ({n}, {t})")
    return 1.0 / math.sqrt(max(n, t))


def soft_shrink(y, lam: float) -> np.ndarray:
    """Elementwise ``sign(y) * max(|y| - lam, 0)``."""
    if lam < 0:
        raise ValueError(f"threshold must be nonnegative, got {lam}")
    y = np.asarray(y, dtype=float)
    return np.sign(y) * np.maximum(np.abs(y) - lam, 0.0)


def _matrix_svt(y: np.ndarray, lam: float) -> tuple[np.ndarray, float]:
    if lam < 0:
        raise ValueError(f"threshold must be nonnegative, got {lam}")
    return _shrink_slice(y, lam, real=True)


def matrix_svt(y, lam: float) -> np.ndarray:
    """Singular value thresholding, the prox of ``lam * ||.||_*``."""
    y = np.asarray(y, dtype=float)
    if y.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {y.shape}")
    return _matrix_svt(y, lam)[0]


def relative_residual(m, l, s, mask=None) -> float:
    """``||P_mask(m - l - s)||_F / ||P_mask(m)||_F``; ``mask=None`` means fully observed."""
    m = np.asarray(m, dtype=float)
    r = m - np.asarray(l, dtype=float) - np.asarray(s, dtype=float)
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != m.shape:
            raise ValueError(f"mask shape {mask.shape} does not match data shape {m.shape}")
        m = m[mask]
        r = r[mask]
    denom = np.linalg.norm(m)
    if denom == 0:
        raise ValueError("relative residual undefined: observed data has zero norm")
    return float(np.linalg.norm(r) / denom)


def _check_data(m, mask=None) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or 0 in m.shape:
        raise ValueError(f"expected a non-empty N x T matrix, got shape {m.shape}")
    vals = m if mask is None else m[mask]
    if not np.all(np.isfinite(vals)):
        raise ValueError("input contains non-finite observed values")
    return m


def _admm(z, mask, cfg: SolverConfig, low_rank_step, name: str) -> DecompositionResult:
    """Shared ADMM loop; ``low_rank_step(arg, threshold) -> (L, norm)``.

    Updates run in the order L, S, M (masked only), E, rho. ``mask=None``
    pins M to the data so the M-step disappears.
    """
    n, t = z.shape
    cfg = cfg.resolved(n, t)
    gamma = cfg.gamma
    if mask is None:
        m = z.copy()
        observed_norm = np.linalg.norm(z)
    else:
        m = np.where(mask, z, 0.0)
        observed_norm = np.linalg.norm(z[mask])
    # all-zero data is an exact fixed point; keep the residual finite
    denom = observed_norm if observed_norm > 0 else 1.0

    s = np.zeros_like(m)
    e = np.zeros_like(m)
    low = np.zeros_like(m)
    norm = 0.0
    rho = cfg.rho0
    history: list[float] = []
    converged = False
    for it in range(1, cfg.max_iter + 1):
        low, norm = low_rank_step(m - s + e / rho, 1.0 / rho)
        s = soft_shrink(m - low + e / rho, gamma / rho)
        if mask is not None:
            m = np.where(mask, z, low + s - e / rho)
        r = m - low - s
        e = e + rho * r
        res = float(np.linalg.norm(r if mask is None else r[mask]) / denom)
        history.append(res)
        rho = min(cfg.beta * rho, cfg.rho_max)
        if res < cfg.tol:
            converged = True
            break
    log.debug("%s stopped after %d iterations, residual %.3e", name, it, history[-1])
    return DecompositionResult(
        low_rank=low,
        sparse=s,
        completed=m,
        iterations=len(history),
        residual_history=history,
        converged=converged,
        tnn=norm,
        config=cfg,
    )


def _hankel_step(tau: int, n_jobs):
    def step(arg, lam):
        tensor, norm = _t_svt(hankelize(arg, tau), lam, n_jobs)
        return dehankelize(tensor), norm
    return step


def ht_rpca(m, cfg: SolverConfig) -> DecompositionResult:
    """Decompose ``m`` into a low-rank Hankel-tensor part and a sparse part.

    Minimizes ``tnn(H(L)) + gamma * ||S||_1`` subject to ``L + S = m`` by
    ADMM with a geometrically growing penalty. Hitting ``max_iter`` is not
    an error; check ``result.converged``.
    """
    m = _check_data(m)
    if cfg.tau > m.shape[1]:
        raise ValueError(f"tau={cfg.tau} exceeds the number of timestamps {m.shape[1]}")
    return _admm(m, None, cfg, _hankel_step(cfg.tau, cfg.n_jobs), "ht-rpca")


def ht_rmc(z, mask, cfg: SolverConfig) -> DecompositionResult:
    """Hankel-tensor RPCA on partially observed data.

    Entries of ``z`` outside ``mask`` are ignored. Missing cells of the
    working matrix start at zero and are re-estimated every iteration; the
    observed cells of ``result.completed`` are always exactly ``z``.
    """
    mask = np.asarray(mask, dtype=bool)
    z = np.asarray(z, dtype=float)
    if mask.shape != z.shape:
        raise ValueError(f"mask shape {mask.shape} does not match data shape {z.shape}")
    if not mask.any():
        raise ValueError("observation mask is empty")
    z = _check_data(z, mask)
    if cfg.tau > z.shape[1]:
        raise ValueError(f"tau={cfg.tau} exceeds the number of timestamps {z.shape[1]}")
    return _admm(z, mask, cfg, _hankel_step(cfg.tau, cfg.n_jobs), "ht-rmc")


def rpca(m, cfg: SolverConfig) -> DecompositionResult:
    """Matrix RPCA, ``||L||_* + gamma * ||S||_1``, with the same ADMM schedule.

    ``cfg.tau`` is ignored.
    """
    m = _check_data(m)
    return _admm(m, None, cfg, _matrix_svt, "rpca")
