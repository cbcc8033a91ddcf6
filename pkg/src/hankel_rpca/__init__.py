"""Hankel-structured tensor robust PCA for multivariate time series anomaly detection."""
from .hankel import count_matrix, dehankelize, hankelize
from .metrics import EvalReport, FlagParams, cumulative_eigenvalue_percentage, flag_anomalies, masked_errors
from .solvers import (
    DecompositionResult,
    SolverConfig,
    default_gamma,
    ht_rmc,
    ht_rpca,
    matrix_svt,
    relative_residual,
    rpca,
    soft_shrink,
)
from .synth import SynthConfig, SynthDataset, gen_mask, gen_synthetic
from .tensor_core import TSvdResult, bcirc, dft_mode3, idft_mode3, t_product, t_svd, t_svt, t_transpose, tnn

__version__ = "0.1.0"
