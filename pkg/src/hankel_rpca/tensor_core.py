"""Third-order tensor algebra under the t-product.

Tensors are plain ``numpy`` arrays of shape ``(n1, n2, n3)``; frontal slice
``k`` is ``a[:, :, k]``. The mode-3 DFT is unnormalized in the forward
direction and scaled by ``1/n3`` on the way back, matching ``numpy.fft``.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import NamedTuple

import numpy as np

__all__ = [
    "TSvdResult",
    "as_tensor3",
    "bcirc",
    "dft_mode3",
    "fold",
    "identity_tensor",
    "idft_mode3",
    "t_product",
    "t_svd",
    "t_svt",
    "t_transpose",
    "tnn",
    "unfold",
]

# relative imaginary residue tolerated by idft_mode3 before it refuses
_IMAG_RTOL = 1e-6


class TSvdResult(NamedTuple):
    U: np.ndarray
    S: np.ndarray
    V: np.ndarray


def as_tensor3(a, dtype=float) -> np.ndarray:
    arr = np.asarray(a, dtype=dtype)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3 or 0 in arr.shape:
        raise ValueError(f"expected a non-empty third-order tensor, got shape {arr.shape}")
    return arr


def dft_mode3(a) -> np.ndarray:
    """Discrete Fourier transform of every tube ``a[i, j, :]``."""
    return np.fft.fft(as_tensor3(a), axis=2)


def idft_mode3(a_bar) -> np.ndarray:
    """Inverse of :func:`dft_mode3`; returns a real tensor.

    Raises ``ValueError`` when the input is not conjugate symmetric along the
    third mode, i.e. when the inverse transform would be genuinely complex.
    """
    a_bar = as_tensor3(a_bar, dtype=complex)
    out = np.fft.ifft(a_bar, axis=2)
    scale = np.abs(out).max(initial=0.0)
    resid = np.abs(out.imag).max(initial=0.0)
    if resid > _IMAG_RTOL * max(scale, 1.0):
        raise ValueError(
            f"input is not conjugate symmetric along mode 3 (imaginary residue {resid:.3g})"
        )
    return np.ascontiguousarray(out.real)


def unfold(a) -> np.ndarray:
    """Stack the frontal slices vertically into an ``(n1*n3, n2)`` matrix."""
    a = as_tensor3(a, dtype=np.result_type(np.asarray(a), float))
    n1, n2, n3 = a.shape
    return a.transpose(2, 0, 1).reshape(n1 * n3, n2)


def fold(mat, n3: int) -> np.ndarray:
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] % n3:
        raise ValueError(f"cannot fold a {mat.shape} matrix into {n3} frontal slices")
    n1 = mat.shape[0] // n3
    return np.ascontiguousarray(mat.reshape(n3, n1, mat.shape[1]).transpose(1, 2, 0))


def bcirc(a) -> np.ndarray:
    """Block circulant matrix of the frontal slices.

    Block ``(r, c)`` is frontal slice ``(r - c) mod n3``. Test oracle only:
    memory grows with ``n3**2``.
    """
    a = as_tensor3(a, dtype=np.result_type(np.asarray(a), float))
    n1, n2, n3 = a.shape
    out = np.empty((n1 * n3, n2 * n3), dtype=a.dtype)
    for r in range(n3):
        for c in range(n3):
            out[r * n1:(r + 1) * n1, c * n2:(c + 1) * n2] = a[:, :, (r - c) % n3]
    return out


def identity_tensor(n: int, n3: int) -> np.ndarray:
    eye = np.zeros((n, n, n3))
    eye[:, :, 0] = np.eye(n)
    return eye


def t_transpose(a) -> np.ndarray:
    """Tensor transpose: transpose each slice and reverse slices 2..n3."""
    a = as_tensor3(a)
    order = [0] + list(range(a.shape[2] - 1, 0, -1))
    return np.ascontiguousarray(a.transpose(1, 0, 2)[:, :, order])


def t_product(a, b) -> np.ndarray:
    """t-product ``a * b`` computed slice-wise in the Fourier domain."""
    a = as_tensor3(a)
    b = as_tensor3(b)
    n1, n2, n3 = a.shape
    if b.shape[0] != n2 or b.shape[2] != n3:
        raise ValueError(f"t-product dimension mismatch: {a.shape} * {b.shape}")
    fa = np.fft.rfft(a, axis=2)
    fb = np.fft.rfft(b, axis=2)
    fc = np.einsum("ijk,jlk->ilk", fa, fb)
    return np.fft.irfft(fc, n=n3, axis=2)


def _half_weights(n3: int) -> np.ndarray:
    # multiplicity of each half-spectrum slice inside the full spectrum
    w = np.full(n3 // 2 + 1, 2.0)
    w[0] = 1.0
    if n3 % 2 == 0:
        w[-1] = 1.0
    return w


def _self_conjugate(k: int, n3: int) -> bool:
    return k == 0 or (n3 % 2 == 0 and k == n3 // 2)


def _slice_svd(x: np.ndarray, real: bool, compute_uv: bool = True):
    if real:
        x = x.real
    return np.linalg.svd(x, full_matrices=False, compute_uv=compute_uv)


def _map_slices(func, count: int, n_jobs: int | None):
    if n_jobs is None or n_jobs <= 1 or count <= 1:
        return [func(k) for k in range(count)]
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(func, range(count)))


def t_svd(a, n_jobs: int | None = None) -> TSvdResult:
    """Full t-SVD ``a = U * S * V^T`` with f-diagonal ``S``.

    Each half-spectrum Fourier slice gets an ordinary SVD; the remaining
    slices are filled by conjugation so the inverse transform is real.
    """
    a = as_tensor3(a)
    n1, n2, n3 = a.shape
    fa = np.fft.rfft(a, axis=2)
    nf = fa.shape[2]
    mn = min(n1, n2)

    def work(k):
        x = fa[:, :, k]
        if _self_conjugate(k, n3):
            x = x.real
        return np.linalg.svd(x, full_matrices=True)

    parts = _map_slices(work, nf, n_jobs)
    fu = np.empty((n1, n1, nf), dtype=complex)
    fs = np.zeros((n1, n2, nf), dtype=complex)
    fv = np.empty((n2, n2, nf), dtype=complex)
    idx = np.arange(mn)
    for k, (u, s, vh) in enumerate(parts):
        fu[:, :, k] = u
        fs[idx, idx, k] = s
        fv[:, :, k] = vh.conj().T
    return TSvdResult(
        np.fft.irfft(fu, n=n3, axis=2),
        np.fft.irfft(fs, n=n3, axis=2),
        np.fft.irfft(fv, n=n3, axis=2),
    )


def tnn(a) -> float:
    """Tensor nuclear norm: average nuclear norm over the Fourier slices."""
    a = as_tensor3(a)
    n3 = a.shape[2]
    fa = np.fft.rfft(a, axis=2)
    w = _half_weights(n3)
    total = 0.0
    for k in range(fa.shape[2]):
        total += w[k] * _slice_svd(fa[:, :, k], _self_conjugate(k, n3), compute_uv=False).sum()
    return float(total / n3)


def _shrink_slice(x: np.ndarray, lam: float, real: bool):
    u, s, vh = _slice_svd(x, real)
    s = s - lam
    keep = int(np.count_nonzero(s > 0))
    if keep == 0:
        return np.zeros(x.shape, dtype=u.dtype), 0.0
    s = s[:keep]
    return (u[:, :keep] * s) @ vh[:keep], float(s.sum())


def _t_svt(y, lam: float, n_jobs: int | None = None):
    """t-SVT returning ``(x, tnn(x))``; the norm comes free from the shrunk spectra."""
    if lam < 0:
        raise ValueError(f"threshold must be nonnegative, got {lam}")
    y = as_tensor3(y)
    n3 = y.shape[2]
    fy = np.fft.rfft(y, axis=2)
    nf = fy.shape[2]
    parts = _map_slices(
        lambda k: _shrink_slice(fy[:, :, k], lam, _self_conjugate(k, n3)), nf, n_jobs
    )
    fw = np.empty_like(fy)
    w = _half_weights(n3)
    norm = 0.0
    for k, (slc, ssum) in enumerate(parts):
        fw[:, :, k] = slc
        norm += w[k] * ssum
    # irfft supplies the conjugate mirror for slices past the half spectrum
    return np.fft.irfft(fw, n=n3, axis=2), norm / n3


def t_svt(y, lam: float, n_jobs: int | None = None) -> np.ndarray:
    """Proximal operator of ``lam * tnn``.

    Singular values of the Fourier slices ``1 .. ceil((n3+1)/2)`` are
    soft-thresholded by ``lam``; the rest of the spectrum is their conjugate.
    ``n_jobs`` threads the per-slice SVDs without changing the result.
    """
    return _t_svt(y, lam, n_jobs)[0]
