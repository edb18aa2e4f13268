"""Exact covariance kernels and exact joint Gaussian sampling of the mixed
process a*B_t + b*B^H_t, plus a circulant-embedding fast path for uniform
grids.

The exact sampler factorizes the pairwise covariance matrix at the requested
(possibly random, possibly tied) time points, so there is no discretization
bias; this is the workhorse behind the time-changed ensembles, where the
query times are subordinator values.
"""

from __future__ import annotations

import warnings

import numpy as np
from scipy.linalg import lapack

from .errors import FactorizationError
from .params import MfbmParams

__all__ = [
    "fbm_cov",
    "mfbm_cov",
    "mfbm_cov_matrix",
    "sample_mfbm_at_times",
    "mfbm_given_normals",
    "sample_fgn_grid",
]


def _check_hurst(hurst: float) -> None:
    if not (np.isfinite(hurst) and 0.0 < hurst < 1.0):
        raise ValueError(f"hurst must lie strictly in (0, 1), got {hurst}")


def fbm_cov(t, s, hurst):
    """Fractional Brownian motion covariance
    0.5 * (t**(2H) + s**(2H) - |t - s|**(2H)).

    Broadcasts over array input.  H = 1/2 reduces exactly to min(t, s).
    """
    _check_hurst(hurst)
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any(t < 0.0) or np.any(s < 0.0):
        raise ValueError("fbm_cov requires nonnegative times")
    h2 = 2.0 * hurst
    out = 0.5 * (t ** h2 + s ** h2 - np.abs(t - s) ** h2)
    return out if out.ndim else float(out)


def mfbm_cov(t, s, p: MfbmParams):
    """Covariance of the mixed process: a**2 * min(t, s) + b**2 * fbm_cov."""
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any(t < 0.0) or np.any(s < 0.0):
        raise ValueError("mfbm_cov requires nonnegative times")
    out = p.a ** 2 * np.minimum(t, s) + p.b ** 2 * fbm_cov(t, s, p.hurst)
    return out if out.ndim else float(out)


def _cov_fast(t: np.ndarray, p: MfbmParams) -> np.ndarray:
    # pairwise mixed-process covariance without re-validation (t >= 0 assumed)
    h2 = 2.0 * p.hurst
    th = t ** h2
    fbm = 0.5 * (th[:, None] + th[None, :] - np.abs(t[:, None] - t[None, :]) ** h2)
    return p.a ** 2 * np.minimum(t[:, None], t[None, :]) + p.b ** 2 * fbm


def mfbm_cov_matrix(times, p: MfbmParams) -> np.ndarray:
    """Pairwise mixed-process covariance matrix at the given times."""
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or np.any(t < 0.0) or not np.all(np.isfinite(t)):
        raise ValueError("times must be a 1-D array of nonnegative finite reals")
    return _cov_fast(t, p)


def _cholesky_with_jitter(cov: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor; on failure retries with diagonal jitter
    1e-12 * trace/n escalated by x10 at most 3 times."""
    n = cov.shape[0]
    base = 1e-12 * np.trace(cov) / n
    minor = n
    for jit in (0.0, base, 10.0 * base, 100.0 * base, 1000.0 * base):
        a = cov if jit == 0.0 else cov + jit * np.eye(n)
        c, info = lapack.dpotrf(a, lower=1, clean=0, overwrite_a=bool(jit != 0.0))
        if info == 0:
            return np.tril(c)
        if jit == 0.0:
            minor = int(info)
    raise FactorizationError(
        f"covariance matrix not positive definite beyond jitter budget "
        f"(order-{minor} leading minor fails; n={n}, trace={np.trace(cov):.6g})")


def mfbm_given_normals(times, p: MfbmParams, z: np.ndarray) -> np.ndarray:
    """Mixed-process values at nondecreasing times >= 0 from supplied standard
    normals.

    Exactly-coincident times collapse to a single Gaussian coordinate (the
    value is duplicated), and t = 0 maps to 0; ``z`` must provide
    ``len(times)`` normals of which the first ``n_unique`` are consumed, so
    the draw count never depends on the tie pattern.
    """
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ValueError("times must be a nonempty 1-D sequence")
    if not np.all(np.isfinite(t)):
        raise ValueError("times must be finite")
    if np.any(t < 0.0):
        raise ValueError("times must be nonnegative")
    if np.any(np.diff(t) < 0.0):
        raise ValueError("times must be nondecreasing")
    z = np.asarray(z, dtype=float)
    if z.shape != t.shape:
        raise ValueError("z must supply one standard normal per time point")

    if t[0] > 0.0 and np.all(np.diff(t) > 0.0):
        return _cholesky_with_jitter(_cov_fast(t, p)) @ z

    out = np.zeros(t.size)
    pos = t > 0.0
    if np.any(pos):
        uniq, inverse = np.unique(t[pos], return_inverse=True)
        lower = _cholesky_with_jitter(_cov_fast(uniq, p))
        out[pos] = (lower @ z[: uniq.size])[inverse]
    return out


def sample_mfbm_at_times(times, p: MfbmParams, rng: np.random.Generator) -> np.ndarray:
    """One exact joint draw of the mixed process at the given times.

    times must be nondecreasing and nonnegative; strictly increasing positive
    times are the common case, ties and zeros are handled as in
    :func:`mfbm_given_normals`.  Deterministic given the generator state.
    """
    t = np.asarray(times, dtype=float)
    z = rng.standard_normal(t.size if t.ndim == 1 else 0)
    return mfbm_given_normals(t, p, z)


def _fgn_autocov(n: int, hurst: float) -> np.ndarray:
    """Unit-grid fractional Gaussian noise autocovariance gamma(0..n)."""
    k = np.arange(n + 1, dtype=float)
    h2 = 2.0 * hurst
    return 0.5 * ((k + 1.0) ** h2 - 2.0 * k ** h2 + np.abs(k - 1.0) ** h2)


def _circulant_eigenvalues(gamma: np.ndarray) -> np.ndarray:
    # first row [g0 .. g_{n-1}, g_n, g_{n-1} .. g_1], length 2n
    row = np.concatenate([gamma[:-1], gamma[-1:], gamma[-2:0:-1]])
    return np.fft.fft(row).real


def _fgn_exact_fallback(n: int, dt: float, hurst: float,
                        rng: np.random.Generator) -> np.ndarray:
    times = dt * np.arange(1, n + 1, dtype=float)
    levels = sample_mfbm_at_times(times, MfbmParams(0.0, 1.0, hurst), rng)
    return np.diff(levels, prepend=0.0)


def sample_fgn_grid(n: int, dt: float, hurst: float, rng: np.random.Generator,
                    eig_rel_tol: float = 1e-12) -> np.ndarray:
    """n increments of fBm on a uniform grid of spacing dt, via circulant
    embedding of the fGn autocovariance (O(n log n)).

    Cumulative sums of the output have the fbm_cov covariance up to floating
    tolerance.  If the circulant eigenvalues dip below -eig_rel_tol times
    their maximum the routine warns and falls back to the exact
    factorization path.
    """
    _check_hurst(hurst)
    if n < 1:
        raise ValueError("n must be >= 1")
    if not (np.isfinite(dt) and dt > 0.0):
        raise ValueError("dt must be > 0")
    if n == 1:
        return dt ** hurst * rng.standard_normal(1)

    lam = _circulant_eigenvalues(_fgn_autocov(n, hurst))
    if lam.min() < -eig_rel_tol * lam.max():
        warnings.warn(
            "circulant embedding produced a negative eigenvalue "
            f"({lam.min():.3e}); falling back to exact factorization",
            RuntimeWarning, stacklevel=2)
        return _fgn_exact_fallback(n, dt, hurst, rng)
    lam = np.clip(lam, 0.0, None)

    m = 2 * n
    v = rng.standard_normal(m)
    z = np.empty(m, dtype=complex)
    z[0] = np.sqrt(lam[0] / m) * v[0]
    z[n] = np.sqrt(lam[n] / m) * v[1]
    half = np.sqrt(lam[1:n] / (2.0 * m))
    z[1:n] = half * (v[2:n + 1] + 1j * v[n + 1:m])
    z[n + 1:] = np.conj(z[1:n][::-1])
    fgn = np.fft.fft(z).real[:n]
    return dt ** hurst * fgn
