import numpy as np
import pytest

from mfbmsub import (
    FactorizationError,
    MfbmParams,
    fbm_cov,
    mfbm_cov,
    mfbm_cov_matrix,
    sample_fgn_grid,
    sample_mfbm_at_times,
)
from mfbmsub import gaussian


def test_fbm_cov_values():
    assert fbm_cov(1.0, 1.0, 0.5) == pytest.approx(1.0, abs=1e-15)
    assert fbm_cov(2.0, 1.0, 0.5) == pytest.approx(1.0, abs=1e-15)
    # 0.5*(8 + 1 - 3**1.5)
    assert fbm_cov(4.0, 1.0, 0.75) == pytest.approx(1.901923788646684, rel=1e-12)


def test_fbm_cov_symmetry_and_min_reduction():
    ts = np.geomspace(0.05, 80.0, 17)
    for h in (0.3, 0.5, 0.75, 0.9):
        c = fbm_cov(ts[:, None], ts[None, :], h)
        assert np.allclose(c, c.T, rtol=0.0, atol=0.0)
    # H = 1/2 collapses to min(t, s) at machine precision
    c = fbm_cov(ts[:, None], ts[None, :], 0.5)
    assert np.allclose(c, np.minimum(ts[:, None], ts[None, :]), rtol=1e-15)


def test_fbm_cov_rejects_bad_input():
    with pytest.raises(ValueError):
        fbm_cov(-1.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        fbm_cov(1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        fbm_cov(1.0, 1.0, 0.0)


def test_mfbm_cov_values():
    assert mfbm_cov(2.0, 1.0, MfbmParams(1.0, 0.0, 0.7)) == pytest.approx(1.0)
    assert mfbm_cov(4.0, 1.0, MfbmParams(0.0, 1.0, 0.75)) == pytest.approx(
        1.901923788646684, rel=1e-12)
    assert mfbm_cov(1.0, 1.0, MfbmParams(1.0, 1.0, 0.5)) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        mfbm_cov(1.0, -2.0, MfbmParams(1.0, 1.0, 0.5))


@pytest.mark.parametrize("h", [0.3, 0.5, 0.7])
@pytest.mark.parametrize("ab", [(1.0, 1.0), (0.0, 1.0), (2.0, 0.5)])
def test_mfbm_cov_matrix_psd(h, ab):
    times = np.geomspace(0.1, 100.0, 64)
    c = mfbm_cov_matrix(times, MfbmParams(ab[0], ab[1], h))
    eig = np.linalg.eigvalsh(c)
    assert eig.min() >= -1e-8 * eig.max()


def test_sample_mfbm_variance_mc():
    # times=[1], a=1, b=0: draws are standard normal
    p = MfbmParams(1.0, 0.0, 0.7)
    rng = np.random.default_rng(101)
    draws = np.array([sample_mfbm_at_times([1.0], p, rng)[0] for _ in range(10 ** 5)])
    assert abs(draws.var() - 1.0) < 0.02


def test_sample_mfbm_cov_mc():
    # times=[1,2], a=0, b=1, H=0.5: Cov(X_1, X_2) = min(1, 2) = 1
    p = MfbmParams(0.0, 1.0, 0.5)
    rng = np.random.default_rng(102)
    draws = np.array([sample_mfbm_at_times([1.0, 2.0], p, rng) for _ in range(10 ** 5)])
    cov = np.mean(draws[:, 0] * draws[:, 1])
    assert abs(cov - 1.0) < 0.02


def test_sample_mfbm_deterministic():
    p = MfbmParams(1.0, 1.0, 0.7)
    t = [0.3, 1.0, 2.5, 7.0]
    a = sample_mfbm_at_times(t, p, np.random.default_rng(7))
    b = sample_mfbm_at_times(t, p, np.random.default_rng(7))
    assert np.array_equal(a, b)


def test_sample_mfbm_ties_and_zero():
    p = MfbmParams(1.0, 1.0, 0.7)
    vals = sample_mfbm_at_times([0.0, 1.0, 1.0, 3.0], p, np.random.default_rng(3))
    assert vals[0] == 0.0
    assert vals[1] == vals[2]
    with pytest.raises(ValueError):
        sample_mfbm_at_times([2.0, 1.0], p, np.random.default_rng(3))
    with pytest.raises(ValueError):
        sample_mfbm_at_times([-1.0, 1.0], p, np.random.default_rng(3))


def test_cholesky_jitter_reports_minor():
    bad = np.array([[1.0, 0.0], [0.0, -1.0]])
    with pytest.raises(FactorizationError, match="minor"):
        gaussian._cholesky_with_jitter(bad)


def test_fgn_single_point_variance():
    rng = np.random.default_rng(11)
    draws = np.array([sample_fgn_grid(1, 1.0, 0.5, rng)[0] for _ in range(10 ** 5)])
    assert abs(draws.var() - 1.0) < 0.02


def test_fgn_lag1_correlation_h05():
    rng = np.random.default_rng(12)
    pairs = np.array([sample_fgn_grid(2, 1.0, 0.5, rng) for _ in range(10 ** 5)])
    r = np.corrcoef(pairs[:, 0], pairs[:, 1])[0, 1]
    se = 1.0 / np.sqrt(pairs.shape[0])
    assert abs(r) < 3 * se


def test_fgn_lag1_correlation_h075():
    # rho(1) = (2**(2H) - 2)/2 = 2**1.5/2 - 1
    rng = np.random.default_rng(13)
    pairs = np.array([sample_fgn_grid(2, 1.0, 0.75, rng) for _ in range(10 ** 5)])
    r = np.corrcoef(pairs[:, 0], pairs[:, 1])[0, 1]
    assert abs(r - (2 ** 1.5 / 2 - 1)) < 0.02


def test_fgn_cumsum_matches_fbm_cov():
    rng = np.random.default_rng(14)
    n, h, dt = 8, 0.7, 0.5
    levels = np.cumsum([sample_fgn_grid(n, dt, h, rng) for _ in range(30_000)], axis=1)
    emp = levels.T @ levels / levels.shape[0]
    times = dt * np.arange(1, n + 1)
    exact = fbm_cov(times[:, None], times[None, :], h)
    # elementwise Monte Carlo band: Var(x_i x_j) = C_ii C_jj + C_ij**2
    se = np.sqrt((np.outer(np.diag(exact), np.diag(exact)) + exact ** 2)
                 / levels.shape[0])
    assert np.all(np.abs(emp - exact) < 5 * se)


def test_fgn_negative_eigenvalue_falls_back(monkeypatch):
    rng = np.random.default_rng(15)
    monkeypatch.setattr(gaussian, "_circulant_eigenvalues",
                        lambda g: np.array([1.0, -0.5, 1.0, 1.0]))
    with pytest.warns(RuntimeWarning, match="falling back"):
        out = sample_fgn_grid(2, 1.0, 0.6, rng)
    assert out.shape == (2,) and np.all(np.isfinite(out))


def test_fgn_exact_fallback_distribution():
    rng = np.random.default_rng(16)
    draws = np.array([gaussian._fgn_exact_fallback(2, 1.0, 0.75, rng)
                      for _ in range(40_000)])
    r = np.corrcoef(draws[:, 0], draws[:, 1])[0, 1]
    assert abs(r - (2 ** 1.5 / 2 - 1)) < 0.025
    assert abs(draws[:, 0].var() - 1.0) < 0.025


def test_fgn_rejects_bad_input():
    rng = np.random.default_rng(17)
    with pytest.raises(ValueError):
        sample_fgn_grid(0, 1.0, 0.5, rng)
    with pytest.raises(ValueError):
        sample_fgn_grid(4, -1.0, 0.5, rng)
