import numpy as np
import pytest

from mfbmsub import (
    CurveSeries,
    EnsembleConfig,
    EstimationError,
    FitError,
    GammaParams,
    MfbmParams,
    ModelSpec,
    PathEnsemble,
    TssParams,
    estimate_corr_curve,
    estimate_cov_curve,
    fit_power_law,
    lrd_verdict,
    simulate_ensemble,
    y_variance,
)
from corollary_setup import corollary_config

GAMMA_MODEL = ModelSpec(MfbmParams(1.0, 1.0, 0.66), GammaParams(0.75))


def small_cfg(paths=600, seed=42, model=GAMMA_MODEL):
    return EnsembleConfig(model, 1.0, np.geomspace(5.0, 50.0, 6), paths, seed)


def test_config_validation():
    with pytest.raises(ValueError):
        EnsembleConfig(GAMMA_MODEL, -1.0, np.array([2.0]), 100, 1)
    with pytest.raises(ValueError):
        EnsembleConfig(GAMMA_MODEL, 3.0, np.array([2.0, 4.0]), 100, 1)
    with pytest.raises(ValueError):
        EnsembleConfig(GAMMA_MODEL, 1.0, np.array([2.0, 4.0]), 1, 1)


def test_simulate_deterministic_rerun():
    a = simulate_ensemble(small_cfg())
    b = simulate_ensemble(small_cfg())
    assert np.array_equal(a.y_at_s, b.y_at_s)
    assert np.array_equal(a.y_at_t, b.y_at_t)


@pytest.mark.parametrize("workers", [4, 16])
def test_simulate_worker_count_invariance(workers):
    base = simulate_ensemble(small_cfg(paths=1000))
    par = simulate_ensemble(small_cfg(paths=1000), workers=workers)
    assert np.array_equal(base.y_at_s, par.y_at_s)
    assert np.array_equal(base.y_at_t, par.y_at_t)


def test_variance_at_s_matches_exact():
    cfg = EnsembleConfig(GAMMA_MODEL, 1.0, np.array([3.0]), 30_000, 7)
    ens = simulate_ensemble(cfg)
    sq = ens.y_at_s ** 2
    se = sq.std(ddof=1) / np.sqrt(cfg.paths)
    assert abs(sq.mean() - y_variance(GAMMA_MODEL, 1.0)) < 3 * se


@pytest.mark.slow
def test_brownian_in_gamma_time_cov_oracle():
    # a=1, b=0: Cov(Y_t, Y_s) = E[clock at s] = s/nu, no asymptotics needed
    model = ModelSpec(MfbmParams(1.0, 0.0, 0.66), GammaParams(0.75))
    cfg = EnsembleConfig(model, 1.0, np.array([2.0, 5.0, 20.0]), 100_000, 11)
    curve = estimate_cov_curve(simulate_ensemble(cfg), se_method="delta")
    assert np.all(np.abs(curve.value - 1.0 / 0.75) < 3 * curve.std_error)


def test_brownian_in_tss_time_cov_oracle():
    model = ModelSpec(MfbmParams(1.0, 0.0, 0.66), TssParams(0.5, 0.1))
    cfg = EnsembleConfig(model, 1.0, np.array([2.0, 8.0]), 30_000, 12)
    curve = estimate_cov_curve(simulate_ensemble(cfg), se_method="delta")
    exact = 0.5 * 0.1 ** -0.5
    assert np.all(np.abs(curve.value - exact) < 3 * curve.std_error)


def test_self_correlation_is_one():
    ens = simulate_ensemble(small_cfg(paths=500))
    diag = PathEnsemble(config=ens.config,
                        y_at_s=ens.y_at_s,
                        y_at_t=np.tile(ens.y_at_s[:, None], (1, 6)))
    curve = estimate_corr_curve(diag, se_method="delta")
    assert np.all(curve.value == 1.0)


def test_shuffled_pairing_kills_correlation():
    ens = simulate_ensemble(small_cfg(paths=4000, seed=5))
    rng = np.random.default_rng(0)
    shuffled = PathEnsemble(config=ens.config,
                            y_at_s=ens.y_at_s,
                            y_at_t=ens.y_at_t[rng.permutation(4000)])
    curve = estimate_corr_curve(shuffled)
    assert np.all(np.abs(curve.value) < 3 * curve.std_error)


def test_mean_corrected_diagnostic_close():
    curve = estimate_corr_curve(simulate_ensemble(small_cfg(paths=5000)))
    assert curve.mean_corrected is not None
    assert np.all(np.abs(curve.mean_corrected - curve.value) < 4 * curve.std_error)


def test_needs_hundred_paths():
    ens = simulate_ensemble(small_cfg(paths=50))
    with pytest.raises(EstimationError):
        estimate_corr_curve(ens)


def test_bootstrap_se_scaling():
    # doubling M shrinks the average standard error like 1/sqrt(2)
    ratios = []
    for seed in range(5):
        se = {}
        for m in (4000, 8000):
            curve = estimate_corr_curve(simulate_ensemble(small_cfg(paths=m, seed=seed)))
            se[m] = curve.std_error.mean()
        ratios.append(se[8000] / se[4000])
    assert 0.9 / np.sqrt(2.0) <= np.mean(ratios) <= 1.1 / np.sqrt(2.0)


def test_bootstrap_and_delta_se_agree():
    ens = simulate_ensemble(small_cfg(paths=8000, seed=3))
    boot = estimate_corr_curve(ens, se_method="bootstrap")
    delt = estimate_corr_curve(ens, se_method="delta")
    assert np.all(np.abs(boot.std_error / delt.std_error - 1.0) < 0.35)


# ------------------------------------------------------------- power-law fit

def synthetic_curve(values, ts, se=None):
    se = np.zeros_like(ts) if se is None else se
    return CurveSeries(s=1.0, t=ts, value=values, std_error=se)


def test_fit_exact_power_law():
    ts = np.geomspace(10.0, 1000.0, 20)
    fit = fit_power_law(synthetic_curve(3.0 * ts ** -0.3, ts), (10.0, 1000.0))
    assert fit.c == pytest.approx(3.0, abs=1e-10)
    assert fit.d == pytest.approx(0.3, abs=1e-10)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)


def test_fit_with_multiplicative_noise():
    rng = np.random.default_rng(44)
    ts = np.geomspace(50.0, 500.0, 20)
    vals = 2.0 * ts ** -0.45 * (1.0 + 0.01 * rng.standard_normal(20))
    fit = fit_power_law(synthetic_curve(vals, ts, se=0.01 * vals), (50.0, 500.0))
    assert abs(fit.d - 0.45) < 0.02


def test_fit_mixture_recovers_dominant_exponent():
    # c1 t**-H + c2 t**(H-1) with H = 0.7: t**-0.3 dominates far out
    ts = np.geomspace(1e3, 1e4, 20)
    vals = 0.5 * ts ** -0.7 + 1.0 * ts ** -0.3
    fit = fit_power_law(synthetic_curve(vals, ts), (1e3, 1e4))
    assert abs(fit.d - 0.3) < 0.03


def test_fit_needs_five_points():
    ts = np.geomspace(10.0, 100.0, 8)
    curve = synthetic_curve(ts ** -0.5, ts)
    with pytest.raises(FitError):
        fit_power_law(curve, (10.0, 12.0))


def test_lrd_verdict_rules():
    from mfbmsub.estimation import PowerLawFit
    ok = PowerLawFit(c=1.0, d=0.3, d_se=0.025, r_squared=0.99,
                     window=(50.0, 500.0), n_points=20)
    v = lrd_verdict(ok, model=GAMMA_MODEL)
    assert v.is_lrd and v.d_ci[0] > 0.0 and v.d_ci[1] < 1.0
    assert v.theory_d == pytest.approx(1.0 - 0.66)
    bad = PowerLawFit(c=1.0, d=1.2, d_se=0.05, r_squared=0.99,
                      window=(50.0, 500.0), n_points=20)
    assert not lrd_verdict(bad).is_lrd


# ------------------------------------------------------ slope-sign invariant

@pytest.mark.slow
@pytest.mark.parametrize("clock", ["tss", "gamma"])
@pytest.mark.parametrize("hurst", [0.55, 0.66, 0.7, 0.8])
def test_fitted_decay_exponent_in_unit_interval(clock, hurst):
    model = ModelSpec(MfbmParams(1.0, 1.0, hurst),
                      TssParams(0.5, 0.1) if clock == "tss" else GammaParams(0.75))
    cfg = EnsembleConfig(model, 1.0, np.geomspace(50.0, 500.0, 12), 200_000, 77)
    curve = estimate_corr_curve(simulate_ensemble(cfg))
    fit = fit_power_law(curve, (50.0, 500.0))
    assert 0.0 < fit.d < 1.0


# --------------------------------------------------- pure-fBm tail exponent

@pytest.mark.slow
@pytest.mark.parametrize("clock", ["tss", "gamma"])
@pytest.mark.parametrize("hurst", [0.3, 0.5, 0.7])
def test_pure_fbm_tail_exponent(clock, hurst, corollary_curves):
    # For a=0, b=1 the correlation tail decays with exponent min(H, 1-H): the
    # t**(H-1) branch dominates for H > 1/2, while for H < 1/2 the surviving
    # O(1) covariance term makes the t**(-H) branch dominate.  The fit is
    # taken on the deep tail t >= 150 s where the subdominant branch is small.
    if hurst == 0.5:
        cfg = corollary_config(clock, hurst)
        curve = estimate_corr_curve(simulate_ensemble(cfg))
    else:
        cfg, curve = corollary_curves(clock, hurst)
    fit = fit_power_law(curve, (150.0 * cfg.s, 500.0 * cfg.s))
    assert abs(fit.d - min(hurst, 1.0 - hurst)) < 0.05
