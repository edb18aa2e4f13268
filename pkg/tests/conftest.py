"""Shared fixtures: the frozen corollary-regime ensembles (a=0, b=1) are used
by both the estimation property tests and the acceptance suite, so they are
simulated once per session."""

import pytest

from mfbmsub import estimate_corr_curve, simulate_ensemble

from corollary_setup import corollary_config


@pytest.fixture(scope="session")
def corollary_curves():
    """(clock label, H) -> (config, correlation CurveSeries), computed lazily."""
    cache = {}

    def get(clock_label: str, hurst: float):
        key = (clock_label, hurst)
        if key not in cache:
            cfg = corollary_config(clock_label, hurst)
            ens = simulate_ensemble(cfg)
            cache[key] = (cfg, estimate_corr_curve(ens))
        return cache[key]

    return get
