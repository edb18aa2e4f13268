"""Self-contained oracle checks behind the ``validate`` CLI command: sampler
moment identities, Laplace-transform checks, density normalization,
gamma-ratio expansion order, and the asymptotic-variant adjudication.

Every check compares an observed value against an independent expected value
at an explicit tolerance and is deterministic given the seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .analytics import adjudicate_variants, gamma_ratio_expansion_check
from .params import GammaParams, MfbmParams, ModelSpec, TssParams
from .subordinators import (
    sample_gamma_increments,
    sample_tss_increments,
    stable_density,
    tss_density,
    tss_fractional_moment,
    tss_laplace_transform,
)

__all__ = ["CheckResult", "run_checks", "check_names"]


@dataclass
class CheckResult:
    name: str
    passed: bool
    expected: object
    observed: object
    tolerance: object
    detail: dict = field(default_factory=dict)


def _levy_half_density(x: np.ndarray) -> np.ndarray:
    # alpha = 1/2, t = 1 closed form
    return x ** -1.5 * np.exp(-0.25 / x) / (2.0 * np.sqrt(np.pi))


def _check_tss_mean(seed: int, draws: int) -> CheckResult:
    p = TssParams(0.5, 0.1)
    rng = np.random.default_rng(np.random.SeedSequence((seed, 1)))
    x = sample_tss_increments(np.full(draws, 1.0), p, rng)
    exact = p.mean_rate
    se = x.std(ddof=1) / np.sqrt(draws)
    return CheckResult("tss-mean", bool(abs(x.mean() - exact) < 3 * se),
                       exact, float(x.mean()), f"3*SE = {3 * se:.3g}")


def _check_tss_laplace(seed: int, draws: int) -> CheckResult:
    p = TssParams(0.5, 0.1)
    rng = np.random.default_rng(np.random.SeedSequence((seed, 2)))
    x = sample_tss_increments(np.full(draws, 1.0), p, rng)
    rows, ok = {}, True
    for u in (0.5, 1.0, 2.0):
        e = np.exp(-u * x)
        se = e.std(ddof=1) / np.sqrt(draws)
        exact = tss_laplace_transform(u, 1.0, p)
        good = abs(e.mean() - exact) < 3 * se
        ok = ok and bool(good)
        rows[u] = {"expected": exact, "observed": float(e.mean()),
                   "tolerance": 3 * se, "passed": bool(good)}
    return CheckResult("tss-laplace", ok,
                       "exp(-d((lam+u)^a - lam^a)) at u in {0.5, 1, 2}",
                       {u: r["observed"] for u, r in rows.items()},
                       "3*SE per u", detail=rows)


def _check_gamma_moments(seed: int, draws: int) -> CheckResult:
    p = GammaParams(0.75)
    rng = np.random.default_rng(np.random.SeedSequence((seed, 3)))
    x = sample_gamma_increments(np.full(draws, 1.0), p, rng)
    exact = 1.0 / p.nu
    se_mean = x.std(ddof=1) / np.sqrt(draws)
    c = (x - x.mean()) ** 2
    se_var = c.std(ddof=1) / np.sqrt(draws)
    ok = (abs(x.mean() - exact) < 3 * se_mean
          and abs(x.var(ddof=1) - exact) < 3 * se_var)
    return CheckResult("gamma-moments", bool(ok), exact,
                       {"mean": float(x.mean()), "var": float(x.var(ddof=1))},
                       f"3*SE = {3 * se_mean:.3g} (mean), {3 * se_var:.3g} (var)")


def _check_stable_closed_form(seed: int, draws: int) -> CheckResult:
    xs = np.array([0.25, 1.0, 4.0])
    obs = stable_density(xs, 1.0, 0.5)
    exp_ = _levy_half_density(xs)
    err = float(np.abs(obs - exp_).max())
    return CheckResult("stable-density-closed-form", err < 1e-5,
                       list(exp_), list(obs), 1e-5,
                       detail={"max_abs_error": err})


def _check_density_normalization(seed: int, draws: int) -> CheckResult:
    rows, ok = {}, True
    cases = {
        "stable a=0.7 t=1": lambda z: stable_density(z, 1.0, 0.7),
        "stable a=0.3 t=1": lambda z: stable_density(z, 1.0, 0.3),
        "tss a=0.5 lam=0.1 t=1": lambda z: tss_density(z, 1.0, TssParams(0.5, 0.1)),
    }
    for name, f in cases.items():
        val, _ = quad(f, 0.0, np.inf, limit=300)
        good = abs(val - 1.0) < 1e-4
        ok = ok and bool(good)
        rows[name] = float(val)
    return CheckResult("density-normalization", ok, 1.0, rows, 1e-4)


def _check_fractional_moment_mean(seed: int, draws: int) -> CheckResult:
    worst = 0.0
    for t in (0.5, 2.0, 50.0):
        for a in (0.3, 0.5, 0.7):
            for lam in (0.1, 1.0):
                p = TssParams(a, lam)
                rel = abs(tss_fractional_moment(t, 1.0, p) / (p.mean_rate * t) - 1.0)
                worst = max(worst, rel)
    return CheckResult("fractional-moment-mean", worst < 1e-4,
                       "alpha*lam**(alpha-1)*t", f"max rel err {worst:.3g}", 1e-4)


def _check_gamma_ratio_expansion(seed: int, draws: int) -> CheckResult:
    exact, expansion = gamma_ratio_expansion_check(100.0, 1.0, 0.7, kind="g")
    err_100 = abs(exact - expansion)
    ok = err_100 < 10.0 * 100.0 ** -3
    # halving h keeps the remainder O(x^-3): doubling x must shrink it ~8x
    e1 = abs(np.subtract(*gamma_ratio_expansion_check(100.0, 0.5, 0.7)))
    e2 = abs(np.subtract(*gamma_ratio_expansion_check(200.0, 0.5, 0.7)))
    ok = ok and (e1 / e2 >= 4.0)
    return CheckResult("gamma-ratio-expansion", bool(ok),
                       "remainder O(x^-3)",
                       {"abs_err_x100_h1": float(err_100),
                        "shrink_factor_x_doubled": float(e1 / e2)},
                       "1e-5 at x=100, h=1; shrink >= 4")


def _check_variant_adjudication(seed: int, draws: int) -> CheckResult:
    model = ModelSpec(MfbmParams(1.0, 1.0, 0.66), GammaParams(0.75))
    report = adjudicate_variants(model, 1e4, 1.0)
    ok = report["abs_error_rederived"] < report["abs_error_paper_stated"]
    return CheckResult("variant-adjudication", bool(ok),
                       "rederived closer to exact than paper-stated",
                       report["winner"], "strict inequality", detail=report)


_CHECKS = {
    "tss-mean": _check_tss_mean,
    "tss-laplace": _check_tss_laplace,
    "gamma-moments": _check_gamma_moments,
    "stable-density-closed-form": _check_stable_closed_form,
    "density-normalization": _check_density_normalization,
    "fractional-moment-mean": _check_fractional_moment_mean,
    "gamma-ratio-expansion": _check_gamma_ratio_expansion,
    "variant-adjudication": _check_variant_adjudication,
}


def check_names() -> list[str]:
    return list(_CHECKS)


def run_checks(seed: int = 321, only: str | None = None,
               draws: int = 10 ** 6) -> list[CheckResult]:
    """Run the oracle suite (or a single check via ``only``)."""
    if only is not None:
        if only not in _CHECKS:
            raise ValueError(f"unknown check {only!r}; choose from {', '.join(_CHECKS)}")
        names = [only]
    else:
        names = list(_CHECKS)
    return [_CHECKS[n](seed, draws) for n in names]
