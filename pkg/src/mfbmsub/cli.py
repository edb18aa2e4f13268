"""Command-line driver.

Subcommands: ``analytic`` (closed-form/asymptotic curves), ``simulate``
(Monte Carlo correlation curve + power-law fit + LRD verdict),
``validate`` (oracle suite), ``figure-data`` (preset decay-figure runs).

All randomness flows from an explicit ``--seed``; outputs embed the resolved
configuration and are byte-identical across reruns and worker counts.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import analytics
from .errors import EstimationError, FactorizationError, FitError, QuadratureError, SamplingError
from .estimation import (
    EnsembleConfig,
    estimate_corr_curve,
    fit_power_law,
    lrd_verdict,
    simulate_ensemble,
)
from .fileio import write_curve_csv, write_json
from .params import FormulaVariant, GammaParams, MfbmParams, ModelSpec, TssParams
from .validate import check_names, run_checks

FIGURE_PRESETS = {
    # correlation-decay reference figures of the two clock families
    "1": {"clock": "tss", "alpha": 0.5, "lam": 0.1, "hurst": 0.7},
    "2": {"clock": "gamma", "nu": 0.75, "hurst": 0.66},
}


def _add_model_args(ap: argparse.ArgumentParser) -> None:
    ap.add_argument("--clock", choices=("tss", "gamma"), required=True,
                    help="inner-clock family")
    ap.add_argument("--alpha", type=float, default=0.5, help="TSS stability index in (0,1)")
    ap.add_argument("--lambda", dest="lam", type=float, default=0.1,
                    help="TSS tempering rate > 0")
    ap.add_argument("--nu", type=float, default=0.75, help="gamma time scale > 0")
    ap.add_argument("--a", type=float, default=1.0, help="Brownian mixing weight")
    ap.add_argument("--b", type=float, default=1.0, help="fBm mixing weight")
    ap.add_argument("--hurst", type=float, default=0.7, help="Hurst exponent in (0,1)")


def _add_grid_args(ap: argparse.ArgumentParser) -> None:
    ap.add_argument("--s", type=float, default=1.0, help="fixed earlier time s > 0")
    ap.add_argument("--t-min", type=float, default=2.0)
    ap.add_argument("--t-max", type=float, default=500.0)
    ap.add_argument("--t-points", type=int, default=24, help="log-spaced query times")


def _add_sim_args(ap: argparse.ArgumentParser, seed_required: bool = True) -> None:
    ap.add_argument("--paths", type=int, default=10000, help="Monte Carlo paths M")
    ap.add_argument("--seed", type=int, required=seed_required,
                    help="master seed (required; no wall-clock seeding)")
    ap.add_argument("--workers", type=int, default=1,
                    help="process-level parallelism; outputs do not depend on it")
    ap.add_argument("--window", type=float, nargs=2, default=(50.0, 500.0),
                    metavar=("LO", "HI"), help="power-law fit window")
    ap.add_argument("--se-method", choices=("bootstrap", "delta"), default="bootstrap")
    ap.add_argument("--resamples", type=int, default=200, help="bootstrap resamples")


def _model_from_args(args) -> ModelSpec:
    mixed = MfbmParams(args.a, args.b, args.hurst)
    clock = TssParams(args.alpha, args.lam) if args.clock == "tss" else GammaParams(args.nu)
    return ModelSpec(mixed, clock)


def _grid_from_args(args) -> np.ndarray:
    if not args.s > 0.0:
        raise ValueError("s must be > 0")
    if not args.s < args.t_min:
        raise ValueError("t-min must exceed s (the formulas assume t > s)")
    if not args.t_min < args.t_max:
        raise ValueError("t-min must be smaller than t-max")
    if args.t_points < 2:
        raise ValueError("t-points must be >= 2")
    return np.geomspace(args.t_min, args.t_max, args.t_points)


def _model_dict(model: ModelSpec) -> dict:
    d = {"clock": model.clock_label, "a": model.mixed.a, "b": model.mixed.b,
         "hurst": model.mixed.hurst}
    if model.is_tss:
        d.update(alpha=model.clock.alpha, lam=model.clock.lam)
    else:
        d.update(nu=model.clock.nu)
    return d


def _base_header(command: str, args, model: ModelSpec) -> dict:
    return {
        "command": command,
        "version": __version__,
        "model": _model_dict(model),
        "s": args.s,
        "t_min": args.t_min,
        "t_max": args.t_max,
        "t_points": args.t_points,
    }


class _Outputs:
    """Tracks files written by one command so failures leave nothing behind."""

    def __init__(self, out_dir: Path):
        self.dir = out_dir
        self.created: list[Path] = []

    def path(self, name: str) -> Path:
        self.dir.mkdir(parents=True, exist_ok=True)
        p = self.dir / name
        self.created.append(p)
        return p

    def discard(self) -> None:
        for p in self.created:
            p.unlink(missing_ok=True)


def _var_s(model: ModelSpec, s: float) -> tuple[float, str]:
    method = "gamma-ratio-exact" if model.is_gamma else "laplace-quadrature"
    return analytics.y_variance(model, s), method


def _analytic_column(model: ModelSpec, formula: str, variant: FormulaVariant,
                     s: float, ts: np.ndarray) -> tuple[np.ndarray, dict]:
    meta: dict = {}
    if formula == "cov-exact":
        f = analytics.cov_gamma_exact if model.is_gamma else analytics.cov_tss_quadrature
        vals = [f(t, s, model) for t in ts]
    elif formula == "cov-asymptotic":
        f = analytics.cov_gamma_asymptotic if model.is_gamma else analytics.cov_tss_asymptotic
        vals = [f(t, s, model, variant) for t in ts]
        meta["variant"] = variant.value
    elif formula == "msd-asymptotic":
        f = analytics.msd_gamma_asymptotic if model.is_gamma else analytics.msd_tss_asymptotic
        vals = [f(t, s, model) for t in ts]
    elif formula == "corr-asymptotic":
        var_s, method = _var_s(model, s)
        meta.update(var_s=var_s, var_s_method=method)
        f = analytics.corr_gamma_asymptotic if model.is_gamma else analytics.corr_tss_asymptotic
        vals = [f(t, s, model, var_s) for t in ts]
    else:
        raise ValueError(f"unknown formula {formula}")
    return np.asarray(vals, dtype=float), meta


def cmd_analytic(args) -> int:
    model = _model_from_args(args)
    ts = _grid_from_args(args)
    variant = FormulaVariant(args.variant)
    values, meta = _analytic_column(model, args.formula, variant, args.s, ts)
    header = _base_header("analytic", args, model)
    header.update(formula=args.formula, **meta)
    out = _Outputs(Path(args.out))
    suffix = f"_{variant.value}" if args.formula == "cov-asymptotic" else ""
    name = f"analytic_{args.formula}{suffix}.csv"
    try:
        write_curve_csv(out.path(name), header, {"t": ts, "value": values})
    except Exception:
        out.discard()
        raise
    print(f"wrote {out.dir / name}")
    return 0


def _prediction_column(model: ModelSpec, s: float, ts: np.ndarray) -> tuple[np.ndarray, dict]:
    if model.mixed.b == 0.0:
        return np.full(ts.size, np.nan), {"prediction": "none (b = 0)"}
    var_s, method = _var_s(model, s)
    f = analytics.corr_gamma_asymptotic if model.is_gamma else analytics.corr_tss_asymptotic
    pred = np.asarray([f(t, s, model, var_s) for t in ts])
    return pred, {"var_s": var_s, "var_s_method": method}


def _run_simulation(args, header: dict, out: _Outputs, stem: str) -> dict:
    model = _model_from_args(args)
    ts = _grid_from_args(args)
    cfg = EnsembleConfig(model=model, s=args.s, query_times=ts,
                         paths=args.paths, seed=args.seed)
    ens = simulate_ensemble(cfg, workers=args.workers)
    curve = estimate_corr_curve(ens, se_method=args.se_method, n_boot=args.resamples)
    pred, meta = _prediction_column(model, args.s, ts)
    header.update(paths=args.paths, seed=args.seed, window=list(args.window),
                  se_method=args.se_method, resamples=args.resamples,
                  quantity="correlation", **meta)
    write_curve_csv(out.path(f"{stem}curve.csv"), header, {
        "t": ts, "estimate": curve.value, "std_error": curve.std_error,
        "prediction": pred,
    })
    fit = fit_power_law(curve, tuple(args.window))
    verdict = lrd_verdict(fit, model=model)
    fit_doc = dict(header)
    fit_doc.update(c=fit.c, d=fit.d, d_se=fit.d_se,
                   d_ci_low=verdict.d_ci[0], d_ci_high=verdict.d_ci[1],
                   r2=fit.r_squared, n_points=fit.n_points)
    write_json(out.path(f"{stem}fit.json"), fit_doc)
    verdict_doc = dict(header)
    verdict_doc.update(is_lrd=verdict.is_lrd, d=verdict.d,
                       d_ci_low=verdict.d_ci[0], d_ci_high=verdict.d_ci[1],
                       confidence=verdict.confidence, theory_d=verdict.theory_d)
    write_json(out.path(f"{stem}verdict.json"), verdict_doc)
    return {"d": fit.d, "is_lrd": verdict.is_lrd}


def cmd_simulate(args) -> int:
    model = _model_from_args(args)
    header = _base_header("simulate", args, model)
    out = _Outputs(Path(args.out))
    try:
        summary = _run_simulation(args, header, out, stem="")
    except Exception:
        out.discard()
        raise
    print(f"wrote {out.dir}/curve.csv fit.json verdict.json "
          f"(d = {summary['d']:.4f}, lrd = {summary['is_lrd']})")
    return 0


def cmd_figure_data(args) -> int:
    preset = FIGURE_PRESETS[args.figure]
    for key, val in preset.items():
        setattr(args, key, val)
    args.a, args.b, args.s = 1.0, 1.0, 1.0
    model = _model_from_args(args)
    header = _base_header("figure-data", args, model)
    header["figure"] = args.figure
    out = _Outputs(Path(args.out))
    stem = f"fig{args.figure}_"
    try:
        summary = _run_simulation(args, header, out, stem=stem)
    except Exception:
        out.discard()
        raise
    print(f"wrote {out.dir}/{stem}curve.csv {stem}fit.json {stem}verdict.json "
          f"(d = {summary['d']:.4f}, lrd = {summary['is_lrd']})")
    return 0


def cmd_validate(args) -> int:
    results = run_checks(seed=args.seed, only=args.only, draws=args.draws)
    report = {
        "command": "validate",
        "version": __version__,
        "seed": args.seed,
        "draws": args.draws,
        "checks": [
            {"name": r.name, "passed": r.passed, "expected": r.expected,
             "observed": r.observed, "tolerance": r.tolerance, "detail": r.detail}
            for r in results
        ],
        "passed": all(r.passed for r in results),
    }
    for r in results:
        print(f"[{'pass' if r.passed else 'FAIL'}] {r.name}: "
              f"observed {r.observed} vs expected {r.expected} (tol {r.tolerance})")
    if args.out is not None:
        out = _Outputs(Path(args.out))
        write_json(out.path("validate_report.json"), report)
        print(f"wrote {out.dir / 'validate_report.json'}")
    return 0 if report["passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="mfbmsub",
        description=("Simulation and verification toolkit for mixed fractional "
                     "Brownian motion time-changed by tempered stable and gamma "
                     "subordinators."))
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analytic", help="evaluate a closed-form/asymptotic curve to CSV")
    _add_model_args(p)
    _add_grid_args(p)
    p.add_argument("--formula", required=True,
                   choices=("cov-exact", "cov-asymptotic", "msd-asymptotic",
                            "corr-asymptotic"))
    p.add_argument("--variant", choices=tuple(v.value for v in FormulaVariant),
                   default=FormulaVariant.PAPER_STATED.value,
                   help="which asymptotic-expansion constants to use")
    p.add_argument("--out", default="out", help="output directory")
    p.set_defaults(func=cmd_analytic)

    p = sub.add_parser("simulate", help="Monte Carlo correlation curve, fit, verdict")
    _add_model_args(p)
    _add_grid_args(p)
    _add_sim_args(p)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate", help="run the oracle/identity check suite")
    p.add_argument("--only", choices=check_names(), help="run a single check")
    p.add_argument("--seed", type=int, default=321)
    p.add_argument("--draws", type=int, default=10 ** 6,
                   help="Monte Carlo draws per sampler check")
    p.add_argument("--out", default=None, help="write validate_report.json here")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("figure-data",
                       help="run a preset correlation-decay figure configuration")
    p.add_argument("--figure", choices=tuple(FIGURE_PRESETS), required=True)
    _add_grid_args(p)
    _add_sim_args(p)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_figure_data)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SamplingError, FactorizationError, QuadratureError,
            EstimationError, FitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
