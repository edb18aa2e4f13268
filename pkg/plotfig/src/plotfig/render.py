"""Render correlation-decay figures from simulation curve CSVs.

Input contract (the simulation CLI's curve format): first line is a
``#``-prefixed JSON header with the resolved run configuration, second line
the column names ``t,estimate,std_error[,prediction]``, then float rows.
Rendering is read-only and deterministic for identical inputs (PNG metadata
is pinned); output is a static image file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

__all__ = ["FigureSpec", "RenderResult", "SchemaError", "read_curve",
           "fit_loglog_slope", "render"]

REQUIRED_COLUMNS = ("t", "estimate", "std_error")


class SchemaError(ValueError):
    """Input file does not match the documented curve-CSV schema."""


@dataclass(frozen=True)
class FigureSpec:
    csv_path: Path
    out_path: Path
    mode: str = "loglog"          # "loglog" | "linear"
    caption: str | None = None    # default: built from the embedded config


@dataclass(frozen=True)
class RenderResult:
    out_path: Path
    slope: float
    n_points: int


def read_curve(path) -> tuple[dict, dict]:
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].lstrip().startswith("#"):
        raise SchemaError(f"{path}: missing embedded '#'-prefixed JSON config header")
    try:
        header = json.loads(lines[0].lstrip()[1:].strip())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: header line is not valid JSON ({exc})") from exc
    if len(lines) < 2:
        raise SchemaError(f"{path}: missing column-name row")
    names = [c.strip() for c in lines[1].split(",")]
    for required in REQUIRED_COLUMNS:
        if required not in names:
            raise SchemaError(f"{path}: missing required column '{required}'")
    rows = [ln.split(",") for ln in lines[2:] if ln.strip()]
    data = (np.array(rows, dtype=float) if rows
            else np.empty((0, len(names))))
    if rows and data.shape[1] != len(names):
        raise SchemaError(f"{path}: ragged rows do not match the column header")
    return header, {n: data[:, i] for i, n in enumerate(names)}


def fit_loglog_slope(t: np.ndarray, value: np.ndarray,
                     window: tuple[float, float] | None = None) -> float:
    """Ordinary least-squares slope of log(value) against log(t) over the
    window, positive values only."""
    mask = value > 0.0
    if window is not None:
        mask &= (t >= window[0]) & (t <= window[1])
    if mask.sum() < 2:
        raise SchemaError("need at least 2 positive points to fit a slope")
    slope, _ = np.polyfit(np.log(t[mask]), np.log(value[mask]), 1)
    return float(slope)


def _auto_caption(header: dict) -> str:
    model = header.get("model", {})
    bits = [f"clock={model.get('clock', '?')}"]
    for key in ("alpha", "lam", "nu", "a", "b", "hurst"):
        if key in model:
            bits.append(f"{key}={model[key]:g}")
    for key in ("s", "paths", "seed"):
        if key in header:
            bits.append(f"{key}={header[key]:g}")
    return ", ".join(bits)


def render(spec: FigureSpec) -> RenderResult:
    """One image per spec: estimate with a +-1.96 SE band, the large-t
    prediction when present, and a fitted power law whose slope is annotated.
    Nothing is written when the input is empty or malformed."""
    if spec.mode not in ("loglog", "linear"):
        raise SchemaError(f"mode must be 'loglog' or 'linear', got {spec.mode!r}")
    header, cols = read_curve(spec.csv_path)
    t, est, se = cols["t"], cols["estimate"], cols["std_error"]
    if t.size == 0:
        raise SchemaError(f"{spec.csv_path}: no data rows")

    window = tuple(header["window"]) if "window" in header else (t[0], t[-1])
    slope = fit_loglog_slope(t, est, window)

    keep = est > 0.0 if spec.mode == "loglog" else np.ones(t.size, dtype=bool)
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.fill_between(t[keep], (est - 1.96 * se)[keep], (est + 1.96 * se)[keep],
                    alpha=0.25, linewidth=0, label="95% band")
    ax.plot(t[keep], est[keep], lw=1.4, label="Monte Carlo estimate")
    pred = cols.get("prediction")
    if pred is not None and np.any(np.isfinite(pred)):
        good = np.isfinite(pred)
        if spec.mode == "loglog":
            good &= pred > 0.0
        ax.plot(t[good], pred[good], "--", lw=1.2, label="large-t prediction")
    tw = np.geomspace(max(window[0], t[0]), min(window[1], t[-1]), 50)
    mask = (t >= window[0]) & (t <= window[1]) & (est > 0.0)
    anchor = np.exp(np.mean(np.log(est[mask]) - slope * np.log(t[mask])))
    ax.plot(tw, anchor * tw ** slope, ":", lw=1.4,
            label=f"power-law fit, slope = {slope:.3f}")
    if spec.mode == "loglog":
        ax.set_xscale("log")
        ax.set_yscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel(header.get("quantity", "correlation"))
    ax.set_title(spec.caption or _auto_caption(header), fontsize=9)
    ax.legend(fontsize=8)
    fig.tight_layout()
    out = Path(spec.out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=150, metadata={"Software": "plotfig"})
    plt.close(fig)
    return RenderResult(out_path=out, slope=slope, n_points=int(t.size))
