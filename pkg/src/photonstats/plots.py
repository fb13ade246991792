"""Figure rendering for the report path.

Every analysis that emits a CSV can also render a matplotlib figure next
to it. Figures are written to files (Agg backend); nothing is shown
interactively.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .estimators import (EmpiricalCcdf, G2Matrix, HazardCurve, Histogram,
                         TailFitReport)
from .reports import decimate_ccdf


def _finish(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_histogram(hist: Histogram, path, *, title: str = "",
                   overlay: tuple[np.ndarray, np.ndarray] | None = None,
                   log_axes: bool = True) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4.5))
    keep = hist.counts > 0
    ax.plot(hist.centers[keep], hist.densities[keep], "o", ms=3,
            color="crimson", label="data")
    if overlay is not None:
        grid, density = overlay
        pos = density > 0
        ax.plot(grid[pos], density[pos], "k-", lw=1, label="model")
        ax.legend()
    if log_axes:
        ax.set_xscale("log")
        ax.set_yscale("log")
    ax.set_xlabel("photons per pulse")
    ax.set_ylabel("probability density (1/photons)")
    if title:
        ax.set_title(title)
    return _finish(fig, path)


def plot_ccdf(ecdf: EmpiricalCcdf, path, *, title: str = "",
              fit: TailFitReport | None = None) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4.5))
    vals, surv = decimate_ccdf(ecdf)
    keep = (vals > 0) & (surv > 0)
    ax.plot(vals[keep], surv[keep], ".", ms=2.5, color="crimson",
            label="data")
    if fit is not None:
        mask = keep & (vals >= fit.fit_lo) & (vals <= fit.fit_hi)
        if mask.any():
            log_c = np.mean(np.log(surv[mask]) + fit.k * np.log(vals[mask]))
            line = np.geomspace(fit.fit_lo, fit.fit_hi, 64)
            ax.plot(line, np.exp(log_c) * line ** (-fit.k), "b-", lw=1.5,
                    label=f"tail fit k={fit.k:.3g}")
        ax.legend()
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("photons per pulse")
    ax.set_ylabel("survival probability")
    if title:
        ax.set_title(title)
    return _finish(fig, path)


def plot_hazard(curves: list[tuple[str, HazardCurve]], path, *,
                title: str = "",
                references: dict[str, float] | None = None) -> Path:
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    for label, curve in curves:
        ax.plot(curve.n, curve.hazard_over_n, ".", ms=3, label=label)
    for label, level in (references or {}).items():
        ax.axhline(level, ls="--", lw=0.8, color="gray")
        ax.annotate(label, (ax.get_xlim()[0], level), fontsize=7,
                    va="bottom")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("photons per pulse")
    ax.set_ylabel("H(N) / N")
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    return _finish(fig, path)


def plot_g2_matrix(matrix: G2Matrix, path, *, title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    values = np.where(matrix.masked, np.nan, matrix.values)
    extent = (matrix.wavelengths[0], matrix.wavelengths[-1],
              matrix.wavelengths[0], matrix.wavelengths[-1])
    image = ax.imshow(values, origin="lower", extent=extent,
                      aspect="auto", cmap="magma")
    fig.colorbar(image, ax=ax, label="g2")
    ax.set_xlabel("wavelength")
    ax.set_ylabel("wavelength")
    if title:
        ax.set_title(title)
    return _finish(fig, path)


def plot_comparison(rows: list[dict], path, *, title: str = "") -> Path:
    """Reproduction chart: artifact values with tolerance bars against
    theory points."""
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    labels = [r["id"] for r in rows]
    x = np.arange(len(rows))
    artifact = [r["artifact"] for r in rows]
    theory = [r.get("theory") for r in rows]
    tol = [r.get("tolerance_abs", 0.0) for r in rows]
    ax.errorbar(x, artifact, yerr=tol, fmt="o", color="crimson",
                capsize=4, label="this run (tolerance)")
    have_theory = [i for i, t in enumerate(theory) if t is not None]
    ax.plot([x[i] for i in have_theory],
            [theory[i] for i in have_theory], "k_", ms=16, label="theory")
    ax.set_xticks(x)
    ax.set_xticklabels(labels, rotation=30, ha="right", fontsize=8)
    ax.set_yscale("log")
    ax.legend()
    if title:
        ax.set_title(title)
    return _finish(fig, path)
