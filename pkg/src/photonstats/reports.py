"""NDJSON analysis reports and plot-ready delimited output.

A report is one NDJSON document per analysis run: a meta record carrying
provenance (train meta, config echo, package version; the timestamp
lives only here) followed by one typed record per analysis --
``histogram | ccdf | gm | tailfit | hazard | g2matrix | ks`` -- and
``error`` records for analyses whose preconditions failed. Alongside the
report, each analysis can emit a two-column CSV ready for plotting, and
g2 matrices export as CSV with a wavelength header row/column.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .estimators import (EmpiricalCcdf, G2Matrix, GmEstimate, HazardCurve,
                         Histogram, KsResult, TailFitReport)

CCDF_MAX_POINTS = 4096


def _clean(value):
    """Make values JSON-serializable; NaN becomes null."""
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_clean(v) for v in value.tolist()]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return None if math.isnan(value) else value
    return value


def meta_record(*, train_meta: dict | None = None,
                config: dict | None = None,
                extras: dict | None = None) -> dict:
    record = {
        "type": "meta",
        "report_version": 1,
        "generated_at": datetime.now(timezone.utc).isoformat(),
    }
    if train_meta is not None:
        record["train"] = train_meta
    if config is not None:
        record["config"] = config
    if extras:
        record.update(extras)
    return record


def strip_provenance(line: str) -> str:
    """Drop the timestamp from a meta line (for byte-level comparisons)."""
    record = json.loads(line)
    record.pop("generated_at", None)
    return json.dumps(record, sort_keys=True)


def histogram_record(hist: Histogram, params: dict | None = None) -> dict:
    return _clean({
        "type": "histogram", "params": params or {},
        "pulse_count": hist.pulse_count,
        "out_of_range": hist.out_of_range,
        "bins": [{"lo": lo, "hi": hi, "count": c, "density": d}
                 for lo, hi, c, d in zip(hist.edges[:-1], hist.edges[1:],
                                         hist.counts, hist.densities)],
    })


def decimate_ccdf(ecdf: EmpiricalCcdf,
                  max_points: int = CCDF_MAX_POINTS):
    """Thin the step function to at most ``max_points`` distinct points,
    evenly spread in rank, always keeping the extremes."""
    vals, surv = ecdf.distinct_points()
    if len(vals) > max_points:
        idx = np.unique(np.linspace(0, len(vals) - 1, max_points)
                        .astype(int))
        vals, surv = vals[idx], surv[idx]
    return vals, surv


def ccdf_record(ecdf: EmpiricalCcdf) -> dict:
    vals, surv = decimate_ccdf(ecdf)
    return _clean({
        "type": "ccdf", "pulse_count": ecdf.pulse_count,
        "points": [{"value": v, "survival": s}
                   for v, s in zip(vals, surv)],
    })


def gm_record(estimate: GmEstimate) -> dict:
    return _clean({"type": "gm", **asdict(estimate)})


def tailfit_record(report: TailFitReport,
                   extras: dict | None = None) -> dict:
    record = {"type": "tailfit", **asdict(report)}
    if extras:
        record.update(extras)
    return _clean(record)


def hazard_record(curve: HazardCurve) -> dict:
    return _clean({
        "type": "hazard",
        "points": [{"n": n, "hazard_over_n": h}
                   for n, h in zip(curve.n, curve.hazard_over_n)],
    })


def ks_record(result: KsResult) -> dict:
    return _clean({"type": "ks", **asdict(result)})


def g2matrix_record(matrix: G2Matrix) -> dict:
    return _clean({
        "type": "g2matrix",
        "wavelengths": matrix.wavelengths,
        "values": matrix.values,
        "masked": [[bool(m) for m in row] for row in matrix.masked],
    })


def error_record(analysis: str, exc: Exception) -> dict:
    return {"type": "error", "analysis": analysis,
            "error": type(exc).__name__, "message": str(exc)}


def write_report(path, records: list[dict]) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record, sort_keys=True) + "\n")
    return path


# -- delimited output ---------------------------------------------------------------

def write_csv(path, header: tuple, rows) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow([f"{v!r}" if isinstance(v, float) else v
                             for v in row])
    return path


def histogram_csv(path, hist: Histogram) -> Path:
    return write_csv(path, ("bin_center", "density"),
                     zip(hist.centers, hist.densities))


def ccdf_csv(path, ecdf: EmpiricalCcdf) -> Path:
    vals, surv = decimate_ccdf(ecdf)
    return write_csv(path, ("value", "survival"), zip(vals, surv))


def hazard_csv(path, curve: HazardCurve) -> Path:
    return write_csv(path, ("n", "hazard_over_n"),
                     zip(curve.n, curve.hazard_over_n))


def gm_csv(path, estimates: list[GmEstimate]) -> Path:
    return write_csv(path, ("order", "value"),
                     [(e.order, e.value) for e in estimates])


def tailfit_csv(path, report: TailFitReport, ecdf: EmpiricalCcdf) -> Path:
    """Plot-ready fitted Pareto line over the fit window, amplitude
    anchored by the windowed points."""
    vals, surv = ecdf.distinct_points()
    mask = (vals >= report.fit_lo) & (vals <= report.fit_hi) & (surv > 0)
    log_c = np.mean(np.log(surv[mask]) + report.k * np.log(vals[mask]))
    line = np.geomspace(report.fit_lo, report.fit_hi, 64)
    model = np.exp(log_c - report.k * np.log(line))
    return write_csv(path, ("value", "model_survival"), zip(line, model))


def ks_csv(path, result: KsResult) -> Path:
    return write_csv(path, ("name", "value"),
                     [("statistic", result.statistic),
                      ("p_bound", result.p_bound),
                      ("pulse_count", result.pulse_count)])


def g2_matrix_csv(path, matrix: G2Matrix) -> Path:
    """Matrix CSV with wavelengths as header row and first column;
    masked entries are left empty."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["wavelength"] +
                        [f"{w!r}" for w in matrix.wavelengths])
        for i, wavelength in enumerate(matrix.wavelengths):
            row = [f"{wavelength!r}"]
            for j in range(len(matrix.wavelengths)):
                row.append("" if matrix.masked[i][j]
                           else f"{float(matrix.values[i][j])!r}")
            writer.writerow(row)
    return path


def comparison_csv(path, rows: list[dict]) -> Path:
    """Reproduction summary: artifact value vs reference vs tolerance."""
    header = ("id", "quantity", "artifact", "theory", "reference",
              "tolerance", "passed", "note")
    table = [(r["id"], r["quantity"], repr(float(r["artifact"])),
              "" if r.get("theory") is None else repr(float(r["theory"])),
              "" if r.get("reference") is None
              else repr(float(r["reference"])),
              r["tolerance"], "pass" if r["passed"] else "FAIL",
              r.get("note", "")) for r in rows]
    return write_csv(path, header, table)
