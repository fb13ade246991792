"""Canned end-to-end comparison pipelines.

Each runner executes a fixed pipeline (specs, pulse counts, seeds frozen
in the shipped config files under ``configs/``), compares the artifact's
values against theory and the reference measurements, and writes a
comparison table (CSV + NDJSON) plus figures into the output directory.

Row dicts carry: id, quantity, artifact, theory, reference, tolerance
(display string), tolerance_abs (number used), passed, note.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import numpy as np

from . import distributions as dist
from . import estimators as est
from . import plots, reports
from .sampler import DetectorModel, apply_detector, apply_loss, sample
from .specs import DistributionSpec


def _load_config(name: str) -> dict:
    text = (resources.files("photonstats") / "configs" /
            f"{name}.json").read_text(encoding="utf-8")
    return json.loads(text)


def _write_bundle(out_dir: Path, name: str, rows: list[dict],
                  extra_records: list[dict] | None = None) -> None:
    reports.comparison_csv(out_dir / f"{name}_comparison.csv", rows)
    records = [reports.meta_record(extras={"pipeline": name})]
    records += [{"type": "comparison", **reports._clean(row)}
                for row in rows]
    records += extra_records or []
    reports.write_report(out_dir / f"{name}_report.ndjson", records)


# -- table 1: correlation functions of the sources and their harmonics ---------

def run_table1(out_dir: Path, threads: int = 1) -> list[dict]:
    config = _load_config("table1")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for row in config["rows"]:
        spec = DistributionSpec.from_dict(row["spec"])
        order = row["order"]
        theory = dist.analytic_gm(spec, order)
        train = sample(spec, config["pulses"], config["master_seed"],
                       threads=threads)
        estimate = est.empirical_gm(train, order,
                                    resamples=config["gm_resamples"])
        if "tolerance_abs" in row:
            tol = float(row["tolerance_abs"])
            tol_text = f"+-{tol:g}"
        else:
            tol = float(row["tolerance_rel"]) * theory
            tol_text = f"+-{row['tolerance_rel']:.0%}"
        rows.append({
            "id": row["id"], "quantity": f"g{order}",
            "artifact": estimate.value, "theory": theory,
            "reference": row["reference"], "tolerance": tol_text,
            "tolerance_abs": tol,
            "passed": abs(estimate.value - theory) <= tol,
            "note": row.get("note", ""),
        })
    _write_bundle(out_dir, "table1", rows)
    plots.plot_comparison(rows, out_dir / "table1_comparison.png",
                          title="Monte Carlo vs theory: g2 of sources "
                                "and harmonics")
    return rows


# -- table 2: supercontinuum tail exponents -------------------------------------

def _detected_fwm_train(spec, config, *, eta=None, threads=1):
    train = sample(spec, config["pulses"], config["master_seed"],
                   threads=threads)
    if eta is not None:
        train = apply_loss(train, eta)
    detector = DetectorModel.from_dict(config["detector"])
    return apply_detector(train, detector, config["noise_seed"])


def run_table2(out_dir: Path, threads: int = 1) -> list[dict]:
    config = _load_config("table2")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    fit_lo, fit_hi = config["fit_lo"], config["fit_hi"]
    theory_tol = config["theory_tolerance"]
    fit_tol = config["fit_tolerance"]
    rows = []
    extra = []
    ecdfs = {}

    for row in config["rows"]:
        spec = DistributionSpec.from_dict(row["spec"])
        k_theory = dist.analytic_tail_exponent(spec)
        rows.append({
            "id": row["id"], "quantity": "tail_exponent_theory",
            "artifact": k_theory, "theory": k_theory,
            "reference": row["k_theory_reference"],
            "tolerance": f"+-{theory_tol:g}", "tolerance_abs": theory_tol,
            "passed": abs(k_theory - row["k_theory_reference"])
            <= theory_tol,
            "note": "closed form M/(4 kappa_np) for a superbunched pump",
        })

        train = _detected_fwm_train(spec, config, threads=threads)
        ecdf = est.empirical_ccdf(train)
        ecdfs[row["id"]] = ecdf
        hill = est.fit_tail_exponent(ecdf, fit_lo, fit_hi, "hill")
        regression = est.fit_tail_exponent(ecdf, fit_lo, fit_hi,
                                           "ccdf-regression")
        bracket_lo = k_theory - fit_tol
        bracket_hi = row["k_fit_reference"] + fit_tol
        rows.append({
            "id": row["id"], "quantity": "tail_exponent_fit",
            "artifact": hill.k, "theory": k_theory,
            "reference": row["k_fit_reference"],
            "tolerance": f"[{bracket_lo:g}, {bracket_hi:g}]",
            "tolerance_abs": fit_tol,
            "passed": bracket_lo <= hill.k <= bracket_hi,
            "note": (f"hill over [{fit_lo:g}, {fit_hi:g}]; regression "
                     f"gives {regression.k:.3f} (slope biased low by the "
                     "slowly varying CCDF prefactor inside a finite "
                     "window)"),
        })
        extra.append(reports.tailfit_record(
            hill, {"id": row["id"], "regression_k": regression.k,
                   "disagreement": est.fits_disagree(hill, regression)}))
        plots.plot_ccdf(ecdf, out_dir / f"table2_{row['id']}_ccdf.png",
                        fit=hill, title=row["id"])
        reports.ccdf_csv(out_dir / f"table2_{row['id']}_ccdf.csv", ecdf)

    loss = config["loss"]
    base_row = next(r for r in config["rows"]
                    if r["id"] == loss["base_id"])
    spec = DistributionSpec.from_dict(base_row["spec"])
    eta = loss["eta"]
    base_fit = est.fit_tail_exponent(ecdfs[loss["base_id"]], fit_lo,
                                     fit_hi, "ccdf-regression")
    lossy_train = _detected_fwm_train(spec, config, eta=eta,
                                      threads=threads)
    lossy_fit = est.fit_tail_exponent(est.empirical_ccdf(lossy_train),
                                      fit_lo * eta, fit_hi * eta,
                                      "ccdf-regression")
    shift = abs(lossy_fit.k - base_fit.k)
    rows.append({
        "id": f"{loss['base_id']}_loss{int(eta * 100)}",
        "quantity": "tail_exponent_loss_shift",
        "artifact": shift, "theory": 0.0,
        "reference": abs(loss["k_reference_base"]
                         - loss["k_reference_loss"]),
        "tolerance": f"<= {loss['tolerance']:g}",
        "tolerance_abs": loss["tolerance"],
        "passed": shift <= loss["tolerance"],
        "note": (f"ccdf-regression, window scaled with eta={eta:g}: "
                 f"k {base_fit.k:.4f} -> {lossy_fit.k:.4f}"),
    })
    _write_bundle(out_dir, "table2", rows, extra)
    return rows


# -- fig 8: hazard-ratio curves ---------------------------------------------------

def run_fig8(out_dir: Path, threads: int = 1) -> list[dict]:
    config = _load_config("fig8")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    curves = []
    trains = {}
    for family in config["families"]:
        spec = DistributionSpec.from_dict(family["spec"])
        train = sample(spec, config["pulses"], config["master_seed"],
                       threads=threads)
        curve = est.hazard_curve(train)
        curves.append((family["id"], spec, curve))
        trains[family["id"]] = train
        reports.hazard_csv(out_dir / f"fig8_{family['id']}_hazard.csv",
                           curve)

    rows = []

    # thermal: flat plateau at 1/mean over the mid range
    thermal_id, thermal_spec, thermal_curve = curves[0]
    mean = thermal_spec.mean
    mid = (thermal_curve.n >= 0.05 * mean) & (thermal_curve.n <= 9 * mean)
    plateau_dev = float(np.max(np.abs(
        thermal_curve.hazard_over_n[mid] * mean - 1.0)))
    band = config["thermal_band"]
    rows.append({
        "id": thermal_id, "quantity": "hazard_plateau_deviation",
        "artifact": plateau_dev, "theory": 0.0, "reference": None,
        "tolerance": f"<= {band:g}", "tolerance_abs": band,
        "passed": plateau_dev <= band,
        "note": "max |H(N)/N * mean - 1| for N in [0.05, 9] x mean",
    })

    # superbunched: follows the closed form and bends toward 1/(2 mean)
    sb_id, sb_spec, sb_curve = curves[1]
    mean = sb_spec.mean
    probe = sb_curve.n >= 0.1 * mean
    analytic = dist.hazard(sb_spec, sb_curve.n[probe]) / sb_curve.n[probe]
    rel_dev = float(np.max(np.abs(
        sb_curve.hazard_over_n[probe] / analytic - 1.0)))
    band = config["superbunched_band"]
    rows.append({
        "id": sb_id, "quantity": "hazard_vs_closed_form",
        "artifact": rel_dev, "theory": 0.0, "reference": None,
        "tolerance": f"<= {band:g}", "tolerance_abs": band,
        "passed": rel_dev <= band,
        "note": "max relative deviation from -log Erfc for N >= 0.1 mean",
    })
    final = float(sb_curve.hazard_over_n[-1] * mean)
    lo, hi = (config["superbunched_final_lo"],
              config["superbunched_final_hi"])
    rows.append({
        "id": sb_id, "quantity": "hazard_final_over_mean",
        "artifact": final, "theory": 0.5, "reference": None,
        "tolerance": f"[{lo:g}, {hi:g}]", "tolerance_abs": hi - 0.5,
        "passed": lo <= final <= hi,
        "note": "H(N)/N x mean at the deepest resolved point, bending "
                "from 1 toward 1/2",
    })

    # heavier families decay strictly faster (log-log slope ordering)
    slopes = {}
    for family_id, _, curve in curves:
        median_idx = int(np.searchsorted(
            curve.n, np.median(trains[family_id].values)))
        median_idx = min(max(median_idx, 0), len(curve.n) - 2)
        dx = np.log(curve.n[-1]) - np.log(curve.n[median_idx])
        dy = (np.log(curve.hazard_over_n[-1])
              - np.log(curve.hazard_over_n[median_idx]))
        slopes[family_id] = dy / dx
    ordered_ids = [fam["id"] for fam in config["families"]]
    gaps = [slopes[a] - slopes[b]
            for a, b in zip(ordered_ids, ordered_ids[1:])]
    min_gap = float(min(gaps))
    rows.append({
        "id": "all", "quantity": "hazard_decay_ordering",
        "artifact": min_gap, "theory": None, "reference": None,
        "tolerance": "> 0", "tolerance_abs": 0.0,
        "passed": min_gap > 0.0,
        "note": "H/N falls strictly faster down the list "
                + " > ".join(ordered_ids)
                + f"; slopes {[round(slopes[i], 3) for i in ordered_ids]}",
    })

    plots.plot_hazard(
        [(family_id, curve) for family_id, _, curve in curves],
        out_dir / "fig8_hazard.png",
        title="Hazard ratio H(N)/N by family",
        references={"1/mean(thermal)": 1.0 / curves[0][1].mean,
                    "1/(2 mean(superbunched))": 0.5 / curves[1][1].mean})
    _write_bundle(out_dir, "fig8", rows)
    return rows
