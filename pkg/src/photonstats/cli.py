"""Command-line interface: simulate -> transform -> detect -> analyze.

Three subcommands:

* ``simulate``  runs the configured pipeline and persists the pulse
  train (binary or NDJSON, by extension or --format), printing a one-line
  JSON summary to stdout.
* ``analyze``   loads a train, runs the configured analyses, and writes
  an NDJSON report plus plot-ready CSV and rendered PNG per analysis.
* ``reproduce`` runs the canned comparison pipelines (table1, table2,
  fig8) into an output directory.

Exit codes: 0 success, 2 validation error, 3 data-format error,
4 numeric-range error. Errors are emitted as JSON lines on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from . import estimators as est
from . import plots, reports
from .errors import PhotonStatsError, ValidationError
from .runconfig import RunConfig
from .sampler import PulseTrain, apply_detector, apply_loss, sample
from .specs import DistributionSpec
from .trainio import format_for_path, load_train, save_train


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="photonstats",
        description="Photon-number statistics of fluctuating pulsed "
                    "light: simulation, detection, and heavy-tail "
                    "analysis.")
    parser.add_argument("--version", action="version",
                        version=f"photonstats {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="sample a pulse train from a "
                                          "config and persist it")
    sim.add_argument("--config", required=True, help="run config (JSON)")
    sim.add_argument("--out", required=True, help="output train path")
    sim.add_argument("--seed", type=int, default=None,
                     help="override the config master_seed")
    sim.add_argument("--threads", type=int, default=1,
                     help="worker cap; never changes the values")
    sim.add_argument("--format", choices=("ndjson", "binary"),
                     default=None, help="train format (default: by "
                                        "extension)")

    ana = sub.add_parser("analyze", help="run configured estimators over "
                                         "a persisted train")
    ana.add_argument("--train", required=True, help="train path")
    ana.add_argument("--config", required=True, help="run config (JSON)")
    ana.add_argument("--out", required=True, help="report path (NDJSON)")
    ana.add_argument("--seed", type=int, default=None,
                     help="override the config master_seed (bootstrap "
                          "streams)")
    ana.add_argument("--threads", type=int, default=1,
                     help="accepted for symmetry; analyses are "
                          "single-pass")
    ana.add_argument("--format", choices=("ndjson", "csv", "all"),
                     default="all",
                     help="restrict report outputs (default both + "
                          "figures)")

    rep = sub.add_parser("reproduce", help="run a canned comparison "
                                           "pipeline")
    rep.add_argument("target", choices=("table1", "table2", "fig8"))
    rep.add_argument("--out", required=True, help="output directory")
    rep.add_argument("--threads", type=int, default=1)
    return parser


def run_pipeline(config: RunConfig, threads: int = 1) -> PulseTrain:
    """source -> harmonic/FWM -> loss -> detector, as configured."""
    train = sample(config.spec, config.pulses, config.master_seed,
                   threads=threads)
    if config.loss_eta is not None:
        train = apply_loss(train, config.loss_eta)
    if config.detector is not None:
        train = apply_detector(train, config.detector, config.noise_seed)
    return train


def _cmd_simulate(args) -> int:
    config = RunConfig.load(args.config)
    if args.seed is not None:
        config = config.with_seed(args.seed)
    fmt = args.format or format_for_path(args.out)
    train = run_pipeline(config, threads=args.threads)
    path = save_train(train, args.out, fmt)
    summary = dict(train.summary())
    summary["out"] = str(path)
    print(json.dumps(summary, sort_keys=True))
    return 0


def _ks_reference_spec(config: RunConfig) -> DistributionSpec:
    """Spec describing the distribution after the configured pipeline."""
    spec = config.spec
    if config.loss_eta is not None:
        spec = spec.scaled(config.loss_eta)
    if config.detector is not None:
        if config.detector.saturation is not None:
            raise ValidationError(
                "ks against a saturating detector is undefined (the clamp "
                "puts an atom at the ceiling); analyze the pre-saturation "
                "train instead")
        if config.detector.noise_sigma > 0.0:
            spec = spec.with_noise(config.detector.noise_sigma)
    return spec


def _run_analyses(train: PulseTrain, config: RunConfig, out_path: Path,
                  fmt: str):
    """Returns (records, csv_paths, figure_paths)."""
    records = [reports.meta_record(train_meta=_meta_for_report(train),
                                   config=config.raw)]
    csvs: list[Path] = []
    figures: list[Path] = []
    stem = out_path.with_suffix("")
    seen: dict[str, int] = {}
    ecdf_cache = None

    def ecdf():
        nonlocal ecdf_cache
        if ecdf_cache is None:
            ecdf_cache = est.empirical_ccdf(train)
        return ecdf_cache

    def claim_tag(kind: str):
        seen[kind] = seen.get(kind, 0) + 1
        tag = kind if seen[kind] == 1 else f"{kind}{seen[kind]}"
        return lambda suffix: Path(f"{stem}_{tag}.{suffix}")

    for analysis in config.analyses:
        kind = analysis.type
        params = analysis.params
        out_name = claim_tag(kind)
        try:
            if kind == "histogram":
                hspec = est.HistogramSpec(
                    binning=params.get("binning", "logarithmic"),
                    lo=params["lo"], hi=params["hi"],
                    width=params.get("width"),
                    bins_per_decade=params.get("bins_per_decade"))
                hist = est.empirical_histogram(train, hspec)
                records.append(reports.histogram_record(hist, params))
                if fmt != "ndjson":
                    csvs.append(reports.histogram_csv(
                        out_name("csv"), hist))
                    figures.append(plots.plot_histogram(
                        hist, out_name("png"),
                        log_axes=hspec.binning == "logarithmic"))
            elif kind == "ccdf":
                records.append(reports.ccdf_record(ecdf()))
                if fmt != "ndjson":
                    csvs.append(reports.ccdf_csv(out_name("csv"),
                                                 ecdf()))
                    figures.append(plots.plot_ccdf(
                        ecdf(), out_name("png")))
            elif kind == "gm":
                estimates = []
                for order in params["orders"]:
                    estimate = est.empirical_gm(
                        train, order,
                        resamples=params.get("resamples", 200),
                        seed=params.get("seed", config.master_seed))
                    estimates.append(estimate)
                    records.append(reports.gm_record(estimate))
                if fmt != "ndjson":
                    csvs.append(reports.gm_csv(out_name("csv"),
                                               estimates))
            elif kind == "tailfit":
                if "fit_lo" in params:
                    lo, hi = float(params["fit_lo"]), float(params["fit_hi"])
                else:
                    lo, hi = est.default_fit_window(train, config.detector)
                method = params.get("method", "ccdf-regression")
                report = est.fit_tail_exponent(ecdf(), lo, hi, method)
                other_method = ("hill" if method == "ccdf-regression"
                                else "ccdf-regression")
                extras = {}
                try:
                    other = est.fit_tail_exponent(ecdf(), lo, hi,
                                                  other_method)
                    extras = {"other_method": other_method,
                              "other_k": other.k,
                              "disagreement": est.fits_disagree(report,
                                                                other)}
                except PhotonStatsError:
                    pass
                records.append(reports.tailfit_record(report, extras))
                if fmt != "ndjson":
                    csvs.append(reports.tailfit_csv(
                        out_name("csv"), report, ecdf()))
                    figures.append(plots.plot_ccdf(
                        ecdf(), out_name("png"), fit=report))
            elif kind == "hazard":
                curve = est.hazard_curve(
                    train, points=params.get("points", 200))
                records.append(reports.hazard_record(curve))
                if fmt != "ndjson":
                    csvs.append(reports.hazard_csv(out_name("csv"),
                                                   curve))
                    figures.append(plots.plot_hazard(
                        [("train", curve)], out_name("png")))
            elif kind == "ks":
                spec = _ks_reference_spec(config)
                result = est.ks_distance(train, spec)
                records.append(reports.ks_record(result))
                if fmt != "ndjson":
                    csvs.append(reports.ks_csv(out_name("csv"),
                                               result))
        except PhotonStatsError as exc:
            records.append(reports.error_record(kind, exc))
    return records, csvs, figures


def _meta_for_report(train: PulseTrain) -> dict:
    meta = train.meta
    meta["spec_digest"] = train.spec_digest
    return meta


def _cmd_analyze(args) -> int:
    config = RunConfig.load(args.config)
    if args.seed is not None:
        config = config.with_seed(args.seed)
    train = load_train(args.train)
    out_path = Path(args.out)
    records, csvs, figures = _run_analyses(train, config, out_path,
                                           args.format)
    if args.format != "csv":
        reports.write_report(out_path, records)
        print(json.dumps({"report": str(out_path),
                          "records": len(records),
                          "csv": [str(p) for p in csvs],
                          "figures": [str(p) for p in figures]},
                         sort_keys=True))
    else:
        print(json.dumps({"csv": [str(p) for p in csvs],
                          "figures": [str(p) for p in figures]},
                         sort_keys=True))
    return 0


def _cmd_reproduce(args) -> int:
    from . import reproduce
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    runner = {"table1": reproduce.run_table1,
              "table2": reproduce.run_table2,
              "fig8": reproduce.run_fig8}[args.target]
    rows = runner(out_dir, threads=args.threads)
    for row in rows:
        status = "pass" if row["passed"] else "FAIL"
        print(f"{status}  {row['id']}.{row['quantity']}: "
              f"{row['artifact']:.6g} (tolerance {row['tolerance']})")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "analyze":
            return _cmd_analyze(args)
        if args.command == "reproduce":
            return _cmd_reproduce(args)
        raise ValidationError(f"unknown command {args.command!r}")
    except PhotonStatsError as exc:
        payload = {"error": type(exc).__name__, "message": str(exc)}
        if getattr(exc, "field", None):
            payload["field"] = exc.field
        print(json.dumps(payload, sort_keys=True), file=sys.stderr)
        return getattr(exc, "exit_code", 2)
    except OSError as exc:
        print(json.dumps({"error": "OSError", "message": str(exc)},
                         sort_keys=True), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
