"""Run configuration: the versioned key-value document driving the CLI.

A config bundles one DistributionSpec with run fields and an analysis
list:

    {
      "spec_version": 1,
      "spec": {"source": "superbunched", "mean": 76000.0, ...},
      "pulses": 1000000,
      "master_seed": 42,
      "loss_eta": 0.43,                          # optional
      "detector": {"noise_sigma": 270.0,         # optional
                   "saturation": 1.0e6},
      "noise_seed": 7,                           # optional, detector stage
      "analyses": [
        {"type": "histogram", "binning": "logarithmic",
         "bins_per_decade": 8, "lo": 1.0, "hi": 1e7},
        {"type": "ccdf"},
        {"type": "gm", "orders": [2, 3], "resamples": 200},
        {"type": "tailfit", "fit_lo": 1e4, "fit_hi": 8e5,
         "method": "ccdf-regression"},
        {"type": "hazard"},
        {"type": "ks"}
      ]
    }

Validation happens up front, before any sampling or analysis runs, and
enforces the physical stage ordering source -> harmonic/FWM -> loss ->
detector -> analysis: a spec that already carries noise cannot be
followed by loss or a detector stage.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DataFormatError, ValidationError
from .estimators import HistogramSpec
from .rng import check_seed
from .sampler import DetectorModel
from .specs import SPEC_VERSION, DistributionSpec

ANALYSIS_TYPES = ("histogram", "ccdf", "gm", "tailfit", "hazard", "ks")


@dataclass(frozen=True)
class AnalysisSpec:
    type: str
    params: dict = field(default_factory=dict)

    @property
    def label(self) -> str:
        return self.type


def _validate_analysis(doc: dict, index: int) -> AnalysisSpec:
    if not isinstance(doc, dict) or "type" not in doc:
        raise ValidationError(f"analyses[{index}] must be a mapping with "
                              "a type field", field=f"analyses[{index}]")
    kind = doc["type"]
    params = {k: v for k, v in doc.items() if k != "type"}
    where = f"analyses[{index}]({kind})"
    if kind == "histogram":
        allowed = {"binning", "lo", "hi", "width", "bins_per_decade"}
        _reject_unknown(params, allowed, where)
        # constructing the spec runs the full precondition checks
        HistogramSpec(binning=params.get("binning", "logarithmic"),
                      lo=params.get("lo", 0.0), hi=params.get("hi", 0.0),
                      width=params.get("width"),
                      bins_per_decade=params.get("bins_per_decade"))
    elif kind == "ccdf":
        _reject_unknown(params, set(), where)
    elif kind == "gm":
        _reject_unknown(params, {"orders", "resamples", "seed"}, where)
        orders = params.get("orders")
        if (not isinstance(orders, list) or not orders or
                any(not isinstance(o, int) or o < 1 for o in orders)):
            raise ValidationError(f"{where}: orders must be a nonempty "
                                  "list of integers >= 1", field=where)
        if params.get("resamples", 200) < 0:
            raise ValidationError(f"{where}: resamples must be >= 0",
                                  field=where)
    elif kind == "tailfit":
        _reject_unknown(params, {"fit_lo", "fit_hi", "method"}, where)
        method = params.get("method", "ccdf-regression")
        if method not in ("ccdf-regression", "hill"):
            raise ValidationError(f"{where}: unknown method {method!r}",
                                  field=where)
        if ("fit_lo" in params) != ("fit_hi" in params):
            raise ValidationError(f"{where}: give both fit_lo and fit_hi "
                                  "or neither (default window)",
                                  field=where)
        if "fit_lo" in params and not \
                0 < float(params["fit_lo"]) < float(params["fit_hi"]):
            raise ValidationError(f"{where}: need 0 < fit_lo < fit_hi",
                                  field=where)
    elif kind == "hazard":
        _reject_unknown(params, {"points"}, where)
    elif kind == "ks":
        _reject_unknown(params, set(), where)
    else:
        raise ValidationError(f"{where}: unknown analysis type",
                              field=where)
    return AnalysisSpec(type=kind, params=params)


def _reject_unknown(params: dict, allowed: set, where: str) -> None:
    unknown = set(params) - allowed
    if unknown:
        raise ValidationError(f"{where}: unknown fields {sorted(unknown)}",
                              field=where)


@dataclass(frozen=True)
class RunConfig:
    spec: DistributionSpec
    pulses: int
    master_seed: int
    loss_eta: float | None = None
    detector: DetectorModel | None = None
    noise_seed: int | None = None
    analyses: tuple[AnalysisSpec, ...] = ()
    raw: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        if not isinstance(doc, dict):
            raise ValidationError("config must be a key-value document")
        if doc.get("spec_version") != SPEC_VERSION:
            raise ValidationError(
                f"config spec_version must be {SPEC_VERSION}",
                field="spec_version")
        known = {"spec_version", "spec", "pulses", "master_seed",
                 "loss_eta", "detector", "noise_seed", "analyses"}
        unknown = set(doc) - known
        if unknown:
            raise ValidationError(f"unknown config fields: "
                                  f"{sorted(unknown)}",
                                  field=sorted(unknown)[0])
        if "spec" not in doc:
            raise ValidationError("config requires a spec", field="spec")
        spec_doc = dict(doc["spec"])
        spec_doc.setdefault("spec_version", SPEC_VERSION)
        spec = DistributionSpec.from_dict(spec_doc)

        pulses = doc.get("pulses")
        if isinstance(pulses, float) and pulses.is_integer():
            pulses = int(pulses)
        if not isinstance(pulses, int) or pulses < 1:
            raise ValidationError("pulses must be an integer >= 1",
                                  field="pulses")
        master_seed = doc.get("master_seed", 0)
        check_seed(master_seed)

        loss_eta = doc.get("loss_eta")
        if loss_eta is not None:
            loss_eta = float(loss_eta)
            if not 0.0 < loss_eta <= 1.0 or not math.isfinite(loss_eta):
                raise ValidationError("loss_eta must be in (0, 1]",
                                      field="loss_eta")
        detector = None
        if doc.get("detector") is not None:
            detector = DetectorModel.from_dict(doc["detector"])
        noise_seed = doc.get("noise_seed")
        if noise_seed is not None:
            check_seed(noise_seed)
        elif detector is not None:
            noise_seed = master_seed  # noise runs on its own stream lane

        # stage ordering: spec-level noise is a detection artifact and
        # must be the final stage of the pipeline
        if spec.noise_sigma > 0.0 and (loss_eta is not None
                                       or detector is not None):
            raise ValidationError(
                "spec carries noise_sigma but the pipeline adds later "
                "stages; noise and saturation are detection artifacts "
                "and must come last (move noise to the detector block)",
                field="noise_sigma")

        analyses = tuple(_validate_analysis(a, i)
                         for i, a in enumerate(doc.get("analyses", [])))
        return cls(spec=spec, pulses=pulses, master_seed=master_seed,
                   loss_eta=loss_eta, detector=detector,
                   noise_seed=noise_seed, analyses=analyses, raw=doc)

    @classmethod
    def load(cls, path) -> "RunConfig":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise DataFormatError(f"cannot read config {path}: {exc}")
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"config {path} is not valid JSON: "
                                  f"{exc}")
        return cls.from_dict(doc)

    def with_seed(self, master_seed: int) -> "RunConfig":
        check_seed(master_seed)
        doc = dict(self.raw)
        doc["master_seed"] = master_seed
        return RunConfig.from_dict(doc)
