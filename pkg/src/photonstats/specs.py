"""Distribution specs: the single description of a light statistic.

A :class:`DistributionSpec` names a source law (thermal, superbunched,
or four-wave-mixing output pumped by either), an optional harmonic
transform, a mode count, and an optional detector-noise sigma. It is the
currency shared by the analytic formulas in :mod:`photonstats.distributions`
and the Monte Carlo sampler in :mod:`photonstats.sampler`.

Serialization is a flat key-value JSON document versioned with a
``spec_version`` field:

    {"spec_version": 1, "source": "thermal", "mean": 133000.0,
     "modes": 1, "harmonic_order": 1, "noise_sigma": 0.0}

Fields
------
source
    One of ``thermal``, ``superbunched``, ``fwm_thermal``,
    ``fwm_superbunched``.
mean
    Mean photons/pulse of a plain thermal/superbunched source. Must be
    absent for FWM sources (their scale is set by ``kappa_np``) and for
    harmonic specs (the output mean lives in ``harmonic_mean``).
kappa_np
    Dimensionless mean gain of an FWM source: the product of the
    interaction strength and the mean pump photon number. The sampler
    draws a unit-mean pump variate u and emits sinh^2(kappa_np * u).
harmonic_order
    n >= 1. n = 1 means no harmonic transform. n >= 2 is defined only for
    single-mode thermal/superbunched sources.
harmonic_mean
    Target mean photons/pulse of the harmonic output; the conversion
    constant of the n-th-power law is absorbed into it.
modes
    Number M >= 1 of independent statistical modes; ``mean``/``kappa_np``
    always refer to the all-mode total.
noise_sigma
    Additive zero-mean Gaussian detector noise, photons/pulse. 0 means a
    noise-free law.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, replace

from .errors import UnsupportedCombinationError, ValidationError

SPEC_VERSION = 1

SOURCES = ("thermal", "superbunched", "fwm_thermal", "fwm_superbunched")
FWM_SOURCES = ("fwm_thermal", "fwm_superbunched")


def _require_positive(name: str, value) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise ValidationError(f"{name} must be a positive finite number, "
                              f"got {value!r}", field=name)
    return value


@dataclass(frozen=True)
class DistributionSpec:
    source: str
    mean: float | None = None
    kappa_np: float | None = None
    harmonic_order: int = 1
    harmonic_mean: float | None = None
    modes: int = 1
    noise_sigma: float = 0.0

    def __post_init__(self):
        if self.source not in SOURCES:
            raise ValidationError(
                f"unknown source {self.source!r}; expected one of {SOURCES}",
                field="source")
        if not isinstance(self.harmonic_order, int) or self.harmonic_order < 1:
            raise ValidationError("harmonic_order must be an integer >= 1",
                                  field="harmonic_order")
        if not isinstance(self.modes, int) or self.modes < 1:
            raise ValidationError("modes must be an integer >= 1",
                                  field="modes")
        sigma = float(self.noise_sigma)
        if not math.isfinite(sigma) or sigma < 0.0:
            raise ValidationError("noise_sigma must be >= 0",
                                  field="noise_sigma")
        object.__setattr__(self, "noise_sigma", sigma)

        if self.is_fwm:
            if self.kappa_np is None:
                raise ValidationError(f"{self.source} requires kappa_np",
                                      field="kappa_np")
            object.__setattr__(self, "kappa_np",
                               _require_positive("kappa_np", self.kappa_np))
            if self.mean is not None:
                raise ValidationError(
                    "FWM sources take no mean field; their photon scale is "
                    "set by kappa_np", field="mean")
            if self.harmonic_order != 1:
                raise UnsupportedCombinationError(
                    "harmonic transforms are defined only for thermal and "
                    "superbunched sources", field="harmonic_order")
            if self.harmonic_mean is not None:
                raise ValidationError("harmonic_mean requires a harmonic "
                                      "spec", field="harmonic_mean")
            return

        if self.kappa_np is not None:
            raise ValidationError(f"kappa_np applies only to FWM sources, "
                                  f"not {self.source!r}", field="kappa_np")
        if self.harmonic_order == 1:
            if self.mean is None:
                raise ValidationError(f"{self.source} requires mean",
                                      field="mean")
            object.__setattr__(self, "mean",
                               _require_positive("mean", self.mean))
            if self.harmonic_mean is not None:
                raise ValidationError("harmonic_mean requires "
                                      "harmonic_order >= 2",
                                      field="harmonic_mean")
        else:
            if self.modes != 1:
                raise UnsupportedCombinationError(
                    "harmonic transforms are defined for single-mode pumps "
                    "only (modes must be 1)", field="modes")
            if self.harmonic_mean is None:
                raise ValidationError("harmonic specs require harmonic_mean",
                                      field="harmonic_mean")
            object.__setattr__(
                self, "harmonic_mean",
                _require_positive("harmonic_mean", self.harmonic_mean))
            if self.mean is not None:
                raise ValidationError(
                    "harmonic specs absorb the source scale; give "
                    "harmonic_mean only", field="mean")

    # -- structure ---------------------------------------------------------

    @property
    def is_fwm(self) -> bool:
        return self.source in FWM_SOURCES

    @property
    def is_harmonic(self) -> bool:
        return self.harmonic_order >= 2

    @property
    def pump_is_superbunched(self) -> bool:
        return self.source in ("superbunched", "fwm_superbunched")

    def noiseless(self) -> "DistributionSpec":
        if self.noise_sigma == 0.0:
            return self
        return replace(self, noise_sigma=0.0)

    def with_noise(self, sigma: float) -> "DistributionSpec":
        return replace(self, noise_sigma=float(sigma))

    def scaled(self, eta: float) -> "DistributionSpec":
        """Spec of the law after deterministic attenuation by eta.

        Thermal/superbunched/harmonic families are closed under scaling
        (the mean scales); FWM families are not.
        """
        eta = float(eta)
        if not 0.0 < eta <= 1.0:
            raise ValidationError("eta must be in (0, 1]", field="eta")
        if self.noise_sigma != 0.0:
            raise ValidationError("cannot scale a noisy spec: attenuation "
                                  "precedes detection", field="noise_sigma")
        if self.is_fwm:
            raise ValidationError(
                "FWM laws are not closed under scaling; no spec represents "
                "the attenuated distribution", field="source")
        if self.is_harmonic:
            return replace(self, harmonic_mean=self.harmonic_mean * eta)
        return replace(self, mean=self.mean * eta)

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        doc = {
            "spec_version": SPEC_VERSION,
            "source": self.source,
            "modes": self.modes,
            "harmonic_order": self.harmonic_order,
            "noise_sigma": self.noise_sigma,
        }
        if self.mean is not None:
            doc["mean"] = self.mean
        if self.kappa_np is not None:
            doc["kappa_np"] = self.kappa_np
        if self.harmonic_mean is not None:
            doc["harmonic_mean"] = self.harmonic_mean
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "DistributionSpec":
        if not isinstance(doc, dict):
            raise ValidationError("spec document must be a key-value "
                                  "mapping", field="spec")
        doc = dict(doc)
        version = doc.pop("spec_version", None)
        if version != SPEC_VERSION:
            raise ValidationError(
                f"unsupported spec_version {version!r}; this build reads "
                f"version {SPEC_VERSION}", field="spec_version")
        known = {"source", "mean", "kappa_np", "harmonic_order",
                 "harmonic_mean", "modes", "noise_sigma"}
        unknown = set(doc) - known
        if unknown:
            raise ValidationError(f"unknown spec fields: {sorted(unknown)}",
                                  field=sorted(unknown)[0])
        if "source" not in doc:
            raise ValidationError("spec document requires a source field",
                                  field="source")
        for int_field in ("harmonic_order", "modes"):
            if int_field in doc:
                value = doc[int_field]
                if isinstance(value, float) and value.is_integer():
                    value = int(value)
                if not isinstance(value, int):
                    raise ValidationError(f"{int_field} must be an integer",
                                          field=int_field)
                doc[int_field] = value
        return cls(**doc)

    def canonical_json(self) -> str:
        """Canonical single-line serialization used for digests."""
        return json.dumps(self.to_dict(), sort_keys=True,
                          separators=(",", ":"))

    def digest(self) -> bytes:
        """16-byte digest identifying the spec (for binary train headers)."""
        return hashlib.sha256(self.canonical_json().encode()).digest()[:16]


# -- convenience constructors ------------------------------------------------

def thermal(mean: float, *, modes: int = 1,
            noise_sigma: float = 0.0) -> DistributionSpec:
    """Exponential photon-number law (each beam of nondegenerate
    high-gain down-conversion, M-mode Gamma generalization)."""
    return DistributionSpec("thermal", mean=mean, modes=modes,
                            noise_sigma=noise_sigma)


def superbunched(mean: float, *, modes: int = 1,
                 noise_sigma: float = 0.0) -> DistributionSpec:
    """Gamma(1/2) photon-number law of degenerate high-gain
    down-conversion (envelope form)."""
    return DistributionSpec("superbunched", mean=mean, modes=modes,
                            noise_sigma=noise_sigma)


def thermal_harmonic(order: int, harmonic_mean: float, *,
                     noise_sigma: float = 0.0) -> DistributionSpec:
    """n-th optical harmonic of single-mode thermal light (Weibull law)."""
    return DistributionSpec("thermal", harmonic_order=order,
                            harmonic_mean=harmonic_mean,
                            noise_sigma=noise_sigma)


def superbunched_harmonic(order: int, harmonic_mean: float, *,
                          noise_sigma: float = 0.0) -> DistributionSpec:
    """n-th optical harmonic of single-mode superbunched light
    (generalized-Gamma law)."""
    return DistributionSpec("superbunched", harmonic_order=order,
                            harmonic_mean=harmonic_mean,
                            noise_sigma=noise_sigma)


def fwm_thermal(kappa_np: float, *, modes: int = 1,
                noise_sigma: float = 0.0) -> DistributionSpec:
    """Four-wave-mixing output, N = sinh^2(kappa N_p), thermal pump."""
    return DistributionSpec("fwm_thermal", kappa_np=kappa_np, modes=modes,
                            noise_sigma=noise_sigma)


def fwm_superbunched(kappa_np: float, *, modes: int = 1,
                     noise_sigma: float = 0.0) -> DistributionSpec:
    """Four-wave-mixing output, N = sinh^2(kappa N_p), superbunched pump."""
    return DistributionSpec("fwm_superbunched", kappa_np=kappa_np,
                            modes=modes, noise_sigma=noise_sigma)
