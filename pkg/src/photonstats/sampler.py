"""Monte Carlo pulse trains and the physical transform chain.

``sample`` draws per-pulse photon numbers for any spec; the transforms
apply the n-th-power harmonic law, the sinh^2 FWM gain, deterministic
attenuation, and the detector stage (additive Gaussian noise, then a
hard saturation clamp). Detection is always last: transforms refuse
trains that already carry noise or saturation.

All randomness flows through the chunked substreams of
:mod:`photonstats.rng`, making every train bit-reproducible from its
meta block (spec, master seed, pulse count, transform history) and
independent of the worker count used to generate it.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import rng
from .distributions import double_factorial
from .errors import NumericRangeError, OrderingError, ValidationError
from .specs import DistributionSpec

__all__ = [
    "PulseTrain", "DetectorModel", "SpectralEnsemble", "sample",
    "harmonic_transform", "fwm_transform", "apply_loss", "apply_detector",
    "regenerate", "synth_spectral_ensemble", "SINH_GAIN_LIMIT",
]

# sinh(t)^2 overflows float64 just above t ~ 354; guard with margin
SINH_GAIN_LIMIT = 350.0


@dataclass(frozen=True)
class DetectorModel:
    """Charge-integrating detector: additive zero-mean Gaussian noise of
    ``noise_sigma`` photons/pulse and an optional hard saturation
    ceiling."""
    noise_sigma: float = 0.0
    saturation: float | None = None

    def __post_init__(self):
        sigma = float(self.noise_sigma)
        if not math.isfinite(sigma) or sigma < 0:
            raise ValidationError("noise_sigma must be >= 0",
                                  field="noise_sigma")
        object.__setattr__(self, "noise_sigma", sigma)
        if self.saturation is not None:
            sat = float(self.saturation)
            if not math.isfinite(sat) or sat <= 0:
                raise ValidationError("saturation must be > 0",
                                      field="saturation")
            if sat <= sigma:
                raise ValidationError("saturation must exceed noise_sigma",
                                      field="saturation")
            object.__setattr__(self, "saturation", sat)

    def to_dict(self) -> dict:
        return {"noise_sigma": self.noise_sigma,
                "saturation": self.saturation}

    @classmethod
    def from_dict(cls, doc: dict) -> "DetectorModel":
        if not isinstance(doc, dict):
            raise ValidationError("detector must be a key-value mapping",
                                  field="detector")
        unknown = set(doc) - {"noise_sigma", "saturation"}
        if unknown:
            raise ValidationError(
                f"unknown detector fields: {sorted(unknown)}",
                field=sorted(unknown)[0])
        return cls(noise_sigma=doc.get("noise_sigma", 0.0),
                   saturation=doc.get("saturation"))


@dataclass
class PulseTrain:
    """Ordered per-pulse photon numbers plus full provenance.

    ``values`` are continuous photons/pulse (negative only after the
    detector stage). ``spec`` is the serialized source spec, ``history``
    the ordered transform records; together with ``master_seed`` they
    regenerate the identical values bit for bit.
    """
    values: np.ndarray
    spec: dict | None
    master_seed: int
    history: list[dict] = field(default_factory=list)
    # set by the binary loader, where only the digest survives
    spec_digest: str | None = None

    @property
    def pulse_count(self) -> int:
        return len(self.values)

    @property
    def meta(self) -> dict:
        return {"spec": self.spec, "master_seed": self.master_seed,
                "pulse_count": self.pulse_count,
                "history": list(self.history)}

    @property
    def detected(self) -> bool:
        """True once the detector stage (or spec-level noise) has run."""
        spec_noise = bool(self.spec) and self.spec.get("noise_sigma", 0) > 0
        return spec_noise or any(h.get("op") == "detector"
                                 for h in self.history)

    def summary(self) -> dict:
        v = self.values
        return {"pulses": int(len(v)), "mean": float(v.mean()),
                "variance": float(v.var()), "min": float(v.min()),
                "max": float(v.max())}

    def _derived(self, values: np.ndarray, record: dict) -> "PulseTrain":
        return PulseTrain(values=values, spec=self.spec,
                          master_seed=self.master_seed,
                          history=self.history + [record],
                          spec_digest=self.spec_digest)


def _require_pre_detector(train: PulseTrain, op: str) -> None:
    if train.detected:
        raise OrderingError(
            f"{op} must run before detection; this train already carries "
            "detector noise/saturation")


# -- sampling ------------------------------------------------------------------

def _draw_multimode(gen: np.random.Generator, size: int, modes: int,
                    superbunched: bool, mean: float) -> np.ndarray:
    """Sum of ``modes`` independent single-mode draws of mean mean/modes.

    Single-mode thermal is exponential; single-mode superbunched is
    (mean) * Z^2 with Z standard normal, the exact Gamma(1/2, 2 mean)
    equivalent.
    """
    per_mode = mean / modes
    shape = (size, modes) if modes > 1 else size
    if superbunched:
        z = gen.standard_normal(shape)
        draws = per_mode * z * z
    else:
        draws = gen.exponential(per_mode, shape)
    return draws.sum(axis=1) if modes > 1 else draws


def _sinh_gain(gain: np.ndarray) -> np.ndarray:
    peak = float(gain.max()) if len(gain) else 0.0
    if peak > SINH_GAIN_LIMIT:
        raise NumericRangeError(
            f"FWM gain kappa*N_p reached {peak:.1f} > {SINH_GAIN_LIMIT:g}; "
            "sinh^2 would overflow")
    return np.sinh(gain) ** 2


def _sample_chunk(spec: DistributionSpec, gen: np.random.Generator,
                  size: int) -> np.ndarray:
    sb = spec.pump_is_superbunched
    if spec.is_fwm:
        pump = _draw_multimode(gen, size, spec.modes, sb, 1.0)
        vals = _sinh_gain(spec.kappa_np * pump)
    elif spec.is_harmonic:
        n = spec.harmonic_order
        src_moment = (double_factorial(2 * n - 1) if sb
                      else math.factorial(n))
        conversion = spec.harmonic_mean / src_moment
        fundamental = _draw_multimode(gen, size, 1, sb, 1.0)
        vals = conversion * fundamental ** n
    else:
        vals = _draw_multimode(gen, size, spec.modes, sb, spec.mean)
    if spec.noise_sigma > 0.0:
        vals = vals + gen.normal(0.0, spec.noise_sigma, size)
    return vals


def sample(spec: DistributionSpec, pulses: int, master_seed: int, *,
           threads: int = 1) -> PulseTrain:
    """Generate ``pulses`` photon numbers distributed per ``spec``.

    Chunked over independent substreams of ``master_seed``; the result
    is identical for any ``threads`` value.
    """
    if not isinstance(pulses, int) or pulses < 1:
        raise ValidationError("pulses must be an integer >= 1",
                              field="pulses")
    rng.check_seed(master_seed)
    if not isinstance(threads, int) or threads < 1:
        raise ValidationError("threads must be an integer >= 1",
                              field="threads")

    values = np.empty(pulses, dtype=np.float64)
    layout = list(rng.chunk_layout(pulses))

    def fill(job):
        index, offset, size = job
        gen = rng.chunk_generator(master_seed, index, rng.LANE_LIGHT)
        values[offset:offset + size] = _sample_chunk(spec, gen, size)

    if threads == 1 or len(layout) == 1:
        for job in layout:
            fill(job)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fill, layout))

    return PulseTrain(values=values, spec=spec.to_dict(),
                      master_seed=master_seed)


# -- transform chain -----------------------------------------------------------

def harmonic_transform(train: PulseTrain, order: int,
                       conversion: float) -> PulseTrain:
    """n-th-power harmonic law: each value N -> conversion * N^order."""
    if not isinstance(order, int) or order < 2:
        raise ValidationError("harmonic order must be an integer >= 2",
                              field="order")
    conversion = float(conversion)
    if conversion <= 0:
        raise ValidationError("conversion must be > 0", field="conversion")
    _require_pre_detector(train, "harmonic_transform")
    values = conversion * train.values ** order
    return train._derived(values, {"op": "harmonic", "order": order,
                                   "conversion": conversion})


def fwm_transform(train: PulseTrain, kappa: float) -> PulseTrain:
    """Parametric gain law N_p -> sinh^2(kappa N_p) applied to a pump
    train. Gains beyond the float64 range raise rather than silently
    producing infinities."""
    kappa = float(kappa)
    if kappa <= 0:
        raise ValidationError("kappa must be > 0", field="kappa")
    _require_pre_detector(train, "fwm_transform")
    if len(train.values) and float(train.values.min()) < 0:
        raise ValidationError("pump values must be >= 0")
    values = _sinh_gain(kappa * train.values)
    return train._derived(values, {"op": "fwm", "kappa": kappa})


def apply_loss(train: PulseTrain, eta: float) -> PulseTrain:
    """Deterministic attenuation: values scaled by eta in (0, 1]."""
    eta = float(eta)
    if not 0.0 < eta <= 1.0:
        raise ValidationError("eta must be in (0, 1]", field="eta")
    _require_pre_detector(train, "apply_loss")
    return train._derived(train.values * eta, {"op": "loss", "eta": eta})


def apply_detector(train: PulseTrain, model: DetectorModel,
                   noise_seed: int) -> PulseTrain:
    """Detection stage: add i.i.d. Gaussian(0, sigma) per pulse, then
    clamp at saturation. Output values may be negative."""
    rng.check_seed(noise_seed)
    values = train.values
    if model.noise_sigma > 0.0:
        noise = np.empty_like(values)
        for index, offset, size in rng.chunk_layout(len(values)):
            gen = rng.chunk_generator(noise_seed, index, rng.LANE_NOISE)
            noise[offset:offset + size] = gen.normal(
                0.0, model.noise_sigma, size)
        values = values + noise
    if model.saturation is not None:
        values = np.minimum(values, model.saturation)
    return train._derived(values, {"op": "detector",
                                   "noise_sigma": model.noise_sigma,
                                   "saturation": model.saturation,
                                   "noise_seed": noise_seed})


def regenerate(meta: dict) -> PulseTrain:
    """Rebuild the bit-identical train described by a meta block."""
    if not isinstance(meta, dict) or meta.get("spec") is None:
        raise ValidationError("meta must carry the spec serialization")
    spec = DistributionSpec.from_dict(meta["spec"])
    train = sample(spec, meta["pulse_count"], meta["master_seed"])
    for record in meta.get("history", []):
        op = record.get("op")
        if op == "harmonic":
            train = harmonic_transform(train, record["order"],
                                       record["conversion"])
        elif op == "fwm":
            train = fwm_transform(train, record["kappa"])
        elif op == "loss":
            train = apply_loss(train, record["eta"])
        elif op == "detector":
            model = DetectorModel(noise_sigma=record["noise_sigma"],
                                  saturation=record["saturation"])
            train = apply_detector(train, model, record["noise_seed"])
        else:
            raise ValidationError(f"unknown transform record {op!r}")
    return train


# -- synthetic spectral ensembles ------------------------------------------------

@dataclass
class SpectralEnsemble:
    """Per-pulse spectral densities over wavelength bins: ``spectra`` is
    a (pulses x bins) matrix of nonnegative values in arbitrary linear
    units."""
    wavelengths: np.ndarray
    spectra: np.ndarray

    def __post_init__(self):
        self.wavelengths = np.asarray(self.wavelengths, dtype=float)
        self.spectra = np.asarray(self.spectra, dtype=float)
        if self.spectra.ndim != 2 or \
                self.spectra.shape[1] != len(self.wavelengths):
            raise ValidationError("spectra must be (pulses x bins)")
        if np.any(self.spectra < 0):
            raise ValidationError("spectral densities must be >= 0")

    @property
    def pulse_count(self) -> int:
        return self.spectra.shape[0]


def _check_mirror_detunings(wavelengths: np.ndarray) -> None:
    center = wavelengths[len(wavelengths) // 2]
    detunings = wavelengths - center
    scale = float(np.max(np.abs(detunings))) or 1.0
    if np.max(np.abs(detunings + detunings[::-1])) > 1e-9 * scale:
        raise ValidationError("wavelength bins must sit at mirror "
                              "detunings around the pump bin",
                              field="wavelengths")


def _check_mirror_values(name: str, values: np.ndarray) -> None:
    scale = float(np.max(np.abs(values))) or 1.0
    if np.max(np.abs(values - values[::-1])) > 1e-9 * scale:
        raise ValidationError(f"{name} must be symmetric around the pump "
                              "bin", field=name)


def synth_spectral_ensemble(pump_spec: DistributionSpec | None,
                            wavelengths, kappa_profile, *,
                            speckle: bool, pulses: int,
                            seed: int) -> SpectralEnsemble:
    """Synthetic signal/idler ensemble for exercising the spectral
    correlation estimator.

    Per pulse one pump photon number is drawn (``pump_spec``; ``None``
    means a constant unit pump). The bin pair at mirror detunings +-j
    around the central pump bin both receive sinh^2(kappa_j * N_p),
    multiplied, when ``speckle`` is on, by one unit-mean exponential
    factor drawn per pair per pulse. Mirror bins are therefore perfectly
    correlated (idler mirrors signal) and all bins share the pump
    fluctuations.
    """
    wavelengths = np.asarray(wavelengths, dtype=float)
    kappa_profile = np.asarray(kappa_profile, dtype=float)
    if wavelengths.ndim != 1 or len(wavelengths) % 2 != 1:
        raise ValidationError("wavelength grid must be 1-D with an odd "
                              "number of bins (center = pump)",
                              field="wavelengths")
    if np.any(np.diff(wavelengths) <= 0):
        raise ValidationError("wavelengths must be increasing",
                              field="wavelengths")
    _check_mirror_detunings(wavelengths)
    if kappa_profile.shape != wavelengths.shape:
        raise ValidationError("kappa_profile must match the wavelength "
                              "grid", field="kappa_profile")
    if np.any(kappa_profile < 0):
        raise ValidationError("kappa_profile must be >= 0",
                              field="kappa_profile")
    _check_mirror_values("kappa_profile", kappa_profile)
    if not isinstance(pulses, int) or pulses < 1:
        raise ValidationError("pulses must be an integer >= 1",
                              field="pulses")
    rng.check_seed(seed)

    if pump_spec is None:
        pump = np.ones(pulses)
    else:
        if pump_spec.noise_sigma != 0.0:
            raise ValidationError("pump spec must be noise-free",
                                  field="noise_sigma")
        pump = sample(pump_spec, pulses, seed).values

    center = len(wavelengths) // 2
    n_pairs = center + 1
    kappas = kappa_profile[center:]

    gains = np.outer(pump, kappas)
    peak = float(gains.max()) if gains.size else 0.0
    if peak > SINH_GAIN_LIMIT:
        raise NumericRangeError(
            f"spectral gain reached {peak:.1f} > {SINH_GAIN_LIMIT:g}")
    pair_values = np.sinh(gains) ** 2
    if speckle:
        gen = rng.chunk_generator(seed, 0, rng.LANE_SPECKLE)
        pair_values = pair_values * gen.exponential(1.0, (pulses, n_pairs))

    spectra = np.empty((pulses, len(wavelengths)))
    spectra[:, center:] = pair_values
    spectra[:, :center + 1] = pair_values[:, ::-1]
    return SpectralEnsemble(wavelengths=wavelengths, spectra=spectra)
