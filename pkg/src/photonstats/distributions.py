"""Closed-form photon-number laws: densities, CCDFs, hazards, moments.

Every supported family is the image of a base Gamma variable under a
monotone map, which gives one evaluation path for all of them:

    base Y ~ Gamma(shape s, scale theta)        photon number X = T(Y)

    plain sources      T(y) = y
        thermal, M modes:       s = M,   theta = mean / M
        superbunched, M modes:  s = M/2, theta = 2 mean / M
    harmonics (single-mode pump, unit-mean base)
        T(y) = K y^n with K fixed so that <X> = harmonic_mean:
        thermal pump:       K = harmonic_mean / n!
        superbunched pump:  K = harmonic_mean / (2n-1)!!
    four-wave mixing (unit-mean pump)
        T(y) = sinh^2(kappa_np * y)

so  ccdf(x) = Q(s, T^{-1}(x) / theta)  with Q the regularized upper
incomplete Gamma function, and pdf(x) = gamma_pdf(T^{-1}(x)) * dT^{-1}/dx.
The resulting closed forms are the exponential/Gamma source laws, the
Weibull and generalized-Gamma harmonic laws, and the arcsinh-argument FWM
laws, including their M-mode Gamma generalizations.

Densities that diverge at x = 0 (integrable power singularities) report
``math.inf`` there; the CCDF is the canonical finite object and all tail
work goes through it, in log space where needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import (MomentsUndefinedError, ResolutionError, ValidationError)
from .specs import DistributionSpec

__all__ = [
    "pdf", "ccdf", "log_ccdf", "hazard", "quantile", "analytic_mean",
    "analytic_gm", "analytic_tail_exponent", "convolve_with_noise",
    "noise_grid", "compare_tails", "TabulatedPdf", "TailComparison",
]


# -- internal law representation ---------------------------------------------

@dataclass(frozen=True)
class _Law:
    """Base Gamma(shape, scale) plus the monotone transform applied to it."""
    shape: float
    scale: float
    kind: str               # "identity" | "power" | "sinh2"
    power_k: float = 1.0    # x = power_k * y**power_n
    power_n: float = 1.0
    kappa: float = 1.0      # x = sinh(kappa * y)**2

    # local behavior x ~ (y/c)**(1/a) near 0, i.e. y =~ c * x**a
    @property
    def small_x_exponent(self) -> float:
        return {"identity": 1.0, "power": 1.0 / self.power_n,
                "sinh2": 0.5}[self.kind]

    @property
    def small_x_coeff(self) -> float:
        if self.kind == "identity":
            return 1.0
        if self.kind == "power":
            return self.power_k ** (-1.0 / self.power_n)
        return 1.0 / self.kappa

    def inverse(self, x):
        """y = T^{-1}(x); x >= 0 elementwise."""
        if self.kind == "identity":
            return x
        if self.kind == "power":
            return (x / self.power_k) ** (1.0 / self.power_n)
        return np.arcsinh(np.sqrt(x)) / self.kappa

    def dinverse(self, x):
        """dy/dx for x > 0."""
        if self.kind == "identity":
            return np.ones_like(x)
        if self.kind == "power":
            return (x / self.power_k) ** (1.0 / self.power_n) \
                / (self.power_n * x)
        return 1.0 / (2.0 * self.kappa * np.sqrt(x * (1.0 + x)))

    def forward(self, y):
        if self.kind == "identity":
            return y
        if self.kind == "power":
            return self.power_k * y ** self.power_n
        return np.sinh(self.kappa * y) ** 2


def double_factorial(n: int) -> int:
    return math.prod(range(n, 0, -2))


def _law(spec: DistributionSpec) -> _Law:
    sb = spec.pump_is_superbunched
    m = spec.modes
    if spec.is_fwm:
        shape = m / 2.0 if sb else float(m)
        scale = 2.0 / m if sb else 1.0 / m
        return _Law(shape, scale, "sinh2", kappa=spec.kappa_np)
    if spec.is_harmonic:
        n = spec.harmonic_order
        if sb:
            conv = spec.harmonic_mean / double_factorial(2 * n - 1)
            return _Law(0.5, 2.0, "power", power_k=conv, power_n=float(n))
        conv = spec.harmonic_mean / math.factorial(n)
        return _Law(1.0, 1.0, "power", power_k=conv, power_n=float(n))
    if sb:
        return _Law(m / 2.0, 2.0 * spec.mean / m, "identity")
    return _Law(float(m), spec.mean / m, "identity")


def _require_noise_free(spec: DistributionSpec, op: str) -> None:
    if spec.noise_sigma != 0.0:
        raise ValidationError(
            f"{op} evaluates the noise-free law; noisy distributions go "
            "through convolve_with_noise", field="noise_sigma")


def _as_array(n) -> tuple[np.ndarray, bool]:
    arr = np.asarray(n, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0):
        raise ValidationError("photon number must be finite and >= 0")
    return arr, arr.ndim == 0


def _maybe_scalar(values: np.ndarray, scalar: bool):
    if scalar:
        return float(np.asarray(values).reshape(-1)[0])
    return values


# -- densities and tail functions ---------------------------------------------

def pdf(spec: DistributionSpec, n):
    """Probability density of the photon number, 1/(photons/pulse).

    Accepts a scalar or array of photon numbers >= 0. Where the closed
    form diverges at n = 0 the distinguished value ``inf`` is returned.
    """
    _require_noise_free(spec, "pdf")
    law = _law(spec)
    x, scalar = _as_array(n)
    x = np.atleast_1d(x.copy())
    out = np.empty_like(x)

    zero = x == 0.0
    if np.any(zero):
        # y =~ c x^a near 0 -> density ~ [a c^s / (Gamma(s) theta^s)] x^(as-1)
        a, c, s = law.small_x_exponent, law.small_x_coeff, law.shape
        edge = a * s - 1.0
        if edge < 0.0:
            limit = math.inf
        elif edge > 0.0:
            limit = 0.0
        else:
            limit = a * c ** s / (math.gamma(s) * law.scale ** s)
        out[zero] = limit

    pos = ~zero
    if np.any(pos):
        xp = x[pos]
        y = law.inverse(xp)
        with np.errstate(divide="ignore"):
            logpdf = ((law.shape - 1.0) * np.log(y) - y / law.scale
                      - special.gammaln(law.shape)
                      - law.shape * math.log(law.scale)
                      + np.log(law.dinverse(xp)))
        out[pos] = np.exp(logpdf)

    if scalar:
        return float(out[0])
    return out.reshape(np.shape(n))


def ccdf(spec: DistributionSpec, n):
    """Complementary CDF (survival function): P(X > n).

    Monotone nonincreasing, 1 at n = 0. Evaluated through the regularized
    upper incomplete Gamma function (Erfc for half-integer shape 1/2).
    """
    _require_noise_free(spec, "ccdf")
    law = _law(spec)
    x, scalar = _as_array(n)
    y = law.inverse(x) / law.scale
    return _maybe_scalar(special.gammaincc(law.shape, y), scalar)


def log_ccdf(spec: DistributionSpec, n):
    """Natural log of the CCDF, computed to stay finite long after the
    CCDF itself underflows (survival probabilities down to e.g. 1e-300
    and far beyond are resolved)."""
    _require_noise_free(spec, "log_ccdf")
    law = _law(spec)
    x, scalar = _as_array(n)
    y = np.atleast_1d(law.inverse(x) / law.scale)
    return _maybe_scalar(_log_gammaincc(law.shape, y), scalar)


def _log_gammaincc(s: float, x: np.ndarray) -> np.ndarray:
    """log Q(s, x), elementwise, finite for arbitrarily large x."""
    if s == 1.0:
        return -x
    if s == 0.5:
        # Q(1/2, x) = Erfc(sqrt(x)); log Erfc(z) = log 2 + log Phi(-z sqrt 2)
        return math.log(2.0) + special.log_ndtr(-np.sqrt(2.0 * x))
    out = np.empty_like(x)
    q = special.gammaincc(s, x)
    safe = q > 1e-280
    with np.errstate(divide="ignore"):
        out[safe] = np.log(q[safe])
    deep = ~safe
    if np.any(deep):
        # Q(s,x) ~ x^(s-1) e^-x / Gamma(s) * [1 + (s-1)/x + ...] for x >> s
        xd = x[deep]
        series = np.ones_like(xd)
        term = np.ones_like(xd)
        for j in range(1, 6):
            term = term * (s - j) / xd
            series = series + term
        out[deep] = (-xd + (s - 1.0) * np.log(xd) - special.gammaln(s)
                     + np.log(series))
    return out


def hazard(spec: DistributionSpec, n):
    """Hazard function H(n) = -log CCDF(n).

    Computed in log space, so it stays finite and accurate for photon
    numbers whose survival probability underflows a 64-bit float. The
    ratio H(n)/n diagnoses tails: a constant limit means exponential
    decay, a zero limit a heavy tail.
    """
    value = log_ccdf(spec, n)
    return -value


def quantile(spec: DistributionSpec, p):
    """Photon number with CDF p, exact through the inverse regularized
    incomplete Gamma function and the family's transform."""
    _require_noise_free(spec, "quantile")
    arr, scalar = np.asarray(p, dtype=float), np.ndim(p) == 0
    if np.any((arr < 0) | (arr >= 1)):
        raise ValidationError("quantile probability must be in [0, 1)")
    law = _law(spec)
    y = law.scale * special.gammainccinv(law.shape, 1.0 - arr)
    return _maybe_scalar(np.asarray(law.forward(y)), scalar)


# -- moments -------------------------------------------------------------------

def analytic_mean(spec: DistributionSpec) -> float:
    """Mean photons/pulse; ``inf`` for FWM laws whose mean diverges
    (tail exponent <= 1)."""
    if spec.is_fwm:
        law = _law(spec)
        t = 2.0 * spec.kappa_np * law.scale
        if t >= 1.0:
            return math.inf
        s = law.shape
        return ((1.0 - t) ** -s + (1.0 + t) ** -s) / 4.0 - 0.5
    if spec.is_harmonic:
        return spec.harmonic_mean
    return spec.mean


def _gamma_moment_ratio(shape: float, order: int) -> float:
    """g^(m) of a Gamma(shape) variable: prod_{i<m} (1 + i/shape)."""
    value = 1.0
    for i in range(order):
        value *= 1.0 + i / shape
    return value


def analytic_gm(spec: DistributionSpec, order: int) -> float:
    """Normalized intensity correlation g^(m) = <N^m> / <N>^m.

    Thermal gives m!, superbunched (2m-1)!!, M-mode sources the Gamma
    moment ratio, and harmonics the transfer rule
    g_out^(m) = g_src^(m n) / (g_src^(n))^m. FWM laws have no finite
    moments; requesting them raises with the analytic tail exponent
    attached.
    """
    if not isinstance(order, int) or order < 1:
        raise ValidationError("correlation order must be an integer >= 1")
    if spec.is_fwm:
        raise MomentsUndefinedError(
            f"moments of {spec.source} diverge (Pareto-like tail); "
            "tail exponent attached",
            tail_exponent=analytic_tail_exponent(spec))
    if spec.is_harmonic:
        shape = 0.5 if spec.pump_is_superbunched else 1.0
        n = spec.harmonic_order
        return (_gamma_moment_ratio(shape, order * n)
                / _gamma_moment_ratio(shape, n) ** order)
    return _gamma_moment_ratio(_law(spec).shape, order)


def analytic_tail_exponent(spec: DistributionSpec) -> float | None:
    """Pareto index of the regularly varying CCDF: M/(2 kappa_np) for a
    thermal pump, M/(4 kappa_np) for a superbunched pump. ``None`` for
    all other families (not tail-equivalent to any Pareto law)."""
    if not spec.is_fwm:
        return None
    if spec.pump_is_superbunched:
        return spec.modes / (4.0 * spec.kappa_np)
    return spec.modes / (2.0 * spec.kappa_np)


# -- detector-noise convolution ------------------------------------------------

@dataclass(frozen=True)
class TabulatedPdf:
    """Density tabulated on a uniform grid (carrier for noisy laws).

    ``grid`` holds cell centers with spacing h; ``density[i]`` is the
    probability mass in [grid[i]-h/2, grid[i]+h/2] divided by h.
    """
    grid: np.ndarray
    density: np.ndarray
    normalization_error: float

    def __post_init__(self):
        if np.any(self.density < 0):
            raise ValidationError("tabulated density must be >= 0")
        if np.any(np.diff(self.grid) <= 0):
            raise ValidationError("tabulated grid must be increasing")

    @property
    def spacing(self) -> float:
        return float(self.grid[1] - self.grid[0])

    def mean(self) -> float:
        return float(np.sum(self.grid * self.density) * self.spacing)

    def cdf(self, values) -> np.ndarray:
        """CDF interpolated at ``values`` (0 left of the grid, ~1 right)."""
        h = self.spacing
        edges = np.concatenate(([self.grid[0] - 0.5 * h],
                                self.grid + 0.5 * h))
        cum = np.concatenate(([0.0], np.cumsum(self.density) * h))
        return np.interp(np.asarray(values, dtype=float), edges, cum,
                         left=0.0, right=cum[-1])


def noise_grid(spec: DistributionSpec, sigma: float,
               tail_probability: float = 1e-6) -> np.ndarray:
    """Smallest uniform grid meeting the convolution preconditions:
    span [-6 sigma, quantile(1 - tail_probability)], spacing sigma/10."""
    sigma = float(sigma)
    if sigma <= 0:
        raise ValidationError("sigma must be > 0", field="sigma")
    hi = float(quantile(spec.noiseless(), 1.0 - tail_probability))
    h = sigma / 10.0
    count = int(np.ceil((hi + 6.0 * sigma) / h)) + 1
    if count > 50_000_000:
        raise ResolutionError(
            f"law needs {count} grid cells to tabulate (quantile "
            f"{hi:.3g}); its CDF is not evaluable on a noise-resolving "
            "grid", required_lo=-6.0 * sigma, required_hi=hi,
            required_spacing=h)
    return -6.0 * sigma + h * np.arange(count)


def convolve_with_noise(spec: DistributionSpec, sigma: float,
                        grid: np.ndarray) -> TabulatedPdf:
    """Density of light + independent zero-mean Gaussian detector noise.

    Light-side cell masses come from exact CCDF differences (this
    integrates the integrable singularities at 0 exactly), the Gaussian
    kernel from cell-integrated normal mass; the discrete convolution
    then preserves total probability and, the kernel being symmetric,
    the mean, up to quadrature error. The grid must be uniform, span at
    least [-6 sigma, quantile(1 - 1e-6)], and resolve the noise with
    spacing <= sigma/10.
    """
    sigma = float(sigma)
    if sigma <= 0:
        raise ValidationError("sigma must be > 0", field="sigma")
    base = spec.noiseless()
    if spec.noise_sigma not in (0.0, sigma):
        raise ValidationError(
            "spec carries a different noise_sigma than the requested "
            "convolution", field="noise_sigma")

    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 8:
        raise ValidationError("grid must be a 1-D array of >= 8 abscissae")
    steps = np.diff(grid)
    h = float(steps[0])
    required_hi = float(quantile(base, 1.0 - 1e-6))
    required = dict(required_lo=-6.0 * sigma, required_hi=required_hi,
                    required_spacing=sigma / 10.0)
    if np.any(steps <= 0) or np.ptp(steps) > 1e-9 * h:
        raise ResolutionError("grid must be uniformly spaced", **required)
    if h > sigma / 10.0 * (1 + 1e-12):
        raise ResolutionError(
            f"grid spacing {h:g} too coarse; need <= sigma/10 = "
            f"{sigma / 10:g}", **required)
    if grid[0] > -6.0 * sigma or grid[-1] < required_hi:
        raise ResolutionError(
            f"grid [{grid[0]:g}, {grid[-1]:g}] too narrow; need "
            f"[{-6 * sigma:g}, {required_hi:g}]", **required)

    # light mass per cell from exact survival differences
    edges = np.concatenate(([grid[0] - 0.5 * h], grid + 0.5 * h))
    surv = np.where(edges <= 0.0, 1.0, ccdf(base, np.maximum(edges, 0.0)))
    mass = surv[:-1] - surv[1:]

    # cell-integrated Gaussian kernel out to 6 sigma
    reach = int(np.ceil(6.0 * sigma / h))
    offsets = np.arange(-reach, reach + 1)
    kedges = (offsets[0] - 0.5 + np.arange(len(offsets) + 1)) * h / sigma
    kernel = np.diff(special.ndtr(kedges))
    kernel /= kernel.sum()

    density = np.convolve(mass, kernel, mode="same") / h
    norm_err = abs(1.0 - float(np.trapezoid(density, grid)))
    return TabulatedPdf(grid=grid, density=density,
                        normalization_error=norm_err)


# -- tail comparison -------------------------------------------------------------

@dataclass(frozen=True)
class TailComparison:
    """CCDF ratio of two laws on a log-spaced probe grid.

    ``classification`` summarizes the last decade: ``converging-to-1``
    (tail equivalent), ``diverging`` (first law heavier), or
    ``vanishing`` (first law lighter). A flat ratio away from 1 is
    classified by which side of 1 it sits on.
    """
    grid: np.ndarray
    ratio: np.ndarray
    classification: str


def compare_tails(spec_a: DistributionSpec, spec_b: DistributionSpec,
                  n_max: float, samples: int = 200) -> TailComparison:
    """Evaluate ccdf_a / ccdf_b on a log grid up to ``n_max`` and classify
    the trend. Ratios are formed in log space so deeply underflowing
    tails still compare cleanly."""
    n_max = float(n_max)
    if n_max <= 0 or not isinstance(samples, int) or samples < 16:
        raise ValidationError("need n_max > 0 and samples >= 16")
    lo = min(float(quantile(spec_a, 0.5)), float(quantile(spec_b, 0.5)))
    if lo >= n_max:
        raise ValidationError("n_max must exceed both medians")
    grid = np.geomspace(lo, n_max, samples)
    logr = log_ccdf(spec_a, grid) - log_ccdf(spec_b, grid)
    ratio = np.exp(logr)

    last = grid >= n_max / 10.0
    slope = np.polyfit(np.log(grid[last]), logr[last], 1)[0]
    level = logr[-1]
    if abs(slope) <= 0.02:
        if abs(level) <= 0.1:
            classification = "converging-to-1"
        else:
            classification = "diverging" if level > 0 else "vanishing"
    else:
        classification = "diverging" if slope > 0 else "vanishing"
    return TailComparison(grid=grid, ratio=ratio,
                          classification=classification)
