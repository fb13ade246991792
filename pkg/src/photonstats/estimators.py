"""Everything computed from data: histograms, empirical CCDF and hazard,
correlation functions with bootstrap errors, Pareto tail fits, mode-number
inference, spectral correlation matrices, and goodness-of-fit.

Estimators are pure over immutable inputs; the only randomness (bootstrap
resampling) runs on a seeded private substream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import rng
from .distributions import ccdf as analytic_ccdf
from .distributions import convolve_with_noise, noise_grid
from .errors import ValidationError
from .sampler import DetectorModel, PulseTrain, SpectralEnsemble
from .specs import DistributionSpec

__all__ = [
    "HistogramSpec", "Histogram", "empirical_histogram", "EmpiricalCcdf",
    "empirical_ccdf", "GmEstimate", "empirical_gm", "TailFitReport",
    "fit_tail_exponent", "fits_disagree", "default_fit_window",
    "HazardCurve", "hazard_curve", "ModeEstimate", "estimate_mode_number",
    "G2Matrix", "spectral_g2_matrix", "KsResult", "ks_distance",
    "ghost_contrast", "subtracted_mean",
]


def _values_of(data) -> np.ndarray:
    if isinstance(data, PulseTrain):
        return data.values
    return np.asarray(data, dtype=float)


# -- histograms ------------------------------------------------------------------

@dataclass(frozen=True)
class HistogramSpec:
    """Binning request: ``linear`` with a fixed bin width or
    ``logarithmic`` with a fixed number of bins per decade, over
    [lo, hi)."""
    binning: str
    lo: float
    hi: float
    width: float | None = None
    bins_per_decade: int | None = None

    def __post_init__(self):
        if self.binning not in ("linear", "logarithmic"):
            raise ValidationError("binning must be linear or logarithmic",
                                  field="binning")
        if not self.hi > self.lo:
            raise ValidationError("histogram range needs hi > lo",
                                  field="range")
        if self.binning == "linear":
            if self.width is None or self.width <= 0:
                raise ValidationError("linear binning needs width > 0",
                                      field="width")
        else:
            if self.lo <= 0:
                raise ValidationError("logarithmic binning needs lo > 0",
                                      field="range")
            if not self.bins_per_decade or self.bins_per_decade < 1:
                raise ValidationError("logarithmic binning needs "
                                      "bins_per_decade >= 1",
                                      field="bins_per_decade")

    def edges(self) -> np.ndarray:
        if self.binning == "linear":
            count = int(math.ceil((self.hi - self.lo) / self.width))
            return self.lo + self.width * np.arange(count + 1)
        per = 1.0 / self.bins_per_decade
        count = int(math.ceil((math.log10(self.hi) - math.log10(self.lo))
                              / per))
        return 10.0 ** (math.log10(self.lo) + per * np.arange(count + 1))


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    densities: np.ndarray       # count / (pulse_count * bin_width)
    out_of_range: int
    pulse_count: int

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])


def empirical_histogram(train, spec: HistogramSpec) -> Histogram:
    """Bin the train; densities normalize by the full pulse count so the
    histogram integrates to the in-range probability. Out-of-range
    pulses are excluded and counted."""
    values = _values_of(train)
    edges = spec.edges()
    if values.size == 0 or values.min() >= edges[-1] \
            or values.max() < edges[0]:
        raise ValidationError("histogram range does not overlap the data",
                              field="range")
    counts, _ = np.histogram(values, bins=edges)
    widths = np.diff(edges)
    total = len(values)
    densities = counts / (total * widths)
    return Histogram(edges=edges, counts=counts, densities=densities,
                     out_of_range=total - int(counts.sum()),
                     pulse_count=total)


# -- empirical CCDF ----------------------------------------------------------------

@dataclass(frozen=True)
class EmpiricalCcdf:
    """Right-continuous survival step function.

    ``values`` are the sorted samples; ``survival[i]`` is the fraction of
    samples strictly greater than ``values[i]``.
    """
    values: np.ndarray
    survival: np.ndarray

    @property
    def pulse_count(self) -> int:
        return len(self.values)

    def at(self, points) -> np.ndarray:
        """Evaluate C(v) = #{x > v} / n at arbitrary points."""
        points = np.asarray(points, dtype=float)
        above = len(self.values) - np.searchsorted(self.values, points,
                                                   side="right")
        return above / len(self.values)

    def distinct_points(self) -> tuple[np.ndarray, np.ndarray]:
        """Distinct sample values with their survival fractions."""
        vals, idx = np.unique(self.values, return_index=True)
        # survival just after the last occurrence of each distinct value
        last = np.append(idx[1:], len(self.values)) - 1
        return vals, self.survival[last]


def empirical_ccdf(train) -> EmpiricalCcdf:
    values = np.sort(_values_of(train))
    if len(values) < 1:
        raise ValidationError("need at least one pulse")
    n = len(values)
    survival = (n - 1.0 - np.arange(n)) / n
    return EmpiricalCcdf(values=values, survival=survival)


# -- correlation functions -----------------------------------------------------------

@dataclass(frozen=True)
class GmEstimate:
    order: int
    value: float
    stderr: float | None
    resamples: int


def empirical_gm(train, order: int, *, resamples: int = 200,
                 seed: int = 0) -> GmEstimate:
    """Normalized correlation g^(m) = <N^m>/<N>^m with a bootstrap
    standard error.

    ``resamples`` = 0 skips the bootstrap (stderr None). With the
    bootstrap on, at least 100 pulses are required for a meaningful
    resampling distribution.
    """
    if not isinstance(order, int) or order < 1:
        raise ValidationError("correlation order must be an integer >= 1")
    values = _values_of(train)
    n = len(values)
    if n < 1:
        raise ValidationError("need at least one pulse")
    mean = values.mean()
    if mean <= 0:
        raise ValidationError(
            "train mean is not positive (detector noise dominates); "
            "estimate moments on the pre-detection train or use a "
            "noise-aware pipeline")
    powered = values ** order
    value = powered.mean() / mean ** order

    stderr = None
    if resamples:
        if resamples < 0:
            raise ValidationError("resamples must be >= 0")
        if n < 100:
            raise ValidationError("bootstrap stderr needs >= 100 pulses")
        gen = rng.chunk_generator(seed, 0, rng.LANE_BOOTSTRAP)
        boot = np.empty(resamples)
        for b in range(resamples):
            idx = gen.integers(0, n, n)
            m1 = values[idx].mean()
            boot[b] = powered[idx].mean() / m1 ** order
        stderr = float(boot.std(ddof=1))
    return GmEstimate(order=order, value=float(value), stderr=stderr,
                      resamples=resamples if stderr is not None else 0)


# -- tail fits ---------------------------------------------------------------------

@dataclass(frozen=True)
class TailFitReport:
    """Fitted Pareto tail exponent with its uncertainty and fit window.

    ``method`` is ``ccdf-regression`` (least squares on log survival vs
    log value) or ``hill`` (maximum-likelihood over exceedances of
    fit_lo; r_squared is None there).
    """
    k: float
    k_stderr: float
    fit_lo: float
    fit_hi: float
    points_used: int
    r_squared: float | None
    method: str

    def __post_init__(self):
        if not self.k > 0:
            raise ValidationError("fitted tail exponent must be > 0; the "
                                  "window shows no decaying tail")
        if not self.fit_lo < self.fit_hi:
            raise ValidationError("fit window needs fit_lo < fit_hi")
        if self.points_used < 8:
            raise ValidationError("tail fit needs >= 8 points in window")


def fit_tail_exponent(ecdf: EmpiricalCcdf, fit_lo: float, fit_hi: float,
                      method: str = "ccdf-regression") -> TailFitReport:
    """Fit the Pareto index k of the survival tail inside
    [fit_lo, fit_hi].

    The window is the caller's duty: it should exclude the detector
    noise floor and the saturation pile-up (see
    :func:`default_fit_window`). The regression slope is exactly
    invariant under a common rescaling of samples and window, so
    attenuation does not move it.
    """
    fit_lo, fit_hi = float(fit_lo), float(fit_hi)
    if not (fit_lo > 0 and fit_lo < fit_hi):
        raise ValidationError("need 0 < fit_lo < fit_hi")

    if method == "ccdf-regression":
        vals, surv = ecdf.distinct_points()
        mask = (vals >= fit_lo) & (vals <= fit_hi) & (surv > 0)
        count = int(mask.sum())
        if count < 8:
            raise ValidationError(
                f"only {count} distinct points with positive survival in "
                f"[{fit_lo:g}, {fit_hi:g}]; need >= 8")
        x = np.log(vals[mask])
        y = np.log(surv[mask])
        design = np.column_stack([x, np.ones_like(x)])
        (slope, intercept), res, *_ = np.linalg.lstsq(design, y, rcond=None)
        fitted = design @ (slope, intercept)
        ss_res = float(np.sum((y - fitted) ** 2))
        ss_tot = float(np.sum((y - y.mean()) ** 2))
        dof = count - 2
        sxx = float(np.sum((x - x.mean()) ** 2))
        stderr = math.sqrt(ss_res / dof / sxx) if dof > 0 else math.inf
        r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
        return TailFitReport(k=-float(slope), k_stderr=stderr,
                             fit_lo=fit_lo, fit_hi=fit_hi,
                             points_used=count, r_squared=r_squared,
                             method=method)

    if method == "hill":
        tail = ecdf.values[ecdf.values >= fit_lo]
        count = len(tail)
        if count < 8:
            raise ValidationError(
                f"only {count} exceedances of {fit_lo:g}; need >= 8")
        logs = np.log(tail / fit_lo)
        mean_log = logs.mean()
        if mean_log <= 0:
            raise ValidationError("degenerate tail (all values at fit_lo)")
        k = 1.0 / mean_log
        return TailFitReport(k=float(k), k_stderr=float(k / math.sqrt(count)),
                             fit_lo=fit_lo, fit_hi=fit_hi,
                             points_used=count, r_squared=None,
                             method=method)

    raise ValidationError(f"unknown tail-fit method {method!r}",
                          field="method")


def fits_disagree(a: TailFitReport, b: TailFitReport) -> bool:
    """Non-Pareto diagnostic: True when two estimates differ by more than
    3 joint standard errors."""
    joint = math.hypot(a.k_stderr, b.k_stderr)
    return abs(a.k - b.k) > 3.0 * joint


def default_fit_window(train, detector: DetectorModel | None = None
                       ) -> tuple[float, float]:
    """Default tail-fit window.

    With a known detector: [1.5 x train mean, 0.8 x saturation], clear of
    the noise floor and the saturation pile-up. Otherwise the central two
    decades of the positive support.
    """
    values = _values_of(train)
    positive = values[values > 0]
    if len(positive) == 0:
        raise ValidationError("train has no positive values")
    if detector is not None and detector.saturation is not None:
        return 1.5 * float(values.mean()), 0.8 * detector.saturation
    lo, hi = math.log10(positive.min()), math.log10(positive.max())
    center = 0.5 * (lo + hi)
    return 10.0 ** (center - 1.0), 10.0 ** (center + 1.0)


# -- hazard ------------------------------------------------------------------------

@dataclass(frozen=True)
class HazardCurve:
    n: np.ndarray
    hazard_over_n: np.ndarray


def hazard_curve(train, *, points: int = 200) -> HazardCurve:
    """Empirical H(N)/N with H = -log of the empirical survival, on a
    log-spaced grid over the positive support. Points whose survival
    rests on fewer than 10 pulses are statistically void and dropped."""
    values = _values_of(train)
    if len(values) < 1000:
        raise ValidationError("hazard curve needs >= 1000 pulses")
    positive = np.sort(values[values > 0])
    if len(positive) < 1000:
        raise ValidationError("hazard curve needs >= 1000 positive values")
    ecdf = empirical_ccdf(values)
    lo = positive[max(1, len(positive) // 1000) - 1]
    grid = np.geomspace(lo, positive[-1], points)
    survival = ecdf.at(grid)
    keep = survival >= 10.0 / len(values)
    grid = grid[keep]
    hazard = -np.log(survival[keep])
    return HazardCurve(n=grid, hazard_over_n=hazard / grid)


# -- mode number -------------------------------------------------------------------

@dataclass(frozen=True)
class ModeEstimate:
    m_real: float
    m_int: int


def estimate_mode_number(g_measured: float, g_single: float) -> ModeEstimate:
    """Invert the mode-dilution rule g_M = 1 + (g_1 - 1)/M for the mode
    count M."""
    g_measured, g_single = float(g_measured), float(g_single)
    if g_measured <= 1.0:
        raise ValidationError(
            "measured g2 <= 1: input is coherent-like, mode counting "
            "needs incoherent (bunched) light")
    if g_single < g_measured:
        raise ValidationError("single-mode g2 must be >= measured g2")
    m_real = (g_single - 1.0) / (g_measured - 1.0)
    return ModeEstimate(m_real=m_real, m_int=int(round(m_real)))


# -- spectral correlations -----------------------------------------------------------

@dataclass(frozen=True)
class G2Matrix:
    """Pairwise spectral correlation g2(l, l') with explicit masking of
    zero-mean bins (``masked`` marks entries with no defined value)."""
    wavelengths: np.ndarray
    values: np.ndarray
    masked: np.ndarray


def spectral_g2_matrix(ensemble: SpectralEnsemble) -> G2Matrix:
    """g2(l, l') = <S(l) S(l')> / (<S(l)> <S(l')>) averaged over pulses.

    Symmetric by construction; bins with zero mean are masked rather
    than propagated as NaN.
    """
    spectra = ensemble.spectra
    pulses = spectra.shape[0]
    if pulses < 2:
        raise ValidationError("correlation estimation needs >= 2 pulses")
    means = spectra.mean(axis=0)
    dead = means <= 0.0
    cross = (spectra.T @ spectra) / pulses
    with np.errstate(divide="ignore", invalid="ignore"):
        values = cross / np.outer(means, means)
    masked = np.logical_or.outer(dead, dead)
    values = np.where(masked, np.nan, values)
    return G2Matrix(wavelengths=ensemble.wavelengths, values=values,
                    masked=masked)


# -- goodness of fit ---------------------------------------------------------------

@dataclass(frozen=True)
class KsResult:
    statistic: float
    p_bound: float
    pulse_count: int


def ks_distance(train, spec: DistributionSpec, *,
                tabulated=None) -> KsResult:
    """Kolmogorov-Smirnov distance between the empirical CDF and the
    spec's analytic CDF.

    Noise-free specs are evaluated in closed form; noisy specs against
    the convolved :class:`TabulatedPdf` (built on the default grid when
    not supplied). ``p_bound`` is the asymptotic Kolmogorov tail
    probability of the observed statistic under the null.
    """
    values = np.sort(_values_of(train))
    n = len(values)
    if n < 1:
        raise ValidationError("need at least one pulse")
    if spec.noise_sigma > 0.0:
        if tabulated is None:
            grid = noise_grid(spec, spec.noise_sigma)
            tabulated = convolve_with_noise(spec, spec.noise_sigma, grid)
        cdf = tabulated.cdf(values)
    else:
        cdf = np.zeros_like(values)
        nonneg = values >= 0.0
        cdf[nonneg] = 1.0 - analytic_ccdf(spec, values[nonneg])
    upper = np.arange(1, n + 1) / n - cdf
    lower = cdf - np.arange(0, n) / n
    statistic = float(max(upper.max(), lower.max()))
    p_bound = float(special.kolmogorov(math.sqrt(n) * statistic))
    return KsResult(statistic=statistic, p_bound=p_bound, pulse_count=n)


# -- application formulas ------------------------------------------------------------

def ghost_contrast(g2: float, a: float, big_a: float) -> float:
    """Ghost-image contrast R = 1 + (g2 - 1) a / A for an object of area
    a inside a field of area A."""
    g2, a, big_a = float(g2), float(a), float(big_a)
    if g2 < 1.0:
        raise ValidationError("g2 must be >= 1")
    if not (0 < a <= big_a):
        raise ValidationError("need 0 < a <= A")
    return 1.0 + (g2 - 1.0) * a / big_a


def subtracted_mean(g2: float, mean: float) -> float:
    """Mean photon number after single-photon subtraction: g2 * mean."""
    g2, mean = float(g2), float(mean)
    if g2 < 1.0:
        raise ValidationError("g2 must be >= 1")
    if mean <= 0:
        raise ValidationError("mean must be > 0")
    return g2 * mean
