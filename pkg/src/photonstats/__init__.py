"""Photon-number statistics of strongly fluctuating pulsed light.

Analytic distribution families (thermal, superbunched, optical
harmonics, four-wave-mixing output, their multimode generalizations and
detector-noise convolutions), a deterministic chunked Monte Carlo pulse
sampler with the physical transform chain, and heavy-tail estimators
(empirical CCDF, hazard, Pareto tail fits, correlation functions,
spectral correlation matrices).
"""

__version__ = "0.1.0"

from .distributions import (TabulatedPdf, TailComparison, analytic_gm,
                            analytic_mean, analytic_tail_exponent, ccdf,
                            compare_tails, convolve_with_noise, hazard,
                            log_ccdf, noise_grid, pdf, quantile)
from .errors import (DataFormatError, MomentsUndefinedError,
                     NumericRangeError, OrderingError, PhotonStatsError,
                     ResolutionError, UnsupportedCombinationError,
                     ValidationError)
from .estimators import (EmpiricalCcdf, G2Matrix, GmEstimate, HazardCurve,
                         Histogram, HistogramSpec, KsResult, ModeEstimate,
                         TailFitReport, default_fit_window, empirical_ccdf,
                         empirical_gm, empirical_histogram,
                         estimate_mode_number, fit_tail_exponent,
                         fits_disagree, ghost_contrast, hazard_curve,
                         ks_distance, spectral_g2_matrix, subtracted_mean)
from .sampler import (DetectorModel, PulseTrain, SpectralEnsemble,
                      apply_detector, apply_loss, fwm_transform,
                      harmonic_transform, regenerate, sample,
                      synth_spectral_ensemble)
from .specs import (SPEC_VERSION, DistributionSpec, fwm_superbunched,
                    fwm_thermal, superbunched, superbunched_harmonic,
                    thermal, thermal_harmonic)
from .trainio import load_train, save_train

__all__ = [name for name in dir() if not name.startswith("_")]
