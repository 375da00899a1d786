"""Spectral-beta texture code.

The spectral envelope is modelled as a beta density on the log-frequency
axis of the tactile band rescaled to [0, 1]. Ten JND-separated peaks are
the fitting points; the fit carries a free amplitude that is thrown away
afterwards, since output level is set at render time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import betaln

from ..signal_core import TACTILE_BAND, MagnitudeSpectrum
from ._synth import band_mask, random_phase, synthesis_freqs
from .base import SbetaCode
from .speak import find_peaks_jnd

_EDGE = 1e-3


class FitError(RuntimeError):
    pass


def to_unit_log(freqs, band=TACTILE_BAND) -> np.ndarray:
    lo, hi = np.log10(band[0]), np.log10(band[1])
    return (np.log10(np.asarray(freqs, dtype=float)) - lo) / (hi - lo)


def from_unit_log(x, band=TACTILE_BAND) -> np.ndarray:
    lo, hi = np.log10(band[0]), np.log10(band[1])
    return 10 ** (lo + np.asarray(x, dtype=float) * (hi - lo))


def beta_pdf(x, alpha: float, beta: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return np.exp((alpha - 1) * np.log(x) + (beta - 1) * np.log1p(-x) - betaln(alpha, beta))


def moment_guess(x, y) -> tuple[float, float]:
    """Method-of-moments (alpha, beta) treating magnitudes as weights."""
    w = np.asarray(y, dtype=float)
    w = w / w.sum()
    mean = np.dot(w, x)
    var = np.dot(w, (x - mean) ** 2)
    common = mean * (1 - mean) / var - 1 if var > 0 else -1
    if common <= 0:
        return 1.0, 1.0
    return float(mean * common), float((1 - mean) * common)


@dataclass
class BetaFit:
    alpha: float
    beta: float
    scale: float
    residual: float
    initial_residual: float
    n_iter: int


def _sse(params, x, y):
    la, lb, ls = params
    model = np.exp(ls) * beta_pdf(x, np.exp(la), np.exp(lb))
    r = model - y
    out = float(np.dot(r, r))
    return out if np.isfinite(out) else np.inf


def fit_beta_points(x, y, max_iter: int = 20000, tol: float = 1e-12) -> BetaFit:
    """Nelder-Mead least-squares fit of ``scale * beta_pdf(x)`` to points.

    Parameters are searched in log space so the simplex cannot leave the
    positive quadrant.
    """
    x = np.clip(np.asarray(x, dtype=float), _EDGE, 1 - _EDGE)
    y = np.asarray(y, dtype=float)
    if x.size < 2 or np.unique(x).size < 2:
        raise ValueError("need at least two distinct fitting points")
    a0, b0 = moment_guess(x, y)
    g = beta_pdf(x, a0, b0)
    s0 = np.dot(g, y) / np.dot(g, g)
    start = np.log([a0, b0, s0])
    initial = _sse(start, x, y)
    res = minimize(
        _sse,
        start,
        args=(x, y),
        method="Nelder-Mead",
        options={"xatol": tol, "fatol": tol * max(np.dot(y, y), 1e-300), "maxiter": max_iter, "maxfev": 2 * max_iter},
    )
    if not res.success:
        raise FitError(f"simplex did not converge after {res.nit} iterations, best residual {res.fun:.6g}")
    a, b, s = np.exp(res.x)
    return BetaFit(float(a), float(b), float(s), float(res.fun), initial, int(res.nit))


def fit_beta(spec: MagnitudeSpectrum, band=TACTILE_BAND, **peak_kw) -> SbetaCode:
    """Encode a spectrum as (alpha, beta) from its JND-separated peaks."""
    peaks = find_peaks_jnd(spec, **peak_kw)
    if len(peaks.peaks) < 2:
        raise ValueError(f"need at least two spectral peaks, found {len(peaks.peaks)}")
    fit = fit_beta_points(to_unit_log(peaks.frequencies, band), peaks.amplitudes)
    return SbetaCode(fit.alpha, fit.beta)


def sbeta_envelope(code: SbetaCode, freqs, band=TACTILE_BAND) -> np.ndarray:
    """Unit-peak magnitude envelope at ``freqs``; zero outside the band.

    Log positions are kept half a grid step away from the band edges so
    that densities with alpha or beta < 1 stay finite.
    """
    f = np.asarray(freqs, dtype=float)
    inside = band_mask(f, band)
    env = np.zeros_like(f)
    if not inside.any():
        return env
    x = to_unit_log(f[inside], band)
    if x.size > 1:
        x = np.clip(x, (x[1] - x[0]) / 2, 1 - (x[-1] - x[-2]) / 2)
    else:
        x = np.clip(x, _EDGE, 1 - _EDGE)
    vals = beta_pdf(x, code.alpha, code.beta)
    env[inside] = vals / vals.max()
    return env


def decode_sbeta(code: SbetaCode, n_samples: int, seed: int = 0, sample_rate_hz: float = 20000.0, band=TACTILE_BAND) -> np.ndarray:
    freqs = synthesis_freqs(n_samples, sample_rate_hz)
    return random_phase(sbeta_envelope(code, freqs, band), n_samples, np.random.default_rng(seed))
