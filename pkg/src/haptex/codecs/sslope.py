"""Spectral-slope texture code: an asymmetric triangle in (dB, log f)."""

from __future__ import annotations

import numpy as np

from ..signal_core import TACTILE_BAND, MagnitudeSpectrum
from ._synth import band_mask, synthesis_freqs
from .base import SslopeCode

DB_PER_ORDER = 20.0


def _slope_db_per_decade(freqs, mags) -> float | None:
    ok = mags > 0
    if np.count_nonzero(ok) < 2:
        return None
    logf = np.log10(freqs[ok])
    if np.ptp(logf) == 0:
        return None
    slope, _ = np.polyfit(logf, 20 * np.log10(mags[ok]), 1)
    return float(slope)


def _order(slope: float | None) -> int:
    if slope is None:
        return 0
    return int(abs(np.round(slope / DB_PER_ORDER)))


def estimate_slopes(spec: MagnitudeSpectrum, band=TACTILE_BAND) -> SslopeCode:
    """Quantised rise/fall orders around the global in-band maximum.

    Each side is a least-squares line of dB magnitude against log10 f; the
    slope is rounded to the nearest 20 dB/decade. A side with fewer than
    two usable bins (peak at the band edge) gets order 0.
    """
    f = spec.freqs
    mask = band_mask(f, band)
    if not mask.any():
        raise ValueError("no bins inside the band")
    idx = np.flatnonzero(mask)
    k = idx[np.argmax(spec.magnitudes[idx])]
    m = spec.magnitudes
    rise = idx[idx <= k]
    fall = idx[idx >= k]
    r_a = _order(_slope_db_per_decade(f[rise], m[rise]))
    r_b = _order(_slope_db_per_decade(f[fall], m[fall]))
    return SslopeCode(float(f[k]), r_a, r_b)


def sslope_mask_db(code: SslopeCode, freqs, band=TACTILE_BAND) -> np.ndarray:
    """Mask gain in dB relative to the peak; -inf outside the band."""
    f = np.asarray(freqs, dtype=float)
    out = np.full(f.shape, -np.inf)
    inside = band_mask(f, band)
    decades = np.log10(f[inside] / code.peak_hz)
    out[inside] = np.where(
        decades <= 0,
        DB_PER_ORDER * code.r_a * decades,
        -DB_PER_ORDER * code.r_b * decades,
    )
    return out


def sslope_mask(code: SslopeCode, freqs, band=TACTILE_BAND) -> np.ndarray:
    return 10 ** (sslope_mask_db(code, freqs, band) / 20)


def decode_sslope(code: SslopeCode, n_samples: int, seed: int = 0, sample_rate_hz: float = 20000.0, band=TACTILE_BAND) -> np.ndarray:
    """Seeded white noise shaped by the triangular mask in the frequency domain."""
    noise = np.random.default_rng(seed).standard_normal(n_samples)
    freqs = synthesis_freqs(n_samples, sample_rate_hz)
    return np.fft.irfft(np.fft.rfft(noise) * sslope_mask(code, freqs, band), n_samples)
