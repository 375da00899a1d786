"""Mel-cepstral texture code.

Encoding: unit-area triangular Mel filters over the tactile band, log of
the filter energies (floored), DCT-II, truncation. Decoding runs the chain
backwards and interpolates filter energies back onto the linear grid with
the peak-normalised filterbank transpose.
"""

from __future__ import annotations

import numpy as np
from scipy.fft import dct, idct

from ..signal_core import TACTILE_BAND, MagnitudeSpectrum
from ._synth import random_phase, synthesis_freqs
from .base import MfccCode

N_COEFFS = 10
N_MEL_FILTERS = 24
LOG_FLOOR = 1e-10


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=float) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=float) / 2595.0) - 1.0)


def mel_triangles(freqs, n_filters: int = N_MEL_FILTERS, band=TACTILE_BAND) -> np.ndarray:
    """Peak-1 triangular Mel filters evaluated at ``freqs``, shape (n_filters, n_freqs)."""
    edges = mel_to_hz(np.linspace(hz_to_mel(band[0]), hz_to_mel(band[1]), n_filters + 2))
    f = np.asarray(freqs, dtype=float)[None, :]
    lo, mid, hi = edges[:-2, None], edges[1:-1, None], edges[2:, None]
    rise = (f - lo) / (mid - lo)
    fall = (hi - f) / (hi - mid)
    return np.clip(np.minimum(rise, fall), 0.0, None)


def mel_filterbank(freqs, n_filters: int = N_MEL_FILTERS, band=TACTILE_BAND) -> np.ndarray:
    """Analysis filterbank: the triangles scaled to unit weight sum."""
    tri = mel_triangles(freqs, n_filters, band)
    area = tri.sum(axis=1, keepdims=True)
    if np.any(area == 0):
        raise ValueError(f"{n_filters} mel filters are too narrow for this frequency grid")
    return tri / area


def mel_energies(spec: MagnitudeSpectrum, n_filters: int = N_MEL_FILTERS, band=TACTILE_BAND) -> np.ndarray:
    return mel_filterbank(spec.freqs, n_filters, band) @ spec.magnitudes**2


def encode_mfcc(
    spec: MagnitudeSpectrum,
    n_coeffs: int = N_COEFFS,
    n_mel_filters: int = N_MEL_FILTERS,
    band=TACTILE_BAND,
) -> MfccCode:
    energies = mel_energies(spec, n_mel_filters, band)
    cepstrum = dct(np.log(np.maximum(energies, LOG_FLOOR)), type=2, norm="ortho")
    return MfccCode(tuple(cepstrum[:n_coeffs]), n_mel_filters, spec.fft_len)


def mfcc_envelope(code: MfccCode, freqs, band=TACTILE_BAND) -> np.ndarray:
    """Magnitude envelope implied by a code at ``freqs`` (zero outside the band)."""
    c = np.zeros(code.n_mel_filters)
    c[: len(code.coefficients)] = code.coefficients
    energies = np.exp(idct(c, type=2, norm="ortho"))
    tri = mel_triangles(freqs, code.n_mel_filters, band)
    weight = tri.sum(axis=0)
    power = np.zeros_like(weight)
    covered = weight > 0
    power[covered] = (tri.T @ energies)[covered] / weight[covered]
    f = np.asarray(freqs, dtype=float)
    # ends of the band lie outside the outermost triangle centres
    edges = mel_to_hz(np.linspace(hz_to_mel(band[0]), hz_to_mel(band[1]), code.n_mel_filters + 2))
    power[(f >= band[0]) & (f <= edges[1])] = energies[0]
    power[(f >= edges[-2]) & (f <= band[1])] = energies[-1]
    return np.sqrt(power)


def decode_mfcc(code: MfccCode, n_samples: int, seed: int = 0, sample_rate_hz: float = 20000.0, band=TACTILE_BAND) -> np.ndarray:
    """Random-phase signal with the code's reconstructed magnitude envelope."""
    freqs = synthesis_freqs(n_samples, sample_rate_hz)
    mags = mfcc_envelope(code, freqs, band)
    return random_phase(mags, n_samples, np.random.default_rng(seed))
