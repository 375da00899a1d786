"""Autoregressive texture model (Burg estimation, all-pole synthesis)."""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_toeplitz
from scipy.signal import lfilter

from ..signal_core import MagnitudeSpectrum
from .base import ArCode

AR_ORDER = 6


class UnstableModelError(ValueError):
    pass


def burg(frames, order: int) -> tuple[np.ndarray, float]:
    """Multi-segment Burg estimate.

    Reflection coefficients are computed from forward/backward prediction
    errors pooled over all frames. Returns the prediction polynomial
    ``a`` (a[0] == 1, so that sum_i a[i] x[t-i] = e[t]) and the final
    prediction-error power.
    """
    f = [np.array(x, dtype=float) for x in frames]
    b = [x.copy() for x in f]
    if any(x.size <= order for x in f):
        raise ValueError(f"every frame needs more than {order} samples")
    a = np.array([1.0])
    err = sum(np.dot(x, x) for x in f) / sum(x.size for x in f)
    for m in range(order):
        num = 0.0
        den = 0.0
        for fi, bi in zip(f, b):
            ef = fi[m + 1 :]
            eb = bi[m:-1]
            num += np.dot(ef, eb)
            den += np.dot(ef, ef) + np.dot(eb, eb)
        k = -2.0 * num / den if den > 0 else 0.0
        for fi, bi in zip(f, b):
            ef = fi[m + 1 :].copy()
            eb = bi[m:-1].copy()
            fi[m + 1 :] = ef + k * eb
            bi[m + 1 :] = eb + k * ef
        a_ext = np.r_[a, 0.0]
        a = a_ext + k * a_ext[::-1]
        err *= 1.0 - k * k
    return a, err


def _checked(coefs: np.ndarray, noise_gain: float) -> ArCode:
    code = ArCode(len(coefs), tuple(coefs), noise_gain)
    radii = code.pole_radii()
    if np.any(radii >= 1.0):
        raise UnstableModelError(f"unstable AR estimate, pole radii {np.round(radii, 6).tolist()}")
    return code


def encode_ar(frames, order: int = AR_ORDER) -> ArCode:
    """Fit an AR(order) model to time-domain frames.

    ``frames`` may be a single 1D signal or a sequence of frames. The noise
    gain is the standard deviation of the inverse-filtered residual.
    """
    if isinstance(frames, np.ndarray) and frames.ndim == 1:
        frames = [frames]
    frames = [np.asarray(x, dtype=float) for x in frames]
    if not frames:
        raise ValueError("no frames to fit")
    a, _ = burg(frames, order)
    residual = np.concatenate([lfilter(a, [1.0], x)[order:] for x in frames])
    return _checked(-a[1:], float(np.std(residual)))


def encode_ar_from_spectrum(spec: MagnitudeSpectrum, order: int = AR_ORDER) -> ArCode:
    """Autocorrelation-method AR fit when only an averaged spectrum is available.

    The power spectrum (amplitude^2 / 2 per bin, corrected for the Hann
    window's noise bandwidth) is inverse transformed to an autocorrelation
    and the Yule-Walker equations are solved.
    """
    n = spec.fft_len
    enbw = 1.5  # Hann equivalent noise bandwidth in bins
    power = spec.magnitudes**2 / 2.0 / enbw
    power[[0, -1]] *= 2.0
    r = np.fft.irfft(power, n) * n / 2.0
    r = r[: order + 1]
    if r[0] <= 0:
        raise ValueError("spectrum has no energy")
    coefs = solve_toeplitz(r[:-1], r[1:])
    err = r[0] - np.dot(coefs, r[1:])
    return _checked(coefs, float(np.sqrt(max(err, 0.0))))


def decode_ar(code: ArCode, n_samples: int, seed: int = 0, sample_rate_hz: float | None = None) -> np.ndarray:
    """Filter seeded unit-variance white noise through 1 / (1 - sum A(k) z^-k)."""
    if not code.is_stable():
        raise UnstableModelError(f"unstable AR code, pole radii {code.pole_radii().tolist()}")
    noise = np.random.default_rng(seed).standard_normal(n_samples)
    den = np.r_[1.0, -np.asarray(code.coefficients)]
    return lfilter([code.noise_gain], den, noise)


def ar_psd(coefficients, freqs_norm, noise_gain: float = 1.0) -> np.ndarray:
    """Analytic two-sided PSD g^2 / |1 - sum A(k) e^{-jwk}|^2 at w = 2 pi freqs_norm."""
    A = np.asarray(coefficients, dtype=float)
    w = 2 * np.pi * np.asarray(freqs_norm, dtype=float)
    k = np.arange(1, A.size + 1)
    denom = 1.0 - np.exp(-1j * np.outer(w, k)) @ A
    return noise_gain**2 / np.abs(denom) ** 2
