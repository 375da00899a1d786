"""The five texture codecs and a name-based dispatch for them."""

from __future__ import annotations

import numpy as np

from ..signal_core import TACTILE_BAND, MagnitudeSpectrum, band_limit
from .ar import AR_ORDER, UnstableModelError, decode_ar, encode_ar, encode_ar_from_spectrum
from .base import (
    CODEC_NAMES,
    ArCode,
    MfccCode,
    SbetaCode,
    SpeakCode,
    SslopeCode,
    TextureCode,
    count_parameters,
)
from .mfcc import decode_mfcc, encode_mfcc
from .sbeta import FitError, decode_sbeta, fit_beta
from .speak import decode_speak, find_peaks_jnd
from .sslope import decode_sslope, estimate_slopes

__all__ = [
    "CODEC_NAMES", "ArCode", "MfccCode", "SbetaCode", "SpeakCode", "SslopeCode", "TextureCode",
    "count_parameters", "encode", "decode", "encode_ar", "encode_ar_from_spectrum", "decode_ar",
    "encode_mfcc", "decode_mfcc", "find_peaks_jnd", "decode_speak", "fit_beta", "decode_sbeta",
    "estimate_slopes", "decode_sslope", "FitError", "UnstableModelError",
]


def encode(
    codec: str,
    spectrum: MagnitudeSpectrum,
    frames=None,
    band=TACTILE_BAND,
    ar_order: int = AR_ORDER,
    mfcc_coeffs: int = 10,
    n_mel_filters: int = 24,
    jnd_ratio: float = 0.12,
    max_peaks: int = 10,
) -> TextureCode:
    """Encode with the named codec.

    AR uses the time-domain ``frames`` when given and falls back to the
    spectrum's autocorrelation otherwise.
    """
    if codec == "ar":
        params = encode_ar(frames, ar_order) if frames is not None else encode_ar_from_spectrum(spectrum, ar_order)
    elif codec == "mfcc":
        params = encode_mfcc(spectrum, mfcc_coeffs, n_mel_filters, band)
    elif codec == "speak":
        params = find_peaks_jnd(spectrum, jnd_ratio, max_peaks)
    elif codec == "sbeta":
        params = fit_beta(spectrum, band, jnd_ratio=jnd_ratio, max_peaks=max_peaks)
    elif codec == "sslope":
        params = estimate_slopes(spectrum, band)
    else:
        raise ValueError(f"unknown codec {codec!r}; choose from {', '.join(CODEC_NAMES)}")
    return TextureCode(params, spectrum.sample_rate_hz)


def decode(code: TextureCode, n_samples: int, seed: int = 0, band=TACTILE_BAND) -> np.ndarray:
    """Synthesize ``n_samples`` of texture signal at the code's sample rate.

    Every codec's output is confined to ``band``; for AR this means the raw
    all-pole output of ``decode_ar`` is band-limited here.
    """
    p, fs = code.params, code.sample_rate_hz
    if isinstance(p, ArCode):
        return band_limit(decode_ar(p, n_samples, seed), fs, band)
    if isinstance(p, MfccCode):
        return decode_mfcc(p, n_samples, seed, fs, band)
    if isinstance(p, SpeakCode):
        return decode_speak(p, n_samples, fs)
    if isinstance(p, SbetaCode):
        return decode_sbeta(p, n_samples, seed, fs, band)
    if isinstance(p, SslopeCode):
        return decode_sslope(p, n_samples, seed, fs, band)
    raise TypeError(f"unsupported payload {type(p).__name__}")
