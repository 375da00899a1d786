"""Electrovibration drive preparation.

decode -> compensate_ev -> normalize -> (resample) -> modulate, where the
modulation is V(t) = V_g * sqrt(y(t) - min y) * cos(2 pi f_c t).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np
from scipy.signal import resample_poly

from .codecs import TextureCode, decode
from .signal_core import TACTILE_BAND, FrequencyResponse

MAX_VOLTAGE = 150.0


class OverVoltageError(ValueError):
    pass


@dataclass(frozen=True)
class DriveConfig:
    carrier_hz: float = 7000.0
    gain_v: float = 100.0
    output_rate_hz: float = 20000.0

    def __post_init__(self):
        if self.carrier_hz <= 0:
            raise ValueError("carrier_hz must be positive")
        if self.gain_v < 0:
            raise ValueError("gain_v must be non-negative")
        if self.output_rate_hz < 2.4 * self.carrier_hz:
            raise ValueError(
                f"output rate {self.output_rate_hz} Hz is below 2.4 x carrier ({2.4 * self.carrier_hz} Hz)"
            )

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class DriveSignal:
    samples: np.ndarray
    rate_hz: float

    @property
    def peak_v(self) -> float:
        return float(np.max(np.abs(self.samples))) if self.samples.size else 0.0

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.samples.size) / self.rate_hz


def compensate_ev(signal, response: FrequencyResponse, sample_rate_hz: float = 20000.0, band=TACTILE_BAND) -> np.ndarray:
    """Divide the in-band spectrum by the display response and transform back.

    Bins outside ``band`` pass through untouched.
    """
    y = np.asarray(signal, dtype=float)
    n = y.size
    Y = np.fft.rfft(y)
    f = np.fft.rfftfreq(n, 1.0 / sample_rate_hz)
    inside = (f >= band[0]) & (f <= band[1])
    Y[inside] /= response.gain_at(f[inside], band)
    return np.fft.irfft(Y, n)


def normalize(signal) -> np.ndarray:
    """Shift and scale to span exactly [0, 1]; a constant signal maps to zeros."""
    y = np.asarray(signal, dtype=float)
    span = np.ptp(y) if y.size else 0.0
    if span == 0:
        return np.zeros_like(y)
    return (y - y.min()) / span


def resample(signal, rate_in: float, rate_out: float) -> np.ndarray:
    if rate_in == rate_out:
        return np.asarray(signal, dtype=float)
    ratio = Fraction(rate_out / rate_in).limit_denominator(1000)
    return resample_poly(signal, ratio.numerator, ratio.denominator)


def modulate(y, cfg: DriveConfig, allow_clip: bool = False, max_voltage: float = MAX_VOLTAGE) -> DriveSignal:
    """Amplitude-modulate the carrier with sqrt(y - min y), scaled by V_g.

    ``y`` must already be at ``cfg.output_rate_hz``. Drives whose peak
    exceeds ``max_voltage`` raise OverVoltageError unless ``allow_clip``,
    in which case they are clipped.
    """
    y = np.asarray(y, dtype=float)
    if y.size == 0:
        return DriveSignal(y.copy(), cfg.output_rate_hz)
    radicand = np.maximum(y - y.min(), 0.0)
    t = np.arange(y.size) / cfg.output_rate_hz
    v = cfg.gain_v * np.sqrt(radicand) * np.cos(2 * np.pi * cfg.carrier_hz * t)
    peak = float(np.max(np.abs(v)))
    if peak > max_voltage:
        if not allow_clip:
            raise OverVoltageError(f"peak drive {peak:.1f} V exceeds the {max_voltage:g} V limit")
        v = np.clip(v, -max_voltage, max_voltage)
    return DriveSignal(v, cfg.output_rate_hz)


def prepare_drive(
    code: TextureCode,
    response: FrequencyResponse | None,
    cfg: DriveConfig,
    n_samples: int,
    seed: int = 0,
    allow_clip: bool = False,
    band=TACTILE_BAND,
) -> DriveSignal:
    """Decode a code and turn it into a drive waveform.

    After normalisation the envelope radicand spans [0, 1], so the drive
    peak equals V_g.
    """
    y = decode(code, n_samples, seed, band)
    if response is not None:
        y = compensate_ev(y, response, code.sample_rate_hz, band)
    y = normalize(resample(y, code.sample_rate_hz, cfg.output_rate_hz))
    return modulate(y, cfg, allow_clip=allow_clip)
