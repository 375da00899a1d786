"""Texture code value types and their JSON form.

A serialized code looks like::

    {"codec": "sbeta", "sample_rate_hz": 20000.0, "params": {"alpha": 2.1, "beta": 4.7}}

with ``params`` keys equal to the dataclass field names.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields

import numpy as np


def _floats(values) -> tuple[float, ...]:
    return tuple(float(v) for v in values)


@dataclass(frozen=True)
class ArCode:
    """All-pole model y[t] = sum_i A(i) y[t-i] + noise_gain * e[t]."""

    order: int
    coefficients: tuple[float, ...]
    noise_gain: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "coefficients", _floats(self.coefficients))
        object.__setattr__(self, "noise_gain", float(self.noise_gain))
        if self.order < 1 or len(self.coefficients) != self.order:
            raise ValueError(f"order {self.order} does not match {len(self.coefficients)} coefficients")

    def pole_radii(self) -> np.ndarray:
        return np.abs(np.roots(np.r_[1.0, -np.asarray(self.coefficients)]))

    def is_stable(self) -> bool:
        return bool(np.all(self.pole_radii() < 1.0))

    def n_values(self) -> int:
        return self.order + 1


@dataclass(frozen=True)
class MfccCode:
    coefficients: tuple[float, ...]
    n_mel_filters: int = 24
    fft_len: int = 4000

    def __post_init__(self):
        object.__setattr__(self, "coefficients", _floats(self.coefficients))
        if len(self.coefficients) > self.n_mel_filters:
            raise ValueError("more cepstral coefficients than mel filters")

    def n_values(self) -> int:
        return len(self.coefficients)


@dataclass(frozen=True)
class SpeakCode:
    peaks: tuple[tuple[float, float], ...]

    def __post_init__(self):
        peaks = tuple((float(f), float(a)) for f, a in self.peaks)
        if any(f2 <= f1 for (f1, _), (f2, _) in zip(peaks, peaks[1:])):
            raise ValueError("peak frequencies must be strictly ascending")
        object.__setattr__(self, "peaks", peaks)

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([f for f, _ in self.peaks])

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([a for _, a in self.peaks])

    def n_values(self) -> int:
        return 2 * len(self.peaks)


@dataclass(frozen=True)
class SbetaCode:
    alpha: float
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "beta", float(self.beta))
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError("alpha and beta must be positive")

    def n_values(self) -> int:
        return 2


@dataclass(frozen=True)
class SslopeCode:
    """Peak frequency plus rise/fall orders; one order is 20 dB/decade."""

    peak_hz: float
    r_a: int
    r_b: int

    def __post_init__(self):
        object.__setattr__(self, "peak_hz", float(self.peak_hz))
        if int(self.r_a) != self.r_a or int(self.r_b) != self.r_b or self.r_a < 0 or self.r_b < 0:
            raise ValueError("filter orders must be non-negative integers")
        object.__setattr__(self, "r_a", int(self.r_a))
        object.__setattr__(self, "r_b", int(self.r_b))

    def n_values(self) -> int:
        return 3


CODEC_TYPES = {
    "ar": ArCode,
    "mfcc": MfccCode,
    "speak": SpeakCode,
    "sbeta": SbetaCode,
    "sslope": SslopeCode,
}
CODEC_NAMES = tuple(CODEC_TYPES)


@dataclass(frozen=True)
class TextureCode:
    """A codec payload tagged with its kind and the synthesis sample rate."""

    params: ArCode | MfccCode | SpeakCode | SbetaCode | SslopeCode
    sample_rate_hz: float = 20000.0

    @property
    def codec(self) -> str:
        for name, cls in CODEC_TYPES.items():
            if isinstance(self.params, cls):
                return name
        raise TypeError(f"unknown payload type {type(self.params).__name__}")

    def n_values(self) -> int:
        return self.params.n_values()

    def to_dict(self) -> dict:
        params = asdict(self.params)
        for k, v in params.items():
            if isinstance(v, tuple):
                params[k] = [list(p) if isinstance(p, tuple) else p for p in v]
        return {"codec": self.codec, "sample_rate_hz": float(self.sample_rate_hz), "params": params}

    @classmethod
    def from_dict(cls, data: dict) -> "TextureCode":
        try:
            kind = data["codec"]
            payload_cls = CODEC_TYPES[kind]
        except KeyError as exc:
            raise ValueError(f"unknown or missing codec tag: {exc}") from None
        params = dict(data.get("params", {}))
        expected = {f.name for f in fields(payload_cls)}
        if set(params) != expected:
            raise ValueError(f"{kind} params must be exactly {sorted(expected)}, got {sorted(params)}")
        return cls(payload_cls(**params), float(data["sample_rate_hz"]))

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_json(cls, text: str) -> "TextureCode":
        return cls.from_dict(json.loads(text))


def count_parameters(serialized: dict) -> int:
    """Number of texture-dependent scalars in a serialized code.

    Structural fields (AR order, MFCC filter count and FFT length) are
    decoding configuration and are not counted.
    """
    kind = serialized["codec"]
    p = serialized["params"]
    if kind == "ar":
        return len(p["coefficients"]) + 1
    if kind == "mfcc":
        return len(p["coefficients"])
    if kind == "speak":
        return 2 * len(p["peaks"])
    if kind == "sbeta":
        return 2
    if kind == "sslope":
        return 3
    raise ValueError(f"unknown codec {kind!r}")
