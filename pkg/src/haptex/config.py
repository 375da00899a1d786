"""Pipeline configuration and seed handling."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .codecs import CODEC_NAMES
from .render import DriveConfig
from .signal_core import TACTILE_BAND, WINDOW_LEN


@dataclass(frozen=True)
class PipelineConfig:
    band: tuple[float, float] = TACTILE_BAND
    window_len: int = WINDOW_LEN
    framing: str = "sweeps"
    codecs: tuple[str, ...] = CODEC_NAMES
    ar_order: int = 6
    mfcc_coeffs: int = 10
    n_mel_filters: int = 24
    jnd_ratio: float = 0.12
    max_peaks: int = 10
    response_rec: str | None = None
    response_ev: str | None = None
    drive: DriveConfig = field(default_factory=DriveConfig)
    n_samples: int = 200000
    seed: int = 0

    def __post_init__(self):
        lo, hi = self.band
        if not 0 <= lo < hi:
            raise ValueError(f"invalid band {self.band}")
        if self.window_len < 2 or self.window_len % 2:
            raise ValueError("window_len must be a positive even number")
        unknown = set(self.codecs) - set(CODEC_NAMES)
        if unknown:
            raise ValueError(f"unknown codecs: {sorted(unknown)}")
        if self.framing not in ("sweeps", "continuous"):
            raise ValueError(f"unknown framing {self.framing!r}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["band"] = list(self.band)
        d["codecs"] = list(self.codecs)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        kw = dict(data)
        if "band" in kw:
            kw["band"] = tuple(float(v) for v in kw["band"])
        if "codecs" in kw:
            kw["codecs"] = tuple(kw["codecs"])
        if "drive" in kw:
            kw["drive"] = DriveConfig(**kw["drive"])
        return cls(**kw)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "PipelineConfig":
        return cls.from_dict(json.loads(text))

    @classmethod
    def load(cls, path) -> "PipelineConfig":
        return cls.from_json(Path(path).read_text())


def derive_seed(seed: int, stage: str) -> int:
    """Stable 63-bit sub-seed for a named stage."""
    digest = hashlib.sha256(f"{stage}:{int(seed)}".encode()).digest()
    return int.from_bytes(digest[:8], "little") >> 1
