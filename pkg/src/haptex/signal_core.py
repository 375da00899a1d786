"""Friction-recording preprocessing.

Turns multi-axis force recordings into a band-limited, response-compensated
average magnitude spectrum:

    combine_lateral -> detect_sweeps -> extract_frame -> average_spectra
        -> bandpass -> compensate

Magnitudes are amplitude-calibrated: a cosine of amplitude A that falls on a
bin centre reads A at that bin after Hann windowing.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

SAMPLE_RATE_HZ = 20000.0
WINDOW_LEN = 4000
TACTILE_BAND = (20.0, 1000.0)
MIN_SWEEP_FRACTION = 0.1


def hann_window(n: int) -> np.ndarray:
    """Periodic Hann taper: 50%-overlapped copies sum to a constant and
    on-bin tones leak nothing into bins two or more away."""
    return 0.5 - 0.5 * np.cos(2 * np.pi * np.arange(n) / n)


class ShortRecordingError(ValueError):
    pass


class FrameOverrunWarning(UserWarning):
    """A sweep was too close to the recording edge to fit a full window."""


@dataclass(frozen=True)
class RecordingMeta:
    normal_force_n: float = 0.4
    scan_speed_mm_s: float = 80.0
    texture_name: str = ""
    contact_angle_deg: float = 60.0

    def __post_init__(self):
        if self.normal_force_n <= 0:
            raise ValueError("normal_force_n must be positive")
        if self.scan_speed_mm_s <= 0:
            raise ValueError("scan_speed_mm_s must be positive")


@dataclass(frozen=True)
class FrictionRecording:
    """Per-axis force samples (N) with acquisition metadata.

    ``channels`` has shape (n_axes, n_samples), axes ordered x, y[, z].
    """

    sample_rate_hz: float
    channels: np.ndarray
    meta: RecordingMeta = field(default_factory=RecordingMeta)

    def __post_init__(self):
        ch = np.atleast_2d(np.asarray(self.channels, dtype=float))
        object.__setattr__(self, "channels", ch)
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")
        if ch.shape[0] not in (1, 2, 3):
            raise ValueError(f"expected 1 to 3 force channels, got {ch.shape[0]}")
        min_len = int(np.ceil(WINDOW_LEN * self.sample_rate_hz / SAMPLE_RATE_HZ))
        if ch.shape[1] < min_len:
            raise ShortRecordingError(f"recording has {ch.shape[1]} samples, fewer than one {min_len}-sample window")

    @property
    def n_samples(self) -> int:
        return self.channels.shape[1]

    def friction(self) -> np.ndarray:
        """The 1D lateral friction signal."""
        if self.channels.shape[0] == 1:
            return self.channels[0].copy()
        return combine_lateral(self.channels[0], self.channels[1])


@dataclass(frozen=True)
class SweepSegment:
    start_index: int
    end_index: int  # exclusive

    def __post_init__(self):
        if self.end_index - self.start_index < 1:
            raise ValueError("segment must span at least one sample")

    @property
    def center_index(self) -> int:
        return (self.start_index + self.end_index) // 2

    def __len__(self):
        return self.end_index - self.start_index


@dataclass(frozen=True)
class MagnitudeSpectrum:
    """One-sided amplitude spectrum on a uniform grid starting at 0 Hz."""

    bin_hz: float
    magnitudes: np.ndarray
    band: tuple[float, float] = (0.0, np.inf)

    def __post_init__(self):
        mags = np.asarray(self.magnitudes, dtype=float)
        if mags.ndim != 1:
            raise ValueError("magnitudes must be one-dimensional")
        if np.any(mags < 0):
            raise ValueError("magnitudes must be non-negative")
        if self.bin_hz <= 0:
            raise ValueError("bin_hz must be positive")
        object.__setattr__(self, "magnitudes", mags)
        lo, hi = self.band
        object.__setattr__(self, "band", (float(lo), float(min(hi, self.nyquist_hz))))

    @property
    def freqs(self) -> np.ndarray:
        return np.arange(self.magnitudes.size) * self.bin_hz

    @property
    def nyquist_hz(self) -> float:
        return (self.magnitudes.size - 1) * self.bin_hz

    @property
    def fft_len(self) -> int:
        # even-length transforms only
        return 2 * (self.magnitudes.size - 1)

    @property
    def sample_rate_hz(self) -> float:
        return self.bin_hz * self.fft_len

    def in_band(self) -> np.ndarray:
        """Boolean mask of bins inside the active band."""
        f = self.freqs
        return (f >= self.band[0]) & (f <= self.band[1])

    def same_grid(self, other: "MagnitudeSpectrum") -> bool:
        return self.magnitudes.size == other.magnitudes.size and np.isclose(
            self.bin_hz, other.bin_hz, rtol=0, atol=1e-9
        )


@dataclass(frozen=True)
class FrequencyResponse:
    """Linear magnitude response sampled on an ascending frequency grid."""

    freqs_hz: np.ndarray
    gains: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.freqs_hz, dtype=float)
        g = np.asarray(self.gains, dtype=float)
        if f.shape != g.shape or f.ndim != 1 or f.size < 2:
            raise ValueError("response needs matching 1D freq and gain arrays (>= 2 points)")
        if np.any(np.diff(f) <= 0):
            raise ValueError("response frequencies must be strictly ascending")
        if np.any(g <= 0):
            raise ValueError("response gains must be positive")
        object.__setattr__(self, "freqs_hz", f)
        object.__setattr__(self, "gains", g)

    @classmethod
    def identity(cls, f_max: float = 1e5) -> "FrequencyResponse":
        return cls(np.array([0.0, f_max]), np.ones(2))

    def reciprocal(self) -> "FrequencyResponse":
        return FrequencyResponse(self.freqs_hz, 1.0 / self.gains)

    def gain_at(self, freqs: np.ndarray, band: tuple[float, float]) -> np.ndarray:
        """Linearly interpolated gains; raises if the grid misses ``band``."""
        lo, hi = band
        if self.freqs_hz[0] > lo or self.freqs_hz[-1] < hi:
            raise ValueError(
                f"response covers [{self.freqs_hz[0]:g}, {self.freqs_hz[-1]:g}] Hz, "
                f"active band is [{lo:g}, {hi:g}] Hz"
            )
        return np.interp(freqs, self.freqs_hz, self.gains)


def combine_lateral(fx, fy) -> np.ndarray:
    """Merge two lateral force axes into one friction signal.

    Per frequency bin the output magnitude is sqrt(|X|^2 + |Y|^2), so the
    spectral energy of both axes is kept; the phase is borrowed from
    whichever axis is stronger at that bin.
    """
    fx = np.asarray(fx, dtype=float)
    fy = np.asarray(fy, dtype=float)
    if fx.shape != fy.shape or fx.ndim != 1:
        raise ValueError(f"channel length mismatch: {fx.shape} vs {fy.shape}")
    n = fx.size
    X = np.fft.rfft(fx)
    Y = np.fft.rfft(fy)
    px = np.abs(X) ** 2
    py = np.abs(Y) ** 2
    dominant = np.where(px >= py, X, Y)
    phase = np.exp(1j * np.angle(dominant))
    Z = np.sqrt(px + py) * phase
    return np.fft.irfft(Z, n)


def detect_sweeps(signal, min_length: int | None = None) -> list[SweepSegment]:
    """Find maximal runs where |signal| exceeds its global mean.

    Runs shorter than ``min_length`` samples (default: 10% of the standard
    window) are dropped as noise.
    """
    x = np.abs(np.asarray(signal, dtype=float))
    if x.size == 0:
        raise ValueError("empty signal")
    if min_length is None:
        min_length = int(MIN_SWEEP_FRACTION * WINDOW_LEN)
    if np.ptp(x) == 0:
        return []
    above = x > x.mean()
    edges = np.diff(above.astype(np.int8), prepend=0, append=0)
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1)
    return [
        SweepSegment(int(s), int(e)) for s, e in zip(starts, ends) if e - s >= min_length
    ]


def extract_frame(signal, segment: SweepSegment, window_len: int = WINDOW_LEN):
    """Hann-windowed slice centred on the segment midpoint.

    Returns None (with a FrameOverrunWarning) when the window would run past
    either end of the signal.
    """
    x = np.asarray(signal, dtype=float)
    start = segment.center_index - window_len // 2
    stop = start + window_len
    if start < 0 or stop > x.size:
        warnings.warn(
            f"skipping sweep centred at {segment.center_index}: window "
            f"[{start}, {stop}) exceeds signal length {x.size}",
            FrameOverrunWarning,
            stacklevel=2,
        )
        return None
    return x[start:stop] * hann_window(window_len)


def continuous_frames(signal, window_len: int = WINDOW_LEN) -> list[np.ndarray]:
    """Consecutive non-overlapping Hann-windowed frames (for sweep-free signals)."""
    x = np.asarray(signal, dtype=float)
    w = hann_window(window_len)
    return [x[i : i + window_len] * w for i in range(0, x.size - window_len + 1, window_len)]


def average_spectra(frames, sample_rate_hz: float = SAMPLE_RATE_HZ, window=None) -> MagnitudeSpectrum:
    """Mean one-sided amplitude spectrum of equally long windowed frames.

    ``window`` is the taper already applied to the frames (periodic Hann of
    the frame length by default); it sets the amplitude calibration.
    """
    frames = [np.asarray(f, dtype=float) for f in frames]
    if not frames:
        raise ValueError("no frames to average")
    n = frames[0].size
    if any(f.size != n for f in frames):
        raise ValueError("frames must all have the same length")
    if n % 2:
        raise ValueError("frame length must be even")
    if window is None:
        window = hann_window(n)
    scale = np.full(n // 2 + 1, 2.0 / np.sum(window))
    scale[[0, -1]] /= 2
    mags = np.mean(np.abs(np.fft.rfft(np.vstack(frames), axis=1)), axis=0) * scale
    return MagnitudeSpectrum(sample_rate_hz / n, mags)


def bandpass(spec: MagnitudeSpectrum, low_hz: float = TACTILE_BAND[0], high_hz: float = TACTILE_BAND[1]) -> MagnitudeSpectrum:
    """Zero every bin strictly outside [low_hz, high_hz]."""
    if not (0 <= low_hz < high_hz <= spec.nyquist_hz):
        raise ValueError(f"invalid band [{low_hz}, {high_hz}] for Nyquist {spec.nyquist_hz}")
    f = spec.freqs
    mags = np.where((f >= low_hz) & (f <= high_hz), spec.magnitudes, 0.0)
    return MagnitudeSpectrum(spec.bin_hz, mags, (low_hz, high_hz))


def compensate(spec: MagnitudeSpectrum, response: FrequencyResponse) -> MagnitudeSpectrum:
    """Divide in-band magnitudes by the interpolated setup response."""
    band = spec.band
    mask = spec.in_band()
    gains = response.gain_at(spec.freqs[mask], band)
    mags = spec.magnitudes.copy()
    mags[mask] = mags[mask] / gains
    return replace(spec, magnitudes=mags)


def band_limit(frame, sample_rate_hz: float = SAMPLE_RATE_HZ, band: tuple[float, float] = TACTILE_BAND) -> np.ndarray:
    """Time-domain counterpart of ``bandpass``: zero FFT bins outside the band."""
    x = np.asarray(frame, dtype=float)
    X = np.fft.rfft(x)
    f = np.fft.rfftfreq(x.size, 1.0 / sample_rate_hz)
    X[(f < band[0]) | (f > band[1])] = 0
    return np.fft.irfft(X, x.size)


@dataclass
class PreprocessResult:
    spectrum: MagnitudeSpectrum
    sweeps: list[SweepSegment]
    frames: list[np.ndarray]
    n_skipped: int

    @property
    def n_frames(self) -> int:
        return len(self.frames)

    def band_limited_frames(self) -> list[np.ndarray]:
        fs, band = self.spectrum.sample_rate_hz, self.spectrum.band
        return [band_limit(f, fs, band) for f in self.frames]


def preprocess(
    signal,
    sample_rate_hz: float = SAMPLE_RATE_HZ,
    window_len: int = WINDOW_LEN,
    band: tuple[float, float] = TACTILE_BAND,
    response: FrequencyResponse | None = None,
    framing: str = "sweeps",
) -> PreprocessResult:
    """Full chain from a friction signal (or recording) to the codec input.

    ``framing="continuous"`` tiles the whole signal instead of hunting for
    sweeps, which suits synthesized textures.
    """
    if isinstance(signal, FrictionRecording):
        sample_rate_hz = signal.sample_rate_hz
        signal = signal.friction()
    x = np.asarray(signal, dtype=float)
    if x.size == 0:
        raise NoSweepsError("no sweeps detected: empty signal")
    if framing == "sweeps":
        sweeps = detect_sweeps(x, min_length=int(MIN_SWEEP_FRACTION * window_len))
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", FrameOverrunWarning)
            frames = [extract_frame(x, s, window_len) for s in sweeps]
        for w in caught:
            warnings.warn(w.message, w.category, stacklevel=2)
        kept = [f for f in frames if f is not None]
    elif framing == "continuous":
        sweeps = []
        frames = kept = continuous_frames(x, window_len)
    else:
        raise ValueError(f"unknown framing {framing!r}")
    if not kept:
        raise NoSweepsError("no sweeps detected" if framing == "sweeps" else "signal shorter than one window")
    spec = bandpass(average_spectra(kept, sample_rate_hz), *band)
    if response is not None:
        spec = compensate(spec, response)
    return PreprocessResult(spec, sweeps, kept, len(frames) - len(kept))


class NoSweepsError(ValueError):
    pass
