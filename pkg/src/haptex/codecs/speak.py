"""Spectral-peak texture code: up to ten perceptually distinct sinusoids."""

from __future__ import annotations

import numpy as np

from ..signal_core import MagnitudeSpectrum
from .base import SpeakCode

JND_RATIO = 0.12
MAX_PEAKS = 10
FLOOR_DB = -100.0


def _hann_refine(mags: np.ndarray, k: int) -> tuple[float, float]:
    """Sub-bin offset and amplitude of a Hann-windowed sinusoid peaking at bin k.

    Uses the two-bin ratio, which is exact for an isolated tone:
    delta = (2r - 1) / (r + 1) with r = larger neighbour / centre, which
    lies in [0.5, 1] for a lone tone.
    """
    left = mags[k - 1] if k > 0 else 0.0
    right = mags[k + 1] if k + 1 < mags.size else 0.0
    if mags[k] <= 0:
        return 0.0, 0.0
    if right >= left:
        r = right / mags[k]
        delta = (2 * r - 1) / (r + 1)
    else:
        r = left / mags[k]
        delta = -(2 * r - 1) / (r + 1)
    if not 0.5 <= r <= 1:
        # not a Hann main lobe (isolated bin or interference); keep the bin
        return 0.0, float(mags[k])
    kernel = np.sinc(delta) / (1 - delta * delta)
    return float(delta), float(mags[k] / kernel)


def local_maxima(spec: MagnitudeSpectrum, floor_db: float = FLOOR_DB) -> np.ndarray:
    """In-band bins that rise above the left neighbour and do not fall below the right."""
    m = spec.magnitudes
    idx = np.flatnonzero(spec.in_band())
    if idx.size == 0 or m[idx].max() <= 0:
        return np.array([], dtype=int)
    padded = np.r_[0.0, m, 0.0]
    is_max = (padded[idx + 1] > padded[idx]) & (padded[idx + 1] >= padded[idx + 2])
    floor = m[idx].max() * 10 ** (floor_db / 20)
    return idx[is_max & (m[idx] > floor)]


def find_peaks_jnd(
    spec: MagnitudeSpectrum,
    jnd_ratio: float = JND_RATIO,
    max_peaks: int = MAX_PEAKS,
    refine: bool = True,
) -> SpeakCode:
    """Greedy peak picking with a relative frequency exclusion zone.

    Candidates are local maxima visited from loudest to quietest; a candidate
    whose frequency ratio to any kept peak is below ``1 + jnd_ratio`` is
    dropped. With ``refine`` the kept peaks get Hann sub-bin interpolation.
    """
    m = spec.magnitudes
    cand = local_maxima(spec)
    cand = cand[np.argsort(-m[cand], kind="stable")]
    lo, hi = spec.band
    kept: list[tuple[float, float]] = []
    for k in cand:
        if len(kept) >= max_peaks:
            break
        if refine:
            delta, amp = _hann_refine(m, k)
        else:
            delta, amp = 0.0, float(m[k])
        f = float(np.clip((k + delta) * spec.bin_hz, max(lo, spec.bin_hz), hi))
        if any(max(f, g) / min(f, g) < 1 + jnd_ratio for g, _ in kept):
            continue
        kept.append((f, amp))
    return SpeakCode(tuple(sorted(kept)))


def decode_speak(code: SpeakCode, n_samples: int, sample_rate_hz: float = 20000.0, seed: int | None = None) -> np.ndarray:
    """Zero-phase cosine sum; ``seed`` is accepted for interface symmetry and ignored."""
    t = np.arange(n_samples) / sample_rate_hz
    y = np.zeros(n_samples)
    for f, a in code.peaks:
        y += a * np.cos(2 * np.pi * f * t)
    return y
