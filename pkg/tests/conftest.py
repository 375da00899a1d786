import numpy as np
import pytest

from haptex.signal_core import MagnitudeSpectrum

FS = 20000.0
N_BINS = 2001  # 4000-sample frame at 20 kHz, 5 Hz bins
FREQS = np.arange(N_BINS) * 5.0


def spectrum_from(fn, band=(20.0, 1000.0)) -> MagnitudeSpectrum:
    """Spectrum on the standard 5 Hz grid, nonzero only inside ``band``."""
    mags = np.zeros(N_BINS)
    inside = (FREQS >= band[0]) & (FREQS <= band[1])
    mags[inside] = fn(FREQS[inside])
    return MagnitudeSpectrum(5.0, mags, band)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def jnd_peaks(rng, n=10, ratio=1.125, min_gap_hz=25.0, band=(20.0, 1000.0)):
    """``n`` random (freq, amp) peaks, pairwise ratio >= ``ratio``.

    The extra absolute gap keeps low-frequency peaks several 5 Hz bins apart;
    12% of 20 Hz is less than one bin.
    """
    while True:
        cand = np.exp(rng.uniform(np.log(band[0]), np.log(band[1]), 400))
        kept = []
        for f in cand:
            if all(max(f, g) / min(f, g) >= ratio and abs(f - g) >= min_gap_hz for g in kept):
                kept.append(float(f))
            if len(kept) == n:
                kept.sort()
                return [(f, float(a)) for f, a in zip(kept, rng.uniform(0.5, 1.0, n))]
