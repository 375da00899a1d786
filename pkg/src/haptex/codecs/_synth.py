import numpy as np


def random_phase(magnitudes: np.ndarray, n_samples: int, rng: np.random.Generator) -> np.ndarray:
    """Real signal whose rfft bin k is a cosine of amplitude ``magnitudes[k]``.

    Phases are uniform on [0, 2pi); DC and Nyquist are kept real.
    """
    mags = np.asarray(magnitudes, dtype=float)
    phases = rng.uniform(0.0, 2.0 * np.pi, mags.size)
    X = mags * np.exp(1j * phases) * (n_samples / 2.0)
    X[0] = mags[0] * n_samples
    if n_samples % 2 == 0:
        X[-1] = mags[-1] * n_samples
    return np.fft.irfft(X, n_samples)


def synthesis_freqs(n_samples: int, sample_rate_hz: float) -> np.ndarray:
    return np.fft.rfftfreq(n_samples, 1.0 / sample_rate_hz)


def band_mask(freqs: np.ndarray, band) -> np.ndarray:
    return (freqs >= band[0]) & (freqs <= band[1])
