"""Synthetic data with known ground truth, for demos and tests."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.signal import butter, lfilter, sosfilt

from .analysis import RatingRecord, build_filterbank
from .signal_core import SAMPLE_RATE_HZ, TACTILE_BAND, FrictionRecording, MagnitudeSpectrum, RecordingMeta


def synthetic_recording(
    duration_s: float = 10.0,
    sample_rate_hz: float = SAMPLE_RATE_HZ,
    sweep_s: float = 0.5,
    pause_s: float = 0.15,
    friction_coeff: float = 0.5,
    texture_band: tuple[float, float] = (60.0, 400.0),
    texture_rel: float = 0.04,
    seed: int = 0,
    meta: RecordingMeta | None = None,
) -> FrictionRecording:
    """Back-and-forth finger sweeps over a texture.

    Each sweep carries a lateral friction plateau of friction_coeff * F_N
    with alternating sign (left-right, right-left) plus band-limited texture
    vibration over ``texture_band``; pauses carry sensor noise only. Most of the
    friction lands on y with a small x leak.
    """
    meta = meta or RecordingMeta()
    rng = np.random.default_rng(seed)
    n = int(round(duration_s * sample_rate_hz))
    level = friction_coeff * meta.normal_force_n
    envelope = np.zeros(n)
    sweep_n = int(sweep_s * sample_rate_hz)
    period = sweep_n + int(pause_s * sample_rate_hz)
    ramp = int(0.02 * sample_rate_hz)
    shape = np.ones(sweep_n)
    shape[:ramp] = np.hanning(2 * ramp)[:ramp]
    shape[-ramp:] = np.hanning(2 * ramp)[ramp:]
    sign = 1.0
    for start in range(int(pause_s * sample_rate_hz) // 2, n - sweep_n, period):
        envelope[start : start + sweep_n] = sign * shape
        sign = -sign
    sos = butter(2, texture_band, btype="bandpass", fs=sample_rate_hz, output="sos")
    vib = sosfilt(sos, rng.standard_normal(n))
    vib /= vib.std()
    lateral = level * (envelope + texture_rel * np.abs(envelope) * vib)
    lateral += 1e-4 * rng.standard_normal(n)
    fx = 0.15 * lateral + 1e-4 * rng.standard_normal(n)
    fy = lateral
    return FrictionRecording(sample_rate_hz, np.vstack([fx, fy]), meta)


@dataclass
class RegressionDataset:
    originals: list[MagnitudeSpectrum]
    rendered: list[MagnitudeSpectrum]
    ratings: np.ndarray
    groups: list[tuple]
    keys: list[tuple[str, str, str]]
    band_weights: np.ndarray


def band_regression_dataset(
    n_participants: int = 6,
    n_codecs: int = 5,
    n_conditions: int = 40,
    n_bands: int = 9,
    noise: float = 0.3,
    jitter: float = 0.05,
    detail: float = 0.02,
    bin_hz: float = 5.0,
    n_bins: int = 801,
    seed: int = 0,
) -> RegressionDataset:
    """Spectrum pairs whose ratings depend linearly on ``n_bands`` band energies.

    Every (participant, codec) group sees the same pool of conditions; each
    condition's energy-difference spectrum is a positive mix of the
    ``n_bands`` triangles (jittered per observation) plus a small amount of
    finer 20-band detail that does not affect the ratings. Band weights
    alternate in sign so total energy alone predicts little.
    """
    rng = np.random.default_rng(seed)
    freqs = np.arange(n_bins) * bin_hz
    coarse = build_filterbank(n_bands).weights(freqs)
    fine = build_filterbank(20).weights(freqs)
    signs = np.where(np.arange(n_bands) % 2 == 0, 1.0, -1.0)
    weights = signs * rng.uniform(0.5, 1.5, n_bands)
    mix = rng.exponential(1.0, (n_conditions, n_bands))
    extra = rng.exponential(1.0, (n_conditions, fine.shape[0]))
    # a gently shaped in-band floor, so original/rendered correlations are defined
    inside = (freqs >= TACTILE_BAND[0]) & (freqs <= TACTILE_BAND[1])
    floor = np.where(inside, 1.0 + 0.5 * np.cos(2 * np.pi * np.log10(np.maximum(freqs, 1.0))), 0.0)
    norm = coarse.sum(axis=1).mean()

    out = RegressionDataset([], [], np.empty(0), [], [], weights)
    ratings = []
    for p in range(n_participants):
        for c in range(n_codecs):
            for t in range(n_conditions):
                a = mix[t] * np.clip(1 + jitter * rng.standard_normal(n_bands), 0.1, None)
                diff = a @ coarse + detail * extra[t] @ fine
                out.originals.append(MagnitudeSpectrum(bin_hz, np.sqrt(floor + diff)))
                out.rendered.append(MagnitudeSpectrum(bin_hz, np.sqrt(floor)))
                ratings.append(-(weights @ (coarse @ (a @ coarse))) / norm + noise * rng.standard_normal())
                out.groups.append((f"p{p}", f"c{c}"))
                out.keys.append((f"p{p}", f"t{t}", f"c{c}"))
    out.ratings = np.asarray(ratings)
    return out


def ar_process(coefficients, n_samples: int, seed: int = 0, burn_in: int = 1000) -> np.ndarray:
    """Stationary AR realisation y[t] = sum A(i) y[t-i] + e[t] with unit-variance e."""
    e = np.random.default_rng(seed).standard_normal(n_samples + burn_in)
    return lfilter([1.0], np.r_[1.0, -np.asarray(coefficients, dtype=float)], e)[burn_in:]


def write_rating_study(ds: RegressionDataset, root) -> tuple[Path, Path, Path]:
    """Lay a dataset out as ``analyze`` expects it.

    One flat original per texture, one rendered spectrum per
    (participant, texture, codec), and ratings mapped affinely onto the
    0..6 scale (z-scoring makes the map irrelevant to the regression).
    Returns (original_dir, rendered_dir, ratings_csv).
    """
    from . import io

    root = Path(root)
    orig_dir, rend_dir = root / "original", root / "rendered"
    orig_dir.mkdir(parents=True, exist_ok=True)
    rend_dir.mkdir(parents=True, exist_ok=True)
    r = np.asarray(ds.ratings)
    scaled = 3.0 + 3.0 * (r - r.mean()) / np.abs(r - r.mean()).max()
    records = []
    for (p, t, c), orig, rend, rating in zip(ds.keys, ds.originals, ds.rendered, scaled):
        # the difference spectrum lives on the rendered side; the energy difference is symmetric
        io.write_spectrum(orig_dir / f"{t}.csv", rend)
        io.write_spectrum(rend_dir / f"{p}__{t}__{c}.csv", orig)
        records.append(RatingRecord(p, t, c, float(rating)))
    ratings_csv = root / "ratings.csv"
    io.write_ratings(ratings_csv, records)
    return orig_dir, rend_dir, ratings_csv
