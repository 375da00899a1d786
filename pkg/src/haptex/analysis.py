"""Reconstruction-quality analysis.

Spectral correlation between rendered and original spectra, and the
band-energy regression that relates standardized similarity ratings to
energy differences pooled through log-spaced triangular filters.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc

from .signal_core import TACTILE_BAND, MagnitudeSpectrum

MAX_FILTERS = 20

# Spectral correlations reported for human-interaction recordings; these
# depend on unpublished data and are kept for reference only.
REFERENCE_CORRELATIONS = {
    "ar": (0.9, 1.0),
    "ar/vinyl": (0.85, 0.85),
    "mfcc": (0.6, 0.7),
    "speak": (0.7, 0.8),
}


class DegenerateDataError(ValueError):
    pass


@dataclass(frozen=True)
class RatingRecord:
    """Similarity rating on the 0 (different) .. 6 (same) scale, repetitions already averaged."""

    participant: str
    texture: str
    codec: str
    rating: float

    def __post_init__(self):
        if not 0 <= self.rating <= 6:
            raise ValueError(f"rating {self.rating} outside 0..6")

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.participant, self.texture, self.codec)


def spectral_correlation(a: MagnitudeSpectrum, b: MagnitudeSpectrum, band=TACTILE_BAND) -> float:
    """Pearson correlation of in-band magnitudes."""
    if not a.same_grid(b):
        raise ValueError("spectra are on different frequency grids")
    f = a.freqs
    inside = (f >= band[0]) & (f <= band[1])
    x = a.magnitudes[inside] - a.magnitudes[inside].mean()
    y = b.magnitudes[inside] - b.magnitudes[inside].mean()
    sx = np.sqrt(np.dot(x, x))
    sy = np.sqrt(np.dot(y, y))
    if sx == 0 or sy == 0:
        raise DegenerateDataError("zero-variance spectrum")
    return float(np.clip(np.dot(x, y) / (sx * sy), -1.0, 1.0))


@dataclass(frozen=True)
class FilterBank:
    """Triangles (low_hz, center_hz, high_hz), linear in log10 f."""

    triangles: tuple[tuple[float, float, float], ...]

    @property
    def n_filters(self) -> int:
        return len(self.triangles)

    @property
    def centers_hz(self) -> np.ndarray:
        return np.array([c for _, c, _ in self.triangles])

    def weights(self, freqs) -> np.ndarray:
        """Filter responses at ``freqs``, shape (n_filters, n_freqs), values in [0, 1]."""
        f = np.asarray(freqs, dtype=float)
        logf = np.full(f.shape, -np.inf)
        pos = f > 0
        logf[pos] = np.log10(f[pos])
        out = np.zeros((self.n_filters, f.size))
        for i, (lo, c, hi) in enumerate(self.triangles):
            rise = (logf - np.log10(lo)) / (np.log10(c) - np.log10(lo))
            fall = (np.log10(hi) - logf) / (np.log10(hi) - np.log10(c))
            out[i] = np.clip(np.minimum(rise, fall), 0.0, 1.0)
        return out


def build_filterbank(n: int, band=TACTILE_BAND) -> FilterBank:
    """``n`` half-overlapping triangles tiling ``band`` in log frequency.

    Centres sit at the n interior points of an (n + 1)-way equal split of
    [log lo, log hi]; each foot reaches the neighbouring centre, and the
    outer feet land on the band edges.
    """
    if not 1 <= n <= MAX_FILTERS:
        raise ValueError(f"filter count must be in 1..{MAX_FILTERS}, got {n}")
    grid = np.logspace(np.log10(band[0]), np.log10(band[1]), n + 2)
    grid[0], grid[-1] = band
    return FilterBank(tuple((float(grid[i]), float(grid[i + 1]), float(grid[i + 2])) for i in range(n)))


def band_energy_diff(orig: MagnitudeSpectrum, rendered: MagnitudeSpectrum, fb: FilterBank) -> np.ndarray:
    """Per-band sum of weight(f) * | |orig(f)|^2 - |rendered(f)|^2 |."""
    if not orig.same_grid(rendered):
        raise ValueError("spectra are on different frequency grids")
    diff = np.abs(orig.magnitudes**2 - rendered.magnitudes**2)
    return fb.weights(orig.freqs) @ diff


def zscore(values, groups=None) -> np.ndarray:
    """Standardize within groups (sample standard deviation, N - 1).

    ``values`` may be 1D or 2D (observations x features); each column is
    standardized separately. ``groups`` gives one hashable key per
    observation; None means a single group.
    """
    v = np.asarray(values, dtype=float)
    flat = v.ndim == 1
    v2 = v[:, None] if flat else v
    if groups is None:
        groups = [None] * v2.shape[0]
    if len(groups) != v2.shape[0]:
        raise ValueError("one group key per observation required")
    members = defaultdict(list)
    for i, g in enumerate(groups):
        members[g].append(i)
    out = np.empty_like(v2)
    for g, idx in members.items():
        block = v2[idx]
        if len(idx) < 2:
            raise DegenerateDataError(f"group {g!r} has fewer than two observations")
        sd = block.std(axis=0, ddof=1)
        if np.any(sd == 0):
            raise DegenerateDataError(f"group {g!r} has zero variance")
        out[idx] = (block - block.mean(axis=0)) / sd
    return out[:, 0] if flat else out


@dataclass(frozen=True)
class RegressionReport:
    n_filters: int
    p_value: float
    r_squared: float
    f_statistic: float
    rmse: float
    coefficients: tuple[float, ...]
    intercept: float = 0.0


def f_test_pvalue(f_stat: float, df_model: int, df_resid: int) -> float:
    """Upper tail of F(df_model, df_resid) via the regularized incomplete beta."""
    if np.isinf(f_stat):
        return 0.0
    if f_stat <= 0:
        return 1.0
    return float(betainc(df_resid / 2.0, df_model / 2.0, df_resid / (df_resid + df_model * f_stat)))


def ols_regress(features, ratings, n_filters: int | None = None) -> RegressionReport:
    """OLS with intercept plus the overall F-test.

    RMSE uses the residual degrees of freedom, sqrt(SSR / (n - k - 1)).
    """
    X = np.asarray(features, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(ratings, dtype=float)
    n, k = X.shape
    if y.shape != (n,):
        raise ValueError("ratings must have one value per observation")
    if n <= k + 1:
        raise DegenerateDataError(f"{n} observations cannot support {k} features plus intercept")
    A = np.column_stack([np.ones(n), X])
    if np.linalg.matrix_rank(A) < k + 1:
        raise DegenerateDataError("feature matrix is rank deficient")
    beta, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ beta
    ssr = float(resid @ resid)
    sst = float(((y - y.mean()) ** 2).sum())
    if sst == 0:
        raise DegenerateDataError("ratings have zero variance")
    r2 = min(max(1.0 - ssr / sst, 0.0), 1.0)
    df_resid = n - k - 1
    f_stat = np.inf if ssr == 0 else ((sst - ssr) / k) / (ssr / df_resid)
    return RegressionReport(
        n_filters=k if n_filters is None else n_filters,
        p_value=f_test_pvalue(f_stat, k, df_resid),
        r_squared=r2,
        f_statistic=float(f_stat),
        rmse=float(np.sqrt(ssr / df_resid)),
        coefficients=tuple(float(b) for b in beta[1:]),
        intercept=float(beta[0]),
    )


def energy_diff_matrix(originals, rendered) -> np.ndarray:
    """Stacked |orig^2 - rendered^2| spectra, shape (observations, bins)."""
    for o, r in zip(originals, rendered):
        if not (o.same_grid(r) and o.same_grid(originals[0])):
            raise ValueError("all spectra must share one frequency grid")
    o2 = np.vstack([o.magnitudes for o in originals]) ** 2
    r2 = np.vstack([r.magnitudes for r in rendered]) ** 2
    return np.abs(o2 - r2)


def band_features(originals, rendered, n: int, band=TACTILE_BAND) -> np.ndarray:
    fb = build_filterbank(n, band)
    return energy_diff_matrix(originals, rendered) @ fb.weights(originals[0].freqs).T


def plateau_scan(
    originals,
    rendered,
    ratings,
    groups=None,
    n_range=range(1, MAX_FILTERS + 1),
    band=TACTILE_BAND,
) -> list[RegressionReport]:
    """Regress standardized ratings on standardized band energy differences for each filter count."""
    if len(originals) != len(rendered) or len(rendered) != len(ratings):
        raise ValueError("originals, rendered and ratings must align")
    y = zscore(ratings, groups)
    diffs = energy_diff_matrix(originals, rendered)
    freqs = originals[0].freqs
    reports = []
    for n in n_range:
        features = diffs @ build_filterbank(n, band).weights(freqs).T
        reports.append(ols_regress(zscore(features, groups), y, n))
    return reports


def plateau_point(reports, tol: float = 0.02) -> int:
    """First filter count whose r^2 is within ``tol`` of the best."""
    best = max(r.r_squared for r in reports)
    return next(r.n_filters for r in reports if r.r_squared >= best - tol)
