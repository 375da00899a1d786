"""File formats.

Recordings   CSV ``t,fx,fy[,fz]`` (s, N), CSV ``t,y`` (already-combined
             friction), or 32-bit float WAV with 1 or 2 channels.
Responses    CSV ``freq_hz,gain_linear``.
Spectra      CSV ``freq_hz,magnitude``.
Signals      CSV ``t,y`` or float WAV.
Drives       CSV ``t,volts`` or float WAV.
Ratings      CSV ``participant,texture,codec,rating``.
Reports      CSV ``n_filters,p_value,r_squared,f_statistic,rmse``.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np
from scipy.io import wavfile

from .analysis import RatingRecord, RegressionReport
from .signal_core import FrequencyResponse, FrictionRecording, MagnitudeSpectrum, RecordingMeta


class FormatError(ValueError):
    pass


class EmptyInputError(FormatError):
    pass


def _read_table(path) -> tuple[list[str], np.ndarray]:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise EmptyInputError(f"{path}: empty file") from None
        rows = [r for r in reader if r]
    try:
        data = np.array(rows, dtype=float).reshape(len(rows), len(header))
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None
    return header, data


def _write_table(path, header, columns) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in zip(*columns):
            w.writerow([repr(float(v)) for v in row])


def _rate_from_times(t: np.ndarray) -> float:
    if t.size < 2:
        raise FormatError("need at least two samples to infer the sample rate")
    dt = np.median(np.diff(t))
    if dt <= 0:
        raise FormatError("time column must increase")
    return float(np.round(1.0 / dt, 6))


def read_recording(path, meta: RecordingMeta | None = None) -> FrictionRecording:
    path = Path(path)
    meta = meta or RecordingMeta(texture_name=path.stem)
    if path.suffix.lower() == ".wav":
        rate, data = wavfile.read(path)
        data = np.asarray(data, dtype=float)
        if data.size == 0:
            raise EmptyInputError(f"{path}: no samples")
        channels = data.T if data.ndim == 2 else data[None, :]
        if channels.shape[0] > 2:
            raise FormatError(f"{path}: expected 1 or 2 channels")
        return FrictionRecording(float(rate), channels, meta)
    header, data = _read_table(path)
    if header[:3] == ["t", "fx", "fy"] and len(header) in (3, 4):
        cols = data[:, 1:3].T
    elif header == ["t", "y"]:
        cols = data[:, 1:2].T
    else:
        raise FormatError(f"{path}: header must be t,fx,fy[,fz] or t,y, got {','.join(header)}")
    if data.shape[0] == 0:
        raise EmptyInputError(f"{path}: no samples")
    return FrictionRecording(_rate_from_times(data[:, 0]), cols, meta)


def write_recording_csv(path, rec: FrictionRecording) -> None:
    t = np.arange(rec.n_samples) / rec.sample_rate_hz
    names = ["fx", "fy", "fz"][: rec.channels.shape[0]] if rec.channels.shape[0] > 1 else ["y"]
    _write_table(path, ["t", *names], [t, *rec.channels])


def write_wav(path, samples, rate_hz: float) -> None:
    data = np.asarray(samples, dtype=np.float32)
    if data.ndim == 2:
        data = data.T
    wavfile.write(path, int(round(rate_hz)), data)


def read_spectrum(path) -> MagnitudeSpectrum:
    header, data = _read_table(path)
    if header != ["freq_hz", "magnitude"]:
        raise FormatError(f"{path}: header must be freq_hz,magnitude")
    if data.shape[0] < 2:
        raise FormatError(f"{path}: need at least two bins")
    f = data[:, 0]
    bin_hz = float(f[1] - f[0])
    if f[0] != 0 or not np.allclose(np.diff(f), bin_hz, rtol=0, atol=1e-6):
        raise FormatError(f"{path}: frequencies must be a uniform grid from 0 Hz")
    return MagnitudeSpectrum(bin_hz, data[:, 1])


def write_spectrum(path, spec: MagnitudeSpectrum) -> None:
    _write_table(path, ["freq_hz", "magnitude"], [spec.freqs, spec.magnitudes])


def read_response(path) -> FrequencyResponse:
    header, data = _read_table(path)
    if header != ["freq_hz", "gain_linear"]:
        raise FormatError(f"{path}: header must be freq_hz,gain_linear")
    return FrequencyResponse(data[:, 0], data[:, 1])


def write_response(path, response: FrequencyResponse) -> None:
    _write_table(path, ["freq_hz", "gain_linear"], [response.freqs_hz, response.gains])


def write_signal(path, y, rate_hz: float, value_name: str = "y") -> None:
    """CSV ``t,<value_name>`` or float WAV, chosen by extension."""
    path = Path(path)
    if path.suffix.lower() == ".wav":
        write_wav(path, y, rate_hz)
    else:
        y = np.asarray(y, dtype=float)
        _write_table(path, ["t", value_name], [np.arange(y.size) / rate_hz, y])


def read_signal(path) -> tuple[np.ndarray, float]:
    path = Path(path)
    if path.suffix.lower() == ".wav":
        rate, data = wavfile.read(path)
        return np.asarray(data, dtype=float), float(rate)
    header, data = _read_table(path)
    if len(header) != 2 or header[0] != "t":
        raise FormatError(f"{path}: expected a two-column t,<value> table")
    return data[:, 1], _rate_from_times(data[:, 0])


def read_ratings(path) -> list[RatingRecord]:
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["participant", "texture", "codec", "rating"]:
            raise FormatError(f"{path}: header must be participant,texture,codec,rating")
        return [RatingRecord(r["participant"], r["texture"], r["codec"], float(r["rating"])) for r in reader]


def write_ratings(path, records) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["participant", "texture", "codec", "rating"])
        for r in records:
            w.writerow([r.participant, r.texture, r.codec, repr(float(r.rating))])


def write_reports(path, reports: list[RegressionReport]) -> None:
    cols = ["n_filters", "p_value", "r_squared", "f_statistic", "rmse"]
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for r in reports:
            w.writerow([r.n_filters] + [repr(float(getattr(r, c))) for c in cols[1:]])


def write_coefficients(path, reports: list[RegressionReport]) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n_filters", "band", "coefficient"])
        for r in reports:
            for i, c in enumerate(r.coefficients, start=1):
                w.writerow([r.n_filters, i, repr(c)])


def read_reports(path) -> list[dict]:
    header, data = _read_table(path)
    return [dict(zip(header, row)) for row in data]
