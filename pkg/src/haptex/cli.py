"""``haptex`` command line.

Exit codes: 0 success, 2 empty or degenerate input, 64 usage error,
65 data error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import analysis, codecs, io, render, signal_core
from .config import PipelineConfig, derive_seed

EXIT_OK = 0
EXIT_EMPTY = 2
EXIT_USAGE = 64
EXIT_DATA = 65


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _band(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"band must be LOW:HIGH, got {text!r}") from None
    return lo, hi


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", type=Path, help="JSON pipeline config")
    p.add_argument("--band", type=_band, help="analysis band LOW:HIGH in Hz (default 20:1000)")
    p.add_argument("--window", type=int, help="frame length in samples (default 4000)")
    p.add_argument("--carrier", type=float, help="carrier frequency in Hz (default 7000)")
    p.add_argument("--gain", type=float, help="drive gain V_g in volts")
    p.add_argument("--rate", type=float, help="drive output rate in Hz (default 20000)")
    p.add_argument("--seed", type=int, help="master seed (falls back to $HAPTEX_SEED, then 0)")
    p.add_argument("--response-rec", help="recording-setup response CSV")
    p.add_argument("--response-ev", help="display response CSV")
    p.add_argument("--out", type=Path, help="output path")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="haptex", description="Compact tactile texture codecs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _common()

    p = sub.add_parser("preprocess", parents=[common], help="recording -> averaged spectrum CSV")
    p.add_argument("input", type=Path)
    p.add_argument("--framing", choices=["sweeps", "continuous"])

    p = sub.add_parser("encode", parents=[common], help="spectrum or recording -> code JSON")
    p.add_argument("input", type=Path)
    p.add_argument("--codec", required=True, choices=codecs.CODEC_NAMES)
    p.add_argument("--framing", choices=["sweeps", "continuous"])

    p = sub.add_parser("synth", parents=[common], help="code JSON -> texture signal")
    p.add_argument("code", type=Path)
    p.add_argument("--n-samples", type=int)

    p = sub.add_parser("render", parents=[common], help="code JSON -> drive waveform")
    p.add_argument("code", type=Path)
    p.add_argument("--n-samples", type=int)
    p.add_argument("--allow-clip", action="store_true", help="clip instead of refusing drives above 150 V")

    p = sub.add_parser("correlate", parents=[common], help="spectral correlation of two spectra")
    p.add_argument("a", type=Path)
    p.add_argument("b", type=Path)

    for name, text in (("regress", "band-energy regression scan"), ("analyze", "correlations + regression scan")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--original", type=Path, required=True, help="directory of <texture>.csv spectra")
        p.add_argument("--rendered", type=Path, required=True, help="directory of <participant>__<texture>__<codec>.csv spectra")
        p.add_argument("--ratings", type=Path, required=True)
        p.add_argument("--n-min", type=int, default=1)
        p.add_argument("--n-max", type=int, default=analysis.MAX_FILTERS)
        p.add_argument("--group-by", default="participant,codec", help="z-score grouping keys")

    p = sub.add_parser("pipeline", parents=[common], help="recording -> spectra, codes, signals, drives")
    p.add_argument("input", type=Path)
    p.add_argument("--n-samples", type=int)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--allow-clip", action="store_true")
    return parser


def resolve_config(args) -> PipelineConfig:
    """Config file, then flags on top. Seed: flag, config file, $HAPTEX_SEED, 0."""
    data = {}
    if args.config is not None:
        try:
            data = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"cannot read config {args.config}: {exc}") from None
    cfg = PipelineConfig.from_dict(data)
    drive = cfg.drive
    if args.carrier is not None:
        drive = replace(drive, carrier_hz=args.carrier)
    if args.gain is not None:
        drive = replace(drive, gain_v=args.gain)
    if args.rate is not None:
        drive = replace(drive, output_rate_hz=args.rate)
    updates = {"drive": drive}
    if args.band is not None:
        updates["band"] = args.band
    if args.window is not None:
        updates["window_len"] = args.window
    if args.response_rec is not None:
        updates["response_rec"] = args.response_rec
    if args.response_ev is not None:
        updates["response_ev"] = args.response_ev
    if getattr(args, "framing", None) is not None:
        updates["framing"] = args.framing
    if getattr(args, "n_samples", None) is not None:
        updates["n_samples"] = args.n_samples
    if args.seed is not None:
        updates["seed"] = args.seed
    elif "seed" not in data and os.environ.get("HAPTEX_SEED"):
        updates["seed"] = int(os.environ["HAPTEX_SEED"])
    return replace(cfg, **updates)


def _require_out(args) -> Path:
    if args.out is None:
        raise UsageError(f"{args.command}: --out is required")
    return args.out


def _response(path):
    return None if path is None else io.read_response(path)


def _load_code(path) -> codecs.TextureCode:
    try:
        return codecs.TextureCode.from_json(Path(path).read_text())
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise DataError(f"malformed code JSON {path}: {exc}") from None


def _preprocess(path, cfg: PipelineConfig) -> signal_core.PreprocessResult:
    rec = io.read_recording(path)
    return signal_core.preprocess(
        rec,
        window_len=cfg.window_len,
        band=cfg.band,
        response=_response(cfg.response_rec),
        framing=cfg.framing,
    )


def _encode(codec: str, spectrum, cfg: PipelineConfig, frames=None) -> codecs.TextureCode:
    return codecs.encode(
        codec,
        spectrum,
        frames=frames,
        band=cfg.band,
        ar_order=cfg.ar_order,
        mfcc_coeffs=cfg.mfcc_coeffs,
        n_mel_filters=cfg.n_mel_filters,
        jnd_ratio=cfg.jnd_ratio,
        max_peaks=cfg.max_peaks,
    )


def cmd_preprocess(args, cfg: PipelineConfig) -> int:
    out = _require_out(args)
    result = _preprocess(args.input, cfg)
    io.write_spectrum(out, result.spectrum)
    print(f"sweeps: {len(result.sweeps)}  frames: {result.n_frames}  skipped: {result.n_skipped}")
    print(f"bin resolution: {result.spectrum.bin_hz:g} Hz")
    return EXIT_OK


def _is_spectrum(path: Path) -> bool:
    if path.suffix.lower() == ".wav":
        return False
    with path.open() as fh:
        return fh.readline().strip().replace(" ", "") == "freq_hz,magnitude"


def cmd_encode(args, cfg: PipelineConfig) -> int:
    out = _require_out(args)
    frames = None
    if _is_spectrum(args.input):
        spectrum = signal_core.bandpass(io.read_spectrum(args.input), *cfg.band)
    else:
        result = _preprocess(args.input, cfg)
        spectrum = result.spectrum
        if args.codec == "ar":
            frames = result.band_limited_frames()
    code = _encode(args.codec, spectrum, cfg, frames)
    out.write_text(code.to_json())
    print(f"{args.codec}: {codecs.count_parameters(code.to_dict())} parameters")
    return EXIT_OK


def cmd_synth(args, cfg: PipelineConfig) -> int:
    out = _require_out(args)
    code = _load_code(args.code)
    y = codecs.decode(code, cfg.n_samples, derive_seed(cfg.seed, "synth"), cfg.band)
    io.write_signal(out, y, code.sample_rate_hz)
    print(f"wrote {y.size} samples at {code.sample_rate_hz:g} Hz")
    return EXIT_OK


def _drive(code, cfg: PipelineConfig, allow_clip: bool) -> render.DriveSignal:
    return render.prepare_drive(
        code,
        _response(cfg.response_ev),
        cfg.drive,
        cfg.n_samples,
        derive_seed(cfg.seed, "synth"),
        allow_clip=allow_clip,
        band=cfg.band,
    )


def cmd_render(args, cfg: PipelineConfig) -> int:
    out = _require_out(args)
    drive = _drive(_load_code(args.code), cfg, args.allow_clip)
    io.write_signal(out, drive.samples, drive.rate_hz, value_name="volts")
    print(f"peak voltage: {drive.peak_v:.3f} V")
    return EXIT_OK


def cmd_correlate(args, cfg: PipelineConfig) -> int:
    r = analysis.spectral_correlation(io.read_spectrum(args.a), io.read_spectrum(args.b), cfg.band)
    print(f"{r:.12g}")
    if args.out is not None:
        args.out.write_text(f"a,b,correlation\n{args.a},{args.b},{r!r}\n")
    return EXIT_OK


def _load_conditions(args):
    """Align original spectra, rendered spectra and ratings on (participant, texture, codec)."""
    ratings = {r.key: r for r in io.read_ratings(args.ratings)}
    originals = {p.stem: io.read_spectrum(p) for p in sorted(args.original.glob("*.csv"))}
    rendered = {}
    for p in sorted(args.rendered.glob("*.csv")):
        parts = p.stem.split("__")
        if len(parts) != 3:
            raise DataError(f"rendered spectrum {p.name} is not named <participant>__<texture>__<codec>.csv")
        rendered[tuple(parts)] = io.read_spectrum(p)
    problems = []
    for key in sorted(set(rendered) - set(ratings)):
        problems.append(f"no rating for {'/'.join(key)}")
    for key in sorted(set(ratings) - set(rendered)):
        problems.append(f"no rendered spectrum for {'/'.join(key)}")
    for key in sorted(set(ratings) | set(rendered)):
        if key[1] not in originals:
            problems.append(f"no original spectrum for texture {key[1]} ({'/'.join(key)})")
    if problems:
        raise DataError("condition mismatch:\n  " + "\n  ".join(sorted(set(problems))))
    keys = sorted(ratings)
    return keys, [originals[k[1]] for k in keys], [rendered[k] for k in keys], np.array([ratings[k].rating for k in keys])


def _group_keys(keys, group_by: str):
    fields = {"participant": 0, "texture": 1, "codec": 2}
    try:
        idx = [fields[name.strip()] for name in group_by.split(",")]
    except KeyError as exc:
        raise UsageError(f"unknown group-by field {exc}") from None
    return [tuple(k[i] for i in idx) for k in keys]


def _run_regression(args, cfg, keys, originals, rendered, ratings, out: Path) -> None:
    reports = analysis.plateau_scan(
        originals, rendered, ratings, _group_keys(keys, args.group_by), range(args.n_min, args.n_max + 1), cfg.band
    )
    io.write_reports(out / "regression.csv", reports)
    io.write_coefficients(out / "coefficients.csv", reports)
    n_plateau = analysis.plateau_point(reports)
    fb = analysis.build_filterbank(n_plateau, cfg.band)
    with (out / "fig3c_bands.csv").open("w") as fh:
        fh.write("band,low_hz,center_hz,high_hz\n")
        for i, (lo, c, hi) in enumerate(fb.triangles, start=1):
            fh.write(f"{i},{lo!r},{c!r},{hi!r}\n")
    for r in reports:
        print(f"n={r.n_filters:2d}  r2={r.r_squared:.4f}  F={r.f_statistic:.4g}  p={r.p_value:.3g}  rmse={r.rmse:.4f}")
    print(f"plateau: n = {n_plateau}")


def cmd_regress(args, cfg: PipelineConfig) -> int:
    out = _require_out(args)
    out.mkdir(parents=True, exist_ok=True)
    keys, originals, rendered, ratings = _load_conditions(args)
    _run_regression(args, cfg, keys, originals, rendered, ratings, out)
    return EXIT_OK


def cmd_analyze(args, cfg: PipelineConfig) -> int:
    out = _require_out(args)
    out.mkdir(parents=True, exist_ok=True)
    keys, originals, rendered, ratings = _load_conditions(args)
    corr = [analysis.spectral_correlation(o, r, cfg.band) for o, r in zip(originals, rendered)]
    with (out / "correlations.csv").open("w") as fh:
        fh.write("participant,texture,codec,correlation\n")
        for k, c in zip(keys, corr):
            fh.write(f"{k[0]},{k[1]},{k[2]},{c!r}\n")
    by_cond = defaultdict(list)
    by_rating = defaultdict(list)
    for k, c, r in zip(keys, corr, ratings):
        by_cond[(k[1], k[2])].append(c)
        by_rating[(k[1], k[2])].append(r)
    with (out / "fig3a_spectral_correlation.csv").open("w") as fh:
        fh.write("texture,codec,mean_correlation\n")
        for (t, c), v in sorted(by_cond.items()):
            fh.write(f"{t},{c},{float(np.mean(v))!r}\n")
    with (out / "fig3b_similarity.csv").open("w") as fh:
        fh.write("texture,codec,mean_rating\n")
        for (t, c), v in sorted(by_rating.items()):
            fh.write(f"{t},{c},{float(np.mean(v))!r}\n")
    print(f"correlations: {len(corr)} conditions, mean {np.mean(corr):.4f}")
    try:
        _run_regression(args, cfg, keys, originals, rendered, ratings, out)
    except analysis.DegenerateDataError as exc:
        print(f"regression skipped: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    return EXIT_OK


def cmd_pipeline(args, cfg: PipelineConfig) -> int:
    out = _require_out(args)
    out.mkdir(parents=True, exist_ok=True)
    result = _preprocess(args.input, cfg)
    io.write_spectrum(out / "spectrum.csv", result.spectrum)
    fs = result.spectrum.sample_rate_hz

    def job(codec):
        code = _encode(codec, result.spectrum, cfg, result.band_limited_frames() if codec == "ar" else None)
        (out / f"{codec}.json").write_text(code.to_json())
        y = codecs.decode(code, cfg.n_samples, derive_seed(cfg.seed, "synth"), cfg.band)
        io.write_signal(out / f"{codec}_signal.wav", y, fs)
        resynth = signal_core.preprocess(y, fs, cfg.window_len, cfg.band, framing="continuous").spectrum
        io.write_spectrum(out / f"{codec}_spectrum.csv", resynth)
        drive = _drive(code, cfg, args.allow_clip)
        io.write_signal(out / f"{codec}_drive.wav", drive.samples, drive.rate_hz)
        return codec, code.n_values(), analysis.spectral_correlation(result.spectrum, resynth, cfg.band), drive.peak_v

    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        rows = list(pool.map(job, cfg.codecs))
    with (out / "summary.csv").open("w") as fh:
        fh.write("codec,n_parameters,spectral_correlation,peak_v\n")
        for codec, n, r, v in rows:
            fh.write(f"{codec},{n},{r!r},{v!r}\n")
            print(f"{codec:7s} params={n:2d}  corr={r:.3f}  peak={v:.1f} V")
    (out / "config.json").write_text(cfg.to_json())
    return EXIT_OK


COMMANDS = {
    "preprocess": cmd_preprocess,
    "encode": cmd_encode,
    "synth": cmd_synth,
    "render": cmd_render,
    "correlate": cmd_correlate,
    "regress": cmd_regress,
    "analyze": cmd_analyze,
    "pipeline": cmd_pipeline,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = resolve_config(args)
        return COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (io.EmptyInputError, signal_core.NoSweepsError, signal_core.ShortRecordingError) as exc:
        print(str(exc) if isinstance(exc, signal_core.NoSweepsError) else f"no sweeps detected: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except render.OverVoltageError as exc:
        print(f"{exc}; pass --allow-clip to clip", file=sys.stderr)
        return EXIT_DATA
    except analysis.DegenerateDataError as exc:
        print(exc, file=sys.stderr)
        return EXIT_EMPTY
    except (DataError, ValueError, OSError, RuntimeError) as exc:
        print(exc, file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
