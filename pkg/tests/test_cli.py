import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from haptex import io
from haptex.analysis import spectral_correlation
from haptex.cli import main
from haptex.codecs.base import SbetaCode, SpeakCode, TextureCode
from haptex.codecs.sbeta import sbeta_envelope
from haptex.config import PipelineConfig, derive_seed
from haptex.render import DriveConfig
from haptex.signal_core import FrequencyResponse, MagnitudeSpectrum
from haptex.synthetic import band_regression_dataset, synthetic_recording, write_rating_study


@pytest.fixture(scope="module")
def rec_files(tmp_path_factory):
    root = tmp_path_factory.mktemp("rec")
    rec = synthetic_recording(seed=3)
    io.write_recording_csv(root / "tex.csv", rec)
    io.write_wav(root / "tex.wav", rec.channels, rec.sample_rate_hz)
    return root


@pytest.fixture(scope="module")
def spectrum_file(rec_files, tmp_path_factory):
    out = tmp_path_factory.mktemp("spec") / "spec.csv"
    assert main(["preprocess", str(rec_files / "tex.csv"), "--out", str(out)]) == 0
    return out


def write_code(path, params):
    path.write_text(TextureCode(params, 20000.0).to_json())
    return path


# --- preprocess ------------------------------------------------------------


def test_preprocess_writes_5hz_spectrum(spectrum_file, capsys):
    spec = io.read_spectrum(spectrum_file)
    assert spec.bin_hz == 5.0
    f = spec.freqs
    assert np.all(spec.magnitudes[(f < 20) | (f > 1000)] == 0)


def test_preprocess_reports_sweeps(rec_files, tmp_path, capsys):
    main(["preprocess", str(rec_files / "tex.csv"), "--out", str(tmp_path / "s.csv")])
    out = capsys.readouterr().out
    assert "sweeps: " in out and "bin resolution: 5 Hz" in out


def test_wav_and_csv_agree(rec_files, tmp_path):
    main(["preprocess", str(rec_files / "tex.csv"), "--out", str(tmp_path / "a.csv")])
    main(["preprocess", str(rec_files / "tex.wav"), "--out", str(tmp_path / "b.csv")])
    a, b = io.read_spectrum(tmp_path / "a.csv"), io.read_spectrum(tmp_path / "b.csv")
    np.testing.assert_allclose(a.magnitudes, b.magnitudes, atol=1e-6)


@pytest.mark.parametrize("content", ["", "t,fx,fy\n"])
def test_empty_file_exit_2(tmp_path, capsys, content):
    (tmp_path / "e.csv").write_text(content)
    assert main(["preprocess", str(tmp_path / "e.csv"), "--out", str(tmp_path / "o.csv")]) == 2
    assert "no sweeps detected" in capsys.readouterr().err


def test_flat_recording_exit_2(tmp_path, capsys):
    t = np.arange(8000) / 20000
    (tmp_path / "flat.csv").write_text("t,fx,fy\n" + "".join(f"{float(v)!r},0.0,0.2\n" for v in t))
    assert main(["preprocess", str(tmp_path / "flat.csv"), "--out", str(tmp_path / "o.csv")]) == 2
    assert "no sweeps detected" in capsys.readouterr().err


def test_missing_input_is_data_error(tmp_path):
    assert main(["preprocess", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "o.csv")]) == 65


# --- encode ----------------------------------------------------------------


def test_encode_sbeta_two_params(spectrum_file, tmp_path, capsys):
    out = tmp_path / "c.json"
    assert main(["encode", str(spectrum_file), "--codec", "sbeta", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert set(data["params"]) == {"alpha", "beta"}
    assert "sbeta: 2 parameters" in capsys.readouterr().out


@pytest.mark.parametrize("source", ["spectrum", "recording"])
def test_encode_ar_six_coefficients(spectrum_file, rec_files, tmp_path, source):
    src = spectrum_file if source == "spectrum" else rec_files / "tex.csv"
    out = tmp_path / "ar.json"
    assert main(["encode", str(src), "--codec", "ar", "--out", str(out)]) == 0
    params = json.loads(out.read_text())["params"]
    assert params["order"] == 6 and len(params["coefficients"]) == 6


def test_unknown_codec_exit_64(spectrum_file, tmp_path):
    assert main(["encode", str(spectrum_file), "--codec", "wavelet", "--out", str(tmp_path / "x")]) == 64


@pytest.mark.parametrize(
    "argv", [[], ["bogus"], ["preprocess"], ["encode", "x.csv", "--codec", "ar"], ["correlate", "a", "b", "--band", "oops"]]
)
def test_usage_errors_exit_64(argv):
    assert main(argv) == 64


# --- synth -----------------------------------------------------------------


def test_speak_synth_is_seed_independent(tmp_path):
    code = write_code(tmp_path / "p.json", SpeakCode(((120.0, 1.0), (400.0, 0.3))))
    for seed in ("1", "2"):
        main(["synth", str(code), "--seed", seed, "--n-samples", "4000", "--out", str(tmp_path / f"p{seed}.csv")])
    assert (tmp_path / "p1.csv").read_bytes() == (tmp_path / "p2.csv").read_bytes()


def test_seed_changes_stochastic_output(tmp_path):
    code = write_code(tmp_path / "b.json", SbetaCode(2.0, 5.0))
    outs = []
    for seed in ("1", "1", "2"):
        out = tmp_path / f"b{len(outs)}.wav"
        main(["synth", str(code), "--seed", seed, "--n-samples", "4000", "--out", str(out)])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1] and outs[0] != outs[2]


def test_synth_preprocess_recovers_sbeta_envelope(tmp_path):
    code = write_code(tmp_path / "b.json", SbetaCode(2.0, 5.0))
    assert main(["synth", str(code), "--n-samples", "800000", "--out", str(tmp_path / "b.wav")]) == 0
    assert main(["preprocess", str(tmp_path / "b.wav"), "--framing", "continuous", "--out", str(tmp_path / "s.csv")]) == 0
    spec = io.read_spectrum(tmp_path / "s.csv")
    env = MagnitudeSpectrum(5.0, sbeta_envelope(SbetaCode(2.0, 5.0), spec.freqs))
    assert spectral_correlation(spec, env) >= 0.99


def test_malformed_code_exit_65(tmp_path):
    (tmp_path / "bad.json").write_text("{not json")
    assert main(["synth", str(tmp_path / "bad.json"), "--out", str(tmp_path / "o.wav")]) == 65
    (tmp_path / "bad2.json").write_text('{"codec": "sbeta", "sample_rate_hz": 20000, "params": {"alpha": 1}}')
    assert main(["synth", str(tmp_path / "bad2.json"), "--out", str(tmp_path / "o.wav")]) == 65


# --- render ----------------------------------------------------------------


def test_zero_gain_render(tmp_path):
    code = write_code(tmp_path / "b.json", SbetaCode(2.0, 5.0))
    assert main(["render", str(code), "--gain", "0", "--n-samples", "8000", "--out", str(tmp_path / "d.csv")]) == 0
    v, _ = io.read_signal(tmp_path / "d.csv")
    assert not np.any(v)


def test_default_render_shows_carrier(tmp_path, capsys):
    code = write_code(tmp_path / "b.json", SbetaCode(2.0, 5.0))
    assert main(["render", str(code), "--n-samples", "40000", "--out", str(tmp_path / "d.wav")]) == 0
    v, rate = io.read_signal(tmp_path / "d.wav")
    f = np.fft.rfftfreq(v.size, 1 / rate)
    P = np.abs(np.fft.rfft(v)) ** 2
    assert 6000 <= f[np.argmax(P)] <= 8000
    # sampled carrier rarely lands exactly on the envelope maximum
    peak = float(capsys.readouterr().out.split(":")[1].split()[0])
    assert 95.0 < peak <= 100.0


def test_over_voltage_exit_65_unless_clipped(tmp_path, capsys):
    code = write_code(tmp_path / "b.json", SbetaCode(2.0, 5.0))
    args = ["render", str(code), "--gain", "200", "--n-samples", "8000", "--out", str(tmp_path / "d.wav")]
    assert main(args) == 65
    assert "--allow-clip" in capsys.readouterr().err
    assert main(args + ["--allow-clip"]) == 0
    v, _ = io.read_signal(tmp_path / "d.wav")
    assert np.abs(v).max() <= 150.0


def test_render_with_response_file(tmp_path):
    code = write_code(tmp_path / "b.json", SbetaCode(2.0, 5.0))
    io.write_response(tmp_path / "h.csv", FrequencyResponse(np.array([0.0, 500.0, 2000.0]), np.array([1.0, 0.5, 0.25])))
    args = ["render", str(code), "--response-ev", str(tmp_path / "h.csv"), "--n-samples", "8000"]
    assert main(args + ["--out", str(tmp_path / "a.wav")]) == 0
    assert main(args + ["--out", str(tmp_path / "b.wav")]) == 0
    assert (tmp_path / "a.wav").read_bytes() == (tmp_path / "b.wav").read_bytes()


# --- correlate / analyze ---------------------------------------------------


def test_correlate_self(spectrum_file, capsys):
    assert main(["correlate", str(spectrum_file), str(spectrum_file)]) == 0
    assert float(capsys.readouterr().out) == pytest.approx(1.0)


@pytest.fixture(scope="module")
def study(tmp_path_factory):
    ds = band_regression_dataset(n_participants=4, n_codecs=3, n_conditions=40, seed=0)
    return write_rating_study(ds, tmp_path_factory.mktemp("study"))


def test_analyze_flags_nine_band_plateau(study, tmp_path, capsys):
    orig, rend, ratings = study
    rc = main(["analyze", "--original", str(orig), "--rendered", str(rend), "--ratings", str(ratings), "--out", str(tmp_path)])
    assert rc == 0
    assert "plateau: n = 9" in capsys.readouterr().out
    rows = io.read_reports(tmp_path / "regression.csv")
    assert [int(r["n_filters"]) for r in rows] == list(range(1, 21))
    for name in ("correlations.csv", "fig3a_spectral_correlation.csv", "fig3b_similarity.csv", "fig3c_bands.csv", "coefficients.csv"):
        assert (tmp_path / name).exists()
    assert len((tmp_path / "fig3c_bands.csv").read_text().splitlines()) == 10


def test_analyze_identical_spectra_correlate_fully(study, tmp_path):
    orig, rend, ratings = study
    same = tmp_path / "same"
    same.mkdir()
    for p in rend.glob("*.csv"):
        texture = p.stem.split("__")[1]
        (same / p.name).write_bytes((orig / f"{texture}.csv").read_bytes())
    rc = main(["analyze", "--original", str(orig), "--rendered", str(same), "--ratings", str(ratings), "--out", str(tmp_path / "o")])
    lines = (tmp_path / "o" / "correlations.csv").read_text().splitlines()[1:]
    assert lines and all(float(line.split(",")[-1]) == pytest.approx(1.0, abs=1e-12) for line in lines)
    # identical spectra leave no energy difference to regress on
    assert rc == 2


def test_missing_ratings_exit_65(study, tmp_path, capsys):
    orig, rend, ratings = study
    lines = ratings.read_text().splitlines()
    short = tmp_path / "r.csv"
    short.write_text("\n".join(lines[:-2]) + "\n")
    rc = main(["analyze", "--original", str(orig), "--rendered", str(rend), "--ratings", str(short), "--out", str(tmp_path / "o")])
    assert rc == 65
    err = capsys.readouterr().err
    missing = [line.split(",")[:3] for line in lines[-2:]]
    for p, t, c in missing:
        assert f"no rating for {p}/{t}/{c}" in err


def test_regress_group_by_validation(study, tmp_path):
    orig, rend, ratings = study
    base = ["regress", "--original", str(orig), "--rendered", str(rend), "--ratings", str(ratings), "--out", str(tmp_path)]
    assert main(base + ["--group-by", "participant,flavour"]) == 64
    assert main(base + ["--group-by", "participant", "--n-max", "10"]) == 0


# --- pipeline, config and determinism --------------------------------------


def test_pipeline_outputs_and_jobs_agree(rec_files, tmp_path, capsys):
    args = ["pipeline", str(rec_files / "tex.csv"), "--n-samples", "40000", "--seed", "5"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--jobs", "3", "--out", str(tmp_path / "b")]) == 0
    files = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert {"spectrum.csv", "summary.csv", "config.json", "sbeta.json", "ar_drive.wav"} <= set(files)
    for name in files:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes(), name
    cfg = PipelineConfig.load(tmp_path / "a" / "config.json")
    assert cfg.seed == 5 and cfg.n_samples == 40000


COMMAND_RUNS = {
    "preprocess": lambda d, r: ["preprocess", str(r / "tex.csv"), "--out", str(d / "o.csv")],
    "encode": lambda d, r: ["encode", str(r / "tex.csv"), "--codec", "mfcc", "--out", str(d / "o.json")],
    "synth": lambda d, r: ["synth", str(d / "code.json"), "--n-samples", "8000", "--out", str(d / "o.wav")],
    "render": lambda d, r: ["render", str(d / "code.json"), "--n-samples", "8000", "--out", str(d / "o.csv")],
    "correlate": lambda d, r: ["correlate", str(d / "code_spec.csv"), str(d / "code_spec.csv"), "--out", str(d / "o.csv")],
}


@pytest.mark.parametrize("command", sorted(COMMAND_RUNS))
def test_every_command_bit_reproducible(command, rec_files, tmp_path):
    d = tmp_path
    write_code(d / "code.json", SbetaCode(2.0, 5.0))
    io.write_spectrum(d / "code_spec.csv", MagnitudeSpectrum(5.0, np.linspace(0, 1, 2001)))
    outputs = []
    for _ in range(2):
        assert main(COMMAND_RUNS[command](d, rec_files) + ["--seed", "11"]) == 0
        produced = [p for p in d.iterdir() if p.name.startswith("o.")]
        outputs.append(sorted((p.name, p.read_bytes()) for p in produced))
        for p in produced:
            p.unlink()
    assert outputs[0] == outputs[1]


def test_seed_sources(tmp_path, monkeypatch):
    code = write_code(tmp_path / "b.json", SbetaCode(2.0, 5.0))

    def synth(*extra):
        out = tmp_path / "o.wav"
        assert main(["synth", str(code), "--n-samples", "4000", "--out", str(out), *extra]) == 0
        return out.read_bytes()

    monkeypatch.setenv("HAPTEX_SEED", "42")
    from_env = synth()
    assert synth("--seed", "42") == from_env
    assert synth("--seed", "0") != from_env
    (tmp_path / "cfg.json").write_text(json.dumps({"seed": 0}))
    assert synth("--config", str(tmp_path / "cfg.json")) == synth("--seed", "0")
    monkeypatch.delenv("HAPTEX_SEED")
    assert synth() == synth("--seed", "0")


def test_config_flags_override_file(tmp_path):
    (tmp_path / "c.json").write_text(json.dumps({"drive": {"gain_v": 10.0, "carrier_hz": 6000.0, "output_rate_hz": 20000.0}}))
    code = write_code(tmp_path / "b.json", SbetaCode(2.0, 5.0))
    main(["render", str(code), "--config", str(tmp_path / "c.json"), "--gain", "20", "--n-samples", "4000", "--out", str(tmp_path / "d.csv")])
    v, _ = io.read_signal(tmp_path / "d.csv")
    assert np.abs(v).max() == pytest.approx(20.0, rel=1e-6)


def test_unknown_config_key_is_data_error(tmp_path):
    (tmp_path / "c.json").write_text(json.dumps({"sead": 3}))
    code = write_code(tmp_path / "b.json", SbetaCode(2.0, 5.0))
    assert main(["synth", str(code), "--config", str(tmp_path / "c.json"), "--out", str(tmp_path / "o.wav")]) == 65


@settings(max_examples=40, deadline=None)
@given(
    st.tuples(st.floats(0, 100), st.floats(200, 5000)),
    st.sampled_from([2000, 4000, 8000]),
    st.lists(st.sampled_from(["ar", "mfcc", "speak", "sbeta", "sslope"]), min_size=1, max_size=5, unique=True),
    st.floats(1000, 10000),
    st.floats(0, 150),
    st.integers(0, 2**63 - 1),
    st.sampled_from(["sweeps", "continuous"]),
)
def test_config_round_trip(band, window, codec_list, carrier, gain, seed, framing):
    cfg = PipelineConfig(
        band=band,
        window_len=window,
        framing=framing,
        codecs=tuple(codec_list),
        drive=DriveConfig(carrier_hz=carrier, gain_v=gain, output_rate_hz=2.5 * carrier),
        seed=seed,
    )
    assert PipelineConfig.from_json(cfg.to_json()) == cfg


def test_derive_seed_is_stable_and_stage_specific():
    assert derive_seed(0, "synth") == derive_seed(0, "synth")
    assert derive_seed(0, "synth") != derive_seed(0, "render")
    assert derive_seed(1, "synth") != derive_seed(0, "synth")
    assert 0 <= derive_seed(2**40, "x") < 2**63


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "haptex", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "preprocess" in res.stdout
