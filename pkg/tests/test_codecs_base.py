import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from haptex.codecs import CODEC_NAMES, decode, encode
from haptex.codecs.base import (
    ArCode,
    MfccCode,
    SbetaCode,
    SpeakCode,
    SslopeCode,
    TextureCode,
    count_parameters,
)
from haptex.signal_core import hann_window, preprocess
from haptex.synthetic import synthetic_recording

EXPECTED_COUNTS = {"ar": 7, "mfcc": 10, "sbeta": 2, "sslope": 3}


@pytest.fixture(scope="module")
def texture():
    return preprocess(synthetic_recording(seed=4))


@pytest.mark.parametrize("codec", CODEC_NAMES)
def test_encode_output_is_compact(texture, codec):
    code = encode(codec, texture.spectrum, frames=texture.band_limited_frames())
    n = count_parameters(json.loads(code.to_json()))
    if codec == "speak":
        assert 2 <= n <= 20 and n % 2 == 0
    else:
        assert n == EXPECTED_COUNTS[codec]
    assert n == code.n_values()


def test_sbeta_params_are_exactly_alpha_beta(texture):
    d = encode("sbeta", texture.spectrum).to_dict()
    assert set(d["params"]) == {"alpha", "beta"}
    assert d["codec"] == "sbeta"


def test_unknown_codec_raises(texture):
    with pytest.raises(ValueError, match="unknown codec"):
        encode("wavelet", texture.spectrum)


SAMPLE_CODES = [
    ArCode(6, (0.5, -0.2, 0.1, 0.0, 0.05, -0.01), 0.3),
    MfccCode(tuple(np.linspace(-3, 1, 10))),
    SpeakCode(((50.0, 1.0), (120.5, 0.25))),
    SbetaCode(2.5, 4.1),
    SslopeCode(180.0, 2, 1),
]


@pytest.mark.parametrize("params", SAMPLE_CODES, ids=lambda p: type(p).__name__)
def test_json_round_trip_is_value_identical(params):
    code = TextureCode(params, 20000.0)
    back = TextureCode.from_json(code.to_json())
    assert back == code
    assert back.to_json() == code.to_json()


@settings(max_examples=60, deadline=None)
@given(
    st.floats(0.01, 50, allow_nan=False),
    st.floats(0.01, 50, allow_nan=False),
    st.floats(1, 1e6, allow_nan=False),
)
def test_sbeta_json_round_trip_any_value(a, b, fs):
    code = TextureCode(SbetaCode(a, b), fs)
    assert TextureCode.from_json(code.to_json()) == code


def test_json_keys_must_match_fields():
    good = TextureCode(SbetaCode(2, 3), 20000.0).to_dict()
    bad = dict(good, params={"alpha": 2, "beta": 3, "scale": 1})
    with pytest.raises(ValueError):
        TextureCode.from_dict(bad)
    with pytest.raises(ValueError):
        TextureCode.from_dict(dict(good, codec="nope"))


@pytest.mark.parametrize(
    "make",
    [
        lambda: ArCode(2, (0.1,), 1.0),
        lambda: SbetaCode(0.0, 1.0),
        lambda: SslopeCode(100.0, -1, 0),
        lambda: SpeakCode(((200.0, 1.0), (100.0, 1.0))),
    ],
)
def test_invalid_payloads_rejected(make):
    with pytest.raises(ValueError):
        make()


@pytest.mark.parametrize("params", SAMPLE_CODES, ids=lambda p: type(p).__name__)
def test_decoders_are_deterministic(params):
    code = TextureCode(params, 20000.0)
    np.testing.assert_array_equal(decode(code, 8000, seed=9), decode(code, 8000, seed=9))


@pytest.mark.parametrize("params", SAMPLE_CODES, ids=lambda p: type(p).__name__)
def test_decoded_energy_stays_in_band(params):
    n = 40000
    y = decode(TextureCode(params, 20000.0), n, seed=2)
    mags = np.abs(np.fft.rfft(y * hann_window(n)))
    f = np.fft.rfftfreq(n, 1 / 20000.0)
    # 10 Hz guard for the analysis window's main lobe and near sidelobes
    outside = (f < 20 - 10) | (f > 1000 + 10)
    assert 20 * np.log10(mags[outside].max() / mags.max()) < -60
