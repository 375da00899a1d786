"""Compact spectral codecs for finger-surface friction textures."""

from . import analysis, codecs, render, signal_core
from .codecs import TextureCode, decode, encode
from .render import DriveConfig, prepare_drive
from .signal_core import FrequencyResponse, FrictionRecording, MagnitudeSpectrum, preprocess

__version__ = "0.1.0"

__all__ = [
    "analysis", "codecs", "render", "signal_core",
    "TextureCode", "decode", "encode", "DriveConfig", "prepare_drive",
    "FrequencyResponse", "FrictionRecording", "MagnitudeSpectrum", "preprocess",
]
