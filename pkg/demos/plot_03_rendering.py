"""
Driving an electroadhesive display
==================================

Electroadhesive force grows with the square of the applied voltage, so the
texture signal is square-rooted before it modulates a 7 kHz carrier. The
skin demodulates the result and feels the original waveform.
"""

import numpy as np

from haptex.codecs.base import SbetaCode, TextureCode
from haptex.render import DriveConfig, OverVoltageError, modulate, prepare_drive
from haptex.signal_core import FrequencyResponse

code = TextureCode(SbetaCode(2.0, 5.0), 20000.0)
cfg = DriveConfig(carrier_hz=7000.0, gain_v=100.0, output_rate_hz=80000.0)

###############################################################################
# A display that attenuates high frequencies. Its response is divided out
# before modulation.
display = FrequencyResponse(np.array([0.0, 300.0, 1000.0, 10000.0]), np.array([1.0, 0.8, 0.5, 0.5]))
drive = prepare_drive(code, display, cfg, n_samples=20_000, seed=3)
print(f"{drive.samples.size} samples at {drive.rate_hz:g} Hz, peak {drive.peak_v:.1f} V")

###############################################################################
# Where the energy sits: sidebands around the carrier, almost nothing in
# the tactile band itself.
P = np.abs(np.fft.rfft(drive.samples * np.hanning(drive.samples.size))) ** 2
f = np.fft.rfftfreq(drive.samples.size, 1 / drive.rate_hz)
base = P[f < 1000].sum()
carrier = P[(f > 5000) & (f < 9000)].sum()
print(f"baseband / carrier band: {10 * np.log10(base / carrier):.1f} dB")

###############################################################################
# Squaring the drive and low-passing recovers the normalised texture,
# scaled by the gain squared.
V = np.fft.rfft(drive.samples**2)
V[f > 3000] = 0
envelope = 2 * np.fft.irfft(V, drive.samples.size)
print(f"recovered force envelope: {envelope.min():.1f} .. {envelope.max():.1f} V^2")

###############################################################################
# Drives above 150 V are refused unless clipping is asked for.
try:
    modulate(np.r_[1.0, np.zeros(99)], DriveConfig(gain_v=200.0))
except OverVoltageError as exc:
    print("refused:", exc)
