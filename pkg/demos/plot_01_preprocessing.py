"""
From friction recording to texture spectrum
===========================================

A finger sliding over a texture produces a lateral force with a large
friction offset and a small texture-dependent ripple. This script builds a
synthetic 10 s recording, finds the sweeps, and averages one 4000-sample
Hann frame per sweep into a 5 Hz spectrum band-limited to 20-1000 Hz.
"""

import numpy as np

from haptex.signal_core import combine_lateral, detect_sweeps, preprocess
from haptex.synthetic import synthetic_recording

###############################################################################
# A recording: two lateral channels at 20 kHz. The ripple lives in 60-400 Hz.
rec = synthetic_recording(duration_s=10.0, texture_band=(60.0, 400.0), seed=1)
print(rec.channels.shape, rec.sample_rate_hz)

###############################################################################
# The two axes are merged per frequency bin, keeping total energy.
y = combine_lateral(*rec.channels)
print("energy in :", float(np.sum(rec.channels**2)))
print("energy out:", float(np.sum(y**2)))

###############################################################################
# Sweeps are the stretches where the rectified force exceeds its mean.
sweeps = detect_sweeps(y)
for s in sweeps[:5]:
    print(f"sweep {s.start_index:6d}..{s.end_index:6d}  ({len(s) / rec.sample_rate_hz:.2f} s)")
print(len(sweeps), "sweeps")

###############################################################################
# The whole chain in one call.
result = preprocess(rec)
spec = result.spectrum
print(f"{result.n_frames} frames, {spec.bin_hz:g} Hz bins, band {spec.band}")

f = spec.freqs
inside = spec.in_band()
strongest = f[inside][np.argsort(spec.magnitudes[inside])[-5:]]
print("strongest bins (Hz):", np.sort(strongest))
print("energy share 60-400 Hz:",
      float(np.sum(spec.magnitudes[(f >= 60) & (f <= 400)] ** 2) / np.sum(spec.magnitudes**2)))
