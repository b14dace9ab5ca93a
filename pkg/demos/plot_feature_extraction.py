"""
From a raw trial to feature vectors
===================================

Filter a multichannel trial, estimate its spectrum and build a few of the
named feature sets.
"""

import numpy as np

from affecteval.features import (
    TrialRecording,
    apply_filter,
    band_power,
    design_bandpass_fir,
    extract_feature_sets,
    FrequencyBand,
    welch_psd,
)

fs = 128.0
t = np.arange(int(8 * fs)) / fs
rng = np.random.default_rng(0)
channels = ("Fp1", "Fp2", "F3", "F4", "F7", "F8")
x = rng.standard_normal((len(channels), t.size))
x[3] += 2.0 * np.sin(2 * np.pi * 10 * t)  # strong alpha on F4
trial = TrialRecording(x, fs, channels, "demo")

# %%
# 4-45 Hz windowed-sinc bandpass, applied forwards so the output is shorter
kernel = design_bandpass_fir(4, 45, fs, 129)
print("gain at 1, 10, 60 Hz (dB):", np.round(kernel.response_db([1, 10, 60]), 1))
filtered = apply_filter(trial, kernel)
print("samples before/after:", trial.n_samples, filtered.n_samples)

# %%
spec = welch_psd(filtered.channel("F4"), fs)
for name in ("theta", "alpha", "beta1"):
    print(name, round(band_power(spec, FrequencyBand.named(name)), 4))

# %%
# Alpha on the right hemisphere pushes the alpha asymmetry positive
sets = extract_feature_sets(filtered, ["PASI+FASI", "TBR1", "Hjorth", "GammaP"])
for name, fv in sets.items():
    print(name, fv.values.size, "values", fv.notes or "")
print(dict(zip(sets["PASI+FASI"].names, np.round(sets["PASI+FASI"].values, 3).tolist())))
