"""EEG feature extraction: filtering, Welch spectra, band powers, Hjorth
parameters, spectral entropy, asymmetry and ratio indices, and PCA.

Seventeen named feature sets are assembled from these scalars; see
:data:`FEATURE_SETS` and :func:`assemble_feature_set`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy import signal as sps

BANDS: dict[str, tuple[float, float]] = {
    "theta": (4.0, 8.0),
    "alpha": (8.0, 12.0),
    "beta1": (12.0, 18.0),
    "beta2": (18.0, 30.0),
    "gamma": (31.0, 63.0),
    "broadband": (4.0, 45.0),
}

FEATURE_SETS: tuple[str, ...] = (
    "PASI", "FAI", "TBR1", "TBR2", "ThetaP", "AlphaP", "BetaP", "GammaP", "TBR-C",
    "TABG", "Hjorth", "PASI+FASI", "Avg-Entropy", "PSD", "BARatio", "All", "All-PCA",
)

# (left, right) electrode pairs; optional pairs are used only when present
DEFAULT_FRONTAL_PAIRS: tuple[tuple[str, str], ...] = (("F3", "F4"), ("F7", "F8"))
DEFAULT_OPTIONAL_PAIRS: tuple[tuple[str, str], ...] = (("Fp1", "Fp2"),)
PCA_VARIANCE_FRACTION = 0.98


@dataclass(frozen=True)
class FrequencyBand:
    name: str
    low_hz: float
    high_hz: float

    def __post_init__(self):
        if not self.low_hz < self.high_hz:
            raise ValueError(f"band {self.name}: low edge must be below high edge")

    @classmethod
    def named(cls, name: str) -> "FrequencyBand":
        try:
            low, high = BANDS[name]
        except KeyError:
            raise ValueError(f"unknown band {name!r}; expected one of {sorted(BANDS)}") from None
        return cls(name, low, high)


@dataclass(frozen=True)
class TrialRecording:
    samples: np.ndarray
    sample_rate_hz: float
    channel_labels: tuple[str, ...]
    trial_id: str = ""
    participant_id: str = ""

    def __post_init__(self):
        x = np.asarray(self.samples, dtype=float)
        if x.ndim != 2:
            raise ValueError(f"trial {self.trial_id}: samples must be [channel x time]")
        if x.shape[1] < 2:
            raise ValueError(f"trial {self.trial_id}: need at least 2 samples per channel")
        if not self.sample_rate_hz > 0:
            raise ValueError(f"trial {self.trial_id}: sample rate must be positive")
        labels = tuple(self.channel_labels)
        if len(labels) != x.shape[0]:
            raise ValueError(
                f"trial {self.trial_id}: {x.shape[0]} channels but {len(labels)} channel labels"
            )
        if len(set(labels)) != len(labels):
            raise ValueError(f"trial {self.trial_id}: channel labels must be unique")
        object.__setattr__(self, "samples", x)
        object.__setattr__(self, "channel_labels", labels)

    @property
    def n_samples(self) -> int:
        return self.samples.shape[1]

    def channel(self, label: str) -> np.ndarray:
        try:
            return self.samples[self.channel_labels.index(label)]
        except ValueError:
            raise ValueError(f"trial {self.trial_id}: missing channel {label}") from None


@dataclass(frozen=True)
class Spectrum:
    frequencies_hz: np.ndarray
    psd: np.ndarray

    @property
    def resolution_hz(self) -> float:
        return float(self.frequencies_hz[1] - self.frequencies_hz[0])


@dataclass(frozen=True)
class FilterKernel:
    coefficients: np.ndarray
    low_hz: float
    high_hz: float
    sample_rate_hz: float

    @property
    def order(self) -> int:
        return self.coefficients.size

    def response_db(self, freq_hz) -> np.ndarray:
        """Magnitude response in dB at the given frequencies."""
        freq_hz = np.atleast_1d(np.asarray(freq_hz, dtype=float))
        _, h = sps.freqz(self.coefficients, worN=freq_hz, fs=self.sample_rate_hz)
        return 20.0 * np.log10(np.maximum(np.abs(h), 1e-300))


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    names: tuple[str, ...]
    feature_set: str
    trial_id: str = ""
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.values) != len(self.names):
            raise ValueError("feature values and names differ in length")
        if len(set(self.names)) != len(self.names):
            raise ValueError("feature names must be unique")


@dataclass(frozen=True)
class FeatureConfig:
    frontal_pairs: tuple[tuple[str, str], ...] = DEFAULT_FRONTAL_PAIRS
    optional_pairs: tuple[tuple[str, str], ...] = DEFAULT_OPTIONAL_PAIRS
    bands: Mapping[str, tuple[float, float]] = field(default_factory=lambda: dict(BANDS))
    # content above this is removed by the acquisition bandpass
    max_hz: float = 45.0
    segment_len: int | None = None
    overlap_fraction: float = 0.5
    psd_step_hz: float = 1.0

    def band(self, name: str) -> FrequencyBand:
        low, high = self.bands[name]
        return FrequencyBand(name, float(low), float(high))


@dataclass(frozen=True)
class PcaProjection:
    mean: np.ndarray
    components: np.ndarray
    explained_variance: np.ndarray
    variance_fraction: float

    @property
    def k(self) -> int:
        return self.components.shape[0]

    def transform(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.mean) @ self.components.T

    def inverse_transform(self, z: np.ndarray) -> np.ndarray:
        return np.asarray(z, dtype=float) @ self.components + self.mean


# -- filtering ---------------------------------------------------------------

def _windowed_lowpass(cutoff_hz: float, sample_rate_hz: float, taps: int) -> np.ndarray:
    n = np.arange(taps) - (taps - 1) / 2.0
    fc = cutoff_hz / sample_rate_hz
    h = 2.0 * fc * np.sinc(2.0 * fc * n) * np.hamming(taps)
    return h / h.sum()


def design_bandpass_fir(low_hz: float, high_hz: float, sample_rate_hz: float, order: int) -> FilterKernel:
    """Hamming-windowed sinc bandpass with ``order`` taps.

    Built as the difference of two unit-DC-gain lowpass kernels, so the taps
    sum to zero and DC is rejected exactly up to rounding.
    """
    if not 0 < low_hz < high_hz < sample_rate_hz / 2.0:
        raise ValueError(
            f"invalid band edges ({low_hz}, {high_hz}) Hz for sample rate {sample_rate_hz} Hz"
        )
    if order < 11 or order % 2 == 0:
        raise ValueError(f"order must be odd and >= 11, got {order}")
    h = _windowed_lowpass(high_hz, sample_rate_hz, order) - _windowed_lowpass(low_hz, sample_rate_hz, order)
    return FilterKernel(h, float(low_hz), float(high_hz), float(sample_rate_hz))


def apply_filter(trial: TrialRecording, kernel: FilterKernel) -> TrialRecording:
    """Zero-phase FIR filtering with group-delay compensation.

    Edges where the kernel overhangs the data are dropped, so the output is
    ``order - 1`` samples shorter than the input.
    """
    if kernel.sample_rate_hz != trial.sample_rate_hz:
        raise ValueError("kernel designed for a different sample rate")
    if trial.n_samples <= kernel.order:
        raise ValueError(
            f"trial {trial.trial_id}: {trial.n_samples} samples is not longer than the {kernel.order}-tap kernel"
        )
    out = sps.fftconvolve(trial.samples, kernel.coefficients[None, :], mode="valid", axes=1)
    return TrialRecording(out, trial.sample_rate_hz, trial.channel_labels, trial.trial_id, trial.participant_id)


# -- spectra -------------------------------------------------------------------

def default_segment_len(n: int) -> int:
    return max(2, min(256, n // 4))


def welch_psd(
    signal,
    sample_rate_hz: float,
    segment_len: int | None = None,
    overlap_fraction: float = 0.5,
    window: str = "hamming",
) -> Spectrum:
    """One-sided Welch PSD (power per Hz) with per-segment mean removal."""
    x = np.asarray(signal, dtype=float)
    if x.ndim != 1:
        raise ValueError("welch_psd expects a 1-D signal")
    if segment_len is None:
        segment_len = default_segment_len(x.size)
    if segment_len > x.size:
        raise ValueError(f"segment length {segment_len} exceeds signal length {x.size}")
    if segment_len < 2:
        raise ValueError("segment length must be at least 2")
    if not 0.0 <= overlap_fraction < 1.0:
        raise ValueError("overlap fraction must lie in [0, 1)")
    if window != "hamming":
        raise ValueError(f"unsupported window {window!r}")
    noverlap = int(math.floor(segment_len * overlap_fraction))
    freqs, psd = sps.welch(
        x,
        fs=sample_rate_hz,
        window="hamming",
        nperseg=segment_len,
        noverlap=noverlap,
        detrend="constant",
        scaling="density",
        return_onesided=True,
        average="mean",
    )
    return Spectrum(freqs, np.clip(psd, 0.0, None))


def band_power(spectrum: Spectrum, band: FrequencyBand) -> float:
    """Trapezoidal integral of the PSD over the band, edges interpolated."""
    f, p = spectrum.frequencies_hz, spectrum.psd
    if band.low_hz < f[0] or band.high_hz > f[-1]:
        raise ValueError(
            f"band {band.name} ({band.low_hz}-{band.high_hz} Hz) exceeds spectrum coverage up to {f[-1]} Hz"
        )
    inside = (f > band.low_hz) & (f < band.high_hz)
    xs = np.concatenate([[band.low_hz], f[inside], [band.high_hz]])
    ys = np.concatenate([[np.interp(band.low_hz, f, p)], p[inside], [np.interp(band.high_hz, f, p)]])
    return float(np.trapezoid(ys, xs))


def spectral_entropy(spectrum: Spectrum, band: FrequencyBand | None = FrequencyBand("broadband", 4.0, 45.0)) -> float:
    """Shannon entropy of the normalised spectrum in bits, divided by log2 N.

    N counts the bins inside ``band`` (edges inclusive); ``band=None`` uses
    every bin.
    """
    f, p = spectrum.frequencies_hz, np.asarray(spectrum.psd, dtype=float)
    if band is not None:
        p = p[(f >= band.low_hz) & (f <= band.high_hz)]
    n = p.size
    total = p.sum()
    if n == 0 or not total > 0:
        raise ValueError("spectral entropy needs a spectrum with positive power")
    if n == 1:
        return 0.0
    nz = p[p > 0]
    if nz.max() == nz.min():
        # uniform over the nonzero bins: H = log2(count)
        return math.log2(nz.size) / math.log2(n)
    q = nz / total
    h = -float(np.sum(q * np.log2(q)))
    return min(1.0, max(0.0, h / math.log2(n)))


# -- time-domain descriptors ----------------------------------------------------

def hjorth_mobility(signal) -> float:
    x = np.asarray(signal, dtype=float)
    if x.size < 3:
        raise ValueError("Hjorth mobility needs at least 3 samples")
    sx = x.std()
    if sx == 0:
        raise ValueError("Hjorth mobility undefined for a constant signal")
    return float(np.diff(x).std() / sx)


def hjorth_complexity(signal) -> float:
    x = np.asarray(signal, dtype=float)
    if x.size < 4:
        raise ValueError("Hjorth complexity needs at least 4 samples")
    d = np.diff(x)
    dd = np.diff(d)
    sx, sd, sdd = x.std(), d.std(), dd.std()
    if sx == 0 or sd == 0:
        raise ValueError("Hjorth complexity undefined: degenerate variance")
    return float((sdd / sd) / (sd / sx))


# -- indices -------------------------------------------------------------------

def asymmetry_index(right_power: float, left_power: float, form: str = "log_ratio") -> float:
    """Right-vs-left power asymmetry.

    ``log_ratio`` is ``ln(R/L)``; ``normalized`` is ``ln((R-L)/(R+L))`` and is
    only defined for ``R > L``.
    """
    if not (right_power > 0 and left_power > 0):
        raise ValueError("asymmetry needs positive powers")
    if form == "log_ratio":
        return math.log(right_power / left_power)
    if form == "normalized":
        if right_power <= left_power:
            raise ValueError("normalized asymmetry requires right power > left power")
        return math.log((right_power - left_power) / (right_power + left_power))
    raise ValueError(f"unknown asymmetry form {form!r}")


def theta_beta_ratio(theta_power: float, beta_power: float) -> float:
    if not (theta_power > 0 and beta_power > 0):
        raise ValueError("theta/beta ratio needs positive powers")
    return math.log(theta_power / beta_power)


# -- PCA -------------------------------------------------------------------------

def pca_fit(features, variance_fraction: float = PCA_VARIANCE_FRACTION) -> PcaProjection:
    x = np.asarray(features, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ValueError("PCA needs a 2-D matrix with at least 2 rows")
    if not np.all(np.isfinite(x)):
        raise ValueError("PCA input contains non-finite values")
    if not 0.0 < variance_fraction <= 1.0:
        raise ValueError("variance fraction must lie in (0, 1]")
    mean = x.mean(axis=0)
    xc = x - mean
    cov = xc.T @ xc / (x.shape[0] - 1)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1]
    evals = np.clip(evals[order], 0.0, None)
    evecs = evecs[:, order]
    total = evals.sum()
    if total <= 0:
        # no variance at all: keep a single arbitrary direction
        k = 1
    else:
        cum = np.cumsum(evals) / total
        k = int(np.searchsorted(cum, variance_fraction - 1e-12) + 1)
        k = min(k, int(np.count_nonzero(evals > total * 1e-14)) or 1)
    comps = evecs[:, :k].T.copy()
    # deterministic sign: largest-magnitude loading positive
    idx = np.argmax(np.abs(comps), axis=1)
    signs = np.sign(comps[np.arange(k), idx])
    signs[signs == 0] = 1.0
    comps *= signs[:, None]
    return PcaProjection(mean, comps, evals[:k], variance_fraction)


def pca_fit_transform(features, variance_fraction: float = PCA_VARIANCE_FRACTION):
    proj = pca_fit(features, variance_fraction)
    return proj, proj.transform(features)


# -- feature sets ----------------------------------------------------------------

class _TrialFeatures:
    """Per-trial cache of spectra so several sets can share one Welch pass."""

    def __init__(self, trial: TrialRecording, config: FeatureConfig):
        self.trial = trial
        self.config = config
        self.notes: list[str] = []
        self._spectra: dict[str, Spectrum] = {}
        self._powers: dict[tuple[str, str], float] = {}

    def spectrum(self, ch: str) -> Spectrum:
        if ch not in self._spectra:
            self._spectra[ch] = welch_psd(
                self.trial.channel(ch),
                self.trial.sample_rate_hz,
                self.config.segment_len,
                self.config.overlap_fraction,
            )
        return self._spectra[ch]

    def _clipped(self, band: FrequencyBand, spec: Spectrum) -> FrequencyBand:
        high = min(band.high_hz, self.config.max_hz, float(spec.frequencies_hz[-1]))
        if high < band.high_hz:
            note = f"{band.name}_truncated_at_{high:g}Hz"
            if note not in self.notes:
                self.notes.append(note)
        if high <= band.low_hz:
            raise ValueError(f"band {band.name} lies entirely above the analysed range")
        return FrequencyBand(band.name, band.low_hz, high)

    def power(self, ch: str, band_name: str) -> float:
        key = (ch, band_name)
        if key not in self._powers:
            spec = self.spectrum(ch)
            if band_name == "beta":
                val = self.power(ch, "beta1") + self.power(ch, "beta2")
            else:
                val = band_power(spec, self._clipped(self.config.band(band_name), spec))
            self._powers[key] = val
        return self._powers[key]

    def frontal_pairs(self) -> list[tuple[str, str]]:
        labels = set(self.trial.channel_labels)
        for left, right in self.config.frontal_pairs:
            for ch in (left, right):
                if ch not in labels:
                    raise ValueError(f"trial {self.trial.trial_id}: missing channel {ch}")
        optional = [(l, r) for l, r in self.config.optional_pairs if l in labels and r in labels]
        return list(self.config.frontal_pairs) + optional

    def frontal_channels(self) -> list[str]:
        chans = []
        for left, right in self.frontal_pairs():
            chans += [left, right]
        return chans


def _per_channel(tf: _TrialFeatures, prefix: str, fn, channels=None):
    channels = tf.trial.channel_labels if channels is None else channels
    return [f"{prefix}:{ch}" for ch in channels], [fn(ch) for ch in channels]


def _pair_asym(tf: _TrialFeatures, prefix: str, band: str):
    names, vals = [], []
    for left, right in tf.frontal_pairs():
        names.append(f"{prefix}:{right}-{left}")
        vals.append(asymmetry_index(tf.power(right, band), tf.power(left, band)))
    return names, vals


def _summed_asym(tf: _TrialFeatures, prefix: str, band: str):
    pairs = tf.frontal_pairs()
    right = sum(tf.power(r, band) for _, r in pairs)
    left = sum(tf.power(l, band) for l, _ in pairs)
    return [prefix], [asymmetry_index(right, left)]


def _tbr(tf: _TrialFeatures, prefix: str, beta: str):
    return _per_channel(
        tf, prefix, lambda ch: theta_beta_ratio(tf.power(ch, "theta"), tf.power(ch, beta)), tf.frontal_channels()
    )


def _psd_bins(tf: _TrialFeatures):
    low, high = tf.config.band("broadband").low_hz, tf.config.band("broadband").high_hz
    high = min(high, tf.config.max_hz)
    targets = np.arange(low, high + 1e-9, tf.config.psd_step_hz)
    names, vals = [], []
    for ch in tf.trial.channel_labels:
        spec = tf.spectrum(ch)
        if targets[-1] > spec.frequencies_hz[-1]:
            raise ValueError("PSD feature range exceeds the spectrum")
        vals.extend(np.interp(targets, spec.frequencies_hz, spec.psd).tolist())
        names.extend(f"PSD:{ch}:{t:g}Hz" for t in targets)
    return names, vals


def _entropy(tf: _TrialFeatures, ch: str) -> float:
    spec = tf.spectrum(ch)
    return spectral_entropy(spec, tf._clipped(tf.config.band("broadband"), spec))


def _hjorth(tf: _TrialFeatures):
    names, vals = [], []
    for ch in tf.trial.channel_labels:
        x = tf.trial.channel(ch)
        names += [f"Mobility:{ch}", f"Complexity:{ch}"]
        vals += [hjorth_mobility(x), hjorth_complexity(x)]
    return names, vals


def _ba_ratio(tf: _TrialFeatures, ch: str) -> float:
    return math.log((tf.power(ch, "beta1") + tf.power(ch, "beta2")) / tf.power(ch, "alpha"))


_BASE_BUILDERS = {
    "PASI": lambda tf: _pair_asym(tf, "PASI", "broadband"),
    "FAI": lambda tf: _summed_asym(tf, "FAI", "broadband"),
    "FASI": lambda tf: _summed_asym(tf, "FASI", "alpha"),
    "TBR1": lambda tf: _tbr(tf, "TBR1", "beta1"),
    "TBR2": lambda tf: _tbr(tf, "TBR2", "beta2"),
    "ThetaP": lambda tf: _per_channel(tf, "ThetaP", lambda ch: tf.power(ch, "theta")),
    "AlphaP": lambda tf: _per_channel(tf, "AlphaP", lambda ch: tf.power(ch, "alpha")),
    "BetaP": lambda tf: _per_channel(tf, "BetaP", lambda ch: tf.power(ch, "beta")),
    "GammaP": lambda tf: _per_channel(tf, "GammaP", lambda ch: tf.power(ch, "gamma")),
    "Hjorth": _hjorth,
    "Avg-Entropy": lambda tf: _per_channel(tf, "Entropy", lambda ch: _entropy(tf, ch)),
    "PSD": _psd_bins,
    "BARatio": lambda tf: _per_channel(tf, "BARatio", lambda ch: _ba_ratio(tf, ch)),
}

_COMPOSITES = {
    "TBR-C": ("TBR1", "TBR2"),
    "TABG": ("ThetaP", "AlphaP", "BetaP", "GammaP"),
    "PASI+FASI": ("PASI", "FASI"),
    "All": ("PASI", "FAI", "FASI", "TBR1", "TBR2", "ThetaP", "AlphaP", "BetaP", "GammaP",
            "Hjorth", "Avg-Entropy", "PSD", "BARatio"),
}
# All-PCA is projected at the dataset level; per trial it carries the All vector
_COMPOSITES["All-PCA"] = _COMPOSITES["All"]


def _check_set_name(name: str) -> None:
    if name not in FEATURE_SETS:
        raise ValueError(f"unknown feature set {name!r}; expected one of {list(FEATURE_SETS)}")


def extract_feature_sets(
    trial: TrialRecording, set_names: Sequence[str], config: FeatureConfig | None = None
) -> dict[str, FeatureVector]:
    """Assemble several feature sets for one trial, sharing spectral work."""
    config = config or FeatureConfig()
    for name in set_names:
        _check_set_name(name)
    tf = _TrialFeatures(trial, config)
    base: dict[str, tuple[list[str], list[float], list[str]]] = {}

    def get(name):
        if name not in base:
            seen = len(tf.notes)
            names, vals = _BASE_BUILDERS[name](tf)
            base[name] = (names, vals, tf.notes[seen:])
        return base[name]

    out = {}
    for name in set_names:
        names, vals, notes = [], [], []
        for part in _COMPOSITES.get(name, (name,)):
            n, v, nt = get(part)
            names += n
            vals += v
            notes += [x for x in nt if x not in notes]
        values = np.asarray(vals, dtype=float)
        if not np.all(np.isfinite(values)):
            raise ValueError(f"trial {trial.trial_id}: non-finite values in feature set {name}")
        out[name] = FeatureVector(values, tuple(names), name, trial.trial_id, tuple(notes))
    return out


def assemble_feature_set(trial: TrialRecording, set_name: str, config: FeatureConfig | None = None) -> FeatureVector:
    return extract_feature_sets(trial, [set_name], config)[set_name]
