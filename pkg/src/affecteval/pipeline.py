"""Dataset ingestion, experiment orchestration and report emission.

A dataset is described by a JSON manifest; each trial's signal is a headerless
CSV with one row per time sample and one column per channel, in manifest
channel order.  An experiment evaluates every
(participant x dimension x feature set x classifier) cell and records one
:class:`ExperimentResult` per cell, degenerate cells included.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from affecteval.classifiers import (
    DIMENSIONS,
    ClassifierSpec,
    CvScheme,
    LabeledDataset,
    cross_validate,
    threshold_labels,
)
from affecteval.features import (
    BANDS,
    DEFAULT_FRONTAL_PAIRS,
    FEATURE_SETS,
    PCA_VARIANCE_FRACTION,
    FeatureConfig,
    TrialRecording,
    apply_filter,
    design_bandpass_fir,
    extract_feature_sets,
)
from affecteval.metrics import (
    accuracy,
    balanced_accuracy,
    class_bias,
    confusion_matrix,
    macro_f1,
    micro_f1,
    quality_flags,
)
from affecteval.posterior import (
    DEFAULT_GRID_SIZE,
    balanced_accuracy_posterior,
    credible_interval,
    group_proportion_posterior,
    is_above_chance,
    two_sample_ttest,
)

log = logging.getLogger(__name__)

DEFAULT_FIR_ORDER = 129

RESULT_COLUMNS = (
    "participant_id", "dimension", "feature_set", "classifier", "n_trials", "class_bias",
    "accuracy", "balanced_accuracy", "bacc_ci_low", "bacc_ci_high", "micro_f1", "macro_f1",
    "above_chance", "quality_flags",
)
SUMMARY_COLUMNS = (
    "dimension", "feature_set", "classifier", "n_participants", "n_valid", "mean_class_bias",
    "mean_accuracy", "mean_balanced_accuracy", "mean_bacc_ci_low", "mean_micro_f1",
    "mean_macro_f1", "n_above_chance",
)
FIGURE4_COLUMNS = ("feature_set", "dimension", "classifier", "accuracy", "bacc", "miF1", "maF1")


class DatasetError(ValueError):
    pass


# -- manifest ---------------------------------------------------------------------

@dataclass(frozen=True)
class TrialEntry:
    trial_id: str
    signal_path: Path
    ratings: dict


@dataclass(frozen=True)
class ParticipantEntry:
    participant_id: str
    trials: tuple[TrialEntry, ...]


@dataclass(frozen=True)
class DatasetManifest:
    name: str
    sample_rate_hz: float
    channel_labels: tuple[str, ...]
    rating_scale_max: int
    participants: tuple[ParticipantEntry, ...]
    split_points: dict = field(default_factory=dict)

    @property
    def default_split(self) -> float:
        # 9-point scale splits at 5, 5-point at 3
        return (self.rating_scale_max + 1) / 2.0

    def split_for(self, participant_id: str, dimension: str) -> float:
        override = self.split_points.get(participant_id)
        if override is None:
            return self.default_split
        if isinstance(override, dict):
            return float(override.get(dimension, self.default_split))
        return float(override)

    @classmethod
    def load(cls, path) -> "DatasetManifest":
        path = Path(path)
        try:
            raw = json.loads(path.read_text())
        except FileNotFoundError:
            raise DatasetError(f"manifest not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise DatasetError(f"manifest {path} is not valid JSON: {exc}") from None
        base = path.parent
        required = ("name", "sample_rate_hz", "channel_labels", "rating_scale_max", "participants")
        missing = [k for k in required if k not in raw]
        if missing:
            raise DatasetError(f"manifest {path} lacks keys {missing}")
        scale = int(raw["rating_scale_max"])
        splits = dict(raw.get("split_points") or {})
        for pid, s in splits.items():
            vals = s.values() if isinstance(s, dict) else [s]
            if any(not 1 <= float(v) <= scale for v in vals):
                raise DatasetError(f"split override for participant {pid} lies outside the 1..{scale} scale")
        participants = []
        for p in raw["participants"]:
            trials = []
            for t in p["trials"]:
                sp = Path(t["signal_path"])
                trials.append(TrialEntry(str(t["trial_id"]), sp if sp.is_absolute() else base / sp,
                                         dict(t["ratings"])))
            participants.append(ParticipantEntry(str(p["participant_id"]), tuple(trials)))
        return cls(
            name=str(raw["name"]),
            sample_rate_hz=float(raw["sample_rate_hz"]),
            channel_labels=tuple(raw["channel_labels"]),
            rating_scale_max=scale,
            participants=tuple(participants),
            split_points=splits,
        )


@dataclass
class Dataset:
    manifest: DatasetManifest
    trials: dict[str, list[TrialRecording]]
    ratings: dict[str, dict[str, np.ndarray]]

    @property
    def n_trials(self) -> int:
        return sum(len(v) for v in self.trials.values())


def read_signal(path: Path) -> np.ndarray:
    """Load a [time x channel] CSV and return it as [channel x time]."""
    data = np.loadtxt(path, delimiter=",", ndmin=2)
    return data.T


def load_dataset(manifest_path, min_samples: int = 2 * DEFAULT_FIR_ORDER) -> Dataset:
    """Read and validate every trial named in the manifest."""
    manifest = DatasetManifest.load(manifest_path)
    n_ch = len(manifest.channel_labels)
    trials: dict[str, list[TrialRecording]] = {}
    ratings: dict[str, dict[str, np.ndarray]] = {}
    for p in manifest.participants:
        recs = []
        per_dim = {d: [] for d in DIMENSIONS}
        for t in p.trials:
            if not t.signal_path.exists():
                raise DatasetError(f"trial {t.trial_id}: signal file not found: {t.signal_path}")
            x = read_signal(t.signal_path)
            if x.shape[0] != n_ch:
                raise DatasetError(
                    f"trial {t.trial_id}: {x.shape[0]} channels in {t.signal_path}, manifest lists {n_ch}"
                )
            if x.shape[1] < min_samples:
                raise DatasetError(
                    f"trial {t.trial_id}: {x.shape[1]} samples, need at least {min_samples}"
                )
            if not np.all(np.isfinite(x)):
                raise DatasetError(f"trial {t.trial_id}: non-finite samples")
            for d in DIMENSIONS:
                if d not in t.ratings:
                    raise DatasetError(f"trial {t.trial_id}: missing {d} rating")
                r = float(t.ratings[d])
                if not 1 <= r <= manifest.rating_scale_max:
                    raise DatasetError(
                        f"trial {t.trial_id}: {d} rating {r} outside 1..{manifest.rating_scale_max}"
                    )
                per_dim[d].append(r)
            recs.append(TrialRecording(x, manifest.sample_rate_hz, manifest.channel_labels,
                                       t.trial_id, p.participant_id))
        trials[p.participant_id] = recs
        ratings[p.participant_id] = {d: np.asarray(v) for d, v in per_dim.items()}
    return Dataset(manifest, trials, ratings)


# -- configuration ----------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    manifest_path: Path
    feature_sets: tuple[str, ...] = ("BetaP",)
    classifiers: tuple[ClassifierSpec, ...] = (ClassifierSpec(),)
    cv: CvScheme = CvScheme()
    alpha: float = 0.05
    frontal_pairs: tuple[tuple[str, str], ...] = DEFAULT_FRONTAL_PAIRS
    bands: dict = field(default_factory=dict)
    seed: int = 0
    output_dir: Path = Path("results")
    dimensions: tuple[str, ...] = DIMENSIONS
    bandpass: dict | None = None
    permute_labels: bool = False

    def __post_init__(self):
        if not self.feature_sets:
            raise ValueError("no feature sets selected")
        for s in self.feature_sets:
            if s not in FEATURE_SETS:
                raise ValueError(f"unknown feature set {s!r}")
        if not self.classifiers:
            raise ValueError("no classifiers selected")
        if not self.dimensions or any(d not in DIMENSIONS for d in self.dimensions):
            raise ValueError(f"dimensions must be a nonempty subset of {DIMENSIONS}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        unknown_bands = set(self.bands) - set(BANDS)
        if unknown_bands:
            raise ValueError(f"unknown band overrides {sorted(unknown_bands)}")
        if self.bandpass is not None:
            extra = set(self.bandpass) - {"low_hz", "high_hz", "order"}
            if extra:
                raise ValueError(f"unknown bandpass keys {sorted(extra)}")

    @classmethod
    def from_dict(cls, raw: dict, base_dir: Path | None = None) -> "ExperimentConfig":
        allowed = {f.name for f in fields(cls)}
        unknown = set(raw) - allowed
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "manifest_path" not in raw:
            raise ValueError("config needs manifest_path")
        base = base_dir or Path(".")
        kw = dict(raw)

        def resolve(p):
            p = Path(p)
            return p if p.is_absolute() else base / p

        kw["manifest_path"] = resolve(raw["manifest_path"])
        if "output_dir" in raw:
            kw["output_dir"] = resolve(raw["output_dir"])
        if "feature_sets" in raw:
            kw["feature_sets"] = tuple(raw["feature_sets"])
        if "classifiers" in raw:
            kw["classifiers"] = tuple(ClassifierSpec.from_dict(c) for c in raw["classifiers"])
        if "cv" in raw:
            kw["cv"] = CvScheme(**raw["cv"])
        if "frontal_pairs" in raw:
            kw["frontal_pairs"] = tuple(tuple(p) for p in raw["frontal_pairs"])
        if "dimensions" in raw:
            kw["dimensions"] = tuple(raw["dimensions"])
        if "bands" in raw:
            kw["bands"] = {k: tuple(v) for k, v in raw["bands"].items()}
        return cls(**kw)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        path = Path(path)
        return cls.from_dict(json.loads(path.read_text()), path.parent)

    def feature_config(self) -> FeatureConfig:
        bands = dict(BANDS)
        bands.update(self.bands)
        max_hz = 45.0 if self.bandpass is None else float(self.bandpass.get("high_hz", 45.0))
        return FeatureConfig(frontal_pairs=self.frontal_pairs, bands=bands, max_hz=max_hz)

    @property
    def min_samples(self) -> int:
        order = DEFAULT_FIR_ORDER if self.bandpass is None else int(self.bandpass.get("order", DEFAULT_FIR_ORDER))
        return 2 * order


# -- results ----------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentResult:
    participant_id: str
    dimension: str
    feature_set: str
    classifier: str
    n_trials: int
    class_bias: float
    accuracy: float
    balanced_accuracy: float
    bacc_ci_low: float
    bacc_ci_high: float
    micro_f1: float
    macro_f1: float
    above_chance: bool
    quality_flags: tuple[str, ...] = ()

    @property
    def valid(self) -> bool:
        return not math.isnan(self.balanced_accuracy)


def unit_seed(seed: int, *parts: str) -> int:
    """Seed for one work unit, independent of execution order."""
    key = "|".join([str(seed), *parts]).encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:4], "little")


def _degenerate(pid, dim, fs, clf, labels, flags) -> ExperimentResult:
    nan = float("nan")
    bias = class_bias(labels) if len(labels) else nan
    return ExperimentResult(pid, dim, fs, clf, len(labels), bias, nan, nan, nan, nan, nan, nan,
                            False, tuple(flags))


def evaluate_cell(data: LabeledDataset, participant_id: str, feature_set: str, spec: ClassifierSpec,
                  cv: CvScheme, alpha: float = 0.05, extra_flags: Sequence[str] = ()) -> ExperimentResult:
    """Cross-validate one cell and compute its metric bundle."""
    dim = data.dimension
    labels = data.labels
    flags = list(extra_flags)
    if np.unique(labels).size < 2:
        return _degenerate(participant_id, dim, feature_set, spec.label, labels,
                           flags + ["single_class_labels"])
    try:
        preds = cross_validate(data, cv, spec,
                               pca_fraction=PCA_VARIANCE_FRACTION if feature_set == "All-PCA" else None)
    except ValueError as exc:
        log.warning("cell %s/%s/%s/%s failed: %s", participant_id, dim, feature_set, spec.label, exc)
        return _degenerate(participant_id, dim, feature_set, spec.label, labels,
                           flags + ["cv_failed:" + str(exc).replace(";", " ")])
    flags += preds.flags
    cm = confusion_matrix(preds.true_labels, preds.predicted_labels, 2)
    flags += quality_flags(cm)
    post = balanced_accuracy_posterior(cm, DEFAULT_GRID_SIZE)
    ci = credible_interval(post, alpha)
    return ExperimentResult(
        participant_id=participant_id,
        dimension=dim,
        feature_set=feature_set,
        classifier=spec.label,
        n_trials=len(labels),
        class_bias=class_bias(labels),
        accuracy=accuracy(cm),
        balanced_accuracy=balanced_accuracy(cm),
        bacc_ci_low=ci.low,
        bacc_ci_high=ci.high,
        micro_f1=micro_f1(cm),
        macro_f1=macro_f1(cm),
        above_chance=is_above_chance(ci, cm.m),
        quality_flags=tuple(flags),
    )


def _run_participant(config: ExperimentConfig, manifest: DatasetManifest, pid: str,
                     trials: list[TrialRecording], ratings: dict[str, np.ndarray]) -> list[ExperimentResult]:
    if config.bandpass is not None:
        kernel = design_bandpass_fir(
            float(config.bandpass.get("low_hz", 4.0)),
            float(config.bandpass.get("high_hz", 45.0)),
            manifest.sample_rate_hz,
            int(config.bandpass.get("order", DEFAULT_FIR_ORDER)),
        )
        trials = [apply_filter(t, kernel) for t in trials]
    fcfg = config.feature_config()
    per_trial = [extract_feature_sets(t, config.feature_sets, fcfg) for t in trials]
    trial_ids = tuple(t.trial_id for t in trials)
    out = []
    for dim in config.dimensions:
        labels = threshold_labels(ratings[dim], manifest.rating_scale_max, manifest.split_for(pid, dim))
        if config.permute_labels:
            rng = np.random.default_rng(unit_seed(config.seed, pid, dim, "permute"))
            labels = rng.permutation(labels)
        for fs in config.feature_sets:
            x = np.vstack([ft[fs].values for ft in per_trial])
            notes = sorted({n for ft in per_trial for n in ft[fs].notes})
            data = LabeledDataset(x, labels, trial_ids, dim)
            for spec in config.classifiers:
                seed = unit_seed(config.seed, pid, dim, fs, spec.label)
                cv = CvScheme(config.cv.kind, config.cv.k, seed)
                spec_seeded = ClassifierSpec(spec.type, spec.C, spec.gamma, spec.k, seed)
                res = evaluate_cell(data, pid, fs, spec_seeded, cv, config.alpha, notes)
                out.append(res)
    return out


def _sort_key(config: ExperimentConfig):
    dim_order = {d: i for i, d in enumerate(DIMENSIONS)}
    fs_order = {s: i for i, s in enumerate(FEATURE_SETS)}
    return lambda r: (r.participant_id, dim_order[r.dimension], fs_order[r.feature_set], r.classifier)


def run_experiment(config: ExperimentConfig, jobs: int = 1) -> list[ExperimentResult]:
    """Evaluate every cell of the experiment grid; results are sorted deterministically."""
    dataset = load_dataset(config.manifest_path, config.min_samples)
    pids = list(dataset.trials)
    args = [(config, dataset.manifest, pid, dataset.trials[pid], dataset.ratings[pid]) for pid in pids]
    results: list[ExperimentResult] = []
    if jobs > 1 and len(pids) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for chunk in pool.map(_run_participant, *zip(*args)):
                results.extend(chunk)
    else:
        for a in args:
            results.extend(_run_participant(*a))
    return sorted(results, key=_sort_key(config))


# -- aggregation ------------------------------------------------------------------

@dataclass
class Summary:
    rows: list[dict]
    group: dict[str, dict]
    ttests: list[dict]


def _mean(values: Iterable[float]) -> float:
    vals = [v for v in values if not math.isnan(v)]
    # fsum is exactly rounded, so the mean is independent of participant order
    return math.fsum(vals) / len(vals) if vals else float("nan")


def aggregate(results: Sequence[ExperimentResult], alpha: float = 0.05) -> Summary:
    """Participant-averaged tables, group significance and between-dimension t-tests."""
    if not results:
        raise ValueError("no results to aggregate")
    dim_order = {d: i for i, d in enumerate(DIMENSIONS)}
    fs_order = {s: i for i, s in enumerate(FEATURE_SETS)}
    cells: dict[tuple, list[ExperimentResult]] = {}
    for r in results:
        cells.setdefault((r.dimension, r.feature_set, r.classifier), []).append(r)
    rows = []
    for key in sorted(cells, key=lambda k: (dim_order[k[0]], fs_order[k[1]], k[2])):
        rs = cells[key]
        valid = [r for r in rs if r.valid]
        rows.append({
            "dimension": key[0],
            "feature_set": key[1],
            "classifier": key[2],
            "n_participants": len({r.participant_id for r in rs}),
            "n_valid": len(valid),
            "mean_class_bias": _mean(r.class_bias for r in rs),
            "mean_accuracy": _mean(r.accuracy for r in valid),
            "mean_balanced_accuracy": _mean(r.balanced_accuracy for r in valid),
            "mean_bacc_ci_low": _mean(r.bacc_ci_low for r in valid),
            "mean_micro_f1": _mean(r.micro_f1 for r in valid),
            "mean_macro_f1": _mean(r.macro_f1 for r in valid),
            "n_above_chance": sum(r.above_chance for r in valid),
        })

    group = {}
    dims = [d for d in DIMENSIONS if any(row["dimension"] == d for row in rows)]
    for d in dims:
        candidates = [row for row in rows if row["dimension"] == d and row["n_valid"] > 0]
        if not candidates:
            continue
        best = max(candidates, key=lambda row: row["mean_balanced_accuracy"])
        g = group_proportion_posterior(best["n_above_chance"], best["n_valid"], alpha)
        group[d] = {
            "feature_set": best["feature_set"],
            "classifier": best["classifier"],
            "n": g.n_participants,
            "n_above": g.n_above_chance,
            "proportion": g.proportion,
            "ci_low": g.interval.low,
            "ci_high": g.interval.high,
        }

    ttests = []
    vectors = {d: sorted(r.balanced_accuracy for r in results if r.dimension == d and r.valid) for d in dims}
    for i, a in enumerate(dims):
        for b in dims[i + 1:]:
            if len(vectors[a]) < 2 or len(vectors[b]) < 2:
                continue
            t = two_sample_ttest(vectors[a], vectors[b], alpha)
            ttests.append({
                "dims": [a, b],
                "t": t.t if math.isfinite(t.t) else None,
                "p": t.p,
                "reject": t.reject,
                "degenerate": t.degenerate,
            })
    return Summary(rows, group, ttests)


# -- report files -------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(v)
    if isinstance(v, (tuple, list)):
        return ";".join(v)
    return str(v)


def _write_csv(path: Path, columns: Sequence[str], rows: Iterable[dict]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(row[c]) for c in columns])


def emit_report(results: Sequence[ExperimentResult], summary: Summary, output_dir) -> dict[str, Path]:
    """Write results.csv, summary.csv, group_stats.json and figure4_data.csv."""
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "results": out / "results.csv",
        "summary": out / "summary.csv",
        "group_stats": out / "group_stats.json",
        "figure4": out / "figure4_data.csv",
    }
    _write_csv(paths["results"], RESULT_COLUMNS, (asdict(r) for r in results))
    _write_csv(paths["summary"], SUMMARY_COLUMNS, summary.rows)
    fig_rows = [{
        "feature_set": r["feature_set"], "dimension": r["dimension"], "classifier": r["classifier"],
        "accuracy": r["mean_accuracy"], "bacc": r["mean_balanced_accuracy"],
        "miF1": r["mean_micro_f1"], "maF1": r["mean_macro_f1"],
    } for r in summary.rows]
    _write_csv(paths["figure4"], FIGURE4_COLUMNS, fig_rows)
    with open(paths["group_stats"], "w") as fh:
        json.dump({"dimensions": summary.group, "ttests": summary.ttests}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return paths


def read_results(path) -> list[ExperimentResult]:
    """Parse a results.csv written by :func:`emit_report`."""
    path = Path(path)
    if path.is_dir():
        path = path / "results.csv"
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != RESULT_COLUMNS:
            raise ValueError(f"{path} does not have the results.csv column layout")
        for row in reader:
            def num(k):
                return float(row[k]) if row[k] != "" else float("nan")
            out.append(ExperimentResult(
                participant_id=row["participant_id"],
                dimension=row["dimension"],
                feature_set=row["feature_set"],
                classifier=row["classifier"],
                n_trials=int(row["n_trials"]),
                class_bias=num("class_bias"),
                accuracy=num("accuracy"),
                balanced_accuracy=num("balanced_accuracy"),
                bacc_ci_low=num("bacc_ci_low"),
                bacc_ci_high=num("bacc_ci_high"),
                micro_f1=num("micro_f1"),
                macro_f1=num("macro_f1"),
                above_chance=row["above_chance"] == "true",
                quality_flags=tuple(f for f in row["quality_flags"].split(";") if f),
            ))
    return out


# -- synthetic data -------------------------------------------------------------------

SYNTH_CHANNELS = ("Fp1", "Fp2", "F3", "F4", "F7", "F8", "C3", "C4")


def generate_synthetic_dataset(out_dir, participants: int = 16, trials: int = 60, snr_db: float = 10.0,
                               seed: int = 0, sample_rate_hz: float = 128.0, seconds: float = 4.0,
                               channels: Sequence[str] = SYNTH_CHANNELS) -> Path:
    """Write a planted-signal dataset and a matching experiment config.

    Every channel carries unit-variance white noise plus an alpha rhythm of
    random amplitude.  Trials whose valence rating is high (>= 5 on a 9-point
    scale) also carry a beta-band sinusoid whose power is ``snr_db`` above the
    noise power inside 12-30 Hz.  Arousal and dominance ratings are unrelated
    to the signal.  Returns the manifest path.
    """
    out = Path(out_dir)
    sig_dir = out / "signals"
    sig_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    n = int(round(seconds * sample_rate_hz))
    t = np.arange(n) / sample_rate_hz
    beta_lo, beta_hi = BANDS["beta1"][0], BANDS["beta2"][1]
    noise_band_power = 2.0 / sample_rate_hz * (beta_hi - beta_lo)
    amp = math.sqrt(2.0 * noise_band_power * 10.0 ** (snr_db / 10.0))
    plist = []
    for p in range(participants):
        pid = f"s{p + 1:02d}"
        p_high = rng.uniform(0.35, 0.7)
        tlist = []
        for k in range(trials):
            tid = f"{pid}_t{k + 1:03d}"
            high = rng.random() < p_high
            valence = int(rng.integers(5, 10)) if high else int(rng.integers(1, 5))
            arousal = int(rng.integers(1, 10))
            dominance = int(rng.integers(1, 10))
            x = rng.standard_normal((len(channels), n))
            alpha_amp = rng.uniform(0.5, 2.0)
            x += alpha_amp * np.sin(2 * np.pi * rng.uniform(9, 11) * t + rng.uniform(0, 2 * np.pi))
            if high:
                f = rng.uniform(15.0, 25.0)
                phase = rng.uniform(0, 2 * np.pi, size=(len(channels), 1))
                x += amp * np.sin(2 * np.pi * f * t[None, :] + phase)
            rel = Path("signals") / f"{tid}.csv"
            np.savetxt(out / rel, x.T, delimiter=",", fmt="%.6f")
            tlist.append({"trial_id": tid, "signal_path": str(rel),
                          "ratings": {"valence": valence, "arousal": arousal, "dominance": dominance}})
        plist.append({"participant_id": pid, "trials": tlist})
    manifest = {
        "name": "synthetic-planted-beta",
        "sample_rate_hz": sample_rate_hz,
        "channel_labels": list(channels),
        "rating_scale_max": 9,
        "split_points": {},
        "participants": plist,
    }
    mpath = out / "manifest.json"
    mpath.write_text(json.dumps(manifest, indent=1) + "\n")
    config = {
        "manifest_path": "manifest.json",
        "feature_sets": ["BetaP"],
        "classifiers": [{"type": "svm"}],
        "cv": {"kind": "k_fold", "k": 10},
        "alpha": 0.05,
        "dimensions": ["valence"],
        "seed": seed,
        "output_dir": "results",
    }
    (out / "config.json").write_text(json.dumps(config, indent=1) + "\n")
    return mpath
