"""Acceptance suite: one PASS/FAIL line per criterion.

The lines are printed as each check finishes and repeated in the pytest
terminal summary.  Run ``python tests/test_acceptance.py`` to get just the
lines without pytest.
"""

import dataclasses
import math
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from affecteval.classifiers import LabeledDataset, _smo, knn_predict, rbf_kernel, svm_predict, svm_train
from affecteval.features import (
    FrequencyBand,
    Spectrum,
    asymmetry_index,
    band_power,
    hjorth_complexity,
    spectral_entropy,
    theta_beta_ratio,
    welch_psd,
)
from affecteval.metrics import accuracy, balanced_accuracy, confusion_matrix, micro_f1
from affecteval.pipeline import ExperimentConfig, aggregate, emit_report, generate_synthetic_dataset, \
    run_experiment
from affecteval.posterior import (
    balanced_accuracy_posterior,
    credible_interval,
    group_proportion_posterior,
    single_class_credible_interval,
)

LINES: list[str] = []


def report(name: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
    LINES.append(line)
    print(line, flush=True)
    assert ok, line


def test_group_posterior_reproduction():
    t0 = time.perf_counter()
    g = group_proportion_posterior(6, 32, 0.05)
    dt = time.perf_counter() - t0
    ok = (g.proportion == 0.1875 and abs(g.interval.low - 0.07) <= 0.02
          and abs(g.interval.high - 0.36) <= 0.02 and dt < 1.0)
    report("group posterior 6/32", ok,
           f"proportion {g.proportion}, interval ({g.interval.low:.4f}, {g.interval.high:.4f}) "
           f"vs (0.07, 0.36) +-0.02, {dt * 1e3:.1f} ms")


def test_credible_interval_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(0, 201))
        c = int(rng.integers(0, n + 1))
        ci = single_class_credible_interval(c, n, 0.05)
        draws = rng.beta(c + 1, n - c + 1, 1_000_000)
        lo, hi = np.quantile(draws, [0.025, 0.975])
        worst = max(worst, abs(ci.low - lo), abs(ci.high - hi))
    dt = time.perf_counter() - t0
    report("single-class interval vs MC", worst <= 0.005 and dt < 120,
           f"200 pairs, max endpoint error {worst:.5f} (tol 0.005), {dt:.1f} s")


def _random_cm(rng, m):
    counts = np.zeros((m, m), dtype=int)
    for k in range(m):
        n_k = int(rng.integers(1, 101))
        counts[:, k] = rng.multinomial(n_k, rng.dirichlet(np.ones(m)))
    return counts


def test_convolution_posterior_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(77)
    worst_mean = worst_ci = 0.0
    for m, count in ((2, 50), (3, 20)):
        for _ in range(count):
            counts = _random_cm(rng, m)
            post = balanced_accuracy_posterior(counts)
            ci = credible_interval(post, 0.05)
            c, n = np.diag(counts), counts.sum(axis=0)
            draws = np.mean([rng.beta(c[k] + 1, n[k] - c[k] + 1, 1_000_000) for k in range(m)], axis=0)
            lo, hi = np.quantile(draws, [0.025, 0.975])
            worst_mean = max(worst_mean, abs(post.mean() - draws.mean()))
            worst_ci = max(worst_ci, abs(ci.low - lo), abs(ci.high - hi))
    dt = time.perf_counter() - t0
    report("bAcc posterior vs MC", worst_mean <= 0.005 and worst_ci <= 0.01 and dt < 300,
           f"50 two-class + 20 three-class, max mean error {worst_mean:.5f} (tol 0.005), "
           f"max interval error {worst_ci:.5f} (tol 0.01), {dt:.1f} s")


def test_interval_coverage():
    t0 = time.perf_counter()
    rng = np.random.default_rng(99)
    hits = 0
    for _ in range(1000):
        p = rng.uniform(0, 1, 2)
        c = rng.binomial(30, p)
        counts = np.array([[c[0], 30 - c[1]], [30 - c[0], c[1]]])
        ci = credible_interval(balanced_accuracy_posterior(counts), 0.05)
        hits += ci.contains(p.mean())
    dt = time.perf_counter() - t0
    report("95% interval coverage", hits >= 930 and dt < 120,
           f"{hits}/1000 intervals contain the true bAcc (need >= 930), {dt:.1f} s")


def test_metric_identities():
    rng = np.random.default_rng(5)
    bad = []
    for i in range(10_000):
        m = int(rng.integers(2, 6))
        counts = rng.integers(0, 50, (m, m))
        counts[0, 0] += 1
        if micro_f1(counts) != accuracy(counts):
            bad.append(("micro", i))
        equal = counts.copy()
        equal[-1, :] += equal.sum(axis=0).max() - equal.sum(axis=0)
        if balanced_accuracy(equal) != accuracy(equal):
            bad.append(("equal-columns", i))
        const = np.zeros((m, m), dtype=int)
        const[int(rng.integers(0, m)), :] = rng.integers(1, 50, m)
        if balanced_accuracy(const) != float(Fraction(1, m)):
            bad.append(("constant", i))
    report("metric identities", not bad,
           f"10^4 matrices: micro-F1 == accuracy, equal-column bAcc == accuracy, constant bAcc == 1/m; "
           f"{len(bad)} violations")


def test_feature_correctness():
    checks = {}
    rng = np.random.default_rng(1)
    x = rng.standard_normal(16384)
    spec = welch_psd(x, 128.0, 256, 0.5)
    parseval = np.trapezoid(spec.psd, spec.frequencies_hz) / x.var()
    checks["Parseval"] = (abs(parseval - 1) <= 0.1, f"{parseval:.4f}")
    amp = 2.0
    s = amp * np.sin(2 * np.pi * 10 * np.arange(8192) / 128)
    bp = band_power(welch_psd(s, 128.0, 256, 0.5), FrequencyBand.named("alpha")) / (amp ** 2 / 2)
    checks["sine band power / (A^2/2)"] = (abs(bp - 1) <= 0.1, f"{bp:.4f}")
    hc = hjorth_complexity(np.sin(2 * np.pi * 2 * np.arange(10_000) / 1000))
    checks["Hjorth complexity of sine"] = (abs(hc - 1) <= 0.01, f"{hc:.5f}")
    f = np.arange(4.0)
    e_flat = spectral_entropy(Spectrum(f, np.ones(4)), None)
    e_delta = spectral_entropy(Spectrum(f, np.array([0.0, 0.0, 5.0, 0.0])), None)
    checks["entropy flat/delta"] = (e_flat == 1.0 and e_delta == 0.0, f"{e_flat}/{e_delta}")
    zero = (asymmetry_index(3.3, 3.3) == 0.0 and theta_beta_ratio(2.5, 2.5) == 0.0
            and asymmetry_index(7.0, 2.0) == -asymmetry_index(2.0, 7.0))
    checks["asymmetry/TBR symmetric cases"] = (zero, "exact" if zero else "inexact")
    ok = all(v[0] for v in checks.values())
    report("feature correctness", ok, ", ".join(f"{k} {v[1]}" for k, v in checks.items()))


def _blobs(n, seed):
    rng = np.random.default_rng(seed)
    y = np.repeat([0, 1], n // 2)
    return LabeledDataset(np.where(y[:, None] == 1, 3.0, -3.0) + 0.5 * rng.standard_normal((n, 2)), y)


def test_classifier_sanity():
    t0 = time.perf_counter()
    xor = LabeledDataset(np.array([[0, 0], [1, 1], [0, 1], [1, 0]], dtype=float), np.array([0, 0, 1, 1]))
    xor_acc = np.mean(svm_predict(svm_train(xor, 10, 1), xor.features) == xor.labels)
    train, test = _blobs(100, 1), _blobs(100, 2)
    svm_pred = svm_predict(svm_train(train, 1, 0.5), test.features)
    knn_pred = np.array([knn_predict(train, q, 9) for q in test.features])
    svm_bacc = balanced_accuracy(confusion_matrix(test.labels, svm_pred, 2))
    knn_bacc = balanced_accuracy(confusion_matrix(test.labels, knn_pred, 2))
    rng = np.random.default_rng(3)
    feasible = True
    for _ in range(20):
        x = rng.standard_normal((40, 3))
        y = np.where(rng.random(40) < 0.5, -1.0, 1.0)
        y[:2] = (-1.0, 1.0)
        C = float(rng.choice([0.1, 1.0, 10.0]))
        a, _, _, conv = _smo(rbf_kernel(x, x, 0.5), y, C, 1e-3, 100_000)
        feasible &= conv and bool(np.all((a >= 0) & (a <= C))) and abs(a @ y) <= 1e-6 * C * 40
    dt = time.perf_counter() - t0
    ok = xor_acc == 1.0 and svm_bacc >= 0.95 and knn_bacc >= 0.95 and feasible and dt < 60
    report("classifier sanity", ok,
           f"XOR training accuracy {xor_acc}, blob held-out bAcc SVM {svm_bacc:.3f} kNN {knn_bacc:.3f}, "
           f"dual feasibility {'holds' if feasible else 'violated'}, {dt:.1f} s")


@pytest.fixture(scope="module")
def synth(tmp_path_factory):
    root = tmp_path_factory.mktemp("synth")
    generate_synthetic_dataset(root, participants=16, trials=60, snr_db=10.0, seed=0)
    return ExperimentConfig.load(root / "config.json")


@pytest.mark.slow
def test_end_to_end_planted_signal(synth):
    t0 = time.perf_counter()
    real = run_experiment(synth)
    null = run_experiment(dataclasses.replace(synth, permute_labels=True))
    dt = time.perf_counter() - t0
    mean_bacc = math.fsum(r.balanced_accuracy for r in real) / len(real)
    above = sum(r.above_chance for r in real) / len(real)
    null_above = sum(r.above_chance for r in null) / len(null)
    ok = mean_bacc >= 0.9 and above >= 0.9 and null_above <= 0.1 and dt < 600
    report("end-to-end planted signal", ok,
           f"BetaP/SVM over 16x60: mean bAcc {mean_bacc:.4f} (need >= 0.9), above chance {above:.0%} "
           f"(need >= 90%), permuted labels above chance {null_above:.0%} (need <= 10%), {dt:.0f} s")


@pytest.mark.slow
def test_determinism(synth, tmp_path):
    outputs = []
    for run in ("a", "b"):
        results = run_experiment(synth)
        paths = emit_report(results, aggregate(results, synth.alpha), tmp_path / run)
        outputs.append({k: paths[k].read_bytes() for k in ("results", "summary", "group_stats")})
    same = [k for k in outputs[0] if outputs[0][k] == outputs[1][k]]
    report("determinism", len(same) == 3,
           f"identical bytes for {', '.join(same) or 'nothing'} across two runs with seed {synth.seed}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
