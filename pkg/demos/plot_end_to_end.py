"""
Planted-signal experiment
=========================

Generate a small synthetic dataset where high valence carries extra beta
power, run the full pipeline and read the summary back.
"""

import dataclasses
import tempfile
from pathlib import Path

from affecteval.pipeline import ExperimentConfig, aggregate, emit_report, generate_synthetic_dataset, run_experiment

root = Path(tempfile.mkdtemp())
generate_synthetic_dataset(root, participants=4, trials=40, snr_db=10.0, seed=1)
config = ExperimentConfig.load(root / "config.json")

# %%
results = run_experiment(config)
for r in results:
    print(r.participant_id, f"bAcc {r.balanced_accuracy:.3f}",
          f"interval ({r.bacc_ci_low:.3f}, {r.bacc_ci_high:.3f})", "above" if r.above_chance else "")

# %%
# Shuffling the labels should leave nobody above chance
null = run_experiment(dataclasses.replace(config, permute_labels=True))
print("permuted above chance:", sum(r.above_chance for r in null), "of", len(null))

# %%
paths = emit_report(results, aggregate(results), root / "results")
print(paths["summary"].read_text())
