"""
Balanced accuracy and its posterior
===================================

A classifier that always says "high" looks good on a participant who rated
most stimuli high.  Balanced accuracy removes that advantage, and the
posterior says how sure we can be that the classifier beats chance.
"""

import numpy as np

from affecteval.metrics import accuracy, balanced_accuracy, class_bias, macro_f1, micro_f1
from affecteval.posterior import balanced_accuracy_posterior, credible_interval, is_above_chance

# %%
# 40 trials, 30 of them rated high.  Rows are predictions, columns truth.
labels = np.array([1] * 30 + [0] * 10)
print("class bias", class_bias(labels))

unskilled = np.array([[0, 0], [10, 30]])
print("always-high: accuracy", accuracy(unskilled), "bAcc", balanced_accuracy(unskilled))

# %%
# A classifier with some skill on both classes
cm = np.array([[7, 6], [3, 24]])
print("accuracy", accuracy(cm), "bAcc", balanced_accuracy(cm))
print("micro-F1", micro_f1(cm), "macro-F1", round(macro_f1(cm), 4))

# %%
# The posterior of balanced accuracy is the density of the mean of two
# Beta-distributed per-class accuracies
post = balanced_accuracy_posterior(cm)
ci = credible_interval(post, 0.05)
print(f"posterior mean {post.mean():.4f}, mode {post.mode():.4f}")
print(f"95% interval ({ci.low:.4f}, {ci.high:.4f}); above chance: {is_above_chance(ci, 2)}")

# %%
# Same point bAcc on far fewer trials gives a wide interval that straddles 0.5
small = np.array([[2, 1], [1, 4]])
ci_small = credible_interval(balanced_accuracy_posterior(small), 0.05)
print(f"bAcc {balanced_accuracy(small):.3f}, 95% interval ({ci_small.low:.3f}, {ci_small.high:.3f})")
