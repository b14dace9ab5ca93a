"""
How many participants beat chance?
==================================

Each participant gets an above-chance flag from their own interval.  The
count of flagged participants is itself uncertain, so it gets a Beta
posterior too.
"""

from affecteval.posterior import group_proportion_posterior, two_sample_ttest

# %%
# Six of 32 participants above chance
g = group_proportion_posterior(6, 32, 0.05)
print(f"proportion {g.proportion}, 95% interval ({g.interval.low:.3f}, {g.interval.high:.3f})")

# %%
# Compare two affect dimensions on per-participant balanced accuracy
valence = [0.61, 0.55, 0.48, 0.66, 0.59, 0.52, 0.57, 0.63]
arousal = [0.50, 0.47, 0.55, 0.49, 0.51, 0.46, 0.53, 0.50]
r = two_sample_ttest(valence, arousal)
print(f"t = {r.t:.3f}, p = {r.p:.4f}, reject at 5%: {r.reject}")
