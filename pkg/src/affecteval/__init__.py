"""EEG affect classification and class-imbalance-aware evaluation.

Modules:

* :mod:`affecteval.features` -- filtering, Welch spectra, band powers, Hjorth
  parameters, spectral entropy, asymmetry indices and the 17 feature sets.
* :mod:`affecteval.classifiers` -- Gaussian-kernel SVM (SMO), kNN and
  cross-validation.
* :mod:`affecteval.metrics` -- confusion-matrix metrics.
* :mod:`affecteval.posterior` -- Beta posteriors, the balanced-accuracy
  posterior and credible intervals.
* :mod:`affecteval.pipeline` -- dataset manifests, experiments and reports.
"""

from affecteval.metrics import (
    ConfusionMatrix,
    accuracy,
    balanced_accuracy,
    class_bias,
    confusion_matrix,
    f_beta,
    macro_f1,
    micro_f1,
    precision_recall,
)
from affecteval.posterior import (
    BetaParams,
    CredibleInterval,
    PosteriorDensity,
    balanced_accuracy_posterior,
    beta_inv_cdf,
    beta_pdf,
    credible_interval,
    group_proportion_posterior,
    probability_above,
    single_class_credible_interval,
    two_sample_ttest,
)

__version__ = "0.1.0"
