"""Bayesian posteriors for accuracy-like quantities.

Each class accuracy gets a conjugate ``Beta(c + 1, n - c + 1)`` posterior under a
flat ``Beta(1, 1)`` prior.  The balanced accuracy is the mean of the per-class
accuracies, so its posterior is the density of an average of independent Beta
variables, computed here by discrete convolution on a uniform grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import betainc, betaln, xlog1py, xlogy

from affecteval.metrics import ConfusionMatrix, _as_cm

PRIOR_A = 1.0
PRIOR_B = 1.0
DEFAULT_GRID_SIZE = 2001
_CDF_TOL = 1e-10


@dataclass(frozen=True)
class BetaParams:
    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0 and math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError(f"Beta parameters must be positive and finite, got ({self.a}, {self.b})")

    @classmethod
    def from_counts(cls, correct: int, n: int) -> "BetaParams":
        """Posterior after ``correct`` successes in ``n`` trials under the flat prior."""
        if not 0 <= correct <= n:
            raise ValueError(f"need 0 <= correct <= n, got correct={correct}, n={n}")
        return cls(correct + PRIOR_A, n - correct + PRIOR_B)

    @property
    def mean(self) -> float:
        return self.a / (self.a + self.b)


@dataclass(frozen=True)
class CredibleInterval:
    low: float
    high: float
    level: float

    def __post_init__(self):
        if not (0.0 <= self.low <= self.high <= 1.0):
            raise ValueError(f"invalid credible interval ({self.low}, {self.high})")

    def contains(self, x: float) -> bool:
        return self.low <= x <= self.high


@dataclass(frozen=True)
class PosteriorDensity:
    """Density on a uniform grid over [0, 1] with its trapezoidal CDF."""

    grid: np.ndarray
    density: np.ndarray
    cdf: np.ndarray

    def __post_init__(self):
        g, d, c = (np.asarray(v, dtype=float) for v in (self.grid, self.density, self.cdf))
        if not (g.ndim == d.ndim == c.ndim == 1 and g.size == d.size == c.size and g.size >= 2):
            raise ValueError("grid, density and cdf must be 1-D arrays of equal length >= 2")
        if abs(g[0]) > 1e-12 or abs(g[-1] - 1.0) > 1e-12:
            raise ValueError("posterior grid must span [0, 1]")
        if np.any(d < 0) or not np.all(np.isfinite(d)):
            raise ValueError("posterior density must be finite and nonnegative")
        if np.any(np.diff(c) < -1e-12) or abs(c[-1] - 1.0) > 1e-6:
            raise ValueError("posterior cdf must be nondecreasing and end at 1")
        for name, v in (("grid", g), ("density", d), ("cdf", c)):
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    @classmethod
    def from_density(cls, grid: np.ndarray, density: np.ndarray) -> "PosteriorDensity":
        grid = np.asarray(grid, dtype=float)
        density = np.clip(np.asarray(density, dtype=float), 0.0, None)
        area = np.trapezoid(density, grid)
        if not area > 0:
            raise ValueError("density has zero mass")
        density = density / area
        steps = 0.5 * (density[1:] + density[:-1]) * np.diff(grid)
        cdf = np.concatenate([[0.0], np.cumsum(steps)])
        cdf /= cdf[-1]
        return cls(grid, density, cdf)

    @property
    def spacing(self) -> float:
        return float(self.grid[1] - self.grid[0])

    def mean(self) -> float:
        return float(np.trapezoid(self.grid * self.density, self.grid))

    def mode(self) -> float:
        return float(self.grid[int(np.argmax(self.density))])


def beta_pdf(params: BetaParams, x):
    """Beta density evaluated in log space; accepts scalars or arrays."""
    x_arr = np.asarray(x, dtype=float)
    if np.any((x_arr < 0) | (x_arr > 1)) or np.any(np.isnan(x_arr)):
        raise ValueError("x must lie in [0, 1]")
    log_pdf = xlogy(params.a - 1.0, x_arr) + xlog1py(params.b - 1.0, -x_arr) - betaln(params.a, params.b)
    out = np.exp(log_pdf)
    return float(out) if out.ndim == 0 else out


def beta_cdf(params: BetaParams, x):
    """Regularized incomplete beta ``I_x(a, b)``."""
    return betainc(params.a, params.b, np.clip(x, 0.0, 1.0))


def beta_inv_cdf(params: BetaParams, p: float) -> float:
    """Quantile of a Beta distribution.

    Safeguarded Newton iteration on the regularized incomplete beta: Newton
    steps that leave the current bracket fall back to bisection.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return 1.0
    lo, hi = 0.0, 1.0
    x = params.mean
    for _ in range(400):
        f = float(beta_cdf(params, x)) - p
        if abs(f) < _CDF_TOL:
            return x
        if f > 0:
            hi = x
        else:
            lo = x
        dens = beta_pdf(params, x)
        step_ok = False
        if dens > 0 and math.isfinite(dens):
            nx = x - f / dens
            if lo < nx < hi:
                x, step_ok = nx, True
        if not step_ok:
            x = 0.5 * (lo + hi)
        if hi - lo <= 1e-15 * hi:
            break
    return x


def single_class_credible_interval(c: int, n: int, alpha: float = 0.05) -> CredibleInterval:
    """Equal-tailed interval of ``Beta(c + 1, n - c + 1)``."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    params = BetaParams.from_counts(c, n)
    return CredibleInterval(
        beta_inv_cdf(params, alpha / 2.0), beta_inv_cdf(params, 1.0 - alpha / 2.0), 1.0 - alpha
    )


def _cell_masses(params: BetaParams, grid: np.ndarray) -> np.ndarray:
    # probability mass of the half-spacing cell around each node, so sharply
    # peaked posteriors (large n) are not lost between grid points
    h = grid[1] - grid[0]
    edges = np.concatenate([[0.0], grid[:-1] + h / 2.0, [1.0]])
    mass = np.diff(beta_cdf(params, edges))
    return np.clip(mass, 0.0, None)


def mean_of_betas_posterior(params: Sequence[BetaParams], grid_size: int = DEFAULT_GRID_SIZE) -> PosteriorDensity:
    """Density of the average of independent Beta variables.

    Every variable is discretised to node masses on a ``grid_size`` grid over
    [0, 1].  The masses are convolved on the sum support ``[0, m]`` (spacing
    unchanged), then the support is rescaled to [0, 1], which gives a grid of
    ``m * (grid_size - 1) + 1`` points.
    """
    if len(params) < 1:
        raise ValueError("need at least one Beta variable")
    if grid_size < 3:
        raise ValueError("grid_size must be at least 3")
    grid = np.linspace(0.0, 1.0, grid_size)
    mass = _cell_masses(params[0], grid)
    for p in params[1:]:
        mass = np.convolve(mass, _cell_masses(p, grid))
    m = len(params)
    fine = np.linspace(0.0, 1.0, mass.size)
    h = 1.0 / (grid_size - 1) / m
    # end nodes own half a cell
    density = mass / h
    density[0] *= 2.0
    density[-1] *= 2.0
    return PosteriorDensity.from_density(fine, density)


def balanced_accuracy_posterior(cm, grid_size: int = DEFAULT_GRID_SIZE) -> PosteriorDensity:
    """Posterior density of the balanced accuracy of a confusion matrix."""
    cm = _as_cm(cm)
    if grid_size < 501:
        raise ValueError("grid_size must be at least 501")
    totals = cm.class_totals
    if np.any(totals == 0):
        raise ValueError("every class needs at least one true item")
    params = [BetaParams.from_counts(int(c), int(n)) for c, n in zip(cm.correct, totals)]
    return mean_of_betas_posterior(params, grid_size)


def _check_posterior(post: PosteriorDensity) -> None:
    if not isinstance(post, PosteriorDensity):
        raise TypeError("expected a PosteriorDensity")


def posterior_cdf(post: PosteriorDensity, x: float) -> float:
    _check_posterior(post)
    return float(np.interp(x, post.grid, post.cdf))


def posterior_quantile(post: PosteriorDensity, q: float) -> float:
    """Inverse of the gridded CDF with linear interpolation."""
    _check_posterior(post)
    if not 0.0 <= q <= 1.0:
        raise ValueError("quantile level must lie in [0, 1]")
    cdf, grid = post.cdf, post.grid
    i = int(np.searchsorted(cdf, q, side="left"))
    if i <= 0:
        # all mass before the first node with cdf >= q is zero
        return float(grid[0])
    if i >= cdf.size:
        return float(grid[-1])
    c0, c1 = cdf[i - 1], cdf[i]
    if c1 <= c0:
        return float(grid[i])
    return float(grid[i - 1] + (q - c0) / (c1 - c0) * (grid[i] - grid[i - 1]))


def credible_interval(post: PosteriorDensity, alpha: float = 0.05) -> CredibleInterval:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    low = posterior_quantile(post, alpha / 2.0)
    high = posterior_quantile(post, 1.0 - alpha / 2.0)
    return CredibleInterval(low, high, 1.0 - alpha)


def probability_above(post: PosteriorDensity, threshold: float) -> float:
    """Posterior probability that the quantity exceeds ``threshold``."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")
    if threshold <= post.grid[0]:
        return 1.0
    return float(min(1.0, max(0.0, 1.0 - posterior_cdf(post, threshold))))


def is_above_chance(interval: CredibleInterval, m: int = 2) -> bool:
    """Significance rule: lower credible bound strictly above ``1/m``."""
    return interval.low > 1.0 / m


@dataclass(frozen=True)
class GroupSignificance:
    n_participants: int
    n_above_chance: int
    proportion: float
    interval: CredibleInterval


def group_proportion_posterior(n_above: int, n_total: int, alpha: float = 0.05) -> GroupSignificance:
    """Posterior for the fraction of participants classified above chance."""
    if n_total < 1 or not 0 <= n_above <= n_total:
        raise ValueError(f"need 0 <= n_above <= n_total and n_total >= 1, got {n_above}/{n_total}")
    return GroupSignificance(
        n_participants=n_total,
        n_above_chance=n_above,
        proportion=n_above / n_total,
        interval=single_class_credible_interval(n_above, n_total, alpha),
    )


class TTestResult(NamedTuple):
    t: float
    p: float
    reject: bool
    degenerate: bool


def two_sample_ttest(a: Sequence[float], b: Sequence[float], alpha: float = 0.05) -> TTestResult:
    """Two-tailed Student's t-test with pooled variance.

    ``degenerate`` is set when the pooled variance is zero; equal means then
    give ``t = 0, p = 1`` and unequal means ``t = +-inf, p = 0``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na, nb = a.size, b.size
    if na < 2 or nb < 2:
        raise ValueError("each sample needs at least 2 observations")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("samples must be finite")
    df = na + nb - 2
    diff = a.mean() - b.mean()
    ss = ((a - a.mean()) ** 2).sum() + ((b - b.mean()) ** 2).sum()
    pooled = ss / df
    se = math.sqrt(pooled * (1.0 / na + 1.0 / nb))
    if se == 0.0:
        if diff == 0.0:
            return TTestResult(0.0, 1.0, False, True)
        return TTestResult(math.copysign(math.inf, diff), 0.0, True, True)
    t = float(diff / se)
    # two-tailed p of Student's t via the incomplete beta
    p = float(betainc(df / 2.0, 0.5, df / (df + t * t)))
    return TTestResult(t, p, p < alpha, False)
