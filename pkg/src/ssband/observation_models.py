"""Empirical wavelet coefficients under white noise, density and regression sampling."""
import json
from dataclasses import dataclass

import numpy as np

from . import expansion
from .errors import (DesignTooCoarse, InsufficientLevels, LevelOutOfRange,
                     NotADensity)
from .function_space import CoefficientField
from .wavelet_core import standard_profile

MODELS = ("white_noise", "density", "regression")


def seed_record(seed):
    """JSON-friendly description of a seed argument."""
    if seed is None or isinstance(seed, (int, np.integer)):
        return None if seed is None else int(seed)
    if isinstance(seed, np.random.SeedSequence):
        return {"entropy": int(seed.entropy), "spawn_key": list(seed.spawn_key)}
    return repr(seed)


@dataclass(frozen=True)
class NoisyCoefficients:
    """Empirical coefficients ``alpha_hat``, ``beta_hat`` on levels ``j0 .. j_max``.

    Attributes
    ----------
    model : str
        One of ``white_noise``, ``density`` or ``regression``.
    n : int
    sigma : float
        Noise level (regression only, ``nan`` otherwise).
    hat : CoefficientField
    seed : object
        The seed as recorded by :func:`seed_record`.
    """
    model: str
    n: int
    sigma: float
    hat: CoefficientField
    seed: object = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError("unknown model %r" % self.model)
        if self.n < 1:
            raise ValueError("n must be positive")

    @property
    def j0(self):
        return self.hat.j0

    @property
    def j_max(self):
        return self.hat.J

    def to_dict(self):
        d = {"model": self.model, "n": int(self.n),
             "sigma": None if np.isnan(self.sigma) else float(self.sigma),
             "seed": self.seed}
        d.update(self.hat.to_dict())
        return d

    @classmethod
    def from_dict(cls, d):
        sigma = float("nan") if d.get("sigma") is None else float(d["sigma"])
        return cls(d["model"], int(d["n"]), sigma, CoefficientField.from_dict(d),
                   d.get("seed"))

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def _blocks(flat, j0, j_max):
    """Split a flat vector into ``alpha`` and the wavelet blocks."""
    alpha = flat[:2 ** j0]
    betas, start = [], 2 ** j0
    for j in range(j0 + 1, j_max + 1):
        betas.append(flat[start:start + 2 ** j])
        start += 2 ** j
    return alpha, betas


def observe_white_noise(f, n, j_max, seed):
    """Coefficients observed with independent ``N(0, 1/n)`` noise.

    Parameters
    ----------
    f : CoefficientField
        Stored through at least ``j_max``; finer levels are ignored.
    n : int
    j_max : int
    seed : int, SeedSequence or Generator

    Returns
    -------
    NoisyCoefficients
    """
    if f.J < j_max:
        raise InsufficientLevels("f stored through %d, need %d" % (f.J, j_max))
    if j_max < f.j0:
        raise InsufficientLevels("j_max below j0")
    truth = f.truncate(j_max)
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(2 ** (j_max + 1) - 2 ** f.j0) / np.sqrt(n)
    alpha, betas = _blocks(z, f.j0, j_max)
    noise = CoefficientField(f.j0, alpha, betas)
    return NoisyCoefficients("white_noise", int(n), float("nan"), truth + noise,
                             seed_record(seed))


def _grid_values(f, profile, n):
    """``f(i/n)`` for ``i = 1 .. n``."""
    depth = int(np.log2(n))
    if 2 ** depth == n:
        return expansion.evaluate_grid(f, profile, depth)[1:]
    return expansion.evaluate_points(f, profile, np.arange(1, n + 1) / n)


def observe_density(f, n, j_max, seed, profile=None):
    """Empirical coefficients ``(1/n) sum_i b(X_i)`` for ``X_i`` i.i.d. from ``f``.

    Draws use inverse-CDF sampling from the piecewise linear distribution
    function built on ``2**(j_max + 3)`` equal cells.

    Raises
    ------
    NotADensity
        If ``f`` is negative somewhere on the grid or its integral is not 1.
    """
    profile = standard_profile() if profile is None else profile
    depth = j_max + 3
    vals = expansion.evaluate_grid(f, profile, depth)
    if np.min(vals) < -1e-12:
        raise NotADensity("f takes the value %.3g" % np.min(vals))
    cells = 0.5 * (vals[:-1] + vals[1:]) / 2 ** depth
    total = cells.sum()
    if abs(total - 1.0) > 1e-6:
        raise NotADensity("f integrates to %.9g" % total)
    cdf = np.concatenate([[0.0], np.cumsum(np.maximum(cells, 0.0))])
    cdf /= cdf[-1]
    grid = np.arange(2 ** depth + 1) / 2 ** depth
    rng = np.random.default_rng(seed)
    x = np.interp(rng.uniform(size=n), cdf, grid)
    x = np.where(x >= 1.0, 0.0, x)
    alpha, betas = expansion.project_points(profile, f.j0, j_max, x,
                                            np.full(n, 1.0 / n))
    return NoisyCoefficients("density", int(n), float("nan"),
                             CoefficientField(f.j0, alpha, betas), seed_record(seed))


def observe_regression(f, n, sigma, j_max, seed, profile=None):
    """Empirical coefficients ``(1/n) sum_i b(i/n) Y_i`` with ``Y_i = f(i/n) + sigma e_i``.

    ``f`` is evaluated through its full stored expansion.

    Raises
    ------
    DesignTooCoarse
        If ``n < 2**j_max``.
    """
    if n < 2 ** j_max:
        raise DesignTooCoarse("n=%d cannot resolve level %d" % (n, j_max))
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    profile = standard_profile() if profile is None else profile
    x = np.arange(1, n + 1) / n
    y = _grid_values(f, profile, n)
    rng = np.random.default_rng(seed)
    y = y + sigma * rng.standard_normal(n)
    alpha, betas = expansion.project_points(profile, f.j0, j_max, x % 1.0, y / n)
    return NoisyCoefficients("regression", int(n), float(sigma),
                             CoefficientField(f.j0, alpha, betas), seed_record(seed))


def truncated_estimate(obs, j):
    """Empirical expansion using levels ``j0 .. j`` only."""
    if not obs.j0 <= j <= obs.j_max:
        raise LevelOutOfRange("level %d outside [%d, %d]" % (j, obs.j0, obs.j_max))
    return obs.hat.truncate(j)


def sup_norm_distance(f, g, grid_depth=None, profile=None):
    """Max of ``|f - g|`` over ``2**grid_depth + 1`` equispaced points.

    ``grid_depth`` defaults to the finest stored level plus 3.
    """
    profile = standard_profile() if profile is None else profile
    diff = f - g
    depth = diff.J + 3 if grid_depth is None else grid_depth
    return float(np.max(np.abs(expansion.evaluate_grid(diff, profile, depth))))
