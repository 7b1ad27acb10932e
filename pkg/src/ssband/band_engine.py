"""Confidence bands around truncated empirical wavelet expansions.

Noise calibration
-----------------
An expansion truncated at level ``j`` (scaling functions at ``j0`` plus
wavelets on ``j0 < l <= j``) lives in the scaling space of resolution
``j + 1``, so its pointwise noise variance peaks near
``2**(j+1) sigma_bar**2 / n``. The stochastic radius of a band centred at
level ``j`` is therefore :func:`radius_r1` evaluated at ``j + 1``. The bias
terms ``R2`` and ``R3`` concern the levels above ``j`` and use ``j`` itself.
"""
import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import expansion
from .adaptive_estimation import (estimate_smoothness, j_ad_hat, j_cl_hat,
                                  j_ex_hat, threshold_scale)
from .errors import Assumption2Failed, ModeMismatch
from .observation_models import sup_norm_distance, truncated_estimate
from .wavelet_core import verify_assumption2


def band_constants(j, gamma, n, profile):
    """Gumbel centring and scaling constants ``(a, b, c, x)`` at level ``j``."""
    a = math.sqrt(2.0 * math.log(2.0) * j)
    b = a - (math.log(math.pi * math.log(2.0)) + math.log(j)
             - 0.5 * math.log(1.0 + profile.upsilon)) / (2.0 * a)
    c = profile.sigma_bar * n ** -0.5 * 2.0 ** (j / 2.0)
    x = -math.log(-math.log(1.0 - gamma))
    return a, b, c, x


def radius_r1(j, gamma, n, profile):
    """Stochastic radius ``c(j) (x(gamma) / a(j) + b(j))``."""
    a, b, c, x = band_constants(j, gamma, n, profile)
    return c * (x / a + b)


def radius_r2_r3(j, estimate, n, params, profile, j_cl=None):
    """Bias radii above level ``j``.

    ``l = max(j, min(j_cl, j_max(n)))`` where ``j_cl`` defaults to
    ``j_cl_hat(lambda_bar, 1)``. ``R2`` bounds the levels ``j < l' <= l``
    whose coefficients fell below the threshold; ``R3`` bounds the tail
    beyond ``l`` and is infinite when ``s_hat = 0``.
    """
    if j_cl is None:
        j_cl = j_cl_hat(estimate, params.lambda_bar, 1.0, n, params).level
    l = max(j, min(j_cl, params.j_max(n)))
    c = threshold_scale(n, params.nu)
    r2 = profile.tau * params.lambda_bar * (2.0 ** (l / 2.0) - 2.0 ** (j / 2.0)) \
        * c / (1.0 - 2.0 ** -0.5)
    s = estimate.s_hat
    if s == 0.0:
        return r2, math.inf
    r3 = profile.tau * estimate.M_hat * 2.0 ** (-l * s) / (2.0 ** s - 1.0)
    return r2, r3


@dataclass(frozen=True)
class ConfidenceBand:
    """Band ``{f : ||f - center||_inf <= radius}``."""
    kind: str
    center: object
    chosen_level: int
    radius: float
    components: tuple
    gamma_effective: float
    diagnostics: object = None
    flags: tuple = field(default_factory=tuple)

    @property
    def infinite(self):
        return math.isinf(self.radius)

    def to_dict(self):
        def num(v):
            return None if math.isinf(v) else float(v)
        r1, r2, r3 = self.components
        return {"kind": self.kind, "chosen_level": int(self.chosen_level),
                "radius": num(self.radius), "R1": num(r1), "R2": num(r2),
                "R3": num(r3), "gamma_effective": float(self.gamma_effective),
                "flags": list(self.flags)}

    def to_json(self):
        return json.dumps(self.to_dict())

    def curves(self, profile, grid_depth):
        """Arrays ``t, center, lo, hi`` on ``2**grid_depth + 1`` points."""
        t = np.arange(2 ** grid_depth + 1) / 2.0 ** grid_depth
        mid = expansion.evaluate_grid(self.center, profile, grid_depth)
        return t, mid, mid - self.radius, mid + self.radius

    def to_csv(self, profile, grid_depth):
        """Plot-ready CSV text with columns ``t,center,lo,hi``."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "center", "lo", "hi"])
        for row in zip(*self.curves(profile, grid_depth)):
            w.writerow([repr(float(v)) for v in row])
        return buf.getvalue()


def _gate(params, profile, mode):
    if params.mode != mode:
        raise ModeMismatch("parameters are in %s mode, need %s" % (params.mode, mode))
    report = verify_assumption2(profile)
    if not report.passed:
        raise Assumption2Failed("variance profile of %s %d fails the unique "
                                "maximum condition" % (profile.bank.family_name,
                                                       profile.bank.N))


def build_exact_band(obs, params, n, profile):
    """Band centred at the undersmoothed level ``j_ex_hat(lambda - sqrt(2), 1)``.

    The radius is the stochastic term alone at level ``j_ex + 1``. Levels
    beyond storage are clamped and flagged.
    """
    _gate(params, profile, "exact")
    est = estimate_smoothness(obs, params, n)
    choice = j_ex_hat(est, params.lambda_low, 1.0, n, params, ceiling=obs.j_max)
    j = choice.level
    r1 = radius_r1(j + 1, params.gamma, n, profile)
    return ConfidenceBand("exact", truncated_estimate(obs, j), j, r1,
                          (r1, 0.0, 0.0), params.gamma, est, choice.flags)


def build_adaptive_band(obs, params, n, profile):
    """Band centred at ``j_ad_hat(lambda, 1)`` with radius ``R1 + R2 + R3``.

    ``R1`` uses the Bonferroni level ``gamma / (j_max - j_min + 1)``.
    """
    _gate(params, profile, "adaptive")
    est = estimate_smoothness(obs, params, n)
    j = j_ad_hat(obs, params.lam, 1.0, params, n)
    gamma_n = params.gamma / (params.j_max(n) - params.j_min(n) + 1)
    r1 = radius_r1(j + 1, gamma_n, n, profile)
    r2, r3 = radius_r2_r3(j, est, n, params, profile)
    radius = r1 + r2 + r3
    flags = ("infinite_radius",) if math.isinf(radius) else ()
    return ConfidenceBand("adaptive", truncated_estimate(obs, j), j, radius,
                          (r1, r2, r3), gamma_n, est, flags)


def band_contains(band, f, grid_depth=None, profile=None):
    """Whether ``||f - center||_inf <= radius`` on the grid."""
    if band.infinite:
        return True
    return sup_norm_distance(f, band.center, grid_depth, profile) <= band.radius
