"""Threshold scales, Lepskii-type level choices and smoothness estimation."""
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import InsufficientLevels, InvalidRange, TooFewLevels
from .function_space import level_sups

SQRT2 = math.sqrt(2.0)
BISECTION_STEPS = 60


def threshold_scale(n, mu):
    """``(n / log(n)**mu) ** -1/2`` with the natural logarithm."""
    return (n / math.log(n) ** mu) ** -0.5


@dataclass(frozen=True)
class BandParameters:
    """Tuning constants and the level schedules derived from them.

    Parameters
    ----------
    gamma : float
        Nominal non-coverage level.
    epsilon, rho : float, int
        Self-similarity constants.
    lam : float
        Lepskii threshold multiplier, above ``sqrt(2)``.
    nu : float
        Log power of the Lepskii threshold scale.
    delta : float
        Inflation of ``lam`` used by the bias terms.
    s_min, s_max : float
        Search range for the smoothness estimate.
    N : int
        Vanishing moments of the basis.
    j0 : int
        Coarsest level.
    jmin_floor : int
        Lower bound imposed on ``j_min(n)`` on top of the rate formula.
    """
    gamma: float = 0.05
    epsilon: float = 0.5
    rho: int = 2
    lam: float = 2.0
    nu: float = 1.0
    delta: float = 0.5
    s_min: float = 0.0
    s_max: float = 5.5
    N: int = 6
    j0: int = 1
    jmin_floor: int = 0

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must lie in (0, 1)")
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if int(self.rho) != self.rho or self.rho < 2:
            raise ValueError("rho must be an integer >= 2")
        if self.lam <= SQRT2:
            raise ValueError("lam must exceed sqrt(2)")
        if self.nu < 1:
            raise ValueError("nu must be at least 1")
        if not 0 < self.delta <= SQRT2:
            raise ValueError("delta must lie in (0, sqrt(2)]")
        if not 0 <= self.s_min < self.s_max:
            raise ValueError("need 0 <= s_min < s_max")
        if self.j0 < 0:
            raise ValueError("j0 must be nonnegative")

    @classmethod
    def adaptive(cls, **kw):
        """Defaults for the adaptive band (``s_min = 0``, ``nu = 1``)."""
        kw.setdefault("s_min", 0.0)
        kw.setdefault("nu", 1.0)
        return cls(**kw)

    @classmethod
    def exact(cls, **kw):
        """Defaults for the exact band (``s_min = 0.25``, ``nu = 1.5``)."""
        kw.setdefault("s_min", 0.25)
        kw.setdefault("nu", 1.5)
        return cls(**kw)

    @property
    def lambda_bar(self):
        return self.lam + self.delta

    @property
    def lambda_low(self):
        return self.lam - SQRT2

    @property
    def mode(self):
        """``"exact"``, ``"adaptive"`` or ``None`` when neither regime applies."""
        if self.s_min > 0 and self.nu > 1:
            return "exact"
        if self.s_min == 0 and self.nu == 1:
            return "adaptive"
        return None

    @property
    def j1(self):
        return self.rho * self.j0

    def j_min(self, n):
        rate = math.ceil(math.log2((n / math.log(n)) ** (1.0 / (2 * self.N + 1))))
        return max(self.j0, self.jmin_floor, rate)

    def j_max(self, n):
        return int(math.floor(math.log2(n / math.log(n))))

    def u_n(self, n):
        return int(math.ceil(math.log2(math.log(n))))

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class SmoothnessEstimate:
    """Output of :func:`estimate_smoothness`."""
    s_hat: float
    M_hat: float
    j1: int
    j2: int
    j3: int
    j_ad_hat: int
    R_at_s_hat: float
    flags: tuple = field(default_factory=tuple)

    def to_dict(self):
        return {"s_hat": self.s_hat,
                "M_hat": None if math.isinf(self.M_hat) else self.M_hat,
                "j1": self.j1, "j2": self.j2, "j3": self.j3,
                "j_ad_hat": self.j_ad_hat, "flags": list(self.flags)}

    def to_json(self):
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class LevelChoice:
    """A resolution level plus the reasons it was clamped, if any."""
    level: int
    flags: tuple = ()

    def __int__(self):
        return self.level


def _check_storage(obs, params, n):
    if obs.j_max < params.j_max(n):
        raise InsufficientLevels("observation stored through %d, need %d"
                                 % (obs.j_max, params.j_max(n)))
    if obs.j0 != params.j0:
        raise InvalidRange("observation j0=%d but parameters j0=%d"
                           % (obs.j0, params.j0))


def j_ad_hat(obs, kappa, mu, params, n=None):
    """Largest level in ``(j_min, j_max]`` with ``max_k |beta_hat| >= kappa c_{n,mu}``.

    Returns ``j_min`` when no level qualifies.
    """
    n = obs.n if n is None else n
    _check_storage(obs, params, n)
    sups = level_sups(obs.hat)
    cut = kappa * threshold_scale(n, mu)
    lo, hi = params.j_min(n), params.j_max(n)
    for j in range(hi, lo, -1):
        if sups[j - obs.j0] >= cut:
            return j
    return lo


def _bracket_from_sups(sups, j0, s, i, j, noise):
    levels = np.arange(i, j + 1)
    w = 2.0 ** (levels * (s + 0.5))
    a = sups[i - j0:j - j0 + 1]
    return (float(np.max(w * np.maximum(a - noise, 0.0))),
            float(np.max(w * (a + noise))))


def norm_bracket(obs, s, i, j, n=None):
    """Lower and upper bounds on the truncated norm over levels ``i .. j``.

    Uses ``(|beta_hat| - sqrt(2) c_{n,1})_+`` and ``|beta_hat| + sqrt(2) c_{n,1}``
    with every level weighted by ``2**(l (s + 1/2))``; level ``j0`` uses
    ``alpha_hat``.
    """
    n = obs.n if n is None else n
    if not obs.j0 <= i <= j <= obs.j_max:
        raise InvalidRange("need j0 <= i <= j <= j_max, got [%d, %d]" % (i, j))
    return _bracket_from_sups(level_sups(obs.hat), obs.j0, s, i, j,
                              SQRT2 * threshold_scale(n, 1))


def estimate_smoothness(obs, params, n=None):
    """Smoothness and norm estimates from the ratio of high- to low-level brackets.

    ``R(s) = upper(s; j2, j3) / lower(s; j0, j1)`` with ``j1 = rho j0``,
    ``j3 = j_ad_hat(lam, nu)`` and ``j2 = floor(j3 / rho)``. The estimate
    ``s_hat`` is the infimum of ``{s in [s_min, s_max): R(s) >= epsilon}``,
    or ``s_max`` when that set is empty, found by bisection since ``R`` is
    nondecreasing. ``M_hat = upper(s_hat; j0, j1) / epsilon``.

    Raises
    ------
    TooFewLevels
        If ``j_min(n) < rho j1``.
    """
    n = obs.n if n is None else n
    j1 = params.j1
    if params.j_min(n) < params.rho * j1:
        raise TooFewLevels("j_min(%d) = %d is below rho j1 = %d"
                           % (n, params.j_min(n), params.rho * j1))
    j3 = j_ad_hat(obs, params.lam, params.nu, params, n)
    j2 = j3 // params.rho
    sups = level_sups(obs.hat)
    noise = SQRT2 * threshold_scale(n, 1)
    j0 = obs.j0
    flags = []

    def ratio(s):
        num = _bracket_from_sups(sups, j0, s, j2, j3, noise)[1]
        den = _bracket_from_sups(sups, j0, s, j0, j1, noise)[0]
        return math.inf if den == 0.0 else num / den

    eps = params.epsilon
    lo, hi = params.s_min, params.s_max
    if ratio(lo) >= eps:
        s_hat = lo
        if math.isinf(ratio(lo)):
            flags.append("zero_denominator")
    elif ratio(hi) < eps:
        s_hat = hi
        flags.append("s_max_fallback")
    else:
        for _ in range(BISECTION_STEPS):
            mid = 0.5 * (lo + hi)
            if ratio(mid) >= eps:
                hi = mid
            else:
                lo = mid
        s_hat = hi
    M_hat = _bracket_from_sups(sups, j0, s_hat, j0, j1, noise)[1] / eps
    return SmoothnessEstimate(float(s_hat), float(M_hat), j1, j2, j3, j3,
                              float(ratio(s_hat)), tuple(flags))


def j_cl_hat(estimate, kappa, mu, n, params, ceiling=None):
    """Class-optimal level ``max(j_min, floor(log2(M_hat / (kappa c)) / (s_hat + 1/2)))``.

    Returns
    -------
    LevelChoice
        Flags ``nonpositive_ratio`` when ``M_hat <= kappa c`` and ``clamped``
        when the level was cut down to ``ceiling``.
    """
    if math.isinf(estimate.M_hat) or estimate.s_hat < 0:
        raise ValueError("need finite M_hat and s_hat >= 0")
    jmin = params.j_min(n)
    ratio = estimate.M_hat / (kappa * threshold_scale(n, mu))
    flags = []
    if ratio <= 1.0:
        level = jmin
        flags.append("nonpositive_ratio")
    else:
        level = max(jmin, int(math.floor(math.log2(ratio) / (estimate.s_hat + 0.5))))
    if ceiling is not None and level > ceiling:
        level = ceiling
        flags.append("clamped")
    return LevelChoice(level, tuple(flags))


def j_ex_hat(estimate, kappa, mu, n, params, ceiling=None):
    """Undersmoothed level ``j_cl + ceil(log2 j_cl) + u_n``."""
    cl = j_cl_hat(estimate, kappa, mu, n, params)
    extra = int(math.ceil(math.log2(cl.level))) if cl.level > 1 else 0
    level = cl.level + extra + params.u_n(n)
    flags = [f for f in cl.flags]
    if ceiling is not None and level > ceiling:
        level = ceiling
        flags.append("clamped")
    return LevelChoice(level, tuple(flags))
