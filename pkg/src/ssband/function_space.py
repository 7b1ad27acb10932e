"""Functions represented by periodized wavelet coefficients.

Norm convention
---------------
Every level carries the weight ``2**(j (s + 1/2))``, including the coarse
level ``j0`` whose coefficients are the scaling coefficients ``alpha``
(``beta[j0, k]`` stands for ``alpha[k]``). With this convention the truncated
norm over the full range is the norm itself, the noiseless empirical bracket
always contains the truncated norm, and the coarse-level terms of the
generators below sit at exactly ``M``.
"""
import json
import math
from dataclasses import dataclass

import numpy as np

from . import expansion
from .errors import (DegenerateBase, InsufficientLevels, InvalidRange,
                     ScheduleTooShort, ShiftCollision)


class CoefficientField:
    """Coefficients ``alpha`` at level ``j0`` and ``beta`` on ``j0 < j <= J``.

    Instances are immutable; arithmetic returns new fields.

    Parameters
    ----------
    j0 : int
    alpha : array_like, length ``2**j0``
    betas : sequence of array_like
        Level ``j0 + 1 + i`` is ``betas[i]`` and has length ``2**(j0 + 1 + i)``.
    """
    __slots__ = ("j0", "alpha", "betas")

    def __init__(self, j0, alpha, betas=()):
        j0 = int(j0)
        if j0 < 0:
            raise ValueError("j0 must be nonnegative")
        alpha = np.array(alpha, dtype=np.float64)
        if alpha.shape != (2 ** j0,):
            raise ValueError("alpha must have %d entries" % 2 ** j0)
        blocks = []
        for i, b in enumerate(betas):
            b = np.array(b, dtype=np.float64)
            if b.shape != (2 ** (j0 + 1 + i),):
                raise ValueError("level %d must have %d entries"
                                 % (j0 + 1 + i, 2 ** (j0 + 1 + i)))
            b.setflags(write=False)
            blocks.append(b)
        alpha.setflags(write=False)
        object.__setattr__(self, "j0", j0)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "betas", tuple(blocks))

    def __setattr__(self, name, value):
        raise AttributeError("CoefficientField is immutable")

    @property
    def J(self):
        return self.j0 + len(self.betas)

    @classmethod
    def zeros(cls, j0, J):
        return cls(j0, np.zeros(2 ** j0),
                   [np.zeros(2 ** j) for j in range(j0 + 1, J + 1)])

    def level(self, j):
        """Coefficients at level ``j`` (``alpha`` when ``j == j0``)."""
        if j == self.j0:
            return self.alpha
        if not self.j0 < j <= self.J:
            raise InvalidRange("level %d not stored (j0=%d, J=%d)"
                               % (j, self.j0, self.J))
        return self.betas[j - self.j0 - 1]

    def levels(self):
        """Iterate ``(j, coefficients)`` from ``j0`` to ``J``."""
        yield self.j0, self.alpha
        for i, b in enumerate(self.betas):
            yield self.j0 + 1 + i, b

    def with_level(self, j, values):
        """Copy with level ``j`` replaced (extending storage if needed)."""
        f = self.extend(max(j, self.J))
        blocks = list(f.betas)
        if j == f.j0:
            return CoefficientField(f.j0, values, blocks)
        blocks[j - f.j0 - 1] = values
        return CoefficientField(f.j0, f.alpha, blocks)

    def with_coefficient(self, j, k, value):
        f = self.extend(max(j, self.J))
        vals = np.array(f.level(j))
        vals[k] = value
        return f.with_level(j, vals)

    def truncate(self, J):
        """Keep levels ``j0 .. J`` (``J >= j0``)."""
        if J < self.j0:
            raise InvalidRange("cannot truncate below j0")
        return CoefficientField(self.j0, self.alpha, self.betas[:J - self.j0])

    def extend(self, J):
        """Zero-pad storage up to level ``J``."""
        if J <= self.J:
            return self
        extra = [np.zeros(2 ** j) for j in range(self.J + 1, J + 1)]
        return CoefficientField(self.j0, self.alpha, list(self.betas) + extra)

    def _binary(self, other, op):
        if self.j0 != other.j0:
            raise ValueError("fields must share j0")
        J = max(self.J, other.J)
        a, b = self.extend(J), other.extend(J)
        return CoefficientField(a.j0, op(a.alpha, b.alpha),
                                [op(x, y) for x, y in zip(a.betas, b.betas)])

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __mul__(self, c):
        c = float(c)
        return CoefficientField(self.j0, c * self.alpha, [c * b for b in self.betas])

    __rmul__ = __mul__

    def __neg__(self):
        return -1.0 * self

    def equals(self, other):
        """Exact coefficient-wise equality, storage depth included."""
        return (self.j0 == other.j0 and self.J == other.J
                and all(np.array_equal(x, y) for (_, x), (_, y)
                        in zip(self.levels(), other.levels())))

    def to_dict(self):
        return {"j0": self.j0, "J": self.J, "alpha": self.alpha.tolist(),
                "beta": {str(j): b.tolist() for j, b in self.levels()
                         if j > self.j0}}

    @classmethod
    def from_dict(cls, d):
        j0, J = int(d["j0"]), int(d["J"])
        return cls(j0, d["alpha"], [d["beta"][str(j)] for j in range(j0 + 1, J + 1)])

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def __repr__(self):
        return "CoefficientField(j0=%d, J=%d)" % (self.j0, self.J)


@dataclass(frozen=True)
class SmoothnessClass:
    """Self-similar Hoelder class parameters."""
    s: float
    M: float
    epsilon: float = 0.5
    rho: int = 2
    s_max: float = 5.5

    def __post_init__(self):
        if not 0 < self.s <= self.s_max:
            raise ValueError("need 0 < s <= s_max")
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.rho < 1:
            raise ValueError("rho must be at least 1")
        if self.M <= 0:
            raise ValueError("M must be positive")


def level_weight(j, s):
    return 2.0 ** (j * (s + 0.5))


def level_sups(f):
    """Per-level maxima of ``|coefficient|`` as an array indexed from ``j0``."""
    return np.array([np.max(np.abs(b)) for _, b in f.levels()])


def holder_norm(f, s):
    """C^s norm: max over stored levels of ``2**(j(s+1/2)) sup_k |beta_jk|``."""
    return truncated_norm(f, s, f.j0, f.J)


def truncated_norm(f, s, i, j):
    """C^s norm of the levels ``i .. j`` of ``f``."""
    if not f.j0 <= i <= j <= f.J:
        raise InvalidRange("need j0 <= i <= j <= J, got [%d, %d]" % (i, j))
    sups = level_sups(f)[i - f.j0:j - f.j0 + 1]
    levels = np.arange(i, j + 1)
    return float(np.max(level_weight(levels, s) * sups))


def is_self_similar(f, cls, j0=None, window=None):
    """Check ``||f_{j, rho j}||_{C^s} >= eps M`` on every stored window.

    Parameters
    ----------
    f : CoefficientField
    cls : SmoothnessClass
    j0 : int, optional
        First window start; defaults to ``f.j0``.
    window : callable, optional
        ``window(j)`` gives the window factor at ``j``; defaults to the
        constant ``cls.rho``. Windows that do not fit inside storage are
        skipped, but the first one must fit.

    Returns
    -------
    bool
    """
    j0 = f.j0 if j0 is None else j0
    rho = (lambda j: cls.rho) if window is None else window
    if rho(j0) * j0 > f.J:
        raise InsufficientLevels("need J >= %d to check the first window"
                                 % (rho(j0) * j0))
    threshold = cls.epsilon * cls.M
    last = j0 if cls.s >= cls.s_max else f.J
    j = j0
    while j <= last and rho(j) * j <= f.J:
        if truncated_norm(f, cls.s, j, rho(j) * j) < threshold:
            return False
        j += 1
    return True


def sample_pi(cls, J, seed, j0=1, max_tries=1000, self_similar=False):
    """Draw from the product-uniform prior on ``C^s(M)``.

    ``alpha_k ~ M 2**(-j0(s+1/2)) U[-1, 1]`` and
    ``beta_jk ~ M 2**(-j(s+1/2)) U[-1, 1]`` independently.

    Parameters
    ----------
    cls : SmoothnessClass
    J : int
        Finest stored level, at least ``rho j0``.
    seed : int, SeedSequence or Generator
    j0 : int
    self_similar : bool
        Redraw (from the same stream) until :func:`is_self_similar` holds.
    """
    if J < cls.rho * j0:
        raise InsufficientLevels("need J >= rho j0")
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        alpha = cls.M * level_weight(j0, -cls.s - 1.0) * rng.uniform(-1, 1, 2 ** j0)
        betas = [cls.M * level_weight(j, -cls.s - 1.0) * rng.uniform(-1, 1, 2 ** j)
                 for j in range(j0 + 1, J + 1)]
        f = CoefficientField(j0, alpha, betas)
        if not self_similar or is_self_similar(f, cls):
            return f
    raise RuntimeError("no self-similar draw in %d attempts" % max_tries)


def project_self_similar(f, threshold):
    """Apply ``g(beta, x)`` coefficient-wise: lift small coefficients to ``x``.

    ``g(beta, x) = x`` for ``0 <= beta <= x``, ``-x`` for ``-x <= beta < 0``
    and ``beta`` otherwise. ``threshold`` maps a level to ``x``.
    """
    out = []
    for j, b in f.levels():
        x = threshold(j)
        g = np.where((b >= 0) & (b <= x), x, np.where((b < 0) & (b >= -x), -x, b))
        out.append(g)
    return CoefficientField(f.j0, out[0], out[1:])


def geometric_ladder(j0, rho, J):
    """Levels ``rho**i j0`` for ``i >= 1`` up to ``J``."""
    if rho <= 1:
        raise ValueError("rho must exceed 1")
    if j0 < 1:
        raise ValueError("the ladder needs j0 >= 1")
    out, j = [], j0 * rho
    while j <= J:
        out.append(j)
        j *= rho
    return out


def prop1_counterexample(cls, J, j0=1):
    """Sparse self-similar field with one centred wavelet per ladder level.

    ``f = sum_i M 2**(-j_i(s+1/2)) psi_{j_i, 2**(j_i - 1)}`` with
    ``j_i = rho**i j0``, truncated at ``J``.
    """
    f = CoefficientField.zeros(j0, J)
    for j in geometric_ladder(j0, cls.rho, J):
        f = f.with_coefficient(j, 2 ** (j - 1), cls.M * level_weight(j, -cls.s - 1.0))
    return f


def minimax_pair(cls, j, k, J, j0=1, N=None):
    """Two self-similar fields differing in a single wavelet coefficient.

    ``f0`` is :func:`prop1_counterexample` plus ``M 2**(-j0(s+1/2))`` on
    ``phi_{j0,0}``; ``fk = f0 + M 2**(-j(s+1/2)) psi_{j,k}``.

    Parameters
    ----------
    N : int, optional
        Vanishing moments; when given, ``k`` must lie in ``[N, 2**j - N)``.
    """
    ladder = geometric_ladder(j0, cls.rho, J)
    if j in ladder and k == 2 ** (j - 1):
        raise ShiftCollision("shift %d collides with the ladder at level %d" % (k, j))
    if not j0 < j <= J or not 0 <= k < 2 ** j:
        raise InvalidRange("no wavelet at level %d shift %d" % (j, k))
    if N is not None and not N <= k < 2 ** j - N:
        raise InvalidRange("shift %d is not interior at level %d" % (k, j))
    f0 = prop1_counterexample(cls, J, j0)
    f0 = f0.with_coefficient(j0, 0, cls.M * level_weight(j0, -cls.s - 1.0))
    fk = f0.with_coefficient(j, k, f0.level(j)[k] + cls.M * level_weight(j, -cls.s - 1.0))
    return f0, fk


@dataclass(frozen=True)
class AdversarialSequence:
    """Output of :func:`adversarial_c1_sequence`."""
    fields: tuple
    s_values: tuple
    t_values: tuple
    ladder: tuple
    spike_indices: tuple
    spike_shifts: tuple
    window: object
    M: float
    epsilon: float
    s_max: float

    def window_check(self):
        """Windowed self-similarity and norm bound of each field at its ``s_m``."""
        out = []
        for f, s in zip(self.fields, self.s_values[1:]):
            cls = SmoothnessClass(s, self.M, self.epsilon, 1, self.s_max)
            ok = is_self_similar(f, cls, window=self.window) and \
                holder_norm(f, s) <= self.M * (1 + 1e-12)
            out.append(bool(ok))
        return out


def adversarial_c1_sequence(M, s_min, s_max, epsilon, rho_schedule, m, J,
                            j0=3, N=6, gap=2):
    """Fields f_1 .. f_m whose smoothness drifts down a block ladder.

    The ladder is ``j_0 = j0`` and ``j_{i+1} = rho_{j_i} j_i + 1``. The field
    ``f_m`` carries ``b_{i,m}`` on the centred function of each ladder level
    (the scaling function at ``j0``, wavelets above) and spikes ``b'_l`` at
    non-central interior shifts on levels ``j_{i_l}``. Spike positions are
    ``i_l = i_1 + gap (l - 1)`` where ``i_1`` is the first ladder index with
    ``t_1 > s_min``, interior supports from there on, and a free shift;
    ``gap >= 2`` makes ``t_m`` strictly increasing.

    Parameters
    ----------
    rho_schedule : callable or sequence
        ``rho_schedule(j)`` or ``rho_schedule[j]``, nondecreasing in ``j``.
    N : int
        Vanishing moments (support parameter) of the basis.

    Returns
    -------
    AdversarialSequence
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    if gap < 1:
        raise ValueError("gap must be at least 1")
    rho = rho_schedule if callable(rho_schedule) else (lambda j: rho_schedule[j])
    L = math.log2(1.0 / epsilon)
    ladder = [j0]
    while rho(ladder[-1]) * ladder[-1] + 1 <= J:
        ladder.append(rho(ladder[-1]) * ladder[-1] + 1)

    def interior(j):
        # psi_{j, 2^(j-1)} is supported on [(c + 1 - N), (c + N)] 2^-j
        return 2 ** (j - 1) >= N

    def free_shifts(j):
        return [k for k in range(N, 2 ** j - N) if k != 2 ** (j - 1)]

    i1 = None
    for i in range(1, len(ladder) - 1):
        t1 = s_max - L / ladder[i]
        if t1 > s_min and all(interior(x) for x in ladder[i:]) and free_shifts(ladder[i]):
            i1 = i
            break
    if i1 is None:
        raise ScheduleTooShort("no ladder level satisfies the start conditions")
    idx = [i1 + gap * l for l in range(m)]
    if idx[-1] + 1 >= len(ladder):
        raise ScheduleTooShort("storage J=%d holds too few ladder levels for m=%d"
                               % (J, m))
    s_vals, t_vals = [float(s_max)], [float(s_min)]
    for l in range(m):
        jl, jl1 = ladder[idx[l]], ladder[idx[l] + 1]
        s_vals.append(s_vals[-1] - (1.0 / jl - 1.0 / jl1) * L)
        t_vals.append(s_vals[-1] - L / jl1)
    spike_shifts = []
    for l in range(m):
        cand = free_shifts(ladder[idx[l]])
        spike_shifts.append(cand[len(cand) // 4])

    fields = []
    for mm in range(1, m + 1):
        f = CoefficientField.zeros(j0, J)
        bounds = [-1] + idx[:mm]
        for i, j in enumerate(ladder):
            block = mm
            for l in range(mm):
                if bounds[l] < i <= bounds[l + 1]:
                    block = l
                    break
            centre = 2 ** (j - 1) if j > 0 else 0
            f = f.with_coefficient(j, centre, M * level_weight(j, -s_vals[block] - 1.0))
        for l in range(1, mm + 1):
            j = ladder[idx[l - 1]]
            f = f.with_coefficient(j, spike_shifts[l - 1],
                                   M * level_weight(j, -s_vals[l] - 1.0))
        fields.append(f)
    return AdversarialSequence(tuple(fields), tuple(s_vals), tuple(t_vals),
                               tuple(ladder), tuple(idx), tuple(spike_shifts),
                               rho, float(M), float(epsilon), float(s_max))


def default_rho_schedule(j, start=12):
    """Window factors 1 below level ``start``, then growing by one per level."""
    return 1 if j < start else 2 + (j - start)


def make_density(base, floor, grid_depth, profile):
    """Turn ``base`` into a density ``1 + c (base - mean)`` bounded below by ``floor``.

    The constant function equals ``2**(-j0/2) sum_k phi_{j0,k}``, so it is
    carried by ``alpha``; recentring ``alpha`` removes the mass of ``base``.
    ``c`` is the largest value keeping the grid minimum at ``floor``.
    """
    if not 0 < floor < 1:
        raise ValueError("floor must lie in (0, 1)")
    centred = CoefficientField(base.j0, base.alpha - base.alpha.mean(), base.betas)
    vals = expansion.evaluate_grid(centred, profile, grid_depth)
    low = -float(np.min(vals))
    if not np.any(np.abs(vals) > 1e-14) or low <= 0.0:
        raise DegenerateBase("base has no mass-free variation to scale")
    c = (1.0 - floor) / low
    one = 2.0 ** (-base.j0 / 2.0) * np.ones(2 ** base.j0)
    return CoefficientField(base.j0, one + c * centred.alpha,
                            [c * b for b in centred.betas])
