"""Orthonormal wavelet bases on [0, 1] and the basis constants used by the bands.

Filters are read from the plain-text tables in ``data/filters``. Scaling
functions are evaluated by the cascade (refinement) algorithm on a dyadic grid,
with the scaling function shifted so that its support is ``[1-K, K]``. All
bases are periodized on the unit interval.
"""
import json
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from importlib import resources

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import minimize_scalar

from . import kernels
from .errors import (IndexOutOfRange, NonConvergence, UnknownFamily,
                     UnsupportedOrder)

FAMILIES = ("daubechies", "symlet", "haar-test")
CONSTANTS_DEPTH = 14
UPSILON_READINGS = ("root", "square", "root-curvature")


@dataclass(frozen=True)
class FilterBank:
    """Quadrature mirror filter pair.

    Attributes
    ----------
    family_name : str
    N : int
        Number of vanishing moments.
    K : int
        Support parameter; phi and psi are supported on ``[1-K, K]``.
    lowpass, highpass : ndarray
        ``highpass[k] = (-1)**k * lowpass[L-1-k]``.
    """
    family_name: str
    N: int
    K: int
    lowpass: np.ndarray = field(repr=False)
    highpass: np.ndarray = field(repr=False)

    @property
    def length(self):
        return self.lowpass.shape[0]

    @property
    def offset(self):
        """Tap index that maps onto the centred support ``[1-K, K]``."""
        return self.K - 1


def _read_table(name):
    text = resources.files("ssband").joinpath("data/filters/" + name).read_text()
    return np.array([float(line) for line in text.split() if line.strip()])


@lru_cache(maxsize=None)
def load_filter(family_name, N):
    """Load a filter bank.

    Parameters
    ----------
    family_name : {"daubechies", "symlet", "haar-test"}
    N : int
        Vanishing moments, 2..20 for daubechies and symlet, 1 for haar-test.

    Returns
    -------
    FilterBank
    """
    if family_name not in FAMILIES:
        raise UnknownFamily("unknown wavelet family %r" % (family_name,))
    if family_name == "haar-test":
        if N != 1:
            raise UnsupportedOrder("haar-test only exists for N = 1")
        h = np.array([1.0, 1.0]) / math.sqrt(2.0)
    else:
        if not isinstance(N, (int, np.integer)) or not 2 <= N <= 20:
            raise UnsupportedOrder("%s order must lie in 2..20, got %r"
                                   % (family_name, N))
        h = _read_table("%s_%02d.txt" % (family_name, N))
    L = h.shape[0]
    g = np.array([(-1) ** k * h[L - 1 - k] for k in range(L)])
    h.setflags(write=False)
    g.setflags(write=False)
    return FilterBank(family_name, int(N), L // 2, h, g)


@dataclass(frozen=True)
class ScalingProfile:
    """Dyadic samples of phi, psi, phi' and the derived basis constants.

    Samples live on ``x0 + i * 2**-depth`` for ``i = 0 .. (2K-1) 2**depth``
    with ``x0 = 1 - K``. The constant fields are ``None`` until
    :func:`compute_constants` has been applied.
    """
    bank: FilterBank
    depth: int
    phi_samples: np.ndarray = field(repr=False)
    psi_samples: np.ndarray = field(repr=False)
    dphi_samples: np.ndarray = field(repr=False)
    sigma2_samples: np.ndarray = field(default=None, repr=False)
    t0: float = None
    sigma2_max: float = None
    sigma2_curvature: float = None
    upsilon: float = None
    tau: float = None
    j0: int = None
    upsilon_reading: str = None

    @property
    def x0(self):
        return float(1 - self.bank.K)

    @property
    def inv_step(self):
        return float(2 ** self.depth)

    @property
    def grid(self):
        return self.x0 + np.arange(self.phi_samples.shape[0]) / self.inv_step

    @property
    def complete(self):
        return self.tau is not None

    @property
    def sigma_bar(self):
        return math.sqrt(self.sigma2_max)

    @property
    def psi_sup(self):
        """Grid maximum of ``|psi|``."""
        return float(np.max(np.abs(self.psi_samples)))

    def to_json(self):
        """Serialize to a JSON string (samples included)."""
        out = {
            "family": self.bank.family_name, "N": self.bank.N,
            "K": self.bank.K, "depth": self.depth,
            "lowpass": self.bank.lowpass.tolist(),
            "phi": self.phi_samples.tolist(),
            "psi": self.psi_samples.tolist(),
            "dphi": self.dphi_samples.tolist(),
        }
        if self.complete:
            out.update({
                "sigma2": self.sigma2_samples.tolist(), "t0": self.t0,
                "sigma2_max": self.sigma2_max,
                "sigma2_curvature": self.sigma2_curvature,
                "upsilon": self.upsilon, "upsilon_reading": self.upsilon_reading,
                "tau": self.tau, "j0": self.j0,
            })
        return json.dumps(out)

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        bank = load_filter(d["family"], d["N"])

        def arr(key):
            a = np.array(d[key], dtype=np.float64)
            a.setflags(write=False)
            return a
        kw = {}
        if "tau" in d:
            kw = dict(sigma2_samples=arr("sigma2"), t0=d["t0"],
                      sigma2_max=d["sigma2_max"],
                      sigma2_curvature=d["sigma2_curvature"],
                      upsilon=d["upsilon"], tau=d["tau"], j0=d["j0"],
                      upsilon_reading=d["upsilon_reading"])
        return cls(bank, d["depth"], arr("phi"), arr("psi"), arr("dphi"), **kw)


def _integer_values(bank):
    """phi at the integers 0..L-1 of its standard support [0, L-1]."""
    h = bank.lowpass
    L = bank.length
    if L == 2:
        return np.array([1.0, 0.0])
    inner = np.arange(1, L - 1)
    A = np.zeros((L - 2, L - 2))
    for a, m in enumerate(inner):
        for b, n in enumerate(inner):
            if 0 <= 2 * m - n < L:
                A[a, b] = math.sqrt(2.0) * h[2 * m - n]
    w, v = np.linalg.eig(A)
    i = int(np.argmin(np.abs(w - 1.0)))
    if abs(w[i] - 1.0) > 1e-8:
        raise NonConvergence("refinement matrix has no unit eigenvalue")
    vec = np.real(v[:, i])
    vec = vec / vec.sum()
    return np.concatenate([[0.0], vec, [0.0]])


def cascade_evaluate(bank, depth=12):
    """Sample phi, psi and phi' on the dyadic grid of spacing ``2**-depth``.

    Parameters
    ----------
    bank : FilterBank
    depth : int, default 12
        Refinement depth, at least 6.

    Returns
    -------
    ScalingProfile
        A partial profile (constants not yet computed).
    """
    if depth < 6:
        raise ValueError("depth must be at least 6")
    phi = _phi_on_grid(bank, depth)
    psi = _psi_on_grid(bank, depth, phi)
    dphi = _richardson_derivative(phi, 2.0 ** -depth)
    for a in (phi, psi, dphi):
        a.setflags(write=False)
    return ScalingProfile(bank, depth, phi, psi, dphi)


@lru_cache(maxsize=32)
def _phi_cached(bank_key, depth):
    bank = load_filter(*bank_key)
    vals = _integer_values(bank)
    h = bank.lowpass
    sq2 = math.sqrt(2.0)
    L = bank.length
    for r in range(1, depth + 1):
        # grid spacing 2**-r over [0, L-1]; odd points are new
        n_new = (L - 1) * 2 ** r + 1
        out = np.zeros(n_new)
        out[::2] = vals
        odd = np.arange(1, n_new, 2)
        acc = np.zeros(odd.shape[0])
        prev_step = 2 ** (r - 1)
        for k in range(L):
            # 2x - k with x = m 2**-r lives at index m - k 2**(r-1) on the
            # 2**-(r-1) grid
            idx = odd - k * prev_step
            ok = (idx >= 0) & (idx < vals.shape[0])
            acc[ok] += h[k] * vals[idx[ok]]
        out[odd] = sq2 * acc
        vals = out
    _check_refinement(h, vals, depth)
    return vals


def _check_refinement(h, vals, r):
    """Sup residual of phi(x) - sqrt2 sum_k h_k phi(2x - k) on the grid."""
    n = vals.shape[0]
    p = np.arange(n)
    acc = np.zeros(n)
    for k in range(h.shape[0]):
        idx = 2 * p - k * 2 ** r
        ok = (idx >= 0) & (idx < n)
        acc[ok] += h[k] * vals[idx[ok]]
    resid = float(np.max(np.abs(math.sqrt(2.0) * acc - vals)))
    if resid > 1e-6:
        raise NonConvergence("refinement residual %.3g at depth %d" % (resid, r))


def _phi_on_grid(bank, depth):
    return _phi_cached((bank.family_name, bank.N), depth).copy()


def _psi_on_grid(bank, depth, phi):
    """psi(x) = sqrt2 sum_k g_k phi(2x - k) on the same grid as phi.

    Both functions carry the same shift, so grid index i maps to index
    ``2i - k 2**depth`` exactly as on the standard support.
    """
    g = bank.highpass
    n = phi.shape[0]
    i = np.arange(n)
    psi = np.zeros(n)
    for k in range(bank.length):
        idx = 2 * i - k * 2 ** depth
        ok = (idx >= 0) & (idx < n)
        psi[ok] += g[k] * phi[idx[ok]]
    return math.sqrt(2.0) * psi


def _richardson_derivative(values, h):
    pad = np.concatenate([np.zeros(2), values, np.zeros(2)])
    d1 = (pad[3:-1] - pad[1:-3]) / (2 * h)
    d2 = (pad[4:] - pad[:-4]) / (4 * h)
    return (4.0 * d1 - d2) / 3.0


def default_j0(bank):
    """Smallest j with 2**j >= 2(2K-1), so a level holds an interior wavelet."""
    need = 2 * (2 * bank.K - 1)
    return int(math.ceil(math.log2(need)))


def _fold(samples, depth):
    """Fold support samples onto one period: rows are unit-length blocks."""
    step = 2 ** depth
    body = samples[:-1]
    return body.reshape(-1, step)


def compute_constants(profile, j0=None, upsilon_reading="root"):
    """Complete a profile with the variance profile and band constants.

    Parameters
    ----------
    profile : ScalingProfile
        Output of :func:`cascade_evaluate`.
    j0 : int, optional
        Coarsest resolution level; defaults to :func:`default_j0`.
    upsilon_reading : {"root", "square", "root-curvature"}
        How the denominator of the second-order Gumbel correction is read:
        ``sigma_bar * (sigma^2)''(t0)`` with sigma_bar the root of the maximum
        ("root") or the maximum itself ("square"), or ``sigma_bar *
        sigma''(t0)`` with sigma the root of the variance profile
        ("root-curvature").

    Returns
    -------
    ScalingProfile
    """
    if upsilon_reading not in UPSILON_READINGS:
        raise ValueError("unknown upsilon reading %r" % (upsilon_reading,))
    bank = profile.bank
    if j0 is None:
        j0 = default_j0(bank)
    dc = max(CONSTANTS_DEPTH, profile.depth)
    fine = profile.phi_samples if dc == profile.depth else _phi_on_grid(bank, dc)
    sigma2 = np.sum(_fold(fine, dc) ** 2, axis=0)
    nper = sigma2.shape[0]
    hgrid = 1.0 / nper
    i_max = int(np.argmax(sigma2))
    spline = CubicSpline(np.arange(nper + 1) * hgrid,
                         np.append(sigma2, sigma2[0]), bc_type="periodic")

    def s2(t):
        return float(spline(np.mod(t, 1.0)))

    # refine in a shifted variable so the golden-section tolerance, which is
    # relative to |t|, acts as an absolute tolerance of order 1e-10
    centre = 1.0 + i_max * hgrid
    t0 = i_max * hgrid
    if s2(t0 - hgrid) < s2(t0) > s2(t0 + hgrid):
        res = minimize_scalar(lambda u: -s2(u - 1.0), method="golden",
                              bracket=(centre - hgrid, centre, centre + hgrid),
                              options={"xtol": 2.5e-11})
        if s2(res.x - 1.0) >= s2(t0):
            t0 = float(np.mod(res.x - 1.0, 1.0))
            if t0 >= 1.0:  # np.mod of a tiny negative rounds up to 1
                t0 = 0.0
    sigma2_max = float(max(s2(t0), sigma2[i_max]))
    hd = 2.0 ** -10
    curvature = (s2(t0 + hd) - 2.0 * s2(t0) + s2(t0 - hd)) / hd ** 2

    # sum_k phi'(t0 - k)^2 from the profile derivative samples
    K = bank.K
    pts = np.array([t0 - k for k in range(-K - 1, K + 2)])
    dvals = np.interp(pts, profile.grid, profile.dphi_samples, left=0.0, right=0.0)
    grad_sq = float(np.sum(dvals ** 2))
    sigma_bar = math.sqrt(sigma2_max)
    if upsilon_reading == "root":
        denom = sigma_bar * curvature
    elif upsilon_reading == "square":
        denom = sigma2_max * curvature
    else:
        # sigma'' at the maximum of sigma^2 equals (sigma^2)''/(2 sigma_bar)
        denom = curvature / 2.0
    upsilon = -grad_sq / denom if denom != 0.0 else math.inf

    # tau: with 2**(j0+1) >= 2K-1 no wavelet overlaps its own wrap, so the
    # periodized level-(j0+1) sum is the folded integer-shift sum
    tau = float(np.max(np.sum(np.abs(_fold(profile.psi_samples, profile.depth)),
                              axis=0)))
    sigma2.setflags(write=False)
    return replace(profile, sigma2_samples=sigma2, t0=t0,
                   sigma2_max=sigma2_max, sigma2_curvature=float(curvature),
                   upsilon=float(upsilon), tau=tau, j0=int(j0),
                   upsilon_reading=upsilon_reading)


@dataclass(frozen=True)
class Assumption2Report:
    unique_max: bool
    curvature_negative: bool
    margin: float

    @property
    def passed(self):
        return self.unique_max and self.curvature_negative

    def to_dict(self):
        return {"unique_max": self.unique_max,
                "curvature_negative": self.curvature_negative,
                "margin": self.margin, "passed": self.passed}


def verify_assumption2(profile, tolerance=1e-6):
    """Check that the variance profile has a unique, nondegenerate maximum.

    The near-maximal set ``{t : sigma2(t) >= max - tolerance}`` must form one
    arc around ``t0`` no wider than the parabolic neighbourhood implied by
    the curvature (plus two grid cells). ``margin`` is the drop from the
    maximum to the highest competing local maximum (or to the minimum when
    there is none); it is zero for a flat profile.
    """
    s2 = np.asarray(profile.sigma2_samples)
    n = s2.shape[0]
    h = 1.0 / n
    curv = profile.sigma2_curvature
    curvature_negative = bool(curv < 0.0)
    if curvature_negative:
        radius = math.sqrt(2.0 * tolerance / -curv) + 2.0 * h
    else:
        radius = 0.5
    t = np.arange(n) * h
    dist = np.abs(np.mod(t - profile.t0 + 0.5, 1.0) - 0.5)
    near = s2 >= profile.sigma2_max - tolerance
    inside = dist <= min(radius, 0.25)
    unique = bool(np.all(inside[near]) and np.any(near))
    # margin: drop from the maximum to the best competing local maximum
    peaks = (s2 >= np.roll(s2, 1)) & (s2 >= np.roll(s2, -1)) & ~inside
    rival = np.max(s2[peaks]) if np.any(peaks) else np.min(s2)
    margin = float(profile.sigma2_max - rival)
    return Assumption2Report(unique, curvature_negative, margin)


def evaluate_basis_function(profile, j, k, t, kind=None):
    """Value of a periodized basis function at ``t``.

    Level ``j0`` denotes the scaling function ``phi_{j0,k}`` (the coarse
    coefficient convention); finer levels denote wavelets ``psi_{j,k}``.
    Pass ``kind="phi"`` or ``kind="psi"`` to override; an explicit kind
    accepts any level ``j >= 0``.

    Parameters
    ----------
    profile : ScalingProfile
    j, k : int
        Level and shift, ``0 <= k < 2**j``.
    t : float or array_like
        Points in [0, 1].
    """
    j0 = profile.j0 if profile.j0 is not None else default_j0(profile.bank)
    below = False
    if kind is None:
        kind = "phi" if j == j0 else "psi"
        below = j < j0
    if kind not in ("phi", "psi"):
        raise ValueError("kind must be 'phi' or 'psi'")
    if j < 0 or below or not 0 <= k < 2 ** j:
        raise IndexOutOfRange("no basis function at level %d shift %d" % (j, k))
    samples = profile.phi_samples if kind == "phi" else profile.psi_samples
    coeffs = np.zeros(2 ** j)
    coeffs[k] = 1.0
    tt = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if np.any((tt < 0.0) | (tt > 1.0)):
        raise IndexOutOfRange("t must lie in [0, 1]")
    out = kernels.eval_points(samples, profile.x0, profile.inv_step, j, coeffs, tt)
    return float(out[0]) if np.ndim(t) == 0 else out


@lru_cache(maxsize=16)
def standard_profile(family_name="daubechies", N=6, depth=12, j0=None,
                     upsilon_reading="root"):
    """Cached complete profile for a family and order."""
    bank = load_filter(family_name, N)
    return compute_constants(cascade_evaluate(bank, depth), j0, upsilon_reading)
