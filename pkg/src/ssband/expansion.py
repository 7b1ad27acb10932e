"""Evaluation and projection of periodized wavelet expansions.

A field is anything with ``j0``, ``J`` and ``level(j)`` (see
:class:`ssband.function_space.CoefficientField`): scaling coefficients at
``j0`` and wavelet coefficients on levels ``j0 < j <= J``. The wavelet block
at level ``j0`` itself is not part of the system, so an expansion through
level ``J`` lies in the scaling space of resolution ``J + 1``.
"""
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from . import kernels


def synthesize(field, bank):
    """Scaling coefficients at resolution ``J + 1`` that reproduce ``field``."""
    a = np.asarray(field.alpha, dtype=np.float64)
    # the absent wavelet block at j0 contributes nothing
    a = kernels.idwt_step(a, np.zeros_like(a), bank.lowpass, bank.highpass,
                          bank.offset)
    for j in range(field.j0 + 1, field.J + 1):
        a = kernels.idwt_step(a, field.level(j), bank.lowpass, bank.highpass,
                              bank.offset)
    return a


def analyze(scaling, j0, bank):
    """Split scaling coefficients at resolution ``J + 1`` into field blocks.

    Returns
    -------
    alpha : ndarray
    betas : list of ndarray
        Wavelet blocks for levels ``j0 + 1 .. J`` in increasing order.
    """
    a = np.asarray(scaling, dtype=np.float64)
    betas = []
    while a.shape[0] > 2 ** (j0 + 1):
        a, d = kernels.dwt_step(a, bank.lowpass, bank.highpass, bank.offset)
        betas.append(d)
    # drop the level-j0 wavelet block, which the system does not contain
    a, _ = kernels.dwt_step(a, bank.lowpass, bank.highpass, bank.offset)
    return a, betas[::-1]


def _grid_from_scaling(scaling, profile, depth):
    """Values of sum_k a_k phi_{R,k} at i 2**-depth, i = 0 .. 2**depth - 1."""
    R = int(np.log2(scaling.shape[0]))
    K = profile.bank.K
    r = depth - R
    if r < 0:
        return _grid_from_scaling(scaling, profile, R)[:: 2 ** -r]
    if r > profile.depth:
        t = np.arange(2 ** depth) / 2.0 ** depth
        return kernels.eval_points(profile.phi_samples, profile.x0,
                                   profile.inv_step, R, scaling, t)
    # f(q 2^-R + p 2^-depth) = 2^(R/2) sum_m a[q - m] phi(m + p 2^-r);
    # windows of a_ext hold a[q + K - 1 - c] at column c, i.e. m = c + 1 - K
    size = scaling.shape[0]
    idx = np.arange(-K, size + K) % size
    ext = scaling[idx]
    win = sliding_window_view(ext, 2 * K)[:size]
    m = np.arange(1 - K, K + 1)
    p = np.arange(2 ** r)
    pos = (m[None, :] - profile.x0) * profile.inv_step \
        + p[:, None] * 2 ** (profile.depth - r)
    pos = pos.astype(np.int64)
    taps = np.where(pos < profile.phi_samples.shape[0],
                    profile.phi_samples[np.minimum(pos, profile.phi_samples.shape[0] - 1)],
                    0.0)
    # window column c is ext[q + c] = a[q + c - K]; we need a[q - m], so
    # column c pairs with m = K - c
    taps = taps[:, ::-1]
    vals = win @ taps.T
    return vals.ravel() * 2.0 ** (R / 2.0)


def evaluate_grid(field, profile, depth):
    """Evaluate ``field`` at the ``2**depth + 1`` points ``i 2**-depth``."""
    a = synthesize(field, profile.bank)
    vals = _grid_from_scaling(a, profile, depth)
    return np.append(vals, vals[0])


def evaluate_points(field, profile, t):
    """Evaluate ``field`` at arbitrary points of [0, 1]."""
    a = synthesize(field, profile.bank)
    R = int(np.log2(a.shape[0]))
    return kernels.eval_points(profile.phi_samples, profile.x0,
                               profile.inv_step, R, a,
                               np.asarray(t, dtype=np.float64))


def project_points(profile, j0, J, t, weights):
    """Empirical coefficients sum_i w_i b(t_i) for every basis function b.

    Projects onto the scaling functions at resolution ``J + 1`` and applies
    the analysis transform, which is exact for the periodized system.

    Returns
    -------
    alpha : ndarray
    betas : list of ndarray
    """
    c = kernels.project_points(profile.phi_samples, profile.x0,
                               profile.inv_step, J + 1,
                               np.asarray(t, dtype=np.float64),
                               np.asarray(weights, dtype=np.float64))
    return analyze(c, j0, profile.bank)
