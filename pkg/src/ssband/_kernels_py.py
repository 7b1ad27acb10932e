"""Pure numpy implementations of the hot loops.

These mirror the compiled kernels in ``_kernels.pyx`` exactly in signature and
semantics and are used whenever the extension is unavailable.

All transforms are periodic. A filter tap ``m`` connects coarse index ``k`` to
fine index ``(2k + m - offset) mod n_fine``, where ``offset`` recentres the
filter so that the scaling function lives on ``[1-K, K]``.
"""
import numpy as np


def idwt_step(approx, detail, lowpass, highpass, offset):
    """One periodic synthesis step from level j to level j+1."""
    approx = np.ascontiguousarray(approx, dtype=np.float64)
    detail = np.ascontiguousarray(detail, dtype=np.float64)
    n = approx.shape[0]
    n2 = 2 * n
    out = np.zeros(n2)
    base = 2 * np.arange(n) - offset
    for m in range(len(lowpass)):
        idx = (base + m) % n2
        # for a fixed tap the targets 2k + m - offset are distinct mod n2
        out[idx] += lowpass[m] * approx + highpass[m] * detail
    return out


def dwt_step(fine, lowpass, highpass, offset):
    """One periodic analysis step from level j+1 to level j."""
    fine = np.ascontiguousarray(fine, dtype=np.float64)
    n2 = fine.shape[0]
    n = n2 // 2
    approx = np.zeros(n)
    detail = np.zeros(n)
    base = 2 * np.arange(n) - offset
    for m in range(len(lowpass)):
        vals = fine[(base + m) % n2]
        approx += lowpass[m] * vals
        detail += highpass[m] * vals
    return approx, detail


def _taps(samples, x0, inv_step, level, t):
    """Yield (shift index, interpolated sample value) pairs for every wrap."""
    npts = samples.shape[0]
    width = int(np.ceil((npts - 1) / inv_step)) + 1
    u = np.asarray(t, dtype=np.float64) * (2.0 ** level)
    top = np.floor(u - x0).astype(np.int64)
    size = 1 << level
    for o in range(width + 1):
        k = top - o
        pos = (u - k - x0) * inv_step
        ok = (pos >= 0.0) & (pos <= npts - 1)
        i0 = np.clip(np.floor(pos).astype(np.int64), 0, npts - 2)
        frac = pos - i0
        val = samples[i0] * (1.0 - frac) + samples[i0 + 1] * frac
        val = np.where(ok, val, 0.0)
        yield k % size, val


def eval_points(samples, x0, inv_step, level, coeffs, t):
    """Evaluate sum_k coeffs[k] g_{level,k}(t) for a periodized dilate g.

    ``samples`` holds g on the grid ``x0 + i / inv_step``; values between
    grid points are interpolated linearly.
    """
    samples = np.ascontiguousarray(samples, dtype=np.float64)
    coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
    t = np.ascontiguousarray(t, dtype=np.float64)
    out = np.zeros(t.shape[0])
    for k, val in _taps(samples, x0, inv_step, level, t):
        out += coeffs[k] * val
    return out * 2.0 ** (level / 2.0)


def project_points(samples, x0, inv_step, level, t, weights):
    """Accumulate c[k] = sum_i weights[i] g_{level,k}(t_i)."""
    samples = np.ascontiguousarray(samples, dtype=np.float64)
    t = np.ascontiguousarray(t, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    size = 1 << level
    out = np.zeros(size)
    for k, val in _taps(samples, x0, inv_step, level, t):
        out += np.bincount(k, weights=weights * val, minlength=size)
    return out * 2.0 ** (level / 2.0)
