"""Regenerate the filter coefficient tables shipped in ``ssband/data/filters``.

Daubechies (extremal phase) filters are computed by spectral factorisation
of the half-band polynomial at 60 significant digits with mpmath. Symlet
tables are taken from PyWavelets, which is only needed when running this
script; it is not a runtime dependency.

Usage::

    python tools/generate_filters.py
"""
import os

import mpmath as mp
import numpy as np

OUT = os.path.join(os.path.dirname(__file__), "..", "src", "ssband", "data",
                   "filters")
mp.mp.dps = 60


def daubechies_lowpass(order):
    """Minimum-phase lowpass filter with ``order`` vanishing moments."""
    # P(y) = sum_k C(order-1+k, k) y^k with y = sin^2(w/2)
    poly = [mp.binomial(order - 1 + k, k) for k in range(order)]
    y_roots = mp.polyroots(poly[::-1], maxsteps=500, extraprec=400) \
        if order > 1 else []
    coeffs = [mp.mpf(1), mp.mpf(1)]
    for _ in range(order - 1):
        coeffs = np.convolve(coeffs, [mp.mpf(1), mp.mpf(1)]).tolist()
    coeffs = [mp.mpc(c) for c in coeffs]
    for y in y_roots:
        # z + 1/z = 2 - 4y; keep the root inside the unit circle
        b = 2 - 4 * y
        disc = mp.sqrt(b * b - 4)
        z = (b - disc) / 2
        if abs(z) > 1:
            z = (b + disc) / 2
        # factor (1 - z w) in powers of w = 1/z_var
        new = [mp.mpc(0)] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            new[i] += c
            new[i + 1] -= z * c
        coeffs = new
    coeffs = [mp.re(c) for c in coeffs]
    scale = mp.sqrt(2) / mp.fsum(coeffs)
    return [c * scale for c in coeffs]


def write_table(name, coeffs):
    path = os.path.join(OUT, name)
    with open(path, "w") as fh:
        for c in coeffs:
            fh.write("%.17g\n" % float(c))


def main():
    import pywt

    os.makedirs(OUT, exist_ok=True)
    for order in range(2, 21):
        h = daubechies_lowpass(order)
        ref = np.asarray(pywt.Wavelet("db%d" % order).rec_lo)
        err = np.max(np.abs(np.array([float(c) for c in h]) - ref))
        if err > 1e-12:
            raise RuntimeError("db%d disagrees with reference: %g" % (order, err))
        write_table("daubechies_%02d.txt" % order, h)
        write_table("symlet_%02d.txt" % order,
                    pywt.Wavelet("sym%d" % order).rec_lo)
        print("order %2d  max deviation from reference %.2e" % (order, err))


if __name__ == "__main__":
    main()
