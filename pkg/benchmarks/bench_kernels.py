"""Time the compiled kernels against the numpy fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each kernel is run on identical inputs with both backends; the table shows
the best wall time of ``--repeat`` runs and the speedup of the compiled one.
"""
import argparse
import timeit

import numpy as np

from ssband.kernels import compiled_available, get_backend
from ssband.wavelet_core import standard_profile


def cases(profile, rng):
    bank = profile.bank
    lo, hi, off = bank.lowpass, bank.highpass, bank.offset
    a, d = rng.standard_normal(2 ** 15), rng.standard_normal(2 ** 15)
    fine = rng.standard_normal(2 ** 16)
    level = 10
    coeffs = rng.standard_normal(2 ** level)
    t = rng.uniform(size=2 ** 16)
    w = rng.standard_normal(t.size)
    samples, x0, inv = profile.phi_samples, profile.x0, profile.inv_step
    return {
        "idwt_step 2^15 -> 2^16": lambda k: k.idwt_step(a, d, lo, hi, off),
        "dwt_step 2^16 -> 2^15": lambda k: k.dwt_step(fine, lo, hi, off),
        "eval_points level 10, 2^16 pts": lambda k: k.eval_points(samples, x0, inv, level,
                                                                  coeffs, t),
        "project_points level 10, 2^16 pts": lambda k: k.project_points(samples, x0, inv,
                                                                        level, t, w),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    if not compiled_available():
        print("compiled kernels are not built; nothing to compare")
        return 1
    profile = standard_profile("daubechies", 6)
    python, compiled = get_backend("python"), get_backend("compiled")
    print("%-36s %12s %12s %8s" % ("kernel", "numpy [ms]", "cython [ms]", "speedup"))
    for name, call in cases(profile, np.random.default_rng(0)).items():
        t_py = min(timeit.repeat(lambda: call(python), number=1, repeat=args.repeat))
        t_c = min(timeit.repeat(lambda: call(compiled), number=1, repeat=args.repeat))
        print("%-36s %12.3f %12.3f %7.1fx" % (name, 1e3 * t_py, 1e3 * t_c, t_py / t_c))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
