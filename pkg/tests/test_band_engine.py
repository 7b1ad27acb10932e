import dataclasses
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq

from ssband.adaptive_estimation import (BandParameters, SmoothnessEstimate,
                                        threshold_scale)
from ssband.band_engine import (ConfidenceBand, band_constants, band_contains,
                                build_adaptive_band, build_exact_band, radius_r1,
                                radius_r2_r3)
from ssband.errors import Assumption2Failed, ModeMismatch
from ssband.function_space import CoefficientField, SmoothnessClass, sample_pi
from ssband.observation_models import NoisyCoefficients, observe_white_noise
from ssband.wavelet_core import evaluate_basis_function, standard_profile

seeds = st.integers(0, 2 ** 32 - 1)
CLS = SmoothnessClass(1.0, 1.0, 0.5, 2)
N = 2 ** 14


def adaptive_params(**kw):
    kw.setdefault("jmin_floor", 4)
    return BandParameters.adaptive(j0=1, **kw)


def exact_params(**kw):
    kw.setdefault("jmin_floor", 4)
    return BandParameters.exact(j0=1, **kw)


def noisy(seed, n=N, J=None, storage_extra=0, j0=1):
    J = int(math.log2(n)) - 1 + storage_extra if J is None else J
    f = sample_pi(CLS, J, seed, j0=j0, self_similar=True)
    return f, observe_white_noise(f, n, J, seed)


def test_band_constant_examples(db6):
    a, b, c, x = band_constants(8, 0.05, 1024, db6)
    assert a == pytest.approx(math.sqrt(2 * math.log(2) * 8))
    assert round(a, 4) == 3.3302
    assert x == pytest.approx(2.97020, abs=5e-6)
    assert band_constants(8, 1 - math.exp(-1), 1024, db6)[3] == pytest.approx(0.0, abs=1e-15)
    upsilon = db6.upsilon
    expected_b = a - (math.log(math.pi * math.log(2)) + math.log(8)
                      - 0.5 * math.log(1 + upsilon)) / (2 * a)
    assert b == pytest.approx(expected_b, rel=1e-15)


def test_r1_components(db6):
    unit = dataclasses.replace(db6, sigma2_max=1.0)
    a, b, c, x = band_constants(6, 0.1, 1024, unit)
    assert c == pytest.approx(0.25, rel=1e-15)
    assert radius_r1(6, 0.1, 1024, unit) == pytest.approx(0.25 * (x / a + b), rel=1e-15)


def test_r1_scaling(db6):
    # 2^{j/2} growth times a slowly growing Gumbel factor: the ratio over two
    # levels is about 2 (1 + 1/j), above 2 and decreasing toward it
    ratios = [radius_r1(j + 2, 0.05, N, db6) / radius_r1(j, 0.05, N, db6)
              for j in range(8, 40)]
    assert all(r > 2.0 for r in ratios)
    assert all(a > b for a, b in zip(ratios, ratios[1:]))
    assert all(r < 2.1 for r in ratios[17 - 8:])
    assert ratios[-1] == pytest.approx(2.0, abs=0.05)


@given(g1=st.floats(0.001, 0.99), g2=st.floats(0.001, 0.99), j=st.integers(1, 20))
def test_r1_decreasing_in_gamma(db6, g1, g2, j):
    lo, hi = sorted((g1, g2))
    assert radius_r1(j, lo, N, db6) >= radius_r1(j, hi, N, db6)


def test_r2_example(db6):
    unit_tau = dataclasses.replace(db6, tau=1.0)
    n = brentq(lambda n: threshold_scale(n, 1.0) - 0.01, 100, 1e9, xtol=1e-9)
    p = adaptive_params()
    est = SmoothnessEstimate(1.0, 1.0, 2, 3, 7, 7, 1.0)
    r2, _ = radius_r2_r3(6, est, n, p, unit_tau, j_cl=8)
    assert r2 == pytest.approx(0.68284, abs=5e-6)
    # l(j) = j when the class level does not exceed j
    assert radius_r2_r3(6, est, n, p, unit_tau, j_cl=5)[0] == 0.0


def test_r3_branches(db6):
    p = adaptive_params()
    zero = SmoothnessEstimate(0.0, 2.0, 2, 3, 7, 7, 1.0)
    assert math.isinf(radius_r2_r3(6, zero, N, p, db6, j_cl=8)[1])
    est = SmoothnessEstimate(0.5, 2.0, 2, 3, 7, 7, 1.0)
    r3 = radius_r2_r3(6, est, N, p, db6, j_cl=8)[1]
    assert r3 == pytest.approx(db6.tau * 2.0 * 2 ** (-8 * 0.5) / (2 ** 0.5 - 1))


def test_gates(db6):
    f, obs = noisy(0)
    haar = standard_profile("haar-test", 1)
    with pytest.raises(Assumption2Failed):
        build_adaptive_band(obs, adaptive_params(), N, haar)
    with pytest.raises(Assumption2Failed):
        build_exact_band(obs, exact_params(), N, haar)
    with pytest.raises(ModeMismatch):
        build_exact_band(obs, adaptive_params(), N, db6)
    with pytest.raises(ModeMismatch):
        build_adaptive_band(obs, exact_params(), N, db6)


def test_bonferroni_level(db6):
    n = 10000
    p = BandParameters.adaptive(j0=0, jmin_floor=3, gamma=0.1)
    assert (p.j_min(n), p.j_max(n)) == (3, 10)
    _, obs = noisy(1, n, 10, j0=0)
    band = build_adaptive_band(obs, p, n, db6)
    assert band.gamma_effective == pytest.approx(0.0125)


def test_lepskii_default_level(db6):
    p = adaptive_params()
    f = CoefficientField.zeros(1, 13).with_level(1, [1.0, -0.5]).with_level(2, [0.3] * 4)
    obs = NoisyCoefficients("white_noise", N, float("nan"), f)
    band = build_adaptive_band(obs, p, N, db6)
    assert band.chosen_level == p.j_min(N)


@given(seed=seeds)
def test_adaptive_radius_decomposition(db6, seed):
    p = adaptive_params()
    _, obs = noisy(seed)
    band = build_adaptive_band(obs, p, N, db6)
    r1, r2, r3 = band.components
    assert band.infinite == (band.diagnostics.s_hat == 0.0)
    assert band.infinite == ("infinite_radius" in band.flags)
    if not band.infinite:
        assert band.radius - r1 - r2 - r3 == 0.0
    assert r1 == radius_r1(band.chosen_level + 1, band.gamma_effective, N, db6)
    assert band.gamma_effective <= p.gamma


@given(seed=seeds)
def test_exact_band_radius(db6, seed):
    p = exact_params()
    _, obs = noisy(seed, storage_extra=5)
    band = build_exact_band(obs, p, N, db6)
    assert math.isfinite(band.radius) and band.components[1:] == (0.0, 0.0)
    # the radius depends on the data only through the chosen level
    assert band.radius == radius_r1(band.chosen_level + 1, p.gamma, N, db6)
    assert band.chosen_level <= obs.j_max


def test_exact_band_flags_clamping(db6):
    _, obs = noisy(3)
    band = build_exact_band(obs, exact_params(), N, db6)
    assert band.chosen_level == obs.j_max and "clamped" in band.flags


def test_membership(db6):
    _, obs = noisy(4)
    band = build_adaptive_band(obs, adaptive_params(), N, db6)
    assert band_contains(band, band.center, profile=db6)
    infinite = dataclasses.replace(band, radius=math.inf)
    assert band_contains(infinite, band.center * 100.0, profile=db6)
    finite = dataclasses.replace(band, radius=0.05)
    depth = band.center.J + 3
    t = np.arange(2 ** depth + 1) / 2 ** depth
    phi_max = np.max(np.abs(evaluate_basis_function(db6, 1, 0, t, kind="phi")))
    bump = CoefficientField.zeros(1, band.center.J).with_coefficient(
        1, 0, 2 * finite.radius / phi_max)
    assert not band_contains(finite, band.center + bump, profile=db6)


def test_band_export(db6):
    _, obs = noisy(5)
    band = build_adaptive_band(obs, adaptive_params(), N, db6)
    d = json.loads(band.to_json())
    assert set(d) >= {"kind", "chosen_level", "radius", "R1", "R2", "R3", "gamma_effective"}
    text = band.to_csv(db6, 6)
    lines = text.strip().split("\n")
    assert lines[0] == "t,center,lo,hi" and len(lines) == 2 ** 6 + 2
    t, mid, lo, hi = band.curves(db6, 6)
    if not band.infinite:
        np.testing.assert_allclose(hi - lo, 2 * band.radius)
