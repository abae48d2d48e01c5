import math

import numpy as np

from trotterplots import fitting


def test_powerlaw_fit_recovers_exact_power_law():
    xs = np.array([4.0, 6.0, 8.0, 12.0, 16.0])
    ys = 3.0 * xs ** 1.8
    slope, intercept = fitting.powerlaw_fit(xs, ys)
    assert abs(slope - 1.8) < 1e-12
    assert abs(intercept - math.log(3.0)) < 1e-12


def test_powerlaw_fit_averages_noise_symmetrically():
    xs = np.array([4.0, 8.0, 16.0])
    ys = 2.0 * xs ** 1.5
    up, dn = ys.copy(), ys.copy()
    up[1] *= math.e
    dn[1] /= math.e
    s_up, _ = fitting.powerlaw_fit(xs, up)
    s_dn, _ = fitting.powerlaw_fit(xs, dn)
    assert abs((s_up + s_dn) / 2 - 1.5) < 1e-12


def test_log2_fit_recovers_halving_per_step():
    ns = np.arange(4, 11, dtype=float)
    ys = 0.7 * 2.0 ** (-0.5 * ns)
    slope, intercept = fitting.log2_fit(ns, ys)
    assert abs(slope + 0.5) < 1e-12
    assert abs(intercept - math.log2(0.7)) < 1e-12
