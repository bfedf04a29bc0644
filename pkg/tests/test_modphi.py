import math

import numpy as np
import pytest

from modlab import models, modphi, testfn
from modlab.stable import StableLaw


def _poisson_model():
    # X_n = (N_n - n) / n^(1/3) with N_n ~ Poisson(n) and t_n = n^(1/3)
    law = StableLaw.gaussian()

    def log_charfn(n, xi):
        u = np.asarray(xi, dtype=float) / n ** (1 / 3)
        return n * (np.exp(1j * u) - 1 - 1j * u)

    return modphi.ModPhiModel("poisson", law, t=lambda n: n ** (1 / 3), log_charfn=log_charfn,
                              zone=modphi.ZoneOfControl(1.0, 1.0, 3, 3, 1 / 6, 1 / 6))


def test_residue_is_one_at_zero():
    m = _poisson_model()
    assert modphi.residue(m, 50, np.array([0.0]))[0] == 1


def test_zone_satisfied_and_violated():
    m = _poisson_model()
    assert modphi.verify_zone(m, [10, 100]).passed
    tight = modphi.ZoneOfControl(1.0, 0.0, 3, 3, 1e-3, 0.0)
    assert not modphi.verify_zone(m, [10], zone=tight).passed


def test_zone_preconditions():
    z = modphi.ZoneOfControl(1.0, 1.5, 3, 3, 1.0)
    assert z.violations(StableLaw.gaussian())
    m = _poisson_model()
    with pytest.raises(modphi.PreconditionError):
        modphi.verify_zone(m, [10], zone=z)


def test_renormalization_alpha_one_drift():
    law = StableLaw(1.0, 1.0, 0.5)
    m = modphi.ModPhiModel("x", law, t=lambda n: float(n))
    slope, shift = modphi.renormalization(m, 10)
    assert slope == pytest.approx(0.1)
    assert shift == pytest.approx(-2 * 0.5 / math.pi * math.log(10))


def test_cumulant_zone():
    z = modphi.cumulant_zone(64.0, 8.0, 1.0)
    assert z.t_n == pytest.approx(16.0)
    assert z.scale(0.5) == pytest.approx(math.sqrt(64.0**1.5 / 8.0))
    with pytest.raises(ValueError):
        modphi.cumulant_zone(1.0, 2.0, 3.0)


def test_local_limit_methods_agree_for_gaf():
    g = models.gaf_zeros()
    exact = modphi.local_limit_estimate(g, 0.95, 0.0, (-1, 1), 0.3)
    mc = modphi.local_limit_estimate(g, 0.95, 0.0, (-1, 1), 0.3, method="montecarlo",
                                     mc_budget=200_000, seed=3)
    assert abs(mc.lhs - exact.lhs) < 4 * mc.details["stderr"] + 1e-12
    par = modphi.local_limit_estimate(g, 0.95, 0.0, (-1, 1), 0.3, method="parseval")
    assert par.details["lower"] - 1e-9 <= exact.lhs <= par.details["upper"] + 1e-9


def test_monte_carlo_independent_of_threads(monkeypatch):
    g = models.gaf_zeros()
    runs = []
    for threads in ("1", "4"):
        monkeypatch.setenv("MODPHI_THREADS", threads)
        runs.append(modphi.local_limit_estimate(g, 0.9, 0.0, (-1, 1), 0.3, method="montecarlo",
                                                mc_budget=50_000, seed=9).lhs)
    assert runs[0] == runs[1]


def test_gap_bound_for_gaf():
    g = models.gaf_zeros()
    for v in (20.0, 100.0, 1000.0):
        r2 = (-1 + math.sqrt(1 + 4 * v * v)) / (2 * v)
        zone = g.zone_of(r2)
        K = zone.K * g.t(r2) ** 1.5
        rep = modphi.test_function_gap(g, r2, testfn.fejer(K, center=0.5))
        assert rep.within, (v, rep)


def test_gap_support_precondition():
    g = models.gaf_zeros()
    with pytest.raises(modphi.PreconditionError):
        modphi.test_function_gap(g, 0.9, testfn.fejer(1e6))


def test_kolmogorov_distance_shrinks():
    g = models.gaf_zeros()
    d = [modphi.kolmogorov_distance(g, r2) for r2 in (0.5, 0.95)]
    assert d[1] < d[0]


def test_capability_error():
    m = modphi.ModPhiModel("bare", StableLaw.gaussian(), t=lambda n: 1.0)
    with pytest.raises(modphi.CapabilityError):
        m.log_cf(1, np.array([0.0]))
