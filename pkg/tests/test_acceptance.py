"""Acceptance criteria, one marked group per criterion.

Run with ``pytest tests/test_acceptance.py``; the terminal summary prints one
PASS/FAIL line per criterion (see ``conftest.py``).
"""

import math
import sys
import time

import numpy as np
import pytest

from modlab import cli, modphi, models, stable, testfn, tilt
from modlab.oracle import pmfs

criterion = pytest.mark.criterion


def _timed(fn, *args, **kw):
    start = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - start


# --- 1 ---------------------------------------------------------------------------------

def _skew_grid():
    out = []
    for alpha in (0.5, 0.8, 1.2, 1.5, 1.9):
        cap = min(1.0, 0.9 / abs(math.tan(math.pi * alpha / 2)))
        for b in (-1.0, -0.5, 0.0, 0.5, 1.0):
            out.append((alpha, b * cap))
    return out


@criterion(1, "stable densities against closed forms and the series at zero")
def test_stable_closed_forms_and_series():
    start = time.perf_counter()
    x = np.linspace(-5, 5, 201)
    gauss = stable.StableLaw.gaussian().density(x)
    cauchy = stable.StableLaw.cauchy().density(x)
    assert np.max(np.abs(gauss - np.exp(-x**2 / 2) / math.sqrt(2 * math.pi))) < 1e-8
    assert np.max(np.abs(cauchy - 1 / (math.pi * (1 + x**2)))) < 1e-8
    worst = 0.0
    for alpha, beta in _skew_grid():
        law = stable.StableLaw(1.0, alpha, beta)
        assert abs(beta * math.tan(math.pi * alpha / 2)) <= 0.9 + 1e-12
        worst = max(worst, abs(stable.density_at_zero_series(law) - law.density(0.0)))
    assert worst < 1e-8
    assert time.perf_counter() - start < 10


# --- 2 ---------------------------------------------------------------------------------

@criterion(2, "Selberg sandwich dominance and 1/K gap")
@pytest.mark.parametrize("K", [10.0, 100.0, 1000.0])
def test_sandwich_dominance(K):
    lo = testfn.selberg_minorant(0.0, 1.0, K)
    hi = testfn.selberg_majorant(0.0, 1.0, K)
    x = np.linspace(-1.0, 2.0, 1000)
    ind = ((x > 0) & (x < 1)).astype(float)
    assert np.all(hi(x) >= ind - 1e-9)
    assert np.all(lo(x) <= ind + 1e-9)


@criterion(2, "Selberg sandwich dominance and 1/K gap")
def test_sandwich_gap_scaling():
    scaled = []
    for K in (10.0, 100.0, 1000.0):
        g1, g2 = testfn.sandwich_indicator([(0.0, 1.0)], 4 * math.pi / K)
        assert g2.K == pytest.approx(K)
        scaled.append(K * (g2.integral - g1.integral))
    scaled = np.array(scaled)
    assert np.max(np.abs(scaled / scaled[0] - 1)) < 0.01


# --- 3 ---------------------------------------------------------------------------------

def _master_cases():
    gaf = models.gaf_zeros()
    part = models.partition_size()
    markov = models.markov_visits([[0.7, 0.3], [0.2, 0.8]])
    cw = tilt.curie_weiss()
    return [
        ("gaf", gaf.pmf, gaf.cf, 0.5), ("gaf", gaf.pmf, gaf.cf, 0.9),
        ("partition", part.pmf, part.cf, 0.5), ("partition", part.pmf, part.cf, 0.9),
        ("markov", markov.pmf, markov.cf, 200), ("curie_weiss", cw.base_pmf, cw.charfn, 500),
    ]


@criterion(3, "charfn from the exact pmf equals the closed-form charfn")
@pytest.mark.parametrize("case", range(6))
def test_master_charfn(case):
    name, pmf, cf, n = _master_cases()[case]
    xi = np.random.default_rng(case).uniform(-10, 10, 32)
    assert np.max(np.abs(pmf(n).charfn(xi) - cf(n, xi))) < 1e-9, name


# --- 4 ---------------------------------------------------------------------------------

@criterion(4, "GAF local limit at R^2 = 0.98")
@pytest.mark.parametrize("x", [0.0, 1.0])
def test_gaf_local_limit(x):
    start = time.perf_counter()
    g = models.gaf_zeros()
    assert models.gaf_moments(0.98)["v"] == pytest.approx(24.7474747, rel=1e-6)
    errs = [abs(modphi.local_limit_estimate(g, r2, x, (-1, 1), 0.4).rel_err)
            for r2 in (0.9, 0.98)]
    assert errs[1] < 0.10
    assert errs[1] < errs[0]
    assert time.perf_counter() - start < 30


# --- 5 ---------------------------------------------------------------------------------

def _mean_defect_mp(q, dps=250):
    """sum n q^n / (1 - q^n) minus its three-term expansion, at high precision."""
    mpmath = pytest.importorskip("mpmath")
    with mpmath.workdps(dps):
        qm = mpmath.mpf(q)
        total = mpmath.mpf(0)
        stop = mpmath.mpf(10) ** (-dps + 10)
        qn = qm
        n = 1
        while qn * n > stop * (1 - qm):
            total += n * qn / (1 - qn)
            qn *= qm
            n += 1
        L = mpmath.log(qm)
        defect = total - (mpmath.zeta(2) / L**2 + 1 / (2 * L) + mpmath.mpf(1) / 24)
        return total, defect


@criterion(5, "partition moments and local limit")
def test_partition_mean_expansion():
    part = models.partition_size()
    m90, d90 = _mean_defect_mp(0.9)
    m99, d99 = _mean_defect_mp(0.99)
    # the double-precision series agrees with the high-precision one
    assert part.series(0.9)[1] == pytest.approx(float(m90), rel=1e-13)
    assert part.series(0.99)[1] == pytest.approx(float(m99), rel=1e-13)
    assert abs(d99) < abs(d90)
    assert abs(d90) > 0


@criterion(5, "partition moments and local limit")
def test_partition_variance_asymptotics():
    V = models.partition_size().series(0.99)[2]
    assert V * (1 - 0.99) ** 3 == pytest.approx(2 * math.pi**2 / 6, rel=0.05)


@criterion(5, "partition moments and local limit")
def test_partition_local_limit():
    start = time.perf_counter()
    part = models.partition_size()
    pmf = part.pmf(0.98)
    assert len(pmf) > 10_000
    rep = modphi.local_limit_estimate(part, 0.98, 0.0, (-1, 1), 0.3)
    assert rep.target == pytest.approx(2 / math.sqrt(2 * math.pi))
    assert abs(rep.rel_err) < 0.10
    assert time.perf_counter() - start < 60


# --- 6 ---------------------------------------------------------------------------------

P_TWO = [[0.7, 0.3], [0.2, 0.8]]


@criterion(6, "Markov visits local limit and variance")
def test_markov_local_limit():
    mk = models.markov_visits(P_TWO, 0)
    rep = modphi.local_limit_estimate(mk, 5000, 0.0, (-1, 1), 0.4)
    assert abs(rep.rel_err) < 0.10


@criterion(6, "Markov visits local limit and variance")
def test_markov_variance_return_time():
    mk = models.markov_visits(P_TWO, 0)
    pi_a = mk.info["pi"][0]
    expected = pi_a**3 * models.markov_return_time_variance(P_TWO, 0)
    assert mk.variance(5000) / 5000 == pytest.approx(expected, rel=0.05)


# --- 7 ---------------------------------------------------------------------------------

@criterion(7, "Curie-Weiss tilted local limit and Gibbs identity")
@pytest.mark.parametrize("x", [0.0, 1.0])
def test_curie_weiss_local_limit(x):
    cw = tilt.curie_weiss()
    rep, elapsed = _timed(tilt.tilted_local_limit, cw, 10**4, x, (-1, 1), 0.5)
    assert rep.target == pytest.approx(math.exp(-x**4 / 12) * 2 / tilt.quartic_integral(), rel=1e-12)
    assert abs(rep.rel_err) < 0.10
    assert elapsed < 30


@criterion(7, "Curie-Weiss tilted local limit and Gibbs identity")
def test_tilt_gibbs_identity():
    cw = tilt.curie_weiss()
    for n in range(1, 13):
        a = tilt.tilted_pmf(cw, n)
        b = tilt.brute_force_gibbs(n)
        assert len(a) == len(b)
        assert np.max(np.abs(a.probs - b.probs)) < 1e-12


# --- 8 ---------------------------------------------------------------------------------

@criterion(8, "winding angle at every scale and L1 residue bound")
@pytest.mark.parametrize("scale", ["10", "log(t)^3", "t^0.1"])
def test_winding_strong_local_limit(scale):
    t = 1e6
    s = {"10": 10.0, "log(t)^3": math.log(t) ** 3, "t^0.1": t**0.1}[scale]
    rep = modphi.strong_local_limit(models.brownian_winding(), t, 0.0, (-1, 1), s)
    assert rep.target == pytest.approx(2 / math.pi)
    assert abs(rep.rel_err) < 0.05


@criterion(8, "winding angle at every scale and L1 residue bound")
@pytest.mark.parametrize("t", [1e3, 1e6])
def test_winding_l1_bound(t):
    dist = modphi.l1_residue_distance(models.brownian_winding(), t)
    assert dist.upper < models.winding_l1_bound(t)


# --- 9 ---------------------------------------------------------------------------------

@criterion(9, "GUE and Laguerre residues form Cauchy sequences")
@pytest.mark.parametrize("build", [models.gue_logdet, models.laguerre_logdet])
def test_matrix_residue_trend(build):
    m = build()
    # residues are conjugate-symmetric, so [0, 3] covers [-3, 3]
    xi = np.linspace(0, 3, 31)
    th = [modphi.residue(m, n, xi) for n in (10**2, 10**4, 10**6)]
    d1 = np.max(np.abs(th[1] - th[0]))
    d2 = np.max(np.abs(th[2] - th[1]))
    assert d2 < d1
    for n in (10**2, 10**4, 10**6):
        assert modphi.residue(m, n, np.array([0.0]))[0] == 1
        h = 1e-5
        lc = m.log_cf(n, np.array([-h, h]))
        assert abs((lc[1] - lc[0]) / (2 * h)) < 1e-8


# --- 10 --------------------------------------------------------------------------------

@criterion(10, "random zeta zone bound and Monte Carlo local limit")
def test_zeta_zone():
    rep = models.zeta_zone_check(models.random_zeta(), 1000)
    assert rep["S_le_envelope"]
    assert rep["passed"]


@criterion(10, "random zeta zone bound and Monte Carlo local limit")
def test_zeta_monte_carlo():
    start = time.perf_counter()
    z = models.random_zeta()
    # z-square [-h, h]^2 with Z = Y / sqrt(2): Y-square of half width sqrt(2) h
    h = 0.1
    a = math.sqrt(2) * h
    rep = modphi.strong_local_limit(z, 10**4, (0.0, 0.0), ((-a, a), (-a, a)), 1.0,
                                    method="montecarlo", mc_budget=100_000, seed=2024)
    target_z = math.exp(0.0) / math.pi * (2 * h) ** 2
    assert rep.target == pytest.approx(target_z, rel=1e-12)
    assert abs(rep.lhs - rep.target) <= 3 * rep.details["stderr"]
    assert time.perf_counter() - start < 120


# --- 11 --------------------------------------------------------------------------------

@criterion(11, "triangle counts: exhaustive pmf against Monte Carlo")
def test_triangles_total_variation():
    n, p, draws = 5, 0.5, 10**6
    exact = pmfs.triangle_count_pmf(n, p).probs
    counts = models.sample_triangles(n, p, np.random.default_rng(11), draws)
    freq = np.bincount(counts, minlength=exact.size) / draws
    assert freq.size == exact.size
    tv = 0.5 * np.sum(np.abs(freq - exact))
    sigma = 0.5 * np.sum(np.sqrt(exact * (1 - exact) / draws))
    assert tv < 3 * sigma


@criterion(11, "triangle counts: exhaustive pmf against Monte Carlo")
@pytest.mark.parametrize("n", [3, 4, 5, 6, 7])
def test_triangle_mean_exact(n):
    p = 0.5
    pmf = pmfs.triangle_count_pmf(n, p)
    assert 6 * pmf.mean() == pytest.approx(p**3 * n * (n - 1) * (n - 2), rel=1e-12)


# --- 12 --------------------------------------------------------------------------------

REPORT_CONFIG = """
[report]
seed = 12

[gaf]
command = llt
model = gaf
r2 = 0.9,0.95
x = 0
window = -1,1
delta = 0.4
method = exact

[triangles]
command = llt
model = triangles
param.p = 0.5
n = 5
window = -1,1
delta = 0.3
method = montecarlo
mc_budget = 30000

[zeta]
command = llt
model = zeta2d
N = 100
window = -1,1
delta = 0.2
method = montecarlo
mc_budget = 20000
"""


@criterion(12, "report runs are byte-identical for a fixed seed")
def test_report_determinism(tmp_path, monkeypatch):
    cfg = tmp_path / "exp.ini"
    cfg.write_text(REPORT_CONFIG, encoding="utf-8")
    outputs = []
    for run, threads in enumerate(("1", "3", "1")):
        monkeypatch.setenv("MODPHI_THREADS", threads)
        out = tmp_path / f"run{run}"
        assert cli.main(["report", str(cfg), "--out-dir", str(out)]) == 0
        outputs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    assert outputs[0] == outputs[1] == outputs[2]
    assert set(outputs[0]) == {"gaf.json", "triangles.json", "zeta.json", "summary.csv"}


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
