import json
import math

import pytest

from rankare import Cauchy, Gaussian, PowerExp, StudentT, VanDerWaerden, Wilcoxon, are_nonserial
from rankare import simulate as sim
from rankare.errors import BudgetExceeded, DomainError

W, V = Wilcoxon(), VanDerWaerden()


def within(est, target, k=3.0):
    return abs(est.power - target) <= k * math.sqrt(target * (1 - target) / est.reps)


def test_null_level_two_sample():
    assert within(sim.two_sample_power(W, Gaussian(), 0.0, 30, 0.05, 4000, seed=1), 0.05)


def test_null_level_ar1():
    assert within(sim.ar1_serial_power("vdw", Gaussian(), 0.0, 60, 0.05, 2000, seed=2), 0.05)


def test_determinism_and_thread_independence(monkeypatch):
    a = sim.two_sample_power(V, StudentT(4.0), 0.3, 25, reps=2500, seed=9)
    monkeypatch.setenv("RANKARE_THREADS", "1")
    b = sim.two_sample_power(V, StudentT(4.0), 0.3, 25, reps=2500, seed=9)
    assert a == b
    assert sim.ar1_serial_power("kendall", Gaussian(), 0.2, 40, reps=1200, seed=4) == \
        sim.ar1_serial_power("kendall", Gaussian(), 0.2, 40, reps=1200, seed=4)


def test_monotone_in_shift():
    lo = sim.two_sample_power(W, Gaussian(), 0.25, 100, reps=3000, seed=5)
    hi = sim.two_sample_power(W, Gaussian(), 0.5, 100, reps=3000, seed=5)
    assert hi.power >= lo.power - 3 * math.hypot(lo.mc_se, hi.mc_se)


def test_same_test_has_unit_efficiency():
    assert sim.empirical_are(W, W, Gaussian(), 0.5, reps=1000) == 1.0


def test_domain_errors():
    with pytest.raises(DomainError):
        sim.two_sample_power(W, Gaussian(), 0.1, 1)
    with pytest.raises(DomainError):
        sim.ar1_serial_power("vdw", Gaussian(), 1.0, 50)
    with pytest.raises(DomainError):
        sim.empirical_are(W, V, Gaussian(), 0.4, target_power=0.01)


def test_budget(monkeypatch):
    monkeypatch.setattr(sim, "MAX_N", 16)
    with pytest.raises(BudgetExceeded):
        sim.empirical_are(W, V, Gaussian(), 0.001, reps=200)


def test_run_config(tmp_path):
    cfg = {"reps": 500, "seed": 3, "runs": [
        {"kind": "two_sample", "family": "gaussian", "score": "vdw", "delta": 0.5, "n": [10, 20]},
        {"kind": "ar1", "family": "laplace", "stat": "sww", "rho": 0.3, "n": 30, "level": 0.1},
    ]}
    p = tmp_path / "c.json"
    p.write_text(json.dumps(cfg))
    out = sim.run_config(sim.load_config(p))
    assert [e.n for e in out] == [10, 20, 30]
    assert out[2].level == 0.1 and out[2].test == "ar1:sww:powerexp:1"
    with pytest.raises(DomainError):
        sim.run_config({"runs": [{"kind": "x", "family": "gaussian", "n": 5}]})


@pytest.mark.slow
@pytest.mark.parametrize("f", [Gaussian(), PowerExp(1.0), StudentT(4.0)], ids=lambda f: f.name)
def test_levels(f):
    for J in (W, V):
        assert within(sim.two_sample_power(J, f, 0.0, 40, 0.05, 4000, seed=21), 0.05)
    for stat in ("vdw", "sww", "kendall"):
        assert within(sim.ar1_serial_power(stat, f, 0.0, 100, 0.05, 4000, seed=22), 0.05)


@pytest.mark.slow
@pytest.mark.parametrize("f,delta", [(Gaussian(), 0.4), (PowerExp(1.0), 0.4)], ids=["gaussian", "laplace"])
def test_empirical_are(f, delta):
    target = are_nonserial(W, V, f).are
    assert sim.empirical_are(W, V, f, delta, seed=8) == pytest.approx(target, rel=0.15)


@pytest.mark.slow
@pytest.mark.parametrize("f,n,delta", [(Cauchy(), 40, 0.6), (StudentT(1.5), 40, 0.5)], ids=["cauchy", "t1.5"])
def test_direction_of_efficiency(f, n, delta):
    assert are_nonserial(W, V, f).are > 1.1
    pw = sim.two_sample_power(W, f, delta, n, reps=6000, seed=12)
    pv = sim.two_sample_power(V, f, delta, n, reps=6000, seed=12)
    assert pw.power - pv.power > 2 * math.hypot(pw.mc_se, pv.mc_se)


@pytest.mark.slow
def test_ar1_serial_ordering():
    runs = {s: sim.ar1_serial_power(s, Gaussian(), 0.15, 200, 0.05, 4000, seed=31) for s in ("vdw", "sww", "kendall")}
    assert runs["vdw"].power >= runs["sww"].power - 2 * runs["sww"].mc_se
    assert abs(runs["sww"].power - runs["kendall"].power) <= 3 * math.hypot(runs["sww"].mc_se, runs["kendall"].mc_se)
