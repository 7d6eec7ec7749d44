"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with `pytest -s tests/test_acceptance.py` to see the per-criterion
verdict lines.
"""

import math
import time

import numpy as np
import pytest

from lemlab.capacity import (
    Condenser,
    GridFunction,
    condenser_capacity,
    dirichlet_energy,
    log_capacity,
    schwarz_symmetrize,
)
from lemlab.polynomial import Polynomial
from lemlab.region import Disc, SamplingBudget, sublevel_region
from lemlab.sweep import SweepConfig, run_sweep
from lemlab import theorems as th

Z2 = Polynomial((0, 0, 1))
Z3 = Polynomial((0, 0, 0, 1))
BERN = Polynomial((-1, 0, 1))

MC1M = SamplingBudget(samples=1_000_000, seed=42)


def _report(num, title, started, limit):
    elapsed = time.time() - started
    print(f"ACCEPTANCE {num} PASS {title} ({elapsed:.1f}s)")
    assert elapsed < limit, f"criterion {num} exceeded its {limit}s budget"


def test_criterion_01_polya_equality():
    t0 = time.time()
    rep = th.verify_polya(Z2, Disc(0j, 1.0), MC1M)
    assert rep.verdict == "EQUALITY"
    assert rep.lhs == pytest.approx(math.pi, rel=0.01)
    _report(1, "Polya equality: z^2 over the unit disc, area pi within 1%", t0, 5)


def test_criterion_02_bernoulli_strictness():
    t0 = time.time()
    rep = th.verify_polya(BERN, Disc(0j, 1.0), MC1M)
    assert rep.verdict == "HOLDS"
    assert rep.lhs == pytest.approx(2.0, rel=0.02)  # polar closed-form oracle
    assert rep.rhs == pytest.approx(math.pi)
    _report(2, "Bernoulli region strictness: area 2.0 +- 2% vs bound pi", t0, 5)


def test_criterion_03_multiplicity_equalities():
    t0 = time.time()
    rep2 = th.verify_multiplicity(Z2, Disc(0j, 1.0), MC1M)
    assert rep2.verdict == "EQUALITY"
    assert rep2.lhs == pytest.approx(2 * math.pi, rel=0.01)
    assert rep2.rhs == pytest.approx(2 * math.pi, rel=0.01)
    rep3 = th.verify_multiplicity(Z3, Disc(0j, 1.0), MC1M)
    assert rep3.verdict == "EQUALITY"
    assert rep3.lhs == pytest.approx(3 * math.pi, rel=0.01)
    assert rep3.rhs == pytest.approx(3 * math.pi, rel=0.01)
    _report(3, "multiplicity equality: 2pi for z^2 and 3pi for z^3 within 1%", t0, 10)


def test_criterion_04_integrated_carleman():
    t0 = time.time()
    rep = th.verify_integrated_carleman(Polynomial((0, 1)), 1.0, MC1M)
    assert rep.verdict == "EQUALITY"
    assert rep.lhs == pytest.approx(2 * math.pi / 3, rel=0.01)
    assert rep.rhs == pytest.approx(2 * math.pi / 3, rel=0.01)
    rep2 = th.verify_integrated_carleman(BERN, 1.0, MC1M)
    assert rep2.verdict == "HOLDS"
    _report(4, "integrated Carleman: 2pi/3 equality for z, strict for z^2-1", t0, 10)


def test_criterion_05_condenser_capacity():
    t0 = time.time()
    C = Condenser(Disc(0j, math.e), Disc(0j, 1.0))
    est = condenser_capacity(C, 0.02)  # pairs the 0.02 and 0.04 grids
    assert est.value == pytest.approx(0.5, rel=0.02)
    rep = th.verify_carleman(C, 0.02)
    assert rep.verdict == "EQUALITY"
    assert rep.rhs == pytest.approx(2.0)
    _report(5, "condenser capacity 0.5 within 2%; Carleman equality 1/cap = 2", t0, 60)


def test_criterion_06_pullback_lemma():
    t0 = time.time()
    C = Condenser(Disc(0j, 4.0), Disc(0j, 1.0))
    rep = th.verify_pullback_lemma(Z2, C, 0.02)
    assert rep.verdict == "EQUALITY"
    assert abs(rep.margin) <= 0.04 * rep.rhs  # combined 4% grid budget
    assert rep.lhs == pytest.approx(1 / (2 * math.log(2)), rel=0.04)
    _report(6, "pullback lemma: cap doubles under z^2 within 4% grid budget", t0, 120)


def test_criterion_07_log_capacity():
    t0 = time.time()
    exact = log_capacity(Disc(1 + 1j, 2.5))
    assert exact.value == 2.5 and exact.err == 0.0 and exact.method == "closed_form"
    forced = log_capacity(Disc(0j, 1.0), 256, method="fekete")
    assert forced.value == pytest.approx(1.0, rel=0.01)
    bern_direct = log_capacity(sublevel_region(BERN, 1.0), 256)
    assert bern_direct.value == pytest.approx(1.0, rel=0.02)
    rep = th.verify_capacity_pullback(BERN, Disc(0j, 1.0), n_points=256)
    assert rep.verdict == "EQUALITY"
    assert rep.lhs == pytest.approx(1.0, rel=0.02)
    _report(7, "log capacity: disc exact, Fekete disc 1%, Bernoulli cap 1 within 2%", t0, 120)


def test_criterion_08_threshold_bound():
    t0 = time.time()
    budget = SamplingBudget(samples=500_000, seed=42)
    t2 = th.sublevel_threshold(Z2, math.pi, budget)
    assert t2 == pytest.approx(4.0, rel=0.01)
    t3 = th.sublevel_threshold(Z3, math.pi, budget)
    assert t3 == pytest.approx(9.0, rel=0.01)
    rep = th.verify_threshold_bound(Polynomial((0, -3, 0, 1)), 1.0, budget)
    assert rep.verdict == "HOLDS"
    assert rep.margin > rep.rhs_err  # strictly above the bound beyond budget
    _report(8, "sublevel thresholds: t = 4 and 9 exactly (1%), z^3-3z strict", t0, 30)


def test_criterion_09_symmetrization():
    t0 = time.time()
    h = 0.02
    n = int(round(2.0 / h))
    rng = np.random.default_rng(42)
    passed = 0
    for _ in range(50):
        z0 = complex(rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4))
        s = float(rng.uniform(3.0, 6.0))
        f = GridFunction.from_function(
            complex(-1, -1), h, (n, n),
            lambda z: np.maximum(0.0, 1.0 - s * np.abs(z - z0)),
        )
        if dirichlet_energy(schwarz_symmetrize(f)) <= dirichlet_energy(f) * 1.02:
            passed += 1
    assert passed == 50
    _report(9, "symmetrization never raises bump energy beyond 2%: 50/50", t0, 30)


def test_criterion_10_randomized_sweep():
    t0 = time.time()
    cfg = SweepConfig(
        seed=42,
        cases=200,
        degree_max=5,
        statements=th.STATEMENT_IDS,
        mc_samples=100_000,
        grid_h=0.04,
    )
    first = run_sweep(cfg)
    assert first.violated == 0
    second = run_sweep(cfg)
    assert second.text() == first.text()  # byte-for-byte reproducible
    counts = [line for line in first.lines if line.startswith("summary")]
    print(f"  sweep {counts[0]}")
    _report(10, "200-case sweep over all ten statements: violated=0, reproducible", t0, 900)
