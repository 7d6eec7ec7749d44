"""Randomized verification sweeps.

A sweep runs the theorem verifiers over deterministically generated random
cases: the case for index i is drawn from a counter-based generator keyed by
(master seed, i), so outputs are byte-identical across reruns and independent
of scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import theorems as th
from .capacity import Condenser
from .polynomial import Polynomial
from .region import Disc, Polygon, Region, SamplingBudget, Sublevel, UnionRegion

HIST_EDGES = (-float("inf"), -1.0, -0.1, -0.01, 0.0, 0.01, 0.1, 1.0, 10.0, float("inf"))


@dataclass(frozen=True)
class SweepConfig:
    seed: int
    cases: int
    degree_max: int = 5
    statements: tuple[str, ...] = th.STATEMENT_IDS
    mc_samples: int = 100_000
    grid_h: float = 0.04
    output_path: str = "sweep.txt"

    def __post_init__(self):
        if self.cases < 1:
            raise ValueError("cases must be >= 1")
        if not 1 <= self.degree_max <= 10:
            raise ValueError("degree_max must be in [1, 10]")
        if self.mc_samples < 10_000:
            raise ValueError("mc_samples must be >= 10^4")
        object.__setattr__(self, "statements", tuple(self.statements))
        bad = [s for s in self.statements if s not in th.STATEMENT_IDS]
        if bad:
            raise ValueError(f"unknown statement ids: {bad}")


@dataclass(frozen=True)
class SweepResult:
    reports: tuple
    lines: tuple[str, ...]

    @property
    def violated(self) -> int:
        return sum(r.verdict == "VIOLATED" for r in self.reports)

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


def _case_rng(seed: int, index: int) -> np.random.Generator:
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(index)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _rand_monic(rng, deg_min: int, deg_max: int, box: float = 1.1) -> Polynomial:
    deg = int(rng.integers(deg_min, deg_max + 1))
    rts = (rng.uniform(-box, box, deg) + 1j * rng.uniform(-box, box, deg))
    return Polynomial.from_roots(rts)


def _rand_disc(rng, rmin=0.5, rmax=1.3, spread=0.6) -> Disc:
    c = complex(rng.uniform(-spread, spread), rng.uniform(-spread, spread))
    return Disc(c, float(rng.uniform(rmin, rmax)))


def _rand_polygon(rng) -> Polygon:
    # jittered equal angular spacing: star-shaped about its center, so simple
    m = int(rng.integers(4, 9))
    angles = 2 * np.pi * (np.arange(m) + 0.9 * rng.random(m)) / m
    radii = rng.uniform(0.6, 1.3, m)
    c = complex(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3))
    return Polygon(tuple(c + radii * np.exp(1j * angles)))


def _rand_sublevel(rng) -> Sublevel:
    g = _rand_monic(rng, 1, 3, box=0.9)
    probes = rng.uniform(-1.2, 1.2, 64) + 1j * rng.uniform(-1.2, 1.2, 64)
    x = float(np.median(np.abs(g(probes)))) * float(rng.uniform(0.6, 1.2))
    return Sublevel(g, max(x, 0.05))


def _rand_region(rng) -> Region:
    pick = int(rng.integers(0, 4))
    if pick == 0:
        return _rand_disc(rng)
    if pick == 1:
        return _rand_polygon(rng)
    if pick == 2:
        d1 = _rand_disc(rng, 0.4, 0.9, 0.7)
        d2 = _rand_disc(rng, 0.4, 0.9, 0.7)
        return UnionRegion((d1, d2))
    return _rand_sublevel(rng)


def _rand_capacity_region(rng) -> Region:
    # capacity statements avoid sublevel inputs in the sweep: their boundary
    # sampling cost dominates and discs/polygons/unions already span the space
    pick = int(rng.integers(0, 3))
    if pick == 0:
        return _rand_disc(rng, 0.6, 1.3, 0.4)
    if pick == 1:
        return _rand_polygon(rng)
    d1 = _rand_disc(rng, 0.5, 0.9, 0.5)
    d2 = _rand_disc(rng, 0.5, 0.9, 0.5)
    return UnionRegion((d1, d2))


def run_case(statement: str, cfg: SweepConfig, index: int):
    rng = _case_rng(cfg.seed, index)
    budget = SamplingBudget(
        samples=cfg.mc_samples, seed=(cfg.seed * 1_000_003 + index) & ((1 << 62) - 1)
    )
    if statement == "polya":
        p = _rand_monic(rng, 1, cfg.degree_max)
        return th.verify_polya(p, _rand_disc(rng, 0.6, 1.4, 0.5), budget)
    if statement == "main":
        p = _rand_monic(rng, 1, cfg.degree_max)
        return th.verify_main(p, _rand_region(rng), budget)
    if statement == "multiplicity":
        p = _rand_monic(rng, 1, cfg.degree_max)
        return th.verify_multiplicity(p, _rand_region(rng), budget)
    if statement == "roundness":
        p = _rand_monic(rng, 1, cfg.degree_max, box=0.9)
        if rng.random() < 0.5:
            a = float(rng.uniform(0.5, 2.0)) * np.exp(1j * rng.uniform(0, 2 * np.pi))
            p = Polynomial(tuple(complex(a) * np.asarray(p.coeffs)))
        return th.verify_roundness(p, _rand_capacity_region(rng), budget, n_points=128)
    if statement == "carleman":
        R = float(rng.uniform(1.6, 2.6))
        r = float(rng.uniform(0.35, 0.55)) * R
        c = complex(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3))
        if rng.random() < 0.4:
            off = 0j  # concentric: equality family
        else:
            gap = R - r
            rho = float(rng.uniform(0.35, 0.6)) * gap
            off = rho * np.exp(1j * rng.uniform(0, 2 * np.pi))
        C = Condenser(Disc(c, R), Disc(c + off, r))
        return th.verify_carleman(C, cfg.grid_h, budget)
    if statement == "isoperimetric":
        return th.verify_isoperimetric(_rand_capacity_region(rng), budget, n_points=192)
    if statement == "pullback_lemma":
        p = _rand_monic(rng, 1, min(3, cfg.degree_max), box=0.8)
        R = float(rng.uniform(2.4, 3.2))
        r = float(rng.uniform(0.25, 0.4)) * R
        C = Condenser(Disc(0j, R), Disc(0j, r))
        return th.verify_pullback_lemma(p, C, cfg.grid_h)
    if statement == "capacity_pullback":
        p = _rand_monic(rng, 1, min(3, cfg.degree_max), box=0.9)
        B = _rand_disc(rng, 0.8, 1.5, 0.3) if rng.random() < 0.6 else _rand_polygon(rng)
        return th.verify_capacity_pullback(p, B, n_points=128)
    if statement == "integrated_carleman":
        g = _rand_monic(rng, 1, cfg.degree_max)
        if rng.random() < 0.5:
            a = float(rng.uniform(0.5, 2.0)) * np.exp(1j * rng.uniform(0, 2 * np.pi))
            g = Polynomial(tuple(complex(a) * np.asarray(g.coeffs)))
        probes = rng.uniform(-1.2, 1.2, 64) + 1j * rng.uniform(-1.2, 1.2, 64)
        x = float(np.median(np.abs(g(probes)))) * float(rng.uniform(0.5, 1.5))
        return th.verify_integrated_carleman(g, max(x, 0.05), budget)
    if statement == "threshold_bound":
        # needs a nonconstant derivative, so degree 2 even when degree_max is 1
        p = _rand_monic(rng, 2, max(2, cfg.degree_max), box=1.0)
        A = float(rng.uniform(0.5, 2.5))
        return th.verify_threshold_bound(p, A, budget)
    raise ValueError(f"unknown statement {statement!r}")


def run_sweep(cfg: SweepConfig, threads: int = 1) -> SweepResult:
    reports = []
    lines = [
        "# lemlab sweep",
        f"seed={cfg.seed}",
        f"threads={threads}",
        f"cases={cfg.cases}",
        f"degree_max={cfg.degree_max}",
        "statements=" + ",".join(cfg.statements),
        f"mc_samples={cfg.mc_samples}",
        f"grid_h={cfg.grid_h!r}",
    ]
    for i in range(cfg.cases):
        statement = cfg.statements[i % len(cfg.statements)]
        rep = run_case(statement, cfg, i)
        reports.append(rep)
        lines.append(f"case={i} " + rep.record())
    counts = {v: 0 for v in ("HOLDS", "EQUALITY", "INCONCLUSIVE", "VIOLATED")}
    for r in reports:
        counts[r.verdict] += 1
    margins = [r.margin for r in reports]
    lines.append(
        "summary holds={HOLDS} equality={EQUALITY} inconclusive={INCONCLUSIVE} "
        "violated={VIOLATED}".format(**counts)
    )
    lines.append(f"min_margin={min(margins)!r}")
    hist, _ = np.histogram(margins, bins=np.array(HIST_EDGES))
    for k in range(len(HIST_EDGES) - 1):
        lines.append(f"hist[{HIST_EDGES[k]:g},{HIST_EDGES[k + 1]:g})={int(hist[k])}")
    return SweepResult(tuple(reports), tuple(lines))
