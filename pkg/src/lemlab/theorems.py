"""Numerical verifiers for the area/capacity inequalities and identities.

Every verifier returns a Report carrying both sides of the statement, their
error budgets, and a verdict.  Orientation is uniform: margin = rhs - lhs,
and margin >= 0 means the statement is satisfied.  A VIOLATED verdict on any
of these (proved) statements signals an implementation bug, never a
counterexample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import formats
from .capacity import (
    CapacityEstimate,
    Condenser,
    condenser_capacity,
    log_capacity,
    pullback_condenser,
)
from .errors import BudgetTooSmall
from .polynomial import Polynomial, batch_preimages, roots
from .region import (
    AreaEstimate,
    Disc,
    Region,
    SamplingBudget,
    Sublevel,
    UnionRegion,
    area,
    bounding_disc,
    membership_mask,
    preimage_region,
    scale_region,
    stratified_box_samples,
    sublevel_region,
)

STATEMENT_IDS = (
    "polya",
    "main",
    "multiplicity",
    "roundness",
    "carleman",
    "isoperimetric",
    "pullback_lemma",
    "capacity_pullback",
    "integrated_carleman",
    "threshold_bound",
)

# statements that assert an identity rather than an inequality
_IDENTITIES = frozenset({"pullback_lemma", "capacity_pullback"})

_EQ_TOL = 1e-6  # structural equality-case detection tolerance


@dataclass(frozen=True)
class Report:
    statement_id: str
    lhs: float
    rhs: float
    lhs_err: float
    rhs_err: float
    margin: float
    verdict: str
    seed: int
    inputs_digest: str

    def record(self) -> str:
        return formats.report_record(self)


def _verdict(statement_id: str, margin: float, budget: float, equality_flag: bool) -> str:
    if statement_id in _IDENTITIES:
        # identities carry no HOLDS: inside budget is EQUALITY, far outside is
        # VIOLATED, the band between (up to 3 budgets) is INCONCLUSIVE
        if abs(margin) <= budget:
            return "EQUALITY"
        if abs(margin) > 3 * budget:
            return "VIOLATED"
        return "INCONCLUSIVE"
    if margin < -budget:
        return "VIOLATED"
    if equality_flag and abs(margin) <= budget:
        return "EQUALITY"
    if margin > budget:
        return "HOLDS"
    return "INCONCLUSIVE"


def _report(statement_id, lhs, rhs, lhs_err, rhs_err, seed, digest, equality_flag=False) -> Report:
    margin = rhs - lhs
    verdict = _verdict(statement_id, margin, lhs_err + rhs_err, equality_flag)
    return Report(statement_id, float(lhs), float(rhs), float(lhs_err), float(rhs_err),
                  float(margin), verdict, int(seed), digest)


# ---------------------------------------------------------------------------
# Structural equality-case detectors


def unique_critical_point(p: Polynomial) -> complex | None:
    """The single critical point of p when p is (equivalent to) a(z-b)^n + c.

    Degree-1 polynomials have no critical point but belong to the equality
    family for every statement that uses this detector; they return b = root
    of p' ... which does not exist, so callers must special-case degree 1.
    """
    dp = p.derivative()
    if dp.degree < 1:
        return None
    rs = roots(dp)
    if len(rs.points) == 1:
        return rs.points[0][0]
    return None


def monomial_center(g: Polynomial) -> complex | None:
    """b when g = a (z-b)^d exactly (all roots clustered at one point)."""
    rs = roots(g)
    if len(rs.points) == 1:
        return rs.points[0][0]
    return None


def essential_disc(K: Region, slack: float = 0.01) -> Disc | None:
    """A disc that K equals up to small appendages, if there is one.

    Unions qualify when exactly one part is a disc and the remaining parts
    carry at most `slack` of its area (the paper's sharpness family is a disc
    with a radial slit of measure ~0).
    """
    if isinstance(K, Disc):
        return K
    if isinstance(K, Sublevel) and K.poly.degree == 1:
        b, a = K.poly.coeffs
        return Disc(-b / a, K.x / abs(a))
    if isinstance(K, UnionRegion):
        discs = [(i, essential_disc(p, slack=0.0)) for i, p in enumerate(K.parts)]
        discs = [(i, d) for i, d in discs if d is not None]
        if len(discs) != 1:
            return None
        i0, d0 = discs[0]
        extra = 0.0
        for j, part in enumerate(K.parts):
            if j == i0:
                continue
            est = area(part, SamplingBudget(samples=20_000, seed=7, method="auto"))
            extra += est.value + est.err
        if extra <= slack * math.pi * d0.radius ** 2:
            return d0
        return None
    return None


def _equality_polya_like(p: Polynomial, K: Region, center_is_value: bool) -> bool:
    """Equality family of the preimage-area statements: K is essentially a
    disc and p has a unique critical point whose value (or the point itself,
    for the domain-side statement) sits at the disc center.

    A monic degree-1 polynomial is a plane translation, so the bound is an
    identity for every K: always the equality family.
    """
    if p.degree == 1:
        return True
    d = essential_disc(K)
    if d is None:
        return False
    b = unique_critical_point(p)
    if b is None:
        return False
    anchor = p(b) if center_is_value else b
    return abs(anchor - d.center) <= _EQ_TOL * (1 + abs(d.center))


# ---------------------------------------------------------------------------
# Roundness


@dataclass(frozen=True)
class RoundnessValue:
    rho: float
    rho_err: float
    area_est: AreaEstimate
    cap_est: CapacityEstimate


def roundness(K: Region, budget: SamplingBudget = SamplingBudget(),
              n_points: int = 256) -> RoundnessValue:
    """rho(K) = Area(K) / (pi cap(K)^2), with linearly propagated error."""
    a = area(K, budget)
    c = log_capacity(K, n_points)
    rho = a.value / (math.pi * c.value**2)
    rho_err = rho * (a.err / max(a.value, 1e-300) + 2 * c.err / c.value)
    return RoundnessValue(rho, rho_err, a, c)


# ---------------------------------------------------------------------------
# Integrals


def _mc_integral(fn, K: Region, budget: SamplingBudget, box: Disc | None = None):
    """Monte Carlo of integral_K fn dA over the bounding box, 3-sigma error."""
    bd = box if box is not None else bounding_disc(K)
    box_area = (2 * bd.radius) ** 2
    n_shards = max(1, -(-budget.samples // 1024))
    total = 0.0
    total_sq = 0.0
    n = 0
    for pts in stratified_box_samples(bd.center, bd.radius, n_shards, budget.seed):
        vals = fn(pts) * membership_mask(K, pts)
        total += float(vals.sum())
        total_sq += float((vals * vals).sum())
        n += len(pts)
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0)
    err = 3.0 * math.sqrt(var / n + 1.0 / (n * n)) * box_area
    return mean * box_area, err, n


def mass_integral(p: Polynomial, K: Region, budget: SamplingBudget = SamplingBudget()) -> AreaEstimate:
    """integral_K |p'(z)|^2 dA: the area of p(K) counted with multiplicity."""
    if p.degree < 1:
        raise ValueError("mass_integral needs degree >= 1")
    dp = p.derivative()
    val, err, n = _mc_integral(lambda z: np.abs(dp(z)) ** 2, K, budget)
    return AreaEstimate(max(val, 0.0), err, "montecarlo", n)


def multiplicity_area(p: Polynomial, K: Region, budget: SamplingBudget = SamplingBudget()) -> AreaEstimate:
    """Image-side integral of n(z, p, K): sample the image plane, count
    preimages falling in K with valency.  Independent oracle for
    mass_integral."""
    if p.degree < 1:
        raise ValueError("multiplicity_area needs degree >= 1")
    bd = bounding_disc(K)
    R = abs(bd.center) + bd.radius
    img_r = float(sum(abs(c) * R**k for k, c in enumerate(p.coeffs)))
    box = Disc(0j, img_r)
    box_area = (2 * img_r) ** 2
    n_shards = max(1, -(-budget.samples // 1024))
    total = 0.0
    total_sq = 0.0
    n = 0
    for pts in stratified_box_samples(box.center, box.radius, n_shards, budget.seed):
        pre = batch_preimages(p, pts)
        counts = membership_mask(K, pre).sum(axis=1).astype(float)
        total += float(counts.sum())
        total_sq += float((counts * counts).sum())
        n += len(pts)
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0)
    err = 3.0 * math.sqrt(var / n + 1.0 / (n * n)) * box_area
    return AreaEstimate(mean * box_area, err, "montecarlo", n)


# ---------------------------------------------------------------------------
# Inequality verifiers


def verify_polya(p: Polynomial, D: Disc, budget: SamplingBudget = SamplingBudget()) -> Report:
    """Area(p^-1(D)) <= pi (Area(D)/pi)^(1/n) for monic p and a disc D."""
    n = p.degree
    pre = preimage_region(p, D)
    lhs = area(pre, budget)
    rhs = math.pi * (D.radius**2) ** (1.0 / n)
    flag = _equality_polya_like(p, D, center_is_value=True)
    digest = formats.digest("polya", p, D, budget.samples, budget.seed)
    return _report("polya", lhs.value, rhs, lhs.err, 0.0, budget.seed, digest, flag)


def verify_main(p: Polynomial, K: Region, budget: SamplingBudget = SamplingBudget()) -> Report:
    """Area(p^-1(K)) <= pi (Area(K)/pi)^(1/n) for monic p, any region K."""
    n = p.degree
    pre = preimage_region(p, K)
    lhs = area(pre, budget)
    ak = area(K, budget)
    rhs = math.pi * (ak.value / math.pi) ** (1.0 / n)
    rhs_err = 0.0
    if ak.err:
        lo = math.pi * (max(ak.value - ak.err, 0.0) / math.pi) ** (1.0 / n)
        hi = math.pi * ((ak.value + ak.err) / math.pi) ** (1.0 / n)
        rhs_err = max(hi - rhs, rhs - lo)
    flag = _equality_polya_like(p, K, center_is_value=True)
    digest = formats.digest("main", p, K, budget.samples, budget.seed)
    return _report("main", lhs.value, rhs, lhs.err, rhs_err, budget.seed, digest, flag)


def verify_multiplicity(p: Polynomial, K: Region, budget: SamplingBudget = SamplingBudget(),
                        cross_check: bool = True) -> Report:
    """integral_K |p'|^2 >= n pi (Area(K)/pi)^n, cross-checked against the
    image-side multiplicity count."""
    n = p.degree
    ak = area(K, budget)
    base = ak.value / math.pi
    lhs = n * math.pi * base**n
    lhs_err = 0.0
    if ak.err:
        hi = n * math.pi * ((ak.value + ak.err) / math.pi) ** n
        lo = n * math.pi * (max(ak.value - ak.err, 0.0) / math.pi) ** n
        lhs_err = max(hi - lhs, lhs - lo)
    rhs = mass_integral(p, K, budget)
    flag = _equality_polya_like(p, K, center_is_value=False)
    digest = formats.digest("multiplicity", p, K, budget.samples, budget.seed)
    rep = _report("multiplicity", lhs, rhs.value, lhs_err, rhs.err, budget.seed, digest, flag)
    if cross_check and rep.verdict != "VIOLATED":
        small = SamplingBudget(samples=min(budget.samples, 20_000), seed=budget.seed + 1)
        other = multiplicity_area(p, K, small)
        if abs(other.value - rhs.value) > other.err + rhs.err:
            rep = Report(rep.statement_id, rep.lhs, rep.rhs, rep.lhs_err, rep.rhs_err,
                         rep.margin, "INCONCLUSIVE", rep.seed, rep.inputs_digest)
    return rep


def verify_roundness(p: Polynomial, K: Region, budget: SamplingBudget = SamplingBudget(),
                     n_points: int = 128) -> Report:
    """rho(p^-1(K)) <= rho(K)^(1/n); p need not be monic.

    Non-monic p is reduced to the monic rescale p_hat = p/a with
    K_hat = K/a; the preimage is unchanged and rho is affine invariant.
    """
    if p.degree < 1:
        raise ValueError("verify_roundness needs degree >= 1")
    n = p.degree
    if p.is_monic():
        p_hat, K_hat = p, K
    else:
        p_hat, a = p.monic_normalized()
        K_hat = scale_region(K, 1.0 / a)
    pre = preimage_region(p_hat, K_hat)
    lv = roundness(pre, budget, n_points)
    rv = roundness(K_hat, budget, n_points)
    rhs = rv.rho ** (1.0 / n)
    rhs_err = 0.0
    if rv.rho > 0:
        hi = (rv.rho + rv.rho_err) ** (1.0 / n)
        lo = max(rv.rho - rv.rho_err, 0.0) ** (1.0 / n)
        rhs_err = max(hi - rhs, rhs - lo)
    flag = _equality_polya_like(p_hat, K_hat, center_is_value=True)
    digest = formats.digest("roundness", p, K, budget.samples, budget.seed, n_points)
    return _report("roundness", lv.rho, rhs, lv.rho_err, rhs_err, budget.seed, digest, flag)


def verify_carleman(C: Condenser, h: float, budget: SamplingBudget = SamplingBudget()) -> Report:
    """1/cap(E,B) <= log(Area(E)/Area(B)), equality iff concentric discs."""
    cap = condenser_capacity(C, h)
    ae = area(C.E, budget)
    ab = area(C.B, budget)
    lhs = 1.0 / cap.value
    lhs_err = cap.err / cap.value**2
    rhs = math.log(ae.value / ab.value)
    rhs_err = ae.err / max(ae.value - ae.err, 1e-300) + ab.err / max(ab.value - ab.err, 1e-300)
    de = essential_disc(C.E, slack=0.0)
    db = essential_disc(C.B, slack=0.0)
    flag = (
        de is not None
        and db is not None
        and abs(de.center - db.center) <= _EQ_TOL * (1 + abs(de.center))
    )
    digest = formats.digest("carleman", C.E, C.B, h)
    return _report("carleman", lhs, rhs, lhs_err, rhs_err, budget.seed, digest, flag)


def verify_isoperimetric(K: Region, budget: SamplingBudget = SamplingBudget(),
                         n_points: int = 256) -> Report:
    """Area(K) <= pi cap(K)^2, equality iff K is a disc."""
    ak = area(K, budget)
    ck = log_capacity(K, n_points)
    rhs = math.pi * ck.value**2
    rhs_err = math.pi * ((ck.value + ck.err) ** 2 - ck.value**2)
    flag = essential_disc(K, slack=0.0) is not None
    digest = formats.digest("isoperimetric", K, budget.samples, budget.seed, n_points)
    return _report("isoperimetric", ak.value, rhs, ak.err, rhs_err, budget.seed, digest, flag)


# ---------------------------------------------------------------------------
# Identity verifiers


def verify_pullback_lemma(p: Polynomial, C: Condenser, h: float) -> Report:
    """cap(p^-1(E), p^-1(B)) = n cap(E, B) for monic p of degree n."""
    n = p.degree
    pulled = pullback_condenser(p, C)
    lhs = condenser_capacity(pulled, h)
    base = condenser_capacity(C, h)
    rhs = n * base.value
    digest = formats.digest("pullback_lemma", p, C.E, C.B, h)
    return _report("pullback_lemma", lhs.value, rhs, lhs.err, n * base.err, 0, digest, True)


def verify_capacity_pullback(p: Polynomial, B: Region, n_points: int = 256) -> Report:
    """cap(p^-1(B)) = cap(B)^(1/n) for monic p of degree n."""
    n = p.degree
    pre = preimage_region(p, B)
    lhs = log_capacity(pre, n_points)
    cb = log_capacity(B, n_points)
    rhs = cb.value ** (1.0 / n)
    rhs_err = 0.0
    if cb.err:
        hi = (cb.value + cb.err) ** (1.0 / n)
        lo = max(cb.value - cb.err, 0.0) ** (1.0 / n)
        rhs_err = max(hi - rhs, rhs - lo)
    digest = formats.digest("capacity_pullback", p, B, n_points)
    return _report("capacity_pullback", lhs.value, rhs, lhs.err, rhs_err, 0, digest, True)


# ---------------------------------------------------------------------------
# The section-4 lemma and sublevel minimizer


def verify_integrated_carleman(g: Polynomial, x: float,
                               budget: SamplingBudget = SamplingBudget()) -> Report:
    """integral |g| 1_{|g|<=x} dA >= (2x/(d+2)) Area({|g|<=x})."""
    if g.degree < 1:
        raise ValueError("verify_integrated_carleman needs degree >= 1")
    d = g.degree
    K = sublevel_region(g, x)
    ak = area(K, budget)
    lhs = (2 * x / (d + 2)) * ak.value
    lhs_err = (2 * x / (d + 2)) * ak.err
    rhs, rhs_err, _ = _mc_integral(
        lambda z: np.abs(g(z)),
        K,
        SamplingBudget(samples=budget.samples, seed=budget.seed + 1),
    )
    flag = monomial_center(g) is not None
    digest = formats.digest("integrated_carleman", g, float(x), budget.samples, budget.seed)
    return _report("integrated_carleman", lhs, rhs, lhs_err, rhs_err, budget.seed, digest, flag)


def sublevel_threshold(p: Polynomial, A: float, budget: SamplingBudget = SamplingBudget(),
                       area_tol: float | None = None) -> float:
    """The threshold t with Area({|p'|^2 <= t}) = A, by bisection.

    Uses one fixed stratified sample of the bounding box of the upper
    bracket, so the counted area is monotone in t and bisection is exact up
    to the sample resolution.
    """
    t, _, _ = _sublevel_threshold_impl(p, A, budget, area_tol)
    return t


def _sublevel_threshold_impl(p, A, budget, area_tol):
    if p.degree < 2:
        raise ValueError("sublevel threshold needs degree >= 2 (nonconstant p')")
    if A <= 0:
        raise ValueError("target area must be > 0")
    n = p.degree
    dp = p.derivative()
    bound = n**2 * (A / math.pi) ** (n - 1)
    if area_tol is None:
        area_tol = 0.005 * A

    # grow the bracket until the sampled area reaches A
    t_hi = bound
    for _ in range(200):
        K = sublevel_region(dp, math.sqrt(t_hi))
        est = area(K, budget)
        if est.value >= A:
            break
        t_hi *= 2.0
    else:
        raise BudgetTooSmall("could not bracket the requested area")

    bd = bounding_disc(sublevel_region(dp, math.sqrt(t_hi)))
    box_area = (2 * bd.radius) ** 2
    n_shards = max(1, -(-budget.samples // 1024))
    vals = []
    for pts in stratified_box_samples(bd.center, bd.radius, n_shards, budget.seed):
        vals.append(np.abs(dp(pts)) ** 2)
    sq = np.concatenate(vals)
    N = len(sq)
    cell = box_area / N
    if cell > area_tol:
        raise BudgetTooSmall(
            f"sample resolution {cell:g} exceeds area tolerance {area_tol:g}"
        )

    def counted_area(t):
        return float((sq <= t).sum()) * cell

    t_lo = 0.0
    for _ in range(200):
        mid = 0.5 * (t_lo + t_hi)
        a_mid = counted_area(mid)
        if abs(a_mid - A) <= area_tol:
            t_lo = t_hi = mid
            break
        if a_mid < A:
            t_lo = mid
        else:
            t_hi = mid
        if t_hi - t_lo <= 1e-12 * max(t_hi, 1.0):
            break
    t = 0.5 * (t_lo + t_hi)

    # error on t: order-statistic spread covering the MC area uncertainty
    k = int(np.clip(round(A / cell), 1, N - 1))
    srt = np.sort(sq)
    phat = k / N
    dk = int(math.ceil(3 * math.sqrt(N * phat * (1 - phat)) + area_tol / cell))
    t_err = 0.5 * (srt[min(k + dk, N - 1)] - srt[max(k - dk, 0)]) + 1e-12 * t
    return t, bound, t_err


def verify_threshold_bound(p: Polynomial, A: float,
                           budget: SamplingBudget = SamplingBudget()) -> Report:
    """t >= n^2 (A/pi)^(n-1) where t levels {|p'|^2 <= t} at area A."""
    t, bound, t_err = _sublevel_threshold_impl(p, A, budget, None)
    flag = unique_critical_point(p) is not None
    digest = formats.digest("threshold_bound", p, float(A), budget.samples, budget.seed)
    return _report("threshold_bound", bound, t, 0.0, t_err, budget.seed, digest, flag)
