"""Bounded plane regions: membership, bounding discs, areas with error bounds.

Variants cover discs, annuli, simple polygons, polynomial sublevel sets
(filled lemniscates), polynomial preimages of other regions, finite unions,
and raster masks.  All regions are closed (boundaries count as inside) and
bounded; Monte Carlo area estimates carry a 3-sigma error bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetTooSmall, NotMonic, ResolutionTooCoarse
from .polynomial import Polynomial, escape_radius


@dataclass(frozen=True)
class Disc:
    center: complex
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if self.radius <= 0:
            raise ValueError("disc radius must be > 0")


@dataclass(frozen=True)
class Annulus:
    center: complex
    r_in: float
    r_out: float

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if not 0 <= self.r_in < self.r_out:
            raise ValueError("annulus needs 0 <= r_in < r_out")


@dataclass(frozen=True)
class Polygon:
    """Simple closed polygon given by its vertex loop (not repeated at the end)."""

    vertices: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(complex(v) for v in self.vertices))
        if len(self.vertices) < 3:
            raise ValueError("polygon needs at least 3 vertices")


@dataclass(frozen=True)
class Sublevel:
    """Filled lemniscate {z : |poly(z)| <= x}."""

    poly: Polynomial
    x: float

    def __post_init__(self):
        if self.poly.degree < 1:
            raise ValueError("sublevel region needs degree >= 1")
        if not self.x > 0:
            raise ValueError("sublevel threshold x must be > 0")


@dataclass(frozen=True)
class Preimage:
    """{z : poly(z) in inner} for a monic poly."""

    poly: Polynomial
    inner: "Region"

    def __post_init__(self):
        if not self.poly.is_monic():
            raise NotMonic("preimage regions require a monic polynomial")
        if self.poly.degree < 1:
            raise ValueError("preimage region needs degree >= 1")


@dataclass(frozen=True)
class UnionRegion:
    parts: tuple["Region", ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if not self.parts:
            raise ValueError("union needs at least one part")


@dataclass(frozen=True, eq=False)
class PixelMask:
    """Raster region: bits[iy, ix] covers the square cell with lower-left
    corner origin + (ix + iy*1j) * h."""

    origin: complex
    h: float
    bits: np.ndarray

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError("pixel mask spacing must be > 0")
        b = np.asarray(self.bits, dtype=bool)
        if b.ndim != 2:
            raise ValueError("pixel mask bits must be 2-D")
        b.setflags(write=False)
        object.__setattr__(self, "bits", b)
        object.__setattr__(self, "origin", complex(self.origin))

    def cell_centers(self) -> np.ndarray:
        ny, nx = self.bits.shape
        xs = self.origin.real + (np.arange(nx) + 0.5) * self.h
        ys = self.origin.imag + (np.arange(ny) + 0.5) * self.h
        return xs[None, :] + 1j * ys[:, None]

    def mask_area(self) -> float:
        return float(self.bits.sum()) * self.h * self.h


Region = Disc | Annulus | Polygon | Sublevel | Preimage | UnionRegion | PixelMask


@dataclass(frozen=True)
class SamplingBudget:
    """Controls stochastic and raster area estimates.

    method: "auto" picks the closed form when one exists, else Monte Carlo;
    "mc" and "grid" force those routes; "exact" demands a closed form.
    rel_err, when set, makes the estimate raise BudgetTooSmall if the
    3-sigma bound exceeds rel_err * value.
    """

    samples: int = 200_000
    seed: int = 0
    method: str = "auto"
    grid_h: float | None = None
    rel_err: float | None = None


@dataclass(frozen=True)
class AreaEstimate:
    value: float
    err: float
    method: str  # exact | grid | montecarlo
    samples_or_resolution: int

    def __post_init__(self):
        if (self.err == 0) != (self.method == "exact"):
            raise ValueError("err must be 0 exactly when the method is exact")
        if self.value < -1e-12 or self.err < 0:
            raise ValueError("area estimate significantly negative")


# ---------------------------------------------------------------------------
# Membership


def membership_mask(K: Region, z: np.ndarray) -> np.ndarray:
    """Vectorized closed-region membership test."""
    z = np.asarray(z, dtype=complex)
    if isinstance(K, Disc):
        return np.abs(z - K.center) <= K.radius
    if isinstance(K, Annulus):
        r = np.abs(z - K.center)
        return (K.r_in <= r) & (r <= K.r_out)
    if isinstance(K, Sublevel):
        return np.abs(K.poly(z)) <= K.x
    if isinstance(K, Preimage):
        return membership_mask(K.inner, K.poly(z))
    if isinstance(K, UnionRegion):
        out = np.zeros(z.shape, dtype=bool)
        for part in K.parts:
            out |= membership_mask(part, z)
        return out
    if isinstance(K, Polygon):
        return _polygon_mask(K.vertices, z)
    if isinstance(K, PixelMask):
        ix = np.floor((z.real - K.origin.real) / K.h).astype(int)
        iy = np.floor((z.imag - K.origin.imag) / K.h).astype(int)
        ny, nx = K.bits.shape
        ok = (ix >= 0) & (ix < nx) & (iy >= 0) & (iy < ny)
        out = np.zeros(z.shape, dtype=bool)
        out[ok] = K.bits[iy[ok], ix[ok]]
        return out
    raise TypeError(f"not a region: {type(K).__name__}")


def contains(K: Region, z: complex) -> bool:
    return bool(membership_mask(K, np.asarray(z, dtype=complex)))


def _polygon_mask(verts: tuple[complex, ...], z: np.ndarray) -> np.ndarray:
    x, y = z.real, z.imag
    inside = np.zeros(z.shape, dtype=bool)
    on_edge = np.zeros(z.shape, dtype=bool)
    v = np.asarray(verts, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(v))))
    for i in range(len(v)):
        x1, y1 = v[i - 1].real, v[i - 1].imag
        x2, y2 = v[i].real, v[i].imag
        # even-odd ray crossing
        cond = (y1 > y) != (y2 > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xin = (x2 - x1) * (y - y1) / (y2 - y1) + x1
        inside ^= cond & (x < xin)
        # boundary counts as inside (regions are closed)
        dx, dy = x2 - x1, y2 - y1
        L2 = dx * dx + dy * dy
        t = np.clip(((x - x1) * dx + (y - y1) * dy) / max(L2, 1e-300), 0.0, 1.0)
        d2 = (x - (x1 + t * dx)) ** 2 + (y - (y1 + t * dy)) ** 2
        on_edge |= d2 <= (1e-12 * scale) ** 2
    return inside | on_edge


# ---------------------------------------------------------------------------
# Bounding discs and constructors


def bounding_disc(K: Region) -> Disc:
    """A disc guaranteed to contain K (not necessarily tight)."""
    if isinstance(K, Disc):
        return K
    if isinstance(K, Annulus):
        return Disc(K.center, K.r_out)
    if isinstance(K, Polygon):
        v = np.asarray(K.vertices, dtype=complex)
        c = complex(v.mean())
        return Disc(c, float(np.max(np.abs(v - c))) * (1 + 1e-12) + 1e-300)
    if isinstance(K, Sublevel):
        g, a = K.poly.monic_normalized()
        return Disc(0j, escape_radius(g, K.x / abs(a)))
    if isinstance(K, Preimage):
        inner = bounding_disc(K.inner)
        big = abs(inner.center) + inner.radius
        return Disc(0j, escape_radius(K.poly, big))
    if isinstance(K, UnionRegion):
        discs = [bounding_disc(p) for p in K.parts]
        c = complex(np.mean([d.center for d in discs]))
        r = max(abs(d.center - c) + d.radius for d in discs)
        return Disc(c, r)
    if isinstance(K, PixelMask):
        ny, nx = K.bits.shape
        c = K.origin + complex(nx * K.h, ny * K.h) / 2
        return Disc(c, math.hypot(nx * K.h, ny * K.h) / 2 + 1e-300)
    raise TypeError(f"not a region: {type(K).__name__}")


def sublevel_region(g: Polynomial, x: float) -> Sublevel:
    """Filled lemniscate {z : |g(z)| <= x}."""
    return Sublevel(g, float(x))


def preimage_region(p: Polynomial, K: Region) -> Preimage:
    """{z : p(z) in K} for monic p; membership defers to K through p."""
    return Preimage(p, K)


def pixelize(K: Region, h: float) -> PixelMask:
    """Raster K over the circumscribing square of its bounding disc.

    A bit is set iff the cell center lies in K.
    """
    if h <= 0:
        raise ValueError("pixelize spacing must be > 0")
    bd = bounding_disc(K)
    if 2 * bd.radius / h < 16:
        raise ResolutionTooCoarse(
            f"fewer than 16 cells across the bounding disc (diameter {2 * bd.radius:g}, h={h:g})"
        )
    n = int(math.ceil(2 * bd.radius / h))
    origin = bd.center - complex(n * h, n * h) / 2
    xs = origin.real + (np.arange(n) + 0.5) * h
    ys = origin.imag + (np.arange(n) + 0.5) * h
    centers = xs[None, :] + 1j * ys[:, None]
    bits = membership_mask(K, centers)
    return PixelMask(origin, h, bits)


# ---------------------------------------------------------------------------
# Areas


def _closed_form_area(K: Region) -> float | None:
    if isinstance(K, Disc):
        return math.pi * K.radius**2
    if isinstance(K, Annulus):
        return math.pi * (K.r_out**2 - K.r_in**2)
    if isinstance(K, Polygon):
        v = np.asarray(K.vertices, dtype=complex)
        w = np.roll(v, -1)
        return float(abs(np.sum(v.real * w.imag - w.real * v.imag)) / 2.0)
    if isinstance(K, PixelMask):
        return K.mask_area()
    return None


def stratified_box_samples(center: complex, half_side: float, n_shards: int, seed: int):
    """Yield shards of 1024 stratified points over a square, one 32x32 jittered
    grid per shard, from a counter-based generator keyed by (seed, shard)."""
    for shard in range(n_shards):
        key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(shard)], dtype=np.uint64)
        gen = np.random.Generator(np.random.Philox(key=key))
        jit = gen.random((2, 32, 32))
        i = (np.arange(32)[None, :, None] + jit[0]) / 32.0
        j = (np.arange(32)[None, None, :] + jit[1]) / 32.0
        x = center.real - half_side + 2 * half_side * i
        y = center.imag - half_side + 2 * half_side * j
        yield (x + 1j * y).ravel()


def _mc_area(K: Region, budget: SamplingBudget) -> AreaEstimate:
    bd = bounding_disc(K)
    box_area = (2 * bd.radius) ** 2
    n_shards = max(1, -(-budget.samples // 1024))
    hits = 0
    for pts in stratified_box_samples(bd.center, bd.radius, n_shards, budget.seed):
        hits += int(membership_mask(K, pts).sum())
    n = n_shards * 1024
    phat = hits / n
    # add-one smoothing keeps the bound positive when no sample hits
    psm = (hits + 1.0) / (n + 2.0)
    err = 3.0 * math.sqrt(psm * (1 - psm) / n) * box_area
    return AreaEstimate(phat * box_area, err, "montecarlo", n)


def _grid_area(K: Region, budget: SamplingBudget) -> AreaEstimate:
    bd = bounding_disc(K)
    h = budget.grid_h if budget.grid_h is not None else 2 * bd.radius / 256
    mask = pixelize(K, h)
    bits = mask.bits
    interior = bits.copy()
    interior[1:, :] &= bits[:-1, :]
    interior[:-1, :] &= bits[1:, :]
    interior[:, 1:] &= bits[:, :-1]
    interior[:, :-1] &= bits[:, 1:]
    interior[0, :] = interior[-1, :] = interior[:, 0] = interior[:, -1] = False
    perim = int(bits.sum() - interior.sum())
    return AreaEstimate(mask.mask_area(), max(perim, 1) * h * h, "grid", bits.shape[0])


def area(K: Region, budget: SamplingBudget = SamplingBudget()) -> AreaEstimate:
    """Area of K: closed form where available, else Monte Carlo or grid count."""
    closed = _closed_form_area(K)
    if budget.method == "exact":
        if closed is None:
            raise ValueError(f"no closed-form area for {type(K).__name__}")
        return AreaEstimate(closed, 0.0, "exact", 1)
    if budget.method == "auto" and closed is not None:
        return AreaEstimate(closed, 0.0, "exact", 1)
    if budget.method == "grid":
        est = _grid_area(K, budget)
    else:
        est = _mc_area(K, budget)
    if budget.rel_err is not None and est.err > budget.rel_err * max(est.value, 1e-300):
        raise BudgetTooSmall(
            f"3-sigma error {est.err:g} exceeds requested {budget.rel_err:g} * {est.value:g}"
        )
    return est


# ---------------------------------------------------------------------------
# Boundary sampling (feeds the capacity module and the SVG exporter)


def signed_field(K: Region, z: np.ndarray) -> np.ndarray:
    """Continuous field, negative inside K and positive outside.

    The zero level set is the boundary of K (exactly, for all variants except
    PixelMask, whose field is the raster indicator).
    """
    z = np.asarray(z, dtype=complex)
    if isinstance(K, Disc):
        return np.abs(z - K.center) - K.radius
    if isinstance(K, Annulus):
        r = np.abs(z - K.center)
        return np.maximum(K.r_in - r, r - K.r_out)
    if isinstance(K, Sublevel):
        return np.abs(K.poly(z)) - K.x
    if isinstance(K, Preimage):
        return signed_field(K.inner, K.poly(z))
    if isinstance(K, UnionRegion):
        out = signed_field(K.parts[0], z)
        for part in K.parts[1:]:
            out = np.minimum(out, signed_field(part, z))
        return out
    if isinstance(K, Polygon):
        d = _polygon_distance(K.vertices, z)
        return np.where(_polygon_mask(K.vertices, z), -d, d)
    if isinstance(K, PixelMask):
        return np.where(membership_mask(K, z), -1.0, 1.0)
    raise TypeError(f"not a region: {type(K).__name__}")


def _polygon_distance(verts: tuple[complex, ...], z: np.ndarray) -> np.ndarray:
    x, y = z.real, z.imag
    d2min = np.full(z.shape, np.inf)
    v = np.asarray(verts, dtype=complex)
    for i in range(len(v)):
        x1, y1 = v[i - 1].real, v[i - 1].imag
        x2, y2 = v[i].real, v[i].imag
        dx, dy = x2 - x1, y2 - y1
        L2 = max(dx * dx + dy * dy, 1e-300)
        t = np.clip(((x - x1) * dx + (y - y1) * dy) / L2, 0.0, 1.0)
        d2 = (x - (x1 + t * dx)) ** 2 + (y - (y1 + t * dy)) ** 2
        d2min = np.minimum(d2min, d2)
    return np.sqrt(d2min)


def level_curves(K: Region, resolution: int = 512) -> list[np.ndarray]:
    """Boundary polylines of K via marching squares on the signed field.

    Returns a list of complex arrays; a closed loop repeats its first point.
    """
    from skimage.measure import find_contours

    bd = bounding_disc(K)
    r = bd.radius * 1.02
    xs = np.linspace(bd.center.real - r, bd.center.real + r, resolution)
    ys = np.linspace(bd.center.imag - r, bd.center.imag + r, resolution)
    F = signed_field(K, xs[None, :] + 1j * ys[:, None])
    curves = []
    for c in find_contours(F, 0.0):
        zx = np.interp(c[:, 1], np.arange(resolution), xs)
        zy = np.interp(c[:, 0], np.arange(resolution), ys)
        curves.append(zx + 1j * zy)
    return curves


def boundary_points(K: Region, target: int, resolution: int = 512) -> np.ndarray:
    """About `target` points on the boundary of K.

    Circles and polygon edges are sampled analytically; sublevel sets,
    preimages and masks go through marching squares on the signed field;
    unions sample each part separately (so thin parts are never missed).
    """
    if isinstance(K, Disc):
        th = 2 * np.pi * np.arange(target) / max(target, 1)
        return K.center + K.radius * np.exp(1j * th)
    if isinstance(K, Annulus):
        n_out = max(8, int(target * K.r_out / (K.r_in + K.r_out)))
        n_in = max(0, target - n_out)
        th_o = 2 * np.pi * np.arange(n_out) / n_out
        pts = [K.center + K.r_out * np.exp(1j * th_o)]
        if K.r_in > 0 and n_in >= 8:
            th_i = 2 * np.pi * np.arange(n_in) / n_in
            pts.append(K.center + K.r_in * np.exp(1j * th_i))
        return np.concatenate(pts)
    if isinstance(K, Polygon):
        v = np.asarray(K.vertices, dtype=complex)
        w = np.roll(v, -1)
        lengths = np.abs(w - v)
        total = lengths.sum()
        pts = []
        for a, b, L in zip(v, w, lengths):
            m = max(1, int(round(target * L / max(total, 1e-300))))
            t = np.arange(m) / m
            pts.append(a + (b - a) * t)
        return np.concatenate(pts)
    if isinstance(K, UnionRegion):
        per = max(16, target // len(K.parts) + 1)
        return np.concatenate([boundary_points(p, per, resolution) for p in K.parts])
    if isinstance(K, Preimage):
        # z is on the boundary of p^-1(inner) iff p(z) is on the boundary of
        # inner: pull inner's samples back by root solving.  Exact even for
        # hairline parts that a raster would miss.
        from .polynomial import batch_preimages

        inner_pts = boundary_points(K.inner, max(64, target // K.poly.degree), resolution)
        if len(inner_pts) == 0:
            return inner_pts
        return batch_preimages(K.poly, inner_pts).ravel()
    # marching-squares fallback: Sublevel, PixelMask
    curves = level_curves(K, resolution)
    if not curves:
        return np.zeros(0, dtype=complex)
    pts = np.concatenate(curves)
    if len(pts) > 4 * target:
        stride = len(pts) // (4 * target)
        pts = pts[::stride]
    return pts


# ---------------------------------------------------------------------------
# Affine helpers


def translate_region(K: Region, t: complex) -> Region:
    t = complex(t)
    if isinstance(K, Disc):
        return Disc(K.center + t, K.radius)
    if isinstance(K, Annulus):
        return Annulus(K.center + t, K.r_in, K.r_out)
    if isinstance(K, Polygon):
        return Polygon(tuple(v + t for v in K.vertices))
    if isinstance(K, Sublevel):
        return Sublevel(K.poly.compose_linear(1.0, -t), K.x)
    if isinstance(K, Preimage):
        return Preimage(K.poly.shifted_argument(t), K.inner)
    if isinstance(K, UnionRegion):
        return UnionRegion(tuple(translate_region(p, t) for p in K.parts))
    if isinstance(K, PixelMask):
        return PixelMask(K.origin + t, K.h, K.bits)
    raise TypeError(f"not a region: {type(K).__name__}")


def scale_region(K: Region, s: complex) -> Region:
    """The region s*K = {s*z : z in K}, for s != 0."""
    s = complex(s)
    if s == 0:
        raise ValueError("scale factor must be nonzero")
    if isinstance(K, Disc):
        return Disc(s * K.center, abs(s) * K.radius)
    if isinstance(K, Annulus):
        return Annulus(s * K.center, abs(s) * K.r_in, abs(s) * K.r_out)
    if isinstance(K, Polygon):
        return Polygon(tuple(s * v for v in K.vertices))
    if isinstance(K, Sublevel):
        return Sublevel(K.poly.compose_linear(1.0 / s, 0.0), K.x)
    if isinstance(K, Preimage):
        # s*{p in inner} = {q in s^n * inner} with monic q(u) = s^n p(u/s)
        n = K.poly.degree
        q = K.poly.compose_linear(1.0 / s, 0.0)
        qc = list((s**n) * np.asarray(q.coeffs))
        qc[-1] = 1.0 + 0j
        return Preimage(Polynomial(tuple(qc)), scale_region(K.inner, s**n))
    if isinstance(K, UnionRegion):
        return UnionRegion(tuple(scale_region(p, s) for p in K.parts))
    if isinstance(K, PixelMask):
        if s.imag != 0 or s.real <= 0:
            raise ValueError("pixel masks only scale by positive real factors")
        return PixelMask(K.origin * s.real, K.h * s.real, K.bits)
    raise TypeError(f"not a region: {type(K).__name__}")
