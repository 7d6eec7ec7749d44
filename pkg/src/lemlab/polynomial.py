"""Complex polynomial arithmetic: evaluation, derivatives, roots, preimages.

Coefficients are stored low-to-high, so ``coeffs[k]`` multiplies ``z**k``.
Root finding is a simultaneous Aberth iteration started from a perturbed
circle, followed by Newton polishing and multiplicity clustering.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonConvergence, NotMonic

ROOT_TOL = 1e-12        # residual tolerance, relative to coefficient scale
CLUSTER_RADIUS = 1e-7   # base merge radius for multiplicity assignment
MAX_ITER = 500


@dataclass(frozen=True)
class Polynomial:
    """Polynomial with complex coefficients, low-to-high degree."""

    coeffs: tuple[complex, ...]

    def __post_init__(self):
        c = tuple(complex(a) for a in self.coeffs)
        while len(c) > 1 and c[-1] == 0:
            c = c[:-1]
        if not c:
            c = (0j,)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_monic(self) -> bool:
        # exact comparison: monicity is a stored fact, not a float tolerance
        return self.coeffs[-1] == 1

    def __call__(self, z):
        """Horner evaluation; accepts scalars or numpy arrays."""
        zz = np.asarray(z, dtype=complex)
        acc = np.full(zz.shape, self.coeffs[-1], dtype=complex)
        for a in reversed(self.coeffs[:-1]):
            acc = acc * zz + a
        if acc.shape == ():
            return complex(acc)
        return acc

    def derivative(self) -> "Polynomial":
        if self.degree == 0:
            return Polynomial((0j,))
        return Polynomial(tuple(k * a for k, a in enumerate(self.coeffs))[1:])

    def monic_normalized(self) -> tuple["Polynomial", complex]:
        """Return (p / a, a) where a is the leading coefficient."""
        a = self.coeffs[-1]
        if a == 0:
            raise ValueError("zero polynomial has no monic normalization")
        scaled = [c / a for c in self.coeffs]
        scaled[-1] = 1.0 + 0j
        return Polynomial(tuple(scaled)), a

    def compose_linear(self, a: complex, b: complex) -> "Polynomial":
        """Return q with q(z) = p(a*z + b), by Horner in polynomial arithmetic."""
        q = np.zeros(1, dtype=complex)
        lin = np.array([b, a], dtype=complex)
        for c in reversed(self.coeffs):
            q = _polymul(q, lin)
            q[0] += c
        return Polynomial(tuple(q))

    def shifted_argument(self, t: complex) -> "Polynomial":
        """Return p(z - t); preserves monicity."""
        q = self.compose_linear(1.0, -t)
        if self.is_monic():
            c = list(q.coeffs)
            c[-1] = 1.0 + 0j
            q = Polynomial(tuple(c))
        return q

    def __sub__(self, w: complex) -> "Polynomial":
        c = list(self.coeffs)
        c[0] = c[0] - complex(w)
        return Polynomial(tuple(c))

    def __add__(self, w: complex) -> "Polynomial":
        return self.__sub__(-complex(w))

    @classmethod
    def from_roots(cls, roots) -> "Polynomial":
        """Monic polynomial with the given roots."""
        c = np.array([1.0 + 0j])
        for r in roots:
            c = _polymul(c, np.array([-complex(r), 1.0 + 0j]))
        return cls(tuple(c))


def _polymul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.convolve(a, b)


@dataclass(frozen=True)
class PreimageSet:
    """Roots with integer multiplicities (valencies); total counts multiplicity."""

    points: tuple[tuple[complex, int], ...]
    total: int

    def expanded(self) -> list[complex]:
        out: list[complex] = []
        for z, m in self.points:
            out.extend([z] * m)
        return out

    def locations(self) -> list[complex]:
        return [z for z, _ in self.points]


def _coeff_scale(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Backward-error scale sum_k |a_k| |z|^k, evaluated by Horner."""
    az = np.abs(z)
    acc = np.full(az.shape, abs(coeffs[-1]))
    for a in coeffs[-2::-1]:
        acc = acc * az + abs(a)
    return acc


def _horner(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    acc = np.full(z.shape, coeffs[-1], dtype=complex)
    for a in coeffs[-2::-1]:
        acc = acc * z + a
    return acc


def _aberth(coeffs: np.ndarray) -> np.ndarray:
    """All roots of the polynomial with the given low-to-high coefficients.

    Simultaneous Aberth iteration from a deterministically perturbed circle,
    then a few Newton polishing steps per root.
    """
    a = np.asarray(coeffs, dtype=complex)
    a = a / a[-1]
    n = len(a) - 1
    da = a[1:] * np.arange(1, n + 1)

    radius = 1.0 + np.max(np.abs(a[:-1]))
    k = np.arange(n)
    theta = 2 * np.pi * k / n + 0.7 / n + 0.05 * np.sin(9.1 * k + 0.3)
    z = radius * (1 + 0.05 * np.cos(5.3 * k + 1.1)) * np.exp(1j * theta)

    tiny = np.finfo(float).tiny
    done = False
    for _ in range(MAX_ITER):
        pv = _horner(a, z)
        resid_ok = np.abs(pv) <= ROOT_TOL * _coeff_scale(a, z)
        if resid_ok.all():
            done = True
            break
        dv = _horner(da, z) if n >= 1 else np.zeros_like(z)
        dv = np.where(np.abs(dv) < tiny, tiny + 0j, dv)
        w = pv / dv
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        s = (1.0 / diff).sum(axis=1) - 1.0
        denom = 1.0 - w * s
        denom = np.where(np.abs(denom) < tiny, tiny + 0j, denom)
        step = w / denom
        # freeze already-converged roots so stragglers cannot push them away
        step = np.where(resid_ok, 0.0, step)
        z = z - step
    if not done:
        pv = _horner(a, z)
        if not (np.abs(pv) <= 1e3 * ROOT_TOL * _coeff_scale(a, z)).all():
            raise NonConvergence(
                f"Aberth iteration did not reach residual tolerance in {MAX_ITER} steps"
            )

    # Newton polish, keeping the best residual seen per root
    best = z.copy()
    best_res = np.abs(_horner(a, best))
    cur = z.copy()
    for _ in range(4):
        dv = _horner(da, cur)
        dv = np.where(np.abs(dv) < tiny, tiny + 0j, dv)
        cur = cur - _horner(a, cur) / dv
        res = np.abs(_horner(a, cur))
        improved = res < best_res
        best[improved] = cur[improved]
        best_res[improved] = res[improved]
    return best


def _derivatives_at(coeffs: np.ndarray, z: complex, upto: int) -> list[complex]:
    """Values p(z), p'(z), ..., p^(upto)(z)."""
    out = []
    c = np.asarray(coeffs, dtype=complex)
    for _ in range(upto + 1):
        out.append(complex(_horner(c, np.asarray(z))) if len(c) else 0j)
        c = c[1:] * np.arange(1, len(c))
        if len(c) == 0:
            c = np.array([0j])
    return out


def _cluster(coeffs: np.ndarray, zs: np.ndarray) -> list[tuple[complex, int]]:
    """Group approximate roots into (root, multiplicity) pairs.

    Base pass merges points within CLUSTER_RADIUS.  A second pass merges
    wider groups (up to 1e-4 relative) only when the merged point, refined on
    the (m-1)-th derivative, is consistent with an m-fold root: p and all
    lower derivatives vanish to tolerance there.  This keeps genuinely close
    simple roots apart while recovering multiple roots, whose computed
    copies scatter at machine-epsilon^(1/m).
    """
    a = np.asarray(coeffs, dtype=complex)
    a = a / a[-1]
    pts = sorted((complex(z) for z in zs), key=lambda w: (w.real, w.imag))
    groups: list[list[complex]] = []
    for z in pts:
        for g in groups:
            if abs(z - g[0]) <= CLUSTER_RADIUS * (1.0 + abs(z)):
                g.append(z)
                break
        else:
            groups.append([z])

    merged = [(complex(np.mean(g)), len(g)) for g in groups]

    def try_merge(g1, g2):
        mu = (g1[0] * g1[1] + g2[0] * g2[1]) / (g1[1] + g2[1])
        m = g1[1] + g2[1]
        # refine on p^(m-1), where an m-fold root is simple
        c = a.copy()
        for _ in range(m - 1):
            c = c[1:] * np.arange(1, len(c))
        z = mu
        for _ in range(30):
            dc = c[1:] * np.arange(1, len(c)) if len(c) > 1 else np.array([0j])
            val = complex(_horner(c, np.asarray(z)))
            dval = complex(_horner(dc, np.asarray(z))) if len(dc) else 0j
            if dval == 0:
                break
            step = val / dval
            z = z - step
            if abs(step) <= 1e-16 * (1 + abs(z)):
                break
        ders = _derivatives_at(a, z, m - 1)
        for kk in range(m):
            scale = _derivative_scale(a, z, kk)
            tol = ROOT_TOL if kk == 0 else 1e-8
            if abs(ders[kk]) > tol * max(scale, np.finfo(float).tiny):
                return None
        return (complex(z), m)

    changed = True
    while changed:
        changed = False
        merged.sort(key=lambda rm: (rm[0].real, rm[0].imag))
        for i in range(len(merged)):
            for j in range(i + 1, len(merged)):
                zi, zj = merged[i][0], merged[j][0]
                if abs(zi - zj) <= 1e-4 * (1.0 + abs(zi)):
                    fused = try_merge(merged[i], merged[j])
                    if fused is not None:
                        merged[i] = fused
                        del merged[j]
                        changed = True
                        break
            if changed:
                break
    merged.sort(key=lambda rm: (rm[0].real, rm[0].imag))
    return merged


def _derivative_scale(coeffs: np.ndarray, z: complex, order: int) -> float:
    c = np.asarray(coeffs, dtype=complex)
    for _ in range(order):
        c = c[1:] * np.arange(1, len(c))
        if len(c) == 0:
            return 0.0
    return float(_coeff_scale(c, np.asarray(z)))


def roots(p: Polynomial) -> PreimageSet:
    """All complex roots of p with multiplicity."""
    if p.degree < 1:
        raise ValueError("root finding needs degree >= 1")
    raw = _aberth(np.asarray(p.coeffs))
    grouped = _cluster(np.asarray(p.coeffs), raw)
    total = sum(m for _, m in grouped)
    return PreimageSet(points=tuple(grouped), total=total)


def preimages(p: Polynomial, w: complex) -> PreimageSet:
    """All solutions of p(z) = w, counted with valency."""
    if p.degree < 1:
        raise ValueError("preimages need degree >= 1 (constant polynomials rejected)")
    return roots(p - w)


def escape_radius(p: Polynomial, big: float) -> float:
    """Radius r with |p(z)| > big whenever |z| > r, for monic p.

    Crude Cauchy-type bound r = max(1, sum |a_i| + max(big, 1)); valid since
    |p(z)| >= |z|^(n-1) (|z| - sum|a_i|) for |z| >= 1.
    """
    if not p.is_monic():
        raise NotMonic("escape_radius requires a monic polynomial")
    if p.degree < 1:
        raise ValueError("escape_radius needs degree >= 1")
    if big < 0:
        raise ValueError("big must be >= 0")
    tail = sum(abs(c) for c in p.coeffs[:-1])
    return max(1.0, tail + max(float(big), 1.0))


def batch_preimages(p: Polynomial, ws: np.ndarray, iters: int = 80) -> np.ndarray:
    """Roots of p(z) = w for a whole batch of w values at once.

    Returns an array of shape (len(ws), degree).  Used by the image-side
    multiplicity integral, where thousands of solves are needed; points are
    not clustered (valency > 1 only occurs on a measure-zero set of w).
    """
    if p.degree < 1:
        raise ValueError("batch_preimages needs degree >= 1")
    a0 = np.asarray(p.coeffs, dtype=complex)
    a0 = a0 / a0[-1]
    n = len(a0) - 1
    ws = np.asarray(ws, dtype=complex).ravel()
    B = len(ws)
    if B == 0:
        return np.zeros((0, n), dtype=complex)

    # per-batch coefficients: p - w differs only in the constant term
    radius = 1.0 + np.max(np.abs(a0[:-1])) + np.abs(ws)
    k = np.arange(n)
    theta = 2 * np.pi * k / n + 0.7 / n + 0.05 * np.sin(9.1 * k + 0.3)
    z = radius[:, None] * np.exp(1j * theta)[None, :]

    da = a0[1:] * np.arange(1, n + 1)
    tiny = np.finfo(float).tiny

    def peval(zz):
        acc = np.full(zz.shape, a0[-1], dtype=complex)
        for c in a0[-2::-1]:
            acc = acc * zz + c
        return acc - ws[:, None]

    def dpeval(zz):
        acc = np.full(zz.shape, da[-1], dtype=complex)
        for c in da[-2::-1]:
            acc = acc * zz + c
        return acc

    for _ in range(iters):
        pv = peval(z)
        dv = dpeval(z)
        dv = np.where(np.abs(dv) < tiny, tiny + 0j, dv)
        w = pv / dv
        diff = z[:, :, None] - z[:, None, :]
        eye = np.eye(n, dtype=bool)
        diff[:, eye] = 1.0
        s = (1.0 / diff).sum(axis=2) - 1.0
        denom = 1.0 - w * s
        denom = np.where(np.abs(denom) < tiny, tiny + 0j, denom)
        step = w / denom
        z = z - step
        if np.max(np.abs(step)) < 1e-13 * (1.0 + np.max(np.abs(z))):
            break
    for _ in range(3):
        dv = dpeval(z)
        dv = np.where(np.abs(dv) < tiny, tiny + 0j, dv)
        z = z - peval(z) / dv
    return z
