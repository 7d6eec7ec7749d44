import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lemlab.errors import NotMonic
from lemlab.polynomial import (
    Polynomial,
    batch_preimages,
    escape_radius,
    preimages,
    roots,
)


def P(*coeffs):
    return Polynomial(tuple(coeffs))


class TestEval:
    def test_square(self):
        assert P(0, 0, 1)(1 + 1j) == 2j

    def test_square_minus_one(self):
        assert P(-1, 0, 1)(0) == -1

    def test_cubic(self):
        assert P(0, 2, 0, 1)(2) == 12

    def test_vectorized_matches_scalar(self):
        p = P(1 - 2j, 0.5, 3, 1)
        zs = np.array([0.3 + 1j, -2, 1j])
        out = p(zs)
        assert out.shape == (3,)
        for z, v in zip(zs, out):
            assert v == pytest.approx(p(complex(z)))


class TestDerivative:
    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_power(self, n):
        p = Polynomial((0,) * n + (1,))
        d = p.derivative()
        assert d.degree == n - 1
        assert d.coeffs[-1] == n

    def test_square_minus_one(self):
        assert P(-1, 0, 1).derivative().coeffs == (0j, 2 + 0j)

    def test_constant(self):
        d = P(5).derivative()
        assert d.degree == 0 and d.coeffs == (0j,)


class TestRoots:
    def test_two_simple(self):
        ps = roots(P(-1, 0, 1))
        assert [m for _, m in ps.points] == [1, 1]
        assert sorted(z.real for z, _ in ps.points) == pytest.approx([-1, 1])
        assert [z.imag for z, _ in ps.points] == pytest.approx([0, 0])

    def test_double_at_zero(self):
        ps = roots(P(0, 0, 1))
        assert ps.total == 2
        assert ps.points == ((pytest.approx(0), 2),)

    def test_cube_roots_of_unity(self):
        ps = roots(P(-1, 0, 0, 1))
        assert ps.total == 3
        locs = sorted(ps.locations(), key=lambda z: (round(z.real, 6), round(z.imag, 6)))
        expect = sorted(
            [np.exp(2j * np.pi * k / 3) for k in range(3)],
            key=lambda z: (round(z.real, 6), round(z.imag, 6)),
        )
        for a, b in zip(locs, expect):
            assert a == pytest.approx(b, abs=1e-9)

    def test_constant_rejected(self):
        with pytest.raises(ValueError):
            roots(P(3))

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_derivative_of_shifted_power(self, n):
        # roots(derivative((z-b)^n + c)) is b with multiplicity n-1
        b, c = 0.7 - 0.3j, 2 + 1j
        p = Polynomial.from_roots([b] * n) + c
        ps = roots(p.derivative())
        assert len(ps.points) == 1
        z, m = ps.points[0]
        assert m == n - 1
        assert z == pytest.approx(b, abs=1e-6)

    def test_close_simple_roots_not_merged(self):
        p = Polynomial.from_roots([1e-5, -1e-5])
        ps = roots(p)
        assert len(ps.points) == 2
        assert ps.total == 2


class TestPreimages:
    def test_square_of_four(self):
        ps = preimages(P(0, 0, 1), 4)
        assert [m for _, m in ps.points] == [1, 1]
        assert sorted(z.real for z, _ in ps.points) == pytest.approx([-2, 2])

    def test_square_of_zero(self):
        ps = preimages(P(0, 0, 1), 0)
        assert ps.points == ((pytest.approx(0), 2),)

    def test_shifted_double(self):
        # (z-1)^2 + 3 = 3 at z = 1, twice
        ps = preimages(P(4, -2, 1), 3)
        assert ps.points == ((pytest.approx(1), 2),)

    def test_constant_rejected(self):
        with pytest.raises(ValueError):
            preimages(P(7), 7)


class TestEscapeRadius:
    def test_square(self):
        r = escape_radius(P(0, 0, 1), 4)
        assert r == 4
        th = np.linspace(0, 2 * np.pi, 64, endpoint=False)
        assert np.min(np.abs(P(0, 0, 1)(r * np.exp(1j * th)))) > 4

    def test_square_minus_one(self):
        r = escape_radius(P(-1, 0, 1), 1)
        assert r == 2
        # oracle: minimize |z^2 - 1| over the circle |z| = 2 numerically
        th = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
        m = np.min(np.abs(P(-1, 0, 1)(2 * np.exp(1j * th))))
        assert m == pytest.approx(3.0, abs=1e-4)
        assert m > 1

    def test_cube_zero_level(self):
        assert escape_radius(P(0, 0, 0, 1), 0) == 1

    def test_not_monic(self):
        with pytest.raises(NotMonic):
            escape_radius(P(0, 0, 2), 1)

    @pytest.mark.parametrize("seed", range(5))
    def test_circle_sweep(self, seed):
        rng = np.random.default_rng(seed)
        deg = int(rng.integers(1, 7))
        rts = rng.uniform(-2, 2, deg) + 1j * rng.uniform(-2, 2, deg)
        p = Polynomial.from_roots(rts)
        big = float(rng.uniform(0, 10))
        r = escape_radius(p, big)
        th = 2 * np.pi * np.arange(1024) / 1024
        assert np.all(np.abs(p(r * np.exp(1j * th))) > big)


coord = st.floats(min_value=-2, max_value=2, allow_nan=False)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(coord, coord), min_size=1, max_size=6), st.tuples(coord, coord))
def test_preimage_total_and_residual(root_pairs, w_pair):
    p = Polynomial.from_roots([complex(a, b) for a, b in root_pairs])
    w = complex(*w_pair)
    ps = preimages(p, w)
    assert ps.total == p.degree
    for z in ps.locations():
        assert abs(p(z) - w) <= 1e-10 * max(1.0, abs(w), abs(z) ** p.degree)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(coord, coord), min_size=1, max_size=6), st.tuples(coord, coord))
def test_eval_derivative_consistency(root_pairs, z_pair):
    p = Polynomial.from_roots([complex(a, b) for a, b in root_pairs])
    z = complex(*z_pair)
    h = 1e-5
    lin = abs(p(z + h) - p(z) - h * p.derivative()(z))
    # |p(z+h) - p(z) - h p'(z)| <= C h^2 with C ~ max |p''| near z
    scale = sum(abs(c) * (abs(z) + 1) ** k for k, c in enumerate(p.coeffs))
    assert lin <= 100 * scale * h**2


class TestHelpers:
    def test_monic_flag_is_exact(self):
        assert P(3, 1).is_monic()
        assert not P(0, 0.9999999999999999).is_monic()

    def test_monic_normalized(self):
        p = P(2, 4, 2j)
        q, a = p.monic_normalized()
        assert a == 2j
        assert q.is_monic()
        z = 0.3 + 0.7j
        assert q(z) == pytest.approx(p(z) / a)

    def test_compose_linear(self):
        p = P(1, -2, 3)
        a, b = 0.5 - 1j, 2 + 0.25j
        z = -0.7 + 0.2j
        assert p.compose_linear(a, b)(z) == pytest.approx(p(a * z + b))

    def test_shifted_argument_keeps_monic(self):
        p = Polynomial.from_roots([1, 2j, -0.5])
        q = p.shifted_argument(1 + 2j)
        assert q.is_monic()
        z = 0.1 - 0.4j
        assert q(z) == pytest.approx(p(z - (1 + 2j)))

    def test_trailing_zeros_trimmed(self):
        assert P(1, 2, 0, 0).degree == 1

    def test_add_sub_constant(self):
        p = P(1, 1)
        assert (p - 3)(0) == -2
        assert (p + 3)(0) == 4


def test_batch_preimages_matches_single():
    p = Polynomial.from_roots([0.5, -1 + 0.5j, 1j])
    ws = np.array([0.3 - 0.2j, 2.0, -1.5j, 0.0])
    batch = batch_preimages(p, ws)
    assert batch.shape == (4, 3)
    for w, row in zip(ws, batch):
        expect = sorted(preimages(p, complex(w)).expanded(), key=lambda z: (z.real, z.imag))
        got = sorted(row, key=lambda z: (z.real, z.imag))
        for a, b in zip(got, expect):
            assert a == pytest.approx(b, abs=1e-8)
