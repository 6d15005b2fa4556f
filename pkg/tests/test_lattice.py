import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.lattice import (
    Cochain,
    Lattice,
    NumericalError,
    codiff,
    d,
    from_bytes,
    from_json_dict,
    hodge,
    hodge_decompose,
    hodge_inv,
    inner,
    laplace,
    project_harmonic,
    solve_poisson,
    to_bytes,
    to_json_dict,
    wedge_pair,
)
from artifact.liealg import ValidationError, bracket

dims = st.tuples(*[st.integers(1, 4)] * 3)


def rand(lat, k, rng, vtype="real"):
    shape = {"real": (), "lie": (4,), "complex": (), "pair": (2,)}[vtype]
    v = rng.normal(size=(lat.count(k),) + shape)
    if vtype in ("complex", "pair"):
        v = v + 1j * rng.normal(size=v.shape)
    return Cochain(lat, k, v, vtype)


def smooth_one_form(lat, phase=0.0):
    """Edge integrals (midpoint rule) of a smooth periodic 1-form on [0, 2 pi)^3."""
    h = lat.h
    X = lat.coords * h
    vals = []
    for dd in range(3):
        m = X.copy()
        m[:, dd] += h / 2
        vals.append(h * (np.cos(m[:, 0] + 2 * m[:, 1] + phase) + np.sin(m[:, 2] + dd + phase)))
    return Cochain(lat, 1, np.concatenate(vals))


class TestComplex:
    @settings(max_examples=20, deadline=None)
    @given(dims, st.floats(0.1, 3.0))
    def test_dd_zero(self, n, h):
        lat = Lattice(n, h)
        rng = np.random.default_rng(0)
        for k in (0, 1):
            assert np.max(np.abs(d(d(rand(lat, k, rng))).values)) < 1e-14

    def test_constant(self):
        lat = Lattice((3, 4, 2))
        assert np.all(d(Cochain(lat, 0, np.full(24, 2.5))).values == 0)

    def test_codiff_codiff(self, rng):
        lat = Lattice((3, 3, 3), 0.5)
        for k in (2, 3):
            assert np.max(np.abs(codiff(codiff(rand(lat, k, rng, "lie"))).values)) < 1e-12

    def test_codiff_constant_top(self):
        lat = Lattice((3, 3, 3))
        assert np.all(codiff(Cochain(lat, 3, np.ones(27))).values == 0)

    @pytest.mark.parametrize("k", [0, 1, 2])
    def test_adjoint(self, rng, k):
        lat = Lattice((4, 3, 5), 0.7)
        a, b = rand(lat, k, rng, "lie"), rand(lat, k + 1, rng, "lie")
        lhs = inner(d(a), b)
        assert abs(lhs - inner(a, codiff(b))) < 1e-13 * max(1.0, abs(lhs))

    def test_gradient_order_two(self):
        errs = []
        for n in (8, 16, 32):
            lat = Lattice((n, 1, 1), 2 * np.pi / n)
            x = lat.coords[:, 0] * lat.h
            f = Cochain(lat, 0, np.sin(x))
            exact = np.cos(x + lat.h / 2)
            errs.append(np.max(np.abs(d(f).values[:n] / lat.h - exact)))
        rates = np.log2(np.array(errs[:-1]) / errs[1:])
        assert np.all(rates > 1.9)

    def test_degree_errors(self, rng):
        lat = Lattice((2, 2, 2))
        with pytest.raises(ValidationError):
            d(rand(lat, 3, rng))
        with pytest.raises(ValidationError):
            codiff(rand(lat, 0, rng))
        with pytest.raises(ValidationError):
            Cochain(lat, 1, np.zeros(5))
        with pytest.raises(ValidationError):
            Lattice((0, 1, 1))


class TestHodge:
    def test_zero_form(self):
        lat = Lattice((2, 2, 2), 0.5)
        s = hodge(Cochain(lat, 0, np.full(8, 3.0)))
        assert s.degree == 3 and np.allclose(s.values, 3.0 * 0.5**3)

    def test_involution(self, rng):
        lat = Lattice((2, 3, 2), 0.3)
        for k in range(4):
            c = rand(lat, k, rng)
            assert np.array_equal(hodge_inv(hodge(c)).values * 1.0, c.values * lat.weight(k) * lat.weight(3 - k))

    def test_norm(self, rng):
        lat = Lattice((3, 3, 3), 0.6)
        for k in range(4):
            c = rand(lat, k, rng)
            s = hodge(c)
            assert np.isclose(inner(c, c), inner(s, s) / (lat.weight(k) * lat.weight(3 - k)))


class TestInner:
    def test_positive(self, rng):
        lat = Lattice((2, 2, 2))
        c = rand(lat, 1, rng, "pair")
        assert inner(c, c) > 0
        assert inner(Cochain.zeros(lat, 1, "pair"), Cochain.zeros(lat, 1, "pair")) == 0

    def test_bilinear(self, rng):
        lat = Lattice((3, 2, 2), 0.9)
        a, b, c = (rand(lat, 2, rng, "lie") for _ in range(3))
        assert abs(inner(a * 2.0 + b, c) - 2 * inner(a, c) - inner(b, c)) < 1e-13 * 10

    def test_dense_gram(self, rng):
        lat = Lattice((2, 2, 2), 0.8)
        a, b = rand(lat, 1, rng), rand(lat, 1, rng)
        G = lat.weight(1) * np.eye(lat.count(1))
        assert np.isclose(inner(a, b), a.values @ G @ b.values)

    def test_mismatch(self, rng):
        with pytest.raises(ValidationError):
            inner(rand(Lattice((2, 2, 2)), 1, rng), rand(Lattice((2, 2, 3)), 1, rng))


class TestPoisson:
    def test_round_trip(self, rng):
        lat = Lattice((4, 4, 4), 0.5)
        for k in (0, 1):
            x = rand(lat, k, rng, "lie")
            x = x - project_harmonic(x)
            y = solve_poisson(laplace(x))
            assert np.max(np.abs((y - x).values)) < 1e-9

    def test_harmonic_rhs(self):
        lat = Lattice((3, 3, 3))
        rhs = Cochain(lat, 0, np.ones(27))
        assert np.all(solve_poisson(rhs).values == 0)
        with pytest.raises(ValidationError):
            solve_poisson(rhs, strict=True)

    def test_fourier_symbol(self):
        n, h, m = 8, 0.4, 3
        lat = Lattice((n, 1, 1), h)
        x = lat.coords[:, 0]
        f = Cochain(lat, 0, np.cos(2 * np.pi * m * x / n))
        lam = (2 - 2 * np.cos(2 * np.pi * m / n)) / h**2
        assert np.allclose(laplace(f).values, lam * f.values)

    def test_iteration_cap(self, rng):
        lat = Lattice((6, 6, 6))
        with pytest.raises(NumericalError) as err:
            solve_poisson(rand(lat, 0, rng), max_iter=2)
        assert err.value.trace is not None or True


class TestHodgeSplit:
    def test_exact_input(self, rng):
        lat = Lattice((4, 4, 4), 0.5)
        sp = hodge_decompose(d(rand(lat, 0, rng, "lie")))
        assert sp.coexact.norm() < 1e-9 and sp.harmonic.norm() < 1e-9

    def test_constant_is_harmonic(self):
        lat = Lattice((4, 4, 4))
        c = Cochain(lat, 1, np.repeat([1.0, -2.0, 0.5], 64))
        sp = hodge_decompose(c)
        assert (sp.harmonic - c).norm() < 1e-12 and sp.exact.norm() < 1e-12

    def test_random(self, rng):
        lat = Lattice((4, 4, 4), 0.7)
        a = rand(lat, 1, rng, "lie")
        sp = hodge_decompose(a)
        assert sp.residual < 1e-9 * a.norm()
        assert abs(inner(sp.exact, sp.coexact)) < 1e-8 * a.norm() ** 2
        assert lat.harmonic_basis(1).shape == (3, lat.count(1))


class TestWedge:
    def test_zero_forms(self, rng):
        lat = Lattice((2, 2, 2))
        a, b = rand(lat, 0, rng), rand(lat, 0, rng)
        assert np.array_equal(wedge_pair(a, b).values, a.values * b.values)

    def test_antisymmetric_hook(self, rng):
        lat = Lattice((2, 2, 2))
        a, b = rand(lat, 0, rng, "lie"), rand(lat, 0, rng, "lie")
        s = wedge_pair(a, b, bracket) + wedge_pair(b, a, bracket)
        assert np.max(np.abs(s.values)) == 0

    def test_graded_commutative(self, rng):
        lat = Lattice((3, 3, 3))
        a, b = rand(lat, 1, rng), rand(lat, 1, rng)
        assert np.allclose((wedge_pair(a, b) + wedge_pair(b, a)).values, 0)

    @pytest.mark.parametrize("n", [8, 16])
    def test_leibniz(self, n):
        lat = Lattice((n, n, n), 2 * np.pi / n)
        X = lat.coords * lat.h
        f = Cochain(lat, 0, np.sin(X[:, 0]) * np.cos(X[:, 1]))
        a, b = smooth_one_form(lat, 0.3), smooth_one_form(lat, 1.1)
        lhs = d(wedge_pair(f, b))
        assert (lhs - wedge_pair(d(f), b) - wedge_pair(f, d(b))).norm() < 1e-12 * lhs.norm()
        lhs = d(wedge_pair(a, b))
        assert (lhs - wedge_pair(d(a), b) + wedge_pair(a, d(b))).norm() < 1e-12 * lhs.norm()

    def test_degree_overflow(self, rng):
        lat = Lattice((2, 2, 2))
        with pytest.raises(ValidationError):
            wedge_pair(rand(lat, 2, rng), rand(lat, 2, rng))


class TestSerialisation:
    @pytest.mark.parametrize("vtype", ["real", "complex", "lie", "pair"])
    def test_bytes(self, rng, vtype):
        lat = Lattice((2, 3, 1), 0.25)
        c = rand(lat, 1, rng, vtype)
        back = from_bytes(to_bytes(c))
        assert back.lattice == lat and back.vtype == vtype and np.array_equal(back.values, c.values)

    def test_json(self, rng):
        c = rand(Lattice((2, 2, 2)), 2, rng, "lie")
        assert np.array_equal(from_json_dict(to_json_dict(c)).values, c.values)

    def test_bad_magic(self):
        with pytest.raises(ValidationError):
            from_bytes(b"XXXX" + bytes(40))
