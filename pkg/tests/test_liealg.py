import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.linalg import expm

from artifact.liealg import (
    BASIS,
    I_U1,
    T,
    T1,
    T2,
    T3,
    TBAR,
    Couplings,
    KElement,
    LieCoeffs,
    ValidationError,
    ad_k,
    adjoint,
    bracket,
    fiber_momentum,
    from_kp,
    from_matrix,
    higgs_potential,
    k_p_split,
    pairing,
    rep_alg,
    rep_group,
    su2_exp,
    su2_log,
    to_kp,
    to_matrix,
)

finite = st.floats(-10, 10, allow_nan=False)
vec4 = arrays(np.float64, 4, elements=finite)


def random_su2(rng):
    v = rng.normal(size=4)
    v /= np.linalg.norm(v)
    a, b = complex(v[0], v[1]), complex(v[2], v[3])
    return np.array([[a, -np.conj(b)], [b, np.conj(a)]])


class TestBracket:
    def test_t1_t2(self):
        assert np.allclose(bracket(T1, T2), -T3)

    def test_t_tbar(self):
        out = bracket(T, TBAR)
        a, cm, cp = to_kp(out)
        assert abs(a) < 1e-15
        assert np.allclose(out, 1j * T3)

    @given(vec4)
    def test_antisymmetric(self, x):
        assert np.allclose(bracket(x, x), 0)

    @given(vec4, vec4)
    def test_matrix_commutator(self, x, y):
        m = to_matrix(x) @ to_matrix(y) - to_matrix(y) @ to_matrix(x)
        assert np.allclose(to_matrix(bracket(x, y)), m, atol=1e-10)

    @given(vec4, vec4, vec4)
    def test_jacobi(self, x, y, z):
        j = bracket(x, bracket(y, z)) + bracket(y, bracket(z, x)) + bracket(z, bracket(x, y))
        assert np.allclose(j, 0, atol=1e-9)

    def test_u1_central(self, rng):
        x = rng.normal(size=4)
        assert np.allclose(bracket(I_U1, x), 0)


class TestKP:
    @given(vec4)
    def test_round_trip(self, x):
        assert np.allclose(from_kp(*to_kp(x)), x)

    def test_split_sums(self, rng):
        x = rng.normal(size=(5, 4))
        k, p = k_p_split(x)
        assert np.allclose(k + p, x)
        assert np.allclose(to_kp(p)[2], 0)

    def test_lie_coeffs_validation(self):
        with pytest.raises(ValidationError):
            LieCoeffs(np.nan, 0, 0, 0)
        assert LieCoeffs(0, 0, 1, 1).k_part == 1.0


class TestAdK:
    def test_identity(self, rng):
        x = rng.normal(size=4)
        assert np.allclose(ad_k(KElement(0.0), x), x)

    def test_quarter_turn(self):
        assert np.allclose(ad_k(KElement(np.pi / 2), T1), -T2)

    def test_matches_conjugation(self, rng):
        k = KElement(rng.uniform(0, 4 * np.pi))
        x = rng.normal(size=4)
        assert np.allclose(ad_k(k, x), adjoint(k.su2, x))
        assert np.isclose(np.linalg.norm(ad_k(k, x)), np.linalg.norm(x))

    def test_fixes_k_direction(self):
        assert np.allclose(ad_k(KElement(1.3), T3 + I_U1), T3 + I_U1)


class TestPairing:
    def test_unit(self):
        assert pairing(T1, T1) == 1.0
        assert pairing(T1, I_U1) == 0.0

    def test_kappa(self):
        c = Couplings(g=0.7, gp=0.4)
        assert np.isclose(pairing(T3, T3, "kappa", c), 1 / 0.7**2)

    def test_kappa_unit_couplings(self, rng):
        c = Couplings(g=1.0, gp=1.0)
        x, y = rng.normal(size=(2, 4))
        assert np.isclose(pairing(x, y, "kappa", c), pairing(x, y))

    def test_needs_couplings(self):
        with pytest.raises(ValidationError):
            pairing(T1, T1, "kappa")

    def test_adjoint_invariant(self, rng):
        a = random_su2(rng)
        x, y = rng.normal(size=(2, 4))
        c = Couplings()
        assert np.isclose(pairing(adjoint(a, x), adjoint(a, y), "kappa", c), pairing(x, y, "kappa", c))


class TestRepresentation:
    def test_u1(self):
        assert np.allclose(rep_alg(I_U1, [1, 0]), [0.5j, 0])

    def test_t3(self):
        assert np.allclose(rep_alg(T3, [0, 1]), [0, -0.5j])

    def test_homomorphism(self, rng):
        x, y = rng.normal(size=(2, 4))
        z = rng.normal(size=2) + 1j * rng.normal(size=2)
        lhs = rep_alg(bracket(x, y), z)
        rhs = rep_alg(x, rep_alg(y, z)) - rep_alg(y, rep_alg(x, z))
        assert np.allclose(lhs, rhs, atol=1e-12)

    def test_group_identity(self, rng):
        z = rng.normal(size=2) + 1j * rng.normal(size=2)
        assert np.allclose(rep_group(np.eye(2), 0.0, z), z)

    def test_k_fixes_vacuum(self):
        k = KElement(0.9)
        assert np.allclose(rep_group(k.su2, k.theta, [0, 1]), [0, 1])

    def test_derivative_is_rep_alg(self, rng):
        x = rng.normal(size=4)
        z = rng.normal(size=2) + 1j * rng.normal(size=2)
        h = 1e-6
        fd = (rep_group(su2_exp(h * x), h * x[3], z) - rep_group(su2_exp(-h * x), -h * x[3], z)) / (2 * h)
        assert np.allclose(fd, rep_alg(x, z), atol=1e-6)

    def test_rejects_non_unitary(self):
        with pytest.raises(ValidationError):
            rep_group(2 * np.eye(2), 0.0, [1, 0])


class TestPotentialAndMomentum:
    def test_vacuum_zero(self):
        c = Couplings(nu_h=1.7)
        assert higgs_potential([0, c.nu_h / np.sqrt(2)], c) == pytest.approx(0.0, abs=1e-15)

    def test_origin(self):
        c = Couplings(lambda_h=0.3, nu_h=1.2)
        assert higgs_potential([0, 0], c) == pytest.approx(0.3 * 1.2**4 / 4)

    def test_invariant(self, rng):
        c = Couplings()
        z = rng.normal(size=2) + 1j * rng.normal(size=2)
        for _ in range(10):
            a = random_su2(rng)
            assert np.isclose(higgs_potential(rep_group(a, rng.normal(), z), c), higgs_potential(z, c), rtol=1e-12)

    def test_fiber_momentum_value(self):
        assert np.allclose(fiber_momentum([0, 1], [0, 1j]), [0, 0, -0.5, 0.5])

    def test_fiber_momentum_zero(self, rng):
        z = rng.normal(size=2) + 1j * rng.normal(size=2)
        assert np.allclose(fiber_momentum(z, [0, 0]), 0)

    def test_fiber_momentum_pairing(self, rng):
        z, v = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        mu = fiber_momentum(z, v)
        for b in BASIS:
            assert np.isclose(mu @ b, np.real(np.vdot(v, rep_alg(b, z))))

    def test_fiber_momentum_equivariant(self, rng):
        z, v = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        a = random_su2(rng)
        th = rng.normal()
        lhs = fiber_momentum(rep_group(a, th, z), rep_group(a, th, v))
        assert np.allclose(lhs, adjoint(a, fiber_momentum(z, v)), atol=1e-12)


class TestGroup:
    @settings(max_examples=50)
    @given(arrays(np.float64, 4, elements=st.floats(-3, 3)))
    def test_exp_log(self, x):
        x = x.copy()
        x[3] = 0
        assert np.allclose(su2_log(su2_exp(x)), x, atol=1e-9)

    def test_exp_matches_matrix(self, rng):
        x = rng.normal(size=4)
        x[3] = 0
        assert np.allclose(su2_exp(x), expm(to_matrix(x)))

    def test_from_matrix_inverse(self, rng):
        x = rng.normal(size=(3, 4))
        assert np.allclose(from_matrix(to_matrix(x)), x)

    def test_couplings_validation(self):
        with pytest.raises(ValidationError):
            Couplings(g=-1.0)
        c = Couplings(g=1.0, gp=1.0)
        assert np.isclose(c.theta_w, np.pi / 4)
