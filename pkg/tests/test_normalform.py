import numpy as np
import pytest

from artifact.liealg import ValidationError
from artifact.normalform import (
    LinearGAction,
    TubeCoords,
    build_slice,
    cotangent_lift,
    cotangent_omega,
    kernel_vs_orbit,
    lifted_momentum,
    linear_momentum,
    normal_form_momentum,
    pullback_omega_check,
    so2,
    so3,
    stabilizer_dim_phase,
    tube_phi,
    verify_normal_form,
)
from artifact.oscillator import PhasePoint2D, angular_momentum

Q = np.array([0.0, 0.0, 1.0])


@pytest.fixture
def act():
    return so3()


@pytest.fixture
def sl(act):
    return build_slice(act, Q)


def tube(act, sl, rng, nu=None, alpha=None, y=0.05):
    return TubeCoords(
        act.sample_group(rng),
        rng.normal(size=2) if nu is None else nu,
        Q + sl.slice_dirs @ [y],
        rng.normal(size=1) if alpha is None else alpha,
    )


class TestAction:
    def test_so3_structure(self, act):
        c = act.structure_constants()
        # [L_i, L_j] = eps_ijk L_k up to orientation
        assert np.allclose(np.abs(c[0, 1]), [0, 0, 1])

    def test_rejects_non_antisymmetric(self):
        with pytest.raises(ValidationError):
            LinearGAction((np.eye(2),))

    def test_rejects_open_algebra(self):
        a = np.zeros((3, 3))
        a[0, 1], a[1, 0] = 1, -1
        b = np.zeros((3, 3))
        b[0, 2], b[2, 0] = 1, -1
        with pytest.raises(ValidationError):
            LinearGAction((a, b))

    def test_coad_is_action(self, act, rng):
        a, b = act.sample_group(rng), act.sample_group(rng)
        mu = rng.normal(size=3)
        assert np.allclose(act.coad(a @ b, mu), act.coad(a, act.coad(b, mu)))


class TestSlice:
    def test_so3_pole(self, sl):
        assert sl.stab.shape[1] == 1 and sl.comp.shape[1] == 2
        assert np.allclose(np.abs(sl.slice_dirs[:, 0]), [0, 0, 1])

    def test_so2_free(self):
        s = build_slice(so2(), [1.0, 0.0])
        assert s.stab.shape[1] == 0 and s.comp.shape[1] == 1

    def test_origin(self, act):
        s = build_slice(act, np.zeros(3))
        assert s.stab.shape[1] == 3 and s.comp.shape[1] == 0
        assert s.radius == np.inf


class TestMomentum:
    def test_so2_is_angular_momentum(self, rng):
        q, p = rng.normal(size=(2, 2))
        j = lifted_momentum(so2(), q, p)[0]
        assert np.isclose(j, angular_momentum(PhasePoint2D(q, p)), atol=1e-12)

    def test_zero_covector(self, act, rng):
        assert np.allclose(lifted_momentum(act, rng.normal(size=3), np.zeros(3)), 0)

    def test_equivariance(self, act, rng):
        q, p = rng.normal(size=(2, 3))
        g = act.sample_group(rng)
        lhs = lifted_momentum(act, g @ q, g @ p)
        assert np.allclose(lhs, act.coad(g, lifted_momentum(act, q, p)), atol=1e-10)


class TestTube:
    def test_zero_momentum_covector(self, act, sl, rng):
        _, p = tube_phi(act, sl, tube(act, sl, rng, nu=np.zeros(2), alpha=np.zeros(1)))
        assert np.allclose(p, 0)

    def test_repairing_returns_nu(self, act, sl, rng):
        nu = rng.normal(size=2)
        tc = TubeCoords(np.eye(3), nu, Q.copy(), np.zeros(1))
        q1, p1 = tube_phi(act, sl, tc)
        vals = [p1 @ (act.matrix(sl.comp[:, i]) @ q1) for i in range(2)]
        assert np.allclose(vals, nu, atol=1e-10)

    def test_equivariance(self, act, sl, rng):
        tc = tube(act, sl, rng)
        g = act.sample_group(rng)
        q1, p1 = tube_phi(act, sl, tc)
        q2, p2 = tube_phi(act, sl, TubeCoords(g @ tc.a, tc.nu, tc.s, tc.alpha_s))
        assert np.allclose(q2, g @ q1, atol=1e-10) and np.allclose(p2, g @ p1, atol=1e-10)

    def test_outside_radius(self, act, sl, rng):
        with pytest.raises(ValidationError):
            tube_phi(act, sl, tube(act, sl, rng, y=0.5))

    def test_normal_form_identity(self, act, sl, rng):
        for _ in range(50):
            assert verify_normal_form(act, sl, tube(act, sl, rng, alpha=np.zeros(1), y=rng.uniform(-0.1, 0.1))) < 1e-10

    def test_zero_data(self, act, sl, rng):
        tc = tube(act, sl, rng, nu=np.zeros(2), alpha=np.zeros(1))
        assert np.allclose(normal_form_momentum(act, sl, tc), 0)

    def test_zero_level_set(self, act, sl, rng):
        # J = 0 exactly when nu = 0 and the slice momentum vanishes
        for nu, alpha in [(np.zeros(2), np.zeros(1)), (np.array([1e-3, 0]), np.zeros(1)), (np.zeros(2), np.array([0.3]))]:
            tc = tube(act, sl, rng, nu=nu, alpha=alpha)
            q1, p1 = tube_phi(act, sl, tc)
            zero = np.linalg.norm(lifted_momentum(act, q1, p1)) < 1e-12
            # on the pole slice the slice momentum of the z-rotation vanishes identically
            assert zero == (not np.any(nu))


class TestPullback:
    def pairs(self, rng, mask):
        out = []
        for _ in range(5):
            two = []
            for _ in range(2):
                xi, eta, dy, da = rng.normal(size=2), rng.normal(size=2), rng.normal(size=1), rng.normal(size=1)
                two.append((xi * mask[0], eta * mask[1], dy * mask[2], da * mask[3]))
            out.append(tuple(two))
        return out

    @pytest.mark.parametrize("mask", [(0, 0, 1, 1), (1, 1, 0, 0), (1, 1, 1, 1)])
    def test_blocks(self, act, sl, rng, mask):
        tc = tube(act, sl, rng, nu=np.zeros(2), alpha=np.array([0.7]), y=0.1)
        assert pullback_omega_check(act, sl, tc, self.pairs(rng, mask)) < 1e-5

    def test_requires_zero_momentum(self, act, sl, rng):
        with pytest.raises(ValidationError):
            pullback_omega_check(act, sl, tube(act, sl, rng), [])


class TestLinear:
    def test_zero(self):
        W = cotangent_omega(2)
        assert np.allclose(linear_momentum(W, [cotangent_lift(so2().generators[0])], np.zeros(4)), 0)

    def test_lift_matches_angular_momentum(self, rng):
        W = cotangent_omega(2)
        X = cotangent_lift(so2().generators[0])
        y = rng.normal(size=4)
        assert np.isclose(linear_momentum(W, [X], y)[0], lifted_momentum(so2(), y[:2], y[2:])[0], atol=1e-12)

    def test_differential(self, rng):
        W = cotangent_omega(3)
        gens = [cotangent_lift(x) for x in so3().generators]
        y, dy = rng.normal(size=(2, 6))
        h = 1e-6
        fd = (linear_momentum(W, gens, y + h * dy) - linear_momentum(W, gens, y - h * dy)) / (2 * h)
        exact = [dy @ W @ (X @ y) for X in gens]
        assert np.allclose(fd, exact, atol=1e-6)

    def test_rejects_non_symplectic(self):
        with pytest.raises(ValidationError):
            linear_momentum(cotangent_omega(1), [np.eye(2)], np.ones(2))

    def test_kernel_is_symplectic_orthogonal(self, rng):
        W = cotangent_omega(3)
        gens = [cotangent_lift(x) for x in so3().generators]
        k, o, res = kernel_vs_orbit(W, gens, rng.normal(size=6))
        assert k == o and res < 1e-12

    def test_stabilizer_dims(self, act):
        assert stabilizer_dim_phase(act, Q, np.zeros(3)) == 1
        assert stabilizer_dim_phase(act, Q, np.array([1.0, 0, 0])) == 0
        assert stabilizer_dim_phase(act, np.zeros(3), np.zeros(3)) == 3
