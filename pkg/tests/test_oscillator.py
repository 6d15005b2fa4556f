import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from artifact.liealg import ValidationError
from artifact.oscillator import (
    BLOWUP,
    ConePoint,
    CotangentHalfLine,
    PhasePoint2D,
    SeamLabel2D,
    angular_momentum,
    canonical_bracket,
    cone_flow,
    cone_residual,
    cotangent_flow,
    cotangent_flow_batch,
    critical_times,
    imap,
    initial_cone_point,
    kmap,
    psi,
    seam_label,
    stitch_gap,
)

coord = st.floats(-5, 5, allow_nan=False)


def pt(q, p):
    return PhasePoint2D(np.array(q, float), np.array(p, float))


def rot(a):
    return np.array([[np.cos(a), -np.sin(a)], [np.sin(a), np.cos(a)]])


def comp(i):
    return lambda x: float(kmap(x).as_array()[i])


E_PLUS, E_MINUS, H = comp(0), comp(1), comp(2)


class TestMaps:
    def test_angular_momentum(self):
        assert angular_momentum(pt([1, 0], [0, 1])) == 1
        assert angular_momentum(pt([1, 0], [2, 0])) == 0

    def test_rotation_invariance(self, rng):
        q, p = rng.normal(size=(2, 2))
        R = rot(rng.uniform(0, 2 * np.pi))
        assert np.isclose(angular_momentum(pt(R @ q, R @ p)), angular_momentum(pt(q, p)), atol=1e-12)

    @pytest.mark.parametrize(
        "q, p, want",
        [([1, 0], [0, 0], (-0.5, 0, 0.5)), ([0, 0], [0, 0], (0, 0, 0)), ([1, 0], [2, 0], (1.5, 2, 2.5))],
    )
    def test_kmap(self, q, p, want):
        assert np.allclose(kmap(pt(q, p)).as_array(), want)

    @given(coord, coord, coord, coord)
    def test_cone_identity(self, a, b, c, d):
        x = pt([a, b], [c, d])
        scale = max(1.0, (a * a + b * b + c * c + d * d) ** 2)
        assert abs(cone_residual(x)) <= 1e-12 * scale

    def test_psi(self):
        y = psi(pt([1, 0], [2, 0]))
        assert (y.qbar, y.pbar) == (0.5, 2.0)
        y = psi(pt([0, 1], [0, -1]))
        assert (y.qbar, y.pbar) == (0.5, -1.0)

    def test_psi_rotation_invariant(self, rng):
        q = rng.normal(size=2)
        p = rng.normal() * q
        R = rot(1.1)
        a, b = psi(pt(q, p)), psi(pt(R @ q, R @ p))
        assert np.isclose(a.qbar, b.qbar, atol=1e-12) and np.isclose(a.pbar, b.pbar, atol=1e-12)

    def test_psi_undefined_at_origin(self):
        with pytest.raises(ValidationError):
            psi(pt([0, 0], [1, 0]))

    def test_imap(self):
        assert np.allclose(imap(CotangentHalfLine(0.5, 2.0)).as_array(), (1.5, 2, 2.5))
        assert np.allclose(imap(CotangentHalfLine(1.0, 0.0)).as_array(), (-1, 0, 1))

    def test_half_line_positive(self):
        with pytest.raises(ValidationError):
            CotangentHalfLine(0.0, 1.0)

    def test_invalid_point(self):
        with pytest.raises(ValidationError):
            pt([np.inf, 0], [0, 0])


class TestSeams:
    @pytest.mark.parametrize(
        "q, p, label",
        [
            ([0, 0], [0, 0], SeamLabel2D.ORIGIN_U1_U1),
            ([0, 0], [0, 3], SeamLabel2D.SEAM_E_U1),
            ([1, 1], [2, 2], SeamLabel2D.GENERIC_E_E),
        ],
    )
    def test_labels(self, q, p, label):
        assert seam_label(pt(q, p)) is label

    def test_requires_zero_momentum(self):
        with pytest.raises(ValidationError):
            seam_label(pt([1, 0], [0, 1]))

    def test_seam_maps_to_line(self):
        c = kmap(pt([0, 0], [0, 3]))
        assert c.h == c.e_plus


class TestBrackets:
    def test_values_at_point(self):
        x = pt([1, 0], [0, 1])
        assert canonical_bracket(H, E_PLUS, x) == pytest.approx(0.0, abs=1e-8)
        assert canonical_bracket(E_PLUS, E_MINUS, x) == pytest.approx(2.0, rel=1e-6)

    def test_antisymmetric(self, rng):
        x = pt(*rng.normal(size=(2, 2)))
        assert canonical_bracket(H, H, x) == pytest.approx(0.0, abs=1e-8)

    def test_relations(self, rng):
        for _ in range(20):
            x = pt(*rng.normal(size=(2, 2)))
            c = kmap(x)
            assert canonical_bracket(H, E_PLUS, x) == pytest.approx(-2 * c.e_minus, abs=1e-6)
            assert canonical_bracket(H, E_MINUS, x) == pytest.approx(2 * c.e_plus, abs=1e-6)
            assert canonical_bracket(E_PLUS, E_MINUS, x) == pytest.approx(2 * c.h, abs=1e-6)


class TestFlows:
    def test_period(self, rng):
        c = ConePoint(*rng.normal(size=3))
        assert np.allclose(cone_flow(np.pi, c).as_array(), c.as_array())

    def test_eighth_turn(self):
        assert np.allclose(cone_flow(np.pi / 4, ConePoint(-1, 0, 1)).as_array(), (0, -1, 1))

    def test_energy_conserved(self, rng):
        c = ConePoint(0.3, -0.4, 0.5)
        for t in rng.uniform(-10, 10, 5):
            assert cone_flow(t, c).h == 0.5

    def test_cotangent_start(self):
        y = cotangent_flow(0.0, 1.0, 0.0)
        assert (y.qbar, y.pbar) == (1.0, 0.0)

    def test_blowup(self):
        assert cotangent_flow(np.pi / 2, 1.0, 0.0) == BLOWUP
        _, _, blow = cotangent_flow_batch(critical_times(0.2, 0, 10), 1.0, 0.2)
        assert blow.all()

    def test_critical_times(self):
        assert np.allclose(critical_times(0.0, 0.0, 5.0), [np.pi / 2, 3 * np.pi / 2])

    def test_charts_agree_away_from_blowup(self, rng):
        h0, t0 = 1.3, 0.4
        c0 = initial_cone_point(h0, t0)
        for t in rng.uniform(-3, 3, 20):
            y = cotangent_flow(t, h0, t0)
            if y == BLOWUP:
                continue
            assert np.allclose(imap(y).as_array(), cone_flow(t, c0).as_array(), atol=1e-10)

    @pytest.mark.parametrize("eps", [1e-3, 1e-4])
    def test_stitching_linear(self, eps):
        assert stitch_gap(1.0, 0.0, 0, eps) <= 10 * eps

    def test_bad_energy(self):
        with pytest.raises(ValidationError):
            cotangent_flow(0.0, -1.0, 0.0)
