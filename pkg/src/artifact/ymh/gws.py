"""Unitary gauge, symmetry-broken variables and the singular-stratum subsystem.

Conventions for the change of variables (pointwise on cells), with
s = sqrt(g^2 + g'^2), cos = g/s, sin = g'/s and k = (g^2 - g'^2)/s::

    A = g W+ t + g W- tbar + (s/2) Z t_- + (e A_gamma + (k/2) Z) t_+
    E = (D-/g) t + (D+/g) tbar + (e/(g g') D_Z - k/(2 g g') D_gamma) t_- + D_gamma/(2e) t_+
    phi = (0, eta nu / sqrt 2),  pi = (Pi1, Pi2),  Pi_eta = (nu / sqrt 2) Re Pi2

The E-side fields are primal representatives, D = star E.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..lattice import Lattice
from ..liealg import Couplings, ValidationError, from_kp, su2_exp, su2_log, to_kp, adjoint
from .core import YMHState

TOL_PHI = 1e-8
TOL_GAUGE = 1e-10
TOL_STRATUM = 1e-8


@dataclass(frozen=True)
class GaugeField:
    """Finite gauge transformation: an SU(2) matrix and a U(1) angle per site."""

    su2: np.ndarray  # (N, 2, 2)
    angle: np.ndarray  # (N,)

    def __post_init__(self):
        a = np.asarray(self.su2, dtype=complex)
        eye = np.conj(np.swapaxes(a, -1, -2)) @ a
        if np.max(np.abs(eye - np.eye(2))) > 1e-10 or np.max(np.abs(np.linalg.det(a) - 1)) > 1e-10:
            raise ValidationError("gauge field must be special unitary at every site")
        object.__setattr__(self, "su2", a)
        object.__setattr__(self, "angle", np.asarray(self.angle, dtype=float))

    def inverse(self) -> "GaugeField":
        return GaugeField(np.conj(np.swapaxes(self.su2, -1, -2)), -self.angle)

    @classmethod
    def identity(cls, n: int) -> "GaugeField":
        return cls(np.tile(np.eye(2, dtype=complex), (n, 1, 1)), np.zeros(n))

    @classmethod
    def constant_k(cls, n: int, theta: float) -> "GaugeField":
        h = 0.5 * theta
        m = np.diag([np.exp(1j * h), np.exp(-1j * h)])
        return cls(np.tile(m, (n, 1, 1)), np.full(n, theta))


def apply_gauge(lam: GaugeField, s: YMHState) -> YMHState:
    """Finite action on lattice fields.

    The su(2) part of A transforms through its link exponential,
    exp(A_e) -> lam_x exp(A_e) lam_y^-1, with the principal logarithm; the
    u(1) part shifts by -d(angle); E is conjugated at the tail of its edge;
    phi and pi transform in the defining representation.
    """
    lat = s.lattice
    N = lat.n_sites
    x = np.tile(np.arange(N), 3)
    y = np.concatenate([lat.shift(np.arange(N), d) for d in range(3)])
    lx, ly = lam.su2[x], lam.su2[y]
    U = lx @ su2_exp(s.A) @ np.conj(np.swapaxes(ly, -1, -2))
    A = su2_log(U)
    A[:, 3] = s.A[:, 3] - (lat.D0 @ lam.angle)
    E = adjoint(lx, s.E)
    E[:, 3] = s.E[:, 3]
    phase = np.exp(0.5j * lam.angle)[:, None]
    phi = phase * np.einsum("xij,xj->xi", lam.su2, s.phi)
    pi = phase * np.einsum("xij,xj->xi", lam.su2, s.pi)
    return s.with_fields(A=A, E=E, phi=phi, pi=pi)


def unitary_gauge(s: YMHState, tol_phi: float = TOL_PHI) -> tuple[GaugeField, YMHState]:
    """Return (lam, lam^-1 . s) with lam^-1 phi = (0, eta nu / sqrt 2), eta > 0."""
    z = s.phi
    r = np.linalg.norm(z, axis=1)
    if np.min(r) <= tol_phi:
        raise ValidationError("unitary gauge needs a nowhere vanishing Higgs field")
    alpha = np.conj(z[:, 1]) / r
    beta = -np.conj(z[:, 0]) / r
    lam = np.empty((len(r), 2, 2), dtype=complex)
    lam[:, 0, 0], lam[:, 0, 1] = alpha, -np.conj(beta)
    lam[:, 1, 0], lam[:, 1, 1] = beta, np.conj(alpha)
    # lam^dagger z = (0, r); flip by the centre when nu < 0 so that eta > 0
    if s.couplings.nu_h < 0:
        lam = -lam
    g = GaugeField(lam, np.zeros(len(r)))
    out = apply_gauge(g.inverse(), s)
    return g, out


@dataclass(frozen=True, eq=False)
class GWSFields:
    lattice: Lattice
    couplings: Couplings
    Wp: np.ndarray
    Wm: np.ndarray
    Z: np.ndarray
    Agamma: np.ndarray
    eta: np.ndarray
    Dp: np.ndarray
    Dm: np.ndarray
    DZ: np.ndarray
    Dgamma: np.ndarray
    Pi1: np.ndarray
    Pi2: np.ndarray
    lapse: np.ndarray

    def __post_init__(self):
        if np.any(np.asarray(self.eta) <= 0):
            raise ValidationError("eta must be positive")

    @property
    def Pi_eta(self) -> np.ndarray:
        return self.couplings.nu_h / np.sqrt(2) * np.real(self.Pi2)

    def on_singular_stratum(self, tol: float = TOL_STRATUM) -> bool:
        return all(np.max(np.abs(x), initial=0.0) < tol for x in (self.Wp, self.Dp, self.Pi1))


def _mix(c: Couplings):
    s = np.hypot(c.g, c.gp)
    return s, c.g / s, c.gp / s, (c.g**2 - c.gp**2) / s


def to_gws(st: YMHState, tol: float = TOL_PHI) -> GWSFields:
    c = st.couplings
    if np.max(np.abs(st.phi[:, 0])) > tol:
        raise ValidationError("state is not in unitary gauge")
    eta = np.real(st.phi[:, 1]) * np.sqrt(2) / c.nu_h
    if np.max(np.abs(np.imag(st.phi[:, 1]))) > tol or np.any(eta <= 0):
        raise ValidationError("unitary gauge requires phi_2 = eta nu / sqrt 2 with eta > 0")
    s, _, _, k = _mix(c)
    e = c.e
    a, cm, cp = to_kp(st.A)
    Z = 2 * cm / s
    Ag = (cp - 0.5 * k * Z) / e
    aE, cmE, cpE = to_kp(st.E)
    Dg = 2 * e * cpE
    DZ = (c.g * c.gp / e) * (cmE + k * Dg / (2 * c.g * c.gp))
    Wp = a / c.g
    Dm = c.g * aE
    return GWSFields(
        st.lattice, c, Wp, np.conj(Wp), Z, Ag, eta, np.conj(Dm), Dm, DZ, Dg,
        st.pi[:, 0].copy(), st.pi[:, 1].copy(), st.lapse.copy(),
    )


def from_gws(f: GWSFields) -> YMHState:
    c = f.couplings
    s, _, _, k = _mix(c)
    e = c.e
    A = from_kp(c.g * f.Wp, 0.5 * s * f.Z, e * f.Agamma + 0.5 * k * f.Z)
    E = from_kp(f.Dm / c.g, e / (c.g * c.gp) * f.DZ - k / (2 * c.g * c.gp) * f.Dgamma, f.Dgamma / (2 * e))
    N = f.lattice.n_sites
    phi = np.zeros((N, 2), dtype=complex)
    phi[:, 1] = f.eta * c.nu_h / np.sqrt(2)
    pi = np.stack([f.Pi1, f.Pi2], axis=1)
    return YMHState(f.lattice, A, E, phi, pi, c, f.lapse)


def darboux_pairing(f: GWSFields, dWp, dZ, dAg, deta) -> float:
    """Canonical one-form in the new variables evaluated on a configuration variation."""
    lat = f.lattice
    w0, w1 = lat.weight(0), lat.weight(1)
    return float(
        w1 * np.sum(2 * np.real(f.Dp * dWp) + f.DZ * dZ + f.Dgamma * dAg)
        + w0 * np.sum(f.Pi_eta * deta)
    )


# Gauss constraint in components ------------------------------------------------


@dataclass(frozen=True)
class GaussResiduals:
    r_minus: np.ndarray
    r_plus: np.ndarray
    r_Z: np.ndarray
    r_gamma: np.ndarray


def _ops(lat: Lattice):
    N = lat.n_sites
    h2 = lat.h**-2

    def dd(x):
        return h2 * (lat.D2 @ x)

    def w12(a, b):
        t = (lat.C13 @ a) * (lat.C23 @ b)
        return h2 * (t[:N] + t[N : 2 * N] + t[2 * N :])

    return dd, w12


def gauss_gws_residual(f: GWSFields) -> GaussResiduals:
    """The four component Gauss equations as star^-1 0-cochains (LHS - RHS)."""
    c = f.couplings
    lat = f.lattice
    s, cos, sin, _ = _mix(c)
    g, e, nu = c.g, c.e, c.nu_h
    dd, w12 = _ops(lat)
    etabar = lat.P03 @ f.eta
    mix_a = sin * f.Agamma + cos * f.Z
    mix_d = sin * f.Dgamma + cos * f.DZ
    r_minus = (
        dd(f.Dm) + 1j * g * w12(mix_a, f.Dm) - 1j * g * w12(f.Wp, mix_d)
        - 0.25j * etabar * nu * g * f.Pi1
    )
    r_plus = (
        dd(f.Dp) - 1j * g * w12(mix_a, f.Dp) + 1j * g * w12(f.Wm, mix_d)
        + 0.25j * etabar * nu * g * np.conj(f.Pi1)
    )
    X = w12(f.Wp, f.Dp) - w12(f.Wm, f.Dm)
    r_Z = dd(f.DZ) + np.real(1j * g * cos * X) - etabar * nu * s * np.imag(f.Pi2) / (2 * np.sqrt(2))
    r_gamma = dd(f.Dgamma) + np.real(1j * e * X)
    return GaussResiduals(r_minus, r_plus, r_Z, r_gamma)


def reassemble(r: GaussResiduals, c: Couplings) -> np.ndarray:
    """Combine component residuals back into su(2) + u(1) coefficients."""
    _, _, _, k = _mix(c)
    gg = c.g * c.gp
    return from_kp(r.r_minus / c.g, c.e / gg * r.r_Z - k / (2 * gg) * r.r_gamma, r.r_gamma / (2 * c.e))


# singular stratum ------------------------------------------------------------------


def hamiltonian_singular(f: GWSFields, tol: float = TOL_STRATUM) -> float:
    """Hamiltonian restricted to W = D_pm = Pi1 = 0 in the broken variables.

    The potential term is lambda nu^4 (eta^2 - 1)^2 / 4 per unit volume, the
    value of V on phi = (0, eta nu / sqrt 2).
    """
    if not f.on_singular_stratum(tol):
        raise ValidationError("state is not on the singular stratum")
    c = f.couplings
    lat = f.lattice
    s = np.hypot(c.g, c.gp)
    nu = c.nu_h
    w0, w1, w2 = lat.weight(0), lat.weight(1), lat.weight(2)
    le = lat.P01 @ f.lapse
    lf = lat.P02 @ f.lapse
    eta_e = lat.P01 @ f.eta
    deta = lat.D0 @ f.eta
    dZ = lat.D1 @ f.Z
    dA = lat.D1 @ f.Agamma
    return float(
        0.5 * w1 * np.sum(le * (f.DZ**2 + f.Dgamma**2))
        + 0.5 * w2 * np.sum(lf * (dA**2 + dZ**2))
        + 0.5 * w0 * np.sum(f.lapse * np.abs(f.Pi2) ** 2)
        + 0.5 * w1 * np.sum(le * (0.5 * nu**2 * deta**2 + eta_e**2 * nu**2 * s**2 * f.Z**2 / 8))
        + 0.5 * w0 * np.sum(f.lapse * c.lambda_h * nu**4 * (f.eta**2 - 1) ** 2 / 2)
    )


def masses(c: Couplings, eta0: float = 1.0) -> tuple[float, float]:
    """Closed forms (m_Z^2, m_eta^2) = (eta^2 nu^2 (g^2 + g'^2)/4, -4 lambda nu^2).

    :func:`mass_crosscheck` measures the corresponding curvatures directly.
    """
    mz = eta0**2 * c.nu_h**2 * (c.g**2 + c.gp**2) / 4
    meta = -4 * c.lambda_h * c.nu_h**2
    return float(mz), float(meta)


def mass_crosscheck(c: Couplings, eta0: float = 1.0, step: float = 1e-4) -> dict[str, float]:
    """Curvatures measured from the singular Hamiltonian on a 1x1x1 lattice.

    ``omega_Z_sq`` and ``omega_eta_sq`` are the squared frequencies of the
    linearised Z and eta oscillations (spatially constant modes).
    ``quartic_bracket_curvature`` is the second eta-derivative of
    lambda nu^2 (eta^2 - 1)^2 at eta0.
    """
    lat = Lattice((1, 1, 1), 1.0)
    z1 = np.zeros(1)
    zc = np.zeros(1, dtype=complex)

    def H(Z=0.0, eta=eta0):
        f = GWSFields(
            lat, c, zc, zc, np.full(3, Z), np.zeros(3), np.array([eta]), np.zeros(3, complex),
            np.zeros(3, complex), np.zeros(3), np.zeros(3), zc, zc, np.ones(1),
        )
        return hamiltonian_singular(f)

    # Z: H = sum_e 1/2 D_Z^2 + 1/2 k_Z Z^2 per edge, unit mass
    kz = (H(Z=step) - 2 * H() + H(Z=-step)) / step**2 / 3
    # eta: H = (1/nu^2) Pi_eta^2 + V(eta), i.e. mass nu^2/2
    keta = (H(eta=eta0 + step) - 2 * H() + H(eta=eta0 - step)) / step**2
    omega_eta = keta / (0.5 * c.nu_h**2)

    def quartic(eta):
        return c.lambda_h * c.nu_h**2 * (eta**2 - 1) ** 2

    pc = (quartic(eta0 + step) - 2 * quartic(eta0) + quartic(eta0 - step)) / step**2
    return {"omega_Z_sq": float(kz), "omega_eta_sq": float(omega_eta), "quartic_bracket_curvature": float(pc)}
