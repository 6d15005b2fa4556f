"""Lattice Yang-Mills-Higgs fields, Hamiltonian, equations of motion and momentum map.

Fields live on a :class:`~artifact.lattice.Lattice`:

* ``A``, ``E``: 1-cochains of su(2) + u(1) coefficients, shape (3N, 4).  ``E``
  is the primal representative of the electric 2-form, D = star E.
* ``phi``, ``pi``: 0-cochains of complex pairs, shape (N, 2); Pi = star pi.
* ``lapse``: positive 0-cochain, averaged to edges and faces where needed.

The canonical pairs are (A, E) and (phi, pi) with pairings
<E, dA> = sum_e h E.dA and <pi, dphi> = sum_x h^3 Re(pi^* dphi), and the
symplectic form Omega = dA ^ dE + dphi ^ dpi, so that
dA/dt = dH/dE and dE/dt = -dH/dA.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..lattice import Cochain, Lattice
from ..liealg import (
    Couplings,
    ValidationError,
    bracket,
    fiber_momentum,
    higgs_potential,
    rep_alg,
)


@dataclass(frozen=True, eq=False)
class YMHState:
    lattice: Lattice
    A: np.ndarray
    E: np.ndarray
    phi: np.ndarray
    pi: np.ndarray
    couplings: Couplings = field(default_factory=Couplings)
    lapse: np.ndarray | None = None

    def __post_init__(self):
        lat = self.lattice
        N = lat.n_sites
        A = np.array(self.A, dtype=float).reshape(3 * N, 4)
        E = np.array(self.E, dtype=float).reshape(3 * N, 4)
        phi = np.array(self.phi, dtype=complex).reshape(N, 2)
        pi = np.array(self.pi, dtype=complex).reshape(N, 2)
        lapse = np.ones(N) if self.lapse is None else np.array(self.lapse, dtype=float).reshape(N)
        if np.any(lapse <= 0):
            raise ValidationError("lapse must be positive")
        for name, v in (("A", A), ("E", E), ("phi", phi), ("pi", pi), ("lapse", lapse)):
            if not np.all(np.isfinite(v)):
                raise ValidationError(f"{name} must be finite")
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    @classmethod
    def vacuum(cls, lat: Lattice, c: Couplings | None = None, lapse=None) -> "YMHState":
        c = c or Couplings()
        N = lat.n_sites
        phi = np.zeros((N, 2), dtype=complex)
        phi[:, 1] = c.nu_h / np.sqrt(2)
        return cls(lat, np.zeros((3 * N, 4)), np.zeros((3 * N, 4)), phi, np.zeros((N, 2)), c, lapse)

    def with_fields(self, **kw) -> "YMHState":
        return replace(self, **kw)

    @property
    def lapse_edges(self) -> np.ndarray:
        return self.lattice.P01 @ self.lapse

    @property
    def lapse_faces(self) -> np.ndarray:
        return self.lattice.P02 @ self.lapse

    def cochains(self) -> dict[str, Cochain]:
        lat = self.lattice
        return {
            "A": Cochain(lat, 1, self.A, "lie"),
            "E": Cochain(lat, 1, self.E, "lie"),
            "phi": Cochain(lat, 0, self.phi, "pair"),
            "pi": Cochain(lat, 0, self.pi, "pair"),
        }


@dataclass(frozen=True)
class GaugeAlgebraField:
    xi: np.ndarray  # (N, 4)


@dataclass
class Tangent:
    """Tangent vector (dA, dE, dphi, dpi) at a state."""

    A: np.ndarray
    E: np.ndarray
    phi: np.ndarray
    pi: np.ndarray

    def __add__(self, o: "Tangent") -> "Tangent":
        return Tangent(self.A + o.A, self.E + o.E, self.phi + o.phi, self.pi + o.pi)

    def __sub__(self, o: "Tangent") -> "Tangent":
        return Tangent(self.A - o.A, self.E - o.E, self.phi - o.phi, self.pi - o.pi)

    def __mul__(self, s) -> "Tangent":
        return Tangent(self.A * s, self.E * s, self.phi * s, self.pi * s)

    __rmul__ = __mul__

    def __neg__(self) -> "Tangent":
        return self * -1.0

    def max_abs(self) -> float:
        return float(max(np.max(np.abs(x)) if x.size else 0.0 for x in (self.A, self.E, self.phi, self.pi)))

    @classmethod
    def random(cls, lat: Lattice, rng: np.random.Generator) -> "Tangent":
        N = lat.n_sites
        return cls(
            rng.normal(size=(3 * N, 4)),
            rng.normal(size=(3 * N, 4)),
            rng.normal(size=(N, 2)) + 1j * rng.normal(size=(N, 2)),
            rng.normal(size=(N, 2)) + 1j * rng.normal(size=(N, 2)),
        )


def displace(s: YMHState, v: Tangent, t: float = 1.0) -> YMHState:
    return s.with_fields(A=s.A + t * v.A, E=s.E + t * v.E, phi=s.phi + t * v.phi, pi=s.pi + t * v.pi)


# covariant operators ---------------------------------------------------------


def covariant_phi(s: YMHState) -> np.ndarray:
    """d_A phi on edges: D0 phi + rho(A_e) applied to the endpoint average of phi."""
    lat = s.lattice
    return lat.D0 @ s.phi + rep_alg(s.A, lat.P01 @ s.phi)


def curvature(s: YMHState) -> np.ndarray:
    """F_A = dA + 1/2 [A ^ A] with face-averaged edge values."""
    lat = s.lattice
    return lat.D1 @ s.A + bracket(lat.S_first @ s.A, lat.S_second @ s.A)


def covariant_d0(s: YMHState, xi: np.ndarray) -> np.ndarray:
    """d_A xi = D0 xi + [A, avg xi] for a Lie-algebra valued 0-cochain."""
    lat = s.lattice
    return lat.D0 @ xi + bracket(s.A, lat.P01 @ xi)


# Hamiltonian and its gradient --------------------------------------------------


def energy_terms(s: YMHState) -> dict[str, float]:
    lat, c = s.lattice, s.couplings
    w0, w1, w2 = lat.weight(0), lat.weight(1), lat.weight(2)
    le, lf = s.lapse_edges, s.lapse_faces
    F = curvature(s)
    Dphi = covariant_phi(s)
    return {
        "electric": 0.5 * w1 * float(np.sum(le * np.sum(c.kappa_inv * s.E**2, axis=1))),
        "magnetic": 0.5 * w2 * float(np.sum(lf * np.sum(c.kappa * F**2, axis=1))),
        "higgs_momentum": 0.5 * w0 * float(np.sum(s.lapse * np.sum(np.abs(s.pi) ** 2, axis=1))),
        "higgs_gradient": 0.5 * w1 * float(np.sum(le * np.sum(np.abs(Dphi) ** 2, axis=1))),
        "potential": w0 * float(np.sum(s.lapse * higgs_potential(s.phi, c))),
    }


def hamiltonian(s: YMHState) -> float:
    return float(sum(energy_terms(s).values()))


def potential_gradient(s: YMHState) -> tuple[np.ndarray, np.ndarray]:
    """Gradients of the A- and phi-dependent part U of the Hamiltonian.

    The phi gradient is complex with dU = Re(conj(g) . dphi).
    """
    lat, c = s.lattice, s.couplings
    w0, w1, w2 = lat.weight(0), lat.weight(1), lat.weight(2)
    le, lf = s.lapse_edges, s.lapse_faces
    SjA = lat.S_first @ s.A
    SlA = lat.S_second @ s.A
    F = lat.D1 @ s.A + bracket(SjA, SlA)
    G = w2 * lf[:, None] * c.kappa * F
    gA = lat.D1.T @ G + lat.S_first.T @ bracket(SlA, G) + lat.S_second.T @ bracket(G, SjA)
    phibar = lat.P01 @ s.phi
    Dphi = lat.D0 @ s.phi + rep_alg(s.A, phibar)
    Y = w1 * le[:, None] * Dphi
    gA = gA + fiber_momentum(phibar, Y)
    r2 = np.sum(np.abs(s.phi) ** 2, axis=1)
    gphi = lat.D0.T @ Y - lat.P01.T @ rep_alg(s.A, Y)
    gphi = gphi + (w0 * s.lapse * 4 * c.lambda_h * (r2 - 0.5 * c.nu_h**2))[:, None] * s.phi
    return gA, gphi


def eom_rhs(s: YMHState) -> Tangent:
    """Symplectic gradient of :func:`hamiltonian`."""
    lat, c = s.lattice, s.couplings
    gA, gphi = potential_gradient(s)
    return Tangent(
        s.lapse_edges[:, None] * c.kappa_inv * s.E,
        -gA / lat.weight(1),
        s.lapse[:, None] * s.pi,
        -gphi / lat.weight(0),
    )


# gauge action and momentum map -------------------------------------------------


def inf_gauge_action(xi, s: YMHState) -> Tangent:
    """Infinitesimal gauge transformation generated by xi (N, 4).

    dA = -d_A xi, dE = [avg xi, E], dphi = rho(xi) phi, dpi = rho(xi) pi.
    The E and pi components are the cotangent lift of the (A, phi) part.
    """
    if isinstance(xi, GaugeAlgebraField):
        xi = xi.xi
    xi = np.asarray(xi, dtype=float)
    lat = s.lattice
    xbar = lat.P01 @ xi
    return Tangent(
        -(lat.D0 @ xi) - bracket(s.A, xbar),
        bracket(xbar, s.E),
        rep_alg(xi, s.phi),
        rep_alg(xi, s.pi),
    )


def momentum_map(s: YMHState) -> np.ndarray:
    """Exact adjoint of the gauge action: <J, xi>_0 = <E, dA_xi>_1 + <pi, dphi_xi>_0."""
    lat = s.lattice
    r = lat.weight(1) / lat.weight(0)
    return r * (-(lat.D0.T @ s.E) - lat.P01.T @ bracket(s.E, s.A)) + fiber_momentum(s.phi, s.pi)


def momentum_map_formula(s: YMHState) -> np.ndarray:
    """Second implementation star^-1 (d_A D + phi <> Pi) with D = star E, Pi = star pi.

    Uses the discrete coboundary and the cup-style wedge; it differs from
    :func:`momentum_map` by a discretisation error except on 1x1x1 lattices.
    """
    lat = s.lattice
    N = lat.n_sites
    h2 = lat.h**-2
    dD = h2 * (lat.D2 @ s.E)
    AD = bracket(lat.C13 @ s.A, lat.C23 @ s.E)
    AD = h2 * (AD[:N] + AD[N : 2 * N] + AD[2 * N :])
    return dD + AD + fiber_momentum(lat.P03 @ s.phi, s.pi)


def total_charge(s: YMHState) -> np.ndarray:
    """Volume average of the momentum map, summed directly from fields."""
    lat = s.lattice
    N = lat.n_sites
    return (
        np.sum(fiber_momentum(s.phi, s.pi), axis=0) / N
        + lat.h**-2 * np.sum(bracket(s.A, s.E), axis=0) / N
    )


def gauge_matrix(s: YMHState) -> np.ndarray:
    """Dense matrix of xi -> dA_xi = -d_A xi, flattened (3N*4, N*4)."""
    lat = s.lattice
    N = lat.n_sites
    I4 = np.eye(4)
    M = -np.kron(lat.D0.toarray(), I4)
    # -[A, X] = A x X on the su(2) part
    blocks = np.zeros((3 * N, 4, 4))
    a = s.A
    blocks[:, 0, 1], blocks[:, 0, 2] = -a[:, 2], a[:, 1]
    blocks[:, 1, 0], blocks[:, 1, 2] = a[:, 2], -a[:, 0]
    blocks[:, 2, 0], blocks[:, 2, 1] = -a[:, 1], a[:, 0]
    P = np.kron(lat.P01.toarray(), I4)
    B = np.zeros((3 * N * 4, 3 * N * 4))
    for e in range(3 * N):
        B[4 * e : 4 * e + 4, 4 * e : 4 * e + 4] = blocks[e]
    return M + B @ P


# symplectic structure -------------------------------------------------------------


def tangent_inner(s: YMHState, v: Tangent, w: Tangent) -> float:
    """L2 inner product with the unit pairing on su(2) + u(1)."""
    lat = s.lattice
    w0, w1 = lat.weight(0), lat.weight(1)
    return float(
        w1 * (np.sum(v.A * w.A) + np.sum(v.E * w.E))
        + w0 * np.sum(np.real(np.conj(v.phi) * w.phi) + np.real(np.conj(v.pi) * w.pi))
    )


def symplectic_form(s: YMHState, v: Tangent, w: Tangent) -> float:
    """Omega(v, w) = <A_v, E_w> - <A_w, E_v> + <phi_v, pi_w> - <phi_w, pi_v>."""
    lat = s.lattice
    w0, w1 = lat.weight(0), lat.weight(1)
    return float(
        w1 * (np.sum(v.A * w.E) - np.sum(w.A * v.E))
        + w0 * (np.sum(np.real(np.conj(v.phi) * w.pi)) - np.sum(np.real(np.conj(w.phi) * v.pi)))
    )


def almost_complex_j(v: Tangent) -> Tangent:
    """j(dA, dE, dphi, dpi) = (-dE, dA, -dpi, dphi), the star-free form of j on (A, D, phi, Pi)."""
    return Tangent(-v.E, v.A.copy(), -v.pi, v.phi.copy())


# time stepping ---------------------------------------------------------------------


def _kick(s: YMHState, tau: float) -> YMHState:
    lat = s.lattice
    gA, gphi = potential_gradient(s)
    return s.with_fields(E=s.E - tau * gA / lat.weight(1), pi=s.pi - tau * gphi / lat.weight(0))


def _drift(s: YMHState, tau: float) -> YMHState:
    c = s.couplings
    return s.with_fields(
        A=s.A + tau * s.lapse_edges[:, None] * c.kappa_inv * s.E,
        phi=s.phi + tau * s.lapse[:, None] * s.pi,
    )


def step_leapfrog(s: YMHState, dt: float) -> YMHState:
    """Kick-drift-kick splitting with the exact flows of the two sub-Hamiltonians."""
    if not dt > 0:
        raise ValidationError("dt must be positive")
    return _kick(_drift(_kick(s, 0.5 * dt), dt), 0.5 * dt)


def evolve(s: YMHState, dt: float, steps: int, every: int = 0, observe=None):
    """Run ``steps`` leapfrog steps; calls ``observe(n, state)`` every ``every`` steps.

    Adjacent half kicks are merged, which is algebraically identical to
    repeated :func:`step_leapfrog` calls.
    """
    if not dt > 0:
        raise ValidationError("dt must be positive")
    if observe is not None:
        observe(0, s)
    if steps == 0:
        return s
    s = _kick(s, 0.5 * dt)
    for n in range(1, steps + 1):
        s = _drift(s, dt)
        if n == steps or (observe is not None and every and n % every == 0):
            s = _kick(s, 0.5 * dt)
            if observe is not None and every and n % every == 0:
                observe(n, s)
            if n < steps:
                s = _kick(s, 0.5 * dt)
        else:
            s = _kick(s, dt)
    return s
