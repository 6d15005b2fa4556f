"""Seeded initial conditions, all in unitary gauge.

* ``vacuum``: A = E = pi = 0, phi = (0, nu/sqrt 2).
* ``singular-stratum``: A, E along t_3 and i only, Pi1 = 0; Gauss-solved.
* ``seam``: A along t_3 and i only, E and pi generic; Gauss-solved.  The
  configuration has orbit type K while the phase point has type Z2.
* ``generic``: all fields random; Gauss-solved.
* ``homogeneous-random``: 1x1x1 lattice, random fields, half of the draws
  restricted to the K-invariant subspace.  Not Gauss-solved.

Constraint solving uses :func:`~artifact.ymh.gauss.solve_gauss_dense` after
removing the conserved-charge components that E cannot absorb (the
t_3 and i charges carried by Im Pi2).
"""

from __future__ import annotations

import numpy as np

from ..lattice import Lattice
from ..liealg import Couplings, ValidationError
from .core import YMHState
from .gauss import solve_gauss_dense

PRESETS = ("vacuum", "singular-stratum", "seam", "generic", "homogeneous-random")


def _unitary_phi(rng, N, c: Couplings, spread: float) -> np.ndarray:
    eta = 1 + spread * rng.uniform(-1, 1, size=N)
    phi = np.zeros((N, 2), dtype=complex)
    phi[:, 1] = eta * c.nu_h / np.sqrt(2)
    return phi


def _cplx(rng, shape, amp):
    return amp * (rng.normal(size=shape) + 1j * rng.normal(size=shape))


def _neutralise(phi: np.ndarray, pi: np.ndarray) -> np.ndarray:
    """Remove the component of Im pi_2 along phi_2, which carries the t_3 and i charges."""
    pi = pi.copy()
    p2 = np.real(phi[:, 1])
    im = np.imag(pi[:, 1])
    im = im - p2 * (p2 @ im) / (p2 @ p2)
    pi[:, 1] = np.real(pi[:, 1]) + 1j * im
    return pi


def _abelian(x: np.ndarray) -> np.ndarray:
    x = x.copy()
    x[:, :2] = 0.0
    return x


def make_preset(
    name: str,
    lat: Lattice,
    c: Couplings | None = None,
    seed: int = 0,
    amp_A: float = 0.1,
    amp_E: float = 0.5,
    amp_pi: float = 0.3,
    eta_spread: float = 0.2,
    lapse=None,
) -> YMHState:
    c = c or Couplings()
    rng = np.random.default_rng(seed)
    N = lat.n_sites
    if name == "vacuum":
        return YMHState.vacuum(lat, c, lapse)
    if name == "homogeneous-random":
        lat = Lattice((1, 1, 1), lat.h)
        k_type = rng.random() < 0.5
        A = rng.normal(size=(3, 4)) * amp_A * 5
        E = rng.normal(size=(3, 4)) * amp_E
        pi = _cplx(rng, (1, 2), amp_pi)
        if k_type:
            A, E = _abelian(A), _abelian(E)
            pi[:, 0] = 0
        return YMHState(lat, A, E, _unitary_phi(rng, 1, c, eta_spread), pi, c)
    if name not in PRESETS:
        raise ValidationError(f"unknown preset {name!r}")
    phi = _unitary_phi(rng, N, c, eta_spread)
    A = rng.normal(size=(3 * N, 4)) * amp_A
    E = rng.normal(size=(3 * N, 4)) * amp_E
    pi = _cplx(rng, (N, 2), amp_pi)
    if name == "singular-stratum":
        A, E = _abelian(A), _abelian(E)
        pi[:, 0] = 0
    elif name == "seam":
        A = _abelian(A)
    pi = _neutralise(phi, pi)
    s = solve_gauss_dense(YMHState(lat, A, E, phi, pi, c, lapse))
    if name == "singular-stratum":
        # the solve keeps E in the abelian block; clear roundoff in the t1, t2 slots
        s = s.with_fields(E=_abelian(s.E))
    return s
