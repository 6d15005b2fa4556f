"""Gauss constraint: normal-form split at A0 = 0, dense constraint solve, Coulomb split."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..lattice import Cochain, NumericalError, codiff, d, project_harmonic, solve_poisson
from ..liealg import bracket
from .core import YMHState, covariant_d0, gauge_matrix, momentum_map

PICARD_TOL = 1e-10
PICARD_MAX = 100


@dataclass(frozen=True)
class GaussSplit:
    nu_m: np.ndarray  # (N, 4), zero mean
    stab_part: np.ndarray  # (4,)
    sigma: np.ndarray  # (N, 4)
    residual: float
    iterations: int
    trace: list = field(default_factory=list)
    corrected: YMHState | None = field(default=None, repr=False)


def _zero_mean(x: np.ndarray) -> np.ndarray:
    return x - x.mean(axis=0)


def faddeev_popov(s: YMHState, sigma: np.ndarray) -> np.ndarray:
    """Delta_A sigma, the decrease of J when E is shifted by d_A sigma."""
    lat = s.lattice
    r = lat.weight(1) / lat.weight(0)
    dE = covariant_d0(s, sigma)
    return r * (lat.D0.T @ dE + lat.P01.T @ bracket(dE, s.A))


def gauss_split(
    s: YMHState, tol: float = PICARD_TOL, max_iter: int = PICARD_MAX, cg_tol: float = 1e-13
) -> GaussSplit:
    """Split J into its constant (stabilizer) part and zero-mean part, and solve the linear part.

    With E' = E + d_A sigma the zero-mean part of J(E') is
    nu_m - P0 Delta_A sigma, where Delta_A reduces to the scalar Laplacian at
    A = 0.  Picard iteration: Delta_0 sigma_{n+1} = nu_m - P0 (Delta_A - Delta_0) sigma_n.
    """
    lat = s.lattice
    J = momentum_map(s)
    stab = J.mean(axis=0)
    nu_m = J - stab
    sigma = np.zeros_like(J)
    trace: list[float] = []
    if np.max(np.abs(nu_m)) == 0:
        return GaussSplit(nu_m, stab, sigma, 0.0, 0, trace, s)

    def residual_of(sig):
        s2 = s.with_fields(E=s.E + covariant_d0(s, sig))
        return _zero_mean(momentum_map(s2)), s2

    lap0 = lat.laplacian(0)
    for it in range(1, max_iter + 1):
        corr = _zero_mean(faddeev_popov(s, sigma) - lap0 @ sigma)
        rhs = Cochain(lat, 0, nu_m - corr, "lie")
        sigma = solve_poisson(rhs, tol=cg_tol).values.copy()
        res_field, s2 = residual_of(sigma)
        res = float(np.max(np.abs(res_field)))
        trace.append(res)
        if res < tol:
            return GaussSplit(nu_m, stab, sigma, res, it, trace, s2)
        if it > 3 and trace[-1] > trace[-4]:
            break
    raise NumericalError(f"Picard iteration did not converge (last residual {trace[-1]:.3e})", trace)


def solve_gauss_dense(s: YMHState, tol: float = 1e-10) -> YMHState:
    """Minimum-norm correction E -> E + M_A sigma with J = 0 (dense least squares).

    The constant-stabilizer part of J must already vanish; otherwise a
    NumericalError is raised.
    """
    lat = s.lattice
    r = lat.weight(1) / lat.weight(0)
    M = gauge_matrix(s)
    J = momentum_map(s).reshape(-1)
    L = r * M.T @ M
    sigma = -np.linalg.lstsq(L, J, rcond=1e-12)[0]
    E = s.E + (M @ sigma).reshape(s.E.shape)
    out = s.with_fields(E=E)
    res = float(np.max(np.abs(momentum_map(out))))
    if res > tol * max(1.0, float(np.max(np.abs(J)))):
        raise NumericalError(f"dense Gauss solve left residual {res:.3e}")
    return out


@dataclass(frozen=True)
class CoulombSplit:
    f: Cochain
    beta: Cochain
    harm: Cochain
    curvature: Cochain
    residual: float


def coulomb_split(Agamma: Cochain, tol: float = 1e-12) -> CoulombSplit:
    """A_gamma = d f + beta + harm with beta = codiff Delta^-1 dA_gamma."""
    f = solve_poisson(codiff(Agamma), tol=tol)
    F = d(Agamma)
    beta = codiff(solve_poisson(F, tol=tol))
    harm = Agamma - d(f) - beta
    res = (harm - project_harmonic(harm)).norm()
    return CoulombSplit(f, beta, harm, F, res)


@dataclass(frozen=True)
class ReducedU1Point:
    v: Cochain  # complex 1-cochain
    D_v: Cochain  # complex 1-cochain, primal representative of the 2-form


def k_momentum(r: ReducedU1Point) -> float:
    """Residual K charge: the integral of Im(D_v ^ v) with the diagonal star.

    With D = star D_v the wedge pairs a 1-cochain with its dual face, so the
    integral is sum_e h Im(conj(D_v) v).
    """
    lat = r.v.lattice
    return float(lat.weight(1) * np.sum(np.imag(np.conj(r.D_v.values) * r.v.values)))


def k_rotate(r: ReducedU1Point, theta: float) -> ReducedU1Point:
    ph = np.exp(1j * theta)
    return ReducedU1Point(r.v * ph, r.D_v * ph)
