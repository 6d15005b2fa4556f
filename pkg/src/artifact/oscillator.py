"""The two-dimensional isotropic harmonic oscillator under the U(1) rotation.

Zero angular momentum reduces the phase space to the upper cone
H^2 = E_+^2 + E_-^2.  The cone carries two charts: the image of the quadratic
map ``kmap`` and the cotangent half-line T*R_{>0} through ``psi``/``imap``.
The line L = {H = E_+} is the singular seam where the half-line chart breaks
down, and the flow there is continued through the cone rotation.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .liealg import ValidationError

TOL_SEAM = 1e-9
TOL_BLOWUP = 1e-8
FD_STEP = 1e-5


@dataclass(frozen=True)
class PhasePoint2D:
    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        p = np.asarray(self.p, dtype=float)
        if q.shape[-1:] != (2,) or p.shape[-1:] != (2,):
            raise ValidationError("q and p must be 2-vectors")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
            raise ValidationError("phase point must be finite")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def flat(self) -> np.ndarray:
        return np.concatenate([self.q, self.p], axis=-1)

    @classmethod
    def from_flat(cls, x) -> "PhasePoint2D":
        x = np.asarray(x, dtype=float)
        return cls(x[..., :2], x[..., 2:])


@dataclass(frozen=True)
class ConePoint:
    e_plus: float | np.ndarray
    e_minus: float | np.ndarray
    h: float | np.ndarray

    def as_array(self) -> np.ndarray:
        return np.stack(np.broadcast_arrays(self.e_plus, self.e_minus, self.h), axis=-1)


@dataclass(frozen=True)
class CotangentHalfLine:
    qbar: float | np.ndarray
    pbar: float | np.ndarray

    def __post_init__(self):
        if np.any(np.asarray(self.qbar) <= 0):
            raise ValidationError("qbar must be positive")


class SeamLabel2D(Enum):
    ORIGIN_U1_U1 = "ORIGIN_U1_U1"
    SEAM_E_U1 = "SEAM_E_U1"
    GENERIC_E_E = "GENERIC_E_E"


BLOWUP = "BLOWUP"


def angular_momentum(x: PhasePoint2D):
    q, p = x.q, x.p
    return q[..., 0] * p[..., 1] - q[..., 1] * p[..., 0]


def kmap(x: PhasePoint2D) -> ConePoint:
    q2 = np.sum(x.q**2, axis=-1)
    p2 = np.sum(x.p**2, axis=-1)
    return ConePoint(0.5 * p2 - 0.5 * q2, np.sum(x.q * x.p, axis=-1), 0.5 * p2 + 0.5 * q2)


def cone_residual(x: PhasePoint2D):
    """H^2 - J^2 - E_+^2 - E_-^2, zero identically."""
    c = kmap(x)
    j = angular_momentum(x)
    return c.h**2 - j**2 - c.e_plus**2 - c.e_minus**2


def seam_label(x: PhasePoint2D, tol: float = TOL_SEAM) -> SeamLabel2D:
    if abs(float(angular_momentum(x))) >= tol:
        raise ValidationError("seam labels are defined on J = 0 only")
    nq = float(np.linalg.norm(x.q))
    npp = float(np.linalg.norm(x.p))
    if nq < tol and npp < tol:
        return SeamLabel2D.ORIGIN_U1_U1
    if nq < tol:
        return SeamLabel2D.SEAM_E_U1
    return SeamLabel2D.GENERIC_E_E


def psi(x: PhasePoint2D) -> CotangentHalfLine:
    q2 = np.sum(x.q**2, axis=-1)
    if np.any(q2 == 0):
        raise ValidationError("psi is undefined at q = 0")
    return CotangentHalfLine(0.5 * q2, np.sum(x.q * x.p, axis=-1) / q2)


def imap(y: CotangentHalfLine) -> ConePoint:
    qb = np.asarray(y.qbar, dtype=float)
    pb = np.asarray(y.pbar, dtype=float)
    if np.any(qb <= 0):
        raise ValidationError("qbar must be positive")
    return ConePoint(qb * (pb**2 - 1), 2 * qb * pb, qb * (pb**2 + 1))


def canonical_bracket(
    f: Callable[[PhasePoint2D], float],
    g: Callable[[PhasePoint2D], float],
    x: PhasePoint2D,
    step: float = FD_STEP,
) -> float:
    """Poisson bracket of two observables by central differences.

    The sign is the one induced by omega = sum dp ^ dq through
    {f, g} = omega(X_f, X_g), i.e.
    {f, g} = sum_i (df/dp_i dg/dq_i - df/dq_i dg/dp_i).
    With it the components of ``kmap`` satisfy {H, E_pm} = -+2 E_-+ and
    {E_+, E_-} = 2H.
    """
    y = x.flat.astype(float)

    def grad(fun):
        out = np.empty(4)
        for i in range(4):
            e = np.zeros(4)
            e[i] = step
            out[i] = (fun(PhasePoint2D.from_flat(y + e)) - fun(PhasePoint2D.from_flat(y - e))) / (
                2 * step
            )
        return out

    df = grad(f)
    dg = grad(g)
    return float(df[2:] @ dg[:2] - df[:2] @ dg[2:])


def lie_poisson(c: ConePoint) -> dict[tuple[str, str], float]:
    """Structure values {H, E_+}, {H, E_-}, {E_+, E_-} on the cone."""
    return {
        ("H", "E+"): -2 * c.e_minus,
        ("H", "E-"): 2 * c.e_plus,
        ("E+", "E-"): 2 * c.h,
    }


def cone_flow(t, c: ConePoint) -> ConePoint:
    """Flow of X_H = -2 E_- d/dE_+ + 2 E_+ d/dE_-: rotation by 2t."""
    cs, sn = np.cos(2 * t), np.sin(2 * t)
    return ConePoint(cs * c.e_plus - sn * c.e_minus, sn * c.e_plus + cs * c.e_minus, c.h)


def critical_times(t0: float, t_min: float, t_max: float) -> np.ndarray:
    """Times pi/2 + k pi - t0 inside [t_min, t_max]."""
    k0 = np.ceil((t_min + t0 - np.pi / 2) / np.pi)
    k1 = np.floor((t_max + t0 - np.pi / 2) / np.pi)
    return np.pi / 2 + np.arange(k0, k1 + 1) * np.pi - t0


def cotangent_flow(t, hbar0: float, t0: float, tol_c: float = TOL_BLOWUP):
    """Closed-form flow on T*R_{>0}; returns BLOWUP at the critical times."""
    if hbar0 <= 0:
        raise ValidationError("hbar0 must be positive")
    c = np.cos(t + t0)
    if abs(c) < tol_c:
        return BLOWUP
    return CotangentHalfLine(hbar0 * c**2, -np.tan(t + t0))


def cotangent_flow_batch(ts, hbar0: float, t0: float, tol_c: float = TOL_BLOWUP):
    """Vectorised flow: (qbar, pbar, blowup mask) with NaN at blowups."""
    if hbar0 <= 0:
        raise ValidationError("hbar0 must be positive")
    ts = np.asarray(ts, dtype=float)
    c = np.cos(ts + t0)
    blow = np.abs(c) < tol_c
    with np.errstate(divide="ignore", invalid="ignore"):
        qb = np.where(blow, np.nan, hbar0 * c**2)
        pb = np.where(blow, np.nan, -np.tan(ts + t0))
    return qb, pb, blow


def initial_cone_point(hbar0: float, t0: float) -> ConePoint:
    """Cone point of the cotangent flow at t = 0 continued through the seam."""
    return ConePoint(-hbar0 * np.cos(2 * t0), -hbar0 * np.sin(2 * t0), hbar0)


def stitch_gap(hbar0: float, t0: float, k: int, eps: float) -> float:
    """Largest cone distance between the half-line chart at t_c +- eps and the cone flow at t_c."""
    tc = np.pi / 2 + k * np.pi - t0
    ref = cone_flow(tc, initial_cone_point(hbar0, t0)).as_array()
    gaps = []
    for t in (tc - eps, tc + eps):
        y = cotangent_flow(t, hbar0, t0)
        gaps.append(np.linalg.norm(imap(y).as_array() - ref))
    return float(max(gaps))
