"""Exact arithmetic for su(2) + u(1).

Elements are stored as real 4-vectors ``(c1, c2, c3, c0)`` of coefficients
along ``t_a = (i/2) sigma_a`` and the u(1) generator ``i``.  Every function
below accepts arrays of shape ``(..., 4)`` so the same code serves single
elements and whole lattice cochains.  Complex coefficient arrays are allowed
where a complexified basis element (``t``, ``t_bar``) is needed.

Pauli convention::

    sigma1 = [[0, 1], [1, 0]]
    sigma2 = [[0, -1j], [1j, 0]]
    sigma3 = [[1, 0], [0, -1]]

which gives ``[t1, t2] = -t3``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

SIGMA = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

T1 = np.array([1.0, 0.0, 0.0, 0.0])
T2 = np.array([0.0, 1.0, 0.0, 0.0])
T3 = np.array([0.0, 0.0, 1.0, 0.0])
I_U1 = np.array([0.0, 0.0, 0.0, 1.0])
BASIS = np.stack([T1, T2, T3, I_U1])

# complexified basis t = (t1 + i t2)/sqrt2, t_bar = (t1 - i t2)/sqrt2
T = (T1 + 1j * T2) / np.sqrt(2)
TBAR = (T1 - 1j * T2) / np.sqrt(2)
T_PLUS = T3 + I_U1
T_MINUS = T3 - I_U1


class ValidationError(ValueError):
    """Raised when an input violates a documented precondition."""


@dataclass(frozen=True)
class LieCoeffs:
    """Element of su(2) + u(1) in the basis {t1, t2, t3, i}."""

    c1: float
    c2: float
    c3: float
    c0: float

    def __post_init__(self):
        if not np.all(np.isfinite(self.array)):
            raise ValidationError("LieCoeffs must be finite")

    @property
    def array(self) -> np.ndarray:
        return np.array([self.c1, self.c2, self.c3, self.c0], dtype=float)

    def __array__(self, dtype=None, copy=None):
        a = self.array
        return a if dtype is None else a.astype(dtype)

    @classmethod
    def from_array(cls, x) -> "LieCoeffs":
        x = np.asarray(x, dtype=float)
        return cls(*map(float, x))

    @property
    def k_part(self) -> float:
        """Coefficient along t_plus."""
        return 0.5 * (self.c3 + self.c0)


@dataclass(frozen=True)
class KPCoords:
    """Coordinates in {t, t_bar, t_minus, t_plus}; the t_bar coefficient is conj(a)."""

    a: complex
    c_minus: float
    c_plus: float


def to_kp(x) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split ``x`` into (a, c_minus, c_plus), vectorised over leading axes."""
    x = np.asarray(x)
    a = (x[..., 0] - 1j * x[..., 1]) / np.sqrt(2)
    cm = 0.5 * (x[..., 2] - x[..., 3])
    cp = 0.5 * (x[..., 2] + x[..., 3])
    return a, cm, cp


def from_kp(a, c_minus, c_plus) -> np.ndarray:
    """Inverse of :func:`to_kp` for real elements."""
    a = np.asarray(a, dtype=complex)
    c_minus = np.asarray(c_minus, dtype=float)
    c_plus = np.asarray(c_plus, dtype=float)
    out = np.empty(np.broadcast(a, c_minus, c_plus).shape + (4,))
    out[..., 0] = np.sqrt(2) * a.real
    out[..., 1] = -np.sqrt(2) * a.imag
    out[..., 2] = c_minus + c_plus
    out[..., 3] = c_plus - c_minus
    return out


def kp_coords(x) -> KPCoords:
    a, cm, cp = to_kp(np.asarray(x, dtype=float))
    return KPCoords(complex(a), float(cm), float(cp))


def kp_to_lie(k: KPCoords) -> np.ndarray:
    return from_kp(k.a, k.c_minus, k.c_plus)


def k_p_split(x) -> tuple[np.ndarray, np.ndarray]:
    """Return the (k, p) parts of ``x`` as separate 4-vectors summing to ``x``."""
    x = np.asarray(x)
    cp = 0.5 * (x[..., 2] + x[..., 3])
    k = np.zeros_like(x)
    k[..., 2] = cp
    k[..., 3] = cp
    return k, x - k


@dataclass(frozen=True)
class KElement:
    """Element of the electromagnetic subgroup K, stored by its angle mod 4 pi."""

    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", float(np.mod(self.theta, 4 * np.pi)))

    def compose(self, other: "KElement") -> "KElement":
        return KElement(self.theta + other.theta)

    def inverse(self) -> "KElement":
        return KElement(-self.theta)

    @property
    def su2(self) -> np.ndarray:
        h = 0.5 * self.theta
        return np.diag([np.exp(1j * h), np.exp(-1j * h)])

    @property
    def u1(self) -> complex:
        return complex(np.exp(1j * self.theta))


@dataclass(frozen=True)
class Couplings:
    """Gauge couplings g, g' and Higgs parameters lambda, nu."""

    g: float = 0.65
    gp: float = 0.35
    lambda_h: float = 0.13
    nu_h: float = 1.0

    def __post_init__(self):
        if not (self.g > 0 and self.gp > 0):
            raise ValidationError("gauge couplings must be positive")
        if not self.lambda_h > 0:
            raise ValidationError("lambda_h must be positive")
        if self.nu_h == 0 or not np.isfinite(self.nu_h):
            raise ValidationError("nu_h must be finite and non-zero")

    @property
    def e(self) -> float:
        return self.g * self.gp / np.hypot(self.g, self.gp)

    @property
    def theta_w(self) -> float:
        return float(np.arctan2(self.gp, self.g))

    @property
    def kappa(self) -> np.ndarray:
        """Diagonal of kappa in the unit basis."""
        return np.array([1 / self.g**2] * 3 + [1 / self.gp**2])

    @property
    def kappa_inv(self) -> np.ndarray:
        return np.array([self.g**2] * 3 + [self.gp**2])


def bracket(xi, zeta) -> np.ndarray:
    """Lie bracket; [t_a, t_b] = -eps_abc t_c and i is central."""
    xi = np.asarray(xi)
    zeta = np.asarray(zeta)
    out = np.zeros(np.broadcast_shapes(xi.shape, zeta.shape), dtype=np.result_type(xi, zeta))
    out[..., :3] = -np.cross(xi[..., :3], zeta[..., :3])
    return out


def to_matrix(xi) -> np.ndarray:
    """2x2 matrix rho_xi = sum c_a t_a + c0 (i/2) 1."""
    xi = np.asarray(xi)
    m = 0.5j * np.einsum("...a,aij->...ij", xi[..., :3], SIGMA)
    m = m + 0.5j * xi[..., 3, None, None] * np.eye(2)
    return m


def from_matrix(m) -> np.ndarray:
    """Coefficients of an anti-Hermitian 2x2 matrix (inverse of to_matrix)."""
    m = np.asarray(m)
    out = np.empty(m.shape[:-2] + (4,))
    out[..., :3] = np.real(-1j * np.einsum("aij,...ji->...a", SIGMA, m))
    out[..., 3] = np.real(-1j * np.trace(m, axis1=-2, axis2=-1))
    return out


def su2_exp(xi) -> np.ndarray:
    """exp of the su(2) part of ``xi`` as a 2x2 SU(2) matrix (closed form)."""
    c = np.asarray(xi, dtype=float)[..., :3]
    r = np.linalg.norm(c, axis=-1)
    cos = np.cos(r / 2)
    # sin(r/2)/r, regular at r = 0
    s = 0.5 * np.sinc(r / (2 * np.pi))
    ns = np.einsum("...a,aij->...ij", c, SIGMA)
    return cos[..., None, None] * np.eye(2) + 1j * s[..., None, None] * ns


def su2_log(u) -> np.ndarray:
    """Principal logarithm of an SU(2) matrix as coefficients (c1, c2, c3, 0)."""
    u = np.asarray(u)
    half = np.arccos(np.clip(np.real(np.trace(u, axis1=-2, axis2=-1)) / 2, -1.0, 1.0))
    anti = (u - np.conj(np.swapaxes(u, -1, -2))) / 2j
    b = 0.5 * np.real(np.einsum("aij,...ji->...a", SIGMA, anti))
    out = np.zeros(u.shape[:-2] + (4,))
    out[..., :3] = b * (2.0 / np.sinc(half / np.pi))[..., None]
    return out


def group_exp(xi) -> tuple[np.ndarray, np.ndarray]:
    """exp(xi) as the pair (SU(2) matrix, U(1) angle)."""
    xi = np.asarray(xi, dtype=float)
    return su2_exp(xi), xi[..., 3].copy()


def ad_k(k: KElement, xi) -> np.ndarray:
    """Adjoint action of K: rotation in the (t1, t2)-plane."""
    xi = np.asarray(xi)
    c, s = np.cos(k.theta), np.sin(k.theta)
    out = xi.copy()
    out[..., 0] = c * xi[..., 0] + s * xi[..., 1]
    out[..., 1] = -s * xi[..., 0] + c * xi[..., 1]
    return out


def adjoint(a, xi) -> np.ndarray:
    """Ad_a xi for an SU(2) matrix ``a`` (the u(1) factor acts trivially)."""
    a = np.asarray(a)
    m = to_matrix(xi)
    return from_matrix(a @ m @ np.conj(np.swapaxes(a, -1, -2)))


def pairing(
    xi,
    zeta,
    mode: Literal["unit", "kappa", "kappa_inv"] = "unit",
    c: Couplings | None = None,
):
    """Symmetric bilinear forms on su(2) + u(1).

    ``unit`` makes {t1, t2, t3, i} orthonormal; ``kappa`` has
    kappa(t_a, t_a) = 1/g**2 and kappa(i, i) = 1/g'**2; ``kappa_inv`` is its
    inverse form.
    """
    xi = np.asarray(xi)
    zeta = np.asarray(zeta)
    if mode == "unit":
        w = np.ones(4)
    elif mode in ("kappa", "kappa_inv"):
        if c is None:
            raise ValidationError(f"mode {mode!r} needs couplings")
        w = c.kappa if mode == "kappa" else c.kappa_inv
    else:
        raise ValidationError(f"unknown pairing mode {mode!r}")
    return np.sum(w * xi * zeta, axis=-1)


def lower(xi, c: Couplings) -> np.ndarray:
    """Index lowering with kappa: the unit-dual of kappa(xi, .)."""
    return np.asarray(xi) * c.kappa


def raise_(mu, c: Couplings) -> np.ndarray:
    return np.asarray(mu) * c.kappa_inv


def rep_alg(xi, z) -> np.ndarray:
    """Induced representation on C^2: rho_{t_a} = t_a, rho_i = (i/2) 1."""
    return np.einsum("...ij,...j->...i", to_matrix(xi), np.asarray(z, dtype=complex))


def is_special_unitary(a, tol: float = 1e-10) -> bool:
    a = np.asarray(a, dtype=complex)
    if a.shape[-2:] != (2, 2):
        return False
    eye = np.conj(np.swapaxes(a, -1, -2)) @ a
    return bool(
        np.all(np.abs(eye - np.eye(2)) < tol) and np.all(np.abs(np.linalg.det(a) - 1) < tol)
    )


def rep_group(a, theta, z) -> np.ndarray:
    """rho_{a, theta} z = a exp(i theta / 2) z."""
    if not is_special_unitary(a):
        raise ValidationError("a must be special unitary to 1e-10")
    a = np.asarray(a, dtype=complex)
    phase = np.exp(0.5j * np.asarray(theta))
    return phase[..., None] * np.einsum("...ij,...j->...i", a, np.asarray(z, dtype=complex))


def higgs_potential(f, c: Couplings) -> np.ndarray:
    """V(f) = lambda (|f|^2 - nu^2/2)^2."""
    f = np.asarray(f, dtype=complex)
    r2 = np.sum(np.abs(f) ** 2, axis=-1)
    return c.lambda_h * (r2 - 0.5 * c.nu_h**2) ** 2


def fiber_momentum(z, v) -> np.ndarray:
    """Momentum map of the lifted action on T*C^2, dualised by the unit pairing.

    Componentwise <J, xi> = Re(v^dagger rho_xi z).
    """
    z = np.asarray(z, dtype=complex)
    v = np.asarray(v, dtype=complex)
    z1, z2 = z[..., 0], z[..., 1]
    w1, w2 = np.conj(v[..., 0]), np.conj(v[..., 1])
    out = np.empty(np.broadcast_shapes(z.shape, v.shape)[:-1] + (4,))
    out[..., 0] = -0.5 * np.imag(w1 * z2 + w2 * z1)
    out[..., 1] = -0.5 * np.imag(1j * w2 * z1 - 1j * w1 * z2)
    out[..., 2] = -0.5 * np.imag(w1 * z1 - w2 * z2)
    out[..., 3] = -0.5 * np.imag(w1 * z1 + w2 * z2)
    return out
