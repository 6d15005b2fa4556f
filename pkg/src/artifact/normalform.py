"""Slices, tubes and the cotangent normal form for linear compact-group actions.

A :class:`LinearGAction` acts on Q = R^n through antisymmetric generators.
Dual Lie-algebra elements are stored by their values on a chosen basis:
``J[i] = <J, X_i>`` for the generators, and ``nu[i] = nu(m_i)`` for the
complement basis of a slice.  The canonical form on T*R^n is
omega = sum dp ^ dq, i.e. omega((dq1, dp1), (dq2, dp2)) = dp1.dq2 - dp2.dq1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .lattice import NumericalError
from .liealg import ValidationError

NULL_RTOL = 1e-8
SLICE_FRACTION = 0.2


def null_space(m: np.ndarray, rtol: float = NULL_RTOL) -> np.ndarray:
    """Orthonormal null-space basis (columns) with threshold rtol * largest singular value."""
    m = np.atleast_2d(np.asarray(m, dtype=float))
    if m.size == 0 or not np.any(m):
        return np.eye(m.shape[1])
    try:
        return sla.null_space(m, rcond=rtol)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"rank-revealing factorization failed: {exc}") from exc


def range_space(m: np.ndarray, rtol: float = NULL_RTOL) -> np.ndarray:
    m = np.atleast_2d(np.asarray(m, dtype=float))
    if m.size == 0 or not np.any(m):
        return np.zeros((m.shape[0], 0))
    return sla.orth(m, rcond=rtol)


@dataclass(frozen=True)
class LinearGAction:
    """Linear action of a compact matrix group on R^n via its Lie algebra generators."""

    generators: tuple

    def __post_init__(self):
        gens = tuple(np.array(x, dtype=float) for x in self.generators)
        if not gens:
            raise ValidationError("at least one generator required")
        n = gens[0].shape[0]
        for x in gens:
            if x.shape != (n, n):
                raise ValidationError("generators must be square of equal size")
            if np.max(np.abs(x + x.T)) > 0:
                raise ValidationError("generators must be antisymmetric")
        object.__setattr__(self, "generators", gens)
        X = np.stack(gens)
        object.__setattr__(self, "_X", X)
        # trace form -tr(XY), scaled so that the generators have unit length on average
        gram = -np.einsum("iab,jba->ij", X, X)
        object.__setattr__(self, "_metric", gram / np.mean(np.diag(gram)))
        flat = X.reshape(len(gens), -1).T
        if np.linalg.matrix_rank(flat) != len(gens):
            raise ValidationError("generators must be linearly independent")
        object.__setattr__(self, "_flat", flat)
        # closure under the commutator
        for a in gens:
            for b in gens:
                c = a @ b - b @ a
                coef = np.linalg.lstsq(flat, c.reshape(-1), rcond=None)[0]
                if np.linalg.norm(flat @ coef - c.reshape(-1)) > 1e-10:
                    raise ValidationError("generators do not close under the commutator")

    @property
    def n(self) -> int:
        return self.generators[0].shape[0]

    @property
    def dim(self) -> int:
        return len(self.generators)

    @property
    def metric(self) -> np.ndarray:
        """Ad-invariant inner product on the generator coefficients."""
        return self._metric

    def matrix(self, coeffs) -> np.ndarray:
        return np.einsum("i,iab->ab", np.asarray(coeffs, dtype=float), self._X)

    def coefficients(self, m) -> np.ndarray:
        """Generator coefficients of an algebra matrix (least squares)."""
        return np.linalg.lstsq(self._flat, np.asarray(m).reshape(-1), rcond=None)[0]

    def structure_constants(self) -> np.ndarray:
        """c[i, j, k] with [X_i, X_j] = sum_k c[i, j, k] X_k."""
        c = np.empty((self.dim,) * 3)
        for i, a in enumerate(self.generators):
            for j, b in enumerate(self.generators):
                c[i, j] = self.coefficients(a @ b - b @ a)
        return c

    def infinitesimal(self, q) -> np.ndarray:
        """Matrix whose column i is X_i q."""
        return np.einsum("iab,b->ai", self._X, np.asarray(q, dtype=float))

    def group_element(self, coeffs) -> np.ndarray:
        return sla.expm(self.matrix(coeffs))

    def sample_group(self, rng: np.random.Generator, max_norm: float = np.pi / 2) -> np.ndarray:
        v = rng.normal(size=self.dim)
        v *= rng.uniform(0, max_norm) / max(np.linalg.norm(v), 1e-300)
        return self.group_element(v)

    def coad(self, a: np.ndarray, mu) -> np.ndarray:
        """CoAd_a mu as values on the generators: (CoAd_a mu)(X) = mu(a^T X a)."""
        mu = np.asarray(mu, dtype=float)
        C = np.stack([self.coefficients(a.T @ x @ a) for x in self.generators])
        return C @ mu


def so3() -> LinearGAction:
    L = np.zeros((3, 3, 3))
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        L[i, k, j] = 1.0
        L[i, j, k] = -1.0
    return LinearGAction(tuple(L))


def so2() -> LinearGAction:
    return LinearGAction((np.array([[0.0, -1.0], [1.0, 0.0]]),))


@dataclass(frozen=True)
class SliceData:
    q: np.ndarray
    stab: np.ndarray  # (dim, dim g_q) generator coefficients, columns
    comp: np.ndarray  # (dim, dim m) generator coefficients, columns
    slice_dirs: np.ndarray  # (n, dim S) orthonormal columns
    radius: float

    @property
    def basis(self) -> np.ndarray:
        """Columns [g_q | m] forming a basis of g."""
        return np.hstack([self.stab, self.comp])


@dataclass(frozen=True)
class TubeCoords:
    a: np.ndarray
    nu: np.ndarray
    s: np.ndarray
    alpha_s: np.ndarray


def build_slice(act: LinearGAction, q, radius_fraction: float = SLICE_FRACTION) -> SliceData:
    q = np.asarray(q, dtype=float)
    M = act.infinitesimal(q)
    stab = null_space(M)
    # complement of g_q with respect to the Ad-invariant metric
    if stab.shape[1] == 0:
        comp = np.eye(act.dim)
    elif stab.shape[1] == act.dim:
        comp = np.zeros((act.dim, 0))
    else:
        comp = null_space(stab.T @ act.metric)
        # orthonormalise in the metric
        L = np.linalg.cholesky(comp.T @ act.metric @ comp)
        comp = comp @ np.linalg.inv(L).T
    orbit = range_space(M)
    slice_dirs = null_space(orbit.T) if orbit.shape[1] else np.eye(act.n)
    nq = float(np.linalg.norm(q))
    radius = radius_fraction * nq if nq > 0 else np.inf
    return SliceData(q, stab, comp, slice_dirs, radius)


def lifted_momentum(act: LinearGAction, q, p) -> np.ndarray:
    """Values <J(q, p), X_i> = p . (X_i q)."""
    return act.infinitesimal(q).T @ np.asarray(p, dtype=float)


def slice_momentum(act: LinearGAction, sl: SliceData, s, alpha_s) -> np.ndarray:
    """Momentum map of the lifted G_q action on T*S, as values on the g_q basis."""
    s = np.asarray(s, dtype=float)
    out = np.empty(sl.stab.shape[1])
    for i in range(sl.stab.shape[1]):
        zs = act.matrix(sl.stab[:, i]) @ s
        out[i] = np.asarray(alpha_s) @ (sl.slice_dirs.T @ zs)
    return out


def _tube_system(act: LinearGAction, sl: SliceData, s) -> np.ndarray:
    rows = [act.matrix(sl.comp[:, i]) @ s for i in range(sl.comp.shape[1])]
    rows += list(sl.slice_dirs.T)
    return np.array(rows).reshape(-1, act.n)


def tube_phi(act: LinearGAction, sl: SliceData, tc: TubeCoords) -> tuple[np.ndarray, np.ndarray]:
    s = np.asarray(tc.s, dtype=float)
    if np.linalg.norm(s - sl.q) > sl.radius:
        raise ValidationError("slice point outside the slice radius")
    M = _tube_system(act, sl, s)
    if M.shape[0] != act.n:
        raise NumericalError("tube system is not square")
    rhs = np.concatenate([np.asarray(tc.nu, dtype=float), np.asarray(tc.alpha_s, dtype=float)])
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > 1e12:
        raise NumericalError(f"tube system singular (condition number {cond:.3e})")
    ptil = np.linalg.solve(M, rhs)
    return tc.a @ s, tc.a @ ptil


def normal_form_momentum(act: LinearGAction, sl: SliceData, tc: TubeCoords) -> np.ndarray:
    """CoAd_a(nu + J_{G_q}(alpha_s)) as values on the generators."""
    vals = np.concatenate([slice_momentum(act, sl, tc.s, tc.alpha_s), np.asarray(tc.nu, dtype=float)])
    # generator X_i = sum_b c_ib B_b, so mu(X_i) = sum_b c_ib mu(B_b)
    c = np.linalg.solve(sl.basis, np.eye(act.dim))
    mu = c.T @ vals
    return act.coad(tc.a, mu)


def verify_normal_form(act: LinearGAction, sl: SliceData, tc: TubeCoords) -> float:
    q1, p1 = tube_phi(act, sl, tc)
    return float(np.linalg.norm(lifted_momentum(act, q1, p1) - normal_form_momentum(act, sl, tc)))


def _phi_flat(act, sl, a, nu, y, alpha):
    s = sl.q + sl.slice_dirs @ y
    q1, p1 = tube_phi(act, sl, TubeCoords(a, nu, s, alpha))
    return np.concatenate([q1, p1])


def tube_tangent(act, sl, tc: TubeCoords, xi, eta, dy, dalpha, step: float = 1e-6) -> np.ndarray:
    """Central-difference image of a tube tangent vector under Phi.

    The group direction is a -> a exp(t xi) with xi given in the m basis.
    """
    y0 = sl.slice_dirs.T @ (np.asarray(tc.s) - sl.q)
    xi_m = act.matrix(sl.comp @ np.asarray(xi, dtype=float))

    def at(t):
        a = tc.a @ sla.expm(t * xi_m)
        return _phi_flat(act, sl, a, tc.nu + t * np.asarray(eta), y0 + t * np.asarray(dy), tc.alpha_s + t * np.asarray(dalpha))

    return (at(step) - at(-step)) / (2 * step)


def omega(v1: np.ndarray, v2: np.ndarray) -> float:
    n = v1.size // 2
    return float(v1[n:] @ v2[:n] - v2[n:] @ v1[:n])


def pullback_omega_expected(xi1, eta1, dy1, da1, xi2, eta2, dy2, da2) -> float:
    """Block formula at zero momentum: eta1(xi2) - eta2(xi1) + omega_S."""
    return float(
        np.dot(eta1, xi2) - np.dot(eta2, xi1) + np.dot(da1, dy2) - np.dot(da2, dy1)
    )


def pullback_omega_check(act, sl, tc: TubeCoords, pairs, tol_j: float = 1e-8) -> float:
    """Largest deviation of (Phi^* omega) from the block formula over tangent pairs.

    Each pair is ((xi, eta, dy, dalpha), (xi, eta, dy, dalpha)).
    """
    q1, p1 = tube_phi(act, sl, tc)
    if np.linalg.norm(lifted_momentum(act, q1, p1)) > tol_j:
        raise ValidationError("pullback check requires zero momentum")
    worst = 0.0
    for t1, t2 in pairs:
        v1 = tube_tangent(act, sl, tc, *t1)
        v2 = tube_tangent(act, sl, tc, *t2)
        worst = max(worst, abs(omega(v1, v2) - pullback_omega_expected(*t1, *t2)))
    return worst


# linear symplectic actions ----------------------------------------------------


def cotangent_omega(n: int) -> np.ndarray:
    """Matrix of omega = dp ^ dq on y = (q, p): omega(y1, y2) = y1 @ W @ y2."""
    z = np.zeros((n, n))
    i = np.eye(n)
    return np.block([[z, -i], [i, z]])


def cotangent_lift(x: np.ndarray) -> np.ndarray:
    """Lift of an antisymmetric generator to T*R^n in (q, p) coordinates."""
    z = np.zeros_like(x)
    return np.block([[x, z], [z, -x.T]])


def linear_momentum(W: np.ndarray, generators, y, tol: float = 1e-10) -> np.ndarray:
    """Quadratic momentum map <J(y), X_i> = 1/2 omega(y, X_i y).

    With this normalisation dJ_X(dy) = omega(dy, X y).
    """
    W = np.asarray(W, dtype=float)
    y = np.asarray(y, dtype=float)
    out = []
    for x in generators:
        x = np.asarray(x, dtype=float)
        if np.max(np.abs(x.T @ W + W @ x)) > tol:
            raise ValidationError("action does not preserve omega")
        out.append(0.5 * y @ W @ (x @ y))
    return np.array(out)


def stabilizer_dim_phase(act: LinearGAction, q, p) -> int:
    """Dimension of the stabilizer of (q, p) under the lifted action."""
    m = np.vstack([act.infinitesimal(q), act.infinitesimal(p)])
    return int(null_space(m).shape[1])


def kernel_vs_orbit(W: np.ndarray, generators, y) -> tuple[int, int, float]:
    """dim ker dJ, dim (g.y)^omega and the largest omega(k, X y) over a kernel basis."""
    y = np.asarray(y, dtype=float)
    orbit = np.stack([np.asarray(x) @ y for x in generators], axis=1)
    dJ = (W @ orbit).T  # row i: dy -> omega(dy, X_i y)
    ker = null_space(dJ)
    orth = null_space(orbit.T @ W.T)  # omega(v, X y) = v W X y
    res = float(np.max(np.abs(ker.T @ W @ orbit))) if ker.size else 0.0
    return ker.shape[1], orth.shape[1], res
