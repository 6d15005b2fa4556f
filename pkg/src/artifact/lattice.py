"""Discrete exterior calculus on a periodic cubical lattice.

Cells are indexed as follows (``N`` sites, row-major site index):

* 0-cells: site ``x``
* 1-cells: ``d * N + x`` is the edge from ``x`` to ``x + e_d``
* 2-cells: ``k * N + x`` is the face at ``x`` spanned by ``(e_j, e_l)`` with
  ``(k, j, l)`` cyclic, so its normal is ``e_k``
* 3-cells: the cube at ``x``

Cochains store integrals over cells, so the coboundary is pure integer
incidence.  The inner product on k-cochains carries the weight
``h**(3 - 2k)`` and the diagonal Hodge star maps a k-cell to the dual cell of
the same index with the same factor, which makes ``star(star(c)) == c``.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import cg

from .liealg import ValidationError

VTYPES = {"real": ((), float), "complex": ((), complex), "lie": ((4,), float), "pair": ((2,), complex)}
VTYPE_CODES = {"real": 0, "complex": 1, "lie": 2, "pair": 3}
CYCLIC = ((1, 2), (2, 0), (0, 1))


class NumericalError(RuntimeError):
    """Raised when an iterative solve does not converge."""

    def __init__(self, msg: str, trace: list[float] | None = None):
        super().__init__(msg)
        self.trace = trace or []


def _sparse(rows, cols, vals, shape) -> sp.csr_matrix:
    m = sp.coo_matrix((vals, (rows, cols)), shape=shape).tocsr()
    m.sum_duplicates()
    m.eliminate_zeros()
    return m


@dataclass(frozen=True, eq=False)
class Lattice:
    dims: tuple[int, int, int]
    h: float = 1.0

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        if len(dims) != 3 or any(n < 1 for n in dims):
            raise ValidationError("dims must be three positive integers")
        if not (self.h > 0 and np.isfinite(self.h)):
            raise ValidationError("spacing h must be positive")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "h", float(self.h))

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.dims == other.dims and self.h == other.h

    def __hash__(self):
        return hash((self.dims, self.h))

    @property
    def n_sites(self) -> int:
        return int(np.prod(self.dims))

    def count(self, k: int) -> int:
        return self.n_sites * (1, 3, 3, 1)[k]

    def weight(self, k: int) -> float:
        return self.h ** (3 - 2 * k)

    @property
    def volume(self) -> float:
        return self.n_sites * self.h**3

    @cached_property
    def coords(self) -> np.ndarray:
        """Integer site coordinates, shape (N, 3)."""
        grid = np.indices(self.dims).reshape(3, -1).T
        return grid

    @cached_property
    def _shift(self) -> np.ndarray:
        n = np.array(self.dims)
        out = np.empty((3, self.n_sites), dtype=np.int64)
        for d in range(3):
            c = self.coords.copy()
            c[:, d] = (c[:, d] + 1) % n[d]
            out[d] = np.ravel_multi_index(c.T, self.dims)
        return out

    def shift(self, idx, d: int, steps: int = 1) -> np.ndarray:
        idx = np.asarray(idx)
        for _ in range(steps % self.dims[d]):
            idx = self._shift[d][idx]
        return idx

    # coboundary matrices -------------------------------------------------

    @cached_property
    def D0(self) -> sp.csr_matrix:
        N = self.n_sites
        x = np.arange(N)
        rows, cols, vals = [], [], []
        for d in range(3):
            e = d * N + x
            rows += [e, e]
            cols += [self.shift(x, d), x]
            vals += [np.ones(N), -np.ones(N)]
        return _sparse(np.concatenate(rows), np.concatenate(cols), np.concatenate(vals), (3 * N, N))

    @cached_property
    def D1(self) -> sp.csr_matrix:
        N = self.n_sites
        x = np.arange(N)
        rows, cols, vals = [], [], []
        for k, (j, l) in enumerate(CYCLIC):
            f = k * N + x
            # boundary of the face: +edge_j(x) + edge_l(x+e_j) - edge_j(x+e_l) - edge_l(x)
            rows += [f, f, f, f]
            cols += [j * N + x, l * N + self.shift(x, j), j * N + self.shift(x, l), l * N + x]
            vals += [np.ones(N), np.ones(N), -np.ones(N), -np.ones(N)]
        return _sparse(
            np.concatenate(rows), np.concatenate(cols), np.concatenate(vals), (3 * N, 3 * N)
        )

    @cached_property
    def D2(self) -> sp.csr_matrix:
        N = self.n_sites
        x = np.arange(N)
        rows, cols, vals = [], [], []
        for k in range(3):
            rows += [x, x]
            cols += [k * N + self.shift(x, k), k * N + x]
            vals += [np.ones(N), -np.ones(N)]
        return _sparse(np.concatenate(rows), np.concatenate(cols), np.concatenate(vals), (N, 3 * N))

    def coboundary(self, k: int) -> sp.csr_matrix:
        if k not in (0, 1, 2):
            raise ValidationError(f"no coboundary out of degree {k}")
        return (self.D0, self.D1, self.D2)[k]

    # averaging operators used by the cup-style wedge ---------------------

    @cached_property
    def P01(self) -> sp.csr_matrix:
        """Edge average of a 0-cochain over the two endpoints."""
        N = self.n_sites
        x = np.arange(N)
        rows = np.concatenate([d * N + x for d in range(3) for _ in (0, 1)])
        cols = np.concatenate([c for d in range(3) for c in (x, self.shift(x, d))])
        return _sparse(rows, cols, np.full(rows.size, 0.5), (3 * N, N))

    @cached_property
    def P02(self) -> sp.csr_matrix:
        """Face average of a 0-cochain over the four corners."""
        N = self.n_sites
        x = np.arange(N)
        rows, cols = [], []
        for k, (j, l) in enumerate(CYCLIC):
            for c in (x, self.shift(x, j), self.shift(x, l), self.shift(self.shift(x, j), l)):
                rows.append(k * N + x)
                cols.append(c)
        rows = np.concatenate(rows)
        return _sparse(rows, np.concatenate(cols), np.full(rows.size, 0.25), (3 * N, N))

    @cached_property
    def P03(self) -> sp.csr_matrix:
        """Cube average of a 0-cochain over the eight corners."""
        N = self.n_sites
        x = np.arange(N)
        rows, cols = [], []
        for a in (0, 1):
            for b in (0, 1):
                for c in (0, 1):
                    y = self.shift(self.shift(self.shift(x, 0, a), 1, b), 2, c)
                    rows.append(x)
                    cols.append(y)
        rows = np.concatenate(rows)
        return _sparse(rows, np.concatenate(cols), np.full(rows.size, 0.125), (N, N))

    @cached_property
    def S_first(self) -> sp.csr_matrix:
        """Face value of the first tangent direction: average of edge_j at x and x + e_l."""
        N = self.n_sites
        x = np.arange(N)
        rows, cols = [], []
        for k, (j, l) in enumerate(CYCLIC):
            rows += [k * N + x, k * N + x]
            cols += [j * N + x, j * N + self.shift(x, l)]
        rows = np.concatenate(rows)
        return _sparse(rows, np.concatenate(cols), np.full(rows.size, 0.5), (3 * N, 3 * N))

    @cached_property
    def S_second(self) -> sp.csr_matrix:
        """Face value of the second tangent direction: average of edge_l at x and x + e_j."""
        N = self.n_sites
        x = np.arange(N)
        rows, cols = [], []
        for k, (j, l) in enumerate(CYCLIC):
            rows += [k * N + x, k * N + x]
            cols += [l * N + x, l * N + self.shift(x, j)]
        rows = np.concatenate(rows)
        return _sparse(rows, np.concatenate(cols), np.full(rows.size, 0.5), (3 * N, 3 * N))

    @cached_property
    def C13(self) -> sp.csr_matrix:
        """Cube value of each edge direction: average of the four parallel edges (3N x 3N, direction-major)."""
        N = self.n_sites
        x = np.arange(N)
        rows, cols = [], []
        for k, (j, l) in enumerate(CYCLIC):
            for y in (x, self.shift(x, j), self.shift(x, l), self.shift(self.shift(x, j), l)):
                rows.append(k * N + x)
                cols.append(k * N + y)
        rows = np.concatenate(rows)
        return _sparse(rows, np.concatenate(cols), np.full(rows.size, 0.25), (3 * N, 3 * N))

    @cached_property
    def C23(self) -> sp.csr_matrix:
        """Cube value of each face normal: average of the two parallel faces."""
        N = self.n_sites
        x = np.arange(N)
        rows, cols = [], []
        for k in range(3):
            for y in (x, self.shift(x, k)):
                rows.append(k * N + x)
                cols.append(k * N + y)
        rows = np.concatenate(rows)
        return _sparse(rows, np.concatenate(cols), np.full(rows.size, 0.5), (3 * N, 3 * N))

    def laplacian(self, k: int) -> sp.csr_matrix:
        """Hodge Laplacian d codiff + codiff d on k-cochains (symmetric)."""
        m = sp.csr_matrix((self.count(k), self.count(k)))
        if k >= 1:
            Dm = self.coboundary(k - 1)
            m = m + Dm @ Dm.T
        if k <= 2:
            Dk = self.coboundary(k)
            m = m + Dk.T @ Dk
        return (m / self.h**2).tocsr()

    def harmonic_basis(self, k: int) -> np.ndarray:
        """Orthonormal (Euclidean) basis of harmonic k-cochains, shape (b_k, count)."""
        N = self.n_sites
        if k in (0, 3):
            return np.ones((1, N)) / np.sqrt(N)
        out = np.zeros((3, 3 * N))
        for d in range(3):
            out[d, d * N : (d + 1) * N] = 1 / np.sqrt(N)
        return out

    def apply(self, m, values: np.ndarray) -> np.ndarray:
        """Apply a cell-space matrix to values with trailing value axes."""
        flat = values.reshape(values.shape[0], -1)
        out = m @ flat
        return np.asarray(out).reshape((m.shape[0],) + values.shape[1:])


@dataclass(frozen=True, eq=False)
class Cochain:
    lattice: Lattice
    degree: int
    values: np.ndarray
    vtype: str = "real"

    def __post_init__(self):
        if self.degree not in (0, 1, 2, 3):
            raise ValidationError("degree must be 0..3")
        if self.vtype not in VTYPES:
            raise ValidationError(f"unknown value type {self.vtype!r}")
        vshape, dtype = VTYPES[self.vtype]
        v = np.array(self.values, dtype=dtype)
        want = (self.lattice.count(self.degree),) + vshape
        if v.shape != want:
            raise ValidationError(f"values must have shape {want}, got {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def zeros(cls, lat: Lattice, k: int, vtype: str = "real") -> "Cochain":
        vshape, dtype = VTYPES[vtype]
        return cls(lat, k, np.zeros((lat.count(k),) + vshape, dtype=dtype), vtype)

    def _like(self, values) -> "Cochain":
        return Cochain(self.lattice, self.degree, values, self.vtype)

    def _check(self, other: "Cochain"):
        if not isinstance(other, Cochain):
            raise ValidationError("expected a Cochain")
        if other.lattice != self.lattice or other.degree != self.degree or other.vtype != self.vtype:
            raise ValidationError("cochains differ in lattice, degree or value type")

    def __add__(self, other):
        self._check(other)
        return self._like(self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return self._like(self.values - other.values)

    def __neg__(self):
        return self._like(-self.values)

    def __mul__(self, s):
        return self._like(self.values * s)

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.sqrt(inner(self, self)))


def d(c: Cochain) -> Cochain:
    if c.degree == 3:
        raise ValidationError("d of a 3-cochain is undefined")
    lat = c.lattice
    return Cochain(lat, c.degree + 1, lat.apply(lat.coboundary(c.degree), c.values), c.vtype)


def hodge(c: Cochain) -> Cochain:
    """Diagonal Hodge star, k-cell i to (3-k)-cell i scaled by h**(3 - 2k)."""
    return Cochain(c.lattice, 3 - c.degree, c.values * c.lattice.weight(c.degree), c.vtype)


def hodge_inv(c: Cochain) -> Cochain:
    return hodge(c)


def codiff(c: Cochain) -> Cochain:
    """Adjoint of d under :func:`inner`: h**-2 times the transposed incidence."""
    if c.degree == 0:
        raise ValidationError("codiff of a 0-cochain is undefined")
    lat = c.lattice
    m = lat.coboundary(c.degree - 1).T
    return Cochain(lat, c.degree - 1, lat.apply(m, c.values) / lat.h**2, c.vtype)


def _pair_values(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    p = np.real(np.conj(a) * b)
    return p.reshape(p.shape[0], -1).sum(axis=1)


def inner(a: Cochain, b: Cochain) -> float:
    a._check(b)
    return float(a.lattice.weight(a.degree) * np.sum(_pair_values(a.values, b.values)))


# Poisson solves and Hodge decomposition -----------------------------------


def project_harmonic(c: Cochain) -> Cochain:
    """Orthogonal projection onto harmonic cochains (constants per direction)."""
    B = c.lattice.harmonic_basis(c.degree)
    flat = c.values.reshape(c.values.shape[0], -1)
    proj = B.T @ (B @ flat)
    return c._like(proj.reshape(c.values.shape))


def _cg_columns(M, rhs: np.ndarray, tol: float, max_iter: int, B: np.ndarray) -> np.ndarray:
    flat = rhs.reshape(rhs.shape[0], -1)
    out = np.zeros_like(flat)
    parts = [(np.real, 1.0)] if not np.iscomplexobj(flat) else [(np.real, 1.0), (np.imag, 1j)]
    for col in range(flat.shape[1]):
        for part, unit in parts:
            b = part(flat[:, col]).astype(float)
            if not np.any(b):
                continue
            x, info = cg(M, b, rtol=0.0, atol=tol, maxiter=max_iter)
            x = x - B.T @ (B @ x)
            res = float(np.linalg.norm(M @ x - b))
            if info != 0 or res > tol * 10:
                raise NumericalError(f"CG did not converge (info={info}, residual={res:.3e})")
            out[:, col] = out[:, col] + unit * x
    return out.reshape(rhs.shape)


def solve_poisson(
    rhs: Cochain, tol: float = 1e-12, max_iter: int = 10_000, strict: bool = False
) -> Cochain:
    """Solve the Hodge-Laplace equation in the orthogonal complement of the harmonic cochains.

    The harmonic component of ``rhs`` is removed first.  With ``strict=True`` a
    harmonic component larger than ``tol`` raises instead.
    """
    lat = rhs.lattice
    harm = project_harmonic(rhs)
    if strict and harm.norm() > tol:
        raise ValidationError("right-hand side has a harmonic component")
    b = rhs - harm
    B = lat.harmonic_basis(rhs.degree)
    x = _cg_columns(lat.laplacian(rhs.degree), b.values, tol, max_iter, B)
    return rhs._like(x)


def laplace(c: Cochain) -> Cochain:
    lat = c.lattice
    return c._like(lat.apply(lat.laplacian(c.degree), c.values))


@dataclass(frozen=True)
class HodgeSplit:
    exact: Cochain
    coexact: Cochain
    harmonic: Cochain
    residual: float
    potential: Cochain = field(repr=False)
    copotential: Cochain = field(repr=False)


def hodge_decompose(a: Cochain, tol: float = 1e-12) -> HodgeSplit:
    if a.degree != 1:
        raise ValidationError("hodge_decompose expects a 1-cochain")
    f = solve_poisson(codiff(a), tol=tol)
    beta = solve_poisson(d(a), tol=tol)
    exact = d(f)
    coexact = codiff(beta)
    harm = project_harmonic(a)
    res = (a - exact - coexact - harm).norm()
    return HodgeSplit(exact, coexact, harm, res, f, beta)


# wedge products --------------------------------------------------------------


def wedge_pair(a: Cochain, b: Cochain, hook: Callable | None = None, vtype: str | None = None) -> Cochain:
    """Cup-style wedge with symmetric cell averaging and a bilinear value pairing.

    ``hook(x, y)`` acts on value arrays with a leading cell axis.  The default
    hook is multiplication.  The result value type defaults to the type of
    ``hook`` applied to the operands (inferred from the output array).
    """
    k, l = a.degree, b.degree
    if k + l > 3:
        raise ValidationError("wedge degree exceeds 3")
    lat = a.lattice
    if b.lattice != lat:
        raise ValidationError("wedge operands live on different lattices")
    hook = hook or (lambda x, y: _mul(x, y))
    N = lat.n_sites
    A, B = a.values, b.values
    if k == 0 and l == 0:
        out = hook(A, B)
    elif k == 0 or l == 0:
        avg = {1: lat.P01, 2: lat.P02, 3: lat.P03}[max(k, l)]
        out = hook(lat.apply(avg, A), B) if k == 0 else hook(A, lat.apply(avg, B))
    elif k == 1 and l == 1:
        Aj, Al = lat.apply(lat.S_first, A), lat.apply(lat.S_second, A)
        Bj, Bl = lat.apply(lat.S_first, B), lat.apply(lat.S_second, B)
        out = hook(Aj, Bl) - hook(Al, Bj)
    else:
        one, two = (A, B) if k == 1 else (B, A)
        e = lat.apply(lat.C13, one)
        f = lat.apply(lat.C23, two)
        terms = hook(e, f) if k == 1 else hook(f, e)
        out = terms[:N] + terms[N : 2 * N] + terms[2 * N :]
    out = np.asarray(out)
    if vtype is None:
        vtype = _infer_vtype(out)
    return Cochain(lat, k + l, out, vtype)


def _mul(x, y):
    x = np.asarray(x)
    y = np.asarray(y)
    if x.ndim > y.ndim:
        y = y.reshape(y.shape + (1,) * (x.ndim - y.ndim))
    elif y.ndim > x.ndim:
        x = x.reshape(x.shape + (1,) * (y.ndim - x.ndim))
    return x * y


def _infer_vtype(v: np.ndarray) -> str:
    cplx = np.iscomplexobj(v)
    if v.ndim == 1:
        return "complex" if cplx else "real"
    if v.shape[1:] == (4,) and not cplx:
        return "lie"
    if v.shape[1:] == (2,) and cplx:
        return "pair"
    raise ValidationError(f"cannot infer value type for shape {v.shape[1:]}")


# serialization ------------------------------------------------------------------

MAGIC = b"COCH"


def to_bytes(c: Cochain) -> bytes:
    """Flat binary layout: magic, degree, dims, h, value type, row-major float64 values."""
    head = MAGIC + struct.pack("<i3idi", c.degree, *c.lattice.dims, c.lattice.h, VTYPE_CODES[c.vtype])
    v = c.values
    if np.iscomplexobj(v):
        v = np.stack([v.real, v.imag], axis=-1)
    return head + np.ascontiguousarray(v, dtype="<f8").tobytes()


def from_bytes(buf: bytes) -> Cochain:
    if buf[:4] != MAGIC:
        raise ValidationError("not a cochain snapshot")
    deg, n1, n2, n3, h, code = struct.unpack_from("<i3idi", buf, 4)
    vtype = {v: k for k, v in VTYPE_CODES.items()}[code]
    lat = Lattice((n1, n2, n3), h)
    off = 4 + struct.calcsize("<i3idi")
    raw = np.frombuffer(buf[off:], dtype="<f8")
    vshape, dtype = VTYPES[vtype]
    shape = (lat.count(deg),) + vshape
    if dtype is complex:
        raw = raw.reshape(shape + (2,))
        vals = raw[..., 0] + 1j * raw[..., 1]
    else:
        vals = raw.reshape(shape)
    return Cochain(lat, deg, vals, vtype)


def to_json_dict(c: Cochain) -> dict:
    v = c.values
    if np.iscomplexobj(v):
        v = np.stack([v.real, v.imag], axis=-1)
    return {
        "degree": c.degree,
        "dims": list(c.lattice.dims),
        "h": c.lattice.h,
        "vtype": c.vtype,
        "values": v.reshape(-1).tolist(),
    }


def from_json_dict(obj: dict) -> Cochain:
    lat = Lattice(tuple(obj["dims"]), obj["h"])
    deg, vtype = int(obj["degree"]), obj["vtype"]
    vshape, dtype = VTYPES[vtype]
    shape = (lat.count(deg),) + vshape
    raw = np.asarray(obj["values"], dtype=float)
    if dtype is complex:
        raw = raw.reshape(shape + (2,))
        vals = raw[..., 0] + 1j * raw[..., 1]
    else:
        vals = raw.reshape(shape)
    return Cochain(lat, deg, vals, vtype)
