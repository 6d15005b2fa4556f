"""Orbit-type labels for GWS states and the Howe subgroups of SU(2) x U(1).

State classification works on the unitary-gauge slice, where the residual
symmetry is the electromagnetic group K.  The exact-zero conditions are
replaced by sup-norm thresholds (default ``1e-8``).

The subgroup part enumerates Goursat quintuples (G1, G2, L1, L2, theta)
generating each Howe subgroup and checks them against a numerical
centralizer oracle.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.linalg import null_space

from .liealg import BASIS, ValidationError, adjoint, to_kp
from .ymh.core import YMHState, inf_gauge_action, momentum_map
from .ymh.gauss import gauss_split
from .ymh.gws import TOL_PHI, TOL_STRATUM

LABELS = ("K", "Z2")
_RANK = {"Z2": 0, "K": 1}


# state classification ----------------------------------------------------------


@dataclass(frozen=True)
class StratumLabel:
    label: str

    def __post_init__(self):
        if self.label not in LABELS:
            raise ValidationError(f"unknown stratum label {self.label!r}")

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class SeamLabel:
    """(orbit type of the phase point, orbit type of its configuration)."""

    cotangent_type: str
    base_type: str

    def __post_init__(self):
        for x in (self.cotangent_type, self.base_type):
            if x not in LABELS:
                raise ValidationError(f"unknown stratum label {x!r}")
        if _RANK[self.cotangent_type] > _RANK[self.base_type]:
            raise ValidationError("a phase point cannot have a larger stabilizer than its configuration")

    def as_tuple(self) -> tuple[str, str]:
        return (self.cotangent_type, self.base_type)


def _check_unitary(s: YMHState, tol: float) -> None:
    if np.max(np.abs(s.phi[:, 0])) >= max(tol, TOL_PHI):
        raise ValidationError("classification needs a state in unitary gauge")


def _sup(x) -> float:
    return float(np.max(np.abs(x), initial=0.0))


def w_plus(s: YMHState) -> np.ndarray:
    return to_kp(s.A)[0] / s.couplings.g


def d_minus(s: YMHState) -> np.ndarray:
    return s.couplings.g * to_kp(s.E)[0]


def classify_config(s: YMHState, tol: float = TOL_STRATUM) -> StratumLabel:
    _check_unitary(s, tol)
    return StratumLabel("K" if _sup(w_plus(s)) < tol else "Z2")


def classify_phase(s: YMHState, tol: float = TOL_STRATUM) -> StratumLabel:
    _check_unitary(s, tol)
    ok = _sup(w_plus(s)) < tol and _sup(d_minus(s)) < tol and _sup(s.pi[:, 0]) < tol
    return StratumLabel("K" if ok else "Z2")


def seam_label(s: YMHState, tol_J: float = 1e-8, tol: float = TOL_STRATUM) -> SeamLabel:
    if _sup(momentum_map(s)) >= tol_J:
        raise ValidationError("seam labels are defined on the constraint set J = 0")
    return SeamLabel(classify_phase(s, tol).label, classify_config(s, tol).label)


def stabilizer_dim_oracle(s: YMHState, rtol: float = 1e-8) -> int:
    """Dimension of the Lie algebra of gauge directions fixing a homogeneous state."""
    if s.lattice.n_sites != 1:
        raise ValidationError("the stabilizer oracle needs a 1x1x1 lattice")
    cols = []
    for b in BASIS:
        v = inf_gauge_action(b[None, :], s)
        cols.append(np.concatenate([v.A.ravel(), v.E.ravel(), v.phi.view(float).ravel(), v.pi.view(float).ravel()]))
    M = np.stack(cols, axis=1)
    sv = np.linalg.svd(M, compute_uv=False)
    thresh = rtol * max(1.0, float(sv[0]))
    return int(np.sum(sv <= thresh))


@dataclass
class FrontierReport:
    epsilons: np.ndarray
    labels: list[str]
    distances: np.ndarray
    slopes: np.ndarray
    constant: float
    flips: bool
    linear: bool
    residuals: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def ok(self) -> bool:
        return self.flips and self.linear


def _state_distance(a: YMHState, b: YMHState) -> float:
    lat = a.lattice
    w0, w1 = lat.weight(0), lat.weight(1)
    sq = w1 * (np.sum((a.A - b.A) ** 2) + np.sum((a.E - b.E) ** 2))
    sq += w0 * (np.sum(np.abs(a.phi - b.phi) ** 2) + np.sum(np.abs(a.pi - b.pi) ** 2))
    return float(np.sqrt(sq))


def frontier_sample(
    s_K: YMHState,
    epsilons=(1e-2, 1e-3, 1e-4, 1e-5),
    tol: float = TOL_STRATUM,
    seed: int = 0,
    rel_spread: float = 0.1,
) -> FrontierReport:
    """Approach a K-type state through Z2-type states.

    s_eps has A + eps X with X a fixed random W+ pattern, and E corrected by
    the linear Gauss solve so that the zero-mean part of J vanishes again.
    """
    if classify_config(s_K, tol).label != "K":
        raise ValidationError("frontier sampling starts from a K-type configuration")
    rng = np.random.default_rng(seed)
    N3 = s_K.A.shape[0]
    w = rng.normal(size=N3) + 1j * rng.normal(size=N3)
    X = np.zeros_like(s_K.A)
    # a t + conj(a) tbar has t1 = sqrt2 Re a, t2 = -sqrt2 Im a
    X[:, 0] = np.sqrt(2) * np.real(w) * s_K.couplings.g
    X[:, 1] = -np.sqrt(2) * np.imag(w) * s_K.couplings.g
    base = gauss_split(s_K).corrected
    eps = np.asarray(epsilons, dtype=float)
    labels, dist, res = [], [], []
    for e in eps:
        split = gauss_split(s_K.with_fields(A=s_K.A + e * X))
        s_e = split.corrected
        labels.append(classify_config(s_e, tol).label)
        dist.append(_state_distance(s_e, base))
        res.append(split.residual)
    dist = np.array(dist)
    pos = eps > 0
    slopes = np.full_like(dist, np.nan)
    slopes[pos] = dist[pos] / eps[pos]
    C = float(eps @ dist / (eps @ eps)) if np.any(pos) else 0.0
    flips = all(lab == "Z2" for lab, e in zip(labels, eps) if e > tol)
    linear = bool(np.any(pos) and np.max(np.abs(slopes[pos] / C - 1)) < rel_spread)
    return FrontierReport(eps, labels, dist, slopes, C, flips, linear, np.array(res))


# Howe subgroups of SU(2) x U(1) ---------------------------------------------------

HOWE_SYMBOLS = ("SU2xU1", "U1xU1", "Z2xU1")
THETAS = ("trivial", "id_Z2", "power", "UNEXPANDED")
UNEXPANDED = "UNEXPANDED"


@dataclass(frozen=True)
class HoweSymbol:
    H: str

    def __post_init__(self):
        if self.H not in HOWE_SYMBOLS:
            raise ValidationError(f"unknown Howe symbol {self.H!r}")


def _order(name: str) -> int | None:
    """Order of a named subgroup; None for U1 and SU2."""
    if name == "e":
        return 1
    if name.startswith("Z"):
        return int(name[1:])
    return None


@dataclass(frozen=True)
class HoweQuintuple:
    """Goursat data: H' = {(g, l) in G1 x L1 : theta(g G2) = l L2}.

    Groups are named ``e``, ``Z<n>``, ``U1`` or ``SU2``.  For ``theta='power'``
    the map is z -> z^(k q / p) from U1/Zq to U1/Zp; with G2 = e it is z -> z^k.
    """

    G1: str
    G2: str
    L1: str
    L2: str
    theta: str
    p: int | None = None
    q: int | None = None
    k: int | None = None

    def __post_init__(self):
        if self.theta not in THETAS:
            raise ValidationError(f"unknown theta {self.theta!r}")
        if self.theta == UNEXPANDED:
            return
        for name in (self.G1, self.G2, self.L1, self.L2):
            if not (name in ("e", "U1", "SU2") or (name.startswith("Z") and name[1:].isdigit())):
                raise ValidationError(f"unknown group {name!r}")
        if not self.valid():
            raise ValidationError(f"invalid Goursat data {self}")

    def valid(self) -> bool:
        g1, g2, l1, l2 = (_order(x) for x in (self.G1, self.G2, self.L1, self.L2))
        # subgroups of U1 are U1 and the cyclic groups; abelian so always normal
        if l1 is not None and (l2 is None or l1 % l2):
            return False
        if self.theta == "trivial":
            return self.G1 == self.G2 and self.L1 == self.L2
        if self.theta == "id_Z2":
            return self.G1 == "Z2" and self.G2 == "e" and l1 is not None and l1 // l2 == 2 and g1 // g2 == 2
        # power map between circle quotients
        if self.G1 != "U1" or self.L1 != "U1" or self.k is None or self.k < 1:
            return False
        if self.G2 == "e":
            return self.L2 == "e" and self.k == 1
        if g2 != self.q or l2 != self.p:
            return False
        # z -> z^(kq/p) needs p | kq, and its kernel is Z_kq, so only k = 1 gives an isomorphism
        return (self.k * self.q) % self.p == 0 and self.k == 1

    def as_row(self, H: str) -> dict:
        return {"H": H, **asdict(self)}

    def generators(self, rng: np.random.Generator, n: int = 8) -> list[tuple[np.ndarray, complex]]:
        """Sample elements of H' as (SU(2) matrix, U(1) phase) pairs."""
        out: list[tuple[np.ndarray, complex]] = []
        for _ in range(n):
            if self.G1 == "SU2":
                g = _random_su2(rng)
                out.append((g, 1.0 + 0j))
                continue
            if self.G1 == "U1":
                a = rng.uniform(0, 2 * np.pi)
                g = np.diag([np.exp(1j * a), np.exp(-1j * a)])
                if self.theta == "power":
                    expo = 1 if self.G2 == "e" else self.k * self.q / self.p
                    out.append((g, np.exp(1j * a * expo)))
                else:
                    out.append((g, 1.0 + 0j))
            elif self.G1 == "Z2":
                phase = np.exp(1j * np.pi / self.p) if self.theta == "id_Z2" else 1.0 + 0j
                out.append((-np.eye(2, dtype=complex), phase))
            else:
                out.append((np.eye(2, dtype=complex), 1.0 + 0j))
        # the kernel part {e} x L2
        L2 = self.L2
        if L2 == "U1":
            out.append((np.eye(2, dtype=complex), np.exp(1j * rng.uniform(0, 2 * np.pi))))
        elif L2 != UNEXPANDED and _order(L2) > 1:
            out.append((np.eye(2, dtype=complex), np.exp(2j * np.pi / _order(L2))))
        return out


def _random_su2(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=4)
    a, b = complex(v[0], v[1]), complex(v[2], v[3])
    r = np.hypot(abs(a), abs(b))
    a, b = a / r, b / r
    return np.array([[a, -np.conj(b)], [b, np.conj(a)]])


_W = np.array([[0, 1], [-1, 0]], dtype=complex)
_PROBES = (-np.eye(2, dtype=complex), _W, np.diag([1j, -1j]))


@dataclass(frozen=True)
class Centralizer:
    lie_dim: int  # dimension of the centralizer in su(2) + u(1)
    members: tuple[bool, bool, bool]  # contains -1, w, diag(i, -i)

    @property
    def symbol(self) -> str | None:
        return {4: "SU2xU1", 2: "U1xU1", 1: "Z2xU1"}.get(self.lie_dim)


_EXPECTED = {
    "SU2xU1": Centralizer(4, (True, True, True)),
    "U1xU1": Centralizer(2, (True, False, True)),
    "Z2xU1": Centralizer(1, (True, False, False)),
}


def su2_centralizer_dim(mats, tol: float = 1e-9) -> int:
    """Dimension of {X in su(2): Ad_g X = X for all g} from the null space of stacked Ad_g - 1."""
    rows = []
    for g in mats:
        Ad = np.stack([adjoint(g, b)[:3] for b in BASIS[:3]], axis=1)
        rows.append(Ad - np.eye(3))
    if not rows:
        return 3
    return null_space(np.vstack(rows), rcond=tol).shape[1]


def centralizer(gens, tol: float = 1e-9) -> Centralizer:
    """Centralizer in SU(2) x U(1) of the given (matrix, phase) pairs.

    The U(1) factor is central, so only the SU(2) parts matter.
    """
    mats = [g for g, _ in gens]
    dim = su2_centralizer_dim(mats, tol) + 1
    members = tuple(bool(all(np.max(np.abs(P @ g - g @ P)) < tol for g in mats)) for P in _PROBES)
    return Centralizer(dim, members)


def centralizer_check(H: str, q: HoweQuintuple, n_samples: int = 16, seed: int = 0) -> bool:
    HoweSymbol(H)
    rng = np.random.default_rng(seed)
    return centralizer(q.generators(rng, n_samples)) == _EXPECTED[H]


def _cyc(n: int) -> str:
    return "e" if n == 1 else f"Z{n}"


def goursat_enumerate(p_max: int) -> list[tuple[str, HoweQuintuple]]:
    """Goursat data of every Howe subgroup of SU(2) x U(1) with parameters up to p_max.

    Cyclic parameters start at 2 where Z1 = e would duplicate a parameter-free
    row; the id_Z2 family starts at p = 1 (L1 = Z2, L2 = e).  Power maps use
    k = 1, the only exponent giving an isomorphism of the quotients.
    """
    if p_max < 1:
        raise ValidationError("p_max must be at least 1")
    rows: list[tuple[tuple, str, HoweQuintuple]] = []

    def add(H, t, q: HoweQuintuple):
        key = (HOWE_SYMBOLS.index(H), q.p or 0, q.q or 0, q.k or 0, t)
        rows.append((key, H, q))

    for g in ("e", "Z2"):
        base = 0 if g == "e" else 3
        add("SU2xU1", base + 0, HoweQuintuple(g, g, "U1", "U1", "trivial"))
        for p in range(2, p_max + 1):
            add("SU2xU1", base + 1, HoweQuintuple(g, g, f"Z{p}", f"Z{p}", "trivial", p=p))
        add("SU2xU1", base + 2, HoweQuintuple(g, g, "e", "e", "trivial"))
    for p in range(1, p_max + 1):
        add("SU2xU1", 6, HoweQuintuple("Z2", "e", _cyc(2 * p), _cyc(p), "id_Z2", p=p))

    add("U1xU1", 0, HoweQuintuple("U1", "U1", "U1", "U1", "trivial"))
    for p in range(2, p_max + 1):
        add("U1xU1", 1, HoweQuintuple("U1", "U1", f"Z{p}", f"Z{p}", "trivial", p=p))
    add("U1xU1", 2, HoweQuintuple("U1", "U1", "e", "e", "trivial"))
    for q in range(2, p_max + 1):
        for p in range(1, q + 1):
            if q % p == 0:
                add("U1xU1", 3, HoweQuintuple("U1", f"Z{q}", "U1", _cyc(p), "power", p=p, q=q, k=1))
    add("U1xU1", 4, HoweQuintuple("U1", "e", "U1", "e", "power", k=1))

    add("Z2xU1", 0, HoweQuintuple("SU2", UNEXPANDED, UNEXPANDED, UNEXPANDED, UNEXPANDED))
    rows.sort(key=lambda r: r[0])
    return [(H, q) for _, H, q in rows]


HOWE_COLUMNS = ("H", "G1", "G2", "L1", "L2", "theta", "p", "q", "k")


def howe_rows(p_max: int) -> list[dict]:
    return [q.as_row(H) for H, q in goursat_enumerate(p_max)]


# holonomy groups of SU(2) connections ---------------------------------------------

HOLONOMY_COLUMNS = ("Hol", "stabilizer", "H")


def su2_holonomy_table() -> list[dict]:
    return [
        {"Hol": "e|Z2", "stabilizer": "SU2", "H": "Z2"},
        {"Hol": "U1", "stabilizer": "U1", "H": "U1"},
        {"Hol": "SU2", "stabilizer": "Z2", "H": "SU2"},
    ]


def _sample_subgroup(name: str, rng: np.random.Generator, n: int = 12) -> list[np.ndarray]:
    if name in ("e", "e|Z2", "Z2"):
        return [np.eye(2, dtype=complex), -np.eye(2, dtype=complex)]
    if name == "U1":
        return [np.diag([np.exp(1j * a), np.exp(-1j * a)]) for a in rng.uniform(0, 2 * np.pi, n)]
    if name == "SU2":
        return [_random_su2(rng) for _ in range(n)]
    raise ValidationError(f"unknown subgroup {name!r}")


def su2_centralizer_name(name: str, seed: int = 0) -> str:
    """Name of the centralizer in SU(2) of a named closed subgroup (up to conjugacy)."""
    dim = su2_centralizer_dim(_sample_subgroup(name, np.random.default_rng(seed)))
    return {3: "SU2", 1: "U1", 0: "Z2"}[dim]


def holonomy_row_check(row: dict) -> bool:
    """Stabilizer = C(Hol), H = C^2(Hol), and C^2 is idempotent on H."""
    C = su2_centralizer_name
    stab = C(row["Hol"])
    H = C(stab)
    return stab == row["stabilizer"] and H == row["H"] and C(C(H)) == H


# serialisation --------------------------------------------------------------------


def _fmt(v) -> str:
    return "" if v is None else str(v)


def rows_to_csv(rows: list[dict], columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    return buf.getvalue()


def rows_to_json(rows: list[dict]) -> str:
    return json.dumps(rows, sort_keys=True, indent=2) + "\n"


def howe_table_text(p_max: int, fmt: str = "csv") -> str:
    rows = howe_rows(p_max)
    return rows_to_csv(rows, HOWE_COLUMNS) if fmt == "csv" else rows_to_json(rows)


def holonomy_table_text(fmt: str = "csv") -> str:
    rows = su2_holonomy_table()
    return rows_to_csv(rows, HOLONOMY_COLUMNS) if fmt == "csv" else rows_to_json(rows)


__all__ = [
    "LABELS", "StratumLabel", "SeamLabel", "classify_config", "classify_phase", "seam_label",
    "stabilizer_dim_oracle", "FrontierReport", "frontier_sample", "HOWE_SYMBOLS", "HoweSymbol",
    "HoweQuintuple", "Centralizer", "centralizer", "centralizer_check", "su2_centralizer_dim",
    "goursat_enumerate", "howe_rows", "su2_holonomy_table", "holonomy_row_check",
    "su2_centralizer_name", "howe_table_text", "holonomy_table_text", "rows_to_csv", "rows_to_json",
    "w_plus", "d_minus",
]
