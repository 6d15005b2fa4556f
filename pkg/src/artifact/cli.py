"""Command-line runner.

``artifact run SCENARIO [--config PATH] [--out DIR] [--seed N] [--format csv|json] [--acceptance]``
runs one scenario, writes its data files and ``report.json`` into ``--out``
and exits with 0 (all checks pass), 1 (invalid config), 2 (numerical or I/O
failure) or 3 (a check failed).

``artifact howe table --pmax N [--format csv|json] [--out DIR]`` prints the
Howe subgroup table, or writes it together with the holonomy table.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, checks, strata
from . import oscillator as osc
from .config import SCENARIOS, load_config
from .lattice import Lattice, NumericalError
from .liealg import Couplings, ValidationError
from .ymh.core import evolve, hamiltonian, momentum_map, total_charge
from .ymh.gauss import gauss_split
from .ymh.presets import make_preset

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_CHECK = 0, 1, 2, 3

# acceptance criteria attached to each scenario when --acceptance is given
SCENARIO_CRITERIA = {
    "oscillator-demo": (1, 2, 3),
    "normalform-check": (4,),
    "hodge-selftest": (5,),
    "ymh-evolve": (6, 7, 14),
    "gauss-solve": (8, 10),
    "ymh-classify": (9, 11, 13),
    "howe-table": (12,),
}


@dataclass
class RunReport:
    scenario: dict
    checks: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    files: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "version": __version__,
            "scenario": self.scenario,
            "checks": [c.to_dict() for c in self.checks],
            "summary": self.summary,
            "files": self.files,
            "pass": self.passed,
            "wall_time": self.wall_time,
        }


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    return x


def report_text(r: RunReport) -> str:
    return json.dumps(_jsonable(r.to_dict()), sort_keys=True, indent=2) + "\n"


def emit_report(r: RunReport, path) -> None:
    Path(path).write_text(report_text(r))


def read_report(path) -> dict:
    return json.loads(Path(path).read_text())


# data writers -------------------------------------------------------------------


def _write_table(out: Path, stem: str, columns, rows, fmt: str) -> str:
    name = f"{stem}.{fmt}"
    if fmt == "csv":
        with open(out / name, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            for r in rows:
                w.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in r])
    else:
        data = [dict(zip(columns, r)) for r in rows]
        (out / name).write_text(json.dumps(_jsonable(data), sort_keys=True, indent=2) + "\n")
    return name


# scenarios -----------------------------------------------------------------------


def _couplings(cfg) -> Couplings:
    p = cfg["physics"]
    return Couplings(p["g"], p["gp"], p["lambda_h"], p["nu_h"])


def _preset(cfg):
    lat = Lattice(tuple(cfg["lattice"]["dims"]), cfg["lattice"]["h"])
    lapse = np.full(lat.n_sites, cfg["physics"]["lapse"])
    name = cfg["run"]["preset"]
    if name == "homogeneous-random":
        lapse = None
    return make_preset(name, lat, _couplings(cfg), seed=cfg["run"]["seed"], lapse=lapse)


OSC_COLUMNS = ("t", "E+", "E-", "H", "qbar", "pbar", "blowup")


def run_oscillator(cfg, out: Path, fmt: str, rep: RunReport):
    o, run = cfg["oscillator"], cfg["run"]
    h0, t0 = o["hbar0"], o["t0"]
    t_end = run["dt"] * run["steps"]
    grid = np.union1d(np.arange(run["steps"] + 1) * run["dt"], osc.critical_times(t0, 0.0, t_end))
    c0 = osc.initial_cone_point(h0, t0)
    qb, pb, blow = osc.cotangent_flow_batch(grid, h0, t0)
    cone = osc.cone_flow(grid, c0).as_array()
    rows = [
        (float(t), float(c[0]), float(c[1]), float(c[2]), None if b else float(q), None if b else float(p), int(b))
        for t, c, q, p, b in zip(grid, cone, qb, pb, blow)
    ]
    rep.files.append(_write_table(out, "oscillator", OSC_COLUMNS, rows, fmt))
    crit = osc.critical_times(t0, 0.0, t_end)
    rep.summary.update(samples=len(rows), blowups=int(blow.sum()), critical_times=crit)
    flagged = np.sort(grid[blow])
    ok = flagged.shape == crit.shape and np.allclose(flagged, crit)
    rep.checks.append(checks.Check("blowup_at_critical_times", float(ok), 1.0, bool(ok)))


def run_ymh_evolve(cfg, out: Path, fmt: str, rep: RunReport):
    s = _preset(cfg)
    run, tol = cfg["run"], cfg["tolerances"]
    H0, J0, Q0 = hamiltonian(s), momentum_map(s), total_charge(s)
    rows = []

    def observe(n, x):
        J = momentum_map(x)
        Q = total_charge(x)
        rows.append((n, n * run["dt"], hamiltonian(x), float(np.linalg.norm(J)), *map(float, Q)))

    every = run["every"] or max(1, run["steps"])
    evolve(s, run["dt"], run["steps"], every, observe)
    rep.files.append(_write_table(out, "timeseries", ("step", "t", "H", "J_norm", "Q1", "Q2", "Q3", "Q0"), rows, fmt))
    rep.summary.update(H0=H0, J_norm0=float(np.linalg.norm(J0)), samples=len(rows))
    if run["steps"] > 0:
        scale = max(abs(H0), 1.0)
        e_drift = max(abs(r[2] - H0) for r in rows) / scale
        q_drift = max(float(np.max(np.abs(np.array(r[4:]) - Q0))) for r in rows)
        rep.checks.append(checks.below("energy_drift", e_drift, tol["energy"]))
        rep.checks.append(checks.below("charge_drift", q_drift, tol["charge"]))


def run_gauss(cfg, out: Path, fmt: str, rep: RunReport):
    s = _preset(cfg)
    rng = np.random.default_rng(cfg["run"]["seed"])
    # leave the constraint surface with a seeded electric kick, then split again
    s = s.with_fields(E=s.E + 0.1 * rng.normal(size=s.E.shape))
    sp = gauss_split(s)
    rows = [(i + 1, r) for i, r in enumerate(sp.trace)]
    rep.files.append(_write_table(out, "picard", ("iteration", "residual"), rows, fmt))
    tol = cfg["tolerances"]
    rep.summary.update(iterations=sp.iterations, stab_part=sp.stab_part)
    rep.checks.append(checks.below("picard_residual", sp.residual, tol["picard"]))
    diff = float(np.max(np.abs(sp.stab_part - total_charge(s))))
    rep.checks.append(checks.below("stab_part_vs_total_charge", diff, tol["stab"]))


def run_classify(cfg, out: Path, fmt: str, rep: RunReport):
    s = _preset(cfg)
    tol = cfg["tolerances"]
    name = cfg["run"]["preset"]
    info = {
        "config": strata.classify_config(s, tol["stratum"]).label,
        "phase": strata.classify_phase(s, tol["stratum"]).label,
    }
    if float(np.max(np.abs(momentum_map(s)))) < tol["constraint"]:
        info["seam"] = list(strata.seam_label(s, tol["constraint"], tol["stratum"]).as_tuple())
    if s.lattice.n_sites == 1:
        info["stabilizer_dim"] = strata.stabilizer_dim_oracle(s)
    rep.summary.update(labels=info)
    (out / "labels.json").write_text(json.dumps(info, sort_keys=True, indent=2) + "\n")
    rep.files.append("labels.json")
    want = checks.EXPECTED_SEAMS.get(name)
    if want is not None:
        ok = tuple(info.get("seam", ())) == want
        rep.checks.append(checks.Check(f"seam_{name}", float(ok), 1.0, ok, {"expected": list(want)}))


def run_howe(cfg, out: Path, fmt: str, rep: RunReport):
    pmax = cfg["tables"]["pmax"]
    name = f"howe_pmax{pmax}.{fmt}"
    (out / name).write_text(strata.howe_table_text(pmax, fmt))
    (out / f"su2_holonomy.{fmt}").write_text(strata.holonomy_table_text(fmt))
    rep.files += [name, f"su2_holonomy.{fmt}"]
    rows = strata.goursat_enumerate(pmax)
    n_ok = sum(strata.centralizer_check(H, q) for H, q in rows)
    rep.summary.update(rows=len(rows))
    rep.checks.append(checks.Check("centralizer_check", float(n_ok), float(len(rows)), n_ok == len(rows)))


def run_nothing(cfg, out, fmt, rep):
    """Scenarios whose content is their acceptance checks."""


RUNNERS = {
    "oscillator-demo": run_oscillator,
    "normalform-check": run_nothing,
    "hodge-selftest": run_nothing,
    "ymh-evolve": run_ymh_evolve,
    "gauss-solve": run_gauss,
    "ymh-classify": run_classify,
    "howe-table": run_howe,
}

ALWAYS_CHECK = {"normalform-check": checks.normal_form, "hodge-selftest": checks.hodge_selftest}


def run_scenario(cfg: dict, out, fmt: str = "csv", acceptance: bool | None = None) -> RunReport:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    rep = RunReport(scenario=cfg)
    t = time.perf_counter()
    name = cfg["scenario"]
    RUNNERS[name](cfg, out, fmt, rep)
    if name in ALWAYS_CHECK:
        rep.checks += ALWAYS_CHECK[name]()
    if cfg["run"]["acceptance"] if acceptance is None else acceptance:
        for k in () if name in ALWAYS_CHECK else SCENARIO_CRITERIA[name]:
            for c in checks.CRITERIA[k]():
                c.name = f"criterion_{k}.{c.name}"
                rep.checks.append(c)
    rep.wall_time = time.perf_counter() - t
    emit_report(rep, out / "report.json")
    return rep


# argument parsing -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="artifact", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run one scenario")
    r.add_argument("scenario", choices=SCENARIOS)
    r.add_argument("--config", type=Path)
    r.add_argument("--out", type=Path, default=Path("artifact-out"))
    r.add_argument("--seed", type=int)
    r.add_argument("--format", choices=("csv", "json"), default="csv")
    r.add_argument("--acceptance", action="store_true", help="also run the attached acceptance criteria")
    h = sub.add_parser("howe", help="subgroup tables")
    hs = h.add_subparsers(dest="what", required=True)
    t = hs.add_parser("table", help="Howe subgroups of SU(2) x U(1)")
    t.add_argument("--pmax", type=int, default=6)
    t.add_argument("--format", choices=("csv", "json"), default="csv")
    t.add_argument("--out", type=Path)
    return p


def _howe(args) -> int:
    if args.pmax < 1:
        print("error: --pmax must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    text = strata.howe_table_text(args.pmax, args.format)
    if args.out is None:
        sys.stdout.write(text)
        return EXIT_OK
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / f"howe_pmax{args.pmax}.{args.format}").write_text(text)
    (args.out / f"su2_holonomy.{args.format}").write_text(strata.holonomy_table_text(args.format))
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "howe":
            return _howe(args)
        cfg = load_config(args.scenario, args.config, args.seed)
        rep = run_scenario(cfg, args.out, args.format, True if args.acceptance else None)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    for c in rep.checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name} value={c.value:.3e}")
    return EXIT_OK if rep.passed else EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
