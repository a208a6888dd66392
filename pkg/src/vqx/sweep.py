"""Bond-length sweeps over the numbered cases, and their CSV tables.

A sweep is a grid of independent *cells* ``(bond length, sample)``.  Each
cell builds the molecule, runs the solver for all target states and yields
one :class:`RunRecord` per state.  Cells fan out to a process pool whose size
is bounded by ``VQX_THREADS``; records are merged by sort key, so the output
does not depend on scheduling.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .cases import CASES, bond_length_grid, case_id, get_case, get_molecule
from .encoding import build_observables, qubit_hamiltonian
from .estimators import SSVQE, VQE
from .integrals import molecular_problem
from .oracle import ACCURACY_FLOOR, accuracy, fci_spectrum, target_level
from .validation import check_encoding

logger = logging.getLogger(__name__)

METHODS = ("vqe", "ssvqe")
OBJECTIVE_KEYS = ("deflation_coefficient", "deflation_shift", "tabu_width", "tabu_amplitude",
                  "weights", "smooth_deflation", "group_size")
OPTIMIZER_KEYS = ("max_updates", "value_tolerance", "line_search_tolerance", "initial_step", "init_noise")
VARIATIONAL_TOL = 1e-9


class ConfigError(ValueError):
    """Invalid run configuration."""


@dataclass
class RunConfig:
    """Everything needed to reproduce one case sweep.

    ``bond_lengths=None`` means the molecule's default grid.  Sample ``k``
    uses ``seeds[k]`` when given, otherwise ``seed + k``.
    """

    molecule: str = "H2"
    method: str = "vqe"
    constraints: bool = False
    tabu: bool = False
    encoding: str = "bk"
    bond_lengths: list[float] | None = None
    samples: int = 10
    seed: int = 0
    seeds: list[int] | None = None
    depth: int = 2
    optimizer: dict = field(default_factory=dict)
    objective: dict = field(default_factory=dict)
    out: str = "results"

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        try:
            get_molecule(self.molecule)
            check_encoding(self.encoding)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.samples < 1:
            raise ConfigError("samples must be >= 1")
        if self.seeds is not None and len(self.seeds) != self.samples:
            raise ConfigError("need exactly one seed per sample")
        if self.depth < 1:
            raise ConfigError("depth must be >= 1")
        for name, allowed in (("optimizer", OPTIMIZER_KEYS), ("objective", OBJECTIVE_KEYS)):
            extra = set(getattr(self, name)) - set(allowed)
            if extra:
                raise ConfigError(f"unknown {name} keys {sorted(extra)}; allowed {list(allowed)}")
        if self.bond_lengths is not None:
            if not self.bond_lengths or any(r <= 0 for r in self.bond_lengths):
                raise ConfigError("bond lengths must be positive")

    @property
    def case_id(self) -> int:
        return case_id(self.molecule, self.method, self.constraints, self.tabu)

    @classmethod
    def for_case(cls, cid: int, **kw) -> "RunConfig":
        c = get_case(cid)
        return cls(molecule=c.molecule, method=c.method, constraints=c.constraints, tabu=c.tabu, **kw)

    def grid(self) -> list[float]:
        if self.bond_lengths is None:
            return get_molecule(self.molecule).default_bond_lengths()
        return [float(r) for r in self.bond_lengths]

    def sample_seeds(self) -> list[int]:
        return list(self.seeds) if self.seeds is not None else [self.seed + k for k in range(self.samples)]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["case"] = self.case_id
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        cid = d.pop("case", None)
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys {sorted(extra)}")
        if "bond_lengths" not in d and any(k in d for k in ("r_min", "r_max", "step")):
            raise ConfigError("use bond_lengths in config files")
        if cid is not None:
            try:
                c = get_case(cid)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
            implied = {"molecule": c.molecule, "method": c.method, "constraints": c.constraints, "tabu": c.tabu}
            for k, v in implied.items():
                if k in d and d[k] != v:
                    raise ConfigError(f"case {cid} implies {k}={v!r}, config says {d[k]!r}")
            d.update(implied)
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> "RunConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def solver(self, seed: int):
        preset = get_molecule(self.molecule)
        cls = VQE if self.method == "vqe" else SSVQE
        return cls(states=list(preset.states), encoding=self.encoding, depth=self.depth,
                   constraints=self.constraints, tabu=self.tabu, tabu_targets=preset.tabu,
                   random_state=seed, **self.optimizer, **self.objective)


@dataclass
class RunRecord:
    molecule: str
    case: int
    r: float
    state: int
    label: str
    sample: int
    seed: int
    energy: float
    e_fci: float
    accuracy: float
    updates_to_convergence: int
    updates: int
    sector_ground: float
    max_overlap: float
    status: str = "ok"
    error: str = ""
    wall_time: float = 0.0

    @property
    def key(self):
        return (self.case, self.r, self.state, self.sample)


@dataclass
class TraceRow:
    """One accepted update of one stage in one cell."""

    case: int
    r: float
    sample: int
    stage: int
    update: int
    objective: float
    energies: dict  # state index -> energy


@dataclass
class CellResult:
    records: list[RunRecord]
    traces: list[TraceRow]


def reference_levels(molecule: str, r: float, encoding: str = "bk"):
    """Exact target-level and sector-ground energies for every preset state."""
    preset = get_molecule(molecule)
    problem = molecular_problem(preset.geometry(r))
    H = qubit_hamiltonian(problem, encoding)
    spec = fci_spectrum(H, build_observables(problem.n_spatial, encoding))
    levels, floors = [], []
    for st in preset.states:
        n, sz, s2, rank = st.sector
        levels.append(target_level(spec, n=n, sz=sz, s2=s2, rank=rank))
        floors.append(target_level(spec, n=st.n_electrons, sz=st.sz))
    return problem, levels, floors


def run_cell(cfg: RunConfig, r: float, sample: int) -> CellResult:
    """Solve all target states at one bond length for one sample; never raises."""
    preset = get_molecule(cfg.molecule)
    seed = cfg.sample_seeds()[sample]
    cid = cfg.case_id
    t0 = time.perf_counter()
    try:
        problem, levels, floors = reference_levels(cfg.molecule, r, cfg.encoding)
        model = cfg.solver(seed).fit(problem)
    except Exception as exc:  # noqa: BLE001 -- a failed cell must not stop the sweep
        logger.warning("case %d r=%.3f sample %d failed: %s", cid, r, sample, exc)
        wall = time.perf_counter() - t0
        recs = [RunRecord(cfg.molecule, cid, r, j, st.label, sample, seed, math.nan, math.nan, math.nan,
                          0, 0, math.nan, math.nan, "failed", f"{type(exc).__name__}: {exc}", wall)
                for j, st in enumerate(preset.states)]
        return CellResult(recs, [])
    wall = time.perf_counter() - t0
    records, traces = [], []
    for s_idx, stage in enumerate(model.stages_):
        conv = stage.trace.updates_to_convergence()
        overlap = stage.max_overlap if cfg.method == "ssvqe" else math.nan
        for j in stage.indices:
            e = float(model.energies_[j])
            records.append(RunRecord(cfg.molecule, cid, r, j, preset.states[j].label, sample, seed, e,
                                     levels[j], accuracy(e, levels[j]), conv, stage.trace.updates_used,
                                     floors[j], overlap, wall_time=wall))
        for u, (obj, row) in enumerate(zip(stage.trace.update_values, stage.update_energies), start=1):
            traces.append(TraceRow(cid, r, sample, s_idx, u, obj, dict(zip(stage.indices, map(float, row)))))
    return CellResult(records, traces)


def _worker_count() -> int:
    raw = os.environ.get("VQX_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"VQX_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


def run_case(cfg: RunConfig, workers: int | None = None) -> tuple[list[RunRecord], list[TraceRow]]:
    """Run every ``(bond length, sample)`` cell of ``cfg``.

    Returns records sorted by ``(case, r, state, sample)`` and trace rows
    sorted by ``(case, r, sample, stage, update)``.
    """
    cfg.validate()
    cells = [(r, k) for r in cfg.grid() for k in range(cfg.samples)]
    workers = _worker_count() if workers is None else max(1, workers)
    if workers == 1 or len(cells) == 1:
        results = [run_cell(cfg, r, k) for r, k in cells]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(cells))) as pool:
            futures = [pool.submit(run_cell, cfg, r, k) for r, k in cells]
            results = [f.result() for f in futures]
    records = sorted((rec for res in results for rec in res.records), key=lambda x: x.key)
    traces = sorted((t for res in results for t in res.traces),
                    key=lambda t: (t.case, t.r, t.sample, t.stage, t.update))
    return records, traces


# -- tables ---------------------------------------------------------------------

ENERGY_COLUMNS = ("molecule", "case", "r", "state", "label", "sample", "seed", "energy", "e_fci",
                  "accuracy", "updates_to_convergence", "updates", "sector_ground", "max_overlap",
                  "status", "error")


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(v)
    return str(v)


def _r_tag(r: float) -> str:
    return f"{r:.3f}".replace(".", "p")


def accuracy_rows(records: list[RunRecord]) -> list[dict]:
    """Mean/min/max of energy and accuracy per ``(case, r, state)`` over successful samples."""
    groups: dict = {}
    for rec in records:
        groups.setdefault((rec.case, rec.r, rec.state), []).append(rec)
    rows = []
    for (cid, r, j), recs in sorted(groups.items()):
        ok = [x for x in recs if x.status == "ok"]
        e = np.array([x.energy for x in ok])
        a = np.array([x.accuracy for x in ok])
        u = np.array([x.updates_to_convergence for x in ok], dtype=float)
        stat = (lambda v, f: float(f(v)) if v.size else math.nan)
        rows.append({
            "molecule": recs[0].molecule, "case": cid, "r": r, "state": j, "label": recs[0].label,
            "n_ok": len(ok), "n_failed": len(recs) - len(ok), "e_fci": recs[0].e_fci,
            "energy_mean": stat(e, np.mean), "energy_min": stat(e, np.min), "energy_max": stat(e, np.max),
            "accuracy_mean": stat(a, np.mean), "accuracy_min": stat(a, np.min), "accuracy_max": stat(a, np.max),
            "updates_to_convergence_mean": stat(u, np.mean),
        })
    return rows


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def emit_tables(records: list[RunRecord], traces: list[TraceRow], out_dir) -> list[Path]:
    """Write ``energies.csv``, ``accuracy.csv``, ``timings.csv`` and per-point convergence traces.

    Wall times go to ``timings.csv`` only, so ``energies.csv`` is
    byte-identical across reruns.  Raises ``ValueError`` before touching the
    filesystem if there are no records.
    """
    if not records:
        raise ValueError("no records to emit")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if not os.access(out, os.W_OK):
        raise PermissionError(f"output directory {out} is not writable")
    records = sorted(records, key=lambda x: x.key)
    written = []

    p = out / "energies.csv"
    _write_csv(p, ENERGY_COLUMNS, ([getattr(rec, c) for c in ENERGY_COLUMNS] for rec in records))
    written.append(p)

    acc = accuracy_rows(records)
    p = out / "accuracy.csv"
    _write_csv(p, list(acc[0]), (list(row.values()) for row in acc))
    written.append(p)

    p = out / "timings.csv"
    cells = sorted({(x.case, x.r, x.sample): x.wall_time for x in records}.items())
    _write_csv(p, ("case", "r", "sample", "wall_time_s"), ((c, r, s, t) for (c, r, s), t in cells))
    written.append(p)

    by_point: dict = {}
    for t in traces:
        by_point.setdefault((t.case, t.r), []).append(t)
    n_states = 1 + max(x.state for x in records)
    header = ["sample", "stage", "update", "objective"] + [f"energy_state_{j}" for j in range(n_states)]
    for (cid, r), rows in sorted(by_point.items()):
        p = out / f"convergence_{cid}_{_r_tag(r)}.csv"
        _write_csv(p, header, ([t.sample, t.stage, t.update, t.objective]
                               + [t.energies.get(j, math.nan) for j in range(n_states)] for t in rows))
        written.append(p)
    return written


def read_energies(path) -> list[RunRecord]:
    """Load ``energies.csv`` back into records (wall time is not stored there)."""
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            f = lambda k: float(row[k]) if row[k] != "" else math.nan  # noqa: E731
            out.append(RunRecord(row["molecule"], int(row["case"]), float(row["r"]), int(row["state"]),
                                 row["label"], int(row["sample"]), int(row["seed"]), f("energy"), f("e_fci"),
                                 f("accuracy"), int(row["updates_to_convergence"]), int(row["updates"]),
                                 f("sector_ground"), f("max_overlap"), row["status"], row["error"]))
    return out


def read_convergence(path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        return [{k: (float(v) if v != "" else math.nan) for k, v in row.items()} for row in csv.DictReader(fh)]


def variational_violations(records: list[RunRecord], tol: float = VARIATIONAL_TOL) -> list[RunRecord]:
    """Records whose energy lies below the ground level of their ``(N, S_z)`` sector by more than ``tol``."""
    return [x for x in records if x.status == "ok" and x.energy < x.sector_ground - tol]


__all__ = ["CASES", "ACCURACY_FLOOR", "CellResult", "ConfigError", "RunConfig", "RunRecord", "TraceRow",
           "accuracy_rows", "bond_length_grid", "emit_tables", "read_convergence", "read_energies",
           "reference_levels", "run_case", "run_cell", "variational_violations"]
