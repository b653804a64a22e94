"""Benchmark orchestration: solver x instance x budget grids, the
relative-difference and time-to-match metrics, and run-time ratio reports.

A grid cell is one solver execution: (solver spec, budget entry, instance,
repetition seed).  Cells persist incrementally under
``out_dir/cells/<cell>.csv`` (the event rows) plus a ``.json`` sidecar
with the cell's summary, making reruns resumable: completed cells are
skipped by key.  ``results.csv`` concatenates all event rows with columns

    solver,instance,seed,budget_key,elapsed_s,best_energy

Only the elapsed_s column is wall-clock dependent; energies replay
deterministically for a fixed grid and seed.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .instances import read_instance
from .model import InputError
from .seeding import derive_seed
from .solvers import SOLVER_NAMES, run_solver
from .traces import SolveTrace, monotone_envelope

UNMATCHED = None


def relative_difference(best_known, achieved):
    """Solution quality as a percentage: 100 |achieved - best| / |best|."""
    if best_known == 0:
        raise InputError("relative difference is undefined for a zero baseline")
    return 100.0 * abs(achieved - best_known) / abs(best_known)


def _check_monotone(events):
    for (t0, e0), (t1, e1) in zip(events, events[1:]):
        if t1 < t0:
            raise InputError("trace times must be non-decreasing")
        if e1 > e0:
            raise InputError("trace energies must be non-increasing")


def time_to_match(trace, target):
    """Earliest (interpolated) time at which a trace reaches ``target``.

    An event exactly at the target returns that event's time.  If the
    trace passes below the target, the crossing time is linearly
    interpolated between the bracketing events in the (energy, time)
    plane.  Returns None (unmatched) when the trace never reaches it.
    """
    events = trace.events if isinstance(trace, SolveTrace) else list(trace)
    _check_monotone(events)
    for k, (t, e) in enumerate(events):
        if e == target:
            return t
        if e < target:
            if k == 0:
                return t
            t_prev, e_prev = events[k - 1]
            return t_prev + (t - t_prev) * (target - e_prev) / (e - e_prev)
    return UNMATCHED


def batch_mean_stderr(values):
    """Sample mean and standard error (sd / sqrt(n))."""
    arr = np.asarray(values, dtype=np.float64)
    if len(arr) == 0:
        raise InputError("cannot aggregate an empty sample")
    if len(arr) == 1:
        return float(arr[0]), 0.0
    return float(np.mean(arr)), float(np.std(arr, ddof=1) / math.sqrt(len(arr)))


def streaming_mean_stderr(values):
    """Welford one-pass mean and standard error; agrees with the batch
    computation to ~1e-9, used as its independent cross-check."""
    count = 0
    mean = 0.0
    m2 = 0.0
    for v in values:
        count += 1
        delta = v - mean
        mean += delta / count
        m2 += delta * (v - mean)
    if count == 0:
        raise InputError("cannot aggregate an empty sample")
    if count == 1:
        return mean, 0.0
    var = m2 / (count - 1)
    return mean, math.sqrt(var / count)


# ---------------------------------------------------------------------------
# grid definition


@dataclass(frozen=True)
class SolverSpec:
    """One solver with a list of budget entries to sweep."""

    solver: str
    key: str
    params: dict = field(default_factory=dict)
    budgets: tuple = ()

    def __post_init__(self):
        if self.solver not in SOLVER_NAMES:
            raise InputError(
                f"unknown solver {self.solver!r}; valid: {', '.join(SOLVER_NAMES)}")
        for entry in self.budgets:
            if "key" not in entry:
                raise InputError(f"budget entry {entry} needs a 'key'")


@dataclass(frozen=True)
class BenchmarkGrid:
    """Instance set, solver specs with budget grids, and a reference spec.

    The reference spec produces the per-instance target energies that
    classical solvers must match (it stands in for whatever device or
    method defines 'reference quality').
    """

    instances: tuple
    solvers: tuple
    reference: SolverSpec
    seeds: tuple = (0,)

    @staticmethod
    def from_json(path):
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
        try:
            solvers = tuple(
                SolverSpec(solver=s["solver"], key=s.get("key", s["solver"]),
                           params=s.get("params", {}),
                           budgets=tuple(s.get("budgets", ({"key": "run"},))))
                for s in obj["solvers"])
            ref = obj["reference"]
            reference = SolverSpec(solver=ref["solver"],
                                   key=ref.get("key", "reference"),
                                   params=ref.get("params", {}),
                                   budgets=tuple(ref.get("budgets", ({"key": "ref"},))))
            return BenchmarkGrid(instances=tuple(obj["instances"]),
                                 solvers=solvers, reference=reference,
                                 seeds=tuple(obj.get("seeds", (0,))))
        except KeyError as exc:
            raise InputError(f"{path}: missing grid field {exc}") from exc

    def cells(self):
        """Deterministically ordered cell descriptors, reference included."""
        out = []
        for spec in (self.reference,) + tuple(self.solvers):
            for budget in spec.budgets:
                for inst in self.instances:
                    for seed in self.seeds:
                        out.append(Cell(spec=spec, budget=dict(budget),
                                        instance=inst, rep_seed=seed))
        return out


@dataclass(frozen=True)
class Cell:
    spec: SolverSpec
    budget: dict
    instance: str
    rep_seed: int

    @property
    def instance_name(self):
        base = os.path.basename(self.instance)
        return base[:-5] if base.endswith(".json") else base

    @property
    def key(self):
        return (f"{self.spec.key}__{self.instance_name}"
                f"__{self.budget['key']}__s{self.rep_seed}")


# ---------------------------------------------------------------------------
# execution and the result store


def _instance_cache():
    cache = {}

    def load(path):
        if path not in cache:
            cache[path] = read_instance(path)
        return cache[path]

    return load


_LOAD = _instance_cache()


def _run_cell(args):
    """Worker entry: execute one cell and return its summary row."""
    cell, base_seed = args
    model = _LOAD(cell.instance)
    options = dict(cell.spec.params)
    options.update({k: v for k, v in cell.budget.items() if k != "key"})
    seed = derive_seed(base_seed, cell.spec.key, cell.instance_name,
                       cell.budget["key"], cell.rep_seed)
    trace = run_solver(cell.spec.solver, model, options, seed=seed)
    size = model.metadata.get("m", model.n)
    return {
        "key": cell.key,
        "solver": cell.spec.key,
        "instance": cell.instance_name,
        "seed": cell.rep_seed,
        "budget_key": cell.budget["key"],
        "size": size,
        "best_energy": trace.best_energy,
        "elapsed_total": trace.elapsed_total,
        "events": [(t, e) for t, e in trace.events],
        "is_reference": False,  # set by the caller
    }


def run_grid(grid, out_dir, workers=1, base_seed=0):
    """Execute all grid cells, skipping any that already have results.

    Returns {"executed": n, "skipped": n, "failed": n}.  Failures are
    recorded per cell (<cell>.error.json) and do not abort the grid.
    """
    cells_dir = os.path.join(out_dir, "cells")
    os.makedirs(cells_dir, exist_ok=True)
    todo = []
    stats = {"executed": 0, "skipped": 0, "failed": 0}
    reference_key = grid.reference.key
    for cell in grid.cells():
        if os.path.exists(os.path.join(cells_dir, cell.key + ".json")):
            stats["skipped"] += 1
        else:
            todo.append(cell)

    def finish(cell, summary):
        summary["is_reference"] = cell.spec.key == reference_key
        _write_cell(cells_dir, summary)
        stats["executed"] += 1

    if workers <= 1:
        for cell in todo:
            try:
                finish(cell, _run_cell((cell, base_seed)))
            except Exception as exc:  # noqa: BLE001 - recorded, not raised
                _write_error(cells_dir, cell, exc)
                stats["failed"] += 1
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(_run_cell, (cell, base_seed)): cell
                       for cell in todo}
            for future, cell in futures.items():
                try:
                    finish(cell, future.result())
                except Exception as exc:  # noqa: BLE001
                    _write_error(cells_dir, cell, exc)
                    stats["failed"] += 1
    write_results_csv(out_dir)
    return stats


def _write_cell(cells_dir, summary):
    base = os.path.join(cells_dir, summary["key"])
    tmp = base + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(summary, fh)
    os.replace(tmp, base + ".json")


def _write_error(cells_dir, cell, exc):
    with open(os.path.join(cells_dir, cell.key + ".error.json"), "w",
              encoding="utf-8") as fh:
        json.dump({"key": cell.key, "error": f"{type(exc).__name__}: {exc}"}, fh)


def load_cells(out_dir):
    cells_dir = os.path.join(out_dir, "cells")
    out = []
    for name in sorted(os.listdir(cells_dir)):
        if name.endswith(".json") and not name.endswith(".error.json"):
            with open(os.path.join(cells_dir, name), "r", encoding="utf-8") as fh:
                out.append(json.load(fh))
    return out


def write_results_csv(out_dir):
    """Concatenate all cell event rows into results.csv (sorted by key)."""
    rows = load_cells(out_dir)
    path = os.path.join(out_dir, "results.csv")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("solver,instance,seed,budget_key,elapsed_s,best_energy\n")
        for cell in rows:
            for t, e in cell["events"]:
                fh.write(f"{cell['solver']},{cell['instance']},{cell['seed']},"
                         f"{cell['budget_key']},{t!r},{e!r}\n")
    return path


# ---------------------------------------------------------------------------
# run-time ratio report


@dataclass
class MatchReport:
    """Per-instance match times and per-ensemble run-time ratio summaries.

    details rows: {instance, seed, solver, size, target, time_to_match,
    ratio}.  summary rows: {size, solver, mean_ratio, stderr,
    matched_count, ensemble}; mean/stderr are None unless every member of
    the ensemble matched (the coverage rule for reporting a point).
    """

    details: list
    summary: list

    def summary_row(self, size, solver):
        for row in self.summary:
            if row["size"] == size and row["solver"] == solver:
                return row
        return None


def runtime_ratios(cells, reference_key=None):
    """Build a MatchReport from executed cells.

    For each (instance, seed): the reference cell supplies the target
    energy and the reference time (its total duration).  Each solver's
    budget-grid results become one monotone envelope of (total time, final
    energy) points, whose time-to-match against the target divides by the
    reference time to give the run-time ratio.  Ensemble statistics (per
    problem size and solver) are suppressed unless all members matched.
    """
    if isinstance(cells, str):
        cells = load_cells(cells)
    refs = {}
    for cell in cells:
        if cell.get("is_reference") or (reference_key is not None
                                        and cell["solver"] == reference_key):
            # seed None acts as a wildcard (externally supplied targets)
            unit = (cell["instance"], cell["seed"])
            prev = refs.get(unit)
            if prev is None or cell["best_energy"] < prev["best_energy"]:
                refs[unit] = cell

    groups = {}
    for cell in cells:
        if cell.get("is_reference") or (reference_key is not None
                                        and cell["solver"] == reference_key):
            continue
        unit = (cell["instance"], cell["seed"])
        if unit not in refs and (cell["instance"], None) not in refs:
            raise InputError(
                f"no reference result for instance {unit[0]!r} seed {unit[1]}")
        groups.setdefault((unit, cell["solver"], cell["size"]), []).append(cell)

    details = []
    ensembles = {}
    for ((instance, seed), solver, size), members in sorted(groups.items()):
        ref = refs.get((instance, seed)) or refs[(instance, None)]
        target = ref["best_energy"]
        ref_time = ref["elapsed_total"]
        points = [(c["elapsed_total"], c["best_energy"]) for c in members]
        envelope = monotone_envelope(points)
        ttm = time_to_match(envelope, target)
        ratio = None if ttm is None or ref_time <= 0 else ttm / ref_time
        details.append({"instance": instance, "seed": seed, "solver": solver,
                        "size": size, "target": target,
                        "time_to_match": ttm, "ratio": ratio})
        ensembles.setdefault((size, solver), []).append(ratio)

    summary = []
    for (size, solver), ratios in sorted(ensembles.items()):
        matched = [r for r in ratios if r is not None]
        if len(matched) == len(ratios):
            mean, stderr = batch_mean_stderr(matched)
        else:
            mean, stderr = None, None
        summary.append({"size": size, "solver": solver, "mean_ratio": mean,
                        "stderr": stderr, "matched_count": len(matched),
                        "ensemble": len(ratios)})
    return MatchReport(details=details, summary=summary)


def write_report_csv(report, path):
    """Write summary rows: size,solver,mean_ratio,stderr,matched_count."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("size,solver,mean_ratio,stderr,matched_count\n")
        for row in report.summary:
            mean = "" if row["mean_ratio"] is None else repr(row["mean_ratio"])
            stderr = "" if row["stderr"] is None else repr(row["stderr"])
            fh.write(f"{row['size']},{row['solver']},{mean},{stderr},"
                     f"{row['matched_count']}\n")
    return path


def read_external_results_csv(path):
    """Load reference results from an ``instance,energy,elapsed_s`` CSV.

    Returns synthetic reference cells usable by runtime_ratios, so targets
    produced outside this package (for example by a commercial solver or
    an annealer) can be spliced into a report.
    """
    cells = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header.replace(" ", "") != "instance,energy,elapsed_s":
            raise InputError(
                f"{path}: expected header 'instance,energy,elapsed_s', got {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise InputError(f"{path}:{lineno}: expected 3 fields")
            cells.append({"key": f"external__{parts[0]}", "solver": "external",
                          "instance": parts[0], "seed": None,
                          "budget_key": "external", "size": None,
                          "best_energy": float(parts[1]),
                          "elapsed_total": float(parts[2]),
                          "events": [], "is_reference": True})
    return cells
