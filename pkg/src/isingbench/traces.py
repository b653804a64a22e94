"""Solver run records: best-so-far traces and execution budgets."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .model import InputError


@dataclass
class SolveTrace:
    """Timestamped best-so-far series for one solver execution.

    events holds (elapsed_seconds, best_energy) pairs appended whenever the
    incumbent improves; energies are non-increasing and times
    non-decreasing.  best_config is the final incumbent and its energy
    equals the last event energy.  elapsed_total is the full run duration,
    which can exceed the last improvement time.
    """

    solver: str
    params: dict
    seed: int
    events: list = field(default_factory=list)
    best_config: np.ndarray | None = None
    best_energy: float = float("inf")
    elapsed_total: float = 0.0

    def record(self, elapsed, energy, config=None):
        """Register a candidate result; keeps only improvements."""
        if energy < self.best_energy:
            self.best_energy = energy
            self.events.append((elapsed, energy))
            if config is not None:
                self.best_config = np.array(config, dtype=np.int8)

    def validate(self):
        times = [t for t, _ in self.events]
        energies = [e for _, e in self.events]
        if any(t2 < t1 for t1, t2 in zip(times, times[1:])):
            raise InputError("trace times must be non-decreasing")
        if any(e2 >= e1 for e1, e2 in zip(energies, energies[1:])):
            raise InputError("trace energies must be strictly decreasing")
        if self.events and self.best_energy != self.events[-1][1]:
            raise InputError("best energy must equal the final event energy")
        return self


@dataclass(frozen=True)
class SolverBudget:
    """Execution limits; at least one of the limits must be set.

    Solvers consume the fields relevant to them: time_limit_s bounds wall
    clock for any solver; sweeps/reads drive simulated annealing and tabu
    search; restarts drives the greedy and descent solvers; iterations
    bounds message-passing updates and tabu moves per read.
    """

    time_limit_s: float | None = None
    sweeps: int | None = None
    reads: int | None = None
    restarts: int | None = None
    iterations: int | None = None

    def __post_init__(self):
        limits = (self.time_limit_s, self.sweeps, self.reads,
                  self.restarts, self.iterations)
        if all(v is None for v in limits):
            raise InputError("budget must set at least one limit")
        for name in ("sweeps", "reads", "restarts", "iterations"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise InputError(f"budget {name} must be >= 1, got {v}")
        if self.time_limit_s is not None and self.time_limit_s <= 0:
            raise InputError("budget time limit must be positive")

    def deadline(self, start):
        return None if self.time_limit_s is None else start + self.time_limit_s

    @staticmethod
    def expired(deadline):
        return deadline is not None and time.perf_counter() >= deadline


def write_trace_csv(trace, instance, path_or_file):
    """Append one CSV row per trace event.

    Columns: solver,instance,seed,param_key,elapsed_s,best_energy.
    """
    own = isinstance(path_or_file, (str, bytes))
    fh = open(path_or_file, "w", encoding="utf-8") if own else path_or_file
    try:
        fh.write("solver,instance,seed,param_key,elapsed_s,best_energy\n")
        key = param_key(trace.params)
        for elapsed, energy in trace.events:
            fh.write(f"{trace.solver},{instance},{trace.seed},{key},{elapsed!r},{energy!r}\n")
    finally:
        if own:
            fh.close()


def param_key(params):
    """Stable flat text key for a parameter mapping."""
    return ";".join(f"{k}={params[k]}" for k in sorted(params))


def monotone_envelope(points):
    """Best-so-far (time, energy) series from arbitrary result points.

    Sorts by time and keeps strict energy improvements, producing the
    monotone series that the time-to-match rule expects.
    """
    out = []
    best = float("inf")
    for t, e in sorted(points, key=lambda p: (p[0], p[1])):
        if e < best:
            best = e
            out.append((t, e))
    return out
