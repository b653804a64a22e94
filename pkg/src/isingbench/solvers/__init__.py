"""Solver registry: one entry point per heuristic, shared by the CLI and
the benchmark harness."""

from __future__ import annotations

import numpy as np

from ..model import InputError
from ..schedule import ScheduleTable, read_schedule_csv
from ..traces import SolverBudget
from . import local, physics
from .local import glauber, scd, simulated_annealing, tabu
from .physics import default_betas, min_sum, pt_icm, svmc, tuned_betas

__all__ = ["scd", "glauber", "tabu", "simulated_annealing",
           "svmc", "pt_icm", "min_sum", "default_betas", "tuned_betas",
           "run_solver", "SOLVER_NAMES"]


def _reject_unknown(name, options):
    if options:
        raise InputError(
            f"unknown option(s) for solver {name!r}: {sorted(options)}")


def _budget(options, **defaults):
    fields = {}
    for name in ("time_limit_s", "sweeps", "reads", "restarts", "iterations"):
        value = options.pop(name, defaults.get(name))
        if value is not None:
            fields[name] = value
    return SolverBudget(**fields)


def _run_scd(model, options, seed):
    budget = _budget(options)
    _reject_unknown("scd", options)
    return scd(model, budget, seed=seed)


def _run_gd(model, options, seed):
    budget = _budget(options)
    _reject_unknown("gd", options)
    return glauber(model, budget, seed=seed)


def _run_tabu(model, options, seed):
    tenure = options.pop("tenure", 20)
    read_timeout = options.pop("read_timeout_s", 1.0)
    budget = _budget(options, reads=1)
    _reject_unknown("tabu", options)
    return tabu(model, budget, seed=seed, tenure=tenure,
                read_timeout_s=read_timeout)


def _run_sa(model, options, seed):
    hot = options.pop("beta_hot", None)
    cold = options.pop("beta_cold", None)
    beta_range = (hot, cold) if hot is not None and cold is not None else None
    budget = _budget(options, reads=100, sweeps=1000)
    _reject_unknown("sa", options)
    return simulated_annealing(model, budget, seed=seed, beta_range=beta_range)


def _resolve_schedule(value):
    if value is None:
        return ScheduleTable.default()
    if isinstance(value, ScheduleTable):
        return value
    return read_schedule_csv(value)


def _run_svmc(model, options, seed):
    schedule = _resolve_schedule(options.pop("schedule", None))
    kwargs = {}
    for key in ("steps", "sweeps_per_step", "restarts", "beta"):
        value = options.pop(key, None)
        if value is not None:
            kwargs[key] = value
    _reject_unknown("svmc", options)
    return svmc(model, schedule=schedule, seed=seed, **kwargs)


def _resolve_betas(value):
    if value is None or value == "default":
        return default_betas()
    if isinstance(value, str):
        if value == "tuned":
            return tuned_betas()
        raise InputError(f"unknown beta ladder {value!r}; use 'default' or 'tuned'")
    return np.asarray(value, dtype=np.float64)


def _run_pt_icm(model, options, seed):
    betas = _resolve_betas(options.pop("betas", None))
    kwargs = {}
    for key in ("rounds", "restarts", "sweeps_per_round"):
        value = options.pop(key, None)
        if value is not None:
            kwargs[key] = value
    _reject_unknown("pt-icm", options)
    return pt_icm(model, betas=betas, seed=seed, **kwargs)


def _run_min_sum(model, options, seed):
    tol = options.pop("tol", 1e-9)
    budget = _budget(options, iterations=10_000)
    _reject_unknown("min-sum", options)
    return min_sum(model, budget, seed=seed, tol=tol)


_RUNNERS = {
    "scd": _run_scd,
    "gd": _run_gd,
    "tabu": _run_tabu,
    "sa": _run_sa,
    "svmc": _run_svmc,
    "pt-icm": _run_pt_icm,
    "min-sum": _run_min_sum,
}

SOLVER_NAMES = tuple(sorted(_RUNNERS))


def run_solver(name, model, options=None, seed=0):
    """Dispatch to a solver by name with a flat options mapping.

    Unknown solver names or option keys raise InputError listing the valid
    choices.
    """
    if name not in _RUNNERS:
        raise InputError(
            f"unknown solver {name!r}; valid solvers: {', '.join(SOLVER_NAMES)}")
    return _RUNNERS[name](model, dict(options or {}), seed)
