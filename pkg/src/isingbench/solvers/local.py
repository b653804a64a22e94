"""Sweep- and restart-based local search heuristics.

All solvers return a SolveTrace whose events are deterministic functions
of (model, params, seed); only the wall-clock timestamps vary between
runs.  Models are never mutated.
"""

from __future__ import annotations

import math
import time

import numpy as np

from .. import _kernels
from ..model import InputError
from ..seeding import derive_seed
from ..traces import SolveTrace, SolverBudget


def _arrays(model):
    indptr, indices, weights = model.adjacency
    return indptr, indices, weights, model.h


def default_beta_range(model):
    """Geometric-ladder endpoints from the largest single-flip move.

    beta_hot accepts the worst uphill move with probability 1/2 and
    beta_cold with probability 1e-6.  Degenerate models (no couplings or
    fields) fall back to (1, 1).
    """
    dmax = model.max_abs_delta()
    if dmax <= 0.0:
        return 1.0, 1.0
    return math.log(2.0) / dmax, math.log(1e6) / dmax


def beta_schedule(model, sweeps, beta_range=None):
    hot, cold = beta_range if beta_range is not None else default_beta_range(model)
    if hot <= 0 or cold <= 0:
        raise InputError("beta endpoints must be positive")
    return np.geomspace(hot, cold, sweeps)


def simulated_annealing(model, budget=None, seed=0, beta_range=None):
    """Independent Metropolis anneals over a geometric beta ladder.

    budget.reads anneals are run (default 100); each sweeps every site once
    per ladder step, with budget.sweeps ladder steps (default 1000).  Moves
    with delta E <= 0 are always accepted, uphill moves with probability
    exp(-beta delta E).  Returns the best read.
    """
    budget = budget or SolverBudget(reads=100, sweeps=1000)
    reads = budget.reads if budget.reads is not None else 100
    sweeps = budget.sweeps if budget.sweeps is not None else 1000
    betas = beta_schedule(model, sweeps, beta_range)
    params = {"reads": reads, "sweeps": sweeps,
              "beta_hot": float(betas[0]), "beta_cold": float(betas[-1])}
    trace = SolveTrace(solver="sa", params=params, seed=seed)
    indptr, indices, weights, h = _arrays(model)
    start = time.perf_counter()
    deadline = budget.deadline(start)
    for read in range(reads):
        cfg, e = _kernels.sa_anneal(indptr, indices, weights, h, betas,
                                    derive_seed(seed, "sa-read", read))
        trace.record(time.perf_counter() - start, e + model.offset, cfg)
        if SolverBudget.expired(deadline):
            break
    trace.elapsed_total = time.perf_counter() - start
    return trace


def glauber(model, budget, seed=0):
    """Zero-temperature single-flip descent with random restarts.

    Each restart walks fresh random site orders, flipping any strictly
    improving site, until a full pass makes no flip (a 1-flip-stable local
    minimum); the best minimum over restarts wins.
    """
    if budget.restarts is None and budget.time_limit_s is None:
        raise InputError("glauber needs a restarts count or a time limit")
    restarts = budget.restarts
    params = {"restarts": restarts if restarts is not None else "time-limited"}
    trace = SolveTrace(solver="gd", params=params, seed=seed)
    indptr, indices, weights, h = _arrays(model)
    start = time.perf_counter()
    deadline = budget.deadline(start)
    r = 0
    while restarts is None or r < restarts:
        cfg, e = _kernels.descent_to_local_min(indptr, indices, weights, h,
                                               derive_seed(seed, "gd-restart", r))
        trace.record(time.perf_counter() - start, e + model.offset, cfg)
        r += 1
        if SolverBudget.expired(deadline):
            break
    trace.elapsed_total = time.perf_counter() - start
    return trace


def scd(model, budget, seed=0):
    """Greedy steepest coordinate descent with restarts.

    Starts from the all-unassigned configuration and repeatedly assigns the
    (site, value) pair that most lowers the partial energy, breaking argmin
    ties uniformly at random, until complete; repeats until the budget runs
    out and returns the best construction.
    """
    if budget.restarts is None and budget.time_limit_s is None:
        raise InputError("scd needs a restarts count or a time limit")
    restarts = budget.restarts
    params = {"restarts": restarts if restarts is not None else "time-limited"}
    trace = SolveTrace(solver="scd", params=params, seed=seed)
    indptr, indices, weights, h = _arrays(model)
    start = time.perf_counter()
    deadline = budget.deadline(start)
    r = 0
    while restarts is None or r < restarts:
        cfg, e = _kernels.scd_construct(indptr, indices, weights, h,
                                        derive_seed(seed, "scd-restart", r))
        trace.record(time.perf_counter() - start, e + model.offset, cfg)
        r += 1
        if SolverBudget.expired(deadline):
            break
    trace.elapsed_total = time.perf_counter() - start
    return trace


_TABU_CHUNK = 512


def tabu(model, budget, seed=0, tenure=20, read_timeout_s=1.0):
    """Multistart single-flip tabu search.

    Each read starts from a random configuration and repeatedly takes the
    steepest admissible flip; a flipped site stays tabu for ``tenure``
    moves unless flipping it would beat the best energy seen so far
    (aspiration).  A read ends after budget.iterations moves or
    ``read_timeout_s`` seconds, whichever comes first; budget.reads reads
    are run (default 1).
    """
    reads = budget.reads if budget.reads is not None else 1
    read_iters = budget.iterations
    if read_iters is None and read_timeout_s is None:
        raise InputError("tabu needs per-read iterations or a read timeout")
    params = {"reads": reads, "tenure": tenure,
              "iterations": read_iters if read_iters is not None else "time-limited"}
    trace = SolveTrace(solver="tabu", params=params, seed=seed)
    indptr, indices, weights, h = _arrays(model)
    n = model.n
    start = time.perf_counter()
    if n == 0:
        trace.record(0.0, model.offset, np.zeros(0, dtype=np.int8))
        trace.elapsed_total = time.perf_counter() - start
        return trace
    deadline = budget.deadline(start)
    global_best = np.inf
    for read in range(reads):
        rng = np.random.default_rng(derive_seed(seed, "tabu-init", read))
        s = (rng.integers(0, 2, size=n).astype(np.int8) * 2 - 1)
        locals_ = _kernels.compute_locals(indptr, indices, weights, h, s)
        cur_e = _kernels.energy_of(indptr, indices, weights, h, s)
        trace.record(time.perf_counter() - start, cur_e + model.offset, s)
        global_best = min(global_best, cur_e)
        tabu_until = np.zeros(n, dtype=np.int64)
        best_s = s.copy()
        state = np.array([cur_e, global_best, 0.0])
        read_start = time.perf_counter()
        read_deadline = (None if read_timeout_s is None
                         else read_start + read_timeout_s)
        chunk_idx = 0
        done = 0
        while True:
            if read_iters is not None:
                iters = min(_TABU_CHUNK, read_iters - done)
                if iters <= 0:
                    break
            else:
                iters = _TABU_CHUNK
            _kernels.tabu_iterate(indptr, indices, weights, h, s, locals_,
                                  tabu_until, best_s, state, tenure, iters,
                                  derive_seed(seed, "tabu-read", read, chunk_idx))
            done += iters
            chunk_idx += 1
            if state[1] < global_best:
                global_best = state[1]
                trace.record(time.perf_counter() - start,
                             global_best + model.offset, best_s)
            if SolverBudget.expired(read_deadline) or SolverBudget.expired(deadline):
                break
        if SolverBudget.expired(deadline):
            break
    trace.elapsed_total = time.perf_counter() - start
    return trace
