"""Physics-inspired solvers: rotor annealing, parallel tempering with
isoenergetic cluster moves, and min-sum message passing."""

from __future__ import annotations

import time

import numpy as np

from .. import _kernels
from ..model import InputError
from ..schedule import ScheduleTable
from ..seeding import derive_seed
from ..traces import SolveTrace, SolverBudget

# Fixed inverse temperature of the rotor simulation, in 1/GHz (matches a
# 12 mK device temperature with the Planck constant set to one).
ROTOR_BETA = 3.9983

DEFAULT_NUM_REPLICAS = 64
BETA_LADDER_RANGE = (0.1, 8.0)


def _arrays(model):
    indptr, indices, weights = model.adjacency
    return indptr, indices, weights, model.h


def _merge_members(trace, members, offset):
    """Fold independent parallel members into one trace.

    Members are reduced in index order: the ensemble's best is the running
    minimum of member results and its clock is the running maximum of
    member durations, emulating ideal execution on len(members) cores.
    """
    elapsed = 0.0
    for member in members:
        elapsed = max(elapsed, member["elapsed"])
        trace.record(elapsed, member["energy"] + offset, member["config"])
    trace.elapsed_total = elapsed


def svmc(model, schedule=None, steps=1000, sweeps_per_step=1, restarts=1,
         seed=0, beta=ROTOR_BETA):
    """Spin-vector Monte Carlo: anneal two-dimensional rotors, then project.

    Rotors start at theta = pi/2 and follow the interpolated schedule at
    s_k = k/steps (k = 1..steps), with ``sweeps_per_step`` Metropolis
    sweeps per step at fixed inverse temperature ``beta``.  ``restarts``
    independent runs with derived seeds are reduced to their minimum, and
    the reported energies are plain Ising energies of the projections.
    """
    if steps < 1:
        raise InputError(f"steps must be >= 1, got {steps}")
    if sweeps_per_step < 1:
        raise InputError(f"sweeps_per_step must be >= 1, got {sweeps_per_step}")
    if restarts < 1:
        raise InputError(f"restarts must be >= 1, got {restarts}")
    schedule = schedule if schedule is not None else ScheduleTable.default()
    s_grid = np.arange(1, steps + 1, dtype=np.float64) / steps
    a_vals, b_vals = schedule.interpolate(s_grid)
    params = {"steps": steps, "sweeps_per_step": sweeps_per_step,
              "restarts": restarts, "beta": beta}
    trace = SolveTrace(solver="svmc", params=params, seed=seed)
    indptr, indices, weights, h = _arrays(model)
    members = []
    for member in range(restarts):
        t0 = time.perf_counter()
        cfg, e = _kernels.svmc_run(indptr, indices, weights, h, a_vals, b_vals,
                                   sweeps_per_step, beta,
                                   derive_seed(seed, "svmc-member", member))
        members.append({"elapsed": time.perf_counter() - t0,
                        "energy": e, "config": cfg})
    _merge_members(trace, members, model.offset)
    return trace


def default_betas(n_replicas=DEFAULT_NUM_REPLICAS):
    """Geometric inverse-temperature ladder over the standard range."""
    lo, hi = BETA_LADDER_RANGE
    return np.geomspace(lo, hi, n_replicas)


# Feedback-tuned 64-replica ladder: produced by tune_betas() on the
# reference instance (family cbfm-p, m=16, seed=1), equalizing neighbor
# swap acceptance; see demos/06_tune_pt_ladder.py for the recipe.
_TUNED_BETAS = None  # filled in below


def tuned_betas():
    """64-value ladder spanning [0.1, 8] with near-uniform swap acceptance."""
    return _TUNED_BETAS.copy()


def _check_ladder(betas):
    betas = np.asarray(betas, dtype=np.float64)
    if betas.ndim != 1 or len(betas) < 2:
        raise InputError("beta ladder must be 1-d with at least two entries")
    if np.any(np.diff(betas) <= 0):
        raise InputError("beta ladder must be strictly increasing")
    return betas


def pt_icm(model, betas=None, rounds=1000, restarts=1, seed=0,
           sweeps_per_round=2, icm_beta_threshold=1.0, diagnostics=None,
           debug=False):
    """Two parallel-tempering stacks with isoenergetic cluster moves.

    Per round, every replica of both stacks runs ``sweeps_per_round``
    Metropolis sweeps; neighboring-temperature swaps are attempted per
    stack in random pair order with probability
    min(1, exp((beta_r - beta_r')(E_r - E_r'))); then, for each inverse
    temperature above ``icm_beta_threshold``, the connected cluster of
    opposite-overlap sites around a random such site is flipped in both
    stacks.  The best energy ever seen across all replicas is tracked.

    ``restarts`` independent simulations reduce to their minimum.  When
    ``diagnostics`` is a dict, it receives per-pair swap statistics and the
    per-move cluster logs; ``debug=True`` additionally asserts after every
    round that cluster moves preserved all overlaps and conserved the
    energy sum of each replica pair to 1e-9.
    """
    betas = _check_ladder(default_betas() if betas is None else betas)
    if rounds < 1:
        raise InputError(f"rounds must be >= 1, got {rounds}")
    if restarts < 1:
        raise InputError(f"restarts must be >= 1, got {restarts}")
    n_rep = len(betas)
    params = {"replicas": n_rep, "rounds": rounds, "restarts": restarts,
              "sweeps_per_round": sweeps_per_round}
    trace = SolveTrace(solver="pt-icm", params=params, seed=seed)
    indptr, indices, weights, h = _arrays(model)
    n = model.n

    collect = diagnostics is not None or debug
    log_cap = rounds * n_rep if collect else 0
    swap_attempts_all = np.zeros(n_rep - 1, dtype=np.int64)
    swap_accepts_all = np.zeros(n_rep - 1, dtype=np.int64)
    all_dsum = []
    all_qok = []

    members = []
    for member in range(restarts):
        member_seed = derive_seed(seed, "pt-member", member)
        spins, energies = _kernels.init_random_replicas(
            indptr, indices, weights, h, n_rep, n, derive_seed(member_seed, "init"))
        best_energy = np.array([np.inf])
        best_config = np.zeros(n, dtype=np.int8)
        if n == 0:
            best_energy[0] = 0.0
        else:
            idx = np.unravel_index(np.argmin(energies), energies.shape)
            best_energy[0] = energies[idx]
            best_config[:] = spins[idx[0], idx[1]]
        log_dsum = np.zeros(log_cap, dtype=np.float64)
        log_qok = np.zeros(log_cap, dtype=np.int8)
        log_count = np.zeros(1, dtype=np.int64)
        t0 = time.perf_counter()
        events = []
        for rnd in range(rounds):
            before = best_energy[0]
            logged = log_count[0]
            _kernels.pt_round(indptr, indices, weights, h, betas, spins,
                              energies, sweeps_per_round, icm_beta_threshold,
                              derive_seed(member_seed, "round", rnd),
                              swap_attempts_all, swap_accepts_all,
                              log_cap, log_count, log_dsum, log_qok,
                              best_energy, best_config)
            if debug and log_count[0] > logged:
                fresh = slice(logged, log_count[0])
                assert np.all(np.abs(log_dsum[fresh]) <= 1e-9), \
                    "cluster move failed to conserve the replica-pair energy sum"
                assert np.all(log_qok[fresh] == 1), \
                    "cluster move failed to preserve site overlaps"
            if best_energy[0] < before:
                events.append((time.perf_counter() - t0, best_energy[0],
                               best_config.copy()))
        elapsed = time.perf_counter() - t0
        if not events or events[-1][1] > best_energy[0]:
            events.append((elapsed, best_energy[0], best_config.copy()))
        members.append({"elapsed": elapsed, "energy": best_energy[0],
                        "config": best_config.copy(), "events": events})
        if collect:
            all_dsum.append(log_dsum[: log_count[0]].copy())
            all_qok.append(log_qok[: log_count[0]].copy())

    if restarts == 1:
        # single simulation: keep the full improvement series
        member = members[0]
        for t, e, cfg in member["events"]:
            trace.record(t, e + model.offset, cfg)
        trace.elapsed_total = member["elapsed"]
    else:
        _merge_members(trace, members, model.offset)

    if diagnostics is not None:
        dsum = np.concatenate(all_dsum) if all_dsum else np.zeros(0)
        qok = np.concatenate(all_qok) if all_qok else np.zeros(0, dtype=np.int8)
        diagnostics["icm_moves"] = int(len(dsum))
        diagnostics["icm_energy_sum_drift"] = dsum
        diagnostics["icm_overlap_preserved"] = qok.astype(bool)
        diagnostics["swap_attempts"] = swap_attempts_all
        diagnostics["swap_accepts"] = swap_accepts_all
    return trace


def measure_swap_acceptance(model, betas, rounds=1000, seed=0, warmup=0):
    """Per-neighbor-pair swap acceptance rates from a PT-ICM run."""
    diag = {}
    betas = _check_ladder(betas)
    if warmup:
        # advance past the transient before measuring
        pt_icm(model, betas=betas, rounds=warmup, seed=derive_seed(seed, "warm"))
    pt_icm(model, betas=betas, rounds=rounds, seed=seed, diagnostics=diag)
    att = diag["swap_attempts"]
    acc = diag["swap_accepts"]
    with np.errstate(invalid="ignore"):
        return np.where(att > 0, acc / np.maximum(att, 1), np.nan)


def tune_betas(model, n_replicas=DEFAULT_NUM_REPLICAS, beta_range=BETA_LADDER_RANGE,
               rounds_per_iteration=200, iterations=6, seed=0):
    """Feedback-equalize neighbor swap acceptance over a fixed beta range.

    Starting from a geometric ladder, each iteration measures per-pair
    swap rejection on ``model`` and re-spaces the interior inverse
    temperatures so every pair carries an equal share of the cumulative
    rejection, keeping the endpoints fixed.
    """
    lo, hi = beta_range
    betas = np.geomspace(lo, hi, n_replicas)
    for it in range(iterations):
        rates = measure_swap_acceptance(model, betas,
                                        rounds=rounds_per_iteration,
                                        seed=derive_seed(seed, "tune", it))
        resistance = np.clip(1.0 - rates, 1e-3, None)
        cumulative = np.concatenate([[0.0], np.cumsum(resistance)])
        targets = np.linspace(0.0, cumulative[-1], n_replicas)
        betas = np.interp(targets, cumulative, betas)
        betas[0], betas[-1] = lo, hi
        betas = np.maximum.accumulate(betas)
        # nudge apart any collapsed interior points
        for r in range(1, n_replicas):
            if betas[r] <= betas[r - 1]:
                betas[r] = betas[r - 1] * (1.0 + 1e-6)
        betas[-1] = hi
    return betas


def min_sum(model, budget=None, seed=0, tol=1e-9):
    """Min-sum message passing with the symmetric saturating linear rule.

    Messages on directed edges update synchronously until the largest
    message change falls below ``tol`` or the budget runs out; the decoded
    configuration assigns each site against the sign of its total incoming
    message (random sign on ties).
    """
    budget = budget or SolverBudget(iterations=10_000)
    indptr, indices, weights, h = _arrays(model)
    params = {"tol": tol,
              "iterations": budget.iterations if budget.iterations is not None
              else "time-limited"}
    trace = SolveTrace(solver="min-sum", params=params, seed=seed)
    start = time.perf_counter()
    deadline = budget.deadline(start)

    rev = _reverse_positions(model)
    msgs = np.zeros(len(indices), dtype=np.float64)
    chunk = 128
    iters_left = budget.iterations
    total_iters = 0
    while True:
        step = chunk if iters_left is None else min(chunk, iters_left)
        if step <= 0:
            break
        ran, change = _kernels.minsum_iterate(indptr, indices, weights, rev,
                                              h, msgs, step, tol)
        total_iters += ran
        if iters_left is not None:
            iters_left -= ran
        if change <= tol or SolverBudget.expired(deadline):
            break

    sum_in = np.zeros(model.n)
    np.add.at(sum_in, np.repeat(np.arange(model.n), np.diff(indptr)), msgs)
    decision = 2.0 * h + sum_in
    rng = np.random.default_rng(derive_seed(seed, "min-sum-ties"))
    cfg = np.where(decision > 0, -1, np.where(decision < 0, 1, 0)).astype(np.int8)
    zeros = cfg == 0
    cfg[zeros] = rng.integers(0, 2, size=int(zeros.sum())).astype(np.int8) * 2 - 1
    e = _kernels.energy_of(indptr, indices, weights, h, cfg)
    trace.params["iterations_run"] = total_iters
    trace.record(time.perf_counter() - start, e + model.offset, cfg)
    trace.elapsed_total = time.perf_counter() - start
    return trace


def ssl(x, y):
    """Symmetric saturating linear transfer: min(x,y) - min(-x,y) - x."""
    return min(x, y) - min(-x, y) - x


def _reverse_positions(model):
    """For CSR position p = (owner j, neighbor i), the position of (i, j)."""
    indptr, indices, _ = model.adjacency
    n = model.n
    owners = np.repeat(np.arange(n), np.diff(indptr))
    rev = np.empty(len(indices), dtype=np.int64)
    slot = {}
    for p in range(len(indices)):
        key = (int(indices[p]), int(owners[p]))
        slot[key] = p
    for p in range(len(indices)):
        rev[p] = slot[(int(owners[p]), int(indices[p]))]
    return rev
