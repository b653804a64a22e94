"""Numba kernels for the hot solver loops.

All kernels take the model as CSR adjacency arrays (indptr, indices,
weights; every coupler stored in both directions) plus dense linear
coefficients h.  Every kernel that draws randomness seeds numba's
generator on entry, so a call's output is a pure function of its
arguments; wrappers derive per-call seeds from the run seed.
"""

from __future__ import annotations

import numpy as np
from numba import njit

F8 = np.float64
I8 = np.int8


@njit(cache=True)
def energy_of(indptr, indices, weights, h, s):
    """Quadratic-plus-linear energy; sigma=0 sites contribute nothing."""
    quad = 0.0
    lin = 0.0
    n = len(h)
    for i in range(n):
        si = s[i]
        if si == 0:
            continue
        lin += h[i] * si
        acc = 0.0
        for p in range(indptr[i], indptr[i + 1]):
            acc += weights[p] * s[indices[p]]
        quad += si * acc
    return 0.5 * quad + lin


@njit(cache=True)
def local_field(indptr, indices, weights, h, s, i):
    acc = h[i]
    for p in range(indptr[i], indptr[i + 1]):
        acc += weights[p] * s[indices[p]]
    return acc


@njit(cache=True)
def _rand_spins(n):
    s = np.empty(n, dtype=I8)
    for i in range(n):
        s[i] = 1 if np.random.random() < 0.5 else -1
    return s


@njit(cache=True)
def _shuffle(order):
    for i in range(len(order) - 1, 0, -1):
        j = np.random.randint(0, i + 1)
        tmp = order[i]
        order[i] = order[j]
        order[j] = tmp


# ---------------------------------------------------------------------------
# simulated annealing


@njit(cache=True)
def sa_anneal(indptr, indices, weights, h, betas, seed):
    """One anneal: random start, Metropolis sweeps along the beta ladder.

    Returns (final_config, final_energy).
    """
    np.random.seed(seed)
    n = len(h)
    s = _rand_spins(n)
    for t in range(len(betas)):
        beta = betas[t]
        for i in range(n):
            delta = -2.0 * s[i] * local_field(indptr, indices, weights, h, s, i)
            if delta <= 0.0 or np.random.random() < np.exp(-beta * delta):
                s[i] = -s[i]
    return s, energy_of(indptr, indices, weights, h, s)


@njit(cache=True)
def fixed_beta_uphill_stats(indptr, indices, weights, h, beta, sweeps, seed):
    """Metropolis chain at fixed beta counting uphill proposals/acceptances."""
    np.random.seed(seed)
    n = len(h)
    s = _rand_spins(n)
    attempts = 0
    accepts = 0
    for _ in range(sweeps):
        for i in range(n):
            delta = -2.0 * s[i] * local_field(indptr, indices, weights, h, s, i)
            if delta <= 0.0:
                s[i] = -s[i]
            else:
                attempts += 1
                if np.random.random() < np.exp(-beta * delta):
                    accepts += 1
                    s[i] = -s[i]
    return attempts, accepts


# ---------------------------------------------------------------------------
# zero-temperature descent (random-order single-flip)


@njit(cache=True)
def descent_to_local_min(indptr, indices, weights, h, seed):
    """Random start, then strictly improving flips over fresh random site
    orders until no single flip lowers the energy.

    Returns (config, energy) at the 1-flip-stable minimum.
    """
    np.random.seed(seed)
    n = len(h)
    s = _rand_spins(n)
    order = np.arange(n)
    improved = True
    while improved:
        improved = False
        _shuffle(order)
        for t in range(n):
            i = order[t]
            delta = -2.0 * s[i] * local_field(indptr, indices, weights, h, s, i)
            if delta < 0.0:
                s[i] = -s[i]
                improved = True
    return s, energy_of(indptr, indices, weights, h, s)


# ---------------------------------------------------------------------------
# steepest coordinate descent (greedy one-by-one assignment)


@njit(cache=True)
def scd_construct(indptr, indices, weights, h, seed):
    """Assign sites one at a time, always taking the assignment that most
    lowers the partial energy; argmin ties are broken uniformly at random.

    Returns (config, energy) of the completed assignment.
    """
    np.random.seed(seed)
    n = len(h)
    s = np.zeros(n, dtype=I8)
    f = h.copy()  # running local field over assigned neighbors
    unassigned = np.arange(n)
    ties = np.empty(n, dtype=np.int64)
    for remaining in range(n, 0, -1):
        best = -1.0
        n_ties = 0
        for t in range(remaining):
            mag = abs(f[unassigned[t]])
            if mag > best:
                best = mag
                ties[0] = t
                n_ties = 1
            elif mag == best:
                ties[n_ties] = t
                n_ties += 1
        pick = ties[np.random.randint(0, n_ties)]
        i = unassigned[pick]
        if f[i] > 0.0:
            v = -1
        elif f[i] < 0.0:
            v = 1
        else:
            v = 1 if np.random.random() < 0.5 else -1
        s[i] = v
        unassigned[pick] = unassigned[remaining - 1]
        for p in range(indptr[i], indptr[i + 1]):
            j = indices[p]
            if s[j] == 0:
                f[j] += weights[p] * v
    return s, energy_of(indptr, indices, weights, h, s)


# ---------------------------------------------------------------------------
# tabu search (single-flip, steepest admissible move, aspiration)


@njit(cache=True)
def tabu_iterate(indptr, indices, weights, h, s, locals_, tabu_until, best_s,
                 state, tenure, iters, seed):
    """Run ``iters`` tabu moves in place.

    state = [current_energy, best_energy, iteration_counter]; locals_ holds
    h_i + sum_j J_ij s_j for the current configuration.  A flipped site is
    tabu for ``tenure`` moves unless flipping it would beat the best energy
    seen this read (aspiration).  Returns nothing; all arrays are updated.
    """
    np.random.seed(seed)
    n = len(h)
    ties = np.empty(n, dtype=np.int64)
    for _ in range(iters):
        it = state[2]
        cur_e = state[0]
        best_e = state[1]
        best_delta = np.inf
        n_ties = 0
        any_admissible = False
        for i in range(n):
            delta = -2.0 * s[i] * locals_[i]
            admissible = tabu_until[i] <= it or (cur_e + delta < best_e)
            if not admissible:
                continue
            any_admissible = True
            if delta < best_delta:
                best_delta = delta
                ties[0] = i
                n_ties = 1
            elif delta == best_delta:
                ties[n_ties] = i
                n_ties += 1
        if not any_admissible:
            # everything tabu and nothing aspirates: take the steepest move
            for i in range(n):
                delta = -2.0 * s[i] * locals_[i]
                if delta < best_delta:
                    best_delta = delta
                    ties[0] = i
                    n_ties = 1
                elif delta == best_delta:
                    ties[n_ties] = i
                    n_ties += 1
        i = ties[np.random.randint(0, n_ties)]
        s[i] = -s[i]
        for p in range(indptr[i], indptr[i + 1]):
            locals_[indices[p]] += 2.0 * weights[p] * s[i]
        state[0] = cur_e + best_delta
        tabu_until[i] = it + tenure
        if state[0] < state[1]:
            state[1] = state[0]
            for j in range(n):
                best_s[j] = s[j]
        state[2] = it + 1


@njit(cache=True)
def compute_locals(indptr, indices, weights, h, s):
    n = len(h)
    out = np.empty(n, dtype=F8)
    for i in range(n):
        out[i] = local_field(indptr, indices, weights, h, s, i)
    return out


# ---------------------------------------------------------------------------
# spin-vector Monte Carlo (two-dimensional rotors)


@njit(cache=True)
def svmc_run(indptr, indices, weights, h, a_vals, b_vals, sweeps_per_step,
             beta, seed):
    """Anneal rotors from theta = pi/2 along the sampled schedule.

    a_vals/b_vals hold A(s_k), B(s_k) for the discretized schedule.  Each
    sweep proposes one uniform new angle in [0, pi) per rotor and accepts
    with the fixed-temperature Metropolis rule.  After the last step the
    rotors are projected onto Ising spins (cos > 0 -> +1, cos < 0 -> -1,
    zero -> random sign).

    Returns (config, ising_energy).
    """
    np.random.seed(seed)
    n = len(h)
    cos_t = np.full(n, np.cos(np.pi / 2.0))
    sin_t = np.full(n, np.sin(np.pi / 2.0))
    for step in range(len(a_vals)):
        a = a_vals[step]
        b = b_vals[step]
        for _ in range(sweeps_per_step):
            for i in range(n):
                theta_new = np.random.random() * np.pi
                cn = np.cos(theta_new)
                sn = np.sin(theta_new)
                coupling = 0.0
                for p in range(indptr[i], indptr[i + 1]):
                    coupling += weights[p] * cos_t[indices[p]]
                dcos = cn - cos_t[i]
                delta = -a * (sn - sin_t[i]) + b * dcos * (h[i] + coupling)
                if delta <= 0.0 or np.random.random() < np.exp(-beta * delta):
                    cos_t[i] = cn
                    sin_t[i] = sn
    s = np.empty(n, dtype=I8)
    for i in range(n):
        if cos_t[i] > 1e-12:
            s[i] = 1
        elif cos_t[i] < -1e-12:
            s[i] = -1
        else:
            s[i] = 1 if np.random.random() < 0.5 else -1
    return s, energy_of(indptr, indices, weights, h, s)


# ---------------------------------------------------------------------------
# parallel tempering with isoenergetic cluster moves


@njit(cache=True)
def pt_round(indptr, indices, weights, h, betas, spins, energies,
             sweeps_per_round, icm_beta_threshold, seed,
             swap_attempts, swap_accepts,
             log_cap, log_count, log_dsum, log_qok,
             best_energy, best_config):
    """One full round over two replica stacks.

    spins has shape (2, R, n) and energies (2, R); betas is the shared
    ascending ladder.  A round is: ``sweeps_per_round`` Metropolis sweeps
    per replica, neighbor swaps per stack in random pair order, then one
    cluster move per beta above ``icm_beta_threshold``.  Swap statistics
    accumulate into swap_attempts/swap_accepts (per neighbor pair).  When
    log_cap > 0, each cluster move logs its energy-sum drift and overlap
    preservation into log_dsum/log_qok.  best_energy (length-1 array) and
    best_config track the lowest energy ever observed.
    """
    np.random.seed(seed)
    n = len(h)
    n_rep = len(betas)

    # Metropolis sweeps
    for stack in range(2):
        for r in range(n_rep):
            beta = betas[r]
            s = spins[stack, r]
            e = energies[stack, r]
            for _ in range(sweeps_per_round):
                for i in range(n):
                    delta = -2.0 * s[i] * local_field(indptr, indices, weights, h, s, i)
                    if delta <= 0.0 or np.random.random() < np.exp(-beta * delta):
                        s[i] = -s[i]
                        e += delta
            energies[stack, r] = e
            if e < best_energy[0]:
                best_energy[0] = e
                for i in range(n):
                    best_config[i] = s[i]

    # neighbor swaps, random pair order, each stack independently
    pair_order = np.arange(n_rep - 1)
    buf = np.empty(n, dtype=I8)
    for stack in range(2):
        _shuffle(pair_order)
        for t in range(n_rep - 1):
            r = pair_order[t]
            rr = r + 1
            arg = (betas[r] - betas[rr]) * (energies[stack, r] - energies[stack, rr])
            swap_attempts[r] += 1
            if arg >= 0.0 or np.random.random() < np.exp(arg):
                swap_accepts[r] += 1
                for i in range(n):
                    buf[i] = spins[stack, r, i]
                    spins[stack, r, i] = spins[stack, rr, i]
                    spins[stack, rr, i] = buf[i]
                tmp = energies[stack, r]
                energies[stack, r] = energies[stack, rr]
                energies[stack, rr] = tmp

    # isoenergetic cluster moves across the two stacks
    cluster = np.empty(n, dtype=np.int64)
    in_cluster = np.zeros(n, dtype=I8)
    candidates = np.empty(n, dtype=np.int64)
    q_buf = np.empty(n, dtype=I8)
    for r in range(n_rep):
        if betas[r] <= icm_beta_threshold:
            continue
        s0 = spins[0, r]
        s1 = spins[1, r]
        n_cand = 0
        for i in range(n):
            if s0[i] * s1[i] == -1:
                candidates[n_cand] = i
                n_cand += 1
        if n_cand == 0:
            continue
        seed_site = candidates[np.random.randint(0, n_cand)]
        # flood fill the connected overlap=-1 cluster containing seed_site
        cluster[0] = seed_site
        in_cluster[seed_site] = 1
        size = 1
        head = 0
        while head < size:
            i = cluster[head]
            head += 1
            for p in range(indptr[i], indptr[i + 1]):
                j = indices[p]
                if in_cluster[j] == 0 and s0[j] * s1[j] == -1:
                    in_cluster[j] = 1
                    cluster[size] = j
                    size += 1
        do_log = log_cap > 0 and log_count[0] < log_cap
        e_sum_before = energies[0, r] + energies[1, r]
        if do_log:
            for i in range(n):
                q_buf[i] = s0[i] * s1[i]
        d0 = 0.0
        d1 = 0.0
        for t in range(size):
            i = cluster[t]
            acc0 = h[i]
            acc1 = h[i]
            for p in range(indptr[i], indptr[i + 1]):
                j = indices[p]
                if in_cluster[j] == 0:
                    acc0 += weights[p] * s0[j]
                    acc1 += weights[p] * s1[j]
            d0 += -2.0 * s0[i] * acc0
            d1 += -2.0 * s1[i] * acc1
        for t in range(size):
            i = cluster[t]
            s0[i] = -s0[i]
            s1[i] = -s1[i]
        energies[0, r] += d0
        energies[1, r] += d1
        if do_log:
            q_ok = True
            for i in range(n):
                if s0[i] * s1[i] != q_buf[i]:
                    q_ok = False
            idx = log_count[0]
            log_dsum[idx] = (energies[0, r] + energies[1, r]) - e_sum_before
            log_qok[idx] = 1 if q_ok else 0
            log_count[0] = idx + 1
        for t in range(size):
            in_cluster[cluster[t]] = 0
        for stack in range(2):
            e = energies[stack, r]
            if e < best_energy[0]:
                best_energy[0] = e
                for i in range(n):
                    best_config[i] = spins[stack, r, i]


@njit(cache=True)
def init_random_replicas(indptr, indices, weights, h, n_rep, n, seed):
    np.random.seed(seed)
    spins = np.empty((2, n_rep, n), dtype=I8)
    energies = np.empty((2, n_rep), dtype=F8)
    for stack in range(2):
        for r in range(n_rep):
            for i in range(n):
                spins[stack, r, i] = 1 if np.random.random() < 0.5 else -1
            energies[stack, r] = energy_of(indptr, indices, weights, h, spins[stack, r])
    return spins, energies


# ---------------------------------------------------------------------------
# min-sum message passing


@njit(cache=True)
def ssl_transfer(x, y):
    """Symmetric saturating linear transfer: min(x,y) - min(-x,y) - x."""
    return min(x, y) - min(-x, y) - x


@njit(cache=True)
def minsum_iterate(indptr, indices, weights, rev_pos, h, msgs, max_iters, tol):
    """Synchronous min-sum updates until fixed point or iteration budget.

    msgs[p] is the message into the segment owner of position p from
    neighbor indices[p]; rev_pos[p] locates the opposite direction.
    Returns (iterations_run, final_max_change).
    """
    n = len(h)
    n_msgs = len(msgs)
    new = np.empty(n_msgs, dtype=F8)
    sum_in = np.empty(n, dtype=F8)
    max_change = np.inf
    it = 0
    while it < max_iters and max_change > tol:
        for i in range(n):
            acc = 0.0
            for p in range(indptr[i], indptr[i + 1]):
                acc += msgs[p]
            sum_in[i] = acc
        for j in range(n):
            for p in range(indptr[j], indptr[j + 1]):
                i = indices[p]
                w = weights[p]
                cavity = 2.0 * h[i] + (sum_in[i] - msgs[rev_pos[p]])
                new[p] = ssl_transfer(2.0 * w, cavity)
        max_change = 0.0
        for p in range(n_msgs):
            change = abs(new[p] - msgs[p])
            if change > max_change:
                max_change = change
            msgs[p] = new[p]
        it += 1
    return it, max_change


# ---------------------------------------------------------------------------
# exhaustive search (Gray-code enumeration)


@njit(cache=True)
def brute_force_gray(indptr, indices, weights, h, tol):
    """Exact minimum by Gray-code enumeration of all 2^n configurations.

    Returns (min_energy, count_of_minimizers, lexicographically smallest
    minimizer) where ties are resolved with absolute tolerance ``tol`` and
    spins order as -1 < +1.
    """
    n = len(h)
    s = np.full(n, -1, dtype=I8)
    e = energy_of(indptr, indices, weights, h, s)
    best_e = e
    count = 1
    best_s = s.copy()
    total = np.int64(1) << n
    for t in range(1, total):
        # position of lowest set bit of t = site to flip (Gray order)
        b = 0
        while (t >> b) & 1 == 0:
            b += 1
        delta = -2.0 * s[b] * local_field(indptr, indices, weights, h, s, b)
        s[b] = -s[b]
        e += delta
        if e < best_e - tol:
            best_e = e
            count = 1
            for i in range(n):
                best_s[i] = s[i]
        elif e <= best_e + tol:
            count += 1
            if e < best_e:
                best_e = e
            for i in range(n):
                if s[i] != best_s[i]:
                    if s[i] < best_s[i]:
                        for j in range(n):
                            best_s[j] = s[j]
                    break
    return best_e, count, best_s
