"""Sparse Ising models, spin configurations, and the Ising/QUBO bijection.

The energy of a spin assignment sigma in {-1, +1}^n (0 = unassigned,
contributing nothing) is

    E(sigma) = sum_{(i,j)} J_ij sigma_i sigma_j + sum_i h_i sigma_i + offset

Models are immutable after construction and safe to share across
concurrent solver runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class InputError(ValueError):
    """Raised when an argument violates an operation's preconditions."""


def _normalize_terms(n, edges, fields):
    """Validate index hygiene and return canonically sorted term lists.

    Edges are stored once per unordered pair as (min(i,j), max(i,j), value),
    sorted lexicographically; fields are sorted by site index.
    """
    if n < 0:
        raise InputError(f"site count must be non-negative, got {n}")
    norm_edges = []
    seen = set()
    for i, j, w in edges:
        i, j = int(i), int(j)
        if i == j:
            raise InputError(f"self-coupling ({i}, {j}) is not allowed")
        if not (0 <= i < n and 0 <= j < n):
            raise InputError(f"edge ({i}, {j}) references a site outside [0, {n})")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise InputError(f"duplicate edge for pair {key}")
        seen.add(key)
        norm_edges.append((key[0], key[1], float(w)))
    norm_edges.sort(key=lambda e: (e[0], e[1]))

    norm_fields = []
    seen_sites = set()
    for i, h in fields:
        i = int(i)
        if not 0 <= i < n:
            raise InputError(f"field on site {i} is outside [0, {n})")
        if i in seen_sites:
            raise InputError(f"duplicate field on site {i}")
        seen_sites.add(i)
        norm_fields.append((i, float(h)))
    norm_fields.sort(key=lambda f: f[0])
    return norm_edges, norm_fields


class IsingModel:
    """Sparse node/edge coefficient map for a quadratic spin energy.

    Parameters
    ----------
    n : int
        Number of spin sites, indexed 0..n-1.
    edges : iterable of (i, j, J_ij)
        Quadratic coefficients; each unordered pair at most once, i != j.
    fields : iterable of (i, h_i)
        Linear coefficients.
    offset : float
        Constant energy term. Zero for models built directly; carried so
        that the QUBO conversion is an exact bijection.
    metadata : dict, optional
        Free-form provenance (instance family, seed, lattice size, ...).
    """

    __slots__ = ("_n", "_edges", "_fields", "_offset", "_metadata",
                 "_h", "_adj_indptr", "_adj_indices", "_adj_weights",
                 "_edge_i", "_edge_j", "_edge_w")

    def __init__(self, n, edges=(), fields=(), offset=0.0, metadata=None):
        norm_edges, norm_fields = _normalize_terms(n, edges, fields)
        self._n = int(n)
        self._edges = tuple(norm_edges)
        self._fields = tuple(norm_fields)
        self._offset = float(offset)
        self._metadata = dict(metadata) if metadata else {}

        self._edge_i = np.array([e[0] for e in norm_edges], dtype=np.int64)
        self._edge_j = np.array([e[1] for e in norm_edges], dtype=np.int64)
        self._edge_w = np.array([e[2] for e in norm_edges], dtype=np.float64)

        h = np.zeros(self._n, dtype=np.float64)
        for i, hi in norm_fields:
            h[i] = hi
        self._h = h

        # Eager CSR adjacency (each edge stored in both directions) so that
        # single-flip energy deltas cost O(degree).
        degree = np.zeros(self._n, dtype=np.int64)
        for i, j, _ in norm_edges:
            degree[i] += 1
            degree[j] += 1
        indptr = np.zeros(self._n + 1, dtype=np.int64)
        np.cumsum(degree, out=indptr[1:])
        indices = np.zeros(indptr[-1], dtype=np.int64)
        weights = np.zeros(indptr[-1], dtype=np.float64)
        cursor = indptr[:-1].copy()
        for i, j, w in norm_edges:
            indices[cursor[i]] = j
            weights[cursor[i]] = w
            cursor[i] += 1
            indices[cursor[j]] = i
            weights[cursor[j]] = w
            cursor[j] += 1
        self._adj_indptr = indptr
        self._adj_indices = indices
        self._adj_weights = weights
        for arr in (self._edge_i, self._edge_j, self._edge_w, self._h,
                    self._adj_indptr, self._adj_indices, self._adj_weights):
            arr.setflags(write=False)

    @property
    def n(self):
        return self._n

    @property
    def edges(self):
        return self._edges

    @property
    def fields(self):
        return self._fields

    @property
    def offset(self):
        return self._offset

    @property
    def metadata(self):
        return self._metadata

    @property
    def num_edges(self):
        return len(self._edges)

    @property
    def h(self):
        """Dense linear coefficients, shape (n,), read-only."""
        return self._h

    @property
    def adjacency(self):
        """CSR adjacency (indptr, indices, weights) with both edge directions."""
        return self._adj_indptr, self._adj_indices, self._adj_weights

    def neighbors(self, site):
        lo, hi = self._adj_indptr[site], self._adj_indptr[site + 1]
        return self._adj_indices[lo:hi]

    def max_abs_delta(self):
        """Largest possible single-flip |delta E|: max_i 2(|h_i| + sum_j |J_ij|)."""
        if self._n == 0:
            return 0.0
        coupling = np.zeros(self._n)
        np.add.at(coupling, self._adj_indices, np.abs(self._adj_weights))
        return float(2.0 * np.max(np.abs(self._h) + coupling))

    def __eq__(self, other):
        if not isinstance(other, IsingModel):
            return NotImplemented
        return (self._n == other._n and self._edges == other._edges
                and self._fields == other._fields and self._offset == other._offset)

    def __repr__(self):
        return (f"IsingModel(n={self._n}, edges={len(self._edges)}, "
                f"fields={len(self._fields)}, offset={self._offset})")


@dataclass(frozen=True)
class QuboModel:
    """Quadratic unconstrained binary minimization over x in {0, 1}^n.

    Energy: sum_{(i,j)} quad_ij x_i x_j + sum_i lin_i x_i + offset.
    """

    n: int
    quad: tuple = ()
    lin: tuple = ()
    offset: float = 0.0

    def __post_init__(self):
        quad, lin = _normalize_terms(self.n, self.quad, self.lin)
        object.__setattr__(self, "quad", tuple(quad))
        object.__setattr__(self, "lin", tuple(lin))
        object.__setattr__(self, "offset", float(self.offset))


def unassigned_spins(n):
    """All-unassigned configuration (every value 0)."""
    return np.zeros(n, dtype=np.int8)


def random_spins(n, rng):
    """Uniform random complete configuration over {-1, +1}^n."""
    return (rng.integers(0, 2, size=n).astype(np.int8) * 2 - 1)


def is_complete(config):
    """True when no site is unassigned."""
    return not np.any(np.asarray(config) == 0)


def _check_config(model, config):
    config = np.asarray(config)
    if config.shape != (model.n,):
        raise InputError(
            f"configuration has shape {config.shape}, expected ({model.n},)")
    if not np.all(np.isin(config, (-1, 0, 1))):
        raise InputError("spin values must lie in {-1, 0, +1}")
    return config.astype(np.int8, copy=False)


def energy(model, config):
    """Energy of a (possibly partial) spin configuration.

    Unassigned sites (value 0) contribute nothing to either term.
    """
    config = _check_config(model, config)
    s = config.astype(np.float64)
    quad = float(np.dot(model._edge_w, s[model._edge_i] * s[model._edge_j]))
    lin = float(np.dot(model.h, s))
    return quad + lin + model.offset


def delta_energy(model, config, site):
    """Energy change from flipping one spin of a complete configuration.

    Equals E(flip(config, site)) - E(config)
         = -2 sigma_site (h_site + sum_j J_{site,j} sigma_j).
    """
    config = _check_config(model, config)
    if not 0 <= site < model.n:
        raise InputError(f"site {site} is outside [0, {model.n})")
    if config[site] == 0:
        raise InputError(f"site {site} is unassigned")
    if not is_complete(config):
        raise InputError("delta_energy requires a complete configuration")
    indptr, indices, weights = model.adjacency
    lo, hi = indptr[site], indptr[site + 1]
    local = model.h[site] + np.dot(weights[lo:hi], config[indices[lo:hi]].astype(np.float64))
    return float(-2.0 * config[site] * local)


def to_qubo(model):
    """Convert to the equivalent QUBO under x_i = (sigma_i + 1) / 2.

    quad_ij = 4 J_ij
    lin_i   = 2 h_i - 2 sum_{j:(i,j)} J_ij
    offset  = sum J_ij - sum h_i   (plus any model offset)
    """
    edge_sum = np.zeros(model.n, dtype=np.float64)
    for i, j, w in model.edges:
        edge_sum[i] += w
        edge_sum[j] += w
    quad = [(i, j, 4.0 * w) for i, j, w in model.edges]
    lin_dense = 2.0 * model.h - 2.0 * edge_sum
    sites = sorted(set(i for i, _ in model.fields) | set(np.nonzero(lin_dense)[0].tolist()))
    lin = [(i, float(lin_dense[i])) for i in sites]
    offset = float(sum(w for _, _, w in model.edges) - sum(h for _, h in model.fields)
                   + model.offset)
    return QuboModel(n=model.n, quad=tuple(quad), lin=tuple(lin), offset=offset)


def from_qubo(qubo):
    """Inverse of :func:`to_qubo`; round-trips coefficients to ~1e-12."""
    quad_sum = np.zeros(qubo.n, dtype=np.float64)
    edges = []
    for i, j, c in qubo.quad:
        edges.append((i, j, c / 4.0))
        quad_sum[i] += c / 4.0
        quad_sum[j] += c / 4.0
    h_dense = np.zeros(qubo.n, dtype=np.float64)
    for i, c in qubo.lin:
        h_dense[i] = c / 2.0
    h_dense += quad_sum
    sites = np.nonzero(h_dense)[0]
    fields = [(int(i), float(h_dense[i])) for i in sites]
    j_total = sum(w for _, _, w in edges)
    h_total = sum(h for _, h in fields)
    offset = qubo.offset - (j_total - h_total)
    return IsingModel(n=qubo.n, edges=edges, fields=fields, offset=offset)


def qubo_energy(qubo, x):
    """QUBO objective at a binary point x in {0, 1}^n."""
    x = np.asarray(x)
    if x.shape != (qubo.n,):
        raise InputError(f"binary point has shape {x.shape}, expected ({qubo.n},)")
    if not np.all(np.isin(x, (0, 1))):
        raise InputError("binary values must lie in {0, 1}")
    xf = x.astype(np.float64)
    total = qubo.offset
    for i, j, c in qubo.quad:
        total += c * xf[i] * xf[j]
    for i, c in qubo.lin:
        total += c * xf[i]
    return float(total)


def spins_from_binary(x):
    """Map x in {0,1}^n to sigma = 2x - 1 in {-1,+1}^n."""
    return (2 * np.asarray(x) - 1).astype(np.int8)


def binary_from_spins(config):
    """Map sigma in {-1,+1}^n to x = (sigma + 1) / 2 in {0,1}^n."""
    return ((np.asarray(config) + 1) // 2).astype(np.int8)


def hardware_admissible(model, h_range=(-4.0, 4.0), j_range=(-1.0, 1.0)):
    """Lint for annealer coefficient ranges; returns a list of violations.

    Advisory only: the library itself accepts arbitrary double-precision
    coefficients.
    """
    problems = []
    for i, h in model.fields:
        if not h_range[0] <= h <= h_range[1]:
            problems.append(f"h[{i}] = {h} outside {h_range}")
    for i, j, w in model.edges:
        if not j_range[0] <= w <= j_range[1]:
            problems.append(f"J[{i},{j}] = {w} outside {j_range}")
    return problems
