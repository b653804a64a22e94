"""Exhaustive ground-state search for small instances."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .model import InputError, energy

MAX_EXACT_SITES = 30


@dataclass(frozen=True)
class OracleResult:
    """Exact optimum: its energy, one minimizer, and the minimizer count."""

    energy: float
    config: np.ndarray
    count: int


def brute_force(model, tie_tol=1e-9):
    """Enumerate all 2^n configurations by Gray code.

    Returns the exact minimum energy, the number of minimizers (ties
    resolved with absolute tolerance ``tie_tol``), and the
    lexicographically smallest minimizer (-1 sorts before +1).  Refuses
    models with more than 30 sites.
    """
    if model.n > MAX_EXACT_SITES:
        raise InputError(
            f"brute_force enumerates 2^n states; n={model.n} exceeds the "
            f"limit of {MAX_EXACT_SITES} sites")
    if model.n == 0:
        return OracleResult(energy=model.offset,
                            config=np.zeros(0, dtype=np.int8), count=1)
    indptr, indices, weights = model.adjacency
    _, count, config = _kernels.brute_force_gray(indptr, indices, weights,
                                                 model.h, tie_tol)
    # report the energy of the returned configuration, recomputed exactly
    return OracleResult(energy=energy(model, config),
                        config=config, count=int(count))
