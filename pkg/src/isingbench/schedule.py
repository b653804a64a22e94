"""Annealing-schedule tables A(s), B(s) sampled on s in [0, 1].

Schedules arrive as CSV with header ``s,A_GHz,B_GHz`` and rows sorted by
s.  Evaluation between samples is piecewise linear.  A built-in fallback
(A: 6 -> 0 GHz, B: 0 -> 12 GHz, both linear) ships so the rotor solver
runs without a data file.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .model import InputError


@dataclass(frozen=True)
class ScheduleTable:
    """Sampled transverse/problem energy scales in GHz over s in [0, 1]."""

    s: np.ndarray
    a_ghz: np.ndarray
    b_ghz: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.s, dtype=np.float64)
        a = np.asarray(self.a_ghz, dtype=np.float64)
        b = np.asarray(self.b_ghz, dtype=np.float64)
        if s.ndim != 1 or s.shape != a.shape or s.shape != b.shape:
            raise InputError("schedule columns must be 1-d and equally long")
        if len(s) < 2:
            raise InputError("schedule needs at least two rows")
        if np.any(np.diff(s) <= 0):
            raise InputError("schedule s values must be strictly increasing")
        if s[0] != 0.0 or s[-1] != 1.0:
            raise InputError("schedule must cover s=0 and s=1")
        if np.any(np.diff(a) > 0):
            warnings.warn("schedule A(s) is not non-increasing", stacklevel=2)
        if np.any(np.diff(b) < 0):
            warnings.warn("schedule B(s) is not non-decreasing", stacklevel=2)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "a_ghz", a)
        object.__setattr__(self, "b_ghz", b)
        for arr in (s, a, b):
            arr.setflags(write=False)

    def interpolate(self, points):
        """A(s), B(s) at the given s values (piecewise linear)."""
        points = np.asarray(points, dtype=np.float64)
        if np.any(points < 0.0) or np.any(points > 1.0):
            raise InputError("schedule evaluated outside [0, 1]")
        return np.interp(points, self.s, self.a_ghz), np.interp(points, self.s, self.b_ghz)

    @staticmethod
    def default():
        """Fallback linear schedule: A 6 -> 0 GHz, B 0 -> 12 GHz."""
        return ScheduleTable(np.array([0.0, 1.0]),
                             np.array([6.0, 0.0]),
                             np.array([0.0, 12.0]))


def read_schedule_csv(path):
    """Load a ``s,A_GHz,B_GHz`` CSV into a ScheduleTable."""
    from .instances import ParseError

    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header.replace(" ", "") != "s,A_GHz,B_GHz":
            raise ParseError(f"{path}: expected header 's,A_GHz,B_GHz', got {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise ParseError(f"{path}:{lineno}: expected 3 comma-separated values")
            try:
                rows.append(tuple(float(p) for p in parts))
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from exc
    if not rows:
        raise ParseError(f"{path}: no data rows")
    arr = np.array(rows)
    return ScheduleTable(arr[:, 0], arr[:, 1], arr[:, 2])


def write_schedule_csv(table, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("s,A_GHz,B_GHz\n")
        for s, a, b in zip(table.s, table.a_ghz, table.b_ghz):
            fh.write(f"{s!r},{a!r},{b!r}\n")
