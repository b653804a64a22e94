"""LP-format exporters for the binary quadratic and linearized models.

Two formulations of a QUBO are written in the CPLEX-style LP text format:

* quadratic objective over binary x_i (``export_iqp``), with products in
  a bracketed section whose coefficients are doubled then halved, per the
  format's convention;
* the lifted linearization (``export_ilp``) with one product variable
  y_i_j per quadratic term and the three conjunction constraints
  x_i + x_j - 1 <= y_i_j, y_i_j <= x_i, y_i_j <= x_j.

Variable naming is fixed (x_<i>, y_<i>_<j>) and floats are written with
repr, so exports are byte-deterministic.  A small evaluator for the
emitted subset of the format supports verification without an external
solver.
"""

from __future__ import annotations

import re

import numpy as np

from .instances import ParseError
from .model import InputError


def _signed(value, body=""):
    sign = "-" if value < 0 else "+"
    text = f"{sign} {abs(float(value))!r}"
    return f"{text} {body}" if body else text


def _obj_terms(qubo):
    return [_signed(c, f"x_{i}") for i, c in qubo.lin]


def export_iqp(qubo, path):
    """Write the quadratic binary formulation to ``path`` in LP format."""
    lines = ["Minimize", " obj:"]
    body = _obj_terms(qubo)
    if qubo.quad:
        quad_terms = [_signed(2.0 * c, f"x_{i} * x_{j}") for i, j, c in qubo.quad]
        body.append("+ [ " + " ".join(quad_terms) + " ] / 2")
    if qubo.offset != 0.0 or not body:
        body.append(_signed(qubo.offset))
    lines.extend("   " + t for t in body)
    lines.append("Subject To")
    lines.append("Binary")
    lines.append(" " + " ".join(f"x_{i}" for i in range(qubo.n)))
    lines.append("End")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def export_ilp(qubo, path):
    """Write the lifted linear formulation to ``path`` in LP format."""
    lines = ["Minimize", " obj:"]
    body = [_signed(c, f"y_{i}_{j}") for i, j, c in qubo.quad]
    body.extend(_obj_terms(qubo))
    if qubo.offset != 0.0 or not body:
        body.append(_signed(qubo.offset))
    lines.extend("   " + t for t in body)
    lines.append("Subject To")
    for i, j, _ in qubo.quad:
        y = f"y_{i}_{j}"
        lines.append(f" and_{i}_{j}: x_{i} + x_{j} - {y} <= 1.0")
        lines.append(f" ub1_{i}_{j}: {y} - x_{i} <= 0.0")
        lines.append(f" ub2_{i}_{j}: {y} - x_{j} <= 0.0")
    lines.append("Binary")
    names = [f"x_{i}" for i in range(qubo.n)]
    names.extend(f"y_{i}_{j}" for i, j, _ in qubo.quad)
    lines.append(" " + " ".join(names))
    lines.append("End")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


_TOKEN = re.compile(r"\s*([+-]|\[|\]|/|\*|[A-Za-z_][A-Za-z0-9_]*|"
                    r"[0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)")


class LpProgram:
    """Parsed form of the LP subset emitted by this module."""

    def __init__(self, objective, constraints, binaries):
        self.objective = objective      # list of (coeff, vars tuple)
        self.constraints = constraints  # list of (terms, bound) for <= rows
        self.binaries = binaries

    def objective_value(self, assignment):
        total = 0.0
        for coeff, names in self.objective:
            term = coeff
            for name in names:
                term *= assignment[name]
            total += term
        return total

    def feasible(self, assignment, tol=1e-9):
        for terms, bound in self.constraints:
            lhs = sum(c * assignment[v] for c, v in terms)
            if lhs > bound + tol:
                return False
        return True


def _tokenize(text):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise ParseError(f"unparseable LP fragment: {text[pos:pos+20]!r}")
            break
        out.append(m.group(1))
        pos = m.end()
    return out


def _parse_expression(tokens):
    """Sum of signed terms: number, name, products, bracketed /2 section."""
    terms = []
    sign = 1.0
    scale = 1.0
    bracket_terms = None
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok == "+":
            sign = 1.0
            i += 1
            continue
        if tok == "-":
            sign = -1.0
            i += 1
            continue
        if tok == "[":
            bracket_terms = []
            i += 1
            continue
        if tok == "]":
            if i + 2 >= len(tokens) or tokens[i + 1] != "/":
                raise ParseError("bracketed LP section must end with '/ 2'")
            divisor = float(tokens[i + 2])
            for coeff, names in bracket_terms:
                terms.append((coeff / divisor, names))
            bracket_terms = None
            i += 3
            continue
        # a term: optional coefficient then variables joined by '*'
        coeff = sign
        names = []
        if re.fullmatch(r"[0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?", tok):
            coeff *= float(tok)
            i += 1
        while i < len(tokens) and re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", tokens[i]):
            names.append(tokens[i])
            i += 1
            if i < len(tokens) and tokens[i] == "*":
                i += 1
            else:
                break
        target = bracket_terms if bracket_terms is not None else terms
        target.append((coeff, tuple(names)))
        sign = 1.0
    return terms


def read_lp(path):
    """Parse a file produced by export_iqp/export_ilp."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    lines = [ln.rstrip() for ln in text.splitlines()]
    section = None
    obj_tokens = []
    constraints = []
    binaries = []
    for ln in lines:
        stripped = ln.strip()
        if not stripped:
            continue
        lower = stripped.lower()
        if lower in ("minimize", "subject to", "binary", "end"):
            section = lower
            continue
        if section == "minimize":
            body = stripped.split(":", 1)[1] if ":" in stripped else stripped
            obj_tokens.extend(_tokenize(body))
        elif section == "subject to":
            if ":" in stripped:
                stripped = stripped.split(":", 1)[1]
            if "<=" not in stripped:
                raise ParseError(f"unsupported constraint: {ln!r}")
            lhs, rhs = stripped.split("<=")
            terms = [(c, names[0]) for c, names in _parse_expression(_tokenize(lhs))]
            constraints.append((terms, float(rhs)))
        elif section == "binary":
            binaries.extend(stripped.split())
    objective = _parse_expression(obj_tokens)
    return LpProgram(objective, constraints, binaries)


def evaluate_iqp(program, x):
    """Objective at binary point x (by x_<i> variable order)."""
    assignment = {f"x_{i}": float(v) for i, v in enumerate(x)}
    return program.objective_value(assignment)


def ilp_minimum(program):
    """Exact ILP optimum by enumerating binary x and forcing y = x_i x_j.

    Only intended for small exports; the y variables are determined by
    feasibility at optimality, which the conjunction constraints pin to
    the product for any minimizing solution.
    """
    x_names = sorted((n for n in program.binaries if n.startswith("x_")),
                     key=lambda s: int(s.split("_")[1]))
    y_names = [n for n in program.binaries if n.startswith("y_")]
    if len(x_names) > 24:
        raise InputError("ilp_minimum enumerates 2^n points; model too large")
    best = np.inf
    for mask in range(1 << len(x_names)):
        assignment = {}
        for b, name in enumerate(x_names):
            assignment[name] = float((mask >> b) & 1)
        for name in y_names:
            _, si, sj = name.split("_")
            prod = assignment[f"x_{si}"] * assignment[f"x_{sj}"]
            assignment[name] = prod
        if not program.feasible(assignment):
            continue
        value = program.objective_value(assignment)
        if value < best:
            best = value
    return best
