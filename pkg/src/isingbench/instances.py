"""Random hardware-native instance families and ising-v1 JSON serialization.

Two corrupted-biased-ferromagnet coefficient tables are supported:

    cbfm    J: -1 w.p. 0.625, 0.2 w.p. 0.375
            h:  0 w.p. 0.97, -1 w.p. 0.02, +1 w.p. 0.01
    cbfm-p  J:  0 w.p. 0.35, -1 w.p. 0.10, +1 w.p. 0.55
            h:  0 w.p. 0.15, -1 w.p. 0.85

Reproducibility contract: coefficients come from a Philox-4x64 counter
stream keyed by the first 16 bytes of SHA-256("family|m=<m>|seed=<seed>").
Topology nodes are relabeled 0..N-1 in ascending linear-id order and edges
are enumerated in sorted (min, max) order; edge number k consumes the
first uniform double of Philox counter block k, and node i consumes block
E + i (E = topology edge count).  The same (family, m, seed, mask) is
therefore guaranteed to produce the same instance byte-for-byte, in any
implementation of this scheme.  Draws that land on a zero coefficient are
omitted from the stored model.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox

from .model import InputError, IsingModel
from .pegasus import apply_mask, pegasus

FORMAT_NAME = "ising-v1"

# (value, probability) rows; cumulative thresholds applied in row order.
FAMILY_TABLES = {
    "cbfm": {
        "J": ((0.0, 0.0), (-1.0, 0.625), (0.2, 0.375)),
        "h": ((0.0, 0.97), (-1.0, 0.02), (1.0, 0.01)),
    },
    "cbfm-p": {
        "J": ((0.0, 0.35), (-1.0, 0.10), (1.0, 0.55)),
        "h": ((0.0, 0.15), (-1.0, 0.85), (1.0, 0.0)),
    },
}


class ParseError(ValueError):
    """Raised for malformed or inconsistent serialized inputs."""


@dataclass(frozen=True)
class Mask:
    """Dead sites/couplers by Pegasus linear id, modeling hardware yield."""

    dead_nodes: tuple = ()
    dead_edges: tuple = ()


@dataclass(frozen=True)
class InstanceSpec:
    family: str
    m: int
    seed: int
    mask: Mask | None = None

    def __post_init__(self):
        if self.family not in FAMILY_TABLES:
            raise InputError(
                f"unknown family {self.family!r}; choose from {sorted(FAMILY_TABLES)}")


def _stream_key(family, m, seed):
    digest = hashlib.sha256(f"{family}|m={m}|seed={seed}".encode()).digest()
    return int.from_bytes(digest[:16], "big")


class _CounterStream:
    """Philox draws addressed by block counter (one double per counter)."""

    def __init__(self, key):
        self._bg = Philox(key=key)
        self._gen = Generator(self._bg)
        self._state = self._bg.state

    def uniform(self, counter):
        st = self._state
        ctr = st["state"]["counter"]
        ctr[0] = counter
        ctr[1] = 0
        ctr[2] = 0
        ctr[3] = 0
        st["buffer_pos"] = 4
        self._bg.state = st
        return self._gen.random()


def _pick(table, u):
    acc = 0.0
    for value, prob in table:
        acc += prob
        if u < acc:
            return value
    return table[-1][0]


def generate(spec):
    """Sample one instance over the (masked) Pegasus graph of ``spec``.

    Returns an IsingModel whose sites are 0..N-1; metadata records the
    family, size, seed, and the underlying topology's node/edge counts.
    """
    topo = pegasus(spec.m)
    if spec.mask is not None:
        topo = apply_mask(topo, spec.mask.dead_nodes, spec.mask.dead_edges)
    return generate_over(topo, spec.family, spec.seed,
                         metadata={"m": spec.m, "masked": spec.mask is not None})


def generate_over(topo, family, seed, metadata=None):
    """Sample coefficients for an explicit topology (see module docstring)."""
    if family not in FAMILY_TABLES:
        raise InputError(
            f"unknown family {family!r}; choose from {sorted(FAMILY_TABLES)}")
    tables = FAMILY_TABLES[family]
    node_ids = topo.sorted_nodes()
    compact = {node: idx for idx, node in enumerate(node_ids)}
    edge_list = topo.sorted_edges()

    stream = _CounterStream(_stream_key(family, topo.m, seed))
    edges = []
    for k, (a, b) in enumerate(edge_list):
        value = _pick(tables["J"], stream.uniform(k))
        if value != 0.0:
            edges.append((compact[a], compact[b], value))
    fields = []
    base = len(edge_list)
    for i, node in enumerate(node_ids):
        value = _pick(tables["h"], stream.uniform(base + i))
        if value != 0.0:
            fields.append((compact[node], value))

    meta = {"family": family, "seed": int(seed),
            "topology_nodes": len(node_ids), "topology_edges": len(edge_list)}
    if metadata:
        meta.update(metadata)
    return IsingModel(n=len(node_ids), edges=edges, fields=fields, metadata=meta)


def write_instance(model, path):
    """Serialize to the ising-v1 JSON format (canonical bytes)."""
    obj = {
        "format": FORMAT_NAME,
        "n": model.n,
        "linear": [[i, h] for i, h in model.fields],
        "quadratic": [[i, j, w] for i, j, w in model.edges],
        "metadata": dict(model.metadata),
    }
    if model.offset != 0.0:
        # The wire format has no offset slot; stash it in metadata.
        obj["metadata"]["energy_offset"] = model.offset
    text = json.dumps(obj, separators=(",", ":"), sort_keys=False)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
        fh.write("\n")


def read_instance(path):
    """Parse and validate an ising-v1 file; errors name the offending entry."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: expected a JSON object at top level")
    fmt = obj.get("format")
    if fmt != FORMAT_NAME:
        raise ParseError(f"{path}: unknown format {fmt!r}, expected {FORMAT_NAME!r}")
    n = obj.get("n")
    if not isinstance(n, int) or n < 0:
        raise ParseError(f"{path}: 'n' must be a non-negative integer, got {n!r}")

    fields = []
    for idx, entry in enumerate(obj.get("linear", [])):
        if (not isinstance(entry, list) or len(entry) != 2
                or not isinstance(entry[0], int)
                or not isinstance(entry[1], (int, float))):
            raise ParseError(f"{path}: linear[{idx}]: expected [site, value], got {entry!r}")
        i, h = entry
        if not 0 <= i < n:
            raise ParseError(
                f"{path}: linear[{idx}]: site {i} out of range for n={n}")
        fields.append((i, float(h)))

    edges = []
    for idx, entry in enumerate(obj.get("quadratic", [])):
        if (not isinstance(entry, list) or len(entry) != 3
                or not isinstance(entry[0], int) or not isinstance(entry[1], int)
                or not isinstance(entry[2], (int, float))):
            raise ParseError(
                f"{path}: quadratic[{idx}]: expected [i, j, value], got {entry!r}")
        i, j, w = entry
        for site in (i, j):
            if not 0 <= site < n:
                raise ParseError(
                    f"{path}: quadratic[{idx}]: site {site} out of range for n={n}")
        edges.append((i, j, float(w)))

    metadata = obj.get("metadata", {})
    if not isinstance(metadata, dict):
        raise ParseError(f"{path}: metadata must be an object")
    offset = float(metadata.pop("energy_offset", 0.0))
    try:
        return IsingModel(n=n, edges=edges, fields=fields, offset=offset,
                          metadata=metadata)
    except InputError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def parse_seed_range(text):
    """Parse '1..50', '3', or '1,4,9' into a list of integer seeds."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    if "," in text:
        return [int(s) for s in text.split(",") if s.strip()]
    return [int(text)]
