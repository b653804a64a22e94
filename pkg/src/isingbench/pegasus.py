"""Pegasus hardware-graph generation with optional yield masks.

Qubits carry four-field coordinates (u, w, k, z):

    u : orientation, 0 or 1
    w : offset perpendicular to the qubit's orientation, 0..m-1
    k : qubit index within a tile, 0..11
    z : offset parallel to the orientation, 0..m-2

Linear site ids follow the conventional packing
``u*12*m*(m-1) + w*12*(m-1) + k*(m-1) + z``.  Couplers come in three kinds:
"odd" couplers pair similarly aligned qubits (k even with k+1) inside a
cell, "external" couplers join similarly aligned qubits in adjacent cells
(z with z+1), and "internal" couplers join perpendicular qubits whose
shifted spans cross.  The crossing rule uses the standard per-k shift
offsets below.  Fabric-only trimming drops the boundary qubits that have
no internal couplers, leaving 8(m-1)(3m-1) sites.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import InputError

# Per-k shift offsets for each orientation (all even by construction).
_OFFSETS = (
    (2, 2, 2, 2, 10, 10, 10, 10, 6, 6, 6, 6),
    (6, 6, 2, 2, 2, 2, 10, 10, 10, 10, 6, 6),
)


@dataclass(frozen=True)
class PegasusTopology:
    """Node/edge set of a (possibly masked) Pegasus graph.

    nodes are linear site ids; edges are unordered (i, j) pairs with i < j;
    coordinates maps each node id to its (u, w, k, z) tuple.
    """

    m: int
    nodes: frozenset
    edges: frozenset
    coordinates: dict

    @property
    def num_nodes(self):
        return len(self.nodes)

    @property
    def num_edges(self):
        return len(self.edges)

    def sorted_nodes(self):
        return sorted(self.nodes)

    def sorted_edges(self):
        return sorted(self.edges)

    def degree(self, node):
        return sum(1 for e in self.edges if node in e)


def _linear_index(m, u, w, k, z):
    return ((u * 12 * m + w * 12 + k) * (m - 1)) + z


def _in_fabric(m, u, w, k):
    # Sites whose crossing span misses every perpendicular qubit: the first
    # two k values of the first perpendicular row and the last two of the
    # last row.  Dropping them leaves 8(m-1)(3m-1) fabric sites.
    if w == 0 and k < 2:
        return False
    if w == m - 1 and k >= 10:
        return False
    return True


def pegasus(m):
    """Fabric-only Pegasus graph for lattice size parameter ``m``.

    Raises InputError for m < 2.  Node count equals 8(m-1)(3m-1); every
    node has degree at most 15 (12 internal + 2 external + 1 odd coupler).
    """
    if m < 2:
        raise InputError(f"Pegasus size parameter must be >= 2, got {m}")

    coords = {}
    for u in range(2):
        for w in range(m):
            for k in range(12):
                if not _in_fabric(m, u, w, k):
                    continue
                for z in range(m - 1):
                    coords[_linear_index(m, u, w, k, z)] = (u, w, k, z)
    nodes = frozenset(coords)

    edges = set()

    def add(a, b):
        if a in nodes and b in nodes:
            edges.add((min(a, b), max(a, b)))

    for node, (u, w, k, z) in coords.items():
        # external: next cell along the qubit's orientation
        if z + 1 <= m - 2:
            add(node, _linear_index(m, u, w, k, z + 1))
        # odd: the similarly aligned partner within the cell
        if k % 2 == 0:
            add(node, _linear_index(m, u, w, k + 1, z))
        # internal: perpendicular qubits whose spans cross
        if u == 0:
            for kk in range(12):
                ww = z + (1 if kk < _OFFSETS[0][k] else 0)
                zz = w - (1 if k < _OFFSETS[1][kk] else 0)
                if 0 <= ww <= m - 1 and 0 <= zz <= m - 2:
                    add(node, _linear_index(m, 1, ww, kk, zz))

    return PegasusTopology(m=m, nodes=nodes, edges=frozenset(edges),
                           coordinates=coords)


def apply_mask(topo, dead_nodes=(), dead_edges=()):
    """Remove failed sites and couplers, modeling fabrication yield.

    dead_edges entries may be given in either vertex order.  Unknown nodes
    or edges raise InputError.  Coordinates of surviving nodes are kept.
    """
    dead_nodes = set(dead_nodes)
    unknown = dead_nodes - topo.nodes
    if unknown:
        raise InputError(f"mask names unknown nodes: {sorted(unknown)[:5]}")
    norm_dead_edges = set()
    for i, j in dead_edges:
        e = (min(i, j), max(i, j))
        if e not in topo.edges:
            raise InputError(f"mask names unknown edge {e}")
        norm_dead_edges.add(e)

    nodes = frozenset(topo.nodes - dead_nodes)
    edges = frozenset(e for e in topo.edges
                      if e not in norm_dead_edges
                      and e[0] in nodes and e[1] in nodes)
    coords = {n: topo.coordinates[n] for n in nodes}
    return PegasusTopology(m=topo.m, nodes=nodes, edges=edges, coordinates=coords)


def write_adjacency_csv(topo, path):
    """Write one ``i,j`` line per coupler, sorted, for external tools."""
    with open(path, "w", encoding="utf-8") as fh:
        for i, j in topo.sorted_edges():
            fh.write(f"{i},{j}\n")


def is_connected(topo):
    """Breadth-first connectivity check over the masked graph."""
    if not topo.nodes:
        return True
    adj = {n: [] for n in topo.nodes}
    for i, j in topo.edges:
        adj[i].append(j)
        adj[j].append(i)
    start = next(iter(topo.nodes))
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for n in frontier:
            for nb in adj[n]:
                if nb not in seen:
                    seen.add(nb)
                    nxt.append(nb)
        frontier = nxt
    return len(seen) == len(topo.nodes)
