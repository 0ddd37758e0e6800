"""Invariants as colored directed multigraphs.

A grade-m label with k entries becomes a graph on vertices 1..m with one
edge per (color, vertex): color j draws an edge with head at l and tail at
sigma_j(l).  Relabeling vertices is simultaneous conjugation, so unlabeled
graphs are exactly the conjugation classes.

``expressible_ordering`` searches for a cyclic vertex order in which every
color's cycles sit on contiguous arcs traversed consecutively (either
direction); such an order is sufficient to write the invariant with partial
traces, matrix/tensor products and partial transposes.  Every graph with
m <= 3 admits one; from m = 4 on some do not.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

from .errors import ResourceLimitError
from .perms import MAX_GRADE, Perm, PermTuple, symmetric_group

_PALETTE = ("black", "red", "blue", "green", "orange", "purple", "brown", "cyan")


@dataclass(frozen=True)
class InvGraph:
    """m vertices; one permutation per edge color (in/out degree 1 each)."""

    m: int
    colors: tuple[Perm, ...]

    def __post_init__(self):
        for p in self.colors:
            if p.m != self.m:
                raise ValueError(f"color grade {p.m} does not match m={self.m}")

    @property
    def k(self) -> int:
        return len(self.colors)


def build_graph(sigma: PermTuple) -> InvGraph:
    """Bijective encoding of a label as a graph (use embed() first to draw a
    pure label with its loops of the last color)."""
    return InvGraph(sigma.m, sigma.perms)


def graph_tuple(g: InvGraph) -> PermTuple:
    return PermTuple(g.m, g.colors)


def canonical_graph(g: InvGraph) -> bytes:
    """Canonical byte string under vertex relabeling, preserving colors and
    directions: the minimum over all m! relabelings of the sorted edge list
    (color, tail, head).  Equal strings iff the graphs are isomorphic."""
    if g.m > MAX_GRADE:
        raise ResourceLimitError(f"graph canonicalization limited to m <= {MAX_GRADE}")
    best = None
    for beta in symmetric_group(g.m):
        edges = sorted(
            (j, beta(p(l)), beta(l))
            for j, p in enumerate(g.colors)
            for l in range(1, g.m + 1)
        )
        enc = bytes(x for e in edges for x in e)
        if best is None or enc < best:
            best = enc
    return best


def connected_components(g: InvGraph) -> list[tuple[InvGraph, tuple[int, ...]]]:
    """Components of the underlying undirected multigraph over all colors.

    Returns (subgraph, vertices) pairs; each subgraph has its vertices
    relabeled 1..m_i in increasing order of the original labels.  The vertex
    partition equals the orbit partition of the group generated by the
    colors, so the invariant factorizes over the components.
    """
    parent = list(range(g.m))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in g.colors:
        for l in range(1, g.m + 1):
            a, b = find(l - 1), find(p(l) - 1)
            if a != b:
                parent[a] = b
    groups: dict[int, list[int]] = {}
    for v in range(1, g.m + 1):
        groups.setdefault(find(v - 1), []).append(v)
    out = []
    for comp in sorted(groups.values()):
        index = {v: i + 1 for i, v in enumerate(comp)}
        colors = tuple(
            Perm(tuple(index[p(v)] for v in comp)) for p in g.colors
        )
        out.append((InvGraph(len(comp), colors), tuple(comp)))
    return out


def dot_export(g: InvGraph, color_names: tuple[str, ...] | None = None) -> str:
    """Deterministic DOT text: one node per vertex, one edge per (color,
    vertex) drawn tail -> head."""
    if color_names is None:
        color_names = tuple(_PALETTE[j % len(_PALETTE)] for j in range(g.k))
    if len(color_names) != g.k:
        raise ValueError(f"need {g.k} color names, got {len(color_names)}")
    lines = ["digraph invariant {"]
    for v in range(1, g.m + 1):
        lines.append(f'  v{v} [shape=circle label="{v}"];')
    for j, p in enumerate(g.colors):
        for l in range(1, g.m + 1):
            lines.append(f"  v{p(l)} -> v{l} [color={color_names[j]}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_to_json(g: InvGraph) -> str:
    return json.dumps({"m": g.m, "colors": [list(p.images) for p in g.colors]})


def graph_from_json(text: str) -> InvGraph:
    doc = json.loads(text)
    try:
        m = int(doc["m"])
        colors = tuple(Perm(tuple(int(i) for i in imgs)) for imgs in doc["colors"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed graph JSON: {exc}") from exc
    return InvGraph(m, colors)


def _cycle_fits(cycle: tuple[int, ...], position: dict[int, int], m: int) -> bool:
    """Whether the cycle occupies a contiguous arc traversed consecutively in
    the cyclic order (forward or backward).  Fixed points always fit: the
    identity-insertion trick makes them transparent to the running product."""
    if len(cycle) == 1:
        return True
    diffs = [
        (position[cycle[(i + 1) % len(cycle)]] - position[cycle[i]]) % m
        for i in range(len(cycle))
    ]
    forward = sum(d != 1 for d in diffs) <= 1
    backward = sum(d != m - 1 for d in diffs) <= 1
    return forward or backward


def expressible_ordering(g: InvGraph) -> tuple[int, ...] | None:
    """Search all cyclic vertex orders (vertex 1 pinned first, quotienting
    rotations; reflections stay in the search space) for one in which every
    color's cycles fit per _cycle_fits.  Returns the first such order, or
    None."""
    if g.m > MAX_GRADE:
        raise ResourceLimitError(f"ordering search limited to m <= {MAX_GRADE}")
    cycles = [p.cycles() for p in g.colors]
    for rest in itertools.permutations(range(2, g.m + 1)):
        order = (1,) + rest
        position = {v: i for i, v in enumerate(order)}
        if all(
            _cycle_fits(cyc, position, g.m) for col in cycles for cyc in col
        ):
            return order
    return None
