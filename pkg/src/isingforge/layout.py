"""Orthogonal grid layout: vertex placement and Manhattan routing.

Vertices sit on junctions of a coarse lattice; a junction (i, j) is the
grid cell (4i, 4j) and the segment between two neighbouring junctions is
the three cells in between. A route is a walk along junctions that never
reuses a segment. It may bend only at an unused junction and may cross an
existing route only straight through, perpendicular to it. With junctions
four cells apart, the 3x3 box around any crossing and the cells of
unrelated routes never touch.

route_layout places vertices on a square patch and routes edges one at a
time with A*. Greedy routing can wall a vertex in; when it fails at every
tried spacing, bus_layout gives a larger layout that always routes.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass, field

import networkx as nx

from .errors import PreconditionError
from .graph import IsingGraph

__all__ = ["SPACING", "GridLayout", "placement_order", "route_layout", "bus_layout", "LayoutError"]

SPACING = 4
_DIRS = ((1, 0), (0, 1), (-1, 0), (0, -1))


class LayoutError(PreconditionError):
    """Routing failed for the current placement."""


@dataclass
class GridLayout:
    """Junction placement of vertices and junction walks of edges."""

    position: dict                      # vertex -> junction (i, j)
    routes: dict = field(default_factory=dict)     # (u, v) -> [junctions from u to v]
    crossings: list = field(default_factory=list)  # junctions where two routes cross

    def cell(self, junction) -> tuple[int, int]:
        return junction[0] * SPACING, junction[1] * SPACING

    def route_cells(self, edge) -> list[tuple[int, int]]:
        """Every grid cell along a route, endpoints included."""
        path = self.routes[edge]
        cells = [self.cell(path[0])]
        for a, b in zip(path, path[1:]):
            dx, dy = b[0] - a[0], b[1] - a[1]
            x, y = self.cell(a)
            for t in range(1, SPACING + 1):
                cells.append((x + dx * t, y + dy * t))
        return cells


def placement_order(g: IsingGraph) -> list[str]:
    """BFS order, each component started from its highest-degree vertex."""
    rank = {v: i for i, v in enumerate(g.vertices)}
    remaining = sorted(g.vertices, key=lambda v: (-g.degree(v), rank[v]))
    seen: set[str] = set()
    order: list[str] = []
    for start in remaining:
        if start in seen:
            continue
        seen.add(start)
        queue = deque([start])
        while queue:
            v = queue.popleft()
            order.append(v)
            for u in sorted(g.neighbors(v), key=rank.__getitem__):
                if u not in seen:
                    seen.add(u)
                    queue.append(u)
    return order


def _place(order: list[str], spacing: int) -> dict:
    cols = max(1, math.ceil(math.sqrt(len(order))))
    return {v: (spacing * (k % cols), spacing * (k // cols)) for k, v in enumerate(order)}


_BEND = 2       # extra cost of a bend
_CROSS = 3      # extra cost of crossing another route


def _shape(a, p, b) -> str:
    if a[1] == p[1] == b[1]:
        return "h"
    if a[0] == p[0] == b[0]:
        return "v"
    return "b"


def _route_one(start, goal, vertex_at, seg_used, state, bounds, ports):
    """A* over (junction, heading) states; returns the junction walk or None.

    Junctions in ``ports`` sit next to a vertex; routes not ending at that
    vertex may pass them straight but never bend there, so the vertex keeps
    all four exits.
    """
    (lo_i, lo_j), (hi_i, hi_j) = bounds

    def h(p):
        return abs(p[0] - goal[0]) + abs(p[1] - goal[1])

    counter = 0
    heap = []
    best = {}
    for d, (dx, dy) in enumerate(_DIRS):
        nxt = (start[0] + dx, start[1] + dy)
        heapq.heappush(heap, (1 + h(nxt), 1, counter, nxt, d, (start, nxt)))
        counter += 1
    while heap:
        _, cost, _, p, d, path = heapq.heappop(heap)
        if frozenset((path[-2], p)) in seg_used:
            continue
        if not (lo_i <= p[0] <= hi_i and lo_j <= p[1] <= hi_j):
            continue
        if p == goal:
            return list(path)
        if p in vertex_at or best.get((p, d), math.inf) <= cost:
            continue
        best[(p, d)] = cost
        st = state.get(p)
        if st is None:
            owner = ports.get(p, ())
            if owner and start not in owner and goal not in owner:
                options = [(d, 0)]
            else:
                options = [(d, 0), ((d + 1) % 4, _BEND), ((d + 3) % 4, _BEND)]
        elif st == ("h" if d % 2 else "v"):
            options = [(d, _CROSS)]  # straight over a perpendicular route
        else:
            continue
        for nd, extra in options:
            nxt = (p[0] + _DIRS[nd][0], p[1] + _DIRS[nd][1])
            if nxt in path and nxt != goal:
                continue
            c = cost + 1 + extra
            heapq.heappush(heap, (c + h(nxt), c, counter, nxt, nd, path + (nxt,)))
            counter += 1
    return None


def route_layout(g: IsingGraph, max_spacing: int = 3) -> GridLayout:
    """Place on a square lattice and route greedily; use bus_layout if that gets stuck."""
    if g.max_degree() > 4:
        raise PreconditionError("layout needs maximum degree 4")
    order = placement_order(g)
    rank = {v: k for k, v in enumerate(order)}
    edges = sorted(g.edges(), key=lambda e: tuple(sorted((rank[e[0]], rank[e[1]]))))
    for spacing in range(1, max_spacing + 1):
        layout = _try_route(edges, _place(order, spacing))
        if layout is not None:
            return layout
    return bus_layout(g)


def _try_route(edges, position) -> GridLayout | None:
    vertex_at = {p: v for v, p in position.items()}
    xs = [p[0] for p in position.values()] or [0]
    ys = [p[1] for p in position.values()] or [0]
    bounds = ((min(xs) - 2, min(ys) - 2), (max(xs) + 2, max(ys) + 2))
    ports: dict = {}
    for p in position.values():
        for dx, dy in _DIRS:
            ports.setdefault((p[0] + dx, p[1] + dy), set()).add(p)
    seg_used: set = set()
    state: dict = {}
    layout = GridLayout(position=dict(position))
    for u, v in edges:
        path = _route_one(position[u], position[v], vertex_at, seg_used, state, bounds, ports)
        if path is None:
            return None
        seg_used.update(frozenset(s) for s in zip(path, path[1:]))
        for a, p, b in zip(path, path[1:], path[2:]):
            state[p] = "x" if p in state else _shape(a, p, b)
        layout.routes[(u, v)] = path
    layout.crossings = _find_crossings(layout)
    return layout


def _edge_sides(g: IsingGraph) -> dict:
    """Give each edge a side (-1 above, +1 below), at most three per side at any vertex.

    Edges alternate sides along an Euler circuit of g plus a hub joined to
    every odd vertex, so passes through a vertex are balanced; only a
    circuit's start can end up 3 to 1.
    """
    multi = nx.MultiGraph()
    multi.add_nodes_from(g.vertices)
    for k, (u, v) in enumerate(g.edges()):
        multi.add_edge(u, v, key=k)
    hub = object()
    for v in g.vertices:
        if g.degree(v) % 2:
            multi.add_edge(hub, v, key=-1)
    sides = {}
    edges = list(g.edges())
    for comp in nx.connected_components(multi):
        sub = multi.subgraph(comp)
        if sub.number_of_edges() == 0:
            continue
        start = hub if hub in comp else min(comp, key=g.vertices.index)
        side = -1
        for _, _, k in nx.eulerian_circuit(sub, source=start, keys=True):
            if k >= 0:
                sides[edges[k]] = side
            side = -side
    return sides


def bus_layout(g: IsingGraph) -> GridLayout:
    """Layout that always routes: vertices on one row, one private track per edge.

    Vertex k sits at junction (3k + 1, 0). Its north and south exits run up
    and down its own column; the east and west exits step sideways first
    and then turn. Each edge runs along a horizontal track on its side,
    and tracks share a row only when their spans are disjoint.
    """
    if g.max_degree() > 4:
        raise PreconditionError("layout needs maximum degree 4")
    order = placement_order(g)
    position = {v: (3 * k + 1, 0) for k, v in enumerate(order)}
    sides = _edge_sides(g)
    rank = {v: k for k, v in enumerate(order)}
    edges = sorted(g.edges(), key=lambda e: tuple(sorted((rank[e[0]], rank[e[1]]))))
    port = {}   # (vertex, edge) -> column offset
    free = {v: {-1: [0, 1, -1], 1: [0, -1, 1]} for v in g.vertices}
    for e in edges:
        for v in e:
            port[v, e] = free[v][sides[e]].pop(0)
    rows = {-1: [], 1: []}   # per side: list of occupied column spans per row
    layout = GridLayout(position=dict(position))
    for e in sorted(edges, key=lambda e: min(position[e[0]][0] + port[e[0], e],
                                             position[e[1]][0] + port[e[1], e])):
        u, v = e
        cu, cv = position[u][0] + port[u, e], position[v][0] + port[v, e]
        lo, hi = min(cu, cv), max(cu, cv)
        side = sides[e]
        for r, spans in enumerate(rows[side]):
            if all(hi < a or lo > b for a, b in spans):
                spans.append((lo, hi))
                break
        else:
            r = len(rows[side])
            rows[side].append([(lo, hi)])
        y = side * (r + 1)
        path = [position[u]]
        if cu != position[u][0]:
            path.append((cu, 0))
        step = side
        path.extend((cu, t) for t in range(step, y + step, step))
        dx = 1 if cv > cu else -1
        path.extend((x, y) for x in range(cu + dx, cv + dx, dx) if cv != cu)
        path.extend((cv, t) for t in range(y - step, -step, -step) if t != 0)
        path.append((cv, 0))
        if cv != position[v][0]:
            path.append(position[v])
        layout.routes[e] = path
    layout.crossings = _find_crossings(layout)
    return layout


def _find_crossings(layout: GridLayout) -> list:
    seen: dict = {}
    crossings = []
    for path in layout.routes.values():
        for p in path[1:-1]:
            if p in seen:
                crossings.append(p)
            seen[p] = True
    return sorted(crossings, key=lambda p: (p[1], p[0]))
