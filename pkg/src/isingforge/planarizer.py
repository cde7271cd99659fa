"""Turn an arbitrary IsingGraph into a rectangular GridIsing.

embed_grid runs, in order:

1. absorb pinned vertices into their neighbours' fields;
2. flatten any explicitly requested crossings with remove_crossing and
   put the new cycle edges on the corners of a 3x3 box;
3. if the graph already is a W x H grid, relabel it and stop;
4. for small graphs, look for a compact pin-free embedding;
5. otherwise split vertices to degree at most 4, place and route the graph
   on a coarse junction lattice, flatten route crossings, subdivide every
   route into unit steps and fill the remaining cells of the bounding box
   with cells frozen to +1.

Every step keeps Z(g) = P * Z(current) exactly, and the returned grid
carries the accumulated prefactor, so Z(g) = grid.prefactor * Z(grid).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import networkx as nx

from .compact import compact_grid, find_compact_embedding
from .errors import PreconditionError
from .fields import ComplexField, Prefactor
from .graph import GridIsing, IsingGraph
from .layout import SPACING, GridLayout, route_layout
from .rewrites import absorb_pinned, remove_crossing, split_vertex, subdivide_edge, subdivide_path

__all__ = ["TraceStep", "uniformize_degrees", "embed_grid", "grid_size_bound", "COMPACT_LIMIT"]

COMPACT_LIMIT = 6
SIZE_FACTOR = 64


@dataclass(frozen=True)
class TraceStep:
    """One rewrite: Z(graph before) = delta * Z(graph)."""

    step: int
    rule: str
    delta: Prefactor
    graph: IsingGraph

    def log_line(self) -> str:
        return f"{self.step} {self.rule} {self.delta.log_magnitude!r} {self.delta.phase!r}"


class _Recorder:
    """Current graph plus the product of all step factors.

    The log-magnitudes are summed with fsum at the end; a running float sum
    over thousands of steps loses about 1e-10 of relative accuracy.
    """

    def __init__(self, g: IsingGraph, trace: list | None):
        self.g = g
        self.logs: list[float] = []
        self.phases: list[float] = []
        self.trace = trace

    @property
    def p(self) -> Prefactor:
        return Prefactor(math.fsum(self.logs), math.fsum(self.phases))

    def multiply(self, delta: Prefactor) -> None:
        self.logs.append(delta.log_magnitude)
        self.phases.append(delta.phase)

    def apply(self, rule: str, result) -> None:
        g, delta = result
        self.g = g
        self.multiply(delta)
        if self.trace is not None:
            self.trace.append(TraceStep(len(self.trace) + 1, rule, delta, g.copy()))


def grid_size_bound(n_vertices: int) -> int:
    """Regression tripwire on the number of grid cells.

    Sparse inputs stay well inside it. Dense inputs that fall back to the
    bus layout can exceed it; embed_grid does not enforce it.
    """
    return SIZE_FACTOR * max(1, n_vertices) ** 2


def uniformize_degrees(g: IsingGraph, rec: _Recorder | None = None) -> tuple[IsingGraph, Prefactor]:
    """Split every vertex of degree above 4; the first part keeps three neighbours."""
    rec = rec or _Recorder(g, None)
    changed = True
    while changed:
        changed = False
        for v in rec.g.vertices:
            if rec.g.degree(v) > 4:
                nbrs = rec.g.neighbors(v)
                rec.apply(f"split {v}", split_vertex(rec.g, v, (nbrs[:3], nbrs[3:])))
                changed = True
                break
    return rec.g, rec.p


# ------------------------------------------------------------ direct grids


def _as_grid(g: IsingGraph):
    """(W, H, vertex -> cell) if g is exactly a W x H grid graph, else None."""
    n = len(g)
    if n == 0 or g.pinned_vertices():
        return None
    target = nx.Graph()
    target.add_nodes_from(g.vertices)
    target.add_edges_from(g.edges())
    for H in range(1, n + 1):
        if n % H:
            continue
        W = n // H
        if W < H or g.n_edges != 2 * W * H - W - H:
            continue
        grid = nx.grid_2d_graph(W, H)
        matcher = nx.algorithms.isomorphism.GraphMatcher(target, grid)
        if matcher.is_isomorphic():
            return W, H, dict(matcher.mapping)
    return None


def _relabelled_grid(g: IsingGraph, W: int, H: int, cell_of: dict) -> GridIsing:
    fields = [[ComplexField() for _ in range(W)] for _ in range(H)]
    for v, (x, y) in cell_of.items():
        fields[y][x] = g.field(v).canonical()
    return GridIsing(W, H, fields)


# ------------------------------------------------------------ general path


def _realize(rec: _Recorder, layout: GridLayout) -> dict:
    """Rewrite rec.g along the layout; returns the cell of every vertex."""
    crossing_cells = {layout.cell(p) for p in layout.crossings}
    cell_of = {v: layout.cell(p) for v, p in layout.position.items()}

    def cell_name(c):
        return f"r{c[0]}_{c[1]}"

    for (u, v), _ in sorted(layout.routes.items(), key=lambda kv: kv[1]):
        cells = layout.route_cells((u, v))
        inner = [c for c in cells[1:-1] if c not in crossing_cells]
        names = [cell_name(c) for c in inner]
        rec.apply(f"subdivide-path {u} {v} {len(names)}", subdivide_path(rec.g, (u, v), names))
        cell_of.update(zip(names, inner))
    for x, y in (layout.cell(p) for p in layout.crossings):
        w, n, e, s = (cell_name(c) for c in ((x - 1, y), (x, y - 1), (x + 1, y), (x, y + 1)))
        anc = cell_name((x, y))
        rec.apply(f"crossing {anc}", remove_crossing(rec.g, (w, e), (n, s), ancilla=anc))
        cell_of[anc] = (x, y)
        for a, b, corner in ((w, n, (x - 1, y - 1)), (n, e, (x + 1, y - 1)),
                             (e, s, (x + 1, y + 1)), (s, w, (x - 1, y + 1))):
            if rec.g.has_edge(a, b):
                name = cell_name(corner)
                rec.apply(f"subdivide {a} {b}", subdivide_edge(rec.g, (a, b), new=name))
                cell_of[name] = corner
    return cell_of


def _densify(g: IsingGraph, cell_of: dict) -> tuple[GridIsing, Prefactor]:
    """Fill the bounding box; empty cells are frozen to +1 and compensated."""
    xs = [c[0] for c in cell_of.values()]
    ys = [c[1] for c in cell_of.values()]
    x0, y0 = min(xs), min(ys)
    W, H = max(xs) - x0 + 1, max(ys) - y0 + 1
    at = {(c[0] - x0, c[1] - y0): v for v, c in cell_of.items()}
    for v, c in cell_of.items():
        for u in g.neighbors(v):
            cu = cell_of[u]
            if abs(cu[0] - c[0]) + abs(cu[1] - c[1]) != 1:
                raise PreconditionError(f"edge {v}-{u} is not a unit grid step")
    fields = [[ComplexField() for _ in range(W)] for _ in range(H)]
    fixed = set()
    fixed_pairs = 0
    for y in range(H):
        for x in range(W):
            v = at.get((x, y))
            nbrs = [(x + dx, y + dy) for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1))
                    if 0 <= x + dx < W and 0 <= y + dy < H]
            if v is None:
                fixed.add((x, y))
                fixed_pairs += sum(1 for c in nbrs if c not in at and c > (x, y))
            else:
                n_fixed = sum(1 for c in nbrs if c not in at)
                fields[y][x] = g.field(v).shift(-n_fixed).canonical()
    return GridIsing(W, H, fields, fixed=fixed), Prefactor.quarter(-fixed_pairs)


# ------------------------------------------------------------ driver


def embed_grid(g: IsingGraph, crossings=(), trace: list | None = None,
               compact_limit: int = COMPACT_LIMIT) -> GridIsing:
    """Rewrite g into a GridIsing with Z(g) = grid.prefactor * Z(grid).

    ``crossings`` lists pairs of edges ((v1, v3), (v2, v4)) to flatten
    first. ``trace``, when given, receives one TraceStep per rewrite.
    """
    rec = _Recorder(g.copy(), trace)
    for v in g.pinned_vertices():
        rec.apply(f"absorb {v}", absorb_pinned(rec.g, v))
    if len(rec.g) == 0:
        grid = GridIsing(1, 1, [[ComplexField()]], Prefactor(rec.p.log_magnitude - math.log(2),
                                                               rec.p.phase))
        return grid
    for k, (e13, e24) in enumerate(crossings):
        anc = rec.g.fresh_id(f"x{k}")
        rec.apply(f"crossing {anc}", remove_crossing(rec.g, tuple(e13), tuple(e24), ancilla=anc))
        ring = (e13[0], e24[0], e13[1], e24[1])
        for j in range(4):
            a, b = ring[j], ring[(j + 1) % 4]
            if rec.g.has_edge(a, b):
                rec.apply(f"subdivide {a} {b}", subdivide_edge(rec.g, (a, b),
                                                               new=rec.g.fresh_id(f"{anc}.{j}")))

    direct = _as_grid(rec.g)
    if direct is not None:
        grid = _relabelled_grid(rec.g, *direct)
        _finish_trace(rec, "relabel", Prefactor.one(), grid)
        return _with_prefactor(grid, rec.p)

    if len(rec.g) <= compact_limit:
        emb = find_compact_embedding(rec.g)
        if emb is not None:
            grid, p = compact_grid(rec.g, emb)
            _finish_trace(rec, "compact", p, grid)
            rec.multiply(p)
            return _with_prefactor(grid, rec.p)

    uniformize_degrees(rec.g, rec)
    layout = route_layout(rec.g)
    cell_of = _realize(rec, layout)
    grid, p = _densify(rec.g, cell_of)
    _finish_trace(rec, "densify", p, grid)
    rec.multiply(p)
    return _with_prefactor(grid, rec.p)


def _finish_trace(rec: _Recorder, rule: str, delta: Prefactor, grid: GridIsing) -> None:
    if rec.trace is not None:
        rec.trace.append(TraceStep(len(rec.trace) + 1, rule, delta, grid.to_ising_graph()))


def _with_prefactor(grid: GridIsing, p: Prefactor) -> GridIsing:
    return GridIsing(grid.width, grid.height, grid.fields, p, grid.fixed)
