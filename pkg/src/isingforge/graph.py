"""Mid-level and target representations: IsingGraph, ConstraintSystem, GridIsing."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from .errors import MalformedGraphError
from .fields import ZERO, ComplexField, Prefactor

__all__ = [
    "IsingGraph",
    "ConstraintSystem",
    "GridIsing",
    "Diagnostics",
    "validate",
]


class IsingGraph:
    """Simple graph whose every edge carries the coupling i*pi/4.

    Vertices keep insertion order, which fixes every iteration order and
    therefore every serialization. Rewrite functions copy before mutating.
    """

    def __init__(self, vertices: Iterable = (), edges: Iterable = ()):
        self._field: dict[str, ComplexField] = {}
        self._pinned: dict[str, int | None] = {}
        self._adj: dict[str, dict[str, None]] = {}
        self._rank: dict[str, int] = {}
        self._counter = 0
        for item in vertices:
            if isinstance(item, str):
                vid, h, pin = item, ZERO, None
            else:
                vid, h, *rest = item
                pin = rest[0] if rest else None
            if vid in self._field:
                raise MalformedGraphError(f"duplicate vertex id {vid}")
            self.add_vertex(vid, h, pin)
        for u, v in edges:
            if u not in self._field or v not in self._field:
                raise MalformedGraphError(f"dangling edge ({u}, {v})")
            if u == v:
                raise MalformedGraphError(f"self-loop at {u}")
            if v in self._adj[u]:
                raise MalformedGraphError(f"parallel edge ({u}, {v})")
            self.add_edge(u, v)

    # read access -----------------------------------------------------

    @property
    def vertices(self) -> list[str]:
        return list(self._field)

    def __contains__(self, v: str) -> bool:
        return v in self._field

    def __len__(self) -> int:
        return len(self._field)

    def field(self, v: str) -> ComplexField:
        return self._field[v]

    def pinned(self, v: str) -> int | None:
        return self._pinned[v]

    def neighbors(self, v: str) -> list[str]:
        return list(self._adj[v])

    def degree(self, v: str) -> int:
        return len(self._adj[v])

    def rank_of(self, v: str) -> int:
        """Insertion rank of v; orders vertices and edges deterministically."""
        return self._rank[v]

    def has_edge(self, u: str, v: str) -> bool:
        return u in self._adj and v in self._adj[u]

    def edges(self) -> list[tuple[str, str]]:
        rank = self._rank
        out = []
        for u in self._field:
            for v in self._adj[u]:
                if rank[u] < rank[v]:
                    out.append((u, v))
        return out

    @property
    def n_edges(self) -> int:
        return sum(len(a) for a in self._adj.values()) // 2

    def free_vertices(self) -> list[str]:
        return [v for v in self._field if self._pinned[v] is None]

    def pinned_vertices(self) -> list[str]:
        return [v for v in self._field if self._pinned[v] is not None]

    def max_degree(self) -> int:
        return max((len(a) for a in self._adj.values()), default=0)

    # mutation (used by builders and on copies inside rewrites) --------

    def add_vertex(self, v: str, h: ComplexField = ZERO, pinned: int | None = None) -> str:
        if v in self._field:
            raise MalformedGraphError(f"duplicate vertex id {v}")
        if pinned not in (None, 1, -1):
            raise MalformedGraphError(f"pinned value must be +1 or -1, got {pinned}")
        self._field[v] = h
        self._pinned[v] = pinned
        self._adj[v] = {}
        self._rank[v] = self._counter
        self._counter += 1
        return v

    def remove_vertex(self, v: str) -> None:
        for u in self._adj[v]:
            del self._adj[u][v]
        del self._adj[v], self._field[v], self._pinned[v], self._rank[v]

    def add_edge(self, u: str, v: str) -> None:
        if u == v:
            raise MalformedGraphError(f"self-loop at {u}")
        for w in (u, v):
            if w not in self._adj:
                raise MalformedGraphError(f"edge endpoint {w} is not a vertex")
        if v in self._adj[u]:
            raise MalformedGraphError(f"parallel edge ({u}, {v})")
        self._adj[u][v] = None
        self._adj[v][u] = None

    def remove_edge(self, u: str, v: str) -> None:
        del self._adj[u][v]
        del self._adj[v][u]

    def set_field(self, v: str, h: ComplexField) -> None:
        self._field[v] = h

    def shift_field(self, v: str, k: int) -> None:
        """Add k quarter turns to the field of v."""
        self._field[v] = self._field[v].shift(k)

    def set_pinned(self, v: str, value: int | None) -> None:
        if value not in (None, 1, -1):
            raise MalformedGraphError(f"pinned value must be +1 or -1, got {value}")
        self._pinned[v] = value

    def fresh_id(self, prefix: str) -> str:
        k = 0
        while f"{prefix}{k}" in self._field:
            k += 1
        return f"{prefix}{k}"

    def copy(self) -> "IsingGraph":
        g = IsingGraph()
        g._field = dict(self._field)
        g._pinned = dict(self._pinned)
        g._adj = {v: dict(a) for v, a in self._adj.items()}
        g._rank = dict(self._rank)
        g._counter = self._counter
        return g

    def canonicalized(self) -> "IsingGraph":
        g = self.copy()
        for v in g._field:
            g._field[v] = g._field[v].canonical()
        return g

    # comparison -------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, IsingGraph):
            return NotImplemented
        return (
            self._field == other._field
            and self._pinned == other._pinned
            and {frozenset(e) for e in self.edges()} == {frozenset(e) for e in other.edges()}
        )

    def __repr__(self) -> str:
        return f"IsingGraph(|V|={len(self)}, |E|={self.n_edges})"


@dataclass(frozen=True)
class ConstraintSystem:
    """Term variables with fields plus independent parity constraints.

    Each constraint asks the product of its member spins to equal +1.
    """

    variables: tuple[tuple[str, ComplexField], ...]
    constraints: tuple[tuple[str, ...], ...]
    overcount_exponent: int
    n_sites: int = 0

    @property
    def variable_ids(self) -> list[str]:
        return [v for v, _ in self.variables]


@dataclass(frozen=True)
class GridIsing:
    """Rectangular W x H lattice, every nearest-neighbour coupling i*pi/4.

    ``fields[y][x]`` holds the field of cell (x, y). Cells listed in
    ``fixed`` are frozen to +1 instead of summed; a grid with no fixed
    cells is pin-free.
    """

    width: int
    height: int
    fields: tuple[tuple[ComplexField, ...], ...]
    prefactor: Prefactor = field(default_factory=Prefactor.one)
    fixed: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "fields", tuple(tuple(row) for row in self.fields))
        object.__setattr__(self, "fixed", frozenset(self.fixed))

    def field(self, x: int, y: int) -> ComplexField:
        return self.fields[y][x]

    @property
    def n_cells(self) -> int:
        return self.width * self.height

    @property
    def n_free(self) -> int:
        return self.n_cells - len(self.fixed)

    @property
    def is_pin_free(self) -> bool:
        return not self.fixed

    def n_couplings(self) -> int:
        return 2 * self.width * self.height - self.width - self.height

    def check_invariants(self) -> list[str]:
        """Return a list of violated invariants (empty when the grid is well formed)."""
        problems = []
        if self.width < 1 or self.height < 1:
            problems.append("empty grid")
        if len(self.fields) != self.height or any(len(r) != self.width for r in self.fields):
            problems.append("field array does not match width x height")
        for x, y in self.fixed:
            if not (0 <= x < self.width and 0 <= y < self.height):
                problems.append(f"fixed cell ({x}, {y}) outside grid")
        if self.fixed:
            problems.append(f"{len(self.fixed)} fixed cells (grid is not pin-free)")
        return problems

    def cell_id(self, x: int, y: int) -> str:
        return f"c{x}_{y}"

    def to_ising_graph(self) -> IsingGraph:
        g = IsingGraph()
        for y in range(self.height):
            for x in range(self.width):
                g.add_vertex(self.cell_id(x, y), self.fields[y][x],
                             1 if (x, y) in self.fixed else None)
        for y in range(self.height):
            for x in range(self.width):
                if x + 1 < self.width:
                    g.add_edge(self.cell_id(x, y), self.cell_id(x + 1, y))
                if y + 1 < self.height:
                    g.add_edge(self.cell_id(x, y), self.cell_id(x, y + 1))
        return g


@dataclass(frozen=True)
class Diagnostics:
    n_vertices: int
    n_edges: int
    degree_histogram: dict
    max_degree: int
    pinned_count: int
    components: int
    nonplanar: bool


def validate(g: IsingGraph) -> Diagnostics:
    """Structural summary of a graph; never mutates it."""
    degrees = [g.degree(v) for v in g.vertices]
    seen: set[str] = set()
    components = 0
    for v in g.vertices:
        if v in seen:
            continue
        components += 1
        stack = [v]
        seen.add(v)
        while stack:
            u = stack.pop()
            for w in g.neighbors(u):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
    n, m = len(g), g.n_edges
    return Diagnostics(
        n_vertices=n,
        n_edges=m,
        degree_histogram=dict(sorted(Counter(degrees).items())),
        max_degree=max(degrees, default=0),
        pinned_count=len(g.pinned_vertices()),
        components=components,
        nonplanar=n >= 3 and m > 3 * n - 6,
    )
