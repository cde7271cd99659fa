"""Plain-text formats for graphs, grids, partition functions and provenance.

Graph::

    graph
    vertex <id> <real> <quarter_turns> <residual_imag> [pinned +1|-1]
    edge <u> <v>
    prefactor <log_magnitude> <phase>

Grid::

    grid <W> <H>
    cell <x> <y> <real> <quarter_turns> <residual_imag> [fixed]
    prefactor <log_magnitude> <phase>

Floats are written with repr, so reading a file back gives identical values.
Blank lines and text after '#' are ignored.
"""

from __future__ import annotations

from .errors import MalformedGraphError, ModelSyntaxError
from .fields import ComplexField, Prefactor
from .graph import GridIsing, IsingGraph

__all__ = [
    "dump_graph",
    "load_graph",
    "dump_grid",
    "load_grid",
    "load_artifact",
    "dump_provenance",
    "dump_zreport",
]


def _field_text(h: ComplexField) -> str:
    return str(h)


def _prefactor_line(p: Prefactor) -> str:
    return f"prefactor {p.log_magnitude!r} {p.phase!r}"


def dump_graph(g: IsingGraph, p: Prefactor | None = None) -> str:
    lines = ["graph"]
    for v in g.vertices:
        line = f"vertex {v} {_field_text(g.field(v))}"
        s = g.pinned(v)
        if s is not None:
            line += f" pinned {'+1' if s > 0 else '-1'}"
        lines.append(line)
    lines.extend(f"edge {u} {v}" for u, v in g.edges())
    lines.append(_prefactor_line(p or Prefactor.one()))
    return "\n".join(lines) + "\n"


def dump_grid(grid: GridIsing) -> str:
    lines = [f"grid {grid.width} {grid.height}"]
    for y in range(grid.height):
        for x in range(grid.width):
            line = f"cell {x} {y} {_field_text(grid.field(x, y))}"
            if (x, y) in grid.fixed:
                line += " fixed"
            lines.append(line)
    lines.append(_prefactor_line(grid.prefactor))
    return "\n".join(lines) + "\n"


def _lines(text: str):
    for n, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            yield n, body.split()


def _err(n: int, msg: str) -> ModelSyntaxError:
    return ModelSyntaxError(msg, n, 1)


def _parse_field(n: int, parts) -> ComplexField:
    try:
        return ComplexField(float(parts[0]), int(parts[1]), float(parts[2]))
    except (ValueError, IndexError):
        raise _err(n, "expected <real> <quarter_turns> <residual_imag>") from None


def _parse_prefactor(n: int, parts) -> Prefactor:
    if len(parts) != 3:
        raise _err(n, "expected prefactor <log_magnitude> <phase>")
    try:
        return Prefactor(float(parts[1]), float(parts[2]))
    except ValueError:
        raise _err(n, "prefactor values must be numbers") from None


def load_graph(text: str) -> tuple[IsingGraph, Prefactor]:
    rows = list(_lines(text))
    if not rows:
        raise ModelSyntaxError("empty graph file", 1, 1)
    n0, head = rows[0]
    if head != ["graph"]:
        raise _err(n0, "graph file must start with 'graph'")
    g = IsingGraph()
    p = Prefactor.one()
    for n, parts in rows[1:]:
        kind = parts[0]
        try:
            if kind == "vertex":
                if len(parts) not in (5, 7):
                    raise _err(n, "expected vertex <id> <real> <q> <resid> [pinned +1|-1]")
                pinned = None
                if len(parts) == 7:
                    if parts[5] != "pinned" or parts[6] not in ("+1", "-1", "1"):
                        raise _err(n, "pinned marker must be 'pinned +1' or 'pinned -1'")
                    pinned = -1 if parts[6] == "-1" else 1
                g.add_vertex(parts[1], _parse_field(n, parts[2:5]), pinned)
            elif kind == "edge":
                if len(parts) != 3:
                    raise _err(n, "expected edge <u> <v>")
                g.add_edge(parts[1], parts[2])
            elif kind == "prefactor":
                p = _parse_prefactor(n, parts)
            else:
                raise _err(n, f"unknown record {kind!r}")
        except MalformedGraphError as exc:
            raise _err(n, str(exc)) from None
    return g, p


def load_grid(text: str) -> GridIsing:
    rows = list(_lines(text))
    if not rows:
        raise ModelSyntaxError("empty grid file", 1, 1)
    n0, head = rows[0]
    if len(head) != 3 or head[0] != "grid":
        raise _err(n0, "grid file must start with 'grid <W> <H>'")
    try:
        W, H = int(head[1]), int(head[2])
    except ValueError:
        raise _err(n0, "grid size must be integers") from None
    if W < 1 or H < 1:
        raise _err(n0, "grid size must be positive")
    fields = [[ComplexField() for _ in range(W)] for _ in range(H)]
    fixed = set()
    p = Prefactor.one()
    seen = set()
    for n, parts in rows[1:]:
        if parts[0] == "cell":
            if len(parts) not in (6, 7) or (len(parts) == 7 and parts[6] != "fixed"):
                raise _err(n, "expected cell <x> <y> <real> <q> <resid> [fixed]")
            try:
                x, y = int(parts[1]), int(parts[2])
            except ValueError:
                raise _err(n, "cell coordinates must be integers") from None
            if not (0 <= x < W and 0 <= y < H) or (x, y) in seen:
                raise _err(n, f"bad or repeated cell ({x}, {y})")
            seen.add((x, y))
            fields[y][x] = _parse_field(n, parts[3:6])
            if len(parts) == 7:
                fixed.add((x, y))
        elif parts[0] == "prefactor":
            p = _parse_prefactor(n, parts)
        else:
            raise _err(n, f"unknown record {parts[0]!r}")
    return GridIsing(W, H, fields, p, fixed)


def load_artifact(text: str):
    """('graph', (g, P)) or ('grid', grid) depending on the header line."""
    for _, parts in _lines(text):
        if parts[0] == "grid":
            return "grid", load_grid(text)
        return "graph", load_graph(text)
    raise ModelSyntaxError("empty file", 1, 1)


def dump_provenance(origin: dict) -> str:
    return "".join(f"{v} {src}\n" for v, src in origin.items())


def dump_zreport(z) -> str:
    return f"{z}\n"
