"""Text format for spin models and generators for the standard lattices.

Statements are separated by newlines or semicolons::

    # two coupled spins
    site a spin; site b spin
    term {a b} 0.5
    term {a} 1*i*pi/4
    site q potts3; site r potts3
    term delta {q r} 0.2-0.1i

A coupling is a signed sum of parts: a decimal (real), a decimal followed
by ``i`` (imaginary) and ``k*i*pi/4`` (an exact quarter turn count).
"""

from __future__ import annotations

import re

from .errors import LatticeSizeError, ModelSemanticError, ModelSyntaxError
from .fields import ComplexField
from .model import ARITY_NAMES, ModelSource, Site, SpinModel, Term

__all__ = [
    "parse_model",
    "parse_source",
    "render_model",
    "parse_coupling",
    "render_coupling",
    "gen_lattice",
    "LATTICE_KINDS",
    "DEFAULT_SITE_CAP",
]

DEFAULT_SITE_CAP = 10_000
LATTICE_KINDS = ("square", "triangular", "hexagonal", "triangular3body")

_ID = r"[A-Za-z_][A-Za-z0-9_.]*"
_DEC = r"(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?"
_KINDS = {name: arity for arity, name in ARITY_NAMES.items()}
_SITE_RE = re.compile(rf"site\s+({_ID})\s+(\w+)\s*$")
_TERM_RE = re.compile(rf"term(\s+delta)?\s*\{{([^}}]*)\}}\s*(.*?)\s*$")
_PART_RE = re.compile(rf"\s*([+-])?\s*(?:(\d+)\*i\*pi/4|({_DEC})(i?))")


def parse_coupling(text: str) -> ComplexField:
    """Parse ``0.5``, ``0.5+0.2i``, ``-3*i*pi/4`` or a signed sum of such parts."""
    text = text.strip()
    if not text:
        raise ValueError("missing coupling")
    real = imag = 0.0
    quarter = 0
    pos = 0
    first = True
    while pos < len(text):
        m = _PART_RE.match(text, pos)
        if m is None or (not first and m.group(1) is None):
            raise ValueError(f"bad coupling near {text[pos:]!r}")
        sign = -1 if m.group(1) == "-" else 1
        if m.group(2) is not None:
            quarter += sign * int(m.group(2))
        elif m.group(4):
            imag += sign * float(m.group(3))
        else:
            real += sign * float(m.group(3))
        pos = m.end()
        first = False
    return ComplexField(real, quarter, imag)


def render_coupling(h: ComplexField) -> str:
    parts = []
    if h.real_part != 0.0 or (h.quarter_turns == 0 and h.residual_imag == 0.0):
        parts.append(repr(h.real_part))
    if h.residual_imag != 0.0:
        parts.append(f"{h.residual_imag!r}i")
    if h.quarter_turns:
        parts.append(f"{h.quarter_turns}*i*pi/4")
    out = parts[0]
    for p in parts[1:]:
        out += p if p.startswith("-") else "+" + p
    return out


def _statements(text: str):
    """Yield (line, column, statement) with comments stripped."""
    for lineno, line in enumerate(text.splitlines(), start=1):
        hash_pos = line.find("#")
        if hash_pos >= 0:
            line = line[:hash_pos]
        col = 0
        for chunk in line.split(";"):
            stripped = chunk.strip()
            if stripped:
                yield lineno, col + len(chunk) - len(chunk.lstrip()) + 1, stripped
            col += len(chunk) + 1


def parse_model(text: str) -> SpinModel:
    """Parse model text into a validated SpinModel."""
    sites: list[Site] = []
    terms: list[Term] = []
    for line, col, stmt in _statements(text):
        keyword = stmt.split(None, 1)[0]
        if keyword == "site":
            m = _SITE_RE.match(stmt)
            if m is None:
                raise ModelSyntaxError("expected 'site <id> (spin|potts3|potts4)'", line, col)
            kind = m.group(2)
            if kind not in _KINDS:
                raise ModelSyntaxError(f"unknown site kind {kind!r}", line, col + m.start(2))
            sites.append(Site(m.group(1), _KINDS[kind]))
        elif keyword == "term":
            m = _TERM_RE.match(stmt)
            if m is None:
                raise ModelSyntaxError("expected 'term [delta] { <id>+ } <coupling>'", line, col)
            ids = m.group(2).split()
            if not ids:
                raise ModelSyntaxError("empty site list", line, col + m.start(2))
            for sid in ids:
                if not re.fullmatch(_ID, sid):
                    raise ModelSyntaxError(f"bad site id {sid!r}", line, col + m.start(2))
            try:
                coupling = parse_coupling(m.group(3))
            except ValueError as exc:
                raise ModelSyntaxError(str(exc), line, col + m.start(3)) from None
            terms.append(Term(tuple(ids), coupling, bool(m.group(1))))
        else:
            raise ModelSyntaxError(f"unknown statement {keyword!r}", line, col)
    if not sites:
        raise ModelSyntaxError("model declares no sites", 1, 1)
    return SpinModel(tuple(sites), tuple(terms))


def parse_source(text: str, name: str = "") -> ModelSource:
    return ModelSource(text=text, model=parse_model(text), name=name)


def render_model(m: SpinModel) -> str:
    lines = [f"site {s.id} {ARITY_NAMES[s.arity]}" for s in m.sites]
    for t in m.terms:
        head = "term delta" if t.delta else "term"
        lines.append(f"{head} {{{' '.join(t.sites)}}} {render_coupling(t.coupling)}")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------ lattices


def _triangles(rows: int, cols: int) -> list[tuple[tuple[int, int], ...]]:
    """Triangles of a sheared triangular strip patch.

    Cell (x, y) holds an up triangle (x,y),(x+1,y),(x,y+1) and a down
    triangle (x+1,y),(x+1,y+1),(x,y+1); each of the ``rows`` strips holds
    ``cols`` triangles, alternating up and down.
    """
    tris = []
    for y in range(rows):
        for k in range(cols):
            x = k // 2
            if k % 2 == 0:
                tris.append(((x, y), (x + 1, y), (x, y + 1)))
            else:
                tris.append(((x + 1, y), (x + 1, y + 1), (x, y + 1)))
    return tris


def _hexagons(rows: int, cols: int) -> list[tuple[tuple[int, int], ...]]:
    """Hexagons of a brick-wall honeycomb patch, vertices in cyclic order."""
    hexes = []
    for y in range(rows):
        for c in range(cols):
            x = (y % 2) + 2 * c
            hexes.append(((x, y), (x + 1, y), (x + 2, y), (x + 2, y + 1), (x + 1, y + 1), (x, y + 1)))
    return hexes


def _polygon_edges(polys) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    seen = {}
    for poly in polys:
        for a, b in zip(poly, poly[1:] + poly[:1]):
            key = frozenset((a, b))
            if key not in seen:
                seen[key] = (a, b)
    return list(seen.values())


def _site_name(p: tuple[int, int]) -> str:
    return f"s{p[1]}_{p[0]}"


def gen_lattice(kind: str, rows: int, cols: int, J: ComplexField,
                cap: int = DEFAULT_SITE_CAP) -> SpinModel:
    """Free-boundary lattice patches with uniform coupling J.

    ``square`` has rows x cols plaquettes, ``triangular`` and
    ``triangular3body`` have rows strips of cols triangles, ``hexagonal``
    has rows x cols hexagons in a brick-wall arrangement.
    """
    if kind not in LATTICE_KINDS:
        raise ValueError(f"unknown lattice kind {kind!r}")
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be at least 1")
    if kind == "square":
        if (rows + 1) * (cols + 1) > cap:
            raise LatticeSizeError(f"{(rows + 1) * (cols + 1)} sites exceed the cap of {cap}")
        pts = [(x, y) for y in range(rows + 1) for x in range(cols + 1)]
        edges = []
        for x, y in pts:
            if x < cols:
                edges.append(((x, y), (x + 1, y)))
            if y < rows:
                edges.append(((x, y), (x, y + 1)))
        polys = None
    else:
        polys = _hexagons(rows, cols) if kind == "hexagonal" else _triangles(rows, cols)
        pts = sorted({p for poly in polys for p in poly}, key=lambda p: (p[1], p[0]))
        if len(pts) > cap:
            raise LatticeSizeError(f"{len(pts)} sites exceed the cap of {cap}")
        edges = _polygon_edges(polys)
        order = {p: i for i, p in enumerate(pts)}
        edges = sorted(
            (tuple(sorted(e, key=order.__getitem__)) for e in edges),
            key=lambda e: (order[e[0]], order[e[1]]),
        )
    sites = tuple(Site(_site_name(p)) for p in pts)
    if kind == "triangular3body":
        terms = tuple(Term(tuple(_site_name(p) for p in tri), J) for tri in polys)
    else:
        terms = tuple(Term((_site_name(a), _site_name(b)), J) for a, b in edges)
    try:
        return SpinModel(sites, terms)
    except ModelSemanticError:  # pragma: no cover - generator bug guard
        raise
