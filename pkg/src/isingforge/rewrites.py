"""Partition-function preserving rewrites of an IsingGraph.

Every rewrite returns (g', P) with Z(g) = P * Z(g'). Inputs are never
modified. The constants come from the fitted gadget templates, except the
spin pin which is the single-member parity gadget.
"""

from __future__ import annotations

import math

from .errors import PreconditionError
from .fields import ComplexField, Prefactor
from .gadgets import template
from .graph import IsingGraph

__all__ = [
    "toggle_edge",
    "attach_leaf",
    "split_vertex",
    "merge_vertices",
    "subdivide_edge",
    "subdivide_path",
    "pin_spin",
    "absorb_pinned",
    "insert_plaquette_spin",
    "remove_crossing",
]

_MINUS_I = Prefactor.quarter(-2)


def _require(g: IsingGraph, *vs: str) -> None:
    for v in vs:
        if v not in g:
            raise PreconditionError(f"unknown vertex {v}")


def toggle_edge(g: IsingGraph, u: str, v: str) -> Prefactor:
    """Add i*pi/4 S_u S_v to the energy of g, in place.

    When the edge already exists the doubled coupling i*pi/2 S_u S_v equals
    -i e^{-i*pi/2 (S_u + S_v)}, so the edge is removed and both fields move
    by -i*pi/2. The returned factor F satisfies W_before_toggle * e^{...} = F * W_after.
    """
    if g.has_edge(u, v):
        g.remove_edge(u, v)
        g.shift_field(u, -2)
        g.shift_field(v, -2)
        return _MINUS_I
    g.add_edge(u, v)
    return Prefactor.one()


def attach_leaf(g: IsingGraph, v: str, leaf: str | None = None) -> tuple[IsingGraph, Prefactor]:
    """Hang a zero-field leaf on v; the leaf sum is the constant sqrt(2)."""
    _require(g, v)
    t = template("leaf")
    out = g.copy()
    leaf = leaf or out.fresh_id("leaf")
    out.add_vertex(leaf, ComplexField.quarter(t.a0))
    out.add_edge(v, leaf)
    out.shift_field(v, t.leg_shifts[0])
    return out, t.delta_prefactor


def subdivide_edge(g: IsingGraph, e: tuple[str, str], new: str | None = None
                   ) -> tuple[IsingGraph, Prefactor]:
    """Replace edge u-v by u-w-v with fitted fields (w: +i*pi/4, u and v: -i*pi/4)."""
    u, v = e
    _require(g, u, v)
    if not g.has_edge(u, v):
        raise PreconditionError(f"no edge ({u}, {v})")
    t = template("subdivide")
    out = g.copy()
    w = new or out.fresh_id("sub")
    out.remove_edge(u, v)
    out.add_vertex(w, ComplexField.quarter(t.a0))
    out.add_edge(u, w)
    out.add_edge(w, v)
    out.shift_field(u, t.leg_shifts[0])
    out.shift_field(v, t.leg_shifts[1])
    return out, t.delta_prefactor


def subdivide_path(g: IsingGraph, e: tuple[str, str], names) -> tuple[IsingGraph, Prefactor]:
    """Replace edge u-v by the chain u-w1-...-wk-v in one copy.

    Same result as subdividing (u, v), then (w1, v), then (w2, v) and so on:
    u and the last new vertex keep their single-step shifts, every inner
    new vertex ends at zero field, v collects k legs and P = c^k.
    """
    u, v = e
    names = list(names)
    _require(g, u, v)
    if not g.has_edge(u, v):
        raise PreconditionError(f"no edge ({u}, {v})")
    if len(set(names)) != len(names) or any(w in g for w in names):
        raise PreconditionError("new vertex names must be fresh and distinct")
    t = template("subdivide")
    out = g.copy()
    if not names:
        return out, Prefactor.one()
    out.remove_edge(u, v)
    out.shift_field(u, t.leg_shifts[0])
    prev = u
    for j, w in enumerate(names):
        last = j == len(names) - 1
        out.add_vertex(w, ComplexField.quarter(t.a0 + (0 if last else t.leg_shifts[0])))
        out.add_edge(prev, w)
        prev = w
    out.add_edge(prev, v)
    out.shift_field(v, t.leg_shifts[1] * len(names))
    return out, t.delta_prefactor ** len(names)


def split_vertex(g: IsingGraph, v: str, partition, names=None) -> tuple[IsingGraph, Prefactor]:
    """Split v into two vertices joined by the fitted equality gadget.

    ``partition`` is a pair of neighbour lists; the first group and the
    field of v go to the first new vertex, the second group to the second.
    """
    _require(g, v)
    if g.pinned(v) is not None:
        raise PreconditionError(f"cannot split pinned vertex {v}")
    if g.degree(v) < 2:
        raise PreconditionError(f"vertex {v} has degree {g.degree(v)}; nothing to split")
    group1, group2 = (list(p) for p in partition)
    nbrs = g.neighbors(v)
    if sorted(group1 + group2) != sorted(nbrs) or len(set(group1 + group2)) != len(nbrs):
        raise PreconditionError("partition must split the neighbours of v into two disjoint groups")
    if not group1 or not group2:
        raise PreconditionError("both groups of a split must be nonempty")
    t = template("merge")
    out = g.copy()
    if names is None:
        v1, v2, anc = f"{v}.1", f"{v}.2", f"{v}.m"
        while v1 in out or v2 in out or anc in out:
            v1, v2, anc = v1 + "'", v2 + "'", anc + "'"
    else:
        v1, v2, anc = names
    h = out.field(v)
    out.remove_vertex(v)
    out.add_vertex(v1, h.shift(t.leg_shifts[0]))
    out.add_vertex(v2, ComplexField.quarter(t.leg_shifts[1]))
    out.add_vertex(anc, ComplexField.quarter(t.a0))
    for u in group1:
        out.add_edge(v1, u)
    for u in group2:
        out.add_edge(v2, u)
    out.add_edge(anc, v1)
    out.add_edge(anc, v2)
    return out, t.delta_prefactor


def merge_vertices(g: IsingGraph, anc: str) -> tuple[IsingGraph, Prefactor]:
    """Undo split_vertex: contract an equality gadget given its ancilla."""
    _require(g, anc)
    t = template("merge")
    if g.degree(anc) != 2 or g.field(anc) != ComplexField.quarter(t.a0):
        raise PreconditionError(f"{anc} is not an equality gadget ancilla")
    v1, v2 = g.neighbors(anc)
    if set(g.neighbors(v1)) & set(g.neighbors(v2)) - {anc}:
        raise PreconditionError("merging would create parallel edges")
    out = g.copy()
    h = out.field(v1) + out.field(v2)
    h = h.shift(-t.leg_shifts[0] - t.leg_shifts[1])
    others = [u for u in out.neighbors(v2) if u != anc]
    out.remove_vertex(anc)
    out.remove_vertex(v2)
    out.set_field(v1, h)
    for u in others:
        out.add_edge(v1, u)
    return out, t.delta_prefactor.inverse()


def pin_spin(g: IsingGraph, v: str, ancilla: str | None = None) -> tuple[IsingGraph, Prefactor]:
    """Freeze S_v to +1 with a parity gadget on the single member v.

    Z(g with v pinned to +1) = P * Z(g'), where g' keeps v as a summed spin,
    adds an ancilla of field -i*pi/4 on v and lowers v's field by i*pi/4.
    """
    _require(g, v)
    if g.pinned(v) is not None:
        raise PreconditionError(f"vertex {v} is already pinned")
    out = g.copy()
    anc = ancilla or out.fresh_id(f"{v}.pin")
    out.add_vertex(anc, ComplexField.quarter(-1))
    out.add_edge(anc, v)
    out.shift_field(v, -1)
    return out, Prefactor.quarter(1, -math.log(2))


def absorb_pinned(g: IsingGraph, v: str) -> tuple[IsingGraph, Prefactor]:
    """Remove a pinned vertex, moving its bonds into neighbour fields."""
    _require(g, v)
    s = g.pinned(v)
    if s is None:
        raise PreconditionError(f"vertex {v} is not pinned")
    out = g.copy()
    const = out.field(v).value * s
    for u in out.neighbors(v):
        if out.pinned(u) is None:
            out.shift_field(u, s)
        else:
            const += 1j * math.pi / 4 * s * out.pinned(u)
    out.remove_vertex(v)
    return out, Prefactor.exp(const)


def insert_plaquette_spin(g: IsingGraph, face, center: str | None = None
                          ) -> tuple[IsingGraph, Prefactor]:
    """Add a spin frozen to +1 joined to the four face vertices.

    The frozen spin adds +i*pi/4 to each face field, which is cancelled by
    lowering those fields; the freezing itself is realized with pin_spin.
    """
    face = list(face)
    if len(face) != 4 or len(set(face)) != 4:
        raise PreconditionError("a plaquette needs four distinct vertices")
    _require(g, *face)
    out = g.copy()
    c = center or out.fresh_id("plaq")
    out.add_vertex(c)
    for v in face:
        out.add_edge(c, v)
        out.shift_field(v, -1)
    return pin_spin(out, c)


def remove_crossing(g: IsingGraph, e13: tuple[str, str], e24: tuple[str, str],
                    ancilla: str | None = None) -> tuple[IsingGraph, Prefactor]:
    """Trade edges v1-v3 and v2-v4 for an ancilla star plus the cycle v1-v2-v3-v4.

    Cycle edges that already exist are complemented (see toggle_edge).
    """
    (v1, v3), (v2, v4) = e13, e24
    _require(g, v1, v2, v3, v4)
    if len({v1, v2, v3, v4}) != 4:
        raise PreconditionError("crossing edges must have four distinct endpoints")
    if not g.has_edge(v1, v3) or not g.has_edge(v2, v4):
        raise PreconditionError("both crossing edges must exist")
    t = template("crossing")
    out = g.copy()
    ring = (v1, v2, v3, v4)
    out.remove_edge(v1, v3)
    out.remove_edge(v2, v4)
    anc = ancilla or out.fresh_id("x")
    out.add_vertex(anc, ComplexField.quarter(t.a0))
    for v, k in zip(ring, t.leg_shifts):
        out.add_edge(anc, v)
        out.shift_field(v, k)
    p = t.delta_prefactor
    for j, k in t.ext:
        p = p * toggle_edge(out, ring[j], ring[k])
    return out, p
