"""Lower a pure spin model to an IsingGraph whose couplings are all i*pi/4.

Every term becomes a spin variable carrying the term's coupling as a
field. Products of original spins are not independent: a set of terms
whose site multisets cancel mod 2 has product +1. These relations are the
left null space of the term-by-site incidence matrix over GF(2). Each basis
relation is enforced by one star-shaped ancilla gadget; every original
configuration is counted 2^(n - rank) times, which goes into the prefactor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import gf2
from .errors import PreconditionError
from .fields import ComplexField, Prefactor
from .graph import ConstraintSystem, IsingGraph
from .model import SpinModel

__all__ = [
    "IncidenceMatrix",
    "GadgetDelta",
    "incidence_matrix",
    "substitute_terms",
    "apply_l1_gadget",
    "apply_delta",
    "compile_model",
    "compile_with_provenance",
]


@dataclass(frozen=True)
class IncidenceMatrix:
    """Rows are terms, columns are sites; row bitsets over site indices."""

    rows: tuple[int, ...]
    n_cols: int

    @property
    def rank(self) -> int:
        return gf2.rank(list(self.rows))


def incidence_matrix(m: SpinModel) -> IncidenceMatrix:
    pos = {s: i for i, s in enumerate(m.site_ids)}
    rows = []
    for t in m.terms:
        r = 0
        for s in t.sites:
            r |= 1 << pos[s]
        rows.append(r)
    return IncidenceMatrix(tuple(rows), len(pos))


def _term_id(k: int) -> str:
    return f"t{k}"


def substitute_terms(m: SpinModel) -> ConstraintSystem:
    """One variable per term plus a low-weight basis of the parity relations."""
    if not m.is_pure_spin:
        raise PreconditionError("substitute_terms needs a pure spin model; encode Potts sites first")
    inc = incidence_matrix(m)
    ids = [_term_id(k) for k in range(len(m.terms))]
    basis = gf2.min_weight_basis(gf2.left_null_space(list(inc.rows), inc.n_cols))
    constraints = tuple(
        tuple(ids[k] for k in range(len(ids)) if vec >> k & 1) for vec in basis
    )
    return ConstraintSystem(
        variables=tuple((tid, t.coupling) for tid, t in zip(ids, m.terms)),
        constraints=constraints,
        overcount_exponent=inc.n_cols - inc.rank,
        n_sites=inc.n_cols,
    )


@dataclass(frozen=True)
class GadgetDelta:
    """A star gadget: a new ancilla joined to each member, members shifted."""

    ancilla: str
    ancilla_field: ComplexField
    members: tuple[str, ...]
    member_shift: int = -1


def apply_l1_gadget(sys: ConstraintSystem, c, ancilla: str | None = None
                    ) -> tuple[GadgetDelta, Prefactor]:
    """Enforce prod_{v in c} S_v = +1 with one ancilla.

    delta(prod S, 1) = 1/2 e^{i m pi/4} sum_{S0} e^{-i m pi/4 S0 - i pi/4 sum S + i pi/4 S0 sum S}
    """
    c = tuple(c)
    known = set(sys.variable_ids)
    if not c:
        raise PreconditionError("empty constraint")
    if any(v not in known for v in c):
        raise PreconditionError(f"constraint {c} names unknown variables")
    if ancilla is None:
        ancilla = f"c{sys.constraints.index(c)}" if c in sys.constraints else "c"
    m = len(c)
    delta = GadgetDelta(ancilla, ComplexField.quarter(-m), c, -1)
    return delta, Prefactor.quarter(m, -math.log(2))


def apply_delta(g: IsingGraph, delta: GadgetDelta) -> None:
    """Write a gadget into a graph under construction."""
    g.add_vertex(delta.ancilla, delta.ancilla_field)
    for v in delta.members:
        g.add_edge(delta.ancilla, v)
        g.shift_field(v, delta.member_shift)


def compile_with_provenance(m: SpinModel) -> tuple[IsingGraph, Prefactor, dict[str, str]]:
    """compile_model plus a map from vertex id to the term or relation it came from."""
    sys = substitute_terms(m)
    g = IsingGraph()
    origin = {}
    for (tid, h), term in zip(sys.variables, m.terms):
        g.add_vertex(tid, h)
        origin[tid] = "term {" + " ".join(term.sites) + "}"
    p = Prefactor(sys.overcount_exponent * math.log(2), 0.0)
    for j, c in enumerate(sys.constraints):
        delta, dp = apply_l1_gadget(sys, c, ancilla=f"c{j}")
        apply_delta(g, delta)
        origin[delta.ancilla] = "constraint " + " ".join(c)
        p = p * dp
    return g.canonicalized(), p, origin


def compile_model(m: SpinModel) -> tuple[IsingGraph, Prefactor]:
    """Pure spin model -> (graph, P) with Z_model = P * Z_graph."""
    g, p, _ = compile_with_provenance(m)
    return g, p
