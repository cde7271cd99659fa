"""Exact gadget identities and the gadget-constant fitter.

A gadget replaces a function of boundary spins S_1..S_m by a sum over one
ancilla S_0 joined to every boundary spin with coupling i*pi/4::

    sum_{S0} exp(i*pi/4 * [a0 S0 + S0 sum_j S_j + sum_j a_j S_j + sum_{ext} S_j S_k])
        = c * target(S_1..S_m)

All exponents are whole quarter turns, so both sides are exact elements of
Q(e^{i*pi/4}) and the fit is checked with zero tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Callable

from .errors import FitError
from .fields import Cyclo8, Prefactor, root_sum

__all__ = [
    "GadgetShape",
    "GadgetTemplate",
    "SHAPES",
    "fit_gadget_constants",
    "template",
    "star_sum",
    "check_identity",
    "lemma_l1_holds",
    "lemma_l3_holds",
    "lemma_l4_holds",
]


def star_sum(a0: int, legs, ext, spins) -> Cyclo8:
    """Exact ancilla sum for integer quarter-turn constants."""
    base = sum(a * s for a, s in zip(legs, spins)) + sum(spins[j] * spins[k] for j, k in ext)
    total = sum(spins)
    return root_sum(a0 * s0 + s0 * total + base for s0 in (1, -1))


@dataclass(frozen=True)
class GadgetShape:
    """What a gadget must reproduce.

    ``target`` maps a boundary assignment to an exact value; ``ext`` lists
    edges among boundary spins that appear on the gadget side;
    ``symmetric`` ties all leg shifts together.
    """

    name: str
    arity: int
    target: Callable[[tuple[int, ...]], Cyclo8]
    ext: tuple[tuple[int, int], ...] = ()
    symmetric: bool = True


@dataclass(frozen=True)
class GadgetTemplate:
    """Fitted constants: gadget side = c * target side.

    ``delta_prefactor`` = 1/c is the factor P in Z(before) = P * Z(after).
    """

    name: str
    arity: int
    a0: int
    leg_shifts: tuple[int, ...]
    ext: tuple[tuple[int, int], ...]
    c: complex
    delta_prefactor: Prefactor

    def gadget_value(self, spins) -> Cyclo8:
        return star_sum(self.a0, self.leg_shifts, self.ext, spins)


def _ratio_if_proportional(lhs: list[Cyclo8], rhs: list[Cyclo8]) -> complex | None:
    ref = next((i for i, r in enumerate(rhs) if not r.is_zero()), None)
    if ref is None or lhs[ref].is_zero():
        return None
    for left, right in zip(lhs, rhs):
        if not (left * rhs[ref] - lhs[ref] * right).is_zero():
            return None
    return complex(lhs[ref]) / complex(rhs[ref])


def fit_gadget_constants(shape: GadgetShape) -> GadgetTemplate:
    """Search the quarter-turn lattice for ancilla and leg constants.

    Candidates are tried in order of total |shift| (canonical range -3..4),
    preferring a non-negative ancilla field, so the result is deterministic.
    """
    m = shape.arity
    if not 1 <= m <= 8:
        raise FitError(f"arity {m} outside 1..8")
    assignments = list(product((1, -1), repeat=m))
    rhs = [shape.target(s) for s in assignments]
    ks = range(-3, 5)
    if shape.symmetric:
        candidates = [(a0, (a,) * m) for a0 in ks for a in ks]
    else:
        candidates = [(a0, legs) for a0 in ks for legs in product(ks, repeat=m)]
    candidates.sort(key=lambda c: (abs(c[0]) + sum(map(abs, c[1])), c[0] < 0, c[0], c[1]))
    for a0, legs in candidates:
        lhs = [star_sum(a0, legs, shape.ext, s) for s in assignments]
        c = _ratio_if_proportional(lhs, rhs)
        if c is not None:
            return GadgetTemplate(shape.name, m, a0, tuple(legs), shape.ext, c,
                                  Prefactor.from_complex(1 / c))
    if shape.symmetric:
        return fit_gadget_constants(GadgetShape(shape.name, m, shape.target, shape.ext, False))
    raise FitError(f"no quarter-turn solution for gadget shape {shape.name!r}")


def _one(_s) -> Cyclo8:
    return Cyclo8.rational(1)


def _pair_phase(pairs):
    def target(s) -> Cyclo8:
        return Cyclo8.root(sum(s[j] * s[k] for j, k in pairs))
    return target


def _equal(s) -> Cyclo8:
    return Cyclo8.rational(int(s[0] == s[1]))


SHAPES = {
    # a leaf hanging off S_1 leaves S_1 untouched
    "leaf": GadgetShape("leaf", 1, _one),
    # a degree-two ancilla between S_1 and S_2 carries their edge
    "subdivide": GadgetShape("subdivide", 2, _pair_phase([(0, 1)])),
    # a degree-two ancilla that forces S_1 = S_2
    "merge": GadgetShape("merge", 2, _equal),
    # edges (1,3),(2,4) become a star on 1..4 plus the cycle 1-2-3-4
    "crossing": GadgetShape("crossing", 4, _pair_phase([(0, 2), (1, 3)]),
                            ext=((0, 1), (1, 2), (2, 3), (3, 0))),
}

_CACHE: dict[str, GadgetTemplate] = {}


def template(name: str) -> GadgetTemplate:
    """Fitted template for one of the named shapes (cached)."""
    if name not in _CACHE:
        _CACHE[name] = fit_gadget_constants(SHAPES[name])
    return _CACHE[name]


def check_identity(lhs: Callable, rhs: Callable, arity: int) -> list[tuple[int, ...]]:
    """Assignments where two exact functions of ``arity`` spins differ."""
    return [s for s in product((1, -1), repeat=arity) if not (lhs(s) - rhs(s)).is_zero()]


# ------------------------------------------------------------------ lemmas


def lemma_l1_holds(m: int) -> bool:
    """delta(prod S, 1) = 1/2 sum_{S0} exp(i*pi/4 (1 - S0)(m - sum S)), exhaustively."""
    for s in product((1, -1), repeat=m):
        parity = 1
        for x in s:
            parity *= x
        lhs = Cyclo8.rational(2 * int(parity == 1))
        rhs = root_sum((1 - s0) * (m - sum(s)) for s0 in (1, -1))
        if not (lhs - rhs).is_zero():
            return False
    return True


def lemma_l3_holds(x: int) -> bool:
    """sum_{sigma in {0,1}} exp(i*pi/2 (sigma + x)^2) = 1 + i."""
    lhs = root_sum(2 * (sig + x) ** 2 for sig in (0, 1))
    return (lhs - (Cyclo8.root(0) + Cyclo8.root(2))).is_zero()


def lemma_l4_holds(m: int, K) -> bool:
    """Qubit local complementation with the i*pi factor on the complement sum.

    sum_{s0} exp(i*pi/2 s0 + i*pi s0 sum s_j + i*pi sum_K s_j s_k)
        = (1 + i) exp(-i*pi/2 sum s_j + i*pi sum_{K'} s_j s_k)

    where K' is the complement of K among all pairs of the m neighbours.
    """
    pairs = list(combinations(range(m), 2))
    K = {tuple(sorted(p)) for p in K}
    Kc = [p for p in pairs if p not in K]
    one_plus_i = Cyclo8.root(0) + Cyclo8.root(2)
    for s in product((0, 1), repeat=m):
        x = sum(s)
        k_sum = sum(s[a] * s[b] for a, b in K)
        lhs = root_sum(2 * s0 + 4 * s0 * x + 4 * k_sum for s0 in (0, 1))
        rhs = one_plus_i * Cyclo8.root(-2 * x + 4 * sum(s[a] * s[b] for a, b in Kc))
        if not (lhs - rhs).is_zero():
            return False
    return True


