"""Decimation of compiled graphs and the square-lattice duality check.

Summing out a spin S0 with field h0 that is joined to S_1..S_d by i*pi/4
bonds leaves a function of the neighbours,

    f(S) = sum_{S0} exp(h0 S0 + i*pi/4 S0 (S_1 + ... + S_d)),

which is written as A * exp(sum_T c_T prod_{j in T} S_j) over nonempty
subsets T of the neighbours. For d = 2 this is A e^{K S1 S2 + h1 S1 + h2 S2}.
The coefficients come from a Walsh-Hadamard transform of log f; each log
is only defined up to 2*pi*i, so the branch is chosen explicitly.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from itertools import combinations, product

import numpy as np

from .compiler import compile_model
from .dsl import gen_lattice
from .errors import FitError, PreconditionError
from .evaluator import DEFAULT_CAP, exact_z_model
from .fields import QUARTER, ComplexField, Prefactor
from .graph import IsingGraph
from .model import Site, SpinModel, Term

__all__ = [
    "DecimationFit",
    "DualModel",
    "fit_star",
    "decimate_spin",
    "decimate_all",
    "self_dual_point",
    "square_K",
    "SquareDualityReport",
    "derive_square_duality",
]

_SNAP = 1e-12
_FIT_TOL = 1e-12
_SINGULAR = 1e-14


def _snap(c: complex) -> complex:
    """Round to an exact quarter turn when within 1e-12 of one."""
    k = c.imag / QUARTER
    if abs(c.real) < _SNAP and abs(k - round(k)) < _SNAP:
        return complex(0.0, round(k) * QUARTER)
    return c


@dataclass(frozen=True)
class DecimationFit:
    """f(S) = A * exp(sum_T couplings[T] * prod_{j in T} S_j), T over neighbour subsets.

    ``branches`` records the multiple of i*pi/2 added to each coefficient
    relative to the principal-log transform.
    """

    neighbors: tuple[str, ...]
    A: complex
    couplings: dict = field(default_factory=dict)   # tuple of neighbours -> complex
    branches: tuple[int, ...] = ()

    @property
    def degree(self) -> int:
        return len(self.neighbors)

    @property
    def K(self) -> complex:
        if self.degree != 2:
            raise AttributeError("K is defined for degree-two decimations")
        return self.couplings[self.neighbors]

    @property
    def h1(self) -> complex:
        return self.couplings[self.neighbors[:1]]

    @property
    def h2(self) -> complex:
        return self.couplings[self.neighbors[1:2]]

    def value(self, spins) -> complex:
        e = sum(c * math.prod(spins[self.neighbors.index(v)] for v in T)
                for T, c in self.couplings.items())
        return self.A * cmath.exp(e)


def _star_values(h0: complex, d: int) -> tuple[list[tuple[int, ...]], np.ndarray]:
    spins = list(product((1, -1), repeat=d))
    vals = np.array([sum(cmath.exp(s0 * (h0 + 1j * QUARTER * sum(s))) for s0 in (1, -1))
                     for s in spins])
    return spins, vals


def fit_star(h0: complex, neighbors) -> DecimationFit:
    """Fit the ancilla sum of a star with centre field h0.

    Branches are chosen to minimise |Im| of the fields first, preferring
    positive imaginary parts on a tie, then |Im| of the pair couplings and
    of the higher terms; remaining ties go to the smallest branch integers.
    This keeps the fields at their positive-J values (i*pi/4 for a
    degree-two star) for every complex J. Quarter-turn values are snapped
    exactly.
    """
    neighbors = tuple(neighbors)
    d = len(neighbors)
    if not 1 <= d <= 3:
        raise PreconditionError(f"decimation supports degree 1..3, got {d}")
    spins, vals = _star_values(complex(h0), d)
    scale = float(np.max(np.abs(vals)))
    if scale == 0.0 or float(np.min(np.abs(vals))) < _SINGULAR * scale:
        raise FitError("star sum vanishes on some assignment; decimation is singular")
    subsets = [T for r in range(1, d + 1) for T in combinations(range(d), r)]
    chi = np.array([[math.prod(s[j] for j in T) for T in subsets] for s in spins], dtype=float)
    logs = np.log(vals)
    base = chi.T @ logs / len(spins)

    # A shift vector k (units of i*pi/2) is a valid branch choice when
    # chi @ k is constant mod 4, i.e. it only changes the constant A.
    cand = np.array(list(product(range(-2, 3), repeat=len(subsets))), dtype=np.int64)
    moved = cand @ chi.T.astype(np.int64)
    cand = cand[np.all((moved - moved[:, :1]) % 4 == 0, axis=1)]
    signed = base.imag[None, :] + (np.pi / 2) * cand
    imag = np.abs(signed)
    sizes = np.array([len(T) for T in subsets])

    def size_key(r, values):
        if not np.any(sizes == r):
            return np.zeros(len(cand))
        return np.round(values[:, sizes == r].sum(axis=1), 9)

    keys = [size_key(1, imag), size_key(1, -signed)]
    keys.extend(size_key(r, imag) for r in range(2, d + 1))
    keys.append(np.abs(cand).sum(axis=1))
    keys.extend(-cand[:, j] for j in range(len(subsets)))
    shifts = cand[np.lexsort(keys[::-1])[0]]
    c = base + 1j * (np.pi / 2) * shifts
    ratio = vals / np.exp(chi @ c)
    if not np.allclose(ratio, ratio[0], rtol=_FIT_TOL, atol=0.0):  # pragma: no cover
        raise FitError("no branch reproduces the star sum")
    A = complex(ratio[0])
    couplings = {tuple(neighbors[j] for j in T): _snap(complex(v)) for T, v in zip(subsets, c)}
    fit = DecimationFit(neighbors, A, couplings, tuple(int(k) for k in shifts))
    for s, v in zip(spins, vals):
        if abs(fit.value(s) - v) > 1e-10 * abs(v):
            raise FitError("snapped fit no longer reproduces the star sum")
    return fit


@dataclass
class DualModel:
    """An IsingGraph plus extra couplings produced by decimation.

    Z(original) = prefactor * sum_S exp(graph energy + sum extra[T] prod S_T).
    """

    graph: IsingGraph
    extra: dict = field(default_factory=dict)   # sorted tuple of vertices -> complex
    prefactor: Prefactor = field(default_factory=Prefactor.one)
    fits: list = field(default_factory=list)    # (vertex, DecimationFit)

    @classmethod
    def from_graph(cls, g: IsingGraph) -> "DualModel":
        if g.pinned_vertices():
            raise PreconditionError("absorb pinned vertices before decimating")
        return cls(g.copy())

    def to_spin_model(self) -> SpinModel:
        g = self.graph
        terms: dict[tuple[str, ...], complex] = {}
        order = {v: k for k, v in enumerate(g.vertices)}

        def add(sites, c):
            key = tuple(sorted(sites, key=order.__getitem__))
            terms[key] = terms.get(key, 0j) + c

        for v in g.vertices:
            h = g.field(v).value
            if h != 0:
                add((v,), h)
        for u, v in g.edges():
            add((u, v), 1j * QUARTER)
        for sites, c in self.extra.items():
            add(sites, c)
        return SpinModel(tuple(Site(v) for v in g.vertices),
                         tuple(Term(k, ComplexField.from_complex(c)) for k, c in terms.items()))


def decimate_spin(dual: DualModel, v: str) -> DecimationFit:
    """Sum out v in place; v must touch no extra coupling and have degree 1..3."""
    g = dual.graph
    if v not in g:
        raise PreconditionError(f"unknown vertex {v}")
    if g.pinned(v) is not None:
        raise PreconditionError(f"cannot decimate pinned vertex {v}")
    if any(v in sites for sites in dual.extra):
        raise PreconditionError(f"{v} carries a decimated coupling")
    nbrs = tuple(g.neighbors(v))
    fit = fit_star(g.field(v).value, nbrs)
    g.remove_vertex(v)
    order = {u: k for k, u in enumerate(g.vertices)}
    for sites, c in fit.couplings.items():
        if len(sites) == 1:
            g.set_field(sites[0], g.field(sites[0]) + ComplexField.from_complex(c))
        else:
            key = tuple(sorted(sites, key=order.__getitem__))
            dual.extra[key] = dual.extra.get(key, 0j) + c
    dual.prefactor = dual.prefactor * Prefactor.from_complex(fit.A)
    dual.fits.append((v, fit))
    return fit


def decimate_all(g: IsingGraph, vertices) -> DualModel:
    """Decimate the listed vertices in order."""
    dual = DualModel.from_graph(g)
    for v in vertices:
        decimate_spin(dual, v)
    return dual


def self_dual_point() -> float:
    """J* with tanh J* = exp(-2 J*), i.e. sinh 2J* = 1."""
    return 0.5 * math.asinh(1.0)


def square_K(J: complex) -> complex:
    """K from decimating one interior black spin of the compiled square lattice."""
    return fit_star(complex(J) - 2j * QUARTER, ("a", "b")).K


@dataclass(frozen=True)
class SquareDualityReport:
    rows: int
    cols: int
    J: complex
    K: complex
    tanh_residual: float          # |exp(-2K) - tanh J|
    n_spins: int
    z_square: complex
    z_chain: complex              # prefactors * Z of the decimated model
    chain_rel: float
    z_dual_plain: complex         # Z of the plaquette Ising model at coupling K
    closed_form: complex          # 2^N sinh(2J)^N Z(K)
    closed_form_rel: float

    @property
    def chain_passed(self) -> bool:
        return self.chain_rel <= 1e-10

    @property
    def closed_form_passed(self) -> bool:
        return self.closed_form_rel <= 1e-10

    def __str__(self) -> str:
        def c(z):
            return f"{z.real!r} {z.imag!r}"
        lines = [
            f"square {self.rows}x{self.cols} J {c(self.J)}",
            f"K {c(self.K)}",
            f"tanh-check {self.tanh_residual!r}",
            f"N {self.n_spins}",
            f"Z(J) {c(self.z_square)}",
            f"decimated {c(self.z_chain)} rel {self.chain_rel!r} "
            f"{'PASS' if self.chain_passed else 'FAIL'}",
            f"Z(K) {c(self.z_dual_plain)}",
            f"2^N sinh(2J)^N Z(K) {c(self.closed_form)} rel {self.closed_form_rel!r} "
            f"{'PASS' if self.closed_form_passed else 'FAIL'}",
        ]
        return "\n".join(lines) + "\n"


def _rel(a: complex, b: complex) -> float:
    top = max(abs(a), abs(b))
    return 0.0 if top == 0 else abs(a - b) / top


def derive_square_duality(rows: int, cols: int, J, cap: int = DEFAULT_CAP) -> SquareDualityReport:
    """Compile a rows x cols plaquette square patch, decimate every term spin, compare.

    The exact chain Z(J) = P * Z(decimated) must hold; the closed form with
    free boundaries is only measured.
    """
    J = J.value if isinstance(J, ComplexField) else complex(J)
    model = gen_lattice("square", rows, cols, ComplexField.from_complex(J))
    z_square = exact_z_model(model, cap=cap).value
    g, p = compile_model(model)
    term_ids = [v for v in g.vertices if v.startswith("t")]
    dual = decimate_all(g, term_ids)
    z_dec = exact_z_model(dual.to_spin_model(), cap=cap).value
    z_chain = (p * dual.prefactor).as_complex() * z_dec
    K = square_K(J)

    # plain Ising model on the plaquettes at coupling K
    plaq = [f"p{y}_{x}" for y in range(rows) for x in range(cols)]
    terms = []
    for y in range(rows):
        for x in range(cols):
            if x + 1 < cols:
                terms.append(Term((f"p{y}_{x}", f"p{y}_{x + 1}"), ComplexField.from_complex(K)))
            if y + 1 < rows:
                terms.append(Term((f"p{y}_{x}", f"p{y + 1}_{x}"), ComplexField.from_complex(K)))
    z_k = exact_z_model(SpinModel(tuple(Site(s) for s in plaq), tuple(terms)), cap=cap).value
    n = len(model.sites)
    closed = (2 * cmath.sinh(2 * J)) ** n * z_k
    return SquareDualityReport(
        rows, cols, J, K, abs(cmath.exp(-2 * K) - cmath.tanh(J)), n,
        z_square, z_chain, _rel(z_square, z_chain), z_k, closed, _rel(z_square, closed),
    )
