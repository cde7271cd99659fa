"""Rewrite 3- and 4-state Potts sites as pairs of Ising spins.

A Potts value q is stored in two spins (S, S') through their bits
b = (1 - S)/2. Four states use q = 2 b(S) + b(S'), a bijection. Three
states use q = b(S) + b(S'), so q = 1 has two representatives; a per-site
weight of 1/2 on those representatives keeps the partition function exact.

The delta interaction is expanded in the multilinear spin basis by an
exhaustive fit over the 16 spin assignments of a pair of sites, so the
expansion is derived from the decode table rather than typed in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .errors import ModelSemanticError
from .fields import ComplexField, Prefactor
from .model import Site, SpinModel, Term

__all__ = [
    "Encoding",
    "decode4",
    "decode3",
    "delta_expansion",
    "encode_potts4",
    "encode_potts3",
    "encode_potts",
    "encode_potts_with_info",
]

LN2 = math.log(2.0)


def _bit(s: int) -> int:
    return (1 - s) // 2


def decode4(s: int, sp: int) -> int:
    return 2 * _bit(s) + _bit(sp)


def decode3(s: int, sp: int) -> int:
    return _bit(s) + _bit(sp)


def _decode_spin(s: int, sp: int) -> int:
    return _bit(s)


_DECODERS = {2: _decode_spin, 3: decode3, 4: decode4}


def delta_expansion(arity: int) -> dict[tuple[int, ...], Fraction]:
    """Coefficients c_T with delta(q_i, q_j) = sum_T c_T prod_{k in T} S_k.

    Spins are indexed 0 = S_i, 1 = S'_i, 2 = S_j, 3 = S'_j (only 0 and 2
    for plain spins). The fit is a Walsh-Hadamard transform of the decoded
    delta table and is verified on every assignment before returning.
    """
    decode = _DECODERS[arity]
    n = 2 if arity == 2 else 4
    table = {}
    for spins in product((1, -1), repeat=n):
        if arity == 2:
            qi, qj = decode(spins[0], 0), decode(spins[1], 0)
        else:
            qi, qj = decode(spins[0], spins[1]), decode(spins[2], spins[3])
        table[spins] = int(qi == qj)
    coeffs = {}
    for mask in range(1 << n):
        subset = tuple(k for k in range(n) if mask >> k & 1)
        total = sum(val * math.prod(spins[k] for k in subset) for spins, val in table.items())
        c = Fraction(total, 1 << n)
        if c:
            coeffs[subset] = c
    for spins, val in table.items():
        got = sum(c * math.prod(spins[k] for k in T) for T, c in coeffs.items())
        assert got == val
    if arity == 2:
        coeffs = {tuple(2 * k for k in T): c for T, c in coeffs.items()}
    return coeffs


@dataclass(frozen=True)
class Encoding:
    site_map: dict
    decode: dict
    compensation: tuple
    notes: tuple = field(default=())


def _pair_ids(site_id: str) -> tuple[str, str]:
    return f"{site_id}.a", f"{site_id}.b"


def encode_potts_with_info(m: SpinModel, arities=(2, 3, 4)) -> tuple[SpinModel, Prefactor, Encoding]:
    """Encode every delta term on sites of the given arities.

    Returns (model, prefactor, encoding) with Z_potts = prefactor * Z_model.
    """
    arities = set(arities)
    arity = {s.id: s.arity for s in m.sites}
    for t in m.terms:
        if not t.delta and any(arity[s] != 2 for s in t.sites):
            raise ModelSemanticError(f"non-delta term on Potts site in {{{' '.join(t.sites)}}}")

    sites: list[Site] = []
    site_map = {}
    for s in m.sites:
        if s.arity in (3, 4) and s.arity in arities:
            a, b = _pair_ids(s.id)
            sites += [Site(a), Site(b)]
            site_map[s.id] = (a, b)
        else:
            sites.append(s)

    couplings: dict[frozenset, ComplexField] = {}
    order: list[frozenset] = []

    def add(ids, J: ComplexField):
        key = frozenset(ids)
        if key not in couplings:
            couplings[key] = ComplexField()
            order.append(key)
        couplings[key] = couplings[key] + J

    log_const = 0j
    passthrough: list[Term] = []
    for t in m.terms:
        q = arity[t.sites[0]]
        if not t.delta or q not in arities:
            if t.delta:
                passthrough.append(t)
            else:
                add(t.sites, t.coupling)
            continue
        i, j = t.sites
        if q == 2:
            spins = (i, None, j, None)
        else:
            spins = site_map[i] + site_map[j]
        for T, c in delta_expansion(q).items():
            if not T:
                log_const += t.coupling.value * float(c)
            else:
                add([spins[k] for k in T], t.coupling.scaled(c))

    compensation = []
    n3 = 0
    for s in m.sites:
        if s.arity == 3 and 3 in arities:
            a, b = site_map[s.id]
            add((a, b), ComplexField(LN2 / 2))
            compensation.append(((a, b), ComplexField(LN2 / 2)))
            n3 += 1
    log_const += -0.5 * LN2 * n3

    terms = []
    for key in order:
        ids = [x.id for x in sites if x.id in key]
        terms.append(Term(tuple(ids), couplings[key]))
    terms += passthrough

    decode = {}
    for sid, pair in site_map.items():
        decode[sid] = {(s, sp): _DECODERS[arity[sid]](s, sp) for s, sp in product((1, -1), repeat=2)}
    notes = ("three-state sites carry a compensation weight 1/2 on doubly covered values",) if n3 else ()
    enc = Encoding(site_map=site_map, decode=decode, compensation=tuple(compensation), notes=notes)
    return SpinModel(tuple(sites), tuple(terms)), Prefactor.exp(log_const), enc


def encode_potts4(m: SpinModel) -> tuple[SpinModel, Prefactor]:
    model, p, _ = encode_potts_with_info(m, arities=(4,))
    return model, p


def encode_potts3(m: SpinModel) -> tuple[SpinModel, Prefactor]:
    model, p, _ = encode_potts_with_info(m, arities=(3,))
    return model, p


def encode_potts(m: SpinModel) -> tuple[SpinModel, Prefactor]:
    """Encode every delta term, leaving a pure spin model."""
    model, p, _ = encode_potts_with_info(m)
    return model, p
