"""Source-language model: sites with finite arity and interaction terms."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ModelSemanticError
from .fields import ComplexField

__all__ = ["ARITY_NAMES", "Site", "Term", "SpinModel", "ModelSource"]

ARITY_NAMES = {2: "spin", 3: "potts3", 4: "potts4"}


@dataclass(frozen=True)
class Site:
    id: str
    arity: int = 2


@dataclass(frozen=True)
class Term:
    """exp(coupling * prod S) for spin terms, exp(coupling * delta(q_i, q_j)) for delta terms."""

    sites: tuple[str, ...]
    coupling: ComplexField
    delta: bool = False


@dataclass(frozen=True)
class SpinModel:
    sites: tuple[Site, ...] = ()
    terms: tuple[Term, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "sites", tuple(self.sites))
        object.__setattr__(self, "terms", tuple(self.terms))
        check_model(self)

    @property
    def site_ids(self) -> list[str]:
        return [s.id for s in self.sites]

    def arity(self, site_id: str) -> int:
        for s in self.sites:
            if s.id == site_id:
                return s.arity
        raise KeyError(site_id)

    @property
    def is_pure_spin(self) -> bool:
        return all(s.arity == 2 for s in self.sites) and not any(t.delta for t in self.terms)

    @property
    def n_configs(self) -> int:
        n = 1
        for s in self.sites:
            n *= s.arity
        return n


def check_model(m: SpinModel) -> None:
    """Raise ModelSemanticError when the model breaks a structural invariant."""
    arity = {}
    for s in m.sites:
        if s.id in arity:
            raise ModelSemanticError(f"duplicate site {s.id}")
        if s.arity not in ARITY_NAMES:
            raise ModelSemanticError(f"unsupported arity {s.arity} for site {s.id}")
        arity[s.id] = s.arity
    seen = set()
    for t in m.terms:
        if not t.sites:
            raise ModelSemanticError("empty term")
        if len(set(t.sites)) != len(t.sites):
            raise ModelSemanticError(f"repeated site in term {{{' '.join(t.sites)}}}")
        for sid in t.sites:
            if sid not in arity:
                raise ModelSemanticError(f"unknown site {sid}")
        key = (frozenset(t.sites), t.delta)
        if key in seen:
            raise ModelSemanticError(f"duplicate term {{{' '.join(t.sites)}}}")
        seen.add(key)
        arities = {arity[s] for s in t.sites}
        if t.delta:
            if len(t.sites) != 2:
                raise ModelSemanticError("delta terms must act on exactly two sites")
            if len(arities) != 1:
                raise ModelSemanticError(
                    f"delta term {{{' '.join(t.sites)}}} mixes sites of different arity")
        elif arities != {2}:
            bad = next(s for s in t.sites if arity[s] != 2)
            raise ModelSemanticError(f"Potts site {bad} used in a non-delta term")


@dataclass(frozen=True)
class ModelSource:
    """A parsed model together with the text it came from."""

    text: str
    model: SpinModel
    name: str = ""
    kind: str | None = None
    notes: tuple[str, ...] = field(default=())
