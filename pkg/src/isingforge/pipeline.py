"""Model -> pure spin model -> compiled graph -> grid, with exact bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass, field

from .compiler import compile_with_provenance
from .errors import CapExceededError
from .evaluator import (DEFAULT_CAP, ZReport, check_equivalence, eliminate_z,
                        exact_z_ising, exact_z_model)
from .fields import Prefactor
from .graph import GridIsing, IsingGraph
from .model import SpinModel
from .planarizer import embed_grid
from .potts import encode_potts

__all__ = ["PipelineResult", "run_pipeline", "graph_z", "grid_z", "verify_end_to_end"]

VERIFY_CAP = 26


@dataclass
class PipelineResult:
    """Z(model) = encode_prefactor * compile_prefactor * grid.prefactor * Z(grid)."""

    model: SpinModel
    spin_model: SpinModel
    encode_prefactor: Prefactor
    graph: IsingGraph
    compile_prefactor: Prefactor
    origin: dict
    grid: GridIsing
    trace: list = field(default_factory=list)

    @property
    def graph_prefactor(self) -> Prefactor:
        """Z(model) = graph_prefactor * Z(graph)."""
        return self.encode_prefactor * self.compile_prefactor

    @property
    def total_prefactor(self) -> Prefactor:
        return self.graph_prefactor * self.grid.prefactor


def run_pipeline(model: SpinModel, crossings=(), keep_trace: bool = True) -> PipelineResult:
    spin_model, p_enc = encode_potts(model) if not model.is_pure_spin else (model, Prefactor.one())
    g, p_comp, origin = compile_with_provenance(spin_model)
    trace: list | None = [] if keep_trace else None
    grid = embed_grid(g, crossings=crossings, trace=trace)
    return PipelineResult(model, spin_model, p_enc, g, p_comp, origin, grid, trace or [])


def graph_z(g: IsingGraph, cap: int = VERIFY_CAP, threads: int | None = None) -> ZReport:
    """Brute force within the cap, otherwise variable elimination."""
    if len(g.free_vertices()) <= cap:
        return exact_z_ising(g, cap=cap, threads=threads)
    return eliminate_z(g)


def grid_z(grid: GridIsing, cap: int = VERIFY_CAP, threads: int | None = None) -> ZReport:
    return graph_z(grid.to_ising_graph(), cap, threads)


def verify_end_to_end(result: PipelineResult, tol: float = 1e-10, cap: int = VERIFY_CAP,
                      threads: int | None = None):
    """(Verdict, Z(model), Z(grid)); raises CapExceededError if either side is too big."""
    if result.model.n_configs > 1 << cap:
        raise CapExceededError(f"model has {result.model.n_configs} configurations, above 2^{cap}")
    z_model = exact_z_model(result.model, cap=cap, threads=threads)
    z_grid = grid_z(result.grid, cap, threads)
    return check_equivalence(z_model, z_grid, result.total_prefactor, tol), z_model, z_grid
