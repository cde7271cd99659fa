"""Compile discrete lattice models into rectangular Ising models with i*pi/4 couplings."""

from .errors import *  # noqa: F401,F403
from .fields import ComplexField, Cyclo8, Prefactor, canonicalize_field, prefactor_mul
from .graph import ConstraintSystem, Diagnostics, GridIsing, IsingGraph, validate
from .model import ModelSource, Site, SpinModel, Term
from .dsl import gen_lattice, parse_model, render_model
from .potts import encode_potts
from .compiler import compile_model
from .planarizer import embed_grid
from .evaluator import check_equivalence, eliminate_z, exact_z_ising, exact_z_model, transfer_z
from .pipeline import run_pipeline, verify_end_to_end

__version__ = "0.1.0"
