import pytest

from isingforge.bundled import bundled_model
from isingforge.compiler import (apply_l1_gadget, compile_model, compile_with_provenance,
                                 incidence_matrix, substitute_terms)
from isingforge.dsl import gen_lattice, parse_model
from isingforge.errors import PreconditionError
from isingforge.evaluator import check_equivalence, exact_z_ising, exact_z_model
from isingforge.fields import ComplexField

J = ComplexField(0.4, 0, 0.15)


def test_triangle_compiles_to_star():
    g, p, origin = compile_with_provenance(bundled_model("triangle"))
    assert len(g) == 4 and g.n_edges == 3
    assert origin["c0"] == "constraint t0 t1 t2"
    assert origin["t0"] == "term {a b}"
    assert g.field("c0") == ComplexField.quarter(-3)


def test_incidence_and_overcount():
    m = gen_lattice("square", 1, 1, J)
    inc = incidence_matrix(m)
    assert inc.rank == 3 and inc.n_cols == 4
    sys = substitute_terms(m)
    assert sys.overcount_exponent == 1 and len(sys.constraints) == 1


@pytest.mark.parametrize("kind, rows, cols", [
    ("square", 1, 1), ("square", 2, 2), ("square", 2, 3),
    ("triangular", 1, 2), ("triangular", 2, 2),
    ("hexagonal", 1, 1), ("hexagonal", 1, 2),
    ("triangular3body", 1, 2), ("triangular3body", 2, 4),
])
def test_lattice_partition_functions(kind, rows, cols):
    m = gen_lattice(kind, rows, cols, J)
    g, p = compile_model(m)
    assert check_equivalence(exact_z_model(m), exact_z_ising(g), p, 1e-11)


def test_square_fields_after_canonicalization():
    g, _ = compile_model(gen_lattice("square", 2, 2, J))
    whites = [v for v in g.vertices if v.startswith("c")]
    assert len(whites) == 4
    assert all(g.field(v) == ComplexField.quarter(4) for v in whites)
    interior = [v for v in g.vertices if v.startswith("t") and g.degree(v) == 2]
    assert len(interior) == 4
    assert all(g.field(v) == J.shift(-2) for v in interior)


def test_face_constraints_are_low_weight():
    sys = substitute_terms(gen_lattice("triangular", 2, 2, J))
    assert sorted(len(c) for c in sys.constraints) == [3, 3, 3, 3]


def test_three_body_star_constraint():
    sys = substitute_terms(gen_lattice("triangular3body", 2, 4, J))
    assert [len(c) for c in sys.constraints] == [6]
    assert sys.overcount_exponent == 2


def test_l1_gadget_constants():
    sys = substitute_terms(gen_lattice("square", 1, 1, J))
    delta, p = apply_l1_gadget(sys, sys.constraints[0])
    assert delta.ancilla_field == ComplexField.quarter(-4)
    assert delta.member_shift == -1
    assert abs(p.as_complex() - 0.5 * (-1)) < 1e-12


def test_potts_model_needs_encoding():
    with pytest.raises(PreconditionError):
        substitute_terms(parse_model("site p potts4; site q potts4\nterm delta {p q} 1"))


def test_model_without_relations():
    m = parse_model("site a spin; site b spin; site c spin\nterm {a b} 0.3\nterm {b c} 0.1i")
    g, p = compile_model(m)
    assert len(g) == 2 and g.n_edges == 0
    assert check_equivalence(exact_z_model(m), exact_z_ising(g), p, 1e-12)
