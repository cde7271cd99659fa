import cmath
import math
import random

import pytest

from isingforge.compiler import compile_model
from isingforge.duality import (DualModel, decimate_all, decimate_spin, derive_square_duality,
                                fit_star, self_dual_point, square_K)
from isingforge.dsl import gen_lattice
from isingforge.errors import FitError, PreconditionError
from isingforge.evaluator import check_equivalence, exact_z_ising, exact_z_model
from isingforge.fields import ComplexField
from isingforge.graph import IsingGraph

QT = math.pi / 4


def test_degree_two_relations():
    J = 0.5
    fit = fit_star(J - 2j * QT, ("a", "b"))
    assert fit.h1 == fit.h2 == 1j * QT
    assert abs(cmath.exp(-2 * fit.K) - math.tanh(J)) < 1e-12
    assert abs(fit.K - (-0.5 * math.log(math.tanh(0.5)))) < 1e-12
    assert abs((fit.A / 2) ** 2 + 0.5 * math.sinh(2 * J)) < 1e-12


def test_large_J_limit():
    assert abs(square_K(10.0)) < 1e-8


def test_fit_reproduces_table():
    rng = random.Random(2)
    for _ in range(100):
        J = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        if abs(cmath.sinh(2 * J)) < 1e-6:
            continue
        fit = fit_star(J - 2j * QT, ("a", "b"))
        for s1 in (1, -1):
            for s2 in (1, -1):
                star = sum(cmath.exp(s0 * (J - 2j * QT) + 1j * QT * s0 * (s1 + s2)) for s0 in (1, -1))
                assert abs(fit.value((s1, s2)) - star) <= 1e-10 * abs(star)
        assert fit.h1 == fit.h2


def test_zero_field_star():
    from itertools import product
    fit = fit_star(0, ("a", "b", "c"))
    for s in product((1, -1), repeat=3):
        assert abs(fit.value(s) - 2 * math.cos(QT * sum(s))) < 1e-12


def test_degree_three_star():
    fit = fit_star(0.3 - 3j * QT, ("a", "b", "c"))
    assert len(fit.couplings) == 7
    from itertools import product
    for s in product((1, -1), repeat=3):
        star = sum(cmath.exp(s0 * (0.3 - 3j * QT) + 1j * QT * s0 * sum(s)) for s0 in (1, -1))
        assert abs(fit.value(s) - star) < 1e-10 * abs(star)


def test_singular_and_bad_degree():
    with pytest.raises(FitError):
        fit_star(0.0, ("a", "b"))  # 2 cos(pi/2) when both neighbours agree
    with pytest.raises(PreconditionError):
        fit_star(0.1, ())


def test_decimation_chain_on_lattices():
    for kind, r, c in (("square", 2, 2), ("triangular", 2, 2), ("square", 2, 3)):
        m = gen_lattice(kind, r, c, ComplexField(0.4, 0, 0.2))
        g, p = compile_model(m)
        dual = decimate_all(g, [v for v in g.vertices if v.startswith("t")])
        assert check_equivalence(exact_z_model(m), exact_z_model(dual.to_spin_model()),
                                 p * dual.prefactor, 1e-10)


def test_decimate_requires_plain_vertex():
    g = IsingGraph(["a", ("b", ComplexField(0.3)), "c"], [("a", "b"), ("b", "c")])
    dual = DualModel.from_graph(g)
    decimate_spin(dual, "b")
    with pytest.raises(PreconditionError):
        decimate_spin(dual, "a")


def test_self_dual_point():
    js = self_dual_point()
    assert abs(math.tanh(js) - math.exp(-2 * js)) < 1e-15
    assert abs(square_K(js) - js) < 1e-10


@pytest.mark.parametrize("rows, cols", [(2, 2), (2, 3)])
def test_square_report_is_reproducible(rows, cols):
    a = derive_square_duality(rows, cols, 0.5)
    b = derive_square_duality(rows, cols, 0.5)
    assert a.chain_passed
    assert abs(a.closed_form_rel - b.closed_form_rel) <= 1e-12
    assert "PASS" in str(a)
