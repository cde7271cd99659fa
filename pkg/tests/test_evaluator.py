import cmath
import math

import pytest

from conftest import naive_z, random_graph, rel
from isingforge.errors import CapExceededError
from isingforge.evaluator import (ZReport, check_equivalence, eliminate_z, exact_z_constrained,
                                  exact_z_ising, exact_z_model, transfer_z)
from isingforge.compiler import compile_model, substitute_terms
from isingforge.dsl import gen_lattice, parse_model
from isingforge.fields import ComplexField, Prefactor
from isingforge.graph import GridIsing, IsingGraph


def test_single_spin():
    g = IsingGraph([("a", ComplexField(0.3, 1, 0.0))])
    assert cmath.isclose(exact_z_ising(g).value, 2 * cmath.cosh(0.3 + 1j * math.pi / 4))


@pytest.mark.parametrize("n", [1, 5, 12, 18])
def test_ising_matches_naive(rng, n):
    g = random_graph(rng, n, 0.4)
    if n >= 5:
        g.set_pinned("v1", -1)
        g.set_pinned("v3", 1)
    ref = naive_z(g) if n <= 12 else None
    z = exact_z_ising(g, threads=1)
    if ref is not None:
        assert rel(z.value, ref) < 1e-12
    assert rel(eliminate_z(g).value, z.value) < 1e-12


def test_thread_count_does_not_change_result(rng):
    g = random_graph(rng, 20, 0.3)
    a, b = exact_z_ising(g, threads=1), exact_z_ising(g, threads=4)
    assert abs(a.log_abs - b.log_abs) < 1e-13 and abs(a.phase - b.phase) < 1e-13


def test_cap():
    g = IsingGraph([f"v{i}" for i in range(30)])
    with pytest.raises(CapExceededError):
        exact_z_ising(g, cap=28)
    with pytest.raises(CapExceededError):
        eliminate_z(IsingGraph([str(i) for i in range(6)],
                               [(str(i), str(j)) for i in range(6) for j in range(i + 1, 6)]),
                    width_cap=3)


def test_model_with_potts_sites():
    m = parse_model("site p potts3; site q potts3\nterm delta {p q} 0.7")
    assert cmath.isclose(exact_z_model(m).value, 3 * cmath.exp(0.7) + 6)


def test_constrained_matches_model():
    m = gen_lattice("triangular", 1, 2, ComplexField(0.2, 1, 0.1))
    sys = substitute_terms(m)
    z_m = exact_z_model(m)
    z_c = exact_z_constrained(sys)
    assert check_equivalence(z_m, z_c, Prefactor.one(), 1e-12)


def test_transfer_matches_brute(rng):
    for W, H in ((1, 1), (1, 5), (3, 4), (5, 3)):
        fields = [[ComplexField(rng.uniform(-1, 1), rng.randint(-3, 4), rng.uniform(-1, 1))
                   for _ in range(W)] for _ in range(H)]
        grid = GridIsing(W, H, fields, fixed={(0, 0)} if W * H > 2 else ())
        assert rel(transfer_z(grid).value, naive_z(grid.to_ising_graph())) < 1e-12


def test_check_equivalence_detects_mismatch():
    a = ZReport.from_parts(1 + 1j, 0j, 1, "x")
    assert check_equivalence(a, a, Prefactor.one(), 1e-12).passed
    assert not check_equivalence(a, a, Prefactor.quarter(1), 1e-12).passed
    zero = ZReport.from_parts(0j, 0j, 1, "x")
    assert check_equivalence(zero, zero, Prefactor.one(), 1e-12).passed


def test_report_text():
    z = ZReport.from_parts(2 + 0j, 0j, 4, "brute", 0.0015)
    assert str(z) == "2.0 0.0 4 brute 1.500"


def test_compiled_graph_matches(rng):
    m = gen_lattice("square", 1, 2, ComplexField(0.3, 0, -0.2))
    g, p = compile_model(m)
    assert check_equivalence(exact_z_model(m), exact_z_ising(g), p, 1e-12)
