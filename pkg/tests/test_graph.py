import pytest

from isingforge.errors import MalformedGraphError
from isingforge.fields import ComplexField
from isingforge.graph import GridIsing, IsingGraph, validate


def test_construction_and_queries():
    g = IsingGraph([("a", ComplexField.quarter(1)), "b", ("c", ComplexField(), -1)],
                   [("a", "b"), ("b", "c")])
    assert g.vertices == ["a", "b", "c"]
    assert g.degree("b") == 2 and g.has_edge("b", "a")
    assert g.pinned("c") == -1 and g.free_vertices() == ["a", "b"]
    assert g.edges() == [("a", "b"), ("b", "c")]


@pytest.mark.parametrize("vertices, edges", [
    (["a", "a"], []),
    (["a"], [("a", "b")]),
    (["a"], [("a", "a")]),
    (["a", "b"], [("a", "b"), ("b", "a")]),
])
def test_malformed(vertices, edges):
    with pytest.raises(MalformedGraphError):
        IsingGraph(vertices, edges)


def test_copy_is_independent():
    g = IsingGraph(["a", "b"], [("a", "b")])
    h = g.copy()
    h.remove_edge("a", "b")
    assert g.has_edge("a", "b") and g != h


def test_canonicalized_keeps_weights():
    g = IsingGraph([("a", ComplexField.quarter(-5))])
    assert g.canonicalized().field("a") == ComplexField.quarter(3)


def test_validate_reports_components_and_nonplanarity():
    k5 = IsingGraph([str(i) for i in range(5)],
                    [(str(i), str(j)) for i in range(5) for j in range(i + 1, 5)])
    d = validate(k5)
    assert d.components == 1 and d.nonplanar and d.max_degree == 4
    d2 = validate(IsingGraph(["a", "b"]))
    assert d2.components == 2 and not d2.nonplanar


def test_grid_invariants():
    grid = GridIsing(3, 2, [[ComplexField()] * 3] * 2)
    assert grid.check_invariants() == [] and grid.is_pin_free
    assert grid.n_couplings() == 7
    g = grid.to_ising_graph()
    assert len(g) == 6 and g.n_edges == 7
    bad = GridIsing(2, 2, [[ComplexField()] * 2] * 2, fixed={(0, 0)})
    assert bad.check_invariants() and not bad.is_pin_free
    assert bad.to_ising_graph().pinned("c0_0") == 1
