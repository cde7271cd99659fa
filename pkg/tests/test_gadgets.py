import pytest

from isingforge.errors import FitError
from isingforge.fields import Cyclo8
from isingforge.gadgets import (SHAPES, GadgetShape, check_identity, fit_gadget_constants,
                                lemma_l1_holds, lemma_l3_holds, lemma_l4_holds, star_sum, template)


@pytest.mark.parametrize("m", range(1, 9))
def test_parity_gadget(m):
    assert lemma_l1_holds(m)


@pytest.mark.parametrize("x", range(-8, 9))
def test_consecutive_square_sum(x):
    assert lemma_l3_holds(x)


def test_local_complementation_all_subsets():
    from itertools import combinations
    cycle = [(0, 1), (1, 2), (2, 3), (0, 3)]
    for m in (2, 3, 4):
        pairs = [p for p in cycle if max(p) < m]
        for r in range(len(pairs) + 1):
            for K in combinations(pairs, r):
                assert lemma_l4_holds(m, K)


@pytest.mark.parametrize("name", sorted(SHAPES))
def test_templates_are_exact(name):
    """gadget(s) / target(s) is the same exact constant on every assignment."""
    from itertools import product
    t = template(name)
    shape = SHAPES[name]
    assignments = list(product((1, -1), repeat=t.arity))
    ref = assignments[0]
    for s in assignments:
        assert (t.gadget_value(s) * shape.target(ref) - t.gadget_value(ref) * shape.target(s)).is_zero()
    assert abs(complex(t.gadget_value(ref)) - t.c * complex(shape.target(ref))) < 1e-12


def test_fitted_constants():
    assert (template("leaf").a0, template("leaf").leg_shifts) == (0, (0,))
    assert (template("subdivide").a0, template("subdivide").leg_shifts) == (1, (-1, -1))
    assert abs(template("subdivide").c - (1 + 1j)) < 1e-12
    assert (template("merge").a0, template("merge").leg_shifts) == (2, (-1, -1))
    assert abs(template("merge").c - 2j) < 1e-12
    cross = template("crossing")
    assert (cross.a0, cross.leg_shifts) == (1, (-1, -1, -1, -1))
    assert abs(cross.c - 1j * 2 ** 0.5) < 1e-12


def test_printed_merge_constants_fail_at_minus_minus():
    # -1/2 sum_{S0} e^{i pi/2 S0 + i pi/4 S0 (S1 + S2)} against delta(S1, S2)
    def printed(s):
        return star_sum(2, (0, 0), (), s) * Cyclo8.rational(__import__("fractions").Fraction(-1, 2))
    bad = check_identity(printed, SHAPES["merge"].target, 2)
    assert bad == [(-1, -1)]


def test_printed_crossing_constants_fail_at_all_plus():
    shape = SHAPES["crossing"]

    def printed_lhs(s):
        return star_sum(-1, (0, 0, 0, 0), shape.ext, s)

    def printed_rhs(s):
        i_minus_1 = Cyclo8.root(2) - Cyclo8.rational(1)
        return i_minus_1 * Cyclo8.root(2 * sum(s) + s[0] * s[2] + s[1] * s[3])
    bad = check_identity(printed_lhs, printed_rhs, 4)
    assert (1, 1, 1, 1) in bad
    assert abs(complex(printed_lhs((1, 1, 1, 1))) - 2 ** 0.5) < 1e-12
    assert abs(complex(printed_rhs((1, 1, 1, 1))) - (-1 - 1j)) < 1e-12


def test_fit_failure_is_loud():
    impossible = GadgetShape("zero-at-one", 1, lambda s: Cyclo8.rational(int(s[0] == 1) * 3 + 1))
    with pytest.raises(FitError):
        fit_gadget_constants(impossible)
    with pytest.raises(FitError):
        fit_gadget_constants(GadgetShape("big", 9, lambda s: Cyclo8.rational(1)))
