"""Multidegree routes: staircase counts, lex degeneration, linear reduction."""

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from thomcalc import (
    InfiniteStaircaseError,
    MissingGeneratorError,
    MonomialIdeal,
    PolynomialIdeal,
    Polynomial,
    SPairBudgetError,
    WeightInhomogeneityError,
    WeightedRing,
    buchberger_lex,
    etavar,
    euler_class,
    initial_ideal,
    linear_form,
    multidegree,
    multidegree_monomial,
    reduce_by_linear_generator,
    subspace_multiplicity,
    toric_localization_example,
    yvar,
)

Y = [None] + [Polynomial.variable(yvar(i)) for i in range(1, 5)]
E = [None] + [Polynomial.variable(etavar(i)) for i in range(1, 5)]


def ring(n):
    return WeightedRing(tuple(linear_form((1, etavar(i))) for i in range(1, n + 1)))


def test_euler_class_is_weight_product():
    assert euler_class(ring(3)) == E[1] * E[2] * E[3]


# -- monomial ideals and staircases ------------------------------------


def test_minimal_generators():
    ideal = MonomialIdeal([{1: 2}, {1: 2, 2: 1}, {2: 3}], [1, 2])
    assert ideal.generators == ({1: 2}, {2: 3}) or set(
        map(tuple, (g.items() for g in ideal.generators))
    ) == {((1, 2),), ((2, 3),)}


def test_fat_point_multiplicity():
    ideal = MonomialIdeal([{1: 2}, {2: 3}, {3: 1}], [1, 2, 3])
    assert subspace_multiplicity(ideal, {1, 2, 3}) == 6
    assert subspace_multiplicity(ideal, {3}) == 0  # unit after restriction


def test_infinite_staircase_detected():
    ideal = MonomialIdeal([{1: 2}], [1, 2])
    with pytest.raises(InfiniteStaircaseError):
        subspace_multiplicity(ideal, {1, 2})


def test_monomial_multidegree_hypersurface():
    ideal = MonomialIdeal([{1: 1, 2: 1}], [1, 2])
    assert multidegree_monomial(ideal, ring(2)) == E[1] + E[2]


def test_monomial_multidegree_unit():
    ideal = MonomialIdeal([{}], [1, 2])
    assert ideal.is_unit()
    assert multidegree_monomial(ideal, ring(2)).is_zero()


@given(st.permutations([{1: 2}, {2: 3}, {3: 1}]))
@settings(max_examples=10, deadline=None)
def test_generator_order_is_irrelevant(gens):
    base = multidegree_monomial(MonomialIdeal(gens, [1, 2, 3]), ring(3))
    assert base == 6 * E[1] * E[2] * E[3]


def test_redundant_generators_are_dropped():
    lean = MonomialIdeal([{1: 1, 2: 1}], [1, 2])
    fat = MonomialIdeal([{1: 1, 2: 1}, {1: 2, 2: 1}], [1, 2])
    assert multidegree_monomial(lean, ring(2)) == multidegree_monomial(fat, ring(2))


# -- Groebner route ----------------------------------------------------


def test_buchberger_on_a_principal_ideal():
    ideal = PolynomialIdeal.of([Y[1] * Y[2]])
    basis = buchberger_lex(ideal)
    assert len(basis) == 1


def test_initial_ideal_of_the_cone():
    ideal = PolynomialIdeal.of([Y[1] * Y[3] - Y[2] * Y[4]])
    init = initial_ideal(ideal)
    assert multidegree_monomial(init, ring(4)) is not None


def test_multidegree_fat_point_route():
    # y1 - y2 is weight-homogeneous only when both coordinates share a weight
    ideal = PolynomialIdeal.of([Y[1] - Y[2], Y[2] ** 2])
    equal = WeightedRing((linear_form((1, etavar(1))), linear_form((1, etavar(1)))))
    assert multidegree(ideal, equal) == 2 * E[1] ** 2


def test_multidegree_trivial_cases():
    assert multidegree(PolynomialIdeal.of([]), ring(2)) == Polynomial.one()
    unit = PolynomialIdeal.of([Polynomial.one()], order=[yvar(1)])
    assert multidegree(unit, ring(1)).is_zero()


def test_weight_homogeneity_enforced():
    mixed = PolynomialIdeal.of([Y[1] + Y[2] ** 2])
    with pytest.raises(WeightInhomogeneityError):
        multidegree(mixed, ring(2))


def test_pair_budget():
    gens = [Y[1] * Y[3] - Y[2] ** 2, Y[2] * Y[4] - Y[3] ** 2, Y[1] * Y[4] - Y[2] * Y[3]]
    with pytest.raises(SPairBudgetError):
        buchberger_lex(PolynomialIdeal.of(gens), pair_budget=1)
    assert buchberger_lex(PolynomialIdeal.of(gens)) is not None


def test_ideal_validation():
    with pytest.raises(ValueError):
        PolynomialIdeal.of([Y[1]], order=[etavar(1)])
    with pytest.raises(ValueError):
        PolynomialIdeal((Y[2],), (yvar(1),))


# -- linear-generator reduction ----------------------------------------


def test_reduction_splits_a_weight_factor():
    ideal = PolynomialIdeal.of([Y[1] - Y[2] * Y[3], Y[2] ** 2])
    reduced, factor = reduce_by_linear_generator(ideal, ring(3), 1, Y[2] * Y[3])
    assert factor == linear_form((1, etavar(1)))
    assert multidegree(reduced, ring(3)) == 2 * E[2]
    total = factor.as_polynomial() * multidegree(reduced, ring(3))
    assert total == 2 * E[1] * E[2]


def test_reduction_applied_twice():
    ideal = PolynomialIdeal.of([Y[1] - Y[2], Y[2] - Y[3]])
    once, f1 = reduce_by_linear_generator(ideal, ring(3), 1, Y[2])
    twice, f2 = reduce_by_linear_generator(once, ring(3), 2, Y[3])
    assert not twice.generators
    assert f1.as_polynomial() * f2.as_polynomial() * multidegree(
        twice, ring(3)
    ) == E[1] * E[2]


def test_reduction_requires_the_generator():
    ideal = PolynomialIdeal.of([Y[1] - Y[2], Y[2] ** 2])
    with pytest.raises(MissingGeneratorError):
        reduce_by_linear_generator(ideal, ring(3), 3, Y[1])


# -- the toric cross-check ---------------------------------------------


def test_toric_example_report_fields():
    report = toric_localization_example()
    assert report.agree
    assert report.expected == E[1] + E[3]
