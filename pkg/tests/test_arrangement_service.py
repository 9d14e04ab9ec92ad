from fractions import Fraction
from math import comb

import pytest
from hypothesis import assume, given, settings, strategies as st

from app.domin.om.models.exceptions import DegenerateInput, UniverseTooLarge, UnknownKey
from app.domin.om.models.sign_vector import SignVector
from app.domin.om.models.structures import RationalMatrix
from app.domin.om.service.arrangement_service import ArrangementService, feasible

F = Fraction


@pytest.fixture(scope="module")
def arrangements(service):
    return service.arrangements


def test_feasible():
    assert feasible([((F(1),), True)], 1)
    assert not feasible([((F(1),), True), ((F(-1),), True)], 1)
    assert feasible([((F(1),), False), ((F(-1),), False)], 1)
    x_pos = ((F(1), F(0)), True)
    y_pos = ((F(0), F(1)), True)
    assert feasible([x_pos, y_pos], 2)
    assert not feasible([x_pos, y_pos, ((F(-1), F(-1)), False)], 2)
    assert feasible([x_pos, ((F(-1), F(1)), True)], 2)


@pytest.mark.parametrize("key", ArrangementService.instance_keys())
def test_matrix_rank_matches_covector_rank(arrangements, instance, key):
    named = instance(key)
    assert arrangements.matrix_rank(named.matrix) == named.structure.rank


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_instance_tope_counts(instance, n):
    assert len(instance(f"cycle({n})").structure.topes) == 2 * n
    if n >= 4:
        assert len(instance(f"unif(3,{n})").structure.topes) == 2 * sum(comb(n - 1, i) for i in range(3))
    if n <= 3:
        assert len(instance(f"cube({n})").structure.topes) == 2 ** n
    assert len(instance(f"path({n})").affine.topes) == n


def test_unknown_instances(arrangements):
    for key in ["foo", "cycle(99)", "unif(4,4)", "cube(0)"]:
        with pytest.raises(UnknownKey):
            arrangements.named_instance(key)


def test_degenerate_inputs(arrangements):
    with pytest.raises(DegenerateInput):
        arrangements.om_from_vectors(RationalMatrix.from_columns([(0, 0), (0, 0)]))
    with pytest.raises(DegenerateInput):
        arrangements.affine_from_points(RationalMatrix.from_columns([(1, 0), (0, 1)]), [0])
    with pytest.raises(UniverseTooLarge):
        ArrangementService(max_universe=3).om_from_vectors(RationalMatrix.from_columns([(1, t) for t in range(4)]))


entries = st.integers(min_value=-2, max_value=2)
columns = st.lists(entries, min_size=3, max_size=3).filter(any)


@settings(max_examples=25, deadline=None)
@given(st.lists(columns, min_size=2, max_size=4))
def test_realized_rank_matches_matrix_rank(arrangements, cols):
    matrix = RationalMatrix.from_columns(cols)
    structure = arrangements.om_from_vectors(matrix)
    assert structure.rank == arrangements.matrix_rank(matrix)


points = st.lists(st.fractions(min_value=-50, max_value=50, max_denominator=97), min_size=3, max_size=3)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(["paper4", "cycle(5)", "cube(3)", "unif(3,5)", "tri"]), points)
def test_sampled_points_land_on_topes(instance, key, point):
    named = instance(key)
    matrix = named.matrix
    values = [sum(a * b for a, b in zip(point, column)) for column in matrix.columns]
    assume(all(values))
    signs = tuple(1 if value > 0 else -1 for value in values)
    assert SignVector.from_signs(signs, named.structure.ground) in named.structure.topes
