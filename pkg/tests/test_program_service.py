import itertools

import pytest

from app.domin.om.models.exceptions import (
    ElementNotFound,
    EmptyPolyhedron,
    NotGeneralPosition,
    NotOrientedMatroid,
    Unbounded,
)
from app.domin.om.models.sign_vector import Sign, SignSystem, SignVector
from conftest import HALFSPACE, tokens

BOUNDED = {"1": "+", "2": "+", "3": "-"}


@pytest.fixture(scope="module")
def tri(instance):
    return instance("tri").affine


@pytest.fixture(scope="module")
def par(instance):
    return instance("par").affine


def _v(token, affine):
    return SignVector.from_token(token, affine.ground)


def test_tri_affine_structure(tri):
    assert tri.ground.names == ("1", "2", "3", "g")
    assert tri.g == 3
    assert len(tri.topes) == 7
    assert tokens(tri.cocircuits) == sorted(["00-+", "0+0+", "+00+"])
    assert len(tri.cocircuits_at_infinity) == 6
    assert all(3 in x.plus for x in tri.covectors)
    assert tri.rank == 2


def test_tri_digraph_counts(programs, tri):
    digraph = programs.cocircuit_digraph(tri, "1")
    assert len(digraph.nodes) == 3
    assert len(digraph.arcs) == 3
    assert len(digraph.half_arcs) == 6
    assert programs.cocircuit_digraph(tri, "1") is digraph


def test_par_digraph_counts(programs, par):
    assert len(par.cocircuits) == 2
    assert len(par.topes) == 6
    digraph = programs.cocircuit_digraph(par, "3")
    assert len(digraph.arcs) == 1
    assert len(digraph.half_arcs) == 6


def test_objective_must_differ_from_g(programs, tri):
    with pytest.raises(ElementNotFound):
        programs.cocircuit_digraph(tri, "g")
    with pytest.raises(ElementNotFound):
        programs.cocircuit_digraph(tri, "z")


def test_polyhedron_members(programs, tri):
    polyhedron = programs.polyhedron(tri, BOUNDED)
    assert polyhedron.render() == "1=+,2=+,3=-"
    assert tokens(polyhedron.cocircuits) == sorted(["00-+", "0+0+", "+00+"])
    assert len(polyhedron.topes) == 1
    assert programs.polyhedron(tri, {}).members == tri.covectors
    with pytest.raises(ElementNotFound):
        programs.polyhedron(tri, {"g": "+"})


def test_bounded_programs(programs, tri):
    polyhedron = programs.polyhedron(tri, BOUNDED)
    assert programs.solve_program(tri, "1", polyhedron).token == "0+0+"
    assert programs.solve_program(tri, "3", polyhedron).token == "00-+"


def test_integer_signs_are_accepted(programs, tri):
    polyhedron = programs.polyhedron(tri, {0: 1, 1: 1, 2: -1})
    assert programs.solve_program(tri, 0, polyhedron).token == "0+0+"


def test_unbounded_program(programs, tri):
    with pytest.raises(Unbounded):
        programs.solve_program(tri, "3", programs.polyhedron(tri, {}))


def test_empty_polyhedron(programs, tri):
    polyhedron = programs.polyhedron(tri, {"1": "-", "2": "-", "3": "+"})
    assert polyhedron.is_empty
    with pytest.raises(EmptyPolyhedron):
        programs.solve_program(tri, "1", polyhedron)


def test_every_tri_program_resolves(programs, tri):
    """제약 27가지 × 목적 3가지 모두 해, Unbounded, EmptyPolyhedron 중 하나"""
    outcomes = {"solved": 0, "unbounded": 0, "empty": 0}
    for pattern in itertools.product((None, "+", "-"), repeat=3):
        constraints = {str(e + 1): s for e, s in enumerate(pattern) if s is not None}
        polyhedron = programs.polyhedron(tri, constraints)
        for f in ("1", "2", "3"):
            try:
                solution = programs.solve_program(tri, f, polyhedron)
            except Unbounded:
                outcomes["unbounded"] += 1
                continue
            except EmptyPolyhedron:
                outcomes["empty"] += 1
                continue
            program = programs.program_graph(programs.cocircuit_digraph(tri, f), polyhedron)
            assert solution in polyhedron
            assert program.graph.in_degree(solution) == 0
            outcomes["solved"] += 1
    assert sum(outcomes.values()) == 81
    assert outcomes["solved"] > 0
    assert outcomes["unbounded"] > 0
    assert outcomes["empty"] == 3


def test_corner_at_solution(programs, tri):
    solution = _v("+00+", tri)
    record = programs.corner_at_solution(tri, solution, "1")
    assert len(record.topes) == 1
    assert record.side == Sign.MINUS
    assert record.extension.ground.names == ("2", "3", "e")
    assert record.localization.provenance == "EXPLICIT"
    assert programs.corner_at_solution(tri, solution, "1") is record


def test_corner_at_solution_errors(programs, tri):
    with pytest.raises(ElementNotFound):
        programs.corner_at_solution(tri, _v("++++", tri), "1")
    with pytest.raises(NotGeneralPosition):
        programs.corner_at_solution(tri, _v("0+0+", tri), "1")


def test_affine_requires_om(programs, axioms, paper4):
    halfspace = axioms.structure(SignSystem.from_tokens(HALFSPACE))
    with pytest.raises(NotOrientedMatroid):
        programs.affine(halfspace, 0)
    assert programs.affine(paper4, "1").g == 0
