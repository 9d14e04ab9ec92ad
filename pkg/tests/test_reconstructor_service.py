import re

import pytest

from app.domin.om.models.exceptions import NotOrientedMatroid, NotSimple
from app.domin.om.models.sign_vector import SignSystem
from app.domin.om.service.reconstructor_service import BuildSession
from conftest import HALFSPACE

TRACE_LINE = re.compile(r"^(corner|program|solution|cache|branch)=\w+:[^;]+(;\w+:[^;]+)*$")


def _check_conditions(reconstructor, result):
    report = reconstructor.verify_reconstructible(result)
    assert report.passed, report.model_dump(exclude_defaults=True)
    for members, image in result.table.items():
        assert image <= result.convex[members].osc
        assert len(image) <= result.vc
    for image, witness in result.witnesses.items():
        assert all(witness in m for m, v in result.table.items() if v == image)
    return report


@pytest.mark.parametrize("k", [2, 4, 6])
def test_path_maps(reconstructor, instance, k):
    affine = instance(f"path({k})").affine
    result = reconstructor.build_affine_map(affine)
    assert result.vc == 1
    assert len(result.graph) == k
    assert set(result.branches.values()) == {"path"}
    report = _check_conditions(reconstructor, result)
    assert report.convex_sets == len(result.table)


def test_path_base_vertex_gets_empty_image(reconstructor, instance):
    affine = instance("path(3)").affine
    result = reconstructor.build_affine_map(affine)
    base = next(v for v in result.graph.vertices if v.token == "+++")
    for members, image in result.table.items():
        if base in members:
            assert image == frozenset()


def test_tri_affine_map(reconstructor, instance):
    session = BuildSession()
    result = reconstructor.build_affine_map(instance("tri").affine, session)
    assert result.vc == 2
    assert len(result.graph) == 7
    _check_conditions(reconstructor, result)
    assert {"case_i", "case_ii"} <= set(result.branches.values())
    assert session.programs
    assert all(p.inclusion_holds for p in session.programs)
    assert session.trace.count("branch") >= 1
    assert session.trace.count("program") == session.trace.count("solution")
    assert all(len(xs) == 1 for xs in result.unique_cocircuits.values())


def test_solution_maps_are_cached(reconstructor, instance):
    session = BuildSession()
    result = reconstructor.build_affine_map(instance("tri").affine, session)
    report = reconstructor.verify_reconstructible(result)
    assert report.cache_identity
    misses = [e for e in session.trace.entries if e.key == "cache" and ("status", "miss") in e.fields]
    assert len(misses) == len(session.solution_maps)
    assert reconstructor.build_affine_map(instance("tri").affine, session) is result


def test_trace_lines_are_key_value(reconstructor, instance):
    session = BuildSession()
    reconstructor.build_affine_map(instance("tri").affine, session)
    lines = session.trace.render().splitlines()
    assert lines
    assert all(TRACE_LINE.match(line) for line in lines)


def test_paper4_om_map(reconstructor, paper4):
    session = BuildSession()
    result = reconstructor.build_om_map(paper4, session)
    assert result.vc == 2
    report = _check_conditions(reconstructor, result)
    assert report.convex_sets == 33
    assert set(result.branches.values()) <= {"inner", "corner"}
    assert session.trace.entries[0].key == "corner"
    assert reconstructor.render_trace(result).startswith("corner=elements:4;")


def test_om_map_requires_simple_om(reconstructor, axioms, system):
    with pytest.raises(NotSimple):
        reconstructor.build_om_map(axioms.structure(system("00", "++", "--")))
    with pytest.raises(NotOrientedMatroid):
        reconstructor.build_om_map(axioms.structure(SignSystem.from_tokens(HALFSPACE)))


def test_halfspace_com_map(reconstructor):
    result = reconstructor.build_com_map(SignSystem.from_tokens(HALFSPACE))
    assert len(result.graph) == 4
    _check_conditions(reconstructor, result)
    assert set(result.branches.values()) <= {"stage", "peel"}


def test_corrupted_map_fails_verification(reconstructor, instance):
    result = reconstructor.build_affine_map(instance("path(3)").affine, BuildSession())
    everything = result.graph.vertices
    result.table[everything] = frozenset({0})
    report = reconstructor.verify_reconstructible(result)
    assert not report.passed
    assert report.condition_a_failures


def test_corner_map_images_are_distinct(reconstructor, extensions, instance):
    structure = instance("cycle(4)").structure
    record = extensions.find_corner(structure)
    corner_map = reconstructor.build_corner_map(structure, record)
    images = list(corner_map.table.values())
    assert len(set(images)) == len(images)
    assert all(len(v) == corner_map.vc == 2 for v in images)
    assert all(members <= record.topes for members in corner_map.table)




def test_paper4_corner_map_stays_injective(reconstructor, extensions, paper4):
    record = extensions.find_corner(paper4)
    images = list(reconstructor.build_corner_map(paper4, record).table.values())
    assert len(set(images)) == len(images)


def test_rank_three_corner_map_shares_images(reconstructor, extensions, graphs, instance):
    structure = instance("unif(3,4)").structure
    record = extensions.find_corner(structure)
    assert len(record.topes) == 3
    corner_map = reconstructor.build_corner_map(structure, record)
    assert len(corner_map.table) == 5
    images = list(corner_map.table.values())
    # 크기 3 분할 집합은 4개뿐입니다
    assert len(set(images)) < len(images)
    convex = {c.members: c for c in graphs.enumerate_convex_sets(graphs.build(structure.topes))}
    for members, image in corner_map.table.items():
        assert len(image) == 3
        assert image <= convex[members].osc
    for image in set(images):
        common = frozenset.intersection(*(m for m, v in corner_map.table.items() if v == image))
        assert common
    singletons = [v for m, v in corner_map.table.items() if len(m) == 1]
    assert len(set(singletons)) == len(singletons)


def test_unif_3_4_om_map(reconstructor, instance):
    result = reconstructor.build_om_map(instance("unif(3,4)").structure, BuildSession())
    assert result.vc == 3
    _check_conditions(reconstructor, result)


def _build(reconstructor, named):
    if named.affine is not None:
        return reconstructor.build_affine_map(named.affine, BuildSession())
    return reconstructor.build_om_map(named.structure, BuildSession())


@pytest.mark.slow
@pytest.mark.parametrize("key", ["cycle(3)", "cycle(4)", "cycle(5)", "cycle(6)", "cube(2)", "cube(3)",
                                 "unif(3,5)", "unif(3,6)", "tri", "par", "path(5)"])
def test_named_instances_verify(reconstructor, instance, key):
    result = _build(reconstructor, instance(key))
    report = _check_conditions(reconstructor, result)
    assert report.convex_sets == len(result.table)


@pytest.mark.slow
@pytest.mark.parametrize("key, operation, e", [
    ("unif(3,5)", "delete", 0),
    ("unif(3,5)", "contract", 2),
    ("cube(3)", "delete", 1),
    ("cube(3)", "contract", 0),
    ("paper4", "delete", 3),
])
def test_minors_verify(reconstructor, axioms, instance, key, operation, e):
    system = instance(key).structure.system
    minor = axioms.delete(system, [e]) if operation == "delete" else axioms.contract(system, e)
    structure = axioms.structure(minor)
    result = reconstructor.build_om_map(structure, BuildSession())
    _check_conditions(reconstructor, result)


def _halfspace(named):
    affine = named.affine
    return SignSystem(affine.ground, frozenset(affine.covectors))


def test_tri_halfspace_com_map(reconstructor, instance):
    result = reconstructor.build_com_map(_halfspace(instance("tri")))
    assert result.vc == 2
    _check_conditions(reconstructor, result)


@pytest.mark.slow
@pytest.mark.parametrize("key", ["par", "path(4)", "path(6)", "cycle(3)", "cube(2)"])
def test_com_maps_verify(reconstructor, instance, key):
    named = instance(key)
    system = _halfspace(named) if named.affine is not None else named.structure.system
    result = reconstructor.build_com_map(system)
    _check_conditions(reconstructor, result)


def test_com_stage_images_respect_stage_bound(reconstructor):
    result = reconstructor.build_com_map(SignSystem.from_tokens(HALFSPACE))
    stages = [m for m, b in result.branches.items() if b == "stage"]
    assert stages
    assert set(result.bounds) == set(stages)
    assert all(len(result.table[m]) <= result.bounds[m] <= result.vc for m in stages)

    target = next(m for m in stages if result.convex[m].osc)
    result.bounds[target] = 0
    result.table[target] = frozenset(sorted(result.convex[target].osc)[:1])
    report = reconstructor.verify_reconstructible(result)
    assert not report.passed
    assert report.stratification_failures
