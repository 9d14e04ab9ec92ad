import pytest

from app.domin.om.models.exceptions import NotReconstructible, SchemeInvalid, UnknownImage, UnrealizableSample
from app.domin.om.models.schemas import SchemeReport
from app.domin.om.models.sign_vector import GroundSet, SignSystem, SignVector
from app.domin.om.models.structures import CompressionScheme
from app.domin.om.repository.scheme_repository import load_fixture_scheme, load_fixture_system
from app.domin.om.service.reconstructor_service import BuildSession
from conftest import HALFSPACE


@pytest.fixture(scope="module")
def compression(service):
    return service.compression


@pytest.fixture
def table1():
    return load_fixture_scheme("table1")


@pytest.fixture(scope="module")
def paper4_scheme(service):
    scheme, _ = service.build_scheme(load_fixture_system("paper4"))
    return scheme


def _with_beta(scheme: CompressionScheme, image, token) -> CompressionScheme:
    beta = dict(scheme.beta)
    beta[frozenset(image)] = SignVector.from_token(token, scheme.universe)
    return CompressionScheme(scheme.universe, scheme.alpha, beta, scheme.declared_size)


def test_realizable_samples(compression, paper4):
    samples = compression.realizable_samples(paper4.topes)
    assert len(samples) == 65
    assert all(any(s <= t for t in paper4.topes) for s in samples)


def test_table1_scheme_passes(compression, paper4, table1):
    report = compression.verify_scheme(paper4.topes, table1, 2)
    assert report.passed, report.violations
    assert report.samples_checked == 65
    assert report.beta_entries == 11
    assert report.max_image_size == 2


def test_table1_with_smaller_bound_fails(compression, paper4, table1):
    report = compression.verify_scheme(paper4.topes, table1, 1)
    assert not report.passed
    assert any("exceeds 1" in v for v in report.violations)


def test_corrupted_beta_is_detected(compression, paper4, table1):
    broken = _with_beta(table1, {0, 3}, "----")
    report = compression.verify_scheme(paper4.topes, broken, 2)
    assert not report.passed
    assert any("not below beta{1,4}" in v for v in report.violations)


def test_beta_outside_class_is_detected(compression, paper4, table1):
    broken = _with_beta(table1, {0, 3}, "+-+-")
    report = compression.verify_scheme(paper4.topes, broken, 2)
    assert any("is not a concept of the class" in v for v in report.violations)


def test_alpha_leaving_support_is_detected(compression, paper4, table1):
    alpha = dict(table1.alpha)
    alpha[SignVector.from_token("+0--", table1.universe)] = frozenset({1})
    broken = CompressionScheme(table1.universe, alpha, table1.beta, 2)
    report = compression.verify_scheme(paper4.topes, broken, 2)
    assert any(v.startswith("+0--: alpha {2} leaves the support") for v in report.violations)


def test_missing_alpha_is_detected(compression, paper4, table1):
    alpha = dict(table1.alpha)
    del alpha[SignVector.from_token("0000", table1.universe)]
    broken = CompressionScheme(table1.universe, alpha, table1.beta, 2)
    report = compression.verify_scheme(paper4.topes, broken, 2)
    assert "0000: alpha undefined" in report.violations


def test_universe_mismatch(compression, table1):
    topes = SignSystem.from_tokens(["+++", "---"], GroundSet.default(3)).topes
    report = compression.verify_scheme(topes, table1, 2)
    assert not report.passed
    assert report.samples_checked == 0


def test_alpha_and_beta_lookup(compression, table1):
    universe = table1.universe
    assert compression.alpha(table1, SignVector.from_token("++++", universe)) == frozenset({0, 3})
    assert compression.beta(table1, [0, 3]).token == "++++"
    with pytest.raises(UnrealizableSample):
        compression.alpha(table1, SignVector.from_token("+-+-", universe))
    with pytest.raises(UnknownImage):
        compression.beta(table1, [0, 1, 2])


def test_paper4_scheme_end_to_end(compression, paper4, paper4_scheme):
    assert paper4_scheme.declared_size == 2
    assert len(paper4_scheme.alpha) == 65
    assert max(len(v) for v in paper4_scheme.alpha.values()) <= 2
    report = compression.verify_scheme(paper4.topes, paper4_scheme, 2)
    assert report.passed, report.violations


def test_scheme_export_import(compression, paper4_scheme):
    text = compression.export_scheme(paper4_scheme)
    assert compression.import_scheme(text) == paper4_scheme
    assert compression.export_scheme(compression.import_scheme(text)) == text


def test_halfspace_scheme(service, compression):
    system = SignSystem.from_tokens(HALFSPACE)
    result = service.reconstructor.build_com_map(system, BuildSession())
    scheme = compression.build_scheme(result)
    assert scheme.declared_size == 1
    report = compression.verify_scheme(system.topes, scheme, 1)
    assert report.passed, report.violations


def test_alpha_outside_realizable_samples_is_detected(compression, paper4, table1):
    alpha = dict(table1.alpha)
    alpha[SignVector.from_token("+-+-", table1.universe)] = frozenset()
    broken = CompressionScheme(table1.universe, alpha, table1.beta, 2)
    report = compression.verify_scheme(paper4.topes, broken, 2)
    assert not report.passed
    assert "+-+-: alpha entry for an unrealizable sample" in report.violations


def test_build_scheme_rejects_invalid_map(compression, reconstructor, instance):
    result = reconstructor.build_affine_map(instance("path(3)").affine, BuildSession())
    result.table[result.graph.vertices] = frozenset({0})
    with pytest.raises(NotReconstructible) as info:
        compression.build_scheme(result)
    assert info.value.report.condition_a_failures


def test_build_scheme_requires_beta_witnesses(compression, reconstructor, instance, monkeypatch):
    result = reconstructor.build_affine_map(instance("path(3)").affine, BuildSession())
    report = reconstructor.verify_reconstructible(result)
    monkeypatch.setattr(compression.reconstructor, "verify_reconstructible", lambda _: report)
    result.witnesses.clear()
    with pytest.raises(SchemeInvalid):
        compression.build_scheme(result)


def test_build_scheme_runs_scheme_verification(compression, reconstructor, instance, monkeypatch):
    result = reconstructor.build_affine_map(instance("path(3)").affine, BuildSession())
    failing = SchemeReport(passed=False, size_bound=1, samples_checked=0, beta_entries=0, max_image_size=0,
                           violations=["forced"])
    monkeypatch.setattr(compression, "verify_scheme", lambda *args: failing)
    with pytest.raises(SchemeInvalid) as info:
        compression.build_scheme(result)
    assert info.value.report is failing


@pytest.mark.slow
@pytest.mark.parametrize("key", ["cube(2)", "unif(3,4)", "tri"])
def test_schemes_from_instances_verify(compression, reconstructor, instance, key):
    named = instance(key)
    if named.affine is not None:
        result = reconstructor.build_affine_map(named.affine, BuildSession())
        topes = named.affine.topes
    else:
        result = reconstructor.build_om_map(named.structure, BuildSession())
        topes = named.structure.topes
    scheme = compression.build_scheme(result)
    report = compression.verify_scheme(topes, scheme, result.vc)
    assert report.passed, report.violations
