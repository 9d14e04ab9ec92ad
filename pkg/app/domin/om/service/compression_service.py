from typing import Dict, FrozenSet, Iterable, Optional

from app.domin.om.models.exceptions import NotReconstructible, SchemeInvalid, UnknownImage, UnrealizableSample
from app.domin.om.models.schemas import SchemeReport
from app.domin.om.models.sign_vector import SignVector, canonical
from app.domin.om.models.structures import CompressionScheme, ReconstructibleMap, Sample
from app.domin.om.repository import scheme_repository
from app.domin.om.repository.scheme_repository import subset_key
from app.domin.om.service.reconstructor_service import ReconstructorService
from app.domin.om.service.tope_graph_service import TopeGraphService
from app.foundation.infra.logger import get_logger

logger = get_logger(__name__)


class CompressionService:
    """표본 압축 스킴 (α, β)의 생성과 검증"""

    def __init__(self, graphs: Optional[TopeGraphService] = None, reconstructor: Optional[ReconstructorService] = None):
        self.reconstructor = reconstructor or ReconstructorService(graphs=graphs)
        self.graphs = graphs or self.reconstructor.graphs

    def realizable_samples(self, topes: Iterable[SignVector]) -> FrozenSet[Sample]:
        """{s | 어떤 c ∈ T에 대해 s ≤ c}"""
        return self.graphs.samples_below(topes)

    def build_scheme(self, result: ReconstructibleMap) -> CompressionScheme:
        """α(s) = a(s가 정하는 볼록집합), β(V) = 교집합의 대표 tope

        Raises:
            NotReconstructible: 사상이 검증을 통과하지 못할 때
            SchemeInvalid: β 대표가 없거나 만든 스킴이 verify_scheme을 통과하지 못할 때
        """
        graph = result.graph
        report = self.reconstructor.verify_reconstructible(result)
        if not report.passed:
            raise NotReconstructible("cannot build a scheme from a map that fails verification", report=report)
        alpha: Dict[SignVector, FrozenSet[int]] = {}
        for sample in self.realizable_samples(graph.vertices):
            convex = self.graphs.convex_from_sample(graph, sample)
            alpha[sample] = result(convex.members)
        missing = sorted(subset_key(v) for v in set(alpha.values()) if v not in result.witnesses)
        if missing:
            raise SchemeInvalid(f"no beta witness for {', '.join(missing)}")
        beta = {image: result.witnesses[image] for image in set(alpha.values())}
        scheme = CompressionScheme(graph.ground, alpha, beta, result.vc)

        checked = self.verify_scheme(graph.vertices, scheme, result.vc)
        if not checked.passed:
            logger.error(f"생성한 스킴이 검증에 실패했습니다: {checked.violations[:5]}")
            raise SchemeInvalid("built scheme fails verification", report=checked)
        logger.info(f"스킴 생성: 표본 {len(alpha)}개, β {len(beta)}개, 크기 {checked.max_image_size} (vc {result.vc})")
        return scheme

    @staticmethod
    def alpha(scheme: CompressionScheme, sample: SignVector) -> FrozenSet[int]:
        if sample not in scheme.alpha:
            raise UnrealizableSample(f"sample {sample.token} is not in the domain of alpha")
        return scheme.alpha[sample]

    @staticmethod
    def beta(scheme: CompressionScheme, image: Iterable[int]) -> SignVector:
        image = frozenset(image)
        if image not in scheme.beta:
            raise UnknownImage(f"{subset_key(image)} is not in the domain of beta")
        return scheme.beta[image]

    def verify_scheme(self, topes: Iterable[SignVector], scheme: CompressionScheme, size: int) -> SchemeReport:
        """모든 실현 가능 표본에 대해 α(s) ⊆ s̲, |α(s)| ≤ k, s ≤ β(α(s))와 properness를 확인합니다.

        Args:
            topes: 개념류 C
            scheme: 검사할 (α, β)
            size: 크기 상한 k
        """
        topes = frozenset(topes)
        report = SchemeReport(passed=False, size_bound=size, samples_checked=0,
                              beta_entries=len(scheme.beta), max_image_size=0)
        if topes and next(iter(topes)).ground != scheme.universe:
            report.violations.append(f"universe {list(scheme.universe.names)} differs from the class ground set")
            return report

        realizable = self.realizable_samples(topes)
        for sample in canonical(realizable):
            report.samples_checked += 1
            token = sample.token
            if sample not in scheme.alpha:
                report.violations.append(f"{token}: alpha undefined")
                continue
            image = scheme.alpha[sample]
            report.max_image_size = max(report.max_image_size, len(image))
            if len(image) > size:
                report.violations.append(f"{token}: |alpha| = {len(image)} exceeds {size}")
            if not image <= sample.support:
                report.violations.append(f"{token}: alpha {subset_key(image)} leaves the support")
            concept = scheme.beta.get(image)
            if concept is None:
                report.violations.append(f"{token}: beta undefined on {subset_key(image)}")
            elif not sample <= concept:
                report.violations.append(f"{token}: not below beta{subset_key(image)} = {concept.token}")

        for sample in canonical(set(scheme.alpha) - realizable):
            report.violations.append(f"{sample.token}: alpha entry for an unrealizable sample")
        for image, concept in sorted(scheme.beta.items(), key=lambda kv: subset_key(kv[0])):
            if concept not in topes:
                report.violations.append(f"beta{subset_key(image)} = {concept.token} is not a concept of the class")
        report.passed = not report.violations
        logger.info(f"스킴 검증: {'PASS' if report.passed else 'FAIL'} ({len(report.violations)} violations)")
        return report

    @staticmethod
    def export_scheme(scheme: CompressionScheme) -> str:
        return scheme_repository.export_scheme(scheme)

    @staticmethod
    def import_scheme(text: str) -> CompressionScheme:
        return scheme_repository.import_scheme(text)
