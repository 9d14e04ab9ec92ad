import re
from typing import Dict, List, Mapping, Optional, Tuple

from app.domin.om.models.exceptions import (
    DegenerateInput,
    NotOrientedMatroid,
    NotPartialCube,
    NotReconstructible,
    RecoveryFailed,
    UsageError,
)
from app.domin.om.models.schemas import (
    ClassificationReport,
    CornerReport,
    PeelingReport,
    PeelingStepReport,
    ProgramReport,
    SchemeReport,
    ShatterReport,
    StructureReport,
)
from app.domin.om.models.sign_vector import canonical
from app.domin.om.models.structures import AffineOM, CompressionScheme, NamedInstance, OrientedStructure, ReconstructibleMap
from app.domin.om.repository import sign_system_repository
from app.domin.om.repository.sign_system_repository import SvDocument
from app.domin.om.service.arrangement_service import ArrangementService
from app.domin.om.service.axiom_service import AxiomService
from app.domin.om.service.compression_service import CompressionService
from app.domin.om.service.extension_service import ExtensionService
from app.domin.om.service.program_service import ProgramService
from app.domin.om.service.reconstructor_service import BuildSession, ReconstructorService
from app.domin.om.service.tope_graph_service import TopeGraphService
from app.foundation.infra.logger import get_logger

logger = get_logger(__name__)

_MATRIX_HEADER = re.compile(r"^\s*\d+\s+\d+\s*$")


class OmService:
    def __init__(self, max_universe: Optional[int] = None):
        """서비스 초기화. 하위 서비스들은 하나의 AxiomService 캐시를 공유합니다."""
        self.axioms = AxiomService()
        self.graphs = TopeGraphService(self.axioms, max_universe)
        self.extensions = ExtensionService(self.axioms, self.graphs)
        self.programs = ProgramService(self.axioms, self.extensions)
        self.reconstructor = ReconstructorService(self.axioms, self.graphs, self.extensions, self.programs)
        self.compression = CompressionService(self.graphs, self.reconstructor)
        self.arrangements = ArrangementService(self.axioms, self.graphs.max_universe)

    # 입력
    def load(self, text: str, format: str = "auto", g: Optional[str] = None) -> SvDocument:
        """.sv 또는 유리수 행렬 텍스트를 읽습니다. format=auto면 첫 줄이 `d n`인지로 판단합니다."""
        if format == "auto":
            first = next((line.split("#", 1)[0] for line in text.splitlines() if line.split("#", 1)[0].strip()), "")
            format = "matrix" if _MATRIX_HEADER.match(first) else "sv"
        if format == "matrix":
            matrix = sign_system_repository.parse_matrix(text)
            document = SvDocument(self.arrangements.om_from_vectors(matrix).system)
        elif format == "sv":
            document = sign_system_repository.parse_document(text)
        else:
            raise UsageError(f"unknown input format {format!r}")
        if g is not None:
            document.system.ground.index(g)
            document = SvDocument(document.system, g, document.duplicates)
        return document

    def structure(self, document: SvDocument) -> OrientedStructure:
        return self.axioms.structure(document.system)

    def affine(self, document: SvDocument) -> Optional[AffineOM]:
        if document.g is None:
            return None
        return self.programs.affine(self.structure(document), document.g)

    def concept_class(self, document: SvDocument) -> frozenset:
        """g가 있으면 g=+ topes, 없으면 전체 topes"""
        affine = self.affine(document)
        return affine.topes if affine is not None else self.structure(document).topes

    # 보고서
    def classify(self, document: SvDocument) -> ClassificationReport:
        logger.info(f"분류 시작: {len(document.system)} vectors")
        c = self.structure(document).classification
        return ClassificationReport(
            elements=list(document.system.ground.names), vectors=len(document.system),
            satisfies_C=c.satisfies_C, satisfies_SE=c.satisfies_SE, satisfies_Sym=c.satisfies_Sym,
            satisfies_FS=c.satisfies_FS, is_simple=c.is_simple, verdict=c.verdict.value,
            witnesses=list(c.witnesses),
        )

    def _structure_report(self, document: SvDocument, **fields) -> StructureReport:
        structure = self.structure(document)
        return StructureReport(elements=list(structure.ground.names),
                               verdict=structure.classification.verdict.value, **fields)

    def topes(self, document: SvDocument) -> StructureReport:
        return self._structure_report(document, topes=[t.token for t in canonical(self.concept_class(document))])

    def cocircuits(self, document: SvDocument) -> StructureReport:
        affine = self.affine(document)
        found = affine.cocircuits if affine is not None else self.structure(document).cocircuits
        return self._structure_report(document, cocircuits=[x.token for x in canonical(found)])

    def rank(self, document: SvDocument) -> StructureReport:
        structure = self.structure(document)
        if structure.rank is None:
            raise NotOrientedMatroid(f"rank is defined for oriented matroids, got {structure.classification.verdict.value}")
        affine = self.affine(document)
        witness = self.axioms.deletion_to_cube(structure)
        names = structure.ground.names
        return self._structure_report(
            document, rank=structure.rank,
            affine_rank=affine.rank if affine is not None else None,
            cube_witness=[names[e] for e in sorted(witness)] if witness is not None else None,
        )

    def vc(self, document: SvDocument) -> ShatterReport:
        graph = self.graphs.build(self.concept_class(document))
        record = self.graphs.vc_dimension(graph)
        names = graph.ground.names
        largest = record.of_size(record.vc)
        shattered = sorted(record.shattered_sets, key=lambda s: (len(s), sorted(s)))
        return ShatterReport(elements=list(names), vc=record.vc,
                             largest=[names[e] for e in sorted(largest[0])] if largest else [],
                             shattered=[[names[e] for e in sorted(s)] for s in shattered])

    # 프로그램
    def solve_program(self, document: SvDocument, g: str, f: str, constraints: Mapping[str, str]) -> ProgramReport:
        """(M, g), 목적 원소 f, 제약 S의 OM 프로그램을 풉니다."""
        structure = self.structure(document)
        affine = self.programs.affine(structure, g)
        polyhedron = self.programs.polyhedron(affine, constraints)
        solution = self.programs.solve_program(affine, f, polyhedron)
        digraph = self.programs.cocircuit_digraph(affine, f)
        program = self.programs.program_graph(digraph, polyhedron)
        names = structure.ground.names
        return ProgramReport(
            elements=list(names), g=g, f=f,
            constraints={names[e]: "+" if s > 0 else "-" for e, s in polyhedron.constraints},
            solution=solution.token, nodes=len(program.nodes), arcs=len(program.arcs),
            half_arcs=len(program.half_arcs), in_degree=program.graph.in_degree(solution),
        )

    # 모서리 / 필링
    def corner(self, document: SvDocument) -> CornerReport:
        record = self.extensions.find_corner(self.structure(document))
        ext = record.extension
        isometric = True
        if record.remainder:
            try:
                self.graphs.build(record.remainder)
            except NotPartialCube as e:
                logger.warning(f"모서리를 뗀 나머지가 등거리 부분그래프가 아닙니다: {e}")
                isometric = False
        return CornerReport(
            elements=list(record.base.ground.names), new_element=ext.ground.names[record.new_element],
            side=record.side.char,
            localization=record.localization.describe(record.base.ground) if record.localization else "EXPLICIT",
            corner=[t.token for t in canonical(record.topes)],
            remainder=[t.token for t in canonical(record.remainder)],
            general_position=self.extensions.is_general_position(ext, record.new_element),
            remainder_isometric=isometric,
        )

    def peel(self, document: SvDocument) -> PeelingReport:
        peeling = self.extensions.com_corner_peeling(self._com_system(document))
        steps = [PeelingStepReport(cell=s.cell.token, corner=[t.token for t in canonical(s.topes)])
                 for s in peeling.steps]
        return PeelingReport(found=True, steps=steps)

    def _com_system(self, document: SvDocument):
        structure = self.structure(document)
        if structure.classification.is_com:
            return document.system
        # tope만 주어진 개념류
        logger.info("COM 공리를 만족하지 않아 topes에서 covector를 복원합니다")
        return self.extensions.covectors_from_topes(structure.topes)

    # 사상 / 스킴
    def build_map(self, document: SvDocument, session: Optional[BuildSession] = None) -> ReconstructibleMap:
        """g가 있으면 아핀 사상, OM이면 모서리 사상, 그 밖에는 COM 코너 필링 사상"""
        session = session or BuildSession()
        structure = self.structure(document)
        affine = self.affine(document)
        if affine is not None:
            if not affine.topes:
                raise DegenerateInput(f"no tope is positive at {document.g}")
            result = self.reconstructor.build_affine_map(affine, session)
            report = self.reconstructor.verify_reconstructible(result)
            if not report.passed:
                raise NotReconstructible("affine map fails verification", report=report)
            return result
        if structure.classification.is_om:
            return self.reconstructor.build_om_map(structure, session)
        try:
            system = self._com_system(document)
        except RecoveryFailed as e:
            raise NotOrientedMatroid(f"input is neither an OM, an affine OM nor a COM: {e}")
        return self.reconstructor.build_com_map(system, session)

    def build_scheme(self, document: SvDocument) -> Tuple[CompressionScheme, str]:
        """(스킴, 빌드 기록 텍스트)"""
        logger.info(f"스킴 빌드 시작: |U|={len(document.system.ground)}")
        result = self.build_map(document)
        scheme = self.compression.build_scheme(result)
        return scheme, self.reconstructor.render_trace(result)

    def verify_scheme(self, document: SvDocument, scheme_text: str, size: int) -> SchemeReport:
        scheme = self.compression.import_scheme(scheme_text)
        return self.compression.verify_scheme(self.concept_class(document), scheme, size)

    # 인스턴스
    def instance(self, key: str) -> NamedInstance:
        return self.arrangements.named_instance(key)

    def instance_texts(self, keys: List[str], matrix: bool = False) -> Dict[str, Dict[str, str]]:
        """키마다 {"sv": ..., "matrix": ...} 텍스트"""
        result = {}
        for key in keys:
            instance = self.instance(key)
            g = instance.affine.ground.names[instance.affine.g] if instance.affine is not None else None
            texts = {"sv": sign_system_repository.serialize_system(instance.structure.system, g)}
            if matrix:
                texts["matrix"] = sign_system_repository.serialize_matrix(instance.matrix)
            result[key] = texts
        logger.info(f"인스턴스 {len(result)}개 생성")
        return result

    @staticmethod
    def instance_keys() -> List[str]:
        return ArrangementService.instance_keys()

    @staticmethod
    def instance_filename(key: str) -> str:
        """cycle(5) → cycle_5, unif(3,5) → unif_3_5"""
        return re.sub(r"_+", "_", re.sub(r"[^\w]", "_", key)).strip("_")

    @staticmethod
    def parse_constraints(text: Optional[str]) -> Dict[str, str]:
        """`e=+,f=-` 형식"""
        result: Dict[str, str] = {}
        if not text:
            return result
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            name, sep, sign = part.partition("=")
            sign = sign.strip()
            if not sep or sign not in ("+", "-") or not name.strip():
                raise UsageError(f"constraint {part!r} must look like e=+ or e=-")
            result[name.strip()] = sign
        return result
