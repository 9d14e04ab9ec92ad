import itertools
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Set, Tuple

from app.domin.om.models.exceptions import (
    ElementNotFound,
    GroundMismatch,
    InvalidLocalization,
    NoCornerFound,
    NoPeelingFound,
    NotGeneralPosition,
    NotOrientedMatroid,
    NotPartialCube,
    RecoveryFailed,
)
from app.domin.om.models.sign_vector import GroundSet, Sign, SignSystem, SignVector, canonical
from app.domin.om.models.structures import (
    CornerRecord,
    Localization,
    OrientedStructure,
    Peeling,
    PeelingStep,
    Upset,
)
from app.domin.om.service.axiom_service import AxiomService
from app.domin.om.service.tope_graph_service import TopeGraphService
from app.foundation.core.config.settings import settings
from app.foundation.infra.logger import get_logger

logger = get_logger(__name__)

LexSequence = Tuple[Tuple[int, int], ...]


def lex_sequences(ground: GroundSet) -> Iterator[LexSequence]:
    """원소 순열 × 부호 조합을 정해진 순서로 만듭니다 (+가 먼저)."""
    for order in itertools.permutations(ground.ids):
        for signs in itertools.product((1, -1), repeat=len(order)):
            yield tuple(zip(order, signs))


def perturbation_sequence(ground: GroundSet, g: int, sign: int = 1) -> LexSequence:
    """[g^sign, 나머지 원소는 id 순서로 +]"""
    return ((g, sign),) + tuple((e, 1) for e in ground.ids if e != g)


class ExtensionService:
    """단일 원소 확장, 일반 위치 판정, 모서리(corner)와 COM 코너 필링"""

    def __init__(self, axioms: Optional[AxiomService] = None, graphs: Optional[TopeGraphService] = None,
                 peel_candidates: Optional[int] = None):
        self.axioms = axioms or AxiomService()
        self.graphs = graphs or TopeGraphService(self.axioms)
        self.peel_candidates = peel_candidates if peel_candidates is not None else settings.OM_PEEL_CANDIDATES

    # 국소화
    @staticmethod
    def lex_localization(structure: OrientedStructure, sequence: Sequence[Tuple[int, int]]) -> Localization:
        """σ(Y) = s_i·Y_{e_i}, i는 Y_{e_i} ≠ 0인 첫 위치"""
        sequence = tuple((structure.ground.resolve(e), 1 if s > 0 else -1) for e, s in sequence)
        assignment: Dict[SignVector, int] = {}
        for y in structure.cocircuits:
            value = 0
            for e, s in sequence:
                if e in y.support:
                    value = s * int(y.sign(e))
                    break
            assignment[y] = value
        return Localization(assignment, sequence)

    def localization_from_deletion(self, extended: OrientedStructure, f: int) -> Tuple[OrientedStructure, Localization]:
        """M = M″∖f와, M의 cocircuit마다 원상의 f 부호를 σ로 삼은 국소화"""
        f = extended.ground.resolve(f)
        base = self.axioms.structure(self.axioms.delete(extended.system, [f]))
        preimages: Dict[SignVector, Set[int]] = {}
        for x in extended.covectors:
            preimages.setdefault(x.delete([f], base.ground), set()).add(int(x.sign(f)))
        assignment: Dict[SignVector, int] = {}
        for y in base.cocircuits:
            signs = preimages[y]
            if len(signs) != 1:
                raise InvalidLocalization(f"cocircuit {y.token} has {len(signs)} preimages in the extension")
            assignment[y] = signs.pop()
        return base, Localization(assignment)

    def extend_by_localization(self, structure: OrientedStructure, localization: Localization,
                               name: Optional[str] = None) -> OrientedStructure:
        """국소화 σ로 새 원소(마지막 id)를 붙인 covector 집합을 만들고 OM인지 검증합니다.

        Args:
            structure: 확장할 OM
            localization: cocircuit마다 부호
            name: 새 원소 이름. 없으면 "f"에서 시작하는 새 이름
        """
        missing = [y for y in structure.cocircuits if y not in localization.assignment]
        if missing:
            raise InvalidLocalization(f"localization undefined on cocircuit {canonical(missing)[0].token}")
        ground = structure.ground.with_element(name or structure.ground.fresh_name("f"))
        cocircuits = [(y.masks, localization(y)) for y in structure.cocircuits]
        vectors: Set[SignVector] = set()
        for z in structure.covectors:
            zp, zm = z.masks
            seen = set()
            for (yp, ym), s in cocircuits:
                if s and not (yp & ~zp) and not (ym & ~zm):
                    seen.add(s)
            if len(seen) == 2:
                vectors.update(z.extend(s, ground) for s in (1, -1, 0))
            else:
                vectors.add(z.extend(seen.pop() if seen else 0, ground))

        result = self.axioms.structure(SignSystem(ground, frozenset(vectors)))
        if not result.classification.is_om:
            witness = result.classification.witnesses[0] if result.classification.witnesses else ""
            raise InvalidLocalization(f"extension by {localization.describe(structure.ground)} is not an OM: {witness}")
        logger.debug(f"확장 {localization.describe(structure.ground)}: covector {len(structure.covectors)} → {len(result.covectors)}")
        return result

    def is_general_position(self, extended: OrientedStructure, f: int) -> bool:
        """f에서 0인 cocircuit X 중 X∖f가 M′∖f의 cocircuit인 것이 없으면 참"""
        if not 0 <= f < len(extended.ground):
            raise ElementNotFound(f"element id {f} not in ground set")
        base = self.axioms.delete(extended.system, [f])
        base_cocircuits = self.axioms.cocircuits(base)
        for x in extended.cocircuits:
            if f not in x.support and x.delete([f], base.ground) in base_cocircuits:
                return False
        return True

    # 모서리
    def corner_from_extension(self, structure: OrientedStructure, extended: OrientedStructure, f: int,
                              side: int, localization: Optional[Localization] = None) -> CornerRecord:
        """D = T(M) ∖ {X∖f | X ∈ T(M′), X_f = side}"""
        if extended.ground.without([f]) != structure.ground:
            raise GroundMismatch(f"extension ground {extended.ground.names} does not extend {structure.ground.names}")
        if not self.is_general_position(extended, f):
            raise NotGeneralPosition(f"element {extended.ground.names[f]} is not in general position")
        side = Sign(1 if side > 0 else -1)
        kept = frozenset(t.delete([f], structure.ground) for t in extended.topes if t.sign(f) == side)
        corner = structure.topes - kept
        remainder = structure.topes - corner
        if remainder:
            self.graphs.build(remainder)
        return CornerRecord(corner, structure, extended, f, side, localization)

    def find_corner(self, structure: OrientedStructure) -> CornerRecord:
        """정해진 순서의 LEX 국소화 중 처음으로 일반 위치인 확장의 + 쪽 모서리"""
        if structure.rank is None:
            raise NotOrientedMatroid("corners are defined for oriented matroids only")
        for sequence in lex_sequences(structure.ground):
            localization = self.lex_localization(structure, sequence)
            extended = self.extend_by_localization(structure, localization)
            f = len(structure.ground)
            if not self.is_general_position(extended, f):
                continue
            record = self.corner_from_extension(structure, extended, f, 1, localization)
            logger.info(f"모서리 발견: {localization.describe(structure.ground)}, |D|={len(record.topes)}")
            return record
        raise NoCornerFound(f"no lexicographic extension of {len(structure.ground)} elements is in general position")

    # 토프에서 covector 복원
    def covectors_from_topes(self, topes) -> SignSystem:
        """{X | 모든 T′ ∈ T에 대해 X∘T′ ∈ T, X∘−T′ ∈ T}"""
        topes = frozenset(topes)
        if not topes:
            raise RecoveryFailed("no topes to recover from")
        ground = next(iter(topes)).ground
        full = (1 << len(ground)) - 1
        plus_masks = {t.masks[0] for t in topes}
        recovered = []
        for x in self.graphs.samples_below(topes):
            xp, xm = x.masks
            support = xp | xm
            if all((xp | (tp & ~support)) in plus_masks and (xp | (~tp & full & ~support)) in plus_masks
                   for tp in plus_masks):
                recovered.append(x)
        system = SignSystem(ground, frozenset(recovered))
        classification = self.axioms.classify(system)
        if not classification.is_com:
            raise RecoveryFailed(f"recovered {len(recovered)} vectors fail the COM axioms: "
                                 f"{', '.join(classification.witnesses)}")
        return system

    # COM 코너 필링
    def maximal_cells(self, system: SignSystem) -> List[Tuple[SignVector, FrozenSet[SignVector], Upset]]:
        """극소 covector X마다 (X, T(X), L̄(X))"""
        minimal: List[SignVector] = []
        for v in sorted(system.vectors, key=lambda v: (len(v.support), v.token)):
            if not any(m <= v for m in minimal):
                minimal.append(v)
        topes = self.axioms.topes(system)
        cells = []
        for x in canonical(minimal):
            cells.append((x, frozenset(t for t in topes if x <= t), self.axioms.upset(system, x)))
        return cells

    def _cell_candidates(self, cell: OrientedStructure) -> Iterator[Tuple[Localization, OrientedStructure]]:
        if not cell.ground.names:
            return
        sequences = [perturbation_sequence(cell.ground, e, s) for e in cell.ground.ids for s in (1, -1)]
        for sequence in sequences[:self.peel_candidates]:
            localization = self.lex_localization(cell, sequence)
            try:
                extended = self.extend_by_localization(cell, localization)
            except InvalidLocalization:
                continue
            if self.is_general_position(extended, len(cell.ground)):
                yield localization, extended

    def com_corner_peeling(self, system: SignSystem) -> Peeling:
        """모서리를 하나씩 떼어 tope 전체를 분할합니다. 찾지 못하면 NoPeelingFound"""
        classification = self.axioms.classify(system)
        if not classification.is_com:
            raise NotOrientedMatroid(f"corner peeling needs an OM or COM, got {classification.verdict.value}")
        logger.info(f"코너 필링 시작: tope {len(self.axioms.topes(system))}개")
        failed: Set[FrozenSet[SignVector]] = set()
        steps = self._peel(system, failed)
        if steps is None:
            raise NoPeelingFound(f"no corner peeling found ({len(failed)} dead ends)")
        return Peeling(system, tuple(steps))

    def _peel(self, system: SignSystem, failed: Set[FrozenSet[SignVector]]) -> Optional[List[PeelingStep]]:
        topes = self.axioms.topes(system)
        if len(topes) == 1:
            (only,) = topes
            return [PeelingStep(topes, only, None, None, topes)]
        cells = self.maximal_cells(system)
        for x, cell_topes, upset in cells:
            cell = self.axioms.structure(upset.system)
            if cell.rank is None or len(cell_topes) < 2:
                continue
            for localization, extended in self._cell_candidates(cell):
                for side in (1, -1):
                    record = self.corner_from_extension(cell, extended, len(cell.ground), side, localization)
                    corner = frozenset(upset.lift(t) for t in record.topes)
                    meets = [c for c in cells if c[1] & corner]
                    if len(meets) != 1:
                        continue
                    remainder = topes - corner
                    if not remainder or remainder in failed:
                        continue
                    try:
                        self.graphs.build(remainder)
                        rest = self.covectors_from_topes(remainder)
                    except (NotPartialCube, RecoveryFailed):
                        failed.add(remainder)
                        continue
                    tail = self._peel(rest, failed)
                    if tail is not None:
                        logger.debug(f"필링 단계: cell {x.token}, |D|={len(corner)}")
                        return [PeelingStep(corner, x, record, upset, topes)] + tail
                    failed.add(remainder)
        return None
