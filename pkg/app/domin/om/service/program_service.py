from typing import Dict, List, Mapping, Optional, Tuple

from app.domin.om.models.exceptions import (
    ElementNotFound,
    EmptyPolyhedron,
    NoOptimum,
    NotGeneralPosition,
    NotOrientedMatroid,
    OrientationAmbiguous,
    Unbounded,
)
from app.domin.om.models.sign_vector import SignVector, canonical
from app.domin.om.models.structures import (
    AffineOM,
    Arc,
    CocircuitDigraph,
    CornerRecord,
    HalfArc,
    Localization,
    OrientedStructure,
    Polyhedron,
)
from app.domin.om.service.axiom_service import AxiomService
from app.domin.om.service.extension_service import ExtensionService
from app.foundation.infra.logger import get_logger

logger = get_logger(__name__)


class ProgramService:
    """아핀 OM, 방향 cocircuit 그래프, 다면체와 OM 프로그램"""

    def __init__(self, axioms: Optional[AxiomService] = None, extensions: Optional[ExtensionService] = None):
        self.axioms = axioms or AxiomService()
        self.extensions = extensions or ExtensionService(self.axioms)
        self._digraphs: Dict[tuple, CocircuitDigraph] = {}
        self._corners: Dict[tuple, CornerRecord] = {}

    def affine(self, structure: OrientedStructure, g) -> AffineOM:
        if structure.rank is None:
            raise NotOrientedMatroid("an affine oriented matroid needs an OM base")
        return AffineOM(structure, structure.ground.resolve(g))

    # 방향 그래프
    def cocircuit_digraph(self, affine: AffineOM, f) -> CocircuitDigraph:
        """아핀 cocircuit 사이의 호와 무한원 쪽 반호를 f로 방향 짓습니다.

        Args:
            affine: (M, g)
            f: 목적 원소 (g와 달라야 함)

        Raises:
            OrientationAmbiguous: 호를 방향 짓는 무한원 cocircuit가 유일하지 않을 때
        """
        f = affine.ground.resolve(f)
        if f == affine.g:
            raise ElementNotFound("objective element must differ from g")
        key = (affine.key, f)
        cached = self._digraphs.get(key)
        if cached is not None:
            return cached

        base = affine.base
        g = affine.g
        covers = self.axioms.covers(base.system)
        nodes = tuple(canonical(affine.cocircuits))
        infinity = list(affine.cocircuits_at_infinity)
        arcs: List[Arc] = []
        half_arcs: List[HalfArc] = []

        for y in canonical(affine.covectors):
            below = [x for x in covers[y] if x in base.cocircuits]
            if len(below) != 2:
                continue
            x1, x2 = canonical(below)
            s1, s2 = int(x1.sign(g)), int(x2.sign(g))
            if s1 > 0 and s2 > 0:
                z = self._orienter(x1, x2, infinity)
                arcs.append(Arc(x1, x2, y, z, int(z.sign(f))))
            elif s1 > 0 or s2 > 0:
                node, partner = (x1, x2) if s1 > 0 else (x2, x1)
                half_arcs.append(HalfArc(node, partner, y, int(partner.sign(f))))

        result = CocircuitDigraph(affine, f, nodes, tuple(arcs), tuple(half_arcs))
        self._digraphs[key] = result
        logger.debug(f"cocircuit 그래프: 노드 {len(nodes)}, 호 {len(arcs)}, 반호 {len(half_arcs)}")
        return result

    @staticmethod
    def _orienter(x1: SignVector, x2: SignVector, infinity: List[SignVector]) -> SignVector:
        # −X1, X2를 g에서 소거한 결과와 분리 집합 밖에서 일치하는 무한원 cocircuit
        target = (-x1).compose(x2)
        sep = (-x1).separator(x2)
        outside = [e for e in x1.ground.ids if e not in sep]
        found = [z for z in infinity if all(z.sign(e) == target.sign(e) for e in outside)]
        if len(found) != 1:
            raise OrientationAmbiguous(
                f"{len(found)} cocircuits at infinity orient the arc {x1.token} - {x2.token}")
        return found[0]

    # 다면체
    def polyhedron(self, affine: AffineOM, constraints: Mapping) -> Polyhedron:
        """P(S) = {X | 모든 e ∈ V에 대해 X_e ∈ {S_e, 0}}"""
        resolved: List[Tuple[int, int]] = []
        for element, sign in constraints.items():
            e = affine.ground.resolve(element)
            if e == affine.g:
                raise ElementNotFound("constraints may not mention g")
            value = int(sign) if not isinstance(sign, str) else (1 if sign == "+" else -1)
            resolved.append((e, 1 if value > 0 else -1))
        resolved.sort()
        plus = sum(1 << e for e, s in resolved if s < 0)  # S_e = −인 곳에 +가 있으면 안 됨
        minus = sum(1 << e for e, s in resolved if s > 0)
        members = frozenset(x for x in affine.covectors if not (x.masks[0] & plus) and not (x.masks[1] & minus))
        return Polyhedron(affine, tuple(resolved), members)

    def program_graph(self, digraph: CocircuitDigraph, polyhedron: Polyhedron) -> CocircuitDigraph:
        """P 안의 노드와 P에 속한 witness를 가진 호만 남긴 프로그램 그래프"""
        return CocircuitDigraph(
            digraph.affine, digraph.f,
            tuple(n for n in digraph.nodes if n in polyhedron),
            tuple(a for a in digraph.arcs if a.witness in polyhedron),
            tuple(h for h in digraph.half_arcs if h.witness in polyhedron),
        )

    def solve_program(self, affine: AffineOM, f, polyhedron: Polyhedron) -> SignVector:
        """들어오는 호가 없는 cocircuit 중 문자열 순으로 가장 작은 것"""
        if polyhedron.is_empty:
            raise EmptyPolyhedron(f"polyhedron {polyhedron.render() or '(no constraints)'} has no covectors")
        program = self.program_graph(self.cocircuit_digraph(affine, f), polyhedron)
        incoming = [h for h in program.half_arcs if h.direction < 0]
        if incoming:
            raise Unbounded(f"half-arc at {incoming[0].node.token} points into the polyhedron")
        graph = program.graph
        sources = [n for n in program.nodes if graph.in_degree(n) == 0]
        if not sources:
            raise NoOptimum(f"no cocircuit of {polyhedron.render()} has in-degree 0")
        solution = canonical(sources)[0]
        logger.debug(f"프로그램 해: {solution.token} (P={polyhedron.render()})")
        return solution

    # 해에서의 모서리
    def corner_at_solution(self, affine: AffineOM, x: SignVector, f) -> CornerRecord:
        """L̄(X)의 보조 확장에서 − 쪽 모서리. (A′, X, f)마다 한 번만 만듭니다.

        X로 들어오는 호의 cover에는 −, 나머지에는 +를 줍니다.
        """
        f = affine.ground.resolve(f)
        key = (affine.key, x, f)
        cached = self._corners.get(key)
        if cached is not None:
            return cached
        if x not in affine.cocircuits:
            raise ElementNotFound(f"{x.token} is not a cocircuit of the affine OM")
        if f not in x.support:
            raise NotGeneralPosition(f"solution {x.token} is zero at the objective element")

        digraph = self.cocircuit_digraph(affine, f)
        signs: Dict[SignVector, int] = {}
        for arc in digraph.incident(x):
            signs[arc.witness] = -1 if arc.points_into(x) else 1
        for half in digraph.half_arcs_at(x):
            signs[half.witness] = -1 if half.direction < 0 else 1

        upset = self.axioms.upset(affine.base.system, x)
        cell = self.axioms.structure(upset.system)
        assignment = {}
        for y in cell.cocircuits:
            lifted = upset.lift(y)
            if lifted not in signs:
                raise NotGeneralPosition(f"cover {lifted.token} of {x.token} is neither an arc nor a half-arc")
            assignment[y] = signs[lifted]
        localization = Localization(assignment)
        extended = self.extensions.extend_by_localization(cell, localization, cell.ground.fresh_name("e"))
        record = self.extensions.corner_from_extension(cell, extended, len(cell.ground), -1, localization)
        self._corners[key] = record
        return record
