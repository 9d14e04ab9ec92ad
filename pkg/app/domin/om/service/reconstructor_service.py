from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, List, Optional, Tuple

from app.domin.om.models.exceptions import (
    DegenerateInput,
    ImageCollision,
    NotGeneralPosition,
    NotOrientedMatroid,
    NotReconstructible,
    NotSimple,
    SearchExhausted,
)
from app.domin.om.models.schemas import ReconstructibilityReport
from app.domin.om.models.sign_vector import SignSystem, SignVector, canonical
from app.domin.om.models.structures import (
    AffineOM,
    BuildTrace,
    ConvexSet,
    CornerMap,
    CornerRecord,
    LiftFn,
    OrientedStructure,
    ProgramRecord,
    ReconstructibleMap,
    TopeGraph,
    Upset,
)
from app.domin.om.repository.scheme_repository import subset_key
from app.domin.om.service.axiom_service import AxiomService
from app.domin.om.service.extension_service import ExtensionService, perturbation_sequence
from app.domin.om.service.program_service import ProgramService
from app.domin.om.service.tope_graph_service import TopeGraphService
from app.foundation.infra.logger import get_logger

logger = get_logger(__name__)

Members = FrozenSet[SignVector]
Lookup = Callable[[Members], FrozenSet[int]]

# 모서리 사상 백트래킹의 탐색 노드 상한
_SEARCH_BUDGET = 200_000

# 크기 vc 이미지가 나와도 되는 분기
_FULL_SIZE_BRANCHES = ("corner", "case_ii", "path")


@dataclass
class BuildSession:
    """빌드 한 번 동안의 메모와 기록"""
    trace: BuildTrace = field(default_factory=BuildTrace)
    affine_maps: Dict[tuple, ReconstructibleMap] = field(default_factory=dict)
    solution_maps: Dict[tuple, Tuple[ReconstructibleMap, CornerRecord, Upset]] = field(default_factory=dict)
    programs: List[ProgramRecord] = field(default_factory=list)


class ReconstructorService:
    """재구성 가능 사상(reconstructible map) 빌더와 검증기"""

    def __init__(self, axioms: Optional[AxiomService] = None, graphs: Optional[TopeGraphService] = None,
                 extensions: Optional[ExtensionService] = None, programs: Optional[ProgramService] = None):
        self.axioms = axioms or AxiomService()
        self.graphs = graphs or TopeGraphService(self.axioms)
        self.extensions = extensions or ExtensionService(self.axioms, self.graphs)
        self.programs = programs or ProgramService(self.axioms, self.extensions)

    # 모서리 사상 b
    def build_corner_map(self, structure: OrientedStructure, record: CornerRecord,
                         graph: Optional[TopeGraph] = None, convex: Optional[List[ConvexSet]] = None) -> CornerMap:
        """D 안의 볼록집합마다 osc(C) 안의 크기 vc 분할 집합을 고릅니다.

        먼저 서로 다른 이미지로 배정을 시도하고, 불가능하면 같은 이미지를 받는 볼록집합들의
        교집합이 비지 않는 한 이미지를 공유하도록 완화합니다 (조건 (b)).

        Args:
            structure: 모서리를 가진 OM
            record: 모서리 D
            graph: structure의 tope 그래프 (이미 있으면 재사용)
            convex: graph의 볼록집합 목록 (이미 있으면 재사용)

        Raises:
            SearchExhausted: full이 아닌 볼록집합이 있거나 두 배정 모두 실패할 때
        """
        graph = graph or self.graphs.build(structure.topes, check=False)
        convex = convex if convex is not None else self.graphs.enumerate_convex_sets(graph)
        shatter = self.graphs.vc_dimension(graph)
        vc = shatter.vc
        inside = [c for c in convex if c.members <= record.topes]

        for c in inside:
            if not self.graphs.is_full(structure, c):
                raise SearchExhausted(f"convex subset {c.render()} of the corner is not full")

        pool = shatter.of_size(vc)
        options = [[v for v in pool if v <= c.osc] for c in inside]
        for c, opts in zip(inside, options):
            if not opts:
                raise SearchExhausted(f"no shattered {vc}-set inside osc of {c.render()}")

        chosen = self._assign_images(inside, options, shared=False)
        if chosen is None:
            logger.info(f"모서리 볼록집합 {len(inside)}개에 서로 다른 이미지가 부족해 공유 배정으로 전환합니다")
            chosen = self._assign_images(inside, options, shared=True)
        if chosen is None:
            raise SearchExhausted(f"no image assignment for {len(inside)} convex subsets of the corner")
        table = {c.members: v for c, v in zip(inside, chosen)}
        return CornerMap(record, table, vc)

    @staticmethod
    def _assign_images(inside: List[ConvexSet], options: List[List[FrozenSet[int]]],
                       shared: bool) -> Optional[List[FrozenSet[int]]]:
        # 이미지별로 지금까지 받은 볼록집합들의 공통 tope
        common: Dict[FrozenSet[int], Members] = {}
        chosen: List[FrozenSet[int]] = []
        budget = [_SEARCH_BUDGET]

        def assign(i: int) -> bool:
            if i == len(inside):
                return True
            budget[0] -= 1
            if budget[0] < 0:
                return False
            members = inside[i].members
            for v in options[i]:
                previous = common.get(v)
                if previous is None:
                    narrowed = members
                elif not shared:
                    continue
                else:
                    narrowed = previous & members
                    if not narrowed:
                        continue
                common[v] = narrowed
                chosen.append(v)
                if assign(i + 1):
                    return True
                chosen.pop()
                if previous is None:
                    del common[v]
                else:
                    common[v] = previous
            return False

        return chosen if assign(0) else None

    # 결합
    def _combine(self, graph: TopeGraph, convex: List[ConvexSet], corner: Members, inner: Lookup,
                 corner_lookup: Lookup, vc: int, labels: Tuple[str, str], strict: bool):
        table: Dict[Members, FrozenSet[int]] = {}
        branches: Dict[Members, str] = {}
        for c in convex:
            part = c.members - corner
            if part:
                image = inner(part)
                if strict and len(image) >= vc:
                    raise ImageCollision(f"inner image {subset_key(image)} of {c.render()} reaches size {vc}")
                branches[c.members] = labels[0]
            else:
                image = corner_lookup(c.members)
                branches[c.members] = labels[1]
            table[c.members] = image
        return table, branches

    def _new_map(self, graph: TopeGraph, convex: List[ConvexSet], vc: int, table, branches,
                 session: BuildSession, unique=None) -> ReconstructibleMap:
        return ReconstructibleMap(graph, table, {c.members: c for c in convex}, vc,
                                  branches=branches, trace=session.trace, programs=session.programs,
                                  unique_cocircuits=dict(unique or {}))

    def extend_map(self, structure: OrientedStructure, record: CornerRecord, inner: ReconstructibleMap,
                   lift: LiftFn, session: Optional[BuildSession] = None) -> ReconstructibleMap:
        """G∖D 위의 사상을 G 전체로 넓힙니다. C가 G∖D와 만나면 안쪽 사상, 아니면 모서리 사상"""
        session = session or BuildSession()
        graph = self.graphs.build(structure.topes, check=False)
        convex = self.graphs.enumerate_convex_sets(graph)
        corner_map = self.build_corner_map(structure, record, graph, convex)
        vc = corner_map.vc

        def inner_lookup(part: Members) -> FrozenSet[int]:
            lifted = frozenset(lift(t) for t in part)
            if lifted not in inner.table:
                raise ImageCollision(f"inner map is undefined on a lifted set of {len(part)} topes")
            return inner.ground.translate(inner.table[lifted], graph.ground)

        table, branches = self._combine(graph, convex, record.topes, inner_lookup,
                                        lambda m: corner_map.table[m], vc, ("inner", "corner"), True)
        unique = {inner.ground.translate(v, graph.ground): xs for v, xs in inner.unique_cocircuits.items()}
        return self._new_map(graph, convex, vc, table, branches, session, unique)

    # 아핀 OM
    def build_affine_map(self, affine: AffineOM, session: Optional[BuildSession] = None) -> ReconstructibleMap:
        """아핀 OM의 tope 그래프 위 재구성 가능 사상 (vc에 대한 귀납)"""
        session = session or BuildSession()
        cached = session.affine_maps.get(affine.key)
        if cached is not None:
            return cached

        graph = self.graphs.build(affine.topes)
        convex = self.graphs.enumerate_convex_sets(graph)
        vc = self.graphs.vc_dimension(graph).vc
        unique = {}
        if vc == 0:
            table = {c.members: frozenset() for c in convex}
            branches = {c.members: "base" for c in convex}
        elif vc == 1:
            table, branches = self._path_map(graph, convex)
        else:
            table, branches, unique = self._affine_step(affine, graph, convex, vc, session)
        result = self._new_map(graph, convex, vc, table, branches, session, unique)
        session.affine_maps[affine.key] = result
        return result

    @staticmethod
    def _path_map(graph: TopeGraph, convex: List[ConvexSet]):
        # 기준 꼭짓점에서 C를 가르는 경계 원소
        base = canonical(graph.vertices)[0]
        table, branches = {}, {}
        for c in convex:
            if base in c.members:
                table[c.members] = frozenset()
            else:
                facing = [e for e in sorted(c.osc) if base.sign(e) != c.side(e)]
                table[c.members] = frozenset(facing[:1])
            branches[c.members] = "path"
        return table, branches

    def _affine_step(self, affine: AffineOM, graph: TopeGraph, convex: List[ConvexSet], vc: int,
                     session: BuildSession):
        base = affine.base
        g = affine.g
        localization = self.extensions.lex_localization(base, perturbation_sequence(base.ground, g, 1))
        extended = self.extensions.extend_by_localization(base, localization)
        f = len(base.ground)
        if not self.extensions.is_general_position(extended, f):
            raise NotGeneralPosition(f"perturbation {localization.describe(base.ground)} is not in general position")
        a_prime = AffineOM(extended, g)

        h1 = frozenset(t.delete([f], base.ground) for t in extended.topes if t.sign(f) < 0 and t.sign(g) > 0)
        contracted = self.axioms.structure(self.axioms.contract(extended.system, f))
        a_second = AffineOM(contracted, g)
        if a_second.topes != h1:
            raise NotGeneralPosition("negative side of the perturbation differs from the contraction's affine topes")
        inner = self.build_affine_map(a_second, session)

        table: Dict[Members, FrozenSet[int]] = {}
        branches: Dict[Members, str] = {}
        for c in convex:
            part = c.members & h1
            if part:
                image = inner.ground.translate(inner(part), graph.ground)
                if len(image) >= vc:
                    raise ImageCollision(f"case (i) image {subset_key(image)} reaches size {vc}")
                table[c.members] = image
                branches[c.members] = "case_i"
                continue
            table[c.members] = self._solve_case(a_prime, f, c, graph, session)
            branches[c.members] = "case_ii"

        session.trace.add("branch", vc=vc, topes=len(graph), case_i=sum(1 for b in branches.values() if b == "case_i"),
                          case_ii=sum(1 for b in branches.values() if b == "case_ii"))
        unique = self._uniqueness(a_prime, {v for v in table.values() if len(v) == vc})
        return table, branches, unique

    def _solve_case(self, a_prime: AffineOM, f: int, c: ConvexSet, graph: TopeGraph,
                    session: BuildSession) -> FrozenSet[int]:
        polyhedron = self.programs.polyhedron(a_prime, c.sides)
        session.trace.add("program", constraints=polyhedron.render() or "-", f=a_prime.ground.names[f])
        x = self.programs.solve_program(a_prime, f, polyhedron)
        if x.sign(f) <= 0:
            raise NotGeneralPosition(f"solution {x.token} is not on the positive side of the objective")
        session.trace.add("solution", vector=x.token, f=x.sign(f).char)

        b_x, corner, upset = self._solution_map(a_prime, x, f, session)
        restricted = frozenset(upset.drop(t) for t in polyhedron.topes if x <= t)
        record = ProgramRecord(polyhedron.render(), x, corner.topes, restricted, id(b_x))
        session.programs.append(record)
        if not record.inclusion_holds:
            logger.warning(f"P(S) ∩ T(X)가 모서리 밖으로 나갑니다: {x.token}")
        return b_x.ground.translate(b_x(restricted), graph.ground)

    def _solution_map(self, a_prime: AffineOM, x: SignVector, f: int, session: BuildSession):
        key = (a_prime.key, x)
        cached = session.solution_maps.get(key)
        if cached is not None:
            session.trace.add("cache", solution=x.token, status="hit")
            return cached
        session.trace.add("cache", solution=x.token, status="miss")

        corner = self.programs.corner_at_solution(a_prime, x, f)
        cell = corner.base
        e = corner.new_element
        session.trace.add("corner", elements=len(cell.ground), size=len(corner.topes),
                          localization=corner.localization.describe(cell.ground) if corner.localization else "-",
                          side=corner.side.char)
        reoriented = self.axioms.structure(self.axioms.reorient(corner.extension.system, e))
        inner = self.build_affine_map(AffineOM(reoriented, e), session)
        ground = reoriented.ground
        b_x = self.extend_map(cell, corner, inner, lambda t: t.extend(1, ground), session)
        upset = self.axioms.upset(a_prime.base.system, x)
        session.solution_maps[key] = (b_x, corner, upset)
        return session.solution_maps[key]

    def _uniqueness(self, a_prime: AffineOM, images) -> Dict[FrozenSet[int], Tuple[SignVector, ...]]:
        """크기 vc 이미지 V마다 T(X)가 V를 분할하는 A′의 cocircuit X들"""
        result = {}
        topes = a_prime.base.topes
        cells = {x: [t for t in topes if x <= t] for x in a_prime.cocircuits}
        for v in sorted(images, key=sorted):
            result[v] = tuple(canonical(x for x, ts in cells.items() if self.graphs.shatters(ts, v)))
            if len(result[v]) != 1:
                logger.warning(f"이미지 {subset_key(v)}를 분할하는 cocircuit가 {len(result[v])}개입니다")
        return result

    # OM / COM
    def build_om_map(self, structure: OrientedStructure, session: Optional[BuildSession] = None) -> ReconstructibleMap:
        """모서리를 자르고 나머지 아핀 OM의 사상을 넓힌 뒤 전체를 검증합니다."""
        if structure.rank is None:
            raise NotOrientedMatroid(f"expected an OM, got {structure.classification.verdict.value}")
        if not structure.classification.is_simple:
            raise NotSimple("reconstructible maps are built for simple OMs only")
        if structure.rank == 0:
            raise DegenerateInput("tope graph has VC-dimension 0")
        session = session or BuildSession()
        logger.info(f"OM 사상 빌드 시작: |U|={len(structure.ground)}, rank={structure.rank}")

        record = self.extensions.find_corner(structure)
        session.trace.add("corner", elements=len(structure.ground), size=len(record.topes),
                          localization=record.localization.describe(structure.ground), side=record.side.char)
        extended = record.extension
        inner = self.build_affine_map(AffineOM(extended, record.new_element), session)
        ground = extended.ground
        result = self.extend_map(structure, record, inner, lambda t: t.extend(1, ground), session)
        self._require(result)
        return result

    def build_com_map(self, system: SignSystem, session: Optional[BuildSession] = None) -> ReconstructibleMap:
        """코너 필링을 안쪽부터 되감으며 사상을 쌓습니다."""
        session = session or BuildSession()
        peeling = self.extensions.com_corner_peeling(system)
        logger.info(f"COM 사상 빌드: 필링 {len(peeling)}단계")
        last = peeling.steps[-1]
        graph = self.graphs.build(last.stage)
        convex = self.graphs.enumerate_convex_sets(graph)
        current = self._new_map(graph, convex, 0, {c.members: frozenset() for c in convex},
                                {c.members: "base" for c in convex}, session)

        for step in reversed(peeling.steps[:-1]):
            graph = self.graphs.build(step.stage)
            convex = self.graphs.enumerate_convex_sets(graph)
            vc = self.graphs.vc_dimension(graph).vc
            corner_map = self.build_corner_map(step.corner.base, step.corner)
            upset = step.upset
            remainder = step.stage - step.topes
            for image in corner_map.table.values():
                lifted = frozenset(upset.kept[i] for i in image)
                if self.graphs.shatters(remainder, lifted):
                    raise ImageCollision(f"corner image {subset_key(lifted)} is shattered by the remainder")
            session.trace.add("corner", elements=len(step.corner.base.ground), size=len(step.topes),
                              localization=step.corner.localization.describe(step.corner.base.ground),
                              side=step.corner.side.char)

            def corner_lookup(members: Members, cmap=corner_map, up=upset) -> FrozenSet[int]:
                image = cmap.table[frozenset(up.drop(t) for t in members)]
                return frozenset(up.kept[i] for i in image)

            table, branches = self._combine(graph, convex, step.topes, current, corner_lookup, vc,
                                            ("stage", "peel"), False)
            bounds = {m: current.vc for m, b in branches.items() if b == "stage"}
            current = self._new_map(graph, convex, vc, table, branches, session)
            current.bounds.update(bounds)

        self._require(current)
        return current

    def _require(self, result: ReconstructibleMap) -> None:
        report = self.verify_reconstructible(result)
        if not report.passed:
            logger.error(f"재구성 가능 사상 검증 실패: {report.model_dump(exclude_defaults=True)}")
            raise NotReconstructible("built map fails verification", report=report)

    # 검증
    def verify_reconstructible(self, result: ReconstructibleMap) -> ReconstructibilityReport:
        """조건 (a), (b)와 분할/크기/층위/유일성/포함/캐시 검사를 모두 수행합니다."""
        graph = result.graph
        convex = self.graphs.enumerate_convex_sets(graph)
        names = graph.ground.names

        def show(v: FrozenSet[int]) -> str:
            return "{" + ",".join(names[e] for e in sorted(v)) + "}"

        report = ReconstructibilityReport(passed=False, vc=result.vc, convex_sets=len(convex), images=0)
        groups: Dict[FrozenSet[int], List[ConvexSet]] = {}
        for c in convex:
            if c.members not in result.table:
                report.condition_a_failures.append(f"{c.render()}: undefined")
                continue
            image = result.table[c.members]
            groups.setdefault(image, []).append(c)
            if not image <= c.osc:
                report.condition_a_failures.append(f"{c.render()} -> {show(image)}")
            if len(image) > result.vc:
                report.oversized_images.append(f"{c.render()} -> {show(image)}")
            branch = result.branches.get(c.members)
            if branch == "stage":
                if len(image) > result.bounds.get(c.members, result.vc):
                    report.stratification_failures.append(f"{c.render()} -> {show(image)} via {branch}")
            elif result.vc and len(image) == result.vc and branch not in _FULL_SIZE_BRANCHES + ("peel",):
                report.stratification_failures.append(f"{c.render()} -> {show(image)} via {branch}")

        report.images = len(groups)
        result.witnesses.clear()
        for image in sorted(groups, key=lambda v: (len(v), sorted(v))):
            common = frozenset.intersection(*(c.members for c in groups[image]))
            if not common:
                report.condition_b_failures.append(show(image))
            else:
                witness = canonical(common)[0]
                result.witnesses[image] = witness
                report.witnesses[show(image)] = witness.token
            if not self.graphs.shatters(graph.vertices, image):
                report.unshattered_images.append(show(image))

        for image, xs in result.unique_cocircuits.items():
            if len(xs) != 1:
                report.uniqueness_failures.append(f"{show(image)}: {len(xs)} cocircuits")
        by_solution: Dict[SignVector, set] = {}
        for program in result.programs:
            by_solution.setdefault(program.solution, set()).add(program.corner_map_id)
            if not program.inclusion_holds:
                report.inclusion_failures.append(f"{program.constraints} at {program.solution.token}")
        report.cache_identity = all(len(ids) == 1 for ids in by_solution.values())

        report.passed = not (report.condition_a_failures or report.condition_b_failures
                             or report.unshattered_images or report.oversized_images
                             or report.stratification_failures or report.uniqueness_failures
                             or report.inclusion_failures) and report.cache_identity
        return report

    @staticmethod
    def render_trace(result: ReconstructibleMap) -> str:
        return result.trace.render()
