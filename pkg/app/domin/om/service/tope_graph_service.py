from collections import deque
from typing import Dict, FrozenSet, Iterable, List, Optional, Set

import networkx as nx

from app.domin.om.models.exceptions import (
    GroundMismatch,
    NotOrientedMatroid,
    NotPartialCube,
    UniverseTooLarge,
    UnrealizableSample,
)
from app.domin.om.models.sign_vector import GroundSet, SignVector, canonical
from app.domin.om.models.structures import ConvexSet, OrientedStructure, ShatterRecord, TopeGraph
from app.domin.om.service.axiom_service import AxiomService
from app.foundation.core.config.settings import settings
from app.foundation.infra.logger import get_logger

logger = get_logger(__name__)


class TopeGraphService:
    """tope 그래프(부분 큐브)와 볼록집합, VC 차원"""

    def __init__(self, axioms: Optional[AxiomService] = None, max_universe: Optional[int] = None):
        self.axioms = axioms or AxiomService()
        self.max_universe = max_universe if max_universe is not None else settings.OM_MAX_UNIVERSE

    def _guard(self, ground: GroundSet) -> None:
        if len(ground) > self.max_universe:
            raise UniverseTooLarge(f"|U| = {len(ground)} exceeds the enumeration cap {self.max_universe}")

    # 그래프
    def build(self, topes: Iterable[SignVector], check: bool = True) -> TopeGraph:
        """한 좌표만 다른 tope끼리 잇고, 그래프 거리 = 해밍 거리를 확인합니다.

        Args:
            topes: 같은 원소 집합 위의 full-support 벡터들
            check: False면 부분 큐브 검사를 건너뜁니다 (이미 검증된 부분그래프용)
        """
        vertices = frozenset(topes)
        if not vertices:
            raise NotPartialCube("tope graph needs at least one vertex")
        ground = next(iter(vertices)).ground
        by_mask: Dict[int, SignVector] = {}
        for v in vertices:
            if v.ground != ground:
                raise GroundMismatch(f"vertex {v.token} lives on another ground set")
            if not v.is_tope:
                raise NotPartialCube(f"vertex {v.token} does not have full support", witness=v)
            by_mask[v.masks[0]] = v

        graph = nx.Graph()
        graph.add_nodes_from(vertices)
        for plus, v in by_mask.items():
            for e in ground.ids:
                flipped = plus ^ (1 << e)
                if flipped > plus and flipped in by_mask:
                    graph.add_edge(v, by_mask[flipped], element=e)

        result = TopeGraph(ground, vertices, graph)
        if check:
            self._check_isometry(result)
        return result

    @staticmethod
    def _check_isometry(graph: TopeGraph) -> None:
        lengths = dict(nx.all_pairs_shortest_path_length(graph.graph))
        for u in canonical(graph.vertices):
            reach = lengths[u]
            for v in graph.vertices:
                hamming = bin(u.masks[0] ^ v.masks[0]).count("1")
                if reach.get(v) != hamming:
                    raise NotPartialCube(
                        f"distance {reach.get(v)} between {u.token} and {v.token} differs from Hamming {hamming}",
                        witness=(u, v))

    def induced(self, graph: TopeGraph, vertices: Iterable[SignVector], check: bool = True) -> TopeGraph:
        vertices = frozenset(vertices)
        missing = vertices - graph.vertices
        if missing:
            raise NotPartialCube(f"{len(missing)} vertices are not in the graph", witness=min(missing, key=str))
        sub = TopeGraph(graph.ground, vertices, graph.graph.subgraph(vertices).copy())
        if check:
            self._check_isometry(sub)
        return sub

    def project(self, graph: TopeGraph, elements: Iterable[int]) -> TopeGraph:
        """주어진 원소를 지운 tope들의 그래프"""
        drop = frozenset(elements)
        ground = graph.ground.without(drop)
        return self.build({v.delete(drop, ground) for v in graph.vertices})

    # 볼록집합
    def convex_from_members(self, graph: TopeGraph, members: Iterable[SignVector]) -> ConvexSet:
        members = frozenset(members)
        osc: Set[int] = set()
        cross: Set[int] = set()
        for u, v, data in graph.graph.edges(data=True):
            inside = (u in members) + (v in members)
            if inside == 2:
                cross.add(data["element"])
            elif inside == 1:
                osc.add(data["element"])
        plus = minus = -1
        for m in members:
            plus &= m.masks[0]
            minus &= m.masks[1]
        full = (1 << len(graph.ground)) - 1
        signature = SignVector.from_masks(plus & full, minus & full, graph.ground)
        return ConvexSet(members, frozenset(osc), frozenset(cross), signature)

    def convex_from_sample(self, graph: TopeGraph, sample: SignVector) -> ConvexSet:
        """s가 정하는 반공간들의 교집합 {c | s ≤ c}"""
        sp, sm = sample.masks
        members = frozenset(c for c in graph.vertices
                            if not (sp & ~c.masks[0]) and not (sm & ~c.masks[1]))
        if not members:
            raise UnrealizableSample(f"sample {sample.token} is not realized by any vertex")
        return self.convex_from_members(graph, members)

    def enumerate_convex_sets(self, graph: TopeGraph) -> List[ConvexSet]:
        """반공간 교집합 전체를 너비 우선으로 열거합니다. 크기 내림차순, 문자열 순으로 반환합니다."""
        self._guard(graph.ground)
        elements = sorted(graph.varying)
        start = graph.vertices
        seen: Set[FrozenSet[SignVector]] = {start}
        queue = deque([start])
        while queue:
            current = queue.popleft()
            for e in elements:
                bit = 1 << e
                plus = frozenset(v for v in current if v.masks[0] & bit)
                for part in (plus, current - plus):
                    if part and part != current and part not in seen:
                        seen.add(part)
                        queue.append(part)
        result = sorted((self.convex_from_members(graph, m) for m in seen), key=lambda c: c.sort_key)
        logger.debug(f"볼록집합 {len(result)}개 열거 (|V|={len(graph)})")
        return result

    def is_convex(self, graph: TopeGraph, vertices: Iterable[SignVector]) -> bool:
        """모든 최단 경로가 집합 안에 머무는지 (구간 검사)"""
        members = frozenset(vertices)
        if not members <= graph.vertices:
            return False
        items = list(members)
        for i, u in enumerate(items):
            for v in items[i + 1:]:
                agree = ~(u.masks[0] ^ v.masks[0])
                pattern = u.masks[0] & agree
                for w in graph.vertices:
                    if w.masks[0] & agree == pattern and w not in members:
                        return False
        return True

    def samples_below(self, topes: Iterable[SignVector]) -> FrozenSet[SignVector]:
        """{s | 어떤 tope c에 대해 s ≤ c}: 각 tope의 좌표를 0으로 지우는 모든 방법"""
        topes = list(topes)
        if not topes:
            return frozenset()
        ground = topes[0].ground
        self._guard(ground)
        full = (1 << len(ground)) - 1
        found: Set[tuple] = set()
        for t in topes:
            plus, minus = t.masks
            zeros = full
            while True:
                found.add((plus & ~zeros, minus & ~zeros))
                if zeros == 0:
                    break
                zeros = (zeros - 1) & full
        return frozenset(SignVector.from_masks(p, m, ground) for p, m in found)

    # 분할(shattering)
    @staticmethod
    def shatters(vertices: Iterable[SignVector], elements: Iterable[int]) -> bool:
        elements = sorted(elements)
        mask = sum(1 << e for e in elements)
        patterns = {v.masks[0] & mask for v in vertices}
        return len(patterns) == 1 << len(elements)

    def vc_dimension(self, graph: TopeGraph) -> ShatterRecord:
        """크기별로 분할 집합을 키워 가는 Apriori식 전수 탐색"""
        self._guard(graph.ground)
        elements = sorted(graph.varying)
        level: List[FrozenSet[int]] = [frozenset()]
        shattered: Set[FrozenSet[int]] = {frozenset()}
        while level:
            following: List[FrozenSet[int]] = []
            for base in level:
                top = max(base, default=-1)
                for e in elements:
                    if e <= top:
                        continue
                    candidate = base | {e}
                    if all(candidate - {x} in shattered for x in base):
                        if self.shatters(graph.vertices, candidate):
                            following.append(candidate)
            shattered.update(following)
            level = following
        vc = max(len(s) for s in shattered)
        return ShatterRecord(frozenset(shattered), vc)

    def is_full(self, structure: OrientedStructure, convex: ConvexSet) -> bool:
        """M ∖ cross(C)가 M과 같은 rank를 가지는지"""
        if structure.rank is None:
            raise NotOrientedMatroid("fullness is defined for oriented matroids only")
        reduced = self.axioms.delete(structure.system, convex.cross)
        return self.axioms.rank(reduced) == structure.rank
