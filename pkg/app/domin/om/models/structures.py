from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Callable, Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
import sympy

from app.domin.om.models.sign_vector import GroundSet, Sign, SignSystem, SignVector, canonical


class Verdict(str, Enum):
    OM = "OM"
    COM_NOT_OM = "COM_NOT_OM"
    NEITHER = "NEITHER"


@dataclass(frozen=True)
class Classification:
    """공리 검사 결과"""
    satisfies_C: bool
    satisfies_SE: bool
    satisfies_Sym: bool
    satisfies_FS: bool
    is_simple: bool
    verdict: Verdict
    witnesses: Tuple[str, ...] = ()  # 실패한 공리마다 첫 반례

    @property
    def is_om(self) -> bool:
        return self.verdict == Verdict.OM

    @property
    def is_com(self) -> bool:
        return self.verdict in (Verdict.OM, Verdict.COM_NOT_OM)


@dataclass(frozen=True, eq=False)
class OrientedStructure:
    """분류까지 끝난 부호 시스템. topes/cocircuits/rank를 함께 보관합니다."""
    system: SignSystem
    classification: Classification
    topes: FrozenSet[SignVector]
    cocircuits: FrozenSet[SignVector]
    rank: Optional[int]  # OM 판정일 때만 값이 있음

    @property
    def ground(self) -> GroundSet:
        return self.system.ground

    @property
    def covectors(self) -> FrozenSet[SignVector]:
        return self.system.vectors

    def __eq__(self, other) -> bool:
        return isinstance(other, OrientedStructure) and self.system == other.system

    def __hash__(self) -> int:
        return hash(self.system.vectors)


@dataclass(frozen=True, eq=False)
class Upset:
    """L(X)에서 X의 support를 지운 시스템과 좌표 대응"""
    vector: SignVector
    system: SignSystem
    kept: Tuple[int, ...]  # 원래 원소 집합에서 살아남은 id (새 id 순서)

    def lift(self, v: SignVector) -> SignVector:
        x = self.vector
        return SignVector(x.plus | frozenset(self.kept[i] for i in v.plus),
                          x.minus | frozenset(self.kept[i] for i in v.minus), x.ground)

    def drop(self, v: SignVector) -> SignVector:
        return v.delete(self.vector.support, self.system.ground)


@dataclass(frozen=True, eq=False)
class TopeGraph:
    """tope 그래프. networkx 그래프의 간선 속성 'element'에 뒤집히는 원소가 들어 있습니다."""
    ground: GroundSet
    vertices: FrozenSet[SignVector]
    graph: nx.Graph

    def element(self, u: SignVector, v: SignVector) -> int:
        return self.graph.edges[u, v]["element"]

    def neighbors(self, v: SignVector):
        return self.graph.neighbors(v)

    @property
    def edges(self) -> List[Tuple[SignVector, SignVector, int]]:
        return [(u, v, data["element"]) for u, v, data in self.graph.edges(data=True)]

    @cached_property
    def varying(self) -> FrozenSet[int]:
        """꼭짓점들 사이에서 값이 바뀌는 원소"""
        return frozenset(data["element"] for _, _, data in self.graph.edges(data=True))

    def __len__(self) -> int:
        return len(self.vertices)

    def __eq__(self, other) -> bool:
        return isinstance(other, TopeGraph) and self.vertices == other.vertices

    def __hash__(self) -> int:
        return hash(self.vertices)


@dataclass(frozen=True, eq=False)
class ConvexSet:
    """볼록집합. 동일성은 members로만 판단합니다."""
    members: FrozenSet[SignVector]
    osc: FrozenSet[int]
    cross: FrozenSet[int]
    signature: SignVector  # members에서 일정한 좌표의 부호, 나머지는 0

    def side(self, e: int) -> Sign:
        return self.signature.sign(e)

    @property
    def sides(self) -> Dict[int, int]:
        return {e: int(self.signature.sign(e)) for e in sorted(self.osc)}

    def render(self) -> str:
        return ",".join(v.token for v in canonical(self.members))

    @property
    def sort_key(self) -> Tuple[int, str]:
        # 크기 내림차순, 같은 크기는 문자열 순
        return -len(self.members), self.render()

    def __len__(self) -> int:
        return len(self.members)

    def __eq__(self, other) -> bool:
        return isinstance(other, ConvexSet) and self.members == other.members

    def __hash__(self) -> int:
        return hash(self.members)


@dataclass(frozen=True)
class ShatterRecord:
    shattered_sets: FrozenSet[FrozenSet[int]]
    vc: int

    def of_size(self, k: int) -> List[FrozenSet[int]]:
        return sorted((s for s in self.shattered_sets if len(s) == k), key=lambda s: sorted(s))


@dataclass(frozen=True, eq=False)
class Localization:
    """cocircuit마다 새 원소의 부호를 정한 표. sequence가 있으면 사전식(LEX)입니다."""
    assignment: Mapping[SignVector, int]
    sequence: Optional[Tuple[Tuple[int, int], ...]] = None

    @property
    def provenance(self) -> str:
        return "LEX" if self.sequence is not None else "EXPLICIT"

    def __call__(self, cocircuit: SignVector) -> int:
        return self.assignment[cocircuit]

    def describe(self, ground: GroundSet) -> str:
        if self.sequence is None:
            return "EXPLICIT"
        parts = [f"{ground.names[e]}{Sign(s).char}" for e, s in self.sequence]
        return "LEX[" + ",".join(parts) + "]"


@dataclass(frozen=True, eq=False)
class CornerRecord:
    """base의 tope 그래프에서 잘라낸 모서리 D"""
    topes: FrozenSet[SignVector]
    base: OrientedStructure
    extension: OrientedStructure
    new_element: int
    side: Sign
    localization: Optional[Localization] = None

    @property
    def remainder(self) -> FrozenSet[SignVector]:
        return self.base.topes - self.topes


@dataclass(frozen=True, eq=False)
class AffineOM:
    """OM M의 g=+ 반공간"""
    base: OrientedStructure
    g: int

    @property
    def ground(self) -> GroundSet:
        return self.base.ground

    @cached_property
    def covectors(self) -> FrozenSet[SignVector]:
        return frozenset(x for x in self.base.covectors if self.g in x.plus)

    @cached_property
    def infinity(self) -> FrozenSet[SignVector]:
        return frozenset(x for x in self.base.covectors if self.g not in x.support)

    @cached_property
    def topes(self) -> FrozenSet[SignVector]:
        return frozenset(t for t in self.base.topes if self.g in t.plus)

    @cached_property
    def cocircuits(self) -> FrozenSet[SignVector]:
        return frozenset(x for x in self.base.cocircuits if self.g in x.plus)

    @cached_property
    def cocircuits_at_infinity(self) -> FrozenSet[SignVector]:
        return frozenset(x for x in self.base.cocircuits if self.g not in x.support)

    @property
    def rank(self) -> Optional[int]:
        return None if self.base.rank is None else self.base.rank - 1

    @property
    def key(self) -> Tuple[FrozenSet[SignVector], str]:
        return self.base.covectors, self.ground.names[self.g]


@dataclass(frozen=True)
class Arc:
    """인접한 두 cocircuit 사이의 간선. direction +1은 tail→head, -1은 head→tail, 0은 방향 없음"""
    tail: SignVector
    head: SignVector
    witness: SignVector
    orienter: SignVector
    direction: int

    def other(self, node: SignVector) -> SignVector:
        return self.head if node == self.tail else self.tail

    def points_into(self, node: SignVector) -> bool:
        if self.direction == 0:
            return False
        target = self.head if self.direction > 0 else self.tail
        return target == node

    def sign_at(self, node: SignVector) -> int:
        """node 기준 부호: 나가는 간선 +1, 들어오는 간선 -1, 방향 없음 0"""
        if self.direction == 0:
            return 0
        return -1 if self.points_into(node) else 1


@dataclass(frozen=True)
class HalfArc:
    """무한원 cocircuit partner 쪽으로 열린 반간선. direction +1은 node에서 나감, -1은 node로 들어옴"""
    node: SignVector
    partner: SignVector
    witness: SignVector
    direction: int


@dataclass(frozen=True, eq=False)
class CocircuitDigraph:
    affine: AffineOM
    f: int
    nodes: Tuple[SignVector, ...]
    arcs: Tuple[Arc, ...]
    half_arcs: Tuple[HalfArc, ...]

    @cached_property
    def graph(self) -> nx.DiGraph:
        """방향이 정해진 간선만 담은 networkx 그래프"""
        g = nx.DiGraph()
        g.add_nodes_from(self.nodes)
        for arc in self.arcs:
            if arc.direction > 0:
                g.add_edge(arc.tail, arc.head, witness=arc.witness)
            elif arc.direction < 0:
                g.add_edge(arc.head, arc.tail, witness=arc.witness)
        return g

    def incident(self, node: SignVector) -> List[Arc]:
        return [a for a in self.arcs if a.tail == node or a.head == node]

    def half_arcs_at(self, node: SignVector) -> List[HalfArc]:
        return [h for h in self.half_arcs if h.node == node]


@dataclass(frozen=True, eq=False)
class Polyhedron:
    affine: AffineOM
    constraints: Tuple[Tuple[int, int], ...]  # (원소, 부호)
    members: FrozenSet[SignVector]

    @property
    def is_empty(self) -> bool:
        return not self.members

    @cached_property
    def cocircuits(self) -> FrozenSet[SignVector]:
        return self.members & self.affine.cocircuits

    @cached_property
    def topes(self) -> FrozenSet[SignVector]:
        return frozenset(x for x in self.members if x.is_tope)

    def __contains__(self, x: SignVector) -> bool:
        return x in self.members

    def render(self) -> str:
        ground = self.affine.ground
        return ",".join(f"{ground.names[e]}={Sign(s).char}" for e, s in self.constraints)


@dataclass(frozen=True)
class TraceEntry:
    key: str
    fields: Tuple[Tuple[str, str], ...]

    def render(self) -> str:
        return f"{self.key}=" + ";".join(f"{k}:{v}" for k, v in self.fields)


@dataclass
class BuildTrace:
    """빌드 과정 기록. render()는 key=value 줄을 만듭니다."""
    entries: List[TraceEntry] = field(default_factory=list)

    def add(self, key: str, **fields) -> None:
        self.entries.append(TraceEntry(key, tuple((k, str(v)) for k, v in fields.items())))

    def extend(self, other: "BuildTrace") -> None:
        self.entries.extend(other.entries)

    def count(self, key: str) -> int:
        return sum(1 for e in self.entries if e.key == key)

    def render(self) -> str:
        return "\n".join(e.render() for e in self.entries) + ("\n" if self.entries else "")


@dataclass(frozen=True)
class ProgramRecord:
    """case (ii)에서 풀린 OM 프로그램 하나"""
    constraints: str
    solution: SignVector
    corner: FrozenSet[SignVector]  # L̄(X) 좌표의 D_X
    restricted: FrozenSet[SignVector]  # P(S) ∩ T(X), L̄(X) 좌표
    corner_map_id: int

    @property
    def inclusion_holds(self) -> bool:
        return self.restricted <= self.corner


@dataclass(eq=False)
class CornerMap:
    corner: CornerRecord
    table: Dict[FrozenSet[SignVector], FrozenSet[int]]
    vc: int


@dataclass(eq=False)
class ReconstructibleMap:
    """볼록집합(멤버 집합) → 원소 부분집합"""
    graph: TopeGraph
    table: Dict[FrozenSet[SignVector], FrozenSet[int]]
    convex: Dict[FrozenSet[SignVector], ConvexSet]
    vc: int
    witnesses: Dict[FrozenSet[int], SignVector] = field(default_factory=dict)
    branches: Dict[FrozenSet[SignVector], str] = field(default_factory=dict)
    trace: BuildTrace = field(default_factory=BuildTrace)
    programs: List[ProgramRecord] = field(default_factory=list)
    unique_cocircuits: Dict[FrozenSet[int], Tuple[SignVector, ...]] = field(default_factory=dict)
    # 층위 분기별 이미지 크기 상한 (안쪽 단계의 vc)
    bounds: Dict[FrozenSet[SignVector], int] = field(default_factory=dict)

    def __call__(self, members: FrozenSet[SignVector]) -> FrozenSet[int]:
        return self.table[frozenset(members)]

    @property
    def images(self) -> FrozenSet[FrozenSet[int]]:
        return frozenset(self.table.values())

    @property
    def ground(self) -> GroundSet:
        return self.graph.ground


Sample = SignVector


@dataclass(frozen=True, eq=False)
class CompressionScheme:
    universe: GroundSet
    alpha: Mapping[SignVector, FrozenSet[int]]
    beta: Mapping[FrozenSet[int], SignVector]
    declared_size: int

    def __eq__(self, other) -> bool:
        return (isinstance(other, CompressionScheme) and self.universe == other.universe
                and dict(self.alpha) == dict(other.alpha) and dict(self.beta) == dict(other.beta)
                and self.declared_size == other.declared_size)

    __hash__ = None


@dataclass(frozen=True)
class RationalMatrix:
    """정확한 유리수 행렬 (d행 n열). 열 하나가 원소 하나입니다."""
    rows: int
    cols: int
    entries: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError(f"matrix shape does not match {self.rows}x{self.cols}")

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence]) -> "RationalMatrix":
        columns = [tuple(Fraction(x) for x in c) for c in columns]
        d = len(columns[0]) if columns else 0
        return cls(d, len(columns), tuple(tuple(c[i] for c in columns) for i in range(d)))

    def column(self, j: int) -> Tuple[Fraction, ...]:
        return tuple(row[j] for row in self.entries)

    @property
    def columns(self) -> List[Tuple[Fraction, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def to_sympy(self) -> sympy.Matrix:
        return sympy.Matrix(self.rows, self.cols,
                            lambda i, j: sympy.Rational(self.entries[i][j].numerator,
                                                        self.entries[i][j].denominator))


@dataclass(frozen=True, eq=False)
class NamedInstance:
    key: str
    structure: OrientedStructure
    matrix: RationalMatrix
    affine: Optional[AffineOM] = None
    notes: str = ""


@dataclass(frozen=True, eq=False)
class PeelingStep:
    """COM 모서리 제거 한 단계. cell은 D를 담는 유일한 극대 셀의 최소 covector"""
    topes: FrozenSet[SignVector]
    cell: SignVector
    corner: Optional[CornerRecord]  # 꼭짓점 하나만 남은 마지막 단계는 None
    upset: Optional[Upset]
    stage: FrozenSet[SignVector]  # 이 단계 직전의 tope 집합


@dataclass(frozen=True, eq=False)
class Peeling:
    system: SignSystem
    steps: Tuple[PeelingStep, ...]

    def __len__(self) -> int:
        return len(self.steps)


LiftFn = Callable[[SignVector], SignVector]
