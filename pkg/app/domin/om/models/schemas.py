from pydantic import BaseModel, Field, field_validator
from typing import Dict, List, Literal, Optional

# 보고서 스키마
class ClassificationReport(BaseModel):
    """공리 검사 보고서"""
    elements: List[str]
    vectors: int
    satisfies_C: bool
    satisfies_SE: bool
    satisfies_Sym: bool
    satisfies_FS: bool
    is_simple: bool
    verdict: str
    witnesses: List[str] = []


class StructureReport(BaseModel):
    """topes / cocircuits / rank 조회 결과"""
    elements: List[str]
    verdict: str
    topes: List[str] = []
    cocircuits: List[str] = []
    rank: Optional[int] = None
    affine_rank: Optional[int] = None      # g가 주어진 경우 rank(M) - 1
    cube_witness: Optional[List[str]] = None  # 지워도 rank가 유지되는 원소들을 뺀 나머지


class ShatterReport(BaseModel):
    elements: List[str]
    vc: int
    largest: List[str]
    shattered: List[List[str]]


class CornerReport(BaseModel):
    """모서리 D와 그것을 만든 확장"""
    elements: List[str]
    new_element: str
    side: str
    localization: str
    corner: List[str]
    remainder: List[str]
    general_position: bool
    remainder_isometric: bool


class ProgramReport(BaseModel):
    elements: List[str]
    g: str
    f: str
    constraints: Dict[str, str]
    solution: str
    nodes: int
    arcs: int
    half_arcs: int
    in_degree: int


class PeelingStepReport(BaseModel):
    cell: str
    corner: List[str]


class PeelingReport(BaseModel):
    found: bool
    steps: List[PeelingStepReport] = []


class ReconstructibilityReport(BaseModel):
    """재구성 가능 사상의 조건 (a), (b)와 부가 검사"""
    passed: bool
    vc: int
    convex_sets: int
    images: int
    condition_a_failures: List[str] = []
    condition_b_failures: List[str] = []
    unshattered_images: List[str] = []
    oversized_images: List[str] = []
    stratification_failures: List[str] = []
    uniqueness_failures: List[str] = []
    inclusion_failures: List[str] = []
    cache_identity: bool = True
    witnesses: Dict[str, str] = {}


class SchemeReport(BaseModel):
    passed: bool
    size_bound: int
    samples_checked: int
    beta_entries: int
    max_image_size: int
    violations: List[str] = []


class BuildTraceReport(BaseModel):
    lines: List[str]


# 문서 스키마
class SchemeDocument(BaseModel):
    """압축 스킴 문서. id는 universe 기준 1부터 시작합니다."""
    universe: List[str]
    size: int = Field(..., ge=0)
    alpha: Dict[str, List[int]]
    beta: Dict[str, str]

    @field_validator("universe")
    @classmethod
    def names_unique(cls, value: List[str]) -> List[str]:
        if len(set(value)) != len(value):
            raise ValueError("universe names must be distinct")
        return value


# 요청 스키마
class SystemRequest(BaseModel):
    """.sv 또는 유리수 행렬 텍스트"""
    text: str
    format: Literal["sv", "matrix"] = "sv"
    g: Optional[str] = None
    max_universe: Optional[int] = None


class ProgramRequest(BaseModel):
    text: str
    g: str
    f: str
    constraints: Dict[str, Literal["+", "-"]] = {}


class SchemeVerifyRequest(BaseModel):
    class_text: str
    scheme: str
    size: int = Field(..., ge=0)
    g: Optional[str] = None


class InstanceRequest(BaseModel):
    keys: List[str]
    matrix: bool = False
