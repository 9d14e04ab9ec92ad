import re
from fractions import Fraction
from math import gcd
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from app.domin.om.models.exceptions import DegenerateInput, NotOrientedMatroid, UniverseTooLarge, UnknownKey
from app.domin.om.models.sign_vector import GroundSet, SignSystem, SignVector
from app.domin.om.models.structures import AffineOM, NamedInstance, OrientedStructure, RationalMatrix
from app.domin.om.service.axiom_service import AxiomService
from app.foundation.core.config.settings import settings
from app.foundation.infra.logger import get_logger

logger = get_logger(__name__)

# (계수, 엄격 여부): Σ c_j x_j > 0 또는 ≥ 0
Constraint = Tuple[Tuple[Fraction, ...], bool]

_KEY = re.compile(r"^(cycle|cube|path)\((\d+)\)$|^unif\(3,\s*(\d+)\)$")

# 키별 허용 범위
_RANGES = {"cycle": (2, 8), "cube": (1, 4), "path": (2, 8), "unif": (3, 6)}


def _normalize(constraint: Constraint) -> Constraint:
    coeffs, strict = constraint
    nonzero = [abs(c) for c in coeffs if c]
    if not nonzero:
        return coeffs, strict
    num = 0
    den = 1
    for c in nonzero:
        num = gcd(num, c.numerator)
        den = den * c.denominator // gcd(den, c.denominator)
    scale = Fraction(den, num)
    return tuple(c * scale for c in coeffs), strict


def feasible(constraints: List[Constraint], dimension: int) -> bool:
    """동차 부등식 계의 유리수 해 존재 여부 (Fourier–Motzkin 소거)"""
    system: Set[Constraint] = {_normalize(c) for c in constraints}
    for j in range(dimension):
        pos = [c for c in system if c[0][j] > 0]
        neg = [c for c in system if c[0][j] < 0]
        rest = {c for c in system if c[0][j] == 0}
        for p, ps in pos:
            for q, qs in neg:
                a, b = p[j], -q[j]
                combined = tuple(b * pi + a * qi for pi, qi in zip(p, q))
                rest.add(_normalize((combined, ps or qs)))
        system = rest
    # 남은 것은 0 > 0 또는 0 ≥ 0
    return not any(strict for coeffs, strict in system if not any(coeffs))


class ArrangementService:
    """정확한 유리수 배치에서 OM / 아핀 OM 생성"""

    def __init__(self, axioms: Optional[AxiomService] = None, max_universe: Optional[int] = None):
        self.axioms = axioms or AxiomService()
        self.max_universe = max_universe if max_universe is not None else settings.OM_MAX_UNIVERSE

    def covectors(self, matrix: RationalMatrix) -> FrozenSet[Tuple[int, ...]]:
        """⟨x, v_i⟩의 부호 패턴 전체. 원소를 하나씩 늘리며 실현 가능한 접두만 남깁니다."""
        d = matrix.rows
        columns = matrix.columns
        prefixes: List[Tuple[Tuple[int, ...], List[Constraint]]] = [((), [])]
        for column in columns:
            following = []
            for signs, constraints in prefixes:
                for s in (1, -1, 0):
                    if s > 0:
                        added = [(column, True)]
                    elif s < 0:
                        added = [(tuple(-c for c in column), True)]
                    else:
                        added = [(column, False), (tuple(-c for c in column), False)]
                    trial = constraints + added
                    if feasible(trial, d):
                        following.append((signs + (s,), trial))
            prefixes = following
        return frozenset(signs for signs, _ in prefixes)

    def om_from_vectors(self, matrix: RationalMatrix, ground: Optional[GroundSet] = None) -> OrientedStructure:
        """열 벡터 배치의 covector 시스템. OM 판정까지 확인합니다."""
        if matrix.cols > self.max_universe:
            raise UniverseTooLarge(f"{matrix.cols} elements exceed the enumeration cap {self.max_universe}")
        if all(x == 0 for row in matrix.entries for x in row):
            raise DegenerateInput("all vectors are zero")
        ground = ground or GroundSet.default(matrix.cols)
        vectors = frozenset(SignVector.from_signs(s, ground) for s in self.covectors(matrix))
        structure = self.axioms.structure(SignSystem(ground, vectors))
        if not structure.classification.is_om:
            raise NotOrientedMatroid(f"realized system failed classification: {structure.classification.witnesses}")
        rank = self.matrix_rank(matrix)
        if structure.rank != rank:
            raise NotOrientedMatroid(f"covector rank {structure.rank} differs from matrix rank {rank}")
        if not structure.classification.is_simple:
            logger.warning(f"배치가 단순 OM을 주지 않습니다 (|U|={matrix.cols})")
        return structure

    def affine_from_points(self, hyperplanes: RationalMatrix, offsets: Sequence, g_name: str = "g") -> AffineOM:
        """아핀 초평면 ⟨h_i, y⟩ + b_i = 0을 동차화하고 g = (0,…,0,1)을 마지막 원소로 붙입니다."""
        if len(offsets) != hyperplanes.cols:
            raise DegenerateInput(f"{hyperplanes.cols} hyperplanes but {len(offsets)} offsets")
        columns = [tuple(col) + (Fraction(b),) for col, b in zip(hyperplanes.columns, offsets)]
        columns.append(tuple(Fraction(0) for _ in range(hyperplanes.rows)) + (Fraction(1),))
        ground = GroundSet.default(hyperplanes.cols).with_element(g_name)
        structure = self.om_from_vectors(RationalMatrix.from_columns(columns), ground)
        return AffineOM(structure, len(ground) - 1)

    @staticmethod
    def matrix_rank(matrix: RationalMatrix) -> int:
        """sympy 정확 계산 rank. 실현된 OM의 rank와 같아야 합니다."""
        return matrix.to_sympy().rank()

    # 이름 붙은 인스턴스
    @staticmethod
    def instance_keys() -> List[str]:
        keys = ["paper4", "tri", "par"]
        keys += [f"cycle({n})" for n in range(3, 7)]
        keys += [f"cube({n})" for n in range(1, 4)]
        keys += [f"unif(3,{n})" for n in range(4, 7)]
        keys += [f"path({k})" for k in range(2, 7)]
        return keys

    def named_instance(self, key: str) -> NamedInstance:
        """paper4, tri, par, cycle(n), cube(n), unif(3,n), path(k)"""
        key = key.strip()
        if key == "paper4":
            matrix = RationalMatrix.from_columns([(1, -p) for p in range(1, 5)])
            return NamedInstance(key, self.om_from_vectors(matrix), matrix, notes="four points on a line")
        if key == "tri":
            return self._affine_instance(key, [(1, 0), (0, 1), (1, 1)], [0, 0, -1], "three generic affine lines")
        if key == "par":
            return self._affine_instance(key, [(1, 0), (1, 0), (0, 1)], [0, -1, 0],
                                         "two parallel lines and a transversal")

        match = _KEY.match(key.replace(" ", ""))
        if not match:
            raise UnknownKey(f"unknown instance {key!r}; known: {', '.join(self.instance_keys())}")
        kind = match.group(1) or "unif"
        n = int(match.group(2) or match.group(3))
        low, high = _RANGES[kind]
        if not low <= n <= high:
            raise UnknownKey(f"{kind} size {n} outside {low}..{high}")

        if kind == "cycle":
            columns = [(1, t) for t in range(1, n + 1)]
            notes = f"rank 2 uniform, tope graph C{2 * n}"
        elif kind == "cube":
            columns = [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]
            notes = f"coordinate arrangement, tope graph Q{n}"
        elif kind == "unif":
            columns = [(1, t, t * t) for t in range(1, n + 1)]
            notes = "rank 3 uniform on the moment curve"
        else:
            return self._affine_instance(key, [(1,) for _ in range(1, n)], [-i for i in range(1, n)],
                                         f"{n - 1} points on a line, path of {n} topes")
        matrix = RationalMatrix.from_columns(columns)
        return NamedInstance(key, self.om_from_vectors(matrix), matrix, notes=notes)

    def _affine_instance(self, key: str, normals, offsets, notes: str) -> NamedInstance:
        hyperplanes = RationalMatrix.from_columns(normals)
        affine = self.affine_from_points(hyperplanes, offsets)
        columns = [tuple(n) + (Fraction(b),) for n, b in zip(normals, offsets)]
        columns.append(tuple(0 for _ in normals[0]) + (1,))
        matrix = RationalMatrix.from_columns(columns)
        return NamedInstance(key, affine.base, matrix, affine=affine, notes=notes)
