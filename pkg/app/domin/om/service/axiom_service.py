from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from app.domin.om.models.exceptions import (
    ElementNotFound,
    EmptySystem,
    NotGraded,
    VectorNotInSystem,
)
from app.domin.om.models.sign_vector import SignSystem, SignVector, canonical
from app.domin.om.models.structures import Classification, OrientedStructure, Upset, Verdict
from app.foundation.infra.logger import get_logger

logger = get_logger(__name__)

Mask = Tuple[int, int]


def _below(a: Mask, b: Mask) -> bool:
    return not (a[0] & ~b[0]) and not (a[1] & ~b[1])


def _compose(a: Mask, b: Mask) -> Mask:
    return a[0] | (b[0] & ~a[1]), a[1] | (b[1] & ~a[0])


def _render(m: Mask, n: int) -> str:
    return "".join("+" if m[0] >> e & 1 else "-" if m[1] >> e & 1 else "0" for e in range(n))


class AxiomService:
    """부호 시스템의 공리 검사와 구조 조회"""

    def __init__(self):
        self._covers: Dict[SignSystem, Dict[SignVector, List[SignVector]]] = {}
        self._structures: Dict[SignSystem, OrientedStructure] = {}

    # 분류
    def classify(self, system: SignSystem) -> Classification:
        """(C), (SE), (Sym), (FS)와 단순성을 전수 검사합니다."""
        if not system.vectors:
            raise EmptySystem("cannot classify an empty sign system")
        n = len(system.ground)
        masks = {v.masks for v in system.vectors}
        vecs = sorted(masks)
        witnesses: List[str] = []

        satisfies_c = self._check_closure(vecs, masks, _compose, "C", n, witnesses)
        satisfies_fs = self._check_closure(vecs, masks, lambda a, b: _compose(a, (b[1], b[0])), "FS", n, witnesses)
        satisfies_sym = True
        for p, m in vecs:
            if (m, p) not in masks:
                satisfies_sym = False
                witnesses.append(f"Sym: -{_render((p, m), n)} missing")
                break
        satisfies_se = self._check_elimination(vecs, n, witnesses)
        simple = self.is_simple(system)

        if satisfies_c and satisfies_se and satisfies_sym:
            verdict = Verdict.OM
        elif satisfies_c and satisfies_se and satisfies_fs:
            verdict = Verdict.COM_NOT_OM
        else:
            verdict = Verdict.NEITHER
        logger.debug(f"분류 결과: {verdict.value} (C={satisfies_c}, SE={satisfies_se}, "
                     f"Sym={satisfies_sym}, FS={satisfies_fs}, simple={simple})")
        return Classification(satisfies_c, satisfies_se, satisfies_sym, satisfies_fs, simple,
                              verdict, tuple(witnesses))

    @staticmethod
    def _check_closure(vecs, masks, op, name: str, n: int, witnesses: List[str]) -> bool:
        for x in vecs:
            for y in vecs:
                z = op(x, y)
                if z not in masks:
                    witnesses.append(f"{name}: {_render(x, n)}, {_render(y, n)} -> {_render(z, n)} missing")
                    return False
        return True

    @staticmethod
    def _check_elimination(vecs: List[Mask], n: int, witnesses: List[str]) -> bool:
        # 분리 집합 S마다 U∖S 위의 사영 → S 안에서 0이 되는 좌표의 합집합
        full = (1 << n) - 1
        index: Dict[int, Dict[Mask, int]] = {}

        def zeros_on(sep: int) -> Dict[Mask, int]:
            table = index.get(sep)
            if table is None:
                table = {}
                keep = full & ~sep
                for zp, zm in vecs:
                    key = (zp & keep, zm & keep)
                    table[key] = table.get(key, 0) | (~(zp | zm) & sep)
                index[sep] = table
            return table

        for i, x in enumerate(vecs):
            for y in vecs[i + 1:]:
                sep = (x[0] & y[1]) | (x[1] & y[0])
                if not sep:
                    continue
                cp, cm = _compose(x, y)
                keep = full & ~sep
                covered = zeros_on(sep).get((cp & keep, cm & keep), 0)
                if covered & sep != sep:
                    e = next(e for e in range(n) if sep >> e & 1 and not covered >> e & 1)
                    witnesses.append(f"SE: {_render(x, n)}, {_render(y, n)} at element {e}")
                    return False
        return True

    def is_simple(self, system: SignSystem) -> bool:
        """상수 원소가 없고 모든 원소 쌍이 평행하지 않으면 단순합니다."""
        n = len(system.ground)
        for e in range(n):
            if {int(v.sign(e)) for v in system.vectors} != {1, -1, 0}:
                return False
        full = [v for v in system.vectors if v.is_tope] or list(system.vectors)
        for e in range(n):
            for f in range(e + 1, n):
                same = differ = False
                for v in full:
                    se, sf = v.sign(e), v.sign(f)
                    if se == 0 or sf == 0:
                        continue
                    if se == sf:
                        same = True
                    else:
                        differ = True
                    if same and differ:
                        break
                if not (same and differ):
                    return False
        return True

    # 구조
    def structure(self, system: SignSystem) -> OrientedStructure:
        """분류, topes, cocircuits, (OM이면) rank를 담은 스냅샷"""
        cached = self._structures.get(system)
        if cached is not None:
            return cached
        classification = self.classify(system)
        rank = self.rank(system) if classification.is_om else None
        result = OrientedStructure(system, classification, self.topes(system), self.cocircuits(system), rank)
        self._structures[system] = result
        return result

    @staticmethod
    def topes(system: SignSystem) -> FrozenSet[SignVector]:
        return frozenset(v for v in system.vectors if v.is_tope)

    @staticmethod
    def cocircuits(system: SignSystem) -> FrozenSet[SignVector]:
        """0이 아닌 벡터 중 ≤ 순서의 극소 원소"""
        minimal: List[Mask] = []
        found = []
        for v in sorted((v for v in system.vectors if not v.is_zero), key=lambda v: (len(v.support), v.token)):
            m = v.masks
            if not any(_below(x, m) for x in minimal):
                minimal.append(m)
                found.append(v)
        return frozenset(found)

    def covers(self, system: SignSystem) -> Dict[SignVector, List[SignVector]]:
        """Y → Y가 덮는 원소들 (X ⋖ Y)"""
        cached = self._covers.get(system)
        if cached is not None:
            return cached
        ordered = sorted(system.vectors, key=lambda v: -len(v.support))
        result: Dict[SignVector, List[SignVector]] = {}
        for y in system.vectors:
            ym = y.masks
            maximal: List[SignVector] = []
            for x in ordered:
                if x is y or len(x.support) >= len(y.support) or not _below(x.masks, ym):
                    continue
                if not any(_below(x.masks, z.masks) for z in maximal):
                    maximal.append(x)
            result[y] = maximal
        self._covers[system] = result
        return result

    def heights(self, system: SignSystem) -> Dict[SignVector, int]:
        """최장 사슬 기준 높이. 모든 덮음 관계에서 높이가 정확히 1 늘지 않으면 NotGraded"""
        covers = self.covers(system)
        height: Dict[SignVector, int] = {}
        for y in sorted(system.vectors, key=lambda v: len(v.support)):
            below = covers[y]
            height[y] = 1 + max(height[x] for x in below) if below else 0
        for y, below in covers.items():
            for x in below:
                if height[y] != height[x] + 1:
                    raise NotGraded(f"cover {x.token} < {y.token} skips a level; system is not graded")
        covered = {x for below in covers.values() for x in below}
        maximal = {height[y] for y in system.vectors if y not in covered}
        if len(maximal) != 1:
            raise NotGraded(f"maximal chains have different lengths: {sorted(maximal)}")
        return height

    def rank(self, system: SignSystem) -> int:
        """최대 사슬의 길이 - 1"""
        heights = self.heights(system)
        return max(heights.values())

    # 소거 / 축약
    def delete(self, system: SignSystem, elements: Iterable[int]) -> SignSystem:
        drop = frozenset(elements)
        for e in drop:
            if not 0 <= e < len(system.ground):
                raise ElementNotFound(f"element id {e} not in ground set")
        if not drop:
            return system
        ground = system.ground.without(drop)
        return SignSystem(ground, frozenset(v.delete(drop, ground) for v in system.vectors))

    def contract(self, system: SignSystem, e: int) -> SignSystem:
        if not 0 <= e < len(system.ground):
            raise ElementNotFound(f"element id {e} not in ground set")
        ground = system.ground.without([e])
        kept = frozenset(v.delete([e], ground) for v in system.vectors if e not in v.support)
        result = SignSystem(ground, kept)
        if len(kept) > 1 and not self.is_simple(result):
            logger.warning(f"축약 결과가 단순하지 않습니다: {system.ground.names[e]}")
        return result

    @staticmethod
    def reorient(system: SignSystem, e: int) -> SignSystem:
        if not 0 <= e < len(system.ground):
            raise ElementNotFound(f"element id {e} not in ground set")
        return SignSystem(system.ground, frozenset(v.reorient(e) for v in system.vectors))

    @staticmethod
    def upset(system: SignSystem, x: SignVector) -> Upset:
        """L̄(X) = {Y ∈ L | X ≤ Y}에서 X의 support를 지운 시스템"""
        if x not in system.vectors:
            raise VectorNotInSystem(f"{x.token} is not a vector of the system")
        support = x.support
        ground = system.ground.without(support)
        kept = tuple(e for e in system.ground.ids if e not in support)
        xm = x.masks
        vectors = frozenset(y.delete(support, ground) for y in system.vectors if _below(xm, y.masks))
        return Upset(x, SignSystem(ground, vectors), kept)

    def upset_om(self, system: SignSystem, x: SignVector) -> Tuple[SignSystem, Dict[SignVector, SignVector]]:
        """L̄(X)와 그 topes → T(X) 대응"""
        upset = self.upset(system, x)
        mapping = {t: upset.lift(t) for t in upset.system.vectors if t.is_tope}
        return upset.system, mapping

    def deletion_to_cube(self, structure: OrientedStructure) -> Optional[FrozenSet[int]]:
        """rank를 유지하며 원소를 지워 tope 그래프가 rank 차원 큐브가 되는 남은 원소 집합"""
        if structure.rank is None:
            return None
        target = structure.rank
        removed: List[int] = []
        for e in structure.ground.ids:
            trial = self.delete(structure.system, removed + [e])
            if trial.vectors and self.rank(trial) == target:
                removed.append(e)
        rest = frozenset(structure.ground.ids) - frozenset(removed)
        final = self.delete(structure.system, removed)
        if len(rest) != target or len(self.topes(final)) != 2 ** target:
            logger.warning(f"deletion sequence did not end in a {target}-cube")
            return None
        return rest

    @staticmethod
    def sorted_tokens(vectors) -> List[str]:
        return [v.token for v in canonical(vectors)]
