from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from functools import cached_property
from typing import FrozenSet, Iterable, Iterator, List, Sequence, Tuple

from app.domin.om.models.exceptions import ElementNotFound, GroundMismatch, ParseError

_CHARS = {1: "+", -1: "-", 0: "0"}


class Sign(IntEnum):
    """{+, -, 0} 부호. 음수화는 +/-를 바꾸고 0은 그대로 둡니다."""
    MINUS = -1
    ZERO = 0
    PLUS = 1

    def __neg__(self) -> "Sign":
        return Sign(-int(self))

    @property
    def char(self) -> str:
        return _CHARS[int(self)]

    @classmethod
    def from_char(cls, char: str) -> "Sign":
        if char == "+":
            return cls.PLUS
        if char == "-":
            return cls.MINUS
        if char == "0":
            return cls.ZERO
        raise ValueError(f"invalid sign character {char!r}")


@dataclass(frozen=True)
class GroundSet:
    """원소 집합 U. id는 0..|U|-1로 조밀하고 표시 이름은 서로 다릅니다."""
    names: Tuple[str, ...]

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate element names: {self.names}")

    @classmethod
    def default(cls, size: int) -> "GroundSet":
        # 표시 id는 1부터 시작 (문서 표기와 동일)
        return cls(tuple(str(i + 1) for i in range(size)))

    def __len__(self) -> int:
        return len(self.names)

    @property
    def ids(self) -> range:
        return range(len(self.names))

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ElementNotFound(f"element {name!r} not in ground set {list(self.names)}")

    def resolve(self, element) -> int:
        """id(int) 또는 이름(str)을 id로 바꿉니다."""
        if isinstance(element, int) and not isinstance(element, bool):
            if 0 <= element < len(self.names):
                return element
            raise ElementNotFound(f"element id {element} out of range 0..{len(self.names) - 1}")
        return self.index(str(element))

    def fresh_name(self, base: str = "f") -> str:
        name = base
        while name in self.names:
            name += "'"
        return name

    def with_element(self, name: str) -> "GroundSet":
        return GroundSet(self.names + (name,))

    def without(self, ids: Iterable[int]) -> "GroundSet":
        drop = set(ids)
        return GroundSet(tuple(n for i, n in enumerate(self.names) if i not in drop))

    def translate(self, ids: Iterable[int], target: "GroundSet") -> FrozenSet[int]:
        """이 집합의 id들을 이름을 통해 target의 id로 옮깁니다."""
        return frozenset(target.index(self.names[i]) for i in ids)


@dataclass(frozen=True)
class SignVector:
    """{+,-,0}^U 의 원소. 양/음 원소 집합 두 개로 저장하고 0은 암묵적입니다."""
    plus: FrozenSet[int]
    minus: FrozenSet[int]
    ground: GroundSet = field(compare=True)

    def __post_init__(self):
        if self.plus & self.minus:
            raise ValueError("plus and minus sets must be disjoint")

    # 생성
    @classmethod
    def zero(cls, ground: GroundSet) -> "SignVector":
        return cls(frozenset(), frozenset(), ground)

    @classmethod
    def from_signs(cls, signs: Sequence[int], ground: GroundSet) -> "SignVector":
        if len(signs) != len(ground):
            raise GroundMismatch(f"expected {len(ground)} signs, got {len(signs)}")
        return cls(frozenset(i for i, s in enumerate(signs) if s > 0),
                   frozenset(i for i, s in enumerate(signs) if s < 0), ground)

    @classmethod
    def from_token(cls, token: str, ground: GroundSet, line: int = None) -> "SignVector":
        if len(token) != len(ground):
            raise ParseError(f"token {token!r} has length {len(token)}, expected {len(ground)}",
                             line=line, column=1)
        for col, char in enumerate(token, start=1):
            if char not in "+-0":
                raise ParseError(f"invalid sign character {char!r}", line=line, column=col)
        return cls(frozenset(i for i, c in enumerate(token) if c == "+"),
                   frozenset(i for i, c in enumerate(token) if c == "-"), ground)

    # 조회
    def sign(self, e: int) -> Sign:
        if e in self.plus:
            return Sign.PLUS
        if e in self.minus:
            return Sign.MINUS
        return Sign.ZERO

    def signs(self) -> Tuple[int, ...]:
        return tuple(int(self.sign(e)) for e in self.ground.ids)

    @property
    def support(self) -> FrozenSet[int]:
        return self.plus | self.minus

    @property
    def zeros(self) -> FrozenSet[int]:
        return frozenset(self.ground.ids) - self.support

    @property
    def is_tope(self) -> bool:
        return len(self.plus) + len(self.minus) == len(self.ground)

    @property
    def is_zero(self) -> bool:
        return not self.plus and not self.minus

    @cached_property
    def token(self) -> str:
        return "".join("+" if e in self.plus else "-" if e in self.minus else "0"
                       for e in self.ground.ids)

    @cached_property
    def masks(self) -> Tuple[int, int]:
        """(양 비트마스크, 음 비트마스크). 탐색 루프에서 집합 연산 대신 사용합니다."""
        return sum(1 << e for e in self.plus), sum(1 << e for e in self.minus)

    @classmethod
    def from_masks(cls, plus: int, minus: int, ground: GroundSet) -> "SignVector":
        return cls(frozenset(e for e in ground.ids if plus >> e & 1),
                   frozenset(e for e in ground.ids if minus >> e & 1), ground)

    def render(self) -> str:
        return self.token

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"SignVector({self.render()!r})"

    # 연산
    def _check(self, other: "SignVector") -> None:
        if self.ground is not other.ground and self.ground != other.ground:
            raise GroundMismatch(f"ground sets differ: {self.ground.names} vs {other.ground.names}")

    def __neg__(self) -> "SignVector":
        return SignVector(self.minus, self.plus, self.ground)

    def compose(self, other: "SignVector") -> "SignVector":
        self._check(other)
        return SignVector(self.plus | (other.plus - self.minus),
                          self.minus | (other.minus - self.plus), self.ground)

    def separator(self, other: "SignVector") -> FrozenSet[int]:
        self._check(other)
        return (self.plus & other.minus) | (self.minus & other.plus)

    def conforms_below(self, other: "SignVector") -> bool:
        self._check(other)
        return self.plus <= other.plus and self.minus <= other.minus

    def __le__(self, other: "SignVector") -> bool:
        return self.conforms_below(other)

    def __lt__(self, other: "SignVector") -> bool:
        return self != other and self.conforms_below(other)

    def delete(self, ids: Iterable[int], ground: GroundSet = None) -> "SignVector":
        """X\\E: 주어진 좌표를 지우고 남은 id를 조밀하게 다시 매깁니다."""
        drop = frozenset(ids)
        target = ground if ground is not None else self.ground.without(drop)
        remap = {}
        for e in self.ground.ids:
            if e not in drop:
                remap[e] = len(remap)
        return SignVector(frozenset(remap[e] for e in self.plus if e in remap),
                          frozenset(remap[e] for e in self.minus if e in remap), target)

    def extend(self, sign: int, ground: GroundSet) -> "SignVector":
        """새 원소(마지막 id)에 sign을 붙인 벡터를 만듭니다."""
        new = len(self.ground)
        plus = self.plus | {new} if sign > 0 else self.plus
        minus = self.minus | {new} if sign < 0 else self.minus
        return SignVector(plus, minus, ground)

    def reorient(self, e: int) -> "SignVector":
        plus = (self.plus - {e}) | ({e} if e in self.minus else frozenset())
        minus = (self.minus - {e}) | ({e} if e in self.plus else frozenset())
        return SignVector(frozenset(plus), frozenset(minus), self.ground)


def compose(x: SignVector, y: SignVector) -> SignVector:
    return x.compose(y)


def separator(x: SignVector, y: SignVector) -> FrozenSet[int]:
    return x.separator(y)


def conforms_below(x: SignVector, y: SignVector) -> bool:
    return x.conforms_below(y)


def canonical(vectors: Iterable[SignVector]) -> List[SignVector]:
    """문자열 표기를 정렬 키로 쓰는 결정적 순서."""
    return sorted(vectors, key=SignVector.render)


@dataclass(frozen=True)
class SignSystem:
    """같은 원소 집합 위의 부호벡터 유한 집합 (중복 없음)."""
    ground: GroundSet
    vectors: FrozenSet[SignVector]

    def __post_init__(self):
        for vector in self.vectors:
            if vector.ground != self.ground:
                raise GroundMismatch(
                    f"vector {vector.render()} lives on {vector.ground.names}, system on {self.ground.names}")

    @classmethod
    def of(cls, vectors: Iterable[SignVector], ground: GroundSet = None) -> "SignSystem":
        vectors = frozenset(vectors)
        if ground is None:
            if not vectors:
                raise ValueError("ground set required for an empty system")
            ground = next(iter(vectors)).ground
        return cls(ground, vectors)

    @classmethod
    def from_tokens(cls, tokens: Iterable[str], ground: GroundSet = None) -> "SignSystem":
        tokens = list(tokens)
        if ground is None:
            ground = GroundSet.default(len(tokens[0]) if tokens else 0)
        return cls(ground, frozenset(SignVector.from_token(t, ground) for t in tokens))

    def __len__(self) -> int:
        return len(self.vectors)

    def __iter__(self) -> Iterator[SignVector]:
        return iter(canonical(self.vectors))

    def __contains__(self, vector: SignVector) -> bool:
        return vector in self.vectors

    def sorted(self) -> List[SignVector]:
        return canonical(self.vectors)

    def renders(self) -> List[str]:
        return [v.render() for v in self.sorted()]

    @property
    def topes(self) -> FrozenSet[SignVector]:
        return frozenset(v for v in self.vectors if v.is_tope)
