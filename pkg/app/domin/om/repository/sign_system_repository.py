import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from app.domin.om.models.exceptions import EmptySystem, ParseError
from app.domin.om.models.sign_vector import GroundSet, SignSystem, SignVector
from app.domin.om.models.structures import RationalMatrix
from app.foundation.infra.logger import get_logger

logger = get_logger(__name__)

_ENTRY = re.compile(r"^[+-]?\d+(/\d+)?$")


@dataclass(frozen=True)
class SvDocument:
    """.sv 파일 하나의 내용. g는 아핀 인스턴스의 구분 원소 이름입니다."""
    system: SignSystem
    g: Optional[str] = None
    duplicates: Tuple[str, ...] = ()


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0]


def parse_document(text: str) -> SvDocument:
    """.sv 텍스트를 읽습니다.

    Args:
        text: `elements:` / `g:` 헤더(선택), `#` 주석, 부호 토큰 줄로 이루어진 텍스트
    """
    ground: Optional[GroundSet] = None
    g: Optional[str] = None
    vectors: List[SignVector] = []
    seen = set()
    duplicates: List[str] = []

    for number, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        stripped = line.strip()
        if not stripped:
            continue
        offset = len(line) - len(line.lstrip())

        if stripped.startswith("elements:"):
            if ground is not None or vectors:
                raise ParseError("header 'elements:' must come before any vector", line=number, column=offset + 1)
            names = stripped[len("elements:"):].split()
            if not names:
                raise ParseError("header 'elements:' lists no names", line=number, column=offset + 1)
            try:
                ground = GroundSet(tuple(names))
            except ValueError as e:
                raise ParseError(str(e), line=number, column=offset + 1)
            continue
        if stripped.startswith("g:"):
            parts = stripped[2:].split()
            if len(parts) != 1:
                raise ParseError("header 'g:' expects one element name", line=number, column=offset + 1)
            g = parts[0]
            continue

        token = stripped
        if " " in token or "\t" in token:
            raise ParseError(f"unexpected whitespace inside token {token!r}", line=number,
                             column=offset + 1 + min(i for i, c in enumerate(token) if c in " \t"))
        for col, char in enumerate(token):
            if char not in "+-0":
                raise ParseError(f"invalid sign character {char!r}", line=number, column=offset + col + 1)
        if ground is None:
            ground = GroundSet.default(len(token))
        if len(token) != len(ground):
            raise ParseError(f"token has length {len(token)}, expected {len(ground)}",
                             line=number, column=offset + 1)
        if token in seen:
            duplicates.append(token)
            continue
        seen.add(token)
        vectors.append(SignVector.from_token(token, ground, line=number))

    if not vectors:
        raise EmptySystem("sign system has no vectors")
    if duplicates:
        logger.warning(f"중복 벡터 {len(duplicates)}개를 제거했습니다: {', '.join(duplicates)}")
    if g is not None and g not in ground.names:
        raise ParseError(f"g names unknown element {g!r}", key="g")
    return SvDocument(SignSystem(ground, frozenset(vectors)), g, tuple(duplicates))


def parse_system(text: str) -> SignSystem:
    return parse_document(text).system


def serialize_system(system: SignSystem, g: Optional[str] = None) -> str:
    """정렬된 토큰 줄로 직렬화합니다. 이름이 기본값(1..n)이 아니면 헤더를 씁니다."""
    lines = []
    if system.ground != GroundSet.default(len(system.ground)):
        lines.append("elements: " + " ".join(system.ground.names))
    if g is not None:
        lines.append(f"g: {g}")
    lines.extend(system.renders())
    return "\n".join(lines) + "\n"


def read_system(path: str) -> SvDocument:
    logger.info(f".sv 파일 읽기: {path}")
    with open(path, encoding="utf-8") as fh:
        return parse_document(fh.read())


def write_system(path: str, system: SignSystem, g: Optional[str] = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_system(system, g))
    logger.info(f".sv 파일 저장: {path} ({len(system)} vectors)")


# 유리수 행렬
def parse_matrix(text: str) -> RationalMatrix:
    """첫 줄 `d n`, 이후 행 우선 순서의 `p/q` 또는 정수"""
    tokens: List[Tuple[str, int, int]] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        for match in re.finditer(r"\S+", line):
            tokens.append((match.group(0), number, match.start() + 1))
    if len(tokens) < 2:
        raise ParseError("matrix header 'd n' missing", line=1, column=1)

    def dimension(index: int) -> int:
        token, line, col = tokens[index]
        if not token.isdigit():
            raise ParseError(f"dimension {token!r} is not a non-negative integer", line=line, column=col)
        return int(token)

    d, n = dimension(0), dimension(1)
    body = tokens[2:]
    if len(body) != d * n:
        line, col = (body[-1][1], body[-1][2]) if body else (tokens[1][1], tokens[1][2])
        raise ParseError(f"expected {d * n} entries, found {len(body)}", line=line, column=col)
    values = []
    for token, line, col in body:
        if not _ENTRY.match(token):
            raise ParseError(f"entry {token!r} is not an integer or p/q", line=line, column=col)
        try:
            values.append(Fraction(token))
        except ZeroDivisionError:
            raise ParseError(f"entry {token!r} has a zero denominator", line=line, column=col)
    rows = tuple(tuple(values[i * n:(i + 1) * n]) for i in range(d))
    return RationalMatrix(d, n, rows)


def serialize_matrix(matrix: RationalMatrix) -> str:
    lines = [f"{matrix.rows} {matrix.cols}"]
    for row in matrix.entries:
        lines.append(" ".join(str(x) for x in row))
    return "\n".join(lines) + "\n"
