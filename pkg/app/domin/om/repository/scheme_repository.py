import json
import os
import re
from typing import Dict, FrozenSet

from pydantic import ValidationError

from app.domin.om.models.exceptions import ParseError, UnknownKey
from app.domin.om.models.schemas import SchemeDocument
from app.domin.om.models.sign_vector import GroundSet, SignVector
from app.domin.om.models.structures import CompressionScheme
from app.domin.om.repository.sign_system_repository import SvDocument, read_system
from app.foundation.core.config.settings import settings
from app.foundation.infra.logger import get_logger

logger = get_logger(__name__)

_SUBSET_KEY = re.compile(r"^\{\s*(\d+(\s*,\s*\d+)*)?\s*\}$")


def subset_key(ids: FrozenSet[int]) -> str:
    """0부터 시작하는 id 집합을 문서 표기 "{1,4}"로 바꿉니다."""
    return "{" + ",".join(str(e + 1) for e in sorted(ids)) + "}"


def parse_subset_key(key: str, size: int) -> FrozenSet[int]:
    match = _SUBSET_KEY.match(key)
    if not match:
        raise ParseError("malformed element subset", key=key)
    if not match.group(1):
        return frozenset()
    ids = [int(x) for x in match.group(1).split(",")]
    return frozenset(_check_id(i, size, key) for i in ids)


def _check_id(i: int, size: int, key: str) -> int:
    if not 1 <= i <= size:
        raise ParseError(f"element id {i} outside 1..{size}", key=key)
    return i - 1


def _token(text: str, ground: GroundSet, key: str) -> SignVector:
    if len(text) != len(ground) or any(c not in "+-0" for c in text):
        raise ParseError(f"{text!r} is not a sign vector over {len(ground)} elements", key=key)
    return SignVector.from_token(text, ground)


def to_document(scheme: CompressionScheme) -> SchemeDocument:
    return SchemeDocument(
        universe=list(scheme.universe.names),
        size=scheme.declared_size,
        alpha={s.token: [e + 1 for e in sorted(v)] for s, v in scheme.alpha.items()},
        beta={subset_key(v): t.token for v, t in scheme.beta.items()},
    )


def export_scheme(scheme: CompressionScheme) -> str:
    """정렬된 키의 JSON 문서"""
    return json.dumps(to_document(scheme).model_dump(), sort_keys=True, indent=2) + "\n"


def import_scheme(text: str) -> CompressionScheme:
    """스킴 문서를 읽어 CompressionScheme으로 만듭니다.

    Args:
        text: universe / size / alpha / beta 키를 가진 JSON 텍스트

    Raises:
        ParseError: 형식 오류. 문제 된 키를 함께 알려줍니다.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", line=e.lineno, column=e.colno)
    try:
        document = SchemeDocument.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        key = ".".join(str(p) for p in first["loc"]) or None
        raise ParseError(first["msg"], key=key)

    ground = GroundSet(tuple(document.universe))
    n = len(ground)
    alpha: Dict[SignVector, FrozenSet[int]] = {}
    for token, ids in document.alpha.items():
        sample = _token(token, ground, token)
        alpha[sample] = frozenset(_check_id(i, n, token) for i in ids)
    beta: Dict[FrozenSet[int], SignVector] = {}
    for key, token in document.beta.items():
        image = parse_subset_key(key, n)
        tope = _token(token, ground, key)
        if not tope.is_tope:
            raise ParseError(f"beta value {token!r} is not a full sign vector", key=key)
        beta[image] = tope
    for sample, image in sorted(alpha.items(), key=lambda kv: kv[0].token):
        if image not in beta:
            raise ParseError("alpha image has no beta entry", key=subset_key(image))
    return CompressionScheme(ground, alpha, beta, document.size)


def read_scheme(path: str) -> CompressionScheme:
    logger.info(f"스킴 문서 읽기: {path}")
    with open(path, encoding="utf-8") as fh:
        return import_scheme(fh.read())


def write_scheme(path: str, scheme: CompressionScheme) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(export_scheme(scheme))
    logger.info(f"스킴 문서 저장: {path} (alpha {len(scheme.alpha)}, beta {len(scheme.beta)})")


# 내장 fixture
_FIXTURES = {"paper4": "paper4.sv", "table1": "table1.json"}


def fixture_path(key: str) -> str:
    if key not in _FIXTURES:
        raise UnknownKey(f"unknown fixture {key!r}; known: {', '.join(sorted(_FIXTURES))}")
    return os.path.join(settings.OM_FIXTURE_DIR, _FIXTURES[key])


def load_fixture_system(key: str = "paper4") -> SvDocument:
    return read_system(fixture_path(key))


def load_fixture_scheme(key: str = "table1") -> CompressionScheme:
    return read_scheme(fixture_path(key))
