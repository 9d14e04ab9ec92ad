from typing import Optional


class OmError(ValueError):
    """도메인 오류의 기반 클래스. CLI 종료 코드와 HTTP 상태를 함께 가집니다."""
    exit_code: int = 3
    http_status: int = 422


# 사용 오류 (exit 1)
class UsageError(OmError):
    exit_code = 1
    http_status = 400


class UnknownKey(UsageError):
    pass


# 파싱 오류 (exit 2)
class ParseError(OmError):
    exit_code = 2

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None,
                 key: Optional[str] = None):
        self.line = line
        self.column = column
        self.key = key
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        if key is not None:
            where.append(f"key {key!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class EmptySystem(OmError):
    exit_code = 2


# 검증 오류 (exit 3)
class GroundMismatch(OmError):
    pass


class ElementNotFound(OmError):
    pass


class VectorNotInSystem(OmError):
    pass


class NotGraded(OmError):
    pass


class NotPartialCube(OmError):
    def __init__(self, message: str, witness=None):
        self.witness = witness
        super().__init__(message)


class UnrealizableSample(OmError):
    pass


class UnknownImage(OmError):
    pass


class InvalidLocalization(OmError):
    pass


class NotGeneralPosition(OmError):
    pass


class NotSimple(OmError):
    pass


class NotOrientedMatroid(OmError):
    pass


class OrientationAmbiguous(OmError):
    pass


class RecoveryFailed(OmError):
    pass


class DegenerateInput(OmError):
    pass


class UniverseTooLarge(OmError):
    pass


class ImageCollision(OmError):
    pass


class SearchExhausted(OmError):
    pass


class NoCornerFound(OmError):
    pass


class NoOptimum(OmError):
    pass


# 정당한 부정 결과 (exit 4)
class NegativeResult(OmError):
    exit_code = 4
    http_status = 409


class NoPeelingFound(NegativeResult):
    pass


class Unbounded(NegativeResult):
    pass


class EmptyPolyhedron(NegativeResult):
    pass


class NotReconstructible(OmError):
    def __init__(self, message: str, report=None):
        self.report = report
        super().__init__(message)


class SchemeInvalid(OmError):
    def __init__(self, message: str, report=None):
        self.report = report
        super().__init__(message)
