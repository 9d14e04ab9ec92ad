from typing import Any, Callable, Dict, List, Mapping, Optional

from fastapi import HTTPException

from app.domin.om.models.exceptions import OmError, UsageError
from app.domin.om.repository import scheme_repository
from app.domin.om.service.om_service import OmService
from app.foundation.infra.logger import get_logger

logger = get_logger(__name__)


def _reject_g(command: str, g: Optional[str]) -> None:
    # 모서리와 필링은 OM / COM 전체에 대해 정의됩니다
    if g is not None:
        raise UsageError(f"{command} does not take a distinguished element g")


class OmController:
    """HTTP 라우터와 CLI가 함께 쓰는 진입점.

    raise_http=True면 도메인 오류를 HTTPException으로 바꾸고, False면 그대로 올려 CLI가 종료 코드를 정합니다.
    """

    def __init__(self, max_universe: Optional[int] = None, raise_http: bool = True):
        logger.info("OmController가 초기화되었습니다.")
        self.service = OmService(max_universe)
        self.raise_http = raise_http

    def _respond(self, label: str, message: str, action: Callable[[], Any]) -> Dict[str, Any]:
        logger.info(f"{label} 요청")
        try:
            data = action()
            logger.info(f"{label} 성공")
            return {"status": "success", "message": message, "data": data}
        except OmError as e:
            logger.error(f"{label} 실패 ({type(e).__name__}): {e}")
            if not self.raise_http:
                raise
            raise HTTPException(status_code=e.http_status, detail={"error": type(e).__name__, "message": str(e)})
        except HTTPException:
            raise
        except Exception as e:
            logger.error(f"{label} 기타 오류: {e}")
            if not self.raise_http:
                raise
            raise HTTPException(status_code=500, detail=str(e))

    # 구조 조회
    def classify(self, text: str, format: str = "auto", g: Optional[str] = None):
        return self._respond("분류", "공리 검사가 완료되었습니다.",
                             lambda: self.service.classify(self.service.load(text, format, g)).model_dump())

    def topes(self, text: str, format: str = "auto", g: Optional[str] = None):
        return self._respond("topes 조회", "topes를 조회했습니다.",
                             lambda: self.service.topes(self.service.load(text, format, g)).model_dump())

    def cocircuits(self, text: str, format: str = "auto", g: Optional[str] = None):
        return self._respond("cocircuits 조회", "cocircuits를 조회했습니다.",
                             lambda: self.service.cocircuits(self.service.load(text, format, g)).model_dump())

    def rank(self, text: str, format: str = "auto", g: Optional[str] = None):
        return self._respond("rank 조회", "rank를 계산했습니다.",
                             lambda: self.service.rank(self.service.load(text, format, g)).model_dump())

    def vc(self, text: str, format: str = "auto", g: Optional[str] = None):
        return self._respond("VC 차원", "VC 차원을 계산했습니다.",
                             lambda: self.service.vc(self.service.load(text, format, g)).model_dump())

    # 프로그램 / 모서리 / 필링
    def solve_program(self, text: str, g: str, f: str, constraints: Mapping[str, str]):
        def action():
            document = self.service.load(text, "auto")
            return self.service.solve_program(document, g, f, constraints).model_dump()
        return self._respond("OM 프로그램", "최적 cocircuit를 찾았습니다.", action)

    def corner(self, text: str, format: str = "auto", g: Optional[str] = None):
        def action():
            _reject_g("corner", g)
            return self.service.corner(self.service.load(text, format)).model_dump()
        return self._respond("모서리", "모서리를 찾았습니다.", action)

    def peel(self, text: str, format: str = "auto", g: Optional[str] = None):
        def action():
            _reject_g("peel", g)
            return self.service.peel(self.service.load(text, format)).model_dump()
        return self._respond("코너 필링", "코너 필링을 찾았습니다.", action)

    # 스킴
    def build_scheme(self, text: str, format: str = "auto", g: Optional[str] = None):
        def action():
            scheme, trace = self.service.build_scheme(self.service.load(text, format, g))
            return {"scheme": scheme_repository.to_document(scheme).model_dump(),
                    "document": scheme_repository.export_scheme(scheme),
                    "trace": trace.splitlines()}
        return self._respond("스킴 빌드", "압축 스킴을 만들었습니다.", action)

    def verify_scheme(self, class_text: str, scheme_text: str, size: int, g: Optional[str] = None):
        def action():
            document = self.service.load(class_text, "auto", g)
            return self.service.verify_scheme(document, scheme_text, size).model_dump()
        return self._respond("스킴 검증", "스킴 검증이 끝났습니다.", action)

    # 인스턴스
    def instances(self, keys: List[str], matrix: bool = False):
        return self._respond("인스턴스 생성", "인스턴스를 생성했습니다.",
                             lambda: self.service.instance_texts(keys, matrix))

    def instance(self, key: str):
        def action():
            instance = self.service.instance(key)
            texts = self.service.instance_texts([key], matrix=True)[key]
            affine = instance.affine
            return {"key": instance.key, "notes": instance.notes,
                    "g": affine.ground.names[affine.g] if affine is not None else None,
                    "covectors": len(instance.structure.covectors), "topes": len(instance.structure.topes),
                    "rank": instance.structure.rank, **texts}
        return self._respond("인스턴스 조회", "인스턴스를 조회했습니다.", action)
