from fastapi import APIRouter, Query

from app.domin.om.controller.om_controller import OmController
from app.domin.om.models.schemas import InstanceRequest, ProgramRequest, SchemeVerifyRequest, SystemRequest

router = APIRouter(prefix="/om", tags=["oriented-matroid"])


def _controller(payload: SystemRequest = None) -> OmController:
    return OmController(max_universe=payload.max_universe if payload is not None else None)


@router.post("/classify", summary="공리 검사")
async def classify(payload: SystemRequest):
    """부호 시스템을 OM / COM / 둘 다 아님으로 분류합니다."""
    return _controller(payload).classify(payload.text, payload.format, payload.g)


@router.post("/topes", summary="topes 조회")
async def topes(payload: SystemRequest):
    return _controller(payload).topes(payload.text, payload.format, payload.g)


@router.post("/cocircuits", summary="cocircuits 조회")
async def cocircuits(payload: SystemRequest):
    return _controller(payload).cocircuits(payload.text, payload.format, payload.g)


@router.post("/rank", summary="rank 조회")
async def rank(payload: SystemRequest):
    """g가 주어지면 아핀 rank도 함께 돌려줍니다."""
    return _controller(payload).rank(payload.text, payload.format, payload.g)


@router.post("/vc", summary="VC 차원")
async def vc(payload: SystemRequest):
    return _controller(payload).vc(payload.text, payload.format, payload.g)


@router.post("/program-solve", summary="OM 프로그램 풀이")
async def program_solve(payload: ProgramRequest):
    return _controller().solve_program(payload.text, payload.g, payload.f, payload.constraints)


@router.post("/corner", summary="모서리 찾기")
async def corner(payload: SystemRequest):
    return _controller(payload).corner(payload.text, payload.format, payload.g)


@router.post("/peel", summary="COM 코너 필링")
async def peel(payload: SystemRequest):
    return _controller(payload).peel(payload.text, payload.format, payload.g)


@router.post("/scheme-build", summary="압축 스킴 생성")
async def scheme_build(payload: SystemRequest):
    return _controller(payload).build_scheme(payload.text, payload.format, payload.g)


@router.post("/scheme-verify", summary="압축 스킴 검증")
async def scheme_verify(payload: SchemeVerifyRequest):
    return _controller().verify_scheme(payload.class_text, payload.scheme, payload.size, payload.g)


@router.post("/gen", summary="이름 붙은 인스턴스 생성")
async def gen(payload: InstanceRequest):
    return _controller().instances(payload.keys, payload.matrix)


@router.get("/instances/{key}", summary="이름 붙은 인스턴스 조회")
async def get_instance(key: str, matrix: bool = Query(True, description="행렬 텍스트 포함 여부")):
    data = _controller().instance(key)
    if not matrix:
        data["data"].pop("matrix", None)
    return data
