import pytest

from app.domin.om.models.sign_vector import GroundSet, SignSystem, SignVector
from app.domin.om.repository.scheme_repository import fixture_path, load_fixture_system
from app.domin.om.service.om_service import OmService

# 한 직선 위 네 점의 개념류
PAPER4_TOPES = ["++++", "+++-", "++--", "+---", "----", "---+", "--++", "-+++"]

# 위 OM의 g=+ 반공간 (COM이지만 OM은 아님)
HALFSPACE = ["++++", "+++-", "++--", "+---", "+0--", "++0-", "+++0"]


@pytest.fixture(scope="session")
def service() -> OmService:
    return OmService()


@pytest.fixture(scope="session")
def axioms(service):
    return service.axioms


@pytest.fixture(scope="session")
def graphs(service):
    return service.graphs


@pytest.fixture(scope="session")
def extensions(service):
    return service.extensions


@pytest.fixture(scope="session")
def programs(service):
    return service.programs


@pytest.fixture(scope="session")
def reconstructor(service):
    return service.reconstructor


@pytest.fixture(scope="session")
def instance(service):
    """이름 붙은 인스턴스를 한 번씩만 만듭니다."""
    cache = {}

    def get(key: str):
        if key not in cache:
            cache[key] = service.instance(key)
        return cache[key]
    return get


@pytest.fixture(scope="session")
def paper4(axioms):
    return axioms.structure(load_fixture_system("paper4").system)


@pytest.fixture
def system():
    """토큰 목록으로 SignSystem을 만드는 함수"""
    def make(*tokens: str, names=None) -> SignSystem:
        ground = GroundSet(tuple(names)) if names else GroundSet.default(len(tokens[0]))
        return SignSystem(ground, frozenset(SignVector.from_token(t, ground) for t in tokens))
    return make


@pytest.fixture(scope="session")
def paper4_path() -> str:
    return fixture_path("paper4")


@pytest.fixture(scope="session")
def table1_path() -> str:
    return fixture_path("table1")


def tokens(vectors):
    return sorted(v.token for v in vectors)
