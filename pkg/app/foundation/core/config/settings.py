import os
from dotenv import load_dotenv

# 환경 변수 로드
env = os.getenv("APP_ENV", "development")
if env == "development":
    load_dotenv(".env")
else:
    load_dotenv()

_DEFAULT_FIXTURE_DIR = os.path.join(
    os.path.dirname(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))),
    "domin", "om", "repository", "fixtures",
)


class Settings:
    APP_ENV: str = env
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")

    # 지수적 열거(부호 패턴, 볼록집합, 표본)의 안전 상한 |U|
    OM_MAX_UNIVERSE: int = int(os.getenv("OM_MAX_UNIVERSE", "12"))

    # 코너 필링에서 셀당 시도할 사전식 국소화 수
    OM_PEEL_CANDIDATES: int = int(os.getenv("OM_PEEL_CANDIDATES", "4"))

    OM_FIXTURE_DIR: str = os.getenv("OM_FIXTURE_DIR", _DEFAULT_FIXTURE_DIR)

    GATEWAY_SERVICE_URL: str = os.getenv("GATEWAY_SERVICE_URL", "http://gateway-service:8080")


settings = Settings()
