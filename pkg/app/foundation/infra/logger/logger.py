import logging

from app.foundation.core.config.settings import settings

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def get_logger(name: str) -> logging.Logger:
    """모듈 로거를 반환합니다. 핸들러가 없으면 공통 포맷의 StreamHandler를 붙입니다."""
    logger = logging.getLogger(name)
    logger.setLevel(settings.LOG_LEVEL)

    # 핸들러가 없으면 추가
    if not logger.handlers and not logging.getLogger().handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)
    return logger
