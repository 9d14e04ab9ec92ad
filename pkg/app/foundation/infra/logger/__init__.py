from app.foundation.infra.logger.logger import get_logger, LOG_FORMAT

__all__ = ['get_logger', 'LOG_FORMAT']
