from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from datetime import datetime, timezone
from typing import Callable
from fastapi.responses import HTMLResponse
import logging

from app.api.om.om_router import router as om_router
from app.foundation.core.config.settings import settings
from app.foundation.infra.logger import LOG_FORMAT

# 로깅 설정
logging.basicConfig(level=settings.LOG_LEVEL, format=LOG_FORMAT)
logger = logging.getLogger(__name__)

app = FastAPI(title="om-compression")

# CORS 설정
app.add_middleware(
    CORSMiddleware,
    allow_origins=[settings.GATEWAY_SERVICE_URL],
    allow_credentials=True,
    allow_methods=["GET", "POST"],
    allow_headers=["*"],
)

# 라우터 등록
app.include_router(om_router)

current_time: Callable[[], str] = lambda: datetime.now(timezone.utc).strftime("%Y-%m-%d %H:%M:%S")


@app.on_event("startup")
async def startup_event():
    logger.info(f"Starting application in {settings.APP_ENV} environment (OM_MAX_UNIVERSE={settings.OM_MAX_UNIVERSE})")


@app.get("/")
async def home():
    logger.info("Accessing home page")
    content = f"""
<body>
<div style="width: 400px; margin: 50 auto;">
    <h1>OM 압축 스킴 API</h1>
    <p>Oriented matroids, OM programming and sample compression schemes</p>
    <p>Current time (UTC): {current_time()}</p>
    <p>Environment: {settings.APP_ENV}</p>
</div>
</body>
"""
    return HTMLResponse(content=content)
