from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from app.routers import decompose, verify
from settings import configure_logging, get_settings

# For Monitoring
from prometheus_fastapi_instrumentator import Instrumentator
from prometheus_client import generate_latest, CONTENT_TYPE_LATEST
from fastapi.responses import Response
import logging
import sys
import os

# Add monitor-source to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'monitor-source'))
from collector import start_metrics_collector, stop_metrics_collector
import metrics  # registers the custom metrics with the default registry

configure_logging(get_settings().log_level)
logger = logging.getLogger(__name__)

app = FastAPI(
    title="MPLD API",
    description="Multiple patterning layout decomposition service",
    version="1.0.0"
)

# For Monitoring - Set up instrumentator but don't expose yet
instrumentator = Instrumentator()
instrumentator.instrument(app)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["GET", "POST", "OPTIONS"],
    allow_headers=["*"],
)

app.include_router(decompose.router)
app.include_router(verify.router)


# Startup and shutdown events for metrics collector
@app.on_event("startup")
async def startup_event():
    """Start metrics collection on application startup"""
    logger.info("Starting metrics collector")
    await start_metrics_collector(refresh_interval=30)


@app.on_event("shutdown")
async def shutdown_event():
    """Stop metrics collection on application shutdown"""
    stop_metrics_collector()
    logger.info("Metrics collector stopped")


@app.get("/")
async def root():
    return {"message": "Welcome to the MPLD API"}


@app.get("/health")
async def health_check():
    settings = get_settings()
    return {
        "status": "healthy",
        "message": "API is running",
        "engine": settings.engine,
        "k": settings.k,
    }


@app.get("/metrics")
async def get_metrics():
    """Custom metrics endpoint that includes both instrumentator and custom metrics"""
    return Response(generate_latest(), media_type=CONTENT_TYPE_LATEST)


if __name__ == "__main__":
    import uvicorn

    logger.info("Starting MPLD server")

    uvicorn.run(
        "main:app",
        host="0.0.0.0",
        port=8001,
        reload=True,
        log_level="info"
    )
