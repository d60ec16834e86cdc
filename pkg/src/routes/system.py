"""
System-related routes.
"""

from datetime import datetime

from fastapi import APIRouter, Depends

from ..config import AppConfig
from ..dependencies import get_app_config

router = APIRouter(tags=["system"])


@router.get("/")
async def root(config: AppConfig = Depends(get_app_config)):
    """Root endpoint."""
    return {"message": config.service.name, "version": config.service.version}


@router.get("/health")
async def health_check(config: AppConfig = Depends(get_app_config)):
    """Health check endpoint."""
    return {
        "status": "healthy",
        "timestamp": datetime.now().isoformat(),
        "workers": config.runtime.worker_count,
    }
