"""
Route modules for ATOMS Lab.
"""

from .experiments import router as experiments_router
from .registry import router as registry_router
from .system import router as system_router

__all__ = [
    "system_router",
    "registry_router",
    "experiments_router",
]
