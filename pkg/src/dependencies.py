"""
Dependency injection functions for FastAPI.
"""

from functools import lru_cache

from .config import AppConfig, GridConfig, get_config
from .model_zoo import EstimatorManager
from .selectors import SelectorManager


# Configuration dependency
@lru_cache()
def get_app_config() -> AppConfig:
    """Get application configuration with caching."""
    return get_config()


@lru_cache()
def get_estimator_manager() -> EstimatorManager:
    """Get the model family registry."""
    return EstimatorManager()


@lru_cache()
def get_selector_manager() -> SelectorManager:
    """Get the selector registry."""
    return SelectorManager()


def get_default_grid() -> GridConfig:
    """Get the default candidate grid."""
    return GridConfig()
