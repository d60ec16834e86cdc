"""
Registry routes describing the available families, selectors and the default grid.
"""

from fastapi import APIRouter, Depends

from ..config import GridConfig
from ..dependencies import get_default_grid, get_estimator_manager, get_selector_manager
from ..model_zoo import EstimatorManager, candidate_specs, grid_size, specifications
from ..models import RegistryEntry
from ..selectors import SelectorManager

router = APIRouter(prefix="/registry", tags=["registry"])


@router.get("/families")
async def get_families(manager: EstimatorManager = Depends(get_estimator_manager)):
    """Get all registered model families."""
    families = [
        RegistryEntry(name=e.name, description=e.description, parameters=e.parameters)
        for e in manager.estimators.values()
    ]
    return {"families": families}


@router.get("/selectors")
async def get_selectors(manager: SelectorManager = Depends(get_selector_manager)):
    """Get the default selector line-up."""
    return {"selectors": manager.get_all_selector_infos()}


@router.get("/grid")
async def get_grid(grid: GridConfig = Depends(get_default_grid)):
    """Get the default candidate grid."""
    return {
        "count": grid_size(grid),
        "specifications": [s.specification_label for s in specifications(grid)],
        "window_exponents": grid.window_exponents,
        "candidates": [s.label for s in candidate_specs(grid)],
    }
