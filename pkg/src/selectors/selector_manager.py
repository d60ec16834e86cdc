from typing import Dict, List, Type

from ..config import SelectorSettings, default_selectors
from ..exceptions import ConfigurationError
from ..models import SelectorKind
from .atoms import AtomsSelector
from .base_selector import BaseSelector
from .baselines import FixedCVSelector, FixedValSelector


class SelectorManager:
    def __init__(self):
        self.selector_types = self._get_selector_types()

    def _get_selector_types(self) -> Dict[SelectorKind, Type[BaseSelector]]:
        """Map selector kinds to their implementations."""
        return {
            SelectorKind.ATOMS_MSE: AtomsSelector,
            SelectorKind.ATOMS_R2: AtomsSelector,
            SelectorKind.FIXED_VAL: FixedValSelector,
            SelectorKind.FIXED_CV: FixedCVSelector,
        }

    def get_all_selector_infos(self):
        """Describe the default selector line-up."""
        return {selector.name: selector.description for selector in self.build_all(default_selectors())}

    def build(self, settings: SelectorSettings) -> BaseSelector:
        if settings.kind not in self.selector_types:
            raise ConfigurationError(f"Selector kind {settings.kind} not found")
        return self.selector_types[settings.kind](settings)

    def build_all(self, settings: List[SelectorSettings]) -> List[BaseSelector]:
        return [self.build(s) for s in settings]
