"""
Evaluation regimes: user windows by ordinal period or calendar label, plus
the NBER recession presets.
"""

import logging
from typing import Iterable, List, Mapping, Optional, Sequence, Union

from ..config import RegimeSpec
from .r2 import RegimeWindow, year_month_key

logger = logging.getLogger(__name__)

NBER_REGIMES = (
    RegimeSpec(label="Gulf War", start="1990-06", end="1990-10"),
    RegimeSpec(label="2001 Recession", start="2001-05", end="2001-10"),
    RegimeSpec(label="Financial Crisis", start="2007-11", end="2009-06"),
)


def _bound(value: Union[int, str]) -> Optional[int]:
    if isinstance(value, int):
        return None
    return year_month_key(value)


def resolve_regime(
    spec: RegimeSpec,
    labels: Mapping[int, str],
    periods: Sequence[int],
) -> Optional[RegimeWindow]:
    """Clip a regime to the evaluated periods; None when it covers none of them."""
    if isinstance(spec.start, int) and isinstance(spec.end, int):
        covered = [t for t in periods if spec.start <= t <= spec.end]
    else:
        start, end = _bound(spec.start), _bound(spec.end)
        if start is None or end is None:
            logger.warning(f"Regime '{spec.label}' mixes ordinal and calendar bounds or has unparsable labels")
            return None
        keys = {t: year_month_key(labels.get(t, "")) for t in periods}
        covered = [t for t, key in keys.items() if key is not None and start <= key <= end]
    if not covered:
        logger.debug(f"Regime '{spec.label}' does not overlap the evaluation span")
        return None
    return RegimeWindow(spec.label, min(covered), max(covered))


def resolve_regimes(
    specs: Iterable[RegimeSpec],
    labels: Mapping[int, str],
    periods: Sequence[int],
    use_nber: bool = True,
) -> List[RegimeWindow]:
    """User regimes followed by any NBER preset the panel's calendar labels cover."""
    specs = list(specs)
    if use_nber:
        specs += [preset for preset in NBER_REGIMES if preset.label not in {s.label for s in specs}]
    windows = []
    for spec in specs:
        window = resolve_regime(spec, labels, list(periods))
        if window is not None:
            windows.append(window)
    return windows
