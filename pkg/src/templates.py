"""
Report templating with Jinja2, reading templates shipped in src/report_templates.
"""

from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Optional

from jinja2 import Environment, FileSystemLoader, StrictUndefined, TemplateError

from .exceptions import ReportError

TEMPLATE_DIR = Path(__file__).parent / "report_templates"


def format_number(value: Optional[float], digits: int = 4) -> str:
    if value is None:
        return "n/a"
    return f"{value:.{digits}f}"


class TemplateManager:

    def __init__(self, template_dir: Path = TEMPLATE_DIR):
        self.template_dir = Path(template_dir)
        self.env = Environment(
            loader=FileSystemLoader(str(self.template_dir)),
            undefined=StrictUndefined,
            trim_blocks=True,
            lstrip_blocks=True,
            keep_trailing_newline=True,
        )
        self.env.filters["num"] = format_number

    def render(self, template_id: str, variables: Dict[str, Any]) -> str:
        """Render a template with the given variables."""
        try:
            return self.env.get_template(template_id).render(variables)
        except TemplateError as e:
            raise ReportError(f"Error rendering template '{template_id}': {e}", {"template": template_id})

    def get_all_template_ids(self) -> List[str]:
        """Get all template IDs in the templates directory."""
        return sorted(f.name for f in self.template_dir.glob("*.j2") if f.is_file())


@lru_cache()
def get_template_manager() -> TemplateManager:
    """Get a template manager that reads from the packaged templates directory."""
    return TemplateManager()
