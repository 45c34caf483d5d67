"""Access to the versioned JSON schemas shipped in ``scla/schemas``."""

import json
import logging
from functools import lru_cache
from importlib import resources
from typing import Any, Dict, Iterable, List, Tuple, Union

from jsonschema import Draft202012Validator

logger = logging.getLogger(__name__)

SCHEMA_FILES = {
    "scenario": "scenario.schema.json",
    "properness-report": "properness-report.schema.json",
    "rer-breakdown": "rer-breakdown.schema.json",
    "sil-budget": "sil-budget.schema.json",
    "sim-report": "sim-report.schema.json",
    "sim-sweep": "sim-sweep.schema.json",
}


@lru_cache(maxsize=None)
def load_schema(name: str) -> Dict[str, Any]:
    """Load a schema by short name (``scenario``, ``sim-report``, ...)."""
    filename = SCHEMA_FILES[name]
    text = resources.files("scla").joinpath("schemas", filename).read_text(encoding="utf-8")
    return json.loads(text)


def format_path(path: Iterable[Union[str, int]]) -> str:
    """Render a jsonschema error path as ``hops[1].bep``."""
    rendered = ""
    for part in path:
        if isinstance(part, int):
            rendered += f"[{part}]"
        else:
            rendered += f".{part}" if rendered else str(part)
    return rendered or "<root>"


def validation_errors(document: Any, name: str) -> List[Tuple[str, str]]:
    """All (field path, message) pairs, sorted by path."""
    validator = Draft202012Validator(load_schema(name))
    errors = [(format_path(e.absolute_path), e.message) for e in validator.iter_errors(document)]
    return sorted(errors)
